//! The braid worked example, end to end: Drinfeld–Kohno algebras 𝔭ₙ(N), the
//! KZ one-form ω = Σ_{i<j} dlog(x_i−x_j)·X_{ij}, geometric realizations of
//! the braid generators in the ordered configuration space, and holonomy of
//! braid words landing in Σₙ ⋉ exp 𝔭ₙ(N).
//!
//! Conventions:
//!
//! * **Configuration space.** Points of the ordered configuration space are
//!   (x_1,…,x_n) ∈ ℂⁿ with distinct coordinates; the basepoint is (1,…,n) on
//!   the real line. The symmetric group acts by permuting coordinates, and
//!   the ordered space is the Σₙ-cover of the unordered one — so lifts of
//!   braids are constructed directly and no analytic continuation is needed.
//! * **Generator geometry.** σ_i exchanges the strands at positions i, i+1
//!   counterclockwise along arcs of radius ½ about their midpoint. Because a
//!   path segment moves one coordinate at a time, the exchange runs in three
//!   phases: strand i dips a quarter arc to the lower parking point, strand
//!   i+1 crosses along its full upper semicircle, strand i completes the
//!   lower semicircle. Minimum pairwise strand distance along the word is
//!   √2/2, comfortably clear of the transport module's singularity guard.
//! * **Normalization.** ω carries no 1/(2πi) factor; holonomy logarithms
//!   therefore contain explicit 2πi factors (the full twist in B₂ is
//!   exp(2πi X₁₂)). Users comparing against unit-normalized KZ conventions
//!   must rescale.
//! * **Sheet bookkeeping.** A word's lift is assembled letter by letter: the
//!   standard generator path is translated by the coordinate permutation of
//!   the prefix permutation-so-far. With the group law "apply left factor
//!   first", both the deck translations and the coefficient maps
//!   Ad(g): X_{ij} ↦ X_{g⁻¹(i) g⁻¹(j)} are left actions, and the pair
//!   (ρ(γ), Ad(ρ(γ)⁻¹)·T(γ̃)) is multiplicative for the semidirect law
//!   (s₁,u₁)(s₂,u₂) = (s₁s₂, Ad(s₂⁻¹)(u₁)·u₂).

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::envelope::{Envelope, EnvelopeError};
use crate::freelie::{
    nilpotent_quotient, witt_dims, BracketExpr, Generator, GeneratorAction, LieError,
    LiePresentation, NilpotentQuotient,
};
use crate::groups::{GroupError, SemidirectContext, SemidirectElement, SymmetricGroup};
use crate::linalg::{sparse_from_entries, SparseVec};
use crate::rational::{rat, Rat};
use crate::transport::{
    check_integrability, transport, AffineMap, LieValuedOneForm, OdeOptions, PiecewisePath,
    ScalarOneForm, TransportError,
};

#[derive(Debug, Error)]
pub enum BraidError {
    #[error("invalid braid word: {0}")]
    BadWord(String),
    #[error("braid index {index} out of range for {n} strands")]
    BadIndex { index: usize, n: usize },
    #[error("strand count mismatch: word has {word}, system has {system}")]
    StrandMismatch { word: usize, system: usize },
    #[error("KZ form failed the flatness check: {0}")]
    NotIntegrable(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
}

// ---------------------------------------------------------------------------
// Braid words.
// ---------------------------------------------------------------------------

/// A word in the braid generators σ_1,…,σ_{n−1}; letters are (generator
/// index, exponent ±1) with 1-based indices, read left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidWord {
    pub n: usize,
    pub letters: Vec<(usize, i32)>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<(usize, i32)>) -> Result<BraidWord, BraidError> {
        if n < 2 {
            return Err(BraidError::BadWord("need at least two strands".into()));
        }
        for &(i, e) in &letters {
            if i == 0 || i >= n {
                return Err(BraidError::BadIndex { index: i, n });
            }
            if e != 1 && e != -1 {
                return Err(BraidError::BadWord(format!("exponent {e} must be ±1")));
            }
        }
        Ok(BraidWord { n, letters })
    }

    /// Parse the CLI syntax `"s1 s2 s1^-1"`.
    pub fn parse(text: &str, n: usize) -> Result<BraidWord, BraidError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let body = tok
                .strip_prefix('s')
                .ok_or_else(|| BraidError::BadWord(format!("token {tok:?} must start with 's'")))?;
            let (idx_str, exp) = match body.split_once('^') {
                None => (body, 1),
                Some((i, "1")) => (i, 1),
                Some((i, "-1")) => (i, -1),
                Some((_, e)) => {
                    return Err(BraidError::BadWord(format!("exponent {e:?} must be 1 or -1")))
                }
            };
            let index: usize = idx_str
                .parse()
                .map_err(|_| BraidError::BadWord(format!("bad generator index in {tok:?}")))?;
            letters.push((index, exp));
        }
        BraidWord::new(n, letters)
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.n != other.n {
            return Err(BraidError::StrandMismatch { word: other.n, system: self.n });
        }
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        BraidWord::new(self.n, letters)
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().map(|&(i, e)| (i, -e)).collect(),
        }
    }

    /// The underlying permutation (image in Σₙ), letters applied left first.
    pub fn permutation(&self, sym: &SymmetricGroup) -> usize {
        let mut s = sym.group.identity;
        for &(i, _) in &self.letters {
            s = sym.group.mul(s, sym.transposition(i - 1));
        }
        s
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(i, e)| if e == 1 { format!("s{i}") } else { format!("s{i}^-1") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

// ---------------------------------------------------------------------------
// Drinfeld–Kohno algebras.
// ---------------------------------------------------------------------------

/// Generator order: pairs (i,j), 0 ≤ i < j < n, lexicographic. The generator
/// X_{ij} has label `pair_index(n, i, j)` in the quotient.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    assert!(i < j && j < n);
    // Pairs (0,1), (0,2), …, (0,n−1), (1,2), …
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// The graded quotient 𝔭ₙ(N) of the free Lie algebra on the X_{ij} by the
/// quadratic infinitesimal-braid relations: [X_{ij}, X_{kl}] = 0 for disjoint
/// pairs and [X_{ij}, X_{ik} + X_{jk}] = 0 for each triple i < j < k.
pub fn drinfeld_kohno(n: usize, trunc: usize) -> Result<NilpotentQuotient, BraidError> {
    if n < 2 {
        return Err(BraidError::BadWord("need at least two strands".into()));
    }
    let ps = pairs(n);
    let name = |i: usize, j: usize| format!("X{}{}", i + 1, j + 1);
    let generators: Vec<Generator> =
        ps.iter().map(|&(i, j)| Generator::new(name(i, j), 1)).collect();

    let gen = |i: usize, j: usize| BracketExpr::gen(&name(i, j));
    let mut relations: Vec<Vec<(Rat, BracketExpr)>> = Vec::new();
    // Disjoint pairs commute.
    for (a, &(i, j)) in ps.iter().enumerate() {
        for &(k, l) in ps.iter().skip(a + 1) {
            if i != k && i != l && j != k && j != l {
                relations.push(vec![(rat(1, 1), BracketExpr::br(gen(i, j), gen(k, l)))]);
            }
        }
    }
    // Triangle relations [X_{ab}, X_{ac} + X_{bc}] for each triple a < b < c,
    // cycled over the three edges (the third is implied but harmless).
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let edges = [(a, b), (a, c), (b, c)];
                for e in 0..3 {
                    let (i, j) = edges[e];
                    let others: Vec<(usize, usize)> =
                        (0..3).filter(|&f| f != e).map(|f| edges[f]).collect();
                    relations.push(vec![
                        (rat(1, 1), BracketExpr::br(gen(i, j), gen(others[0].0, others[0].1))),
                        (rat(1, 1), BracketExpr::br(gen(i, j), gen(others[1].0, others[1].1))),
                    ]);
                }
            }
        }
    }
    let p = LiePresentation { generators, relations, truncation: trunc };
    Ok(nilpotent_quotient(p)?)
}

/// Independent dimension oracle: 𝔭ₙ splits as a graded vector space into
/// free Lie algebras on 1, 2, …, n−1 generators (the kernels of the strand
/// -forgetting maps), so its graded dimensions are the summed Witt numbers.
pub fn pure_braid_dims_oracle(n: usize, trunc: usize) -> Vec<usize> {
    let mut dims = vec![0usize; trunc];
    for j in 1..n {
        let w = witt_dims(&vec![1; j], trunc);
        for d in 0..trunc {
            dims[d] += w[d];
        }
    }
    dims
}

// ---------------------------------------------------------------------------
// Generator paths.
// ---------------------------------------------------------------------------

pub fn basepoint(n: usize) -> Vec<Complex64> {
    (1..=n).map(|k| Complex64::new(k as f64, 0.0)).collect()
}

/// The standard geometric realization of σ_i (1-based): strands i and i+1
/// exchange counterclockwise around their midpoint in three arc phases; all
/// other strands sit still. Returns the path from the basepoint to the
/// transposed basepoint together with the one-line permutation p such that
/// end[j] = basepoint[p[j]].
pub fn generator_path(i: usize, n: usize) -> Result<(PiecewisePath, Vec<usize>), BraidError> {
    if i == 0 || i >= n {
        return Err(BraidError::BadIndex { index: i, n });
    }
    let c = i - 1; // moving coordinates c, c+1
    let m = Complex64::new(i as f64 + 0.5, 0.0);
    let base = basepoint(n);
    let pi = std::f64::consts::PI;
    use crate::transport::PathSegment;

    // Phase 1: strand c dips from angle π to 3π/2 (lower parking point).
    let mut rest1 = base.clone();
    let seg1 = PathSegment::Arc {
        coordinate: c,
        center: m,
        radius: 0.5,
        theta0: pi,
        theta1: 1.5 * pi,
        rest: rest1.clone(),
    };
    // Phase 2: strand c+1 crosses the upper semicircle, angle 0 to π.
    rest1[c] = m + 0.5 * Complex64::new(0.0, 1.5 * pi).exp();
    let seg2 = PathSegment::Arc {
        coordinate: c + 1,
        center: m,
        radius: 0.5,
        theta0: 0.0,
        theta1: pi,
        rest: rest1.clone(),
    };
    // Phase 3: strand c completes the lower semicircle, 3π/2 to 2π.
    let mut rest3 = rest1;
    rest3[c + 1] = m + 0.5 * Complex64::new(0.0, pi).exp();
    let seg3 = PathSegment::Arc {
        coordinate: c,
        center: m,
        radius: 0.5,
        theta0: 1.5 * pi,
        theta1: 2.0 * pi,
        rest: rest3,
    };
    let path = PiecewisePath::new(vec![seg1, seg2, seg3])?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(c, c + 1);
    Ok((path, perm))
}

/// Minimum pairwise strand distance along a configuration-space path,
/// sampled on a uniform grid per segment.
pub fn min_pairwise_distance(path: &PiecewisePath, samples_per_segment: usize) -> f64 {
    let mut best = f64::INFINITY;
    for seg in &path.segments {
        for s in 0..=samples_per_segment {
            let t = s as f64 / samples_per_segment as f64;
            let x = seg.value(t);
            for a in 0..x.len() {
                for b in (a + 1)..x.len() {
                    best = best.min((x[a] - x[b]).norm());
                }
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// The KZ system.
// ---------------------------------------------------------------------------

/// Everything needed to transport braid words at strand count n and
/// truncation N: the Drinfeld–Kohno quotient, its envelope, Σₙ with its
/// validated Ad-action on 𝔭ₙ(N), and the KZ form. Immutable after
/// construction; holonomies of distinct words may run concurrently.
pub struct KzSystem {
    pub n: usize,
    pub trunc: usize,
    pub quotient: NilpotentQuotient,
    pub env: Envelope,
    pub sym: SymmetricGroup,
    pub omega: LieValuedOneForm,
    /// images[g][label] = Ad(g)(x_label), validated as a left action.
    pub images: Vec<Vec<SparseVec>>,
}

/// Holonomy of a braid word: the semidirect element together with the
/// transport diagnostics backing it.
#[derive(Clone, Debug)]
pub struct BraidHolonomy {
    pub element: SemidirectElement,
    pub estimated_error: f64,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    pub pass: bool,
    pub checked: usize,
    pub certificate: Option<String>,
}

impl KzSystem {
    pub fn new(n: usize, trunc: usize) -> Result<KzSystem, BraidError> {
        let quotient = drinfeld_kohno(n, trunc)?;
        let env = Envelope::new(quotient.lie.clone());
        let sym = SymmetricGroup::new(n);
        let ps = pairs(n);
        let omega = LieValuedOneForm {
            terms: ps
                .iter()
                .enumerate()
                .map(|(idx, &(i, j))| {
                    (
                        ScalarOneForm::dlog_difference(n, i, j),
                        sparse_from_entries([(idx, rat(1, 1))]),
                    )
                })
                .collect(),
        };

        // Flatness is a construction invariant.
        let report = check_integrability(&omega, &quotient.lie, n)?;
        if !report.integrable {
            return Err(BraidError::NotIntegrable(
                report.certificate.unwrap_or_else(|| "no certificate".into()),
            ));
        }

        // Ad(g): X_{ij} ↦ X_{g⁻¹(i) g⁻¹(j)}, extended through the quotient.
        // act_matrices also certifies that each permutation preserves the
        // relation ideal.
        let mut images = Vec::with_capacity(sym.group.order());
        for g in 0..sym.group.order() {
            let ginv = &sym.perms[sym.group.inverse[g]];
            let perm: Vec<usize> =
                ps.iter().map(|&(i, j)| {
                    let (a, b) = (ginv[i], ginv[j]);
                    pair_index(n, a.min(b), a.max(b))
                }).collect();
            let action = GeneratorAction { perm, signs: vec![1; ps.len()] };
            let mats = quotient.act_matrices(&action)?;
            let mut table: Vec<SparseVec> = Vec::with_capacity(quotient.lie.dim_total());
            for (d, mat) in mats.iter().enumerate() {
                let offset = quotient.lie.degree_offset(d + 1);
                for col in 0..quotient.lie.dims[d] {
                    let mut img = SparseVec::new();
                    for (row, c) in mat.column(col) {
                        img.insert(offset + row, c);
                    }
                    table.push(img);
                }
            }
            images.push(table);
        }
        // Left-action validation happens once, here.
        SemidirectContext::new(&sym.group, &env, images.clone())?;
        Ok(KzSystem { n, trunc, quotient, env, sym, omega, images })
    }

    /// The validated semidirect context over this system's group and
    /// envelope. (Validation ran in `new`; this constructs directly.)
    pub fn context(&self) -> SemidirectContext<'_> {
        SemidirectContext { group: &self.sym.group, env: &self.env, images: self.images.clone() }
    }

    pub fn generator_lie_id(&self, i: usize, j: usize) -> usize {
        pair_index(self.n, i.min(j), i.max(j))
    }

    /// The lift of a braid word: translated generator paths concatenated,
    /// with the running prefix permutation supplying the deck translations.
    /// Returns the lifted path and the word's permutation ρ(γ). The empty
    /// word has no path (`None`).
    pub fn lifted_path(
        &self,
        word: &BraidWord,
    ) -> Result<(Option<PiecewisePath>, usize), BraidError> {
        if word.n != self.n {
            return Err(BraidError::StrandMismatch { word: word.n, system: self.n });
        }
        let mut s = self.sym.group.identity;
        let mut segments = Vec::new();
        for &(i, e) in &word.letters {
            let (std_path, _) = generator_path(i, self.n)?;
            let letter_path = if e == 1 {
                std_path
            } else {
                // The standard lift of σ_i⁻¹ starts at the basepoint: reverse
                // the σ_i lift and translate it back by the transposition.
                let mut tr: Vec<usize> = (0..self.n).collect();
                tr.swap(i - 1, i);
                std_path.reverse().substitute(&AffineMap::from_permutation(&tr)?)?
            };
            let deck = AffineMap::from_permutation(&self.sym.perms[s])?;
            let translated = letter_path.substitute(&deck)?;
            segments.extend(translated.segments);
            s = self.sym.group.mul(s, self.sym.transposition(i - 1));
        }
        if segments.is_empty() {
            return Ok((None, s));
        }
        Ok((Some(PiecewisePath::new(segments)?), s))
    }

    /// Holonomy of a braid word: ρ(γ) paired with Ad(ρ(γ)⁻¹)·T(γ̃). This is
    /// multiplicative over word concatenation for the semidirect law.
    pub fn holonomy(
        &self,
        word: &BraidWord,
        opts: &OdeOptions,
    ) -> Result<BraidHolonomy, BraidError> {
        let (path, s) = self.lifted_path(word)?;
        let Some(path) = path else {
            return Ok(BraidHolonomy {
                element: SemidirectElement { s, u: self.env.one() },
                estimated_error: 0.0,
                steps: 0,
            });
        };
        let t = transport(&path, &self.omega, &self.env, opts)?;
        let ctx = self.context();
        let u = ctx.ad(self.sym.group.inverse[s], &t.series);
        Ok(BraidHolonomy {
            element: SemidirectElement { s, u },
            estimated_error: t.estimated_error,
            steps: t.steps,
        })
    }

    /// Exhaustive symbolic equivariance: for every σ ∈ Σₙ, pulling the KZ
    /// letters back along the coordinate permutation equals applying Ad(σ)
    /// to the coefficients, with letters compared in canonical form (dlog
    /// functionals are scale-invariant). Exact arithmetic throughout.
    pub fn check_equivariance(&self) -> Result<EquivarianceReport, BraidError> {
        for g in 0..self.sym.group.order() {
            let deck = AffineMap::from_permutation(&self.sym.perms[g])?;
            let pulled = self.omega.substitute(&deck)?;
            let lhs = canonical_term_map(&pulled)?;
            let ad_applied = LieValuedOneForm {
                terms: self
                    .omega
                    .terms
                    .iter()
                    .map(|(w, x)| {
                        let mut img = SparseVec::new();
                        for (&label, c) in x {
                            for (&l2, c2) in &self.images[g][label] {
                                let e = img.entry(l2).or_insert_with(|| rat(0, 1));
                                *e += c * c2;
                                if num_traits::Zero::is_zero(e) {
                                    img.remove(&l2);
                                }
                            }
                        }
                        (w.clone(), img)
                    })
                    .collect(),
            };
            let rhs = canonical_term_map(&ad_applied)?;
            if lhs != rhs {
                return Ok(EquivarianceReport {
                    pass: false,
                    checked: g,
                    certificate: Some(format!(
                        "permutation {:?}: pulled-back letter set differs from Ad-twisted set",
                        self.sym.perms[g]
                    )),
                });
            }
        }
        Ok(EquivarianceReport {
            pass: true,
            checked: self.sym.group.order(),
            certificate: None,
        })
    }
}

/// Canonical exact key for a scalar letter: dlog functionals are normalized
/// by their first nonzero coefficient (so dlog(x_j−x_i) and dlog(x_i−x_j)
/// collide, as forms they are equal); polynomial letters key on their exact
/// data. Coefficients attached to colliding letters are summed.
pub(crate) type LetterKey = (u8, usize, Vec<(Rat, Rat)>);

pub(crate) fn canonical_term_map(
    omega: &LieValuedOneForm,
) -> Result<BTreeMap<LetterKey, SparseVec>, BraidError> {
    let mut out: BTreeMap<LetterKey, SparseVec> = BTreeMap::new();
    for (w, x) in &omega.terms {
        let (key, scale) = match w {
            ScalarOneForm::DLog { constant, gradient } => {
                let mut all = Vec::with_capacity(gradient.len() + 1);
                all.push(constant.clone());
                all.extend(gradient.iter().cloned());
                let lead = all
                    .iter()
                    .find(|c| !c.is_zero())
                    .cloned()
                    .ok_or_else(|| BraidError::BadWord("zero dlog functional".into()))?;
                let inv = lead.inv().expect("nonzero");
                let canon: Vec<(Rat, Rat)> =
                    all.iter().map(|c| c.mul(&inv)).map(|c| (c.re, c.im)).collect();
                // dlog(cℓ) = dlog(ℓ): no coefficient rescaling needed.
                ((0u8, 0usize, canon), rat(1, 1))
            }
            ScalarOneForm::Poly { coordinate, coefficients } => {
                let data: Vec<(Rat, Rat)> =
                    coefficients.iter().map(|c| (c.re.clone(), c.im.clone())).collect();
                ((1u8, *coordinate, data), rat(1, 1))
            }
        };
        let slot = out.entry(key).or_default();
        for (&label, c) in x {
            let e = slot.entry(label).or_insert_with(|| rat(0, 1));
            *e += c * &scale;
            if num_traits::Zero::is_zero(e) {
                slot.remove(&label);
            }
        }
    }
    out.retain(|_, v| !v.is_empty());
    Ok(out)
}

/// Convenience entry point: build the KZ system for the word's strand count
/// and transport it.
pub fn braid_holonomy(
    word: &BraidWord,
    trunc: usize,
    tol: f64,
) -> Result<BraidHolonomy, BraidError> {
    let system = KzSystem::new(word.n, trunc)?;
    let opts = OdeOptions { tol, ..OdeOptions::default() };
    system.holonomy(word, &opts)
}

/// Combinatorial linking numbers of a braid word: each letter σ_i^{±1} adds
/// ±½ to the pair of strands currently at positions i, i+1. For a pure word
/// these are the integer linking numbers of the closed strands, and the
/// degree-1 part of log T equals 2πi·Σ lk_{ab} X_{ab}.
pub fn linking_numbers(word: &BraidWord) -> BTreeMap<(usize, usize), Rat> {
    let sym = SymmetricGroup::new(word.n);
    let mut lk: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    let mut s = sym.group.identity;
    for &(i, e) in &word.letters {
        let c = i - 1;
        let perm = &sym.perms[s];
        let inv = crate::groups::invert_perm(perm);
        let (a, b) = (inv[c], inv[c + 1]);
        let key = (a.min(b), a.max(b));
        let entry = lk.entry(key).or_insert_with(|| rat(0, 1));
        *entry += rat(e as i64, 2);
        if num_traits::Zero::is_zero(entry) {
            lk.remove(&key);
        }
        s = sym.group.mul(s, sym.transposition(c));
    }
    lk
}

/// Exhaustive symbolic equivariance check at the given strand count (the
/// truncation only affects how far the Ad-action is validated; degree 1
/// suffices for the form comparison but the full action is built anyway).
pub fn check_equivariance(n: usize, trunc: usize) -> Result<EquivarianceReport, BraidError> {
    KzSystem::new(n, trunc)?.check_equivariance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_i64;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_parsing_round_trips_and_rejects_garbage() {
        let w = BraidWord::parse("s1 s2 s1^-1", 3).unwrap();
        assert_eq!(w.letters, vec![(1, 1), (2, 1), (1, -1)]);
        assert_eq!(w.to_string(), "s1 s2 s1^-1");
        assert_eq!(BraidWord::parse(&w.to_string(), 3).unwrap(), w);
        assert!(BraidWord::parse("s3", 3).is_err());
        assert!(BraidWord::parse("s0", 3).is_err());
        assert!(BraidWord::parse("t1", 3).is_err());
        assert!(BraidWord::parse("s1^2", 3).is_err());
        // Inverse reverses and flips.
        assert_eq!(w.inverse().to_string(), "s1 s2^-1 s1^-1");
    }

    #[test]
    fn drinfeld_kohno_dimensions_match_the_splitting_oracle() {
        // n = 2: a single generator, abelian.
        let p2 = drinfeld_kohno(2, 3).unwrap();
        assert_eq!(p2.lie.dims, vec![1, 0, 0]);

        // n = 3 at N = 4 against the splitting oracle (free Lie algebras on
        // 1 and 2 generators): (3, 1, 2, 3).
        let p3 = drinfeld_kohno(3, 4).unwrap();
        assert_eq!(p3.lie.dims, pure_braid_dims_oracle(3, 4));
        assert_eq!(p3.lie.dims, vec![3, 1, 2, 3]);
        p3.lie.validate().unwrap();

        // The relation ideal is quadratically generated: its graded size is
        // exactly the free Witt numbers minus the split dimensions.
        let free3 = witt_dims(&[1, 1, 1], 4);
        let expect_ideal: Vec<usize> = free3
            .iter()
            .zip(pure_braid_dims_oracle(3, 4))
            .map(|(f, p)| f - p)
            .collect();
        assert_eq!(p3.ideal_dims, expect_ideal);
        assert_eq!(p3.ideal_dims, vec![0, 2, 6, 15]);

        // n = 4 at N = 3.
        let p4 = drinfeld_kohno(4, 3).unwrap();
        assert_eq!(p4.lie.dims, pure_braid_dims_oracle(4, 3));
        assert_eq!(p4.lie.dims, vec![6, 4, 10]);
        p4.lie.validate().unwrap();
    }

    #[test]
    fn drinfeld_kohno_relations_vanish_in_the_quotient() {
        for (n, trunc) in [(3usize, 3usize), (4, 2)] {
            let q = drinfeld_kohno(n, trunc).unwrap();
            let one = |id: usize| sparse_from_entries([(id, rat_i64(1))]);
            let ps = pairs(n);
            // Disjoint pairs commute.
            for (a, &(i, j)) in ps.iter().enumerate() {
                for (b, &(k, l)) in ps.iter().enumerate().skip(a + 1) {
                    if i != k && i != l && j != k && j != l {
                        let br = q.lie.bracket_elems(&one(a), &one(b));
                        assert!(br.is_empty(), "[X{i}{j}, X{k}{l}] ≠ 0");
                    }
                }
            }
            // Triangle relations.
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        let x_ab = one(pair_index(n, a, b));
                        let mut sum = sparse_from_entries([
                            (pair_index(n, a, c), rat_i64(1)),
                        ]);
                        sum.insert(pair_index(n, b, c), rat_i64(1));
                        let br = q.lie.bracket_elems(&x_ab, &sum);
                        assert!(br.is_empty(), "[X{a}{b}, X{a}{c}+X{b}{c}] ≠ 0");
                    }
                }
            }
        }
    }

    #[test]
    fn generator_paths_have_the_stated_geometry() {
        for n in [2usize, 3, 4] {
            for i in 1..n {
                let (path, perm) = generator_path(i, n).unwrap();
                let b = basepoint(n);
                let start = path.start();
                let end = path.end();
                for j in 0..n {
                    assert!((start[j] - b[j]).norm() < 1e-12);
                    assert!((end[j] - b[perm[j]]).norm() < 1e-12);
                }
                // Strands i−1, i+0 swapped, everything else fixed.
                let mut expect: Vec<usize> = (0..n).collect();
                expect.swap(i - 1, i);
                assert_eq!(perm, expect);

                // Clearance: minimum pairwise distance is √2/2 (quarter-arc
                // parking geometry), certainly ≥ 1/2.
                let d = min_pairwise_distance(&path, 64);
                assert!(d >= 0.5, "clearance {d}");
                assert!((d - 0.5_f64.sqrt()).abs() < 0.01, "clearance {d}");
            }
        }
    }

    #[test]
    fn sigma_then_sigma_inverse_transports_to_one() {
        let system = KzSystem::new(3, 3).unwrap();
        let word = BraidWord::parse("s1 s1^-1", 3).unwrap();
        let (path, s) = system.lifted_path(&word).unwrap();
        assert_eq!(s, system.sym.group.identity);
        let path = path.unwrap();
        assert!(path.is_loop());
        let opts = OdeOptions::default();
        let hol = system.holonomy(&word, &opts).unwrap();
        let ctx = system.context();
        let dist = ctx.distance(&hol.element, &ctx.identity());
        assert!(dist < 1e-8, "distance {dist}");
    }

    #[test]
    fn full_twist_in_b2_is_the_exponential_of_the_single_generator() {
        let system = KzSystem::new(2, 3).unwrap();
        let word = BraidWord::parse("s1 s1", 2).unwrap();
        let opts = OdeOptions::default();
        let hol = system.holonomy(&word, &opts).unwrap();
        assert_eq!(hol.element.s, system.sym.group.identity);
        let tau = std::f64::consts::TAU;
        let x = system
            .env
            .lie_series_from([(0usize, Complex64::new(0.0, tau))]);
        let expected = system.env.exp(&x).unwrap();
        for (a, b) in hol.element.u.coeffs.iter().zip(&expected.coeffs) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
        assert!(system.env.grouplike_defect(&hol.element.u) < 1e-8);
    }

    #[test]
    fn braid_relation_and_far_commutation_hold() {
        // σ₁σ₂σ₁ = σ₂σ₁σ₂ in B₃ at N = 4.
        let system = KzSystem::new(3, 4).unwrap();
        let opts = OdeOptions::default();
        let lhs = system
            .holonomy(&BraidWord::parse("s1 s2 s1", 3).unwrap(), &opts)
            .unwrap();
        let rhs = system
            .holonomy(&BraidWord::parse("s2 s1 s2", 3).unwrap(), &opts)
            .unwrap();
        let ctx = system.context();
        let d = ctx.distance(&lhs.element, &rhs.element);
        assert!(d < 1e-7, "braid relation defect {d}");

        // σ₁σ₃ = σ₃σ₁ in B₄ at N = 3.
        let system = KzSystem::new(4, 3).unwrap();
        let lhs = system
            .holonomy(&BraidWord::parse("s1 s3", 4).unwrap(), &opts)
            .unwrap();
        let rhs = system
            .holonomy(&BraidWord::parse("s3 s1", 4).unwrap(), &opts)
            .unwrap();
        let ctx = system.context();
        let d = ctx.distance(&lhs.element, &rhs.element);
        assert!(d < 1e-7, "far commutation defect {d}");
    }

    #[test]
    fn holonomy_is_a_homomorphism_on_random_words() {
        let system = KzSystem::new(3, 3).unwrap();
        let ctx = system.context();
        let opts = OdeOptions::default();
        let mut rng = ChaCha8Rng::seed_from_u64(20260821);
        for _ in 0..5 {
            let rand_word = |rng: &mut ChaCha8Rng| {
                let letters: Vec<(usize, i32)> = (0..3)
                    .map(|_| {
                        (rng.gen_range(1..3), if rng.gen_bool(0.5) { 1 } else { -1 })
                    })
                    .collect();
                BraidWord::new(3, letters).unwrap()
            };
            let w1 = rand_word(&mut rng);
            let w2 = rand_word(&mut rng);
            let h12 = system.holonomy(&w1.concat(&w2).unwrap(), &opts).unwrap();
            let h1 = system.holonomy(&w1, &opts).unwrap();
            let h2 = system.holonomy(&w2, &opts).unwrap();
            let prod = ctx.multiply(&h1.element, &h2.element);
            let d = ctx.distance(&h12.element, &prod);
            assert!(d < 1e-7, "homomorphism defect {d} on {w1} | {w2}");
            ctx.validate_element(&h12.element, 1e-8).unwrap();
        }
    }

    #[test]
    fn pure_braid_logs_match_combinatorial_linking_numbers() {
        let system = KzSystem::new(3, 3).unwrap();
        let opts = OdeOptions::default();
        let tau = std::f64::consts::TAU;
        for text in ["s1 s1", "s1 s2 s2 s1^-1", "s1 s2 s1 s1 s2 s1"] {
            let word = BraidWord::parse(text, 3).unwrap();
            assert_eq!(
                word.permutation(&system.sym),
                system.sym.group.identity,
                "word {text} is not pure"
            );
            let hol = system.holonomy(&word, &opts).unwrap();
            let log = system.env.log(&hol.element.u).unwrap();
            let lk = linking_numbers(&word);
            // Degree-1 coefficients of the log against 2πi·lk.
            for (idx, &(a, b)) in pairs(3).iter().enumerate() {
                let want = lk
                    .get(&(a, b))
                    .map(|r| crate::rational::rat_to_f64(r))
                    .unwrap_or(0.0);
                let got = log.coeffs[system.env.monomial_index(&[idx]).unwrap()];
                let expect = Complex64::new(0.0, tau * want);
                assert!(
                    (got - expect).norm() < 1e-7,
                    "lk({a},{b}) in {text}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn equivariance_is_exact_for_all_permutations() {
        for n in [2usize, 3, 4] {
            let report = check_equivariance(n, 2).unwrap();
            assert!(report.pass, "n={n}: {:?}", report.certificate);
            let order: usize = (1..=n).product();
            assert_eq!(report.checked, order);
        }
    }

    #[test]
    fn kz_flatness_holds_in_the_quotient_and_fails_free() {
        use crate::freelie::LiePresentation;
        for n in [2usize, 3, 4] {
            // KzSystem::new runs the check as an invariant; reaching Ok is
            // the positive assertion.
            let system = KzSystem::new(n, 2).unwrap();
            let report =
                check_integrability(&system.omega, &system.quotient.lie, n).unwrap();
            assert!(report.integrable);

            if n >= 3 {
                // Negative control: the free Lie algebra on the same
                // generators is not flat for ω.
                let p = LiePresentation {
                    generators: pairs(n)
                        .iter()
                        .map(|&(i, j)| Generator::new(format!("X{}{}", i + 1, j + 1), 1))
                        .collect(),
                    relations: vec![],
                    truncation: 2,
                };
                let free = nilpotent_quotient(p).unwrap();
                let report = check_integrability(&system.omega, &free.lie, n).unwrap();
                assert!(!report.integrable);
                assert!(report.certificate.is_some());
            }
        }
    }
}
