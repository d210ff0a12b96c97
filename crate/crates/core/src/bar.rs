//! The reduced two-sided bar construction B(ℝ, A, N) on finite connected
//! commutative DGA models, with N = ℝ or N = 𝒪(S) for a finite group S:
//! differential, shuffle product, bar filtration, H⁰ with adapted cocycle
//! bases, Eilenberg–Moore E₁ dimension counting, the comultiplication
//! twisted by the 𝒪(S)-coaction, and extraction of indecomposables with
//! the cobracket and its dual graded Lie algebra.
//!
//! Sign conventions (fixed once, certified by the exact d² = 0 suite):
//! J a = (−1)^{deg a} a on the untruncated degree; for a word [a₁|…|a_r],
//!   d_internal = Σ_{1≤i≤r} (−1)^i [Ja₁|…|Ja_{i−1}|d a_i|a_{i+1}|…|a_r],
//!   d_merge    = Σ_{1≤i<r} (−1)^{i+1} [Ja₁|…|Ja_{i−1}|Ja_i ∧ a_{i+1}|…|a_r],
//! and the end terms d_C carry m·a₁ and a_r·n through the augmentation
//! actions with sign (−1)^r on the right term (word length r). Over a
//! connected model with degree-0 modules both end actions vanish
//! identically; the code still evaluates them literally.

use crate::freelie::{GradedLie, LieError};
use crate::groups::FiniteGroup;
use crate::linalg::{
    quotient_basis, sparse_add_scaled, sparse_from_entries, sparse_scale, LinalgError, RatMatrix,
    SpanSolver, SparseVec,
};
use crate::rational::{rat_i64, Rat};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BarError {
    #[error("invalid DGA model ({} violation(s)): {}", .0.len(), .0.join("; "))]
    InvalidModel(Vec<String>),
    #[error("invalid coefficient coalgebra: {0}")]
    InvalidCoalgebra(String),
    #[error("bar-degree cap {cap} too small to answer the query: {query}")]
    CapTooSmall { cap: usize, query: String },
    #[error("element is not a degree-0 cocycle within the computed range")]
    NotCocycle,
    #[error("indecomposables are extracted over trivial coefficients; tensor off the 𝒪(S) factor first")]
    NeedsTrivialCoefficients,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

// ---------------------------------------------------------------------------
// DGA models.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DgaBasisElem {
    pub label: String,
    pub degree: usize,
}

/// A finite connected commutative DGA model, given by structure constants on
/// a graded basis. A missing product entry means the product is zero; the
/// table is completed by graded commutativity and the unit axioms.
#[derive(Clone, Debug)]
pub struct DgaModel {
    pub name: String,
    pub basis: Vec<DgaBasisElem>,
    pub unit: usize,
    /// d[i] = differential of basis element i.
    pub d: Vec<SparseVec>,
    /// Completed product table; missing key = zero product.
    pub product: HashMap<(usize, usize), SparseVec>,
}

impl DgaModel {
    /// Build and validate. `products` may specify each unordered pair once;
    /// the other order is filled in by graded commutativity, and products
    /// with the unit are forced.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<DgaBasisElem>,
        unit: usize,
        d: Vec<SparseVec>,
        products: HashMap<(usize, usize), SparseVec>,
    ) -> Result<DgaModel, BarError> {
        let model = DgaModel::build_unchecked(name, basis, unit, d, products)?;
        let violations = model.violations();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(BarError::InvalidModel(violations))
        }
    }

    /// Assemble the completed tables without checking the DGA axioms
    /// (`violations` reports them); structural errors still fail.
    pub fn build_unchecked(
        name: impl Into<String>,
        basis: Vec<DgaBasisElem>,
        unit: usize,
        d: Vec<SparseVec>,
        products: HashMap<(usize, usize), SparseVec>,
    ) -> Result<DgaModel, BarError> {
        let n = basis.len();
        if unit >= n || d.len() != n {
            return Err(BarError::InvalidModel(vec![
                "unit index or differential table out of range".into(),
            ]));
        }
        let bad_index = d
            .iter()
            .flat_map(|v| v.keys())
            .chain(products.keys().flat_map(|(i, j)| [i, j]))
            .chain(products.values().flat_map(|v| v.keys()))
            .any(|&k| k >= n);
        if bad_index {
            return Err(BarError::InvalidModel(vec![
                "structure constants reference basis indices out of range".into(),
            ]));
        }
        let mut product = HashMap::new();
        // Unit products are forced.
        for k in 0..n {
            product.insert((unit, k), sparse_from_entries([(k, rat_i64(1))]));
            product.insert((k, unit), sparse_from_entries([(k, rat_i64(1))]));
        }
        let mut conflicts = Vec::new();
        for (&(i, j), v) in &products {
            let v: SparseVec = v.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
            if i == unit || j == unit {
                let forced = &product[&(i, j)];
                if &v != forced {
                    conflicts.push(format!(
                        "product entry ({}, {}) contradicts the unit axiom",
                        i, j
                    ));
                }
                continue;
            }
            let sign = if (basis[i].degree * basis[j].degree) % 2 == 1 { -1 } else { 1 };
            let mirrored = sparse_scale(&v, &rat_i64(sign));
            match product.get(&(j, i)) {
                Some(existing) if *existing != mirrored => conflicts.push(format!(
                    "product entries ({i}, {j}) and ({j}, {i}) violate graded commutativity"
                )),
                _ => {}
            }
            product.insert((j, i), mirrored);
            product.insert((i, j), v);
        }
        if !conflicts.is_empty() {
            return Err(BarError::InvalidModel(conflicts));
        }
        product.retain(|_, v| !v.is_empty());
        Ok(DgaModel { name: name.into(), basis, unit, d, product })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    /// Product of two basis elements (completed table; empty = zero).
    pub fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        self.product.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Bilinear extension of the product.
    pub fn mul_elem(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in x {
            for (&j, b) in y {
                let c = a * b;
                sparse_add_scaled(&mut out, &self.mul_basis(i, j), &c);
            }
        }
        out
    }

    /// Linear extension of the differential.
    pub fn d_elem(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, c) in x {
            sparse_add_scaled(&mut out, &self.d[i], c);
        }
        out
    }

    /// The canonical augmentation ε: coefficient of the unit (all positive
    /// degrees are killed).
    pub fn augment(&self, x: &SparseVec) -> Rat {
        x.get(&self.unit).cloned().unwrap_or_else(|| rat_i64(0))
    }

    /// All DGA-axiom violations, as human-readable strings: connectedness,
    /// degrees of d and products, d(1) = 0, d² = 0, Leibniz,
    /// graded-commutative squares, associativity.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.dim();
        if self.basis[self.unit].degree != 0 {
            out.push("unit must have degree 0".into());
        }
        let degree_zero = (0..n).filter(|&i| self.basis[i].degree == 0).count();
        if degree_zero != 1 {
            out.push(format!(
                "model must be connected: expected exactly one degree-0 basis element, found {degree_zero}"
            ));
        }
        for i in 0..n {
            for (&k, c) in &self.d[i] {
                if !c.is_zero() && self.degree(k) != self.degree(i) + 1 {
                    out.push(format!(
                        "d({}) has a component of degree {} ≠ {}",
                        self.basis[i].label,
                        self.degree(k),
                        self.degree(i) + 1
                    ));
                }
            }
        }
        if !self.d[self.unit].is_empty() {
            out.push("d(1) must vanish".into());
        }
        for (&(i, j), v) in &self.product {
            for (&k, c) in v {
                if !c.is_zero() && self.degree(k) != self.degree(i) + self.degree(j) {
                    out.push(format!(
                        "product {}·{} has a component of degree {} ≠ {}",
                        self.basis[i].label,
                        self.basis[j].label,
                        self.degree(k),
                        self.degree(i) + self.degree(j)
                    ));
                }
            }
        }
        for i in 0..n {
            if !self.d_elem(&self.d[i]).is_empty() {
                out.push(format!("d²({}) ≠ 0", self.basis[i].label));
            }
        }
        for i in 0..n {
            if self.degree(i) % 2 == 1 && !self.mul_basis(i, i).is_empty() {
                out.push(format!(
                    "odd-degree square {}·{} must vanish",
                    self.basis[i].label, self.basis[i].label
                ));
            }
        }
        for i in 0..n {
            for j in 0..n {
                // Leibniz: d(ab) = (da)b + (−1)^{|a|} a(db).
                let ei = sparse_from_entries([(i, rat_i64(1))]);
                let ej = sparse_from_entries([(j, rat_i64(1))]);
                let mut lhs = self.d_elem(&self.mul_basis(i, j));
                let rhs1 = self.mul_elem(&self.d[i], &ej);
                let rhs2 = self.mul_elem(&ei, &self.d[j]);
                let sign = if self.degree(i) % 2 == 1 { -1 } else { 1 };
                sparse_add_scaled(&mut lhs, &rhs1, &rat_i64(-1));
                sparse_add_scaled(&mut lhs, &rhs2, &rat_i64(-sign));
                if !lhs.is_empty() {
                    out.push(format!(
                        "Leibniz fails on ({}, {})",
                        self.basis[i].label, self.basis[j].label
                    ));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                for c in 0..n {
                    let ec = sparse_from_entries([(c, rat_i64(1))]);
                    let eb = sparse_from_entries([(b, rat_i64(1))]);
                    let ea = sparse_from_entries([(a, rat_i64(1))]);
                    let mut lhs = self.mul_elem(&ab, &ec);
                    let rhs = self.mul_elem(&ea, &self.mul_elem(&eb, &ec));
                    sparse_add_scaled(&mut lhs, &rhs, &rat_i64(-1));
                    if !lhs.is_empty() {
                        out.push(format!(
                            "associativity fails on ({}, {}, {})",
                            self.basis[a].label, self.basis[b].label, self.basis[c].label
                        ));
                    }
                }
            }
        }
        out
    }

    /// Cohomology dimensions H⁰ … H^max of the model.
    pub fn cohomology_dims(&self, max_degree: usize) -> Vec<usize> {
        let by_degree: Vec<Vec<usize>> = (0..=max_degree + 1)
            .map(|t| (0..self.dim()).filter(|&i| self.degree(i) == t).collect())
            .collect();
        let d_matrix = |t: usize| -> RatMatrix {
            let src = &by_degree[t];
            let tgt = &by_degree[t + 1];
            let pos: HashMap<usize, usize> =
                tgt.iter().enumerate().map(|(r, &i)| (i, r)).collect();
            let mut m = RatMatrix::zero(tgt.len(), src.len());
            for (col, &i) in src.iter().enumerate() {
                for (&k, c) in &self.d[i] {
                    m.set(pos[&k], col, c.clone());
                }
            }
            m
        };
        (0..=max_degree)
            .map(|t| {
                let ker = by_degree[t].len() - d_matrix(t).rank();
                let im = if t == 0 { 0 } else { d_matrix(t - 1).rank() };
                ker - im
            })
            .collect()
    }

    /// A basis of H¹ = degree-1 cocycles modulo the (trivial, by
    /// connectedness) image from degree 0, as elements of the model.
    pub fn h1_basis(&self) -> Vec<SparseVec> {
        let deg1: Vec<usize> = (0..self.dim()).filter(|&i| self.degree(i) == 1).collect();
        let deg2: Vec<usize> = (0..self.dim()).filter(|&i| self.degree(i) == 2).collect();
        let pos: HashMap<usize, usize> = deg2.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut m = RatMatrix::zero(deg2.len(), deg1.len());
        for (col, &i) in deg1.iter().enumerate() {
            for (&k, c) in &self.d[i] {
                m.set(pos[&k], col, c.clone());
            }
        }
        m.kernel_basis()
            .into_iter()
            .map(|v| v.into_iter().map(|(local, c)| (deg1[local], c)).collect())
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    pub fn render(&self, x: &SparseVec) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.iter()
            .map(|(&i, c)| format!("{}·{}", crate::rational::format_rat_short(c), self.basis[i].label))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Coefficient coalgebras 𝒪(S).
// ---------------------------------------------------------------------------

/// 𝒪(S) for a finite group S in the group-element basis e_g, together with
/// the coaction A → 𝒪(S) ⊗ A written through its component maps
/// ρ(a) = Σ_g e_g ⊗ T_g(a). The comodule axioms make g ↦ T_g a right action
/// of S on A by DGA automorphisms: T_e = id and T_{gh} = T_h ∘ T_g.
#[derive(Clone, Debug)]
pub struct CoefficientCoalgebra {
    pub group: FiniteGroup,
    /// t[g][i] = T_g applied to basis element i of the model.
    pub t: Vec<Vec<SparseVec>>,
}

impl CoefficientCoalgebra {
    pub fn new(
        model: &DgaModel,
        group: FiniteGroup,
        t: Vec<Vec<SparseVec>>,
    ) -> Result<CoefficientCoalgebra, BarError> {
        let n = model.dim();
        if t.len() != group.order() || t.iter().any(|m| m.len() != n) {
            return Err(BarError::InvalidCoalgebra(
                "coaction table must give one model-endomorphism per group element".into(),
            ));
        }
        let apply = |g: usize, x: &SparseVec| -> SparseVec {
            let mut out = SparseVec::new();
            for (&i, c) in x {
                sparse_add_scaled(&mut out, &t[g][i], c);
            }
            out
        };
        // Counit: T_e = id.
        for i in 0..n {
            if t[group.identity][i] != sparse_from_entries([(i, rat_i64(1))]) {
                return Err(BarError::InvalidCoalgebra(
                    "counit law fails: the identity component of the coaction must be the identity map"
                        .into(),
                ));
            }
        }
        // Coassociativity: T_{gh} = T_h ∘ T_g.
        for g in 0..group.order() {
            for h in 0..group.order() {
                for i in 0..n {
                    if apply(h, &t[g][i]) != t[group.mul(g, h)][i] {
                        return Err(BarError::InvalidCoalgebra(
                            "coassociativity fails: components do not compose as a right action"
                                .into(),
                        ));
                    }
                }
            }
        }
        // Each T_g must be a DGA endomorphism: degree-preserving, chain map,
        // algebra map fixing the unit.
        for g in 0..group.order() {
            for i in 0..n {
                if t[g][i]
                    .iter()
                    .any(|(&k, c)| !c.is_zero() && model.degree(k) != model.degree(i))
                {
                    return Err(BarError::InvalidCoalgebra(format!(
                        "coaction component {g} does not preserve degree"
                    )));
                }
                if apply(g, &model.d[i]) != model.d_elem(&t[g][i]) {
                    return Err(BarError::InvalidCoalgebra(format!(
                        "coaction component {g} does not commute with d"
                    )));
                }
            }
            if t[g][model.unit] != sparse_from_entries([(model.unit, rat_i64(1))]) {
                return Err(BarError::InvalidCoalgebra(format!(
                    "coaction component {g} does not fix the unit"
                )));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = apply(g, &model.mul_basis(i, j));
                    let rhs = model.mul_elem(&t[g][i], &t[g][j]);
                    if lhs != rhs {
                        return Err(BarError::InvalidCoalgebra(format!(
                            "coaction component {g} is not an algebra map"
                        )));
                    }
                }
            }
        }
        Ok(CoefficientCoalgebra { group, t })
    }

    /// Trivial coaction ρ(a) = Σ_g e_g ⊗ a.
    pub fn trivial(model: &DgaModel, group: FiniteGroup) -> CoefficientCoalgebra {
        let id: Vec<SparseVec> = (0..model.dim())
            .map(|i| sparse_from_entries([(i, rat_i64(1))]))
            .collect();
        let t = vec![id; group.order()];
        CoefficientCoalgebra::new(model, group, t).expect("trivial coaction valid")
    }

    pub fn dim(&self) -> usize {
        self.group.order()
    }

    /// Δ_S(e_g) = Σ_{hk=g} e_h ⊗ e_k.
    pub fn delta_pairs(&self, g: usize) -> Vec<(usize, usize)> {
        let n = self.group.order();
        let mut out = Vec::new();
        for h in 0..n {
            for k in 0..n {
                if self.group.mul(h, k) == g {
                    out.push((h, k));
                }
            }
        }
        out
    }

    /// Antipode e_g ↦ e_{g⁻¹}.
    pub fn antipode(&self, g: usize) -> usize {
        self.group.inverse[g]
    }
}

// ---------------------------------------------------------------------------
// Bar words and elements.
// ---------------------------------------------------------------------------

/// A reduced bar word [a₁|…|a_r]·e_φ; with trivial coefficients φ = 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BarWord {
    pub letters: Vec<usize>,
    pub phi: usize,
}

impl BarWord {
    pub fn new(letters: Vec<usize>, phi: usize) -> BarWord {
        BarWord { letters, phi }
    }

    pub fn empty(phi: usize) -> BarWord {
        BarWord { letters: Vec::new(), phi }
    }
}

/// Linear combination of bar words with rational coefficients.
pub type BarElement = BTreeMap<BarWord, Rat>;

pub fn bar_add_term(dst: &mut BarElement, word: BarWord, coeff: Rat) {
    use std::collections::btree_map::Entry;
    if coeff.is_zero() {
        return;
    }
    match dst.entry(word) {
        Entry::Vacant(e) => {
            e.insert(coeff);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn bar_add_scaled(dst: &mut BarElement, src: &BarElement, c: &Rat) {
    for (w, a) in src {
        bar_add_term(dst, w.clone(), a * c);
    }
}

// ---------------------------------------------------------------------------
// The bar complex.
// ---------------------------------------------------------------------------

/// B(ℝ, A, N) for a validated model A, with N = ℝ (no coefficients) or
/// N = 𝒪(S).
pub struct BarContext<'a> {
    pub model: &'a DgaModel,
    pub coeffs: Option<&'a CoefficientCoalgebra>,
}

impl<'a> BarContext<'a> {
    pub fn new(model: &'a DgaModel, coeffs: Option<&'a CoefficientCoalgebra>) -> BarContext<'a> {
        BarContext { model, coeffs }
    }

    /// Dimension of the right coefficient module N.
    pub fn n_dim(&self) -> usize {
        self.coeffs.map_or(1, |c| c.dim())
    }

    /// Total degree of a bar word: Σ (deg aᵢ − 1).
    pub fn word_degree(&self, w: &BarWord) -> usize {
        w.letters.iter().map(|&a| self.model.degree(a) - 1).sum()
    }

    /// Unit of the shuffle algebra: the empty word times 1_N (= Σ_g e_g for
    /// N = 𝒪(S)).
    pub fn unit(&self) -> BarElement {
        let mut out = BarElement::new();
        for phi in 0..self.n_dim() {
            bar_add_term(&mut out, BarWord::empty(phi), rat_i64(1));
        }
        out
    }

    /// The bar differential. See the module header for the sign conventions.
    pub fn differential(&self, x: &BarElement) -> BarElement {
        let mut out = BarElement::new();
        for (word, coeff) in x {
            self.differential_word(word, coeff, &mut out);
        }
        out
    }

    fn differential_word(&self, word: &BarWord, coeff: &Rat, out: &mut BarElement) {
        let letters = &word.letters;
        let r = letters.len();
        let m = self.model;
        // Running sign (−1)^{deg a₁ + … + deg a_{i−1}} for the J's.
        let mut jsign = 1i64;
        for i in 1..=r {
            let a = letters[i - 1];
            let base = if i % 2 == 0 { 1 } else { -1 };
            // Internal term: replace slot i by components of d a_i.
            for (&da, c) in &m.d[a] {
                let mut w = letters.clone();
                w[i - 1] = da;
                bar_add_term(
                    out,
                    BarWord::new(w, word.phi),
                    coeff * c * rat_i64(base * jsign),
                );
            }
            // Merge term: Ja_i ∧ a_{i+1} in slot i (word shrinks by one).
            if i < r {
                let merge_sign = -base; // (−1)^{i+1}
                let ja = if m.degree(a) % 2 == 0 { 1 } else { -1 };
                for (&p, c) in &m.mul_basis(a, letters[i]) {
                    let mut w = Vec::with_capacity(r - 1);
                    w.extend_from_slice(&letters[..i - 1]);
                    w.push(p);
                    w.extend_from_slice(&letters[i + 1..]);
                    bar_add_term(
                        out,
                        BarWord::new(w, word.phi),
                        coeff * c * rat_i64(merge_sign * jsign * ja),
                    );
                }
            }
            if m.degree(a) % 2 == 1 {
                jsign = -jsign;
            }
        }
        // End terms d_C: the left module ℝ and the right module (degree 0)
        // absorb a₁ and a_r through the augmentation action, which kills
        // every positive-degree letter. Evaluated literally:
        if r >= 1 {
            let left_action = self.model.augment(&sparse_from_entries([(letters[0], rat_i64(1))]));
            if !left_action.is_zero() {
                let w = BarWord::new(letters[1..].to_vec(), word.phi);
                bar_add_term(out, w, coeff * &left_action * rat_i64(-1));
            }
            let right_action =
                self.model.augment(&sparse_from_entries([(letters[r - 1], rat_i64(1))]));
            if !right_action.is_zero() {
                // Sign (−1)^r times the J of m and of a₁…a_{r−1} only; the
                // loop above accumulated through a_r, so strip its factor.
                let sign = if r % 2 == 0 { 1 } else { -1 };
                let strip = if m.degree(letters[r - 1]) % 2 == 1 { -1 } else { 1 };
                let w = BarWord::new(letters[..r - 1].to_vec(), word.phi);
                bar_add_term(out, w, coeff * &right_action * rat_i64(sign * jsign * strip));
            }
        }
    }

    /// Shuffle product. Koszul signs act through the reduced degrees
    /// deg a − 1; right coefficients multiply pointwise (e_g·e_h = δ_{gh}e_g).
    pub fn shuffle(&self, x: &BarElement, y: &BarElement) -> BarElement {
        let mut out = BarElement::new();
        for (wx, cx) in x {
            for (wy, cy) in y {
                let phi = match self.coeffs {
                    None => 0,
                    Some(_) => {
                        if wx.phi != wy.phi {
                            continue;
                        }
                        wx.phi
                    }
                };
                let c = cx * cy;
                for (word, sign) in shuffle_words(self, &wx.letters, &wy.letters) {
                    bar_add_term(&mut out, BarWord::new(word, phi), &c * rat_i64(sign));
                }
            }
        }
        out
    }

    /// Enumerate all degree-0 bar words with length ≤ cap, sorted by
    /// (length, letters, φ).
    pub fn degree_zero_words(&self, cap: usize) -> Vec<BarWord> {
        let deg1: Vec<usize> =
            (0..self.model.dim()).filter(|&i| self.model.degree(i) == 1).collect();
        let mut words = Vec::new();
        for s in 0..=cap {
            let mut stack = vec![Vec::new()];
            let mut next = Vec::new();
            for _ in 0..s {
                for w in &stack {
                    for &a in &deg1 {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push(w2);
                    }
                }
                std::mem::swap(&mut stack, &mut next);
                next.clear();
            }
            stack.sort();
            for w in stack {
                for phi in 0..self.n_dim() {
                    words.push(BarWord::new(w.clone(), phi));
                }
            }
        }
        words
    }

    /// Kernel of d in total degree 0 through bar degree `cap`, with the
    /// filtration-adapted cocycle basis.
    pub fn h0(&self, cap: usize) -> Result<H0Data, BarError> {
        let words = self.degree_zero_words(cap);
        let word_index: HashMap<BarWord, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        // Differential matrix into the degree-1 part of B_cap.
        let mut target_index: HashMap<BarWord, usize> = HashMap::new();
        let mut columns: Vec<SparseVec> = Vec::with_capacity(words.len());
        for w in &words {
            let mut x = BarElement::new();
            bar_add_term(&mut x, w.clone(), rat_i64(1));
            let dw = self.differential(&x);
            let mut col = SparseVec::new();
            for (tw, c) in dw {
                let next = target_index.len();
                let row = *target_index.entry(tw).or_insert(next);
                col.insert(row, c);
            }
            columns.push(col);
        }
        let matrix = RatMatrix::from_columns(target_index.len(), &columns);
        let cocycles = matrix.kernel_basis();
        // Each kernel vector is supported on its free column plus earlier
        // pivot columns, so with length-sorted columns the max support index
        // carries the filtration level.
        let mut levels = Vec::with_capacity(cocycles.len());
        let mut solver = SpanSolver::new();
        for z in &cocycles {
            let lead = *z.keys().next_back().expect("kernel vector nonzero");
            levels.push(words[lead].letters.len());
            let grew = solver.insert(z);
            assert!(grew, "kernel basis vectors are independent");
        }
        let mut new_dims = vec![0usize; cap + 1];
        for &l in &levels {
            new_dims[l] += 1;
        }
        Ok(H0Data { cap, words, word_index, cocycles, levels, new_dims, solver })
    }

    /// E₁^{−s,t} dimension table of the Eilenberg–Moore spectral sequence,
    /// E₁^{−s,t} = [ℝ ⊗ H⁺(A)^{⊗s} ⊗ N]^t, from the counting formula.
    /// Returns table[s][t] for s ≤ s_max, t ≤ t_max.
    pub fn em_e1_dims(&self, s_max: usize, t_max: usize) -> Vec<Vec<usize>> {
        let h = self.model.cohomology_dims(self.model.max_degree());
        let n = self.n_dim();
        let mut table = vec![vec![0usize; t_max + 1]; s_max + 1];
        table[0][0] = 1;
        for s in 1..=s_max {
            for t in 0..=t_max {
                let mut total = 0;
                for (k, &hk) in h.iter().enumerate().skip(1) {
                    if k <= t {
                        total += hk * table[s - 1][t - k];
                    }
                }
                table[s][t] = total;
            }
        }
        // Tensoring with N multiplies every entry by dim N; in particular
        // E₁^{0,0} = dim(ℝ ⊗ N) = dim N.
        for row in &mut table {
            for v in row.iter_mut() {
                *v *= n;
            }
        }
        table
    }

    /// Comultiplication on degree-0 elements: split at every index, letters
    /// right of the split coact, the group-basis components multiply into
    /// the left coefficient with Δ_S. With trivial coefficients this is
    /// deconcatenation.
    pub fn coproduct(&self, x: &BarElement) -> BTreeMap<(BarWord, BarWord), Rat> {
        let mut out: BTreeMap<(BarWord, BarWord), Rat> = BTreeMap::new();
        let mut add = |l: BarWord, r: BarWord, c: Rat| {
            use std::collections::btree_map::Entry;
            if c.is_zero() {
                return;
            }
            match out.entry((l, r)) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        };
        for (word, coeff) in x {
            let r = word.letters.len();
            match self.coeffs {
                None => {
                    for i in 0..=r {
                        add(
                            BarWord::new(word.letters[..i].to_vec(), 0),
                            BarWord::new(word.letters[i..].to_vec(), 0),
                            coeff.clone(),
                        );
                    }
                }
                Some(coalg) => {
                    for i in 0..=r {
                        for (h, k) in coalg.delta_pairs(word.phi) {
                            // Right letters coact with component h; expand
                            // multilinearly.
                            let mut rights: Vec<(Vec<usize>, Rat)> =
                                vec![(Vec::new(), coeff.clone())];
                            for &a in &word.letters[i..] {
                                let img = &coalg.t[h][a];
                                let mut next = Vec::new();
                                for (w, c) in &rights {
                                    for (&b, cb) in img {
                                        let mut w2 = w.clone();
                                        w2.push(b);
                                        next.push((w2, c * cb));
                                    }
                                }
                                rights = next;
                            }
                            for (rw, c) in rights {
                                add(
                                    BarWord::new(word.letters[..i].to_vec(), h),
                                    BarWord::new(rw, k),
                                    c,
                                );
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Apply a single coaction component T_g letterwise to a bar element
    /// (the diagonal S-action on the bar construction).
    pub fn letterwise_action(&self, t_g: &[SparseVec], x: &BarElement) -> BarElement {
        let mut out = BarElement::new();
        for (word, coeff) in x {
            let mut terms: Vec<(Vec<usize>, Rat)> = vec![(Vec::new(), coeff.clone())];
            for &a in &word.letters {
                let img = &t_g[a];
                let mut next = Vec::new();
                for (w, c) in &terms {
                    for (&b, cb) in img {
                        let mut w2 = w.clone();
                        w2.push(b);
                        next.push((w2, c * cb));
                    }
                }
                terms = next;
            }
            for (w, c) in terms {
                bar_add_term(&mut out, BarWord::new(w, word.phi), c);
            }
        }
        out
    }

    pub fn render_word(&self, w: &BarWord) -> String {
        let body = if w.letters.is_empty() {
            "[]".to_string()
        } else {
            format!(
                "[{}]",
                w.letters
                    .iter()
                    .map(|&a| self.model.basis[a].label.clone())
                    .collect::<Vec<_>>()
                    .join("|")
            )
        };
        match self.coeffs {
            None => body,
            Some(c) => format!("{}·e_{}", body, c.group.elements[w.phi]),
        }
    }

    pub fn render_element(&self, x: &BarElement) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.iter()
            .map(|(w, c)| {
                format!("{}·{}", crate::rational::format_rat_short(c), self.render_word(w))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// All (p,q)-shuffles of u and v with Koszul signs on reduced degrees.
fn shuffle_words(ctx: &BarContext, u: &[usize], v: &[usize]) -> Vec<(Vec<usize>, i64)> {
    fn reduced(ctx: &BarContext, a: usize) -> usize {
        ctx.model.degree(a) - 1
    }
    fn rec(
        ctx: &BarContext,
        u: &[usize],
        v: &[usize],
        prefix: &mut Vec<usize>,
        sign: i64,
        out: &mut Vec<(Vec<usize>, i64)>,
    ) {
        if u.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(v);
            out.push((w, sign));
            return;
        }
        if v.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(u);
            out.push((w, sign));
            return;
        }
        prefix.push(u[0]);
        rec(ctx, &u[1..], v, prefix, sign, out);
        prefix.pop();
        // Taking v₀ first moves it past all remaining letters of u.
        let jump: usize = u.iter().map(|&a| reduced(ctx, a)).sum();
        let extra = if (reduced(ctx, v[0]) * jump) % 2 == 1 { -1 } else { 1 };
        prefix.push(v[0]);
        rec(ctx, u, &v[1..], prefix, sign * extra, out);
        prefix.pop();
    }
    let mut out = Vec::new();
    rec(ctx, u, v, &mut Vec::new(), 1, &mut out);
    out
}

// ---------------------------------------------------------------------------
// H⁰ data and reports.
// ---------------------------------------------------------------------------

/// The computed degree-0 bar cohomology through the cap: ambient words, the
/// adapted cocycle basis (level = bar filtration of first appearance), and
/// an exact solver for coordinates in that basis.
pub struct H0Data {
    pub cap: usize,
    pub words: Vec<BarWord>,
    pub word_index: HashMap<BarWord, usize>,
    /// Cocycles over word indices; ordered by (level, word).
    pub cocycles: Vec<SparseVec>,
    pub levels: Vec<usize>,
    pub new_dims: Vec<usize>,
    solver: SpanSolver,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarFiltrationReport {
    pub cap: usize,
    /// dim of new cocycle classes appearing at bar degree s, s = 0..cap.
    pub new_dims: Vec<usize>,
    /// dim H⁰ ∩ B_s, s = 0..cap (cumulative, nondecreasing).
    pub cumulative: Vec<usize>,
}

impl H0Data {
    pub fn dim(&self) -> usize {
        self.cocycles.len()
    }

    pub fn report(&self) -> BarFiltrationReport {
        let mut cumulative = Vec::with_capacity(self.cap + 1);
        let mut acc = 0;
        for &d in &self.new_dims {
            acc += d;
            cumulative.push(acc);
        }
        BarFiltrationReport { cap: self.cap, new_dims: self.new_dims.clone(), cumulative }
    }

    /// Convert a bar element into ambient word coordinates; words beyond the
    /// cap are rejected.
    pub fn word_coords(&self, x: &BarElement) -> Result<SparseVec, BarError> {
        let mut v = SparseVec::new();
        for (w, c) in x {
            let idx = self.word_index.get(w).ok_or(BarError::CapTooSmall {
                cap: self.cap,
                query: "element has words beyond the computed bar-degree cap or of nonzero degree"
                    .into(),
            })?;
            v.insert(*idx, c.clone());
        }
        Ok(v)
    }

    /// Coordinates of a cocycle in the adapted basis; NotCocycle if the
    /// element is not in the kernel span.
    pub fn solve(&self, x: &BarElement) -> Result<SparseVec, BarError> {
        let v = self.word_coords(x)?;
        self.solver.solve(&v).ok_or(BarError::NotCocycle)
    }

    fn solve_coords(&self, v: &SparseVec) -> Result<SparseVec, BarError> {
        self.solver.solve(v).ok_or(BarError::NotCocycle)
    }

    /// The k-th adapted basis cocycle as a bar element.
    pub fn cocycle_element(&self, k: usize) -> BarElement {
        let mut out = BarElement::new();
        for (&w, c) in &self.cocycles[k] {
            bar_add_term(&mut out, self.words[w].clone(), c.clone());
        }
        out
    }

    /// Leading (maximal) word of the k-th cocycle — the free column that
    /// produced it, distinct across the basis.
    pub fn leading_word(&self, k: usize) -> &BarWord {
        let lead = *self.cocycles[k].keys().next_back().expect("nonzero");
        &self.words[lead]
    }

    /// True when every basis cocycle is homogeneous in word length equal to
    /// its level (holds for all built-in models); guarantees the
    /// indecomposables computation below is exact at every level ≤ cap.
    pub fn graded_basis(&self) -> bool {
        self.cocycles.iter().zip(&self.levels).all(|(z, &l)| {
            z.keys().all(|&w| self.words[w].letters.len() == l)
        })
    }
}

/// dim H⁰(B(ℝ,A,𝒪(S))) ∩ B_s = |S| · dim H⁰(B(ℝ,A,ℝ)) ∩ B_s for every s:
/// the finite Peter–Weyl tensor decomposition, checked numerically.
pub fn verify_tensor_decomposition(with: &H0Data, without: &H0Data, s_order: usize) -> bool {
    with.cap == without.cap
        && with
            .new_dims
            .iter()
            .zip(&without.new_dims)
            .all(|(a, b)| *a == s_order * b)
}

// ---------------------------------------------------------------------------
// Coproduct in H⁰ coordinates, indecomposables, cobracket, dual Lie algebra.
// ---------------------------------------------------------------------------

impl<'a> BarContext<'a> {
    /// Coordinates of Δ(z_k) in the adapted basis: map (i,j) ↦ coefficient
    /// of z_i ⊗ z_j. Both tensor factors are cocycles (Δ is a chain map and
    /// the complex is non-negatively graded), which the two solve passes
    /// certify.
    pub fn coproduct_coords(
        &self,
        h0: &H0Data,
        x: &BarElement,
    ) -> Result<BTreeMap<(usize, usize), Rat>, BarError> {
        let delta = self.coproduct(x);
        // Organize as slices over the left word.
        let mut slices: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for ((l, r), c) in delta {
            let li = *h0.word_index.get(&l).ok_or(BarError::CapTooSmall {
                cap: h0.cap,
                query: "coproduct factor beyond the computed cap".into(),
            })?;
            let ri = *h0.word_index.get(&r).ok_or(BarError::CapTooSmall {
                cap: h0.cap,
                query: "coproduct factor beyond the computed cap".into(),
            })?;
            slices.entry(li).or_default().insert(ri, c);
        }
        // Pass 1: solve each left-word slice over the right factor.
        let mut by_j: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (li, slice) in slices {
            let coords = h0.solve_coords(&slice)?;
            for (j, c) in coords {
                by_j.entry(j).or_default().insert(li, c);
            }
        }
        // Pass 2: solve over the left factor.
        let mut out = BTreeMap::new();
        for (j, vec) in by_j {
            let coords = h0.solve_coords(&vec)?;
            for (i, c) in coords {
                out.insert((i, j), c);
            }
        }
        Ok(out)
    }

    /// Indecomposables Q_r = (𝔪 ∩ B_r)/(𝔪² ∩ B_r + 𝔪 ∩ B_{r−1}) for
    /// r = 1..cap, the cobracket Δᶜ = Δ̄ − τΔ̄ projected to Q ⊗ Q, and the
    /// dual graded Lie algebra. Requires trivial coefficients.
    pub fn indecomposables(&self, h0: &H0Data) -> Result<Indecomposables, BarError> {
        if self.coeffs.is_some() {
            return Err(BarError::NeedsTrivialCoefficients);
        }
        let cap = h0.cap;
        let n = h0.dim();
        let graded = h0.graded_basis();

        // Shuffle products z_i·z_j (levels ≥ 1, total ≤ cap) in adapted
        // coordinates.
        let mut products: Vec<(usize, SparseVec)> = Vec::new(); // (total level, coords)
        for i in 0..n {
            if h0.levels[i] == 0 {
                continue;
            }
            for j in i..n {
                if h0.levels[j] == 0 || h0.levels[i] + h0.levels[j] > cap {
                    continue;
                }
                let p = self.shuffle(&h0.cocycle_element(i), &h0.cocycle_element(j));
                let coords = h0.solve(&p)?;
                products.push((h0.levels[i] + h0.levels[j], coords));
            }
        }

        // Per level r: indices of the level-r basis, the image of
        // 𝔪² ∩ B_r in the level-r block, and the quotient.
        let mut level_indices: Vec<Vec<usize>> = vec![Vec::new(); cap + 1];
        for (k, &l) in h0.levels.iter().enumerate() {
            level_indices[l].push(k);
        }
        let mut reps: Vec<usize> = Vec::new();
        let mut rep_levels: Vec<usize> = Vec::new();
        let mut q_dims = vec![0usize; cap];
        // projections[r]: QuotientData on the level-r coordinate block.
        let mut projections: Vec<Option<crate::linalg::QuotientData>> = vec![None; cap + 1];
        for r in 1..=cap {
            let idx = &level_indices[r];
            let local: HashMap<usize, usize> =
                idx.iter().enumerate().map(|(p, &k)| (k, p)).collect();
            // 𝔪² ∩ B_r: combinations of products lying in levels ≤ r. The
            // kernel trick intersects span(products) with the coordinate
            // subspace, then the level-r block is kept.
            let cols: Vec<&SparseVec> = products.iter().map(|(_, v)| v).collect();
            let mut high = RatMatrix::zero(n, cols.len());
            for (c, v) in cols.iter().enumerate() {
                for (&row, val) in v.iter() {
                    if h0.levels[row] > r {
                        high.set(row, c, val.clone());
                    }
                }
            }
            let kernel = high.kernel_basis();
            let mut block_vectors: Vec<SparseVec> = Vec::new();
            for combo in kernel {
                let mut v = SparseVec::new();
                for (c, coeff) in combo {
                    sparse_add_scaled(&mut v, cols[c], &coeff);
                }
                let restricted: SparseVec = v
                    .into_iter()
                    .filter(|(row, _)| h0.levels[*row] == r)
                    .map(|(row, c)| (local[&row], c))
                    .collect();
                if !restricted.is_empty() {
                    block_vectors.push(restricted);
                }
            }
            let qd = quotient_basis(idx.len(), &block_vectors)?;
            q_dims[r - 1] = qd.representatives.len();
            for &p in &qd.representatives {
                reps.push(idx[p]);
                rep_levels.push(r);
            }
            projections[r] = Some(qd);
        }
        let partial = IndecomposablesProjections {
            cap,
            level_indices,
            projections,
            reps: reps.clone(),
            rep_pos: reps.iter().enumerate().map(|(p, &k)| (k, p)).collect(),
        };

        // Cobracket per representative class.
        let mut cobracket: Vec<BTreeMap<(usize, usize), Rat>> = Vec::new();
        for &k in &reps {
            let c = self.coproduct_coords(h0, &h0.cocycle_element(k))?;
            // Reduced coproduct: restrict to the i,j ≥ 1 block (the unit is
            // index 0 in the adapted basis), antisymmetrize.
            let mut anti: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
            for ((i, j), v) in &c {
                if h0.levels[*i] == 0 || h0.levels[*j] == 0 {
                    continue;
                }
                *anti.entry((*i, *j)).or_insert_with(|| rat_i64(0)) += v;
                *anti.entry((*j, *i)).or_insert_with(|| rat_i64(0)) -= v;
            }
            // Project both factors to Q.
            let mut dc: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
            for ((i, j), v) in anti {
                if v.is_zero() {
                    continue;
                }
                let pi = partial.project(&sparse_from_entries([(i, rat_i64(1))]));
                let pj = partial.project(&sparse_from_entries([(j, rat_i64(1))]));
                for (&a, ca) in &pi {
                    for (&b, cb) in &pj {
                        let e = dc.entry((a, b)).or_insert_with(|| rat_i64(0));
                        *e += &v * ca * cb;
                    }
                }
            }
            dc.retain(|_, v| !v.is_zero());
            cobracket.push(dc);
        }

        // Dual graded Lie algebra: ⟨[X_a, X_b], q_k⟩ = ⟨X_a⊗X_b, Δᶜ(q_k)⟩.
        let mut bracket: BTreeMap<(usize, usize), Vec<(usize, Rat)>> = BTreeMap::new();
        for (k, dc) in cobracket.iter().enumerate() {
            for ((a, b), v) in dc {
                if a < b {
                    bracket.entry((*a, *b)).or_default().push((k, v.clone()));
                }
            }
        }
        for terms in bracket.values_mut() {
            terms.sort_by_key(|(k, _)| *k);
        }
        bracket.retain(|_, terms| !terms.is_empty());
        let barctx_labels: Vec<String> = reps
            .iter()
            .map(|&k| {
                let w = h0.leading_word(k);
                format!(
                    "[{}]",
                    w.letters
                        .iter()
                        .map(|&a| self.model.basis[a].label.clone())
                        .collect::<Vec<_>>()
                        .join("|")
                )
            })
            .collect();
        let dual_lie = GradedLie {
            truncation: cap,
            labels: barctx_labels,
            degree_of: rep_levels.clone(),
            dims: q_dims.clone(),
            bracket,
        };
        dual_lie.validate()?;
        Ok(Indecomposables {
            q_dims,
            reps,
            rep_levels,
            graded_basis: graded,
            cobracket,
            dual_lie,
            proj: partial,
        })
    }
}

/// Per-level quotient bookkeeping for π_Q: H⁰ coordinates → Q coordinates.
pub struct IndecomposablesProjections {
    cap: usize,
    level_indices: Vec<Vec<usize>>,
    projections: Vec<Option<crate::linalg::QuotientData>>,
    reps: Vec<usize>,
    rep_pos: HashMap<usize, usize>,
}

impl IndecomposablesProjections {
    /// Adapted-basis indices of the representatives, level ascending.
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    /// π_Q on an adapted-coordinate vector: project each level block onto
    /// the representative classes; coordinates over the flat rep list.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for r in 1..=self.cap {
            let Some(qd) = &self.projections[r] else { continue };
            let idx = &self.level_indices[r];
            let mut block = SparseVec::new();
            for (p, &k) in idx.iter().enumerate() {
                if let Some(c) = v.get(&k) {
                    block.insert(p, c.clone());
                }
            }
            if block.is_empty() {
                continue;
            }
            let img = qd.projection.mul_sparse(&block);
            for (q, c) in img {
                let global = idx[qd.representatives[q]];
                out.insert(self.rep_pos[&global], c);
            }
        }
        out
    }
}

/// Output of the indecomposables extraction: Q dimensions per bar degree,
/// representative cocycle indices, the cobracket in Q ⊗ Q coordinates, and
/// the validated dual graded Lie algebra.
pub struct Indecomposables {
    /// dim Q_r for r = 1..cap (index r−1).
    pub q_dims: Vec<usize>,
    /// Adapted-basis indices of the chosen representatives, level-ascending.
    pub reps: Vec<usize>,
    pub rep_levels: Vec<usize>,
    /// Whether the adapted basis was homogeneous in word length (then the
    /// computation is exact at every level through the cap).
    pub graded_basis: bool,
    /// Δᶜ(q_k) as (a,b) ↦ coefficient over representative pairs.
    pub cobracket: Vec<BTreeMap<(usize, usize), Rat>>,
    pub dual_lie: GradedLie,
    /// The exact projection π_Q used for the cobracket and for group
    /// actions on Q.
    pub proj: IndecomposablesProjections,
}

impl Indecomposables {
    /// Antisymmetry Δᶜ + τΔᶜ = 0, exactly.
    pub fn cobracket_antisymmetric(&self) -> bool {
        self.cobracket.iter().all(|dc| {
            dc.iter().all(|((a, b), v)| {
                let mirror = dc.get(&(*b, *a)).cloned().unwrap_or_else(|| rat_i64(0));
                mirror == -v.clone()
            })
        })
    }
}

/// Action matrices of S on H⁰ through a coaction's components, applied
/// letterwise: row k of the matrix for g holds the adapted-basis coordinates
/// of T_g(z_k). Row convention: M(g·h) = M(g)·M(h).
pub fn h0_action_matrices(
    ctx: &BarContext,
    h0: &H0Data,
    coalg: &CoefficientCoalgebra,
) -> Result<Vec<RatMatrix>, BarError> {
    let n = h0.dim();
    let mut out = Vec::with_capacity(coalg.group.order());
    for g in 0..coalg.group.order() {
        let mut m = RatMatrix::zero(n, n);
        for k in 0..n {
            let img = ctx.letterwise_action(&coalg.t[g], &h0.cocycle_element(k));
            let coords = h0.solve(&img)?;
            for (j, c) in coords {
                m.set(k, j, c);
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// The induced action on the indecomposables Q, in the representative basis
/// (row convention), for isotypic decomposition of Gr H₁(𝒰). The letterwise
/// action preserves the filtration and 𝔪² (each T_g is an algebra map), so
/// applying π_Q to the image of each representative is exact.
pub fn q_action_matrices(
    ctx: &BarContext,
    h0: &H0Data,
    ind: &Indecomposables,
    coalg: &CoefficientCoalgebra,
) -> Result<Vec<RatMatrix>, BarError> {
    let h0_mats = h0_action_matrices(ctx, h0, coalg)?;
    let mut out = Vec::with_capacity(h0_mats.len());
    for m in &h0_mats {
        let mut qm = RatMatrix::zero(ind.reps.len(), ind.reps.len());
        for (row, &k) in ind.reps.iter().enumerate() {
            for (col, c) in ind.proj.project(m.row(k)) {
                qm.set(row, col, c);
            }
        }
        out.push(qm);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Built-in model corpus.
// ---------------------------------------------------------------------------

/// A = Λ(b), deg b = 1, db = 0: the circle.
pub fn circle_model() -> DgaModel {
    DgaModel::new(
        "circle",
        vec![
            DgaBasisElem { label: "1".into(), degree: 0 },
            DgaBasisElem { label: "b".into(), degree: 1 },
        ],
        0,
        vec![SparseVec::new(), SparseVec::new()],
        HashMap::new(),
    )
    .expect("circle model valid")
}

/// A = ⟨1, b₁, b₂⟩ with zero products of positive elements: wedge of two
/// circles.
pub fn wedge_two_model() -> DgaModel {
    DgaModel::new(
        "wedge2",
        vec![
            DgaBasisElem { label: "1".into(), degree: 0 },
            DgaBasisElem { label: "b1".into(), degree: 1 },
            DgaBasisElem { label: "b2".into(), degree: 1 },
        ],
        0,
        vec![SparseVec::new(), SparseVec::new(), SparseVec::new()],
        HashMap::new(),
    )
    .expect("wedge model valid")
}

/// The circle model with an acyclic two-cell adjoined: x in degree 1 with
/// dx = y in degree 2. Quasi-isomorphic to the circle.
pub fn circle_acyclic_model() -> DgaModel {
    DgaModel::new(
        "circle+acyclic",
        vec![
            DgaBasisElem { label: "1".into(), degree: 0 },
            DgaBasisElem { label: "b".into(), degree: 1 },
            DgaBasisElem { label: "x".into(), degree: 1 },
            DgaBasisElem { label: "y".into(), degree: 2 },
        ],
        0,
        vec![
            SparseVec::new(),
            SparseVec::new(),
            sparse_from_entries([(3, rat_i64(1))]),
            SparseVec::new(),
        ],
        HashMap::new(),
    )
    .expect("circle+acyclic model valid")
}

/// Λ(e, f) with ef ≠ 0: the 2-torus. Exercises nonzero products of
/// positive-degree elements in the merge terms of the differential.
pub fn torus_model() -> DgaModel {
    let mut products = HashMap::new();
    products.insert((1, 2), sparse_from_entries([(3, rat_i64(1))]));
    DgaModel::new(
        "torus",
        vec![
            DgaBasisElem { label: "1".into(), degree: 0 },
            DgaBasisElem { label: "e".into(), degree: 1 },
            DgaBasisElem { label: "f".into(), degree: 1 },
            DgaBasisElem { label: "ef".into(), degree: 2 },
        ],
        0,
        vec![SparseVec::new(); 4],
        products,
    )
    .expect("torus model valid")
}

/// The circle model with 𝒪(Σ₂) coefficients and the trivial coaction (the
/// ℤ → ℤ/2 toy: the double cover's deck action is trivial on the model).
pub fn circle_sigma2_coalgebra(model: &DgaModel) -> CoefficientCoalgebra {
    let group = crate::groups::SymmetricGroup::new(2).group;
    CoefficientCoalgebra::trivial(model, group)
}

/// Wedge-of-two model with Σ₂ acting by swapping the two circle classes: a
/// nontrivial coaction fixture.
pub fn wedge_swap_coalgebra(model: &DgaModel) -> CoefficientCoalgebra {
    let group = crate::groups::SymmetricGroup::new(2).group;
    let id: Vec<SparseVec> = (0..model.dim())
        .map(|i| sparse_from_entries([(i, rat_i64(1))]))
        .collect();
    let swap: Vec<SparseVec> = vec![
        sparse_from_entries([(0, rat_i64(1))]),
        sparse_from_entries([(2, rat_i64(1))]),
        sparse_from_entries([(1, rat_i64(1))]),
    ];
    CoefficientCoalgebra::new(model, group, vec![id, swap]).expect("swap coaction valid")
}
