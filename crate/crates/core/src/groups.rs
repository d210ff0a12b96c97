//! The finite reductive layer: finite groups, their irreducible
//! representations (Young seminormal construction for symmetric groups,
//! complex characters for cyclic groups), the Peter–Weyl matrix-entry
//! decomposition of the function algebra, isotypic multiplicities, and
//! semidirect products S ⋉ U with U grouplike in a truncated envelope.
//!
//! Composition convention: `mult[g][h]` is "g then h" — for permutation
//! groups, (g·h)(i) = h(g(i)). This is the path/word order used everywhere
//! downstream, and actions supplied to [`SemidirectContext`] must be left
//! actions with respect to it: images[g·h] = images[g] ∘ images[h].

use crate::envelope::{Coeff, Envelope, Series};
use crate::linalg::{RatMatrix, SparseVec};
use crate::rational::{rat_i64, rat_to_f64, Rat};
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("multiplication table is not square or has out-of-range entries")]
    BadTable,
    #[error("no two-sided identity element found")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("irrep {0:?} is not multiplicative on the group table")]
    NotMultiplicative(String),
    #[error("action table is not a left action: images[g·h] ≠ images[g]∘images[h]")]
    NotLeftAction,
    #[error("element of the wrong group or algebra")]
    Mismatch,
    #[error("series fails the grouplike test at tolerance {tol}: defect {defect}")]
    NotGrouplike { defect: f64, tol: f64 },
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub name: String,
    pub elements: Vec<String>,
    /// mult[g][h] = index of g·h ("g then h").
    pub mult: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(
        name: impl Into<String>,
        elements: Vec<String>,
        mult: Vec<Vec<usize>>,
    ) -> Result<FiniteGroup, GroupError> {
        let n = elements.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n) {
            return Err(GroupError::BadTable);
        }
        if mult.iter().flatten().any(|&x| x >= n) {
            return Err(GroupError::BadTable);
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                .ok_or(GroupError::NoInverse(g))?;
            inverse[g] = inv;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup { name: name.into(), elements, mult, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }

    pub fn element_index(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Cyclic group of order n, elements g^0 … g^{n−1}.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let elements = (0..n).map(|k| format!("g^{k}")).collect();
        let mult = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::from_table(format!("C{n}"), elements, mult).expect("cyclic table valid")
    }
}

/// "a then b" composition of one-line permutations: (a·b)(i) = b(a(i)).
pub fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().map(|&i| b[i]).collect()
}

pub fn invert_perm(a: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; a.len()];
    for (i, &ai) in a.iter().enumerate() {
        inv[ai] = i;
    }
    inv
}

/// The symmetric group Σₙ together with its one-line permutation data.
#[derive(Clone, Debug)]
pub struct SymmetricGroup {
    pub group: FiniteGroup,
    /// perms[g][i] = image of i (0-based one-line notation).
    pub perms: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SymmetricGroup {
    pub fn new(n: usize) -> SymmetricGroup {
        assert!(n >= 1, "need at least one strand");
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            perms.push(cur.clone());
            if !next_permutation(&mut cur) {
                break;
            }
        }
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let elements: Vec<String> = perms
            .iter()
            .map(|p| p.iter().map(|&i| (i + 1).to_string()).collect::<Vec<_>>().join(""))
            .collect();
        let mult: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&compose_perm(a, b)]).collect())
            .collect();
        let group = FiniteGroup::from_table(format!("S{n}"), elements, mult)
            .expect("symmetric group table valid");
        SymmetricGroup { group, perms, index }
    }

    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn perm_index(&self, p: &[usize]) -> usize {
        self.index[p]
    }

    /// The adjacent transposition (i, i+1), 0-based i.
    pub fn transposition(&self, i: usize) -> usize {
        let n = self.n();
        assert!(i + 1 < n);
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, i + 1);
        self.index[&p]
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A complex dense matrix, row-major.
pub type CMatrix = Vec<Vec<Complex64>>;

/// An irreducible representation with matrices per group element, in the row
/// convention: R(g·h) = R(g)·R(h) with vectors acting as rows.
#[derive(Clone, Debug)]
pub enum Irrep {
    Rational { name: String, dim: usize, mats: Vec<RatMatrix> },
    Complex { name: String, dim: usize, mats: Vec<CMatrix> },
}

impl Irrep {
    pub fn name(&self) -> &str {
        match self {
            Irrep::Rational { name, .. } => name,
            Irrep::Complex { name, .. } => name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Irrep::Rational { dim, .. } => *dim,
            Irrep::Complex { dim, .. } => *dim,
        }
    }

    pub fn entry(&self, g: usize, i: usize, j: usize) -> Complex64 {
        match self {
            Irrep::Rational { mats, .. } => {
                Complex64::new(rat_to_f64(&mats[g].get(i, j)), 0.0)
            }
            Irrep::Complex { mats, .. } => mats[g][i][j],
        }
    }

    pub fn entry_rat(&self, g: usize, i: usize, j: usize) -> Option<Rat> {
        match self {
            Irrep::Rational { mats, .. } => Some(mats[g].get(i, j)),
            Irrep::Complex { .. } => None,
        }
    }

    pub fn character(&self, g: usize) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.entry(g, i, i)).sum()
    }

    pub fn character_rat(&self, g: usize) -> Option<Rat> {
        match self {
            Irrep::Rational { mats, dim, .. } => {
                let mut t = rat_i64(0);
                for i in 0..*dim {
                    t += mats[g].get(i, i);
                }
                Some(t)
            }
            Irrep::Complex { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Irrep::Rational { .. })
    }

    /// Check R(g·h) = R(g)·R(h) over the whole table.
    pub fn check_multiplicative(&self, group: &FiniteGroup) -> Result<(), GroupError> {
        let n = group.order();
        match self {
            Irrep::Rational { name, mats, .. } => {
                for g in 0..n {
                    for h in 0..n {
                        let prod = mats[g].matmul(&mats[h]).expect("square");
                        if prod != mats[group.mul(g, h)] {
                            return Err(GroupError::NotMultiplicative(name.clone()));
                        }
                    }
                }
            }
            Irrep::Complex { name, dim, mats } => {
                for g in 0..n {
                    for h in 0..n {
                        let target = &mats[group.mul(g, h)];
                        for i in 0..*dim {
                            for j in 0..*dim {
                                let mut acc = Complex64::new(0.0, 0.0);
                                for k in 0..*dim {
                                    acc += mats[g][i][k] * mats[h][k][j];
                                }
                                if (acc - target[i][j]).norm() > 1e-9 {
                                    return Err(GroupError::NotMultiplicative(name.clone()));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Young seminormal construction for symmetric groups.
// ---------------------------------------------------------------------------

/// Partitions of n in descending lexicographic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Standard Young tableaux of the given shape, as row-major fills; entry
/// values are 0-based (cell containing k means the number k+1 in classical
/// terms). Returned in a fixed deterministic order.
fn standard_tableaux(shape: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n: usize = shape.iter().sum();
    let mut out = Vec::new();
    // fill[r] = number of cells already placed in row r.
    let mut fill = vec![0usize; shape.len()];
    let mut tableau: Vec<Vec<usize>> = shape.iter().map(|&len| vec![usize::MAX; len]).collect();
    fn rec(
        k: usize,
        n: usize,
        shape: &[usize],
        fill: &mut Vec<usize>,
        tableau: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if k == n {
            out.push(tableau.clone());
            return;
        }
        for r in 0..shape.len() {
            let c = fill[r];
            if c < shape[r] && (r == 0 || fill[r - 1] > c) {
                tableau[r][c] = k;
                fill[r] += 1;
                rec(k + 1, n, shape, fill, tableau, out);
                fill[r] -= 1;
                tableau[r][c] = usize::MAX;
            }
        }
    }
    rec(0, n, shape, &mut fill, &mut tableau, &mut out);
    out
}

/// Position (row, col) of value k in a tableau.
fn position_of(t: &[Vec<usize>], k: usize) -> (usize, usize) {
    for (r, row) in t.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v == k {
                return (r, c);
            }
        }
    }
    unreachable!("value present in standard tableau")
}

/// Young's seminormal representation of Σₙ for one partition shape, in the
/// row convention. For the adjacent transposition s_i = (i, i+1) and a
/// standard tableau T with signed axial distance d = content(i+1) −
/// content(i): s_i·v_T = (1/d)·v_T when the swap is not standard (d = ±1),
/// and otherwise s_i·v_T = (1/d)·v_T + α·v_{T'} with α = 1 for d > 0 and
/// α = 1 − 1/d² for d < 0.
fn seminormal_irrep(sym: &SymmetricGroup, shape: &[usize]) -> Irrep {
    let n = sym.n();
    let tableaux = standard_tableaux(shape);
    let dim = tableaux.len();
    let tindex: HashMap<Vec<Vec<usize>>, usize> =
        tableaux.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

    // Matrices of the adjacent transpositions.
    let mut gen_mats = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut m = RatMatrix::zero(dim, dim);
        for (ti, t) in tableaux.iter().enumerate() {
            let (r1, c1) = position_of(t, i);
            let (r2, c2) = position_of(t, i + 1);
            let d = (c2 as i64 - r2 as i64) - (c1 as i64 - r1 as i64);
            let dr = Rat::from_integer(d.into());
            m.set(ti, ti, rat_i64(1) / &dr);
            if d.abs() >= 2 {
                let mut swapped = t.clone();
                swapped[r1][c1] = i + 1;
                swapped[r2][c2] = i;
                let tj = tindex[&swapped];
                let alpha = if d > 0 {
                    rat_i64(1)
                } else {
                    rat_i64(1) - rat_i64(1) / (&dr * &dr)
                };
                m.set(ti, tj, alpha);
            }
        }
        gen_mats.push(m);
    }

    // Assemble R(g) along BFS words in the adjacent transpositions;
    // in the row convention R(g·t) = R(g)·M(t).
    let order = sym.group.order();
    let mut mats: Vec<Option<RatMatrix>> = vec![None; order];
    mats[sym.group.identity] = Some(RatMatrix::identity(dim));
    let mut queue = std::collections::VecDeque::from([sym.group.identity]);
    while let Some(g) = queue.pop_front() {
        let rg = mats[g].clone().unwrap();
        for i in 0..n - 1 {
            let t = sym.transposition(i);
            let gt = sym.group.mul(g, t);
            if mats[gt].is_none() {
                mats[gt] = Some(rg.matmul(&gen_mats[i]).expect("square"));
                queue.push_back(gt);
            }
        }
    }
    let mats: Vec<RatMatrix> = mats.into_iter().map(|m| m.expect("group connected")).collect();
    let name = format!(
        "[{}]",
        shape.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    Irrep::Rational { name, dim, mats }
}

/// All irreducible representations of Σₙ by the seminormal construction,
/// one per partition of n.
pub fn symmetric_irreps(sym: &SymmetricGroup) -> Vec<Irrep> {
    partitions(sym.n()).iter().map(|shape| seminormal_irrep(sym, shape)).collect()
}

/// The n one-dimensional complex irreps of the cyclic group of order n.
pub fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    use std::f64::consts::PI;
    (0..n)
        .map(|k| {
            let mats: Vec<CMatrix> = (0..n)
                .map(|m| {
                    let theta = 2.0 * PI * (k * m % n) as f64 / n as f64;
                    vec![vec![Complex64::new(theta.cos(), theta.sin())]]
                })
                .collect();
            Irrep::Complex { name: format!("chi{k}"), dim: 1, mats }
        })
        .collect()
}

/// Row rank of a complex matrix by Gaussian elimination with partial
/// pivoting; pivots below `tol` in absolute value count as zero.
pub fn complex_rank(mut m: Vec<Vec<Complex64>>, tol: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (best, best_norm) = (rank..rows)
            .map(|r| (r, m[r][c].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_norm <= tol {
            continue;
        }
        m.swap(rank, best);
        let piv = m[rank][c];
        for r in 0..rows {
            if r != rank {
                let f = m[r][c] / piv;
                if f.norm() > 0.0 {
                    for cc in c..cols {
                        let sub = f * m[rank][cc];
                        m[r][cc] -= sub;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug)]
pub struct PeterWeylReport {
    pub group_order: usize,
    pub dims: Vec<usize>,
    pub sum_of_squares: usize,
    pub matrix_entry_rank: usize,
    pub multiplicative: bool,
    pub characters_orthonormal: bool,
    pub exact: bool,
    pub pass: bool,
}

/// Verify the finite Peter–Weyl decomposition: Σ dim² = |S| and the matrix
/// entries of the irreps span the functions on S (rank |S|). Rank and
/// character orthonormality are exact when every irrep is rational.
pub fn peter_weyl_check(group: &FiniteGroup, irreps: &[Irrep]) -> PeterWeylReport {
    let order = group.order();
    let dims: Vec<usize> = irreps.iter().map(|r| r.dim()).collect();
    let sum_of_squares: usize = dims.iter().map(|d| d * d).sum();
    let multiplicative = irreps.iter().all(|r| r.check_multiplicative(group).is_ok());
    let exact = irreps.iter().all(|r| r.is_rational());

    // Character orthonormality ⟨χ_a, χ_b⟩ = δ_ab.
    let mut characters_orthonormal = true;
    for (a, ra) in irreps.iter().enumerate() {
        for (b, rb) in irreps.iter().enumerate() {
            if exact {
                let mut acc = rat_i64(0);
                for g in 0..order {
                    acc += ra.character_rat(g).unwrap() * rb.character_rat(group.inverse[g]).unwrap();
                }
                acc /= Rat::from_integer(order.into());
                let expect = if a == b { rat_i64(1) } else { rat_i64(0) };
                if acc != expect {
                    characters_orthonormal = false;
                }
            } else {
                let mut acc = Complex64::new(0.0, 0.0);
                for g in 0..order {
                    acc += ra.character(g) * rb.character(g).conj();
                }
                acc /= order as f64;
                let expect = if a == b { 1.0 } else { 0.0 };
                if (acc - expect).norm() > 1e-9 {
                    characters_orthonormal = false;
                }
            }
        }
    }

    // Matrix-entry map Φ: rows = group elements, columns = (α, i, j).
    let matrix_entry_rank = if exact {
        let total: usize = sum_of_squares;
        let mut m = RatMatrix::zero(order, total);
        let mut col = 0;
        for r in irreps {
            let d = r.dim();
            for i in 0..d {
                for j in 0..d {
                    for g in 0..order {
                        m.set(g, col, r.entry_rat(g, i, j).unwrap());
                    }
                    col += 1;
                }
            }
        }
        m.rank()
    } else {
        let mut rows = vec![Vec::new(); order];
        for r in irreps {
            let d = r.dim();
            for i in 0..d {
                for j in 0..d {
                    for (g, row) in rows.iter_mut().enumerate() {
                        row.push(r.entry(g, i, j));
                    }
                }
            }
        }
        complex_rank(rows, 1e-9)
    };

    let pass = multiplicative
        && characters_orthonormal
        && sum_of_squares == order
        && matrix_entry_rank == order;
    PeterWeylReport {
        group_order: order,
        dims,
        sum_of_squares,
        matrix_entry_rank,
        multiplicative,
        characters_orthonormal,
        exact,
        pass,
    }
}

/// Isotypic multiplicities of a rational representation of the group
/// (matrices in row convention per element) with respect to the given
/// irreps: m_α = (1/|S|) Σ_g χ_α(g⁻¹) · tr action(g). Exact for rational
/// irreps; complex characters are rounded with an integrality check.
pub fn isotypic_multiplicities(
    group: &FiniteGroup,
    irreps: &[Irrep],
    action: &[RatMatrix],
) -> Vec<usize> {
    assert_eq!(action.len(), group.order());
    let order = group.order();
    let trace = |g: usize| -> Rat {
        let m = &action[g];
        let mut t = rat_i64(0);
        for i in 0..m.rows() {
            t += m.get(i, i);
        }
        t
    };
    irreps
        .iter()
        .map(|r| {
            if let Some(_) = r.character_rat(0) {
                let mut acc = rat_i64(0);
                for g in 0..order {
                    acc += r.character_rat(group.inverse[g]).unwrap() * trace(g);
                }
                acc /= Rat::from_integer(order.into());
                assert!(acc.is_integer(), "isotypic multiplicity must be integral");
                let v: i64 = acc.to_integer().try_into().expect("small multiplicity");
                assert!(v >= 0);
                v as usize
            } else {
                let mut acc = Complex64::new(0.0, 0.0);
                for g in 0..order {
                    acc += r.character(group.inverse[g]) * rat_to_f64(&trace(g));
                }
                acc /= order as f64;
                let rounded = acc.re.round();
                assert!(
                    (acc.re - rounded).abs() < 1e-9 && acc.im.abs() < 1e-9,
                    "isotypic multiplicity must be integral"
                );
                rounded as usize
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Semidirect products S ⋉ U_N.
// ---------------------------------------------------------------------------

/// Shared context for semidirect-product arithmetic: the finite group, the
/// truncated envelope U lives in, and a left action of the group by Lie-label
/// images (validated as an action on construction).
pub struct SemidirectContext<'a> {
    pub group: &'a FiniteGroup,
    pub env: &'a Envelope,
    /// images[g][label] = Ad(g)(x_label) as a rational Lie element.
    pub images: Vec<Vec<SparseVec>>,
}

/// Element (s, u) of S ⋉ U_N with multiplication
/// (s₁,u₁)·(s₂,u₂) = (s₁s₂, Ad(s₂⁻¹)(u₁)·u₂).
#[derive(Clone, Debug)]
pub struct SemidirectElement {
    pub s: usize,
    pub u: Series<Complex64>,
}

/// outer ∘ inner on label-image tables: (outer∘inner)(x_k) = outer(inner(x_k)).
pub fn compose_label_images(outer: &[SparseVec], inner: &[SparseVec]) -> Vec<SparseVec> {
    inner
        .iter()
        .map(|img| {
            let mut out = SparseVec::new();
            for (&label, c) in img {
                for (&l2, c2) in &outer[label] {
                    let e = out.entry(l2).or_insert_with(|| rat_i64(0));
                    *e += c * c2;
                    if num_traits::Zero::is_zero(e) {
                        out.remove(&l2);
                    }
                }
            }
            out
        })
        .collect()
}

fn identity_images(n_labels: usize) -> Vec<SparseVec> {
    (0..n_labels)
        .map(|k| {
            let mut v = SparseVec::new();
            v.insert(k, rat_i64(1));
            v
        })
        .collect()
}

impl<'a> SemidirectContext<'a> {
    pub fn new(
        group: &'a FiniteGroup,
        env: &'a Envelope,
        images: Vec<Vec<SparseVec>>,
    ) -> Result<SemidirectContext<'a>, GroupError> {
        if images.len() != group.order() {
            return Err(GroupError::Mismatch);
        }
        let n_labels = env.lie.dim_total();
        if images.iter().any(|t| t.len() != n_labels) {
            return Err(GroupError::Mismatch);
        }
        if images[group.identity] != identity_images(n_labels) {
            return Err(GroupError::NotLeftAction);
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let composed = compose_label_images(&images[g], &images[h]);
                if composed != images[group.mul(g, h)] {
                    return Err(GroupError::NotLeftAction);
                }
            }
        }
        Ok(SemidirectContext { group, env, images })
    }

    pub fn identity(&self) -> SemidirectElement {
        SemidirectElement { s: self.group.identity, u: self.env.one() }
    }

    /// Apply Ad(g) to a series.
    pub fn ad(&self, g: usize, u: &Series<Complex64>) -> Series<Complex64> {
        self.env.apply_automorphism(&self.images[g], u)
    }

    pub fn multiply(
        &self,
        a: &SemidirectElement,
        b: &SemidirectElement,
    ) -> SemidirectElement {
        let s = self.group.mul(a.s, b.s);
        let conj = self.ad(self.group.inverse[b.s], &a.u);
        let u = self.env.mul(&conj, &b.u);
        SemidirectElement { s, u }
    }

    pub fn inverse(&self, a: &SemidirectElement) -> SemidirectElement {
        let uin = self.env.inverse(&a.u).expect("grouplike series invertible");
        SemidirectElement { s: self.group.inverse[a.s], u: self.ad(a.s, &uin) }
    }

    /// Largest coefficient-wise distance between the two elements' series,
    /// infinite if the group parts differ.
    pub fn distance(&self, a: &SemidirectElement, b: &SemidirectElement) -> f64 {
        if a.s != b.s {
            return f64::INFINITY;
        }
        a.u.coeffs
            .iter()
            .zip(&b.u.coeffs)
            .map(|(x, y)| x.dist(y))
            .fold(0.0, f64::max)
    }

    /// Reject elements whose series part is not grouplike within tol.
    pub fn validate_element(
        &self,
        a: &SemidirectElement,
        tol: f64,
    ) -> Result<(), GroupError> {
        let defect = self.env.grouplike_defect(&a.u);
        if defect > tol {
            return Err(GroupError::NotGrouplike { defect, tol });
        }
        Ok(())
    }
}
