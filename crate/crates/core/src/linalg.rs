//! Exact sparse linear algebra over arbitrary-precision rationals: row
//! reduction, kernels, and quotient-space bases. This is the substrate under
//! the bar construction, the Hall-basis normal forms, and the isotypic
//! decompositions; everything here is exact.

use crate::rational::Rat;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Sparse vector: index -> nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Rat>;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace vector has index {index} outside ambient dimension {ambient}")]
    IndexOutOfRange { index: usize, ambient: usize },
}

pub fn sparse_add_scaled(dst: &mut SparseVec, src: &SparseVec, c: &Rat) {
    if c.is_zero() {
        return;
    }
    for (&j, v) in src {
        let e = dst.entry(j).or_insert_with(Rat::zero);
        *e += v * c;
        if e.is_zero() {
            dst.remove(&j);
        }
    }
}

pub fn sparse_scale(v: &SparseVec, c: &Rat) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&j, x)| (j, x * c)).collect()
}

pub fn sparse_from_entries(entries: impl IntoIterator<Item = (usize, Rat)>) -> SparseVec {
    let mut v = SparseVec::new();
    for (j, c) in entries {
        if c.is_zero() {
            continue;
        }
        let e = v.entry(j).or_insert_with(Rat::zero);
        *e += &c;
        if e.is_zero() {
            v.remove(&j);
        }
    }
    v
}

/// Sparse rational matrix. Stored row-major; zero entries are never kept.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Build from column vectors.
    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (&i, v) in col {
                assert!(i < rows, "column entry out of range");
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.data[i].get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let mut col = SparseVec::new();
        for (i, row) in self.data.iter().enumerate() {
            if let Some(v) = row.get(&j) {
                col.insert(i, v.clone());
            }
        }
        col
    }

    /// Matrix · sparse column vector.
    pub fn mul_sparse(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = Rat::zero();
            // Iterate the sparser of the two.
            if row.len() <= v.len() {
                for (j, a) in row {
                    if let Some(b) = v.get(j) {
                        acc += a * b;
                    }
                }
            } else {
                for (j, b) in v {
                    if let Some(a) = row.get(j) {
                        acc += a * b;
                    }
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    /// Matrix product self · other.
    pub fn matmul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "matmul: {}x{} · {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    let e = out.data[i].entry(*j).or_insert_with(Rat::zero);
                    *e += a * b;
                }
            }
        }
        for row in &mut out.data {
            row.retain(|_, v| !v.is_zero());
        }
        Ok(out)
    }

    /// Reduced row echelon form together with the pivot column list.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(None);
        (m, pivots)
    }

    /// In-place Gauss–Jordan; if `transform` is supplied the same row
    /// operations are applied to it (so `transform` becomes T with
    /// T·self_original = rref). Returns pivot columns.
    fn rref_in_place(&mut self, mut transform: Option<&mut RatMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // First row at or below r with a nonzero entry in column c.
            let Some(p) = (r..self.rows).find(|&i| self.data[i].contains_key(&c)) else {
                continue;
            };
            self.data.swap(r, p);
            if let Some(t) = transform.as_deref_mut() {
                t.data.swap(r, p);
            }
            let inv = {
                let piv = self.data[r].get(&c).unwrap();
                Rat::one() / piv.clone()
            };
            if !inv.is_one() {
                self.data[r] = sparse_scale(&self.data[r], &inv);
                if let Some(t) = transform.as_deref_mut() {
                    t.data[r] = sparse_scale(&t.data[r], &inv);
                }
            }
            let pivot_row = self.data[r].clone();
            let pivot_trow = transform.as_deref_mut().map(|t| t.data[r].clone());
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                if let Some(f) = self.data[i].get(&c).cloned() {
                    let neg = -f;
                    sparse_add_scaled(&mut self.data[i], &pivot_row, &neg);
                    if let (Some(t), Some(trow)) = (transform.as_deref_mut(), pivot_trow.as_ref())
                    {
                        sparse_add_scaled(&mut t.data[i], trow, &neg);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {x : M x = 0}, one sparse vector per free
    /// column, in ascending free-column order, each with a 1 in its free slot.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let (e, pivots) = self.rref();
        let pivot_set: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for j in 0..self.cols {
            if pivot_set.contains_key(&j) {
                continue;
            }
            let mut v = SparseVec::new();
            v.insert(j, Rat::one());
            for (&pc, &pr) in &pivot_set {
                if let Some(a) = e.data[pr].get(&j) {
                    v.insert(pc, -a.clone());
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Repeated exact solves against a fixed matrix: x with M x = v, coordinates
/// over M's columns. Precomputes the row transform once.
pub struct RrefSolver {
    /// T with T·M in reduced row echelon form.
    transform: RatMatrix,
    pivots: Vec<usize>,
}

impl RrefSolver {
    pub fn new(m: &RatMatrix) -> Self {
        let mut e = m.clone();
        let mut t = RatMatrix::identity(m.rows());
        let pivots = e.rref_in_place(Some(&mut t));
        RrefSolver { transform: t, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Solve M x = v. Returns None if inconsistent. The solution has zero
    /// coordinates on non-pivot columns (unique when M has full column rank).
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let w = self.transform.mul_sparse(v);
        let mut x = SparseVec::new();
        for (r, &c) in self.pivots.iter().enumerate() {
            if let Some(val) = w.get(&r) {
                x.insert(c, val.clone());
            }
        }
        // Rows of the echelon form beyond the rank are zero rows; w must
        // vanish there for consistency.
        for (&r, val) in &w {
            if r >= self.pivots.len() && !val.is_zero() {
                return None;
            }
        }
        Some(x)
    }
}

/// Incremental column-space solver: insert columns one at a time, then express
/// arbitrary vectors as exact combinations of the inserted columns. Avoids
/// materializing a dense row transform, so it stays cheap on the sparse,
/// tall matrices the Hall-basis machinery produces.
pub struct SpanSolver {
    /// Reduced columns, each normalized to leading coefficient 1, keyed by
    /// their pivot (leading index); paired with its expression over the
    /// original inserted columns.
    reduced: BTreeMap<usize, (SparseVec, SparseVec)>,
    inserted: usize,
}

impl Default for SpanSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl SpanSolver {
    pub fn new() -> Self {
        SpanSolver { reduced: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce v against the stored columns; returns (remainder, combination
    /// over original columns accounting for the reduced part).
    fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut combo = SparseVec::new();
        loop {
            let Some((&lead, _)) = rem.iter().next() else { break };
            let Some((col, expr)) = self.reduced.get(&lead) else { break };
            let c = rem.get(&lead).unwrap().clone();
            let neg = -c.clone();
            sparse_add_scaled(&mut rem, col, &neg);
            sparse_add_scaled(&mut combo, expr, &c);
            debug_assert!(!rem.contains_key(&lead));
        }
        (rem, combo)
    }

    /// Insert a column; returns true if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (mut rem, combo) = self.reduce(v);
        let Some((&lead, _)) = rem.iter().next() else {
            return false;
        };
        let inv = Rat::one() / rem.get(&lead).unwrap().clone();
        rem = sparse_scale(&rem, &inv);
        // v = rem·lead_coeff + Σ combo_j col_j  ⟹  rem = (e_idx − combo)·inv
        let mut expr = sparse_from_entries([(idx, Rat::one())]);
        let neg_one = -Rat::one();
        sparse_add_scaled(&mut expr, &combo, &neg_one);
        expr = sparse_scale(&expr, &inv);
        self.reduced.insert(lead, (rem, expr));
        true
    }

    /// Express v over the inserted columns; None if outside the span.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(v);
        if rem.is_empty() {
            Some(combo)
        } else {
            None
        }
    }
}

/// Basis (as reduced rows) of the span of the given vectors.
pub fn row_space_basis(vectors: &[SparseVec], dim: usize) -> Vec<SparseVec> {
    let mut m = RatMatrix::zero(vectors.len(), dim);
    for (i, v) in vectors.iter().enumerate() {
        for (&j, c) in v {
            m.set(i, j, c.clone());
        }
    }
    let (e, pivots) = m.rref();
    (0..pivots.len()).map(|r| e.row(r).clone()).collect()
}

/// A choice of representatives for ambient/subspace together with the exact
/// projection onto those representatives' coordinates.
#[derive(Clone, Debug)]
pub struct QuotientData {
    /// Ambient coordinate indices whose classes form a basis of the quotient.
    pub representatives: Vec<usize>,
    /// (dim quotient) × ambient matrix; row k gives the coordinate of the
    /// class of an ambient vector on representatives[k]. Vanishes on the
    /// subspace, and sends representative e_{r_k} to the k-th unit vector.
    pub projection: RatMatrix,
}

/// Representatives + projection for ambient ℚ^n modulo span(subspace).
pub fn quotient_basis(
    ambient_dim: usize,
    subspace: &[SparseVec],
) -> Result<QuotientData, LinalgError> {
    for v in subspace {
        if let Some((&idx, _)) = v.iter().next_back() {
            if idx >= ambient_dim {
                return Err(LinalgError::IndexOutOfRange { index: idx, ambient: ambient_dim });
            }
        }
    }
    // Columns: subspace vectors first, then the identity. Pivots landing in
    // the identity block select quotient representatives.
    let k = subspace.len();
    let mut m = RatMatrix::zero(ambient_dim, k + ambient_dim);
    for (j, v) in subspace.iter().enumerate() {
        for (&i, c) in v {
            m.set(i, j, c.clone());
        }
    }
    for i in 0..ambient_dim {
        m.set(i, k + i, Rat::one());
    }
    let (_, pivots) = m.rref();
    let sub_rank = pivots.iter().filter(|&&c| c < k).count();
    let representatives: Vec<usize> =
        pivots.iter().filter(|&&c| c >= k).map(|&c| c - k).collect();
    debug_assert_eq!(sub_rank + representatives.len(), ambient_dim);

    // Square change-of-basis: columns = independent subspace vectors followed
    // by representative unit vectors; the projection reads off the
    // representative coordinates, i.e. the last rows of the inverse.
    let independent: Vec<&SparseVec> = {
        // The pivots < k identify an independent subset of the subspace list.
        pivots.iter().filter(|&&c| c < k).map(|&c| &subspace[c]).collect()
    };
    let mut basis = RatMatrix::zero(ambient_dim, ambient_dim);
    for (j, v) in independent.iter().enumerate() {
        for (&i, c) in v.iter() {
            basis.set(i, j, c.clone());
        }
    }
    for (j, &r) in representatives.iter().enumerate() {
        basis.set(r, sub_rank + j, Rat::one());
    }
    let mut e = basis.clone();
    let mut inv = RatMatrix::identity(ambient_dim);
    let piv = e.rref_in_place(Some(&mut inv));
    debug_assert_eq!(piv.len(), ambient_dim, "change of basis must be invertible");
    let mut projection = RatMatrix::zero(representatives.len(), ambient_dim);
    for q in 0..representatives.len() {
        for (&j, c) in inv.row(sub_rank + q) {
            projection.set(q, j, c.clone());
        }
    }
    Ok(QuotientData { representatives, projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_i64};
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: rank by dense fraction-free (Bareiss) elimination over BigInt.
    /// Independent of the sparse rref path.
    fn rank_bareiss(m: &RatMatrix) -> usize {
        // Clear denominators row by row.
        let mut a: Vec<Vec<BigInt>> = (0..m.rows())
            .map(|i| {
                let mut lcm = BigInt::from(1);
                for (_, v) in m.row(i) {
                    lcm = num_integer::lcm(lcm, v.denom().clone());
                }
                (0..m.cols())
                    .map(|j| {
                        let v = m.get(i, j);
                        v.numer() * (&lcm / v.denom())
                    })
                    .collect()
            })
            .collect();
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut rank = 0;
        let mut prev = BigInt::from(1);
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| a[i][c] != BigInt::from(0)) else {
                continue;
            };
            a.swap(r, p);
            for i in 0..rows {
                if i == r {
                    continue;
                }
                for j in 0..cols {
                    if j == c {
                        continue;
                    }
                    let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    a[i][j] = &t / &prev;
                }
                a[i][c] = BigInt::from(0);
            }
            prev = a[r][c].clone();
            rank += 1;
            r += 1;
            if r == rows {
                break;
            }
        }
        rank
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RatMatrix {
        let mut m = RatMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.4) {
                    let num = rng.gen_range(-6i64..=6);
                    let den = rng.gen_range(1i64..=4);
                    m.set(i, j, rat(num, den));
                }
            }
        }
        m
    }

    #[test]
    fn rank_matches_fraction_free_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..8);
            let m = random_matrix(&mut rng, rows, cols);
            assert_eq!(m.rank(), rank_bareiss(&m));
        }
    }

    #[test]
    fn rref_is_idempotent_and_rank_nullity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let rows = rng.gen_range(1..7);
            let cols = rng.gen_range(1..7);
            let m = random_matrix(&mut rng, rows, cols);
            let (e, pivots) = m.rref();
            let (e2, pivots2) = e.rref();
            assert_eq!(e, e2);
            assert_eq!(pivots, pivots2);
            let kernel = m.kernel_basis();
            assert_eq!(pivots.len() + kernel.len(), cols);
            for v in &kernel {
                assert!(m.mul_sparse(v).is_empty(), "kernel vector not annihilated");
            }
        }
    }

    #[test]
    fn single_pivot_example() {
        // One relation (1,0) inside ℚ²: representative must be index 1.
        let sub = vec![sparse_from_entries([(0, rat_i64(1))])];
        let q = quotient_basis(2, &sub).unwrap();
        assert_eq!(q.representatives, vec![1]);
        assert_eq!(q.projection.get(0, 1), rat_i64(1));
        assert_eq!(q.projection.get(0, 0), rat_i64(0));
    }

    #[test]
    fn projection_kills_subspace_and_fixes_representatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let ambient = rng.gen_range(1..8);
            let k = rng.gen_range(0..5);
            let sub: Vec<SparseVec> = (0..k)
                .map(|_| {
                    let mut v = SparseVec::new();
                    for idx in 0..ambient {
                        if rng.gen_bool(0.5) {
                            let n = rng.gen_range(-4i64..=4);
                            if n != 0 {
                                v.insert(idx, rat_i64(n));
                            }
                        }
                    }
                    v
                })
                .collect();
            let q = quotient_basis(ambient, &sub).unwrap();
            for v in &sub {
                assert!(q.projection.mul_sparse(v).is_empty(), "projection ∘ inclusion ≠ 0");
            }
            for (row, &r) in q.representatives.iter().enumerate() {
                let unit = sparse_from_entries([(r, rat_i64(1))]);
                let img = q.projection.mul_sparse(&unit);
                assert_eq!(img, sparse_from_entries([(row, rat_i64(1))]));
            }
        }
    }

    #[test]
    fn solver_expresses_vectors_in_column_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..6);
            let m = random_matrix(&mut rng, rows, cols);
            let solver = RrefSolver::new(&m);
            // A vector manifestly in the span must solve and reproduce.
            let coeffs: Vec<Rat> = (0..cols).map(|_| rat_i64(rng.gen_range(-3..=3))).collect();
            let mut v = SparseVec::new();
            for j in 0..cols {
                sparse_add_scaled(&mut v, &m.column(j), &coeffs[j]);
            }
            let x = solver.solve(&v).expect("in-span vector must solve");
            let mut back = SparseVec::new();
            for (j, c) in &x {
                sparse_add_scaled(&mut back, &m.column(*j), c);
            }
            assert_eq!(back, v);
        }
    }

    #[test]
    fn solver_rejects_out_of_span() {
        // Column span of [[1],[1]] misses (1,0).
        let mut m = RatMatrix::zero(2, 1);
        m.set(0, 0, rat_i64(1));
        m.set(1, 0, rat_i64(1));
        let solver = RrefSolver::new(&m);
        let v = sparse_from_entries([(0, rat_i64(1))]);
        assert!(solver.solve(&v).is_none());
    }

    #[test]
    fn out_of_range_subspace_rejected() {
        let sub = vec![sparse_from_entries([(7, rat_i64(1))])];
        let err = quotient_basis(3, &sub).unwrap_err();
        assert_eq!(err, LinalgError::IndexOutOfRange { index: 7, ambient: 3 });
    }
}
