//! Free graded Lie algebras on weighted generators, Hall bases, and nilpotent
//! quotients by homogeneous ideals.
//!
//! Normal forms are computed by expanding bracket monomials into the tensor
//! algebra (word space) of each degree and solving exactly against the
//! expansions of the Hall basis. That makes rewriting trivially terminating
//! and lets the word-space rank re-certify basis independence at build time.

use crate::linalg::{
    quotient_basis, row_space_basis, sparse_add_scaled, sparse_from_entries, sparse_scale,
    RatMatrix, SparseVec, SpanSolver,
};
use crate::rational::{format_rat_short, Rat};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("truncation degree must be at least 1")]
    BadTruncation,
    #[error("generator {0:?} has degree 0; degrees must be positive")]
    BadGeneratorDegree(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("relation {index} is not homogeneous (degrees {degrees:?})")]
    InhomogeneousRelation { index: usize, degrees: Vec<usize> },
    #[error("relation {index} has degree {degree} beyond truncation {truncation}")]
    RelationBeyondTruncation { index: usize, degree: usize, truncation: usize },
    #[error("generator action is not a degree-preserving signed permutation: {0}")]
    BadAction(String),
    #[error("elements belong to different algebras")]
    MismatchedAlgebra,
    #[error("structure constants fail {law}: [{a},{b}] case")]
    InvalidStructure { law: String, a: String, b: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: usize) -> Self {
        Generator { name: name.into(), degree }
    }
}

/// A bracketing tree over generator indices. The derived order (generators
/// before composites, then lexicographic) refines into the canonical
/// length-then-lexicographic order once degree is compared first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HallTree {
    Gen(usize),
    Br(Box<HallTree>, Box<HallTree>),
}

impl HallTree {
    pub fn degree(&self, gens: &[Generator]) -> usize {
        match self {
            HallTree::Gen(g) => gens[*g].degree,
            HallTree::Br(l, r) => l.degree(gens) + r.degree(gens),
        }
    }

    pub fn render(&self, gens: &[Generator]) -> String {
        match self {
            HallTree::Gen(g) => gens[*g].name.clone(),
            HallTree::Br(l, r) => format!("[{},{}]", l.render(gens), r.render(gens)),
        }
    }

    /// Generator word obtained by flattening left-to-right (used for the
    /// leading-term expansion).
    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            HallTree::Gen(g) => out.push(*g),
            HallTree::Br(l, r) => {
                l.leaves(out);
                r.leaves(out);
            }
        }
    }
}

/// Element of the free Lie algebra in Hall coordinates: basis id -> coeff.
pub type LieElement = SparseVec;

pub fn lie_add(a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = a.clone();
    sparse_add_scaled(&mut out, b, &Rat::one());
    out
}

pub fn lie_scale(a: &LieElement, c: &Rat) -> LieElement {
    sparse_scale(a, c)
}

pub fn lie_neg(a: &LieElement) -> LieElement {
    sparse_scale(a, &-Rat::one())
}

#[derive(Clone, Debug)]
pub struct BasisElem {
    pub tree: HallTree,
    pub degree: usize,
}

/// Free graded Lie algebra truncated above `truncation`, with its Hall basis,
/// word-space expansions, and solvers for normal forms.
pub struct FreeLie {
    pub generators: Vec<Generator>,
    pub truncation: usize,
    pub basis: Vec<BasisElem>,
    /// degree (1-based) -> global basis ids, ascending.
    pub by_degree: Vec<Vec<usize>>,
    /// global basis id -> position within its degree block.
    local_index: Vec<usize>,
    /// per degree: the generator words of that total degree, in canonical
    /// (lexicographic) order, and the index lookup.
    words: Vec<Vec<Vec<usize>>>,
    word_index: Vec<HashMap<Vec<usize>, usize>>,
    /// per basis id: expansion over the word space of its degree.
    expansions: Vec<SparseVec>,
    /// per degree: solver over the basis expansions of that degree.
    solvers: Vec<SpanSolver>,
    /// memoized basis-pair brackets, keyed (i, j) with i < j.
    pair_cache: Mutex<HashMap<(usize, usize), LieElement>>,
}

impl FreeLie {
    pub fn new(generators: Vec<Generator>, truncation: usize) -> Result<FreeLie, LieError> {
        if truncation < 1 {
            return Err(LieError::BadTruncation);
        }
        let mut seen = HashMap::new();
        for g in &generators {
            if g.degree == 0 {
                return Err(LieError::BadGeneratorDegree(g.name.clone()));
            }
            if seen.insert(g.name.clone(), ()).is_some() {
                return Err(LieError::DuplicateGenerator(g.name.clone()));
            }
        }

        // Hall basis, degree by degree. Basic: generators; and [l, r] with
        // l, r basic, l < r (canonical order = id order), and r either a
        // generator or [a, _] with a ≤ l.
        let mut basis: Vec<BasisElem> = Vec::new();
        let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); truncation + 1];
        let mut id_of: HashMap<HallTree, usize> = HashMap::new();
        for d in 1..=truncation {
            let mut trees: Vec<HallTree> = Vec::new();
            for (g, gen) in generators.iter().enumerate() {
                if gen.degree == d {
                    trees.push(HallTree::Gen(g));
                }
            }
            for dl in 1..d {
                let dr = d - dl;
                for &l in &by_degree[dl] {
                    for &r in &by_degree[dr] {
                        if l >= r {
                            continue;
                        }
                        let ok = match &basis[r].tree {
                            HallTree::Gen(_) => true,
                            HallTree::Br(a, _) => {
                                let a_id = id_of[a.as_ref()];
                                a_id <= l
                            }
                        };
                        if ok {
                            trees.push(HallTree::Br(
                                Box::new(basis[l].tree.clone()),
                                Box::new(basis[r].tree.clone()),
                            ));
                        }
                    }
                }
            }
            trees.sort();
            trees.dedup();
            for t in trees {
                let id = basis.len();
                id_of.insert(t.clone(), id);
                by_degree[d].push(id);
                basis.push(BasisElem { tree: t, degree: d });
            }
        }
        let mut local_index = vec![0usize; basis.len()];
        for ids in &by_degree {
            for (k, &id) in ids.iter().enumerate() {
                local_index[id] = k;
            }
        }

        // Word spaces per degree.
        let mut words: Vec<Vec<Vec<usize>>> = vec![Vec::new(); truncation + 1];
        let mut word_index: Vec<HashMap<Vec<usize>, usize>> =
            vec![HashMap::new(); truncation + 1];
        for d in 1..=truncation {
            let mut acc = Vec::new();
            let mut stack = Vec::new();
            enumerate_words(&generators, d, &mut stack, &mut acc);
            acc.sort();
            for (i, w) in acc.iter().enumerate() {
                word_index[d].insert(w.clone(), i);
            }
            words[d] = acc;
        }

        let mut fl = FreeLie {
            generators,
            truncation,
            basis,
            by_degree,
            local_index,
            words,
            word_index,
            expansions: Vec::new(),
            solvers: Vec::new(),
            pair_cache: Mutex::new(HashMap::new()),
        };

        // Expansions into word space, then per-degree solvers.
        for id in 0..fl.basis.len() {
            let exp = fl.expand_tree(&fl.basis[id].tree.clone());
            fl.expansions.push(exp);
        }
        fl.solvers = (0..=truncation)
            .map(|d| {
                let mut s = SpanSolver::new();
                if d >= 1 {
                    for &id in &fl.by_degree[d] {
                        let grew = s.insert(&fl.expansions[id]);
                        assert!(grew, "Hall expansion unexpectedly dependent in degree {d}");
                    }
                }
                s
            })
            .collect();
        Ok(fl)
    }

    pub fn dims(&self) -> Vec<usize> {
        (1..=self.truncation).map(|d| self.by_degree[d].len()).collect()
    }

    pub fn gen_id(&self, name: &str) -> Result<usize, LieError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| LieError::UnknownGenerator(name.to_string()))
    }

    /// The basis id of the generator as a Lie element.
    pub fn generator_basis_id(&self, gen: usize) -> usize {
        let t = HallTree::Gen(gen);
        self.basis
            .iter()
            .position(|b| b.tree == t)
            .expect("generator is a basis element")
    }

    pub fn generator_element(&self, gen: usize) -> LieElement {
        sparse_from_entries([(self.generator_basis_id(gen), Rat::one())])
    }

    pub fn degree_of_id(&self, id: usize) -> usize {
        self.basis[id].degree
    }

    pub fn local_index(&self, id: usize) -> usize {
        self.local_index[id]
    }

    /// Degree of a homogeneous element; None for 0; Err-like None marker not
    /// needed — mixed elements return the set of degrees.
    pub fn degrees_of(&self, x: &LieElement) -> Vec<usize> {
        let mut degs: Vec<usize> = x.keys().map(|&id| self.basis[id].degree).collect();
        degs.sort_unstable();
        degs.dedup();
        degs
    }

    fn expand_tree(&self, t: &HallTree) -> SparseVec {
        match t {
            HallTree::Gen(g) => {
                let d = self.generators[*g].degree;
                let idx = self.word_index[d][&vec![*g]];
                sparse_from_entries([(idx, Rat::one())])
            }
            HallTree::Br(l, r) => {
                let dl = l.degree(&self.generators);
                let dr = r.degree(&self.generators);
                let el = self.expand_tree(l);
                let er = self.expand_tree(r);
                self.concat_commutator(dl, &el, dr, &er)
            }
        }
    }

    /// Word-space commutator: el⊗er − er⊗el, landing in degree dl+dr.
    fn concat_commutator(
        &self,
        dl: usize,
        el: &SparseVec,
        dr: usize,
        er: &SparseVec,
    ) -> SparseVec {
        let d = dl + dr;
        let mut out = SparseVec::new();
        for (&i, a) in el {
            for (&j, b) in er {
                let mut w = self.words[dl][i].clone();
                w.extend_from_slice(&self.words[dr][j]);
                let idx = self.word_index[d][&w];
                let e = out.entry(idx).or_insert_with(Rat::zero);
                *e += a * b;
                if e.is_zero() {
                    out.remove(&idx);
                }
                let mut w2 = self.words[dr][j].clone();
                w2.extend_from_slice(&self.words[dl][i]);
                let idx2 = self.word_index[d][&w2];
                let e2 = out.entry(idx2).or_insert_with(Rat::zero);
                *e2 -= a * b;
                if e2.is_zero() {
                    out.remove(&idx2);
                }
            }
        }
        out
    }

    /// Express a degree-d word vector in Hall coordinates (global ids).
    pub fn solve_words(&self, d: usize, v: &SparseVec) -> Option<LieElement> {
        let combo = self.solvers[d].solve(v)?;
        Some(
            combo
                .into_iter()
                .map(|(local, c)| (self.by_degree[d][local], c))
                .collect(),
        )
    }

    /// Bracket of two basis elements, in Hall coordinates. Truncates to zero
    /// above the truncation degree.
    pub fn bracket_basis(&self, i: usize, j: usize) -> LieElement {
        if i == j {
            return LieElement::new();
        }
        if i > j {
            return lie_neg(&self.bracket_basis(j, i));
        }
        let d = self.basis[i].degree + self.basis[j].degree;
        if d > self.truncation {
            return LieElement::new();
        }
        if let Some(hit) = self.pair_cache.lock().unwrap().get(&(i, j)) {
            return hit.clone();
        }
        let word = self.concat_commutator(
            self.basis[i].degree,
            &self.expansions[i],
            self.basis[j].degree,
            &self.expansions[j],
        );
        let res = self
            .solve_words(d, &word)
            .expect("bracket of Lie elements failed to resolve in Hall basis");
        self.pair_cache.lock().unwrap().insert((i, j), res.clone());
        res
    }

    /// Bilinear bracket of arbitrary elements.
    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = LieElement::new();
        for (&i, a) in x {
            for (&j, b) in y {
                let t = self.bracket_basis(i, j);
                let c = a * b;
                sparse_add_scaled(&mut out, &t, &c);
            }
        }
        out
    }

    /// Apply a signed generator permutation to an element.
    pub fn act(&self, action: &GeneratorAction, x: &LieElement) -> Result<LieElement, LieError> {
        action.validate(&self.generators)?;
        let mut out = LieElement::new();
        // Group terms by degree, substitute at word level, solve back.
        let degs = self.degrees_of(x);
        for d in degs {
            let mut wordvec = SparseVec::new();
            for (&id, c) in x {
                if self.basis[id].degree != d {
                    continue;
                }
                for (&widx, wc) in &self.expansions[id] {
                    let w = &self.words[d][widx];
                    let mut img = Vec::with_capacity(w.len());
                    let mut sign = Rat::one();
                    for &g in w {
                        img.push(action.perm[g]);
                        if action.signs[g] < 0 {
                            sign = -sign;
                        }
                    }
                    let idx = self.word_index[d][&img];
                    let e = wordvec.entry(idx).or_insert_with(Rat::zero);
                    *e += c * wc * &sign;
                    if e.is_zero() {
                        wordvec.remove(&idx);
                    }
                }
            }
            let part = self
                .solve_words(d, &wordvec)
                .expect("action image failed to resolve in Hall basis");
            sparse_add_scaled(&mut out, &part, &Rat::one());
        }
        Ok(out)
    }

    pub fn render_element(&self, x: &LieElement) -> String {
        if x.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&id, c) in x {
            parts.push(format!(
                "{}·{}",
                format_rat_short(c),
                self.basis[id].tree.render(&self.generators)
            ));
        }
        parts.join(" + ")
    }

    /// Leading generator word of a basis element (diagnostics).
    pub fn basis_word(&self, id: usize) -> Vec<usize> {
        let mut w = Vec::new();
        self.basis[id].tree.leaves(&mut w);
        w
    }
}

fn enumerate_words(
    gens: &[Generator],
    remaining: usize,
    stack: &mut Vec<usize>,
    acc: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        acc.push(stack.clone());
        return;
    }
    for (g, gen) in gens.iter().enumerate() {
        if gen.degree <= remaining {
            stack.push(g);
            enumerate_words(gens, remaining - gen.degree, stack, acc);
            stack.pop();
        }
    }
}

/// Graded dimensions of the free Lie algebra on weighted generators, from the
/// Poincaré–Birkhoff–Witt generating function (independent of the Hall
/// enumeration; for k degree-1 generators this is the classical Witt
/// formula).
pub fn witt_dims(gen_degrees: &[usize], max_degree: usize) -> Vec<usize> {
    // Word counts T_d via convolution.
    let mut t = vec![Rat::zero(); max_degree + 1];
    t[0] = Rat::one();
    for d in 1..=max_degree {
        for &g in gen_degrees {
            if g <= d {
                let prev = t[d - g].clone();
                t[d] += prev;
            }
        }
    }
    // log of the word generating function.
    let mut logf = vec![Rat::zero(); max_degree + 1];
    // log(1 + u) with u = F − 1 computed by the series Σ (−1)^{k+1} u^k / k.
    let mut u = t.clone();
    u[0] = Rat::zero();
    let mut upow = vec![Rat::zero(); max_degree + 1];
    upow[0] = Rat::one();
    for k in 1..=max_degree {
        // upow = upow * u (truncated convolution).
        let mut next = vec![Rat::zero(); max_degree + 1];
        for i in 0..=max_degree {
            if upow[i].is_zero() {
                continue;
            }
            for j in 0..=(max_degree - i) {
                if u[j].is_zero() {
                    continue;
                }
                let add = &upow[i] * &u[j];
                next[i + j] += add;
            }
        }
        upow = next;
        let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
        let kk = Rat::from_integer(k.into());
        for m in 0..=max_degree {
            if !upow[m].is_zero() {
                logf[m] += &sign * &upow[m] / &kk;
            }
        }
    }
    // m·g_m = Σ_{d | m} d·l_d  ⟹  solve ascending.
    let mut l = vec![Rat::zero(); max_degree + 1];
    for m in 1..=max_degree {
        let mut s = &logf[m] * Rat::from_integer(m.into());
        for d in 1..m {
            if m % d == 0 {
                s -= &l[d] * Rat::from_integer(d.into());
            }
        }
        l[m] = s / Rat::from_integer(m.into());
    }
    (1..=max_degree)
        .map(|d| {
            let v = &l[d];
            assert!(v.denom().is_one(), "Witt dimension not integral");
            let n: i64 = v.numer().try_into().expect("Witt dimension fits i64");
            assert!(n >= 0);
            n as usize
        })
        .collect()
}

/// Signed permutation of the generators, degree-preserving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorAction {
    /// perm[g] = image generator index of g.
    pub perm: Vec<usize>,
    /// signs[g] ∈ {+1, −1}.
    pub signs: Vec<i8>,
}

impl GeneratorAction {
    pub fn identity(n: usize) -> Self {
        GeneratorAction { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn validate(&self, gens: &[Generator]) -> Result<(), LieError> {
        if self.perm.len() != gens.len() || self.signs.len() != gens.len() {
            return Err(LieError::BadAction("length mismatch".into()));
        }
        let mut seen = vec![false; gens.len()];
        for (g, &img) in self.perm.iter().enumerate() {
            if img >= gens.len() {
                return Err(LieError::BadAction(format!("image {img} out of range")));
            }
            if seen[img] {
                return Err(LieError::BadAction("not a permutation".into()));
            }
            seen[img] = true;
            if gens[g].degree != gens[img].degree {
                return Err(LieError::BadAction(format!(
                    "degree not preserved at generator {}",
                    gens[g].name
                )));
            }
            if self.signs[g] != 1 && self.signs[g] != -1 {
                return Err(LieError::BadAction("signs must be ±1".into()));
            }
        }
        Ok(())
    }

    pub fn compose(&self, then: &GeneratorAction) -> GeneratorAction {
        // (then ∘ self): apply self first.
        let perm = self.perm.iter().map(|&g| then.perm[g]).collect();
        let signs = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&g, &s)| s * then.signs[g])
            .collect();
        GeneratorAction { perm, signs }
    }
}

/// A bracket word as written in presentations: nested pairs over generator
/// names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Gen(String),
    Br(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn gen(name: impl Into<String>) -> Self {
        BracketExpr::Gen(name.into())
    }

    pub fn br(l: BracketExpr, r: BracketExpr) -> Self {
        BracketExpr::Br(Box::new(l), Box::new(r))
    }

    pub fn eval(&self, fl: &FreeLie) -> Result<LieElement, LieError> {
        match self {
            BracketExpr::Gen(name) => Ok(fl.generator_element(fl.gen_id(name)?)),
            BracketExpr::Br(l, r) => {
                let a = l.eval(fl)?;
                let b = r.eval(fl)?;
                Ok(fl.bracket(&a, &b))
            }
        }
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Gen(n) => write!(f, "{n}"),
            BracketExpr::Br(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

/// Presentation of a graded Lie algebra: weighted generators, homogeneous
/// relations (linear combinations of bracket words), truncation degree.
#[derive(Clone, Debug)]
pub struct LiePresentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Vec<(Rat, BracketExpr)>>,
    pub truncation: usize,
}

/// Plain graded Lie data: per-degree labels and structure constants. Both the
/// presentation quotient and the coordinate-ring dual produce this; the
/// enveloping algebra consumes it.
#[derive(Clone, Debug)]
pub struct GradedLie {
    pub truncation: usize,
    /// labels[k] for global basis index k, ordered by degree then local index.
    pub labels: Vec<String>,
    pub degree_of: Vec<usize>,
    /// per-degree dimension, index d−1.
    pub dims: Vec<usize>,
    /// [i,j] for i < j (global indices); missing key means zero. [j,i] is
    /// derived by antisymmetry, [i,i] = 0.
    pub bracket: BTreeMap<(usize, usize), Vec<(usize, Rat)>>,
}

impl GradedLie {
    pub fn dim_total(&self) -> usize {
        self.labels.len()
    }

    pub fn degree_offset(&self, d: usize) -> usize {
        self.dims[..d - 1].iter().sum()
    }

    pub fn bracket_ids(&self, i: usize, j: usize) -> Vec<(usize, Rat)> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => Vec::new(),
            Ordering::Less => self.bracket.get(&(i, j)).cloned().unwrap_or_default(),
            Ordering::Greater => self
                .bracket
                .get(&(j, i))
                .map(|v| v.iter().map(|(k, c)| (*k, -c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    pub fn bracket_elems(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in x {
            for (&j, b) in y {
                for (k, c) in self.bracket_ids(i, j) {
                    let e = out.entry(k).or_insert_with(Rat::zero);
                    *e += a * b * &c;
                    if e.is_zero() {
                        out.remove(&k);
                    }
                }
            }
        }
        out
    }

    /// Grading, truncation, and Jacobi checks on the structure constants.
    /// Antisymmetry is structural (only i<j keys stored), but stored keys are
    /// validated.
    pub fn validate(&self) -> Result<(), LieError> {
        let n = self.dim_total();
        assert_eq!(self.degree_of.len(), n);
        assert_eq!(self.dims.iter().sum::<usize>(), n);
        for (&(i, j), terms) in &self.bracket {
            if i >= j || j >= n {
                return Err(LieError::InvalidStructure {
                    law: "key ordering".into(),
                    a: i.to_string(),
                    b: j.to_string(),
                });
            }
            let d = self.degree_of[i] + self.degree_of[j];
            for (k, c) in terms {
                if *k >= n || self.degree_of[*k] != d || c.is_zero() {
                    return Err(LieError::InvalidStructure {
                        law: "grading".into(),
                        a: self.labels[i].clone(),
                        b: self.labels[j].clone(),
                    });
                }
            }
            if d > self.truncation {
                return Err(LieError::InvalidStructure {
                    law: "truncation".into(),
                    a: self.labels[i].clone(),
                    b: self.labels[j].clone(),
                });
            }
        }
        // Jacobi: [[i,j],k] + [[j,k],i] + [[k,i],j] = 0 whenever total degree
        // fits under the truncation.
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let dtot = self.degree_of[i] + self.degree_of[j] + self.degree_of[k];
                    if dtot > self.truncation {
                        continue;
                    }
                    let mut acc = SparseVec::new();
                    for (perm, sign) in
                        [((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1)]
                    {
                        let (a, b, c) = perm;
                        let ab = self.bracket_ids(a, b);
                        for (m, cf) in ab {
                            for (t, cf2) in self.bracket_ids(m, c) {
                                let e = acc.entry(t).or_insert_with(Rat::zero);
                                *e += &cf * &cf2 * Rat::from_integer(sign.into());
                                if e.is_zero() {
                                    acc.remove(&t);
                                }
                            }
                        }
                    }
                    if !acc.is_empty() {
                        return Err(LieError::InvalidStructure {
                            law: "Jacobi".into(),
                            a: self.labels[i].clone(),
                            b: format!("{},{}", self.labels[j], self.labels[k]),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The quotient of a free graded Lie algebra by the homogeneous ideal closure
/// of the presentation's relations, truncated.
pub struct NilpotentQuotient {
    pub free: FreeLie,
    pub presentation: LiePresentation,
    /// per-degree ideal dimension, index d−1.
    pub ideal_dims: Vec<usize>,
    /// ideal basis per degree in local word coordinates of by_degree[d].
    ideal_basis: Vec<Vec<SparseVec>>,
    /// per degree: representative local indices and projection matrices.
    reps: Vec<Vec<usize>>,
    projections: Vec<RatMatrix>,
    pub lie: GradedLie,
}

impl NilpotentQuotient {
    pub fn new(p: LiePresentation) -> Result<NilpotentQuotient, LieError> {
        let free = FreeLie::new(p.generators.clone(), p.truncation)?;
        // Evaluate relations; demand homogeneity.
        let mut rel_by_degree: Vec<Vec<LieElement>> = vec![Vec::new(); p.truncation + 1];
        for (index, rel) in p.relations.iter().enumerate() {
            let mut x = LieElement::new();
            for (c, expr) in rel {
                let v = expr.eval(&free)?;
                sparse_add_scaled(&mut x, &v, c);
            }
            let degs = free.degrees_of(&x);
            match degs.len() {
                0 => continue, // relation already zero in the free algebra
                1 => {
                    let d = degs[0];
                    if d > p.truncation {
                        return Err(LieError::RelationBeyondTruncation {
                            index,
                            degree: d,
                            truncation: p.truncation,
                        });
                    }
                    rel_by_degree[d].push(x);
                }
                _ => {
                    return Err(LieError::InhomogeneousRelation { index, degrees: degs });
                }
            }
        }
        // NB: a relation may evaluate to zero only because its natural degree
        // exceeds the truncation; that is fine (it imposes nothing below N).

        // Ideal closure degree by degree: brackets with generators suffice
        // since ad of any element is a combination of ad-compositions of
        // generators.
        let mut ideal_basis: Vec<Vec<SparseVec>> = vec![Vec::new(); p.truncation + 1];
        for d in 1..=p.truncation {
            let dim_d = free.by_degree[d].len();
            let mut vectors: Vec<SparseVec> = Vec::new();
            for x in &rel_by_degree[d] {
                vectors.push(to_local(&free, d, x));
            }
            for (g, gen) in free.generators.iter().enumerate() {
                if gen.degree >= d {
                    continue;
                }
                let lower = d - gen.degree;
                let ge = free.generator_element(g);
                for v in &ideal_basis[lower] {
                    let x = from_local(&free, lower, v);
                    let b = free.bracket(&ge, &x);
                    if !b.is_empty() {
                        vectors.push(to_local(&free, d, &b));
                    }
                }
            }
            ideal_basis[d] = row_space_basis(&vectors, dim_d);
        }

        // Quotient bases and projections per degree.
        let mut reps = vec![Vec::new(); p.truncation + 1];
        let mut projections = vec![RatMatrix::zero(0, 0); p.truncation + 1];
        for d in 1..=p.truncation {
            let dim_d = free.by_degree[d].len();
            let q = quotient_basis(dim_d, &ideal_basis[d]).expect("local coordinates in range");
            reps[d] = q.representatives;
            projections[d] = q.projection;
        }

        // Assemble plain graded data with structure constants on
        // representative classes.
        let mut labels = Vec::new();
        let mut degree_of = Vec::new();
        let mut dims = Vec::new();
        let mut global_of: Vec<Vec<usize>> = vec![Vec::new(); p.truncation + 1];
        for d in 1..=p.truncation {
            dims.push(reps[d].len());
            for &local in &reps[d] {
                let id = free.by_degree[d][local];
                global_of[d].push(labels.len());
                labels.push(free.basis[id].tree.render(&free.generators));
                degree_of.push(d);
            }
        }
        let mut bracket = BTreeMap::new();
        let total: usize = dims.iter().sum();
        // Map global quotient index -> (degree, local rep position).
        let mut where_of = Vec::with_capacity(total);
        for d in 1..=p.truncation {
            for (pos, _) in reps[d].iter().enumerate() {
                where_of.push((d, pos));
            }
        }
        for gi in 0..total {
            for gj in (gi + 1)..total {
                let (di, pi) = where_of[gi];
                let (dj, pj) = where_of[gj];
                let d = di + dj;
                if d > p.truncation {
                    continue;
                }
                let bi = free.by_degree[di][reps[di][pi]];
                let bj = free.by_degree[dj][reps[dj][pj]];
                let br = free.bracket_basis(bi, bj);
                if br.is_empty() {
                    continue;
                }
                let local = to_local(&free, d, &br);
                let img = projections[d].mul_sparse(&local);
                if img.is_empty() {
                    continue;
                }
                let terms: Vec<(usize, Rat)> =
                    img.into_iter().map(|(q, c)| (global_of[d][q], c)).collect();
                bracket.insert((gi, gj), terms);
            }
        }
        let lie = GradedLie {
            truncation: p.truncation,
            labels,
            degree_of,
            dims,
            bracket,
        };
        let ideal_dims = (1..=p.truncation).map(|d| ideal_basis[d].len()).collect();
        Ok(NilpotentQuotient {
            free,
            presentation: p,
            ideal_dims,
            ideal_basis,
            reps,
            projections,
            lie,
        })
    }

    /// Image of a free element in quotient coordinates (global indices).
    pub fn project(&self, x: &LieElement) -> SparseVec {
        let mut out = SparseVec::new();
        for d in 1..=self.presentation.truncation {
            let mut part = SparseVec::new();
            for (&id, c) in x {
                if self.free.basis[id].degree == d {
                    part.insert(self.free.local_index(id), c.clone());
                }
            }
            if part.is_empty() {
                continue;
            }
            let img = self.projections[d].mul_sparse(&part);
            let offset = self.lie.degree_offset(d);
            for (q, c) in img {
                out.insert(offset + q, c);
            }
        }
        out
    }

    /// True if the free element lies in the relation ideal (projects to 0).
    pub fn in_ideal(&self, x: &LieElement) -> bool {
        self.project(x).is_empty()
    }

    /// The quotient class of a generator.
    pub fn generator_class(&self, gen: usize) -> SparseVec {
        self.project(&self.free.generator_element(gen))
    }

    /// Matrices (per degree, dims[d−1] square) of the induced action of a
    /// signed generator permutation on the quotient. Errors if the action
    /// does not preserve the relation ideal.
    pub fn act_matrices(&self, action: &GeneratorAction) -> Result<Vec<RatMatrix>, LieError> {
        action.validate(&self.free.generators)?;
        // The ideal must be preserved.
        for d in 1..=self.presentation.truncation {
            for v in &self.ideal_basis[d] {
                let x = from_local(&self.free, d, v);
                let img = self.free.act(action, &x)?;
                if !self.in_ideal(&img) {
                    return Err(LieError::BadAction(
                        "action does not preserve the relation ideal".into(),
                    ));
                }
            }
        }
        let mut mats = Vec::new();
        for d in 1..=self.presentation.truncation {
            let dim = self.lie.dims[d - 1];
            let mut m = RatMatrix::zero(dim, dim);
            for (pos, &local) in self.reps[d].iter().enumerate() {
                let id = self.free.by_degree[d][local];
                let x = sparse_from_entries([(id, Rat::one())]);
                let img = self.free.act(action, &x)?;
                let img_local = to_local(&self.free, d, &img);
                let img_q = self.projections[d].mul_sparse(&img_local);
                for (q, c) in img_q {
                    m.set(q, pos, c);
                }
            }
            mats.push(m);
        }
        Ok(mats)
    }
}

fn to_local(free: &FreeLie, d: usize, x: &LieElement) -> SparseVec {
    let mut out = SparseVec::new();
    for (&id, c) in x {
        assert_eq!(free.basis[id].degree, d, "element not homogeneous of degree {d}");
        out.insert(free.local_index(id), c.clone());
    }
    out
}

fn from_local(free: &FreeLie, d: usize, v: &SparseVec) -> LieElement {
    v.iter().map(|(&local, c)| (free.by_degree[d][local], c.clone())).collect()
}

/// Convenience: build the quotient from a presentation.
pub fn nilpotent_quotient(p: LiePresentation) -> Result<NilpotentQuotient, LieError> {
    NilpotentQuotient::new(p)
}
