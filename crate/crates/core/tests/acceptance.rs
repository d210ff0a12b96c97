//! Acceptance criteria, one test per criterion. Each test prints a single
//! `[criterion NN] PASS: …` line (visible with `--nocapture`) and pins the
//! tolerance and, where stated, the runtime budget it must meet.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relmalcev::bar::{
    circle_acyclic_model, circle_model, circle_sigma2_coalgebra, torus_model, wedge_two_model,
    BarContext,
};
use relmalcev::braid::{
    check_equivariance, drinfeld_kohno, pair_index, pairs, pure_braid_dims_oracle, BraidWord,
    KzSystem,
};
use relmalcev::checks::run_suite;
use relmalcev::freelie::{nilpotent_quotient, witt_dims, Generator, LiePresentation};
use relmalcev::groups::{peter_weyl_check, symmetric_irreps, SymmetricGroup};
use relmalcev::linalg::sparse_from_entries;
use relmalcev::rational::rat_i64;
use relmalcev::relcomp::{gr_h1_isotypic, lie_from_coordinate_ring};
use relmalcev::transport::{check_integrability, transport, OdeOptions, PiecewisePath};

const SEED: u64 = 7;

fn report(criterion: usize, message: &str) {
    println!("[criterion {criterion:02}] PASS: {message}");
}

#[test]
fn criterion_01_bar_differential_squares_to_zero() {
    let start = Instant::now();
    let r = run_suite("d2", SEED, 1e-8).unwrap();
    assert!(r.pass, "{}", r.detail);
    assert_eq!(r.cases, 300, "3 models x 100 seeded elements");
    assert_eq!(r.max_error, 0.0, "d2 must hold exactly");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "budget 5 s, took {elapsed:?}");
    report(1, &format!("d(d(x)) = 0 exactly on 300 seeded bar elements in {elapsed:.2?}"));
}

#[test]
fn criterion_02_h0_bar_tables() {
    let start = Instant::now();

    let circle = circle_model();
    let ctx = BarContext::new(&circle, None);
    let circle_table = ctx.h0(6).unwrap().report().new_dims;
    assert_eq!(circle_table, vec![1, 1, 1, 1, 1, 1, 1]);

    let wedge = wedge_two_model();
    let ctx = BarContext::new(&wedge, None);
    assert_eq!(ctx.h0(3).unwrap().report().new_dims, vec![1, 2, 4, 8]);

    // The quasi-isomorphic model with an extra acyclic cell must give the
    // identical table.
    let acyclic = circle_acyclic_model();
    let ctx = BarContext::new(&acyclic, None);
    assert_eq!(ctx.h0(6).unwrap().report().new_dims, circle_table);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "budget 30 s, took {elapsed:?}");
    report(
        2,
        &format!(
            "H0 tables (1,1,1,1,1,1,1) / (1,2,4,8) exact, acyclic variant identical, in {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_03_wedge_dual_lie_matches_witt() {
    let wedge = wedge_two_model();
    let ctx = BarContext::new(&wedge, None);
    let cr = lie_from_coordinate_ring(&ctx, 3).unwrap();
    assert_eq!(cr.dims(), &[2, 1, 2]);
    assert_eq!(cr.dims(), witt_dims(&[1, 1], 3).as_slice());
    report(3, "dual Lie of the wedge coordinate ring has dims (2, 1, 2) = Witt numbers, exact");
}

#[test]
fn criterion_04_drinfeld_kohno_dimensions_and_relations() {
    let q = drinfeld_kohno(3, 4).unwrap();
    assert_eq!(q.lie.dims, vec![3, 1, 2, 3]);
    assert_eq!(q.lie.dims, pure_braid_dims_oracle(3, 4));

    // Every defining relation maps to zero in the quotient.
    let n = 3;
    let one = |id: usize| sparse_from_entries([(id, rat_i64(1))]);
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for (i, j) in [(a, b), (a, c), (b, c)] {
                    let x = one(pair_index(n, i, j));
                    let mut sum = one(pair_index(n, a, b));
                    sum.insert(pair_index(n, a, c), rat_i64(1));
                    sum.insert(pair_index(n, b, c), rat_i64(1));
                    sum.remove(&pair_index(n, i, j));
                    let br = q.lie.bracket_elems(&x, &sum);
                    assert!(br.is_empty(), "triangle relation at ({i},{j}) nonzero");
                }
            }
        }
    }

    // Quadratic presentation: the relation ideal profile equals free Witt minus
    // the splitting oracle in every degree, so the degree-2 relations
    // generate the whole relation ideal.
    let free = witt_dims(&[1, 1, 1], 4);
    let oracle = pure_braid_dims_oracle(3, 4);
    let expected: Vec<usize> = free.iter().zip(&oracle).map(|(f, o)| f - o).collect();
    assert_eq!(q.ideal_dims, expected);
    assert_eq!(q.ideal_dims, vec![0, 2, 6, 15]);

    report(4, "p3(4) dims (3, 1, 2, 3), relations vanish, relation ideal quadratically generated");
}

#[test]
fn criterion_05_kz_integrability_with_negative_control() {
    for n in 2..=4usize {
        let trunc = if n < 4 { 4 } else { 3 };
        // Construction re-checks flatness as an invariant; also assert the
        // report directly.
        let system = KzSystem::new(n, trunc).unwrap();
        let rep = check_integrability(&system.omega, &system.quotient.lie, n).unwrap();
        assert!(rep.integrable, "KZ form must be flat in p{n}({trunc})");
        // With a single generator (n = 2) there is no letter pair to cross.
        assert_eq!(rep.pairs_checked > 0, n >= 3);

        if n >= 3 {
            // Negative control: in the free Lie algebra on the same
            // generators the same form is not flat.
            let p = LiePresentation {
                generators: pairs(n)
                    .iter()
                    .map(|&(i, j)| Generator::new(format!("X{}{}", i + 1, j + 1), 1))
                    .collect(),
                relations: vec![],
                truncation: 2,
            };
            let free = nilpotent_quotient(p).unwrap();
            let rep = check_integrability(&system.omega, &free.lie, n).unwrap();
            assert!(!rep.integrable);
            assert!(rep.certificate.is_some(), "need a nonzero certificate");
        }
    }
    report(5, "d omega + omega ^ omega = 0 symbolically for n = 2, 3, 4; nonzero in the free algebra");
}

#[test]
fn criterion_06_equivariance_is_exact() {
    for n in 2..=4usize {
        let rep = check_equivariance(n, 2).unwrap();
        assert!(rep.pass, "{:?}", rep.certificate);
        let order: usize = (1..=n).product();
        assert_eq!(rep.checked, order, "must cover all of S{n}");
    }
    report(6, "pullback equals Ad for every permutation, n = 2, 3, 4, symbolically exact");
}

#[test]
fn criterion_07_chen_identities() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for name in ["shuffle", "inverse", "composition"] {
        let r = run_suite(name, SEED, 1e-8).unwrap();
        assert!(r.pass, "{name}: {}", r.detail);
        assert_eq!(r.cases, 50, "{name} must run 50 seeded instances");
        assert!(r.max_error <= 1e-8, "{name} relative error {}", r.max_error);
        worst = worst.max(r.max_error);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "budget 60 s, took {elapsed:?}");
    report(
        7,
        &format!("shuffle/inverse/composition on 3 x 50 seeded instances, worst relative error {worst:.3e}, in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_08_full_twist_matches_the_exponential() {
    let system = KzSystem::new(2, 3).unwrap();
    let word = BraidWord::parse("s1 s1", 2).unwrap();
    let hol = system.holonomy(&word, &OdeOptions::default()).unwrap();
    assert_eq!(hol.element.s, system.sym.group.identity);

    let x = system
        .env
        .lie_series_from([(0usize, Complex64::new(0.0, std::f64::consts::TAU))]);
    let expected = system.env.exp(&x).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in hol.element.u.coeffs.iter().zip(&expected.coeffs) {
        worst = worst.max((a - b).norm());
    }
    assert!(worst <= 1e-8, "full twist coefficient error {worst}");
    report(
        8,
        &format!("sigma_1^2 in B2 at N=3 equals exp(2 pi i X12), worst coefficient error {worst:.3e}"),
    );
}

#[test]
fn criterion_09_braid_relations_and_homomorphism() {
    let start = Instant::now();
    let opts = OdeOptions::default();

    // Braid relation in B3 at N = 4.
    let system = KzSystem::new(3, 4).unwrap();
    let ctx = system.context();
    let lhs = system.holonomy(&BraidWord::parse("s1 s2 s1", 3).unwrap(), &opts).unwrap();
    let rhs = system.holonomy(&BraidWord::parse("s2 s1 s2", 3).unwrap(), &opts).unwrap();
    let relation_gap = ctx.distance(&lhs.element, &rhs.element);
    assert!(relation_gap <= 1e-7, "braid relation defect {relation_gap}");

    // Far commutation in B4 at N = 3.
    let system4 = KzSystem::new(4, 3).unwrap();
    let ctx4 = system4.context();
    let lhs = system4.holonomy(&BraidWord::parse("s1 s3", 4).unwrap(), &opts).unwrap();
    let rhs = system4.holonomy(&BraidWord::parse("s3 s1", 4).unwrap(), &opts).unwrap();
    let commute_gap = ctx4.distance(&lhs.element, &rhs.element);
    assert!(commute_gap <= 1e-7, "far commutation defect {commute_gap}");

    // Homomorphism on 20 seeded random word pairs in B3.
    let system = KzSystem::new(3, 3).unwrap();
    let ctx = system.context();
    let mut rng = ChaCha8Rng::seed_from_u64(20260821);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rand_word = |rng: &mut ChaCha8Rng| {
            let letters: Vec<(usize, i32)> = (0..3)
                .map(|_| (rng.gen_range(1..3), if rng.gen_bool(0.5) { 1 } else { -1 }))
                .collect();
            BraidWord::new(3, letters).unwrap()
        };
        let w1 = rand_word(&mut rng);
        let w2 = rand_word(&mut rng);
        let h12 = system.holonomy(&w1.concat(&w2).unwrap(), &opts).unwrap();
        let h1 = system.holonomy(&w1, &opts).unwrap();
        let h2 = system.holonomy(&w2, &opts).unwrap();
        let prod = ctx.multiply(&h1.element, &h2.element);
        let gap = ctx.distance(&h12.element, &prod);
        assert!(gap <= 1e-7, "homomorphism defect {gap} on {w1} | {w2}");
        worst = worst.max(gap);
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "budget 120 s, took {elapsed:?}");
    report(
        9,
        &format!(
            "braid relation gap {relation_gap:.3e}, far commutation gap {commute_gap:.3e}, homomorphism on 20 pairs worst {worst:.3e}, in {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_10_transports_are_grouplike() {
    // A representative suite over both the KZ system and a free envelope.
    let r = run_suite("grouplike", SEED, 1e-8).unwrap();
    assert!(r.pass, "{}", r.detail);

    // Plus fresh direct checks on the two kinds of computed transport.
    let system = KzSystem::new(3, 3).unwrap();
    let hol = system
        .holonomy(&BraidWord::parse("s1 s2^-1 s1", 3).unwrap(), &OdeOptions::default())
        .unwrap();
    let defect = system.env.grouplike_defect(&hol.element.u);
    assert!(defect <= 1e-8, "holonomy grouplike defect {defect}");

    let gamma = PiecewisePath::line(
        &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)],
        &[Complex64::new(1.5, 0.5), Complex64::new(2.2, 0.0), Complex64::new(3.8, -0.3)],
    )
    .unwrap();
    let t = transport(&gamma, &system.omega, &system.env, &OdeOptions::default()).unwrap();
    let defect2 = system.env.grouplike_defect(&t.series);
    assert!(defect2 <= 1e-8, "open-path transport grouplike defect {defect2}");

    report(
        10,
        &format!(
            "grouplike suite passes; fresh holonomy defect {defect:.3e}, open-path defect {defect2:.3e}, at 1e-8"
        ),
    );
}

#[test]
fn criterion_11_peter_weyl_for_symmetric_groups() {
    for (n, order) in [(2usize, 2usize), (3, 6), (4, 24)] {
        let sym = SymmetricGroup::new(n);
        let irreps = symmetric_irreps(&sym);
        let rep = peter_weyl_check(&sym.group, &irreps);
        assert!(rep.pass, "S{n} Peter-Weyl failed");
        assert!(rep.exact, "S{n} checks must be exact");
        assert_eq!(rep.sum_of_squares, order);
        assert_eq!(rep.matrix_entry_rank, order);
    }
    report(11, "sum of squared dims and matrix-entry rank equal 2 / 6 / 24 for S2 / S3 / S4, exact");
}

#[test]
fn criterion_12_relative_completion_toy_case() {
    let model = circle_model();
    let coalg = circle_sigma2_coalgebra(&model);
    let sym = SymmetricGroup::new(2);
    let irreps = symmetric_irreps(&sym);
    let rep = gr_h1_isotypic(&model, &coalg, &irreps, 2).unwrap();
    assert_eq!(rep.q1_dim, 1);
    let trivial = rep.irrep_names.iter().position(|s| s == "[2]").unwrap();
    let sign = rep.irrep_names.iter().position(|s| s == "[1,1]").unwrap();
    assert_eq!(rep.multiplicities[trivial], 1, "trivial isotypic part must be 1-dimensional");
    assert_eq!(rep.multiplicities[sign], 0, "sign isotypic part must vanish");
    report(12, "circle with O(S2) coefficients: Gr H1 is trivial^1 with no sign part, exact");
}

#[test]
fn criterion_13_eilenberg_moore_e1_counting() {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut out = 1usize;
        for i in 0..k {
            out = out * (n - i) / (i + 1);
        }
        out
    }

    // Circle: one degree-1 letter, so E1^{-s,t} = delta_{s,t}.
    let circle = circle_model();
    let ctx = BarContext::new(&circle, None);
    let table = ctx.em_e1_dims(5, 5);
    for s in 0..=5 {
        for t in 0..=5 {
            assert_eq!(table[s][t], usize::from(s == t), "circle E1^(-{s},{t})");
        }
    }

    // Quasi-isomorphic acyclic-cell variant: identical table.
    let acyclic = circle_acyclic_model();
    let ctx = BarContext::new(&acyclic, None);
    let table = ctx.em_e1_dims(5, 5);
    for s in 0..=5 {
        for t in 0..=5 {
            assert_eq!(table[s][t], usize::from(s == t), "acyclic E1^(-{s},{t})");
        }
    }

    // Wedge: two degree-1 letters, 2^s words on the diagonal.
    let wedge = wedge_two_model();
    let ctx = BarContext::new(&wedge, None);
    let table = ctx.em_e1_dims(4, 4);
    for s in 0..=4 {
        for t in 0..=4 {
            let want = if s == t { 2usize.pow(s as u32) } else { 0 };
            assert_eq!(table[s][t], want, "wedge E1^(-{s},{t})");
        }
    }

    // Torus: H+ has dims (2, 1) in degrees (1, 2); words of length s and
    // internal degree t pick k = t - s letters of degree 2, giving
    // C(s, t-s) * 2^(2s-t).
    let torus = torus_model();
    let ctx = BarContext::new(&torus, None);
    let table = ctx.em_e1_dims(4, 6);
    for s in 0..=4usize {
        for t in 0..=6usize {
            let want = if t >= s && t <= 2 * s {
                binom(s, t - s) * 2usize.pow((2 * s - t) as u32)
            } else {
                usize::from(s == 0 && t == 0)
            };
            assert_eq!(table[s][t], want, "torus E1^(-{s},{t})");
        }
    }

    report(13, "E1 tables match the closed counting formulas on all four corpus models, exact");
}
