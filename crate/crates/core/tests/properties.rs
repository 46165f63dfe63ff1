mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_matrix, random_rewrites, random_ring, random_term};
use zxnf::cyclotomic::{cyclotomic_poly, DyadicCyclotomic, IntPolynomial};
use zxnf::diagram::{from_graph, term_from_json, term_to_json, to_graph, Angle, Fragment, Term};
use zxnf::interp::{interp, interp_exact, Backend, Matrix};
use zxnf::normalform::{
    lambda_map, nf_compose, nf_permute, nf_tensor, nf_z10, nf_z21, normalize, normalize_with, render_nf, NormalForm,
};
use zxnf::rules::meta::{angle_multiplier, cancel_scalar};
use zxnf::rules::{apply_rule, builtin_rules, find_matches, Direction};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn order() -> impl Strategy<Value = u64> {
    prop_oneof![Just(8u64), Just(16), Just(24)]
}

fn ring(order: u64) -> impl Strategy<Value = DyadicCyclotomic> {
    (0u32..4, prop::collection::vec(-30i64..=30, 0..(order as usize)))
        .prop_map(move |(p, cs)| DyadicCyclotomic::canonicalize(order, p, IntPolynomial::from_i64s(&cs)).unwrap())
}

fn triple() -> impl Strategy<Value = (DyadicCyclotomic, DyadicCyclotomic, DyadicCyclotomic)> {
    order().prop_flat_map(|o| (ring(o), ring(o), ring(o)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((a, b, c) in triple()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.mul(&DyadicCyclotomic::one(a.order())).unwrap(), a.clone());
        let sum = a.add(&b).unwrap().eval_complex();
        prop_assert!((sum - a.eval_complex() - b.eval_complex()).norm() < 1e-6 * (1.0 + sum.norm()));
    }

    #[test]
    fn canonical_forms_are_fixed_points(o in order(), p in 0u32..5, cs in prop::collection::vec(-50i64..=50, 0..40)) {
        let a = DyadicCyclotomic::canonicalize(o, p, IntPolynomial::from_i64s(&cs)).unwrap();
        prop_assert_eq!(DyadicCyclotomic::canonicalize(o, a.p(), a.poly().clone()).unwrap(), a.clone());
        let shifted = IntPolynomial::from_i64s(&cs).add(&cyclotomic_poly(o).mul(&IntPolynomial::from_i64s(&[3, -1])));
        prop_assert_eq!(DyadicCyclotomic::canonicalize(o, p, shifted).unwrap(), a.clone());
        if a.is_zero() {
            prop_assert_eq!(a.p(), 0);
        } else {
            prop_assert!(a.poly().degree().unwrap() < cyclotomic_poly(o).degree().unwrap());
        }
    }

    #[test]
    fn embedding_preserves_value(a in ring(8)) {
        let b = a.embed_order(24).unwrap();
        prop_assert!((a.eval_complex() - b.eval_complex()).norm() < 1e-9 * (1.0 + a.eval_complex().norm()));
        prop_assert_eq!(b.embed_order(48).unwrap(), a.embed_order(48).unwrap());
    }

    #[test]
    fn ring_json_round_trip(a in ring(24)) {
        prop_assert_eq!(DyadicCyclotomic::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn term_json_round_trip(seed in any::<u64>()) {
        let t = random_term(&mut rng(seed), 8, 12, 2);
        prop_assert_eq!(term_from_json(&term_to_json(&t)).unwrap(), t);
    }

    #[test]
    fn graph_round_trip_preserves_meaning(seed in any::<u64>()) {
        let t = random_term(&mut rng(seed), 8, 4, 2);
        let back = from_graph(&to_graph(&t));
        prop_assert_eq!((back.inputs(), back.outputs()), (t.inputs(), t.outputs()));
        prop_assert_eq!(interp_exact(&back).unwrap(), interp_exact(&t).unwrap());
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let t = random_term(&mut rng(seed), 8, 4, 2);
        let a = t.adjoint();
        prop_assert_eq!((a.inputs(), a.outputs()), (t.outputs(), t.inputs()));
        prop_assert_eq!(interp_exact(&a.adjoint()).unwrap(), interp_exact(&t).unwrap());
        let m = interp_exact(&t).unwrap();
        let ma = interp_exact(&a).unwrap();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let (x, y) = (m.get(r, c).to_complex(), ma.get(c, r).to_complex());
                prop_assert!((x.conj() - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn backends_agree(seed in any::<u64>()) {
        let t = random_term(&mut rng(seed), 8, 12, 2);
        let e = interp(&t, Backend::Exact { order: 24 }).unwrap();
        let f = interp(&t, Backend::Float).unwrap();
        prop_assert!(e.to_float().equal(&f, 1e-9));
        prop_assert!(e.equal(&f, 1e-9));
    }

    #[test]
    fn matrix_json_round_trip(seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), 24, 2);
        prop_assert_eq!(Matrix::from_json(&m.to_json()).unwrap(), m.clone());
        let f = m.to_float();
        prop_assert!(Matrix::from_json(&f.to_json()).unwrap().equal(&f, 0.0));
    }

    #[test]
    fn normal_forms_round_trip(seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), 8, 2);
        let nf = lambda_map(&m).unwrap();
        prop_assert_eq!(nf.matrix(), m.clone());
        prop_assert_eq!(NormalForm::from_json(&nf.to_json()).unwrap(), nf.clone());
        let d = render_nf(&nf).unwrap();
        prop_assert_eq!(interp(&d, Backend::Exact { order: 8 }).unwrap(), m);
        prop_assert_eq!(normalize_with(&d, Backend::Exact { order: 8 }, 12).unwrap(), nf);
    }

    #[test]
    fn leaf_operations_match_diagrams(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_term(&mut r, 6, 4, 2);
        let b = random_term(&mut r, 6, 4, 2);
        let b8 = Backend::Exact { order: 8 };
        let nf = |t: &Term| normalize_with(t, b8, 12).unwrap();
        prop_assert_eq!(nf_tensor(&nf(&a), &nf(&b)).unwrap(), nf(&a.par(&b)));
        let n = a.outputs();
        if n >= 1 {
            prop_assert_eq!(nf_z10(&nf(&a), n - 1).unwrap(), nf(&a.then(&Term::wires(n - 1).par(&Term::z(1, 0, Angle::zero())))));
            let sigma: Vec<usize> = (0..n).rev().collect();
            prop_assert_eq!(nf_permute(&nf(&a), &sigma).unwrap(), nf(&a.then(&Term::permutation(&sigma))));
        }
        if n >= 2 {
            let merge = Term::z(2, 1, Angle::zero()).par(&Term::wires(n - 2));
            prop_assert_eq!(nf_z21(&nf(&a), 0).unwrap(), nf(&a.then(&merge)));
        }
        // A partner taking a's outputs: b beside them, then a merge across.
        let plugged = Term::tensor_all((0..b.inputs()).map(|_| Term::z(0, 1, Angle::zero()))).then(&b);
        let mut c = Term::wires(n).par(&plugged);
        if n >= 1 && c.outputs() > n {
            c = c.then(&Term::wires(n - 1).par(&Term::z(2, 1, Angle::zero())).par(&Term::wires(c.outputs() - n - 1)));
        }
        prop_assert_eq!(nf_compose(&nf(&a), &nf(&c)).unwrap(), nf(&a.then(&c)));
    }

    #[test]
    fn rewrites_preserve_normal_forms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_term(&mut r, 8, 4, 2);
        let (d2, _) = random_rewrites(&mut r, &d, 3, Fragment::RationalPi { n: 1 });
        let b8 = Backend::Exact { order: 8 };
        prop_assert_eq!(normalize_with(&d, b8, 12).unwrap(), normalize_with(&d2, b8, 12).unwrap());
    }

    #[test]
    fn every_match_applies_soundly(seed in any::<u64>()) {
        let d = random_term(&mut rng(seed), 6, 4, 1);
        let g = to_graph(&d);
        let before = interp_exact(&d).unwrap();
        for rule in builtin_rules().iter().filter(|r| r.name != "E") {
            for dir in [Direction::Forward, Direction::Backward] {
                for m in find_matches(&g, rule, dir).into_iter().take(3) {
                    if !m.angles.iter().flatten().all(|a| a.is_exact() && a.denominator().is_some_and(|d| 4 % d == 0)) {
                        continue;
                    }
                    let out = apply_rule(&g, rule, &m, dir).unwrap();
                    prop_assert_eq!(interp_exact(&from_graph(&out)).unwrap(), before.clone(), "{}", rule.label());
                }
            }
        }
    }

    #[test]
    fn multiplier_identity_on_angles(num in -200i64..200, den in prop_oneof![Just(1i64), Just(2), Just(4), Just(12)], j in -5i64..5) {
        let t = Term::z(1, 1, Angle::pi_frac(num, den));
        let k = 1 + 2 * den * j;
        prop_assert_eq!(angle_multiplier(&t, k).unwrap(), t);
    }

    #[test]
    fn cancel_then_retensor(seed in any::<u64>(), num in 0i64..8) {
        prop_assume!(num != 4);
        let alpha = Angle::pi_frac(num, 4);
        let mut r = rng(seed);
        let d1 = random_term(&mut r, 5, 4, 1);
        let d2 = random_term(&mut r, 5, 4, 1);
        let s = Term::z(0, 0, alpha);
        let (l, rr) = (d1.par(&s), d2.par(&s));
        let (a, b) = cancel_scalar(&l, &rr, alpha).unwrap();
        prop_assert_eq!(a.par(&s), l);
        prop_assert_eq!(b.par(&s), rr);
    }

    #[test]
    fn normalize_is_the_interpretation(seed in any::<u64>()) {
        let d = random_term(&mut rng(seed), 8, 4, 2);
        let nf = normalize(&d).unwrap();
        prop_assert_eq!(nf.matrix(), interp_exact(&d).unwrap());
    }

    #[test]
    fn random_rings_are_canonical(seed in any::<u64>()) {
        let a = random_ring(&mut rng(seed), 24, 3, 8);
        prop_assert_eq!(DyadicCyclotomic::canonicalize(24, a.p(), a.poly().clone()).unwrap(), a);
    }
}
