use super::lemmas::corpus;
use super::meta::*;
use super::*;
use crate::cyclotomic::DyadicCyclotomic;
use crate::diagram::{to_graph, End, VertexKind};
use crate::gadgets::{ket0, ket1, scalar_diagram, triangle, ScalarValue};
use crate::interp::{interp_exact, Matrix, Scalar};
use crate::normalform::{lambda_map, render_nf};

fn exact(t: &Term) -> Matrix {
    interp_exact(t).unwrap()
}

fn graph_matrix(g: &OpenGraph) -> Matrix {
    exact(&from_graph(g))
}

fn q(n: i64, d: i64) -> Angle {
    Angle::pi_frac(n, d)
}

#[test]
fn every_rule_is_sound_in_small_fragments() {
    for r in builtin_rules() {
        for f in [Fragment::RationalPi { n: 1 }, Fragment::RationalPi { n: 3 }] {
            let rep = check_soundness(&r, 100, f, 11);
            assert!(rep.ok(), "{}", rep.to_json());
        }
    }
}

#[test]
fn euler_rules_are_sound_over_reals() {
    for label in ["EU", "EU'", "A", "A'"] {
        let rep = check_soundness(&rule_by_label(label).unwrap(), 100, Fragment::Unrestricted, 5);
        assert!(rep.ok(), "{}", rep.to_json());
    }
}

#[test]
fn variant_bookkeeping() {
    let base = base_rules();
    assert_eq!(base.len(), 12);
    assert_eq!(builtin_rules().len(), 2 * base.len() - SELF_SYMMETRIC.len());
}

#[test]
fn s1_at_zero_is_one_spider() {
    let r = rule_by_label("S1").unwrap();
    let vals = vec![Some(Angle::zero()); 2];
    let (l, rr) = instance_terms(&r, &vals, &[1, 2]).unwrap();
    assert_eq!(exact(&l), exact(&rr));
    assert_eq!(exact(&rr), exact(&Term::z(0, 3, Angle::zero())));
}

#[test]
fn e_is_the_empty_diagram() {
    let r = rule_by_label("E").unwrap();
    let (l, rr) = instance_terms(&r, &[], &[]).unwrap();
    assert_eq!(exact(&l), exact(&Term::empty()));
    assert_eq!(exact(&rr), exact(&Term::empty()));
}

#[test]
fn mutated_fusion_is_caught() {
    let mut r = rule_by_label("S1").unwrap();
    r.rhs.vertices[0].kind = PKind::Z(Expr::var(0));
    let rep = check_soundness(&r, 100, Fragment::RationalPi { n: 1 }, 1);
    assert!(!rep.ok());
    let w = rep.counterexample.unwrap();
    assert_eq!(w.angles, vec![("alpha".to_string(), q(1, 4)), ("beta".to_string(), q(1, 4))]);
}

fn chain(phases: &[Angle]) -> Term {
    phases.iter().fold(Term::id(), |t, a| t.then(&Term::z(1, 1, *a)))
}

#[test]
fn fusion_match_counts() {
    let s1 = rule_by_label("S1").unwrap();
    let two = to_graph(&chain(&[q(1, 4), q(1, 4)]));
    assert_eq!(find_matches(&two, &s1, Direction::Forward).len(), 1);
    let three = to_graph(&chain(&[q(1, 4), q(1, 2), q(1, 4)]));
    assert_eq!(find_matches(&three, &s1, Direction::Forward).len(), 2);
}

#[test]
fn empty_diagram_matches_only_e_backward() {
    let g = OpenGraph::new(0, 0);
    for r in builtin_rules() {
        assert!(find_matches(&g, &r, Direction::Forward).is_empty(), "{}", r.label());
        let back = find_matches(&g, &r, Direction::Backward).len();
        if r.name == "E" {
            assert_eq!(back, 1, "{}", r.label());
        } else {
            assert_eq!(back, 0, "{}", r.label());
        }
    }
}

#[test]
fn fusing_quarter_phases() {
    let s1 = rule_by_label("S1").unwrap();
    let g = to_graph(&chain(&[q(1, 4), q(1, 4)]));
    let m = &find_matches(&g, &s1, Direction::Forward)[0];
    let out = apply_rule(&g, &s1, m, Direction::Forward).unwrap();
    let kinds: Vec<VertexKind> = out.vertices().map(|(_, k)| k).collect();
    assert_eq!(kinds, vec![VertexKind::Z(q(1, 2))]);
    assert_eq!(graph_matrix(&out), graph_matrix(&g));
}

#[test]
fn inserting_a_spider_on_a_wire() {
    let s2 = rule_by_label("S2").unwrap();
    let g = to_graph(&Term::id());
    let ms = find_matches(&g, &s2, Direction::Backward);
    assert_eq!(ms.len(), 1);
    let out = apply_rule(&g, &s2, &ms[0], Direction::Backward).unwrap();
    assert_eq!(out.vertex_count(), 1);
    assert_eq!(graph_matrix(&out), graph_matrix(&g));
}

#[test]
fn hadamard_pair_becomes_a_wire() {
    // Insert a phase-free spider between the boxes, swap its colour so the
    // boxes are absorbed, then remove the remaining spider.
    let g0 = to_graph(&Term::h().then(&Term::h()));
    let s2 = rule_by_label("S2").unwrap();
    let s2x = rule_by_label("S2'").unwrap();
    let h = rule_by_label("H").unwrap();
    let wire = g0
        .edges()
        .iter()
        .position(|&(a, b)| matches!((a, b), (End::V(_), End::V(_))))
        .unwrap();
    let m = find_matches(&g0, &s2, Direction::Backward)
        .into_iter()
        .find(|m| m.wires == vec![g0.edges()[wire]])
        .unwrap();
    let g1 = apply_rule(&g0, &s2, &m, Direction::Backward).unwrap();
    let m = find_matches(&g1, &h, Direction::Backward).into_iter().next().unwrap();
    let g2 = apply_rule(&g1, &h, &m, Direction::Backward).unwrap();
    assert_eq!(g2.vertex_count(), 1);
    let m = find_matches(&g2, &s2x, Direction::Forward).into_iter().next().unwrap();
    let g3 = apply_rule(&g2, &s2x, &m, Direction::Forward).unwrap();
    assert_eq!(g3.vertex_count(), 0);
    for g in [&g1, &g2, &g3] {
        assert_eq!(graph_matrix(g), graph_matrix(&g0));
    }
}

#[test]
fn invalid_site_is_rejected() {
    let s1 = rule_by_label("S1").unwrap();
    let g = to_graph(&chain(&[q(1, 4), q(1, 4)]));
    let mut m = find_matches(&g, &s1, Direction::Forward).remove(0);
    m.vertices.swap(0, 1);
    m.vertices[1] = m.vertices[0];
    assert!(matches!(apply_rule(&g, &s1, &m, Direction::Forward), Err(RuleError::Match(_))));
}

#[test]
fn multiplier_examples() {
    let z = |a| Term::z(1, 1, a);
    assert_eq!(angle_multiplier(&z(q(1, 4)), 9).unwrap(), z(q(1, 4)));
    assert_eq!(angle_multiplier(&z(q(1, 12)), 9).unwrap(), z(q(3, 4)));
    assert!(matches!(angle_multiplier(&z(Angle::real(0.3)), 9), Err(RuleError::InexactAngle(_))));
}

#[test]
fn incompleteness_for_three() {
    let rep = incompleteness_witness(3, 50, 2).unwrap();
    assert_eq!(rep.k, 3);
    assert_eq!(rep.multiplier, 9);
    assert_eq!(rep.original_value, Scalar::Exact(DyadicCyclotomic::from_int(24, 0)));
    assert_eq!(rep.multiplied_value, Scalar::Exact(DyadicCyclotomic::from_int(24, 3)));
    assert!(rep.holds(), "{}", rep.to_json());
    assert!(rep.instances_checked >= 50 * rep.rules_checked.len());
}

#[test]
fn incompleteness_for_five() {
    let rep = incompleteness_witness(5, 5, 2).unwrap();
    assert_eq!(rep.multiplier, 25);
    assert!(rep.holds(), "{}", rep.to_json());
    assert!(matches!(incompleteness_witness(9, 1, 0), Err(RuleError::NotOddPrime(9))));
    assert!(matches!(incompleteness_witness(2, 1, 0), Err(RuleError::NotOddPrime(2))));
}

#[test]
fn cancelling_scalars() {
    let s = |a| Term::z(0, 0, a);
    let h = Term::h();
    let (a, b) = cancel_scalar(&h.par(&s(Angle::zero())), &h.par(&s(Angle::zero())), Angle::zero()).unwrap();
    assert_eq!((a, b), (h.clone(), h.clone()));
    assert_eq!(
        cancel_scalar(&h.par(&s(Angle::pi())), &h.par(&s(Angle::pi())), Angle::pi()),
        Err(RuleError::ZeroScalar)
    );
    assert!(matches!(cancel_scalar(&h, &h, Angle::zero()), Err(RuleError::Shape(_))));
    let d1 = Term::z(1, 1, q(1, 2)).then(&Term::x(1, 1, q(1, 2))).then(&Term::z(1, 1, q(1, 2)));
    let d2 = h.par(&scalar_diagram(&ScalarValue::Phase(q(1, 4))));
    let (l, r) = (d1.par(&s(q(1, 2))), d2.par(&s(q(1, 2))));
    assert_eq!(exact(&l), exact(&r));
    let (a, b) = cancel_scalar(&l, &r, q(1, 2)).unwrap();
    assert_eq!(exact(&a), exact(&b));
}

#[test]
fn checking_equations() {
    let hopf = corpus().into_iter().find(|e| e.provenance == "hopf").unwrap();
    assert!(verify_equation(&hopf, None));
    let m = Matrix::from_exact(2, 2, 8, [1, 1, 0, 1].map(|v| DyadicCyclotomic::from_int(8, v)).to_vec()).unwrap();
    let synthetic = render_nf(&lambda_map(&m).unwrap()).unwrap();
    assert!(verify_equation(&Equation::new(triangle(), synthetic, "triangle"), None));
    let bad = Equation::new(Term::z(1, 1, Angle::zero()), Term::x(1, 1, Angle::pi()), "false");
    assert!(!verify_equation(&bad, None));
}

#[test]
fn corpus_verifies() {
    let eqs = corpus();
    assert!(eqs.len() >= 20);
    for e in &eqs {
        assert!(verify_equation(e, None), "{}", e.provenance);
        assert!(common_backend_is_exact(e), "{}", e.provenance);
    }
}

fn common_backend_is_exact(e: &Equation) -> bool {
    matches!(crate::normalform::common_backend(&e.lhs, &e.rhs), Backend::Exact { .. })
}

#[test]
fn corpus_json_round_trip() {
    for e in corpus() {
        assert_eq!(Equation::from_json(&e.to_json()).unwrap(), e);
    }
}

#[test]
fn triangle_states() {
    assert_eq!(exact(&ket0().then(&triangle())), exact(&ket0()));
    assert_eq!(exact(&ket1().then(&triangle())), exact(&Term::z(0, 1, Angle::zero())));
}
