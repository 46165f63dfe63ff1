//! Regression corpus of derived equations, kept as JSON data files.

use std::fs;
use std::path::Path;

use serde_json::Value;

use super::meta::Equation;
use crate::cyclotomic::cyclotomic_poly;
use crate::diagram::{Angle, Term};
use crate::gadgets::{
    and_gate, bra0, c_half, gamma, ket0, ket1, poly, prod_cs, scalar_diagram, sum_cs, transistor, triangle,
    triangle_inverse, ScalarValue,
};
use crate::interp::Scalar;
use crate::normalform::{lambda_state, render};
use crate::cyclotomic::DyadicCyclotomic;

fn q(n: i64, d: i64) -> Angle {
    Angle::pi_frac(n, d)
}

fn s(v: ScalarValue) -> Term {
    scalar_diagram(&v)
}

fn z(i: usize, o: usize, a: Angle) -> Term {
    Term::z(i, o, a)
}

fn x(i: usize, o: usize, a: Angle) -> Term {
    Term::x(i, o, a)
}

/// The corpus, built from the gadget constructors.
pub fn corpus() -> Vec<Equation> {
    let zero = Angle::zero();
    let id = Term::id();
    let t = triangle();
    let tt = triangle().transpose();
    let and = and_gate();
    let ones2 = z(0, 1, zero).par(&z(0, 1, zero));
    let a = q(1, 4);
    let (p, r) = (poly(&[1, -1]), poly(&[0, 2]));
    let g = |x: &crate::cyclotomic::IntPolynomial| gamma(a, x).unwrap();
    let cnf = render(&lambda_state(&[1, -1, 2, 0].map(|v| Scalar::Exact(DyadicCyclotomic::from_int(8, v)))).unwrap()).unwrap();

    vec![
        Equation::new(s(ScalarValue::Sqrt2).par(&s(ScalarValue::InvSqrt2)), Term::empty(), "inverse"),
        Equation::new(
            s(ScalarValue::Phase(q(1, 4))).par(&s(ScalarValue::Phase(q(1, 2)))),
            s(ScalarValue::Phase(q(3, 4))),
            "multiplying-global-phases",
        ),
        Equation::new(x(0, 1, zero).then(&z(1, 0, q(1, 3))), s(ScalarValue::Sqrt2), "bicolor-0-alpha"),
        Equation::new(
            z(1, 2, zero).then(&x(2, 1, zero)),
            z(1, 0, zero).par(&x(0, 1, zero)).par(&s(ScalarValue::Half)),
            "hopf",
        ),
        Equation::new(
            x(1, 1, Angle::pi()).then(&z(1, 1, a)),
            z(1, 1, a.neg()).then(&x(1, 1, Angle::pi())).par(&s(ScalarValue::Phase(a))),
            "k1",
        ),
        Equation::new(
            z(1, 3, a).then(&id.par(&Term::h()).par(&id)).then(&id.par(&Term::cup())),
            z(1, 1, a.add(&Angle::pi())).par(&s(ScalarValue::InvSqrt2)),
            "h-loop",
        ),
        Equation::new(
            z(0, 1, q(1, 2)),
            x(0, 1, q(-1, 2)).par(&s(ScalarValue::Phase(q(1, 4)))),
            "green-state-pi_2-is-red-state-minus-pi_2",
        ),
        Equation::new(
            Term::h(),
            z(1, 1, q(1, 2)).then(&x(1, 1, q(1, 2))).then(&z(1, 1, q(1, 2))).par(&s(ScalarValue::Phase(q(-1, 4)))),
            "euler-decomp-with-scalar",
        ),
        Equation::new(ket0().then(&t), ket0(), "red-state-on-triangle"),
        Equation::new(ket1().then(&t), z(0, 1, zero), "pi-red-state-on-triangle"),
        Equation::new(ket0().then(&tt), z(0, 1, zero), "red-state-on-upside-down-triangle"),
        Equation::new(ket1().then(&tt), ket1(), "pi-red-state-on-upside-down-triangle"),
        Equation::new(z(0, 1, Angle::pi()).then(&tt), ket0(), "pi-green-state-on-upside-down-triangle"),
        Equation::new(Term::cap().then(&t.par(&id)).then(&Term::cup()), s(ScalarValue::Two), "looped-triangle"),
        Equation::new(triangle_inverse().then(&t), id.clone(), "inverse-of-triangle"),
        Equation::new(
            x(1, 1, Angle::pi()).then(&t).then(&x(1, 1, Angle::pi())),
            tt.clone(),
            "not-triangle-is-symmetrical",
        ),
        Equation::new(ket0().par(&id).then(&transistor()), id.clone(), "transistor-closed"),
        Equation::new(ket1().par(&id).then(&transistor()), z(1, 0, zero).then(&ket0()), "transistor-open"),
        Equation::new(Term::swap().then(&and), and.clone(), "and-commutative"),
        Equation::new(and.par(&id).then(&and), id.par(&and).then(&and), "and-associative"),
        Equation::new(ket0().par(&id).then(&and), z(1, 0, zero).then(&ket0()), "and-absorbing"),
        Equation::new(ket1().par(&id).then(&and), id.clone(), "and-unit"),
        Equation::new(
            sum_cs(&g(&p), &g(&r)).unwrap().term().clone(),
            g(&p.add(&r)).term().clone(),
            "sum-prod-polynomials-sum",
        ),
        Equation::new(
            prod_cs(&g(&p), &g(&r)).unwrap().term().clone(),
            g(&p.mul(&r)).term().clone(),
            "sum-prod-polynomials-product",
        ),
        Equation::new(
            prod_cs(&c_half(), &g(&poly(&[2, 0, -4]))).unwrap().term().clone(),
            g(&poly(&[1, 0, -2])).term().clone(),
            "half-times-double",
        ),
        Equation::new(gamma(q(1, 4), &cyclotomic_poly(8)).unwrap().term().clone(), bra0(), "cyclo-to-0-n1"),
        Equation::new(gamma(q(1, 12), &cyclotomic_poly(24)).unwrap().term().clone(), bra0(), "cyclo-to-0-n3"),
        Equation::new(ket0().then(&cnf), ones2, "cnf-control-0"),
    ]
}

pub fn file_name(e: &Equation) -> String {
    format!("{}.json", e.provenance)
}

/// Writes one JSON file per equation.
pub fn emit(dir: &Path) -> std::io::Result<usize> {
    fs::create_dir_all(dir)?;
    let eqs = corpus();
    for e in &eqs {
        fs::write(dir.join(file_name(e)), e.to_json().to_string() + "\n")?;
    }
    Ok(eqs.len())
}

/// A file name with its parsed equation or the parse error.
pub type Loaded = (String, Result<Equation, String>);

/// Loads every `*.json` equation in the directory, sorted by file name.
pub fn load(dir: &Path) -> Result<Vec<Loaded>, std::io::Error> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let parsed = fs::read_to_string(&p)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<Value>(&t).map_err(|e| e.to_string()))
                .and_then(|v| Equation::from_json(&v).map_err(|e| e.to_string()));
            (name, parsed)
        })
        .collect())
}
