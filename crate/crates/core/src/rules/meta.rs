//! Equations, cancellation, the angle-multiplier interpretation and the
//! incompleteness witness.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{builtin_rules, draw_instance, instance_terms, RuleError};
use crate::cyclotomic::{cyclotomic_poly, DyadicCyclotomic};
use crate::diagram::{term_from_json, term_to_json, Angle, DiagramError, Fragment, Generator, Term, TermKind};
use crate::gadgets;
use crate::interp::{interp, Backend, Scalar};
use crate::normalform::common_backend;

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub provenance: String,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term, provenance: &str) -> Equation {
        Equation { lhs, rhs, provenance: provenance.to_string() }
    }

    pub fn to_json(&self) -> Value {
        json!({"lhs": term_to_json(&self.lhs), "rhs": term_to_json(&self.rhs), "provenance": self.provenance})
    }

    pub fn from_json(v: &Value) -> Result<Equation, DiagramError> {
        let field = |k: &str| {
            v.get(k).ok_or_else(|| DiagramError::Parse { path: format!("$.{k}"), msg: "missing field".into() })
        };
        let lhs = term_from_json(field("lhs")?).map_err(|e| prefix(e, "$.lhs"))?;
        let rhs = term_from_json(field("rhs")?).map_err(|e| prefix(e, "$.rhs"))?;
        let provenance = v.get("provenance").and_then(Value::as_str).unwrap_or("").to_string();
        Ok(Equation { lhs, rhs, provenance })
    }
}

fn prefix(e: DiagramError, p: &str) -> DiagramError {
    match e {
        DiagramError::Parse { path, msg } => DiagramError::Parse { path: path.replacen('$', p, 1), msg },
        other => other,
    }
}

/// Matrix equality of the two sides: exact when both are rational, else
/// within `1e-9`.
pub fn verify_equation(e: &Equation, backend: Option<Backend>) -> bool {
    if e.lhs.inputs() != e.rhs.inputs() || e.lhs.outputs() != e.rhs.outputs() {
        return false;
    }
    let b = backend.unwrap_or_else(|| common_backend(&e.lhs, &e.rhs));
    match (interp(&e.lhs, b), interp(&e.rhs, b)) {
        (Ok(x), Ok(y)) => x.equal(&y, 1e-9),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Cancellation

fn split_scalar(t: &Term) -> Option<(Term, Angle)> {
    match t.kind() {
        TermKind::Tensor(d, s) => match s.as_generator() {
            Some(Generator::Z { inputs: 0, outputs: 0, phase }) => Some((d.clone(), *phase)),
            _ => None,
        },
        _ => None,
    }
}

/// From `D₁ ⊗ Z(α) = D₂ ⊗ Z(α)` with `α ≠ π`, the equation `D₁ = D₂`.
pub fn cancel_scalar(lhs: &Term, rhs: &Term, alpha: Angle) -> Result<(Term, Term), RuleError> {
    if alpha.is_pi() {
        return Err(RuleError::ZeroScalar);
    }
    let (d1, a1) = split_scalar(lhs).ok_or_else(|| RuleError::Shape("left side".into()))?;
    let (d2, a2) = split_scalar(rhs).ok_or_else(|| RuleError::Shape("right side".into()))?;
    if a1 != alpha || a2 != alpha {
        return Err(RuleError::Shape(format!("scalars {a1} and {a2} are not Z(0,0,{alpha})")));
    }
    // 1 + e^{iα} must be invertible.
    match alpha {
        Angle::ExactPi { den, .. } => {
            let order = 8 * den as u64;
            let e = alpha.root_exponent(order).expect("order is a multiple of the denominator");
            DyadicCyclotomic::invert_one_plus_root(order, e).map_err(|e| RuleError::Other(e.to_string()))?;
        }
        Angle::Real(r) => {
            if (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, r)).norm() < 1e-12 {
                return Err(RuleError::ZeroScalar);
            }
        }
    }
    Ok((d1, d2))
}

// ---------------------------------------------------------------------------
// Angle multiplier

/// Multiplies every phase by `k`.
pub fn angle_multiplier(d: &Term, k: i64) -> Result<Term, RuleError> {
    if let Some(a) = d.angles().into_iter().find(|a| !a.is_exact()) {
        return Err(RuleError::InexactAngle(a.to_string()));
    }
    Ok(d.map_angles(&|a| a.scale(k)))
}

// ---------------------------------------------------------------------------
// Incompleteness

#[derive(Clone, Debug)]
pub struct IncompletenessReport {
    pub p: u64,
    pub k: i64,
    pub multiplier: i64,
    pub original_value: Scalar,
    pub multiplied_value: Scalar,
    pub rules_checked: Vec<String>,
    pub instances_checked: usize,
    pub instances_preserved: usize,
    pub failures: Vec<String>,
}

impl IncompletenessReport {
    pub fn holds(&self) -> bool {
        let zero = matches!(&self.original_value, Scalar::Exact(d) if d.is_zero());
        let nonzero = matches!(&self.multiplied_value, Scalar::Exact(d) if !d.is_zero());
        zero && nonzero && self.failures.is_empty() && self.instances_checked == self.instances_preserved
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "k": self.k,
            "multiplier": self.multiplier,
            "original_value": self.original_value.to_json(),
            "original_value_complex": [self.original_value.to_complex().re, self.original_value.to_complex().im],
            "multiplied_value": self.multiplied_value.to_json(),
            "multiplied_value_complex": [self.multiplied_value.to_complex().re, self.multiplied_value.to_complex().im],
            "rules_checked": self.rules_checked,
            "instances_checked": self.instances_checked,
            "instances_preserved": self.instances_preserved,
            "failures": self.failures,
            "holds": self.holds(),
        })
    }
}

fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Value of a controlled scalar at `|1⟩` at the given order.
fn control_one(t: &Term, order: u64) -> Result<Scalar, RuleError> {
    let m = interp(&gadgets::ket1().then(t), Backend::Exact { order }).map_err(|e| RuleError::Other(e.to_string()))?;
    Ok(m.get(0, 0))
}

/// Builds `Γ_{π/4p}(Φ_{8p})`, which encodes 0, and shows that multiplying
/// all angles by `kp ≡ 1 (mod 8)` keeps the axioms sound but sends it to a
/// non-zero value.
pub fn incompleteness_witness(p: u64, samples: usize, seed: u64) -> Result<IncompletenessReport, RuleError> {
    if !is_odd_prime(p) {
        return Err(RuleError::NotOddPrime(p));
    }
    let order = 8 * p;
    let g = gadgets::gamma(Angle::pi_frac(1, 4 * p as i64), &cyclotomic_poly(order))
        .map_err(|e| RuleError::Other(e.to_string()))?;
    let k = (1..8).find(|k| (k * p as i64) % 8 == 1).expect("p is odd");
    let multiplier = k * p as i64;
    let original_value = control_one(g.term(), order)?;
    let image = angle_multiplier(g.term(), multiplier)?;
    let multiplied_value = control_one(&image, order)?;

    let fragment = Fragment::RationalPi { n: p };
    let backend = Backend::Exact { order };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IncompletenessReport {
        p,
        k,
        multiplier,
        original_value,
        multiplied_value,
        rules_checked: vec![],
        instances_checked: 0,
        instances_preserved: 0,
        failures: vec![],
    };
    for r in builtin_rules().into_iter().filter(|r| r.derive.is_none()) {
        report.rules_checked.push(r.label());
        for s in 0..samples {
            let Some((vals, sizes)) = draw_instance(&r, &mut rng, &fragment, s == 0) else { continue };
            let Some((l, rr)) = instance_terms(&r, &vals, &sizes) else { continue };
            report.instances_checked += 1;
            let ok = match (angle_multiplier(&l, multiplier), angle_multiplier(&rr, multiplier)) {
                (Ok(a), Ok(b)) => match (interp(&a, backend), interp(&b, backend)) {
                    (Ok(x), Ok(y)) => x == y,
                    _ => false,
                },
                _ => false,
            };
            if ok {
                report.instances_preserved += 1;
            } else {
                report.failures.push(r.label());
            }
        }
    }
    Ok(report)
}
