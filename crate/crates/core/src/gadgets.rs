//! Derived constructions: triangle, AND, transistor, controlled states and
//! the scalars used to build normal forms.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclotomic::{DyadicCyclotomic, IntPolynomial};
use crate::diagram::circuit::Circuit;
use crate::diagram::{Angle, Term};
use crate::interp::{interp, Backend, InterpError, Matrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("controlled states have {0} and {1} outputs")]
    Arity(usize, usize),
    #[error("expected exactly one input, found {0}")]
    InputArity(usize),
    #[error("({p}, {poly}) is not canonical at order {order}")]
    NotCanonical { order: u64, p: u32, poly: String },
    #[error("the control-0 value is not the all-ones vector")]
    NotControlled,
    #[error("non-finite value")]
    NonFinite,
    #[error("angle {0} is not an exact multiple of π")]
    InexactAngle(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

fn q(num: i64, den: i64) -> Angle {
    Angle::pi_frac(num, den)
}

fn zero() -> Angle {
    Angle::zero()
}

fn cached(cell: &'static OnceLock<Term>, f: impl FnOnce() -> Term) -> Term {
    cell.get_or_init(f).clone()
}

// ---------------------------------------------------------------------------
// Scalars

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarValue {
    Two,
    Half,
    Sqrt2,
    InvSqrt2,
    Phase(Angle),
}

pub fn scalar_diagram(v: &ScalarValue) -> Term {
    static TWO: OnceLock<Term> = OnceLock::new();
    static SQRT2: OnceLock<Term> = OnceLock::new();
    static INV_SQRT2: OnceLock<Term> = OnceLock::new();
    static HALF: OnceLock<Term> = OnceLock::new();
    match v {
        ScalarValue::Two => cached(&TWO, || Term::z(0, 1, zero()).then(&Term::z(1, 0, zero()))),
        ScalarValue::Sqrt2 => cached(&SQRT2, || Term::x(0, 1, zero()).then(&Term::z(1, 0, zero()))),
        ScalarValue::InvSqrt2 => cached(&INV_SQRT2, || {
            Term::cap()
                .then(&Term::h().then(&triangle()).par(&Term::id()))
                .then(&Term::cup())
        }),
        ScalarValue::Half => cached(&HALF, || {
            let s = scalar_diagram(&ScalarValue::InvSqrt2);
            s.par(&s)
        }),
        ScalarValue::Phase(a) => Term::x(0, 1, Angle::pi())
            .then(&Term::z(1, 0, *a))
            .par(&scalar_diagram(&ScalarValue::InvSqrt2)),
    }
}

fn inv_sqrt2() -> Term {
    scalar_diagram(&ScalarValue::InvSqrt2)
}

/// `|0⟩`, `|1⟩` and their effects, scalar-normalized.
pub fn ket0() -> Term {
    Term::x(0, 1, zero()).par(&inv_sqrt2())
}

pub fn ket1() -> Term {
    Term::x(0, 1, Angle::pi()).par(&inv_sqrt2())
}

pub fn bra0() -> Term {
    Term::x(1, 0, zero()).par(&inv_sqrt2())
}

pub fn bra1() -> Term {
    Term::x(1, 0, Angle::pi()).par(&inv_sqrt2())
}

// ---------------------------------------------------------------------------
// Triangle, AND, transistor

/// CNOT on two labelled wires, without its `√2` normalization.
fn cnot(c: &mut Circuit, ctrl: usize, tgt: usize) -> (usize, usize) {
    let cp = c.apply(&Term::z(1, 2, zero()), &[ctrl]);
    let t = c.apply1(&Term::x(2, 1, zero()), &[cp[1], tgt]);
    (cp[0], t)
}

/// `|0⟩⟨0| + |0⟩⟨1| + |1⟩⟨1|`, as a phase-polynomial circuit over an
/// ancilla: `T_{yx} = ½ Σ_z ω^{z + (x⊕z) − (y⊕z) − (x⊕y⊕z)}`.
pub fn triangle() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    cached(&T, || {
        let mut c = Circuit::new(1);
        let x = c.input(0);
        let z = c.apply1(&Term::z(0, 1, q(1, 4)), &[]);
        let y = c.apply1(&Term::z(0, 1, zero()), &[]);
        let (x, z) = cnot(&mut c, x, z);
        let z = c.apply1(&Term::z(1, 1, q(1, 4)), &[z]);
        let (y, z) = cnot(&mut c, y, z);
        let z = c.apply1(&Term::z(1, 1, q(-1, 4)), &[z]);
        let (x, z) = cnot(&mut c, x, z);
        let z = c.apply1(&Term::z(1, 1, q(-1, 4)), &[z]);
        c.apply(&Term::z(1, 0, zero()), &[z]);
        c.apply(&Term::z(1, 0, zero()), &[x]);
        c.apply(&scalar_diagram(&ScalarValue::Sqrt2), &[]);
        c.finish(&[y])
    })
}

/// `[[1,−1],[0,1]]`.
pub fn triangle_inverse() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    cached(&T, || {
        let pi = Term::z(1, 1, Angle::pi());
        pi.then(&triangle()).then(&pi)
    })
}

/// `|a, b⟩ ↦ |a ∧ b⟩`.
pub fn and_gate() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    cached(&T, || {
        let t = triangle();
        t.par(&t).then(&Term::z(2, 1, zero())).then(&triangle_inverse())
    })
}

/// Inputs `(control, wire)`: control `|0⟩` leaves the wire intact, control
/// `|1⟩` opens it into `|0⟩(⟨0|+⟨1|)`.
pub fn transistor() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    cached(&T, || {
        let t = triangle();
        Term::x(1, 1, Angle::pi())
            .then(&t)
            .par(&t)
            .then(&Term::z(2, 1, zero()))
            .then(&triangle_inverse())
    })
}

/// `|0⟩ ↦ |00⟩`, `|1⟩ ↦ |01⟩ + |10⟩`.
pub fn w_node() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    cached(&T, || {
        let mut c = Circuit::new(1);
        let bc = c.apply(&Term::x(1, 2, zero()), &[c.input(0)]);
        let b = c.apply(&Term::z(1, 2, zero()), &[bc[0]]);
        let cc = c.apply(&Term::z(1, 2, zero()), &[bc[1]]);
        let o = c.apply1(&and_gate(), &[b[1], cc[1]]);
        c.apply(&Term::x(1, 0, zero()), &[o]);
        c.finish(&[b[0], cc[0]])
    })
}

// ---------------------------------------------------------------------------
// Controlled states

#[derive(Clone, Debug)]
pub struct ControlledState {
    term: Term,
    encoded: Arc<OnceLock<Result<Matrix, InterpError>>>,
}

impl PartialEq for ControlledState {
    fn eq(&self, other: &Self) -> bool {
        self.term == other.term
    }
}

impl ControlledState {
    /// Wraps a 1-input term, checking the control-0 condition.
    pub fn new(term: Term) -> Result<ControlledState, GadgetError> {
        if !is_controlled_state(&term)? {
            return Err(GadgetError::NotControlled);
        }
        Ok(ControlledState::trusted(term))
    }

    fn trusted(term: Term) -> ControlledState {
        debug_assert_eq!(term.inputs(), 1);
        ControlledState { term, encoded: Arc::new(OnceLock::new()) }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn outputs(&self) -> usize {
        self.term.outputs()
    }

    /// `⟦D⟧|1⟩` as a column, at the term's own backend.
    pub fn encoded(&self) -> Result<Matrix, InterpError> {
        self.encoded
            .get_or_init(|| self.encoded_with(Backend::for_term(&self.term)))
            .clone()
    }

    pub fn encoded_with(&self, backend: Backend) -> Result<Matrix, InterpError> {
        interp(&ket1().then(&self.term), backend)
    }

    /// The encoded value of a controlled scalar.
    pub fn value(&self) -> Result<Scalar, InterpError> {
        assert_eq!(self.outputs(), 0, "value() needs a controlled scalar");
        Ok(self.encoded()?.get(0, 0))
    }
}

pub fn is_controlled_state(d: &Term) -> Result<bool, GadgetError> {
    if d.inputs() != 1 {
        return Err(GadgetError::InputArity(d.inputs()));
    }
    let m = interp(d, Backend::for_term(d))?;
    Ok((0..m.rows()).all(|r| match m.get(r, 0) {
        Scalar::Exact(x) => x.is_one(),
        Scalar::Float(c) => (c - Complex64::new(1.0, 0.0)).norm() < 1e-9,
    }))
}

/// Pairs output `i` of the left block with output `i` of the right block
/// and merges each pair with a Z-spider.
fn merge(n: usize) -> Term {
    let perm: Vec<usize> = (0..2 * n).map(|j| if j % 2 == 0 { j / 2 } else { n + j / 2 }).collect();
    Term::permutation(&perm).then(&Term::tensor_all((0..n).map(|_| Term::z(2, 1, zero()))))
}

fn combine(split: Term, a: &ControlledState, b: &ControlledState) -> Result<ControlledState, GadgetError> {
    if a.outputs() != b.outputs() {
        return Err(GadgetError::Arity(a.outputs(), b.outputs()));
    }
    let n = a.outputs();
    let t = split.then(&a.term.par(&b.term)).then(&merge(n));
    Ok(ControlledState::trusted(t))
}

/// Encodes the sum of the two encoded vectors.
pub fn sum_cs(a: &ControlledState, b: &ControlledState) -> Result<ControlledState, GadgetError> {
    combine(w_node(), a, b)
}

/// Encodes the entrywise product of the two encoded vectors.
pub fn prod_cs(a: &ControlledState, b: &ControlledState) -> Result<ControlledState, GadgetError> {
    combine(Term::z(1, 2, zero()), a, b)
}

fn fold_balanced(
    mut items: Vec<ControlledState>,
    f: fn(&ControlledState, &ControlledState) -> Result<ControlledState, GadgetError>,
) -> Result<Option<ControlledState>, GadgetError> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(f(&a, &b)?),
                None => next.push(a),
            }
        }
        items = next;
    }
    Ok(items.pop())
}

/// Controlled scalar encoding 0.
pub fn zero_cs() -> ControlledState {
    ControlledState::trusted(bra0())
}

/// Controlled scalar encoding `e^{iα}`: the 1→0 Z-spider.
pub fn lambda_unit(alpha: Angle) -> ControlledState {
    ControlledState::trusted(Term::z(1, 0, alpha))
}

/// Controlled scalar encoding `P(e^{iα})`.
pub fn gamma(alpha: Angle, poly: &IntPolynomial) -> Result<ControlledState, GadgetError> {
    if !alpha.is_exact() {
        return Err(GadgetError::InexactAngle(alpha.to_string()));
    }
    let mut units = Vec::new();
    for (k, c) in poly.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut a = alpha.scale(k as i64);
        if c.is_negative() {
            a = a.add(&Angle::pi());
        }
        let reps = c.abs().to_usize().expect("coefficient fits in memory");
        units.extend(std::iter::repeat_n(lambda_unit(a), reps));
    }
    Ok(fold_balanced(units, sum_cs)?.unwrap_or_else(zero_cs))
}

/// Controlled scalar encoding `1/2`.
pub fn c_half() -> ControlledState {
    static T: OnceLock<Term> = OnceLock::new();
    ControlledState::trusted(cached(&T, || {
        triangle()
            .transpose()
            .then(&Term::z(1, 0, zero()))
            .par(&scalar_diagram(&ScalarValue::Half))
    }))
}

/// Controlled scalar encoding `P(e^{iπ/4n}) / 2^p` for canonical `(p, P)`.
pub fn lambda_rational(n: u64, p: u32, poly: &IntPolynomial) -> Result<ControlledState, GadgetError> {
    assert!(n >= 1);
    let order = 8 * n;
    let not_canonical = || GadgetError::NotCanonical { order, p, poly: poly.to_string() };
    let c = DyadicCyclotomic::canonicalize(order, p, poly.clone()).map_err(|_| not_canonical())?;
    if c.p() != p || c.poly() != poly {
        return Err(not_canonical());
    }
    lambda_of(&c)
}

/// Controlled scalar for an already canonical ring element.
pub fn lambda_of(c: &DyadicCyclotomic) -> Result<ControlledState, GadgetError> {
    let n = c.order() / 8;
    let mut factors = Vec::new();
    if *c.poly() != IntPolynomial::one() || c.p() == 0 {
        factors.push(gamma(q(1, 4 * n as i64), c.poly())?);
    }
    factors.extend((0..c.p()).map(|_| c_half()));
    Ok(fold_balanced(factors, prod_cs)?.expect("at least one factor"))
}

fn real_angle(r: f64) -> Angle {
    if r == 0.0 {
        Angle::zero()
    } else {
        Angle::real(r)
    }
}

/// Controlled scalar encoding an arbitrary complex number.
///
/// With `x = ρe^{iθ}`, `n = max(0, ⌈log₂ρ⌉)`, `β = arccos(ρ/2^n)` and
/// `γ = arccos(2^{-n})`, the control-1 value is
/// `2^{n−1} e^{−iγ} e^{i(θ−β+γ)} Σ_b e^{2iγb} e^{2i(β−γ)b} = ρe^{iθ}`
/// and the control-0 value is `2^n cos γ = 1`.
pub fn lambda_real(x: Complex64) -> Result<ControlledState, GadgetError> {
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(GadgetError::NonFinite);
    }
    if x.norm() == 0.0 {
        return Ok(zero_cs());
    }
    let (rho, theta) = x.to_polar();
    let n = rho.log2().ceil().max(0.0) as i32;
    let scale = 2f64.powi(n);
    let beta = (rho / scale).min(1.0).acos();
    let gamma = (1.0 / scale).acos();

    let mut c = Circuit::new(1);
    let cc = c.apply(&Term::z(1, 2, zero()), &[c.input(0)]);
    c.apply(&Term::z(1, 0, real_angle(theta - beta + gamma)), &[cc[0]]);
    let b = c.apply1(&Term::z(0, 1, real_angle(2.0 * gamma)), &[]);
    let o = c.apply1(&and_gate(), &[b, cc[1]]);
    c.apply(&Term::z(1, 0, real_angle(2.0 * (beta - gamma))), &[o]);
    if n == 0 {
        c.apply(&scalar_diagram(&ScalarValue::Half), &[]);
    } else {
        for _ in 1..n {
            c.apply(&scalar_diagram(&ScalarValue::Two), &[]);
        }
        c.apply(&scalar_diagram(&ScalarValue::Phase(real_angle(-gamma))), &[]);
    }
    Ok(ControlledState::trusted(c.finish(&[])))
}

/// Integer polynomial helper used by callers building `Γ` inputs.
pub fn poly(cs: &[i64]) -> IntPolynomial {
    IntPolynomial::new(cs.iter().map(|&c| BigInt::from(c)).collect())
}
