//! Dyadic cyclotomic numbers `(1/2^p)·P(ζ_N)` with `N = 8n`.
//!
//! Every value is kept in canonical form: `deg P < φ(N)`, and `p` is as small as
//! the parity of the coefficients allows. Two canonical values are equal exactly
//! when their fields are equal, so derived `PartialEq` decides equality.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("order {0} is not a positive multiple of 8")]
    MalformedOrder(u64),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(u64, u64),
    #[error("cannot embed order {from} into order {to}")]
    Embedding { from: u64, to: u64 },
    #[error("1 + ζ^{k} is zero at order {order}")]
    NonInvertible { order: u64, k: i64 },
    #[error("inverse of 1 + ζ^{k} at order {order} has a non-dyadic denominator")]
    NotInRing { order: u64, k: i64 },
}

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![BigInt::from(c)])
    }

    /// `X^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPolynomial { coeffs }
    }

    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        let cs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
            .collect();
        Self::new(cs)
    }

    pub fn neg(&self) -> Self {
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut cs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] += a * b;
            }
        }
        Self::new(cs)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Substitutes `X ↦ X^k`.
    pub fn compose_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut cs = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            cs[i * k] = c.clone();
        }
        Self::new(cs)
    }

    /// Euclidean division by a monic divisor: returns `(q, r)` with `self = q·d + r`.
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        assert!(d.coeffs[dd].is_one(), "divisor must be monic");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = std::mem::take(&mut r[i]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs[..dd].iter().enumerate() {
                r[i - dd + j] -= &c * dc;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + big_to_f64(c))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{a}X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{a}X^{i}")?,
            }
        }
        Ok(())
    }
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

pub fn totient(n: u64) -> u64 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u64, Rc<IntPolynomial>>> = RefCell::new(HashMap::new());
}

/// The `n`-th cyclotomic polynomial, by exact division of `X^n − 1`.
pub fn cyclotomic_poly(n: u64) -> IntPolynomial {
    (*cyclotomic_rc(n)).clone()
}

fn cyclotomic_rc(n: u64) -> Rc<IntPolynomial> {
    assert!(n >= 1, "cyclotomic_poly needs N ≥ 1");
    if let Some(p) = PHI_CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    let mut num = IntPolynomial::monomial(n as usize).sub(&IntPolynomial::one());
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = num.divrem_monic(&cyclotomic_rc(d));
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    let rc = Rc::new(num);
    PHI_CACHE.with(|c| c.borrow_mut().insert(n, rc.clone()));
    rc
}

fn check_order(order: u64) -> Result<(), CycloError> {
    if order == 0 || order % 8 != 0 {
        Err(CycloError::MalformedOrder(order))
    } else {
        Ok(())
    }
}

/// `(1/2^p)·poly(ζ_order)`, always canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicCyclotomic {
    order: u64,
    p: u32,
    poly: IntPolynomial,
}

impl DyadicCyclotomic {
    pub fn canonicalize(order: u64, p: u32, poly: IntPolynomial) -> Result<Self, CycloError> {
        check_order(order)?;
        Ok(Self::canon_unchecked(order, p, poly))
    }

    fn canon_unchecked(order: u64, mut p: u32, poly: IntPolynomial) -> Self {
        let (_, mut r) = poly.divrem_monic(&cyclotomic_rc(order));
        if r.is_zero() {
            return DyadicCyclotomic { order, p: 0, poly: r };
        }
        let two = BigInt::from(2);
        while p > 0 && r.coeffs.iter().all(|c| c.is_even()) {
            for c in r.coeffs.iter_mut() {
                *c /= &two;
            }
            p -= 1;
        }
        DyadicCyclotomic { order, p, poly: r }
    }

    pub fn zero(order: u64) -> Self {
        DyadicCyclotomic { order, p: 0, poly: IntPolynomial::zero() }
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: u64, c: i64) -> Self {
        Self::canon_unchecked(order, 0, IntPolynomial::constant(c))
    }

    /// `ζ_order^k` for any integer `k`.
    pub fn root_power(order: u64, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        Self::canon_unchecked(order, 0, IntPolynomial::monomial(e))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.p == 0 && self.poly.coeffs.len() == 1 && self.poly.coeffs[0].is_one()
    }

    fn same_order(&self, other: &Self) -> Result<(), CycloError> {
        if self.order != other.order {
            Err(CycloError::OrderMismatch(self.order, other.order))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_order(other)?;
        Ok(self.add_same(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_order(other)?;
        Ok(self.mul_same(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.add(&other.neg())
    }

    /// Addition for operands already known to share an order.
    pub(crate) fn add_same(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let p = self.p.max(other.p);
        let a = self.poly.scale(&(BigInt::one() << (p - self.p)));
        let b = other.poly.scale(&(BigInt::one() << (p - other.p)));
        Self::canon_unchecked(self.order, p, a.add(&b))
    }

    pub(crate) fn mul_same(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.order);
        }
        Self::canon_unchecked(self.order, self.p + other.p, self.poly.mul(&other.poly))
    }

    pub fn neg(&self) -> Self {
        DyadicCyclotomic { order: self.order, p: self.p, poly: self.poly.neg() }
    }

    /// Complex conjugate: `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut cs = vec![BigInt::zero(); n];
        for (i, c) in self.poly.coeffs.iter().enumerate() {
            cs[(n - i) % n] += c;
        }
        Self::canon_unchecked(self.order, self.p, IntPolynomial::new(cs))
    }

    pub fn embed_order(&self, new_order: u64) -> Result<Self, CycloError> {
        check_order(new_order)?;
        if new_order % self.order != 0 {
            return Err(CycloError::Embedding { from: self.order, to: new_order });
        }
        let k = (new_order / self.order) as usize;
        Ok(Self::canon_unchecked(new_order, self.p, self.poly.compose_power(k)))
    }

    pub fn sqrt2_inv(order: u64) -> Result<Self, CycloError> {
        check_order(order)?;
        let m = (order / 8) as usize;
        let poly = IntPolynomial::monomial(m).add(&IntPolynomial::monomial(7 * m));
        Ok(Self::canon_unchecked(order, 1, poly))
    }

    /// `√2 = ζ_8 + ζ_8^7`.
    pub fn sqrt2(order: u64) -> Result<Self, CycloError> {
        check_order(order)?;
        let m = (order / 8) as usize;
        let poly = IntPolynomial::monomial(m).add(&IntPolynomial::monomial(7 * m));
        Ok(Self::canon_unchecked(order, 0, poly))
    }

    /// `1/2^k`.
    pub fn half_pow(order: u64, k: u32) -> Self {
        Self::canon_unchecked(order, k, IntPolynomial::one())
    }

    /// Inverse of `1 + ζ_order^k`.
    pub fn invert_one_plus_root(order: u64, k: i64) -> Result<Self, CycloError> {
        check_order(order)?;
        let n = order as i64;
        let k = k.rem_euclid(n);
        if 2 * k == n {
            return Err(CycloError::NonInvertible { order, k });
        }
        if k == 0 {
            return Ok(Self::half_pow(order, 1));
        }
        // ζ^k has multiplicative order t = n / gcd(n, k).
        let t = n / n.gcd(&k);
        if (t as u64).is_power_of_two() {
            // x of order 2^s: 1/(1+x) = (1−x)·∏_{i=1}^{s−2}(1 + x^{2^i}) / 2.
            let x = |e: i64| Self::root_power(order, k * e);
            let one = Self::one(order);
            let mut acc = one.add_same(&x(1).neg());
            let mut e = 2;
            while e < t / 2 {
                acc = acc.mul_same(&one.add_same(&x(e)));
                e *= 2;
            }
            return Ok(acc.mul_same(&Self::half_pow(order, 1)));
        }
        Self::invert_by_solve(order, k)
    }

    /// Solves `y·(1+ζ^k) = 1` over `Q` in the power basis and checks the
    /// denominators are powers of two.
    fn invert_by_solve(order: u64, k: i64) -> Result<Self, CycloError> {
        let phi = cyclotomic_rc(order);
        let d = phi.degree().unwrap();
        let a = IntPolynomial::one().add(&IntPolynomial::monomial(k as usize));
        // Column j of the multiplication matrix is a·X^j mod Φ.
        let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); d + 1]; d];
        for j in 0..d {
            let col = a.mul(&IntPolynomial::monomial(j)).divrem_monic(&phi).1;
            for (i, c) in col.coeffs.iter().enumerate() {
                m[i][j] = BigRational::from_integer(c.clone());
            }
        }
        m[0][d] = BigRational::one();
        let sol = solve_dense(m).ok_or(CycloError::NonInvertible { order, k })?;
        let mut denom = BigInt::one();
        for x in &sol {
            denom = denom.lcm(x.denom());
        }
        let p = denom.trailing_zeros().unwrap_or(0);
        if denom != (BigInt::one() << p) {
            return Err(CycloError::NotInRing { order, k });
        }
        let coeffs = sol.iter().map(|x| x.numer() * (&denom / x.denom())).collect();
        Ok(Self::canon_unchecked(order, p as u32, IntPolynomial::new(coeffs)))
    }

    /// Field inverse when it happens to be dyadic; `None` for zero or non-dyadic.
    pub fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_rc(self.order);
        let d = phi.degree().unwrap();
        let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); d + 1]; d];
        for j in 0..d {
            let col = self.poly.mul(&IntPolynomial::monomial(j)).divrem_monic(&phi).1;
            for (i, c) in col.coeffs.iter().enumerate() {
                m[i][j] = BigRational::from_integer(c.clone());
            }
        }
        m[0][d] = BigRational::one();
        let sol = solve_dense(m)?;
        let mut denom = BigInt::one();
        for x in &sol {
            denom = denom.lcm(x.denom());
        }
        let p = denom.trailing_zeros().unwrap_or(0);
        if denom != (BigInt::one() << p) {
            return None;
        }
        let coeffs = sol.iter().map(|x| x.numer() * (&denom / x.denom())).collect();
        let y = Self::canon_unchecked(self.order, 0, IntPolynomial::new(coeffs));
        // y·2^{-p} is the inverse of poly; rescale by 2^{self.p}.
        let two_pow = Self::canon_unchecked(self.order, 0, IntPolynomial::new(vec![BigInt::one() << self.p]));
        Some(y.mul_same(&two_pow).mul_same(&Self::half_pow(self.order, p as u32)))
    }

    pub fn eval_complex(&self) -> Complex64 {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.order as f64);
        self.poly.eval_f64(z) / 2f64.powi(self.p as i32)
    }

    pub fn to_json(&self) -> Value {
        let poly: Vec<Value> = self
            .poly
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => json!(v),
                None => json!(c.to_string()),
            })
            .collect();
        json!({"order": self.order, "p": self.p, "poly": poly})
    }

    /// Parses `{"order","p","poly"}`; non-canonical input is canonicalized.
    pub fn from_json(v: &Value) -> Result<Self, String> {
        let order = v.get("order").and_then(Value::as_u64).ok_or("missing integer field `order`")?;
        let p = v.get("p").and_then(Value::as_u64).ok_or("missing integer field `p`")?;
        let poly = v.get("poly").and_then(Value::as_array).ok_or("missing array field `poly`")?;
        let mut coeffs = Vec::with_capacity(poly.len());
        for c in poly {
            let b = match c {
                Value::Number(n) => n.as_i64().map(BigInt::from).ok_or("non-integer coefficient")?,
                Value::String(s) => s.parse::<BigInt>().map_err(|e| e.to_string())?,
                _ => return Err("coefficient must be an integer".into()),
            };
            coeffs.push(b);
        }
        Self::canonicalize(order, p as u32, IntPolynomial::new(coeffs)).map_err(|e| e.to_string())
    }
}

impl fmt::Display for DyadicCyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "({})", self.poly)
        } else {
            write!(f, "({})/2^{}", self.poly, self.p)
        }
    }
}

/// Gauss–Jordan on an augmented `d × (d+1)` rational system.
fn solve_dense(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let d = m.len();
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=d {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(order: u64, p: u32, cs: &[i64]) -> DyadicCyclotomic {
        DyadicCyclotomic::canonicalize(order, p, IntPolynomial::from_i64s(cs)).unwrap()
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), IntPolynomial::from_i64s(&[-1, 1]));
        assert_eq!(cyclotomic_poly(8), IntPolynomial::from_i64s(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(24), IntPolynomial::from_i64s(&[1, 0, 0, 0, -1, 0, 0, 0, 1]));
        // Φ_{8p} = Σ_k (−1)^k X^{4k} for an odd prime p.
        let phi40: Vec<i64> = (0..17).map(|i| if i % 4 == 0 { if (i / 4) % 2 == 0 { 1 } else { -1 } } else { 0 }).collect();
        assert_eq!(cyclotomic_poly(40), IntPolynomial::from_i64s(&phi40));
        for n in 1..60 {
            assert_eq!(cyclotomic_poly(n).degree(), Some(totient(n) as usize));
        }
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(8), 4);
        assert_eq!(totient(24), 8);
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(dc(8, 1, &[2, 2, 2]), dc(8, 0, &[1, 1, 1]));
        assert_eq!(dc(8, 1, &[2, 2, 2]).p(), 0);
        assert_eq!(dc(8, 0, &[0, 0, 0, 0, 1]), dc(8, 0, &[-1]));
        assert_eq!(dc(8, 0, &[0, 0, 0, 0, 0, 0, 0, 0, 1]), DyadicCyclotomic::one(8));
        assert_eq!(dc(8, 5, &[0]).p(), 0);
        assert_eq!(
            DyadicCyclotomic::canonicalize(12, 0, IntPolynomial::one()),
            Err(CycloError::MalformedOrder(12))
        );
    }

    #[test]
    fn ring_examples() {
        assert!(dc(8, 0, &[1]).add(&dc(8, 0, &[-1])).unwrap().is_zero());
        assert_eq!(dc(8, 0, &[0, 1]).mul(&dc(8, 0, &[0, 0, 0, 1])).unwrap(), dc(8, 0, &[-1]));
        let s = dc(8, 1, &[0, 1, 0, -1]);
        assert_eq!(s.mul(&s).unwrap(), dc(8, 1, &[1]));
        assert_eq!(dc(8, 0, &[1]).add(&dc(24, 0, &[1])), Err(CycloError::OrderMismatch(8, 24)));
    }

    #[test]
    fn embedding() {
        assert_eq!(dc(8, 0, &[0, 1]).embed_order(24).unwrap(), dc(24, 0, &[0, 0, 0, 1]));
        assert_eq!(dc(8, 0, &[1]).embed_order(8).unwrap(), dc(8, 0, &[1]));
        let v = dc(8, 1, &[0, 1, 0, -1]).embed_order(24).unwrap().eval_complex();
        assert!((v.re - 0.5f64.sqrt()).abs() < 1e-12 && v.im.abs() < 1e-12);
        assert!(dc(24, 0, &[1]).embed_order(16).is_err());
    }

    #[test]
    fn sqrt2_inverse() {
        let s = DyadicCyclotomic::sqrt2_inv(8).unwrap();
        assert_eq!(s, dc(8, 1, &[0, 1, 0, -1]));
        assert_eq!(s.mul(&s).unwrap(), DyadicCyclotomic::half_pow(8, 1));
        let s24 = DyadicCyclotomic::sqrt2_inv(24).unwrap();
        assert_eq!(s24, s.embed_order(24).unwrap());
        assert_eq!(s24, dc(24, 1, &[0, 1, 0, 1, 0, -1]));
        let r = DyadicCyclotomic::sqrt2(8).unwrap();
        assert!(r.mul(&s).unwrap().is_one());
    }

    #[test]
    fn inverses() {
        assert_eq!(DyadicCyclotomic::invert_one_plus_root(8, 2).unwrap(), dc(8, 1, &[1, 0, -1]));
        assert_eq!(DyadicCyclotomic::invert_one_plus_root(8, 0).unwrap(), dc(8, 1, &[1]));
        assert_eq!(
            DyadicCyclotomic::invert_one_plus_root(8, 4),
            Err(CycloError::NonInvertible { order: 8, k: 4 })
        );
        for order in [8u64, 16, 32, 64] {
            for k in 0..order as i64 {
                if 2 * k == order as i64 {
                    continue;
                }
                let y = DyadicCyclotomic::invert_one_plus_root(order, k).unwrap();
                let x = DyadicCyclotomic::one(order).add(&DyadicCyclotomic::root_power(order, k)).unwrap();
                assert!(x.mul(&y).unwrap().is_one(), "order {order} k {k}");
            }
        }
    }

    #[test]
    fn inverse_fallback() {
        // ζ_24^8 has order 3: 1 + ω = −ω² is a unit.
        let y = DyadicCyclotomic::invert_one_plus_root(24, 8).unwrap();
        let x = DyadicCyclotomic::one(24).add(&DyadicCyclotomic::root_power(24, 8)).unwrap();
        assert!(x.mul(&y).unwrap().is_one());
        // 1 + e^{iπ/3} has norm 3.
        assert_eq!(
            DyadicCyclotomic::invert_one_plus_root(24, 4),
            Err(CycloError::NotInRing { order: 24, k: 4 })
        );
        for k in [1, 2, 3, 5, 6, 7] {
            let y = DyadicCyclotomic::invert_one_plus_root(24, k).unwrap();
            let x = DyadicCyclotomic::one(24).add(&DyadicCyclotomic::root_power(24, k)).unwrap();
            assert!(x.mul(&y).unwrap().is_one(), "k {k}");
        }
    }

    #[test]
    fn try_inverse_scales() {
        let x = dc(8, 2, &[1, 0, 1]);
        let y = x.try_inverse().unwrap();
        assert!(x.mul(&y).unwrap().is_one());
        assert!(DyadicCyclotomic::zero(8).try_inverse().is_none());
        assert!(DyadicCyclotomic::from_int(8, 3).try_inverse().is_none());
    }

    #[test]
    fn evaluation() {
        assert_eq!(DyadicCyclotomic::zero(8).eval_complex(), Complex64::new(0.0, 0.0));
        let v = dc(8, 0, &[1, 0, 1]).eval_complex();
        assert!((v - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 24.0);
        assert!(cyclotomic_poly(24).eval_f64(z).norm() < 1e-12);
    }

    #[test]
    fn conjugation() {
        let z = dc(8, 1, &[3, 1, -2]);
        let c = z.conj();
        assert!((c.eval_complex() - z.eval_complex().conj()).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let z = dc(24, 3, &[1, -5, 0, 7]);
        assert_eq!(DyadicCyclotomic::from_json(&z.to_json()).unwrap(), z);
        assert_eq!(z.to_json()["order"], 24);
    }
}
