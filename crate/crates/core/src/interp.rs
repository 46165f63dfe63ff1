//! Standard interpretation of terms as dense matrices.
//!
//! Terms are evaluated against a register: a `2^W × C` matrix whose rows index
//! the current wires (wire 0 is the most significant bit). Each generator acts
//! locally on a slice of wires, so a long composition never materializes the
//! full-width operator. Small closed subterms are evaluated on their own and
//! memoized by node identity.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cyclotomic::DyadicCyclotomic;
use crate::diagram::{fragment_of, Angle, Fragment, Generator, Term, TermKind};

pub const DEFAULT_MAX_QUBITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("intermediate width {width} exceeds the cap of {cap} qubits")]
    WidthCap { width: usize, cap: usize },
    #[error("angle {0} cannot be interpreted exactly at order {1}")]
    Backend(String, u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact { order: u64 },
    Float,
}

impl Backend {
    /// Exact at the term's own fragment when it is rational, float otherwise.
    pub fn for_term(t: &Term) -> Backend {
        match fragment_of(t).order() {
            Some(order) => Backend::Exact { order },
            None => Backend::Float,
        }
    }
}

// ---------------------------------------------------------------------------
// Scalars

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(DyadicCyclotomic),
    Float(Complex64),
}

impl Scalar {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(d) => d.eval_complex(),
            Scalar::Float(c) => *c,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Exact(d) => d.to_json(),
            Scalar::Float(c) => json!({"re": c.re, "im": c.im}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Scalar, String> {
        if v.get("order").is_some() {
            return DyadicCyclotomic::from_json(v).map(Scalar::Exact);
        }
        let re = v.get("re").and_then(Value::as_f64).ok_or("scalar needs `order` or `re`/`im`")?;
        let im = v.get("im").and_then(Value::as_f64).unwrap_or(0.0);
        if !re.is_finite() || !im.is_finite() {
            return Err("non-finite float scalar".into());
        }
        Ok(Scalar::Float(Complex64::new(re, im)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(d) => write!(f, "{d}"),
            Scalar::Float(c) => write!(f, "{c}"),
        }
    }
}

pub trait Num: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Num for DyadicCyclotomic {
    fn add(&self, o: &Self) -> Self {
        self.add_same(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_same(o)
    }
    fn is_zero(&self) -> bool {
        DyadicCyclotomic::is_zero(self)
    }
}

impl Num for Complex64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Scalar constructors for one backend.
pub(crate) trait Ctx: Clone {
    type N: Num;
    fn zero(&self) -> Self::N;
    fn one(&self) -> Self::N;
    fn sqrt2_inv(&self) -> Self::N;
    fn phase(&self, a: &Angle) -> Result<Self::N, InterpError>;
    fn neg(&self, x: &Self::N) -> Self::N;
}

#[derive(Clone)]
pub(crate) struct ExactCtx(pub u64);

impl Ctx for ExactCtx {
    type N = DyadicCyclotomic;
    fn zero(&self) -> DyadicCyclotomic {
        DyadicCyclotomic::zero(self.0)
    }
    fn one(&self) -> DyadicCyclotomic {
        DyadicCyclotomic::one(self.0)
    }
    fn sqrt2_inv(&self) -> DyadicCyclotomic {
        DyadicCyclotomic::sqrt2_inv(self.0).expect("order checked at construction")
    }
    fn phase(&self, a: &Angle) -> Result<DyadicCyclotomic, InterpError> {
        a.root_exponent(self.0)
            .map(|e| DyadicCyclotomic::root_power(self.0, e))
            .ok_or_else(|| InterpError::Backend(a.to_string(), self.0))
    }
    fn neg(&self, x: &DyadicCyclotomic) -> DyadicCyclotomic {
        x.neg()
    }
}

#[derive(Clone)]
pub(crate) struct FloatCtx;

impl Ctx for FloatCtx {
    type N = Complex64;
    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn sqrt2_inv(&self) -> Complex64 {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
    fn phase(&self, a: &Angle) -> Result<Complex64, InterpError> {
        Ok(Complex64::from_polar(1.0, a.radians()))
    }
    fn neg(&self, x: &Complex64) -> Complex64 {
        -x
    }
}

// ---------------------------------------------------------------------------
// Dense kernel

#[derive(Clone, Debug, PartialEq)]
pub struct Dense<N> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<N>,
}

impl<N: Num> Dense<N> {
    fn filled(rows: usize, cols: usize, z: &N) -> Self {
        Dense { rows, cols, data: vec![z.clone(); rows * cols] }
    }

    fn identity(dim: usize, z: &N, one: &N) -> Self {
        let mut d = Self::filled(dim, dim, z);
        for i in 0..dim {
            d.data[i * dim + i] = one.clone();
        }
        d
    }

    fn nonzeros(&self) -> Vec<(usize, usize, N)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = &self.data[r * self.cols + c];
                if !v.is_zero() {
                    out.push((r, c, v.clone()));
                }
            }
        }
        out
    }

    fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.data[r * self.cols + c].clone());
            }
        }
        Dense { rows: self.cols, cols: self.rows, data }
    }

    pub fn matmul(&self, b: &Self, z: &N) -> Self {
        assert_eq!(self.cols, b.rows);
        let mut out = Self::filled(self.rows, b.cols, z);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let bv = &b.data[k * b.cols + j];
                    if bv.is_zero() {
                        continue;
                    }
                    let cell = &mut out.data[i * b.cols + j];
                    *cell = cell.add(&a.mul(bv));
                }
            }
        }
        out
    }

    pub fn kron(&self, b: &Self, z: &N) -> Self {
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        let mut out = Self::filled(rows, cols, z);
        for (r1, c1, v1) in self.nonzeros() {
            for (r2, c2, v2) in b.nonzeros() {
                out.data[(r1 * b.rows + r2) * cols + c1 * b.cols + c2] = v1.mul(&v2);
            }
        }
        out
    }
}

/// Applies the local map `g` (`2^ko × 2^ki`) to wires `[off, off+ki)` of a
/// register with `w` wires.
fn apply_local<N: Num>(m: &Dense<N>, w: usize, g: &[(usize, usize, N)], ki: usize, ko: usize, off: usize, z: &N) -> Dense<N> {
    let lo_bits = w - off - ki;
    let hi_n = 1usize << off;
    let lo_n = 1usize << lo_bits;
    let new_rows = hi_n << (ko + lo_bits);
    let c = m.cols;
    let mut out = Dense::filled(new_rows, c, z);
    for hi in 0..hi_n {
        for &(r, s, ref v) in g {
            let src_base = ((hi << ki) | s) << lo_bits;
            let dst_base = ((hi << ko) | r) << lo_bits;
            for lo in 0..lo_n {
                let src = (src_base | lo) * c;
                let dst = (dst_base | lo) * c;
                for j in 0..c {
                    let x = &m.data[src + j];
                    if x.is_zero() {
                        continue;
                    }
                    let cell = &mut out.data[dst + j];
                    *cell = cell.add(&v.mul(x));
                }
            }
        }
    }
    out
}

pub(crate) struct Engine<C: Ctx> {
    ctx: C,
    cap: usize,
    memo: HashMap<usize, Vec<(usize, usize, C::N)>>,
    gens: HashMap<String, Vec<(usize, usize, C::N)>>,
}

impl<C: Ctx> Engine<C> {
    pub fn new(ctx: C, cap: usize) -> Self {
        Engine { ctx, cap, memo: HashMap::new(), gens: HashMap::new() }
    }

    pub fn run(&mut self, t: &Term) -> Result<Dense<C::N>, InterpError> {
        let n = t.inputs();
        if n > self.cap || t.outputs() > self.cap {
            return Err(InterpError::WidthCap { width: n.max(t.outputs()), cap: self.cap });
        }
        let z = self.ctx.zero();
        let start = Dense::identity(1 << n, &z, &self.ctx.one());
        self.apply(t, start, n, 0)
    }

    fn apply(&mut self, t: &Term, m: Dense<C::N>, w: usize, off: usize) -> Result<Dense<C::N>, InterpError> {
        let new_w = w - t.inputs() + t.outputs();
        if new_w > self.cap {
            return Err(InterpError::WidthCap { width: new_w, cap: self.cap });
        }
        match t.kind() {
            TermKind::Gen(Generator::Id) | TermKind::Gen(Generator::Empty) => Ok(m),
            TermKind::Gen(g) => {
                let local = self.generator(g)?;
                let (ki, ko) = g.arity();
                Ok(apply_local(&m, w, &local, ki, ko, off, &self.ctx.zero()))
            }
            TermKind::Tensor(a, b) => {
                let m = self.apply(a, m, w, off)?;
                let w1 = w - a.inputs() + a.outputs();
                self.apply(b, m, w1, off + a.outputs())
            }
            TermKind::Compose(a, b) => {
                if t.inputs() <= 2 && w > t.inputs() {
                    let local = self.isolated(t)?;
                    return Ok(apply_local(&m, w, &local, t.inputs(), t.outputs(), off, &self.ctx.zero()));
                }
                let m = self.apply(a, m, w, off)?;
                let w1 = w - a.inputs() + a.outputs();
                self.apply(b, m, w1, off)
            }
        }
    }

    fn isolated(&mut self, t: &Term) -> Result<Vec<(usize, usize, C::N)>, InterpError> {
        if let Some(v) = self.memo.get(&t.ptr_id()) {
            return Ok(v.clone());
        }
        let n = t.inputs();
        let z = self.ctx.zero();
        let start = Dense::identity(1 << n, &z, &self.ctx.one());
        let m = match t.kind() {
            TermKind::Compose(a, b) => {
                let m = self.apply(a, start, n, 0)?;
                self.apply(b, m, a.outputs(), 0)?
            }
            _ => self.apply(t, start, n, 0)?,
        };
        let nz = m.nonzeros();
        self.memo.insert(t.ptr_id(), nz.clone());
        Ok(nz)
    }

    fn generator(&mut self, g: &Generator) -> Result<Vec<(usize, usize, C::N)>, InterpError> {
        let key = format!("{g:?}");
        if let Some(v) = self.gens.get(&key) {
            return Ok(v.clone());
        }
        let d = self.generator_dense(g)?;
        let nz = d.nonzeros();
        self.gens.insert(key, nz.clone());
        Ok(nz)
    }

    pub fn generator_dense(&self, g: &Generator) -> Result<Dense<C::N>, InterpError> {
        let z = self.ctx.zero();
        let one = self.ctx.one();
        Ok(match *g {
            Generator::Z { inputs, outputs, ref phase } => {
                let (r, c) = (1usize << outputs, 1usize << inputs);
                let mut d = Dense::filled(r, c, &z);
                let e = self.ctx.phase(phase)?;
                d.data[0] = d.data[0].add(&one);
                let last = (r - 1) * c + (c - 1);
                d.data[last] = d.data[last].add(&e);
                d
            }
            Generator::X { inputs, outputs, ref phase } => {
                // H^{⊗m} · Z · H^{⊗n}.
                let zd = self.generator_dense(&Generator::Z { inputs, outputs, phase: *phase })?;
                let h = self.generator_dense(&Generator::H)?.nonzeros();
                let mut d = zd;
                for k in 0..outputs {
                    d = apply_local(&d, outputs, &h, 1, 1, k, &z);
                }
                let mut t = d.transpose();
                for k in 0..inputs {
                    t = apply_local(&t, inputs, &h, 1, 1, k, &z);
                }
                t.transpose()
            }
            Generator::H => {
                let s = self.ctx.sqrt2_inv();
                Dense { rows: 2, cols: 2, data: vec![s.clone(), s.clone(), s.clone(), self.ctx.neg(&s)] }
            }
            Generator::Id => Dense::identity(2, &z, &one),
            Generator::Empty => Dense::identity(1, &z, &one),
            Generator::Swap => {
                let mut d = Dense::filled(4, 4, &z);
                for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                    d.data[r * 4 + c] = one.clone();
                }
                d
            }
            Generator::Cup => Dense { rows: 1, cols: 4, data: vec![one.clone(), z.clone(), z.clone(), one.clone()] },
            Generator::Cap => Dense { rows: 4, cols: 1, data: vec![one.clone(), z.clone(), z.clone(), one.clone()] },
        })
    }
}

// ---------------------------------------------------------------------------
// Public matrix type

#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Exact { order: u64, m: Dense<DyadicCyclotomic> },
    Float(Dense<Complex64>),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Exact { m, .. } => m.rows,
            Matrix::Float(m) => m.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Exact { m, .. } => m.cols,
            Matrix::Float(m) => m.cols,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Matrix::Exact { order, .. } => Backend::Exact { order: *order },
            Matrix::Float(_) => Backend::Float,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self {
            Matrix::Exact { m, .. } => Scalar::Exact(m.data[r * m.cols + c].clone()),
            Matrix::Float(m) => Scalar::Float(m.data[r * m.cols + c]),
        }
    }

    pub fn exact_entries(&self) -> Option<&[DyadicCyclotomic]> {
        match self {
            Matrix::Exact { m, .. } => Some(&m.data),
            Matrix::Float(_) => None,
        }
    }

    pub fn from_exact(rows: usize, cols: usize, order: u64, data: Vec<DyadicCyclotomic>) -> Result<Matrix, InterpError> {
        check_shape(rows, cols, data.len())?;
        if data.iter().any(|d| d.order() != order) {
            return Err(InterpError::Shape("entries of mixed order".into()));
        }
        Ok(Matrix::Exact { order, m: Dense { rows, cols, data } })
    }

    pub fn from_float(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Matrix, InterpError> {
        check_shape(rows, cols, data.len())?;
        Ok(Matrix::Float(Dense { rows, cols, data }))
    }

    pub fn identity(dim: usize, backend: Backend) -> Matrix {
        match backend {
            Backend::Exact { order } => Matrix::Exact {
                order,
                m: Dense::identity(dim, &DyadicCyclotomic::zero(order), &DyadicCyclotomic::one(order)),
            },
            Backend::Float => Matrix::Float(Dense::identity(dim, &Complex64::new(0.0, 0.0), &Complex64::new(1.0, 0.0))),
        }
    }

    pub fn to_float(&self) -> Matrix {
        match self {
            Matrix::Exact { m, .. } => Matrix::Float(Dense {
                rows: m.rows,
                cols: m.cols,
                data: m.data.iter().map(|d| d.eval_complex()).collect(),
            }),
            Matrix::Float(_) => self.clone(),
        }
    }

    pub fn embed(&self, new_order: u64) -> Result<Matrix, InterpError> {
        match self {
            Matrix::Exact { m, .. } => {
                let data = m
                    .data
                    .iter()
                    .map(|d| d.embed_order(new_order))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| InterpError::Shape(e.to_string()))?;
                Ok(Matrix::Exact { order: new_order, m: Dense { rows: m.rows, cols: m.cols, data } })
            }
            Matrix::Float(_) => Err(InterpError::Shape("cannot embed a float matrix".into())),
        }
    }

    fn joined(a: &Matrix, b: &Matrix) -> Result<(Matrix, Matrix), InterpError> {
        use num_integer::Integer;
        match (a, b) {
            (Matrix::Exact { order: x, .. }, Matrix::Exact { order: y, .. }) => {
                let l = x.lcm(y);
                Ok((a.embed(l)?, b.embed(l)?))
            }
            _ => Ok((a.to_float(), b.to_float())),
        }
    }

    /// `a · b`.
    pub fn mul(&self, b: &Matrix) -> Result<Matrix, InterpError> {
        if self.cols() != b.rows() {
            return Err(InterpError::Shape(format!("{}x{} times {}x{}", self.rows(), self.cols(), b.rows(), b.cols())));
        }
        Ok(match Matrix::joined(self, b)? {
            (Matrix::Exact { order, m: x }, Matrix::Exact { m: y, .. }) => {
                Matrix::Exact { order, m: x.matmul(&y, &DyadicCyclotomic::zero(order)) }
            }
            (Matrix::Float(x), Matrix::Float(y)) => Matrix::Float(x.matmul(&y, &Complex64::new(0.0, 0.0))),
            _ => unreachable!(),
        })
    }

    pub fn kron(&self, b: &Matrix) -> Result<Matrix, InterpError> {
        Ok(match Matrix::joined(self, b)? {
            (Matrix::Exact { order, m: x }, Matrix::Exact { m: y, .. }) => {
                Matrix::Exact { order, m: x.kron(&y, &DyadicCyclotomic::zero(order)) }
            }
            (Matrix::Float(x), Matrix::Float(y)) => Matrix::Float(x.kron(&y, &Complex64::new(0.0, 0.0))),
            _ => unreachable!(),
        })
    }

    pub fn scale(&self, s: &Scalar) -> Result<Matrix, InterpError> {
        let one = match s {
            Scalar::Exact(d) => Matrix::from_exact(1, 1, d.order(), vec![d.clone()])?,
            Scalar::Float(c) => Matrix::from_float(1, 1, vec![*c])?,
        };
        one.kron(self)
    }

    /// Exact comparison when both sides are exact (tolerance ignored), else
    /// entrywise `|Δ| ≤ tol·(1 + max|entry|)`.
    pub fn equal(&self, b: &Matrix, tol: f64) -> bool {
        if self.rows() != b.rows() || self.cols() != b.cols() {
            return false;
        }
        match Matrix::joined(self, b) {
            Ok((Matrix::Exact { m: x, .. }, Matrix::Exact { m: y, .. })) => x.data == y.data,
            Ok((Matrix::Float(x), Matrix::Float(y))) => {
                let scale = x.data.iter().chain(&y.data).map(|c| c.norm()).fold(0.0, f64::max);
                x.data.iter().zip(&y.data).all(|(p, q)| (p - q).norm() <= tol * (1.0 + scale))
            }
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Matrix::Exact { m, .. } => m.data.iter().all(|d| d.is_zero()),
            Matrix::Float(m) => m.data.iter().all(|c| c.norm() == 0.0),
        }
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows()).map(|r| self.get(r, c)).collect()
    }

    pub fn to_json(&self) -> Value {
        let (backend, entries): (&str, Vec<Value>) = match self {
            Matrix::Exact { m, .. } => ("exact", m.data.iter().map(|d| d.to_json()).collect()),
            Matrix::Float(m) => ("float", m.data.iter().map(|c| json!({"re": c.re, "im": c.im})).collect()),
        };
        json!({"rows": self.rows(), "cols": self.cols(), "backend": backend, "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Matrix, InterpError> {
        let p = |m: &str| InterpError::Parse(m.to_string());
        let rows = v.get("rows").and_then(Value::as_u64).ok_or_else(|| p("missing `rows`"))? as usize;
        let cols = v.get("cols").and_then(Value::as_u64).ok_or_else(|| p("missing `cols`"))? as usize;
        let backend = v.get("backend").and_then(Value::as_str).unwrap_or("exact");
        let entries = v.get("entries").and_then(Value::as_array).ok_or_else(|| p("missing `entries`"))?;
        let scalars = entries
            .iter()
            .enumerate()
            .map(|(i, e)| Scalar::from_json(e).map_err(|m| InterpError::Parse(format!("entries[{i}]: {m}"))))
            .collect::<Result<Vec<_>, _>>()?;
        match backend {
            "exact" => {
                let mut ds = Vec::with_capacity(scalars.len());
                for s in scalars {
                    match s {
                        Scalar::Exact(d) => ds.push(d),
                        Scalar::Float(_) => return Err(p("float entry in an exact matrix")),
                    }
                }
                let order = ds.iter().map(|d| d.order()).fold(8, num_integer::lcm);
                let ds = ds
                    .into_iter()
                    .map(|d| d.embed_order(order))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| InterpError::Parse(e.to_string()))?;
                Matrix::from_exact(rows, cols, order, ds)
            }
            "float" => Matrix::from_float(rows, cols, scalars.iter().map(Scalar::to_complex).collect()),
            other => Err(p(&format!("unknown backend `{other}`"))),
        }
    }
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<(), InterpError> {
    if !rows.is_power_of_two() || !cols.is_power_of_two() {
        return Err(InterpError::Shape(format!("{rows}x{cols} is not a power-of-two shape")));
    }
    if rows * cols != len {
        return Err(InterpError::Shape(format!("{rows}x{cols} needs {} entries, got {len}", rows * cols)));
    }
    Ok(())
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Entry points

pub fn interp(t: &Term, backend: Backend) -> Result<Matrix, InterpError> {
    interp_with_cap(t, backend, DEFAULT_MAX_QUBITS)
}

pub fn interp_with_cap(t: &Term, backend: Backend, cap: usize) -> Result<Matrix, InterpError> {
    match backend {
        Backend::Exact { order } => {
            if order == 0 || order % 8 != 0 {
                return Err(InterpError::Backend(format!("order {order}"), order));
            }
            let m = Engine::new(ExactCtx(order), cap).run(t)?;
            Ok(Matrix::Exact { order, m })
        }
        Backend::Float => Ok(Matrix::Float(Engine::new(FloatCtx, cap).run(t)?)),
    }
}

/// Exact interpretation at the term's own fragment.
pub fn interp_exact(t: &Term) -> Result<Matrix, InterpError> {
    match fragment_of(t) {
        Fragment::Unrestricted => Err(InterpError::Backend("real angle".into(), 0)),
        f => interp(t, Backend::Exact { order: f.order().unwrap() }),
    }
}

pub fn interp_float(t: &Term) -> Result<Matrix, InterpError> {
    interp(t, Backend::Float)
}

/// Choi state of a matrix: coefficient of `|x y⟩` is `M[y][x]`.
pub fn choi_of(m: &Matrix) -> Matrix {
    let (rows, cols) = (m.rows(), m.cols());
    let idx = |k: usize| {
        let (x, y) = (k / rows, k % rows);
        y * cols + x
    };
    match m {
        Matrix::Exact { order, m: d } => Matrix::Exact {
            order: *order,
            m: Dense { rows: rows * cols, cols: 1, data: (0..rows * cols).map(|k| d.data[idx(k)].clone()).collect() },
        },
        Matrix::Float(d) => Matrix::Float(Dense { rows: rows * cols, cols: 1, data: (0..rows * cols).map(|k| d.data[idx(k)]).collect() }),
    }
}

/// Inverse of [`choi_of`]: reshape a `2^{n+m}` vector into a `2^m × 2^n` map.
pub fn unchoi(v: &Matrix, inputs: usize) -> Matrix {
    let total = v.rows();
    let cols = 1usize << inputs;
    let rows = total / cols;
    let idx = |r: usize, c: usize| c * rows + r;
    match v {
        Matrix::Exact { order, m: d } => Matrix::Exact {
            order: *order,
            m: Dense {
                rows,
                cols,
                data: (0..rows * cols).map(|k| d.data[idx(k / cols, k % cols)].clone()).collect(),
            },
        },
        Matrix::Float(d) => Matrix::Float(Dense {
            rows,
            cols,
            data: (0..rows * cols).map(|k| d.data[idx(k / cols, k % cols)]).collect(),
        }),
    }
}

pub fn choi(t: &Term, backend: Backend) -> Result<Matrix, InterpError> {
    Ok(choi_of(&interp(t, backend)?))
}
