//! Controlled normal forms: coefficient trees, their rendering as
//! controlled states, and normalization by exact interpretation.

use std::collections::HashMap;

use num_complex::Complex64;
use num_integer::Integer;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cyclotomic::DyadicCyclotomic;
use crate::diagram::circuit::Circuit;
use crate::diagram::{Term, Angle};
use crate::gadgets::{self, GadgetError};
use crate::interp::{self, choi_of, interp_with_cap, Backend, Dense, InterpError, Matrix, Num, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("normal form parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

// ---------------------------------------------------------------------------
// Trees

#[derive(Clone, Debug, PartialEq)]
pub enum CnfTree {
    Leaf(Scalar),
    Node(Box<CnfTree>, Box<CnfTree>),
}

impl CnfTree {
    pub fn depth(&self) -> usize {
        match self {
            CnfTree::Leaf(_) => 0,
            CnfTree::Node(a, _) => 1 + a.depth(),
        }
    }

    /// Leaves in bitstring order, most significant index first.
    pub fn leaves(&self) -> Vec<Scalar> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Scalar>) {
        match self {
            CnfTree::Leaf(s) => out.push(s.clone()),
            CnfTree::Node(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    fn key(&self) -> String {
        self.leaves().iter().map(|s| s.to_json().to_string()).collect::<Vec<_>>().join(";")
    }
}

/// `Λ`: the tree whose rendering encodes `psi`.
pub fn lambda_state(psi: &[Scalar]) -> Result<CnfTree, NfError> {
    if psi.is_empty() || !psi.len().is_power_of_two() {
        return Err(NfError::Shape(format!("state of length {} is not a power of two", psi.len())));
    }
    let exact = matches!(psi[0], Scalar::Exact(_));
    if psi.iter().any(|s| matches!(s, Scalar::Exact(_)) != exact) {
        return Err(NfError::Shape("mixed exact and float leaves".into()));
    }
    if let Scalar::Exact(d) = &psi[0] {
        if psi.iter().any(|s| matches!(s, Scalar::Exact(e) if e.order() != d.order())) {
            return Err(NfError::Shape("leaves of mixed order".into()));
        }
    }
    Ok(build(psi))
}

fn build(psi: &[Scalar]) -> CnfTree {
    if psi.len() == 1 {
        return CnfTree::Leaf(psi[0].clone());
    }
    let (a, b) = psi.split_at(psi.len() / 2);
    CnfTree::Node(Box::new(build(a)), Box::new(build(b)))
}

/// A 1→depth controlled state encoding the leaf vector.
pub fn render(tree: &CnfTree) -> Result<Term, NfError> {
    render_cached(tree, &mut HashMap::new())
}

fn render_cached(tree: &CnfTree, cache: &mut HashMap<String, Term>) -> Result<Term, NfError> {
    let key = tree.key();
    if let Some(t) = cache.get(&key) {
        return Ok(t.clone());
    }
    let t = match tree {
        CnfTree::Leaf(Scalar::Exact(d)) => gadgets::lambda_of(d)?.term().clone(),
        CnfTree::Leaf(Scalar::Float(x)) => gadgets::lambda_real(*x)?.term().clone(),
        CnfTree::Node(a, b) => {
            let d0 = render_cached(a, cache)?;
            let d1 = render_cached(b, cache)?;
            concat(&d0, &d1)
        }
    };
    cache.insert(key, t.clone());
    Ok(t)
}

/// Control `c`, fresh index `b`: `D₀` is driven by `c ∧ ¬b`, `D₁` by
/// `c ∧ b`, and their outputs are merged pairwise.
fn concat(d0: &Term, d1: &Term) -> Term {
    let zero = Angle::zero();
    let n = d0.outputs();
    let mut c = Circuit::new(1);
    let cs = c.apply(&Term::z(1, 2, zero), &[c.input(0)]);
    let bs = c.apply(&Term::z(0, 3, zero), &[]);
    let ctrl0 = c.apply1(&gadgets::transistor(), &[bs[1], cs[0]]);
    let ctrl1 = c.apply1(&gadgets::and_gate(), &[bs[2], cs[1]]);
    let o0 = c.apply(d0, &[ctrl0]);
    let o1 = c.apply(d1, &[ctrl1]);
    let mut outs = vec![bs[0]];
    for i in 0..n {
        outs.push(c.apply1(&Term::z(2, 1, zero), &[o0[i], o1[i]]));
    }
    c.finish(&outs)
}

// ---------------------------------------------------------------------------
// Normal forms of maps

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub inputs: usize,
    pub outputs: usize,
    pub tree: CnfTree,
}

impl NormalForm {
    /// Leaves as a column, Choi order (input bits first).
    pub fn state(&self) -> Matrix {
        let leaves = self.tree.leaves();
        match &leaves[0] {
            Scalar::Exact(d) => {
                let order = d.order();
                let data = leaves
                    .into_iter()
                    .map(|s| match s {
                        Scalar::Exact(d) => d,
                        Scalar::Float(_) => unreachable!("trees are backend-uniform"),
                    })
                    .collect::<Vec<_>>();
                Matrix::from_exact(data.len(), 1, order, data).expect("power-of-two leaves")
            }
            Scalar::Float(_) => {
                let data: Vec<Complex64> = leaves.iter().map(Scalar::to_complex).collect();
                Matrix::from_float(data.len(), 1, data).expect("power-of-two leaves")
            }
        }
    }

    pub fn from_state(inputs: usize, outputs: usize, v: &Matrix) -> Result<NormalForm, NfError> {
        if v.cols() != 1 || v.rows() != 1 << (inputs + outputs) {
            return Err(NfError::Shape(format!("{}x{} state for {inputs}→{outputs}", v.rows(), v.cols())));
        }
        Ok(NormalForm { inputs, outputs, tree: lambda_state(&v.column(0))? })
    }

    /// The matrix the normal form denotes.
    pub fn matrix(&self) -> Matrix {
        interp::unchoi(&self.state(), self.inputs)
    }

    pub fn backend(&self) -> Backend {
        self.state().backend()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "inputs": self.inputs,
            "outputs": self.outputs,
            "leaves": self.tree.leaves().iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<NormalForm, NfError> {
        let p = |m: &str| NfError::Parse(m.to_string());
        let inputs = v.get("inputs").and_then(Value::as_u64).ok_or_else(|| p("missing `inputs`"))? as usize;
        let outputs = v.get("outputs").and_then(Value::as_u64).ok_or_else(|| p("missing `outputs`"))? as usize;
        let leaves = v.get("leaves").and_then(Value::as_array).ok_or_else(|| p("missing `leaves`"))?;
        if inputs + outputs > 30 || leaves.len() != 1 << (inputs + outputs) {
            return Err(p(&format!("{} leaves for {inputs}→{outputs}", leaves.len())));
        }
        let scalars = leaves
            .iter()
            .enumerate()
            .map(|(i, s)| Scalar::from_json(s).map_err(|m| NfError::Parse(format!("leaves[{i}]: {m}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let scalars = if scalars.iter().all(|s| matches!(s, Scalar::Exact(_))) {
            let order = scalars.iter().fold(8u64, |o, s| match s {
                Scalar::Exact(d) => o.lcm(&d.order()),
                _ => o,
            });
            scalars
                .into_iter()
                .map(|s| match s {
                    Scalar::Exact(d) => d.embed_order(order).map(Scalar::Exact).map_err(|e| NfError::Parse(e.to_string())),
                    _ => unreachable!(),
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            scalars.iter().map(|s| Scalar::Float(s.to_complex())).collect()
        };
        Ok(NormalForm { inputs, outputs, tree: lambda_state(&scalars)? })
    }
}

/// `λ`: the normal form of a matrix.
pub fn lambda_map(m: &Matrix) -> Result<NormalForm, NfError> {
    if !m.rows().is_power_of_two() || !m.cols().is_power_of_two() {
        return Err(NfError::Shape(format!("{}x{}", m.rows(), m.cols())));
    }
    let inputs = m.cols().trailing_zeros() as usize;
    let outputs = m.rows().trailing_zeros() as usize;
    NormalForm::from_state(inputs, outputs, &choi_of(m))
}

/// The normal-form diagram: the controlled state plugged with `|1⟩`, its
/// first `inputs` outputs bent back into inputs.
pub fn render_nf(nf: &NormalForm) -> Result<Term, NfError> {
    let state = gadgets::ket1().then(&render(&nf.tree)?);
    let mut c = Circuit::new(nf.inputs);
    let s = c.apply(&state, &[]);
    for i in 0..nf.inputs {
        c.apply(&Term::cup(), &[c.input(i), s[i]]);
    }
    Ok(c.finish(&s[nf.inputs..]))
}

pub fn normalize(d: &Term) -> Result<NormalForm, NfError> {
    normalize_with(d, Backend::for_term(d), interp::DEFAULT_MAX_QUBITS)
}

pub fn normalize_with(d: &Term, backend: Backend, cap: usize) -> Result<NormalForm, NfError> {
    lambda_map(&interp_with_cap(d, backend, cap)?)
}

/// Common backend for two terms: exact at the joined order when both are
/// rational, float otherwise.
pub fn common_backend(a: &Term, b: &Term) -> Backend {
    match (Backend::for_term(a), Backend::for_term(b)) {
        (Backend::Exact { order: x }, Backend::Exact { order: y }) => Backend::Exact { order: x.lcm(&y) },
        _ => Backend::Float,
    }
}

pub fn equal(d1: &Term, d2: &Term) -> Result<bool, NfError> {
    equal_with(d1, d2, common_backend(d1, d2), 1e-9, interp::DEFAULT_MAX_QUBITS)
}

/// Structural comparison of normal forms when exact, matrix comparison
/// within `tol` when float.
pub fn equal_with(d1: &Term, d2: &Term, backend: Backend, tol: f64, cap: usize) -> Result<bool, NfError> {
    if d1.inputs() != d2.inputs() || d1.outputs() != d2.outputs() {
        return Err(NfError::Arity(format!(
            "{}→{} vs {}→{}",
            d1.inputs(),
            d1.outputs(),
            d2.inputs(),
            d2.outputs()
        )));
    }
    let a = normalize_with(d1, backend, cap)?;
    let b = normalize_with(d2, backend, cap)?;
    Ok(match backend {
        Backend::Exact { .. } => a == b,
        Backend::Float => a.matrix().equal(&b.matrix(), tol),
    })
}

// ---------------------------------------------------------------------------
// Operations on leaf vectors

fn bit(i: usize, p: usize, k: usize) -> usize {
    (i >> (k - 1 - p)) & 1
}

/// Splits `i` (of `k` bits) at the given positions.
fn bits(i: usize, k: usize) -> Vec<usize> {
    (0..k).map(|p| bit(i, p, k)).collect()
}

fn join(bs: &[usize]) -> usize {
    bs.iter().fold(0, |a, &b| (a << 1) | b)
}

fn gather<N: Num>(src: &[N], len: usize, zero: &N, f: &dyn Fn(usize) -> Vec<usize>) -> Vec<N> {
    (0..len)
        .map(|j| f(j).iter().fold(zero.clone(), |acc, &i| acc.add(&src[i])))
        .collect()
}

/// `new[j] = Σ_{i ∈ f(j)} old[i]`.
fn reindex(v: &Matrix, bits_out: usize, f: &dyn Fn(usize) -> Vec<usize>) -> Matrix {
    let len = 1 << bits_out;
    match v {
        Matrix::Exact { order, m } => Matrix::Exact {
            order: *order,
            m: Dense { rows: len, cols: 1, data: gather(&m.data, len, &DyadicCyclotomic::zero(*order), f) },
        },
        Matrix::Float(m) => Matrix::Float(Dense {
            rows: len,
            cols: 1,
            data: gather(&m.data, len, &Complex64::new(0.0, 0.0), f),
        }),
    }
}

fn aligned(a: &NormalForm, b: &NormalForm) -> Result<(Matrix, Matrix), NfError> {
    let (x, y) = (a.state(), b.state());
    Ok(match (x.backend(), y.backend()) {
        (Backend::Exact { order: p }, Backend::Exact { order: q }) => {
            let l = p.lcm(&q);
            (x.embed(l)?, y.embed(l)?)
        }
        _ => (x.to_float(), y.to_float()),
    })
}

/// Tensor product; leaves are pairwise products.
pub fn nf_tensor(a: &NormalForm, b: &NormalForm) -> Result<NormalForm, NfError> {
    let (x, y) = aligned(a, b)?;
    let (na, ma, nb, mb) = (a.inputs, a.outputs, b.inputs, b.outputs);
    let k = na + ma + nb + mb;
    let split = |j: usize| {
        let bs = bits(j, k);
        let ia = join(&[&bs[..na], &bs[na + nb..na + nb + ma]].concat());
        let ib = join(&[&bs[na..na + nb], &bs[na + nb + ma..]].concat());
        (ia, ib)
    };
    let v = match (&x, &y) {
        (Matrix::Exact { order, m: p }, Matrix::Exact { m: q, .. }) => Matrix::Exact {
            order: *order,
            m: Dense {
                rows: 1 << k,
                cols: 1,
                data: (0..1 << k).map(|j| {
                    let (i, l) = split(j);
                    Num::mul(&p.data[i], &q.data[l])
                }).collect(),
            },
        },
        (Matrix::Float(p), Matrix::Float(q)) => Matrix::Float(Dense {
            rows: 1 << k,
            cols: 1,
            data: (0..1 << k).map(|j| {
                let (i, l) = split(j);
                p.data[i] * q.data[l]
            }).collect(),
        }),
        _ => unreachable!(),
    };
    NormalForm::from_state(na + nb, ma + mb, &v)
}

/// Merges state positions `p < q` into one index at position `p`.
fn merge_positions(v: &Matrix, k: usize, p: usize, q: usize) -> Matrix {
    reindex(v, k - 1, &|j| {
        let mut bs = bits(j, k - 1);
        bs.insert(q, bs[p]);
        vec![join(&bs)]
    })
}

/// Sums over state position `p`.
fn sum_position(v: &Matrix, k: usize, p: usize) -> Matrix {
    reindex(v, k - 1, &|j| {
        let bs = bits(j, k - 1);
        (0..2)
            .map(|b| {
                let mut full = bs.clone();
                full.insert(p, b);
                join(&full)
            })
            .collect()
    })
}

fn check_output(a: &NormalForm, site: usize, width: usize) -> Result<(), NfError> {
    if site + width > a.outputs {
        return Err(NfError::Index(format!("outputs {site}..{} of {}", site + width, a.outputs)));
    }
    Ok(())
}

/// Applies `Z(2,1)` to outputs `site` and `site + 1`.
pub fn nf_z21(a: &NormalForm, site: usize) -> Result<NormalForm, NfError> {
    check_output(a, site, 2)?;
    let p = a.inputs + site;
    let v = merge_positions(&a.state(), a.inputs + a.outputs, p, p + 1);
    NormalForm::from_state(a.inputs, a.outputs - 1, &v)
}

/// Applies `Z(1,0)` to output `site`.
pub fn nf_z10(a: &NormalForm, site: usize) -> Result<NormalForm, NfError> {
    check_output(a, site, 1)?;
    let v = sum_position(&a.state(), a.inputs + a.outputs, a.inputs + site);
    NormalForm::from_state(a.inputs, a.outputs - 1, &v)
}

/// Permutes outputs: new output `j` carries old output `sigma[j]`.
pub fn nf_permute(a: &NormalForm, sigma: &[usize]) -> Result<NormalForm, NfError> {
    let m = a.outputs;
    let mut seen = vec![false; m];
    if sigma.len() != m || sigma.iter().any(|&s| s >= m || std::mem::replace(&mut seen[s], true)) {
        return Err(NfError::Index(format!("{sigma:?} is not a permutation of {m} outputs")));
    }
    let n = a.inputs;
    let k = n + m;
    let v = reindex(&a.state(), k, &|j| {
        let bs = bits(j, k);
        let mut old = bs.clone();
        for (jj, &s) in sigma.iter().enumerate() {
            old[n + s] = bs[n + jj];
        }
        vec![join(&old)]
    });
    NormalForm::from_state(n, m, &v)
}

/// Feeds output `output` back into input `input`: the bent pair is merged
/// by a `Z(2,1)` and then discarded by a `Z(1,0)`.
pub fn nf_trace(a: &NormalForm, input: usize, output: usize) -> Result<NormalForm, NfError> {
    if input >= a.inputs || output >= a.outputs {
        return Err(NfError::Index(format!("pair ({input}, {output}) on {}→{}", a.inputs, a.outputs)));
    }
    let k = a.inputs + a.outputs;
    let v = merge_positions(&a.state(), k, input, a.inputs + output);
    let v = sum_position(&v, k - 1, input);
    NormalForm::from_state(a.inputs - 1, a.outputs - 1, &v)
}

/// Sequential composition, `a` first: tensor, then one trace per shared wire.
pub fn nf_compose(a: &NormalForm, b: &NormalForm) -> Result<NormalForm, NfError> {
    if a.outputs != b.inputs {
        return Err(NfError::Arity(format!("{} outputs into {} inputs", a.outputs, b.inputs)));
    }
    let mut t = nf_tensor(a, b)?;
    for _ in 0..a.outputs {
        t = nf_trace(&t, a.inputs, 0)?;
    }
    Ok(t)
}


#[cfg(test)]
mod width_tests {
    use super::*;
    use crate::interp::interp;

    #[test]
    fn three_by_three_round_trip_fits_the_cap() {
        let data: Vec<DyadicCyclotomic> = (0..64)
            .map(|i| DyadicCyclotomic::canonicalize(8, (i % 3) as u32, crate::gadgets::poly(&[(i % 5) - 2, (i % 7) - 3, i % 2, -(i % 3)])).unwrap())
            .collect();
        let m = Matrix::from_exact(8, 8, 8, data).unwrap();
        let nf = lambda_map(&m).unwrap();
        let t = render_nf(&nf).unwrap();
        let start = std::time::Instant::now();
        assert_eq!(interp(&t, Backend::Exact { order: 8 }).unwrap(), m);
        eprintln!("size {} in {:?}", t.size(), start.elapsed());
    }
}
