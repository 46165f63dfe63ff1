//! The axioms as graph rewrite rules, their soundness harness and the
//! meta-level operations around them.

pub mod lemmas;
pub mod meta;
pub mod pattern;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{from_graph, Angle, Fragment, OpenGraph, Term};
use crate::interp::{interp, Backend};
pub use pattern::{Choices, Expr, Match, PEnd, PKind, Side};
use pattern::{all_matches, instantiate, rewrite, same_angle, Template};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("match site is not a valid embedding: {0}")]
    Match(String),
    #[error("cancelled scalar is zero (α = π)")]
    ZeroScalar,
    #[error("equation is not of the form D ⊗ Z(0,0,α): {0}")]
    Shape(String),
    #[error("angle {0} is not exact")]
    InexactAngle(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Fills the target-side variables from the matched ones; `false` rejects.
pub type Derive = fn(&mut [Option<Angle>], Direction) -> bool;

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub colour_swapped: bool,
    pub vars: Vec<&'static str>,
    pub lhs: Side,
    pub rhs: Side,
    pub ports: usize,
    /// Minimum leg count of each group.
    pub groups: Vec<usize>,
    pub derive: Option<Derive>,
}

impl Rule {
    pub fn label(&self) -> String {
        if self.colour_swapped {
            format!("{}'", self.name)
        } else {
            self.name.clone()
        }
    }

    pub fn colour_swap(&self) -> Rule {
        Rule {
            colour_swapped: !self.colour_swapped,
            lhs: self.lhs.colour_swap(),
            rhs: self.rhs.colour_swap(),
            ..self.clone()
        }
    }

    fn sides(&self, dir: Direction) -> (&Side, &Side) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    fn template(&self, dir: Direction) -> Template<'_> {
        Template { side: self.sides(dir).0, ports: self.ports, groups: &self.groups, vars: self.vars.len() }
    }

    /// The free variables: those whose value is not derived.
    pub fn free_vars(&self) -> BTreeSet<usize> {
        if self.derive.is_some() {
            self.lhs.vars()
        } else {
            self.lhs.vars().union(&self.rhs.vars()).copied().collect()
        }
    }
}

// ---------------------------------------------------------------------------
// The rule set

fn k(a: Angle) -> Expr {
    Expr::constant(a)
}

fn v(i: usize) -> Expr {
    Expr::var(i)
}

fn zk(e: Expr) -> PKind {
    PKind::Z(e)
}

fn xk(e: Expr) -> PKind {
    PKind::X(e)
}

fn q(n: i64, d: i64) -> Angle {
    Angle::pi_frac(n, d)
}

fn zero() -> Expr {
    k(Angle::zero())
}

/// `X(0)–Z(0)`, worth `√2`.
fn sqrt2_pair(s: &mut Side) {
    let a = s.vertex(xk(zero()));
    let b = s.vertex(zk(zero()));
    s.edge(a, b);
}

fn rule(name: &str, vars: &[&'static str], ports: usize, groups: &[usize], lhs: Side, rhs: Side) -> Rule {
    Rule {
        name: name.into(),
        colour_swapped: false,
        vars: vars.to_vec(),
        lhs,
        rhs,
        ports,
        groups: groups.to_vec(),
        derive: None,
    }
}

/// `Z_a(0)` on wire (p0, p2), `Z_b(0)` on wire (p1, p3), joined through an
/// `X(0)` that carries the phase leg.
fn phase_gadget(s: &mut Side, phase: Expr) {
    let za = s.vertex(zk(zero()));
    s.port(za, 0);
    s.port(za, 2);
    let zb = s.vertex(zk(zero()));
    s.port(zb, 1);
    s.port(zb, 3);
    let x = s.vertex(xk(zero()));
    s.edge(x, za);
    s.edge(x, zb);
    let w = s.vertex(zk(phase));
    s.edge(x, w);
}

pub(crate) fn base_rules() -> Vec<Rule> {
    let mut out = Vec::new();

    // S1: spider fusion.
    let mut l = Side::default();
    let a = l.grouped(zk(v(0)), &[(0, None)]);
    let b = l.grouped(zk(v(1)), &[(1, None)]);
    l.edge(a, b);
    let mut r = Side::default();
    r.grouped(zk(Expr::lin(&[(0, 1), (1, 1)], Angle::zero())), &[(0, None), (1, None)]);
    out.push(rule("S1", &["alpha", "beta"], 0, &[0, 0], l, r));

    // S2: a phase-free binary spider is a wire.
    let mut l = Side::default();
    let a = l.vertex(zk(zero()));
    l.port(a, 0);
    l.port(a, 1);
    let mut r = Side::default();
    r.wire(0, 1);
    out.push(rule("S2", &[], 2, &[], l, r));

    // E: the π/4 bicoloured pair is the empty diagram.
    let mut l = Side::default();
    let a = l.vertex(zk(k(q(1, 4))));
    let b = l.vertex(xk(k(q(-1, 4))));
    l.edge(a, b);
    out.push(rule("E", &[], 0, &[], l, Side::default()));

    // B1: copying the X(0) state.
    let mut l = Side::default();
    let x = l.vertex(xk(zero()));
    let z = l.vertex(zk(zero()));
    l.edge(x, z);
    l.port(z, 0);
    l.port(z, 1);
    sqrt2_pair(&mut l);
    let mut r = Side::default();
    for p in 0..2 {
        let x = r.vertex(xk(zero()));
        r.port(x, p);
    }
    out.push(rule("B1", &[], 2, &[], l, r));

    // B2: bialgebra.
    let mut l = Side::default();
    let z = l.vertex(zk(zero()));
    l.port(z, 0);
    l.port(z, 1);
    let x = l.vertex(xk(zero()));
    l.port(x, 2);
    l.port(x, 3);
    l.edge(z, x);
    let mut r = Side::default();
    let xs: Vec<usize> = (0..2).map(|p| {
        let x = r.vertex(xk(zero()));
        r.port(x, p);
        x
    }).collect();
    let zs: Vec<usize> = (2..4).map(|p| {
        let z = r.vertex(zk(zero()));
        r.port(z, p);
        z
    }).collect();
    for &x in &xs {
        for &z in &zs {
            r.edge(x, z);
        }
    }
    sqrt2_pair(&mut r);
    out.push(rule("B2", &[], 4, &[], l, r));

    // K: π-commutation.
    let mut l = Side::default();
    let x = l.vertex(xk(k(Angle::pi())));
    l.port(x, 0);
    let z = l.grouped(zk(v(0)), &[(0, None)]);
    l.edge(x, z);
    sqrt2_pair(&mut l);
    let mut r = Side::default();
    let z = r.grouped(zk(Expr::lin(&[(0, -1)], Angle::zero())), &[(0, Some(xk(k(Angle::pi()))))]);
    r.port(z, 0);
    let sx = r.vertex(xk(k(Angle::pi())));
    let sz = r.vertex(zk(v(0)));
    r.edge(sx, sz);
    out.push(rule("K", &["alpha"], 1, &[0], l, r));

    // EU: Euler decomposition of H, scalar-free form.
    let mut l = Side::default();
    let h = l.vertex(PKind::H);
    l.port(h, 0);
    l.port(h, 1);
    let mut r = Side::default();
    let a = r.vertex(zk(k(q(1, 2))));
    r.port(a, 0);
    let b = r.vertex(xk(zero()));
    let c = r.vertex(zk(k(q(1, 2))));
    r.port(c, 1);
    let d = r.vertex(zk(k(q(-1, 2))));
    r.edge(a, b);
    r.edge(b, c);
    r.edge(b, d);
    out.push(rule("EU", &[], 2, &[], l, r));

    // H: colour change.
    let mut l = Side::default();
    l.grouped(xk(v(0)), &[(0, None)]);
    let mut r = Side::default();
    r.grouped(zk(v(0)), &[(0, Some(PKind::H))]);
    out.push(rule("H", &["alpha"], 0, &[0], l, r));

    // SUP: supplementarity.
    let mut l = Side::default();
    let x = l.vertex(xk(zero()));
    l.port(x, 0);
    let a = l.vertex(zk(v(0)));
    let b = l.vertex(zk(Expr::lin(&[(0, 1)], Angle::pi())));
    l.edge(x, a);
    l.edge(x, b);
    let s1 = l.vertex(zk(zero()));
    let s2 = l.vertex(zk(zero()));
    l.edge(s1, s2);
    let mut r = Side::default();
    let x = r.vertex(xk(zero()));
    r.port(x, 0);
    r.vertex(zk(Expr::lin(&[(0, 2)], Angle::pi())));
    out.push(rule("SUP", &["alpha"], 1, &[], l, r));

    // C: a phase conjugated by CNOTs is a phase gadget.
    let mut l = Side::default();
    let c1 = l.vertex(zk(zero()));
    l.port(c1, 0);
    let t1 = l.vertex(xk(zero()));
    l.port(t1, 1);
    l.edge(c1, t1);
    let z = l.vertex(zk(v(0)));
    l.edge(t1, z);
    let c2 = l.vertex(zk(zero()));
    l.port(c2, 2);
    l.edge(c1, c2);
    let t2 = l.vertex(xk(zero()));
    l.port(t2, 3);
    l.edge(c2, t2);
    l.edge(z, t2);
    sqrt2_pair(&mut l);
    let mut r = Side::default();
    phase_gadget(&mut r, v(0));
    out.push(rule("C", &["alpha"], 4, &[], l, r));

    // BW: two phase gadgets on the same wires add up.
    let mut l = Side::default();
    let za1 = l.vertex(zk(zero()));
    l.port(za1, 0);
    let za2 = l.vertex(zk(zero()));
    l.port(za2, 2);
    l.edge(za1, za2);
    let zb1 = l.vertex(zk(zero()));
    l.port(zb1, 1);
    let zb2 = l.vertex(zk(zero()));
    l.port(zb2, 3);
    l.edge(zb1, zb2);
    for (za, zb, var) in [(za1, zb1, 0), (za2, zb2, 1)] {
        let x = l.vertex(xk(zero()));
        l.edge(x, za);
        l.edge(x, zb);
        let w = l.vertex(zk(v(var)));
        l.edge(x, w);
    }
    sqrt2_pair(&mut l);
    let mut r = Side::default();
    phase_gadget(&mut r, Expr::lin(&[(0, 1), (1, 1)], Angle::zero()));
    out.push(rule("BW", &["alpha", "beta"], 4, &[], l, r));

    // A: exchange of Euler angles.
    let mut l = Side::default();
    let chain: Vec<usize> = (0..3)
        .map(|i| l.vertex(if i == 1 { xk(v(i)) } else { zk(v(i)) }))
        .collect();
    l.port(chain[0], 0);
    l.edge(chain[0], chain[1]);
    l.edge(chain[1], chain[2]);
    l.port(chain[2], 1);
    sqrt2_pair(&mut l);
    let mut r = Side::default();
    let chain: Vec<usize> = (0..3)
        .map(|i| r.vertex(if i == 1 { zk(v(3 + i)) } else { xk(v(3 + i)) }))
        .collect();
    r.port(chain[0], 0);
    r.edge(chain[0], chain[1]);
    r.edge(chain[1], chain[2]);
    r.port(chain[2], 1);
    let sx = r.vertex(xk(k(Angle::pi())));
    let sz = r.vertex(zk(v(6)));
    r.edge(sx, sz);
    let mut a = rule("A", &["a1", "a2", "a3", "b1", "b2", "b3", "delta"], 2, &[], l, r);
    a.derive = Some(euler_exchange);
    out.push(a);

    out
}

/// Rules whose colour swap is the same rule read backwards.
const SELF_SYMMETRIC: &[&str] = &["H"];

/// The axioms and their colour-swapped variants. Upside-down flips coincide
/// with the originals on undirected templates.
pub fn builtin_rules() -> Vec<Rule> {
    let base = base_rules();
    let mut out = base.clone();
    out.extend(base.iter().filter(|r| !SELF_SYMMETRIC.contains(&r.name.as_str())).map(Rule::colour_swap));
    out
}

pub fn rule_by_label(label: &str) -> Option<Rule> {
    builtin_rules().into_iter().find(|r| r.label() == label)
}

// ---------------------------------------------------------------------------
// Euler-angle exchange

type M2 = [[Complex64; 2]; 2];

fn mm(a: &M2, b: &M2) -> M2 {
    let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn zm(a: f64) -> M2 {
    let z = Complex64::new(0.0, 0.0);
    [[Complex64::new(1.0, 0.0), z], [z, Complex64::from_polar(1.0, a)]]
}

fn hm() -> M2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

fn xm(a: f64) -> M2 {
    mm(&hm(), &mm(&zm(a), &hm()))
}

/// `(a, b, c)` with `w ∝ Z(c)·X(b)·Z(a)`.
fn zxz_angles(w: &M2) -> (f64, f64, f64) {
    let (n00, n01) = (w[0][0].norm(), w[0][1].norm());
    let b = 2.0 * n01.atan2(n00);
    if n01 < 1e-12 {
        ((w[1][1] / w[0][0]).arg(), 0.0, 0.0)
    } else if n00 < 1e-12 {
        ((w[0][1] / w[1][0]).arg(), PI, 0.0)
    } else {
        let a = (w[0][1] / w[0][0]).arg() + PI / 2.0;
        let c = (w[1][0] / w[0][0]).arg() + PI / 2.0;
        (a, b, c)
    }
}

fn ratio(u: &M2, v: &M2) -> f64 {
    let (mut best, mut arg) = (0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            if v[i][j].norm() > best {
                best = v[i][j].norm();
                arg = (u[i][j] / v[i][j]).arg();
            }
        }
    }
    arg
}

fn rad(a: &Option<Angle>) -> f64 {
    a.map(|x| x.radians()).unwrap_or(0.0)
}

/// Snaps to `kπ/d` for small `d`, else keeps the float.
pub(crate) fn snap(r: f64) -> Angle {
    for d in [1i64, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64] {
        let k = r * d as f64 / PI;
        if (k - k.round()).abs() < 1e-9 {
            return Angle::pi_frac(k.round() as i64, d);
        }
    }
    Angle::real(r)
}

/// Variables: `a1 a2 a3` (ZXZ side), `b1 b2 b3` (XZX side), `delta`.
fn euler_exchange(vals: &mut [Option<Angle>], dir: Direction) -> bool {
    match dir {
        Direction::Forward => {
            let u = mm(&zm(rad(&vals[2])), &mm(&xm(rad(&vals[1])), &zm(rad(&vals[0]))));
            let (b1, b2, b3) = zxz_angles(&mm(&hm(), &mm(&u, &hm())));
            let w = mm(&xm(b3), &mm(&zm(b2), &xm(b1)));
            vals[3] = Some(snap(b1));
            vals[4] = Some(snap(b2));
            vals[5] = Some(snap(b3));
            vals[6] = Some(snap(ratio(&u, &w)));
            true
        }
        Direction::Backward => {
            let w = mm(&xm(rad(&vals[5])), &mm(&zm(rad(&vals[4])), &xm(rad(&vals[3]))));
            let (a1, a2, a3) = zxz_angles(&w);
            let u = mm(&zm(a3), &mm(&xm(a2), &zm(a1)));
            let delta = ratio(&u, &w);
            if !Angle::real(delta).approx_eq(&vals[6].unwrap_or(Angle::zero())) {
                return false;
            }
            vals[0] = Some(snap(a1));
            vals[1] = Some(snap(a2));
            vals[2] = Some(snap(a3));
            true
        }
    }
}

// ---------------------------------------------------------------------------
// Matching and application

pub fn find_matches(g: &OpenGraph, r: &Rule, dir: Direction) -> Vec<Match> {
    find_matches_with(g, r, dir, &Choices::default())
}

const MATCH_LIMIT: usize = 10_000;

/// All embeddings of the directed side, one per matched vertex set, with
/// every variable of both sides bound.
pub fn find_matches_with(g: &OpenGraph, r: &Rule, dir: Direction, choices: &Choices) -> Vec<Match> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mut m in all_matches(&r.template(dir), g, choices, MATCH_LIMIT) {
        let key = (m.site(), m.wires.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>());
        if !seen.insert(key) {
            continue;
        }
        if let Some(d) = r.derive {
            if !d(&mut m.angles, dir) {
                continue;
            }
        }
        for (i, a) in m.angles.iter_mut().enumerate() {
            if a.is_none() {
                *a = Some(choices.angles.get(&i).copied().unwrap_or(Angle::zero()));
            }
        }
        out.push(m);
    }
    out
}

/// Rewrites one matched site.
pub fn apply_rule(g: &OpenGraph, r: &Rule, m: &Match, dir: Direction) -> Result<OpenGraph, RuleError> {
    let (pattern, target) = r.sides(dir);
    let err = |s: &str| RuleError::Match(s.to_string());
    if m.vertices.len() != pattern.vertices.len() || m.angles.len() != r.vars.len() {
        return Err(err("match does not fit the rule"));
    }
    for (pv, &h) in pattern.vertices.iter().zip(&m.vertices) {
        let hk = g.kind(h).ok_or_else(|| err("matched vertex is missing"))?;
        let want = pv.kind.instantiate(&m.angles).ok_or_else(|| err("unbound variable"))?;
        let ok = match (want.phase(), hk.phase()) {
            (Some(a), Some(b)) => std::mem::discriminant(&want) == std::mem::discriminant(&hk) && same_angle(&a, &b),
            _ => std::mem::discriminant(&want) == std::mem::discriminant(&hk),
        };
        if !ok {
            return Err(err("vertex kind or phase does not match"));
        }
    }
    let found = all_matches(&r.template(dir), g, &Choices::default(), MATCH_LIMIT)
        .into_iter()
        .any(|x| x.site() == m.site() && x.wires == m.wires);
    if !found {
        return Err(err("site is not an embedding of the rule"));
    }
    let out = rewrite(g, m, target, &m.angles).ok_or_else(|| err("incomplete binding"))?;
    out.validate().map_err(|e| RuleError::Match(e.to_string()))?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Soundness

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub angles: Vec<(String, Angle)>,
    pub group_sizes: Vec<usize>,
}

impl Instance {
    pub fn to_json(&self) -> Value {
        json!({
            "angles": self.angles.iter().map(|(n, a)| json!({"var": n, "value": a.to_string()})).collect::<Vec<_>>(),
            "group_sizes": self.group_sizes,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub rule: String,
    pub fragment: Fragment,
    pub samples: usize,
    pub passed: usize,
    pub rejected: usize,
    pub counterexample: Option<Instance>,
}

impl SoundnessReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none() && self.passed == self.samples
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule,
            "fragment": format!("{:?}", self.fragment),
            "samples": self.samples,
            "passed": self.passed,
            "rejected": self.rejected,
            "ok": self.ok(),
            "counterexample": self.counterexample.as_ref().map(Instance::to_json),
        })
    }
}

pub(crate) fn sample_angle(rng: &mut impl Rng, f: &Fragment) -> Angle {
    match f.order() {
        Some(o) => Angle::pi_frac(2 * rng.gen_range(0..o as i64), o as i64),
        None => Angle::real(rng.gen_range(0.0..2.0 * PI)),
    }
}

/// Both sides of one instance as closed-off terms.
pub fn instance_terms(r: &Rule, vals: &[Option<Angle>], sizes: &[usize]) -> Option<(Term, Term)> {
    let l = instantiate(&r.lhs, r.ports, sizes, vals)?;
    let rr = instantiate(&r.rhs, r.ports, sizes, vals)?;
    Some((from_graph(&l), from_graph(&rr)))
}

/// Angle variables, with derived ones filled in; `None` when a derived value
/// leaves the fragment.
pub(crate) fn draw_instance(r: &Rule, rng: &mut impl Rng, f: &Fragment, first: bool) -> Option<(Vec<Option<Angle>>, Vec<usize>)> {
    let mut vals: Vec<Option<Angle>> = vec![None; r.vars.len()];
    for i in r.free_vars() {
        vals[i] = Some(if first {
            match f.unit_angle() {
                Some(a) => a,
                None => Angle::real(PI / 4.0),
            }
        } else {
            sample_angle(rng, f)
        });
    }
    if let Some(d) = r.derive {
        if !d(&mut vals, Direction::Forward) {
            return None;
        }
        if vals.iter().flatten().any(|a| !f.contains_angle(a)) {
            return None;
        }
    }
    let sizes = r.groups.iter().map(|&m| m + rng.gen_range(0..=2)).collect();
    Some((vals, sizes))
}

fn instance_of(r: &Rule, vals: &[Option<Angle>], sizes: &[usize]) -> Instance {
    Instance {
        angles: r.vars.iter().zip(vals).map(|(n, a)| (n.to_string(), a.unwrap_or(Angle::zero()))).collect(),
        group_sizes: sizes.to_vec(),
    }
}

pub(crate) fn backend_for(f: &Fragment) -> Backend {
    match f.order() {
        Some(order) => Backend::Exact { order },
        None => Backend::Float,
    }
}

/// Checks `samples` random instances of the rule in the fragment. The
/// first instance sets every free angle to the fragment's unit angle.
pub fn check_soundness(r: &Rule, samples: usize, fragment: Fragment, seed: u64) -> SoundnessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let backend = backend_for(&fragment);
    let mut report = SoundnessReport {
        rule: r.label(),
        fragment,
        samples,
        passed: 0,
        rejected: 0,
        counterexample: None,
    };
    let max_attempts = 200 * samples.max(1);
    let mut attempts = 0;
    while report.passed < samples && attempts < max_attempts {
        let first = attempts == 0;
        attempts += 1;
        let Some((vals, sizes)) = draw_instance(r, &mut rng, &fragment, first) else {
            report.rejected += 1;
            continue;
        };
        let Some((l, rr)) = instance_terms(r, &vals, &sizes) else {
            report.rejected += 1;
            continue;
        };
        let same = match (interp(&l, backend), interp(&rr, backend)) {
            (Ok(a), Ok(b)) => a.equal(&b, 1e-9),
            _ => false,
        };
        if same {
            report.passed += 1;
        } else {
            report.counterexample = Some(instance_of(r, &vals, &sizes));
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests;
