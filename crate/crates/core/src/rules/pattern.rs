//! Graph templates with phase metavariables, matching and rewriting.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::PI;

use crate::diagram::{Angle, End, OpenGraph, VertexKind};

/// `constant + Σ coeff·var`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub terms: Vec<(usize, i64)>,
    pub constant: Angle,
}

impl Expr {
    pub fn var(v: usize) -> Expr {
        Expr { terms: vec![(v, 1)], constant: Angle::zero() }
    }

    pub fn constant(a: Angle) -> Expr {
        Expr { terms: vec![], constant: a }
    }

    pub fn lin(terms: &[(usize, i64)], constant: Angle) -> Expr {
        Expr { terms: terms.to_vec(), constant }
    }

    pub fn eval(&self, vals: &[Option<Angle>]) -> Option<Angle> {
        let mut acc = self.constant;
        for &(v, c) in &self.terms {
            acc = acc.add(&vals[v]?.scale(c));
        }
        Some(acc)
    }

    fn unknowns(&self, vals: &[Option<Angle>]) -> Vec<(usize, i64)> {
        self.terms.iter().copied().filter(|&(v, _)| vals[v].is_none()).collect()
    }

    fn known_part(&self, vals: &[Option<Angle>]) -> Angle {
        let mut acc = self.constant;
        for &(v, c) in &self.terms {
            if let Some(a) = vals[v] {
                acc = acc.add(&a.scale(c));
            }
        }
        acc
    }

    fn map_vars(&self, f: &dyn Fn(usize) -> usize) -> Expr {
        Expr { terms: self.terms.iter().map(|&(v, c)| (f(v), c)).collect(), constant: self.constant }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PKind {
    Z(Expr),
    X(Expr),
    H,
}

impl PKind {
    pub fn colour_swap(&self) -> PKind {
        match self {
            PKind::Z(e) => PKind::X(e.clone()),
            PKind::X(e) => PKind::Z(e.clone()),
            PKind::H => PKind::H,
        }
    }

    fn expr(&self) -> Option<&Expr> {
        match self {
            PKind::Z(e) | PKind::X(e) => Some(e),
            PKind::H => None,
        }
    }

    fn same_colour(&self, k: &VertexKind) -> bool {
        matches!((self, k), (PKind::Z(_), VertexKind::Z(_)) | (PKind::X(_), VertexKind::X(_)) | (PKind::H, VertexKind::HBox))
    }

    pub fn instantiate(&self, vals: &[Option<Angle>]) -> Option<VertexKind> {
        Some(match self {
            PKind::Z(e) => VertexKind::Z(e.eval(vals)?),
            PKind::X(e) => VertexKind::X(e.eval(vals)?),
            PKind::H => VertexKind::HBox,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PEnd {
    V(usize),
    Port(usize),
}

/// A group of legs owned by one vertex; with a gadget, every leg passes
/// through its own copy of the (2-legged) gadget.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupLeg {
    pub group: usize,
    pub gadget: Option<PKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PVertex {
    pub kind: PKind,
    pub groups: Vec<GroupLeg>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Side {
    pub vertices: Vec<PVertex>,
    pub edges: Vec<(PEnd, PEnd)>,
}

impl Side {
    pub fn vertex(&mut self, kind: PKind) -> usize {
        self.vertices.push(PVertex { kind, groups: vec![] });
        self.vertices.len() - 1
    }

    pub fn grouped(&mut self, kind: PKind, groups: &[(usize, Option<PKind>)]) -> usize {
        let groups = groups.iter().map(|(g, k)| GroupLeg { group: *g, gadget: k.clone() }).collect();
        self.vertices.push(PVertex { kind, groups });
        self.vertices.len() - 1
    }

    pub fn edge(&mut self, a: usize, b: usize) {
        self.edges.push((PEnd::V(a), PEnd::V(b)));
    }

    pub fn port(&mut self, v: usize, p: usize) {
        self.edges.push((PEnd::V(v), PEnd::Port(p)));
    }

    pub fn wire(&mut self, p: usize, q: usize) {
        self.edges.push((PEnd::Port(p), PEnd::Port(q)));
    }

    pub fn colour_swap(&self) -> Side {
        Side {
            vertices: self
                .vertices
                .iter()
                .map(|v| PVertex {
                    kind: v.kind.colour_swap(),
                    groups: v
                        .groups
                        .iter()
                        .map(|g| GroupLeg { group: g.group, gadget: g.gadget.as_ref().map(PKind::colour_swap) })
                        .collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn map_vars(&self, f: &dyn Fn(usize) -> usize) -> Side {
        let mk = |k: &PKind| match k {
            PKind::Z(e) => PKind::Z(e.map_vars(f)),
            PKind::X(e) => PKind::X(e.map_vars(f)),
            PKind::H => PKind::H,
        };
        Side {
            vertices: self
                .vertices
                .iter()
                .map(|v| PVertex {
                    kind: mk(&v.kind),
                    groups: v.groups.iter().map(|g| GroupLeg { group: g.group, gadget: g.gadget.as_ref().map(mk) }).collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    fn internal(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(x, y)| (x == PEnd::V(a) && y == PEnd::V(b)) || (x == PEnd::V(b) && y == PEnd::V(a)))
            .count()
    }

    fn ports_of(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(x, y)| match (x, y) {
                (PEnd::V(a), PEnd::Port(p)) | (PEnd::Port(p), PEnd::V(a)) if a == v => Some(p),
                _ => None,
            })
            .collect()
    }

    fn internal_degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(x, y)| (x == PEnd::V(v)) as usize * matches!(y, PEnd::V(_)) as usize + (y == PEnd::V(v)) as usize * matches!(x, PEnd::V(_)) as usize)
            .sum()
    }

    fn port_wires(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter_map(|&(x, y)| match (x, y) {
                (PEnd::Port(p), PEnd::Port(q)) => Some((p, q)),
                _ => None,
            })
            .collect()
    }

    /// Vars mentioned anywhere on this side.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for v in &self.vertices {
            for k in std::iter::once(&v.kind).chain(v.groups.iter().filter_map(|g| g.gadget.as_ref())) {
                if let Some(e) = k.expr() {
                    out.extend(e.terms.iter().map(|t| t.0));
                }
            }
        }
        out
    }

    /// Search order: every vertex after the first of its component has an
    /// earlier neighbour.
    fn order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                out.push(v);
                for w in 0..n {
                    if !seen[w] && self.internal(v, w) > 0 {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        out
    }
}

/// Free choices for variables and group splits that matching cannot
/// determine.
#[derive(Clone, Debug, Default)]
pub struct Choices {
    pub angles: HashMap<usize, Angle>,
    /// Number of legs given to a group when a vertex owns several; the last
    /// group takes the remainder.
    pub splits: HashMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    /// Pattern vertex ↦ host vertex.
    pub vertices: Vec<usize>,
    /// Host vertices consumed as replicated gadgets.
    pub gadgets: Vec<usize>,
    /// Port ↦ the end outside the match.
    pub ports: Vec<Option<End>>,
    /// Host wires matched by port–port template edges.
    pub wires: Vec<(End, End)>,
    /// Group ↦ outside ends of its legs, in order.
    pub groups: Vec<Vec<End>>,
    pub angles: Vec<Option<Angle>>,
}

impl Match {
    pub fn site(&self) -> BTreeSet<usize> {
        self.vertices.iter().chain(&self.gadgets).copied().collect()
    }
}

pub(crate) struct Template<'a> {
    pub side: &'a Side,
    pub ports: usize,
    pub groups: &'a [usize],
    pub vars: usize,
}

pub fn same_angle(a: &Angle, b: &Angle) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        a.approx_eq(b)
    }
}

/// Solutions of `c·x = t`.
fn divide(t: &Angle, c: i64) -> Vec<Angle> {
    let n = c.unsigned_abs() as i64;
    let s = c.signum();
    (0..n)
        .map(|j| match *t {
            Angle::ExactPi { num, den } => Angle::pi_frac(s * (num + 2 * den * j), den * n),
            Angle::Real(r) => Angle::real(s as f64 * (r + 2.0 * PI * j as f64) / n as f64),
        })
        .collect()
}

struct Search<'a, 'g> {
    t: &'a Template<'a>,
    g: &'g OpenGraph,
    choices: &'a Choices,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: HashSet<usize>,
    out: Vec<Match>,
    limit: usize,
}

fn edges_between(g: &OpenGraph, a: usize, b: usize) -> usize {
    g.edges()
        .iter()
        .filter(|&&(x, y)| (x == End::V(a) && y == End::V(b)) || (x == End::V(b) && y == End::V(a)))
        .count()
}

fn has_self_loop(g: &OpenGraph, v: usize) -> bool {
    g.edges().iter().any(|&(x, y)| x == End::V(v) && y == End::V(v))
}

impl<'a, 'g> Search<'a, 'g> {
    fn unify(&self, kind: &PKind, host: &VertexKind, vals: &[Option<Angle>]) -> Vec<Vec<Option<Angle>>> {
        if !kind.same_colour(host) {
            return vec![];
        }
        let (Some(e), Some(theta)) = (kind.expr(), host.phase()) else {
            return vec![vals.to_vec()];
        };
        let unknown = e.unknowns(vals);
        match unknown.len() {
            0 => {
                if same_angle(&e.eval(vals).unwrap(), &theta) {
                    vec![vals.to_vec()]
                } else {
                    vec![]
                }
            }
            1 => {
                let (v, c) = unknown[0];
                let rest = theta.sub(&e.known_part(vals));
                divide(&rest, c)
                    .into_iter()
                    .map(|a| {
                        let mut nv = vals.to_vec();
                        nv[v] = Some(a);
                        nv
                    })
                    .collect()
            }
            _ => vec![vals.to_vec()],
        }
    }

    fn go(&mut self, k: usize, vals: Vec<Option<Angle>>) {
        if self.out.len() >= self.limit {
            return;
        }
        if k == self.order.len() {
            self.finish(vals);
            return;
        }
        let i = self.order[k];
        let side = self.t.side;
        let anchor = self.order[..k].iter().copied().find(|&j| side.internal(i, j) > 0);
        let candidates: Vec<usize> = match anchor {
            Some(j) => {
                let h = self.map[j].unwrap();
                let mut c: Vec<usize> = self
                    .g
                    .incident(h)
                    .into_iter()
                    .filter_map(|e| match self.g.other_end(e, End::V(h)) {
                        End::V(w) => Some(w),
                        _ => None,
                    })
                    .collect();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => self.g.vertices().map(|(v, _)| v).collect(),
        };
        let pv = &side.vertices[i];
        let fixed = side.internal_degree(i) + side.ports_of(i).len();
        for h in candidates {
            if self.used.contains(&h) || has_self_loop(self.g, h) {
                continue;
            }
            let hk = self.g.kind(h).unwrap();
            if !pv.kind.same_colour(&hk) {
                continue;
            }
            let deg = self.g.degree(h);
            let mins: usize = pv.groups.iter().map(|gl| self.t.groups[gl.group]).sum();
            if deg < fixed + mins || (pv.groups.is_empty() && deg != fixed) {
                continue;
            }
            let ok = self.order[..k].iter().all(|&j| edges_between(self.g, h, self.map[j].unwrap()) == side.internal(i, j));
            if !ok {
                continue;
            }
            for nv in self.unify(&pv.kind, &hk, &vals) {
                self.map[i] = Some(h);
                self.used.insert(h);
                self.go(k + 1, nv);
                self.used.remove(&h);
                self.map[i] = None;
            }
        }
    }

    fn finish(&mut self, mut vals: Vec<Option<Angle>>) {
        let side = self.t.side;
        // Deferred multi-variable phases: fix all but the last unknown from
        // the choices, then solve for it.
        for (i, pv) in side.vertices.iter().enumerate() {
            let Some(e) = pv.kind.expr() else { continue };
            let unknown = e.unknowns(&vals);
            if unknown.is_empty() {
                continue;
            }
            for &(v, _) in &unknown[..unknown.len() - 1] {
                vals[v] = Some(self.choices.angles.get(&v).copied().unwrap_or(Angle::zero()));
            }
            let (v, c) = *unknown.last().unwrap();
            let theta = self.g.kind(self.map[i].unwrap()).unwrap().phase().unwrap();
            vals[v] = Some(divide(&theta.sub(&e.known_part(&vals)), c)[0]);
        }
        let mut m = Match {
            vertices: self.map.iter().map(|h| h.unwrap()).collect(),
            gadgets: vec![],
            ports: vec![None; self.t.ports],
            wires: vec![],
            groups: vec![vec![]; self.t.groups.len()],
            angles: vals,
        };
        let matched: HashSet<usize> = m.vertices.iter().copied().collect();
        let mut consumed: HashSet<usize> = HashSet::new();
        for (i, pv) in side.vertices.iter().enumerate() {
            let h = m.vertices[i];
            let legs: Vec<End> = self
                .g
                .incident(h)
                .into_iter()
                .map(|e| self.g.other_end(e, End::V(h)))
                .filter(|o| !matches!(o, End::V(w) if matched.contains(w)))
                .collect();
            if !self.assign(pv, h, &side.ports_of(i), &legs, &mut m, &matched, &mut consumed) {
                return;
            }
        }
        // Port–port template edges only occur on vertex-free sides.
        let wires = side.port_wires();
        if !wires.is_empty() {
            assert!(side.vertices.is_empty(), "port wires mixed with vertices are not supported");
            for &(a, b) in self.g.edges() {
                if a == b {
                    continue;
                }
                let mut w = m.clone();
                let (p, q) = wires[0];
                w.ports[p] = Some(a);
                w.ports[q] = Some(b);
                w.wires.push((a, b));
                self.out.push(w);
                if self.out.len() >= self.limit {
                    return;
                }
            }
            return;
        }
        let bad = |o: &End| matches!(o, End::V(w) if matched.contains(w) || consumed.contains(w));
        if m.ports.iter().flatten().any(bad) || m.groups.iter().flatten().any(bad) {
            return;
        }
        m.gadgets = consumed.into_iter().collect();
        m.gadgets.sort_unstable();
        self.out.push(m);
    }

    /// Gives legs to the vertex's ports and groups; first valid assignment.
    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        pv: &PVertex,
        owner: usize,
        ports: &[usize],
        legs: &[End],
        m: &mut Match,
        matched: &HashSet<usize>,
        consumed: &mut HashSet<usize>,
    ) -> bool {
        fn picks(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for l in 0..n {
                if !cur.contains(&l) {
                    cur.push(l);
                    picks(n, k, cur, out);
                    cur.pop();
                }
            }
        }
        if legs.len() < ports.len() {
            return false;
        }
        let mut all = Vec::new();
        picks(legs.len(), ports.len(), &mut vec![], &mut all);
        for chosen in all {
            let rest: Vec<End> = (0..legs.len()).filter(|l| !chosen.contains(l)).map(|l| legs[l]).collect();
            let mut trial = consumed.clone();
            if let Some(groups) = self.split_groups(pv, owner, &rest, matched, &mut trial) {
                for (p, &l) in ports.iter().zip(&chosen) {
                    m.ports[*p] = Some(legs[l]);
                }
                for (g, ends) in groups {
                    m.groups[g] = ends;
                }
                *consumed = trial;
                return true;
            }
        }
        false
    }

    fn split_groups(
        &self,
        pv: &PVertex,
        owner: usize,
        rest: &[End],
        matched: &HashSet<usize>,
        consumed: &mut HashSet<usize>,
    ) -> Option<Vec<(usize, Vec<End>)>> {
        if pv.groups.is_empty() {
            return rest.is_empty().then(Vec::new);
        }
        let mut out = Vec::new();
        let mut pos = 0;
        for (n, gl) in pv.groups.iter().enumerate() {
            let take = if n + 1 == pv.groups.len() {
                rest.len() - pos
            } else {
                self.choices.splits.get(&gl.group).copied().unwrap_or(rest.len() - pos).min(rest.len() - pos)
            };
            let legs = &rest[pos..pos + take];
            pos += take;
            if legs.len() < self.t.groups[gl.group] {
                return None;
            }
            let mut ends = Vec::new();
            for &o in legs {
                match &gl.gadget {
                    None => ends.push(o),
                    Some(kind) => {
                        let End::V(w) = o else { return None };
                        if matched.contains(&w) || consumed.contains(&w) || self.used.contains(&w) {
                            return None;
                        }
                        let wk = self.g.kind(w)?;
                        let fixed = kind.instantiate(&[]).map(|k| same_kind(&k, &wk)).unwrap_or(false);
                        if !fixed || self.g.degree(w) != 2 || has_self_loop(self.g, w) {
                            return None;
                        }
                        // The gadget's far end.
                        let mut far = None;
                        let mut back = false;
                        for e in self.g.incident(w) {
                            let x = self.g.other_end(e, End::V(w));
                            if x == End::V(owner) && !back {
                                back = true;
                            } else {
                                far = Some(x);
                            }
                        }
                        consumed.insert(w);
                        ends.push(far?);
                    }
                }
            }
            out.push((gl.group, ends));
        }
        Some(out)
    }

}

fn same_kind(a: &VertexKind, b: &VertexKind) -> bool {
    match (a, b) {
        (VertexKind::Z(x), VertexKind::Z(y)) | (VertexKind::X(x), VertexKind::X(y)) => same_angle(x, y),
        (VertexKind::HBox, VertexKind::HBox) => true,
        _ => false,
    }
}

pub(crate) fn all_matches(t: &Template, g: &OpenGraph, choices: &Choices, limit: usize) -> Vec<Match> {
    let n = t.side.vertices.len();
    let mut s = Search {
        t,
        g,
        choices,
        order: t.side.order(),
        map: vec![None; n],
        used: HashSet::new(),
        out: vec![],
        limit,
    };
    if n == 0 && t.side.edges.is_empty() {
        return vec![Match {
            vertices: vec![],
            gadgets: vec![],
            ports: vec![None; t.ports],
            wires: vec![],
            groups: vec![vec![]; t.groups.len()],
            angles: vec![None; t.vars],
        }];
    }
    s.go(0, vec![None; t.vars]);
    s.out
}

/// Replaces the matched site by the target side.
pub(crate) fn rewrite(g: &OpenGraph, m: &Match, target: &Side, vals: &[Option<Angle>]) -> Option<OpenGraph> {
    let mut out = g.clone();
    let site: Vec<usize> = m.site().into_iter().collect();
    out.remove_vertices(&site);
    for &(a, b) in &m.wires {
        let idx = out.edges().iter().position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))?;
        out.remove_edge(idx);
    }
    let mut ids = Vec::with_capacity(target.vertices.len());
    for pv in &target.vertices {
        ids.push(out.add_vertex(pv.kind.instantiate(vals)?));
    }
    for &(a, b) in &target.edges {
        let end = |p: PEnd| -> Option<End> {
            match p {
                PEnd::V(v) => Some(End::V(ids[v])),
                PEnd::Port(q) => m.ports[q],
            }
        };
        out.add_edge(end(a)?, end(b)?);
    }
    for (i, pv) in target.vertices.iter().enumerate() {
        for gl in &pv.groups {
            for &o in &m.groups[gl.group] {
                match &gl.gadget {
                    None => out.add_edge(End::V(ids[i]), o),
                    Some(k) => {
                        let w = out.add_vertex(k.instantiate(vals)?);
                        out.add_edge(End::V(ids[i]), End::V(w));
                        out.add_edge(End::V(w), o);
                    }
                }
            }
        }
    }
    Some(out)
}

/// The side as a closed-off graph: ports become outputs `0..ports`, then
/// each group's legs in group order.
pub(crate) fn instantiate(side: &Side, ports: usize, sizes: &[usize], vals: &[Option<Angle>]) -> Option<OpenGraph> {
    let total = ports + sizes.iter().sum::<usize>();
    let mut g = OpenGraph::new(0, total);
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = ports;
    for s in sizes {
        offsets.push(acc);
        acc += s;
    }
    let mut ids = Vec::new();
    for pv in &side.vertices {
        ids.push(g.add_vertex(pv.kind.instantiate(vals)?));
    }
    for &(a, b) in &side.edges {
        let end = |p: PEnd| match p {
            PEnd::V(v) => End::V(ids[v]),
            PEnd::Port(q) => End::Out(q),
        };
        g.add_edge(end(a), end(b));
    }
    for (i, pv) in side.vertices.iter().enumerate() {
        for gl in &pv.groups {
            for j in 0..sizes[gl.group] {
                let o = End::Out(offsets[gl.group] + j);
                match &gl.gadget {
                    None => g.add_edge(End::V(ids[i]), o),
                    Some(k) => {
                        let w = g.add_vertex(k.instantiate(vals)?);
                        g.add_edge(End::V(ids[i]), End::V(w));
                        g.add_edge(End::V(w), o);
                    }
                }
            }
        }
    }
    Some(g)
}
