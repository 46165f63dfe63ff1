//! Open-graph view of terms: spiders and H-boxes as vertices, wires as
//! undirected edges, boundaries as numbered attachment points.

use std::collections::{BTreeMap, HashMap};

use super::angle::Angle;
use super::term::{Generator, Term, TermKind};
use super::DiagramError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexKind {
    Z(Angle),
    X(Angle),
    HBox,
}

impl VertexKind {
    pub fn phase(&self) -> Option<Angle> {
        match self {
            VertexKind::Z(a) | VertexKind::X(a) => Some(*a),
            VertexKind::HBox => None,
        }
    }

    fn same(&self, other: &VertexKind) -> bool {
        match (self, other) {
            (VertexKind::Z(a), VertexKind::Z(b)) | (VertexKind::X(a), VertexKind::X(b)) => a.approx_eq(b),
            (VertexKind::HBox, VertexKind::HBox) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    V(usize),
    In(usize),
    Out(usize),
}

#[derive(Clone, Debug, Default)]
pub struct OpenGraph {
    vertices: BTreeMap<usize, VertexKind>,
    edges: Vec<(End, End)>,
    inputs: usize,
    outputs: usize,
    /// Closed wire loops without vertices; each contributes a factor 2.
    loops: usize,
    next_id: usize,
}

pub const DEFAULT_VERTEX_BUDGET: usize = 64;

impl OpenGraph {
    pub fn new(inputs: usize, outputs: usize) -> OpenGraph {
        OpenGraph { inputs, outputs, ..Default::default() }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    pub fn add_loops(&mut self, k: usize) {
        self.loops += k;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (usize, VertexKind)> + '_ {
        self.vertices.iter().map(|(&i, &k)| (i, k))
    }

    pub fn kind(&self, v: usize) -> Option<VertexKind> {
        self.vertices.get(&v).copied()
    }

    pub fn set_kind(&mut self, v: usize, k: VertexKind) {
        self.vertices.insert(v, k);
    }

    pub fn edges(&self) -> &[(End, End)] {
        &self.edges
    }

    pub fn add_vertex(&mut self, k: VertexKind) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        self.vertices.insert(id, k);
        id
    }

    pub fn add_edge(&mut self, a: End, b: End) {
        self.edges.push((a, b));
    }

    /// Removes the vertices and every edge touching them.
    pub fn remove_vertices(&mut self, vs: &[usize]) {
        for v in vs {
            self.vertices.remove(v);
        }
        self.edges.retain(|(a, b)| !vs.iter().any(|&v| *a == End::V(v) || *b == End::V(v)));
    }

    pub fn remove_edge(&mut self, idx: usize) -> (End, End) {
        self.edges.swap_remove(idx)
    }

    /// Indices of the edges incident to `v`; a self-loop appears twice.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if *a == End::V(v) {
                out.push(i);
            }
            if *b == End::V(v) {
                out.push(i);
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).len()
    }

    /// The end of edge `e` opposite to `from`.
    pub fn other_end(&self, e: usize, from: End) -> End {
        let (a, b) = self.edges[e];
        if a == from {
            b
        } else {
            a
        }
    }

    /// Checks the structural invariants: boundary ends appear once, H-boxes
    /// have degree 2, edges reference live vertices.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let mut seen_in = vec![0usize; self.inputs];
        let mut seen_out = vec![0usize; self.outputs];
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &self.edges {
            for e in [a, b] {
                match e {
                    End::In(i) if i < self.inputs => seen_in[i] += 1,
                    End::Out(j) if j < self.outputs => seen_out[j] += 1,
                    End::V(v) if self.vertices.contains_key(&v) => *degree.entry(v).or_default() += 1,
                    other => return Err(DiagramError::Graph(format!("dangling end {other:?}"))),
                }
            }
        }
        if seen_in.iter().chain(&seen_out).any(|&c| c != 1) {
            return Err(DiagramError::Graph("each boundary must be attached exactly once".into()));
        }
        for (v, k) in &self.vertices {
            if *k == VertexKind::HBox && degree.get(v).copied().unwrap_or(0) != 2 {
                return Err(DiagramError::Graph(format!("H-box {v} does not have degree 2")));
            }
        }
        Ok(())
    }

    /// Renumbers vertices densely in id order.
    pub fn compacted(&self) -> OpenGraph {
        let map: HashMap<usize, usize> = self.vertices.keys().enumerate().map(|(i, &v)| (v, i)).collect();
        let f = |e: End| match e {
            End::V(v) => End::V(map[&v]),
            other => other,
        };
        OpenGraph {
            vertices: self.vertices.iter().map(|(v, k)| (map[v], *k)).collect(),
            edges: self.edges.iter().map(|&(a, b)| (f(a), f(b))).collect(),
            inputs: self.inputs,
            outputs: self.outputs,
            loops: self.loops,
            next_id: self.vertices.len(),
        }
    }

    /// Applies `f` to every spider phase.
    pub fn map_phases(&self, f: impl Fn(Angle) -> Angle) -> OpenGraph {
        let mut g = self.clone();
        for k in g.vertices.values_mut() {
            *k = match *k {
                VertexKind::Z(a) => VertexKind::Z(f(a)),
                VertexKind::X(a) => VertexKind::X(f(a)),
                VertexKind::HBox => VertexKind::HBox,
            };
        }
        g
    }
}

// ---------------------------------------------------------------------------
// Term → graph

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Point {
    End(End),
    Joint(usize),
}

struct Builder {
    g: OpenGraph,
    edges: Vec<(Point, Point)>,
    joints: usize,
}

impl Builder {
    fn build(&mut self, t: &Term, ins: Vec<Point>) -> Vec<Point> {
        match t.kind() {
            TermKind::Tensor(a, b) => {
                let mut ins = ins;
                let rest = ins.split_off(a.inputs());
                let mut out = self.build(a, ins);
                out.extend(self.build(b, rest));
                out
            }
            TermKind::Compose(a, b) => {
                let mid = self.build(a, ins);
                self.build(b, mid)
            }
            TermKind::Gen(g) => match g {
                Generator::Empty => vec![],
                Generator::Id => ins,
                Generator::Swap => vec![ins[1], ins[0]],
                Generator::Cup => {
                    self.edges.push((ins[0], ins[1]));
                    vec![]
                }
                Generator::Cap => {
                    let j = Point::Joint(self.joints);
                    self.joints += 1;
                    vec![j, j]
                }
                Generator::H => {
                    let v = self.g.add_vertex(VertexKind::HBox);
                    self.edges.push((ins[0], Point::End(End::V(v))));
                    vec![Point::End(End::V(v))]
                }
                Generator::Z { outputs, phase, .. } | Generator::X { outputs, phase, .. } => {
                    let k = if matches!(g, Generator::Z { .. }) { VertexKind::Z(*phase) } else { VertexKind::X(*phase) };
                    let v = self.g.add_vertex(k);
                    for p in ins {
                        self.edges.push((p, Point::End(End::V(v))));
                    }
                    vec![Point::End(End::V(v)); *outputs]
                }
            },
        }
    }
}

pub fn to_graph(t: &Term) -> OpenGraph {
    let mut b = Builder { g: OpenGraph::new(t.inputs(), t.outputs()), edges: Vec::new(), joints: 0 };
    let ins = (0..t.inputs()).map(|i| Point::End(End::In(i))).collect();
    let outs = b.build(t, ins);
    for (j, p) in outs.into_iter().enumerate() {
        b.edges.push((p, Point::End(End::Out(j))));
    }
    // Contract joints: every joint has exactly two incident edge-ends.
    let mut edges: Vec<Option<(Point, Point)>> = b.edges.into_iter().map(Some).collect();
    let mut at_joint: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (a, c) = e.unwrap();
        for p in [a, c] {
            if let Point::Joint(j) = p {
                at_joint.entry(j).or_default().push(i);
            }
        }
    }
    let mut loops = 0;
    for j in 0..b.joints {
        let inc = at_joint.remove(&j).unwrap_or_default();
        debug_assert_eq!(inc.len(), 2);
        let (e1, e2) = (inc[0], inc[1]);
        if e1 == e2 {
            edges[e1] = None;
            loops += 1;
            continue;
        }
        let far = |e: (Point, Point)| if e.0 == Point::Joint(j) { e.1 } else { e.0 };
        let a = far(edges[e1].unwrap());
        let c = far(edges[e2].unwrap());
        edges[e2] = None;
        edges[e1] = Some((a, c));
        // Re-point any later joint bookkeeping from e2 to e1.
        for p in [a, c] {
            if let Point::Joint(k) = p {
                if let Some(v) = at_joint.get_mut(&k) {
                    for x in v.iter_mut() {
                        if *x == e2 {
                            *x = e1;
                        }
                    }
                }
            }
        }
    }
    let mut g = b.g;
    g.loops = loops;
    for (a, c) in edges.into_iter().flatten() {
        match (a, c) {
            (Point::End(x), Point::End(y)) => g.edges.push((x, y)),
            _ => unreachable!("joint survived contraction"),
        }
    }
    g
}

// ---------------------------------------------------------------------------
// Graph → term

fn spider_term(kind: VertexKind, k_in: usize, k_out: usize) -> Term {
    match kind {
        VertexKind::Z(a) => Term::z(k_in, k_out, a),
        VertexKind::X(a) => Term::x(k_in, k_out, a),
        VertexKind::HBox => match (k_in, k_out) {
            (1, 1) => Term::h(),
            (2, 0) => Term::h().par(&Term::id()).then(&Term::cup()),
            (0, 2) => Term::cap().then(&Term::h().par(&Term::id())),
            _ => panic!("H-box with {k_in} inputs and {k_out} outputs"),
        },
    }
}

/// Term for a single vertex with `k_in` frontier wires, `k_out` new wires and
/// `loops` self-loops (closed with cups on extra legs).
fn vertex_term(kind: VertexKind, k_in: usize, k_out: usize, loops: usize) -> Term {
    if kind == VertexKind::HBox && loops == 1 {
        return Term::cap().then(&Term::h().par(&Term::id())).then(&Term::cup());
    }
    let t = spider_term(kind, k_in, k_out + 2 * loops);
    if loops == 0 {
        return t;
    }
    let cups = Term::tensor_all((0..loops).map(|_| Term::cup()));
    t.then(&cups.padded(k_out, 0))
}

/// Sequential builder that skips identity layers.
struct Chain {
    term: Option<Term>,
    width: usize,
}

impl Chain {
    fn push(&mut self, layer: Term) {
        debug_assert_eq!(layer.inputs(), self.width);
        self.width = layer.outputs();
        self.term = Some(match self.term.take() {
            None => layer,
            Some(t) => t.then(&layer),
        });
    }

    fn permute(&mut self, perm: &[usize]) {
        if perm.iter().enumerate().any(|(j, &i)| i != j) {
            self.push(Term::permutation(perm));
        }
    }
}

/// Extracts a term whose interpretation is the graph's: vertices are placed one
/// at a time along a frontier of open wires.
pub fn from_graph(g: &OpenGraph) -> Term {
    let n_in = g.inputs;
    let mut chain = Chain { term: None, width: n_in };
    // Frontier entries are edge indices; the placed end is implicit.
    let mut frontier: Vec<usize> = Vec::with_capacity(n_in);
    let mut input_edge = vec![usize::MAX; n_in];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        for x in [a, b] {
            if let End::In(i) = x {
                input_edge[i] = e;
            }
        }
    }
    frontier.extend(input_edge.iter().copied());

    // Input–input wires become cups right away.
    let mut done = false;
    while !done {
        done = true;
        for p in 0..frontier.len() {
            let e = frontier[p];
            if let Some(q) = (p + 1..frontier.len()).find(|&q| frontier[q] == e) {
                let mut perm: Vec<usize> = (0..frontier.len()).filter(|&k| k != p && k != q).collect();
                perm.push(p);
                perm.push(q);
                chain.permute(&perm);
                let w = frontier.len() - 2;
                chain.push(Term::cup().padded(w, 0));
                frontier = perm[..w].iter().map(|&k| frontier[k]).collect();
                done = false;
                break;
            }
        }
    }

    let incident: HashMap<usize, Vec<usize>> = g.vertices.keys().map(|&v| (v, g.incident(v))).collect();
    let mut remaining: Vec<usize> = g.vertices.keys().copied().collect();

    while !remaining.is_empty() {
        // Greedy: prefer the vertex that consumes the most frontier wires
        // relative to the wires it opens.
        let score = |v: usize| -> i64 {
            let inc = &incident[&v];
            let from_front = frontier.iter().filter(|&&e| is_end_of(g, e, v)).count() as i64;
            from_front * 2 - inc.len() as i64
        };
        let (ri, &v) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(i, &v)| (score(v), -(i as i64)))
            .unwrap();
        remaining.remove(ri);

        let inc = &incident[&v];
        let in_pos: Vec<usize> = (0..frontier.len()).filter(|&p| is_end_of(g, frontier[p], v)).collect();
        let mut loops = 0;
        let mut new_edges = Vec::new();
        let mut seen_loop = Vec::new();
        for &e in inc {
            let (a, b) = g.edges[e];
            if a == End::V(v) && b == End::V(v) {
                if !seen_loop.contains(&e) {
                    seen_loop.push(e);
                    loops += 1;
                }
                continue;
            }
            if !in_pos.iter().any(|&p| frontier[p] == e) {
                new_edges.push(e);
            }
        }
        // Gather incoming wires contiguously at the position of the first one.
        let start = in_pos.first().copied().unwrap_or(frontier.len());
        let others: Vec<usize> = (0..frontier.len()).filter(|p| !in_pos.contains(p)).collect();
        let before: Vec<usize> = others.iter().copied().filter(|&p| p < start).collect();
        let after: Vec<usize> = others.iter().copied().filter(|&p| p > start).collect();
        let mut perm = before.clone();
        perm.extend(&in_pos);
        perm.extend(&after);
        chain.permute(&perm);
        let vt = vertex_term(g.vertices[&v], in_pos.len(), new_edges.len(), loops);
        chain.push(vt.padded(before.len(), after.len()));
        let mut next: Vec<usize> = before.iter().map(|&p| frontier[p]).collect();
        next.extend(&new_edges);
        next.extend(after.iter().map(|&p| frontier[p]));
        frontier = next;
    }

    // Output–output wires come from caps appended on the right.
    let mut out_src: Vec<Option<usize>> = vec![None; g.outputs];
    let mut caps = 0;
    let mut width = frontier.len();
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if let (End::Out(i), End::Out(j)) = (a, b) {
            out_src[i] = Some(width);
            out_src[j] = Some(width + 1);
            width += 2;
            caps += 1;
            let _ = e;
        }
    }
    if caps > 0 {
        let cap_layer = Term::tensor_all((0..caps).map(|_| Term::cap()));
        let fl = frontier.len();
        chain.push(if fl == 0 { cap_layer } else { Term::wires(fl).par(&cap_layer) });
    }
    for (p, &e) in frontier.iter().enumerate() {
        let (a, b) = g.edges[e];
        let o = match (a, b) {
            (End::Out(j), _) | (_, End::Out(j)) => j,
            _ => unreachable!("frontier wire not ending at an output"),
        };
        out_src[o] = Some(p);
    }
    let perm: Vec<usize> = out_src.into_iter().map(|s| s.expect("unrouted output")).collect();
    chain.permute(&perm);

    let scalar_loops = (0..g.loops).map(|_| Term::cap().then(&Term::cup()));
    let mut t = chain.term.unwrap_or_else(|| Term::wires(n_in));
    if g.loops > 0 {
        t = t.par(&Term::tensor_all(scalar_loops));
    }
    t
}

fn is_end_of(g: &OpenGraph, e: usize, v: usize) -> bool {
    let (a, b) = g.edges[e];
    a == End::V(v) || b == End::V(v)
}

// ---------------------------------------------------------------------------
// Isomorphism

/// Boundary-preserving multigraph isomorphism.
pub fn graph_equal(a: &OpenGraph, b: &OpenGraph) -> Result<bool, DiagramError> {
    graph_equal_with_budget(a, b, DEFAULT_VERTEX_BUDGET)
}

pub fn graph_equal_with_budget(a: &OpenGraph, b: &OpenGraph, budget: usize) -> Result<bool, DiagramError> {
    let n = a.vertex_count().max(b.vertex_count());
    if n > budget {
        return Err(DiagramError::Budget { vertices: n, budget });
    }
    if a.inputs != b.inputs || a.outputs != b.outputs || a.loops != b.loops || a.vertex_count() != b.vertex_count() {
        return Ok(false);
    }
    if a.edges.len() != b.edges.len() {
        return Ok(false);
    }
    let ga = Adj::new(a);
    let gb = Adj::new(b);
    // Boundary–boundary wires must coincide.
    let mut bb_a = ga.boundary_pairs.clone();
    let mut bb_b = gb.boundary_pairs.clone();
    bb_a.sort();
    bb_b.sort();
    if bb_a != bb_b {
        return Ok(false);
    }
    let mut order: Vec<usize> = Vec::new();
    // Visit vertices reachable from boundaries first, then the rest, BFS.
    let mut seen = vec![false; ga.n];
    let mut queue: std::collections::VecDeque<usize> = ga.boundary_vertex.values().copied().collect();
    loop {
        while let Some(v) = queue.pop_front() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            order.push(v);
            for &u in ga.adj[v].keys() {
                if !seen[u] {
                    queue.push_back(u);
                }
            }
        }
        match (0..ga.n).find(|&v| !seen[v]) {
            Some(v) => queue.push_back(v),
            None => break,
        }
    }
    let mut map = vec![usize::MAX; ga.n];
    let mut used = vec![false; gb.n];
    Ok(iso_search(&ga, &gb, &order, 0, &mut map, &mut used))
}

struct Adj {
    n: usize,
    kinds: Vec<VertexKind>,
    /// Neighbour multiplicities, self-loops counted under the vertex itself.
    adj: Vec<BTreeMap<usize, usize>>,
    /// Boundary attachment: boundary end → vertex index.
    boundary_of: Vec<BTreeMap<End, usize>>,
    boundary_vertex: BTreeMap<End, usize>,
    boundary_pairs: Vec<(End, End)>,
}

impl Adj {
    fn new(g: &OpenGraph) -> Adj {
        let c = g.compacted();
        let n = c.vertices.len();
        let kinds = c.vertices.values().copied().collect();
        let mut adj = vec![BTreeMap::new(); n];
        let mut boundary_of = vec![BTreeMap::new(); n];
        let mut boundary_vertex = BTreeMap::new();
        let mut boundary_pairs = Vec::new();
        for &(x, y) in &c.edges {
            match (x, y) {
                (End::V(u), End::V(v)) => {
                    *adj[u].entry(v).or_insert(0) += 1;
                    if u != v {
                        *adj[v].entry(u).or_insert(0) += 1;
                    }
                }
                (End::V(u), bnd) | (bnd, End::V(u)) => {
                    *boundary_of[u].entry(bnd).or_insert(0) += 1;
                    boundary_vertex.insert(bnd, u);
                }
                (p, q) => boundary_pairs.push(if p <= q { (p, q) } else { (q, p) }),
            }
        }
        Adj { n, kinds, adj, boundary_of, boundary_vertex, boundary_pairs }
    }
}

fn iso_search(a: &Adj, b: &Adj, order: &[usize], k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for w in 0..b.n {
        if used[w] || !a.kinds[v].same(&b.kinds[w]) {
            continue;
        }
        if a.boundary_of[v] != b.boundary_of[w] || a.adj[v].len() != b.adj[w].len() {
            continue;
        }
        let deg = |m: &BTreeMap<usize, usize>| m.values().sum::<usize>();
        if deg(&a.adj[v]) != deg(&b.adj[w]) || a.adj[v].get(&v) != b.adj[w].get(&w) {
            continue;
        }
        // Edge multiplicities to already-mapped vertices must agree.
        let consistent = a.adj[v].iter().all(|(&u, &m)| u == v || map[u] == usize::MAX || b.adj[w].get(&map[u]) == Some(&m))
            && b.adj[w].iter().all(|(&x, _)| {
                x == w || !used[x] || {
                    let u = map.iter().position(|&y| y == x).unwrap();
                    a.adj[v].contains_key(&u)
                }
            });
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if iso_search(a, b, order, k + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[w] = false;
    }
    false
}
