//! Value-semantic labeled multigraphs with loops.
//!
//! A [`LabeledGraph`] is the combinatorial record of a singular set: vertices
//! are zero-dimensional strata marked `hollow` (orbifold point) or `full`
//! (non-orbifold point), edges are one-dimensional strata weighted by the
//! multiplicity of their isotropy. Source graphs carry integer weights >= 2;
//! graphs derived from branched covers carry rational weights > 1.

use num_rational::Ratio;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Edge weight. Exact rational so that branched covers can divide weights.
pub type Weight = Ratio<u64>;

/// Convenience constructor for an integer weight.
pub fn weight(n: u64) -> Weight {
    Ratio::from_integer(n)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Self {
        VertexId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(String);

impl EdgeId {
    pub fn new(s: impl Into<String>) -> Self {
        EdgeId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marking {
    Hollow,
    Full,
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marking::Hollow => f.write_str("hollow"),
            Marking::Full => f.write_str("full"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub ends: [VertexId; 2],
    pub weight: Weight,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// One of the two slots of an edge. Loops contribute two distinct half-edges
/// at the same vertex, which is what lets local models act on slots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub end: usize,
}

impl HalfEdge {
    pub fn new(edge: impl Into<EdgeId>, end: usize) -> Self {
        let edge = edge.into();
        debug_assert!(end < 2);
        HalfEdge { edge, end }
    }

    /// The other slot of the same edge.
    pub fn opposite(&self) -> HalfEdge {
        HalfEdge {
            edge: self.edge.clone(),
            end: 1 - self.end,
        }
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.edge, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references missing vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("edge `{edge}` has weight {weight}; source graphs require integer weights >= 2")]
    BadSourceWeight { edge: String, weight: String },
    #[error("edge `{edge}` has weight {weight}; derived weights must be > 1")]
    BadDerivedWeight { edge: String, weight: String },
}

/// Multigraph with loops, hollow/full vertex marks and positive rational
/// edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: BTreeMap<VertexId, Marking>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl LabeledGraph {
    /// Builds a source graph: every weight must be an integer >= 2.
    pub fn source(
        vertices: impl IntoIterator<Item = (VertexId, Marking)>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId, Weight)>,
    ) -> Result<Self, GraphError> {
        let g = Self::build(vertices, edges)?;
        for (id, e) in &g.edges {
            if !e.weight.is_integer() || e.weight < weight(2) {
                return Err(GraphError::BadSourceWeight {
                    edge: id.as_str().to_owned(),
                    weight: e.weight.to_string(),
                });
            }
        }
        Ok(g)
    }

    /// Builds a derived graph (cover output): weights are rationals > 1.
    pub fn derived(
        vertices: impl IntoIterator<Item = (VertexId, Marking)>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId, Weight)>,
    ) -> Result<Self, GraphError> {
        let g = Self::build(vertices, edges)?;
        for (id, e) in &g.edges {
            if e.weight <= Weight::one() {
                return Err(GraphError::BadDerivedWeight {
                    edge: id.as_str().to_owned(),
                    weight: e.weight.to_string(),
                });
            }
        }
        Ok(g)
    }

    fn build(
        vertices: impl IntoIterator<Item = (VertexId, Marking)>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId, Weight)>,
    ) -> Result<Self, GraphError> {
        let mut vs = BTreeMap::new();
        for (id, m) in vertices {
            if vs.insert(id.clone(), m).is_some() {
                return Err(GraphError::DuplicateVertex(id.as_str().to_owned()));
            }
        }
        let mut es = BTreeMap::new();
        for (id, a, b, w) in edges {
            for v in [&a, &b] {
                if !vs.contains_key(v) {
                    return Err(GraphError::DanglingEndpoint {
                        edge: id.as_str().to_owned(),
                        vertex: v.as_str().to_owned(),
                    });
                }
            }
            let prev = es.insert(
                id.clone(),
                Edge {
                    ends: [a, b],
                    weight: w,
                },
            );
            if prev.is_some() {
                return Err(GraphError::DuplicateEdge(id.as_str().to_owned()));
            }
        }
        Ok(LabeledGraph {
            vertices: vs,
            edges: es,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, Marking)> {
        self.vertices.iter().map(|(v, m)| (v, *m))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.keys()
    }

    pub fn marking(&self, v: &VertexId) -> Option<Marking> {
        self.vertices.get(v).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &Edge)> {
        self.edges.iter()
    }

    pub fn edge(&self, e: &EdgeId) -> Option<&Edge> {
        self.edges.get(e)
    }

    pub fn has_full_vertex(&self) -> bool {
        self.vertices.values().any(|m| *m == Marking::Full)
    }

    /// All weights integers >= 2.
    pub fn is_source(&self) -> bool {
        self.edges
            .values()
            .all(|e| e.weight.is_integer() && e.weight >= weight(2))
    }

    /// The vertex a half-edge is attached to.
    pub fn half_edge_vertex(&self, h: &HalfEdge) -> Option<&VertexId> {
        self.edges.get(&h.edge).map(|e| &e.ends[h.end])
    }

    /// Half-edges incident to `v`, sorted. A loop contributes both of its
    /// slots, so valency is exactly the length of this list.
    pub fn half_edges_at(&self, v: &VertexId) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for (id, e) in &self.edges {
            for end in 0..2 {
                if &e.ends[end] == v {
                    out.push(HalfEdge {
                        edge: id.clone(),
                        end,
                    });
                }
            }
        }
        out
    }

    pub fn valency(&self, v: &VertexId) -> usize {
        self.half_edges_at(v).len()
    }

    /// Weights of the slots at `v`, sorted ascending.
    pub fn incident_weights(&self, v: &VertexId) -> Vec<Weight> {
        let mut ws: Vec<Weight> = self
            .half_edges_at(v)
            .iter()
            .map(|h| self.edges[&h.edge].weight)
            .collect();
        ws.sort();
        ws
    }

    /// Connected components as sorted vertex sets.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                comp.insert(v.clone());
                for e in self.edges.values() {
                    if &e.ends[0] == v && !seen.contains(&e.ends[1]) {
                        stack.push(&e.ends[1]);
                    }
                    if &e.ends[1] == v && !seen.contains(&e.ends[0]) {
                        stack.push(&e.ends[0]);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Vertex/edge/component/cycle counts, with the valency histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountProfile {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub independent_cycles: usize,
    /// `valency_histogram[d]` = number of vertices of valency `d`.
    pub valency_histogram: Vec<usize>,
}

impl CountProfile {
    pub fn v0(&self) -> usize {
        self.valency_count(0)
    }
    pub fn v1(&self) -> usize {
        self.valency_count(1)
    }
    pub fn v2(&self) -> usize {
        self.valency_count(2)
    }
    pub fn v3(&self) -> usize {
        self.valency_count(3)
    }
    pub fn valency_count(&self, d: usize) -> usize {
        self.valency_histogram.get(d).copied().unwrap_or(0)
    }
    pub fn max_valency(&self) -> usize {
        self.valency_histogram
            .iter()
            .rposition(|&c| c > 0)
            .unwrap_or(0)
    }
}

/// Counts vertices, edges, components, independent cycles and valencies.
///
/// Both Euler identities are re-derived and asserted: `V - E + C = b0` and
/// its valency form `2*V0 + V1 - V3 + 2*C = 2*b0` (for valency <= 3); a
/// failure would signal an internal bug, not bad input.
pub fn profile(g: &LabeledGraph) -> CountProfile {
    let v = g.vertex_count();
    let e = g.edge_count();
    let b0 = g.components().len();
    let c = e + b0 - v; // E - V + b0, kept in unsigned arithmetic
    let mut hist = Vec::new();
    for vid in g.vertex_ids() {
        let d = g.valency(vid);
        if hist.len() <= d {
            hist.resize(d + 1, 0);
        }
        hist[d] += 1;
    }
    let profile = CountProfile {
        vertices: v,
        edges: e,
        components: b0,
        independent_cycles: c,
        valency_histogram: hist,
    };
    // Euler identity V - E + C = b0.
    assert_eq!(
        profile.vertices + profile.independent_cycles,
        profile.edges + profile.components,
        "Euler identity violated"
    );
    // Valency form: handshake gives 2E = sum(d * V_d), so
    // 2*V0 + V1 - V3 + 2*C = 2*b0 whenever max valency <= 3.
    if profile.max_valency() <= 3 {
        assert_eq!(
            2 * profile.v0() + profile.v1() + 2 * profile.independent_cycles,
            profile.v3() + 2 * profile.components,
            "valency Euler identity violated"
        );
    }
    profile
}

/// A vertex-simple cycle: `edges[i]` joins `vertices[i]` to
/// `vertices[(i+1) % len]`. Loops are length-1 cycles, parallel edge pairs
/// length-2 cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().cloned().collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().cloned().collect()
    }

    pub fn min_weight(&self, g: &LabeledGraph) -> Weight {
        self.edges
            .iter()
            .map(|e| g.edge(e).expect("cycle edge in graph").weight)
            .min()
            .expect("cycle has at least one edge")
    }

    /// Sorted edge-id list; the deterministic selector used in cover plans.
    pub fn selector(&self) -> Vec<EdgeId> {
        let mut s = self.edges.clone();
        s.sort();
        s
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.iter().any(|x| x == v)
    }

    /// Checks structural validity against `g`.
    pub fn validate(&self, g: &LabeledGraph) -> bool {
        if self.edges.is_empty() || self.edges.len() != self.vertices.len() {
            return false;
        }
        let distinct: BTreeSet<_> = self.vertices.iter().collect();
        if distinct.len() != self.vertices.len() {
            return false;
        }
        let distinct_edges: BTreeSet<_> = self.edges.iter().collect();
        if distinct_edges.len() != self.edges.len() {
            return false;
        }
        let n = self.edges.len();
        for i in 0..n {
            let Some(e) = g.edge(&self.edges[i]) else {
                return false;
            };
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let joins = (&e.ends[0] == a && &e.ends[1] == b) || (&e.ends[0] == b && &e.ends[1] == a);
            if !joins {
                return false;
            }
        }
        true
    }
}

/// Enumerates every vertex-simple cycle exactly once, up to rotation and
/// reflection. Output is sorted by (length, selector) so the order is stable.
pub fn simple_cycles(g: &LabeledGraph) -> Vec<Cycle> {
    let mut out = Vec::new();

    // Loops.
    for (id, e) in g.edges() {
        if e.is_loop() {
            out.push(Cycle {
                vertices: vec![e.ends[0].clone()],
                edges: vec![id.clone()],
            });
        }
    }

    // Parallel pairs as length-2 cycles.
    let mut by_pair: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in g.edges() {
        if e.is_loop() {
            continue;
        }
        let mut pair = [e.ends[0].clone(), e.ends[1].clone()];
        pair.sort();
        by_pair
            .entry((pair[0].clone(), pair[1].clone()))
            .or_default()
            .push(id.clone());
    }
    for ((a, b), es) in &by_pair {
        for i in 0..es.len() {
            for j in (i + 1)..es.len() {
                out.push(Cycle {
                    vertices: vec![a.clone(), b.clone()],
                    edges: vec![es[i].clone(), es[j].clone()],
                });
            }
        }
    }

    // Length >= 3: vertex cycles first, then every choice of parallel edges.
    let verts: Vec<VertexId> = g.vertex_ids().cloned().collect();
    let mut adj: BTreeMap<&VertexId, BTreeSet<&VertexId>> = BTreeMap::new();
    for e in g.edges().map(|(_, e)| e) {
        if e.is_loop() {
            continue;
        }
        adj.entry(&e.ends[0]).or_default().insert(&e.ends[1]);
        adj.entry(&e.ends[1]).or_default().insert(&e.ends[0]);
    }
    let mut vertex_cycles: Vec<Vec<VertexId>> = Vec::new();
    for start in &verts {
        let mut path: Vec<&VertexId> = vec![start];
        extend_vertex_cycle(&adj, start, &mut path, &mut vertex_cycles);
    }
    for vc in vertex_cycles {
        // Cartesian product over parallel edges between consecutive vertices.
        let n = vc.len();
        let mut edge_choices: Vec<&Vec<EdgeId>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut pair = [vc[i].clone(), vc[(i + 1) % n].clone()];
            pair.sort();
            edge_choices.push(&by_pair[&(pair[0].clone(), pair[1].clone())]);
        }
        let mut idx = vec![0usize; n];
        loop {
            out.push(Cycle {
                vertices: vc.clone(),
                edges: (0..n).map(|i| edge_choices[i][idx[i]].clone()).collect(),
            });
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                idx[i] += 1;
                if idx[i] < edge_choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }

    out.sort_by_key(|c| (c.len(), c.selector()));
    out
}

fn extend_vertex_cycle<'a>(
    adj: &BTreeMap<&VertexId, BTreeSet<&'a VertexId>>,
    start: &VertexId,
    path: &mut Vec<&'a VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    let last = *path.last().unwrap();
    let Some(nbrs) = adj.get(last) else {
        return;
    };
    // Only this lifetime matters: clone the neighbor list to release the borrow.
    let nbrs: Vec<&VertexId> = nbrs.iter().copied().collect();
    for w in nbrs {
        if w == start {
            // Close the cycle; require length >= 3 and the orientation
            // convention path[1] < path[last] to kill reflections.
            if path.len() >= 3 && path[1] < path[path.len() - 1] {
                out.push(path.iter().map(|v| (*v).clone()).collect());
            }
            continue;
        }
        if w > start && !path.contains(&w) {
            path.push(w);
            extend_vertex_cycle(adj, start, path, out);
            path.pop();
        }
    }
}

/// Canonical byte string: equal iff the graphs are isomorphic via a marking-
/// and weight-preserving bijection. Brute-force minimisation over vertex
/// permutations, pruned by (marking, valency, weight multiset) classes.
pub fn canonical_form(g: &LabeledGraph) -> Vec<u8> {
    #[derive(PartialEq, Eq, PartialOrd, Ord, Clone)]
    struct ClassKey {
        marking: Marking,
        valency: usize,
        weights: Vec<(u64, u64)>,
    }

    let mut verts: Vec<VertexId> = g.vertex_ids().cloned().collect();
    let key = |v: &VertexId| ClassKey {
        marking: g.marking(v).unwrap(),
        valency: g.valency(v),
        weights: g
            .incident_weights(v)
            .iter()
            .map(|w| (*w.numer(), *w.denom()))
            .collect(),
    };
    verts.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.cmp(b)));

    // Partition into runs of equal class key; permutations only act within runs.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < verts.len() {
        let mut j = i + 1;
        while j < verts.len() && key(&verts[j]) == key(&verts[i]) {
            j += 1;
        }
        runs.push((i, j));
        i = j;
    }

    let mut best: Option<Vec<u8>> = None;
    let mut order: Vec<usize> = (0..verts.len()).collect();
    permute_runs(&runs, 0, &mut order, &mut |order| {
        // order[pos] = index into verts; position in `order` is the canonical label.
        let mut pos_of: BTreeMap<&VertexId, usize> = BTreeMap::new();
        for (pos, &vi) in order.iter().enumerate() {
            pos_of.insert(&verts[vi], pos);
        }
        let mut bytes = Vec::new();
        for &vi in order.iter() {
            bytes.push(match g.marking(&verts[vi]).unwrap() {
                Marking::Hollow => b'h',
                Marking::Full => b'f',
            });
        }
        let mut edge_rows: Vec<(usize, usize, u64, u64)> = g
            .edges()
            .map(|(_, e)| {
                let mut p = [pos_of[&e.ends[0]], pos_of[&e.ends[1]]];
                p.sort_unstable();
                (p[0], p[1], *e.weight.numer(), *e.weight.denom())
            })
            .collect();
        edge_rows.sort_unstable();
        for (a, b, n, d) in edge_rows {
            bytes.extend_from_slice(format!("|{a},{b},{n}/{d}").as_bytes());
        }
        if best.as_ref().is_none_or(|b| bytes < *b) {
            best = Some(bytes);
        }
    });
    best.unwrap_or_default()
}

fn permute_runs(
    runs: &[(usize, usize)],
    run_idx: usize,
    order: &mut Vec<usize>,
    visit: &mut impl FnMut(&Vec<usize>),
) {
    if run_idx == runs.len() {
        visit(order);
        return;
    }
    let (lo, hi) = runs[run_idx];
    permute_range(order, lo, hi, run_idx, runs, visit);
}

fn permute_range(
    order: &mut Vec<usize>,
    lo: usize,
    hi: usize,
    run_idx: usize,
    runs: &[(usize, usize)],
    visit: &mut impl FnMut(&Vec<usize>),
) {
    if lo + 1 >= hi {
        permute_runs(runs, run_idx + 1, order, visit);
        return;
    }
    for i in lo..hi {
        order.swap(lo, i);
        permute_range(order, lo + 1, hi, run_idx, runs, visit);
        order.swap(lo, i);
    }
}

pub fn is_isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    canonical_form(a) == canonical_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn theta(m1: Marking, m2: Marking, ws: [u64; 3]) -> LabeledGraph {
        LabeledGraph::source(
            [(VertexId::from("a"), m1), (VertexId::from("b"), m2)],
            [
                (
                    EdgeId::from("e0"),
                    VertexId::from("a"),
                    VertexId::from("b"),
                    weight(ws[0]),
                ),
                (
                    EdgeId::from("e1"),
                    VertexId::from("a"),
                    VertexId::from("b"),
                    weight(ws[1]),
                ),
                (
                    EdgeId::from("e2"),
                    VertexId::from("a"),
                    VertexId::from("b"),
                    weight(ws[2]),
                ),
            ],
        )
        .unwrap()
    }

    fn k4(marks: [Marking; 4], ws: [u64; 6]) -> LabeledGraph {
        let v = |i: usize| VertexId::new(format!("v{i}"));
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        LabeledGraph::source(
            (0..4).map(|i| (v(i), marks[i])),
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| (EdgeId::new(format!("e{i}")), v(a), v(b), weight(ws[i]))),
        )
        .unwrap()
    }

    #[test]
    fn theta_profile() {
        let g = theta(Marking::Full, Marking::Full, [2, 2, 2]);
        let p = profile(&g);
        assert_eq!(p.vertices, 2);
        assert_eq!(p.edges, 3);
        assert_eq!(p.components, 1);
        assert_eq!(p.independent_cycles, 2);
        assert_eq!(p.v3(), 2);
    }

    #[test]
    fn k4_profile_has_three_independent_cycles() {
        let g = k4([Marking::Full; 4], [2; 6]);
        let p = profile(&g);
        assert_eq!(p.vertices, 4);
        assert_eq!(p.edges, 6);
        assert_eq!(p.independent_cycles, 3);
        assert_eq!(p.v3(), 4);
    }

    #[test]
    fn isolated_vertex_profile() {
        let g = LabeledGraph::source([(VertexId::from("p"), Marking::Full)], []).unwrap();
        let p = profile(&g);
        assert_eq!(
            (p.vertices, p.edges, p.components, p.independent_cycles),
            (1, 0, 1, 0)
        );
        assert_eq!(p.v0(), 1);
    }

    #[test]
    fn theta_has_three_cycles() {
        let g = theta(Marking::Full, Marking::Full, [2, 3, 4]);
        let cycles = simple_cycles(&g);
        assert_eq!(cycles.len(), 3);
        assert!(cycles.iter().all(|c| c.len() == 2));
        assert!(cycles.iter().all(|c| c.validate(&g)));
    }

    #[test]
    fn loop_is_a_length_one_cycle() {
        let g = LabeledGraph::source(
            [(VertexId::from("a"), Marking::Full)],
            [(
                EdgeId::from("l"),
                VertexId::from("a"),
                VertexId::from("a"),
                weight(4),
            )],
        )
        .unwrap();
        let cycles = simple_cycles(&g);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 1);
        assert!(cycles[0].validate(&g));
    }

    #[test]
    fn tree_has_no_cycles() {
        let v = |s: &str| VertexId::from(s);
        let g = LabeledGraph::source(
            [
                (v("a"), Marking::Full),
                (v("b"), Marking::Full),
                (v("c"), Marking::Full),
            ],
            [
                (EdgeId::from("e0"), v("a"), v("b"), weight(2)),
                (EdgeId::from("e1"), v("b"), v("c"), weight(3)),
            ],
        )
        .unwrap();
        assert!(simple_cycles(&g).is_empty());
    }

    #[test]
    fn k4_has_seven_cycles() {
        let g = k4([Marking::Full; 4], [2; 6]);
        assert_eq!(simple_cycles(&g).len(), 7);
    }

    // Independent oracle: an edge subset is a simple cycle iff it is
    // connected and every touched vertex has degree exactly 2 in the subset.
    fn cycle_count_by_subsets(g: &LabeledGraph) -> usize {
        let ids: Vec<EdgeId> = g.edges().map(|(id, _)| id.clone()).collect();
        let mut count = 0;
        for mask in 1u32..(1 << ids.len()) {
            let subset: Vec<&EdgeId> = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e)
                .collect();
            let mut deg: BTreeMap<&VertexId, usize> = BTreeMap::new();
            for e in &subset {
                let edge = g.edge(e).unwrap();
                *deg.entry(&edge.ends[0]).or_default() += 1;
                *deg.entry(&edge.ends[1]).or_default() += 1;
            }
            if !deg.values().all(|&d| d == 2) {
                continue;
            }
            // Connectivity over the subset.
            let verts: Vec<&VertexId> = deg.keys().copied().collect();
            let mut seen = BTreeSet::new();
            let mut stack = vec![verts[0]];
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                for e in &subset {
                    let edge = g.edge(e).unwrap();
                    if &edge.ends[0] == v {
                        stack.push(&edge.ends[1]);
                    }
                    if &edge.ends[1] == v {
                        stack.push(&edge.ends[0]);
                    }
                }
            }
            if seen.len() == verts.len() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn cycle_enumeration_matches_subset_oracle() {
        let graphs = vec![
            theta(Marking::Full, Marking::Hollow, [2, 3, 4]),
            k4([Marking::Full; 4], [2, 3, 2, 5, 2, 7]),
            LabeledGraph::source(
                [
                    (VertexId::from("a"), Marking::Full),
                    (VertexId::from("b"), Marking::Full),
                ],
                [
                    (
                        EdgeId::from("l"),
                        VertexId::from("a"),
                        VertexId::from("a"),
                        weight(2),
                    ),
                    (
                        EdgeId::from("e"),
                        VertexId::from("a"),
                        VertexId::from("b"),
                        weight(3),
                    ),
                ],
            )
            .unwrap(),
        ];
        for g in &graphs {
            assert_eq!(simple_cycles(g).len(), cycle_count_by_subsets(g));
        }
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let g1 = theta(Marking::Full, Marking::Hollow, [2, 3, 4]);
        let g2 = LabeledGraph::source(
            [
                (VertexId::from("x"), Marking::Hollow),
                (VertexId::from("y"), Marking::Full),
            ],
            [
                (
                    EdgeId::from("p"),
                    VertexId::from("y"),
                    VertexId::from("x"),
                    weight(3),
                ),
                (
                    EdgeId::from("q"),
                    VertexId::from("x"),
                    VertexId::from("y"),
                    weight(4),
                ),
                (
                    EdgeId::from("r"),
                    VertexId::from("y"),
                    VertexId::from("x"),
                    weight(2),
                ),
            ],
        )
        .unwrap();
        assert!(is_isomorphic(&g1, &g2));
    }

    #[test]
    fn canonical_form_distinguishes_markings() {
        let g1 = theta(Marking::Hollow, Marking::Full, [2, 3, 4]);
        let g2 = theta(Marking::Full, Marking::Full, [2, 3, 4]);
        assert!(!is_isomorphic(&g1, &g2));
    }

    #[test]
    fn canonical_form_tracks_weight_swap_with_vertex_swap() {
        // Path a -2- b -3- c versus a -3- b -2- c: isomorphic by reversing.
        let v = |s: &str| VertexId::from(s);
        let mk = |w0: u64, w1: u64| {
            LabeledGraph::source(
                [
                    (v("a"), Marking::Full),
                    (v("b"), Marking::Full),
                    (v("c"), Marking::Full),
                ],
                [
                    (EdgeId::from("e0"), v("a"), v("b"), weight(w0)),
                    (EdgeId::from("e1"), v("b"), v("c"), weight(w1)),
                ],
            )
            .unwrap()
        };
        assert!(is_isomorphic(&mk(2, 3), &mk(3, 2)));
    }

    #[test]
    fn source_rejects_rational_and_small_weights() {
        let v = VertexId::from("a");
        let res = LabeledGraph::source(
            [(v.clone(), Marking::Full), (VertexId::from("b"), Marking::Full)],
            [(
                EdgeId::from("e"),
                v.clone(),
                VertexId::from("b"),
                Weight::new(3, 2),
            )],
        );
        assert!(matches!(res, Err(GraphError::BadSourceWeight { .. })));
        let res = LabeledGraph::source(
            [(v.clone(), Marking::Full), (VertexId::from("b"), Marking::Full)],
            [(EdgeId::from("e"), v, VertexId::from("b"), weight(1))],
        );
        assert!(matches!(res, Err(GraphError::BadSourceWeight { .. })));
    }
}
