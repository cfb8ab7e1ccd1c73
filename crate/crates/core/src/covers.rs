//! k-fold covers of weighted graphs branched along a simple cycle, with the
//! small-point accounting that drives exclusion arguments.
//!
//! For a simple cycle `c` whose edges all have weight >= k, the cover keeps
//! the cycle vertices, takes k copies of everything off the cycle, drops
//! cycle edges of weight exactly k and keeps heavier ones once with weight
//! w/k. An off-cycle edge whose endpoints both lie on the cycle lifts to k
//! parallel copies, since cycle vertices have a single preimage.

use crate::graph::{
    Cycle, Edge, EdgeId, LabeledGraph, Marking, VertexId, Weight,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover degree {0} < 2")]
    BadDegree(u64),
    #[error("not a simple cycle")]
    NotASimpleCycle,
    #[error("cycle weight below k: edge `{edge}` has weight {weight} < {k}")]
    CycleWeightBelowK { edge: String, weight: String, k: u64 },
    #[error("no simple cycle with edge set {0:?} in the current graph")]
    NoSuchCycle(Vec<String>),
    #[error("graph error in cover result: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// Per-vertex flags carried through cover iterations. On source graphs the
/// flags come from the local models: full vertices are small, and so are
/// hollow trivalent vertices with a polyhedral triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexFlags {
    pub full: bool,
    pub small: bool,
}

/// A labeled graph together with smallness bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedGraph {
    pub graph: LabeledGraph,
    pub flags: BTreeMap<VertexId, VertexFlags>,
}

impl FlaggedGraph {
    pub fn small_vertices(&self) -> Vec<&VertexId> {
        self.flags
            .iter()
            .filter(|(_, f)| f.small)
            .map(|(v, _)| v)
            .collect()
    }
}

/// One application of the branched-cover construction, with the vertex and
/// edge correspondences a replayable certificate needs.
#[derive(Debug, Clone)]
pub struct CoverStep {
    pub k: u64,
    pub cycle: Cycle,
    pub result: LabeledGraph,
    /// result vertex -> base vertex
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// result edge -> base edge
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

/// Small points of a cover, itemized by origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallCount {
    pub k: u64,
    /// Small vertices of the base off the cycle; each lifts to k small points.
    pub off_cycle_small: usize,
    /// Full vertices of the base on the cycle; each lifts to one small point.
    pub on_cycle_full: usize,
}

impl SmallCount {
    pub fn total(&self) -> usize {
        self.k as usize * self.off_cycle_small + self.on_cycle_full
    }
}

impl fmt::Display for SmallCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} x {} off-cycle small + {} on-cycle full",
            self.total(),
            self.k,
            self.off_cycle_small,
            self.on_cycle_full
        )
    }
}

fn copy_vertex(v: &VertexId, i: u64) -> VertexId {
    VertexId::new(format!("{v}#{i}"))
}

fn copy_edge(e: &EdgeId, i: u64) -> EdgeId {
    EdgeId::new(format!("{e}#{i}"))
}

/// Builds the k-fold cover of `g` branched along `cycle`.
pub fn branched_cover(g: &LabeledGraph, cycle: &Cycle, k: u64) -> Result<CoverStep, CoverError> {
    if k < 2 {
        return Err(CoverError::BadDegree(k));
    }
    if !cycle.validate(g) {
        return Err(CoverError::NotASimpleCycle);
    }
    let kw = Weight::from_integer(k);
    for e in &cycle.edges {
        let w = g.edge(e).unwrap().weight;
        if w < kw {
            return Err(CoverError::CycleWeightBelowK {
                edge: e.as_str().to_owned(),
                weight: w.to_string(),
                k,
            });
        }
    }

    let on_cycle: BTreeSet<VertexId> = cycle.vertex_set();
    let cycle_edges: BTreeSet<EdgeId> = cycle.edge_set();

    let mut vertices: Vec<(VertexId, Marking)> = Vec::new();
    let mut vertex_map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (v, m) in g.vertices() {
        if on_cycle.contains(v) {
            vertices.push((v.clone(), m));
            vertex_map.insert(v.clone(), v.clone());
        } else {
            for i in 1..=k {
                let c = copy_vertex(v, i);
                vertices.push((c.clone(), m));
                vertex_map.insert(c, v.clone());
            }
        }
    }

    let lift = |v: &VertexId, i: u64| -> VertexId {
        if on_cycle.contains(v) {
            v.clone()
        } else {
            copy_vertex(v, i)
        }
    };

    let mut edges: Vec<(EdgeId, VertexId, VertexId, Weight)> = Vec::new();
    let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (id, e) in g.edges() {
        if cycle_edges.contains(id) {
            if e.weight > kw {
                edges.push((
                    id.clone(),
                    e.ends[0].clone(),
                    e.ends[1].clone(),
                    e.weight / kw,
                ));
                edge_map.insert(id.clone(), id.clone());
            }
            // weight exactly k: the edge disappears from the cover
        } else {
            for i in 1..=k {
                let c = copy_edge(id, i);
                edges.push((c.clone(), lift(&e.ends[0], i), lift(&e.ends[1], i), e.weight));
                edge_map.insert(c, id.clone());
            }
        }
    }

    let result = LabeledGraph::derived(vertices, edges)?;
    Ok(CoverStep {
        k,
        cycle: cycle.clone(),
        result,
        vertex_map,
        edge_map,
    })
}

/// Counts the small points of a cover from the base graph's flags:
/// `k * (small off cycle) + (full on cycle)`. On-cycle hollow vertices
/// contribute nothing; their covered neighborhoods are not classified, so
/// the count is a deliberate under-estimate.
pub fn small_count(step: &CoverStep, base_flags: &BTreeMap<VertexId, VertexFlags>) -> SmallCount {
    let on_cycle = step.cycle.vertex_set();
    let mut off_small = 0usize;
    let mut on_full = 0usize;
    for (v, f) in base_flags {
        if on_cycle.contains(v) {
            if f.full {
                on_full += 1;
            }
        } else if f.small {
            off_small += 1;
        }
    }
    SmallCount {
        k: step.k,
        off_cycle_small: off_small,
        on_cycle_full: on_full,
    }
}

/// Flags for the cover result. Off-cycle copies inherit the base flags
/// (their neighborhoods lift isometrically). The preimage of an on-cycle
/// full vertex is a small point, but its covered space of directions is not
/// classified further, so it keeps `small` and loses `full`; an on-cycle
/// hollow small vertex loses `small` for the same reason. Returns the new
/// flags plus the vertices whose smallness was dropped.
pub fn lift_flags(
    step: &CoverStep,
    base_flags: &BTreeMap<VertexId, VertexFlags>,
) -> (BTreeMap<VertexId, VertexFlags>, Vec<VertexId>) {
    let on_cycle = step.cycle.vertex_set();
    let mut out = BTreeMap::new();
    let mut demoted = Vec::new();
    for v in step.result.vertex_ids() {
        let base = &step.vertex_map[v];
        let f = base_flags[base];
        if on_cycle.contains(base) {
            if f.full {
                out.insert(v.clone(), VertexFlags { full: false, small: true });
            } else {
                if f.small {
                    demoted.push(v.clone());
                }
                out.insert(v.clone(), VertexFlags { full: false, small: false });
            }
        } else {
            out.insert(v.clone(), f);
        }
    }
    (out, demoted)
}

/// One step of a cover plan: the cycle is named by its sorted edge-id set in
/// the current graph, which identifies a simple cycle uniquely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub cycle_edges: Vec<EdgeId>,
    pub k: u64,
}

impl PlanStep {
    pub fn new(mut cycle_edges: Vec<EdgeId>, k: u64) -> Self {
        cycle_edges.sort();
        PlanStep { cycle_edges, k }
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub plan: PlanStep,
    pub count: SmallCount,
    pub demoted: Vec<VertexId>,
}

/// Result of applying a cover plan left to right.
#[derive(Debug, Clone)]
pub struct CoverTrace {
    pub steps: Vec<TraceStep>,
    pub final_graph: FlaggedGraph,
}

impl CoverTrace {
    pub fn max_small_count(&self) -> usize {
        self.steps.iter().map(|s| s.count.total()).max().unwrap_or(0)
    }

    pub fn demoted_vertices(&self) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self
            .steps
            .iter()
            .flat_map(|s| s.demoted.iter().cloned())
            .collect();
        all.sort();
        all.dedup();
        all
    }
}

/// Finds the simple cycle of `g` with the given sorted edge-id set.
pub fn resolve_cycle(g: &LabeledGraph, cycle_edges: &[EdgeId]) -> Result<Cycle, CoverError> {
    let want: Vec<EdgeId> = {
        let mut v = cycle_edges.to_vec();
        v.sort();
        v
    };
    crate::graph::simple_cycles(g)
        .into_iter()
        .find(|c| c.selector() == want)
        .ok_or_else(|| {
            CoverError::NoSuchCycle(want.iter().map(|e| e.as_str().to_owned()).collect())
        })
}

/// Applies a sequence of branched covers, tracking flags and small counts.
/// The empty plan returns the input unchanged.
pub fn iterate_covers(start: &FlaggedGraph, plan: &[PlanStep]) -> Result<CoverTrace, CoverError> {
    let mut current = start.clone();
    let mut steps = Vec::new();
    for ps in plan {
        let cycle = resolve_cycle(&current.graph, &ps.cycle_edges)?;
        let step = branched_cover(&current.graph, &cycle, ps.k)?;
        let count = small_count(&step, &current.flags);
        let (flags, demoted) = lift_flags(&step, &current.flags);
        current = FlaggedGraph {
            graph: step.result.clone(),
            flags,
        };
        steps.push(TraceStep {
            plan: ps.clone(),
            count,
            demoted,
        });
    }
    Ok(CoverTrace {
        steps,
        final_graph: current,
    })
}

/// Counting identities of the construction, checked by tests and usable as a
/// cross-check on randomized instances:
/// `V' = |V on c| + k * |V off c|` and
/// `E' = |{e in c : w(e) > k}| + k * (E - |c|)`.
pub fn count_identities_hold(g: &LabeledGraph, step: &CoverStep) -> bool {
    let on_cycle = step.cycle.vertex_set();
    let v_on = on_cycle.len();
    let v_off = g.vertex_count() - v_on;
    let kw = Weight::from_integer(step.k);
    let heavy: usize = step
        .cycle
        .edges
        .iter()
        .filter(|e| g.edge(e).unwrap().weight > kw)
        .count();
    let expect_v = v_on + step.k as usize * v_off;
    let expect_e = heavy + step.k as usize * (g.edge_count() - step.cycle.len());
    let incidence_ok = step.result.edges().all(|(id, e)| {
        let base_edge: &Edge = g.edge(&step.edge_map[id]).unwrap();
        let mut lifted: Vec<&VertexId> =
            vec![&step.vertex_map[&e.ends[0]], &step.vertex_map[&e.ends[1]]];
        let mut base: Vec<&VertexId> = vec![&base_edge.ends[0], &base_edge.ends[1]];
        lifted.sort();
        base.sort();
        lifted == base
    });
    step.result.vertex_count() == expect_v
        && step.result.edge_count() == expect_e
        && incidence_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{profile, simple_cycles, weight};

    fn flags_all_full(g: &LabeledGraph) -> FlaggedGraph {
        let flags = g
            .vertices()
            .map(|(v, m)| {
                (
                    v.clone(),
                    VertexFlags {
                        full: m == Marking::Full,
                        small: m == Marking::Full,
                    },
                )
            })
            .collect();
        FlaggedGraph {
            graph: g.clone(),
            flags,
        }
    }

    fn graph18_shape(loop_weight: u64) -> LabeledGraph {
        LabeledGraph::source(
            [
                (VertexId::from("c"), Marking::Full),
                (VertexId::from("p"), Marking::Full),
            ],
            [(
                EdgeId::from("l"),
                VertexId::from("c"),
                VertexId::from("c"),
                weight(loop_weight),
            )],
        )
        .unwrap()
    }

    #[test]
    fn graph18_cover_has_k_plus_one_small_points() {
        for k in [2u64, 3] {
            let g = graph18_shape(k);
            let fg = flags_all_full(&g);
            let cycle = simple_cycles(&g).into_iter().next().unwrap();
            let step = branched_cover(&g, &cycle, k).unwrap();
            let count = small_count(&step, &fg.flags);
            assert_eq!(count.total(), k as usize + 1);
        }
    }

    #[test]
    fn weight_equal_k_edge_disappears() {
        let g = graph18_shape(2);
        let cycle = simple_cycles(&g).into_iter().next().unwrap();
        let step = branched_cover(&g, &cycle, 2).unwrap();
        assert_eq!(step.result.edge_count(), 0);
        // On-cycle vertex retained, off-cycle vertex doubled.
        assert_eq!(step.result.vertex_count(), 3);
        assert_eq!(step.result.valency(&VertexId::from("c")), 0);
        assert!(count_identities_hold(&g, &step));
    }

    #[test]
    fn theta_cover_doubles_the_chord() {
        let g = crate::graph::LabeledGraph::source(
            [
                (VertexId::from("a"), Marking::Full),
                (VertexId::from("b"), Marking::Full),
            ],
            [
                (EdgeId::from("e0"), VertexId::from("a"), VertexId::from("b"), weight(2)),
                (EdgeId::from("e1"), VertexId::from("a"), VertexId::from("b"), weight(2)),
                (EdgeId::from("e2"), VertexId::from("a"), VertexId::from("b"), weight(5)),
            ],
        )
        .unwrap();
        let cycle = simple_cycles(&g)
            .into_iter()
            .find(|c| c.selector() == vec![EdgeId::from("e0"), EdgeId::from("e1")])
            .unwrap();
        let step = branched_cover(&g, &cycle, 2).unwrap();
        // Cross-check with the edge-count identity: E' = k*E - k*|c| + heavy.
        assert_eq!(step.result.edge_count(), 2 * 3 - 2 * 2 + 0);
        assert!(count_identities_hold(&g, &step));
        // The chord lifts to two parallel copies between the cycle vertices.
        let parallel: Vec<_> = step
            .result
            .edges()
            .filter(|(_, e)| !e.is_loop())
            .collect();
        assert_eq!(parallel.len(), 2);
        for (_, e) in parallel {
            assert_eq!(e.weight, weight(5));
        }
        profile(&step.result);
    }

    #[test]
    fn cover_of_cycle_with_light_edge_is_rejected() {
        let g = graph18_shape(2);
        let cycle = simple_cycles(&g).into_iter().next().unwrap();
        let err = branched_cover(&g, &cycle, 3).unwrap_err();
        assert!(matches!(err, CoverError::CycleWeightBelowK { .. }));
    }

    #[test]
    fn empty_plan_is_identity() {
        let g = graph18_shape(2);
        let fg = flags_all_full(&g);
        let trace = iterate_covers(&fg, &[]).unwrap();
        assert_eq!(trace.final_graph.graph, g);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn disjoint_cycles_iterated_cover_reaches_four_small_points() {
        // Two loops of weight 2 at full vertices; doubling along the first
        // then along a lift of the second accumulates four small points.
        let v = |s: &str| VertexId::from(s);
        let g = LabeledGraph::source(
            [(v("a"), Marking::Full), (v("b"), Marking::Full)],
            [
                (EdgeId::from("la"), v("a"), v("a"), weight(2)),
                (EdgeId::from("lb"), v("b"), v("b"), weight(2)),
            ],
        )
        .unwrap();
        let fg = flags_all_full(&g);
        let plan = vec![
            PlanStep::new(vec![EdgeId::from("la")], 2),
            PlanStep::new(vec![EdgeId::from("lb#1")], 2),
        ];
        let trace = iterate_covers(&fg, &plan).unwrap();
        assert_eq!(trace.steps[0].count.total(), 3); // a + two copies of b
        assert!(trace.steps[1].count.total() >= 4);
    }

    #[test]
    fn graph10_full_tetrahedral_triple_cover_counts_four() {
        // Loop of weight 3 at a full trivalent vertex plus a pendant edge:
        // the triple cover along the loop has 3*1 + 1 = 4 small points.
        let v = |s: &str| VertexId::from(s);
        let g = LabeledGraph::source(
            [(v("a"), Marking::Full), (v("b"), Marking::Full)],
            [
                (EdgeId::from("l"), v("a"), v("a"), weight(3)),
                (EdgeId::from("e"), v("a"), v("b"), weight(2)),
            ],
        )
        .unwrap();
        let fg = flags_all_full(&g);
        let trace = iterate_covers(&fg, &[PlanStep::new(vec![EdgeId::from("l")], 3)]).unwrap();
        assert_eq!(trace.steps[0].count.total(), 3 * 1 + 1);
    }

    #[test]
    fn graph14_both_full_double_cover_counts_four() {
        // 2-cycle between two full trivalent vertices, both with a pendant
        // to a shared full valency-2 vertex; doubling along the 2-cycle
        // yields 2 on-cycle + 2 lifted = 4 small points.
        let v = |s: &str| VertexId::from(s);
        let g = LabeledGraph::source(
            [
                (v("h1"), Marking::Full),
                (v("h2"), Marking::Full),
                (v("f"), Marking::Full),
            ],
            [
                (EdgeId::from("c0"), v("h1"), v("h2"), weight(2)),
                (EdgeId::from("c1"), v("h1"), v("h2"), weight(2)),
                (EdgeId::from("p1"), v("h1"), v("f"), weight(2)),
                (EdgeId::from("p2"), v("h2"), v("f"), weight(2)),
            ],
        )
        .unwrap();
        let fg = flags_all_full(&g);
        let trace = iterate_covers(
            &fg,
            &[PlanStep::new(vec![EdgeId::from("c0"), EdgeId::from("c1")], 2)],
        )
        .unwrap();
        assert_eq!(trace.steps[0].count.total(), 4);
    }

    #[test]
    fn k4_two_full_vertices_two_step_plan_reaches_four() {
        // Complete graph on four vertices with two full trivalent vertices:
        // cover along the triangle avoiding one full vertex, then along a
        // 4-cycle through both of its lifts.
        let v = |i: usize| VertexId::new(format!("v{i}"));
        let pairs = [(0usize, 1usize), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let marks = [Marking::Full, Marking::Full, Marking::Hollow, Marking::Hollow];
        let g = LabeledGraph::source(
            (0..4).map(|i| (v(i), marks[i])),
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| (EdgeId::new(format!("e{i}")), v(a), v(b), weight(2))),
        )
        .unwrap();
        let fg = flags_all_full(&g);
        // Triangle on v1, v2, v3 avoids v0: edges e3 (1,2), e4 (1,3), e5 (2,3).
        let plan1 = PlanStep::new(
            vec![EdgeId::from("e3"), EdgeId::from("e4"), EdgeId::from("e5")],
            2,
        );
        let trace = iterate_covers(&fg, &[plan1.clone()]).unwrap();
        assert_eq!(trace.steps[0].count.total(), 3);
        // In the cover, v0 lifts to v0#1, v0#2. The 4-cycle v0#1-v2-v0#2-v3
        // avoids the full vertex v1, which then lifts to two more smalls.
        let step2 = PlanStep::new(
            vec![
                EdgeId::from("e1#1"),
                EdgeId::from("e1#2"),
                EdgeId::from("e2#1"),
                EdgeId::from("e2#2"),
            ],
            2,
        );
        let trace = iterate_covers(&fg, &[plan1, step2]).unwrap();
        assert_eq!(trace.steps[1].count.total(), 4);
    }

    #[test]
    fn randomized_count_identities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0DE);
        let mut checked = 0;
        while checked < 1000 {
            let n = rng.gen_range(1..=5usize);
            let v = |i: usize| VertexId::new(format!("v{i}"));
            let mut edges = Vec::new();
            let edge_count = rng.gen_range(1..=7usize);
            for i in 0..edge_count {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                let w = rng.gen_range(2..=9u64);
                edges.push((EdgeId::new(format!("e{i}")), v(a), v(b), weight(w)));
            }
            let g = LabeledGraph::source(
                (0..n).map(|i| {
                    (
                        v(i),
                        if rng.gen_bool(0.5) {
                            Marking::Full
                        } else {
                            Marking::Hollow
                        },
                    )
                }),
                edges,
            )
            .unwrap();
            let cycles = simple_cycles(&g);
            if cycles.is_empty() {
                continue;
            }
            let cycle = &cycles[rng.gen_range(0..cycles.len())];
            let legal: Vec<u64> = [2u64, 3]
                .into_iter()
                .filter(|&k| cycle.min_weight(&g) >= Weight::from_integer(k))
                .collect();
            if legal.is_empty() {
                continue;
            }
            let k = legal[rng.gen_range(0..legal.len())];
            let step = branched_cover(&g, cycle, k).unwrap();
            assert!(count_identities_hold(&g, &step), "identities failed");
            profile(&step.result); // Euler identities assert internally
            checked += 1;
        }
    }
}
