//! Exhaustive generation of candidate source graphs within bounds, and
//! matching of admissible graphs against the 18-family classification.
//!
//! Generation goes shapes -> markings -> weights, deduplicating by canonical
//! form at each stage. Hollow vertices are only generated at trivalent
//! positions (hollow points of lower valency are edge-interior, not
//! vertices), graphs without a full vertex are skipped, and weights at
//! trivalent vertices are pruned against the admissible triple families
//! during assignment.

use crate::graph::{
    canonical_form, weight, EdgeId, LabeledGraph, Marking, VertexId, Weight,
};
use crate::models::triple_class;
use crate::rules::{check, Verdict};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashSet};

/// Enumeration bounds. Defaults cover the full classification: at most four
/// vertices, six edges, weight seven and three independent cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_weight: u64,
    pub max_cycles: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_vertices: 4,
            max_edges: 6,
            max_weight: 7,
            max_cycles: 3,
        }
    }
}

type Shape = Vec<(usize, usize)>;

fn shape_components(n: usize, shape: &Shape) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &(a, b) in shape {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

fn shape_cycles_in_bounds(n: usize, shape: &Shape, bounds: &Bounds) -> bool {
    let b0 = shape_components(n, shape);
    shape.len() + b0 - n <= bounds.max_cycles
}

fn shapes_on(n: usize, bounds: &Bounds) -> Vec<Shape> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a..n {
            pairs.push((a, b));
        }
    }
    let mut out = Vec::new();
    let mut current: Shape = Vec::new();
    let mut deg = vec![0usize; n];
    gen_shapes(&pairs, 0, bounds, n, &mut current, &mut deg, &mut out);
    out
}

fn gen_shapes(
    pairs: &[(usize, usize)],
    start: usize,
    bounds: &Bounds,
    n: usize,
    current: &mut Shape,
    deg: &mut Vec<usize>,
    out: &mut Vec<Shape>,
) {
    if !shape_cycles_in_bounds(n, current, bounds) {
        // Adding edges never lowers the cycle count, so prune here.
        return;
    }
    out.push(current.clone());
    if current.len() == bounds.max_edges {
        return;
    }
    for pi in start..pairs.len() {
        let (a, b) = pairs[pi];
        let add_a = if a == b { 2 } else { 1 };
        if deg[a] + add_a > 3 || (a != b && deg[b] + 1 > 3) {
            continue;
        }
        deg[a] += add_a;
        if a != b {
            deg[b] += 1;
        }
        current.push((a, b));
        gen_shapes(pairs, pi, bounds, n, current, deg, out);
        current.pop();
        deg[a] -= add_a;
        if a != b {
            deg[b] -= 1;
        }
    }
}

fn vertex_id(i: usize) -> VertexId {
    VertexId::new(format!("v{i}"))
}

fn edge_id(i: usize) -> EdgeId {
    EdgeId::new(format!("e{i}"))
}

fn build_graph(n: usize, shape: &Shape, marks: &[Marking], weights: &[u64]) -> LabeledGraph {
    LabeledGraph::source(
        (0..n).map(|i| (vertex_id(i), marks[i])),
        shape
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (edge_id(i), vertex_id(a), vertex_id(b), weight(weights[i]))),
    )
    .expect("generated graphs are valid sources")
}

/// Is there a way to extend `assigned` into an admissible trivalent triple
/// using weights in `2..=max_w`?
fn triple_extendable(assigned: &[u64], max_w: u64) -> bool {
    match assigned.len() {
        3 => triple_class([assigned[0], assigned[1], assigned[2]]).is_some(),
        2 => (2..=max_w).any(|w| triple_class([assigned[0], assigned[1], w]).is_some()),
        1 => (2..=max_w)
            .any(|w1| (w1..=max_w).any(|w2| triple_class([assigned[0], w1, w2]).is_some())),
        0 => true,
        _ => false,
    }
}

fn assign_weights(
    n: usize,
    shape: &Shape,
    marks: &[Marking],
    bounds: &Bounds,
    mut visit: impl FnMut(LabeledGraph),
) {
    let deg = shape_degrees(n, shape);
    // Incident edge indices per trivalent vertex; a loop contributes its
    // edge index once per slot.
    let mut trivalent_slots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &d) in deg.iter().enumerate() {
        if d == 3 {
            trivalent_slots.insert(v, incident_slots(shape, v));
        }
    }
    let mut weights = vec![0u64; shape.len()];
    assign_rec(shape, &trivalent_slots, bounds, 0, &mut weights, &mut |ws| {
        visit(build_graph(n, shape, marks, ws));
    });
}

fn shape_degrees(n: usize, shape: &Shape) -> Vec<usize> {
    let mut d = vec![0usize; n];
    for &(a, b) in shape {
        d[a] += if a == b { 2 } else { 1 };
        if a != b {
            d[b] += 1;
        }
    }
    d
}

fn incident_slots(shape: &Shape, v: usize) -> Vec<usize> {
    let mut slots = Vec::new();
    for (ei, &(a, b)) in shape.iter().enumerate() {
        if a == v {
            slots.push(ei);
        }
        if b == v {
            slots.push(ei);
        }
    }
    slots
}

fn assign_rec(
    shape: &Shape,
    trivalent_slots: &BTreeMap<usize, Vec<usize>>,
    bounds: &Bounds,
    idx: usize,
    weights: &mut Vec<u64>,
    visit: &mut impl FnMut(&Vec<u64>),
) {
    if idx == shape.len() {
        visit(weights);
        return;
    }
    'next_weight: for w in 2..=bounds.max_weight {
        weights[idx] = w;
        for slots in trivalent_slots.values() {
            let assigned: Vec<u64> = slots
                .iter()
                .filter(|&&ei| ei <= idx)
                .map(|&ei| weights[ei])
                .collect();
            if !triple_extendable(&assigned, bounds.max_weight) {
                continue 'next_weight;
            }
        }
        assign_rec(shape, trivalent_slots, bounds, idx + 1, weights, visit);
    }
    weights[idx] = 0;
}

/// All candidate source graphs within bounds, up to isomorphism: every
/// non-isomorphic multigraph with at most `max_vertices` vertices,
/// `max_edges` edges and `max_cycles` independent cycles, hollow marks only
/// at trivalent vertices, at least one full vertex, weights `2..=max_weight`
/// with admissible triples at trivalent vertices.
pub fn candidates(bounds: &Bounds) -> Vec<LabeledGraph> {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out: Vec<LabeledGraph> = Vec::new();
    for n in 1..=bounds.max_vertices {
        for shape in shapes_on(n, bounds) {
            let deg = shape_degrees(n, &shape);
            for mask in 0..(1u32 << n) {
                let marks: Vec<Marking> = (0..n)
                    .map(|i| {
                        if mask & (1 << i) != 0 {
                            Marking::Hollow
                        } else {
                            Marking::Full
                        }
                    })
                    .collect();
                if marks
                    .iter()
                    .enumerate()
                    .any(|(i, &m)| m == Marking::Hollow && deg[i] != 3)
                {
                    continue;
                }
                if marks.iter().all(|&m| m == Marking::Hollow) {
                    continue;
                }
                assign_weights(n, &shape, &marks, bounds, |g| {
                    let key = canonical_form(&g);
                    if seen.insert(key) {
                        out.push(g);
                    }
                });
            }
        }
    }
    out.sort_by_key(canonical_form);
    out
}

/// Runs the admissibility check over every candidate and returns the
/// admissible graphs, deduplicated and sorted by canonical form.
pub fn enumerate(bounds: &Bounds) -> Vec<LabeledGraph> {
    let cands = candidates(bounds);
    let mut admissible: Vec<(Vec<u8>, LabeledGraph)> = cands
        .into_par_iter()
        .filter_map(|g| match check(&g, None) {
            Ok(Verdict::Admissible(_)) => Some((canonical_form(&g), g)),
            _ => None,
        })
        .collect();
    admissible.sort_by(|a, b| a.0.cmp(&b.0));
    admissible.into_iter().map(|(_, g)| g).collect()
}

/// Weight slot of a family pattern: a printed constant or a free variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatWeight {
    Fixed(u64),
    Var(char),
}

/// Structural template of one family: vertex marks plus weighted edges over
/// pattern positions.
#[derive(Debug, Clone)]
pub struct FamilyPattern {
    pub id: u8,
    pub name: &'static str,
    pub marks: Vec<Marking>,
    pub edges: Vec<(usize, usize, PatWeight)>,
}

/// The eighteen families of admissible singular graphs.
pub fn families() -> Vec<FamilyPattern> {
    use Marking::{Full as F, Hollow as H};
    use PatWeight::{Fixed, Var};
    vec![
        FamilyPattern {
            id: 1,
            name: "one full point",
            marks: vec![F],
            edges: vec![],
        },
        FamilyPattern {
            id: 2,
            name: "two full points",
            marks: vec![F, F],
            edges: vec![],
        },
        FamilyPattern {
            id: 3,
            name: "three full points",
            marks: vec![F, F, F],
            edges: vec![],
        },
        FamilyPattern {
            id: 4,
            name: "single edge",
            marks: vec![F, F],
            edges: vec![(0, 1, Var('k'))],
        },
        FamilyPattern {
            id: 5,
            name: "path of two edges",
            marks: vec![F, F, F],
            edges: vec![(0, 1, Var('k')), (1, 2, Var('l'))],
        },
        FamilyPattern {
            id: 6,
            name: "hollow star (2,2,k)",
            marks: vec![H, F, F, F],
            edges: vec![(0, 1, Fixed(2)), (0, 2, Fixed(2)), (0, 3, Var('k'))],
        },
        FamilyPattern {
            id: 7,
            name: "loop at a full point",
            marks: vec![F],
            edges: vec![(0, 0, Var('k'))],
        },
        FamilyPattern {
            id: 8,
            name: "two-cycle of full points",
            marks: vec![F, F],
            edges: vec![(0, 1, Var('k')), (0, 1, Var('l'))],
        },
        FamilyPattern {
            id: 9,
            name: "triangle of full points",
            marks: vec![F, F, F],
            edges: vec![(0, 1, Var('k')), (1, 2, Var('q')), (0, 2, Var('l'))],
        },
        FamilyPattern {
            id: 10,
            name: "weight-2 loop with a pendant edge",
            marks: vec![F, F],
            edges: vec![(0, 0, Fixed(2)), (0, 1, Var('k'))],
        },
        FamilyPattern {
            id: 11,
            name: "two-cycle (2,k) with pendant at the hollow vertex",
            marks: vec![H, F, F],
            edges: vec![(0, 1, Fixed(2)), (0, 1, Var('k')), (0, 2, Var('l'))],
        },
        FamilyPattern {
            id: 12,
            name: "theta, one hollow and one full vertex",
            marks: vec![H, F],
            edges: vec![(0, 1, Fixed(2)), (0, 1, Var('k')), (0, 1, Var('l'))],
        },
        FamilyPattern {
            id: 13,
            name: "theta, both vertices full",
            marks: vec![F, F],
            edges: vec![(0, 1, Fixed(2)), (0, 1, Var('k')), (0, 1, Var('l'))],
        },
        FamilyPattern {
            id: 14,
            name: "two-cycle of hollow vertices with pendants to a full point",
            marks: vec![H, H, F],
            edges: vec![
                (0, 1, Var('r')),
                (0, 1, Var('q')),
                (0, 2, Var('k')),
                (1, 2, Var('l')),
            ],
        },
        FamilyPattern {
            id: 15,
            name: "two-cycle (2,q), one hollow and one full trivalent vertex",
            marks: vec![H, F, F],
            edges: vec![
                (0, 1, Fixed(2)),
                (0, 1, Var('q')),
                (0, 2, Var('k')),
                (1, 2, Var('l')),
            ],
        },
        FamilyPattern {
            id: 16,
            name: "complete graph on one full and three hollow vertices",
            marks: vec![F, H, H, H],
            edges: vec![
                (0, 1, Fixed(2)),
                (0, 2, Var('k')),
                (0, 3, Var('l')),
                (1, 2, Var('q')),
                (1, 3, Var('s')),
                (2, 3, Var('r')),
            ],
        },
        FamilyPattern {
            id: 17,
            name: "single edge plus an isolated full point",
            marks: vec![F, F, F],
            edges: vec![(0, 1, Var('k'))],
        },
        FamilyPattern {
            id: 18,
            name: "weight-2 loop plus an isolated full point",
            marks: vec![F, F],
            edges: vec![(0, 0, Fixed(2))],
        },
    ]
}

/// Family ids whose pattern matches `g` (marking- and weight-consistent
/// isomorphism onto the template).
pub fn match_graph(g: &LabeledGraph) -> Vec<u8> {
    families()
        .iter()
        .filter(|f| pattern_matches(g, f))
        .map(|f| f.id)
        .collect()
}

fn pattern_matches(g: &LabeledGraph, pat: &FamilyPattern) -> bool {
    let n = pat.marks.len();
    if g.vertex_count() != n || g.edge_count() != pat.edges.len() {
        return false;
    }
    let verts: Vec<&VertexId> = g.vertex_ids().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |perm| {
        for (i, v) in verts.iter().enumerate() {
            if g.marking(v).unwrap() != pat.marks[perm[i]] {
                return false;
            }
        }
        // Group pattern edges and graph edges by normalized position pair.
        let mut pat_groups: BTreeMap<(usize, usize), Vec<PatWeight>> = BTreeMap::new();
        for &(a, b, w) in &pat.edges {
            pat_groups.entry((a.min(b), a.max(b))).or_default().push(w);
        }
        let mut graph_groups: BTreeMap<(usize, usize), Vec<Weight>> = BTreeMap::new();
        for (_, e) in g.edges() {
            let pa = perm[verts.iter().position(|v| **v == e.ends[0]).unwrap()];
            let pb = perm[verts.iter().position(|v| **v == e.ends[1]).unwrap()];
            graph_groups
                .entry((pa.min(pb), pa.max(pb)))
                .or_default()
                .push(e.weight);
        }
        if pat_groups.keys().ne(graph_groups.keys()) {
            return false;
        }
        let mut bindings: BTreeMap<char, u64> = BTreeMap::new();
        pat_groups
            .iter()
            .all(|(key, pws)| match_weight_group(pws, &graph_groups[key], &mut bindings))
    })
}

/// Matches a multiset of pattern weights against concrete weights, binding
/// variables consistently. Backtracks over the (tiny) assignment orders.
fn match_weight_group(
    pws: &[PatWeight],
    gws: &[Weight],
    bindings: &mut BTreeMap<char, u64>,
) -> bool {
    if pws.len() != gws.len() {
        return false;
    }
    if pws.is_empty() {
        return true;
    }
    let pw = pws[0];
    for (i, gw) in gws.iter().enumerate() {
        if !gw.is_integer() {
            return false;
        }
        let val = *gw.numer();
        let fresh_binding = matches!(pw, PatWeight::Var(c) if !bindings.contains_key(&c));
        let ok = match pw {
            PatWeight::Fixed(f) => f == val,
            PatWeight::Var(c) => match bindings.get(&c) {
                Some(&bound) => bound == val,
                None => {
                    bindings.insert(c, val);
                    true
                }
            },
        };
        if ok {
            let mut rest: Vec<Weight> = gws.to_vec();
            rest.remove(i);
            if match_weight_group(&pws[1..], &rest, bindings) {
                return true;
            }
        }
        if fresh_binding {
            if let PatWeight::Var(c) = pw {
                bindings.remove(&c);
            }
        }
    }
    false
}

fn permutations(
    perm: &mut Vec<usize>,
    lo: usize,
    visit: &mut impl FnMut(&Vec<usize>) -> bool,
) -> bool {
    if lo + 1 >= perm.len() {
        return visit(perm);
    }
    for i in lo..perm.len() {
        perm.swap(lo, i);
        if permutations(perm, lo + 1, visit) {
            perm.swap(lo, i);
            return true;
        }
        perm.swap(lo, i);
    }
    false
}

/// Family-matching report over a set of admissible graphs.
#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub per_graph: Vec<(LabeledGraph, Vec<u8>)>,
    pub family_counts: BTreeMap<u8, usize>,
}

impl FamilyReport {
    pub fn unmatched(&self) -> Vec<&LabeledGraph> {
        self.per_graph
            .iter()
            .filter(|(_, f)| f.is_empty())
            .map(|(g, _)| g)
            .collect()
    }

    pub fn families_hit(&self) -> Vec<u8> {
        self.family_counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn empty_families(&self) -> Vec<u8> {
        self.family_counts
            .iter()
            .filter(|(_, &c)| c == 0)
            .map(|(&id, _)| id)
            .collect()
    }
}

/// Matches every graph against the embedded family patterns.
pub fn match_families(graphs: &[LabeledGraph]) -> FamilyReport {
    let mut family_counts: BTreeMap<u8, usize> = families().iter().map(|f| (f.id, 0)).collect();
    let per_graph: Vec<(LabeledGraph, Vec<u8>)> = graphs
        .iter()
        .map(|g| (g.clone(), match_graph(g)))
        .collect();
    for (_, fams) in &per_graph {
        for f in fams {
            *family_counts.get_mut(f).unwrap() += 1;
        }
    }
    FamilyReport {
        per_graph,
        family_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;

    #[test]
    fn single_vertex_bounds_give_family_one_only() {
        let bounds = Bounds {
            max_vertices: 1,
            max_edges: 0,
            max_weight: 7,
            max_cycles: 3,
        };
        let admissible = enumerate(&bounds);
        assert_eq!(admissible.len(), 1);
        assert_eq!(match_graph(&admissible[0]), vec![1]);
    }

    #[test]
    fn up_to_three_isolated_vertices_give_families_one_to_three() {
        let bounds = Bounds {
            max_vertices: 3,
            max_edges: 0,
            max_weight: 7,
            max_cycles: 3,
        };
        let admissible = enumerate(&bounds);
        assert_eq!(admissible.len(), 3);
        let mut hit: Vec<u8> = admissible.iter().flat_map(|g| match_graph(g)).collect();
        hit.sort_unstable();
        assert_eq!(hit, vec![1, 2, 3]);
    }

    #[test]
    fn loop_of_weight_three_matches_family_seven() {
        let g = LabeledGraph::source(
            [(VertexId::from("x"), Marking::Full)],
            [(
                EdgeId::from("c"),
                VertexId::from("x"),
                VertexId::from("x"),
                weight(3),
            )],
        )
        .unwrap();
        assert_eq!(match_graph(&g), vec![7]);
    }

    #[test]
    fn graph14_shape_matches_family_fourteen() {
        let v = |s: &str| VertexId::from(s);
        let e = |s: &str| EdgeId::from(s);
        let g = LabeledGraph::source(
            [
                (v("h1"), Marking::Hollow),
                (v("h2"), Marking::Hollow),
                (v("f"), Marking::Full),
            ],
            [
                (e("c0"), v("h1"), v("h2"), weight(2)),
                (e("c1"), v("h1"), v("h2"), weight(3)),
                (e("p1"), v("h1"), v("f"), weight(2)),
                (e("p2"), v("h2"), v("f"), weight(3)),
            ],
        )
        .unwrap();
        assert_eq!(match_graph(&g), vec![14]);
    }

    #[test]
    fn path_of_full_vertices_matches_family_five() {
        let v = |s: &str| VertexId::from(s);
        let g = LabeledGraph::source(
            [
                (v("a"), Marking::Full),
                (v("b"), Marking::Full),
                (v("c"), Marking::Full),
            ],
            [
                (EdgeId::from("e0"), v("a"), v("b"), weight(2)),
                (EdgeId::from("e1"), v("b"), v("c"), weight(2)),
            ],
        )
        .unwrap();
        assert_eq!(match_graph(&g), vec![5]);
    }

    #[test]
    fn random_in_bounds_graphs_have_representatives_in_the_stream() {
        use rand::{Rng, SeedableRng};
        let bounds = Bounds::default();
        let cands = candidates(&bounds);
        let canon: HashSet<Vec<u8>> = cands.iter().map(canonical_form).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut produced = 0;
        'outer: while produced < 200 {
            let n = rng.gen_range(1..=bounds.max_vertices);
            let mut deg = vec![0usize; n];
            let mut shape: Shape = Vec::new();
            for _ in 0..rng.gen_range(0..=bounds.max_edges) {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                let (a, b) = (a.min(b), a.max(b));
                let add = if a == b { 2 } else { 1 };
                if deg[a] + add > 3 || (a != b && deg[b] + 1 > 3) {
                    continue;
                }
                deg[a] += add;
                if a != b {
                    deg[b] += 1;
                }
                shape.push((a, b));
            }
            if !shape_cycles_in_bounds(n, &shape, &bounds) {
                continue;
            }
            let marks: Vec<Marking> = (0..n)
                .map(|i| {
                    if deg[i] == 3 && rng.gen_bool(0.5) {
                        Marking::Hollow
                    } else {
                        Marking::Full
                    }
                })
                .collect();
            if marks.iter().all(|&m| m == Marking::Hollow) {
                continue;
            }
            // Rejection-sample weights until the trivalent triples work out.
            for _ in 0..200 {
                let ws: Vec<u64> = (0..shape.len())
                    .map(|_| rng.gen_range(2..=bounds.max_weight))
                    .collect();
                let ok = (0..n).filter(|&i| deg[i] == 3).all(|i| {
                    let triple: Vec<u64> = incident_slots(&shape, i)
                        .iter()
                        .map(|&ei| ws[ei])
                        .collect();
                    triple_class([triple[0], triple[1], triple[2]]).is_some()
                });
                if ok {
                    let g = build_graph(n, &shape, &marks, &ws);
                    assert!(
                        canon.contains(&canonical_form(&g)),
                        "missing representative for a random in-bounds graph"
                    );
                    produced += 1;
                    continue 'outer;
                }
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let bounds = Bounds {
            max_vertices: 2,
            max_edges: 3,
            max_weight: 4,
            max_cycles: 2,
        };
        let a = enumerate(&bounds);
        let b = enumerate(&bounds);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!(is_isomorphic(x, y));
        }
    }
}
