//! Admissibility of source labeled graphs.
//!
//! `check` applies the necessary conditions for a labeled graph to arise as
//! the singular set of a positively curved, boundaryless cohomogeneity-three
//! quotient, and returns either a local-model assignment or a replayable
//! exclusion certificate.
//!
//! Rules, in default order after model assignment:
//!   R3  at most three small points in the graph itself;
//!   R4  no closed geodesic-continuation walk through orbifold points only;
//!   R6  no two vertex-disjoint simple cycles (a readable special case of R5);
//!   R5  no branched-cover plan of depth <= 3 with degrees in {2,3} reaching
//!       more than three small points;
//!   R7  knot rule, when knot data is supplied for cycles.
//!
//! Valency and local-model checks (R1, R2) always run first: every later
//! rule consumes the model assignment they produce.

use crate::covers::{
    branched_cover, iterate_covers, resolve_cycle, small_count, FlaggedGraph, PlanStep,
    VertexFlags,
};
use crate::graph::{simple_cycles, EdgeId, HalfEdge, LabeledGraph, Marking, VertexId, Weight};
use crate::models::{edge_interior_marker, models_for, LocalModel, ModelError};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type ModelAssignment = BTreeMap<VertexId, LocalModel>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("not a source graph: {0}")]
    NotSource(String),
    #[error("precondition violated: no full vertex (the quotients classified here have at least one non-orbifold point)")]
    MissingFullVertex,
    #[error("knot data names no cycle of the graph: {0:?}")]
    UnknownKnotCycle(Vec<String>),
    #[error("graph is not a single loop at one full vertex: {0}")]
    BadShape(String),
    #[error("unsupported knot `{0}`")]
    UnsupportedKnot(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    ValencyBound,
    NoLocalModel,
    SmallPointBound,
    AllOrbifoldGeodesic,
    DisjointCycles,
    CoverSmallPointBound,
    KnotRule,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::ValencyBound => "valency-bound",
            RuleId::NoLocalModel => "no-local-model",
            RuleId::SmallPointBound => "small-point-bound",
            RuleId::AllOrbifoldGeodesic => "all-orbifold-geodesic",
            RuleId::DisjointCycles => "disjoint-cycles",
            RuleId::CoverSmallPointBound => "cover-small-point-bound",
            RuleId::KnotRule => "knot-rule",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        Some(match s {
            "valency-bound" => RuleId::ValencyBound,
            "no-local-model" => RuleId::NoLocalModel,
            "small-point-bound" => RuleId::SmallPointBound,
            "all-orbifold-geodesic" => RuleId::AllOrbifoldGeodesic,
            "disjoint-cycles" => RuleId::DisjointCycles,
            "cover-small-point-bound" => RuleId::CoverSmallPointBound,
            "knot-rule" => RuleId::KnotRule,
            _ => return None,
        })
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Knots that can decorate a singular cycle. The cyclic-branched-cover
/// fundamental group orders are static facts, never computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KnotKind {
    Unknot,
    Trefoil,
}

impl KnotKind {
    /// |pi_1| of the k-fold cyclic branched cover of the 3-sphere along the
    /// knot, for the degrees the engine uses.
    pub fn cover_group_order(self, k: u64) -> u64 {
        match (self, k) {
            (KnotKind::Unknot, _) => 1,
            (KnotKind::Trefoil, 2) => 3,
            (KnotKind::Trefoil, 3) => 8,
            (KnotKind::Trefoil, _) => panic!("cover degree {k} outside the static table"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KnotKind::Unknot => "unknot",
            KnotKind::Trefoil => "trefoil",
        }
    }

    pub fn parse(s: &str) -> Result<KnotKind, CheckError> {
        match s {
            "unknot" => Ok(KnotKind::Unknot),
            "trefoil" => Ok(KnotKind::Trefoil),
            other => Err(CheckError::UnsupportedKnot(other.to_owned())),
        }
    }
}

impl fmt::Display for KnotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Knot decorations keyed by the sorted edge set of the decorated cycle.
pub type KnotAssignments = BTreeMap<Vec<EdgeId>, KnotKind>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Valency {
        vertex: VertexId,
        valency: usize,
    },
    NoModel {
        vertex: VertexId,
    },
    SmallBound {
        vertices: Vec<VertexId>,
    },
    /// Closed continuation walk avoiding full vertices, as the cyclic
    /// sequence of arrival half-edges.
    Geodesic {
        walk: Vec<HalfEdge>,
    },
    Disjoint {
        cycle1: Vec<EdgeId>,
        cycle2: Vec<EdgeId>,
    },
    Cover {
        plan: Vec<PlanStep>,
        counts: Vec<usize>,
        /// On-cycle hollow small vertices whose covered neighborhoods are
        /// not classified; their contribution was conservatively dropped.
        demoted: Vec<VertexId>,
    },
    Knot {
        cycle: Vec<EdgeId>,
        knot: KnotKind,
        degree: u64,
        count: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionCertificate {
    pub rule: RuleId,
    pub witness: Witness,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Admissible(ModelAssignment),
    Excluded(ExclusionCertificate),
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible(_))
    }

    pub fn certificate(&self) -> Option<&ExclusionCertificate> {
        match self {
            Verdict::Admissible(_) => None,
            Verdict::Excluded(c) => Some(c),
        }
    }
}

/// Default evaluation order of the post-assignment rules. Disjoint cycles
/// run before the cover search so the structural certificate is the one
/// reported; the cover search subsumes it logically.
pub const DEFAULT_RULE_ORDER: [RuleId; 5] = [
    RuleId::SmallPointBound,
    RuleId::AllOrbifoldGeodesic,
    RuleId::DisjointCycles,
    RuleId::CoverSmallPointBound,
    RuleId::KnotRule,
];

/// Depth cap of the branched-cover search. Every exclusion in the
/// classification uses at most two covers; deeper plans multiply small
/// points past configurations the classification keeps (three covers
/// already exclude every complete-graph labeling), so the search stops at
/// the depth the case analysis itself needs.
pub const COVER_SEARCH_DEPTH: usize = 2;

/// Cover degrees the search tries.
pub const COVER_DEGREES: [u64; 2] = [2, 3];

/// Model for one vertex, or a certificate if none exists. A hollow vertex of
/// valency two with equal incident weights stands for an edge-interior
/// subdivision marker (this is how vertex-free circle components are
/// written down) and receives the pass-through model.
pub fn vertex_model(g: &LabeledGraph, v: &VertexId) -> Result<LocalModel, ExclusionCertificate> {
    let marking = g.marking(v).expect("vertex in graph");
    let weights: Vec<u64> = g
        .half_edges_at(v)
        .iter()
        .map(|h| {
            let w = g.edge(&h.edge).unwrap().weight;
            debug_assert!(w.is_integer());
            *w.numer()
        })
        .collect();
    if weights.len() > 3 {
        return Err(ExclusionCertificate {
            rule: RuleId::ValencyBound,
            witness: Witness::Valency {
                vertex: v.clone(),
                valency: weights.len(),
            },
        });
    }
    if marking == Marking::Hollow && weights.len() == 2 && weights[0] == weights[1] {
        return Ok(edge_interior_marker(weights[0]));
    }
    let models = match models_for(marking, &weights) {
        Ok(m) => m,
        Err(ModelError::ValencyBound(val)) => {
            return Err(ExclusionCertificate {
                rule: RuleId::ValencyBound,
                witness: Witness::Valency {
                    vertex: v.clone(),
                    valency: val,
                },
            })
        }
        Err(_) => Vec::new(),
    };
    match models.into_iter().next() {
        Some(m) => Ok(m),
        None => Err(ExclusionCertificate {
            rule: RuleId::NoLocalModel,
            witness: Witness::NoModel { vertex: v.clone() },
        }),
    }
}

fn assign_models(g: &LabeledGraph) -> Result<ModelAssignment, ExclusionCertificate> {
    let mut assignment = BTreeMap::new();
    for v in g.vertex_ids() {
        assignment.insert(v.clone(), vertex_model(g, v)?);
    }
    Ok(assignment)
}

/// Flags for a source graph, read off the model assignment.
pub fn source_flags(g: &LabeledGraph, assignment: &ModelAssignment) -> FlaggedGraph {
    let flags = g
        .vertices()
        .map(|(v, m)| {
            (
                v.clone(),
                VertexFlags {
                    full: m == Marking::Full,
                    small: assignment[v].small,
                },
            )
        })
        .collect();
    FlaggedGraph {
        graph: g.clone(),
        flags,
    }
}

fn rule_small_bound(g: &LabeledGraph, assignment: &ModelAssignment) -> Option<Witness> {
    let smalls: Vec<VertexId> = g
        .vertex_ids()
        .filter(|v| assignment[*v].small)
        .cloned()
        .collect();
    (smalls.len() > 3).then_some(Witness::SmallBound { vertices: smalls })
}

/// Deterministic continuation transition: arriving at a vertex along a slot,
/// a geodesic leaves along the involution partner of that slot. Returns the
/// next arrival half-edge, or `None` when the vertex is full (the walk has
/// met a non-orbifold point and stops).
fn continuation_next(
    g: &LabeledGraph,
    assignment: &ModelAssignment,
    arrival: &HalfEdge,
) -> Option<HalfEdge> {
    let v = g.half_edge_vertex(arrival).expect("half-edge in graph");
    if g.marking(v) == Some(Marking::Full) {
        return None;
    }
    let slots = g.half_edges_at(v);
    let idx = slots.iter().position(|h| h == arrival).unwrap();
    let partner = assignment[v]
        .continuation_partner(idx)
        .expect("hollow models pair every slot");
    Some(slots[partner].opposite())
}

fn rule_geodesic(g: &LabeledGraph, assignment: &ModelAssignment) -> Option<Witness> {
    let mut starts: Vec<HalfEdge> = Vec::new();
    for (id, _) in g.edges() {
        starts.push(HalfEdge::new(id.clone(), 0));
        starts.push(HalfEdge::new(id.clone(), 1));
    }
    starts.sort();
    for start in starts {
        let mut seen: BTreeMap<HalfEdge, usize> = BTreeMap::new();
        let mut seq: Vec<HalfEdge> = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&i) = seen.get(&cur) {
                return Some(Witness::Geodesic {
                    walk: seq[i..].to_vec(),
                });
            }
            seen.insert(cur.clone(), seq.len());
            seq.push(cur.clone());
            match continuation_next(g, assignment, &cur) {
                Some(next) => cur = next,
                None => break,
            }
        }
    }
    None
}

fn rule_disjoint_cycles(g: &LabeledGraph) -> Option<Witness> {
    let cycles = simple_cycles(g);
    for i in 0..cycles.len() {
        for j in (i + 1)..cycles.len() {
            if cycles[i]
                .vertex_set()
                .is_disjoint(&cycles[j].vertex_set())
            {
                return Some(Witness::Disjoint {
                    cycle1: cycles[i].selector(),
                    cycle2: cycles[j].selector(),
                });
            }
        }
    }
    None
}

fn rule_cover_search(flagged: &FlaggedGraph) -> Option<Witness> {
    // Iterative deepening: the first violating plan in (depth, lexicographic)
    // order is reported, so certificates are reproducible.
    for depth in 1..=COVER_SEARCH_DEPTH {
        let mut plan = Vec::new();
        let mut counts = Vec::new();
        let mut demoted = Vec::new();
        if search_depth(flagged, depth, &mut plan, &mut counts, &mut demoted) {
            return Some(Witness::Cover {
                plan,
                counts,
                demoted,
            });
        }
    }
    None
}

fn search_depth(
    current: &FlaggedGraph,
    remaining: usize,
    plan: &mut Vec<PlanStep>,
    counts: &mut Vec<usize>,
    demoted: &mut Vec<VertexId>,
) -> bool {
    let cycles = simple_cycles(&current.graph);
    for cycle in &cycles {
        for k in COVER_DEGREES {
            if cycle.min_weight(&current.graph) < Weight::from_integer(k) {
                continue;
            }
            let step = branched_cover(&current.graph, cycle, k).expect("legal cover");
            let count = small_count(&step, &current.flags);
            plan.push(PlanStep::new(cycle.selector(), k));
            counts.push(count.total());
            let (flags, newly_demoted) = crate::covers::lift_flags(&step, &current.flags);
            let demote_len = demoted.len();
            demoted.extend(newly_demoted);
            if count.total() > 3 {
                return true;
            }
            if remaining > 1 {
                let next = FlaggedGraph {
                    graph: step.result,
                    flags,
                };
                if search_depth(&next, remaining - 1, plan, counts, demoted) {
                    return true;
                }
            }
            plan.pop();
            counts.pop();
            demoted.truncate(demote_len);
        }
    }
    false
}

fn rule_knot(
    g: &LabeledGraph,
    flagged: &FlaggedGraph,
    knot_data: &KnotAssignments,
) -> Result<Option<Witness>, CheckError> {
    for (selector, knot) in knot_data {
        let cycle = resolve_cycle(g, selector).map_err(|_| {
            CheckError::UnknownKnotCycle(selector.iter().map(|e| e.as_str().to_owned()).collect())
        })?;
        for k in COVER_DEGREES {
            if cycle.min_weight(g) < Weight::from_integer(k) {
                continue;
            }
            let step = branched_cover(g, &cycle, k).expect("legal cover");
            let smalls = small_count(&step, &flagged.flags).total() as u64;
            let product = smalls * knot.cover_group_order(k);
            if product > 3 {
                return Ok(Some(Witness::Knot {
                    cycle: cycle.selector(),
                    knot: *knot,
                    degree: k,
                    count: product,
                }));
            }
        }
    }
    Ok(None)
}

/// Decides admissibility with the default rule order.
pub fn check(g: &LabeledGraph, knot_data: Option<&KnotAssignments>) -> Result<Verdict, CheckError> {
    check_with_order(g, knot_data, &DEFAULT_RULE_ORDER)
}

/// Decides admissibility, evaluating the post-assignment rules in the given
/// order. The verdict is order-independent (each rule is a pure predicate);
/// only the reported certificate can differ.
pub fn check_with_order(
    g: &LabeledGraph,
    knot_data: Option<&KnotAssignments>,
    order: &[RuleId],
) -> Result<Verdict, CheckError> {
    if !g.is_source() {
        return Err(CheckError::NotSource(
            "weights must be integers >= 2".to_owned(),
        ));
    }
    if g.vertex_count() == 0 {
        return Err(CheckError::MissingFullVertex);
    }
    let assignment = match assign_models(g) {
        Ok(a) => a,
        Err(cert) => return Ok(Verdict::Excluded(cert)),
    };
    let flagged = source_flags(g, &assignment);
    for rule in order {
        let witness = match rule {
            RuleId::SmallPointBound => rule_small_bound(g, &assignment),
            RuleId::AllOrbifoldGeodesic => rule_geodesic(g, &assignment),
            RuleId::DisjointCycles => rule_disjoint_cycles(g),
            RuleId::CoverSmallPointBound => rule_cover_search(&flagged),
            RuleId::KnotRule => match knot_data {
                Some(data) => rule_knot(g, &flagged, data)?,
                None => None,
            },
            RuleId::ValencyBound | RuleId::NoLocalModel => None, // handled in assignment
        };
        if let Some(witness) = witness {
            return Ok(Verdict::Excluded(ExclusionCertificate {
                rule: *rule,
                witness,
            }));
        }
    }
    if !g.has_full_vertex() {
        // Unreachable for nonempty all-hollow graphs: they always fail the
        // model or geodesic rule. Kept as a guard for the stated standing
        // assumption.
        return Err(CheckError::MissingFullVertex);
    }
    Ok(Verdict::Admissible(assignment))
}

/// Outcome of replaying a certificate against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub holds: bool,
    pub detail: String,
}

fn replay_ok(detail: impl Into<String>) -> Replay {
    Replay {
        holds: true,
        detail: detail.into(),
    }
}

fn replay_fail(detail: impl Into<String>) -> Replay {
    Replay {
        holds: false,
        detail: detail.into(),
    }
}

/// Re-derives the violation recorded in a certificate. Returns `holds =
/// true` iff the violation still holds for `g`; recomputation failures
/// (missing edges, illegal covers) yield `holds = false` with the reason.
pub fn replay(g: &LabeledGraph, cert: &ExclusionCertificate) -> Result<Replay, CheckError> {
    match &cert.witness {
        Witness::Valency { vertex, .. } => match g.marking(vertex) {
            None => Ok(replay_fail(format!("vertex `{vertex}` not in graph"))),
            Some(_) => {
                let val = g.valency(vertex);
                if val > 3 {
                    Ok(replay_ok(format!("vertex `{vertex}` has valency {val} > 3")))
                } else {
                    Ok(replay_fail(format!("vertex `{vertex}` has valency {val} <= 3")))
                }
            }
        },
        Witness::NoModel { vertex } => match g.marking(vertex) {
            None => Ok(replay_fail(format!("vertex `{vertex}` not in graph"))),
            Some(_) => match vertex_model(g, vertex) {
                Err(c) if c.rule == RuleId::NoLocalModel => {
                    Ok(replay_ok(format!("vertex `{vertex}` admits no local model")))
                }
                Err(_) => Ok(replay_fail("vertex fails a different rule")),
                Ok(m) => Ok(replay_fail(format!("vertex `{vertex}` has model {}", m.kind))),
            },
        },
        Witness::SmallBound { vertices } => {
            let assignment = match assign_models(g) {
                Ok(a) => a,
                Err(_) => return Ok(replay_fail("graph no longer admits a model assignment")),
            };
            for v in vertices {
                match assignment.get(v) {
                    Some(m) if m.small => {}
                    Some(_) => return Ok(replay_fail(format!("vertex `{v}` is not small"))),
                    None => return Ok(replay_fail(format!("vertex `{v}` not in graph"))),
                }
            }
            if vertices.len() > 3 {
                Ok(replay_ok(format!("{} small points > 3", vertices.len())))
            } else {
                Ok(replay_fail("witness lists at most three small points"))
            }
        }
        Witness::Geodesic { walk } => {
            if walk.is_empty() {
                return Err(CheckError::MalformedCertificate("empty walk".to_owned()));
            }
            let assignment = match assign_models(g) {
                Ok(a) => a,
                Err(_) => return Ok(replay_fail("graph no longer admits a model assignment")),
            };
            for (i, h) in walk.iter().enumerate() {
                let Some(v) = g.half_edge_vertex(h) else {
                    return Ok(replay_fail(format!("half-edge {h} not in graph")));
                };
                if g.marking(v) == Some(Marking::Full) {
                    return Ok(replay_fail(format!("walk meets full vertex `{v}`")));
                }
                let next = continuation_next(g, &assignment, h).expect("hollow vertex continues");
                let expected = &walk[(i + 1) % walk.len()];
                if &next != expected {
                    return Ok(replay_fail(format!(
                        "continuation at {h} leads to {next}, certificate says {expected}"
                    )));
                }
            }
            Ok(replay_ok(format!(
                "closed walk of length {} through orbifold points only",
                walk.len()
            )))
        }
        Witness::Disjoint { cycle1, cycle2 } => {
            let c1 = match resolve_cycle(g, cycle1) {
                Ok(c) => c,
                Err(e) => return Ok(replay_fail(e.to_string())),
            };
            let c2 = match resolve_cycle(g, cycle2) {
                Ok(c) => c,
                Err(e) => return Ok(replay_fail(e.to_string())),
            };
            if c1.vertex_set().is_disjoint(&c2.vertex_set()) {
                Ok(replay_ok("cycles are vertex-disjoint"))
            } else {
                Ok(replay_fail("cycles share a vertex"))
            }
        }
        Witness::Cover { plan, .. } => {
            if plan.is_empty() {
                return Err(CheckError::MalformedCertificate("empty cover plan".to_owned()));
            }
            let assignment = match assign_models(g) {
                Ok(a) => a,
                Err(_) => return Ok(replay_fail("graph no longer admits a model assignment")),
            };
            let flagged = source_flags(g, &assignment);
            match iterate_covers(&flagged, plan) {
                Ok(trace) => {
                    let max = trace.max_small_count();
                    if max > 3 {
                        Ok(replay_ok(format!("plan reaches {max} small points")))
                    } else {
                        Ok(replay_fail(format!("plan reaches only {max} small points")))
                    }
                }
                Err(e) => Ok(replay_fail(e.to_string())),
            }
        }
        Witness::Knot {
            cycle,
            knot,
            degree,
            ..
        } => {
            let assignment = match assign_models(g) {
                Ok(a) => a,
                Err(_) => return Ok(replay_fail("graph no longer admits a model assignment")),
            };
            let flagged = source_flags(g, &assignment);
            let c = match resolve_cycle(g, cycle) {
                Ok(c) => c,
                Err(e) => return Ok(replay_fail(e.to_string())),
            };
            if c.min_weight(g) < Weight::from_integer(*degree) {
                return Ok(replay_fail("cycle weight below k"));
            }
            let step = match branched_cover(g, &c, *degree) {
                Ok(s) => s,
                Err(e) => return Ok(replay_fail(e.to_string())),
            };
            let product =
                small_count(&step, &flagged.flags).total() as u64 * knot.cover_group_order(*degree);
            if product > 3 {
                Ok(replay_ok(format!("{product} small points in the universal cover")))
            } else {
                Ok(replay_fail(format!("product {product} <= 3")))
            }
        }
    }
}

/// Outcome of the knot rule for one cover degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnotDegreeOutcome {
    pub degree: u64,
    pub small_points: u64,
    pub group_order: u64,
    pub product: u64,
    pub allowed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotReport {
    pub knot: KnotKind,
    pub loop_weight: u64,
    pub outcomes: Vec<KnotDegreeOutcome>,
    pub admissible: bool,
}

/// Knot rule for a graph whose singular set is a single loop at one full
/// vertex. The unknot passes for every loop weight; the trefoil only for
/// weight two, since the degree-three cover would force eight small points.
pub fn knot_check(g: &LabeledGraph, knot: KnotKind) -> Result<KnotReport, CheckError> {
    if g.vertex_count() != 1 || g.edge_count() != 1 {
        return Err(CheckError::BadShape(format!(
            "{} vertices, {} edges",
            g.vertex_count(),
            g.edge_count()
        )));
    }
    let (v, m) = g.vertices().next().unwrap();
    let (_, e) = g.edges().next().unwrap();
    if m != Marking::Full || !e.is_loop() || &e.ends[0] != v {
        return Err(CheckError::BadShape("expected a loop at a full vertex".to_owned()));
    }
    if !g.is_source() {
        return Err(CheckError::NotSource("loop weight must be an integer >= 2".to_owned()));
    }
    let loop_weight = *e.weight.numer();
    let mut outcomes = Vec::new();
    let cycle = simple_cycles(g).into_iter().next().unwrap();
    let assignment = assign_models(g).map_err(|c| {
        CheckError::BadShape(format!("no local model: rule {}", c.rule))
    })?;
    let flagged = source_flags(g, &assignment);
    for k in COVER_DEGREES {
        if loop_weight < k {
            continue;
        }
        let step = branched_cover(g, &cycle, k).expect("legal cover");
        let smalls = small_count(&step, &flagged.flags).total() as u64;
        let order = knot.cover_group_order(k);
        outcomes.push(KnotDegreeOutcome {
            degree: k,
            small_points: smalls,
            group_order: order,
            product: smalls * order,
            allowed: smalls * order <= 3,
        });
    }
    let admissible = outcomes.iter().all(|o| o.allowed);
    Ok(KnotReport {
        knot,
        loop_weight,
        outcomes,
        admissible,
    })
}

// ---------------------------------------------------------------------------
// Certificate text format (versioned).

pub const CERTIFICATE_HEADER: &str = "strata-certificate v1";

pub fn certificate_to_text(cert: &ExclusionCertificate) -> String {
    let mut out = format!("{CERTIFICATE_HEADER}\nrule {}\n", cert.rule);
    match &cert.witness {
        Witness::Valency { vertex, valency } => {
            out.push_str(&format!("vertex {vertex}\nvalency {valency}\n"));
        }
        Witness::NoModel { vertex } => {
            out.push_str(&format!("vertex {vertex}\n"));
        }
        Witness::SmallBound { vertices } => {
            out.push_str(&format!("vertices {}\n", join(vertices.iter())));
        }
        Witness::Geodesic { walk } => {
            out.push_str(&format!("walk {}\n", join(walk.iter())));
        }
        Witness::Disjoint { cycle1, cycle2 } => {
            out.push_str(&format!(
                "cycle1 {}\ncycle2 {}\n",
                join(cycle1.iter()),
                join(cycle2.iter())
            ));
        }
        Witness::Cover {
            plan,
            counts,
            demoted,
        } => {
            for step in plan {
                out.push_str(&format!("step {} k {}\n", join(step.cycle_edges.iter()), step.k));
            }
            out.push_str(&format!(
                "counts {}\n",
                join(counts.iter())
            ));
            if !demoted.is_empty() {
                out.push_str(&format!("demoted {}\n", join(demoted.iter())));
            }
        }
        Witness::Knot {
            cycle,
            knot,
            degree,
            count,
        } => {
            out.push_str(&format!(
                "cycle {}\nknot {knot}\ndegree {degree}\ncount {count}\n",
                join(cycle.iter())
            ));
        }
    }
    out
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn certificate_from_text(text: &str) -> Result<ExclusionCertificate, CheckError> {
    let bad = |m: &str| CheckError::MalformedCertificate(m.to_owned());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(CERTIFICATE_HEADER) {
        return Err(bad("missing header"));
    }
    let mut fields: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for line in lines {
        let (key, rest) = line
            .trim()
            .split_once(' ')
            .ok_or_else(|| bad(&format!("malformed line `{line}`")))?;
        fields.entry(key.to_owned()).or_default().push(rest.to_owned());
    }
    let one = |fields: &BTreeMap<String, Vec<String>>, key: &str| -> Result<String, CheckError> {
        let v = fields
            .get(key)
            .ok_or_else(|| bad(&format!("missing field `{key}`")))?;
        if v.len() != 1 {
            return Err(bad(&format!("field `{key}` repeated")));
        }
        Ok(v[0].clone())
    };
    let rule = RuleId::parse(&one(&fields, "rule")?).ok_or_else(|| bad("unknown rule"))?;
    let list = |s: &str| -> Vec<String> {
        s.split(',')
            .filter(|t| !t.is_empty())
            .map(|t| t.to_owned())
            .collect()
    };
    let witness = match rule {
        RuleId::ValencyBound => Witness::Valency {
            vertex: VertexId::new(one(&fields, "vertex")?),
            valency: one(&fields, "valency")?
                .parse()
                .map_err(|_| bad("bad valency"))?,
        },
        RuleId::NoLocalModel => Witness::NoModel {
            vertex: VertexId::new(one(&fields, "vertex")?),
        },
        RuleId::SmallPointBound => Witness::SmallBound {
            vertices: list(&one(&fields, "vertices")?)
                .into_iter()
                .map(VertexId::new)
                .collect(),
        },
        RuleId::AllOrbifoldGeodesic => {
            let mut walk = Vec::new();
            for tok in list(&one(&fields, "walk")?) {
                let (edge, end) = tok
                    .rsplit_once(':')
                    .ok_or_else(|| bad("walk entries look like <edge>:<end>"))?;
                let end: usize = end.parse().map_err(|_| bad("bad half-edge end"))?;
                if end > 1 {
                    return Err(bad("half-edge end must be 0 or 1"));
                }
                walk.push(HalfEdge::new(edge, end));
            }
            Witness::Geodesic { walk }
        }
        RuleId::DisjointCycles => Witness::Disjoint {
            cycle1: list(&one(&fields, "cycle1")?).into_iter().map(EdgeId::new).collect(),
            cycle2: list(&one(&fields, "cycle2")?).into_iter().map(EdgeId::new).collect(),
        },
        RuleId::CoverSmallPointBound => {
            let steps = fields
                .get("step")
                .ok_or_else(|| bad("missing cover steps"))?;
            let mut plan = Vec::new();
            for s in steps {
                let (edges, k) = s
                    .split_once(" k ")
                    .ok_or_else(|| bad("step lines look like `step <edges> k <k>`"))?;
                plan.push(PlanStep::new(
                    list(edges).into_iter().map(EdgeId::new).collect(),
                    k.trim().parse().map_err(|_| bad("bad degree"))?,
                ));
            }
            let counts = list(&one(&fields, "counts")?)
                .into_iter()
                .map(|c| c.parse().map_err(|_| bad("bad count")))
                .collect::<Result<Vec<usize>, _>>()?;
            let demoted = match fields.get("demoted") {
                Some(v) if v.len() == 1 => list(&v[0]).into_iter().map(VertexId::new).collect(),
                Some(_) => return Err(bad("field `demoted` repeated")),
                None => Vec::new(),
            };
            Witness::Cover {
                plan,
                counts,
                demoted,
            }
        }
        RuleId::KnotRule => Witness::Knot {
            cycle: list(&one(&fields, "cycle")?).into_iter().map(EdgeId::new).collect(),
            knot: KnotKind::parse(&one(&fields, "knot")?)?,
            degree: one(&fields, "degree")?.parse().map_err(|_| bad("bad degree"))?,
            count: one(&fields, "count")?.parse().map_err(|_| bad("bad count"))?,
        },
    };
    Ok(ExclusionCertificate { rule, witness })
}

/// Small vertices of a source graph (full vertices plus hollow polyhedral
/// trivalent vertices).
pub fn small_vertices(g: &LabeledGraph, assignment: &ModelAssignment) -> Vec<VertexId> {
    g.vertex_ids()
        .filter(|v| assignment[*v].small)
        .cloned()
        .collect()
}
