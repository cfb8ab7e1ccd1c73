//! Admissible vertex neighborhoods, computed from finite subgroups of SO(3).
//!
//! The space of directions at a point of a 3-dimensional quotient is a
//! quotient 2-orbifold. For points on the singular set it is `S^2(1)/G` for a
//! finite rotation group `G` (hollow/orbifold points) or the curvature-4
//! analogue (full points). This module builds the groups as explicit matrix
//! lists, extracts cone points, orders and the antipodal involution, and
//! derives the local models and geodesic-continuation pairings the rules
//! engine consumes.

use num_rational::Ratio;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("group parameter {0} < 2")]
    BadParameter(u32),
    #[error("valency {0} exceeds the bound of three")]
    ValencyBound(usize),
    #[error("no trivalent model for weight triple {0:?}")]
    NoTriple([u64; 3]),
}

/// 3x3 matrix in row-major order. Only what rotation groups need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [f64; 9]);

impl Mat3 {
    pub fn identity() -> Self {
        Mat3([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] =
                    a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
            }
        }
        Mat3(out)
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let a = &self.0;
        [
            a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
            a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
            a[6] * v[0] + a[7] * v[1] + a[8] * v[2],
        ]
    }

    /// Rotation by `angle` about the (normalized) `axis`.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Mat3 {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Mat3([
            t * x * x + c,
            t * x * y - s * z,
            t * x * z + s * y,
            t * x * y + s * z,
            t * y * y + c,
            t * y * z - s * x,
            t * x * z - s * y,
            t * y * z + s * x,
            t * z * z + c,
        ])
    }

    pub fn approx_eq(&self, rhs: &Mat3) -> bool {
        self.0
            .iter()
            .zip(rhs.0.iter())
            .all(|(a, b)| (a - b).abs() < 1e-7)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Mat3::identity())
    }

    /// Unit vector spanning the rotation axis, for a non-identity rotation.
    pub fn rotation_axis(&self) -> Option<[f64; 3]> {
        if self.is_identity() {
            return None;
        }
        let a = &self.0;
        // Antisymmetric part; vanishes exactly for angle-pi rotations.
        let v = [a[7] - a[5], a[2] - a[6], a[3] - a[1]];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            return Some([v[0] / norm, v[1] / norm, v[2] / norm]);
        }
        // Angle pi: R + I = 2 * axis * axis^T, any nonzero column works.
        for j in 0..3 {
            let col = [
                a[j] + if j == 0 { 1.0 } else { 0.0 },
                a[3 + j] + if j == 1 { 1.0 } else { 0.0 },
                a[6 + j] + if j == 2 { 1.0 } else { 0.0 },
            ];
            let norm = (col[0] * col[0] + col[1] * col[1] + col[2] * col[2]).sqrt();
            if norm > 1e-6 {
                return Some([col[0] / norm, col[1] / norm, col[2] / norm]);
            }
        }
        None
    }
}

fn vec_close(a: [f64; 3], b: [f64; 3]) -> bool {
    (a[0] - b[0]).abs() < TOL && (a[1] - b[1]).abs() < TOL && (a[2] - b[2]).abs() < TOL
}

fn neg(v: [f64; 3]) -> [f64; 3] {
    [-v[0], -v[1], -v[2]]
}

/// The finite subgroups of SO(3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupName {
    Cyclic(u32),
    Dihedral(u32),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl GroupName {
    pub fn order(self) -> usize {
        match self {
            GroupName::Cyclic(p) => p as usize,
            GroupName::Dihedral(k) => 2 * k as usize,
            GroupName::Tetrahedral => 12,
            GroupName::Octahedral => 24,
            GroupName::Icosahedral => 60,
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::Cyclic(p) => write!(f, "cyclic({p})"),
            GroupName::Dihedral(k) => write!(f, "dihedral({k})"),
            GroupName::Tetrahedral => f.write_str("tetrahedral"),
            GroupName::Octahedral => f.write_str("octahedral"),
            GroupName::Icosahedral => f.write_str("icosahedral"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub name: GroupName,
    pub elements: Vec<Mat3>,
}

impl MatrixGroup {
    /// Exhaustive product check: every pairwise product lands in the list.
    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.elements
                .iter()
                .all(|b| self.contains(&a.mul(b)))
        })
    }

    pub fn contains(&self, m: &Mat3) -> bool {
        self.elements.iter().any(|e| e.approx_eq(m))
    }
}

/// Builds the named group as an explicit element list and verifies closure
/// and order.
pub fn build_group(name: GroupName) -> Result<MatrixGroup, ModelError> {
    let elements = match name {
        GroupName::Cyclic(p) => {
            if p < 2 {
                return Err(ModelError::BadParameter(p));
            }
            (0..p)
                .map(|j| {
                    Mat3::rotation([0.0, 0.0, 1.0], 2.0 * std::f64::consts::PI * j as f64 / p as f64)
                })
                .collect()
        }
        GroupName::Dihedral(k) => {
            if k < 2 {
                return Err(ModelError::BadParameter(k));
            }
            let mut els: Vec<Mat3> = (0..k)
                .map(|j| {
                    Mat3::rotation([0.0, 0.0, 1.0], 2.0 * std::f64::consts::PI * j as f64 / k as f64)
                })
                .collect();
            // Flips about the in-plane symmetry axes of the regular k-gon.
            for j in 0..k {
                let a = std::f64::consts::PI * j as f64 / k as f64;
                els.push(Mat3::rotation([a.cos(), a.sin(), 0.0], std::f64::consts::PI));
            }
            els
        }
        GroupName::Tetrahedral => closure(&[
            Mat3::rotation([0.0, 0.0, 1.0], std::f64::consts::PI),
            Mat3::rotation([1.0, 1.0, 1.0], 2.0 * std::f64::consts::PI / 3.0),
        ]),
        GroupName::Octahedral => closure(&[
            Mat3::rotation([0.0, 0.0, 1.0], std::f64::consts::PI / 2.0),
            Mat3::rotation([1.0, 1.0, 1.0], 2.0 * std::f64::consts::PI / 3.0),
        ]),
        GroupName::Icosahedral => {
            let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
            closure(&[
                Mat3::rotation([0.0, 1.0, phi], 2.0 * std::f64::consts::PI / 5.0),
                Mat3::rotation([1.0, 1.0, 1.0], 2.0 * std::f64::consts::PI / 3.0),
            ])
        }
    };
    let group = MatrixGroup { name, elements };
    assert_eq!(group.elements.len(), name.order(), "group order mismatch");
    debug_assert!(group.is_closed());
    Ok(group)
}

fn closure(generators: &[Mat3]) -> Vec<Mat3> {
    let mut els = vec![Mat3::identity()];
    let mut frontier = els.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in generators {
                let m = f.mul(g);
                if !els.iter().any(|e| e.approx_eq(&m)) {
                    els.push(m);
                    next.push(m);
                }
            }
        }
        frontier = next;
        assert!(els.len() <= 200, "closure diverged");
    }
    els
}

/// Curvature tag of the model 2-orbifold; redundant with the vertex marking
/// (hollow = 1, full = 4) and kept for report readability.
pub type Kappa = u32;

#[derive(Debug, Clone)]
pub struct ConePoint {
    pub order: u32,
    pub axis: [f64; 3],
}

/// Cone points of `S^2(kappa)/G` with the involution induced by the
/// antipodal map of the unit normal sphere.
#[derive(Debug, Clone)]
pub struct ConePointTable {
    pub kappa: Kappa,
    pub points: Vec<ConePoint>,
    /// `involution[i] = j` means the antipodal involution carries cone point
    /// `i` to cone point `j`.
    pub involution: Vec<usize>,
}

impl ConePointTable {
    pub fn orders(&self) -> Vec<u32> {
        let mut o: Vec<u32> = self.points.iter().map(|p| p.order).collect();
        o.sort_unstable();
        o
    }

    /// `2 - sum(1 - 1/m_i) == 2/|G|`, in exact rational arithmetic.
    pub fn riemann_hurwitz_holds(&self, group_order: usize) -> bool {
        let mut lhs = Ratio::from_integer(2i64);
        for p in &self.points {
            lhs -= Ratio::from_integer(1) - Ratio::new(1, p.order as i64);
        }
        lhs == Ratio::new(2, group_order as i64)
    }

    pub fn is_involution_order_preserving(&self) -> bool {
        self.involution.len() == self.points.len()
            && self.involution.iter().enumerate().all(|(i, &j)| {
                j < self.points.len()
                    && self.involution[j] == i
                    && self.points[i].order == self.points[j].order
            })
    }
}

impl fmt::Display for ConePointTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cone-point table (kappa = {})", self.kappa)?;
        for (i, p) in self.points.iter().enumerate() {
            writeln!(
                f,
                "  point {i}: order {} axis ({:+.4}, {:+.4}, {:+.4}) antipode -> point {}",
                p.order, p.axis[0], p.axis[1], p.axis[2], self.involution[i]
            )?;
        }
        Ok(())
    }
}

/// Computes cone points of `S^2(1)/G`: one per orbit of rotation-axis
/// endpoints, with orders given by stabilizers and the involution found by
/// locating the orbit of each negated representative.
pub fn cone_points(group: &MatrixGroup) -> ConePointTable {
    // Candidate singular directions: both endpoints of every rotation axis.
    let mut candidates: Vec<[f64; 3]> = Vec::new();
    for el in &group.elements {
        if let Some(axis) = el.rotation_axis() {
            for v in [axis, neg(axis)] {
                if !candidates.iter().any(|c| vec_close(*c, v)) {
                    candidates.push(v);
                }
            }
        }
    }

    // Partition into orbits.
    let mut orbits: Vec<Vec<[f64; 3]>> = Vec::new();
    let mut assigned = vec![false; candidates.len()];
    for i in 0..candidates.len() {
        if assigned[i] {
            continue;
        }
        let mut orbit = Vec::new();
        for el in &group.elements {
            let img = el.apply(candidates[i]);
            if !orbit.iter().any(|o| vec_close(*o, img)) {
                orbit.push(img);
            }
        }
        for (j, c) in candidates.iter().enumerate() {
            if orbit.iter().any(|o| vec_close(*o, *c)) {
                assigned[j] = true;
            }
        }
        orbits.push(orbit);
    }

    // Deterministic representative: lexicographically largest vector.
    let rep = |orbit: &[[f64; 3]]| -> [f64; 3] {
        let mut best = orbit[0];
        for v in orbit.iter().skip(1) {
            if cmp_vec(*v, best) == std::cmp::Ordering::Greater {
                best = *v;
            }
        }
        best
    };

    let mut points = Vec::new();
    let mut reps = Vec::new();
    for orbit in &orbits {
        let r = rep(orbit);
        let stab = group
            .elements
            .iter()
            .filter(|el| vec_close(el.apply(r), r))
            .count() as u32;
        debug_assert!(stab >= 2, "axis endpoint must have nontrivial stabilizer");
        points.push(ConePoint {
            order: stab,
            axis: r,
        });
        reps.push(r);
    }

    let involution = reps
        .iter()
        .map(|r| {
            let target = neg(*r);
            orbits
                .iter()
                .position(|orbit| orbit.iter().any(|o| vec_close(*o, target)))
                .expect("antipode of a singular direction is singular")
        })
        .collect();

    ConePointTable {
        kappa: 1,
        points,
        involution,
    }
}

fn cmp_vec(a: [f64; 3], b: [f64; 3]) -> std::cmp::Ordering {
    for i in 0..3 {
        let d = a[i] - b[i];
        if d > TOL {
            return std::cmp::Ordering::Greater;
        }
        if d < -TOL {
            return std::cmp::Ordering::Less;
        }
    }
    std::cmp::Ordering::Equal
}

fn table_cache(name: GroupName) -> ConePointTable {
    static CACHE: OnceLock<Mutex<BTreeMap<GroupName, ConePointTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(name)
        .or_insert_with(|| cone_points(&build_group(name).expect("valid group parameters")))
        .clone()
}

/// Which Table-of-finite-rotation-groups row a trivalent weight triple
/// belongs to, if any. Admissible triples are `(2,2,k)` with `k >= 2` and
/// `(2,3,e)` with `e` in `{3,4,5}`, read as multisets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleClass {
    Dihedral(u32),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl TripleClass {
    pub fn group(self) -> GroupName {
        match self {
            TripleClass::Dihedral(k) => GroupName::Dihedral(k),
            TripleClass::Tetrahedral => GroupName::Tetrahedral,
            TripleClass::Octahedral => GroupName::Octahedral,
            TripleClass::Icosahedral => GroupName::Icosahedral,
        }
    }
}

pub fn triple_class(weights: [u64; 3]) -> Option<TripleClass> {
    let mut w = weights;
    w.sort_unstable();
    match w {
        [2, 2, k] => Some(TripleClass::Dihedral(k as u32)),
        [2, 3, 3] => Some(TripleClass::Tetrahedral),
        [2, 3, 4] => Some(TripleClass::Octahedral),
        [2, 3, 5] => Some(TripleClass::Icosahedral),
        _ => None,
    }
}

/// A vertex (or edge-interior) neighborhood model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    /// Interior point of an edge of weight `p`; not a zero-dimensional stratum.
    EdgeInterior(u64),
    TrivalentHollow([u64; 3]),
    TrivalentFull([u64; 3]),
    FullValency2(u64, u64),
    FullValency1(u64),
    FullIsolated,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::EdgeInterior(p) => write!(f, "edge-interior({p})"),
            ModelKind::TrivalentHollow(w) => {
                write!(f, "trivalent-hollow({},{},{})", w[0], w[1], w[2])
            }
            ModelKind::TrivalentFull(w) => write!(f, "trivalent-full({},{},{})", w[0], w[1], w[2]),
            ModelKind::FullValency2(p, q) => write!(f, "full-valency-2({p},{q})"),
            ModelKind::FullValency1(q) => write!(f, "full-valency-1({q})"),
            ModelKind::FullIsolated => f.write_str("full-isolated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalModel {
    pub kind: ModelKind,
    pub small: bool,
    /// Curvature of the model 2-sphere: 1 at hollow points, 4 at full points.
    pub kappa: Kappa,
    /// Unordered slot pairs along which quotient geodesics continue.
    /// Slot indices refer to the vertex's sorted half-edge list; a pair
    /// `(i, i)` means the geodesic returns along the slot it came from.
    /// Nonempty only for hollow kinds.
    pub continuation: Vec<(usize, usize)>,
}

impl LocalModel {
    /// The partner slot of `slot` under geodesic continuation, if any.
    pub fn continuation_partner(&self, slot: usize) -> Option<usize> {
        for &(a, b) in &self.continuation {
            if a == slot {
                return Some(b);
            }
            if b == slot {
                return Some(a);
            }
        }
        None
    }
}

/// Continuation pairs for a trivalent hollow vertex, derived from the cone
/// table of the matching rotation group. `weights[i]` is the weight of slot
/// `i`; the result pairs slot indices.
pub fn continuation_pairs(weights: [u64; 3]) -> Result<Vec<(usize, usize)>, ModelError> {
    let class = triple_class(weights).ok_or(ModelError::NoTriple(weights))?;
    let table = table_cache(class.group());
    pair_slots_by_orders(&weights, &table)
}

fn pair_slots_by_orders(
    weights: &[u64],
    table: &ConePointTable,
) -> Result<Vec<(usize, usize)>, ModelError> {
    // Slots and cone points are matched order-class by order-class. The
    // involution respects orders, so the induced pairing on slots does not
    // depend on which slot is matched to which cone point within a class.
    let mut pairs = Vec::new();
    let mut orders: Vec<u32> = weights.iter().map(|&w| w as u32).collect();
    orders.sort_unstable();
    orders.dedup();
    for order in orders {
        let slot_idx: Vec<usize> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w as u32 == order)
            .map(|(i, _)| i)
            .collect();
        let cone_idx: Vec<usize> = table
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.order == order)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(
            slot_idx.len(),
            cone_idx.len(),
            "slot multiset must match cone orders"
        );
        let identity_on_class = cone_idx.iter().all(|&c| table.involution[c] == c);
        if identity_on_class {
            for &s in &slot_idx {
                pairs.push((s, s));
            }
        } else {
            assert_eq!(
                cone_idx.len(),
                2,
                "a non-identity involution on an order class swaps exactly two cone points"
            );
            pairs.push((slot_idx[0], slot_idx[1]));
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Builds an edge-interior model for a subdivision marker of weight `p`.
/// The two slots are exchanged by the involution of the cyclic quotient, so
/// geodesics pass straight through.
pub fn edge_interior_marker(p: u64) -> LocalModel {
    let table = table_cache(GroupName::Cyclic(p as u32));
    let pairs = pair_slots_by_orders(&[p, p], &table).expect("cyclic pairing");
    debug_assert_eq!(pairs, vec![(0, 1)]);
    LocalModel {
        kind: ModelKind::EdgeInterior(p),
        small: false,
        kappa: 1,
        continuation: pairs,
    }
}

/// All local models compatible with a vertex of the given marking and slot
/// weights (sorted order not required). Hollow vertices of valency <= 2
/// admit none: such points are edge-interior, not zero-dimensional strata.
pub fn models_for(marking: crate::graph::Marking, weights: &[u64]) -> Result<Vec<LocalModel>, ModelError> {
    use crate::graph::Marking;
    if weights.len() > 3 {
        return Err(ModelError::ValencyBound(weights.len()));
    }
    let mut out = Vec::new();
    match (marking, weights.len()) {
        (Marking::Full, 0) => out.push(LocalModel {
            kind: ModelKind::FullIsolated,
            small: true,
            kappa: 4,
            continuation: vec![],
        }),
        (Marking::Full, 1) => out.push(LocalModel {
            kind: ModelKind::FullValency1(weights[0]),
            small: true,
            kappa: 4,
            continuation: vec![],
        }),
        (Marking::Full, 2) => out.push(LocalModel {
            kind: ModelKind::FullValency2(weights[0].min(weights[1]), weights[0].max(weights[1])),
            small: true,
            kappa: 4,
            continuation: vec![],
        }),
        (Marking::Full, 3) => {
            let triple = [weights[0], weights[1], weights[2]];
            if triple_class(triple).is_some() {
                out.push(LocalModel {
                    kind: ModelKind::TrivalentFull(triple),
                    small: true,
                    kappa: 4,
                    continuation: vec![],
                });
            }
        }
        (Marking::Hollow, 3) => {
            let triple = [weights[0], weights[1], weights[2]];
            if let Some(class) = triple_class(triple) {
                let small = !matches!(class, TripleClass::Dihedral(_));
                out.push(LocalModel {
                    kind: ModelKind::TrivalentHollow(triple),
                    small,
                    kappa: 1,
                    continuation: continuation_pairs(triple)?,
                });
            }
        }
        (Marking::Hollow, _) => {}
        (Marking::Full, _) => unreachable!("valency bound checked above"),
    }
    Ok(out)
}

/// Template-level description of the model catalog per (marking, valency).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogTemplate {
    /// `(2,2,k)` with `k >= 2`.
    TrivalentDihedralFamily,
    /// `(2,3,e)` for a fixed `e` in `{3,4,5}`.
    TrivalentPolyhedral(u64),
    /// Any pair `(p,q)` with `p,q >= 2`.
    AnyPair,
    /// Any single weight `q >= 2`.
    AnySingle,
    Isolated,
}

/// The catalog of admissible neighborhood templates for a marking/valency
/// combination. Hollow with valency <= 2 is empty: those points live in the
/// interior of edges.
pub fn model_catalog(
    marking: crate::graph::Marking,
    valency: usize,
) -> Result<Vec<CatalogTemplate>, ModelError> {
    use crate::graph::Marking;
    if valency > 3 {
        return Err(ModelError::ValencyBound(valency));
    }
    Ok(match (marking, valency) {
        (Marking::Full, 0) => vec![CatalogTemplate::Isolated],
        (Marking::Full, 1) => vec![CatalogTemplate::AnySingle],
        (Marking::Full, 2) => vec![CatalogTemplate::AnyPair],
        (Marking::Full, 3) | (Marking::Hollow, 3) => vec![
            CatalogTemplate::TrivalentDihedralFamily,
            CatalogTemplate::TrivalentPolyhedral(3),
            CatalogTemplate::TrivalentPolyhedral(4),
            CatalogTemplate::TrivalentPolyhedral(5),
        ],
        (Marking::Hollow, _) => vec![],
        (Marking::Full, _) => unreachable!("valency bound checked above"),
    })
}

/// Whether the catalog for this marking/valency admits the weight multiset.
pub fn catalog_admits(marking: crate::graph::Marking, weights: &[u64]) -> bool {
    models_for(marking, weights).map(|m| !m.is_empty()).unwrap_or(false)
}
