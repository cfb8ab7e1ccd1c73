//! Classification engine for labeled singular graphs of positively curved,
//! boundaryless cohomogeneity-three quotient spaces.
//!
//! The crate decides whether a labeled multigraph can arise as the singular
//! set of such a quotient, enumerates all admissible graphs within bounds
//! (reproducing an 18-family classification), and mechanizes the rational
//! cohomology bookkeeping for the associated manifolds via exact-sequence
//! constraint solving.

#![forbid(unsafe_code)]

pub mod cohomology;
pub mod covers;
pub mod enumerate;
pub mod graph;
pub mod models;
pub mod rules;
pub mod text;

pub use graph::{
    canonical_form, is_isomorphic, profile, simple_cycles, CountProfile, Cycle, Edge, EdgeId,
    HalfEdge, LabeledGraph, Marking, VertexId, Weight,
};
