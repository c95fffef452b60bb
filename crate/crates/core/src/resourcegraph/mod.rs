//! Reachability graphs of exact states under finitely many channels, their
//! quotient by mutual reachability, and the longest-path monotones on it.

mod digraph;
mod explore;
mod monotone;
mod quotient;

use thiserror::Error;

pub use digraph::{Digraph, Edge};
pub use explore::{channels_from_set, explore, pauli_x_channel, reach, ExactChannel, ReachGraph, ReachOutcome};
pub use monotone::{
    check_compatible, check_complete, monotone, monotone_family, transitive_closure, CompatibilityViolation,
    CompletenessViolation, MonotoneFamily, MonotoneTable,
};
pub use quotient::{quotient, DagEdge, QuotientDag};

use crate::reduction::CptpViolation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("channel {label} is not CPTP: {violation:?}")]
    NotCptp { label: String, violation: CptpViolation },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("state {0} is not a node of the graph")]
    UnknownState(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("edge length {0} is not positive")]
    Length(String),
    #[error("graph contains a cycle")]
    Cyclic,
}
