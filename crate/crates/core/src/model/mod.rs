//! Substrates, requests, valid mappings, allocations and feasibility checks.

mod graph;
mod instance;
mod mapping;
mod stats;

pub use graph::{Request, Resource, SubstrateGraph};
pub use instance::{
    validate_instance, Instance, IssueKind, RawInstance, RawNodeType, RawRequest, RawRequestEdge,
    RawRequestNode, RawSubstrate, RawSubstrateEdge, RawSubstrateNode, ValidationIssue,
    ValidationReport,
};
pub use mapping::{
    check_valid_mapping, collection_feasible, compute_allocations, mapping_cost, AllocationVector,
    EdgeRecord, FeasibilityReport, MappingRecord, MappingViolation, ValidMapping,
};
pub use stats::{resource_stats, ResourceStats};

pub(crate) use mapping::allocations_unchecked;

use serde::{Deserialize, Serialize};

macro_rules! index_type {
    ($($(#[$doc:meta])* $name:ident),* $(,)?) => {$(
        $(#[$doc])*
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }
    )*};
}

index_type!(
    /// Dense substrate node index.
    SNode,
    /// Dense substrate edge index.
    SEdge,
    /// Dense node type index.
    TypeIdx,
    /// Dense request node index.
    VNode,
    /// Dense request edge index.
    VEdge,
    /// Dense substrate resource index: node resources first, then edges.
    ResourceId,
);
