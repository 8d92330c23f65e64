//! Multilevel balanced graph partitioning with provably linear total work.
//!
//! The pipeline coarsens a graph through size-constrained label propagation
//! (plus a two-hop pass that packs leftover singletons), contracts each
//! clustering, and — when a coarse level stays too dense — samples its edges
//! down to a density budget. The coarsest graph is split by recursive
//! bisection; the partition is then projected back level by level with
//! label-propagation refinement. Node counts shrink geometrically and edge
//! counts are capped per level, so the whole hierarchy costs a constant
//! factor over the input size.
//!
//! The crate also ships the measurement side: cut/balance metrics,
//! modularity-based bounds on how much contraction can shrink a graph, and
//! performance-profile curves for comparing solvers across instance sets.

pub mod analysis;
pub mod clustering;
pub mod contraction;
pub mod driver;
pub mod error;
pub mod generate;
pub mod graph;
pub mod initial;
pub mod metis;
pub mod partition;
pub mod refinement;
pub mod rng;
pub mod sparsification;

pub use analysis::{
    cut, edge_reduction_study, imbalance_report, modularity_report, performance_profile,
    ImbalanceReport, ModularityReport, ProfileCurve, ProfileEntry, ReductionStudy,
};
pub use clustering::{coarsening_clustering, Clustering, ClusteringParams};
pub use contraction::{contract, ContractionResult};
pub use driver::{build_hierarchy, partition, Hierarchy, Level, PartitionerConfig, RunStats};
pub use error::{Error, Result};
pub use graph::{Graph, NodeId, Weight};
pub use partition::{BalanceSpec, Partition};
pub use sparsification::{Sparsifier, SparsifyConfig, SparsifyStats};
