//! Community-structure laboratory for networks.
//!
//! The crate measures how strongly a graph is organised into communities using
//! three ratios (modularity σ, entropy ratio τ, conductance ratio θ), generates
//! Erdős–Rényi, preferential-attachment and homophyly networks, finds local
//! communities with personalized PageRank, checks structural properties of
//! homophyly networks empirically, and predicts node keywords from communities.

pub mod detection;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod prediction;
pub mod structure;

pub use detection::{
    approximate_ppr, detect_all_c, detect_e, detect_m, exact_ppr, find_community, sweep,
    PprParams, SparseVector, StopParams, Sweep,
};
pub use error::{Error, Result};
pub use generators::{
    gen_er, gen_homophyly, gen_pa, homochromatic_partition, homochromatic_sets, ColoredGraph,
    HomophylyParams,
};
pub use graph::{conductance, cut_size, volume, Graph, NodeSet};
pub use metrics::{
    conductance_ratio, empirical_criterion, entropy_partition, entropy_ratio, entropy_uniform,
    modularity, CommunitySet, Partition, RatioReport,
};
pub use prediction::{predict, prediction_curve, AttributedGraph, Document, PredictionResult};
pub use structure::{verify_structure, StructureConfig, StructureReport};
