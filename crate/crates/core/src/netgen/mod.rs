//! Model construction: canonical theory topologies, AS graphs, valley-free
//! path enumeration, gravity demand, tiers and parameter synthesis.

mod builders;
mod graph;
mod gravity;
mod paths;
mod synth;
mod tiers;

pub use builders::{
    build_competition_pair_homogeneous, build_homogeneous, build_two_path_pair, CompetitionPair,
    TwoPathPair, TwoPathSide,
};
pub use graph::{
    apply_node_sidecar, format_as_graph, ingest_as_graph, parse_as_graph, prune_to_core,
    synthetic_as_graph, AsEdge, AsGraph, AsId, AsNode, EnergyProfile, Link, Relation,
    SyntheticGraphConfig,
};
pub use gravity::{gravity_attraction, gravity_demand, GravitySpec, PairDistance};
pub use paths::{
    all_valley_free_paths, enumerate_paths, enumerate_paths_in, is_valley_free, Adjacency,
};
pub use synth::{
    build_topology_model, synthesize_params, synthetic_topology_model, IspScope, MarketSkeleton,
    ParamProfile, TopologyConfig, TopologyModel, BANDWIDTH, CLEAN_ENERGY,
};
pub use tiers::tier_classify;
