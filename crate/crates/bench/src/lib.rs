//! Fixed, seeded inputs shared by the benchmarks.

use qualcomp::equilibrium::{HomogeneousSpec, TwoPathGeneralParams};
use qualcomp::netgen::{synthetic_topology_model, TopologyConfig, TopologyModel};
use qualcomp::sampling;
use qualcomp::{AttributeMatrix, NetworkModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 42;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// A single-market model with a random attribute profile.
pub fn single_market() -> (NetworkModel, AttributeMatrix) {
    let mut rng = rng();
    let model = sampling::single_market_model(&mut rng);
    let a = sampling::attributes(&mut rng, &model, 5.0);
    (model, a)
}

pub fn homogeneous_spec() -> HomogeneousSpec {
    sampling::homogeneous_spec(&mut rng(), 4, 4)
}

pub fn two_path_model() -> NetworkModel {
    sampling::two_path_model(&mut rng(), 3, 2)
}

pub fn two_path_general() -> TwoPathGeneralParams {
    sampling::two_path_general(&mut rng(), true)
}

pub fn topology() -> TopologyModel {
    synthetic_topology_model(&TopologyConfig::default()).expect("default topology builds")
}
