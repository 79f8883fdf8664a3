//! Model parameters for AS-level topologies: a bandwidth attribute and a
//! clean-energy-share attribute per ISP.
//!
//! Monetary constants are per time window. Demand is measured in traffic
//! units per window; the bandwidth attribute in the same traffic units.
//! Energy intensities are kWh per traffic unit and idle power is kWh per
//! window.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AttributeMatrix, CostForm, IspParams, Market, NetworkModel, Path, ValuationForm,
};

use crate::sampling::log_uniform;

use super::graph::{synthetic_as_graph, AsGraph, AsId, EnergyProfile, SyntheticGraphConfig};
use super::gravity::{gravity_demand, GravitySpec, PairDistance};
use super::paths::all_valley_free_paths;
use super::tiers::tier_classify;

pub const BANDWIDTH: usize = 0;
pub const CLEAN_ENERGY: usize = 1;

/// Which ASes on an AS-level path act as ISPs of the model path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IspScope {
    /// Only the ASes between source and destination; the endpoints select
    /// paths but choose no attributes.
    #[default]
    Transit,
    /// Every AS on the path, endpoints included.
    AllOnPath,
}

impl IspScope {
    /// The attribute-choosing ASes of an AS-level path.
    pub fn members(self, path: &[AsId]) -> &[AsId] {
        match self {
            IspScope::Transit if path.len() >= 2 => &path[1..path.len() - 1],
            IspScope::Transit => &[],
            IspScope::AllOnPath => path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamProfile {
    /// Willingness to pay per unit of bandwidth.
    pub w: f64,
    /// Upper end of the uniform per-unit bandwidth cost draw.
    pub bandwidth_cost_max: f64,
    /// Multiplier turning the bandwidth cost draw into per-window cost.
    pub bandwidth_cost_scale: f64,
    /// Carbon price per ton of CO2.
    pub p_co2: f64,
    /// Maximum carbon intensity of electricity, tons per kWh.
    pub carbon_intensity_max: f64,
    /// Price premium of clean energy per MWh.
    pub g_clean_premium: f64,
    /// Revenue per unit of traffic.
    pub rho: f64,
    /// Ranges for ASes without an energy profile.
    pub energy_intensity_range: (f64, f64),
    pub idle_power_range: (f64, f64),
    pub isp_scope: IspScope,
    pub seed: u64,
}

impl Default for ParamProfile {
    fn default() -> Self {
        Self {
            w: 0.17,
            bandwidth_cost_max: 94.0,
            bandwidth_cost_scale: 1e-4,
            p_co2: 90.0,
            carbon_intensity_max: 875e-6,
            g_clean_premium: 3.375,
            rho: 0.104,
            energy_intensity_range: (0.5, 2.0),
            idle_power_range: (0.5, 2.0),
            isp_scope: IspScope::Transit,
            seed: 0,
        }
    }
}

impl ParamProfile {
    pub fn validate(&self) -> Result<()> {
        let values = [
            self.w,
            self.bandwidth_cost_max,
            self.bandwidth_cost_scale,
            self.p_co2,
            self.carbon_intensity_max,
            self.g_clean_premium,
            self.rho,
        ];
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter(
                "profile constants must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A market between two ASes with its demand and AS-level paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSkeleton {
    pub source: AsId,
    pub destination: AsId,
    pub demand: f64,
    pub paths: Vec<Vec<AsId>>,
}

fn path_id(path: &[AsId]) -> String {
    path.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// Builds the two-attribute model over the given markets. The valuation
/// weight of bandwidth divides by the number of ASes on the whole path,
/// whichever ASes `profile.isp_scope` turns into ISPs.
pub fn synthesize_params(
    graph: &AsGraph,
    markets: &[MarketSkeleton],
    profile: &ParamProfile,
) -> Result<NetworkModel> {
    profile.validate()?;
    let scope = profile.isp_scope;
    if let Some(m) = markets
        .iter()
        .find(|m| m.paths.iter().any(|p| scope.members(p).is_empty()))
    {
        return Err(Error::Validation(format!(
            "market {}-{} has a path without any ISP",
            m.source, m.destination
        )));
    }
    let on_path: BTreeSet<AsId> = markets
        .iter()
        .flat_map(|m| {
            m.paths
                .iter()
                .flat_map(|p| scope.members(p).iter().copied())
        })
        .collect();
    let ids: Vec<AsId> = on_path.into_iter().collect();
    let index: BTreeMap<AsId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let tiers = tier_classify(graph);

    let mut profile_rng = ChaCha8Rng::seed_from_u64(profile.seed ^ 0x656e_6572_6779);
    let mut masses = Vec::with_capacity(ids.len());
    let mut energy = Vec::with_capacity(ids.len());
    for &id in &ids {
        let node = graph
            .node(id)
            .ok_or_else(|| Error::Validation(format!("path AS {id} is not in the graph")))?;
        if !(node.mass > 0.0) {
            return Err(Error::Parameter(format!("AS {id} on a path has zero mass")));
        }
        masses.push(node.mass);
        energy.push(node.energy.unwrap_or_else(|| EnergyProfile {
            mean_energy_intensity: log_uniform(&mut profile_rng, profile.energy_intensity_range),
            idle_power: log_uniform(&mut profile_rng, profile.idle_power_range),
        }));
    }

    let mut cost_rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let premium_per_kwh = profile.g_clean_premium / 1000.0;
    let isps: Vec<IspParams> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let draw = profile.bandwidth_cost_max * (1.0 - cost_rng.gen::<f64>());
            IspParams {
                name: format!("AS{id}"),
                rho: profile.rho,
                phi0: 0.0,
                phi: vec![0.0, premium_per_kwh * energy[i].mean_energy_intensity],
                gamma: vec![
                    draw * profile.bandwidth_cost_scale,
                    premium_per_kwh * energy[i].idle_power,
                ],
                gamma0: 0.0,
                tier: tiers.get(&id).copied().unwrap_or_default(),
            }
        })
        .collect();

    let carbon_weight =
        |n: usize| profile.p_co2 * energy[n].mean_energy_intensity * profile.carbon_intensity_max;
    let mut lower = AttributeMatrix::zeros(ids.len(), 2);
    let mut upper = AttributeMatrix::filled(ids.len(), 2, f64::MAX);
    for n in 0..ids.len() {
        upper.set(n, CLEAN_ENERGY, 1.0);
    }
    let mut paths = Vec::new();
    let mut model_markets = Vec::with_capacity(markets.len());
    for m in markets {
        if m.paths.is_empty() {
            return Err(Error::Validation(format!(
                "market {}-{} has no path",
                m.source, m.destination
            )));
        }
        let carbon_sums: Vec<f64> = m
            .paths
            .iter()
            .map(|p| {
                scope
                    .members(p)
                    .iter()
                    .map(|id| carbon_weight(index[id]))
                    .sum()
            })
            .collect();
        let max_sum = carbon_sums.iter().copied().fold(0.0, f64::max);
        let mut members = Vec::with_capacity(m.paths.len());
        for (p, sum) in m.paths.iter().zip(&carbon_sums) {
            let len = p.len() as f64;
            let isp_ids = scope.members(p);
            let coeffs = isp_ids
                .iter()
                .map(|id| {
                    let n = index[id];
                    vec![profile.w / (len * masses[n]), carbon_weight(n)]
                })
                .collect();
            for id in isp_ids {
                let n = index[id];
                let floor = lower.get(n, BANDWIDTH) + 0.1 * m.demand / m.paths.len() as f64;
                lower.set(n, BANDWIDTH, floor);
            }
            members.push(paths.len());
            paths.push(Path {
                id: path_id(p),
                isps: isp_ids.iter().map(|id| index[id]).collect(),
                base_valuation: max_sum - sum,
                valuation_coeffs: coeffs,
            });
        }
        model_markets.push(Market {
            source: format!("AS{}", m.source),
            destination: format!("AS{}", m.destination),
            demand_limit: m.demand,
            paths: members,
        });
    }
    let model = NetworkModel {
        isps,
        attributes: vec!["bandwidth".into(), "clean_energy".into()],
        paths,
        markets: model_markets,
        valuation_form: ValuationForm::Affine,
        cost_form: CostForm::Affine,
        attribute_lower_bounds: Some(lower),
        attribute_upper_bounds: Some(upper),
    };
    model.validate()?;
    Ok(model)
}

/// Settings for turning an AS graph into a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyConfig {
    pub graph: SyntheticGraphConfig,
    /// Paths kept per market.
    pub k_paths: usize,
    /// Maximum number of ASes on a path.
    pub max_hops: usize,
    /// Pairs with fewer valid paths get no market.
    pub min_paths: usize,
    /// Markets are subsampled down to this count.
    pub max_markets: usize,
    pub gravity: GravitySpec,
    pub profile: ParamProfile,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            graph: SyntheticGraphConfig::default(),
            k_paths: 5,
            max_hops: 5,
            min_paths: 5,
            max_markets: 48,
            gravity: GravitySpec {
                total_traffic: 300.0,
                exponent: 2.0,
            },
            profile: ParamProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyModel {
    pub model: NetworkModel,
    pub graph: AsGraph,
    pub markets: Vec<MarketSkeleton>,
}

/// Enumerates paths for every AS pair in parallel, keeps the pairs with
/// enough paths that contain at least one ISP, allocates gravity demand and
/// synthesizes parameters.
pub fn build_topology_model(graph: &AsGraph, cfg: &TopologyConfig) -> Result<TopologyModel> {
    if cfg.k_paths == 0 || cfg.min_paths > cfg.k_paths {
        return Err(Error::InvalidConfig(
            "need 1 <= min_paths <= k_paths".into(),
        ));
    }
    let adj = graph.adjacency();
    let ids = graph.node_ids();
    let pairs: Vec<(AsId, AsId)> = ids
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| ids[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let mut found: Vec<(AsId, AsId, Vec<Vec<AsId>>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut paths = all_valley_free_paths(&adj, a, b, cfg.max_hops);
            paths.retain(|p| !cfg.profile.isp_scope.members(p).is_empty());
            paths.truncate(cfg.k_paths);
            (a, b, paths)
        })
        .filter(|(_, _, p)| !p.is_empty() && p.len() >= cfg.min_paths.max(1))
        .collect();
    if found.len() > cfg.max_markets {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.profile.seed ^ 0x6d61_726b);
        found.shuffle(&mut rng);
        found.truncate(cfg.max_markets);
        found.sort_by_key(|(a, b, _)| (*a, *b));
    }
    if found.is_empty() {
        return Err(Error::Validation(
            "no AS pair has enough valid paths".into(),
        ));
    }
    let distances: Vec<PairDistance> = found
        .iter()
        .map(|(a, b, p)| PairDistance {
            source: *a,
            destination: *b,
            distance: p.iter().map(|x| (x.len() - 1) as f64).sum::<f64>() / p.len() as f64,
        })
        .collect();
    let demand = gravity_demand(graph, &distances, &cfg.gravity)?;
    let markets: Vec<MarketSkeleton> = found
        .into_iter()
        .zip(demand)
        .map(|((source, destination, paths), demand)| MarketSkeleton {
            source,
            destination,
            demand,
            paths,
        })
        .collect();
    let model = synthesize_params(graph, &markets, &cfg.profile)?;
    Ok(TopologyModel {
        model,
        graph: graph.clone(),
        markets,
    })
}

/// Generates the synthetic graph from `cfg.graph` and builds the model.
pub fn synthetic_topology_model(cfg: &TopologyConfig) -> Result<TopologyModel> {
    build_topology_model(&synthetic_as_graph(&cfg.graph)?, cfg)
}
