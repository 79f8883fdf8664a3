//! AS-level graphs with business relationships, a plain-text ingestion
//! format and a seeded synthetic generator.
//!
//! Text format, one relationship per line:
//!
//! ```text
//! # comment
//! <as_a> <as_b> p2c [mass_a mass_b]   # as_a is a provider of as_b
//! <as_a> <as_b> p2p [mass_a mass_b]   # settlement-free peers
//! ```
//!
//! Node attributes may also come from a JSON sidecar mapping AS ids to
//! `{"mass": .., "mean_energy_intensity": .., "idle_power": ..}`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path as FsPath;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::log_uniform;

pub type AsId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    /// Energy per unit of transit traffic.
    pub mean_energy_intensity: f64,
    /// Traffic-independent energy use per time window.
    pub idle_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsNode {
    pub id: AsId,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyProfile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `a` buys transit from `b`.
    CustomerToProvider,
    PeerToPeer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsEdge {
    pub a: AsId,
    pub b: AsId,
    pub relation: Relation,
}

/// Direction of a single hop as seen by the traffic crossing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Link {
    /// From a customer to its provider.
    Up,
    Peer,
    /// From a provider to its customer.
    Down,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AsGraph {
    pub nodes: Vec<AsNode>,
    pub edges: Vec<AsEdge>,
}

const DEFAULT_MASS: f64 = 1.0;

impl AsGraph {
    pub fn node(&self, id: AsId) -> Option<&AsNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_ids(&self) -> Vec<AsId> {
        let mut ids: Vec<AsId> = self.nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        ids
    }

    /// Adds a node with default mass if it does not exist yet.
    pub fn ensure_node(&mut self, id: AsId) -> &mut AsNode {
        let pos = match self.nodes.iter().position(|n| n.id == id) {
            Some(p) => p,
            None => {
                self.nodes.push(AsNode {
                    id,
                    mass: DEFAULT_MASS,
                    energy: None,
                });
                self.nodes.len() - 1
            }
        };
        &mut self.nodes[pos]
    }

    /// Adds a relationship; repeating an identical one is a no-op.
    pub fn add_edge(&mut self, a: AsId, b: AsId, relation: Relation) -> Result<()> {
        if a == b {
            return Err(Error::Validation(format!("self-edge on AS {a}")));
        }
        let new = AsEdge { a, b, relation };
        if let Some(existing) = self
            .edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
        {
            let same = *existing == new
                || (relation == Relation::PeerToPeer && existing.relation == Relation::PeerToPeer);
            return if same {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "conflicting relationships between AS {a} and AS {b}"
                )))
            };
        }
        self.ensure_node(a);
        self.ensure_node(b);
        self.edges.push(new);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(Error::Validation(format!("duplicate node {}", n.id)));
            }
            if !(n.mass.is_finite() && n.mass >= 0.0) {
                return Err(Error::Validation(format!("AS {} has invalid mass", n.id)));
            }
        }
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if e.a == e.b {
                return Err(Error::Validation(format!("self-edge on AS {}", e.a)));
            }
            if !ids.contains(&e.a) || !ids.contains(&e.b) {
                return Err(Error::Validation(format!(
                    "edge {}-{} references a missing node",
                    e.a, e.b
                )));
            }
            if !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(Error::Validation(format!(
                    "more than one relationship between {} and {}",
                    e.a, e.b
                )));
            }
        }
        Ok(())
    }

    /// Neighbors of every node with the direction of the hop towards them,
    /// sorted by neighbor id.
    pub fn adjacency(&self) -> BTreeMap<AsId, Vec<(AsId, Link)>> {
        let mut adj: BTreeMap<AsId, Vec<(AsId, Link)>> =
            self.nodes.iter().map(|n| (n.id, Vec::new())).collect();
        for e in &self.edges {
            let (ab, ba) = match e.relation {
                Relation::CustomerToProvider => (Link::Up, Link::Down),
                Relation::PeerToPeer => (Link::Peer, Link::Peer),
            };
            adj.entry(e.a).or_default().push((e.b, ab));
            adj.entry(e.b).or_default().push((e.a, ba));
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    /// Providers of every node.
    pub fn providers(&self) -> BTreeMap<AsId, BTreeSet<AsId>> {
        let mut out: BTreeMap<AsId, BTreeSet<AsId>> =
            self.nodes.iter().map(|n| (n.id, BTreeSet::new())).collect();
        for e in &self.edges {
            if e.relation == Relation::CustomerToProvider {
                out.entry(e.a).or_default().insert(e.b);
            }
        }
        out
    }
}

fn parse_number<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{token}'"),
    })
}

fn set_mass(
    graph: &mut AsGraph,
    explicit: &mut BTreeMap<AsId, f64>,
    id: AsId,
    mass: f64,
    line: usize,
) -> Result<()> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(Error::Parse {
            line,
            message: format!("mass of AS {id} must be non-negative"),
        });
    }
    if let Some(prev) = explicit.insert(id, mass) {
        if prev != mass {
            return Err(Error::Validation(format!(
                "line {line}: AS {id} given masses {prev} and {mass}"
            )));
        }
    }
    graph.ensure_node(id).mass = mass;
    Ok(())
}

/// Parses the text relationship format.
pub fn parse_as_graph(text: &str) -> Result<AsGraph> {
    let mut graph = AsGraph::default();
    let mut explicit = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 3 && tokens.len() != 5 {
            return Err(Error::Parse {
                line,
                message: "expected '<as> <as> <p2c|p2p> [mass_a mass_b]'".into(),
            });
        }
        let a: AsId = parse_number(tokens[0], line, "AS id")?;
        let b: AsId = parse_number(tokens[1], line, "AS id")?;
        let edge = match tokens[2] {
            "p2c" => (b, a, Relation::CustomerToProvider),
            "p2p" => (a, b, Relation::PeerToPeer),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown relationship '{other}'"),
                })
            }
        };
        graph
            .add_edge(edge.0, edge.1, edge.2)
            .map_err(|e| match e {
                Error::Validation(m) => Error::Validation(format!("line {line}: {m}")),
                other => other,
            })?;
        if tokens.len() == 5 {
            let ma: f64 = parse_number(tokens[3], line, "mass")?;
            let mb: f64 = parse_number(tokens[4], line, "mass")?;
            set_mass(&mut graph, &mut explicit, a, ma, line)?;
            set_mass(&mut graph, &mut explicit, b, mb, line)?;
        }
    }
    graph.validate()?;
    Ok(graph)
}

#[derive(Debug, Clone, Default, Deserialize)]
struct SidecarEntry {
    mass: Option<f64>,
    mean_energy_intensity: Option<f64>,
    idle_power: Option<f64>,
}

/// Applies node attributes from a JSON object keyed by AS id.
pub fn apply_node_sidecar(graph: &mut AsGraph, json: &str) -> Result<()> {
    let entries: BTreeMap<String, SidecarEntry> = serde_json::from_str(json)?;
    for (key, entry) in entries {
        let id: AsId = key
            .parse()
            .map_err(|_| Error::Validation(format!("sidecar key '{key}' is not an AS id")))?;
        let node = graph.ensure_node(id);
        if let Some(m) = entry.mass {
            node.mass = m;
        }
        match (entry.mean_energy_intensity, entry.idle_power) {
            (Some(e), Some(p)) => {
                node.energy = Some(EnergyProfile {
                    mean_energy_intensity: e,
                    idle_power: p,
                })
            }
            (None, None) => {}
            _ => {
                return Err(Error::Validation(format!(
                    "AS {id}: energy profile needs both intensity and idle power"
                )))
            }
        }
    }
    graph.validate()
}

/// Reads a relationship file, plus `<file>.nodes.json` when present.
pub fn ingest_as_graph(path: &FsPath) -> Result<AsGraph> {
    let text = std::fs::read_to_string(path)?;
    let mut graph = parse_as_graph(&text)?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".nodes.json");
    let sidecar = std::path::PathBuf::from(sidecar);
    if sidecar.exists() {
        apply_node_sidecar(&mut graph, &std::fs::read_to_string(&sidecar)?)?;
    }
    Ok(graph)
}

/// Writes the graph in the text format (masses included on every line).
pub fn format_as_graph(graph: &AsGraph) -> String {
    let mass = |id: AsId| graph.node(id).map_or(DEFAULT_MASS, |n| n.mass);
    let mut out = String::new();
    for e in &graph.edges {
        let (a, b, tag) = match e.relation {
            Relation::CustomerToProvider => (e.b, e.a, "p2c"),
            Relation::PeerToPeer => (e.a, e.b, "p2p"),
        };
        out.push_str(&format!("{a} {b} {tag} {} {}\n", mass(a), mass(b)));
    }
    out
}

/// Removes, round by round, every node of minimum degree at once until at
/// most `target` nodes remain or the next round would empty the graph.
pub fn prune_to_core(graph: &AsGraph, target: usize) -> AsGraph {
    let mut keep: BTreeSet<AsId> = graph.nodes.iter().map(|n| n.id).collect();
    while keep.len() > target {
        let mut degree: BTreeMap<AsId, usize> = keep.iter().map(|&id| (id, 0)).collect();
        for e in &graph.edges {
            if keep.contains(&e.a) && keep.contains(&e.b) {
                *degree.get_mut(&e.a).expect("kept") += 1;
                *degree.get_mut(&e.b).expect("kept") += 1;
            }
        }
        let min = degree.values().copied().min().unwrap_or(0);
        let drop: Vec<AsId> = degree
            .iter()
            .filter(|(_, &d)| d == min)
            .map(|(&id, _)| id)
            .collect();
        if drop.len() == keep.len() {
            break;
        }
        for id in drop {
            keep.remove(&id);
        }
    }
    AsGraph {
        nodes: graph
            .nodes
            .iter()
            .filter(|n| keep.contains(&n.id))
            .cloned()
            .collect(),
        edges: graph
            .edges
            .iter()
            .filter(|e| keep.contains(&e.a) && keep.contains(&e.b))
            .copied()
            .collect(),
    }
}

/// Shape of a synthetic provider hierarchy with three transit layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticGraphConfig {
    pub nodes: usize,
    /// Provider-free core, fully meshed by peering.
    pub tier1: usize,
    /// Regional providers buying transit from the core.
    pub tier2: usize,
    /// Local providers buying transit from the regional providers.
    pub tier3: usize,
    /// Peering probability between two providers of the same layer below
    /// the core.
    pub tier2_peering_probability: f64,
    /// Inclusive range of providers per edge network.
    pub stub_providers: (usize, usize),
    pub mass_range: (f64, f64),
    pub energy_intensity_range: (f64, f64),
    pub idle_power_range: (f64, f64),
    pub seed: u64,
}

impl Default for SyntheticGraphConfig {
    fn default() -> Self {
        Self {
            nodes: 50,
            tier1: 4,
            tier2: 10,
            tier3: 10,
            tier2_peering_probability: 0.25,
            stub_providers: (2, 3),
            mass_range: (50.0, 500.0),
            energy_intensity_range: (0.5, 2.0),
            idle_power_range: (0.5, 2.0),
            seed: 2,
        }
    }
}

/// Seeded hierarchy: a peering core, regional providers with two core
/// providers each, local providers with two regional providers each, and
/// edge networks multi-homed to regional or local providers.
pub fn synthetic_as_graph(cfg: &SyntheticGraphConfig) -> Result<AsGraph> {
    if cfg.tier1 == 0
        || cfg.tier1 + cfg.tier2 + cfg.tier3 > cfg.nodes
        || (cfg.tier3 > 0 && cfg.tier2 == 0)
    {
        return Err(Error::InvalidConfig(
            "tier sizes do not fit the node count".into(),
        ));
    }
    if cfg.stub_providers.0 == 0 || cfg.stub_providers.0 > cfg.stub_providers.1 {
        return Err(Error::InvalidConfig(
            "invalid provider range for edge networks".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut graph = AsGraph::default();
    let ids: Vec<AsId> = (1..=cfg.nodes as AsId).collect();
    let (core, rest) = ids.split_at(cfg.tier1);
    let (regional, rest) = rest.split_at(cfg.tier2);
    let (local, edge) = rest.split_at(cfg.tier3);
    for &id in &ids {
        graph.ensure_node(id);
    }
    for (i, &a) in core.iter().enumerate() {
        for &b in &core[i + 1..] {
            graph.add_edge(a, b, Relation::PeerToPeer)?;
        }
    }
    for &r in regional {
        let count = core.len().min(2);
        for &p in core.choose_multiple(&mut rng, count) {
            graph.add_edge(r, p, Relation::CustomerToProvider)?;
        }
    }
    for &l in local {
        let count = regional.len().min(2);
        for &p in regional.choose_multiple(&mut rng, count) {
            graph.add_edge(l, p, Relation::CustomerToProvider)?;
        }
    }
    for layer in [regional, local] {
        for (i, &a) in layer.iter().enumerate() {
            for &b in &layer[i + 1..] {
                if rng.gen::<f64>() < cfg.tier2_peering_probability {
                    graph.add_edge(a, b, Relation::PeerToPeer)?;
                }
            }
        }
    }
    let upstream: Vec<AsId> = if regional.is_empty() {
        core.to_vec()
    } else {
        regional.iter().chain(local).copied().collect()
    };
    for &s in edge {
        let count = rng
            .gen_range(cfg.stub_providers.0..=cfg.stub_providers.1)
            .min(upstream.len());
        for &p in upstream.choose_multiple(&mut rng, count) {
            graph.add_edge(s, p, Relation::CustomerToProvider)?;
        }
    }
    for node in graph.nodes.iter_mut() {
        node.mass = log_uniform(&mut rng, cfg.mass_range);
        node.energy = Some(EnergyProfile {
            mean_energy_intensity: log_uniform(&mut rng, cfg.energy_intensity_range),
            idle_power: log_uniform(&mut rng, cfg.idle_power_range),
        });
    }
    graph.validate()?;
    Ok(graph)
}
