//! Gravity-model traffic allocation between AS pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::graph::{AsGraph, AsId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GravitySpec {
    pub total_traffic: f64,
    pub exponent: f64,
}

impl Default for GravitySpec {
    fn default() -> Self {
        Self {
            total_traffic: 170.0,
            exponent: 2.0,
        }
    }
}

/// A source/destination pair with its mean hop distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub source: AsId,
    pub destination: AsId,
    pub distance: f64,
}

/// Gravity attraction `m1 m2 / r^exponent`.
pub fn gravity_attraction(m1: f64, m2: f64, distance: f64, exponent: f64) -> f64 {
    m1 * m2 / distance.powf(exponent)
}

/// Splits the total traffic over the pairs in proportion to their gravity
/// attraction. The result is aligned with `pairs`.
pub fn gravity_demand(
    graph: &AsGraph,
    pairs: &[PairDistance],
    spec: &GravitySpec,
) -> Result<Vec<f64>> {
    if !(spec.total_traffic > 0.0 && spec.total_traffic.is_finite()) {
        return Err(Error::Parameter("total traffic must be positive".into()));
    }
    let mass = |id: AsId| {
        graph
            .node(id)
            .map(|n| n.mass)
            .ok_or_else(|| Error::Validation(format!("AS {id} is not in the graph")))
    };
    let mut g = Vec::with_capacity(pairs.len());
    for p in pairs {
        if !(p.distance > 0.0) {
            return Err(Error::ZeroDistance(p.source, p.destination));
        }
        g.push(gravity_attraction(
            mass(p.source)?,
            mass(p.destination)?,
            p.distance,
            spec.exponent,
        ));
    }
    let total: f64 = g.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Allocation);
    }
    Ok(g.into_iter()
        .map(|x| spec.total_traffic * x / total)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::graph::parse_as_graph;

    fn pair(source: AsId, destination: AsId, distance: f64) -> PairDistance {
        PairDistance {
            source,
            destination,
            distance,
        }
    }

    #[test]
    fn attraction_arithmetic() {
        assert_eq!(gravity_attraction(100.0, 100.0, 2.0, 2.0), 2500.0);
    }

    #[test]
    fn allocation_shares() {
        let g = parse_as_graph("1 2 p2p 1 1\n3 4 p2p 1 2").unwrap();
        let spec = GravitySpec::default();
        let d = gravity_demand(&g, &[pair(1, 2, 1.0), pair(3, 1, 1.0)], &spec).unwrap();
        assert_eq!(d, vec![85.0, 85.0]);
        let d = gravity_demand(
            &g,
            &[pair(1, 2, 1.0), pair(1, 3, 1.0), pair(1, 4, 1.0)],
            &spec,
        )
        .unwrap();
        assert_eq!(d, vec![42.5, 42.5, 85.0]);
    }

    #[test]
    fn errors() {
        let g = parse_as_graph("1 2 p2p 0 0\n3 4 p2p 1 1").unwrap();
        let spec = GravitySpec::default();
        assert!(matches!(
            gravity_demand(&g, &[pair(3, 4, 0.0)], &spec),
            Err(Error::ZeroDistance(3, 4))
        ));
        assert!(matches!(
            gravity_demand(&g, &[pair(1, 2, 2.0)], &spec),
            Err(Error::Allocation)
        ));
        assert!(gravity_demand(&g, &[], &spec).is_err());
    }
}
