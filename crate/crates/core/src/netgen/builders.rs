//! Canonical topologies used by the theory: homogeneous markets and the
//! competition-free / competitive network pairs.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{HomogeneousParams, HomogeneousSpec};
use crate::error::{Error, Result};
use crate::model::{CostForm, IspParams, Market, NetworkModel, Path, Tier, ValuationForm};

fn homogeneous_isp(n: usize, p: &HomogeneousParams) -> IspParams {
    IspParams {
        name: format!("isp{n}"),
        rho: p.rho,
        phi0: p.phi0,
        phi: vec![p.phi1],
        gamma: vec![p.gamma1],
        gamma0: 0.0,
        tier: Tier::Unclassified,
    }
}

fn homogeneous_paths(q: usize, i: usize, p: &HomogeneousParams) -> Vec<Path> {
    (0..q)
        .map(|j| Path {
            id: format!("r{j}"),
            isps: (j * i..(j + 1) * i).collect(),
            base_valuation: p.alpha0,
            valuation_coeffs: vec![vec![p.alpha1]; i],
        })
        .collect()
}

fn assemble(isps: Vec<IspParams>, paths: Vec<Path>, markets: Vec<Market>) -> Result<NetworkModel> {
    let model = NetworkModel {
        isps,
        attributes: vec!["quality".into()],
        paths,
        markets,
        valuation_form: ValuationForm::Affine,
        cost_form: CostForm::Affine,
        attribute_lower_bounds: None,
        attribute_upper_bounds: None,
    };
    model.validate()?;
    Ok(model)
}

fn market(id: usize, d: f64, paths: Vec<usize>) -> Market {
    Market {
        source: format!("s{id}"),
        destination: format!("t{id}"),
        demand_limit: d,
        paths,
    }
}

/// One market with `Q` disjoint paths of `I` identical ISPs each.
pub fn build_homogeneous(spec: &HomogeneousSpec) -> Result<NetworkModel> {
    if spec.q == 0 || spec.i == 0 {
        return Err(Error::Parameter("Q and I must be at least 1".into()));
    }
    let p = spec.params();
    let isps = (0..spec.q * spec.i)
        .map(|n| homogeneous_isp(n, &p))
        .collect();
    let paths = homogeneous_paths(spec.q, spec.i, &p);
    assemble(isps, paths, vec![market(0, spec.d, (0..spec.q).collect())])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionPair {
    /// `Q` isolated single-path markets with demand `d'` each.
    pub n1: NetworkModel,
    /// `Q` markets with demand `d'` each, all sharing the same `Q` paths.
    pub n2: NetworkModel,
    /// Single market with demand `d' Q` whose equilibrium equals that of `n2`.
    pub reduced: NetworkModel,
}

/// Competition-free and competitive homogeneous networks over the same paths.
/// Market `j` of the competitive network lists path `j` first.
pub fn build_competition_pair_homogeneous(
    q: usize,
    i: usize,
    d_prime: f64,
    params: &HomogeneousParams,
) -> Result<CompetitionPair> {
    if q == 0 || i == 0 {
        return Err(Error::Parameter("Q and I must be at least 1".into()));
    }
    let isps: Vec<IspParams> = (0..q * i).map(|n| homogeneous_isp(n, params)).collect();
    let paths = homogeneous_paths(q, i, params);
    let n1 = assemble(
        isps.clone(),
        paths.clone(),
        (0..q).map(|j| market(j, d_prime, vec![j])).collect(),
    )?;
    let n2 = assemble(
        isps,
        paths,
        (0..q)
            .map(|j| market(j, d_prime, (0..q).map(|s| (j + s) % q).collect()))
            .collect(),
    )?;
    let reduced = build_homogeneous(&HomogeneousSpec::from_params(
        q,
        i,
        d_prime * q as f64,
        *params,
    ))?;
    Ok(CompetitionPair { n1, n2, reduced })
}

/// A path served by a single ISP with a single attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPathSide {
    pub alpha: f64,
    pub alpha0: f64,
    pub rho: f64,
    pub phi0: f64,
    pub gamma: f64,
}

impl TwoPathSide {
    /// Characteristic ratio `sqrt(alpha (rho - phi0) / gamma)`.
    pub fn psi(&self) -> f64 {
        (self.alpha * (self.rho - self.phi0) / self.gamma)
            .max(0.0)
            .sqrt()
    }

    fn isp(&self, n: usize) -> IspParams {
        IspParams {
            name: format!("isp{n}"),
            rho: self.rho,
            phi0: self.phi0,
            phi: vec![0.0],
            gamma: vec![self.gamma],
            gamma0: 0.0,
            tier: Tier::Unclassified,
        }
    }

    fn path(&self, n: usize) -> Path {
        Path {
            id: format!("r{n}"),
            isps: vec![n],
            base_valuation: self.alpha0,
            valuation_coeffs: vec![vec![self.alpha]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPathPair {
    /// Each path alone in its own market.
    pub n3: NetworkModel,
    /// Both paths in one market with the combined demand.
    pub n4: NetworkModel,
}

pub fn build_two_path_pair(
    r: &TwoPathSide,
    rbar: &TwoPathSide,
    d_r: f64,
    d_rbar: f64,
) -> Result<TwoPathPair> {
    let isps = vec![r.isp(0), rbar.isp(1)];
    let paths = vec![r.path(0), rbar.path(1)];
    let n3 = assemble(
        isps.clone(),
        paths.clone(),
        vec![market(0, d_r, vec![0]), market(1, d_rbar, vec![1])],
    )?;
    let n4 = assemble(isps, paths, vec![market(0, d_r + d_rbar, vec![0, 1])])?;
    Ok(TwoPathPair { n3, n4 })
}
