//! Two competing single-ISP paths with general per-unit attribute costs.
//!
//! The interior equilibrium attribute of the first ISP is a root of a
//! quartic. Candidate roots are paired with the second ISP's best response
//! and the pair with the smallest fixed-point residual wins; boundary
//! equilibria in which one ISP does not invest are considered as well.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::best_response::{best_response, nash_residual};
use crate::error::{Error, Result};
use crate::model::{
    AttributeMatrix, CostForm, IspParams, Market, NetworkModel, Path, Tier, ValuationForm,
};
use crate::numeric::polynomial_roots;

use super::{EquilibriumResult, SolverKind};

const ACCEPT_RESIDUAL: f64 = 1e-4;

/// Parameters of ISP `i` (index 0 or 1), the sole ISP of path `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPathGeneralParams {
    pub d: f64,
    /// Valuation weight of each ISP's attribute on its path.
    pub alpha: [f64; 2],
    /// Base valuation of each path.
    pub alpha0: [f64; 2],
    pub phi1: [f64; 2],
    pub phi0: [f64; 2],
    pub gamma1: [f64; 2],
    pub rho: [f64; 2],
}

impl TwoPathGeneralParams {
    pub fn to_model(&self) -> NetworkModel {
        let isps = (0..2)
            .map(|i| IspParams {
                name: format!("isp{i}"),
                rho: self.rho[i],
                phi0: self.phi0[i],
                phi: vec![self.phi1[i]],
                gamma: vec![self.gamma1[i]],
                gamma0: 0.0,
                tier: Tier::Unclassified,
            })
            .collect();
        let paths = (0..2)
            .map(|i| Path {
                id: format!("r{i}"),
                isps: vec![i],
                base_valuation: self.alpha0[i],
                valuation_coeffs: vec![vec![self.alpha[i]]],
            })
            .collect();
        NetworkModel {
            isps,
            attributes: vec!["a".into()],
            paths,
            markets: vec![Market {
                source: "s".into(),
                destination: "t".into(),
                demand_limit: self.d,
                paths: vec![0, 1],
            }],
            valuation_form: ValuationForm::Affine,
            cost_form: CostForm::Affine,
            attribute_lower_bounds: None,
            attribute_upper_bounds: None,
        }
    }

    /// Reads the parameters off a model with one market of two single-ISP,
    /// single-attribute paths.
    pub fn from_model(model: &NetworkModel) -> Result<Self> {
        let scope = || {
            Error::UnsupportedScope(
                "quartic solver needs one market with two single-ISP paths and one attribute"
                    .into(),
            )
        };
        if model.markets.len() != 1
            || model.markets[0].paths.len() != 2
            || model.num_attributes() != 1
        {
            return Err(scope());
        }
        let paths = [
            &model.paths[model.markets[0].paths[0]],
            &model.paths[model.markets[0].paths[1]],
        ];
        if paths.iter().any(|p| p.isps.len() != 1) || paths[0].isps[0] == paths[1].isps[0] {
            return Err(scope());
        }
        let isp = |i: usize| &model.isps[paths[i].isps[0]];
        Ok(Self {
            d: model.markets[0].demand_limit,
            alpha: [
                paths[0].valuation_coeffs[0][0],
                paths[1].valuation_coeffs[0][0],
            ],
            alpha0: [paths[0].base_valuation, paths[1].base_valuation],
            phi1: [isp(0).phi[0], isp(1).phi[0]],
            phi0: [isp(0).phi0, isp(1).phi0],
            gamma1: [isp(0).gamma[0], isp(1).gamma[0]],
            rho: [isp(0).rho, isp(1).rho],
        })
    }
}

/// Auxiliary terms `L1..L6` and quartic coefficients `T4..T0` (highest first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub l: [f64; 6],
    pub t: [f64; 5],
}

pub fn quartic_coefficients(p: &TwoPathGeneralParams) -> QuarticCoefficients {
    let d = p.d;
    let (a1, a2) = (p.alpha[0], p.alpha[1]);
    let (a10, a20) = (p.alpha0[0], p.alpha0[1]);
    let (f11, f21) = (p.phi1[0], p.phi1[1]);
    let (f10, f20) = (p.phi0[0], p.phi0[1]);
    let (g11, g21) = (p.gamma1[0], p.gamma1[1]);
    let (r1, r2) = (p.rho[0], p.rho[1]);

    let den2 = d * f21 + g21;
    let l1 = d / den2;
    let l2 = g11 / den2;
    let l3 = f21 * (2.0 + 2.0 * a10 + a20) - a2 * (f20 - r2);
    let l4 = (1.0 + a10) * (f21 * (1.0 + a10 + a20) + a2 * (r2 - f20));
    let l5 = f11 * a10 - a1 * (r1 - f10);
    let l6 = -a10 * (r1 - f10);

    let t4 = a1.powi(4) * (f11 * (2.0 * f21 * (2.0 * f11 * l1 + l2) - f11) - f21 * f21 * l2 * l2);
    let t3 = 2.0
        * a1.powi(3)
        * (f11 * (2.0 * l1 * (f11 * l3 + f21 * l5) + l2 * l3 - l5)
            + f21 * (l2 * l5 - l2 * l2 * l3));
    let t2 = a1
        * a1
        * (l1 * (4.0 * f11 * f11 * l4 + 4.0 * f11 * l3 * l5 + f21 * l5 * l5)
            - l2 * l2 * (2.0 * f21 * l4 + l3 * l3)
            + 2.0 * l2 * (f11 * l4 + l5 * l3 + f21 * a1 * l6)
            - 2.0 * f11 * a1 * l6
            - l5 * l5);
    let t1 = a1
        * (l1 * (4.0 * f11 * l4 * l5 + l5 * l5 * l3) - 2.0 * l2 * l2 * l3 * l4
            + 2.0 * l2 * (l5 * l4 + a1 * l3 * l6)
            - 2.0 * a1 * l5 * l6);
    let t0 = l1 * l4 * l5 * l5 - l2 * l2 * l4 * l4 + 2.0 * a1 * l2 * l4 * l6 - a1 * a1 * l6 * l6;
    QuarticCoefficients {
        l: [l1, l2, l3, l4, l5, l6],
        t: [t4, t3, t2, t1, t0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuarticCandidate {
    Root,
    FirstAloneInvests,
    SecondAloneInvests,
    NeitherInvests,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticSolution {
    pub a1_plus: f64,
    pub a2_plus: f64,
    pub residual: f64,
    pub selected: QuarticCandidate,
    /// Distinct candidate profiles that pass the residual check.
    pub accepted: usize,
    pub coefficients: QuarticCoefficients,
    #[serde(with = "crate::numeric::complex_serde")]
    pub roots: Vec<Complex<f64>>,
}

fn pair(a1: f64, a2: f64) -> AttributeMatrix {
    AttributeMatrix::from_rows(vec![vec![a1], vec![a2]]).expect("two rows")
}

fn response(model: &NetworkModel, isp: usize, a1: f64, a2: f64) -> Result<f64> {
    best_response(model, &pair(a1, a2), isp, 0)
}

pub fn quartic_two_path_equilibrium(params: &TwoPathGeneralParams) -> Result<QuarticSolution> {
    let model = params.to_model();
    model.validate()?;
    let coefficients = quartic_coefficients(params);
    let roots = polynomial_roots(&coefficients.t)?;

    let mut candidates = Vec::new();
    for z in &roots {
        if z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) && z.re >= -1e-9 {
            let a1 = z.re.max(0.0);
            candidates.push((QuarticCandidate::Root, a1, response(&model, 1, a1, 0.0)?));
        }
    }
    let first = response(&model, 0, 0.0, 0.0)?;
    candidates.push((QuarticCandidate::FirstAloneInvests, first, 0.0));
    let second = response(&model, 1, 0.0, 0.0)?;
    candidates.push((QuarticCandidate::SecondAloneInvests, 0.0, second));
    candidates.push((QuarticCandidate::NeitherInvests, 0.0, 0.0));

    let mut best: Option<(f64, QuarticCandidate, f64, f64)> = None;
    let mut passing: Vec<(f64, f64)> = Vec::new();
    for (kind, a1, a2) in candidates {
        let residual = nash_residual(&model, &pair(a1, a2), &[0, 1])?;
        let fresh = !passing.iter().any(|&(x, y)| {
            (x - a1).abs() <= 1e-7 * (1.0 + x.abs()) && (y - a2).abs() <= 1e-7 * (1.0 + y.abs())
        });
        if residual <= ACCEPT_RESIDUAL && fresh {
            passing.push((a1, a2));
        }
        if best.is_none_or(|(r, ..)| residual < r) {
            best = Some((residual, kind, a1, a2));
        }
    }
    let (residual, selected, a1_plus, a2_plus) = best.expect("boundary candidates always exist");
    if residual > ACCEPT_RESIDUAL {
        return Err(Error::SolverFailure {
            message: format!("best candidate residual {residual:e} exceeds {ACCEPT_RESIDUAL:e}"),
            roots,
        });
    }
    Ok(QuarticSolution {
        a1_plus,
        a2_plus,
        residual,
        selected,
        accepted: passing.len(),
        coefficients,
        roots,
    })
}

/// [`quartic_two_path_equilibrium`] on a model accepted by
/// [`TwoPathGeneralParams::from_model`], as an equilibrium result.
pub fn quartic_equilibrium(model: &NetworkModel) -> Result<EquilibriumResult> {
    let solution = quartic_two_path_equilibrium(&TwoPathGeneralParams::from_model(model)?)?;
    let attributes = pair(solution.a1_plus, solution.a2_plus);
    let mut result = EquilibriumResult::new(
        model,
        attributes,
        SolverKind::Quartic,
        solution.residual,
        solution.accepted == 1,
    )?;
    result
        .diagnostics
        .push(format!("selected candidate: {:?}", solution.selected));
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric() -> TwoPathGeneralParams {
        TwoPathGeneralParams {
            d: 4.0,
            alpha: [1.0, 1.0],
            alpha0: [0.0, 0.0],
            phi1: [0.0, 0.0],
            phi0: [0.0, 0.0],
            gamma1: [1.0, 1.0],
            rho: [1.0, 1.0],
        }
    }

    #[test]
    fn symmetric_case_matches_closed_form() {
        let s = quartic_two_path_equilibrium(&symmetric()).unwrap();
        assert!((s.a1_plus - 0.866_025_403_784_438_6).abs() < 1e-9);
        assert!((s.a2_plus - s.a1_plus).abs() < 1e-9);
        assert_eq!(s.selected, QuarticCandidate::Root);
    }

    #[test]
    fn unprofitable_second_isp_gives_boundary() {
        let mut p = symmetric();
        p.phi1 = [0.05, 0.1];
        p.rho = [1.0, 0.3];
        p.phi0 = [0.1, 0.3];
        let s = quartic_two_path_equilibrium(&p).unwrap();
        assert_eq!(s.a2_plus, 0.0);
        let model = p.to_model();
        let alone = best_response(&model, &pair(0.0, 0.0), 0, 0).unwrap();
        assert!((s.a1_plus - alone).abs() < 1e-9);
    }

    #[test]
    fn result_wrapper() {
        let r = quartic_equilibrium(&symmetric().to_model()).unwrap();
        assert_eq!(r.solver, SolverKind::Quartic);
        assert!(r.unique_in_attributes);
        assert!((r.path_valuations[0] - 0.866_025_403_784_438_6).abs() < 1e-9);
    }

    #[test]
    fn model_round_trip() {
        let p = symmetric();
        assert_eq!(TwoPathGeneralParams::from_model(&p.to_model()).unwrap(), p);
    }
}
