//! Jacobians of the best-response dynamics at equilibrium and their spectra.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::equilibrium::heterogeneous::leading_coordinate;
use crate::equilibrium::{
    characteristic_ratio, homogeneous_equilibrium, EquilibriumResult, HomogeneousSpec,
};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::numeric::eigenvalues;

const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub jacobian: Vec<Vec<f64>>,
    #[serde(with = "crate::numeric::complex_serde")]
    pub eigenvalues: Vec<Complex<f64>>,
    pub classification: Stability,
    /// Closed-form spectrum, listed with multiplicities.
    #[serde(default, with = "crate::numeric::complex_serde::option")]
    pub analytic_eigs: Option<Vec<Complex<f64>>>,
}

/// Stable when every real part is below `-1e-9`, marginal when the largest
/// is within `1e-9` of zero.
pub fn classify(eigs: &[Complex<f64>]) -> Stability {
    let top = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if top < -CLASSIFY_TOL {
        Stability::Stable
    } else if top.abs() <= CLASSIFY_TOL {
        Stability::Marginal
    } else {
        Stability::Unstable
    }
}

fn report(jacobian: DMatrix<f64>, analytic: Option<Vec<Complex<f64>>>) -> Result<StabilityReport> {
    let eigs = eigenvalues(&jacobian)?;
    let rows = (0..jacobian.nrows())
        .map(|i| jacobian.row(i).iter().copied().collect())
        .collect();
    Ok(StabilityReport {
        jacobian: rows,
        classification: classify(&eigs),
        eigenvalues: eigs,
        analytic_eigs: analytic,
    })
}

/// Jacobian of the homogeneous dynamics at its equilibrium, with ISPs
/// ordered path by path.
pub fn jacobian_homogeneous(spec: &HomogeneousSpec) -> Result<StabilityReport> {
    spec.validate()?;
    let eq = homogeneous_equilibrium(spec)?;
    let (q, i) = (spec.q, spec.i);
    let size = q * i;
    if eq.a_hat < 0.0 {
        let analytic = vec![Complex::new(-1.0, 0.0); size];
        return report(-DMatrix::<f64>::identity(size, size), Some(analytic));
    }
    let a = eq.a_hat;
    let path_value = i as f64 * spec.alpha1 * a + spec.alpha0;
    let v_other_paths = (q - 1) as f64 * path_value;
    let v_without_n = v_other_paths + path_value - spec.alpha1 * a;
    let unit_cost = spec.d * spec.phi1 + spec.gamma1;
    let t4 = spec.d * spec.phi1 * (1.0 + v_other_paths);
    let t6 = spec.d * (spec.phi1 * (1.0 + v_without_n) + spec.alpha1 * (spec.rho - spec.phi0));
    let radicand = (1.0 + v_other_paths) * t6 / unit_cost;
    let t5 = 2.0 * unit_cost * radicand.sqrt();

    let same = t4 / t5 - 1.0;
    let cross = (t4 + t6) / t5 - 1.0;
    let j = DMatrix::from_fn(size, size, |x, y| {
        if x == y {
            -1.0
        } else if x / i == y / i {
            same
        } else {
            cross
        }
    });
    let l1 = -t4 / t5;
    let l2 = -(t4 + i as f64 * t6) / t5;
    let l3 = (q * i) as f64 * cross - (t4 + i as f64 * t6) / t5;
    let mut analytic = Vec::with_capacity(size);
    analytic.extend(std::iter::repeat_n(Complex::new(l1, 0.0), q * (i - 1)));
    analytic.extend(std::iter::repeat_n(Complex::new(l2, 0.0), q - 1));
    analytic.push(Complex::new(l3, 0.0));
    report(j, Some(analytic))
}

/// Jacobian of the two-path dynamics at a unique equilibrium, in the
/// coordinates of the investing attribute of each path.
pub fn jacobian_two_path(model: &NetworkModel, eq: &EquilibriumResult) -> Result<StabilityReport> {
    if model.markets.len() != 1 || model.markets[0].paths.len() != 2 {
        return Err(Error::UnsupportedScope(
            "two-path Jacobian needs one market with two paths".into(),
        ));
    }
    if !eq.unique_in_attributes {
        return Err(Error::UnsupportedScope(
            "stability is only defined here for a unique equilibrium".into(),
        ));
    }
    let d = model.markets[0].demand_limit;
    let paths = [model.markets[0].paths[0], model.markets[0].paths[1]];
    let mut psi = [0.0; 2];
    let mut alpha = [0.0; 2];
    for (s, &r) in paths.iter().enumerate() {
        if model.paths[r]
            .isps
            .iter()
            .any(|&n| model.isps[n].phi.iter().any(|&p| p != 0.0))
        {
            return Err(Error::UnsupportedScope(
                "per-unit attribute costs must be zero".into(),
            ));
        }
        psi[s] = characteristic_ratio(model, r)?;
        alpha[s] = leading_coordinate(model, r)?.2;
    }
    let mut entries = [0.0; 2];
    for s in 0..2 {
        let o = 1 - s;
        let v_other = eq.path_valuations[paths[o]];
        let base = model.paths[paths[s]].base_valuation;
        let unrestricted = psi[s] * d.sqrt() * (1.0 + v_other).sqrt() - (1.0 + v_other) - base;
        entries[s] = if unrestricted < 0.0 {
            0.0
        } else {
            alpha[o] / alpha[s] * (psi[s] * d.sqrt() / (2.0 * (1.0 + v_other).sqrt()) - 1.0)
        };
    }
    let j = DMatrix::from_row_slice(2, 2, &[-1.0, entries[0], entries[1], -1.0]);
    let root = Complex::new(entries[0] * entries[1], 0.0).sqrt();
    let analytic = vec![
        Complex::new(-1.0, 0.0) + root,
        Complex::new(-1.0, 0.0) - root,
    ];
    report(j, Some(analytic))
}
