//! How opening a market to competition changes equilibrium valuations of
//! heterogeneous paths: a construction where competition lowers aggregate
//! valuation, and a demand sweep showing that competition eventually raises
//! it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{build_two_path_pair, TwoPathPair, TwoPathSide};

use super::heterogeneous::{isolated_paths_equilibrium, two_path_equilibrium};

/// Parameters and outcomes of a two-path instance in which competition
/// lowers total equilibrium valuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionDeclineCase {
    pub d_r: f64,
    pub d_rbar: f64,
    pub margin: f64,
    pub psi_r: f64,
    pub psi_rbar: f64,
    /// Open interval of admissible `psi_r`; the construction uses its midpoint.
    pub interval: (f64, f64),
    pub side_r: TwoPathSide,
    pub side_rbar: TwoPathSide,
    pub pair: TwoPathPair,
    /// Total equilibrium valuation without competition.
    pub v_plus_n3: f64,
    /// Total equilibrium valuation with both paths in one market.
    pub v_plus_n4: f64,
}

impl CompetitionDeclineCase {
    pub fn delta(&self) -> f64 {
        self.v_plus_n4 - self.v_plus_n3
    }
}

/// Builds a path pair in which competition lowers total valuation: the
/// competing path cannot invest at all, but its large base valuation makes
/// the other path give up investing once they share a market.
pub fn competition_decline_counterexample(
    d_r: f64,
    d_rbar: f64,
    margin: f64,
) -> Result<CompetitionDeclineCase> {
    if !(d_r > 0.0 && d_rbar > 0.0 && margin > 0.0) {
        return Err(Error::Parameter(
            "demands and margin must be positive".into(),
        ));
    }
    let alpha_r0 = 0.0;
    let alpha_rbar0 = d_rbar / d_r + margin;
    let d = d_r + d_rbar;
    let lo = (1.0 + alpha_r0) / d_r.sqrt();
    let hi = (1.0 + alpha_r0 + alpha_rbar0) / (d.sqrt() * (1.0 + alpha_rbar0).sqrt());
    if !(lo < hi) {
        return Err(Error::Parameter(format!(
            "empty interval ({lo}, {hi}); increase the margin"
        )));
    }
    let psi_r = 0.5 * (lo + hi);
    let side_r = TwoPathSide {
        alpha: psi_r * psi_r,
        alpha0: alpha_r0,
        rho: 1.0,
        phi0: 0.0,
        gamma: 1.0,
    };
    let side_rbar = TwoPathSide {
        alpha: 1.0,
        alpha0: alpha_rbar0,
        rho: 0.0,
        phi0: 0.0,
        gamma: 1.0,
    };
    let pair = build_two_path_pair(&side_r, &side_rbar, d_r, d_rbar)?;
    let v_plus_n3 = isolated_paths_equilibrium(&pair.n3)?.total_valuation();
    let v_plus_n4 = two_path_equilibrium(&pair.n4)?.total_valuation();
    Ok(CompetitionDeclineCase {
        d_r,
        d_rbar,
        margin,
        psi_r,
        psi_rbar: 0.0,
        interval: (lo, hi),
        side_r,
        side_rbar,
        pair,
        v_plus_n3,
        v_plus_n4,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub d: f64,
    pub v_plus_n3: f64,
    pub v_plus_n4: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverTable {
    pub rows: Vec<CrossoverRow>,
    /// First grid index from which `delta >= 0` holds for every larger demand.
    pub crossover_index: Option<usize>,
    pub crossover_demand: Option<f64>,
}

fn isolated_valuation(side: &TwoPathSide, d: f64) -> f64 {
    side.alpha0.max(side.psi() * d.sqrt() - 1.0)
}

/// Total equilibrium valuation of two isolated paths sharing a total demand
/// `d`, under the split of `d` that maximizes it.
pub fn n3_valuation_max_split(side_r: &TwoPathSide, side_rbar: &TwoPathSide, d: f64) -> f64 {
    let (p, pb) = (side_r.psi(), side_rbar.psi());
    let mut splits = vec![0.0, d];
    if p * p + pb * pb > 0.0 {
        splits.push(p * p / (p * p + pb * pb) * d);
    }
    splits
        .into_iter()
        .map(|x| isolated_valuation(side_r, x) + isolated_valuation(side_rbar, d - x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Compares total equilibrium valuation with and without competition over a
/// grid of total demands.
pub fn demand_crossover_sweep(
    side_r: &TwoPathSide,
    side_rbar: &TwoPathSide,
    d_grid: &[f64],
) -> Result<CrossoverTable> {
    let mut rows = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        if !(d >= 0.0) {
            return Err(Error::Parameter(format!("demand {d} must be non-negative")));
        }
        let pair = build_two_path_pair(side_r, side_rbar, d / 2.0, d / 2.0)?;
        let v_plus_n4 = two_path_equilibrium(&pair.n4)?.total_valuation();
        let v_plus_n3 = n3_valuation_max_split(side_r, side_rbar, d);
        rows.push(CrossoverRow {
            d,
            v_plus_n3,
            v_plus_n4,
            delta: v_plus_n4 - v_plus_n3,
        });
    }
    let mut crossover_index = None;
    for i in (0..rows.len()).rev() {
        if rows[i].delta >= -1e-9 {
            crossover_index = Some(i);
        } else {
            break;
        }
    }
    let crossover_demand = crossover_index.map(|i| rows[i].d);
    Ok(CrossoverTable {
        rows,
        crossover_index,
        crossover_demand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_worked_instance() {
        let c = competition_decline_counterexample(2.0, 2.0, 0.1).unwrap();
        assert!((c.side_rbar.alpha0 - 1.1).abs() < 1e-15);
        let lo = 0.5f64.sqrt();
        let hi = 2.1f64.sqrt() / 2.0;
        assert!((c.psi_r - 0.5 * (lo + hi)).abs() < 1e-15);
        assert!((c.psi_r - 0.715_837_8).abs() < 1e-6);
        assert!((c.v_plus_n4 - 1.1).abs() < 1e-12);
        assert!((c.v_plus_n3 - 1.112_347_5).abs() < 1e-6);
        assert!(c.delta() < 0.0);
    }

    #[test]
    fn counterexample_second_instance() {
        let c = competition_decline_counterexample(1.0, 1.0, 0.5).unwrap();
        assert!((c.interval.0 - 1.0).abs() < 1e-15);
        assert!((c.interval.1 - 2.5 / (2f64.sqrt() * 2.5f64.sqrt())).abs() < 1e-15);
        assert!((c.v_plus_n4 - 1.5).abs() < 1e-12);
        assert!(c.v_plus_n3 > c.v_plus_n4);
    }

    #[test]
    fn tiny_margin_still_works() {
        let c = competition_decline_counterexample(3.0, 1.0, 1e-6).unwrap();
        assert!(c.interval.0 < c.interval.1);
        assert!(c.delta() < 0.0);
    }

    fn unit_side() -> TwoPathSide {
        TwoPathSide {
            alpha: 1.0,
            alpha0: 0.0,
            rho: 1.0,
            phi0: 0.0,
            gamma: 1.0,
        }
    }

    #[test]
    fn symmetric_sweep() {
        let t = demand_crossover_sweep(&unit_side(), &unit_side(), &[0.0, 4.0]).unwrap();
        assert_eq!(t.rows[0].delta, 0.0);
        assert!((t.rows[1].v_plus_n4 - 2.0 * 0.866_025_403_784_438_6).abs() < 1e-9);
        // Routing all demand to one path beats the even split 2(sqrt(2) - 1).
        assert!((t.rows[1].v_plus_n3 - 1.0).abs() < 1e-12);
        assert_eq!(t.crossover_index, Some(0));
    }
}
