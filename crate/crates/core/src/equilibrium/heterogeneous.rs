//! Heterogeneous ISPs on one or two paths, with negligible per-unit
//! attribute costs. Only the ISPs with the best benefit-to-cost ratio on a
//! path invest.

use crate::best_response::nash_residual;
use crate::error::{Error, Result};
use crate::model::{AttributeMatrix, NetworkModel};

use super::nbs::{improve_nash_product, joint_profit_residual};
use super::{EquilibriumResult, SolverKind};

const TIE_TOLERANCE: f64 = 1e-12;

struct Candidate {
    isp: usize,
    attribute: usize,
    alpha: f64,
    ratio: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum RatioKind {
    /// `alpha (rho - phi0) / gamma`
    Equilibrium,
    /// `alpha / gamma`
    Bargaining,
}

fn candidates(
    model: &NetworkModel,
    r: usize,
    kind: RatioKind,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<Candidate>> {
    let path = &model.paths[r];
    let mut out = Vec::new();
    for (pos, &n) in path.isps.iter().enumerate() {
        let isp = &model.isps[n];
        for k in 0..model.num_attributes() {
            let alpha = path.valuation_coeffs[pos][k];
            let numerator = match kind {
                RatioKind::Equilibrium => alpha * (isp.rho - isp.phi0),
                RatioKind::Bargaining => alpha,
            };
            let gamma = isp.gamma[k];
            if gamma <= 0.0 {
                if numerator > 0.0 {
                    diagnostics.push(format!(
                        "ISP {n}, attribute {k}: zero gamma gives an unbounded ratio, excluded"
                    ));
                }
                continue;
            }
            out.push(Candidate {
                isp: n,
                attribute: k,
                alpha,
                ratio: numerator / gamma,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyAttributeSet(r));
    }
    Ok(out)
}

/// Winners in index order, so the first one is the lexicographically first.
fn winners(cands: &[Candidate]) -> (f64, Vec<&Candidate>) {
    let best = cands
        .iter()
        .map(|c| c.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let set = cands
        .iter()
        .filter(|c| c.ratio >= best - TIE_TOLERANCE * best.abs())
        .collect();
    (best, set)
}

fn require_negligible_unit_cost(model: &NetworkModel, paths: &[usize]) -> Result<()> {
    for &r in paths {
        for &n in &model.paths[r].isps {
            if model.isps[n].phi.iter().any(|&p| p != 0.0) {
                return Err(Error::UnsupportedScope(format!(
                    "ISP {n} has a non-zero per-unit attribute cost"
                )));
            }
        }
    }
    Ok(())
}

/// Market and demand of a path that is the only option of its market and
/// whose ISPs serve no other market.
fn isolated_market(model: &NetworkModel, r: usize) -> Result<f64> {
    if r >= model.paths.len() {
        return Err(Error::UnknownPath(r));
    }
    let containing: Vec<usize> = (0..model.markets.len())
        .filter(|&m| model.markets[m].paths.contains(&r))
        .collect();
    if containing.len() != 1 || model.markets[containing[0]].paths.len() != 1 {
        return Err(Error::UnsupportedScope(format!(
            "path {r} must be the only path of exactly one market"
        )));
    }
    let own = containing[0];
    let isps = &model.paths[r].isps;
    for (m, market) in model.markets.iter().enumerate() {
        if m != own
            && market
                .paths
                .iter()
                .any(|&q| model.paths[q].isps.iter().any(|n| isps.contains(n)))
        {
            return Err(Error::UnsupportedScope(format!(
                "an ISP of path {r} also serves market {m}"
            )));
        }
    }
    Ok(model.markets[own].demand_limit)
}

/// `psi_r`: the largest `sqrt(alpha (rho - phi0) / gamma)` on path `r`.
pub fn characteristic_ratio(model: &NetworkModel, r: usize) -> Result<f64> {
    let path = model.paths.get(r).ok_or(Error::UnknownPath(r))?;
    let mut best = 0.0_f64;
    for (pos, &n) in path.isps.iter().enumerate() {
        let isp = &model.isps[n];
        for k in 0..model.num_attributes() {
            if isp.gamma[k] <= 0.0 {
                return Err(Error::DegenerateRatio {
                    isp: n,
                    attribute: k,
                });
            }
            let ratio = path.valuation_coeffs[pos][k] * (isp.rho - isp.phi0) / isp.gamma[k];
            best = best.max(ratio.max(0.0).sqrt());
        }
    }
    Ok(best)
}

/// The ISP and attribute that invest on path `r` at equilibrium, with the
/// attribute's valuation weight.
pub(crate) fn leading_coordinate(model: &NetworkModel, r: usize) -> Result<(usize, usize, f64)> {
    let mut diagnostics = Vec::new();
    let cands = candidates(model, r, RatioKind::Equilibrium, &mut diagnostics)?;
    let (_, set) = winners(&cands);
    Ok((set[0].isp, set[0].attribute, set[0].alpha))
}

fn place_mass(a: &mut AttributeMatrix, winner: &Candidate, mass: f64) {
    if mass > 0.0 {
        a.set(winner.isp, winner.attribute, mass / winner.alpha);
    }
}

/// Equilibrium of a single isolated path.
pub fn single_path_equilibrium(model: &NetworkModel, r: usize) -> Result<EquilibriumResult> {
    let d = isolated_market(model, r)?;
    require_negligible_unit_cost(model, &[r])?;
    let mut diagnostics = Vec::new();
    let cands = candidates(model, r, RatioKind::Equilibrium, &mut diagnostics)?;
    let (best, set) = winners(&cands);
    let base = model.paths[r].base_valuation;
    let v = base.max((best.max(0.0) * d).sqrt() - 1.0);
    let mut a = model.zero_attributes();
    place_mass(&mut a, set[0], v - base);
    let residual = nash_residual(model, &a, &model.paths[r].isps)?;
    let unique = set.len() == 1 || v <= base;
    let mut result = EquilibriumResult::new(model, a, SolverKind::SinglePath, residual, unique)?;
    result.diagnostics = diagnostics;
    Ok(result)
}

/// Joint-profit-optimal valuation of a single isolated path. When several
/// ISPs tie for the best ratio, the split among them maximizes the Nash
/// product.
pub fn single_path_nbs(model: &NetworkModel, r: usize) -> Result<EquilibriumResult> {
    let d = isolated_market(model, r)?;
    require_negligible_unit_cost(model, &[r])?;
    let mut diagnostics = Vec::new();
    let cands = candidates(model, r, RatioKind::Bargaining, &mut diagnostics)?;
    let (best, set) = winners(&cands);
    let path = &model.paths[r];
    let net_revenue: f64 = path
        .isps
        .iter()
        .map(|&n| model.isps[n].rho - model.isps[n].phi0)
        .sum();
    let base = path.base_valuation;
    let v = base.max((best * d * net_revenue).max(0.0).sqrt() - 1.0);
    let mut a = model.zero_attributes();
    place_mass(&mut a, set[0], v - base);
    let coords: Vec<(usize, usize)> = set.iter().map(|c| (c.isp, c.attribute)).collect();
    if set.len() > 1 && v > base {
        a = improve_nash_product(model, &a, &coords, &path.isps)?;
    }
    let residual = joint_profit_residual(model, &a, &coords)?;
    let unique = set.len() == 1 || v <= base;
    let mut result = EquilibriumResult::new(model, a, SolverKind::SinglePathNbs, residual, unique)?;
    result.nash_product = Some(path.isps.iter().try_fold(1.0, |acc, &n| {
        crate::model::profit(model, &result.attributes, n).map(|p| acc * p)
    })?);
    result.diagnostics = diagnostics;
    Ok(result)
}

/// Equilibrium of a model in which every market has a single path and no
/// ISP serves two markets; each path is solved on its own.
pub fn isolated_paths_equilibrium(model: &NetworkModel) -> Result<EquilibriumResult> {
    let mut a = model.zero_attributes();
    let mut unique = true;
    let mut diagnostics = Vec::new();
    let mut isps = Vec::new();
    for market in &model.markets {
        for &r in &market.paths {
            let part = single_path_equilibrium(model, r)?;
            for &n in &model.paths[r].isps {
                for k in 0..model.num_attributes() {
                    a.set(n, k, part.attributes.get(n, k));
                }
                isps.push(n);
            }
            unique &= part.unique_in_attributes;
            diagnostics.extend(part.diagnostics);
        }
    }
    let residual = nash_residual(model, &a, &isps)?;
    let mut result = EquilibriumResult::new(model, a, SolverKind::IsolatedPaths, residual, unique)?;
    result.diagnostics = diagnostics;
    Ok(result)
}

/// Best-response valuation of a path with ratio `psi` against a competing
/// valuation `other`, before clamping at the base valuation.
pub fn two_path_reaction(psi: f64, d: f64, other: f64) -> f64 {
    psi * d.sqrt() * (1.0 + other).sqrt() - (1.0 + other)
}

/// Interior equilibrium valuation of the path with ratio `psi` against a
/// competitor with ratio `psi_other`, ignoring base valuations.
pub fn two_path_interior_valuation(psi: f64, psi_other: f64, d: f64) -> f64 {
    let s = psi * psi + psi_other * psi_other;
    if s == 0.0 {
        return -1.0;
    }
    let pp = psi * psi_other;
    psi.powi(3) * psi_other / (s * s) * ((d * s + 0.25 * pp * pp * d * d).sqrt() + 0.5 * d * pp)
        - psi_other * psi_other / s
}

/// Equilibrium of one market with two disjoint competing paths.
pub fn two_path_equilibrium(model: &NetworkModel) -> Result<EquilibriumResult> {
    if model.markets.len() != 1 || model.markets[0].paths.len() != 2 {
        return Err(Error::UnsupportedScope(
            "two-path equilibrium needs one market with exactly two paths".into(),
        ));
    }
    let (r, rb) = (model.markets[0].paths[0], model.markets[0].paths[1]);
    if model.paths[r]
        .isps
        .iter()
        .any(|n| model.paths[rb].contains(*n))
    {
        return Err(Error::UnsupportedScope("the two paths share an ISP".into()));
    }
    require_negligible_unit_cost(model, &[r, rb])?;
    let d = model.markets[0].demand_limit;
    let (psi, psi_b) = (
        characteristic_ratio(model, r)?,
        characteristic_ratio(model, rb)?,
    );
    let (base, base_b) = (
        model.paths[r].base_valuation,
        model.paths[rb].base_valuation,
    );

    let (v, v_b) = if psi == 0.0 && psi_b == 0.0 {
        (base, base_b)
    } else {
        let hat = two_path_interior_valuation(psi, psi_b, d);
        let hat_b = two_path_interior_valuation(psi_b, psi, d);
        (
            base.max(two_path_reaction(psi, d, base_b.max(hat_b))),
            base_b.max(two_path_reaction(psi_b, d, base.max(hat))),
        )
    };

    let mut diagnostics = Vec::new();
    let mut a = model.zero_attributes();
    let mut unique = true;
    for (path, value, path_base) in [(r, v, base), (rb, v_b, base_b)] {
        let cands = candidates(model, path, RatioKind::Equilibrium, &mut diagnostics)?;
        let (_, set) = winners(&cands);
        place_mass(&mut a, set[0], value - path_base);
        unique &= set.len() == 1 || value <= path_base;
    }
    let isps: Vec<usize> = model.paths[r]
        .isps
        .iter()
        .chain(&model.paths[rb].isps)
        .copied()
        .collect();
    let residual = nash_residual(model, &a, &isps)?;
    let mut result = EquilibriumResult::new(model, a, SolverKind::TwoPath, residual, unique)?;
    result.diagnostics = diagnostics;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostForm, IspParams, Market, Path, Tier, ValuationForm};

    fn isp(rho: f64, gamma: f64) -> IspParams {
        IspParams {
            name: String::new(),
            rho,
            phi0: 0.0,
            phi: vec![0.0],
            gamma: vec![gamma],
            gamma0: 0.0,
            tier: Tier::Unclassified,
        }
    }

    fn model(isps: Vec<IspParams>, paths: Vec<Path>, markets: Vec<Market>) -> NetworkModel {
        NetworkModel {
            isps,
            attributes: vec!["q".into()],
            paths,
            markets,
            valuation_form: ValuationForm::Affine,
            cost_form: CostForm::Affine,
            attribute_lower_bounds: None,
            attribute_upper_bounds: None,
        }
    }

    fn path(isps: Vec<usize>, base: f64) -> Path {
        let coeffs = isps.iter().map(|_| vec![1.0]).collect();
        Path {
            id: String::new(),
            isps,
            base_valuation: base,
            valuation_coeffs: coeffs,
        }
    }

    fn market(paths: Vec<usize>, d: f64) -> Market {
        Market {
            source: "s".into(),
            destination: "t".into(),
            demand_limit: d,
            paths,
        }
    }

    fn two_isp_path(base: f64) -> NetworkModel {
        model(
            vec![isp(1.0, 1.0), isp(2.0, 4.0)],
            vec![path(vec![0, 1], base)],
            vec![market(vec![0], 4.0)],
        )
    }

    #[test]
    fn single_path_examples() {
        let m = two_isp_path(0.0);
        let eq = single_path_equilibrium(&m, 0).unwrap();
        assert!((eq.path_valuations[0] - 1.0).abs() < 1e-12);
        assert!(eq.attributes.get(0, 0) > 0.0 && eq.attributes.get(1, 0) == 0.0);
        assert!(eq.unique_in_attributes && eq.residual < 1e-9);

        let nbs = single_path_nbs(&m, 0).unwrap();
        assert!((nbs.path_valuations[0] - (12f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(nbs.path_valuations[0] >= eq.path_valuations[0]);
        assert!(nbs.residual < 1e-6);

        let rich = two_isp_path(5.0);
        assert_eq!(
            single_path_equilibrium(&rich, 0).unwrap().path_valuations[0],
            5.0
        );
        assert_eq!(single_path_nbs(&rich, 0).unwrap().path_valuations[0], 5.0);
    }

    #[test]
    fn ties_are_not_unique() {
        let m = model(
            vec![isp(1.0, 1.0), isp(1.0, 1.0)],
            vec![path(vec![0, 1], 0.0)],
            vec![market(vec![0], 4.0)],
        );
        let eq = single_path_equilibrium(&m, 0).unwrap();
        assert!(!eq.unique_in_attributes);
        assert!((eq.path_valuations[0] - 1.0).abs() < 1e-12);
        let nbs = single_path_nbs(&m, 0).unwrap();
        // Symmetric ISPs end up sharing the investment evenly.
        assert!((nbs.attributes.get(0, 0) - nbs.attributes.get(1, 0)).abs() < 1e-6);
    }

    #[test]
    fn characteristic_ratio_examples() {
        assert!((characteristic_ratio(&two_isp_path(0.0), 0).unwrap() - 1.0).abs() < 1e-15);
        let mut flat = two_isp_path(0.0);
        for i in flat.isps.iter_mut() {
            i.phi0 = i.rho;
        }
        assert_eq!(characteristic_ratio(&flat, 0).unwrap(), 0.0);
        let mut one = model(
            vec![isp(1.0, 1.0)],
            vec![path(vec![0], 0.0)],
            vec![market(vec![0], 1.0)],
        );
        one.paths[0].valuation_coeffs = vec![vec![4.0]];
        assert_eq!(characteristic_ratio(&one, 0).unwrap(), 2.0);
        one.isps[0].gamma = vec![0.0];
        assert!(matches!(
            characteristic_ratio(&one, 0),
            Err(Error::DegenerateRatio { .. })
        ));
    }

    fn symmetric_two_path(base: f64, base_b: f64, rho_b: f64) -> NetworkModel {
        model(
            vec![isp(1.0, 1.0), isp(rho_b, 1.0)],
            vec![path(vec![0], base), path(vec![1], base_b)],
            vec![market(vec![0, 1], 4.0)],
        )
    }

    #[test]
    fn two_path_examples() {
        let eq = two_path_equilibrium(&symmetric_two_path(0.0, 0.0, 1.0)).unwrap();
        let expected = 0.866_025_403_784_438_6;
        assert!((eq.path_valuations[0] - expected).abs() < 1e-9);
        assert!((eq.path_valuations[1] - expected).abs() < 1e-9);
        assert!(eq.residual < 1e-9);

        let eq = two_path_equilibrium(&symmetric_two_path(0.0, 0.7, 0.0)).unwrap();
        assert_eq!(eq.path_valuations[1], 0.7);
        let lone = 2.0 * 1.7f64.sqrt() - 1.7;
        assert!((eq.path_valuations[0] - lone).abs() < 1e-12);
        assert!(eq.residual < 1e-9);

        let eq = two_path_equilibrium(&symmetric_two_path(1e3, 0.0, 1.0)).unwrap();
        assert_eq!(eq.path_valuations[0], 1e3);
    }

    #[test]
    fn interior_valuation_limits() {
        assert_eq!(two_path_interior_valuation(0.0, 1.0, 4.0), -1.0);
        assert_eq!(two_path_interior_valuation(1.0, 0.0, 4.0), 0.0);
    }

    #[test]
    fn isolated_paths_combine() {
        let m = model(
            vec![isp(1.0, 1.0), isp(1.0, 1.0)],
            vec![path(vec![0], 0.0), path(vec![1], 0.0)],
            vec![market(vec![0], 4.0), market(vec![1], 9.0)],
        );
        let eq = isolated_paths_equilibrium(&m).unwrap();
        assert!((eq.path_valuations[0] - 1.0).abs() < 1e-12);
        assert!((eq.path_valuations[1] - 2.0).abs() < 1e-12);
        assert!(eq.residual < 1e-9);
    }

    #[test]
    fn scope_checks() {
        let mut m = two_isp_path(0.0);
        m.isps[0].phi = vec![0.1];
        assert!(matches!(
            single_path_equilibrium(&m, 0),
            Err(Error::UnsupportedScope(_))
        ));
        let shared = model(
            vec![isp(1.0, 1.0)],
            vec![path(vec![0], 0.0), path(vec![0], 0.0)],
            vec![market(vec![0, 1], 4.0)],
        );
        assert!(two_path_equilibrium(&shared).is_err());
    }
}
