//! Numeric bargaining solutions for small instances.
//!
//! A bargaining solution is first of all Pareto-optimal, so the search
//! maximizes joint profit, then moves along the joint-profit optimum by
//! valuation-preserving transfers between ISPs to raise the product of
//! profits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{profits, AttributeMatrix, NetworkModel, ValuationForm};
use crate::numeric::grid_golden_max;

use super::{EquilibriumResult, SolverKind};

const MAX_COORDINATES: usize = 12;

/// Sum of all ISP profits.
pub fn joint_profit(model: &NetworkModel, a: &AttributeMatrix) -> Result<f64> {
    Ok(profits(model, a)?.iter().sum())
}

fn maximize_along<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi_cap: f64, current: f64) -> f64 {
    let mut h = (2.0 * current).max(2.0 * lo).max(1.0);
    while h < 1e12 && h < hi_cap && f((2.0 * h).min(hi_cap)) > f(h) {
        h *= 2.0;
    }
    let hi = (2.0 * h).min(hi_cap);
    if hi <= lo {
        return lo;
    }
    grid_golden_max(f, lo, hi, 200).0
}

fn optimize_coordinate(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<f64> {
    let mut probe = a.clone();
    let mut failure = None;
    let x = maximize_along(
        |x| {
            probe.set(n, k, x);
            match joint_profit(model, &probe) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            }
        },
        model.lower_bound(n, k).max(0.0),
        model.upper_bound(n, k),
        a.get(n, k),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(x),
    }
}

/// Largest distance between an attribute and the joint-profit maximizer
/// along its coordinate.
pub(crate) fn joint_profit_residual(
    model: &NetworkModel,
    a: &AttributeMatrix,
    coords: &[(usize, usize)],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &(n, k) in coords {
        let x = optimize_coordinate(model, a, n, k)?;
        worst = worst.max((x - a.get(n, k)).abs());
    }
    Ok(worst)
}

fn weight_vector(model: &NetworkModel, n: usize, k: usize) -> Vec<f64> {
    model.paths.iter().map(|p| p.coeff(n, k)).collect()
}

/// Ratio `lambda` with `w_j = lambda * w_i`, if the vectors are proportional.
fn proportional(wi: &[f64], wj: &[f64]) -> Option<f64> {
    let mut lambda = None;
    for (x, y) in wi.iter().zip(wj) {
        match (*x == 0.0, *y == 0.0) {
            (true, true) => continue,
            (false, false) => {
                let l = y / x;
                match lambda {
                    None => lambda = Some(l),
                    Some(prev) if (l - prev).abs() <= 1e-12 * prev.abs() => {}
                    Some(_) => return None,
                }
            }
            _ => return None,
        }
    }
    lambda
}

fn to_valuation_space(form: ValuationForm, a: f64) -> f64 {
    form.apply(a)
}

fn from_valuation_space(form: ValuationForm, u: f64) -> f64 {
    match form {
        ValuationForm::Affine => u,
        ValuationForm::SqrtAttribute => u * u,
    }
}

fn product_of(values: &[f64], subset: &[usize]) -> f64 {
    subset.iter().map(|&n| values[n]).product()
}

/// Raises the product of the profits of `subset` by transfers between
/// coordinates whose valuation weights are proportional, never lowering
/// joint profit by more than a relative `1e-9`.
pub fn improve_nash_product(
    model: &NetworkModel,
    a: &AttributeMatrix,
    coords: &[(usize, usize)],
    subset: &[usize],
) -> Result<AttributeMatrix> {
    let form = model.valuation_form;
    let weights: Vec<Vec<f64>> = coords
        .iter()
        .map(|&(n, k)| weight_vector(model, n, k))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            if let Some(l) = proportional(&weights[i], &weights[j]) {
                pairs.push((i, j, l));
            }
        }
    }
    let mut current = a.clone();
    if pairs.is_empty() {
        return Ok(current);
    }
    let joint0 = joint_profit(model, &current)?;
    let floor = joint0 - 1e-9 * (1.0 + joint0.abs());
    for _ in 0..50 {
        let mut improved = false;
        for &(i, j, lambda) in &pairs {
            let ((ni, ki), (nj, kj)) = (coords[i], coords[j]);
            let ui = to_valuation_space(form, current.get(ni, ki));
            let uj = to_valuation_space(form, current.get(nj, kj));
            let lo_i = to_valuation_space(form, model.lower_bound(ni, ki));
            let hi_i = to_valuation_space(form, model.upper_bound(ni, ki));
            let lo_j = to_valuation_space(form, model.lower_bound(nj, kj));
            let hi_j = to_valuation_space(form, model.upper_bound(nj, kj));
            let dmin = (lo_i - ui).max((uj - hi_j) * lambda);
            let dmax = (hi_i - ui).min((uj - lo_j) * lambda);
            if !(dmax > dmin) {
                continue;
            }
            let before = product_of(&profits(model, &current)?, subset);
            let mut probe = current.clone();
            let mut evaluate = |delta: f64| {
                probe.set(ni, ki, from_valuation_space(form, (ui + delta).max(0.0)));
                probe.set(
                    nj,
                    kj,
                    from_valuation_space(form, (uj - delta / lambda).max(0.0)),
                );
                match profits(model, &probe) {
                    Ok(p) if p.iter().sum::<f64>() >= floor => product_of(&p, subset),
                    _ => f64::NEG_INFINITY,
                }
            };
            let (delta, value) = grid_golden_max(&mut evaluate, dmin, dmax, 64);
            if value > before + 1e-12 * before.abs().max(1e-300) {
                current.set(ni, ki, from_valuation_space(form, (ui + delta).max(0.0)));
                current.set(
                    nj,
                    kj,
                    from_valuation_space(form, (uj - delta / lambda).max(0.0)),
                );
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(current)
}

fn coordinate_ascent(
    model: &NetworkModel,
    start: AttributeMatrix,
    max_iters: usize,
) -> Result<AttributeMatrix> {
    let mut a = start;
    for _ in 0..max_iters {
        let mut change = 0.0_f64;
        for n in 0..model.num_isps() {
            for k in 0..model.num_attributes() {
                let x = optimize_coordinate(model, &a, n, k)?;
                change = change.max((x - a.get(n, k)).abs());
                a.set(n, k, x);
            }
        }
        if change < 1e-10 {
            break;
        }
    }
    Ok(a)
}

/// Numeric bargaining solution of a small model (at most 12 attribute
/// coordinates).
pub fn nbs_global(model: &NetworkModel, max_iters: usize) -> Result<EquilibriumResult> {
    let (nn, kk) = (model.num_isps(), model.num_attributes());
    if nn * kk > MAX_COORDINATES {
        return Err(Error::UnsupportedScope(format!(
            "bargaining search is limited to {MAX_COORDINATES} coordinates, model has {}",
            nn * kk
        )));
    }
    let lower = model.lower_bound_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e62_7300);
    let mut starts = vec![lower.clone()];
    for _ in 0..3 {
        let mut s = lower.clone();
        for n in 0..nn {
            for k in 0..kk {
                let v = s.get(n, k) + rng.gen_range(0.0..1.0);
                s.set(n, k, model.clamp(n, k, v));
            }
        }
        starts.push(s);
    }
    let mut best: Option<(f64, AttributeMatrix)> = None;
    for start in starts {
        let a = coordinate_ascent(model, start, max_iters.max(1))?;
        let value = joint_profit(model, &a)?;
        if best
            .as_ref()
            .is_none_or(|(b, _)| value > *b + 1e-12 * b.abs())
        {
            best = Some((value, a));
        }
    }
    let (_, a) = best.expect("at least one start");
    let coords: Vec<(usize, usize)> = (0..nn).flat_map(|n| (0..kk).map(move |k| (n, k))).collect();
    let subset: Vec<usize> = (0..nn)
        .filter(|&n| !model.markets_of_isp(n).is_empty())
        .collect();
    let a = improve_nash_product(model, &a, &coords, &subset)?;
    let residual = joint_profit_residual(model, &a, &coords)?;
    let weights: Vec<Vec<f64>> = coords
        .iter()
        .map(|&(n, k)| weight_vector(model, n, k))
        .collect();
    let has_transfers = (0..coords.len())
        .any(|i| (i + 1..coords.len()).any(|j| proportional(&weights[i], &weights[j]).is_some()));
    let mut result =
        EquilibriumResult::new(model, a, SolverKind::NbsGlobal, residual, !has_transfers)?;
    let p = profits(model, &result.attributes)?;
    result.nash_product = Some(if subset.is_empty() {
        0.0
    } else {
        product_of(&p, &subset)
    });
    if subset.iter().any(|&n| p[n] <= 0.0) {
        result
            .diagnostics
            .push("warning: some ISP earns no positive profit at the best point found".into());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{homogeneous_nbs, HomogeneousSpec};
    use crate::netgen::build_homogeneous;

    fn spec(i: usize) -> HomogeneousSpec {
        HomogeneousSpec {
            q: 1,
            i,
            alpha1: 1.0,
            alpha0: 0.0,
            phi1: 0.0,
            phi0: 0.0,
            gamma1: 1.0,
            rho: 1.0,
            d: 4.0,
        }
    }

    #[test]
    fn matches_homogeneous_bargaining() {
        for i in [1, 2] {
            let s = spec(i);
            let model = build_homogeneous(&s).unwrap();
            let r = nbs_global(&model, 50).unwrap();
            let expected = homogeneous_nbs(&s).unwrap();
            for n in 0..i {
                assert!((r.attributes.get(n, 0) - expected).abs() < 1e-5, "I = {i}");
            }
            assert!(r.residual < 1e-5);
        }
    }

    #[test]
    fn zero_demand_gives_zero() {
        let mut s = spec(2);
        s.d = 0.0;
        let model = build_homogeneous(&s).unwrap();
        let r = nbs_global(&model, 20).unwrap();
        assert!(r.attributes.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_many_coordinates() {
        let mut s = spec(13);
        s.q = 1;
        let model = build_homogeneous(&s).unwrap();
        assert!(matches!(
            nbs_global(&model, 1),
            Err(Error::UnsupportedScope(_))
        ));
    }
}
