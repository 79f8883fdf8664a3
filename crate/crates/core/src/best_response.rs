//! Profit-maximizing attribute choice of a single ISP, holding every other
//! attribute fixed.
//!
//! The closed form applies to single-market models with affine valuations
//! and costs. Everything else goes through a numeric maximizer of the
//! one-dimensional profit slice. The slice is concave wherever the ISP's
//! per-unit margin is positive and decreasing elsewhere, so a root of its
//! derivative is the global maximizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    path_valuations, valuation_unchecked, AttributeMatrix, CostForm, NetworkModel, ValuationForm,
};
use crate::numeric::{brent_root, grid_golden_max};

/// Shorthand quantities of the closed-form best response of `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponseContext {
    /// Sum of the valuation weights of `(n, k)` over the market's paths.
    pub alpha_nk_total: f64,
    /// Total valuation of the market's paths that avoid ISP `n`.
    pub v_minus_r_of_n: f64,
    /// Total market valuation without the contribution of `a_nk`.
    pub v_minus_nk: f64,
    /// Per-unit cost of `n` from its other attributes plus `phi0`.
    pub phi_minus_nk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unrestricted {
    Value(f64),
    /// The radicand of the closed form is negative.
    Undefined,
}

impl Unrestricted {
    pub fn value(self) -> Option<f64> {
        match self {
            Unrestricted::Value(v) => Some(v),
            Unrestricted::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponseOutcome {
    pub unrestricted: Unrestricted,
    pub restricted: f64,
}

fn check_index(model: &NetworkModel, n: usize, k: usize) -> Result<()> {
    if n >= model.num_isps() {
        return Err(Error::UnknownIsp(n));
    }
    if k >= model.num_attributes() {
        return Err(Error::InvalidModel(format!("unknown attribute {k}")));
    }
    Ok(())
}

fn closed_form_scope(model: &NetworkModel) -> Result<()> {
    if model.markets.len() != 1 {
        return Err(Error::UnsupportedScope(format!(
            "closed-form best response needs exactly one market, model has {}",
            model.markets.len()
        )));
    }
    if model.valuation_form != ValuationForm::Affine || model.cost_form != CostForm::Affine {
        return Err(Error::UnsupportedScope(
            "closed-form best response needs affine valuations and costs".into(),
        ));
    }
    Ok(())
}

/// Computes the shorthand quantities for `(n, k)` in a single-market model.
pub fn best_response_context(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<BestResponseContext> {
    check_index(model, n, k)?;
    closed_form_scope(model)?;
    model.check_dims(a)?;
    let market = &model.markets[0];
    let mut alpha = 0.0;
    let mut total = 0.0;
    let mut avoiding = 0.0;
    for &r in &market.paths {
        let path = &model.paths[r];
        let v = valuation_unchecked(model, a, path);
        total += v;
        if path.contains(n) {
            alpha += path.coeff(n, k);
        } else {
            avoiding += v;
        }
    }
    let isp = &model.isps[n];
    let phi_minus: f64 = (0..model.num_attributes())
        .filter(|&j| j != k)
        .map(|j| isp.phi[j] * a.get(n, j))
        .sum::<f64>()
        + isp.phi0;
    Ok(BestResponseContext {
        alpha_nk_total: alpha,
        v_minus_r_of_n: avoiding,
        v_minus_nk: total - alpha * a.get(n, k),
        phi_minus_nk: phi_minus,
    })
}

/// Closed-form profit-maximizing `a_nk` before clamping to zero.
pub fn unrestricted_best_response(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<Unrestricted> {
    let ctx = best_response_context(model, a, n, k)?;
    if ctx.alpha_nk_total <= 0.0 {
        return Err(Error::NoValuationWeight {
            isp: n,
            attribute: k,
        });
    }
    let d = model.markets[0].demand_limit;
    let isp = &model.isps[n];
    let phi = isp.phi[k];
    let denom = d * phi + isp.gamma[k];
    if denom <= 0.0 {
        return Err(Error::DegenerateCost {
            isp: n,
            attribute: k,
        });
    }
    let b = 1.0 + ctx.v_minus_r_of_n;
    let c = 1.0 + ctx.v_minus_nk;
    let alpha = ctx.alpha_nk_total;
    let radicand = d * b / denom * (phi * c + alpha * (isp.rho - ctx.phi_minus_nk));
    if radicand < 0.0 {
        return Ok(Unrestricted::Undefined);
    }
    Ok(Unrestricted::Value((radicand.sqrt() - c) / alpha))
}

pub fn best_response_outcome(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<BestResponseOutcome> {
    let unrestricted = unrestricted_best_response(model, a, n, k)?;
    let restricted = unrestricted.value().map_or(0.0, |v| v.max(0.0));
    Ok(BestResponseOutcome {
        unrestricted,
        restricted,
    })
}

/// Closed-form best response, clamped to zero and then into model bounds.
pub fn best_response(model: &NetworkModel, a: &AttributeMatrix, n: usize, k: usize) -> Result<f64> {
    let outcome = best_response_outcome(model, a, n, k)?;
    Ok(model.clamp(n, k, outcome.restricted))
}

/// True when the closed form can be evaluated for `(n, k)`.
pub fn closed_form_applies(model: &NetworkModel, n: usize, k: usize) -> bool {
    if closed_form_scope(model).is_err() || n >= model.num_isps() || k >= model.num_attributes() {
        return false;
    }
    let market = &model.markets[0];
    let on_path = market.paths.iter().any(|&r| model.paths[r].contains(n));
    let isp = &model.isps[n];
    on_path && market.demand_limit * isp.phi[k] + isp.gamma[k] > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SliceTerm {
    demand: f64,
    on: f64,
    big_c: f64,
    weight: f64,
}

/// Profit of ISP `n` as a function of `a_nk` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitSlice {
    terms: Vec<SliceTerm>,
    margin: f64,
    phi: f64,
    gamma: f64,
    fixed_rest: f64,
    valuation_form: ValuationForm,
    cost_form: CostForm,
}

impl ProfitSlice {
    pub fn new(model: &NetworkModel, a: &AttributeMatrix, n: usize, k: usize) -> Result<Self> {
        check_index(model, n, k)?;
        let values = path_valuations(model, a)?;
        let own = model.valuation_form.apply(a.get(n, k));
        let mut terms = Vec::new();
        for market in &model.markets {
            let mut on = 0.0;
            let mut all = 0.0;
            let mut weight = 0.0;
            for &r in &market.paths {
                let path = &model.paths[r];
                let c = path.coeff(n, k);
                let rest = values[r] - c * own;
                all += rest;
                if path.contains(n) {
                    on += rest;
                    weight += c;
                }
            }
            if weight > 0.0 || on > 0.0 {
                terms.push(SliceTerm {
                    demand: market.demand_limit,
                    on,
                    big_c: 1.0 + all,
                    weight,
                });
            }
        }
        let isp = &model.isps[n];
        let mut margin = isp.rho - isp.phi0;
        let mut fixed_rest = isp.gamma0;
        for j in 0..model.num_attributes() {
            if j != k {
                let g = model.cost_form.apply(a.get(n, j));
                margin -= isp.phi[j] * g;
                fixed_rest += isp.gamma[j] * g;
            }
        }
        Ok(Self {
            terms,
            margin,
            phi: isp.phi[k],
            gamma: isp.gamma[k],
            fixed_rest,
            valuation_form: model.valuation_form,
            cost_form: model.cost_form,
        })
    }

    fn demand_at(&self, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.demand * (t.on + t.weight * u) / (t.big_c + t.weight * u))
            .sum()
    }

    fn demand_slope(&self, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let den = t.big_c + t.weight * u;
                t.demand * t.weight * (t.big_c - t.on) / (den * den)
            })
            .sum()
    }

    /// Profit at attribute level `x`.
    pub fn profit(&self, x: f64) -> f64 {
        let g = self.cost_form.apply(x);
        self.demand_at(self.valuation_form.apply(x)) * (self.margin - self.phi * g)
            - self.gamma * g
            - self.fixed_rest
    }

    // In the variable t with x = t (affine) or x = t^2 (square-root valuation)
    // the valuation is linear in t and the cost is t^p.
    fn cost_power(&self) -> i32 {
        let base = match self.valuation_form {
            ValuationForm::Affine => 1,
            ValuationForm::SqrtAttribute => 2,
        };
        match self.cost_form {
            CostForm::Affine => base,
            CostForm::QuadraticAttribute => 2 * base,
        }
    }

    fn to_x(&self, t: f64) -> f64 {
        match self.valuation_form {
            ValuationForm::Affine => t,
            ValuationForm::SqrtAttribute => t * t,
        }
    }

    fn slope_t(&self, t: f64) -> f64 {
        let p = self.cost_power();
        let h = t.powi(p);
        let dh = p as f64 * t.powi(p - 1);
        self.demand_slope(t) * (self.margin - self.phi * h)
            - (self.phi * self.demand_at(t) + self.gamma) * dh
    }

    /// Unconstrained maximizer over `x >= 0`, or `None` if profit grows
    /// without bound.
    pub fn maximizer(&self) -> Option<f64> {
        if self.slope_t(0.0) <= 0.0 {
            return Some(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.slope_t(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e150 {
                return None;
            }
        }
        let t = brent_root(|t| self.slope_t(t), lo, hi, 0.0);
        Some(self.to_x(t))
    }
}

/// Profit maximizer found by a grid scan with spacing `step` over
/// `[0, search_max]` and golden-section refinement. Flat profit yields 0.
pub fn numeric_best_response(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
    search_max: f64,
    step: f64,
) -> Result<f64> {
    if !(search_max > 0.0 && step > 0.0) {
        return Err(Error::Domain("search_max and step must be positive".into()));
    }
    let slice = ProfitSlice::new(model, a, n, k)?;
    let points = (search_max / step).ceil() as usize;
    let (x, _) = grid_golden_max(|x| slice.profit(x), 0.0, search_max, points);
    Ok(x)
}

/// Default search range for [`numeric_best_response`].
pub fn default_search_max(model: &NetworkModel, a: &AttributeMatrix, n: usize, k: usize) -> f64 {
    match unrestricted_best_response(model, a, n, k) {
        Ok(Unrestricted::Value(v)) => 10.0 * v.max(1.0),
        _ => 1e4,
    }
}

/// Numeric best response by root finding on the profit derivative,
/// clamped into model bounds. Handles any number of markets and both
/// functional forms.
pub fn bracketed_best_response(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<f64> {
    let slice = ProfitSlice::new(model, a, n, k)?;
    match slice.maximizer() {
        Some(x) => Ok(model.clamp(n, k, x)),
        None if model.upper_bound(n, k).is_finite() => Ok(model.upper_bound(n, k)),
        None => Err(Error::Numeric(format!(
            "profit of ISP {n} grows without bound in attribute {k}"
        ))),
    }
}

/// Closed form where it applies, numeric maximizer otherwise.
pub fn auto_best_response(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    k: usize,
) -> Result<f64> {
    if closed_form_applies(model, n, k) {
        best_response(model, a, n, k)
    } else {
        bracketed_best_response(model, a, n, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NashCheck {
    pub holds: bool,
    pub max_residual: f64,
}

/// Largest gap between an attribute and its best response, over the given ISPs.
pub fn nash_residual(model: &NetworkModel, a: &AttributeMatrix, isps: &[usize]) -> Result<f64> {
    model.check_dims(a)?;
    let mut worst = 0.0_f64;
    for &n in isps {
        for k in 0..model.num_attributes() {
            let br = auto_best_response(model, a, n, k)?;
            worst = worst.max((a.get(n, k) - br).abs());
        }
    }
    Ok(worst)
}

/// Checks that every attribute equals its best response within `tol`.
pub fn is_nash_equilibrium(
    model: &NetworkModel,
    a: &AttributeMatrix,
    tol: f64,
) -> Result<NashCheck> {
    let all: Vec<usize> = (0..model.num_isps()).collect();
    let max_residual = nash_residual(model, a, &all)?;
    Ok(NashCheck {
        holds: max_residual <= tol,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IspParams, Market, Path, Tier};

    fn monopoly(gamma: f64) -> NetworkModel {
        NetworkModel {
            isps: vec![IspParams {
                name: String::new(),
                rho: 1.0,
                phi0: 0.0,
                phi: vec![0.0],
                gamma: vec![gamma],
                gamma0: 0.0,
                tier: Tier::Unclassified,
            }],
            attributes: vec!["q".into()],
            paths: vec![Path {
                id: "r".into(),
                isps: vec![0],
                base_valuation: 0.0,
                valuation_coeffs: vec![vec![1.0]],
            }],
            markets: vec![Market {
                source: "s".into(),
                destination: "t".into(),
                demand_limit: 4.0,
                paths: vec![0],
            }],
            valuation_form: ValuationForm::Affine,
            cost_form: CostForm::Affine,
            attribute_lower_bounds: None,
            attribute_upper_bounds: None,
        }
    }

    fn single(v: f64) -> AttributeMatrix {
        AttributeMatrix::from_rows(vec![vec![v]]).unwrap()
    }

    #[test]
    fn monopoly_closed_form() {
        let m = monopoly(1.0);
        let u = unrestricted_best_response(&m, &single(0.0), 0, 0).unwrap();
        assert!((u.value().unwrap() - 1.0).abs() < 1e-12);
        let m = monopoly(100.0);
        let out = best_response_outcome(&m, &single(0.0), 0, 0).unwrap();
        assert!((out.unrestricted.value().unwrap() + 0.8).abs() < 1e-12);
        assert_eq!(out.restricted, 0.0);
    }

    #[test]
    fn negative_radicand_is_undefined() {
        let mut m = monopoly(1.0);
        m.isps[0].phi = vec![0.0, 5.0];
        m.isps[0].gamma = vec![1.0, 1.0];
        m.attributes.push("z".into());
        m.paths[0].valuation_coeffs = vec![vec![1.0, 1.0]];
        // A large second attribute drives the margin far below zero.
        let a = AttributeMatrix::from_rows(vec![vec![0.0, 10.0]]).unwrap();
        let out = best_response_outcome(&m, &a, 0, 0).unwrap();
        assert_eq!(out.unrestricted, Unrestricted::Undefined);
        assert_eq!(out.restricted, 0.0);
    }

    #[test]
    fn scope_and_degenerate_errors() {
        let mut m = monopoly(0.0);
        assert!(matches!(
            unrestricted_best_response(&m, &single(0.0), 0, 0),
            Err(Error::DegenerateCost { .. })
        ));
        m.markets.push(m.markets[0].clone());
        assert!(matches!(
            unrestricted_best_response(&m, &single(0.0), 0, 0),
            Err(Error::UnsupportedScope(_))
        ));
    }

    #[test]
    fn numeric_oracle_matches_monopoly() {
        let m = monopoly(1.0);
        let x = numeric_best_response(&m, &single(0.0), 0, 0, 10.0, 1e-3).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        let y = bracketed_best_response(&m, &single(0.0), 0, 0).unwrap();
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decreasing_and_flat_profit_give_zero() {
        let m = monopoly(100.0);
        assert_eq!(
            numeric_best_response(&m, &single(0.0), 0, 0, 10.0, 1e-2).unwrap(),
            0.0
        );
        let mut flat = monopoly(0.0);
        flat.isps.push(flat.isps[0].clone());
        let a = AttributeMatrix::zeros(2, 1);
        assert_eq!(
            numeric_best_response(&flat, &a, 1, 0, 10.0, 1e-2).unwrap(),
            0.0
        );
        assert_eq!(bracketed_best_response(&flat, &a, 1, 0).unwrap(), 0.0);
    }

    #[test]
    fn bounds_clamp_last() {
        let mut m = monopoly(1.0);
        m.attribute_upper_bounds = Some(single(0.25));
        assert_eq!(best_response(&m, &single(0.0), 0, 0).unwrap(), 0.25);
        m.attribute_upper_bounds = None;
        m.attribute_lower_bounds = Some(single(3.0));
        assert_eq!(best_response(&m, &single(0.0), 0, 0).unwrap(), 3.0);
    }

    #[test]
    fn nash_check_examples() {
        let m = monopoly(1.0);
        let ok = is_nash_equilibrium(&m, &single(1.0), 1e-9).unwrap();
        assert!(ok.holds && ok.max_residual <= 1e-9);
        let bad = is_nash_equilibrium(&m, &single(1.5), 1e-9).unwrap();
        assert!(!bad.holds && (bad.max_residual - 0.5).abs() < 1e-12);
        let zero = is_nash_equilibrium(&monopoly(100.0), &single(0.0), 1e-12).unwrap();
        assert!(zero.holds);
    }

    #[test]
    fn sqrt_and_quadratic_forms_use_numeric_path() {
        let mut m = monopoly(1.0);
        m.valuation_form = ValuationForm::SqrtAttribute;
        m.cost_form = CostForm::QuadraticAttribute;
        assert!(!closed_form_applies(&m, 0, 0));
        let fast = auto_best_response(&m, &single(0.0), 0, 0).unwrap();
        let grid = numeric_best_response(&m, &single(0.0), 0, 0, 10.0, 1e-3).unwrap();
        assert!((fast - grid).abs() < 1e-6);
    }
}
