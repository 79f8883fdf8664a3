//! The economic model: ISPs choosing non-negative attribute levels, paths whose
//! valuations depend on those attributes, and markets in which end users pick a
//! path with logit-style probabilities.
//!
//! Every evaluation here is a pure function of a [`NetworkModel`] and an
//! [`AttributeMatrix`]. Attribute bounds are not applied during evaluation;
//! solvers and dynamics clamp into them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative `|N| x |K|` matrix of attribute levels, stored row-major.
///
/// Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct AttributeMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl AttributeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            values: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidModel("ragged attribute matrix".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.values[n * self.cols + k]
    }

    #[inline]
    pub fn set(&mut self, n: usize, k: usize, value: f64) {
        self.values[n * self.cols + k] = value;
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.cols..(n + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Sum of the attribute levels of one ISP.
    pub fn row_sum(&self, n: usize) -> f64 {
        self.row(n).iter().sum()
    }

    /// Largest elementwise absolute difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &AttributeMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_non_negative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|n| self.row(n).to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for AttributeMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<AttributeMatrix> for Vec<Vec<f64>> {
    fn from(m: AttributeMatrix) -> Self {
        m.to_rows()
    }
}

/// Provider-hierarchy stratum of an ISP.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    T1,
    T2,
    T3,
    Other,
    #[default]
    Unclassified,
}

impl Tier {
    pub fn label(self) -> &'static str {
        match self {
            Tier::T1 => "t1",
            Tier::T2 => "t2",
            Tier::T3 => "t3",
            Tier::Other => "other",
            Tier::Unclassified => "unclassified",
        }
    }
}

/// How attribute levels enter path valuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationForm {
    #[default]
    Affine,
    /// Valuations use `sqrt(a)` in place of `a`.
    SqrtAttribute,
}

/// How attribute levels enter ISP costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostForm {
    #[default]
    Affine,
    /// Costs use `a^2` in place of `a`.
    QuadraticAttribute,
}

impl ValuationForm {
    #[inline]
    pub fn apply(self, a: f64) -> f64 {
        match self {
            ValuationForm::Affine => a,
            ValuationForm::SqrtAttribute => a.sqrt(),
        }
    }
}

impl CostForm {
    #[inline]
    pub fn apply(self, a: f64) -> f64 {
        match self {
            CostForm::Affine => a,
            CostForm::QuadraticAttribute => a * a,
        }
    }
}

/// A path through a sequence of distinct ISPs.
///
/// `valuation_coeffs[i][k]` is the weight of attribute `k` of ISP `isps[i]`
/// in the valuation of this path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub id: String,
    pub isps: Vec<usize>,
    pub base_valuation: f64,
    pub valuation_coeffs: Vec<Vec<f64>>,
}

impl Path {
    /// Position of ISP `n` on this path.
    #[inline]
    pub fn position(&self, n: usize) -> Option<usize> {
        self.isps.iter().position(|&m| m == n)
    }

    pub fn contains(&self, n: usize) -> bool {
        self.isps.contains(&n)
    }

    /// Valuation weight of `(n, k)` on this path, zero if `n` is not on it.
    #[inline]
    pub fn coeff(&self, n: usize, k: usize) -> f64 {
        self.position(n)
            .map_or(0.0, |i| self.valuation_coeffs[i][k])
    }
}

/// An origin-destination pair with a demand limit and its selectable paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Market {
    pub source: String,
    pub destination: String,
    pub demand_limit: f64,
    /// Indices into [`NetworkModel::paths`].
    pub paths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IspParams {
    #[serde(default)]
    pub name: String,
    pub rho: f64,
    pub phi0: f64,
    pub phi: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma0: f64,
    #[serde(default)]
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub isps: Vec<IspParams>,
    pub attributes: Vec<String>,
    pub paths: Vec<Path>,
    pub markets: Vec<Market>,
    #[serde(default)]
    pub valuation_form: ValuationForm,
    #[serde(default)]
    pub cost_form: CostForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_lower_bounds: Option<AttributeMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_upper_bounds: Option<AttributeMatrix>,
}

fn check_non_negative(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{what} must be finite and non-negative, got {v}"
        )))
    }
}

impl NetworkModel {
    pub fn num_isps(&self) -> usize {
        self.isps.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn zero_attributes(&self) -> AttributeMatrix {
        AttributeMatrix::zeros(self.num_isps(), self.num_attributes())
    }

    /// Checks every structural and parameter invariant of the model.
    pub fn validate(&self) -> Result<()> {
        let kk = self.num_attributes();
        let nn = self.num_isps();
        for (n, isp) in self.isps.iter().enumerate() {
            if isp.phi.len() != kk || isp.gamma.len() != kk {
                return Err(Error::InvalidModel(format!(
                    "ISP {n}: phi/gamma need {kk} entries"
                )));
            }
            for v in isp.phi.iter().chain(&isp.gamma) {
                check_non_negative("cost coefficient", *v)?;
            }
            check_non_negative("rho", isp.rho)?;
            check_non_negative("phi0", isp.phi0)?;
            check_non_negative("gamma0", isp.gamma0)?;
            if isp.rho < isp.phi0 {
                return Err(Error::InvalidModel(format!(
                    "ISP {n}: rho {} is below phi0 {}",
                    isp.rho, isp.phi0
                )));
            }
        }
        for (r, path) in self.paths.iter().enumerate() {
            if path.isps.is_empty() {
                return Err(Error::InvalidModel(format!("path {r} has no ISPs")));
            }
            if path.valuation_coeffs.len() != path.isps.len() {
                return Err(Error::InvalidModel(format!(
                    "path {r}: one coefficient row per ISP required"
                )));
            }
            for (i, &n) in path.isps.iter().enumerate() {
                if n >= nn {
                    return Err(Error::UnknownIsp(n));
                }
                if path.isps[..i].contains(&n) {
                    return Err(Error::InvalidModel(format!("path {r} repeats ISP {n}")));
                }
                let row = &path.valuation_coeffs[i];
                if row.len() != kk {
                    return Err(Error::InvalidModel(format!(
                        "path {r}: coefficient row needs {kk} entries"
                    )));
                }
                if row.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                    return Err(Error::InvalidModel(format!(
                        "path {r}: valuation coefficients must be positive"
                    )));
                }
            }
            check_non_negative("base valuation", path.base_valuation)?;
        }
        for (m, market) in self.markets.iter().enumerate() {
            check_non_negative("demand limit", market.demand_limit)?;
            for &r in &market.paths {
                if r >= self.paths.len() {
                    return Err(Error::UnknownPath(r));
                }
            }
            let mut sorted = market.paths.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != market.paths.len() {
                return Err(Error::InvalidModel(format!(
                    "market {m} lists a path twice"
                )));
            }
        }
        for bound in [&self.attribute_lower_bounds, &self.attribute_upper_bounds]
            .into_iter()
            .flatten()
        {
            self.check_dims(bound)?;
            if bound.as_slice().iter().any(|v| v.is_nan() || *v < 0.0) {
                return Err(Error::InvalidModel("bounds must be non-negative".into()));
            }
        }
        if let (Some(lo), Some(hi)) = (&self.attribute_lower_bounds, &self.attribute_upper_bounds) {
            if lo.as_slice().iter().zip(hi.as_slice()).any(|(l, h)| l > h) {
                return Err(Error::InvalidModel(
                    "lower bound exceeds upper bound".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn check_dims(&self, a: &AttributeMatrix) -> Result<()> {
        if a.rows() != self.num_isps() || a.cols() != self.num_attributes() {
            return Err(Error::DimensionMismatch {
                rows: self.num_isps(),
                cols: self.num_attributes(),
                found_rows: a.rows(),
                found_cols: a.cols(),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: NetworkModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn lower_bound(&self, n: usize, k: usize) -> f64 {
        self.attribute_lower_bounds
            .as_ref()
            .map_or(0.0, |b| b.get(n, k))
    }

    /// Upper bound of `(n, k)`. A stored `f64::MAX` means unbounded, since
    /// JSON cannot carry infinity.
    pub fn upper_bound(&self, n: usize, k: usize) -> f64 {
        match self.attribute_upper_bounds.as_ref().map(|b| b.get(n, k)) {
            Some(v) if v < f64::MAX => v,
            _ => f64::INFINITY,
        }
    }

    /// Projects a value onto `[max(0, lower), upper]` for `(n, k)`.
    #[inline]
    pub fn clamp(&self, n: usize, k: usize, value: f64) -> f64 {
        value
            .max(self.lower_bound(n, k))
            .max(0.0)
            .min(self.upper_bound(n, k))
    }

    /// The matrix of lower bounds, zeros where none are set.
    pub fn lower_bound_matrix(&self) -> AttributeMatrix {
        self.attribute_lower_bounds
            .clone()
            .unwrap_or_else(|| self.zero_attributes())
    }

    /// Indices of the markets that offer at least one path through ISP `n`.
    pub fn markets_of_isp(&self, n: usize) -> Vec<usize> {
        self.markets
            .iter()
            .enumerate()
            .filter(|(_, m)| m.paths.iter().any(|&r| self.paths[r].contains(n)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the paths that ISP `n` lies on.
    pub fn paths_of_isp(&self, n: usize) -> Vec<usize> {
        (0..self.paths.len())
            .filter(|&r| self.paths[r].contains(n))
            .collect()
    }
}

/// Valuation `v_r` of path `r`.
pub fn path_valuation(model: &NetworkModel, a: &AttributeMatrix, r: usize) -> Result<f64> {
    model.check_dims(a)?;
    let path = model.paths.get(r).ok_or(Error::UnknownPath(r))?;
    Ok(valuation_unchecked(model, a, path))
}

#[inline]
pub(crate) fn valuation_unchecked(model: &NetworkModel, a: &AttributeMatrix, path: &Path) -> f64 {
    let form = model.valuation_form;
    let mut v = path.base_valuation;
    for (i, &n) in path.isps.iter().enumerate() {
        for (k, c) in path.valuation_coeffs[i].iter().enumerate() {
            v += c * form.apply(a.get(n, k));
        }
    }
    v
}

/// Valuations of every path, indexed like [`NetworkModel::paths`].
pub fn path_valuations(model: &NetworkModel, a: &AttributeMatrix) -> Result<Vec<f64>> {
    model.check_dims(a)?;
    Ok(model
        .paths
        .iter()
        .map(|p| valuation_unchecked(model, a, p))
        .collect())
}

/// Probability that a user of `market` selects path `r`.
pub fn selection_probability(
    model: &NetworkModel,
    a: &AttributeMatrix,
    market: usize,
    r: usize,
) -> Result<f64> {
    model.check_dims(a)?;
    let m = model
        .markets
        .get(market)
        .ok_or(Error::UnknownMarket(market))?;
    if !m.paths.contains(&r) {
        return Err(Error::PathNotInMarket { market, path: r });
    }
    let total: f64 = m
        .paths
        .iter()
        .map(|&q| valuation_unchecked(model, a, &model.paths[q]))
        .sum();
    Ok(valuation_unchecked(model, a, &model.paths[r]) / (1.0 + total))
}

/// Expected traffic `D_n` carried by ISP `n` across all markets.
pub fn isp_demand(model: &NetworkModel, a: &AttributeMatrix, n: usize) -> Result<f64> {
    if n >= model.num_isps() {
        return Err(Error::UnknownIsp(n));
    }
    let values = path_valuations(model, a)?;
    Ok(demand_from_valuations(model, &values, n))
}

fn demand_from_valuations(model: &NetworkModel, values: &[f64], n: usize) -> f64 {
    let mut total = 0.0;
    for market in &model.markets {
        let mut on = 0.0;
        let mut all = 0.0;
        for &r in &market.paths {
            all += values[r];
            if model.paths[r].contains(n) {
                on += values[r];
            }
        }
        if on > 0.0 {
            total += market.demand_limit * on / (1.0 + all);
        }
    }
    total
}

/// Demands of all ISPs at once.
pub fn isp_demands(model: &NetworkModel, a: &AttributeMatrix) -> Result<Vec<f64>> {
    let values = path_valuations(model, a)?;
    let mut demand = vec![0.0; model.num_isps()];
    for market in &model.markets {
        let all: f64 = market.paths.iter().map(|&r| values[r]).sum();
        for &r in &market.paths {
            let share = market.demand_limit * values[r] / (1.0 + all);
            for &n in &model.paths[r].isps {
                demand[n] += share;
            }
        }
    }
    Ok(demand)
}

/// Revenue and cost terms whose combination is the profit of one ISP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfitBreakdown {
    pub demand: f64,
    pub revenue: f64,
    pub demand_dependent_cost: f64,
    pub demand_independent_cost: f64,
    pub profit: f64,
}

fn breakdown_from_demand(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
    demand: f64,
) -> ProfitBreakdown {
    let isp = &model.isps[n];
    let form = model.cost_form;
    let mut unit_cost = isp.phi0;
    let mut fixed_cost = isp.gamma0;
    for k in 0..model.num_attributes() {
        let g = form.apply(a.get(n, k));
        unit_cost += isp.phi[k] * g;
        fixed_cost += isp.gamma[k] * g;
    }
    let revenue = demand * isp.rho;
    let demand_dependent_cost = demand * unit_cost;
    ProfitBreakdown {
        demand,
        revenue,
        demand_dependent_cost,
        demand_independent_cost: fixed_cost,
        profit: demand * (isp.rho - unit_cost) - fixed_cost,
    }
}

pub fn profit_breakdown(
    model: &NetworkModel,
    a: &AttributeMatrix,
    n: usize,
) -> Result<ProfitBreakdown> {
    let demand = isp_demand(model, a, n)?;
    Ok(breakdown_from_demand(model, a, n, demand))
}

/// Profit `pi_n`; may be negative.
pub fn profit(model: &NetworkModel, a: &AttributeMatrix, n: usize) -> Result<f64> {
    Ok(profit_breakdown(model, a, n)?.profit)
}

/// Profits of all ISPs at once.
pub fn profits(model: &NetworkModel, a: &AttributeMatrix) -> Result<Vec<f64>> {
    let demand = isp_demands(model, a)?;
    Ok(demand
        .iter()
        .enumerate()
        .map(|(n, &d)| breakdown_from_demand(model, a, n, d).profit)
        .collect())
}

/// Sum of all path valuations.
pub fn aggregate_valuation(model: &NetworkModel, a: &AttributeMatrix) -> Result<f64> {
    Ok(path_valuations(model, a)?.iter().sum())
}

/// Product of the profits of the ISPs in `subset`.
pub fn nash_product(model: &NetworkModel, a: &AttributeMatrix, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Domain(
            "Nash product needs a non-empty ISP subset".into(),
        ));
    }
    if let Some(&n) = subset.iter().find(|&&n| n >= model.num_isps()) {
        return Err(Error::UnknownIsp(n));
    }
    let all = profits(model, a)?;
    Ok(subset.iter().map(|&n| all[n]).product())
}

/// Turns an undesirable price into the desirable attribute `p_max - price`.
pub fn cheapness_attribute(price: f64, p_max: f64) -> Result<f64> {
    if !(price >= 0.0 && p_max >= 0.0) || price > p_max {
        return Err(Error::Domain(format!(
            "price {price} must lie in [0, {p_max}]"
        )));
    }
    Ok(p_max - price)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn monopoly(alpha: f64, base: f64, d: f64) -> NetworkModel {
        NetworkModel {
            isps: vec![IspParams {
                name: "a".into(),
                rho: 1.0,
                phi0: 0.0,
                phi: vec![0.0],
                gamma: vec![1.0],
                gamma0: 0.0,
                tier: Tier::Unclassified,
            }],
            attributes: vec!["q".into()],
            paths: vec![Path {
                id: "r".into(),
                isps: vec![0],
                base_valuation: base,
                valuation_coeffs: vec![vec![alpha]],
            }],
            markets: vec![Market {
                source: "s".into(),
                destination: "t".into(),
                demand_limit: d,
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
    fn valuation_examples() {
        let m = monopoly(2.0, 1.0, 4.0);
        assert_eq!(path_valuation(&m, &single(3.0), 0).unwrap(), 7.0);
        let mut s = m.clone();
        s.valuation_form = ValuationForm::SqrtAttribute;
        assert_eq!(path_valuation(&s, &single(4.0), 0).unwrap(), 5.0);
        let z = monopoly(2.0, 0.5, 4.0);
        assert_eq!(path_valuation(&z, &single(0.0), 0).unwrap(), 0.5);
        assert!(matches!(
            path_valuation(&m, &single(0.0), 3),
            Err(Error::UnknownPath(3))
        ));
        assert!(matches!(
            path_valuation(&m, &AttributeMatrix::zeros(2, 1), 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn probabilities_and_demand() {
        let mut m = monopoly(1.0, 0.0, 9.0);
        assert_eq!(selection_probability(&m, &single(1.0), 0, 0).unwrap(), 0.5);
        m.paths.push(Path {
            id: "r2".into(),
            isps: vec![0],
            base_valuation: 0.0,
            valuation_coeffs: vec![vec![1.0]],
        });
        m.markets[0].paths.push(1);
        let p = selection_probability(&m, &single(1.0), 0, 1).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        assert!((isp_demand(&m, &single(1.0), 0).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(selection_probability(&m, &single(0.0), 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn demand_over_disjoint_markets() {
        let mut m = monopoly(1.0, 0.0, 10.0);
        m.paths.push(m.paths[0].clone());
        m.markets.push(Market {
            source: "u".into(),
            destination: "w".into(),
            demand_limit: 10.0,
            paths: vec![1],
        });
        assert!((isp_demand(&m, &single(1.0), 0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(isp_demands(&m, &single(1.0)).unwrap(), vec![10.0]);
    }

    #[test]
    fn profit_examples() {
        let m = monopoly(1.0, 0.0, 4.0);
        assert!((profit(&m, &single(1.0), 0).unwrap() - 1.0).abs() < 1e-12);
        // D = 10, rho = 0.5, unit cost 0.2, fixed cost 2.
        let mut m = monopoly(1.0, 0.0, 20.0);
        m.isps[0].rho = 0.5;
        m.isps[0].phi0 = 0.2;
        m.isps[0].gamma0 = 2.0;
        m.isps[0].gamma = vec![0.0];
        let b = profit_breakdown(&m, &single(1.0), 0).unwrap();
        assert!((b.demand - 10.0).abs() < 1e-12);
        assert!((b.profit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_cost_squares_attribute() {
        let mut m = monopoly(1.0, 0.0, 4.0);
        m.cost_form = CostForm::QuadraticAttribute;
        // D = 4 * 3/4 = 3, cost = 9.
        assert!((profit(&m, &single(3.0), 0).unwrap() - (3.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn aggregate_and_product() {
        let mut m = monopoly(1.0, 0.5, 4.0);
        m.paths.push(Path {
            id: "r2".into(),
            isps: vec![0],
            base_valuation: 1.0,
            valuation_coeffs: vec![vec![1.0]],
        });
        assert_eq!(aggregate_valuation(&m, &single(0.0)).unwrap(), 1.5);
        m.paths.clear();
        m.markets.clear();
        assert_eq!(aggregate_valuation(&m, &single(0.0)).unwrap(), 0.0);
        assert!(nash_product(&m, &single(0.0), &[]).is_err());
    }

    #[test]
    fn nash_product_sign_follows_factors() {
        let m = monopoly(1.0, 0.0, 4.0);
        let a = single(1.0);
        let p = nash_product(&m, &a, &[0, 0]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let mut neg = m.clone();
        neg.isps[0].gamma0 = 2.0;
        assert!((nash_product(&neg, &a, &[0]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cheapness() {
        assert_eq!(cheapness_attribute(30.0, 100.0).unwrap(), 70.0);
        assert_eq!(cheapness_attribute(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(cheapness_attribute(0.0, 100.0).unwrap(), 100.0);
        assert!(matches!(
            cheapness_attribute(101.0, 100.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_models() {
        let mut m = monopoly(1.0, 0.0, 4.0);
        m.isps[0].phi0 = 2.0;
        assert!(m.validate().is_err());
        let mut m = monopoly(1.0, 0.0, 4.0);
        m.markets[0].paths.push(7);
        assert!(matches!(m.validate(), Err(Error::UnknownPath(7))));
        let mut m = monopoly(1.0, 0.0, 4.0);
        m.attribute_lower_bounds = Some(single(2.0));
        m.attribute_upper_bounds = Some(single(1.0));
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut m = monopoly(1.0, 0.25, 4.0);
        m.attribute_upper_bounds = Some(single(3.0));
        let text = m.to_json().unwrap();
        let back = NetworkModel::from_json(&text).unwrap();
        assert_eq!(back, m);
    }
}
