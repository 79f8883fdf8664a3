//! Comparisons of a multi-path run against the single-path baseline of the
//! same parameter sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NetworkModel, Tier};

/// Improvement must exceed this slack to count.
pub const IMPROVEMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub sample: usize,
    pub path_count: usize,
    /// `None` aggregates over all ISPs.
    pub tier: Option<Tier>,
    pub frac_attr_improved: f64,
    pub frac_profit_improved: f64,
    /// Unweighted mean over the tier's ISPs, per attribute name.
    pub mean_attr: Vec<(String, f64)>,
    pub frac_pairs_max_val_improved: f64,
    pub frac_pairs_min_val_improved: f64,
    /// Cells of this row (run or baseline) that did not converge. Fractions
    /// and means are NaN when this is non-zero.
    pub nonconverged: usize,
}

impl MetricsRow {
    pub fn tier_label(&self) -> &'static str {
        self.tier.map_or("all", Tier::label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairComparison {
    /// The most valuable path beats the baseline valuation.
    pub max_improved: bool,
    /// Even the least valuable path beats the baseline valuation.
    pub min_improved: bool,
}

/// Per-market comparison of path valuations against the baseline, matching
/// markets by source and destination. The baseline valuation of a market
/// is the largest valuation among its paths.
pub fn pair_valuation_metrics(
    baseline: &NetworkModel,
    baseline_valuations: &[f64],
    candidate: &NetworkModel,
    candidate_valuations: &[f64],
) -> Result<Vec<PairComparison>> {
    if baseline.markets.len() != candidate.markets.len() {
        return Err(Error::Validation(
            "baseline and candidate have different market sets".into(),
        ));
    }
    let extremes = |model: &NetworkModel, values: &[f64], m: usize| -> Result<(f64, f64)> {
        let market = &model.markets[m];
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for &r in &market.paths {
            let v = *values.get(r).ok_or(Error::UnknownPath(r))?;
            hi = hi.max(v);
            lo = lo.min(v);
        }
        Ok((lo, hi))
    };
    let mut out = Vec::with_capacity(candidate.markets.len());
    for (m, market) in candidate.markets.iter().enumerate() {
        let b = baseline
            .markets
            .iter()
            .position(|x| x.source == market.source && x.destination == market.destination)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "market {}-{} is missing from the baseline",
                    market.source, market.destination
                ))
            })?;
        let (_, base) = extremes(baseline, baseline_valuations, b)?;
        let (lo, hi) = extremes(candidate, candidate_valuations, m)?;
        out.push(PairComparison {
            max_improved: hi > base + IMPROVEMENT_SLACK,
            min_improved: lo > base + IMPROVEMENT_SLACK,
        });
    }
    Ok(out)
}

/// Fraction of `true` values, 0 for an empty slice.
pub(crate) fn fraction(flags: impl IntoIterator<Item = bool>) -> f64 {
    let (mut hits, mut total) = (0usize, 0usize);
    for f in flags {
        total += 1;
        hits += usize::from(f);
    }
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}
