//! Parameter-sweep experiments: perturbed samples, path-diversity sweeps,
//! round-robin simulation to equilibrium and tier-segmented metrics.

mod metrics;
mod output;
mod perturb;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{round_robin, DynamicsConfig, Recording};
use crate::error::{Error, Result};
use crate::model::{path_valuations, profits, CostForm, NetworkModel, Tier, ValuationForm};

pub use metrics::{pair_valuation_metrics, MetricsRow, PairComparison, IMPROVEMENT_SLACK};
pub use output::{emit_csv, emit_plot_data, metrics_csv, plot_series, PlotPoint, PLOT_SCRIPT};
pub use perturb::{perturb, perturb_value, truncate_paths};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COMPETITION_SIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalForm {
    #[default]
    Affine,
    /// Square-root attributes in valuations, squared attributes in costs.
    NonAffine,
}

impl FunctionalForm {
    pub fn apply(self, model: &NetworkModel) -> NetworkModel {
        let mut out = model.clone();
        match self {
            FunctionalForm::Affine => {
                out.valuation_form = ValuationForm::Affine;
                out.cost_form = CostForm::Affine;
            }
            FunctionalForm::NonAffine => {
                out.valuation_form = ValuationForm::SqrtAttribute;
                out.cost_form = CostForm::QuadraticAttribute;
            }
        }
        out
    }
}

fn default_path_counts() -> Vec<usize> {
    (1..=5).collect()
}

fn default_samples() -> usize {
    10
}

fn default_perturb() -> bool {
    true
}

fn default_dynamics() -> DynamicsConfig {
    DynamicsConfig {
        recording: Recording::Endpoints,
        ..DynamicsConfig::round_robin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub base_model: NetworkModel,
    #[serde(default = "default_path_counts")]
    pub path_counts: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub functional_form: FunctionalForm,
    #[serde(default = "default_dynamics")]
    pub dynamics: DynamicsConfig,
    /// When false every sample uses the base parameters unchanged.
    #[serde(default = "default_perturb")]
    pub perturb: bool,
}

impl ExperimentPlan {
    pub fn new(base_model: NetworkModel) -> Self {
        Self {
            base_model,
            path_counts: default_path_counts(),
            samples: default_samples(),
            seed: 0,
            functional_form: FunctionalForm::Affine,
            dynamics: default_dynamics(),
            perturb: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base_model.validate()?;
        self.dynamics.validate()?;
        if self.path_counts.is_empty() || self.path_counts[0] == 0 {
            return Err(Error::InvalidConfig(
                "path counts must be at least 1".into(),
            ));
        }
        if self.path_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "path counts must be strictly ascending".into(),
            ));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one (sample, path count) simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub sample: usize,
    pub path_count: usize,
    pub converged: bool,
    pub rounds: usize,
    pub final_residual: f64,
    pub attributes: Vec<Vec<f64>>,
    pub profits: Vec<f64>,
    pub path_valuations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutput {
    pub attribute_names: Vec<String>,
    pub rows: Vec<MetricsRow>,
    pub cells: Vec<CellRecord>,
    /// Findings such as drops of the max-valuation improvement fraction.
    pub diagnostics: Vec<String>,
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(Some(pool))
}

fn simulate(
    model: &NetworkModel,
    sample: usize,
    path_count: usize,
    config: &DynamicsConfig,
) -> CellRecord {
    let mut record = CellRecord {
        sample,
        path_count,
        converged: false,
        rounds: 0,
        final_residual: f64::NAN,
        attributes: Vec::new(),
        profits: Vec::new(),
        path_valuations: Vec::new(),
        error: None,
    };
    let outcome = round_robin(model, &model.lower_bound_matrix(), config).and_then(|trace| {
        let a = trace.final_state();
        Ok((
            trace.clone(),
            profits(model, a)?,
            path_valuations(model, a)?,
        ))
    });
    match outcome {
        Ok((trace, p, v)) => {
            record.converged = trace.converged;
            record.rounds = trace.rounds;
            record.final_residual = trace.final_residual;
            record.attributes = trace.final_state().to_rows();
            record.profits = p;
            record.path_valuations = v;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn tier_rank(t: Tier) -> usize {
    match t {
        Tier::T1 => 0,
        Tier::T2 => 1,
        Tier::T3 => 2,
        Tier::Other => 3,
        Tier::Unclassified => 4,
    }
}

/// Runs every (sample, path count) cell, in parallel, and compares each
/// against the single-path run of its sample.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanOutput> {
    plan.validate()?;
    let mut seeder = ChaCha8Rng::seed_from_u64(plan.seed);
    let samples: Vec<NetworkModel> = (0..plan.samples)
        .map(|_| {
            let seed = seeder.gen::<u64>();
            if plan.perturb {
                plan.functional_form.apply(&perturb(&plan.base_model, seed))
            } else {
                plan.functional_form.apply(&plan.base_model)
            }
        })
        .collect();
    let mut counts = plan.path_counts.clone();
    if counts[0] != 1 {
        counts.insert(0, 1);
    }
    let jobs: Vec<(usize, usize)> = (0..plan.samples)
        .flat_map(|s| counts.iter().map(move |&c| (s, c)))
        .collect();
    let run = || -> Vec<CellRecord> {
        jobs.par_iter()
            .map(|&(s, c)| simulate(&truncate_paths(&samples[s], c), s, c, &plan.dynamics))
            .collect()
    };
    let cells = match thread_pool()? {
        Some(pool) => pool.install(run),
        None => run(),
    };

    let model = &plan.base_model;
    let active: Vec<usize> = (0..model.num_isps())
        .filter(|&n| !model.paths_of_isp(n).is_empty())
        .collect();
    let mut tiers: Vec<Tier> = active.iter().map(|&n| model.isps[n].tier).collect();
    tiers.sort_by_key(|&t| tier_rank(t));
    tiers.dedup();
    let groups: Vec<(Option<Tier>, Vec<usize>)> = std::iter::once((None, active.clone()))
        .chain(tiers.iter().map(|&t| {
            (
                Some(t),
                active
                    .iter()
                    .copied()
                    .filter(|&n| model.isps[n].tier == t)
                    .collect(),
            )
        }))
        .collect();

    let cell = |s: usize, c: usize| {
        cells
            .iter()
            .find(|x| x.sample == s && x.path_count == c)
            .expect("every job has a record")
    };
    let mut rows = Vec::new();
    for (s, sample) in samples.iter().enumerate() {
        let base = cell(s, 1);
        let base_model = truncate_paths(sample, 1);
        for &c in &plan.path_counts {
            let now = cell(s, c);
            let nonconverged = usize::from(!base.converged) + usize::from(c != 1 && !now.converged);
            let pairs = if nonconverged == 0 {
                Some(pair_valuation_metrics(
                    &base_model,
                    &base.path_valuations,
                    &truncate_paths(sample, c),
                    &now.path_valuations,
                )?)
            } else {
                None
            };
            for (tier, members) in &groups {
                rows.push(metrics_row(
                    plan,
                    s,
                    c,
                    *tier,
                    members,
                    base,
                    now,
                    pairs.as_deref(),
                    nonconverged,
                ));
            }
        }
    }
    let diagnostics = monotone_opportunity_violations(&rows);
    Ok(PlanOutput {
        attribute_names: model.attributes.clone(),
        rows,
        cells,
        diagnostics,
    })
}

#[allow(clippy::too_many_arguments)]
fn metrics_row(
    plan: &ExperimentPlan,
    sample: usize,
    path_count: usize,
    tier: Option<Tier>,
    members: &[usize],
    base: &CellRecord,
    now: &CellRecord,
    pairs: Option<&[PairComparison]>,
    nonconverged: usize,
) -> MetricsRow {
    let names = &plan.base_model.attributes;
    let Some(pairs) = pairs else {
        return MetricsRow {
            sample,
            path_count,
            tier,
            frac_attr_improved: f64::NAN,
            frac_profit_improved: f64::NAN,
            mean_attr: names.iter().map(|k| (k.clone(), f64::NAN)).collect(),
            frac_pairs_max_val_improved: f64::NAN,
            frac_pairs_min_val_improved: f64::NAN,
            nonconverged,
        };
    };
    let sum = |cell: &CellRecord, n: usize| cell.attributes[n].iter().sum::<f64>();
    let mean_attr = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let total: f64 = members.iter().map(|&n| now.attributes[n][k]).sum();
            let mean = if members.is_empty() {
                0.0
            } else {
                total / members.len() as f64
            };
            (name.clone(), mean)
        })
        .collect();
    MetricsRow {
        sample,
        path_count,
        tier,
        frac_attr_improved: metrics::fraction(
            members
                .iter()
                .map(|&n| sum(now, n) > sum(base, n) + IMPROVEMENT_SLACK),
        ),
        frac_profit_improved: metrics::fraction(
            members
                .iter()
                .map(|&n| now.profits[n] > base.profits[n] + IMPROVEMENT_SLACK),
        ),
        mean_attr,
        frac_pairs_max_val_improved: metrics::fraction(pairs.iter().map(|p| p.max_improved)),
        frac_pairs_min_val_improved: metrics::fraction(pairs.iter().map(|p| p.min_improved)),
        nonconverged,
    }
}

/// Samples whose max-valuation improvement fraction drops as paths are
/// added. Equilibria shift with every added path, so a drop is a finding
/// rather than an error.
pub fn monotone_opportunity_violations(rows: &[MetricsRow]) -> Vec<String> {
    let mut out = Vec::new();
    let mut samples: Vec<usize> = rows.iter().map(|r| r.sample).collect();
    samples.sort_unstable();
    samples.dedup();
    for s in samples {
        let mut series: Vec<&MetricsRow> = rows
            .iter()
            .filter(|r| r.sample == s && r.tier.is_none() && r.nonconverged == 0)
            .collect();
        series.sort_by_key(|r| r.path_count);
        for w in series.windows(2) {
            if w[1].frac_pairs_max_val_improved < w[0].frac_pairs_max_val_improved - 1e-12 {
                out.push(format!(
                    "sample {s}: frac_pairs_max_val_improved drops from {} at {} paths to {} at {} paths",
                    w[0].frac_pairs_max_val_improved, w[0].path_count, w[1].frac_pairs_max_val_improved, w[1].path_count
                ));
            }
        }
    }
    out
}
