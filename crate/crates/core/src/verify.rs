//! Seeded randomized sweeps that check solver outputs against independent
//! oracles and the structural properties of the model.
//!
//! Every suite has a canonical name and may have short aliases. A suite
//! counts its cases and keeps a message for each failing one.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::best_response::{
    best_response, closed_form_applies, default_search_max, is_nash_equilibrium,
    numeric_best_response,
};
use crate::dynamics::{
    jacobian_homogeneous, jacobian_two_path, multi_start, round_robin, DynamicsConfig, Recording,
};
use crate::equilibrium::{
    competition_decline_counterexample, demand_crossover_sweep, homogeneous_equilibrium,
    homogeneous_nbs, homogeneous_profit, quartic_two_path_equilibrium, single_path_equilibrium,
    single_path_nbs, two_path_equilibrium, HomogeneousSpec,
};
use crate::error::{Error, Result};
use crate::model::{path_valuations, AttributeMatrix, NetworkModel};
use crate::netgen::{
    all_valley_free_paths, build_homogeneous, gravity_demand, is_valley_free, AsGraph, AsId,
    GravitySpec, PairDistance, Relation,
};
use crate::sampling;

/// Failure messages kept per suite; further failures are only counted.
const KEPT_FAILURES: usize = 20;

/// Characteristic ratios drawn for the demand crossover sweep.
pub const PSI_RANGE: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.cases > 0
    }

    /// One-line summary such as `best-response-oracle: 1000/1000 passed`.
    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} passed",
            self.name,
            self.cases - self.failed,
            self.cases
        )
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(message());
            }
        }
    }

    fn record<T>(&mut self, outcome: Result<T>, context: impl FnOnce() -> String) -> Option<T> {
        match outcome {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{}: {e}", context()));
                None
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub description: &'static str,
    run: fn(u64) -> SuiteReport,
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "best-response-oracle",
        aliases: &["best-response"],
        description: "closed-form best response against a grid and golden-section search",
        run: best_response_oracle,
    },
    SuiteInfo {
        name: "homogeneous-equilibrium",
        aliases: &["homogeneous"],
        description: "symmetric equilibrium passes the Nash check",
        run: homogeneous_equilibrium_suite,
    },
    SuiteInfo {
        name: "homogeneous-stability",
        aliases: &["symmetric-stability"],
        description: "round-robin dynamics reach the symmetric equilibrium and the analytic spectrum matches",
        run: homogeneous_stability,
    },
    SuiteInfo {
        name: "prisoners-dilemma",
        aliases: &["bargaining-gap"],
        description: "equilibrium attribute never exceeds the bargaining attribute on a single path",
        run: prisoners_dilemma,
    },
    SuiteInfo {
        name: "competition-monotonicity",
        aliases: &["monotonicity"],
        description: "competition never lowers the equilibrium attribute; conditional profit claim",
        run: competition_monotonicity,
    },
    SuiteInfo {
        name: "heterogeneous-equilibrium",
        aliases: &["heterogeneous"],
        description: "one- and two-path equilibria pass the Nash check and stay below the bargaining valuation",
        run: heterogeneous_equilibrium,
    },
    SuiteInfo {
        name: "two-path-stability",
        aliases: &["reaction-slopes"],
        description: "reaction slopes multiply to less than one and perturbed dynamics return",
        run: two_path_stability,
    },
    SuiteInfo {
        name: "demand-crossover",
        aliases: &["crossover"],
        description: "competition eventually raises total valuation as demand grows",
        run: demand_crossover,
    },
    SuiteInfo {
        name: "competition-decline",
        aliases: &["counterexample"],
        description: "constructed instances where competition lowers total valuation",
        run: competition_decline,
    },
    SuiteInfo {
        name: "quartic",
        aliases: &[],
        description: "general two-path solver against damped iteration",
        run: quartic,
    },
    SuiteInfo {
        name: "topology",
        aliases: &["gravity", "gao-rexford"],
        description: "gravity demand conservation and valley-free enumeration against brute force",
        run: topology,
    },
];

/// Looks a suite up by canonical name or alias, ignoring case.
pub fn find_suite(name: &str) -> Option<&'static SuiteInfo> {
    let name = name.to_ascii_lowercase();
    SUITES
        .iter()
        .find(|s| s.name == name || s.aliases.iter().any(|a| *a == name))
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let suite = find_suite(name).ok_or_else(|| {
        let known: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
        Error::InvalidConfig(format!(
            "unknown suite {name}; known suites: {}",
            known.join(", ")
        ))
    })?;
    Ok((suite.run)(seed))
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| (s.run)(seed)).collect()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

fn dynamics_config(tol: f64) -> DynamicsConfig {
    DynamicsConfig {
        tol,
        recording: Recording::Endpoints,
        ..DynamicsConfig::round_robin()
    }
}

fn best_response_oracle(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("best-response-oracle");
    let mut rng = rng(seed, 1);
    let mut case = 0;
    while case < 1000 {
        let model = sampling::single_market_model(&mut rng);
        let a = sampling::attributes(&mut rng, &model, 5.0);
        let n = rng.gen_range(0..model.num_isps());
        let k = rng.gen_range(0..model.num_attributes());
        if !closed_form_applies(&model, n, k) {
            continue;
        }
        case += 1;
        let Some(closed) =
            report.record(best_response(&model, &a, n, k), || format!("case {case}"))
        else {
            continue;
        };
        let hi = default_search_max(&model, &a, n, k);
        let Some(numeric) = report.record(
            numeric_best_response(&model, &a, n, k, hi, hi / 4000.0),
            || format!("case {case} numeric"),
        ) else {
            continue;
        };
        report.check(close(closed, numeric, 1e-5), || {
            format!("case {case}: closed form {closed} vs numeric {numeric}")
        });
    }
    report
}

fn homogeneous_equilibrium_suite(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("homogeneous-equilibrium");
    let mut rng = rng(seed, 2);
    for case in 0..500 {
        let spec = sampling::homogeneous_spec(&mut rng, 4, 4);
        let outcome = homogeneous_equilibrium(&spec).and_then(|eq| {
            let model = build_homogeneous(&spec)?;
            let a = AttributeMatrix::filled(model.num_isps(), 1, eq.a_plus);
            is_nash_equilibrium(&model, &a, 1e-8).map(|c| (eq.a_plus, c))
        });
        if let Some((a_plus, check)) = report.record(outcome, || format!("case {case}")) {
            report.check(check.holds, || {
                format!(
                    "case {case}: a+ = {a_plus}, residual {:e}",
                    check.max_residual
                )
            });
        }
    }
    report
}

/// Greedy nearest matching of two spectra; returns the largest distance.
pub fn spectrum_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for z in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, c| {
                if c.1 < best.1 {
                    c
                } else {
                    best
                }
            });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn homogeneous_stability(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("homogeneous-stability");
    let mut rng = rng(seed, 3);
    let config = DynamicsConfig {
        max_rounds: 1_000_000,
        ..dynamics_config(1e-11)
    };
    for case in 0..200 {
        let spec = sampling::homogeneous_spec(&mut rng, 3, 3);
        let Some((eq, model)) = report.record(
            homogeneous_equilibrium(&spec).and_then(|eq| Ok((eq, build_homogeneous(&spec)?))),
            || format!("case {case}"),
        ) else {
            continue;
        };
        let target = eq.a_plus * model.num_isps() as f64;
        for start in 0..5 {
            let a0 = sampling::attributes(&mut rng, &model, 2.0 * eq.a_plus.max(1.0));
            if let Some(trace) = report.record(round_robin(&model, &a0, &config), || {
                format!("case {case} start {start}")
            }) {
                let sum: f64 = trace.final_state().as_slice().iter().sum();
                report.check(close(sum, target, 1e-4), || {
                    format!(
                        "case {case} start {start}: sum {sum} vs {target} after {} rounds",
                        trace.rounds
                    )
                });
            }
        }
        if let Some(stab) = report.record(jacobian_homogeneous(&spec), || {
            format!("case {case} jacobian")
        }) {
            let analytic = stab.analytic_eigs.clone().unwrap_or_default();
            let gap = spectrum_distance(&analytic, &stab.eigenvalues);
            let signs_ok = analytic
                .iter()
                .all(|z| z.re < 0.0 || (spec.phi1 == 0.0 && z.re == 0.0 && z.im == 0.0));
            report.check(gap <= 1e-7 && signs_ok, || {
                format!("case {case}: spectrum gap {gap:e}, analytic {analytic:?}")
            });
        }
    }
    report
}

fn single_path_spec<R: Rng>(rng: &mut R) -> HomogeneousSpec {
    let mut spec = sampling::homogeneous_spec(rng, 1, 4);
    spec.q = 1;
    spec
}

fn prisoners_dilemma(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("prisoners-dilemma");
    let mut rng = rng(seed, 4);
    for case in 0..1000 {
        let spec = single_path_spec(&mut rng);
        let outcome =
            homogeneous_equilibrium(&spec).and_then(|eq| Ok((eq.a_plus, homogeneous_nbs(&spec)?)));
        if let Some((plus, nbs)) = report.record(outcome, || format!("case {case}")) {
            report.check(plus <= nbs + 1e-9, || {
                format!("case {case}: a+ {plus} > a° {nbs}")
            });
        }
    }
    report
}

fn competition_monotonicity(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("competition-monotonicity");
    let mut rng = rng(seed, 5);
    for q in 1..=8 {
        for case in 0..200 {
            let base = single_path_spec(&mut rng);
            let competitive = HomogeneousSpec {
                q,
                d: base.d * q as f64,
                ..base
            };
            let outcome = (|| {
                let a1 = homogeneous_equilibrium(&base)?.a_plus;
                let a2 = homogeneous_equilibrium(&competitive)?.a_plus;
                Ok((a1, a2, homogeneous_nbs(&base)?))
            })();
            let Some((a1, a2, nbs)) = report.record(outcome, || format!("Q {q} case {case}"))
            else {
                continue;
            };
            report.check(a2 >= a1 - 1e-9, || {
                format!("Q {q} case {case}: a+(N2) {a2} < a+(N1) {a1}")
            });
            if a1 <= a2 && a2 <= nbs {
                let (p1, p2) = (
                    homogeneous_profit(&base, a1),
                    homogeneous_profit(&competitive, a2),
                );
                report.check(p2 >= p1 - 1e-9 * p1.abs().max(1.0), || {
                    format!("Q {q} case {case}: profit {p2} < {p1}")
                });
            }
        }
    }
    report
}

fn heterogeneous_equilibrium(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("heterogeneous-equilibrium");
    let mut rng = rng(seed, 6);
    for case in 0..500 {
        let (model, two) = if case % 2 == 0 {
            (sampling::single_path_model(&mut rng, 3, 2), false)
        } else {
            (sampling::two_path_model(&mut rng, 3, 2), true)
        };
        let solved = if two {
            two_path_equilibrium(&model)
        } else {
            single_path_equilibrium(&model, 0)
        };
        let Some(eq) = report.record(solved, || format!("case {case}")) else {
            continue;
        };
        if let Some(check) = report
            .record(is_nash_equilibrium(&model, &eq.attributes, 1e-6), || {
                format!("case {case}")
            })
        {
            report.check(check.holds, || {
                format!("case {case}: residual {:e}", check.max_residual)
            });
        }
        if !two {
            if let Some(nbs) = report.record(single_path_nbs(&model, 0), || {
                format!("case {case} bargaining")
            }) {
                let (vp, vo) = (eq.path_valuations[0], nbs.path_valuations[0]);
                report.check(vp <= vo + 1e-9 * vo.abs().max(1.0), || {
                    format!("case {case}: v+ {vp} > v° {vo}")
                });
            }
        }
    }
    report
}

/// Random two-path instances with a unique equilibrium, paired with it.
fn unique_two_path_instances(
    seed: u64,
    count: usize,
) -> Vec<(NetworkModel, crate::equilibrium::EquilibriumResult)> {
    let mut rng = rng(seed, 6);
    let mut out = Vec::new();
    for case in 0..count {
        let model = if case % 2 == 0 {
            let _ = sampling::single_path_model(&mut rng, 3, 2);
            continue;
        } else {
            sampling::two_path_model(&mut rng, 3, 2)
        };
        if let Ok(eq) = two_path_equilibrium(&model) {
            if eq.unique_in_attributes {
                out.push((model, eq));
            }
        }
    }
    out
}

/// Damping that keeps round-robin contractive around a two-path
/// equilibrium whose reaction slopes multiply to `product`.
pub fn two_path_damping(product: f64) -> f64 {
    0.5_f64.min(1.0 / (1.0 + product.abs()))
}

fn two_path_stability(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("two-path-stability");
    let mut rng = rng(seed, 7);
    for (case, (model, eq)) in unique_two_path_instances(seed, 500).into_iter().enumerate() {
        let Some(stab) = report.record(jacobian_two_path(&model, &eq), || format!("case {case}"))
        else {
            continue;
        };
        let product = stab.jacobian[0][1] * stab.jacobian[1][0];
        report.check(product < 1.0, || {
            format!("case {case}: slope product {product}")
        });
        let config = DynamicsConfig {
            step: two_path_damping(product),
            max_rounds: 1_000_000,
            ..dynamics_config(1e-11)
        };
        let starts: Vec<AttributeMatrix> = (0..20)
            .map(|_| {
                let mut a0 = eq.attributes.clone();
                for v in a0.as_mut_slice() {
                    let noise =
                        Normal::new(0.0, 0.3 * v.abs().max(0.1)).expect("positive deviation");
                    *v = (*v + noise.sample(&mut rng)).max(0.0);
                }
                a0
            })
            .collect();
        for (start, trace) in multi_start(&model, &starts, &config)
            .into_iter()
            .enumerate()
        {
            let outcome =
                trace.and_then(|t| Ok((t.converged, path_valuations(&model, t.final_state())?)));
            if let Some((converged, values)) =
                report.record(outcome, || format!("case {case} start {start}"))
            {
                let gap = values
                    .iter()
                    .zip(&eq.path_valuations)
                    .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
                    .fold(0.0, f64::max);
                report.check(converged && gap <= 1e-4, || {
                    format!(
                        "case {case} start {start}: valuation gap {gap:e}, converged {converged}"
                    )
                });
            }
        }
    }
    report
}

/// `count` log-spaced demands over `[1e-2, 1e6]`.
pub fn crossover_grid(count: usize) -> Vec<f64> {
    let (lo, hi) = (-2.0_f64, 6.0_f64);
    (0..count)
        .map(|j| 10f64.powf(lo + (hi - lo) * j as f64 / (count - 1).max(1) as f64))
        .collect()
}

fn demand_crossover(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("demand-crossover");
    let mut rng = rng(seed, 8);
    for case in 0..100 {
        let (p, pb) = (
            sampling::log_uniform(&mut rng, PSI_RANGE),
            sampling::log_uniform(&mut rng, PSI_RANGE),
        );
        let side = sampling::side_with_ratio(p, rng.gen_range(0.0..=2.0));
        let side_b = sampling::side_with_ratio(pb, rng.gen_range(0.0..=2.0));
        let grid = crossover_grid(20);
        if let Some(table) = report.record(demand_crossover_sweep(&side, &side_b, &grid), || {
            format!("case {case}")
        }) {
            report.check(table.crossover_index.is_some(), || {
                format!("case {case}: no crossover for psi ({p}, {pb})")
            });
        }
    }
    report
}

fn competition_decline(_seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("competition-decline");
    let grid: Vec<f64> = (0..10).map(|j| 0.5 + 7.5 * j as f64 / 9.0).collect();
    for &d_r in &grid {
        for &d_rbar in &grid {
            if let Some(c) = report
                .record(competition_decline_counterexample(d_r, d_rbar, 0.1), || {
                    format!("({d_r}, {d_rbar})")
                })
            {
                report.check(c.delta() < 0.0, || {
                    format!("({d_r}, {d_rbar}): delta {}", c.delta())
                });
            }
        }
    }
    if let Some(c) = report.record(competition_decline_counterexample(2.0, 2.0, 0.1), || {
        "worked instance".into()
    }) {
        report.check((c.delta() + 0.0124).abs() < 1e-4, || {
            format!("worked instance delta {}", c.delta())
        });
    }
    report
}

fn quartic(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("quartic");
    let mut rng = rng(seed, 9);
    let config = DynamicsConfig {
        max_rounds: 200_000,
        ..dynamics_config(1e-13)
    };
    for case in 0..100 {
        let params = sampling::two_path_general(&mut rng, true);
        let model = params.to_model();
        let Some(sol) = report.record(quartic_two_path_equilibrium(&params), || {
            format!("case {case}")
        }) else {
            continue;
        };
        if let Some(trace) = report.record(
            round_robin(&model, &model.zero_attributes(), &config),
            || format!("case {case} iteration"),
        ) {
            let it = trace.final_state();
            report.check(
                trace.converged
                    && close(sol.a1_plus, it.get(0, 0), 1e-5)
                    && close(sol.a2_plus, it.get(1, 0), 1e-5),
                || {
                    format!(
                        "case {case}: quartic ({}, {}) vs iteration ({}, {})",
                        sol.a1_plus,
                        sol.a2_plus,
                        it.get(0, 0),
                        it.get(1, 0)
                    )
                },
            );
        }
    }
    for case in 0..100 {
        let params = sampling::two_path_general(&mut rng, false);
        let model = params.to_model();
        let outcome = quartic_two_path_equilibrium(&params)
            .and_then(|s| Ok((s, two_path_equilibrium(&model)?)));
        if let Some((sol, eq)) = report.record(outcome, || format!("zero unit cost case {case}")) {
            let (x, y) = (eq.attributes.get(0, 0), eq.attributes.get(1, 0));
            report.check(
                close(sol.a1_plus, x, 1e-6) && close(sol.a2_plus, y, 1e-6),
                || {
                    format!(
                        "zero unit cost case {case}: quartic ({}, {}) vs closed form ({x}, {y})",
                        sol.a1_plus, sol.a2_plus
                    )
                },
            );
        }
    }
    report
}

/// Random connected-ish AS graph over `nodes` ASes with mixed relations.
pub fn random_as_graph<R: Rng>(rng: &mut R, nodes: usize) -> AsGraph {
    let mut graph = AsGraph::default();
    for id in 1..=nodes as AsId {
        graph.ensure_node(id).mass = sampling::log_uniform(rng, (1.0, 100.0));
    }
    for a in 1..=nodes as AsId {
        for b in a + 1..=nodes as AsId {
            if !rng.gen_bool(0.4) {
                continue;
            }
            let relation = if rng.gen_bool(0.3) {
                Relation::PeerToPeer
            } else {
                Relation::CustomerToProvider
            };
            let (x, y) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            graph
                .add_edge(x, y, relation)
                .expect("fresh pair of distinct nodes");
        }
    }
    graph
}

fn simple_paths(
    adj: &crate::netgen::Adjacency,
    path: &mut Vec<AsId>,
    dst: AsId,
    out: &mut Vec<Vec<AsId>>,
) {
    let here = *path.last().expect("non-empty");
    if here == dst {
        out.push(path.clone());
        return;
    }
    for &(next, _) in adj.get(&here).map(Vec::as_slice).unwrap_or(&[]) {
        if !path.contains(&next) {
            path.push(next);
            simple_paths(adj, path, dst, out);
            path.pop();
        }
    }
}

fn topology(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("topology");
    let mut rng = rng(seed, 10);
    for case in 0..50 {
        let nodes = rng.gen_range(2..=8);
        let graph = random_as_graph(&mut rng, nodes);
        let adj = graph.adjacency();
        let mut mismatches = 0;
        for src in 1..=nodes as AsId {
            for dst in 1..=nodes as AsId {
                if src == dst {
                    continue;
                }
                let mut brute = Vec::new();
                simple_paths(&adj, &mut vec![src], dst, &mut brute);
                brute.retain(|p| is_valley_free(&adj, p));
                brute.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                if brute != all_valley_free_paths(&adj, src, dst, nodes) {
                    mismatches += 1;
                }
            }
        }
        report.check(mismatches == 0, || {
            format!("graph {case}: {mismatches} pairs differ")
        });

        let pairs: Vec<PairDistance> = (1..=nodes as AsId)
            .flat_map(|s| {
                (1..=nodes as AsId)
                    .filter(move |&t| t != s)
                    .map(move |t| (s, t))
            })
            .map(|(source, destination)| PairDistance {
                source,
                destination,
                distance: rng.gen_range(1.0..6.0),
            })
            .collect();
        let spec = GravitySpec {
            total_traffic: sampling::positive(&mut rng),
            ..GravitySpec::default()
        };
        if let Some(demand) = report.record(gravity_demand(&graph, &pairs, &spec), || {
            format!("graph {case} gravity")
        }) {
            let total: f64 = demand.iter().sum();
            report.check(
                (total - spec.total_traffic).abs() <= 1e-9 * spec.total_traffic,
                || {
                    format!(
                        "graph {case}: demand sums to {total}, expected {}",
                        spec.total_traffic
                    )
                },
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_alias() {
        assert_eq!(
            find_suite("bargaining-gap").unwrap().name,
            "prisoners-dilemma"
        );
        assert_eq!(
            find_suite("MONOTONICITY").unwrap().name,
            "competition-monotonicity"
        );
        assert_eq!(find_suite("quartic").unwrap().name, "quartic");
        assert!(find_suite("nope").is_none());
        assert!(run_suite("nope", 0).is_err());
    }

    #[test]
    fn names_are_unique() {
        let mut all: Vec<&str> = SUITES
            .iter()
            .flat_map(|s| std::iter::once(s.name).chain(s.aliases.iter().copied()))
            .collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn spectrum_matching() {
        let a = [Complex::new(-1.0, 0.0), Complex::new(-2.0, 0.0)];
        let b = [Complex::new(-2.0, 1e-9), Complex::new(-1.0, 0.0)];
        assert!(spectrum_distance(&a, &b) < 2e-9);
        assert_eq!(spectrum_distance(&a, &b[..1]), f64::INFINITY);
    }

    #[test]
    fn report_counts() {
        let mut r = SuiteReport::new("x");
        assert!(!r.passed());
        r.check(true, String::new);
        assert!(r.passed());
        r.check(false, || "bad".into());
        assert_eq!((r.cases, r.failed, r.failures.len()), (2, 1, 1));
        assert_eq!(r.summary(), "x: 1/2 passed");
    }
}
