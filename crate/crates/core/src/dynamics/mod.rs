//! Competition dynamics: damped round-robin best responses and an explicit
//! Euler discretization of the continuous adjustment process, plus
//! Jacobian-based stability analysis.

mod stability;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_response::auto_best_response;
use crate::error::{Error, Result};
use crate::model::{AttributeMatrix, NetworkModel};

pub use stability::{
    classify, jacobian_homogeneous, jacobian_two_path, Stability, StabilityReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsMode {
    OdeEuler,
    RoundRobinBetterResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisitOrder {
    IndexOrder,
    /// A fresh permutation of the coordinates every round.
    SeededShuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recording {
    /// Every state after every round.
    All,
    /// The start state and the last state only.
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsConfig {
    pub mode: DynamicsMode,
    /// Damping `eta` for round-robin, step size `h` for Euler.
    pub step: f64,
    /// Convergence threshold on the largest change in one round.
    pub tol: f64,
    pub max_rounds: usize,
    pub order: VisitOrder,
    pub seed: u64,
    pub recording: Recording,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self::round_robin()
    }
}

impl DynamicsConfig {
    pub fn round_robin() -> Self {
        Self {
            mode: DynamicsMode::RoundRobinBetterResponse,
            step: 0.5,
            tol: 1e-6,
            max_rounds: 10_000,
            order: VisitOrder::IndexOrder,
            seed: 0,
            recording: Recording::All,
        }
    }

    pub fn ode() -> Self {
        Self {
            mode: DynamicsMode::OdeEuler,
            step: 0.1,
            ..Self::round_robin()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let step_ok = match self.mode {
            DynamicsMode::RoundRobinBetterResponse => self.step > 0.0 && self.step <= 1.0,
            DynamicsMode::OdeEuler => self.step > 0.0 && self.step.is_finite(),
        };
        if !step_ok {
            return Err(Error::InvalidConfig(format!(
                "invalid step {} for {:?}",
                self.step, self.mode
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    /// `states[0]` is the start state.
    pub states: Vec<AttributeMatrix>,
    pub converged: bool,
    /// Index of the converging round, or the number of rounds run.
    pub rounds: usize,
    pub final_residual: f64,
}

impl DynamicsTrace {
    pub fn final_state(&self) -> &AttributeMatrix {
        self.states
            .last()
            .expect("traces always hold the start state")
    }

    /// Long-format CSV with columns `round,n,k,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,n,k,value\n");
        for (t, s) in self.states.iter().enumerate() {
            for n in 0..s.rows() {
                for k in 0..s.cols() {
                    out.push_str(&format!("{t},{n},{k},{}\n", s.get(n, k)));
                }
            }
        }
        out
    }
}

struct Recorder {
    mode: Recording,
    states: Vec<AttributeMatrix>,
}

impl Recorder {
    fn new(mode: Recording, start: &AttributeMatrix) -> Self {
        Self {
            mode,
            states: vec![start.clone()],
        }
    }

    fn push(&mut self, state: &AttributeMatrix) {
        match self.mode {
            Recording::All => self.states.push(state.clone()),
            Recording::Endpoints => {
                if self.states.len() == 2 {
                    self.states[1] = state.clone();
                } else {
                    self.states.push(state.clone());
                }
            }
        }
    }

    fn finish(self, converged: bool, rounds: usize, final_residual: f64) -> DynamicsTrace {
        DynamicsTrace {
            states: self.states,
            converged,
            rounds,
            final_residual,
        }
    }
}

fn coordinates(model: &NetworkModel) -> Vec<(usize, usize)> {
    (0..model.num_isps())
        .flat_map(|n| (0..model.num_attributes()).map(move |k| (n, k)))
        .collect()
}

fn diverged(round: usize, recorder: Recorder, residual: f64) -> Error {
    Error::Divergence {
        round,
        trace: Box::new(recorder.finish(false, round, residual)),
    }
}

/// Round-robin dynamics: every round visits each coordinate and moves it a
/// fraction `eta` of the way to its best response, then projects onto the
/// bounds.
pub fn round_robin(
    model: &NetworkModel,
    start: &AttributeMatrix,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace> {
    config.validate()?;
    model.check_dims(start)?;
    let mut coords = coordinates(model);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut a = start.clone();
    let mut recorder = Recorder::new(config.recording, start);
    let mut change = f64::INFINITY;
    for round in 0..config.max_rounds {
        if config.order == VisitOrder::SeededShuffle {
            coords.shuffle(&mut rng);
        }
        change = 0.0;
        for &(n, k) in &coords {
            let current = a.get(n, k);
            let target = auto_best_response(model, &a, n, k)?;
            let next = model.clamp(n, k, current + config.step * (target - current));
            change = change.max((next - current).abs());
            a.set(n, k, next);
        }
        recorder.push(&a);
        if !a.is_finite() || !change.is_finite() {
            return Err(diverged(round, recorder, change));
        }
        if change <= config.tol {
            return Ok(recorder.finish(true, round, change));
        }
    }
    Ok(recorder.finish(false, config.max_rounds, change))
}

/// Explicit Euler on `da/dt = a*(A) - a` with all best responses taken at
/// the state of the previous step. The step is halved once in every round
/// whose residual grew.
pub fn integrate_ode(
    model: &NetworkModel,
    start: &AttributeMatrix,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace> {
    config.validate()?;
    model.check_dims(start)?;
    let coords = coordinates(model);
    let mut h = config.step;
    let mut a = start.clone();
    let mut recorder = Recorder::new(config.recording, start);
    let mut previous = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for round in 0..config.max_rounds {
        let mut rates = Vec::with_capacity(coords.len());
        for &(n, k) in &coords {
            rates.push(auto_best_response(model, &a, n, k)? - a.get(n, k));
        }
        let speed = rates.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        if !speed.is_finite() {
            return Err(diverged(round, recorder, speed));
        }
        if speed > previous {
            h *= 0.5;
        }
        previous = speed;
        residual = speed * h;
        if residual <= config.tol {
            return Ok(recorder.finish(true, round, residual));
        }
        for (&(n, k), rate) in coords.iter().zip(&rates) {
            let next = model.clamp(n, k, a.get(n, k) + h * rate);
            a.set(n, k, next);
        }
        recorder.push(&a);
        if !a.is_finite() {
            return Err(diverged(round, recorder, residual));
        }
    }
    Ok(recorder.finish(false, config.max_rounds, residual))
}

/// Dispatches on `config.mode`.
pub fn run_dynamics(
    model: &NetworkModel,
    start: &AttributeMatrix,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace> {
    match config.mode {
        DynamicsMode::RoundRobinBetterResponse => round_robin(model, start, config),
        DynamicsMode::OdeEuler => integrate_ode(model, start, config),
    }
}

/// Independent trajectories from several starts, run in parallel.
pub fn multi_start(
    model: &NetworkModel,
    starts: &[AttributeMatrix],
    config: &DynamicsConfig,
) -> Vec<Result<DynamicsTrace>> {
    starts
        .par_iter()
        .map(|s| run_dynamics(model, s, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{homogeneous_equilibrium, two_path_equilibrium, HomogeneousSpec};
    use crate::model::path_valuations;
    use crate::netgen::{build_homogeneous, build_two_path_pair, TwoPathSide};

    fn spec(q: usize, d: f64) -> HomogeneousSpec {
        HomogeneousSpec {
            q,
            i: 1,
            alpha1: 1.0,
            alpha0: 0.0,
            phi1: 0.0,
            phi0: 0.0,
            gamma1: 1.0,
            rho: 1.0,
            d,
        }
    }

    fn monopoly() -> NetworkModel {
        build_homogeneous(&spec(1, 4.0)).unwrap()
    }

    #[test]
    fn full_step_reaches_equilibrium_in_one_round() {
        let cfg = DynamicsConfig {
            step: 1.0,
            ..DynamicsConfig::round_robin()
        };
        let t = round_robin(&monopoly(), &AttributeMatrix::zeros(1, 1), &cfg).unwrap();
        assert!((t.states[1].get(0, 0) - 1.0).abs() < 1e-12);
        assert!(t.converged);
        assert_eq!(t.rounds, 1);
    }

    #[test]
    fn damped_residuals_are_geometric() {
        for eta in [0.25, 0.5, 0.9] {
            let cfg = DynamicsConfig {
                step: eta,
                ..DynamicsConfig::round_robin()
            };
            let t = round_robin(&monopoly(), &AttributeMatrix::zeros(1, 1), &cfg).unwrap();
            for (i, s) in t.states.iter().enumerate().take(20) {
                let expected = (1.0 - eta).powi(i as i32);
                assert!(((s.get(0, 0) - 1.0).abs() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn start_at_equilibrium_converges_at_round_zero() {
        let a = AttributeMatrix::filled(1, 1, 1.0);
        let t = round_robin(&monopoly(), &a, &DynamicsConfig::round_robin()).unwrap();
        assert!(t.converged);
        assert_eq!(t.rounds, 0);
        let t = integrate_ode(&monopoly(), &a, &DynamicsConfig::ode()).unwrap();
        assert!(t.converged);
        assert_eq!(t.rounds, 0);
    }

    #[test]
    fn euler_approaches_monopoly_optimum() {
        let cfg = DynamicsConfig {
            tol: 1e-7,
            ..DynamicsConfig::ode()
        };
        let t = integrate_ode(&monopoly(), &AttributeMatrix::zeros(1, 1), &cfg).unwrap();
        assert!(t.converged);
        assert!((t.final_state().get(0, 0) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn euler_on_two_path_homogeneous() {
        let s = spec(2, 4.0);
        let model = build_homogeneous(&s).unwrap();
        let start = AttributeMatrix::from_rows(vec![vec![3.0], vec![0.2]]).unwrap();
        let cfg = DynamicsConfig {
            tol: 1e-9,
            ..DynamicsConfig::ode()
        };
        let t = integrate_ode(&model, &start, &cfg).unwrap();
        let expected = homogeneous_equilibrium(&s).unwrap().a_plus;
        for n in 0..2 {
            assert!((t.final_state().get(n, 0) - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn shuffled_order_reaches_same_point() {
        let model = build_homogeneous(&spec(3, 5.0)).unwrap();
        let start = AttributeMatrix::zeros(3, 1);
        let base = round_robin(&model, &start, &DynamicsConfig::round_robin()).unwrap();
        let cfg = DynamicsConfig {
            order: VisitOrder::SeededShuffle,
            seed: 9,
            tol: 1e-10,
            ..DynamicsConfig::round_robin()
        };
        let shuffled = round_robin(&model, &start, &cfg).unwrap();
        assert!(base.final_state().max_abs_diff(shuffled.final_state()) < 1e-5);
    }

    #[test]
    fn symmetric_two_path_endpoint() {
        let side = TwoPathSide {
            alpha: 1.0,
            alpha0: 0.0,
            rho: 1.0,
            phi0: 0.0,
            gamma: 1.0,
        };
        let pair = build_two_path_pair(&side, &side, 2.0, 2.0).unwrap();
        let start = AttributeMatrix::from_rows(vec![vec![2.5], vec![0.1]]).unwrap();
        let cfg = DynamicsConfig {
            tol: 1e-10,
            ..DynamicsConfig::round_robin()
        };
        let t = round_robin(&pair.n4, &start, &cfg).unwrap();
        let v = path_valuations(&pair.n4, t.final_state()).unwrap();
        let eq = two_path_equilibrium(&pair.n4).unwrap();
        for (x, y) in v.iter().zip(&eq.path_valuations) {
            assert!((x - 0.866_025_403_784_438_6).abs() < 1e-6);
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn endpoint_recording_keeps_two_states() {
        let cfg = DynamicsConfig {
            recording: Recording::Endpoints,
            ..DynamicsConfig::round_robin()
        };
        let t = round_robin(&monopoly(), &AttributeMatrix::zeros(1, 1), &cfg).unwrap();
        assert_eq!(t.states.len(), 2);
        assert!((t.final_state().get(0, 0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn config_validation() {
        let bad = DynamicsConfig {
            step: 1.5,
            ..DynamicsConfig::round_robin()
        };
        assert!(round_robin(&monopoly(), &AttributeMatrix::zeros(1, 1), &bad).is_err());
        assert!(round_robin(
            &monopoly(),
            &AttributeMatrix::zeros(2, 1),
            &DynamicsConfig::default()
        )
        .is_err());
    }

    #[test]
    fn csv_has_one_line_per_entry() {
        let cfg = DynamicsConfig {
            step: 1.0,
            ..DynamicsConfig::round_robin()
        };
        let t = round_robin(&monopoly(), &AttributeMatrix::zeros(1, 1), &cfg).unwrap();
        assert_eq!(t.to_csv().lines().count(), 1 + t.states.len());
    }
}
