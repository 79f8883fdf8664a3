//! Closed-form and numeric equilibria and bargaining solutions.

mod effects;
pub(crate) mod heterogeneous;
mod homogeneous;
mod nbs;
mod quartic;

use serde::{Deserialize, Serialize};

pub use effects::{
    competition_decline_counterexample, demand_crossover_sweep, n3_valuation_max_split,
    CompetitionDeclineCase, CrossoverRow, CrossoverTable,
};
pub use heterogeneous::{
    characteristic_ratio, isolated_paths_equilibrium, single_path_equilibrium, single_path_nbs,
    two_path_equilibrium, two_path_interior_valuation, two_path_reaction,
};
pub use homogeneous::{
    homogeneous_coefficients, homogeneous_equilibrium, homogeneous_nbs, homogeneous_profit,
    HomogeneousEquilibrium, HomogeneousParams, HomogeneousSpec,
};
pub use nbs::{improve_nash_product, joint_profit, nbs_global};
pub use quartic::{
    quartic_coefficients, quartic_equilibrium, quartic_two_path_equilibrium, QuarticCandidate,
    QuarticCoefficients, QuarticSolution, TwoPathGeneralParams,
};

use crate::best_response::is_nash_equilibrium;
use crate::error::Result;
use crate::model::{path_valuations, AttributeMatrix, NetworkModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Homogeneous,
    SinglePath,
    SinglePathNbs,
    IsolatedPaths,
    TwoPath,
    Quartic,
    NbsGlobal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub attributes: AttributeMatrix,
    pub path_valuations: Vec<f64>,
    pub solver: SolverKind,
    /// Fixed-point residual (first-order residual for bargaining solutions).
    pub residual: f64,
    pub unique_in_attributes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nash_product: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl EquilibriumResult {
    pub(crate) fn new(
        model: &NetworkModel,
        attributes: AttributeMatrix,
        solver: SolverKind,
        residual: f64,
        unique_in_attributes: bool,
    ) -> Result<Self> {
        let path_valuations = path_valuations(model, &attributes)?;
        Ok(Self {
            attributes,
            path_valuations,
            solver,
            residual,
            unique_in_attributes,
            nash_product: None,
            diagnostics: Vec::new(),
        })
    }

    /// Sum of all path valuations.
    pub fn total_valuation(&self) -> f64 {
        self.path_valuations.iter().sum()
    }
}

/// Symmetric equilibrium of a homogeneous market as a full result on the
/// model built by [`crate::netgen::build_homogeneous`].
pub fn solve_homogeneous(spec: &HomogeneousSpec) -> Result<EquilibriumResult> {
    let eq = homogeneous_equilibrium(spec)?;
    let model = crate::netgen::build_homogeneous(spec)?;
    let a = AttributeMatrix::filled(model.num_isps(), 1, eq.a_plus);
    let check = is_nash_equilibrium(&model, &a, 0.0)?;
    EquilibriumResult::new(&model, a, SolverKind::Homogeneous, check.max_residual, true)
}
