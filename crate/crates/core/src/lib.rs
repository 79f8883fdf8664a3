//! Quality competition among ISPs whose paths overlap across markets.
//!
//! Customers pick among the paths of a market with logit probabilities
//! driven by path valuations, which in turn depend on the quality
//! attributes chosen by the ISPs along each path. The crate evaluates the
//! model, computes best responses and equilibria (closed form where one
//! exists, numeric otherwise), simulates competition dynamics, builds
//! topologies from AS graphs and runs parameter-sweep experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod best_response;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod model;
pub mod netgen;
pub mod numeric;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    AttributeMatrix, CostForm, IspParams, Market, NetworkModel, Path, Tier, ValuationForm,
};
