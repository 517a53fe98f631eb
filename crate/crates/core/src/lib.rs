//! Request scheduling for serverless edge nodes.
//!
//! Requests upload over a shared wireless band to one of several edge nodes
//! and are then processed there. The crate models the Shannon-rate upload
//! chain, evaluates per-request delay, and provides four schedulers: an
//! exhaustive optimum for small instances, a genetic algorithm, an archive
//! based evolutionary sampler, and a recurrent network trained on the
//! sampler's solutions. The [`harness`] module benchmarks them against each
//! other.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); generic types
//! default to `f64` and single-precision aliases are provided below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod evo;
pub mod exact;
pub mod ga;
pub mod harness;
pub mod num;
pub mod problem;
pub mod report;
pub mod scengen;
pub mod surrogate;

pub use error::{Error, Result};
pub use num::Scalar;
pub use problem::{
    check_feasibility, evaluate, objective, DelayReport, EdgeNode, ObjectiveKind, Request,
    Scenario, Solution, Violation,
};
pub use report::SolverReport;

pub type Scenario32 = problem::Scenario<f32>;
pub type Scenario64 = problem::Scenario<f64>;
pub type DelayReport32 = problem::DelayReport<f32>;
pub type DelayReport64 = problem::DelayReport<f64>;
pub type SolverReport32 = report::SolverReport<f32>;
pub type SolverReport64 = report::SolverReport<f64>;
pub type WirelessParams32 = channel::WirelessParams<f32>;
pub type WirelessParams64 = channel::WirelessParams<f64>;
pub type SurrogateModel32 = surrogate::SurrogateModel<f32>;
pub type SurrogateModel64 = surrogate::SurrogateModel<f64>;
