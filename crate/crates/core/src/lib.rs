//! Adaptive stochastic model predictive control.
//!
//! An MPPI controller whose hyper-parameters and dynamics-model parameter
//! distributions are tuned jointly by classifier-based Bayesian optimisation,
//! benchmarked against TPE, CMA-ES, GP-based BO and random search on
//! desk-scale control tasks.

pub mod classifiers;
pub mod envs;
pub mod error;
pub mod harness;
pub mod mppi;
pub mod optimizers;
pub mod rng;
pub mod space;
pub mod stats;

pub use error::Error;
pub use rng::RngStream;
pub use space::{ControllerConfig, Dataset, EvalRecord, ModelDistParams, SearchSpace};
