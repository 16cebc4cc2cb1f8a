//! Simulated environments with explicitly parameterised dynamics.
//!
//! Every environment exposes the same transition contract: `step` is a
//! deterministic function of `(state, action, theta)` where `theta` holds the
//! uncertain physical parameters. The controller plans with sampled `theta`;
//! the world itself evolves (and is scored) with the true value.

mod episode;
mod pendulum;
mod planar;

pub use episode::{run_episode, EpisodeOptions, EpisodeResult};
pub use pendulum::Pendulum;
pub use planar::Planar;

/// The Markovian transition contract.
///
/// States and actions are flat real vectors; all stochasticity lives in
/// action perturbations and `theta` sampling, so `step` is pure.
pub trait Environment: Sync {
    fn name(&self) -> &'static str;
    fn state_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    /// Symmetric per-component actuator limit.
    fn action_limit(&self) -> f64;
    fn theta_dim(&self) -> usize;
    /// The ground-truth dynamics parameters the world evolves with.
    fn true_theta(&self) -> Vec<f64>;
    fn initial_state(&self) -> Vec<f64>;
    fn step(&self, s: &[f64], a: &[f64], theta: &[f64]) -> Vec<f64>;
    /// Instantaneous planning cost under the believed parameters.
    fn instant_cost(&self, s: &[f64], theta: &[f64]) -> f64;
    /// Terminal planning cost; defaults to the instantaneous cost.
    fn terminal_cost(&self, s: &[f64], theta: &[f64]) -> f64 {
        self.instant_cost(s, theta)
    }
    /// True-world reward for taking `a` in `s`.
    fn reward(&self, s: &[f64], a: &[f64]) -> f64;
    /// Whether the state records contact with the true obstacle, for
    /// environments that have one.
    fn in_true_collision(&self, _s: &[f64]) -> bool {
        false
    }
}
