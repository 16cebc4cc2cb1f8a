//! Closed-loop episode execution.

use super::Environment;
use crate::mppi::{mpc_step, ControlState, ThetaMode};
use crate::rng::RngStream;
use crate::space::{ControllerConfig, ModelDistParams};
use crate::stats::sample_model_params;

#[derive(Debug, Clone, Copy)]
pub struct EpisodeOptions {
    /// Steps per episode.
    pub n_steps: usize,
    /// MPPI planning horizon T.
    pub horizon: usize,
    /// MPPI rollouts per control step M.
    pub rollouts: usize,
    /// When set, each rollout plans with its own theta draw instead of one
    /// shared draw per control step.
    pub theta_per_rollout: bool,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    /// Cumulative reward over the episode.
    pub total_reward: f64,
    /// Visited true-world states, `n_steps + 1` entries.
    pub states: Vec<Vec<f64>>,
    /// Steps that ended in contact with the true obstacle (zero for
    /// environments without one).
    pub collision_steps: usize,
}

/// Runs one episode: each control step samples believed dynamics parameters
/// from `psi`, plans with them, and executes the first optimal action on the
/// true dynamics.
pub fn run_episode(
    env: &dyn Environment,
    opts: &EpisodeOptions,
    phi: &ControllerConfig,
    psi: &ModelDistParams,
    stream: RngStream,
) -> EpisodeResult {
    let true_theta = env.true_theta();
    let mut control = ControlState::zeros(opts.horizon, env.action_dim());
    let mut s = env.initial_state();
    let mut states = Vec::with_capacity(opts.n_steps + 1);
    states.push(s.clone());
    let mut total_reward = 0.0;
    let mut collision_steps = 0;

    for i in 0..opts.n_steps {
        let step_stream = stream.child(i as u64);
        let shared_theta;
        let theta = if opts.theta_per_rollout {
            ThetaMode::PerRollout(psi)
        } else {
            shared_theta = sample_model_params(psi, &mut step_stream.child(0).rng());
            ThetaMode::Shared(&shared_theta)
        };
        let (a0, next_control) =
            mpc_step(env, &s, &control, theta, phi, opts.rollouts, step_stream.child(1));
        control = next_control;
        total_reward += env.reward(&s, &a0);
        s = env.step(&s, &a0, &true_theta);
        if env.in_true_collision(&s) {
            collision_steps += 1;
        }
        states.push(s.clone());
    }

    EpisodeResult { total_reward, states, collision_steps }
}
