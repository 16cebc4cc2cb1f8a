//! Model predictive path integral control.
//!
//! Perturbed-rollout evaluation, information-theoretic weighting and the
//! receding-horizon action-sequence update. Per rollout, perturbed actions
//! are clamped to actuator limits before simulation while the update uses
//! the unclamped perturbations, keeping the update rule exactly in its
//! printed form.

use crate::envs::Environment;
use crate::rng::RngStream;
use crate::space::{ControllerConfig, ModelDistParams};
use crate::stats::sample_model_params;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// The rolling sequence of optimal actions over the planning horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlState {
    actions: Vec<Vec<f64>>,
    action_dim: usize,
}

impl ControlState {
    /// All-zero sequence of length `horizon`, the episode-start state.
    pub fn zeros(horizon: usize, action_dim: usize) -> Self {
        assert!(horizon >= 1);
        Self { actions: vec![vec![0.0; action_dim]; horizon], action_dim }
    }

    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[Vec<f64>] {
        &self.actions
    }
}

/// Outcome of simulating one perturbed action sequence.
#[derive(Debug, Clone)]
pub struct RolloutResult {
    /// Trajectory cost: terminal cost plus instant costs, `+inf` when the
    /// simulation produced a non-finite state.
    pub cost: f64,
    /// Unclamped perturbations, horizon x action-dim.
    pub perturbations: Vec<Vec<f64>>,
    /// The control penalty `sum_i a_i* . v_i` over the planned actions.
    pub control_penalty: f64,
}

/// Simulates one perturbed rollout from `s0` under the believed `theta`.
pub fn rollout(
    env: &dyn Environment,
    s0: &[f64],
    control: &ControlState,
    theta: &[f64],
    sigma_eps: f64,
    rng: &mut impl Rng,
) -> RolloutResult {
    let horizon = control.horizon();
    let limit = env.action_limit();
    let noise = Normal::new(0.0, sigma_eps).expect("positive sigma_eps");

    let mut s = s0.to_vec();
    let mut cost = 0.0;
    let mut penalty = 0.0;
    let mut perturbations = Vec::with_capacity(horizon);
    let mut diverged = false;

    for (i, a_star) in control.actions.iter().enumerate() {
        let eps: Vec<f64> = (0..control.action_dim).map(|_| noise.sample(rng)).collect();
        let v: Vec<f64> = a_star
            .iter()
            .zip(&eps)
            .map(|(a, e)| (a + e).clamp(-limit, limit))
            .collect();
        penalty += a_star.iter().zip(&v).map(|(a, vi)| a * vi).sum::<f64>();
        perturbations.push(eps);
        if !diverged {
            s = env.step(&s, &v, theta);
            if s.iter().any(|x| !x.is_finite()) {
                diverged = true;
            } else if i + 1 < horizon {
                cost += env.instant_cost(&s, theta);
            } else {
                cost += env.terminal_cost(&s, theta);
            }
        }
    }

    RolloutResult {
        cost: if diverged { f64::INFINITY } else { cost },
        perturbations,
        control_penalty: penalty,
    }
}

/// Normalised softmin weights over rollout costs.
///
/// The exponent argument of rollout `j` is
/// `C_j + (lambda / sigma_eps^2) * penalty_j`; weights are proportional to
/// `exp(-(arg_j - rho) / lambda)` with `rho` the minimum argument. The shift
/// is absorbed by the normalisation constant and prevents underflow.
pub fn compute_weights(results: &[RolloutResult], lambda: f64, sigma_eps: f64) -> Vec<f64> {
    assert!(!results.is_empty());
    assert!(lambda > 0.0);
    let args: Vec<f64> = results
        .iter()
        .map(|r| r.cost + lambda / (sigma_eps * sigma_eps) * r.control_penalty)
        .collect();
    let rho = args.iter().copied().fold(f64::INFINITY, f64::min);
    if !rho.is_finite() {
        log::warn!("all {} rollouts diverged; falling back to uniform weights", results.len());
        return vec![1.0 / results.len() as f64; results.len()];
    }
    let unnorm: Vec<f64> = args.iter().map(|a| (-(a - rho) / lambda).exp()).collect();
    let eta: f64 = unnorm.iter().sum();
    unnorm.iter().map(|w| w / eta).collect()
}

/// Applies the weighted perturbation update and clamps to actuator limits.
pub fn update_actions(
    control: &ControlState,
    results: &[RolloutResult],
    weights: &[f64],
    action_limit: f64,
) -> ControlState {
    assert_eq!(results.len(), weights.len());
    let mut actions = control.actions.clone();
    for (i, a) in actions.iter_mut().enumerate() {
        for (k, ak) in a.iter_mut().enumerate() {
            let delta: f64 = results
                .iter()
                .zip(weights)
                .map(|(r, w)| w * r.perturbations[i][k])
                .sum();
            *ak = (*ak + delta).clamp(-action_limit, action_limit);
        }
    }
    ControlState { actions, action_dim: control.action_dim }
}

/// Where the believed dynamics parameters for the rollouts come from.
#[derive(Debug, Clone, Copy)]
pub enum ThetaMode<'a> {
    /// One draw shared by all rollouts of this control step.
    Shared(&'a [f64]),
    /// A fresh draw per rollout.
    PerRollout(&'a ModelDistParams),
}

/// One receding-horizon control step: `m` rollouts, weighting, update.
///
/// Returns the first optimal action and the sequence shifted left by one
/// with a zero action in the last slot.
pub fn mpc_step(
    env: &dyn Environment,
    s: &[f64],
    control: &ControlState,
    theta: ThetaMode,
    phi: &ControllerConfig,
    m: usize,
    stream: RngStream,
) -> (Vec<f64>, ControlState) {
    assert!(m >= 1);
    let results: Vec<RolloutResult> = (0..m)
        .map(|j| {
            let mut rng = stream.child(j as u64).rng();
            let theta_j = match theta {
                ThetaMode::Shared(t) => t.to_vec(),
                ThetaMode::PerRollout(psi) => sample_model_params(psi, &mut rng),
            };
            rollout(env, s, control, &theta_j, phi.sigma_eps, &mut rng)
        })
        .collect();
    let weights = compute_weights(&results, phi.lambda, phi.sigma_eps);
    let updated = update_actions(control, &results, &weights, env.action_limit());

    let a0 = updated.actions[0].clone();
    let mut shifted = updated.actions[1..].to_vec();
    shifted.push(vec![0.0; control.action_dim]);
    (a0, ControlState { actions: shifted, action_dim: control.action_dim })
}
