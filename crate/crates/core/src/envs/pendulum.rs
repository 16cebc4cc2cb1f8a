//! Pendulum swing-up with uncertain rod length.
//!
//! The angle is measured from upright; the episode starts hanging at
//! `(pi, 0)`. Dynamics follow the standard rigid-rod formulation with a
//! semi-implicit Euler step.

use super::Environment;

pub const DT: f64 = 0.05;
pub const GRAVITY: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const MAX_SPEED: f64 = 8.0;
pub const MAX_TORQUE: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct Pendulum {
    /// True rod length in metres.
    pub true_length: f64,
}

impl Pendulum {
    pub fn new(true_length: f64) -> Self {
        Self { true_length }
    }
}

/// Wraps an angle to `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * std::f64::consts::PI);
    if r > std::f64::consts::PI {
        r - 2.0 * std::f64::consts::PI
    } else {
        r
    }
}

fn quadratic_cost(s: &[f64]) -> f64 {
    s[0] * s[0] + 0.1 * s[1] * s[1]
}

impl Environment for Pendulum {
    fn name(&self) -> &'static str {
        "pendulum"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn action_limit(&self) -> f64 {
        MAX_TORQUE
    }

    fn theta_dim(&self) -> usize {
        1
    }

    fn true_theta(&self) -> Vec<f64> {
        vec![self.true_length]
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![std::f64::consts::PI, 0.0]
    }

    fn step(&self, s: &[f64], a: &[f64], theta: &[f64]) -> Vec<f64> {
        let l = theta[0];
        let u = a[0].clamp(-MAX_TORQUE, MAX_TORQUE);
        let accel = 3.0 * GRAVITY / (2.0 * l) * s[0].sin() + 3.0 / (MASS * l * l) * u;
        let speed = (s[1] + accel * DT).clamp(-MAX_SPEED, MAX_SPEED);
        vec![wrap_angle(s[0] + speed * DT), speed]
    }

    fn instant_cost(&self, s: &[f64], _theta: &[f64]) -> f64 {
        quadratic_cost(s)
    }

    fn reward(&self, s: &[f64], a: &[f64]) -> f64 {
        let u = a[0].clamp(-MAX_TORQUE, MAX_TORQUE);
        -(quadratic_cost(s) + 0.001 * u * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn upright_equilibrium_persists() {
        let env = Pendulum::new(1.0);
        let s = env.step(&[0.0, 0.0], &[0.0], &[1.3]);
        assert_eq!(s, vec![0.0, 0.0]);
    }

    #[test]
    fn hanging_equilibrium_persists() {
        let env = Pendulum::new(1.0);
        let s = env.step(&[PI, 0.0], &[0.0], &[1.0]);
        assert_relative_eq!(s[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(s[0].abs(), PI, epsilon = 1e-12);
    }

    #[test]
    fn horizontal_free_fall_step() {
        let env = Pendulum::new(1.0);
        let s = env.step(&[PI / 2.0, 0.0], &[0.0], &[1.0]);
        assert_relative_eq!(s[1], 0.75, epsilon = 1e-12);
        assert_relative_eq!(s[0], PI / 2.0 + 0.0375, epsilon = 1e-12);
    }

    #[test]
    fn reward_examples() {
        let env = Pendulum::new(1.0);
        assert_eq!(env.reward(&[0.0, 0.0], &[0.0]), 0.0);
        assert_relative_eq!(env.reward(&[PI, 0.0], &[0.0]), -PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn reward_nonpositive_everywhere() {
        let env = Pendulum::new(1.0);
        for i in 0..100 {
            let s = [
                -PI + 2.0 * PI * (i as f64) / 99.0,
                -8.0 + 16.0 * ((i * 7) % 100) as f64 / 99.0,
            ];
            let a = [-2.0 + 4.0 * ((i * 13) % 100) as f64 / 99.0];
            assert!(env.reward(&s, &a) <= 0.0);
        }
    }

    #[test]
    fn angle_always_wrapped() {
        let env = Pendulum::new(0.7);
        let mut s = vec![3.0, 5.0];
        for _ in 0..500 {
            s = env.step(&s, &[1.5], &[0.7]);
            assert!(s[0] > -PI && s[0] <= PI);
            assert!(s[1].abs() <= MAX_SPEED);
        }
    }

    // With no torque and the speed clamp inactive, total mechanical energy
    // E = (1/6) m l^2 w^2 + (m g l / 2) cos(theta_p) drifts only by
    // integrator error, O(dt) per step.
    #[test]
    fn energy_drift_is_bounded() {
        let env = Pendulum::new(1.0);
        let energy = |s: &[f64]| {
            MASS * 1.0 * s[1] * s[1] / 6.0 + MASS * GRAVITY * 0.5 * s[0].cos()
        };
        let mut s = vec![PI / 2.0, 0.0];
        let e0 = energy(&s);
        for _ in 0..100 {
            s = env.step(&s, &[0.0], &[1.0]);
            assert!(s[1].abs() < MAX_SPEED, "clamp must stay inactive for this check");
            // semi-implicit Euler on this system oscillates around the true
            // energy; allow a few multiples of dt * |dE/dt|_max ~ dt * 40
            assert!((energy(&s) - e0).abs() < 4.0, "energy drifted: {} vs {}", energy(&s), e0);
        }
    }
}
