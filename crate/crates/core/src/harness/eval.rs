//! Objective evaluation and the shared worst-start scan.

use super::config::ExperimentConfig;
use crate::envs::run_episode;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::EvalRecord;

/// Runs `episodes_per_eval` episodes at the unit-box point `x` and returns
/// the observation record; `g` is the mean episode return.
pub fn evaluate_point(cfg: &ExperimentConfig, x: &[f64], stream: RngStream) -> Result<EvalRecord> {
    let (psi, phi) = cfg.decode(x)?;
    let env = cfg.make_env()?;
    let opts = cfg.episode_options();
    let returns: Vec<f64> = (0..cfg.raw.experiment.episodes_per_eval)
        .map(|e| run_episode(env.as_ref(), &opts, &phi, &psi, stream.child(e as u64)).total_reward)
        .collect();
    Ok(EvalRecord::new(x.to_vec(), returns))
}

/// `(1/t') * sum_{i=1}^{t'} g_i`.
pub fn avg_cum_reward(g_history: &[f64], t_prime: usize) -> Result<f64> {
    if t_prime < 1 || t_prime > g_history.len() {
        return Err(Error::domain(format!(
            "t' = {t_prime} outside 1..={}",
            g_history.len()
        )));
    }
    Ok(g_history[..t_prime].iter().sum::<f64>() / t_prime as f64)
}

/// Number of points in the worst-start scan.
pub const WORST_SCAN_POINTS: usize = 64;

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Scans a 64-point Halton sequence over the box, evaluating each point with
/// the full episode budget, and returns the argmin-g record — the shared
/// "worst start" all methods are seeded with.
pub fn find_worst_start(cfg: &ExperimentConfig, stream: RngStream) -> Result<EvalRecord> {
    let dim = cfg.space.dim();
    assert!(dim <= PRIMES.len(), "worst-start scan supports up to {} dimensions", PRIMES.len());
    let mut worst: Option<EvalRecord> = None;
    for k in 0..WORST_SCAN_POINTS {
        // index offset 1: halton(0, b) is the origin corner
        let x: Vec<f64> = (0..dim).map(|d| halton(k + 1, PRIMES[d])).collect();
        let rec = evaluate_point(cfg, &x, stream.child(k as u64))?;
        if worst.as_ref().is_none_or(|w| rec.g < w.g) {
            worst = Some(rec);
        }
    }
    Ok(worst.expect("scan is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::pendulum_preset;

    #[test]
    fn avg_cum_reward_examples() {
        assert_eq!(avg_cum_reward(&[-10.0], 1).unwrap(), -10.0);
        assert_eq!(avg_cum_reward(&[0.0, -2.0], 2).unwrap(), -1.0);
        let constant = [-3.0; 5];
        for t in 1..=5 {
            assert_eq!(avg_cum_reward(&constant, t).unwrap(), -3.0);
        }
        assert!(avg_cum_reward(&[1.0], 0).is_err());
        assert!(avg_cum_reward(&[1.0], 2).is_err());
    }

    #[test]
    fn halton_first_points() {
        // base 2: 1/2, 1/4, 3/4; base 3: 1/3, 2/3, 1/9
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert_eq!(halton(1, 3), 1.0 / 3.0);
        assert_eq!(halton(2, 3), 2.0 / 3.0);
    }

    #[test]
    fn evaluate_point_is_deterministic_and_single_episode_mean() {
        let cfg = pendulum_preset();
        let x = vec![0.45, 0.05, 0.01, 0.4];
        let a = evaluate_point(&cfg, &x, RngStream::new(3, 1)).unwrap();
        let b = evaluate_point(&cfg, &x, RngStream::new(3, 1)).unwrap();
        assert_eq!(a.g, b.g);
        // pendulum preset has episodes_per_eval = 1
        assert_eq!(a.per_episode_returns.len(), 1);
        assert_eq!(a.g, a.per_episode_returns[0]);
    }

    #[test]
    fn worst_start_below_center() {
        let mut cfg = pendulum_preset();
        // shrink the budget so the scan stays fast
        cfg.raw.experiment.steps_per_episode = 60;
        let stream = RngStream::new(0, 77);
        let worst = find_worst_start(&cfg, stream.child(0)).unwrap();
        assert!(cfg.space.contains_unit(&worst.x));
        let center = evaluate_point(&cfg, &[0.5; 4], stream.child(1)).unwrap();
        assert!(worst.g < center.g, "worst {} vs center {}", worst.g, center.g);
        let again = find_worst_start(&cfg, stream.child(0)).unwrap();
        assert_eq!(worst.x, again.x);
        assert_eq!(worst.g, again.g);
    }
}
