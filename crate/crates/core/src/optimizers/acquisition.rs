//! Global maximisation of an acquisition surface over the unit box.

use crate::rng::RngStream;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Number of uniform probe candidates.
pub const N_PROBES: usize = 1024;
/// Local refinement iterations.
pub const N_REFINE: usize = 100;

/// Maximises `score` over the unit box: 1024 uniform candidates plus the
/// supplied incumbents, then a local random search around the best with a
/// geometrically shrinking step. Ties keep the earliest candidate.
pub fn maximize_acquisition(
    score: impl Fn(&[f64]) -> f64,
    dim: usize,
    incumbents: &[Vec<f64>],
    stream: RngStream,
) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_s = f64::NEG_INFINITY;

    let consider = |x: Vec<f64>, best_x: &mut Option<Vec<f64>>, best_s: &mut f64| {
        let s = score(&x);
        if s > *best_s || best_x.is_none() {
            *best_s = s;
            *best_x = Some(x);
        }
    };

    for _ in 0..N_PROBES {
        let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        consider(x, &mut best_x, &mut best_s);
    }
    for inc in incumbents {
        consider(inc.clone(), &mut best_x, &mut best_s);
    }

    let mut best_x = best_x.expect("at least the probes were considered");
    for i in 0..N_REFINE {
        // step shrinks geometrically from 0.1 to 0.001
        let sigma = 0.1 * (0.01_f64).powf(i as f64 / (N_REFINE - 1) as f64);
        let noise = Normal::new(0.0, sigma).expect("positive sigma");
        let candidate: Vec<f64> =
            best_x.iter().map(|&v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0)).collect();
        let s = score(&candidate);
        if s > best_s {
            best_s = s;
            best_x = candidate;
        }
    }
    best_x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_score_returns_in_box_point() {
        let x = maximize_acquisition(|_| 1.0, 3, &[], RngStream::new(1, 0));
        assert_eq!(x.len(), 3);
        assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn finds_known_quadratic_optimum() {
        let c = [0.3, 0.7];
        let score =
            |x: &[f64]| -x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let x = maximize_acquisition(score, 2, &[], RngStream::new(2, 0));
        for (a, b) in x.iter().zip(&c) {
            assert!((a - b).abs() < 0.05, "{x:?}");
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let score = |x: &[f64]| (x[0] * 7.3).sin() + x[1];
        let a = maximize_acquisition(score, 2, &[], RngStream::new(3, 0));
        let b = maximize_acquisition(score, 2, &[], RngStream::new(3, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn incumbent_wins_when_it_scores_best() {
        // score spikes only at the incumbent
        let inc = vec![0.123456, 0.654321];
        let target = inc.clone();
        let score = move |x: &[f64]| {
            if x == target.as_slice() {
                1.0
            } else {
                0.0
            }
        };
        let x = maximize_acquisition(score, 2, &[inc.clone()], RngStream::new(4, 0));
        assert_eq!(x, inc);
    }
}
