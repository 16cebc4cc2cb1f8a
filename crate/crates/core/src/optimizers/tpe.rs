//! Tree-structured Parzen estimator baseline.
//!
//! Observations are split at a quantile threshold into a good set and the
//! rest; per-dimension Gaussian kernel density estimates `a` (good) and `b`
//! (rest) are fitted, candidates are drawn from `a`, and the one maximising
//! the ordinary density ratio `a(x)/b(x)` is suggested.

use super::Optimizer;
use crate::rng::RngStream;
use crate::space::Dataset;
use crate::stats::{assign_labels, empirical_quantile};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Candidates drawn from the good-set density per suggestion.
const N_CANDIDATES: usize = 64;
/// Bandwidth floor as a fraction of the (unit) box width.
const BANDWIDTH_FLOOR: f64 = 1e-3;

pub struct TpeOptimizer {
    dim: usize,
    gamma: f64,
}

impl TpeOptimizer {
    pub fn new(dim: usize, gamma: f64) -> Self {
        Self { dim, gamma }
    }
}

/// Per-dimension Gaussian KDE with Scott's-rule bandwidth.
struct Kde {
    /// centers[d] holds the sample values along dimension d.
    centers: Vec<Vec<f64>>,
    bandwidth: Vec<f64>,
}

impl Kde {
    fn fit(points: &[&[f64]], dim: usize) -> Self {
        let n = points.len() as f64;
        let mut centers = vec![Vec::with_capacity(points.len()); dim];
        for p in points {
            for (d, c) in centers.iter_mut().enumerate() {
                c.push(p[d]);
            }
        }
        let bandwidth = centers
            .iter()
            .map(|c| {
                let mean = c.iter().sum::<f64>() / n;
                let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                (var.sqrt() * n.powf(-0.2)).max(BANDWIDTH_FLOOR)
            })
            .collect();
        Self { centers, bandwidth }
    }

    /// Density along one dimension.
    fn density_1d(&self, d: usize, x: f64) -> f64 {
        let h = self.bandwidth[d];
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h);
        let sum: f64 = self.centers[d]
            .iter()
            .map(|&c| (-0.5 * ((x - c) / h).powi(2)).exp())
            .sum();
        norm * sum / self.centers[d].len() as f64
    }

    /// Product of per-dimension densities.
    fn density(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(d, &v)| self.density_1d(d, v)).product()
    }

    /// Draws one point from the per-dimension mixture, truncated to the box
    /// by resampling with a clamp fallback.
    fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.centers.len())
            .map(|d| {
                let noise = Normal::new(0.0, self.bandwidth[d]).expect("positive bandwidth");
                for _ in 0..16 {
                    let c = self.centers[d][rng.random_range(0..self.centers[d].len())];
                    let v = c + noise.sample(rng);
                    if (0.0..=1.0).contains(&v) {
                        return v;
                    }
                }
                let c = self.centers[d][rng.random_range(0..self.centers[d].len())];
                (c + noise.sample(rng)).clamp(0.0, 1.0)
            })
            .collect()
    }
}

impl Optimizer for TpeOptimizer {
    fn name(&self) -> &str {
        "tpe"
    }

    fn suggest(&mut self, data: &Dataset, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        let uniform =
            |rng: &mut rand_chacha::ChaCha8Rng| (0..self.dim).map(|_| rng.random::<f64>()).collect();

        if data.len() < 2 {
            return uniform(&mut rng);
        }
        let g = data.g_values();
        let Ok(tau) = empirical_quantile(&g, self.gamma) else {
            return uniform(&mut rng);
        };
        let z = assign_labels(&g, tau);
        let good: Vec<&[f64]> = data
            .records()
            .iter()
            .zip(&z)
            .filter(|(_, &zi)| zi == 1)
            .map(|(r, _)| r.x.as_slice())
            .collect();
        let bad: Vec<&[f64]> = data
            .records()
            .iter()
            .zip(&z)
            .filter(|(_, &zi)| zi == 0)
            .map(|(r, _)| r.x.as_slice())
            .collect();
        if good.is_empty() || bad.is_empty() {
            // degenerate split, e.g. all g equal
            return uniform(&mut rng);
        }

        let a = Kde::fit(&good, self.dim);
        let b = Kde::fit(&bad, self.dim);

        let mut best: Option<(Vec<f64>, f64)> = None;
        for _ in 0..N_CANDIDATES {
            let x = a.sample(&mut rng);
            let ratio = a.density(&x) / b.density(&x).max(f64::MIN_POSITIVE);
            if best.as_ref().is_none_or(|(_, r)| ratio > *r) {
                best = Some((x, ratio));
            }
        }
        best.expect("candidates were drawn").0
    }

    fn observe(&mut self, _x: &[f64], _g: f64) {}
}
