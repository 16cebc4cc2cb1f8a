//! Covariance matrix adaptation evolution strategy.
//!
//! Standard rank-mu update with cumulative step-size control. The
//! generational ask/tell cycle is buffered behind the one-point
//! suggest/observe interface: a full population is sampled when the
//! candidate buffer empties, and the distribution update runs once the
//! matching number of observations has arrived.

use super::Optimizer;
use crate::rng::RngStream;
use crate::space::Dataset;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use std::collections::VecDeque;

/// Resampling attempts before a candidate is projected onto the box.
const MAX_RESAMPLES: usize = 10;
/// Condition number at which the covariance is declared degenerate.
const MAX_CONDITION: f64 = 1e14;

struct CmaState {
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    /// Eigenvectors and sqrt-eigenvalues of `cov`, refreshed each update.
    eigvecs: DMatrix<f64>,
    sqrt_eigvals: DVector<f64>,
    generation: usize,
}

struct CmaWeights {
    weights: Vec<f64>,
    mu: usize,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
}

impl CmaWeights {
    fn new(dim: usize, popsize: usize) -> Self {
        let d = dim as f64;
        let mu = popsize / 2;
        let mu = mu.max(1);
        let mut weights: Vec<f64> = (0..mu)
            .map(|i| ((popsize as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0);
        let d_sigma =
            1.0 + 2.0 * (((mu_eff - 1.0) / (d + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
        let c_1 = 2.0 / ((d + 1.3).powi(2) + mu_eff);
        let c_mu = (2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((d + 2.0).powi(2) + mu_eff))
            .min(1.0 - c_1);
        let chi_n = d.sqrt() * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
        Self { weights, mu, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n }
    }
}

pub struct CmaEsOptimizer {
    dim: usize,
    popsize: usize,
    sigma0: f64,
    weights: CmaWeights,
    state: Option<CmaState>,
    initial_mean: Option<Vec<f64>>,
    /// Candidates sampled for the current generation, pending suggestion.
    pending: VecDeque<Vec<f64>>,
    /// Observations collected for the current generation.
    observed: Vec<(Vec<f64>, f64)>,
}

impl CmaEsOptimizer {
    pub fn new(dim: usize, popsize: usize, sigma0: f64) -> Self {
        assert!(popsize >= 2, "population needs at least 2 candidates");
        Self {
            dim,
            popsize,
            sigma0,
            weights: CmaWeights::new(dim, popsize),
            state: None,
            initial_mean: None,
            pending: VecDeque::new(),
            observed: Vec::new(),
        }
    }

    fn init_state(&self) -> CmaState {
        let mean = match &self.initial_mean {
            Some(m) => DVector::from_column_slice(m),
            None => DVector::from_element(self.dim, 0.5),
        };
        CmaState {
            mean,
            sigma: self.sigma0,
            cov: DMatrix::identity(self.dim, self.dim),
            p_sigma: DVector::zeros(self.dim),
            p_c: DVector::zeros(self.dim),
            eigvecs: DMatrix::identity(self.dim, self.dim),
            sqrt_eigvals: DVector::from_element(self.dim, 1.0),
            generation: 0,
        }
    }

    fn sample_generation(&mut self, stream: RngStream) {
        if self.state.is_none() {
            self.state = Some(self.init_state());
        }
        let state = self.state.as_ref().expect("state was just initialised");
        let mut rng = stream.rng();
        let in_box = |x: &DVector<f64>| x.iter().all(|&v| (0.0..=1.0).contains(&v));

        for _ in 0..self.popsize {
            let mut candidate = None;
            for _ in 0..MAX_RESAMPLES {
                let z = DVector::from_iterator(
                    self.dim,
                    (0..self.dim).map(|_| StandardNormal.sample(&mut rng)),
                );
                let x = &state.mean
                    + state.sigma * &state.eigvecs * state.sqrt_eigvals.component_mul(&z);
                if in_box(&x) {
                    candidate = Some(x);
                    break;
                }
            }
            let x = candidate.unwrap_or_else(|| {
                let z = DVector::from_iterator(
                    self.dim,
                    (0..self.dim).map(|_| StandardNormal.sample(&mut rng)),
                );
                let raw = &state.mean
                    + state.sigma * &state.eigvecs * state.sqrt_eigvals.component_mul(&z);
                raw.map(|v| v.clamp(0.0, 1.0))
            });
            self.pending.push_back(x.iter().copied().collect());
        }
    }

    fn update(&mut self) {
        let w = &self.weights;
        let state = self.state.as_mut().expect("update follows sampling");
        state.generation += 1;

        // sort descending by objective (we maximise)
        let mut gen = std::mem::take(&mut self.observed);
        gen.sort_by(|a, b| b.1.total_cmp(&a.1));

        let old_mean = state.mean.clone();
        let mut new_mean = DVector::zeros(self.dim);
        for (wi, (x, _)) in w.weights.iter().zip(gen.iter().take(w.mu)) {
            new_mean += *wi * DVector::from_column_slice(x);
        }

        let delta = (&new_mean - &old_mean) / state.sigma;
        // C^{-1/2} delta via the cached eigendecomposition
        let inv_sqrt = DMatrix::from_diagonal(&state.sqrt_eigvals.map(|d| 1.0 / d));
        let c_inv_sqrt_delta =
            &state.eigvecs * inv_sqrt * state.eigvecs.transpose() * &delta;

        state.p_sigma = (1.0 - w.c_sigma) * &state.p_sigma
            + (w.c_sigma * (2.0 - w.c_sigma) * w.mu_eff).sqrt() * c_inv_sqrt_delta;

        let ps_norm = state.p_sigma.norm();
        let expected = (1.0 - (1.0 - w.c_sigma).powi(2 * state.generation as i32)).sqrt();
        let h_sigma = ps_norm / expected
            < (1.4 + 2.0 / (self.dim as f64 + 1.0)) * w.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };

        state.p_c = (1.0 - w.c_c) * &state.p_c
            + h * (w.c_c * (2.0 - w.c_c) * w.mu_eff).sqrt() * &delta;

        let mut rank_mu = DMatrix::zeros(self.dim, self.dim);
        for (wi, (x, _)) in w.weights.iter().zip(gen.iter().take(w.mu)) {
            let y = (DVector::from_column_slice(x) - &old_mean) / state.sigma;
            rank_mu += *wi * &y * y.transpose();
        }
        let rank_one = &state.p_c * state.p_c.transpose()
            + (1.0 - h) * w.c_c * (2.0 - w.c_c) * &state.cov;
        state.cov = (1.0 - w.c_1 - w.c_mu) * &state.cov + w.c_1 * rank_one + w.c_mu * rank_mu;

        state.sigma *= ((w.c_sigma / w.d_sigma) * (ps_norm / w.chi_n - 1.0)).exp();
        state.mean = new_mean;

        // refresh the eigendecomposition, resetting on degeneration
        let eig = SymmetricEigen::new(state.cov.clone());
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        let healthy = state.sigma.is_finite()
            && state.sigma > 0.0
            && min > 0.0
            && max.is_finite()
            && max / min < MAX_CONDITION;
        if healthy {
            state.sqrt_eigvals = eig.eigenvalues.map(f64::sqrt);
            state.eigvecs = eig.eigenvectors;
        } else {
            log::warn!(
                "cmaes: degenerate covariance at generation {} (sigma {}, eig [{min}, {max}]); resetting",
                state.generation,
                state.sigma
            );
            state.cov = DMatrix::identity(self.dim, self.dim);
            state.eigvecs = DMatrix::identity(self.dim, self.dim);
            state.sqrt_eigvals = DVector::from_element(self.dim, 1.0);
            state.p_sigma = DVector::zeros(self.dim);
            state.p_c = DVector::zeros(self.dim);
            if !state.sigma.is_finite() || state.sigma <= 0.0 {
                state.sigma = self.sigma0;
            }
        }
    }
}

impl Optimizer for CmaEsOptimizer {
    fn name(&self) -> &str {
        "cmaes"
    }

    fn suggest(&mut self, _data: &Dataset, stream: RngStream) -> Vec<f64> {
        if self.pending.is_empty() {
            self.sample_generation(stream);
        }
        self.pending.pop_front().expect("generation was just sampled")
    }

    fn observe(&mut self, x: &[f64], g: f64) {
        self.observed.push((x.to_vec(), g));
        if self.observed.len() >= self.popsize {
            self.update();
        }
    }

    /// Overrides the unit-box center as the initial distribution mean.
    /// Ignored once the first generation has been sampled.
    fn set_initial_mean(&mut self, x: &[f64]) {
        if self.state.is_none() {
            self.initial_mean = Some(x.to_vec());
        }
    }
}
