//! Black-box optimisers behind one suggest/observe interface.
//!
//! All suggesters work in the unit box and consume exactly one objective
//! evaluation per outer iteration, so reward curves are evaluation-matched
//! across methods.

mod acquisition;
mod bore;
mod cmaes;
mod gp;
mod tpe;

pub use acquisition::maximize_acquisition;
pub use bore::BoreOptimizer;
pub use cmaes::CmaEsOptimizer;
pub use gp::{ei_closed_form, gp_ei, gp_ucb, log_marginal_likelihood, GpAcquisition, GpBoOptimizer, GpModel};
pub use tpe::TpeOptimizer;

use crate::classifiers::ClassifierKind;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::Dataset;
use rand::Rng;

/// One black-box suggester. `suggest` returns a unit-box point; `observe`
/// feeds back the evaluation so stateful methods can update.
pub trait Optimizer: Send {
    fn name(&self) -> &str;
    fn suggest(&mut self, data: &Dataset, stream: RngStream) -> Vec<f64>;
    fn observe(&mut self, x: &[f64], g: f64);
    /// Hints where to center the initial search distribution; a no-op for
    /// methods without one.
    fn set_initial_mean(&mut self, _x: &[f64]) {}
}

/// Linear annealing of the quantile fraction from `gamma_initial` down to
/// `gamma_final` over `n` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSchedule {
    pub gamma_initial: f64,
    pub gamma_final: f64,
    pub n: usize,
}

impl GammaSchedule {
    pub fn new(gamma_initial: f64, gamma_final: f64, n: usize) -> Result<Self> {
        if !(gamma_final > 0.0 && gamma_final <= gamma_initial && gamma_initial < 1.0) {
            return Err(Error::domain(format!(
                "gamma schedule requires 0 < gamma_final <= gamma_initial < 1, got {gamma_initial}, {gamma_final}"
            )));
        }
        if n < 2 {
            return Err(Error::domain("gamma schedule requires n >= 2"));
        }
        Ok(Self { gamma_initial, gamma_final, n })
    }

    /// `gamma_t = gamma_1 - (t-1)/(n-1) * (gamma_1 - gamma_n)` for `1 <= t <= n`.
    pub fn gamma_at(&self, t: usize) -> Result<f64> {
        if t < 1 || t > self.n {
            return Err(Error::domain(format!("iteration {t} outside schedule 1..={}", self.n)));
        }
        if t == self.n {
            // exact endpoint, no floating-point residue
            return Ok(self.gamma_final);
        }
        let frac = (t - 1) as f64 / (self.n - 1) as f64;
        Ok(self.gamma_initial - frac * (self.gamma_initial - self.gamma_final))
    }
}

/// Uniform-random suggestion, the budget-matched control baseline.
#[derive(Debug, Clone)]
pub struct RandomSearch {
    dim: usize,
}

impl RandomSearch {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl Optimizer for RandomSearch {
    fn name(&self) -> &str {
        "random"
    }

    fn suggest(&mut self, _data: &Dataset, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..self.dim).map(|_| rng.random::<f64>()).collect()
    }

    fn observe(&mut self, _x: &[f64], _g: f64) {}
}

/// Builds the optimiser selected by its config name.
pub fn make_optimizer(
    name: &str,
    dim: usize,
    schedule: GammaSchedule,
    cmaes_sigma0: f64,
) -> Result<Box<dyn Optimizer>> {
    match name {
        "bore-rf" => Ok(Box::new(BoreOptimizer::new(
            ClassifierKind::RandomForest,
            schedule,
            dim,
            "bore-rf",
        ))),
        "bore-mlp" => {
            Ok(Box::new(BoreOptimizer::new(ClassifierKind::Mlp, schedule, dim, "bore-mlp")))
        }
        "bo-ucb" => Ok(Box::new(GpBoOptimizer::new(GpAcquisition::Ucb { delta: 3.0 }, dim, "bo-ucb"))),
        "bo-ei" => Ok(Box::new(GpBoOptimizer::new(GpAcquisition::Ei, dim, "bo-ei"))),
        "tpe" => Ok(Box::new(TpeOptimizer::new(dim, 0.5))),
        "cmaes" => Ok(Box::new(CmaEsOptimizer::new(dim, 2, cmaes_sigma0))),
        "random" => Ok(Box::new(RandomSearch::new(dim))),
        other => Err(Error::InvalidConfig(format!("unknown optimizer '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_schedule_endpoints() {
        let s = GammaSchedule::new(0.5, 0.05, 50).unwrap();
        assert_eq!(s.gamma_at(1).unwrap(), 0.5);
        assert_eq!(s.gamma_at(50).unwrap(), 0.05);
    }

    #[test]
    fn gamma_schedule_midpoint_bracket() {
        let s = GammaSchedule::new(0.5, 0.05, 50).unwrap();
        let mid = 0.5 * (0.5 + 0.05);
        assert!(s.gamma_at(25).unwrap() > mid);
        assert!(s.gamma_at(26).unwrap() < mid);
    }

    #[test]
    fn gamma_schedule_monotone_decreasing() {
        let s = GammaSchedule::new(0.5, 0.05, 50).unwrap();
        for t in 1..50 {
            assert!(s.gamma_at(t).unwrap() > s.gamma_at(t + 1).unwrap());
        }
    }

    #[test]
    fn gamma_schedule_rejects_out_of_range() {
        let s = GammaSchedule::new(0.5, 0.05, 50).unwrap();
        assert!(s.gamma_at(0).is_err());
        assert!(s.gamma_at(51).is_err());
        assert!(GammaSchedule::new(0.05, 0.5, 50).is_err());
    }

    #[test]
    fn random_search_in_box_and_deterministic() {
        let mut opt = RandomSearch::new(3);
        let data = Dataset::new();
        let a = opt.suggest(&data, RngStream::new(1, 0));
        let b = opt.suggest(&data, RngStream::new(1, 0));
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn random_search_marginals_are_uniform() {
        // chi-square goodness of fit at 5%, 10 bins, 10^4 draws
        let mut opt = RandomSearch::new(1);
        let data = Dataset::new();
        let root = RngStream::new(123, 0);
        let mut counts = [0usize; 10];
        let n = 10_000;
        for i in 0..n {
            let x = opt.suggest(&data, root.child(i as u64));
            counts[((x[0] * 10.0) as usize).min(9)] += 1;
        }
        let expected = n as f64 / 10.0;
        let chi2: f64 =
            counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // critical value for 9 dof at 5%
        assert!(chi2 < 16.92, "chi2 = {chi2}");
    }

    #[test]
    fn factory_knows_all_names() {
        let schedule = GammaSchedule::new(0.5, 0.05, 10).unwrap();
        for name in ["bore-rf", "bore-mlp", "bo-ucb", "bo-ei", "tpe", "cmaes", "random"] {
            assert!(make_optimizer(name, 2, schedule, 0.3).is_ok(), "{name}");
        }
        assert!(make_optimizer("nope", 2, schedule, 0.3).is_err());
    }
}
