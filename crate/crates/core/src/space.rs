//! Search spaces and the joint search point.
//!
//! Search points are stored normalised to the unit box and denormalised only
//! at evaluation time; classifiers and kernels therefore see inputs with
//! comparable scales across dimensions.

use crate::error::{Error, Result};
use rand::Rng;

/// One bounded continuous dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// An axis-aligned box of named continuous dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    dims: Vec<Dim>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dim>) -> Result<Self> {
        for d in &dims {
            if !(d.lower < d.upper) || !d.lower.is_finite() || !d.upper.is_finite() {
                return Err(Error::InvalidSpace(format!(
                    "dimension '{}' requires lower < upper, got [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
        }
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].iter().any(|e| e.name == d.name) {
                return Err(Error::InvalidSpace(format!("duplicate dimension '{}'", d.name)));
            }
        }
        Ok(Self { dims })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn names(&self) -> Vec<&str> {
        self.dims.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    /// Maps a physical point into the unit box.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dims.len());
        x.iter()
            .zip(&self.dims)
            .map(|(v, d)| (v - d.lower) / (d.upper - d.lower))
            .collect()
    }

    /// Maps a unit-box point back to physical units.
    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.dims.len());
        u.iter()
            .zip(&self.dims)
            .map(|(v, d)| d.lower + v * (d.upper - d.lower))
            .collect()
    }

    /// Whether a unit-box point lies inside the box.
    pub fn contains_unit(&self, u: &[f64]) -> bool {
        u.len() == self.dims.len() && u.iter().all(|&v| (0.0..=1.0).contains(&v))
    }

    /// Uniform sample in the unit box.
    pub fn sample_unit(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.dims.len()).map(|_| rng.random::<f64>()).collect()
    }

    /// Clamps a point to the unit box.
    pub fn clamp_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}

/// MPPI controller hyper-parameters, the `phi` part of the search point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Softmin temperature, > 0.
    pub lambda: f64,
    /// Control perturbation standard deviation in action units, > 0.
    pub sigma_eps: f64,
}

impl ControllerConfig {
    pub fn new(lambda: f64, sigma_eps: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(sigma_eps > 0.0) {
            return Err(Error::domain(format!(
                "lambda and sigma_eps must be positive, got {lambda}, {sigma_eps}"
            )));
        }
        Ok(Self { lambda, sigma_eps })
    }
}

/// Per-parameter `(mu, sigma)` of the dynamics-parameter distribution, the
/// `psi` part of the search point. Entries keep the order of the underlying
/// dynamics parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDistParams {
    pub entries: Vec<(f64, f64)>,
}

impl ModelDistParams {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for &(mu, sigma) in &entries {
            if !(mu > 0.0) || !(sigma > 0.0) {
                return Err(Error::domain(format!(
                    "model distribution parameters must be positive, got mu={mu}, sigma={sigma}"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One optimiser observation: a unit-box point, its empirical expected
/// cumulative reward, and the per-episode returns it was averaged from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    /// Unit-box coordinates, concatenated `psi` then `phi` in search-space order.
    pub x: Vec<f64>,
    /// Mean of `per_episode_returns`.
    pub g: f64,
    pub per_episode_returns: Vec<f64>,
}

impl EvalRecord {
    pub fn new(x: Vec<f64>, per_episode_returns: Vec<f64>) -> Self {
        let g = per_episode_returns.iter().sum::<f64>() / per_episode_returns.len() as f64;
        Self { x, g, per_episode_returns }
    }
}

/// The growing observation history, append-only in iteration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    records: Vec<EvalRecord>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: EvalRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn g_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.g).collect()
    }

    /// Best observation so far, if any.
    pub fn incumbent(&self) -> Option<&EvalRecord> {
        self.records
            .iter()
            .max_by(|a, b| a.g.partial_cmp(&b.g).unwrap_or(std::cmp::Ordering::Equal))
    }
}
