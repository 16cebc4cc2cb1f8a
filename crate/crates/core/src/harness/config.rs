//! Experiment configuration: TOML sections mapping directly onto the
//! benchmark's knobs, plus the decoding of a search point into controller
//! and model-distribution parameters.
//!
//! Dimension-name convention: `lambda` and `sigma_eps` select controller
//! hyper-parameters; `<param>_mu` / `<param>_sigma` pairs (in dynamics
//! parameter order) define the gamma distribution over that parameter.
//! Whichever controller knob is absent from the search space must be fixed
//! in `[mppi]`.

use crate::envs::{Environment, EpisodeOptions, Pendulum, Planar};
use crate::error::{Error, Result};
use crate::optimizers::GammaSchedule;
use crate::space::{ControllerConfig, Dim, ModelDistParams, SearchSpace};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub env: String,
    /// Overrides the environment's default true dynamics parameters.
    pub true_theta: Option<Vec<f64>>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_episodes")]
    pub episodes_per_eval: usize,
    #[serde(default = "default_steps")]
    pub steps_per_episode: usize,
    pub seeds: Vec<u64>,
    pub optimizers: Vec<String>,
    #[serde(default)]
    pub start_at_worst: bool,
    #[serde(default)]
    pub theta_per_rollout: bool,
}

fn default_iterations() -> usize {
    50
}
fn default_episodes() -> usize {
    10
}
fn default_steps() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MppiSection {
    pub horizon: usize,
    pub rollouts: usize,
    /// Fixed temperature when `lambda` is not a search dimension.
    pub lambda: Option<f64>,
    /// Fixed perturbation std when `sigma_eps` is not a search dimension.
    pub sigma_eps: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSection {
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmaesSection {
    pub sigma0: f64,
}

impl Default for CmaesSection {
    fn default() -> Self {
        Self { sigma0: 0.3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: ExperimentSection,
    pub mppi: MppiSection,
    pub gamma: GammaSection,
    #[serde(default)]
    pub cmaes: CmaesSection,
    pub search: Vec<SearchDim>,
}

/// A validated experiment configuration.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub space: SearchSpace,
    /// Index of `lambda` in the space, if searched.
    lambda_idx: Option<usize>,
    /// Index of `sigma_eps` in the space, if searched.
    sigma_eps_idx: Option<usize>,
    /// `(mu_idx, sigma_idx)` per dynamics parameter, in theta order.
    psi_idx: Vec<(usize, usize)>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let exp = &raw.experiment;
        if exp.iterations < 1 || exp.episodes_per_eval < 1 {
            return Err(Error::InvalidConfig("iteration and episode counts must be >= 1".into()));
        }
        if exp.seeds.is_empty() || exp.optimizers.is_empty() {
            return Err(Error::InvalidConfig("need at least one seed and one optimizer".into()));
        }
        if raw.mppi.horizon < 1 || raw.mppi.rollouts < 1 {
            return Err(Error::InvalidConfig("mppi horizon and rollouts must be >= 1".into()));
        }
        GammaSchedule::new(raw.gamma.initial, raw.gamma.final_, exp.iterations.max(2))?;

        let dims: Vec<Dim> = raw
            .search
            .iter()
            .map(|d| Dim { name: d.name.clone(), lower: d.lower, upper: d.upper })
            .collect();
        let space = SearchSpace::new(dims)?;

        let lambda_idx = space.index_of("lambda");
        let sigma_eps_idx = space.index_of("sigma_eps");
        if lambda_idx.is_none() && raw.mppi.lambda.is_none() {
            return Err(Error::InvalidConfig(
                "lambda must be searched or fixed in [mppi]".into(),
            ));
        }
        if sigma_eps_idx.is_none() && raw.mppi.sigma_eps.is_none() {
            return Err(Error::InvalidConfig(
                "sigma_eps must be searched or fixed in [mppi]".into(),
            ));
        }

        // mu/sigma pairs in order of first appearance
        let mut psi_idx = Vec::new();
        for (i, d) in space.dims().iter().enumerate() {
            if let Some(param) = d.name.strip_suffix("_mu") {
                let sigma_name = format!("{param}_sigma");
                let j = space.index_of(&sigma_name).ok_or_else(|| {
                    Error::InvalidConfig(format!("dimension '{}' has no '{sigma_name}'", d.name))
                })?;
                psi_idx.push((i, j));
            }
        }
        for d in space.dims() {
            if d.name.ends_with("_sigma") {
                let param = d.name.trim_end_matches("_sigma");
                if space.index_of(&format!("{param}_mu")).is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "dimension '{}' has no '{param}_mu'",
                        d.name
                    )));
                }
            }
        }

        let cfg = Self { raw, space, lambda_idx, sigma_eps_idx, psi_idx };
        let env = cfg.make_env()?;
        if cfg.psi_idx.len() != env.theta_dim() {
            return Err(Error::InvalidConfig(format!(
                "search space defines {} mu/sigma pairs but '{}' has {} dynamics parameters",
                cfg.psi_idx.len(),
                env.name(),
                env.theta_dim()
            )));
        }
        Ok(cfg)
    }

    pub fn make_env(&self) -> Result<Box<dyn Environment>> {
        let theta = self.raw.experiment.true_theta.as_deref();
        match self.raw.experiment.env.as_str() {
            "pendulum" => {
                let l = match theta {
                    Some([l]) => *l,
                    None => 1.0,
                    Some(t) => {
                        return Err(Error::InvalidConfig(format!(
                            "pendulum true_theta needs 1 entry, got {}",
                            t.len()
                        )))
                    }
                };
                Ok(Box::new(Pendulum::new(l)))
            }
            "planar" => {
                let mut env = Planar::default();
                match theta {
                    None => {}
                    Some([wx, wy]) => env.true_half_extents = [*wx, *wy],
                    Some(t) => {
                        return Err(Error::InvalidConfig(format!(
                            "planar true_theta needs 2 entries, got {}",
                            t.len()
                        )))
                    }
                }
                Ok(Box::new(env))
            }
            other => Err(Error::InvalidConfig(format!("unknown environment '{other}'"))),
        }
    }

    pub fn episode_options(&self) -> EpisodeOptions {
        EpisodeOptions {
            n_steps: self.raw.experiment.steps_per_episode,
            horizon: self.raw.mppi.horizon,
            rollouts: self.raw.mppi.rollouts,
            theta_per_rollout: self.raw.experiment.theta_per_rollout,
        }
    }

    pub fn gamma_schedule(&self) -> GammaSchedule {
        GammaSchedule::new(
            self.raw.gamma.initial,
            self.raw.gamma.final_,
            self.raw.experiment.iterations.max(2),
        )
        .expect("validated at construction")
    }

    /// Decodes a unit-box point into the physical `(psi, phi)` pair.
    pub fn decode(&self, unit: &[f64]) -> Result<(ModelDistParams, ControllerConfig)> {
        if !self.space.contains_unit(unit) {
            return Err(Error::domain(format!("point outside unit box: {unit:?}")));
        }
        let x = self.space.denormalize(unit);
        let lambda = match self.lambda_idx {
            Some(i) => x[i],
            None => self.raw.mppi.lambda.expect("validated at construction"),
        };
        let sigma_eps = match self.sigma_eps_idx {
            Some(i) => x[i],
            None => self.raw.mppi.sigma_eps.expect("validated at construction"),
        };
        let phi = ControllerConfig::new(lambda, sigma_eps)?;
        let entries = self.psi_idx.iter().map(|&(i, j)| (x[i], x[j])).collect();
        let psi = ModelDistParams::new(entries)?;
        Ok((psi, phi))
    }
}

/// Table-style preset for the pendulum benchmark.
pub fn pendulum_preset() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        r#"
[experiment]
env = "pendulum"
iterations = 50
episodes_per_eval = 1
steps_per_episode = 200
seeds = [0, 1, 2]
optimizers = ["bore-rf", "bore-mlp", "bo-ucb", "bo-ei", "tpe", "cmaes", "random"]
start_at_worst = true

[mppi]
horizon = 10
rollouts = 10

[gamma]
initial = 0.5
final = 0.05

[cmaes]
sigma0 = 0.3

[[search]]
name = "l_mu"
lower = 0.5
upper = 1.6

[[search]]
name = "l_sigma"
lower = 0.001
upper = 0.1

[[search]]
name = "lambda"
lower = 0.01
upper = 50.0

[[search]]
name = "sigma_eps"
lower = 1.0
upper = 10.0
"#,
    )
    .expect("preset is valid")
}

/// Preset for the planar obstacle benchmark; the controller search is over
/// the temperature only, with the perturbation std fixed.
pub fn planar_preset() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        r#"
[experiment]
env = "planar"
iterations = 50
episodes_per_eval = 10
steps_per_episode = 200
seeds = [0, 1, 2]
optimizers = ["bore-rf", "bore-mlp", "bo-ucb", "bo-ei", "tpe", "cmaes", "random"]
start_at_worst = true

[mppi]
horizon = 30
rollouts = 20
sigma_eps = 1.0

[gamma]
initial = 0.5
final = 0.05

[[search]]
name = "wx_mu"
lower = 0.05
upper = 0.3

[[search]]
name = "wx_sigma"
lower = 0.001
upper = 0.2

[[search]]
name = "wy_mu"
lower = 0.02
upper = 0.65

[[search]]
name = "wy_sigma"
lower = 0.001
upper = 0.2

[[search]]
name = "lambda"
lower = 0.01
upper = 50.0
"#,
    )
    .expect("preset is valid")
}
