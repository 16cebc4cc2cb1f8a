//! Probabilistic binary classifiers used as the acquisition surrogate.
//!
//! The classifier output approximates the class-1 posterior `pi(x)`, which in
//! turn approximates `gamma * r_gamma(x)`; maximising it replaces acquisition
//! maximisation in the optimisation loop.

mod forest;
mod mlp;

pub use forest::{RandomForest, RandomForestModel};
pub use mlp::{MlpClassifier, MlpModel};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Training data: unit-box points with binary labels.
#[derive(Debug, Clone)]
pub struct LabelledSet {
    pub x: Vec<Vec<f64>>,
    pub z: Vec<u8>,
}

impl LabelledSet {
    pub fn new(x: Vec<Vec<f64>>, z: Vec<u8>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::domain("points and labels have different lengths"));
        }
        if x.is_empty() {
            return Err(Error::domain("empty training set"));
        }
        let d = x[0].len();
        if x.iter().any(|p| p.len() != d) {
            return Err(Error::domain("ragged feature matrix"));
        }
        Ok(Self { x, z })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.z.iter().map(|&z| z as usize).sum::<usize>() as f64 / self.z.len() as f64
    }

    /// Whether both classes are present.
    pub fn has_both_classes(&self) -> bool {
        self.z.iter().any(|&z| z == 1) && self.z.iter().any(|&z| z == 0)
    }
}

/// A fitted model that scores class-1 probability.
pub trait ProbabilisticClassifier: Send + Sync {
    /// Class-1 probability at `x`, always in `[0, 1]`.
    fn predict_proba(&self, x: &[f64]) -> f64;
}

/// Classifier family selection, surfaced in the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    RandomForest,
    Mlp,
}

impl ClassifierKind {
    pub fn fit(&self, data: &LabelledSet, stream: RngStream) -> Box<dyn ProbabilisticClassifier> {
        match self {
            ClassifierKind::RandomForest => {
                Box::new(RandomForest::default().fit(data, stream))
            }
            ClassifierKind::Mlp => Box::new(MlpClassifier::default().fit(data, stream)),
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rf" => Ok(ClassifierKind::RandomForest),
            "mlp" => Ok(ClassifierKind::Mlp),
            other => Err(Error::InvalidConfig(format!("unknown classifier '{other}'"))),
        }
    }
}
