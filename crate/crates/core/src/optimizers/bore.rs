//! Classifier-as-acquisition optimisation with annealed quantile fraction.
//!
//! Each iteration labels the history at the current quantile threshold,
//! trains a probabilistic classifier on the labelled set, and suggests the
//! point maximising the predicted class-1 probability.

use super::{maximize_acquisition, GammaSchedule, Optimizer};
use crate::classifiers::{ClassifierKind, LabelledSet};
use crate::rng::RngStream;
use crate::space::Dataset;
use crate::stats::{assign_labels, empirical_quantile};
use rand::Rng;

pub struct BoreOptimizer {
    classifier: ClassifierKind,
    schedule: GammaSchedule,
    dim: usize,
    label: &'static str,
    /// 1-based iteration counter driving the annealing.
    t: usize,
}

impl BoreOptimizer {
    pub fn new(
        classifier: ClassifierKind,
        schedule: GammaSchedule,
        dim: usize,
        label: &'static str,
    ) -> Self {
        Self { classifier, schedule, dim, label, t: 0 }
    }

    fn uniform(&self, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..self.dim).map(|_| rng.random::<f64>()).collect()
    }

    /// The labelled auxiliary dataset for iteration `t`, if it is usable for
    /// classification (two points, both classes present).
    fn labelled(&self, data: &Dataset, gamma: f64) -> Option<LabelledSet> {
        if data.len() < 2 {
            return None;
        }
        let g = data.g_values();
        let tau = empirical_quantile(&g, gamma).ok()?;
        let z = assign_labels(&g, tau);
        let x: Vec<Vec<f64>> = data.records().iter().map(|r| r.x.clone()).collect();
        let set = LabelledSet::new(x, z).ok()?;
        set.has_both_classes().then_some(set)
    }
}

impl Optimizer for BoreOptimizer {
    fn name(&self) -> &str {
        self.label
    }

    fn suggest(&mut self, data: &Dataset, stream: RngStream) -> Vec<f64> {
        self.t = (self.t + 1).min(self.schedule.n);
        let gamma = self.schedule.gamma_at(self.t).expect("t clamped into schedule range");

        let Some(set) = self.labelled(data, gamma) else {
            // cold start or degenerate single-class labelling
            return self.uniform(stream.child(0));
        };
        let model = self.classifier.fit(&set, stream.child(1));
        // Evaluated points are deliberately NOT candidates here: interpolating
        // classifiers peak exactly at their positive training points, so
        // including them makes the argmax re-suggest the incumbent verbatim
        // and the search collapses onto one point.
        maximize_acquisition(|x| model.predict_proba(x), self.dim, &[], stream.child(2))
    }

    fn observe(&mut self, _x: &[f64], _g: f64) {}
}
