//! Random forest of CART-style trees.
//!
//! Trees are grown on bootstrap resamples with Gini-impurity splits over
//! `sqrt(d)` randomly subsampled features per node. Leaves store the
//! positive-class fraction; the forest prediction is the mean over trees.

use super::{LabelledSet, ProbabilisticClassifier};
use crate::rng::RngStream;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct RandomForest {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for RandomForest {
    fn default() -> Self {
        Self { n_trees: 50, max_depth: 16, min_samples_split: 2 }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        positive_fraction: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { positive_fraction } => return *positive_fraction,
                Node::Split { feature, threshold, left, right } => {
                    idx = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomForestModel {
    trees: Vec<Tree>,
    /// Set when the training data contained a single class.
    constant: Option<f64>,
}

impl RandomForest {
    pub fn fit(&self, data: &LabelledSet, stream: RngStream) -> RandomForestModel {
        if !data.has_both_classes() {
            return RandomForestModel { trees: Vec::new(), constant: Some(data.positive_fraction()) };
        }
        let n_features = (data.dim() as f64).sqrt().ceil() as usize;
        let trees = (0..self.n_trees)
            .map(|t| {
                let mut rng = stream.child(t as u64).rng();
                let indices: Vec<usize> =
                    (0..data.len()).map(|_| rng.random_range(0..data.len())).collect();
                let mut tree = Tree { nodes: Vec::new() };
                self.grow(data, &indices, 0, n_features.max(1), &mut tree, &mut rng);
                tree
            })
            .collect();
        RandomForestModel { trees, constant: None }
    }

    /// Grows a subtree over `indices`, returns its root node id.
    fn grow(
        &self,
        data: &LabelledSet,
        indices: &[usize],
        depth: usize,
        n_features: usize,
        tree: &mut Tree,
        rng: &mut impl Rng,
    ) -> usize {
        let positives = indices.iter().filter(|&&i| data.z[i] == 1).count();
        let fraction = positives as f64 / indices.len() as f64;
        let pure = positives == 0 || positives == indices.len();

        if pure || depth >= self.max_depth || indices.len() < self.min_samples_split {
            tree.nodes.push(Node::Leaf { positive_fraction: fraction });
            return tree.nodes.len() - 1;
        }

        let mut features: Vec<usize> = (0..data.dim()).collect();
        features.shuffle(rng);
        features.truncate(n_features);

        match best_split(data, indices, &features) {
            None => {
                tree.nodes.push(Node::Leaf { positive_fraction: fraction });
                tree.nodes.len() - 1
            }
            Some((feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                    indices.iter().partition(|&&i| data.x[i][feature] <= threshold);
                let id = tree.nodes.len();
                tree.nodes.push(Node::Leaf { positive_fraction: fraction }); // placeholder
                let left = self.grow(data, &left_idx, depth + 1, n_features, tree, rng);
                let right = self.grow(data, &right_idx, depth + 1, n_features, tree, rng);
                tree.nodes[id] = Node::Split { feature, threshold, left, right };
                id
            }
        }
    }
}

/// Best Gini split over the candidate features, if any feature still varies.
fn best_split(data: &LabelledSet, indices: &[usize], features: &[usize]) -> Option<(usize, f64)> {
    let n = indices.len() as f64;
    let total_pos = indices.iter().filter(|&&i| data.z[i] == 1).count() as f64;
    let mut best: Option<(usize, f64, f64)> = None;

    for &f in features {
        let mut vals: Vec<(f64, u8)> = indices.iter().map(|&i| (data.x[i][f], data.z[i])).collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_n = 0.0;
        let mut left_pos = 0.0;
        for w in 0..vals.len() - 1 {
            left_n += 1.0;
            left_pos += vals[w].1 as f64;
            if vals[w].0 == vals[w + 1].0 {
                continue;
            }
            let right_n = n - left_n;
            let right_pos = total_pos - left_pos;
            let gini = |pos: f64, cnt: f64| {
                let p = pos / cnt;
                2.0 * p * (1.0 - p)
            };
            let impurity = (left_n * gini(left_pos, left_n) + right_n * gini(right_pos, right_n)) / n;
            let threshold = 0.5 * (vals[w].0 + vals[w + 1].0);
            if best.map_or(true, |(_, _, b)| impurity < b) {
                best = Some((f, threshold, impurity));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

impl ProbabilisticClassifier for RandomForestModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

impl RandomForestModel {
    /// Per-tree leaf fractions at `x`; the forest output is their mean.
    pub fn per_tree_predictions(&self, x: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }
}
