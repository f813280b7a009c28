//! Bagged ensembles of centroid decision trees with majority voting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdt::{build_tree, predict_tree, TreeConfig, TreeNode};
use crate::dataset::{bootstrap_sample, Dataset};
use crate::error::{CdfError, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::scalar::Scalar;

/// Ensemble hyper-parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    /// Number of trees.
    pub n_trees: usize,
    pub tree: TreeConfig,
    /// Master seed; each tree's bootstrap and feature draws derive from it
    /// and the tree index alone.
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 500,
            tree: TreeConfig::default(),
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(CdfError::InvalidConfig("n_trees must be >= 1".into()));
        }
        self.tree.validate()
    }
}

/// A trained ensemble. Immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<T> {
    trees: Vec<TreeNode<T>>,
    config: ForestConfig,
    label_names: Vec<String>,
    p: usize,
}

impl<T: Scalar> Forest<T> {
    pub(crate) fn from_parts(
        trees: Vec<TreeNode<T>>,
        config: ForestConfig,
        label_names: Vec<String>,
        p: usize,
    ) -> Self {
        Self {
            trees,
            config,
            label_names,
            p,
        }
    }

    pub fn trees(&self) -> &[TreeNode<T>] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn k(&self) -> usize {
        self.label_names.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn check_len(&self, x: &[T]) -> Result<()> {
        if x.len() != self.p {
            return Err(CdfError::DimensionMismatch {
                expected: self.p,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Raw vote counts per class.
    fn votes(&self, x: &[T]) -> Vec<usize> {
        let mut counts = vec![0usize; self.k()];
        for tree in &self.trees {
            counts[predict_tree(tree, x)] += 1;
        }
        counts
    }

    /// Majority-vote class; ties go to the lower class index.
    pub fn predict(&self, x: &[T]) -> Result<usize> {
        self.check_len(x)?;
        let counts = self.votes(x);
        Ok(argmax_lowest(&counts))
    }

    /// Vote fraction per class (sums to 1).
    pub fn predict_votes(&self, x: &[T]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let b = self.trees.len() as f64;
        Ok(self.votes(x).iter().map(|&c| c as f64 / b).collect())
    }

    /// Row-wise prediction over a dataset with matching width.
    pub fn predict_batch(&self, data: &Dataset<T>) -> Result<Vec<usize>> {
        if data.p() != self.p {
            return Err(CdfError::DimensionMismatch {
                expected: self.p,
                actual: data.p(),
            });
        }
        Ok((0..data.n())
            .into_par_iter()
            .map(|i| argmax_lowest(&self.votes(data.features().row(i))))
            .collect())
    }
}

fn argmax_lowest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = c;
        }
    }
    best
}

/// Train an ensemble: one bootstrap sample and one tree per index.
///
/// Trees build in parallel; the result is identical for any worker count
/// because per-tree seeds come from (master seed, tree index).
pub fn train_forest<T: Scalar>(data: &Dataset<T>, config: &ForestConfig) -> Result<Forest<T>> {
    config.validate()?;
    if data.present_classes() < 2 {
        return Err(CdfError::InvalidData(
            "need >= 2 classes in training data".into(),
        ));
    }
    let trees: Vec<TreeNode<T>> = (0..config.n_trees as u64)
        .into_par_iter()
        .map(|b| {
            let tree_seed = derive_seed(config.seed, b);
            let sample = bootstrap_sample(data, derive_seed(tree_seed, 0));
            let mut node_rng = stream_rng(tree_seed, 1);
            build_tree(&sample, &config.tree, &mut node_rng)
        })
        .collect();
    Ok(Forest {
        trees,
        config: config.clone(),
        label_names: data.label_names().to_vec(),
        p: data.p(),
    })
}
