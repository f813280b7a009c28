//! Centroid decision trees.
//!
//! A node scores a random candidate subset of features, keeps the top `m`
//! by separability, places one centroid per present class in that reduced
//! space and routes every sample to its nearest centroid. Children recurse
//! until a node is pure, too small, or too deep.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::css::{class_stats, css_scores, select_top_m};
use crate::dataset::Dataset;
use crate::error::{CdfError, Result};
use crate::matrix::Matrix;
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// Rule producing the per-node feature budget `m` from the total feature
/// count `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MSelector {
    /// `ceil(2 ln p)`, the default.
    TwoLnP,
    /// `ceil(2 log2 p)`.
    TwoLog2P,
    /// An explicit count.
    Fixed(usize),
}

impl MSelector {
    /// Resolve to a concrete count, never below 1.
    pub fn resolve(&self, p: usize) -> usize {
        let m = match self {
            MSelector::TwoLnP => (2.0 * (p as f64).ln()).ceil() as usize,
            MSelector::TwoLog2P => (2.0 * (p as f64).log2()).ceil() as usize,
            MSelector::Fixed(m) => *m,
        };
        m.max(1)
    }
}

impl std::fmt::Display for MSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MSelector::TwoLnP => write!(f, "2ln"),
            MSelector::TwoLog2P => write!(f, "2log2"),
            MSelector::Fixed(m) => write!(f, "int:{m}"),
        }
    }
}

impl std::str::FromStr for MSelector {
    type Err = CdfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2ln" => Ok(MSelector::TwoLnP),
            "2log2" => Ok(MSelector::TwoLog2P),
            other => {
                if let Some(k) = other.strip_prefix("int:") {
                    let m: usize = k.parse().map_err(|_| {
                        CdfError::InvalidConfig(format!("bad m rule {other:?}"))
                    })?;
                    if m == 0 {
                        return Err(CdfError::InvalidConfig("m must be >= 1".into()));
                    }
                    Ok(MSelector::Fixed(m))
                } else {
                    Err(CdfError::InvalidConfig(format!(
                        "unknown m rule {other:?} (expected 2ln, 2log2 or int:<k>)"
                    )))
                }
            }
        }
    }
}

impl TryFrom<String> for MSelector {
    type Error = CdfError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MSelector> for String {
    fn from(m: MSelector) -> String {
        m.to_string()
    }
}

/// Hyper-parameters for a single tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Maximum number of split levels; the root is at depth 0.
    pub max_depth: usize,
    /// A node with at most this many samples becomes a leaf.
    pub min_samples: usize,
    /// Fraction of all features sampled as candidates at each node.
    pub m_try_fraction: f64,
    /// Number of top-scoring candidates kept for the centroids.
    pub m_selector: MSelector,
    /// Epsilon in the separability denominator.
    pub epsilon: f64,
    /// Seed for standalone tree training.
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 3,
            min_samples: 3,
            m_try_fraction: 0.2,
            m_selector: MSelector::TwoLnP,
            epsilon: 1e-7,
            seed: 0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(CdfError::InvalidConfig("max_depth must be >= 1".into()));
        }
        if self.min_samples < 1 {
            return Err(CdfError::InvalidConfig("min_samples must be >= 1".into()));
        }
        if !(self.m_try_fraction > 0.0 && self.m_try_fraction <= 1.0) {
            return Err(CdfError::InvalidConfig(format!(
                "m_try_fraction must lie in (0,1], got {}",
                self.m_try_fraction
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CdfError::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// One child of a split node: the class whose centroid anchors it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch<T> {
    pub class: usize,
    /// Centroid restricted to the node's selected features.
    pub centroid: Vec<T>,
    pub child: TreeNode<T>,
}

/// A trained tree node.
///
/// Split nodes keep their selected feature indices and one branch per class
/// that received at least one training row, sorted by class index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode<T> {
    Split {
        selected_features: Vec<usize>,
        branches: Vec<Branch<T>>,
    },
    Leaf {
        label: usize,
        /// (class, training rows of that class that reached this leaf),
        /// sorted by class, zero-count classes omitted.
        class_counts: Vec<(usize, usize)>,
    },
}

impl<T: Scalar> TreeNode<T> {
    /// Follow centroid routing down to the leaf for a full feature vector.
    pub fn route(&self, x: &[T]) -> &TreeNode<T> {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { .. } => return node,
                TreeNode::Split {
                    selected_features,
                    branches,
                } => {
                    let mut best = 0;
                    let mut best_dist = T::infinity();
                    for (i, branch) in branches.iter().enumerate() {
                        let mut d = T::zero();
                        for (&f, &c) in selected_features.iter().zip(&branch.centroid) {
                            let diff = x[f] - c;
                            d += diff * diff;
                        }
                        // strict `<` keeps the lowest class on ties
                        if d < best_dist {
                            best_dist = d;
                            best = i;
                        }
                    }
                    node = &branches[best].child;
                }
            }
        }
    }

    /// Greatest depth of any node below (a lone leaf has depth 0).
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { branches, .. } => {
                1 + branches.iter().map(|b| b.child.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Visit every leaf.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(&TreeNode<T>)) {
        match self {
            TreeNode::Leaf { .. } => f(self),
            TreeNode::Split { branches, .. } => {
                for b in branches {
                    b.child.for_each_leaf(f);
                }
            }
        }
    }
}

/// Predicted class for a full feature vector.
pub fn predict_tree<T: Scalar>(tree: &TreeNode<T>, x: &[T]) -> usize {
    match tree.route(x) {
        TreeNode::Leaf { label, .. } => *label,
        TreeNode::Split { .. } => unreachable!("route returns a leaf"),
    }
}

/// Euclidean distance between two equal-length vectors.
pub fn euclidean_distance<T: Scalar>(x: &[T], c: &[T]) -> Result<T> {
    if x.len() != c.len() {
        return Err(CdfError::DimensionMismatch {
            expected: x.len(),
            actual: c.len(),
        });
    }
    let mut sum = T::zero();
    for (&a, &b) in x.iter().zip(c) {
        let d = a - b;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Mean vector of each present class over the given rows and columns,
/// sorted by class index.
pub fn compute_centroids<T: Scalar>(
    features: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> Vec<(usize, Vec<T>)> {
    let mut sums = vec![vec![T::zero(); cols.len()]; n_classes];
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        let c = labels[r];
        counts[c] += 1;
        let row = features.row(r);
        for (acc, &j) in sums[c].iter_mut().zip(cols) {
            *acc += row[j];
        }
    }
    let mut centroids = Vec::new();
    for (class, mut sum) in sums.into_iter().enumerate() {
        if counts[class] == 0 {
            continue;
        }
        let n = T::from_usize(counts[class]).unwrap();
        for v in &mut sum {
            *v /= n;
        }
        centroids.push((class, sum));
    }
    centroids
}

/// Assign each row to the class key of its nearest centroid (squared
/// Euclidean distance over the given columns; ties go to the lower class).
pub fn partition<T: Scalar>(
    features: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    centroids: &[(usize, Vec<T>)],
) -> Vec<usize> {
    debug_assert!(!centroids.is_empty());
    rows.iter()
        .map(|&r| {
            let row = features.row(r);
            let mut best = centroids[0].0;
            let mut best_dist = T::infinity();
            for (class, centroid) in centroids {
                let mut d = T::zero();
                for (&j, &c) in cols.iter().zip(centroid) {
                    let diff = row[j] - c;
                    d += diff * diff;
                }
                if d < best_dist {
                    best_dist = d;
                    best = *class;
                }
            }
            best
        })
        .collect()
}

/// Most frequent class; ties go to the lower class index.
pub fn majority_class(labels: &[usize]) -> usize {
    debug_assert!(!labels.is_empty());
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    counts
        .iter()
        .enumerate()
        .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        .map(|(class, _)| class)
        .unwrap_or(0)
}

/// Train one centroid decision tree on the whole dataset, drawing candidate
/// features from `node_rng`.
pub fn build_tree<T: Scalar>(
    data: &Dataset<T>,
    config: &TreeConfig,
    node_rng: &mut ChaCha8Rng,
) -> TreeNode<T> {
    let p = data.p();
    let m = config.m_selector.resolve(p);
    let m_try = ((config.m_try_fraction * p as f64).ceil() as usize).clamp(1, p);
    let rows: Vec<usize> = (0..data.n()).collect();
    build_node(data, config, m, m_try, node_rng, &rows, 0)
}

/// Standalone training with the config's own seed.
pub fn train_tree<T: Scalar>(data: &Dataset<T>, config: &TreeConfig) -> TreeNode<T> {
    let mut rng = stream_rng(config.seed, 1);
    build_tree(data, config, &mut rng)
}

fn make_leaf<T: Scalar>(labels: &[usize], rows: &[usize], n_classes: usize) -> TreeNode<T> {
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    let class_counts: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(class, &c)| (class, c))
        .collect();
    let label = class_counts
        .iter()
        .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then(cb.cmp(ca)))
        .map(|&(class, _)| class)
        .expect("leaf over nonempty rows");
    TreeNode::Leaf {
        label,
        class_counts,
    }
}

fn build_node<T: Scalar>(
    data: &Dataset<T>,
    config: &TreeConfig,
    m: usize,
    m_try: usize,
    rng: &mut ChaCha8Rng,
    rows: &[usize],
    depth: usize,
) -> TreeNode<T> {
    let labels = data.labels();
    let pure = rows
        .iter()
        .all(|&r| labels[r] == labels[rows[0]]);
    if depth >= config.max_depth || rows.len() <= config.min_samples || pure {
        return make_leaf(labels, rows, data.k());
    }

    let candidates: Vec<usize> =
        rand::seq::index::sample(rng, data.p(), m_try).into_vec();
    let stats = class_stats(data.features(), rows, &candidates, labels, data.k());
    let scores = match css_scores(&stats, T::from_f64_lossy(config.epsilon)) {
        Ok(s) => s,
        // unreachable for impure nodes, but a leaf is the safe answer
        Err(_) => return make_leaf(labels, rows, data.k()),
    };
    let selected = select_top_m(&scores, &candidates, m);

    let centroids = compute_centroids(data.features(), rows, &selected, labels, data.k());
    let assignment = partition(data.features(), rows, &selected, &centroids);

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::with_capacity(centroids.len());
    for &(class, _) in &centroids {
        let group: Vec<usize> = rows
            .iter()
            .zip(&assignment)
            .filter(|(_, &a)| a == class)
            .map(|(&r, _)| r)
            .collect();
        if !group.is_empty() {
            groups.push((class, group));
        }
    }
    // all rows on one centroid: splitting again would loop forever
    if groups.len() <= 1 {
        return make_leaf(labels, rows, data.k());
    }

    let branches: Vec<Branch<T>> = groups
        .into_iter()
        .map(|(class, group)| {
            let centroid = centroids
                .iter()
                .find(|(c, _)| *c == class)
                .map(|(_, v)| v.clone())
                .expect("group classes come from centroids");
            let child = build_node(data, config, m, m_try, rng, &group, depth + 1);
            Branch {
                class,
                centroid,
                child,
            }
        })
        .collect();

    TreeNode::Split {
        selected_features: selected,
        branches,
    }
}
