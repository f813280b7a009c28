//! Versioned JSON model persistence.
//!
//! The file embeds everything prediction needs: hyper-parameters, class
//! dictionary, feature count, optional standardization vectors and the tree
//! structures. Numbers serialize with shortest-round-trip precision, so
//! save/load is lossless and byte-stable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Standardizer;
use crate::error::{CdfError, Result};
use crate::forest::{Forest, ForestConfig};
use crate::scalar::Scalar;

/// Supported model file version.
pub const FORMAT_VERSION: u32 = 1;

/// On-disk model schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel<T> {
    pub format_version: u32,
    pub config: ForestConfig,
    /// Resolved per-node feature budget for the training feature count.
    pub m: usize,
    pub label_names: Vec<String>,
    pub p: usize,
    /// Present when the forest was trained on standardized features;
    /// prediction must apply it to incoming rows.
    pub standardizer: Option<Standardizer<T>>,
    pub trees: Vec<crate::cdt::TreeNode<T>>,
}

impl<T: Scalar> SavedModel<T> {
    pub fn from_forest(forest: &Forest<T>, standardizer: Option<&Standardizer<T>>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            config: forest.config().clone(),
            m: forest.config().tree.m_selector.resolve(forest.p()),
            label_names: forest.label_names().to_vec(),
            p: forest.p(),
            standardizer: standardizer.cloned(),
            trees: forest.trees().to_vec(),
        }
    }

    pub fn into_forest(self) -> (Forest<T>, Option<Standardizer<T>>) {
        let forest = Forest::from_parts(self.trees, self.config, self.label_names, self.p);
        (forest, self.standardizer)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Serialize a forest (plus optional standardizer) to a model file.
pub fn save_model<T: Scalar>(
    forest: &Forest<T>,
    standardizer: Option<&Standardizer<T>>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let json = SavedModel::from_forest(forest, standardizer).to_json()?;
    fs::write(path.as_ref(), json)?;
    Ok(())
}

/// Load a model file, rejecting unknown format versions.
pub fn load_model<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<(Forest<T>, Option<Standardizer<T>>)> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_model(&text)
}

pub fn parse_model<T: Scalar>(text: &str) -> Result<(Forest<T>, Option<Standardizer<T>>)> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| CdfError::Parse("model file lacks format_version".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(CdfError::Parse(format!(
            "unsupported model format version {version} (supported: {FORMAT_VERSION})"
        )));
    }
    let model: SavedModel<T> = serde_json::from_value(value)?;
    Ok(model.into_forest())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::train_forest;
    use crate::harness::make_blobs;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn round_trip_preserves_predictions() {
        let d = make_blobs::<f64>(15, 3, 20, 5, 3.0, 1.0, 2).unwrap();
        let forest = train_forest(
            &d,
            &ForestConfig {
                n_trees: 12,
                seed: 7,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let json = SavedModel::from_forest(&forest, None).to_json().unwrap();
        let (loaded, std) = parse_model::<f64>(&json).unwrap();
        assert!(std.is_none());

        let mut rng = stream_rng(5, 0);
        for _ in 0..100 {
            let probe: Vec<f64> = (0..d.p()).map(|_| rng.gen_range(-10.0..10.0)).collect();
            assert_eq!(
                forest.predict(&probe).unwrap(),
                loaded.predict(&probe).unwrap()
            );
        }
    }

    #[test]
    fn serialization_is_byte_stable() {
        let d = make_blobs::<f64>(10, 2, 8, 4, 4.0, 1.0, 3).unwrap();
        let cfg = ForestConfig {
            n_trees: 5,
            seed: 1,
            ..ForestConfig::default()
        };
        let a = SavedModel::from_forest(&train_forest(&d, &cfg).unwrap(), None)
            .to_json()
            .unwrap();
        let b = SavedModel::from_forest(&train_forest(&d, &cfg).unwrap(), None)
            .to_json()
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_version_is_rejected() {
        let d = make_blobs::<f64>(8, 2, 5, 2, 4.0, 1.0, 3).unwrap();
        let forest = train_forest(
            &d,
            &ForestConfig {
                n_trees: 2,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let json = SavedModel::from_forest(&forest, None).to_json().unwrap();
        let bumped = json.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        let err = parse_model::<f64>(&bumped).unwrap_err();
        assert!(err.to_string().contains("unsupported model format version"));
    }

    #[test]
    fn resolved_m_is_recorded() {
        let d = make_blobs::<f64>(8, 2, 30, 5, 4.0, 1.0, 3).unwrap();
        let forest = train_forest(
            &d,
            &ForestConfig {
                n_trees: 2,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let model = SavedModel::from_forest(&forest, None);
        // ceil(2 ln 30) = 7
        assert_eq!(model.m, 7);
    }

    #[test]
    fn standardizer_travels_with_the_model() {
        let d = make_blobs::<f64>(10, 2, 6, 3, 5.0, 1.0, 4).unwrap();
        let std = crate::dataset::Standardizer::fit(&d);
        let forest = train_forest(
            &std.transform(&d).unwrap(),
            &ForestConfig {
                n_trees: 3,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let json = SavedModel::from_forest(&forest, Some(&std)).to_json().unwrap();
        let (_, loaded_std) = parse_model::<f64>(&json).unwrap();
        assert_eq!(loaded_std.unwrap(), std);
    }
}
