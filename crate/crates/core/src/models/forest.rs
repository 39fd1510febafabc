//! Random forests of CART trees: bootstrap resampling plus a per-split
//! random feature subset, majority vote at prediction time.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_training_input;
use super::tree::{grow_tree, majority, FeatureSampler, TreeConfig, TreeModel};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeaturesPerSplit {
    /// `ceil(sqrt(D))`
    Sqrt,
    All,
    #[serde(untagged)]
    Fixed(usize),
}

impl FeaturesPerSplit {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            FeaturesPerSplit::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            FeaturesPerSplit::All => n_features,
            FeaturesPerSplit::Fixed(n) => n.min(n_features),
        }
        .max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Tree `i` draws from its own generator seeded with `seed + i`.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
            seed: 42,
        }
    }
}

impl ForestConfig {
    fn tree_config(&self) -> TreeConfig {
        TreeConfig {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub classes: Vec<String>,
    pub n_features: usize,
    pub features_per_split: usize,
    pub config: ForestConfig,
    pub seed: u64,
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn predict(&self, x: &FeatureMatrix) -> Vec<usize> {
        let k = self.classes.len();
        (0..x.n_rows())
            .map(|r| {
                let mut votes = vec![0usize; k];
                for tree in &self.trees {
                    votes[tree.predict_row(x, r)] += 1;
                }
                majority(&votes)
            })
            .collect()
    }
}

pub fn train_forest(x: &FeatureMatrix, y: &[usize], classes: &[String], config: &ForestConfig) -> Result<ForestModel> {
    check_training_input(x, y, classes)?;
    if x.n_rows() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if config.n_trees == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trees",
            reason: "a forest needs at least one tree".into(),
        });
    }
    let n = x.n_rows();
    let per_split = config.features_per_split.resolve(x.n_cols());
    let tree_config = config.tree_config();
    let tree_seeds: Vec<u64> = (0..config.n_trees as u64)
        .map(|i| config.seed.wrapping_add(i))
        .collect();

    let trees = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let mut rng = seed::rng(tree_seed);
            let samples: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let sampler = FeatureSampler {
                per_split,
                rng: &mut rng,
            };
            grow_tree(x, y, classes, &tree_config, samples, Some(sampler))
        })
        .collect();

    Ok(ForestModel {
        classes: classes.to_vec(),
        n_features: x.n_cols(),
        features_per_split: per_split,
        config: *config,
        seed: config.seed,
        tree_seeds,
        trees,
    })
}
