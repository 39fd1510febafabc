//! The four classifiers: random forest, linear SVM, decision tree and
//! logistic regression. All are trained from scratch on a [`FeatureMatrix`]
//! with labels given as indices into an ordered class list; class order
//! decides every tie.

mod forest;
mod linear;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use forest::{train_forest, FeaturesPerSplit, ForestConfig, ForestModel};
pub use linear::{
    argmax, hinge_loss_and_gradient, logistic_descent, logistic_loss_and_gradient, softmax, train_logistic, train_svm,
    LinearConfigEcho, LinearKind, LinearModel, LogisticConfig, SvmConfig,
};
pub use tree::{gini, majority, train_tree, Node, TreeConfig, TreeModel};

/// Grid model names, listed in results-table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rf,
    Svm,
    Dt,
    Lr,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Rf, ModelKind::Svm, ModelKind::Dt, ModelKind::Lr];

    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Rf => "rf",
            ModelKind::Svm => "svm",
            ModelKind::Dt => "dt",
            ModelKind::Lr => "lr",
        }
    }

    pub fn table_name(self) -> &'static str {
        match self {
            ModelKind::Rf => "RF",
            ModelKind::Svm => "SVM",
            ModelKind::Dt => "DT",
            ModelKind::Lr => "LR",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|k| k.key() == wanted)
            .ok_or_else(|| Error::Config(format!("unknown model: {}", s.trim())))
    }
}

/// Hyperparameters for every model kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub logistic: LogisticConfig,
    pub svm: SvmConfig,
    pub tree: TreeConfig,
    pub forest: ForestConfig,
}

impl TrainConfig {
    fn check(&self) -> Result<()> {
        if self.tree.min_samples_split < 2 || self.forest.min_samples_split < 2 {
            return Err(Error::InvalidParameter {
                name: "min_samples_split",
                reason: "must be at least 2".into(),
            });
        }
        if matches!(self.forest.features_per_split, FeaturesPerSplit::Fixed(0)) {
            return Err(Error::InvalidParameter {
                name: "features_per_split",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum TrainedModel {
    Linear(LinearModel),
    Tree(TreeModel),
    Forest(ForestModel),
}

impl TrainedModel {
    pub fn classes(&self) -> &[String] {
        match self {
            TrainedModel::Linear(m) => &m.classes,
            TrainedModel::Tree(m) => &m.classes,
            TrainedModel::Forest(m) => &m.classes,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Linear(m) => m.n_features(),
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Forest(m) => m.n_features,
        }
    }

    /// Class indices, one per row.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        if x.n_cols() != self.n_features() {
            return Err(Error::WidthMismatch {
                expected: self.n_features(),
                actual: x.n_cols(),
            });
        }
        Ok(match self {
            TrainedModel::Linear(m) => m.predict(x),
            TrainedModel::Tree(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Train one model kind. `seed` replaces the seed fields of `config`.
pub fn train_model(
    kind: ModelKind,
    x: &FeatureMatrix,
    y: &[usize],
    classes: &[String],
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedModel> {
    config.check()?;
    Ok(match kind {
        ModelKind::Lr => TrainedModel::Linear(train_logistic(x, y, classes, &config.logistic)?),
        ModelKind::Svm => TrainedModel::Linear(train_svm(x, y, classes, &SvmConfig { seed, ..config.svm })?),
        ModelKind::Dt => TrainedModel::Tree(train_tree(x, y, classes, &config.tree)?),
        ModelKind::Rf => TrainedModel::Forest(train_forest(x, y, classes, &ForestConfig { seed, ..config.forest })?),
    })
}

pub(crate) fn check_training_input(x: &FeatureMatrix, y: &[usize], classes: &[String]) -> Result<()> {
    if y.len() != x.n_rows() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            rows: x.n_rows(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= classes.len()) {
        return Err(Error::UnknownClass(format!("class index {bad}")));
    }
    for r in 0..x.n_rows() {
        if x.row(r).entries().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(r));
        }
    }
    Ok(())
}

pub(crate) fn distinct_classes(y: &[usize]) -> usize {
    let mut seen: Vec<usize> = y.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}
