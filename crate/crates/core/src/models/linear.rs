//! Linear classifiers: multinomial logistic regression trained by full-batch
//! gradient descent, and one-vs-rest linear SVMs trained by SGD on the hinge
//! loss.
//!
//! Weight matrices are `K x (D + 1)` with the bias in the last column. Both
//! models start from zero weights.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{check_training_input, distinct_classes};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, RowView};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Logistic,
    Svm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub epochs: usize,
    /// Stop once an epoch improves the loss by less than this.
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            epochs: 500,
            tolerance: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    /// Initial step size; step `t` uses `lr / (1 + lr * lambda * t)`.
    pub learning_rate: f64,
    pub l2_lambda: f64,
    /// Passes over the shuffled training set.
    pub epochs: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            epochs: 50,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum LinearConfigEcho {
    Logistic(LogisticConfig),
    Svm(SvmConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub classes: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub config: LinearConfigEcho,
    /// Seed used for SGD shuffling (0 for logistic regression).
    #[serde(default)]
    pub seed: u64,
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.weights[0].len() - 1
    }

    pub fn scores(&self, row: RowView<'_>) -> Vec<f64> {
        self.weights.iter().map(|w| score(w, row)).collect()
    }

    pub fn predict_proba(&self, x: &FeatureMatrix) -> Vec<Vec<f64>> {
        (0..x.n_rows()).map(|r| softmax(&self.scores(x.row(r)))).collect()
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Vec<usize> {
        (0..x.n_rows()).map(|r| argmax(&self.scores(x.row(r)))).collect()
    }
}

fn score(weights: &[f64], row: RowView<'_>) -> f64 {
    let d = weights.len() - 1;
    row.dot(&weights[..d]) + weights[d]
}

/// First index of the maximum; earlier classes win ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Mean softmax cross-entropy plus `(lambda / 2) * ||W||^2` (bias excluded),
/// with its gradient.
pub fn logistic_loss_and_gradient(
    weights: &[Vec<f64>],
    x: &FeatureMatrix,
    y: &[usize],
    l2_lambda: f64,
) -> (f64, Vec<Vec<f64>>) {
    let n = x.n_rows() as f64;
    let d = x.n_cols();
    let mut grad: Vec<Vec<f64>> = weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut loss = 0.0;
    for (r, &label) in y.iter().enumerate() {
        let row = x.row(r);
        let scores: Vec<f64> = weights.iter().map(|w| score(w, row)).collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        loss += log_norm - scores[label];
        for (k, g) in grad.iter_mut().enumerate() {
            let p = (scores[k] - log_norm).exp();
            let coef = (p - if k == label { 1.0 } else { 0.0 }) / n;
            row.add_scaled_to(coef, &mut g[..d]);
            g[d] += coef;
        }
    }
    loss /= n;
    for (w, g) in weights.iter().zip(&mut grad) {
        for j in 0..d {
            loss += 0.5 * l2_lambda * w[j] * w[j];
            g[j] += l2_lambda * w[j];
        }
    }
    (loss, grad)
}

/// Full-batch gradient descent from zero weights. Returns the weights and the
/// loss before each update plus the final loss.
pub fn logistic_descent(
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
    config: &LogisticConfig,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut weights = vec![vec![0.0; x.n_cols() + 1]; n_classes];
    let (mut loss, mut grad) = logistic_loss_and_gradient(&weights, x, y, config.l2_lambda);
    let mut history = vec![loss];
    for _ in 0..config.epochs {
        for (w, g) in weights.iter_mut().zip(&grad) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= config.learning_rate * gi;
            }
        }
        let (next_loss, next_grad) = logistic_loss_and_gradient(&weights, x, y, config.l2_lambda);
        history.push(next_loss);
        let improvement = loss - next_loss;
        loss = next_loss;
        grad = next_grad;
        if improvement < config.tolerance {
            break;
        }
    }
    (weights, history)
}

fn check_linear_config(rate: f64, lambda: f64, epochs: usize) -> Result<()> {
    if rate.is_nan() || rate <= 0.0 || lambda.is_nan() || lambda < 0.0 || epochs == 0 {
        return Err(Error::InvalidParameter {
            name: "linear model",
            reason: "learning_rate and epochs must be positive, l2_lambda non-negative".into(),
        });
    }
    Ok(())
}

pub fn train_logistic(
    x: &FeatureMatrix,
    y: &[usize],
    classes: &[String],
    config: &LogisticConfig,
) -> Result<LinearModel> {
    check_training_input(x, y, classes)?;
    check_linear_config(config.learning_rate, config.l2_lambda, config.epochs)?;
    if config.tolerance.is_nan() || config.tolerance < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            reason: "must be non-negative".into(),
        });
    }
    let present = distinct_classes(y);
    if present < 2 {
        return Err(Error::SingleClass(present));
    }
    let (weights, _) = logistic_descent(x, y, classes.len(), config);
    Ok(LinearModel {
        kind: LinearKind::Logistic,
        classes: classes.to_vec(),
        weights,
        config: LinearConfigEcho::Logistic(*config),
        seed: 0,
    })
}

/// `(lambda / 2) * ||w||^2 + mean(max(0, 1 - s * (w.x + b)))` for one binary
/// scorer, with a subgradient (zero hinge contribution at margin exactly 1).
/// `weights` carries the bias last.
pub fn hinge_loss_and_gradient(weights: &[f64], x: &FeatureMatrix, signs: &[f64], l2_lambda: f64) -> (f64, Vec<f64>) {
    let n = x.n_rows() as f64;
    let d = x.n_cols();
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for (r, &s) in signs.iter().enumerate() {
        let row = x.row(r);
        let margin = s * score(weights, row);
        if margin < 1.0 {
            loss += 1.0 - margin;
            row.add_scaled_to(-s / n, &mut grad[..d]);
            grad[d] -= s / n;
        }
    }
    loss /= n;
    for j in 0..d {
        loss += 0.5 * l2_lambda * weights[j] * weights[j];
        grad[j] += l2_lambda * weights[j];
    }
    (loss, grad)
}

/// Weight vector stored as `scale * v` so the per-step L2 shrink is O(1).
struct ScaledWeights {
    v: Vec<f64>,
    scale: f64,
    bias: f64,
}

impl ScaledWeights {
    fn score(&self, row: RowView<'_>) -> f64 {
        self.scale * row.dot(&self.v) + self.bias
    }

    fn shrink(&mut self, factor: f64) {
        if factor <= 0.0 {
            self.v.iter_mut().for_each(|x| *x = 0.0);
            self.scale = 1.0;
            return;
        }
        self.scale *= factor;
        if self.scale < 1e-9 {
            self.v.iter_mut().for_each(|x| *x *= self.scale);
            self.scale = 1.0;
        }
    }

    fn into_weights(self) -> Vec<f64> {
        let mut w: Vec<f64> = self.v.into_iter().map(|x| x * self.scale).collect();
        w.push(self.bias);
        w
    }
}

fn sgd_binary(
    x: &FeatureMatrix,
    signs: &[f64],
    config: &SvmConfig,
    order: &mut [usize],
    rng: &mut seed::WorkbenchRng,
) -> Vec<f64> {
    let mut w = ScaledWeights {
        v: vec![0.0; x.n_cols()],
        scale: 1.0,
        bias: 0.0,
    };
    let (eta0, lambda) = (config.learning_rate, config.l2_lambda);
    let mut t = 0usize;
    for _ in 0..config.epochs {
        order.shuffle(rng);
        for &i in order.iter() {
            let eta = eta0 / (1.0 + eta0 * lambda * t as f64);
            t += 1;
            let row = x.row(i);
            let s = signs[i];
            let margin = s * w.score(row);
            w.shrink(1.0 - eta * lambda);
            if margin < 1.0 {
                row.add_scaled_to(eta * s / w.scale, &mut w.v);
                w.bias += eta * s;
            }
        }
    }
    w.into_weights()
}

pub fn train_svm(x: &FeatureMatrix, y: &[usize], classes: &[String], config: &SvmConfig) -> Result<LinearModel> {
    check_training_input(x, y, classes)?;
    check_linear_config(config.learning_rate, config.l2_lambda, config.epochs)?;
    let present = distinct_classes(y);
    if present < 2 {
        return Err(Error::SingleClass(present));
    }
    let mut rng = seed::rng(config.seed);
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    let weights = (0..classes.len())
        .map(|c| {
            let signs: Vec<f64> = y.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
            order.sort_unstable();
            sgd_binary(x, &signs, config, &mut order, &mut rng)
        })
        .collect();
    Ok(LinearModel {
        kind: LinearKind::Svm,
        classes: classes.to_vec(),
        weights,
        config: LinearConfigEcho::Svm(*config),
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    fn column(values: &[f64]) -> FeatureMatrix {
        FeatureMatrix::dense(
            (0..values.len()).map(|i| format!("r{i}")).collect(),
            1,
            values.iter().map(|&v| vec![v]).collect(),
            "x",
        )
        .unwrap()
    }

    #[test]
    fn zero_model_is_uniform_and_picks_first_class() {
        let model = LinearModel {
            kind: LinearKind::Logistic,
            classes: classes(3),
            weights: vec![vec![0.0; 3]; 3],
            config: LinearConfigEcho::Logistic(LogisticConfig::default()),
            seed: 0,
        };
        let x = FeatureMatrix::dense(
            vec!["a".into(), "b".into()],
            2,
            vec![vec![1.0, -2.0], vec![0.3, 7.0]],
            "x",
        )
        .unwrap();
        for p in model.predict_proba(&x) {
            for v in p {
                assert!((v - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        assert_eq!(model.predict(&x), vec![0, 0]);
    }

    #[test]
    fn logistic_separates_one_dimensional_data() {
        let x = column(&[0.0, 1.0]);
        let model = train_logistic(&x, &[0, 1], &classes(2), &LogisticConfig::default()).unwrap();
        assert_eq!(model.predict(&x), vec![0, 1]);
    }

    #[test]
    fn svm_separates_one_dimensional_data() {
        let x = column(&[0.0, 1.0]);
        let model = train_svm(&x, &[0, 1], &classes(2), &SvmConfig::default()).unwrap();
        assert_eq!(model.predict(&x), vec![0, 1]);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = column(&[0.0, 1.0]);
        assert!(matches!(
            train_logistic(&x, &[1, 1], &classes(3), &LogisticConfig::default()),
            Err(Error::SingleClass(1))
        ));
        assert!(matches!(
            train_svm(&x, &[2, 2], &classes(3), &SvmConfig::default()),
            Err(Error::SingleClass(1))
        ));
    }

    #[test]
    fn identical_rows_predict_one_class_consistently() {
        let x = column(&[1.0, 1.0, 1.0, 1.0]);
        let model = train_svm(&x, &[0, 1, 2, 1], &classes(3), &SvmConfig::default()).unwrap();
        let preds = model.predict(&x);
        assert!(preds.iter().all(|&p| p == preds[0]));
        let scores = model.scores(x.row(0));
        assert_eq!(preds[0], argmax(&scores));
    }

    #[test]
    fn argmax_prefers_earlier_class_on_ties() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0, 0.0]), 0);
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let a = softmax(&[1.0, 2.0, 3.0]);
        let b = softmax(&[101.0, 102.0, 103.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
