//! Confusion matrices, support-weighted metrics and results tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelKind;

/// `counts[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(classes: Vec<String>, counts: Vec<Vec<u64>>) -> Self {
        ConfusionMatrix { classes, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }
}

/// Tally predictions given as class names.
pub fn confusion_matrix<S: AsRef<str>>(y_true: &[S], y_pred: &[S], classes: &[String]) -> Result<ConfusionMatrix> {
    let index = |label: &S| {
        classes
            .iter()
            .position(|c| c == label.as_ref())
            .ok_or_else(|| Error::UnknownClass(label.as_ref().to_string()))
    };
    let t = y_true.iter().map(index).collect::<Result<Vec<_>>>()?;
    let p = y_pred.iter().map(index).collect::<Result<Vec<_>>>()?;
    confusion_matrix_indices(&t, &p, classes)
}

pub fn confusion_matrix_indices(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            labels: y_pred.len(),
            rows: y_true.len(),
        });
    }
    let k = classes.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= k || p >= k {
            return Err(Error::UnknownClass(format!("class index {}", t.max(p))));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub encoder: String,
    pub model: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision/recall/F1 (0 where undefined) and their
/// support-weighted means.
pub fn metrics(cm: &ConfusionMatrix) -> Result<EvalReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let k = cm.counts.len();
    let mut per_class = Vec::with_capacity(k);
    let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
    for i in 0..k {
        let tp = cm.counts[i][i];
        let support: u64 = cm.counts[i].iter().sum();
        let predicted: u64 = cm.counts.iter().map(|row| row[i]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        let weight = support as f64 / total as f64;
        wp += weight * precision;
        wr += weight * recall;
        wf += weight * f1;
        per_class.push(ClassMetrics {
            class: cm.classes.get(i).cloned().unwrap_or_default(),
            precision,
            recall,
            f1,
            support,
        });
    }
    Ok(EvalReport {
        encoder: String::new(),
        model: String::new(),
        accuracy: ratio(cm.trace(), total),
        precision: wp,
        recall: wr,
        f1: wf,
        per_class,
        confusion: cm.clone(),
    })
}

pub const RESULTS_CSV_HEADER: &str = "encoder,model,accuracy,precision,recall,f1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormattedResults {
    pub tables: String,
    pub csv: String,
}

fn model_rank(model: &str) -> (usize, String) {
    match model.parse::<ModelKind>() {
        Ok(kind) => (
            ModelKind::ALL.iter().position(|&k| k == kind).unwrap_or(usize::MAX),
            String::new(),
        ),
        Err(_) => (usize::MAX, model.to_string()),
    }
}

fn model_label(model: &str) -> String {
    model
        .parse::<ModelKind>()
        .map(|k| k.table_name().to_string())
        .unwrap_or_else(|_| model.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One fixed-width table per encoder (encoders in name order, rows in
/// RF/SVM/DT/LR order, percentages to two decimals) plus the matching CSV.
pub fn format_results(reports: &[EvalReport]) -> FormattedResults {
    let mut by_encoder: BTreeMap<&str, Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        by_encoder.entry(r.encoder.as_str()).or_default().push(r);
    }

    let mut tables = String::new();
    let mut csv = String::from(RESULTS_CSV_HEADER);
    csv.push('\n');
    for (i, (encoder, mut rows)) in by_encoder.into_iter().enumerate() {
        rows.sort_by_key(|r| model_rank(&r.model));
        if i > 0 {
            tables.push('\n');
        }
        let _ = writeln!(tables, "{encoder}");
        let _ = writeln!(
            tables,
            "{:<6} {:>9} {:>10} {:>8} {:>10}",
            "Model", "Accuracy", "Precision", "Recall", "F-measure"
        );
        for r in rows {
            let _ = writeln!(
                tables,
                "{:<6} {:>9.2} {:>10.2} {:>8.2} {:>10.2}",
                model_label(&r.model),
                100.0 * r.accuracy,
                100.0 * r.precision,
                100.0 * r.recall,
                100.0 * r.f1
            );
            let _ = writeln!(
                csv,
                "{},{},{:.6},{:.6},{:.6},{:.6}",
                csv_field(&r.encoder),
                csv_field(&r.model),
                r.accuracy,
                r.precision,
                r.recall,
                r.f1
            );
        }
    }
    FormattedResults { tables, csv }
}
