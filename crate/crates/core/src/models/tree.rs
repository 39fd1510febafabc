//! CART classification trees with Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct values of
//! a feature among the node's samples; a sample goes left when its value is
//! `<=` the threshold. The best split minimizes the sample-weighted child
//! Gini, ties going to the lower feature index and then the lower threshold.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_training_input;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Rows};
use crate::seed::WorkbenchRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Leaf {
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes live in a flat arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub classes: Vec<String>,
    pub n_features: usize,
    pub config: TreeConfig,
    pub nodes: Vec<Node>,
}

impl TreeModel {
    pub fn predict_row(&self, x: &FeatureMatrix, r: usize) -> usize {
        let row = x.row(r);
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return majority(counts),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Vec<usize> {
        (0..x.n_rows()).map(|r| self.predict_row(x, r)).collect()
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, depth)) = stack.pop() {
            deepest = deepest.max(depth);
            if let Node::Split { left, right, .. } = &self.nodes[at] {
                stack.push((*left, depth + 1));
                stack.push((*right, depth + 1));
            }
        }
        deepest
    }

    pub fn n_internal(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }
}

/// Most frequent class; earlier classes win ties.
pub fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// `1 - sum (n_i / n)^2`.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    let n = total as f64;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}

/// `n * gini(counts)`, computed as `n - sum(c^2) / n` so equal count vectors
/// always give bit-identical results.
fn weighted_impurity(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    n as f64 - sum_sq / n as f64
}

pub fn train_tree(x: &FeatureMatrix, y: &[usize], classes: &[String], config: &TreeConfig) -> Result<TreeModel> {
    check_training_input(x, y, classes)?;
    if x.n_rows() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let samples: Vec<usize> = (0..x.n_rows()).collect();
    Ok(grow_tree(x, y, classes, config, samples, None))
}

/// Per-node feature subsampling used by forests.
pub(crate) struct FeatureSampler<'a> {
    pub per_split: usize,
    pub rng: &'a mut WorkbenchRng,
}

struct Candidate {
    feature: usize,
    /// Distinct values in ascending order with per-class counts.
    levels: Vec<(f64, Vec<usize>)>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

/// Grow a tree over `samples` (row positions, repeats allowed).
pub(crate) fn grow_tree(
    x: &FeatureMatrix,
    y: &[usize],
    classes: &[String],
    config: &TreeConfig,
    samples: Vec<usize>,
    mut sampler: Option<FeatureSampler<'_>>,
) -> TreeModel {
    let k = classes.len();
    let mut nodes: Vec<Node> = vec![Node::Leaf { counts: Vec::new() }];
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, samples, 0)];

    while let Some((slot, members, depth)) = stack.pop() {
        let mut counts = vec![0usize; k];
        for &s in &members {
            counts[y[s]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = config.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || members.len() < config.min_samples_split {
            nodes[slot] = Node::Leaf { counts };
            continue;
        }
        let Some(best) = find_best_split(x, y, k, &members, &counts, sampler.as_mut()) else {
            nodes[slot] = Node::Leaf { counts };
            continue;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            members.iter().partition(|&&s| x.get(s, best.feature) <= best.threshold);
        let left_slot = nodes.len();
        nodes.push(Node::Leaf { counts: Vec::new() });
        let right_slot = nodes.len();
        nodes.push(Node::Leaf { counts: Vec::new() });
        nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: left_slot,
            right: right_slot,
        };
        stack.push((right_slot, right, depth + 1));
        stack.push((left_slot, left, depth + 1));
    }

    TreeModel {
        classes: classes.to_vec(),
        n_features: x.n_cols(),
        config: *config,
        nodes,
    }
}

/// Non-constant features among `members`, ascending by feature index.
fn candidate_features(x: &FeatureMatrix, y: &[usize], k: usize, members: &[usize], counts: &[usize]) -> Vec<Candidate> {
    // (feature, value, class) for every stored entry; absent sparse entries
    // are implicit zeros and are added back per feature below.
    let mut entries: Vec<(usize, f64, usize)> = Vec::new();
    match x.rows() {
        Rows::Sparse(rows) => {
            for &s in members {
                for (f, v) in rows[s].iter() {
                    entries.push((f, v + 0.0, y[s]));
                }
            }
        }
        Rows::Dense(rows) => {
            entries.reserve(members.len() * x.n_cols());
            for &s in members {
                for (f, &v) in rows[s].iter().enumerate() {
                    entries.push((f, v + 0.0, y[s]));
                }
            }
        }
    }
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n = members.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < entries.len() {
        let feature = entries[start].0;
        let mut end = start;
        while end < entries.len() && entries[end].0 == feature {
            end += 1;
        }
        let group = &entries[start..end];
        start = end;

        let mut implicit = counts.to_vec();
        for &(_, _, c) in group {
            implicit[c] -= 1;
        }
        let implicit_n = n - group.len();

        let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
        let mut zero_pending = implicit_n > 0;
        for &(_, v, c) in group {
            if zero_pending && v >= 0.0 {
                levels.push((0.0, implicit.clone()));
                zero_pending = false;
            }
            match levels.last_mut() {
                Some((last, level_counts)) if *last == v => level_counts[c] += 1,
                _ => {
                    let mut level_counts = vec![0usize; k];
                    level_counts[c] = 1;
                    levels.push((v, level_counts));
                }
            }
        }
        if zero_pending {
            levels.push((0.0, implicit));
        }
        if levels.len() >= 2 {
            out.push(Candidate { feature, levels });
        }
    }
    out
}

fn find_best_split(
    x: &FeatureMatrix,
    y: &[usize],
    k: usize,
    members: &[usize],
    counts: &[usize],
    sampler: Option<&mut FeatureSampler<'_>>,
) -> Option<BestSplit> {
    let mut candidates = candidate_features(x, y, k, members, counts);
    if let Some(sampler) = sampler {
        if sampler.per_split < candidates.len() {
            // partial Fisher-Yates: uniform subset in the first `per_split` slots
            for i in 0..sampler.per_split {
                let j = sampler.rng.gen_range(i..candidates.len());
                candidates.swap(i, j);
            }
            candidates.truncate(sampler.per_split);
            candidates.sort_by_key(|c| c.feature);
        }
    }

    let n = members.len();
    let mut best: Option<BestSplit> = None;
    for cand in &candidates {
        let mut left = vec![0usize; k];
        let mut left_n = 0usize;
        for pair in cand.levels.windows(2) {
            let (lo, lo_counts) = (&pair[0].0, &pair[0].1);
            let hi = pair[1].0;
            for (l, c) in left.iter_mut().zip(lo_counts) {
                *l += c;
            }
            left_n += lo_counts.iter().sum::<usize>();
            let right: Vec<usize> = counts.iter().zip(&left).map(|(t, l)| t - l).collect();
            let impurity = (weighted_impurity(&left, left_n) + weighted_impurity(&right, n - left_n)) / n as f64;
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                let mut threshold = lo + (hi - lo) * 0.5;
                if threshold >= hi {
                    threshold = *lo;
                }
                best = Some(BestSplit {
                    feature: cand.feature,
                    threshold,
                    impurity,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    fn dense(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let d = rows[0].len();
        FeatureMatrix::dense((0..rows.len()).map(|i| format!("r{i}")).collect(), d, rows, "x").unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[4]).unwrap(), 0.0);
        assert_eq!(gini(&[2, 2]).unwrap(), 0.5);
        assert!((gini(&[2, 1, 1]).unwrap() - 0.625).abs() < 1e-15);
        assert!(matches!(gini(&[0, 0]), Err(Error::EmptyNode)));
    }

    #[test]
    fn single_point_is_a_leaf() {
        let x = dense(vec![vec![3.0, 1.0]]);
        let t = train_tree(&x, &[2], &classes(3), &TreeConfig::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&x), vec![2]);
    }

    #[test]
    fn xor_is_memorized() {
        let x = dense(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        let y = [0, 0, 1, 1];
        let t = train_tree(&x, &y, &classes(2), &TreeConfig::default()).unwrap();
        assert_eq!(t.predict(&x), y.to_vec());
        assert!(t.n_internal() >= 2);
    }

    #[test]
    fn conflicting_duplicates_fall_back_to_majority() {
        let x = dense(vec![vec![1.0], vec![1.0], vec![1.0], vec![2.0]]);
        let y = [1, 1, 0, 0];
        let t = train_tree(&x, &y, &classes(2), &TreeConfig::default()).unwrap();
        let preds = t.predict(&x);
        assert_eq!(preds, vec![1, 1, 1, 0]);
    }

    #[test]
    fn depth_limit_is_respected() {
        let x = dense((0..16).map(|i| vec![i as f64]).collect());
        let y: Vec<usize> = (0..16).map(|i| i % 2).collect();
        let t = train_tree(
            &x,
            &y,
            &classes(2),
            &TreeConfig {
                max_depth: Some(2),
                min_samples_split: 2,
            },
        )
        .unwrap();
        assert!(t.depth() <= 2);
    }

    #[test]
    fn split_tie_prefers_lower_feature() {
        // both features separate the classes perfectly
        let x = dense(vec![vec![0.0, 5.0], vec![1.0, 6.0]]);
        let t = train_tree(&x, &[0, 1], &classes(2), &TreeConfig::default()).unwrap();
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn sparse_and_dense_inputs_grow_the_same_tree() {
        use crate::features::SparseRow;
        let rows = vec![
            vec![0.0, 2.0, 0.0],
            vec![1.5, 0.0, 0.0],
            vec![0.0, 0.0, -1.0],
            vec![0.5, 2.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let y = [0, 1, 2, 0, 1];
        let d = dense(rows.clone());
        let s = FeatureMatrix::sparse(
            (0..5).map(|i| format!("r{i}")).collect(),
            3,
            rows.iter()
                .map(|r| SparseRow::from_pairs(r.iter().copied().enumerate().collect()))
                .collect(),
            "x",
        )
        .unwrap();
        let td = train_tree(&d, &y, &classes(3), &TreeConfig::default()).unwrap();
        let ts = train_tree(&s, &y, &classes(3), &TreeConfig::default()).unwrap();
        assert_eq!(td.nodes, ts.nodes);
        assert_eq!(td.predict(&d), y.to_vec());
    }
}
