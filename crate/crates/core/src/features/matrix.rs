use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse row with strictly increasing column indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseRow {
    /// Builds a row from `(column, value)` pairs in any order. Duplicate
    /// columns are summed and explicit zeros dropped.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut row = SparseRow::default();
        for (i, v) in pairs {
            match row.indices.last() {
                Some(&last) if last == i => *row.values.last_mut().unwrap() += v,
                _ => {
                    row.indices.push(i);
                    row.values.push(v);
                }
            }
        }
        let keep: Vec<bool> = row.values.iter().map(|&v| v != 0.0).collect();
        if keep.iter().any(|k| !k) {
            let (indices, values) = row
                .indices
                .iter()
                .zip(&row.values)
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|((&i, &v), _)| (i, v))
                .unzip();
            row = SparseRow { indices, values };
        }
        row
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, col: usize) -> f64 {
        match self.indices.binary_search(&col) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Rows {
    Sparse(Vec<SparseRow>),
    Dense(Vec<Vec<f64>>),
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub enum RowView<'a> {
    Sparse(&'a SparseRow),
    Dense(&'a [f64]),
}

impl<'a> RowView<'a> {
    /// Stored entries as `(column, value)`. Dense rows yield every column.
    pub fn entries(self) -> Box<dyn Iterator<Item = (usize, f64)> + 'a> {
        match self {
            RowView::Sparse(row) => Box::new(row.iter()),
            RowView::Dense(values) => Box::new(values.iter().copied().enumerate()),
        }
    }

    pub fn get(self, col: usize) -> f64 {
        match self {
            RowView::Sparse(row) => row.get(col),
            RowView::Dense(values) => values.get(col).copied().unwrap_or(0.0),
        }
    }

    /// Dot product with the first `len(row)` entries of `weights`.
    pub fn dot(self, weights: &[f64]) -> f64 {
        match self {
            RowView::Sparse(row) => row.iter().map(|(i, v)| weights[i] * v).sum(),
            RowView::Dense(values) => values.iter().zip(weights).map(|(x, w)| x * w).sum(),
        }
    }

    /// `target += scale * row`.
    pub fn add_scaled_to(self, scale: f64, target: &mut [f64]) {
        match self {
            RowView::Sparse(row) => {
                for (i, v) in row.iter() {
                    target[i] += scale * v;
                }
            }
            RowView::Dense(values) => {
                for (t, v) in target.iter_mut().zip(values) {
                    *t += scale * v;
                }
            }
        }
    }
}

/// Row-per-document feature matrix tagged with the encoding that made it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    row_ids: Vec<String>,
    n_cols: usize,
    rows: Rows,
    encoding_name: String,
}

impl FeatureMatrix {
    pub fn sparse(
        row_ids: Vec<String>,
        n_cols: usize,
        rows: Vec<SparseRow>,
        encoding_name: impl Into<String>,
    ) -> Result<Self> {
        check_row_count(&row_ids, rows.len())?;
        for (r, row) in rows.iter().enumerate() {
            if row.indices.iter().any(|&i| i >= n_cols) {
                return Err(Error::WidthMismatch {
                    expected: n_cols,
                    actual: row.indices.last().map_or(0, |&i| i + 1),
                });
            }
            if row.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(r));
            }
        }
        Ok(FeatureMatrix {
            row_ids,
            n_cols,
            rows: Rows::Sparse(rows),
            encoding_name: encoding_name.into(),
        })
    }

    pub fn dense(
        row_ids: Vec<String>,
        n_cols: usize,
        rows: Vec<Vec<f64>>,
        encoding_name: impl Into<String>,
    ) -> Result<Self> {
        check_row_count(&row_ids, rows.len())?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::WidthMismatch {
                    expected: n_cols,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(r));
            }
        }
        Ok(FeatureMatrix {
            row_ids,
            n_cols,
            rows: Rows::Dense(rows),
            encoding_name: encoding_name.into(),
        })
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn encoding_name(&self) -> &str {
        &self.encoding_name
    }

    pub fn rows(&self) -> &Rows {
        &self.rows
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.rows, Rows::Sparse(_))
    }

    pub fn row(&self, r: usize) -> RowView<'_> {
        match &self.rows {
            Rows::Sparse(rows) => RowView::Sparse(&rows[r]),
            Rows::Dense(rows) => RowView::Dense(&rows[r]),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).get(c)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows())
            .map(|r| {
                let mut out = vec![0.0; self.n_cols];
                for (c, v) in self.row(r).entries() {
                    out[c] = v;
                }
                out
            })
            .collect()
    }

    /// Rows restricted to the given positions, in that order.
    pub fn select_rows(&self, positions: &[usize]) -> FeatureMatrix {
        let row_ids = positions.iter().map(|&p| self.row_ids[p].clone()).collect();
        let rows = match &self.rows {
            Rows::Sparse(rows) => Rows::Sparse(positions.iter().map(|&p| rows[p].clone()).collect()),
            Rows::Dense(rows) => Rows::Dense(positions.iter().map(|&p| rows[p].clone()).collect()),
        };
        FeatureMatrix {
            row_ids,
            n_cols: self.n_cols,
            rows,
            encoding_name: self.encoding_name.clone(),
        }
    }
}

fn check_row_count(row_ids: &[String], rows: usize) -> Result<()> {
    if row_ids.len() != rows {
        return Err(Error::RowMismatch(format!("{} row ids for {rows} rows", row_ids.len())));
    }
    Ok(())
}

/// Horizontal concatenation. All-dense input stays dense; anything else
/// becomes sparse.
pub fn concat_features(blocks: &[FeatureMatrix]) -> Result<FeatureMatrix> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::RowMismatch("no blocks to concatenate".into()))?;
    if blocks.len() == 1 {
        return Ok(first.clone());
    }
    for block in &blocks[1..] {
        if block.row_ids != first.row_ids {
            return Err(Error::RowMismatch(format!(
                "{} vs {}",
                first.encoding_name, block.encoding_name
            )));
        }
    }
    let n_cols = blocks.iter().map(|b| b.n_cols).sum();
    let name = blocks
        .iter()
        .map(|b| b.encoding_name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let n_rows = first.n_rows();

    if blocks.iter().all(|b| !b.is_sparse()) {
        let rows = (0..n_rows)
            .map(|r| {
                let mut out = Vec::with_capacity(n_cols);
                for b in blocks {
                    if let Rows::Dense(rows) = &b.rows {
                        out.extend_from_slice(&rows[r]);
                    }
                }
                out
            })
            .collect();
        return FeatureMatrix::dense(first.row_ids.clone(), n_cols, rows, name);
    }

    let rows = (0..n_rows)
        .map(|r| {
            let mut indices = Vec::new();
            let mut values = Vec::new();
            let mut offset = 0;
            for b in blocks {
                for (c, v) in b.row(r).entries() {
                    if v != 0.0 {
                        indices.push(offset + c);
                        values.push(v);
                    }
                }
                offset += b.n_cols;
            }
            SparseRow { indices, values }
        })
        .collect();
    FeatureMatrix::sparse(first.row_ids.clone(), n_cols, rows, name)
}
