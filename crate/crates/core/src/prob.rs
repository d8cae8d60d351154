use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// N×C matrix whose rows are class distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix(Array2<f64>);

impl ProbMatrix {
    /// Wraps `values` after checking that every row is a distribution to
    /// within `1e-6`.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        for (i, row) in values.rows().into_iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "probabilities",
                    message: format!("row {i} has a negative or non-finite entry"),
                });
            }
            let s = row.sum();
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParameter {
                    name: "probabilities",
                    message: format!("row {i} sums to {s}"),
                });
            }
        }
        Ok(ProbMatrix(values))
    }

    /// Row-wise softmax of `logits`.
    pub fn softmax(logits: ArrayView2<f64>) -> Self {
        let mut out = logits.to_owned();
        for mut row in out.axis_iter_mut(Axis(0)) {
            let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            row.mapv_inplace(|v| (v - m).exp());
            let s = row.sum();
            row.mapv_inplace(|v| v / s);
        }
        ProbMatrix(out)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::DimensionMismatch("ragged probability rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let values = Array2::from_shape_vec((rows.len(), c), flat)
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(values)
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.0.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    /// Most probable class of row `i`; ties go to the lowest class index.
    pub fn argmax(&self, i: usize) -> usize {
        argmax_row(self.0.row(i))
    }
}

pub(crate) fn argmax_row(row: ArrayView1<f64>) -> usize {
    let mut best = 0;
    for (c, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = c;
        }
    }
    best
}
