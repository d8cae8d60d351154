use ndarray::{Array2, ArrayView2};

/// Compressed sparse row matrix of `f64`.
///
/// Column indices within a row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed; explicit zeros are kept.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Sparse copy of a dense matrix, skipping exact zeros.
    pub fn from_dense(dense: ArrayView2<f64>) -> Self {
        let (rows, cols) = dense.dim();
        let mut indptr = Vec::with_capacity(rows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in dense.rows() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, vals) = self.row(r);
        match idx.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                let slot = next[c];
                indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        CsrMatrix {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                out[[r, c]] = v;
            }
        }
        out
    }

    /// `self * rhs` for a dense right-hand side.
    pub fn mul_dense(&self, rhs: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(self.cols, rhs.nrows(), "sparse-dense shape mismatch");
        let width = rhs.ncols();
        let mut out = Array2::zeros((self.rows, width));
        for r in 0..self.rows {
            let (idx, vals) = self.row(r);
            let mut out_row = out.row_mut(r);
            for (&c, &v) in idx.iter().zip(vals) {
                out_row.scaled_add(v, &rhs.row(c));
            }
        }
        out
    }

    /// `selfᵀ * rhs` without materializing the transpose.
    pub fn transpose_mul_dense(&self, rhs: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(self.rows, rhs.nrows(), "sparse-dense shape mismatch");
        let mut out = Array2::zeros((self.cols, rhs.ncols()));
        for r in 0..self.rows {
            let (idx, vals) = self.row(r);
            let src = rhs.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                out.row_mut(c).scaled_add(v, &src);
            }
        }
        out
    }

    /// `self * x` for a dense vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                let (idx, vals) = self.row(r);
                idx.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// Largest absolute difference between `self` and `other` over all
    /// coordinates, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            let (ia, va) = self.row(r);
            let (ib, vb) = other.row(r);
            let (mut a, mut b) = (0, 0);
            while a < ia.len() || b < ib.len() {
                let diff = match (ia.get(a), ib.get(b)) {
                    (Some(&ca), Some(&cb)) if ca == cb => {
                        a += 1;
                        b += 1;
                        va[a - 1] - vb[b - 1]
                    }
                    (Some(&ca), Some(&cb)) if ca < cb => {
                        a += 1;
                        va[a - 1]
                    }
                    (Some(_), None) => {
                        a += 1;
                        va[a - 1]
                    }
                    _ => {
                        b += 1;
                        vb[b - 1]
                    }
                };
                worst = worst.max(diff.abs());
            }
        }
        worst
    }
}
