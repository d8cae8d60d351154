//! Distances of candidate representations from the labeled set.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use super::ScoreVector;
use crate::error::{invalid, Error, Result};

/// Mahalanobis distance of each candidate row of `reps` from the labeled
/// rows, using their mean and maximum-likelihood covariance regularized by
/// `εI` with `ε = max(1e-6·tr(Σ)/d, 1e-9)`.
pub fn mahalanobis_scores(reps: ArrayView2<f64>, labeled: &[usize], candidates: &[usize]) -> Result<ScoreVector> {
    if labeled.len() < 2 {
        return Err(invalid("labeled", "mahalanobis needs at least 2 labeled rows"));
    }
    check_rows(reps, labeled)?;
    check_rows(reps, candidates)?;
    let d = reps.ncols();
    let m = labeled.len() as f64;
    let mut mean = Array1::<f64>::zeros(d);
    for &i in labeled {
        mean += &reps.row(i);
    }
    mean /= m;
    let mut cov = Array2::<f64>::zeros((d, d));
    for &i in labeled {
        let x = &reps.row(i) - &mean;
        for a in 0..d {
            for b in 0..d {
                cov[[a, b]] += x[a] * x[b];
            }
        }
    }
    cov /= m;
    let trace: f64 = cov.diag().sum();
    let eps = (1e-6 * trace / d as f64).max(1e-9);
    for a in 0..d {
        cov[[a, a]] += eps;
    }
    let chol = cholesky(&cov).ok_or_else(|| invalid("covariance", "not positive definite"))?;
    let mut out = vec![0.0; reps.nrows()];
    for &i in candidates {
        let x = &reps.row(i) - &mean;
        let z = forward_substitute(&chol, x.view());
        out[i] = z.dot(&z).sqrt();
    }
    Ok(ScoreVector::new(out))
}

/// Local outlier factor of each candidate against the labeled rows as
/// reference set, with `k` neighbors.
pub fn lof_scores(reps: ArrayView2<f64>, labeled: &[usize], candidates: &[usize], k: usize) -> Result<ScoreVector> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if labeled.len() <= k {
        return Err(invalid(
            "k",
            format!("need more than k = {k} labeled rows, have {}", labeled.len()),
        ));
    }
    check_rows(reps, labeled)?;
    check_rows(reps, candidates)?;

    // Neighborhoods of reference points exclude the point itself.
    let ref_knn: Vec<Vec<(usize, f64)>> = labeled
        .iter()
        .enumerate()
        .map(|(a, &i)| {
            nearest(reps.row(i), reps, labeled, k, Some(a))
        })
        .collect();
    let k_distance: Vec<f64> = ref_knn.iter().map(|nb| nb[k - 1].1).collect();
    let lrd_of = |nb: &[(usize, f64)]| -> f64 {
        let reach: f64 = nb.iter().map(|&(o, dist)| dist.max(k_distance[o])).sum::<f64>() / nb.len() as f64;
        1.0 / (reach + 1e-10)
    };
    let ref_lrd: Vec<f64> = ref_knn.iter().map(|nb| lrd_of(nb)).collect();

    let mut out = vec![0.0; reps.nrows()];
    for &q in candidates {
        let nb = nearest(reps.row(q), reps, labeled, k, None);
        let lrd_q = lrd_of(&nb);
        let mean_ref: f64 = nb.iter().map(|&(o, _)| ref_lrd[o]).sum::<f64>() / nb.len() as f64;
        out[q] = mean_ref / lrd_q;
    }
    Ok(ScoreVector::new(out))
}

/// The `k` reference points closest to `x` as `(position in labeled,
/// distance)`, ascending; ties resolved by position.
fn nearest(
    x: ArrayView1<f64>,
    reps: ArrayView2<f64>,
    labeled: &[usize],
    k: usize,
    skip: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut dists: Vec<(usize, f64)> = labeled
        .iter()
        .enumerate()
        .filter(|&(a, _)| Some(a) != skip)
        .map(|(a, &j)| (a, euclidean(x, reps.row(j))))
        .collect();
    dists.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    dists.truncate(k);
    dists
}

pub(crate) fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_rows(reps: ArrayView2<f64>, rows: &[usize]) -> Result<()> {
    match rows.iter().find(|&&i| i >= reps.nrows()) {
        Some(&i) => Err(Error::NodeOutOfRange { index: i, n: reps.nrows() }),
        None => Ok(()),
    }
}

/// Lower-triangular `L` with `L·Lᵀ = a`, or `None` if `a` is not positive
/// definite.
fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let d = a.nrows();
    let mut l = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for p in 0..j {
                s -= l[[i, p]] * l[[j, p]];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves `L·z = x` for lower-triangular `L`. `|z|²` is then the squared
/// Mahalanobis norm of `x`.
fn forward_substitute(l: &Array2<f64>, x: ArrayView1<f64>) -> Array1<f64> {
    let d = x.len();
    let mut z = Array1::<f64>::zeros(d);
    for i in 0..d {
        let mut s = x[i];
        for p in 0..i {
            s -= l[[i, p]] * z[p];
        }
        z[i] = s / l[[i, i]];
    }
    z
}
