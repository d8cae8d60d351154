use ndarray::ArrayView2;

use super::ScoreVector;
use crate::error::{invalid, Result};

fn check_nonnegative(rows: ArrayView2<f64>) -> Result<()> {
    if let Some(((i, c), v)) = rows.indexed_iter().find(|(_, &v)| !(v >= 0.0)) {
        return Err(invalid("probabilities", format!("entry ({i}, {c}) = {v} is negative or NaN")));
    }
    Ok(())
}

/// Shannon entropy (natural log) of each row, with `0·ln 0 = 0`.
pub fn entropy_scores(rows: ArrayView2<f64>) -> Result<ScoreVector> {
    check_nonnegative(rows)?;
    let values = rows
        .rows()
        .into_iter()
        .map(|row| {
            -row.iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * p.ln())
                .sum::<f64>()
        })
        .collect();
    Ok(ScoreVector::new(values))
}

/// `1 − (p₁ − p₂)` where `p₁ ≥ p₂` are the two largest entries of each row,
/// so the smallest margin scores highest. All-zero rows score 0.
pub fn margin_scores(rows: ArrayView2<f64>) -> Result<ScoreVector> {
    if rows.ncols() < 2 {
        return Err(invalid("num_classes", "margin needs at least 2 classes"));
    }
    check_nonnegative(rows)?;
    let values = rows
        .rows()
        .into_iter()
        .map(|row| {
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            let mut total = 0.0;
            for &p in row {
                total += p;
                if p > first {
                    second = first;
                    first = p;
                } else if p > second {
                    second = p;
                }
            }
            if total == 0.0 {
                0.0
            } else {
                1.0 - (first - second)
            }
        })
        .collect();
    Ok(ScoreVector::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn entropy_cases() {
        let p = array![[0.25, 0.25, 0.25, 0.25], [0.0, 1.0, 0.0, 0.0]];
        let s = entropy_scores(p.view()).unwrap();
        assert!((s[0] - 4f64.ln()).abs() < 1e-12);
        assert_eq!(s[1], 0.0);
        let q = array![[0.5, 0.25, 0.25]];
        // 0.5 ln 2 + 2 · 0.25 ln 4 = 1.5 ln 2
        let h = entropy_scores(q.view()).unwrap()[0];
        assert!((h - 1.5 * 2f64.ln()).abs() < 1e-12);
        assert!((h - 1.0397).abs() < 1e-4);
    }

    #[test]
    fn entropy_rejects_negative() {
        assert!(entropy_scores(array![[1.1, -0.1]].view()).is_err());
    }

    #[test]
    fn margin_cases() {
        let p = array![[0.49, 0.51], [1.0, 0.0], [0.5, 0.5], [0.0, 0.0]];
        let s = margin_scores(p.view()).unwrap();
        assert!((s[0] - 0.98).abs() < 1e-12);
        assert_eq!(s[1], 0.0);
        assert_eq!(s[2], 1.0);
        assert_eq!(s[3], 0.0);
        assert!(margin_scores(array![[1.0]].view()).is_err());
    }

    #[test]
    fn margin_uses_top_two_only() {
        let s = margin_scores(array![[0.1, 0.5, 0.4], [0.4, 0.1, 0.5]].view()).unwrap();
        assert!((s[0] - 0.9).abs() < 1e-12);
        assert!((s[1] - 0.9).abs() < 1e-12);
    }
}
