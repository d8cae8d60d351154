use super::ScoreVector;
use crate::error::{invalid, Error, Result};

pub const GEO_WEIGHT: f64 = 0.7;
pub const CENTRALITY_WEIGHT: f64 = 0.3;

/// Min-max normalizes `s` over `candidates` into `[0, 1]`. A constant
/// vector maps to all zeros. Non-candidate entries are set to 0.
pub fn min_max_normalize(s: &ScoreVector, candidates: &[usize]) -> Result<ScoreVector> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &i in candidates {
        let v = *s
            .values()
            .get(i)
            .ok_or(Error::NodeOutOfRange { index: i, n: s.len() })?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mut out = vec![0.0; s.len()];
    let span = hi - lo;
    if span > 0.0 {
        for &i in candidates {
            out[i] = (s[i] - lo) / span;
        }
    }
    Ok(ScoreVector::new(out))
}

fn check_same_len(a: &ScoreVector, b: &ScoreVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "score vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `0.7·geo + 0.3·centrality` after min-max normalizing each over the
/// candidates.
pub fn geo_centrality_scores(geo: &ScoreVector, centrality: &ScoreVector, candidates: &[usize]) -> Result<ScoreVector> {
    check_same_len(geo, centrality)?;
    let g = min_max_normalize(geo, candidates)?;
    let c = min_max_normalize(centrality, candidates)?;
    let mut out = vec![0.0; geo.len()];
    for &i in candidates {
        out[i] = GEO_WEIGHT * g[i] + CENTRALITY_WEIGHT * c[i];
    }
    Ok(ScoreVector::new(out))
}

/// Time-varying mixture weights: centrality dominates early, uncertainty
/// and density take over linearly as the budget is spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangWeights {
    pub centrality: f64,
    pub entropy: f64,
    pub density: f64,
}

impl ChangWeights {
    pub fn at(t: usize, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(invalid("budget", "must be positive"));
        }
        if t > budget {
            return Err(invalid("t", format!("{t} exceeds budget {budget}")));
        }
        let frac = t as f64 / budget as f64;
        Ok(ChangWeights {
            centrality: 1.0 - frac,
            entropy: frac / 2.0,
            density: frac / 2.0,
        })
    }
}

pub fn chang_scores(
    centrality: &ScoreVector,
    entropy: &ScoreVector,
    density: &ScoreVector,
    candidates: &[usize],
    t: usize,
    budget: usize,
) -> Result<ScoreVector> {
    let w = ChangWeights::at(t, budget)?;
    check_same_len(centrality, entropy)?;
    check_same_len(centrality, density)?;
    let c = min_max_normalize(centrality, candidates)?;
    let e = min_max_normalize(entropy, candidates)?;
    let d = min_max_normalize(density, candidates)?;
    let mut out = vec![0.0; centrality.len()];
    for &i in candidates {
        out[i] = w.centrality * c[i] + w.entropy * e[i] + w.density * d[i];
    }
    Ok(ScoreVector::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[f64]) -> ScoreVector {
        ScoreVector::new(v.to_vec())
    }

    #[test]
    fn worked_two_candidate_example() {
        let s = geo_centrality_scores(&sv(&[1.0, 9.0]), &sv(&[0.6, 0.4]), &[0, 1]).unwrap();
        assert!((s[0] - 0.3).abs() < 1e-12);
        assert!((s[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn constant_geo_defers_to_centrality() {
        let s = geo_centrality_scores(&sv(&[9.0; 4]), &sv(&[0.1, 0.4, 0.2, 0.3]), &[0, 1, 2, 3]).unwrap();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
        assert_eq!(order, vec![1, 3, 2, 0]);
    }

    #[test]
    fn maximal_in_both_scores_one() {
        let s = geo_centrality_scores(&sv(&[1.0, 3.0, 2.0]), &sv(&[0.1, 0.5, 0.2]), &[0, 1, 2]).unwrap();
        assert!((s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_ignores_non_candidates() {
        let s = min_max_normalize(&sv(&[100.0, 1.0, 3.0]), &[1, 2]).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 1.0]);
        assert!(geo_centrality_scores(&sv(&[1.0]), &sv(&[1.0, 2.0]), &[0]).is_err());
    }

    #[test]
    fn chang_schedule() {
        let w0 = ChangWeights::at(0, 10).unwrap();
        assert_eq!((w0.centrality, w0.entropy, w0.density), (1.0, 0.0, 0.0));
        let w1 = ChangWeights::at(10, 10).unwrap();
        assert_eq!((w1.centrality, w1.entropy, w1.density), (0.0, 0.5, 0.5));
        for t in 0..=7 {
            let w = ChangWeights::at(t, 7).unwrap();
            assert!((w.centrality + w.entropy + w.density - 1.0).abs() < 1e-15);
        }
        assert!(ChangWeights::at(0, 0).is_err());
    }

    #[test]
    fn chang_at_start_follows_centrality() {
        let c = sv(&[0.3, 0.1, 0.2]);
        let e = sv(&[0.0, 5.0, 1.0]);
        let s = chang_scores(&c, &e, &e, &[0, 1, 2], 0, 5).unwrap();
        assert!(s[0] > s[2] && s[2] > s[1]);
    }
}
