use rand::Rng;

use super::ScoreVector;
use crate::error::{invalid, Error, Result};

/// The `b` highest-scoring candidates in descending score order. Equal
/// scores are ordered by a random key drawn from `rng`, one per candidate.
pub fn select_batch<R: Rng + ?Sized>(
    scores: &ScoreVector,
    candidates: &[usize],
    b: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if b == 0 {
        return Err(invalid("batch_size", "must be at least 1"));
    }
    if candidates.len() < b {
        return Err(Error::PoolExhausted {
            needed: b,
            available: candidates.len(),
        });
    }
    let mut keyed = Vec::with_capacity(candidates.len());
    for &i in candidates {
        let &s = scores
            .values()
            .get(i)
            .ok_or(Error::NodeOutOfRange { index: i, n: scores.len() })?;
        if !s.is_finite() {
            return Err(invalid("scores", format!("non-finite score {s} for node {i}")));
        }
        keyed.push((s, rng.random::<u64>(), i));
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().take(b).map(|(_, _, i)| i).collect())
}
