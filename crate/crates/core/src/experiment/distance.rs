use std::io::Write;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sweep::mean_and_se;
use crate::error::{invalid, Error, Result};
use crate::graph::{bfs_distances, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistancePoint {
    pub fraction: f64,
    pub mean_distance: f64,
    /// Standard error over repetitions.
    pub se: f64,
}

/// `count` evenly spaced fractions from `lo` to `hi` inclusive.
pub fn fraction_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
    }
}

/// Mean hop distance from an unsampled node to the nearest of `⌈f·n⌉`
/// uniformly sampled nodes, averaged over `repetitions` samples per
/// fraction. Unreachable nodes count as `cap`; when every node is sampled
/// the distance is 0.
pub fn distance_to_sampled_curve<R: Rng + ?Sized>(
    g: &Graph,
    fractions: &[f64],
    repetitions: usize,
    cap: usize,
    rng: &mut R,
) -> Result<Vec<DistancePoint>> {
    if fractions.is_empty() {
        return Err(Error::EmptyInput("fraction list"));
    }
    if let Some(f) = fractions.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
        return Err(invalid("fractions", format!("{f} is outside (0, 1]")));
    }
    if repetitions == 0 {
        return Err(invalid("repetitions", "must be at least 1"));
    }
    if cap == 0 {
        return Err(invalid("cap", "must be at least 1"));
    }
    let n = g.node_count();
    let mut points = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let k = ((f * n as f64).ceil() as usize).clamp(1, n);
        let mut means = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let sampled = sample(rng, n, k).into_vec();
            if k == n {
                means.push(0.0);
                continue;
            }
            let d = bfs_distances(g, &sampled, cap)?;
            let mut is_sampled = vec![false; n];
            sampled.iter().for_each(|&i| is_sampled[i] = true);
            let total: usize = (0..n).filter(|&i| !is_sampled[i]).map(|i| d[i]).sum();
            means.push(total as f64 / (n - k) as f64);
        }
        let (mean_distance, se) = mean_and_se(&means);
        points.push(DistancePoint {
            fraction: f,
            mean_distance,
            se,
        });
    }
    Ok(points)
}

/// `fraction,mean_distance,se`
pub fn write_distance_csv<W: Write>(out: W, points: &[DistancePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if points.is_empty() {
        w.write_record(["fraction", "mean_distance", "se"])?;
    }
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
