//! Active-learning runs, sweeps over strategies and repetitions, and the
//! distance-to-sampled-nodes analysis.
//!
//! Each round trains a fresh GCN on the labeled set, evaluates it, scores the
//! pool with the configured strategy and queries the top batch. The model is
//! evaluated before every query and once after the last one, so a run with
//! `q` queries in batches of `b` yields `⌈q/b⌉ + 1` curve points.

mod distance;
mod protocol;
mod state;
mod sweep;

pub use distance::{distance_to_sampled_curve, fraction_grid, write_distance_csv, DistancePoint};
pub use protocol::{
    initial_seed, run_active_learning, run_with_oracle, CurveRecord, Protocol, ProtocolConfig, RunOutcome, RunSeeds,
    SplitConfig, StopRule,
};
pub use state::{ALState, GroundTruthOracle, Oracle};
pub use sweep::{
    final_points, mean_and_se, plan_sweep, run_sweep, summarize, write_curves_csv, write_failures_csv,
    write_summary_csv, RunFailure, SummaryRow, SweepJob, SweepResult, CURVE_HEADER,
};
