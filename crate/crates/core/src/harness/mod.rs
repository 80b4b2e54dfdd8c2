//! Configuration, orchestration of the reference experiment in exact,
//! sampled and noisy modes, report files, and the random-setup sweep.

mod config;
mod report;
mod run;
mod sweep;

pub use config::{default_noise, RunConfig, RunMode};
pub use report::{
    read_summary, AnalysisSummary, DistributionRow, Estimate, FtGammaRow, InvariantSummary,
    MitigationSummary, Report, SampledSummary, Summary,
};
pub use run::{analyze, run, Analysis};
pub use sweep::{sweep, CheckCount, SweepOptions, SweepSummary};
