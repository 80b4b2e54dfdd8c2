use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::error::Result;
use crate::interferometry::AmplitudeTables;
use crate::trajectories::{write_trajectory_csv, GammaIndex, QuasiDistribution, RecordTable};

/// One outcome of a measured distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    /// `p_l` (Bell label), a register name, or `RS` for the joint pair.
    pub quantity: String,
    pub outcome: String,
    pub exact: f64,
    pub mean: f64,
    pub std: f64,
}

/// Conditional fluctuation theorem at one `gamma`, in computational labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtGammaRow {
    pub gamma: GammaIndex,
    pub p_gamma: f64,
    pub exact: f64,
    /// Largest pointwise residual of the detailed relation; absent when the
    /// retrodicted marginal is below the conditioning threshold.
    pub detailed_residual: Option<f64>,
    pub mean: f64,
    /// Spread over repetitions; zero in exact mode.
    pub std: f64,
    /// `|mean - 1| <= 3 std`, or within `1e-9` in exact mode.
    pub consistent: bool,
}

/// Mean and spread of a scalar over repetitions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
}

impl Estimate {
    /// Sample mean and (n - 1)-normalized standard deviation.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }

    pub fn exact(x: f64) -> Self {
        Self { mean: x, std: 0.0 }
    }
}

/// Exact-engine checks of the configured setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub total: f64,
    pub total_retro: f64,
    pub min_q: f64,
    pub delta_mutual_information: f64,
    pub mean_delta_iota: f64,
    pub integral_ft: f64,
    pub entropy_production_ft_s: f64,
    pub entropy_production_ft_sr: f64,
    pub mean_sigma_s: f64,
    pub mean_sigma_sr: f64,
    pub information_s_e: f64,
    pub information_sr_e: f64,
    /// `I(R;S)_rho` and `I(R;SE)_rho'`.
    pub preservation: [f64; 2],
    /// `Delta I` and `I(E;R|S)_rho'`.
    pub cmi: [f64; 2],
    /// Largest `|P - closed form|` over `gamma` and `tau`.
    pub marginal_error: f64,
    pub min_marginal: f64,
    /// Largest `|Q_assembled - Q_engine|` from noiseless amplitudes; only
    /// for the reference experiment.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub assembly_error: Option<f64>,
    pub passed: bool,
}

/// Shot-based counterparts of the headline checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSummary {
    pub total: Estimate,
    pub integral_ft: Estimate,
    pub mean_delta_iota: Estimate,
    /// Largest `|estimate - exact|` over all amplitude entries, averaged.
    pub amplitude_error: Estimate,
    /// Per-gamma theorems within three standard deviations of one.
    pub gammas_consistent: usize,
    pub gammas: usize,
}

/// Angle search totals over the amplitude set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationSummary {
    pub tasks: usize,
    /// Tasks whose mitigated residual is no worse than at `pi/2`.
    pub not_worse: usize,
    pub mean_residual: f64,
    pub mean_baseline_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: RunConfig,
    pub invariants: InvariantSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampled: Option<SampledSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mitigation: Option<MitigationSummary>,
}

/// `summary.json` of a single-setup analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub label: String,
    pub dims: (usize, usize, usize),
    pub invariants: InvariantSummary,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub initial: Vec<DistributionRow>,
    pub final_: Vec<DistributionRow>,
    /// Averaged over repetitions; `variance_*` columns hold the spread of a
    /// single repetition.
    pub amplitudes: AmplitudeTables,
    pub ft_gamma: Vec<FtGammaRow>,
    pub summary: Summary,
    /// Exact engine output, engine label order.
    pub q: QuasiDistribution,
    pub q_retro: QuasiDistribution,
    pub records: RecordTable,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_distribution<W: Write>(rows: &[DistributionRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["quantity", "outcome", "exact", "mean", "std"])?;
    for r in rows {
        out.write_record([
            r.quantity.clone(),
            r.outcome.clone(),
            fmt(r.exact),
            fmt(r.mean),
            fmt(r.std),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub(super) fn write_ft_gamma<W: Write>(rows: &[FtGammaRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "s",
        "n",
        "s′",
        "n′",
        "p_gamma",
        "exact",
        "detailed_residual",
        "mean",
        "std",
        "consistent",
    ])?;
    for r in rows {
        let g = r.gamma;
        out.write_record([
            g.s.to_string(),
            g.n.to_string(),
            g.s_f.to_string(),
            g.n_f.to_string(),
            fmt(r.p_gamma),
            fmt(r.exact),
            r.detailed_residual.map(fmt).unwrap_or_default(),
            fmt(r.mean),
            fmt(r.std),
            r.consistent.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub(super) fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

impl Report {
    /// Writes `initial.csv`, `final.csv`, `amplitudes_{a,b,c}.csv`,
    /// `ft_gamma.csv`, `trajectories.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_distribution(&self.initial, create(dir, "initial.csv")?)?;
        write_distribution(&self.final_, create(dir, "final.csv")?)?;
        for table in self.amplitudes.iter() {
            table.write_csv(create(dir, &format!("{}.csv", table.family.file_stem()))?)?;
        }
        write_ft_gamma(&self.ft_gamma, create(dir, "ft_gamma.csv")?)?;
        write_trajectory_csv(
            &self.q,
            &self.q_retro,
            &self.records,
            false,
            create(dir, "trajectories.csv")?,
        )?;
        let mut json = create(dir, "summary.json")?;
        serde_json::to_writer_pretty(&mut json, &self.summary)?;
        writeln!(json)?;
        json.flush()?;
        Ok(())
    }
}

/// Reads back `summary.json` from a report directory.
pub fn read_summary(dir: &Path) -> Result<Summary> {
    Ok(serde_json::from_str(&fs::read_to_string(
        dir.join("summary.json"),
    )?)?)
}
