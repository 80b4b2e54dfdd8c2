use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use quasift::circuits::ReadoutError;
use quasift::harness::{analyze, read_summary, run, sweep, RunConfig, RunMode, SweepOptions};
use quasift::tripartite::TripartiteSetup;

#[derive(Parser)]
#[command(
    name = "quasift",
    version,
    about = "Quasiprobability trajectories and information fluctuation theorems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form run of the reference experiment, or of a setup file.
    Exact {
        #[command(flatten)]
        run: RunArgs,
        /// Analyze this setup JSON instead of the reference experiment.
        #[arg(long)]
        setup: Option<PathBuf>,
    },
    /// Noiseless shot sampling.
    Sample(RunArgs),
    /// Shot sampling under depolarizing and readout noise.
    Noisy {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Check every trajectory identity on random setups.
    Sweep {
        /// Number of random setups.
        #[arg(short, long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Replace the random interaction by the identity.
        #[arg(long)]
        identity: bool,
        /// Dimensions of R, S and E.
        #[arg(long, num_args = 3, value_names = ["DR", "DS", "DE"], default_values_t = [2, 2, 2])]
        dims: Vec<usize>,
        /// Also write sweep.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print summary.json of a report directory.
    Report {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Must agree with the subcommand when given.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<RunMode>,
    /// Fixed interference angle, radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Report directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseArgs {
    /// Single-qubit depolarizing probability.
    #[arg(long)]
    p1: Option<f64>,
    /// Two-qubit depolarizing probability.
    #[arg(long)]
    p2: Option<f64>,
    /// Symmetric readout flip probability.
    #[arg(long)]
    readout: Option<f64>,
    /// Keep the interference angle fixed instead of searching for one.
    #[arg(long)]
    no_mitigate: bool,
}

fn parse_mode(s: &str) -> std::result::Result<RunMode, String> {
    match s {
        "exact" => Ok(RunMode::Exact),
        "sampled" | "sample" => Ok(RunMode::Sampled),
        "noisy" => Ok(RunMode::Noisy),
        _ => Err(format!(
            "unknown mode {s:?}; expected exact, sampled or noisy"
        )),
    }
}

impl RunArgs {
    fn config(&self, mode: RunMode) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = self.mode {
            if m != mode {
                bail!("--mode {m} conflicts with the {mode} subcommand");
            }
        }
        cfg.mode = mode;
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => {$(
                if let Some(v) = self.$flag {
                    cfg.$field = v;
                }
            )*};
        }
        set!(theta1 <- theta1, theta2 <- theta2, beta <- beta, shots <- shots, repetitions <- reps, seed <- seed, theta <- theta);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn execute(cfg: RunConfig) -> Result<ExitCode> {
    let report = run(&cfg)?;
    if let Some(dir) = &cfg.out {
        report
            .write(dir)
            .with_context(|| format!("writing report to {}", dir.display()))?;
    }
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Exact {
            run: args,
            setup: Some(path),
        } => {
            let setup = TripartiteSetup::load(&path)
                .with_context(|| format!("loading {}", path.display()))?;
            let analysis = analyze(&setup)?;
            if let Some(dir) = &args.out {
                analysis.write(dir)?;
            }
            println!("{}", serde_json::to_string_pretty(&analysis.summary())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact {
            run: args,
            setup: None,
        } => execute(args.config(RunMode::Exact)?),
        Command::Sample(args) => execute(args.config(RunMode::Sampled)?),
        Command::Noisy { run: args, noise } => {
            let mut cfg = args.config(RunMode::Noisy)?;
            if let Some(p) = noise.p1 {
                cfg.noise.p1 = p;
            }
            if let Some(p) = noise.p2 {
                cfg.noise.p2 = p;
            }
            if let Some(p) = noise.readout {
                cfg.noise.readout = ReadoutError::symmetric(p);
            }
            if noise.no_mitigate {
                cfg.mitigate = false;
            }
            execute(cfg)
        }
        Command::Sweep {
            n,
            seed,
            identity,
            dims,
            out,
        } => {
            let options = SweepOptions {
                dims: (dims[0], dims[1], dims[2]),
                identity_unitary: identity,
            };
            let summary = sweep(n, seed, &options)?;
            let json = serde_json::to_string_pretty(&summary)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("sweep.json"), format!("{json}\n"))?;
            }
            println!("{json}");
            Ok(if summary.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Report { out } => {
            let summary = read_summary(&out)
                .with_context(|| format!("reading {}", out.join("summary.json").display()))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
