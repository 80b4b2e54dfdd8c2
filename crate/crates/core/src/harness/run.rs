use std::fs;
use std::io::Write;
use std::path::Path;

use super::report::{
    create, write_ft_gamma, AnalysisSummary, DistributionRow, Estimate, FtGammaRow,
    InvariantSummary, MitigationSummary, Report, SampledSummary, Summary,
};
use super::{RunConfig, RunMode};
use crate::circuits::experiment::{
    bell_label, bell_probabilities, build_bell_measurement, build_final_state, build_initial_state,
    thermal_populations, QUBIT_E, QUBIT_R, QUBIT_S,
};
use crate::circuits::{bitstring, marginal_probabilities, sample, simulate, Circuit};
use crate::error::Result;
use crate::interferometry::{
    assemble_quasiprobability, estimate_table, exact_table, AmplitudeEntry, AmplitudeEstimate,
    AmplitudeFamily, AmplitudeTable, AmplitudeTables, LabelAlignment, TablePlan,
};
use crate::rng::derive_seed;
use crate::trajectories::{
    average_entropy_productions, conditional_ft, detailed_ft_check, entropy_production_fts,
    integral_ft, marginal_gamma, marginal_tau, mean_delta_iota, quasiprobability,
    retrodiction_quasiprobability, support_gammas, two_point_gamma, two_point_tau,
    write_trajectory_csv, GammaIndex, ProjectorOrdering, QuasiDistribution, RecordTable,
    TrajectoryIndex, CONDITIONING_THRESHOLD,
};
use crate::tripartite::{
    check_preservation, cmi_identity, delta_mutual_information, evolve, reference_setup,
    EvolvedState, TripartiteSetup,
};

/// Exact-mode tolerance on every theorem.
const TOL_FT: f64 = 1e-9;
/// Qubits measured for the register marginals.
const MEASURED: [usize; 3] = [QUBIT_R, QUBIT_S, QUBIT_E];

/// Stream indices under a repetition seed.
const STREAM_TABLES: u64 = 0;
const STREAM_INITIAL: u64 = 3;
const STREAM_FINAL: u64 = 4;
const STREAM_BELL: u64 = 5;

/// Register marginals and, for the final state, the `RS` joint, from a
/// distribution over `(R, S, E)` with `R` most significant.
fn register_rows(p: &[f64], with_pair: bool) -> Vec<(String, String, f64)> {
    let mut rows = Vec::new();
    for (k, name) in ["R", "S", "E"].into_iter().enumerate() {
        for (bit, v) in marginal_probabilities(p, 3, &[k]).into_iter().enumerate() {
            rows.push((name.to_string(), bit.to_string(), v));
        }
    }
    if with_pair {
        for (i, v) in marginal_probabilities(p, 3, &[0, 1])
            .into_iter()
            .enumerate()
        {
            rows.push(("RS".to_string(), bitstring(i, 2), v));
        }
    }
    rows
}

/// Bell weights from a distribution over the measured `(r, s)` bits.
fn bell_rows(p: &[f64]) -> Vec<(String, String, f64)> {
    let mut by_label = [0.0; 4];
    for (i, &v) in p.iter().enumerate() {
        by_label[bell_label(i >> 1, i & 1)] += v;
    }
    by_label
        .iter()
        .enumerate()
        .map(|(l, &v)| ("p_l".to_string(), l.to_string(), v))
        .collect()
}

struct Experiments {
    initial: Circuit,
    final_: Circuit,
    bell: Circuit,
}

impl Experiments {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let mut initial = build_initial_state(cfg.theta1, cfg.theta2, cfg.beta)?;
        initial.measure(MEASURED.to_vec())?;
        let mut final_ = build_final_state(cfg.theta1, cfg.theta2, cfg.beta)?;
        final_.measure(MEASURED.to_vec())?;
        Ok(Self {
            initial,
            final_,
            bell: build_bell_measurement(cfg.theta1, cfg.theta2)?,
        })
    }

    fn exact(c: &Circuit) -> Result<Vec<f64>> {
        Ok(simulate(&c.without_measurements())?.marginal_probabilities(&c.measured_qubits()))
    }

    /// `(initial rows, final rows)` from exact probabilities or from a
    /// sampler.
    fn rows(
        &self,
        mut probs: impl FnMut(&Circuit, u64) -> Result<Vec<f64>>,
    ) -> Result<[Vec<(String, String, f64)>; 2]> {
        let mut initial = bell_rows(&probs(&self.bell, STREAM_BELL)?);
        initial.extend(register_rows(&probs(&self.initial, STREAM_INITIAL)?, false));
        let final_ = register_rows(&probs(&self.final_, STREAM_FINAL)?, true);
        Ok([initial, final_])
    }
}

fn distribution_rows(
    exact: &[(String, String, f64)],
    reps: &[Vec<(String, String, f64)>],
) -> Vec<DistributionRow> {
    exact
        .iter()
        .enumerate()
        .map(|(i, (quantity, outcome, x))| {
            let est = if reps.is_empty() {
                Estimate::exact(*x)
            } else {
                Estimate::from_samples(&reps.iter().map(|r| r[i].2).collect::<Vec<_>>())
            };
            DistributionRow {
                quantity: quantity.clone(),
                outcome: outcome.clone(),
                exact: *x,
                mean: est.mean,
                std: est.std,
            }
        })
        .collect()
}

fn max_map_error<K: Ord>(
    a: &std::collections::BTreeMap<K, f64>,
    b: &std::collections::BTreeMap<K, f64>,
) -> f64 {
    a.iter()
        .map(|(k, v)| (v - b.get(k).copied().unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max)
}

fn invariants(
    ev: &EvolvedState,
    q: &QuasiDistribution,
    q_retro: &QuasiDistribution,
    records: &RecordTable,
) -> Result<InvariantSummary> {
    let (ft_s, ft_sr) = entropy_production_fts(q, records)?;
    let (sigma_s, sigma_sr) = average_entropy_productions(q, records)?;
    let (p_lhs, p_rhs) = check_preservation(ev)?;
    let (delta, cmi) = cmi_identity(ev)?;
    let gamma = marginal_gamma(q);
    let tau = marginal_tau(q);
    let marginal_error =
        max_map_error(&gamma, &two_point_gamma(ev)).max(max_map_error(&tau, &two_point_tau(ev)));
    let min_marginal = gamma
        .values()
        .chain(tau.values())
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut s = InvariantSummary {
        total: q.total(),
        total_retro: q_retro.total(),
        min_q: q.min(),
        delta_mutual_information: delta_mutual_information(ev)?,
        mean_delta_iota: mean_delta_iota(q, records)?,
        integral_ft: integral_ft(q, records)?,
        entropy_production_ft_s: ft_s,
        entropy_production_ft_sr: ft_sr,
        mean_sigma_s: sigma_s,
        mean_sigma_sr: sigma_sr,
        information_s_e: ev.final_system_environment_information()?,
        information_sr_e: ev.final_joint_environment_information()?,
        preservation: [p_lhs, p_rhs],
        cmi: [delta, cmi],
        marginal_error,
        min_marginal,
        assembly_error: None,
        passed: false,
    };
    s.update_passed();
    Ok(s)
}

impl InvariantSummary {
    fn update_passed(&mut self) {
        let s = &*self;
        let [p_lhs, p_rhs] = s.preservation;
        let [delta, cmi] = s.cmi;
        self.passed = (s.total - 1.0).abs() <= 1e-10
            && (s.mean_delta_iota - s.delta_mutual_information).abs() <= TOL_FT
            && (s.integral_ft - 1.0).abs() <= 1e-8
            && (s.entropy_production_ft_s - 1.0).abs() <= 1e-8
            && (s.entropy_production_ft_sr - 1.0).abs() <= 1e-8
            && (s.mean_sigma_s - s.information_s_e).abs() <= TOL_FT
            && (s.mean_sigma_sr - s.information_sr_e).abs() <= TOL_FT
            && s.delta_mutual_information >= -TOL_FT
            && (p_lhs - p_rhs).abs() <= TOL_FT
            && (delta - cmi).abs() <= TOL_FT
            && s.marginal_error <= 1e-10
            && s.min_marginal >= -1e-12
            && s.assembly_error.is_none_or(|e| e <= 1e-10);
    }
}

/// Element-wise mean over repetitions; `variance_*` become the spread of a
/// single repetition.
fn average_tables(reps: &[AmplitudeTable]) -> AmplitudeTable {
    let first = &reps[0];
    let entries = first
        .entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let part = |pick: fn(&AmplitudeEntry) -> &AmplitudeEstimate| {
                let all: Vec<&AmplitudeEstimate> =
                    reps.iter().map(|t| pick(&t.entries[k])).collect();
                let stat = |f: fn(&AmplitudeEstimate) -> f64| {
                    Estimate::from_samples(&all.iter().map(|x| f(x)).collect::<Vec<_>>())
                };
                let value = stat(|x| x.value);
                AmplitudeEstimate {
                    value: value.mean,
                    variance: value.std * value.std,
                    magnitude_sq: stat(|x| x.magnitude_sq).mean,
                    p0: stat(|x| x.p0).mean,
                    p1: stat(|x| x.p1).mean,
                    ..pick(e).clone()
                }
            };
            AmplitudeEntry {
                labels: e.labels.clone(),
                real: part(|e| &e.real),
                imag: part(|e| &e.imag),
                exact: e.exact,
            }
        })
        .collect();
    AmplitudeTable {
        family: first.family,
        entries,
    }
}

fn exact_tables() -> Result<AmplitudeTables> {
    AmplitudeTables::new(
        exact_table(AmplitudeFamily::BellOverlap)?,
        exact_table(AmplitudeFamily::Interaction)?,
        exact_table(AmplitudeFamily::Return)?,
    )
}

/// Gamma in computational labels.
fn reference_gamma(align: &LabelAlignment, g: &GammaIndex) -> GammaIndex {
    align
        .to_reference(&TrajectoryIndex::new([0, g.s, 0, g.n, 0, g.s_f, 0, g.n_f]))
        .gamma()
}

struct Repetition {
    tables: [AmplitudeTable; 3],
    rows: [Vec<(String, String, f64)>; 2],
    ft: Vec<f64>,
    total: f64,
    integral_ft: f64,
    mean_delta_iota: f64,
    amplitude_error: f64,
}

/// Exact-engine evaluation of one setup.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub evolved: EvolvedState,
    pub q: QuasiDistribution,
    pub q_retro: QuasiDistribution,
    pub records: RecordTable,
    pub invariants: InvariantSummary,
    /// Every `gamma` on the support, in engine labels.
    pub ft_gamma: Vec<FtGammaRow>,
}

/// Canonical-order quasiprobabilities of `setup` with every theorem and
/// identity evaluated.
pub fn analyze(setup: &TripartiteSetup) -> Result<Analysis> {
    let ev = evolve(setup)?;
    let q = quasiprobability(&ev, ProjectorOrdering::Canonical)?;
    let q_retro = retrodiction_quasiprobability(&ev, ProjectorOrdering::Canonical)?;
    let records = RecordTable::new(&ev);
    let invariants = invariants(&ev, &q, &q_retro, &records)?;
    let marg = marginal_gamma(&q);
    let marg_retro = marginal_gamma(&q_retro);
    let ft_gamma = support_gammas(&q)
        .into_iter()
        .map(|g| {
            let value = conditional_ft(&q, &records, &g)?;
            let detailed_residual = match marg_retro.get(&g) {
                Some(&p) if p > CONDITIONING_THRESHOLD => {
                    Some(detailed_ft_check(&q, &q_retro, &records, &g)?)
                }
                _ => None,
            };
            Ok(FtGammaRow {
                gamma: g,
                p_gamma: marg[&g],
                exact: value,
                detailed_residual,
                mean: value,
                std: 0.0,
                consistent: (value - 1.0).abs() <= TOL_FT,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Analysis {
        evolved: ev,
        q,
        q_retro,
        records,
        invariants,
        ft_gamma,
    })
}

impl Analysis {
    /// Writes `trajectories.csv`, `ft_gamma.csv` (engine labels) and
    /// `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_trajectory_csv(
            &self.q,
            &self.q_retro,
            &self.records,
            false,
            create(dir, "trajectories.csv")?,
        )?;
        write_ft_gamma(&self.ft_gamma, create(dir, "ft_gamma.csv")?)?;
        let mut json = create(dir, "summary.json")?;
        serde_json::to_writer_pretty(&mut json, &self.summary())?;
        writeln!(json)?;
        json.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> AnalysisSummary {
        AnalysisSummary {
            label: self.evolved.setup.label.clone(),
            dims: self.evolved.dims(),
            invariants: self.invariants.clone(),
        }
    }
}

/// Runs the reference experiment end to end.
///
/// Exact mode evaluates every probability in closed form. Sampled and noisy
/// modes repeat the shot-based experiment `repetitions` times, repetition
/// `k` drawing its streams from `derive_seed(seed, k)`: the three amplitude
/// tables from children 0..3, the initial, final and Bell-basis
/// distributions from children 3, 4 and 5. Stochastic quantities always use
/// the exact spectra.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let Analysis {
        evolved: ev,
        q,
        q_retro,
        records,
        mut invariants,
        ft_gamma: mut ft_rows,
    } = analyze(&reference_setup(cfg.theta1, cfg.theta2, cfg.beta)?)?;
    let align = LabelAlignment::new(&ev)?;
    let gammas: Vec<GammaIndex> = ft_rows.iter().map(|r| r.gamma).collect();
    for row in &mut ft_rows {
        row.gamma = reference_gamma(&align, &row.gamma);
    }

    let p_l = bell_probabilities(cfg.theta1, cfg.theta2);
    let (p0, p1) = thermal_populations(cfg.beta);
    let p_n = [p0, p1];
    let exact = exact_tables()?;
    let assembled = align.reference_to_engine(&assemble_quasiprobability(&exact, &p_l, &p_n)?);
    invariants.assembly_error = Some(
        q.iter()
            .map(|(z, w)| (w - assembled.get(&z)).abs())
            .fold(0.0, f64::max),
    );
    invariants.update_passed();

    let experiments = Experiments::new(cfg)?;
    let [initial_exact, final_exact] = experiments.rows(|c, _| Experiments::exact(c))?;

    if cfg.mode == RunMode::Exact {
        return Ok(Report {
            initial: distribution_rows(&initial_exact, &[]),
            final_: distribution_rows(&final_exact, &[]),
            amplitudes: exact,
            ft_gamma: ft_rows,
            summary: Summary {
                config: cfg.clone(),
                invariants,
                sampled: None,
                mitigation: None,
            },
            q,
            q_retro,
            records,
        });
    }

    let noise = cfg.active_noise();
    let plans = AmplitudeFamily::ALL
        .iter()
        .map(|&f| match noise {
            Some(model) if cfg.mitigate => TablePlan::mitigated(f, model),
            _ => Ok(TablePlan::fixed(f, cfg.theta)),
        })
        .collect::<Result<Vec<_>>>()?;

    let repetition = |k: usize| -> Result<Repetition> {
        let seed = derive_seed(cfg.seed, k as u64);
        let tables: Vec<AmplitudeTable> = plans
            .iter()
            .enumerate()
            .map(|(i, plan)| {
                estimate_table(
                    plan,
                    cfg.shots,
                    noise,
                    derive_seed(seed, STREAM_TABLES + i as u64),
                )
            })
            .collect::<Result<_>>()?;
        let [a, b, c]: [AmplitudeTable; 3] = tables.try_into().expect("three families");
        let set = AmplitudeTables::new(a, b, c)?;
        let q_hat = align.reference_to_engine(&assemble_quasiprobability(&set, &p_l, &p_n)?);
        let ft = gammas
            .iter()
            .map(|g| conditional_ft(&q_hat, &records, g))
            .collect::<Result<Vec<_>>>()?;
        let rows = experiments.rows(|c, stream| {
            Ok(sample(c, cfg.shots, noise, derive_seed(seed, stream))?.frequencies())
        })?;
        Ok(Repetition {
            total: q_hat.total(),
            integral_ft: integral_ft(&q_hat, &records)?,
            mean_delta_iota: mean_delta_iota(&q_hat, &records)?,
            amplitude_error: set
                .iter()
                .map(AmplitudeTable::max_error)
                .fold(0.0, f64::max),
            tables: [set.bell_overlap, set.interaction, set.ret],
            rows,
            ft,
        })
    };
    let reps = (0..cfg.repetitions)
        .map(repetition)
        .collect::<Result<Vec<_>>>()?;

    let stat = |f: &dyn Fn(&Repetition) -> f64| {
        Estimate::from_samples(&reps.iter().map(f).collect::<Vec<_>>())
    };
    for (i, row) in ft_rows.iter_mut().enumerate() {
        let est = stat(&|r| r.ft[i]);
        row.mean = est.mean;
        row.std = est.std;
        row.consistent = (est.mean - 1.0).abs() <= 3.0 * est.std;
    }
    let averaged: Vec<AmplitudeTable> = (0..3)
        .map(|f| average_tables(&reps.iter().map(|r| r.tables[f].clone()).collect::<Vec<_>>()))
        .collect();
    let [a, b, c]: [AmplitudeTable; 3] = averaged.try_into().expect("three families");
    let initial_reps: Vec<_> = reps.iter().map(|r| r.rows[0].clone()).collect();
    let final_reps: Vec<_> = reps.iter().map(|r| r.rows[1].clone()).collect();

    let mitigation = plans.iter().any(|p| p.mitigated).then(|| {
        let searches: Vec<_> = plans
            .iter()
            .flat_map(|p| p.searches.iter().flatten())
            .collect();
        let n = searches.len() as f64;
        MitigationSummary {
            tasks: searches.len(),
            not_worse: searches
                .iter()
                .filter(|m| m.residual <= m.baseline_residual)
                .count(),
            mean_residual: searches.iter().map(|m| m.residual).sum::<f64>() / n,
            mean_baseline_residual: searches.iter().map(|m| m.baseline_residual).sum::<f64>() / n,
        }
    });

    Ok(Report {
        initial: distribution_rows(&initial_exact, &initial_reps),
        final_: distribution_rows(&final_exact, &final_reps),
        amplitudes: AmplitudeTables::new(a, b, c)?,
        summary: Summary {
            config: cfg.clone(),
            invariants,
            sampled: Some(SampledSummary {
                total: stat(&|r| r.total),
                integral_ft: stat(&|r| r.integral_ft),
                mean_delta_iota: stat(&|r| r.mean_delta_iota),
                amplitude_error: stat(&|r| r.amplitude_error),
                gammas_consistent: ft_rows.iter().filter(|r| r.consistent).count(),
                gammas: ft_rows.len(),
            }),
            mitigation,
        },
        ft_gamma: ft_rows,
        q,
        q_retro,
        records,
    })
}
