use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::ComplexMatrix;
use crate::rng::{derive_seed, rng_from_seed};
use crate::trajectories::{
    average_entropy_productions, conditional_ft, detailed_ft_check, entropy_production_fts,
    integral_ft, marginal_gamma, marginal_tau, mean_delta_iota, quasiprobability,
    retrodiction_quasiprobability, support_gammas, two_point_gamma, two_point_tau,
    ProjectorOrdering, RecordTable, CONDITIONING_THRESHOLD,
};
use crate::tripartite::{
    check_preservation, cmi_identity, delta_mutual_information, evolve, random_setup,
};

/// A `Q[zeta]` at or below this counts as a negativity witness.
pub const NEGATIVITY_WITNESS: f64 = -1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub dims: (usize, usize, usize),
    /// Replace the random interaction by the identity.
    pub identity_unitary: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            dims: (2, 2, 2),
            identity_unitary: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
    /// Largest deviation seen, in the units of the check.
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub seed: u64,
    pub options: SweepOptions,
    pub checks: BTreeMap<String, CheckCount>,
    /// Setups with some `Q[zeta] <= -1e-6`.
    pub negativity_witnesses: usize,
    pub all_passed: bool,
}

/// `(name, deviation, tolerance)` for one setup.
type Checks = Vec<(&'static str, f64, f64)>;

fn max_error<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    a.iter()
        .map(|(k, v)| (v - b.get(k).copied().unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max)
}

fn evaluate(seed: u64, options: &SweepOptions) -> Result<(Checks, f64)> {
    let mut setup = random_setup(options.dims, &mut rng_from_seed(seed))?;
    if options.identity_unitary {
        setup = setup.with_unitary(ComplexMatrix::identity(options.dims.1 * options.dims.2))?;
    }
    let ev = evolve(&setup)?;
    let q = quasiprobability(&ev, ProjectorOrdering::Canonical)?;
    let q_retro = retrodiction_quasiprobability(&ev, ProjectorOrdering::Canonical)?;
    let records = RecordTable::new(&ev);
    let delta = delta_mutual_information(&ev)?;
    let (ft_s, ft_sr) = entropy_production_fts(&q, &records)?;
    let (sigma_s, sigma_sr) = average_entropy_productions(&q, &records)?;
    let (pres_l, pres_r) = check_preservation(&ev)?;
    let (_, cmi) = cmi_identity(&ev)?;

    let gamma = marginal_gamma(&q);
    let tau = marginal_tau(&q);
    let min_marginal = gamma
        .values()
        .chain(tau.values())
        .copied()
        .fold(0.0, f64::min);
    let retro_gamma = marginal_gamma(&q_retro);
    let mut detailed: f64 = 0.0;
    let mut conditional: f64 = 0.0;
    for g in support_gammas(&q) {
        conditional = conditional.max((conditional_ft(&q, &records, &g)? - 1.0).abs());
        if retro_gamma
            .get(&g)
            .is_some_and(|&p| p > CONDITIONING_THRESHOLD)
        {
            detailed = detailed.max(detailed_ft_check(&q, &q_retro, &records, &g)?);
        }
    }

    let checks = vec![
        ("normalization", (q.total() - 1.0).abs(), 1e-10),
        ("normalization_retro", (q_retro.total() - 1.0).abs(), 1e-10),
        (
            "mean_delta_iota",
            (mean_delta_iota(&q, &records)? - delta).abs(),
            1e-9,
        ),
        (
            "integral_ft",
            (integral_ft(&q, &records)? - 1.0).abs(),
            1e-8,
        ),
        ("entropy_production_ft_s", (ft_s - 1.0).abs(), 1e-8),
        ("entropy_production_ft_sr", (ft_sr - 1.0).abs(), 1e-8),
        (
            "mean_sigma_s",
            (sigma_s - ev.final_system_environment_information()?).abs(),
            1e-9,
        ),
        (
            "mean_sigma_sr",
            (sigma_sr - ev.final_joint_environment_information()?).abs(),
            1e-9,
        ),
        ("conditional_ft", conditional, 1e-9),
        ("detailed_relation", detailed, 1e-9),
        (
            "marginal_closed_forms",
            max_error(&gamma, &two_point_gamma(&ev)).max(max_error(&tau, &two_point_tau(&ev))),
            1e-10,
        ),
        ("marginal_nonnegativity", -min_marginal, 1e-12),
        ("data_processing", (-delta).max(0.0), 1e-9),
        ("preservation", (pres_l - pres_r).abs(), 1e-9),
        ("cmi_identity", (delta - cmi).abs(), 1e-9),
    ];
    Ok((checks, q.min()))
}

/// Checks every trajectory identity on `n` random setups; setup `i` is drawn
/// from `derive_seed(seed, i)`. A setup the engine rejects counts as a
/// failed `evaluation`.
pub fn sweep(n: usize, seed: u64, options: &SweepOptions) -> Result<SweepSummary> {
    if n == 0 {
        return Err(Error::Config("sweep needs at least one setup".into()));
    }
    let mut checks: BTreeMap<String, CheckCount> = BTreeMap::new();
    let mut negativity_witnesses = 0;
    for i in 0..n {
        let evaluation = checks.entry("evaluation".into()).or_default();
        match evaluate(derive_seed(seed, i as u64), options) {
            Ok((results, min_q)) => {
                evaluation.passed += 1;
                if min_q <= NEGATIVITY_WITNESS {
                    negativity_witnesses += 1;
                }
                for (name, deviation, tol) in results {
                    let count = checks.entry(name.to_string()).or_default();
                    if deviation <= tol {
                        count.passed += 1;
                    } else {
                        count.failed += 1;
                    }
                    count.worst = count.worst.max(deviation);
                }
            }
            Err(_) => evaluation.failed += 1,
        }
    }
    let all_passed = checks.values().all(|c| c.failed == 0);
    Ok(SweepSummary {
        n,
        seed,
        options: options.clone(),
        checks,
        negativity_witnesses,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_setups_is_an_error() {
        assert!(sweep(0, 1, &SweepOptions::default()).is_err());
    }

    #[test]
    fn identity_interaction_passes_trivially() {
        let options = SweepOptions {
            identity_unitary: true,
            ..Default::default()
        };
        let s = sweep(1, 3, &options).unwrap();
        assert!(s.all_passed, "{:?}", s.checks);
        assert_eq!(s.checks["mean_delta_iota"].passed, 1);
    }
}
