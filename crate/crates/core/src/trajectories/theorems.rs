use std::collections::BTreeMap;

use super::{
    pairwise_sum, GammaIndex, QuasiDistribution, RecordTable, StochasticRecord, TauIndex,
    TrajectoryIndex,
};
use crate::error::{Error, Result};
use crate::qlinalg::{inner, kron_vec};
use crate::tripartite::EvolvedState;

/// Trajectories with `|Q| <= SUPPORT_THRESHOLD` contribute exactly zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-14;
/// Smallest marginal probability a conditional average may divide by.
pub const CONDITIONING_THRESHOLD: f64 = 1e-12;

fn on_support(q: f64) -> bool {
    q.abs() > SUPPORT_THRESHOLD
}

fn check_shapes(q: &QuasiDistribution, records: &RecordTable) -> Result<()> {
    if q.shape != records.shape {
        return Err(Error::Shape(
            "records and distribution have different label shapes".into(),
        ));
    }
    Ok(())
}

/// `sum_zeta Q[zeta] f(zeta)` over the support. Errors if `f` is not finite
/// somewhere on the support.
pub fn average(q: &QuasiDistribution, f: impl Fn(&TrajectoryIndex) -> f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(q.values().len());
    for (z, w) in q.iter() {
        if !on_support(w) {
            continue;
        }
        let v = f(&z);
        if !v.is_finite() {
            return Err(Error::NonFiniteOnSupport(format!("{:?}", z.labels())));
        }
        terms.push(w * v);
    }
    Ok(pairwise_sum(&terms))
}

/// `sum Q g(field)` over trajectories accepted by `keep`; a missing field on
/// the support is a rank-deficiency error.
fn record_sum(
    q: &QuasiDistribution,
    records: &RecordTable,
    field: impl Fn(&StochasticRecord) -> Option<f64>,
    g: impl Fn(f64) -> f64,
    keep: impl Fn(&TrajectoryIndex) -> bool,
) -> Result<f64> {
    check_shapes(q, records)?;
    let mut terms = Vec::new();
    for (z, w) in q.iter() {
        if !on_support(w) || !keep(&z) {
            continue;
        }
        let Some(x) = field(records.get(&z)) else {
            return Err(Error::RankDeficient {
                context: format!("{:?}", z.labels()),
                weight: w,
            });
        };
        terms.push(w * g(x));
    }
    Ok(pairwise_sum(&terms))
}

/// `<Delta iota>_Q`
pub fn mean_delta_iota(q: &QuasiDistribution, records: &RecordTable) -> Result<f64> {
    record_sum(q, records, |r| r.delta_iota, |x| x, |_| true)
}

/// `<e^{-Delta iota}>_Q`
pub fn integral_ft(q: &QuasiDistribution, records: &RecordTable) -> Result<f64> {
    record_sum(q, records, |r| r.delta_iota, |x| (-x).exp(), |_| true)
}

/// `(<e^{-sigma_S}>_Q, <e^{-sigma_SR}>_Q)`
pub fn entropy_production_fts(q: &QuasiDistribution, records: &RecordTable) -> Result<(f64, f64)> {
    Ok((
        record_sum(q, records, |r| r.sigma_s, |x| (-x).exp(), |_| true)?,
        record_sum(q, records, |r| r.sigma_sr, |x| (-x).exp(), |_| true)?,
    ))
}

/// `(<sigma_S>_Q, <sigma_SR>_Q)`. Both only depend on a marginal, so these
/// are also the averages over `P[gamma]` and `P'[tau]`.
pub fn average_entropy_productions(
    q: &QuasiDistribution,
    records: &RecordTable,
) -> Result<(f64, f64)> {
    Ok((
        record_sum(q, records, |r| r.sigma_s, |x| x, |_| true)?,
        record_sum(q, records, |r| r.sigma_sr, |x| x, |_| true)?,
    ))
}

fn marginal<K: Ord + Copy>(
    q: &QuasiDistribution,
    key: impl Fn(&TrajectoryIndex) -> K,
) -> BTreeMap<K, f64> {
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (z, w) in q.iter() {
        groups.entry(key(&z)).or_default().push(w);
    }
    groups
        .into_iter()
        .map(|(k, v)| (k, pairwise_sum(&v)))
        .collect()
}

/// `P[gamma] = sum over (r, l, r', l')`.
pub fn marginal_gamma(q: &QuasiDistribution) -> BTreeMap<GammaIndex, f64> {
    marginal(q, TrajectoryIndex::gamma)
}

/// `P'[tau] = sum over (r, s, r', s')`.
pub fn marginal_tau(q: &QuasiDistribution) -> BTreeMap<TauIndex, f64> {
    marginal(q, TrajectoryIndex::tau)
}

/// Every `gamma` whose marginal exceeds the conditioning threshold, in
/// label order.
pub fn support_gammas(q: &QuasiDistribution) -> Vec<GammaIndex> {
    marginal_gamma(q)
        .into_iter()
        .filter(|&(_, p)| p > CONDITIONING_THRESHOLD)
        .map(|(g, _)| g)
        .collect()
}

fn gamma_probability(q: &QuasiDistribution, gamma: &GammaIndex) -> Result<f64> {
    let values: Vec<f64> = q
        .iter()
        .filter(|(z, _)| z.gamma() == *gamma)
        .map(|(_, w)| w)
        .collect();
    let p = pairwise_sum(&values);
    if p <= CONDITIONING_THRESHOLD {
        return Err(Error::ConditioningTooSmall(p));
    }
    Ok(p)
}

/// `sum_{zeta in gamma} (Q[zeta] / P[gamma]) e^{-Delta iota}`
pub fn conditional_ft(
    q: &QuasiDistribution,
    records: &RecordTable,
    gamma: &GammaIndex,
) -> Result<f64> {
    let p = gamma_probability(q, gamma)?;
    let sum = record_sum(
        q,
        records,
        |r| r.delta_iota,
        |x| (-x).exp(),
        |z| z.gamma() == *gamma,
    )?;
    Ok(sum / p)
}

/// Largest `|(Q / P) e^{-Delta iota} - Q~ / P~|` over the trajectories of
/// `gamma`.
pub fn detailed_ft_check(
    q: &QuasiDistribution,
    q_retro: &QuasiDistribution,
    records: &RecordTable,
    gamma: &GammaIndex,
) -> Result<f64> {
    check_shapes(q, records)?;
    check_shapes(q_retro, records)?;
    let p = gamma_probability(q, gamma)?;
    let p_retro = gamma_probability(q_retro, gamma)?;
    let mut worst: f64 = 0.0;
    for (z, w) in q.iter() {
        if z.gamma() != *gamma {
            continue;
        }
        let w_retro = q_retro.get(&z);
        match records.get(&z).delta_iota {
            Some(x) => {
                let resid = (w / p * (-x).exp() - w_retro / p_retro).abs();
                worst = worst.max(resid);
            }
            None if on_support(w) || on_support(w_retro) => {
                return Err(Error::RankDeficient {
                    context: format!("{:?}", z.labels()),
                    weight: if on_support(w) { w } else { w_retro },
                });
            }
            None => {}
        }
    }
    Ok(worst)
}

/// `<g(Delta iota)>_Q` for an arbitrary `g`.
pub fn delta_iota_moment(
    q: &QuasiDistribution,
    records: &RecordTable,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    record_sum(q, records, |r| r.delta_iota, g, |_| true)
}

/// Two-point-measurement closed form of `P[gamma]`:
/// `p_s p_n |<s'n'|U_SE|sn>|^2`.
pub fn two_point_gamma(ev: &EvolvedState) -> BTreeMap<GammaIndex, f64> {
    let (i, f) = (&ev.initial, &ev.final_);
    let u = ev.setup.u_se();
    let mut out = BTreeMap::new();
    for (s, ps) in i.s.eigenvalues.iter().enumerate() {
        for (n, pn) in i.e.eigenvalues.iter().enumerate() {
            let moved = u.apply(&kron_vec(&i.s.basis_vectors[s], &i.e.basis_vectors[n]));
            for s_f in 0..f.s.eigenvalues.len() {
                for n_f in 0..f.e.eigenvalues.len() {
                    let a = inner(
                        &kron_vec(&f.s.basis_vectors[s_f], &f.e.basis_vectors[n_f]),
                        &moved,
                    );
                    out.insert(GammaIndex::new(s, n, s_f, n_f), ps * pn * a.norm_sqr());
                }
            }
        }
    }
    out
}

/// Two-point-measurement closed form of `P'[tau]`:
/// `p_l p_n |<l'n'|1_R (x) U_SE|ln>|^2`.
pub fn two_point_tau(ev: &EvolvedState) -> BTreeMap<TauIndex, f64> {
    let (i, f) = (&ev.initial, &ev.final_);
    let u = &ev.full_unitary;
    let mut out = BTreeMap::new();
    for (l, pl) in i.rs.eigenvalues.iter().enumerate() {
        for (n, pn) in i.e.eigenvalues.iter().enumerate() {
            let moved = u.apply(&kron_vec(&i.rs.basis_vectors[l], &i.e.basis_vectors[n]));
            for l_f in 0..f.rs.eigenvalues.len() {
                for n_f in 0..f.e.eigenvalues.len() {
                    let a = inner(
                        &kron_vec(&f.rs.basis_vectors[l_f], &f.e.basis_vectors[n_f]),
                        &moved,
                    );
                    out.insert(TauIndex { l, l_f, n, n_f }, pl * pn * a.norm_sqr());
                }
            }
        }
    }
    out
}
