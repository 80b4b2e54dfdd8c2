use serde::{Deserialize, Serialize};

use super::{delta_iota_moment, quasiprobability, ProjectorOrdering, RecordTable};
use crate::error::{Error, Result};
use crate::qlinalg::{unitary_from_hermitian, ComplexMatrix, DensityMatrix};
use crate::tripartite::{delta_mutual_information, evolve, TripartiteSetup};

/// Floor below which a change in the residual ratio is not significant.
const NOISE_FLOOR: f64 = 1e-12;
const TOL_TRIVIAL: f64 = 1e-12;

/// One-parameter family of setups that is trivial at `eps = 0`.
pub trait SetupFamily {
    fn setup(&self, eps: f64) -> Result<TripartiteSetup>;
}

impl<F> SetupFamily for F
where
    F: Fn(f64) -> Result<TripartiteSetup>,
{
    fn setup(&self, eps: f64) -> Result<TripartiteSetup> {
        self(eps)
    }
}

/// Fixed states with `U(eps) = exp(-i eps G)` on `S (x) E`.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    base: TripartiteSetup,
    generator: ComplexMatrix,
}

impl UnitaryFamily {
    pub fn new(base: TripartiteSetup, generator: ComplexMatrix) -> Result<Self> {
        let (_, ds, de) = base.dims();
        if generator.rows() != ds * de || !generator.is_square() {
            return Err(Error::Shape(format!("generator must be {0}x{0}", ds * de)));
        }
        let err = generator.hermiticity_error();
        if err > crate::qlinalg::TOL_HERM {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self { base, generator })
    }
}

impl SetupFamily for UnitaryFamily {
    fn setup(&self, eps: f64) -> Result<TripartiteSetup> {
        self.base
            .with_unitary(unitary_from_hermitian(&self.generator, eps)?)
    }
}

/// `U(eps) = exp(-i eps G)` with both input states pulled towards the
/// maximally mixed state, `rho(eps) = (1 - eps) I/d + eps rho_0`.
///
/// With fixed states the ratio `|V - 2 Delta I| / Delta I` tends to a
/// state-dependent constant of order `<Delta iota^2>` as `eps -> 0`. Scaling
/// the states keeps every `Delta iota` of order `eps`, which is the regime
/// where the remainder of the relation vanishes.
#[derive(Clone, Debug)]
pub struct NearEquilibriumFamily {
    inner: UnitaryFamily,
}

impl NearEquilibriumFamily {
    /// `eps` must stay in `[0, 1]`.
    pub fn new(base: TripartiteSetup, generator: ComplexMatrix) -> Result<Self> {
        Ok(Self {
            inner: UnitaryFamily::new(base, generator)?,
        })
    }
}

fn towards_mixed(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    let d = rho.dim();
    let m = &ComplexMatrix::identity(d).scale_real((1.0 - eps) / d as f64)
        + &rho.matrix().scale_real(eps);
    DensityMatrix::new(m, rho.subsystem_dims().to_vec())
}

impl SetupFamily for NearEquilibriumFamily {
    fn setup(&self, eps: f64) -> Result<TripartiteSetup> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Config(format!("mixing weight {eps} outside [0, 1]")));
        }
        let base = &self.inner.base;
        TripartiteSetup::new(
            towards_mixed(base.rho_rs(), eps)?,
            towards_mixed(base.rho_e(), eps)?,
            unitary_from_hermitian(&self.inner.generator, eps)?,
            base.dims(),
            format!("{} (near equilibrium, eps={eps})", base.label),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdrRow {
    pub eps: f64,
    pub delta_i: f64,
    /// `<(Delta iota - Delta I)^2>_Q`
    pub variance: f64,
    pub two_delta_i: f64,
    pub residual: f64,
    /// `residual / Delta I`; absent when `Delta I` vanishes.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdrReport {
    pub rows: Vec<FdrRow>,
    /// Whether the residual ratio strictly decreases as `eps` shrinks.
    pub ratio_strictly_decreasing: bool,
}

/// Compares the variance of `Delta iota` with `2 Delta I` along the family.
///
/// The family must act trivially at `eps = 0` (final state equal to the
/// initial one). Rows come back in the order of `eps_list`.
pub fn fdr_check(family: &dyn SetupFamily, eps_list: &[f64]) -> Result<FdrReport> {
    let trivial = evolve(&family.setup(0.0)?)?;
    let drift = trivial
        .rho_final
        .matrix()
        .max_abs_diff(trivial.rho_initial.matrix());
    if drift > TOL_TRIVIAL {
        return Err(Error::Config(format!(
            "family is not trivial at eps = 0 (state changes by {drift:e})"
        )));
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let ev = evolve(&family.setup(eps)?)?;
        let q = quasiprobability(&ev, ProjectorOrdering::Canonical)?;
        let records = RecordTable::new(&ev);
        let delta_i = delta_mutual_information(&ev)?;
        let variance = delta_iota_moment(&q, &records, |x| (x - delta_i).powi(2))?;
        let residual = (variance - 2.0 * delta_i).abs();
        let ratio = (delta_i.abs() > NOISE_FLOOR).then(|| residual / delta_i);
        rows.push(FdrRow {
            eps,
            delta_i,
            variance,
            two_delta_i: 2.0 * delta_i,
            residual,
            ratio,
        });
    }
    let mut by_eps: Vec<&FdrRow> = rows.iter().filter(|r| r.ratio.is_some()).collect();
    by_eps.sort_by(|a, b| b.eps.abs().total_cmp(&a.eps.abs()));
    let ratio_strictly_decreasing = by_eps.windows(2).all(|w| {
        let (prev, next) = (w[0].ratio.unwrap(), w[1].ratio.unwrap());
        next < prev || (prev < NOISE_FLOOR && next < NOISE_FLOOR)
    });
    Ok(FdrReport {
        rows,
        ratio_strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::experiment::u_se_generator;
    use crate::tripartite::{reference_setup, REFERENCE_THETA1, REFERENCE_THETA2};

    #[test]
    fn zero_eps_row_is_trivial() {
        let base = reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap();
        let family = UnitaryFamily::new(base, u_se_generator()).unwrap();
        let report = fdr_check(&family, &[0.0]).unwrap();
        assert!(report.rows[0].delta_i.abs() < 1e-12);
        assert!(report.rows[0].variance.abs() < 1e-12);
        assert_eq!(report.rows[0].ratio, None);
    }

    #[test]
    fn rejects_family_that_moves_at_zero() {
        let base = reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap();
        let family = move |_eps: f64| Ok(base.clone());
        assert!(matches!(fdr_check(&family, &[0.1]), Err(Error::Config(_))));
    }

    #[test]
    fn near_equilibrium_ratio_decays() {
        let base = reference_setup(REFERENCE_THETA1, REFERENCE_THETA2, 1.0).unwrap();
        let family = NearEquilibriumFamily::new(base, u_se_generator()).unwrap();
        let report = fdr_check(&family, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert!(report.ratio_strictly_decreasing);
        assert!(family.setup(1.5).is_err());
    }
}
