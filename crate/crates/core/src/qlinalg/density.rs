//! Density matrices over multipartite Hilbert spaces and their entropy functionals.

use num_complex::Complex64;

use super::eig::{
    hermitian_eig, hermitian_eigenvalues, EigOptions, SpectralDecomposition, TOL_HERM,
};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const TOL_TRACE: f64 = 1e-10;
const TOL_POSITIVE: f64 = 1e-10;

/// A unit-trace positive semidefinite Hermitian matrix together with the local
/// dimensions of its tensor factors (first factor major).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    subsystem_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        let state = Self::from_parts(matrix, subsystem_dims)?;
        let herm = state.matrix.hermiticity_error();
        if herm > TOL_HERM {
            return Err(Error::NotHermitian(herm));
        }
        let tr = state.matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&state.matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -TOL_POSITIVE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(state)
    }

    /// Shape-checked constructor that trusts the caller on positivity and trace.
    pub(crate) fn from_parts(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        if subsystem_dims.is_empty() || subsystem_dims.contains(&0) {
            return Err(Error::Shape(format!(
                "bad subsystem dims {subsystem_dims:?}"
            )));
        }
        let product: usize = subsystem_dims.iter().product();
        if product != matrix.rows() {
            return Err(Error::Shape(format!(
                "subsystem dims {subsystem_dims:?} do not multiply to {}",
                matrix.rows()
            )));
        }
        Ok(Self {
            matrix,
            subsystem_dims,
        })
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &[Complex64], subsystem_dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi), subsystem_dims)
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(subsystem_dims: Vec<usize>) -> Self {
        let d: usize = subsystem_dims.iter().product();
        let m = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        Self {
            matrix: m,
            subsystem_dims,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.subsystem_dims.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.subsystem_dims.clone();
        dims.extend_from_slice(&other.subsystem_dims);
        Self {
            matrix: self.matrix.kron(&other.matrix),
            subsystem_dims: dims,
        }
    }

    /// `U rho U^dagger` for a unitary on the full space.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.rows() != self.dim() || !unitary.is_square() {
            return Err(Error::Shape("unitary dimension mismatch".into()));
        }
        Self::from_parts(
            self.matrix.conjugate_by(unitary).hermitian_part(),
            self.subsystem_dims.clone(),
        )
    }

    /// Reduced state on the subsystems in `keep`, returned in their original
    /// relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.subsystem_dims.len();
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        if kept.is_empty() {
            return Err(Error::Partition("keep set is empty".into()));
        }
        if kept.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Partition(format!("duplicate index in {keep:?}")));
        }
        if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
            return Err(Error::Partition(format!(
                "subsystem {bad} out of range for {n} subsystems"
            )));
        }
        if kept.len() == n {
            return Ok(self.clone());
        }

        let dims = &self.subsystem_dims;
        let total = self.dim();
        let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
        let out_dim: usize = kept_dims.iter().product();

        // Split each full index into (kept index, traced index).
        let mut split = Vec::with_capacity(total);
        for a in 0..total {
            let mut rem = a;
            let mut digits = vec![0usize; n];
            for k in (0..n).rev() {
                digits[k] = rem % dims[k];
                rem /= dims[k];
            }
            let (mut ki, mut ti) = (0usize, 0usize);
            for k in 0..n {
                if kept.binary_search(&k).is_ok() {
                    ki = ki * dims[k] + digits[k];
                } else {
                    ti = ti * dims[k] + digits[k];
                }
            }
            split.push((ki, ti));
        }

        let mut out = ComplexMatrix::zeros(out_dim, out_dim);
        for a in 0..total {
            let (ka, ta) = split[a];
            for b in 0..total {
                let (kb, tb) = split[b];
                if ta == tb {
                    let z = out.get(ka, kb) + self.matrix.get(a, b);
                    out.set(ka, kb, z);
                }
            }
        }
        Self::from_parts(out, kept_dims)
    }

    pub fn spectrum(&self, options: &EigOptions) -> Result<SpectralDecomposition> {
        hermitian_eig(&self.matrix, options)
    }

    /// `S(rho) = -Tr rho ln rho` in nats, with `0 ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        let values = hermitian_eigenvalues(&self.matrix).unwrap_or_default();
        entropy_of_spectrum(&values)
    }

    /// `I(A;B) = S(A) + S(B) - S(AB)`; `A` and `B` must partition all subsystems.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.check_partition(&[a, b])?;
        let sa = self.partial_trace(a)?.von_neumann_entropy();
        let sb = self.partial_trace(b)?.von_neumann_entropy();
        Ok(sa + sb - self.von_neumann_entropy())
    }

    /// `I(A;B|C) = S(AC) + S(BC) - S(ABC) - S(C)`.
    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        self.check_partition(&[a, b, c])?;
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let s_ac = self.partial_trace(&ac)?.von_neumann_entropy();
        let s_bc = self.partial_trace(&bc)?.von_neumann_entropy();
        let s_c = self.partial_trace(c)?.von_neumann_entropy();
        Ok(s_ac + s_bc - self.von_neumann_entropy() - s_c)
    }

    fn check_partition(&self, parts: &[&[usize]]) -> Result<()> {
        let n = self.num_subsystems();
        let mut seen = vec![false; n];
        for part in parts {
            if part.is_empty() {
                return Err(Error::Partition("empty part".into()));
            }
            for &k in *part {
                if k >= n {
                    return Err(Error::Partition(format!("subsystem {k} out of range")));
                }
                if seen[k] {
                    return Err(Error::Partition(format!("subsystem {k} listed twice")));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Partition("parts do not cover all subsystems".into()));
        }
        Ok(())
    }

    /// Populations in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.von_neumann_entropy()
}

pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    rho.mutual_information(a, b)
}

pub fn conditional_mutual_information(
    rho: &DensityMatrix,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    rho.conditional_mutual_information(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::matrix::C0;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn phi_plus() -> DensityMatrix {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&[s, C0, C0, s], vec![2, 2]).unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let reduced = phi_plus().partial_trace(&[0]).unwrap();
        assert!(
            reduced
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn product_state_marginals() {
        let a = DensityMatrix::new(ComplexMatrix::diagonal(&[0.8, 0.2]), vec![2]).unwrap();
        let b = DensityMatrix::new(ComplexMatrix::diagonal(&[0.1, 0.6, 0.3]), vec![3]).unwrap();
        let ab = a.tensor(&b);
        assert!(
            ab.partial_trace(&[0])
                .unwrap()
                .matrix()
                .max_abs_diff(a.matrix())
                < 1e-15
        );
        assert!(
            ab.partial_trace(&[1])
                .unwrap()
                .matrix()
                .max_abs_diff(b.matrix())
                < 1e-15
        );
        assert!(ab.mutual_information(&[0], &[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_sets() {
        let rho = phi_plus();
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::Partition(_))));
        assert!(matches!(
            rho.partial_trace(&[0, 0]),
            Err(Error::Partition(_))
        ));
        assert!(matches!(rho.partial_trace(&[]), Err(Error::Partition(_))));
    }

    #[test]
    fn entropies() {
        assert!(phi_plus().von_neumann_entropy().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert!((mixed.von_neumann_entropy() - LN_2).abs() < 1e-15);
        assert!((phi_plus().mutual_information(&[0], &[1]).unwrap() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn bad_partitions() {
        let rho = phi_plus();
        assert!(rho.mutual_information(&[0], &[0]).is_err());
        assert!(rho.mutual_information(&[0], &[]).is_err());
        assert!(rho.mutual_information(&[0], &[2]).is_err());
    }

    #[test]
    fn validation() {
        let not_unit = ComplexMatrix::diagonal(&[0.5, 0.6]);
        assert!(matches!(
            DensityMatrix::new(not_unit, vec![2]),
            Err(Error::InvalidState(_))
        ));
        let negative = ComplexMatrix::diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative, vec![2]).is_err());
        let bad_dims = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            DensityMatrix::new(bad_dims, vec![3]),
            Err(Error::Shape(_))
        ));
    }
}
