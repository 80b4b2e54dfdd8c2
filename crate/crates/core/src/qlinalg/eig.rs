//! Hermitian eigendecomposition with a canonical, reproducible eigenbasis.
//!
//! The raw solver output is post-processed so that the basis depends only on
//! the input matrix and not on solver internals:
//!
//! * eigenvalues are sorted in descending order;
//! * eigenvalues closer than [`TOL_DEGEN`] to the largest value of their group
//!   form one degenerate block;
//! * a degenerate block is re-spanned by Gram-Schmidt over the projections of
//!   the computational basis vectors `e_0, e_1, ...` onto the block subspace,
//!   in index order, accepting `e_j` when its residual has squared norm above
//!   `1 / (4 d)`. Vectors inside a block are ordered by the index of the
//!   accepted `e_j`. A block aligned with the computational basis therefore
//!   comes back as computational basis vectors in increasing index order;
//! * every basis vector is rephased so that its largest-magnitude component
//!   (the first one, among components within `1e-9` of the maximum) is real
//!   and positive.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{inner, norm, ComplexMatrix, C0};
use crate::error::{Error, Result};

/// Maximum `|M - M^dagger|` accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Eigenvalues closer than this are treated as degenerate.
pub const TOL_DEGEN: f64 = 1e-9;

const PHASE_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EigOptions {
    /// Return one projector per degenerate block instead of rank-1 projectors.
    pub merge_degenerate: bool,
}

/// `M = sum_i lambda_i Pi_i` with `lambda` descending.
///
/// `basis_vectors` always holds the full orthonormal eigenbasis. When the
/// decomposition was built with degeneracy merging, consecutive runs of
/// `multiplicities[i]` basis vectors span `projectors[i]`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    pub basis_vectors: Vec<Vec<Complex64>>,
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.basis_vectors.first().map_or(0, Vec::len)
    }

    /// Number of labels (eigenvalue entries).
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `sum_i lambda_i Pi_i`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (lambda, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = &acc + &p.scale_real(*lambda);
        }
        acc
    }

    /// Rank-1 decomposition from a caller-supplied orthonormal eigenbasis of
    /// `m`. The basis order is kept as given, so labels follow the caller's
    /// ordering; eigenvalues are Rayleigh quotients.
    pub fn from_basis(m: &ComplexMatrix, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let herm_err = m.hermiticity_error();
        if herm_err > TOL_HERM {
            return Err(Error::NotHermitian(herm_err));
        }
        let d = m.rows();
        if basis.len() != d || basis.iter().any(|v| v.len() != d) {
            return Err(Error::Shape(format!(
                "eigenbasis override needs {d} vectors of length {d}"
            )));
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (inner(a, b) - Complex64::new(expected, 0.0)).norm() > 1e-10 {
                    return Err(Error::Eigen(format!(
                        "override basis is not orthonormal at ({i}, {j})"
                    )));
                }
            }
        }
        let mut eigenvalues = Vec::with_capacity(d);
        for (i, v) in basis.iter().enumerate() {
            let mv = m.apply(v);
            let lambda = inner(v, &mv).re;
            let resid = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if resid > 1e-9 {
                return Err(Error::Eigen(format!(
                    "override vector {i} is not an eigenvector (residual {resid:e})"
                )));
            }
            eigenvalues.push(lambda);
        }
        let projectors = basis.iter().map(|v| ComplexMatrix::outer(v)).collect();
        Ok(Self {
            eigenvalues,
            projectors,
            basis_vectors: basis,
            multiplicities: vec![1; d],
        })
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let err = m.hermiticity_error();
    if err > TOL_HERM {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let sym = to_nalgebra(&m.hermitian_part());
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Canonical eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix, options: &EigOptions) -> Result<SpectralDecomposition> {
    check_hermitian(m)?;
    let d = m.rows();
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&m.hermitian_part()));

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    // Group into degenerate blocks relative to each block's leading value.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let lambda = eig.eigenvalues[idx];
        match blocks.last_mut() {
            Some(block) if eig.eigenvalues[block[0]] - lambda <= TOL_DEGEN => block.push(idx),
            _ => blocks.push(vec![idx]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(d);
    let mut basis_vectors = Vec::with_capacity(d);
    let mut merged_values = Vec::with_capacity(blocks.len());
    let mut multiplicities = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let raw: Vec<Vec<Complex64>> = block
            .iter()
            .map(|&idx| eig.eigenvectors.column(idx).iter().copied().collect())
            .collect();
        let vectors = if raw.len() == 1 {
            let mut v = raw.into_iter().next().unwrap_or_default();
            let n = norm(&v);
            v.iter_mut().for_each(|z| *z /= n);
            vec![v]
        } else {
            canonical_block_basis(&raw, d)?
        };
        let mut sum = 0.0;
        for (&idx, mut v) in block.iter().zip(vectors) {
            fix_phase(&mut v);
            eigenvalues.push(eig.eigenvalues[idx]);
            sum += eig.eigenvalues[idx];
            basis_vectors.push(v);
        }
        merged_values.push(sum / block.len() as f64);
        multiplicities.push(block.len());
    }

    if options.merge_degenerate {
        let mut projectors = Vec::with_capacity(blocks.len());
        let mut offset = 0;
        for &k in &multiplicities {
            let mut p = ComplexMatrix::zeros(d, d);
            for v in &basis_vectors[offset..offset + k] {
                p = &p + &ComplexMatrix::outer(v);
            }
            projectors.push(p);
            offset += k;
        }
        Ok(SpectralDecomposition {
            eigenvalues: merged_values,
            projectors,
            basis_vectors,
            multiplicities,
        })
    } else {
        let projectors = basis_vectors
            .iter()
            .map(|v| ComplexMatrix::outer(v))
            .collect();
        Ok(SpectralDecomposition {
            eigenvalues,
            projectors,
            basis_vectors,
            multiplicities: vec![1; d],
        })
    }
}

/// Re-span a degenerate eigenspace from the computational basis.
fn canonical_block_basis(raw: &[Vec<Complex64>], d: usize) -> Result<Vec<Vec<Complex64>>> {
    let k = raw.len();
    // Orthonormalize the solver vectors first so the subspace projector is exact.
    let span = gram_schmidt(raw);
    let threshold = 1.0 / (4.0 * d as f64);
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for j in 0..d {
        if accepted.len() == k {
            break;
        }
        // P e_j = sum_v v * conj(v_j)
        let mut w = vec![C0; d];
        for v in &span {
            let coeff = v[j].conj();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi += vi * coeff;
            }
        }
        for _ in 0..2 {
            for a in &accepted {
                let overlap = inner(a, &w);
                for (wi, ai) in w.iter_mut().zip(a) {
                    *wi -= ai * overlap;
                }
            }
        }
        let n = norm(&w);
        if n * n > threshold {
            w.iter_mut().for_each(|z| *z /= n);
            accepted.push(w);
        }
    }
    if accepted.len() != k {
        return Err(Error::Eigen(format!(
            "could not canonicalize a {k}-fold degenerate block"
        )));
    }
    Ok(accepted)
}

fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for a in &out {
                let overlap = inner(a, &w);
                for (wi, ai) in w.iter_mut().zip(a) {
                    *wi -= ai * overlap;
                }
            }
        }
        let n = norm(&w);
        w.iter_mut().for_each(|z| *z /= n);
        out.push(w);
    }
    out
}

/// Make the leading largest-magnitude component real and positive.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - PHASE_TIE_TOL)
        .unwrap_or(0);
    let c = v[pivot];
    let phase = c.conj() / c.norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v[pivot] = Complex64::new(c.norm(), 0.0);
}
