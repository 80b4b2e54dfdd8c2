//! Random states and unitaries for property sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, norm, ComplexMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
///
/// Gram-Schmidt on the columns yields `R` with a positive real diagonal,
/// which is the normalization under which `Q` is Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &columns {
                let overlap = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= qi * overlap;
                }
            }
        }
        let n = norm(&v);
        v.iter_mut().for_each(|z| *z /= n);
        columns.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| columns[j][i])
}

/// Full-rank mixed state `G G^dagger / Tr(G G^dagger)` with Ginibre `G`.
pub fn wishart_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

/// Random Hermitian matrix `(G + G^dagger)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, rng).hermitian_part()
}
