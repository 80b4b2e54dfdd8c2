//! Independent oracles shared by the integration tests.
//!
//! Everything here is written from the defining formulas with plain matrix
//! products, without the factorized engine or its label bookkeeping.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use quasift::qlinalg::{ComplexMatrix, DensityMatrix};
use quasift::trajectories::{LabelShape, QuasiDistribution, TrajectoryIndex};
use quasift::tripartite::EvolvedState;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shannon entropy in nats, skipping zero weights.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn proj(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::outer(v)
}

fn id(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d)
}

/// Projectors of one time slice on `R (x) S (x) E`, indexed by label.
struct Slice {
    r: Vec<ComplexMatrix>,
    s: Vec<ComplexMatrix>,
    l: Vec<ComplexMatrix>,
    n: Vec<ComplexMatrix>,
}

fn slice(
    r: &[Vec<Complex64>],
    s: &[Vec<Complex64>],
    l: &[Vec<Complex64>],
    n: &[Vec<Complex64>],
    dims: (usize, usize, usize),
) -> Slice {
    let (dr, ds, de) = dims;
    Slice {
        r: r.iter()
            .map(|v| proj(v).kron(&id(ds)).kron(&id(de)))
            .collect(),
        s: s.iter()
            .map(|v| id(dr).kron(&proj(v)).kron(&id(de)))
            .collect(),
        l: l.iter().map(|v| proj(v).kron(&id(de))).collect(),
        n: n.iter().map(|v| id(dr * ds).kron(&proj(v))).collect(),
    }
}

/// Weight of every trajectory.
pub type Weights = Vec<(TrajectoryIndex, f64)>;

/// `Re Tr(U^dag P_l'n' P_r's' U P_rs P_ln rho)` for every trajectory, and
/// the retrodiction `Re Tr(U A^dag U^dag B^dag sigma')` with
/// `A = P_rs P_ln`, `B = P_l'n' P_r's'`, `sigma' = rho'_RS (x) rho'_E`.
pub fn dense_quasiprobabilities(ev: &EvolvedState) -> (Weights, Weights) {
    let dims = ev.dims();
    let i = &ev.initial;
    let f = &ev.final_;
    let a = slice(
        &i.r.basis_vectors,
        &i.s.basis_vectors,
        &i.rs.basis_vectors,
        &i.e.basis_vectors,
        dims,
    );
    let b = slice(
        &f.r.basis_vectors,
        &f.s.basis_vectors,
        &f.rs.basis_vectors,
        &f.e.basis_vectors,
        dims,
    );
    let u = &ev.full_unitary;
    let ud = u.adjoint();
    let rho = ev.rho_initial.matrix();
    let sigma = ev
        .rho_final
        .partial_trace(&[0, 1])
        .unwrap()
        .matrix()
        .kron(ev.rho_final.partial_trace(&[2]).unwrap().matrix());

    let shape = LabelShape::from_dims(dims);
    let mut forward = Vec::with_capacity(shape.len());
    let mut retro = Vec::with_capacity(shape.len());
    for z in shape.trajectories() {
        let aa = a.r[z.r]
            .matmul(&a.s[z.s])
            .matmul(&a.l[z.l])
            .matmul(&a.n[z.n]);
        let bb = b.l[z.l_f]
            .matmul(&b.n[z.n_f])
            .matmul(&b.r[z.r_f])
            .matmul(&b.s[z.s_f]);
        let q = ud.matmul(&bb).matmul(u).matmul(&aa).matmul(rho).trace().re;
        let qt = u
            .matmul(&aa.adjoint())
            .matmul(&ud)
            .matmul(&bb.adjoint())
            .matmul(&sigma)
            .trace()
            .re;
        forward.push((z, q));
        retro.push((z, qt));
    }
    (forward, retro)
}

pub fn max_deviation(q: &QuasiDistribution, oracle: &[(TrajectoryIndex, f64)]) -> f64 {
    oracle
        .iter()
        .map(|(z, v)| (q.get(z) - v).abs())
        .fold(0.0, f64::max)
}

/// `ln p` for every eigenvalue, `None` for zeros.
fn logs(p: &[f64]) -> Vec<Option<f64>> {
    p.iter().map(|&x| (x > 1e-14).then(|| x.ln())).collect()
}

/// `(Delta iota, sigma_S, sigma_SR)` of a trajectory from the spectra.
pub fn record(ev: &EvolvedState, z: &TrajectoryIndex) -> Option<(f64, f64, f64)> {
    let i = &ev.initial;
    let f = &ev.final_;
    let r = logs(&i.r.eigenvalues)[z.r]?;
    let s = logs(&i.s.eigenvalues)[z.s]?;
    let l = logs(&i.rs.eigenvalues)[z.l]?;
    let n = logs(&i.e.eigenvalues)[z.n]?;
    let r2 = logs(&f.r.eigenvalues)[z.r_f]?;
    let s2 = logs(&f.s.eigenvalues)[z.s_f]?;
    let l2 = logs(&f.rs.eigenvalues)[z.l_f]?;
    let n2 = logs(&f.e.eigenvalues)[z.n_f]?;
    Some((
        (l - s - r) - (l2 - s2 - r2),
        s + n - s2 - n2,
        l + n - l2 - n2,
    ))
}

/// Von Neumann entropy from the eigenvalues of a Hermitian matrix found by
/// Jacobi rotations, kept separate from the library eigensolver.
pub fn jacobi_entropy(rho: &DensityMatrix) -> f64 {
    shannon(&jacobi_eigenvalues(rho.matrix()))
}

/// Eigenvalues of a Hermitian matrix through the real symmetric embedding
/// `[[A, -B], [B, A]]`, whose spectrum is that of `A + iB` doubled.
pub fn jacobi_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let n = 2 * d;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..d {
        for j in 0..d {
            let z = m.get(i, j);
            a[i][j] = z.re;
            a[i + d][j + d] = z.re;
            a[i][j + d] = -z.im;
            a[i + d][j] = z.im;
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Each eigenvalue appears twice in the embedding.
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Bell vector `l` on `R (x) S`, written out: `Phi+, Phi-, Psi+, Psi-`.
pub fn bell_vector(l: usize) -> [f64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match l {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        _ => [0.0, h, -h, 0.0],
    }
}

/// `<s'n'|U_SE|sn>` for `U_SE = |0><0| (x) 1 + |1><1| (x) (|0><1| - |1><0|)`.
pub fn interaction_element(s_f: usize, n_f: usize, s: usize, n: usize) -> f64 {
    if s_f != s {
        return 0.0;
    }
    match (s, n_f, n) {
        (0, a, b) if a == b => 1.0,
        (1, 0, 1) => 1.0,
        (1, 1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Reference value of one amplitude, from the three closed forms above.
/// Every amplitude of the reference experiment is real.
pub fn reference_amplitude(
    family: quasift::interferometry::AmplitudeFamily,
    labels: &[usize],
) -> f64 {
    use quasift::interferometry::AmplitudeFamily::*;
    match family {
        BellOverlap => bell_vector(labels[2])[2 * labels[0] + labels[1]],
        Interaction => interaction_element(labels[0], labels[1], labels[2], labels[3]),
        Return => {
            // <psi_l n| (1 (x) U^dag) |r's'n'> = sum_s psi_l(r', s) <s'n'|U|s n>
            let (l, n, r_f, s_f, n_f) = (labels[0], labels[1], labels[2], labels[3], labels[4]);
            (0..2)
                .map(|s| bell_vector(l)[2 * r_f + s] * interaction_element(s_f, n_f, s, n))
                .sum()
        }
    }
}
