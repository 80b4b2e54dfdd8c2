use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{pairwise_sum, LabelShape, ProjectorOrdering, TrajectoryIndex};
use crate::error::Result;
use crate::qlinalg::{inner, kron_vec, ComplexMatrix};
use crate::tripartite::EvolvedState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiKind {
    Forward,
    Retrodiction,
}

/// Real quasiprobabilities over every trajectory, with the imaginary parts
/// kept alongside for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiDistribution {
    pub shape: LabelShape,
    pub ordering: ProjectorOrdering,
    pub kind: QuasiKind,
    values: Vec<f64>,
    imag: Vec<f64>,
}

impl QuasiDistribution {
    /// Wraps raw values laid out in [`LabelShape::index`] order.
    pub fn from_values(
        shape: LabelShape,
        ordering: ProjectorOrdering,
        kind: QuasiKind,
        values: Vec<f64>,
        imag: Option<Vec<f64>>,
    ) -> Self {
        assert_eq!(
            values.len(),
            shape.len(),
            "value count does not match shape"
        );
        let imag = imag.unwrap_or_else(|| vec![0.0; values.len()]);
        assert_eq!(
            imag.len(),
            shape.len(),
            "imaginary count does not match shape"
        );
        Self {
            shape,
            ordering,
            kind,
            values,
            imag,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn imag(&self) -> &[f64] {
        &self.imag
    }

    pub fn get(&self, z: &TrajectoryIndex) -> f64 {
        self.values[self.shape.index(z)]
    }

    pub fn get_imag(&self, z: &TrajectoryIndex) -> f64 {
        self.imag[self.shape.index(z)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (TrajectoryIndex, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.shape.trajectory(i), v))
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.values)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Copy with every trajectory `z` moved to `map(z)`; `map` must permute
    /// the labels within the shape.
    pub fn relabel(&self, map: impl Fn(&TrajectoryIndex) -> TrajectoryIndex) -> Self {
        let mut values = vec![0.0; self.values.len()];
        let mut imag = vec![0.0; self.imag.len()];
        for (k, z) in self.shape.trajectories().enumerate() {
            let j = self.shape.index(&map(&z));
            values[j] = self.values[k];
            imag[j] = self.imag[k];
        }
        Self {
            values,
            imag,
            ..self.clone()
        }
    }

    /// Number of trajectories with `Q <= threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v <= threshold).count()
    }
}

/// Eigenvectors behind one time slice of the label lattice.
struct Basis<'a> {
    shape: LabelShape,
    r: &'a [Vec<Complex64>],
    s: &'a [Vec<Complex64>],
    l: &'a [Vec<Complex64>],
    n: &'a [Vec<Complex64>],
    p_l: &'a [f64],
    p_n: &'a [f64],
}

/// Vectors of one slice label `(r, s, l, n)`.
struct Slice {
    /// `<rs|l>`
    overlap: Complex64,
    rsn: Vec<Complex64>,
    ln: Vec<Complex64>,
    p_l: f64,
    p_n: f64,
}

impl Basis<'_> {
    fn initial(ev: &EvolvedState) -> Basis<'_> {
        let i = &ev.initial;
        Basis {
            shape: LabelShape::from_dims(ev.dims()),
            r: &i.r.basis_vectors,
            s: &i.s.basis_vectors,
            l: &i.rs.basis_vectors,
            n: &i.e.basis_vectors,
            p_l: &i.rs.eigenvalues,
            p_n: &i.e.eigenvalues,
        }
    }

    fn final_(ev: &EvolvedState) -> Basis<'_> {
        let f = &ev.final_;
        Basis {
            shape: LabelShape::from_dims(ev.dims()),
            r: &f.r.basis_vectors,
            s: &f.s.basis_vectors,
            l: &f.rs.basis_vectors,
            n: &f.e.basis_vectors,
            p_l: &f.rs.eigenvalues,
            p_n: &f.e.eigenvalues,
        }
    }

    fn slices(&self) -> Vec<Slice> {
        (0..self.shape.half_len())
            .map(|k| {
                let (r, s, l, n) = self.shape.half_labels(k);
                let rs = kron_vec(&self.r[r], &self.s[s]);
                Slice {
                    overlap: inner(&rs, &self.l[l]),
                    rsn: kron_vec(&rs, &self.n[n]),
                    ln: kron_vec(&self.l[l], &self.n[n]),
                    p_l: self.p_l[l],
                    p_n: self.p_n[n],
                }
            })
            .collect()
    }
}

/// Rank-one operator `c |a><b|`.
struct RankOne {
    c: Complex64,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

/// `c d <y|U|a> conj(<x|U|b>)`, which is `Tr(U^dagger d|x><y| U c|a><b|)`,
/// for every initial `k` and final `j`; `ops[k]` is on the state side and
/// `finals[j]` is `d|x><y|`.
fn contract(
    shape: LabelShape,
    u: &ComplexMatrix,
    ops: &[RankOne],
    finals: &[RankOne],
) -> (Vec<f64>, Vec<f64>) {
    let half = shape.half_len();
    let mut re = vec![0.0; shape.len()];
    let mut im = vec![0.0; shape.len()];
    for (k, op) in ops.iter().enumerate() {
        let (ua, ub) = (u.apply(&op.a), u.apply(&op.b));
        for (j, fin) in finals.iter().enumerate() {
            let t = op.c * fin.c * inner(&fin.b, &ua) * inner(&fin.a, &ub).conj();
            re[k * half + j] = t.re;
            im[k * half + j] = t.im;
        }
    }
    (re, im)
}

/// `Q[zeta] = Re Tr(U^dagger B U A rho)` with `A = Pi_rs Pi_ln` and
/// `B = Pi_l'n' Pi_r's'` in the canonical order.
///
/// When `Pi_rs` acts first the state is kept next to its own eigenprojector,
/// `Re Tr(U^dagger B U rho Pi_ln Pi_rs)`; swapping the final pair only
/// reorders `B`. See [`ProjectorOrdering`] for why.
///
/// Every label projector has rank one on the space it acts on, so each term
/// factors into a product of overlaps and transition amplitudes; no operator
/// products are formed. This keeps the relative error of small entries near
/// machine precision.
pub fn quasiprobability(
    ev: &EvolvedState,
    ordering: ProjectorOrdering,
) -> Result<QuasiDistribution> {
    let shape = LabelShape::from_dims(ev.dims());
    let initial = Basis::initial(ev).slices();
    let final_ = Basis::final_(ev).slices();
    // The initial factor next to U^dagger B U, as c|a><b|.
    let ops: Vec<RankOne> = initial
        .into_iter()
        .map(|v| {
            if ordering.global_first_initial() {
                // Pi_rs Pi_ln rho = p_l p_n <rs|l> |rs n><l n|
                RankOne {
                    c: v.overlap * (v.p_l * v.p_n),
                    a: v.rsn,
                    b: v.ln,
                }
            } else {
                // rho Pi_ln Pi_rs = p_l p_n <l|rs> |l n><rs n|
                RankOne {
                    c: v.overlap.conj() * (v.p_l * v.p_n),
                    a: v.ln,
                    b: v.rsn,
                }
            }
        })
        .collect();
    // B as d|x><y|.
    let finals: Vec<RankOne> = final_
        .into_iter()
        .map(|v| {
            if ordering.local_first_final() {
                // Pi_l'n' Pi_r's' = <l'|r's'> |l'n'><r's'n'|
                RankOne {
                    c: v.overlap.conj(),
                    a: v.ln,
                    b: v.rsn,
                }
            } else {
                RankOne {
                    c: v.overlap,
                    a: v.rsn,
                    b: v.ln,
                }
            }
        })
        .collect();
    let (values, imag) = contract(shape, &ev.full_unitary, &ops, &finals);
    Ok(QuasiDistribution::from_values(
        shape,
        ordering,
        QuasiKind::Forward,
        values,
        Some(imag),
    ))
}

/// Time-reversed counterpart started from `sigma' = rho'_RS (x) rho'_E`:
/// `Re Tr(U A^dagger U^dagger B^dagger sigma')`, the forward projector
/// sequence applied in reverse with `U^dagger` in between. As in the forward
/// direction `sigma'` sits next to `Pi_l'n'`, which for the swapped final
/// pair means `sigma' B^dagger`.
pub fn retrodiction_quasiprobability(
    ev: &EvolvedState,
    ordering: ProjectorOrdering,
) -> Result<QuasiDistribution> {
    let shape = LabelShape::from_dims(ev.dims());
    let initial = Basis::initial(ev).slices();
    let final_ = Basis::final_(ev).slices();
    // Tr(U f|m><v| U^dagger e|a><b|) = f e <b|U|m> conj(<a|U|v>), which is
    // `contract` with the initial side as the state-side operator.
    let ops: Vec<RankOne> = initial
        .into_iter()
        .map(|v| {
            if ordering.global_first_initial() {
                // A^dagger = Pi_ln Pi_rs = <l|rs> |l n><rs n|
                RankOne {
                    c: v.overlap.conj(),
                    a: v.ln,
                    b: v.rsn,
                }
            } else {
                RankOne {
                    c: v.overlap,
                    a: v.rsn,
                    b: v.ln,
                }
            }
        })
        .collect();
    let finals: Vec<RankOne> = final_
        .into_iter()
        .map(|v| {
            if ordering.local_first_final() {
                // B^dagger sigma' = p_l' p_n' <r's'|l'> |r's'n'><l'n'|
                RankOne {
                    c: v.overlap * (v.p_l * v.p_n),
                    a: v.rsn,
                    b: v.ln,
                }
            } else {
                // sigma' Pi_l'n' Pi_r's' = p_l' p_n' <l'|r's'> |l'n'><r's'n'|
                RankOne {
                    c: v.overlap.conj() * (v.p_l * v.p_n),
                    a: v.ln,
                    b: v.rsn,
                }
            }
        })
        .collect();
    let (values, imag) = contract(shape, &ev.full_unitary, &ops, &finals);
    Ok(QuasiDistribution::from_values(
        shape,
        ordering,
        QuasiKind::Retrodiction,
        values,
        Some(imag),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::DensityMatrix;
    use crate::rng::rng_from_seed;
    use crate::tripartite::{evolve, random_setup, TripartiteSetup, E, R, S};

    fn projector(v: &[Complex64], pad: usize) -> ComplexMatrix {
        ComplexMatrix::outer(v).kron(&ComplexMatrix::identity(pad))
    }

    /// Operator products and full traces, straight from the definition.
    fn dense(ev: &EvolvedState, ordering: ProjectorOrdering, retro: bool) -> Vec<f64> {
        let shape = LabelShape::from_dims(ev.dims());
        let de = ev.dims().2;
        let u = &ev.full_unitary;
        let slice = |sp: &crate::tripartite::Spectra, k: usize, global_first: bool| {
            let (r, s, l, n) = shape.half_labels(k);
            let local = projector(
                &kron_vec(&sp.r.basis_vectors[r], &sp.s.basis_vectors[s]),
                de,
            );
            let global = projector(
                &kron_vec(&sp.rs.basis_vectors[l], &sp.e.basis_vectors[n]),
                1,
            );
            if global_first {
                local.matmul(&global)
            } else {
                global.matmul(&local)
            }
        };
        let sigma = ev
            .rho_final
            .partial_trace(&[R, S])
            .unwrap()
            .tensor(&ev.rho_final.partial_trace(&[E]).unwrap());
        let mut out = Vec::new();
        for k in 0..shape.half_len() {
            let a = slice(&ev.initial, k, ordering.global_first_initial());
            for j in 0..shape.half_len() {
                let b = slice(&ev.final_, j, !ordering.local_first_final());
                let rho = ev.rho_initial.matrix();
                let t = if retro {
                    let tail = if ordering.local_first_final() {
                        b.adjoint().matmul(sigma.matrix())
                    } else {
                        sigma.matrix().matmul(&b.adjoint())
                    };
                    u.matmul(&a.adjoint())
                        .matmul(&u.adjoint())
                        .matmul(&tail)
                        .trace()
                } else {
                    let head = if ordering.global_first_initial() {
                        a.matmul(rho)
                    } else {
                        rho.matmul(&a)
                    };
                    u.adjoint().matmul(&b).matmul(u).matmul(&head).trace()
                };
                out.push(t.re);
            }
        }
        out
    }

    #[test]
    fn factorized_terms_match_full_traces() {
        let mut rng = rng_from_seed(5);
        for dims in [(2, 2, 2), (2, 3, 2)] {
            let ev = evolve(&random_setup(dims, &mut rng).unwrap()).unwrap();
            for ordering in ProjectorOrdering::ALL {
                let q = quasiprobability(&ev, ordering).unwrap();
                let q_retro = retrodiction_quasiprobability(&ev, ordering).unwrap();
                for (got, want) in [
                    (q.values(), dense(&ev, ordering, false)),
                    (q_retro.values(), dense(&ev, ordering, true)),
                ] {
                    let err = got
                        .iter()
                        .zip(&want)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-13, "{ordering:?} {dims:?} {err:e}");
                }
            }
        }
    }

    fn classical_setup() -> TripartiteSetup {
        let rho_rs =
            DensityMatrix::new(ComplexMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]), vec![2, 2]).unwrap();
        let rho_e = DensityMatrix::new(ComplexMatrix::diagonal(&[0.7, 0.3]), vec![2]).unwrap();
        TripartiteSetup::new(
            rho_rs,
            rho_e,
            ComplexMatrix::identity(4),
            (2, 2, 2),
            "classical",
        )
        .unwrap()
    }

    #[test]
    fn identity_dynamics_is_a_probability() {
        let ev = evolve(&classical_setup()).unwrap();
        let q = quasiprobability(&ev, ProjectorOrdering::Canonical).unwrap();
        let q_retro = retrodiction_quasiprobability(&ev, ProjectorOrdering::Canonical).unwrap();
        assert!((q.total() - 1.0).abs() < 1e-14);
        assert!(q.min() >= 0.0);
        for (z, w) in q.iter() {
            assert!((w - q_retro.get(&z)).abs() < 1e-15);
            let unchanged = z.r == z.r_f && z.s == z.s_f && z.l == z.l_f && z.n == z.n_f;
            if !unchanged {
                assert_eq!(w, 0.0);
            }
        }
    }

    #[test]
    fn imaginary_parts_are_kept() {
        let ev = evolve(&classical_setup()).unwrap();
        let q = quasiprobability(&ev, ProjectorOrdering::SwappedBoth).unwrap();
        assert_eq!(q.imag().len(), q.values().len());
        assert_eq!(q.ordering, ProjectorOrdering::SwappedBoth);
        assert_eq!(q.kind, QuasiKind::Forward);
    }
}
