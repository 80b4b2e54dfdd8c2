use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    estimate_amplitude, exact_estimate, select_mitigation_angle, AmplitudeEstimate, AmplitudePart,
    AmplitudeTask, Mitigation,
};
use crate::circuits::experiment::u_se;
use crate::circuits::{Circuit, NoiseModel};
use crate::error::{Error, Result};
use crate::qlinalg::ComplexMatrix;
use crate::rng::derive_seed;

/// The three amplitude sets that make up a trajectory in the qubit example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeFamily {
    /// `<rs|psi(l)>`, labels `(r, s, l)`.
    BellOverlap,
    /// `<s'n'|U_SE|sn>`, labels `(s', n', s, n)`.
    Interaction,
    /// `<psi(l) n|U_SE^dagger|r's'n'>`, labels `(l, n, r', s', n')`.
    Return,
}

impl AmplitudeFamily {
    pub const ALL: [AmplitudeFamily; 3] = [Self::BellOverlap, Self::Interaction, Self::Return];

    /// Output file stem, `amplitudes_a` to `amplitudes_c`.
    pub fn file_stem(self) -> &'static str {
        match self {
            Self::BellOverlap => "amplitudes_a",
            Self::Interaction => "amplitudes_b",
            Self::Return => "amplitudes_c",
        }
    }

    pub fn label_names(self) -> &'static [&'static str] {
        match self {
            Self::BellOverlap => &["r", "s", "l"],
            Self::Interaction => &["s′", "n′", "s", "n"],
            Self::Return => &["l", "n", "r′", "s′", "n′"],
        }
    }

    /// Every label tuple, last label fastest.
    pub fn labels(self) -> Vec<Vec<usize>> {
        let ranges: &[usize] = match self {
            Self::BellOverlap => &[2, 2, 4],
            Self::Interaction => &[2, 2, 2, 2],
            Self::Return => &[4, 2, 2, 2, 2],
        };
        let total: usize = ranges.iter().product();
        (0..total)
            .map(|mut k| {
                let mut labels = vec![0; ranges.len()];
                for (slot, &size) in labels.iter_mut().zip(ranges).rev() {
                    *slot = k % size;
                    k /= size;
                }
                labels
            })
            .collect()
    }
}

fn basis_prep(registers: &[&str], bits: &[usize]) -> Result<Circuit> {
    let mut c = Circuit::with_registers(registers.iter().map(|s| s.to_string()).collect())?;
    for (q, &b) in bits.iter().enumerate() {
        if b == 1 {
            c.x(q)?;
        }
    }
    Ok(c)
}

/// Bell state `l = r0 + 2 s0` on the first two registers, computational
/// bits on the rest.
fn bell_prep(registers: &[&str], l: usize, rest: &[usize]) -> Result<Circuit> {
    let mut bits = vec![l & 1, l >> 1];
    bits.extend_from_slice(rest);
    let mut c = basis_prep(registers, &bits)?;
    c.h(0)?.cnot(0, 1)?;
    Ok(c)
}

/// Real-part task for one entry of a family at `theta = pi/2`.
fn task_for(family: AmplitudeFamily, labels: &[usize]) -> Result<AmplitudeTask> {
    let names = family.label_names();
    let label = names
        .iter()
        .zip(labels)
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    let (unitary, f, f_prime) = match family {
        AmplitudeFamily::BellOverlap => {
            let (r, s, l) = (labels[0], labels[1], labels[2]);
            let regs = ["R", "S"];
            (
                ComplexMatrix::identity(4),
                basis_prep(&regs, &[r, s])?,
                bell_prep(&regs, l, &[])?,
            )
        }
        AmplitudeFamily::Interaction => {
            let (s_f, n_f, s, n) = (labels[0], labels[1], labels[2], labels[3]);
            let regs = ["S", "E"];
            (
                u_se(),
                basis_prep(&regs, &[s_f, n_f])?,
                basis_prep(&regs, &[s, n])?,
            )
        }
        AmplitudeFamily::Return => {
            let (l, n, r_f, s_f, n_f) = (labels[0], labels[1], labels[2], labels[3], labels[4]);
            let regs = ["R", "S", "E"];
            let u = ComplexMatrix::identity(2).kron(&u_se().adjoint());
            (
                u,
                bell_prep(&regs, l, &[n])?,
                basis_prep(&regs, &[r_f, s_f, n_f])?,
            )
        }
    };
    AmplitudeTask::new(
        label,
        unitary,
        f,
        Some(f_prime),
        FRAC_PI_2,
        AmplitudePart::Real,
    )
}

/// `(labels, task)` for every entry of `family`, real part at `pi/2`.
pub fn family_tasks(family: AmplitudeFamily) -> Result<Vec<(Vec<usize>, AmplitudeTask)>> {
    family
        .labels()
        .into_iter()
        .map(|labels| {
            let task = task_for(family, &labels)?;
            Ok((labels, task))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub labels: Vec<usize>,
    pub real: AmplitudeEstimate,
    pub imag: AmplitudeEstimate,
    /// Noiseless reference from matrix algebra.
    pub exact: [f64; 2],
}

impl AmplitudeEntry {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.real.value, self.imag.value)
    }

    pub fn exact_value(&self) -> Complex64 {
        Complex64::new(self.exact[0], self.exact[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub family: AmplitudeFamily,
    pub entries: Vec<AmplitudeEntry>,
}

impl AmplitudeTable {
    pub fn get(&self, labels: &[usize]) -> Result<Complex64> {
        self.entries
            .iter()
            .find(|e| e.labels == labels)
            .map(AmplitudeEntry::value)
            .ok_or_else(|| Error::MissingAmplitude(format!("{:?} {labels:?}", self.family)))
    }

    /// Largest `|estimate - exact|` over entries and both parts.
    pub fn max_error(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                (e.value() - e.exact_value())
                    .re
                    .abs()
                    .max((e.value() - e.exact_value()).im.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Columns: labels, `real, imag, variance_real, variance_imag,
    /// theta_real, theta_imag, shots, mitigated, magnitude_sq`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.family.label_names().to_vec();
        header.extend([
            "real",
            "imag",
            "variance_real",
            "variance_imag",
            "theta_real",
            "theta_imag",
            "shots",
            "mitigated",
            "magnitude_sq",
        ]);
        out.write_record(&header)?;
        let f = |x: f64| format!("{x:.16e}");
        for e in &self.entries {
            let mut row: Vec<String> = e.labels.iter().map(usize::to_string).collect();
            row.extend([
                f(e.real.value),
                f(e.imag.value),
                f(e.real.variance),
                f(e.imag.variance),
                f(e.real.theta),
                f(e.imag.theta),
                e.real.shots.to_string(),
                (e.real.mitigated || e.imag.mitigated).to_string(),
                f(e.real.magnitude_sq),
            ]);
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Noiseless table obtained by inverting the closed-form probabilities.
pub fn exact_table(family: AmplitudeFamily) -> Result<AmplitudeTable> {
    let entries = family_tasks(family)?
        .into_iter()
        .map(|(labels, task)| {
            let a = task.exact_amplitude()?;
            Ok(AmplitudeEntry {
                labels,
                real: exact_estimate(&task)?,
                imag: exact_estimate(&task.with_part(AmplitudePart::Imag))?,
                exact: [a.re, a.im],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable { family, entries })
}

/// Interference angles per entry and part, fixed once per family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablePlan {
    pub family: AmplitudeFamily,
    /// `[theta_real, theta_imag]` per entry, in [`AmplitudeFamily::labels`]
    /// order.
    pub angles: Vec<[f64; 2]>,
    pub mitigated: bool,
    /// Angle searches behind a mitigated plan.
    pub searches: Vec<[Mitigation; 2]>,
}

impl TablePlan {
    pub fn fixed(family: AmplitudeFamily, theta: f64) -> Self {
        Self {
            family,
            angles: vec![[theta; 2]; family.labels().len()],
            mitigated: false,
            searches: Vec::new(),
        }
    }

    /// Angles chosen by [`select_mitigation_angle`] under `noise`.
    pub fn mitigated(family: AmplitudeFamily, noise: &NoiseModel) -> Result<Self> {
        let searches = family_tasks(family)?
            .into_iter()
            .map(|(_, task)| {
                Ok([
                    select_mitigation_angle(&task, noise)?,
                    select_mitigation_angle(&task.with_part(AmplitudePart::Imag), noise)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            angles: searches.iter().map(|[r, i]| [r.theta, i.theta]).collect(),
            mitigated: true,
            searches,
        })
    }
}

/// Samples every entry of the planned family, both parts, `shots` shots
/// each. Entry `k`, part `p` uses the child seed `2k + p` of `seed`.
pub fn estimate_table(
    plan: &TablePlan,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<AmplitudeTable> {
    let tasks = family_tasks(plan.family)?;
    if tasks.len() != plan.angles.len() {
        return Err(Error::Config("plan does not match the family size".into()));
    }
    let entries = tasks
        .into_iter()
        .zip(&plan.angles)
        .enumerate()
        .map(|(k, ((labels, task), angles))| {
            let a = task.exact_amplitude()?;
            let part = |p: usize| -> Result<AmplitudeEstimate> {
                let t = task.with_part(AmplitudePart::BOTH[p]).with_theta(angles[p]);
                let mut est =
                    estimate_amplitude(&t, shots, noise, derive_seed(seed, (2 * k + p) as u64))?;
                est.mitigated = plan.mitigated;
                Ok(est)
            };
            let (real, imag) = (part(0)?, part(1)?);
            Ok(AmplitudeEntry {
                labels,
                real,
                imag,
                exact: [a.re, a.im],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable {
        family: plan.family,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(AmplitudeFamily::BellOverlap.labels().len(), 16);
        assert_eq!(AmplitudeFamily::Interaction.labels().len(), 16);
        assert_eq!(AmplitudeFamily::Return.labels().len(), 64);
        assert_eq!(AmplitudeFamily::Interaction.labels()[1], vec![0, 0, 0, 1]);
    }

    #[test]
    fn task_circuit_widths() {
        for (family, width) in [
            (AmplitudeFamily::BellOverlap, 3),
            (AmplitudeFamily::Interaction, 3),
            (AmplitudeFamily::Return, 4),
        ] {
            let (_, task) = &family_tasks(family).unwrap()[0];
            assert_eq!(
                super::super::build_interference_circuit(task)
                    .unwrap()
                    .num_qubits(),
                width
            );
        }
    }

    #[test]
    fn bell_overlaps_are_exact() {
        let table = exact_table(AmplitudeFamily::BellOverlap).unwrap();
        // <10|psi(3)> = -1/sqrt 2 for psi(3) = (|01> - |10>)/sqrt 2.
        assert!((table.get(&[1, 0, 3]).unwrap().re + FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(table.get(&[0, 0, 3]).unwrap().norm() < 1e-12);
        assert!(table.max_error() < 1e-12);
        assert!(matches!(
            table.get(&[2, 0, 0]),
            Err(Error::MissingAmplitude(_))
        ));
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let table = exact_table(AmplitudeFamily::Interaction).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("s′,n′,s,n,real,imag"));
    }
}
