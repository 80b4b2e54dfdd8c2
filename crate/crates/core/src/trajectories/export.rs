use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{LabelShape, ProjectorOrdering, QuasiDistribution, RecordTable};
use crate::error::{Error, Result};

const LABEL_HEADERS: [&str; 8] = ["r", "s", "l", "n", "r′", "s′", "l′", "n′"];

/// One exported trajectory. Undefined stochastic quantities are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub labels: [usize; 8],
    pub q: f64,
    pub q_retro: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q_imag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q_retro_imag: Option<f64>,
    pub delta_iota: Option<f64>,
    pub sigma_s: Option<f64>,
    pub sigma_sr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryExport {
    pub shape: LabelShape,
    pub ordering: ProjectorOrdering,
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryExport {
    pub fn new(
        q: &QuasiDistribution,
        q_retro: &QuasiDistribution,
        records: &RecordTable,
        include_imag: bool,
    ) -> Result<Self> {
        if q.shape != q_retro.shape || q.shape != records.shape {
            return Err(Error::Shape(
                "export inputs have different label shapes".into(),
            ));
        }
        let rows = q
            .iter()
            .map(|(z, w)| {
                let rec = records.get(&z);
                TrajectoryRow {
                    labels: z.labels(),
                    q: w,
                    q_retro: q_retro.get(&z),
                    q_imag: include_imag.then(|| q.get_imag(&z)),
                    q_retro_imag: include_imag.then(|| q_retro.get_imag(&z)),
                    delta_iota: rec.delta_iota,
                    sigma_s: rec.sigma_s,
                    sigma_sr: rec.sigma_sr,
                }
            })
            .collect();
        Ok(Self {
            shape: q.shape,
            ordering: q.ordering,
            rows,
        })
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Writes one CSV row per trajectory:
/// `r,s,l,n,r′,s′,l′,n′,Q,Q̃,delta_iota,sigma_S,sigma_SR`, plus `Im_Q,Im_Q̃`
/// when `include_imag` is set. Undefined quantities are left empty.
pub fn write_trajectory_csv<W: Write>(
    q: &QuasiDistribution,
    q_retro: &QuasiDistribution,
    records: &RecordTable,
    include_imag: bool,
    writer: W,
) -> Result<()> {
    let export = TrajectoryExport::new(q, q_retro, records, include_imag)?;
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = LABEL_HEADERS.to_vec();
    header.extend(["Q", "Q̃", "delta_iota", "sigma_S", "sigma_SR"]);
    if include_imag {
        header.extend(["Im_Q", "Im_Q̃"]);
    }
    out.write_record(&header)?;
    for row in &export.rows {
        let mut fields: Vec<String> = row.labels.iter().map(usize::to_string).collect();
        fields.push(fmt_float(row.q));
        fields.push(fmt_float(row.q_retro));
        fields.push(fmt_opt(row.delta_iota));
        fields.push(fmt_opt(row.sigma_s));
        fields.push(fmt_opt(row.sigma_sr));
        if include_imag {
            fields.push(fmt_opt(row.q_imag));
            fields.push(fmt_opt(row.q_retro_imag));
        }
        out.write_record(&fields)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trajectory_json<W: Write>(
    q: &QuasiDistribution,
    q_retro: &QuasiDistribution,
    records: &RecordTable,
    include_imag: bool,
    writer: W,
) -> Result<()> {
    let export = TrajectoryExport::new(q, q_retro, records, include_imag)?;
    serde_json::to_writer_pretty(writer, &export)?;
    Ok(())
}
