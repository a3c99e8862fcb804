//! CSV and plain-text renderings of classification reports.

use serde::Serialize;
use unilift::classify::ClassificationReport;
use unilift::{make_order, Int, QuadField};

use crate::error::{CliError, CliResult};

/// One row per member of `S₂`.
#[derive(Serialize)]
struct Row {
    #[serde(rename = "D_F")]
    d: Int,
    delta_m: Int,
    delta_n: Int,
    abs_disc: Int,
    label: String,
    verdict: &'static str,
}

fn verdict(r: &ClassificationReport, delta: &unilift::Quad) -> &'static str {
    if r.verified.iter().any(|v| &v.delta == delta) {
        "verified"
    } else if r.needs_units.contains(delta) {
        "needs_units"
    } else {
        "eliminated"
    }
}

pub fn csv_rows(reports: &[&ClassificationReport]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    // the header is written even when there are no rows
    w.write_record(["D_F", "delta_m", "delta_n", "abs_disc", "label", "verdict"])
        .map_err(csv_err)?;
    for r in reports {
        let f = QuadField::new(r.d)?;
        for delta in &r.s2 {
            let abs_disc = make_order(&f, delta.clone())?.abs_disc();
            let row = Row {
                d: r.d,
                delta_m: delta.m,
                delta_n: delta.n,
                abs_disc,
                label: unilift::data::label_match(abs_disc).unwrap_or_default(),
                verdict: verdict(r, delta),
            };
            w.serialize(&row).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn human(r: &ClassificationReport) -> String {
    let mut s = format!(
        "D = {}, m_count = {}\nS1: {} candidates ({} points scanned)\nS2: {} survivors\n",
        r.d,
        r.params.m_count,
        r.s1.len(),
        r.region_counts.scanned,
        r.s2.len()
    );
    for v in &r.verified {
        s.push_str(&format!(
            "verified: delta = {}  abs_disc = {}  label = {}  indecomposables = {}\n",
            v.delta,
            v.abs_disc,
            v.label.as_deref().unwrap_or("-"),
            v.indec_count
        ));
    }
    for d in &r.needs_units {
        s.push_str(&format!("needs units: delta = {d}\n"));
    }
    if r.verified.is_empty() && r.needs_units.is_empty() {
        s.push_str("no universal lift\n");
    }
    s
}
