//! Result emission: JSON summaries, ECDF dumps, sweep tables, pattern cuts.
//!
//! JSON objects are built from `serde_json::Value`, whose maps keep keys
//! sorted, so output is stable and diffable. Non-finite numbers (an empty
//! quantile, a `-inf` INR) serialize as `null`.

use std::io::Write;

use mmwave_core::antenna::{PatternCutRow, PhaseResolution};
use mmwave_core::sim::{EcdfSeries, RunResult};
use serde_json::{json, Map, Value};

use crate::config::{ConfigFile, PatternName};

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn bits_value(r: PhaseResolution) -> Value {
    match r {
        PhaseResolution::Bits(b) => json!(b),
        PhaseResolution::Unbounded => json!("inf"),
    }
}

fn quantiles(e: &EcdfSeries, qs: &[f64]) -> Value {
    let mut m = Map::new();
    for &q in qs {
        m.insert(q.to_string(), e.quantile(q).map_or(Value::Null, number));
    }
    Value::Object(m)
}

/// Summary of one run at one phase resolution.
pub fn run_summary(resolution: PhaseResolution, r: &RunResult, qs: &[f64]) -> Value {
    json!({
        "bits": bits_value(resolution),
        "drops": r.drops,
        "served_ues": r.sinr.len(),
        "outage_fraction": number(r.outage_fraction()),
        "noise_limited_probability": r.noise_limited_probability().map_or(Value::Null, number),
        "sinr_median_db": r.sinr.median().map_or(Value::Null, number),
        "inr_median_db": r.inr.median().map_or(Value::Null, number),
        "sinr_quantiles_db": quantiles(&r.sinr, qs),
        "inr_quantiles_db": quantiles(&r.inr, qs),
    })
}

/// Full `run` document: the resolved configuration, the seed and one
/// summary per resolution.
pub fn run_document(config: &ConfigFile, noise_power_dbm: f64, results: Vec<Value>) -> Value {
    json!({
        "config": serde_json::to_value(config).expect("config serializes"),
        "seed": config.seed,
        "noise_power_dbm": number(noise_power_dbm),
        "results": results,
    })
}

pub fn write_json<W: Write>(v: &Value, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)
}

/// Sorted SINR and INR samples per resolution with their ECDF levels.
pub fn write_ecdf<W: Write>(runs: &[(PhaseResolution, &RunResult)], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["bits", "rank", "cdf", "sinr_db", "inr_db"])?;
    for (res, r) in runs {
        let n = r.sinr.len();
        for (i, (s, inr)) in r.sinr.samples().iter().zip(r.inr.samples()).enumerate() {
            out.write_record([
                res.to_string(),
                (i + 1).to_string(),
                ((i + 1) as f64 / n as f64).to_string(),
                s.to_string(),
                inr.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub struct SweepRow<'a> {
    pub pattern: PatternName,
    pub density_per_km2: f64,
    pub resolution: PhaseResolution,
    pub result: &'a RunResult,
}

pub fn sweep_header(qs: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = ["pattern", "density_per_km2", "bits", "drops", "outage_fraction", "noise_limited_probability"]
        .map(String::from)
        .to_vec();
    h.extend(qs.iter().map(|q| format!("sinr_q{q}_db")));
    h
}

fn cell(x: mmwave_core::Result<f64>) -> String {
    x.map_or_else(|_| String::new(), |v| v.to_string())
}

pub fn write_sweep<W: Write>(rows: &[SweepRow<'_>], qs: &[f64], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(sweep_header(qs))?;
    for row in rows {
        let r = row.result;
        let mut rec = vec![
            row.pattern.as_str().to_string(),
            row.density_per_km2.to_string(),
            row.resolution.to_string(),
            r.drops.to_string(),
            r.outage_fraction().to_string(),
            cell(r.noise_limited_probability()),
        ];
        rec.extend(qs.iter().map(|&q| cell(r.sinr.quantile(q))));
        out.write_record(rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Pattern cut table. With several steering angles a leading `steer_deg`
/// column tells the cuts apart.
pub fn write_pattern_cut<W: Write>(cuts: &[(f64, Vec<PatternCutRow>)], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let tagged = cuts.len() > 1;
    let mut header = vec!["phi_deg", "element_db", "af_db", "array_db"];
    if tagged {
        header.insert(0, "steer_deg");
    }
    out.write_record(&header)?;
    for (steer, rows) in cuts {
        for r in rows {
            let mut rec = vec![r.phi.to_string(), r.element_db.to_string(), r.af_db.to_string(), r.array_db.to_string()];
            if tagged {
                rec.insert(0, steer.to_string());
            }
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}
