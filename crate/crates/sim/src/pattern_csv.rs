//! Tabulated element patterns as CSV.
//!
//! Header `theta_deg,phi_deg,gain_dbi`, one row per grid node, theta-major
//! (all phi values for the first theta, then the next theta, ...).

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use mmwave_core::antenna::TabulatedPattern;

pub const HEADER: [&str; 3] = ["theta_deg", "phi_deg", "gain_dbi"];

#[derive(Debug, thiserror::Error)]
pub enum PatternCsvError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{path}: {message}")]
    Grid { path: PathBuf, message: String },
}

pub fn read_file(path: &Path) -> Result<TabulatedPattern, PatternCsvError> {
    let file = File::open(path).map_err(|source| PatternCsvError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read(file, path)
}

/// Parses a table; `origin` only labels error messages.
pub fn read<R: Read>(reader: R, origin: &Path) -> Result<TabulatedPattern, PatternCsvError> {
    let parse_err = |line: u64, message: String| PatternCsvError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(parse_err(1, format!("expected header '{}'", HEADER.join(","))));
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = &rec[k];
            *v = field
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("{}: not a number: '{field}'", HEADER[k])))?;
        }
        rows.push((line, vals));
    }
    if rows.is_empty() {
        return Err(parse_err(2, "no data rows".into()));
    }

    let np = rows.iter().take_while(|(_, v)| v[0] == rows[0].1[0]).count();
    let phi: Vec<f64> = rows[..np].iter().map(|(_, v)| v[1]).collect();
    if rows.len() % np != 0 {
        return Err(PatternCsvError::Grid {
            path: origin.to_path_buf(),
            message: format!("{} rows do not form a grid with {np} phi values", rows.len()),
        });
    }
    let mut theta = Vec::with_capacity(rows.len() / np);
    let mut gain = Vec::with_capacity(rows.len());
    for (n, (line, v)) in rows.iter().enumerate() {
        let (i, j) = (n / np, n % np);
        if j == 0 {
            theta.push(v[0]);
        }
        if v[0] != theta[i] || v[1] != phi[j] {
            return Err(parse_err(
                *line,
                format!("expected theta {} phi {}, found {} {}", theta[i], phi[j], v[0], v[1]),
            ));
        }
        gain.push(v[2]);
    }
    TabulatedPattern::new(theta, phi, gain).map_err(|e| PatternCsvError::Grid {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write<W: Write>(t: &TabulatedPattern, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for (i, th) in t.theta_grid().iter().enumerate() {
        for (j, ph) in t.phi_grid().iter().enumerate() {
            w.write_record([th.to_string(), ph.to_string(), t.node(i, j).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
