use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{MetrologyError, Result};

/// One probe pulse: the detuning used, whether atoms were loaded, and the
/// detected photon count before and after dark-count subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub detuning: f64,
    pub atoms_present: bool,
    pub raw_count: u64,
    /// `raw_count - dark_rate`; negative values are legitimate.
    pub corrected_count: f64,
}

impl ShotRecord {
    pub fn new(detuning: f64, atoms_present: bool, raw_count: u64, dark_rate: f64) -> Self {
        Self {
            detuning,
            atoms_present,
            raw_count,
            corrected_count: raw_count as f64 - dark_rate,
        }
    }
}

const LOG_HEADER: [&str; 4] = ["shot_index", "detuning_mhz", "atoms_present", "raw_count"];

/// Reads a shot log with header `shot_index,detuning_mhz,atoms_present,raw_count`
/// and an optional trailing `dark_rate` column. Rows without a dark rate use
/// `default_dark_rate`. Errors carry the 1-based line number of the bad row.
pub fn read_shot_log<R: Read>(reader: R, default_dark_rate: f64) -> Result<Vec<ShotRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| MetrologyError::MalformedLog {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(MetrologyError::MalformedLog {
            row: 1,
            message: "empty log".into(),
        });
    }
    let names: Vec<&str> = headers.iter().collect();
    let dark_column = match names.as_slice() {
        [a, b, c, d] if [*a, *b, *c, *d] == LOG_HEADER => false,
        [a, b, c, d, "dark_rate"] if [*a, *b, *c, *d] == LOG_HEADER => true,
        _ => {
            return Err(MetrologyError::MalformedLog {
                row: 1,
                message: format!("unexpected header {:?}", names),
            })
        }
    };

    let mut shots = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| MetrologyError::MalformedLog {
            row: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| MetrologyError::MalformedLog { row, message };
        let expected = if dark_column { 5 } else { 4 };
        if record.len() != expected && !(dark_column && record.len() == 4) {
            return Err(bad(format!("expected {expected} fields, found {}", record.len())));
        }
        record[0]
            .parse::<u64>()
            .map_err(|_| bad(format!("shot_index `{}` is not a nonnegative integer", &record[0])))?;
        let detuning: f64 = record[1]
            .parse()
            .ok()
            .filter(|d: &f64| d.is_finite())
            .ok_or_else(|| bad(format!("detuning_mhz `{}` is not a number", &record[1])))?;
        let atoms_present = match record[2].to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(bad(format!("atoms_present `{other}` is not a boolean"))),
        };
        let raw_count: u64 = record[3]
            .parse()
            .map_err(|_| bad(format!("raw_count `{}` is not a nonnegative integer", &record[3])))?;
        let dark = match record.get(4) {
            Some(s) if !s.is_empty() => s
                .parse::<f64>()
                .ok()
                .filter(|d| d.is_finite() && *d >= 0.0)
                .ok_or_else(|| bad(format!("dark_rate `{s}` is not a nonnegative number")))?,
            _ => default_dark_rate,
        };
        shots.push(ShotRecord::new(detuning, atoms_present, raw_count, dark));
    }
    if shots.is_empty() {
        return Err(MetrologyError::MalformedLog {
            row: 2,
            message: "log has no shots".into(),
        });
    }
    Ok(shots)
}

pub fn write_shot_log<W: Write>(writer: W, shots: &[ShotRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| MetrologyError::Io(e.to_string());
    w.write_record(LOG_HEADER).map_err(io)?;
    for (i, s) in shots.iter().enumerate() {
        w.write_record([
            i.to_string(),
            s.detuning.to_string(),
            s.atoms_present.to_string(),
            s.raw_count.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
