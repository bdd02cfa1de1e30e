use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use std::path::Path;

/// One measured BER point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub scenario_id: String,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// 95% normal-approximation binomial half-width.
    pub ci_halfwidth: f64,
    /// The bit budget ran out before the error target was reached.
    pub ber_floor_uncertain: bool,
}

impl BerRecord {
    pub fn new(scenario_id: impl Into<String>, snr_db: f64, bits: u64, errors: u64, min_errors: u64) -> Self {
        let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
        let ci_halfwidth = if bits == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        Self {
            scenario_id: scenario_id.into(),
            snr_db,
            bits,
            errors,
            ber,
            ci_halfwidth,
            ber_floor_uncertain: errors < min_errors,
        }
    }

    /// Upper end of the interval. With no errors observed, uses the
    /// rule-of-three bound `3 / bits`.
    pub fn upper(&self) -> f64 {
        if self.errors == 0 {
            3.0 / self.bits.max(1) as f64
        } else {
            self.ber + self.ci_halfwidth
        }
    }

    pub fn lower(&self) -> f64 {
        (self.ber - self.ci_halfwidth).max(0.0)
    }
}

pub const RESULTS_CSV_HEADER: &str = "scenario_id,snr_db,bits,errors,ber,ci_halfwidth";

pub fn write_results_csv<W: Write>(out: &mut W, records: &[BerRecord]) -> io::Result<()> {
    writeln!(out, "{RESULTS_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scenario_id, r.snr_db, r.bits, r.errors, r.ber, r.ci_halfwidth
        )?;
    }
    Ok(())
}

pub fn results_json(records: &[BerRecord]) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(records)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the destination directory and renames
/// it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
