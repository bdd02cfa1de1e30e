//! Per-sub-carrier channel estimation from training symbols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::waveform::check_len;

/// Who is estimating. The legitimate receiver divides by the transmitted
/// (paired) training vector; the eavesdropper only knows the public one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observer {
    Legitimate,
    Eavesdropper,
}

impl fmt::Display for Observer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observer::Legitimate => "legitimate",
            Observer::Eavesdropper => "eavesdropper",
        })
    }
}

impl FromStr for Observer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "legitimate" => Ok(Observer::Legitimate),
            "eavesdropper" => Ok(Observer::Eavesdropper),
            other => Err(format!("unknown observer {other:?} (expected legitimate|eavesdropper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsiEstimate {
    pub observer: Observer,
    pub coefficients: Vec<Complex64>,
    pub amplitudes: Vec<f64>,
    /// Four-quadrant phase in (−π, π].
    pub phases: Vec<f64>,
}

impl CsiEstimate {
    pub fn from_coefficients(observer: Observer, coefficients: Vec<Complex64>) -> Self {
        let amplitudes = coefficients.iter().map(|h| h.norm()).collect();
        let phases = coefficients.iter().map(|h| wrap_phase(h.arg())).collect();
        Self {
            observer,
            coefficients,
            amplitudes,
            phases,
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Maps an angle into (−π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `h(k) = received(k) / reference(k)`.
pub fn estimate_csi(received: &[Complex64], reference: &[Complex64], observer: Observer) -> Result<CsiEstimate> {
    check_len(reference.len(), received.len())?;
    let coefficients = received
        .iter()
        .zip(reference)
        .enumerate()
        .map(|(index, (r, s))| {
            if s.norm_sqr() == 0.0 {
                Err(Error::ZeroDivisor {
                    what: "reference symbol",
                    index,
                })
            } else {
                Ok(r / s)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CsiEstimate::from_coefficients(observer, coefficients))
}

/// Wrapped `legit.phase − eaves.phase` per sub-carrier.
pub fn csi_phase_gap(legit: &CsiEstimate, eaves: &CsiEstimate) -> Result<Vec<f64>> {
    check_len(legit.len(), eaves.len())?;
    Ok(legit
        .phases
        .iter()
        .zip(&eaves.phases)
        .map(|(a, b)| wrap_phase(a - b))
        .collect())
}

/// One-tap equalization `r(k) / h(k)`.
pub fn equalize(r: &[Complex64], csi: &CsiEstimate) -> Result<Vec<Complex64>> {
    equalize_with(r, &csi.coefficients)
}

pub fn equalize_with(r: &[Complex64], coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(coefficients.len(), r.len())?;
    r.iter()
        .zip(coefficients)
        .enumerate()
        .map(|(index, (y, h))| {
            if h.norm_sqr() == 0.0 {
                Err(Error::ZeroDivisor {
                    what: "channel coefficient",
                    index,
                })
            } else {
                Ok(y / h)
            }
        })
        .collect()
}

pub const CSI_CSV_HEADER: &str = "subcarrier,observer,amp,phase,re,im";

/// Writes the CSI dump: one row per (sub-carrier, observer), ordered by
/// sub-carrier then by the order of `estimates`.
pub fn write_csi_csv<W: Write>(out: &mut W, estimates: &[&CsiEstimate]) -> std::io::Result<()> {
    writeln!(out, "{CSI_CSV_HEADER}")?;
    let n = estimates.first().map_or(0, |e| e.len());
    for k in 0..n {
        for e in estimates {
            let h = e.coefficients[k];
            writeln!(
                out,
                "{k},{},{},{},{},{}",
                e.observer, e.amplitudes[k], e.phases[k], h.re, h.im
            )?;
        }
    }
    Ok(())
}
