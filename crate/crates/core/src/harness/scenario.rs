use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::channel::MultipathChannel;
use crate::csi::Observer;
use crate::error::{Error, Result};
use crate::mapping::PreambleStyle;
use crate::waveform::{validate_alpha, SubcarrierMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformConfig {
    pub n_subcarriers: usize,
    pub n_samples: usize,
    pub alpha: f64,
    pub cp_len: usize,
}

impl Default for WaveformConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            n_samples: 128,
            alpha: 1.0,
            cp_len: 8,
        }
    }
}

impl WaveformConfig {
    pub fn matrix(&self) -> Result<SubcarrierMatrix> {
        SubcarrierMatrix::new(self.n_subcarriers, self.n_samples, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    /// Independent QPSK symbol on every sub-carrier.
    #[serde(rename = "plain")]
    PlainOfdm,
    /// Opposite-sign pairing with receiver combining.
    Wdp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChannelModel {
    Awgn,
    Multipath(MultipathChannel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsiMode {
    /// Equalize with the channel frequency response.
    Ideal,
    /// Equalize with a per-frame estimate from the training symbol.
    Estimated,
}

/// Everything that determines one Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub waveform: WaveformConfig,
    pub mapping: Mapping,
    pub channel: ChannelModel,
    pub observer: Observer,
    pub csi_mode: CsiMode,
    /// Compression factor the receiver demodulates with, when it differs
    /// from the transmitter's.
    pub eavesdropper_alpha: Option<f64>,
    pub preamble: PreambleStyle,
    pub snr_grid_db: Vec<f64>,
    pub min_errors: u64,
    pub max_bits: u64,
    pub master_seed: u64,
    /// Training-symbol SNR for CSI dumps; `None` is noiseless.
    pub csi_snr_db: Option<f64>,
}

pub const MIN_ERRORS_FLOOR: u64 = 100;
pub const DEFAULT_MAX_BITS: u64 = 20_000_000;

impl Default for Scenario {
    fn default() -> Self {
        Self {
            id: "scenario".to_string(),
            waveform: WaveformConfig::default(),
            mapping: Mapping::Wdp,
            channel: ChannelModel::Awgn,
            observer: Observer::Legitimate,
            csi_mode: CsiMode::Ideal,
            eavesdropper_alpha: None,
            preamble: PreambleStyle::Paired,
            snr_grid_db: snr_range(0.0, 20.0, 2.0),
            min_errors: MIN_ERRORS_FLOOR,
            max_bits: DEFAULT_MAX_BITS,
            master_seed: 1,
            csi_snr_db: None,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        let w = &self.waveform;
        self.waveform.matrix()?;
        if let Some(a) = self.eavesdropper_alpha {
            validate_alpha(a)?;
        }
        if w.cp_len > w.n_samples {
            return bad(format!("cp_len {} exceeds n_samples {}", w.cp_len, w.n_samples));
        }
        if w.n_subcarriers % 2 != 0 {
            return Err(Error::OddSubcarrierCount(w.n_subcarriers));
        }
        if let ChannelModel::Multipath(ch) = &self.channel {
            if ch.max_delay() >= w.n_samples {
                return Err(Error::ChannelTooLong {
                    max_delay: ch.max_delay(),
                    n_samples: w.n_samples,
                });
            }
        }
        if self.snr_grid_db.is_empty() {
            return bad("snr_grid is empty".into());
        }
        if self.snr_grid_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return bad("snr_grid contains an invalid value".into());
        }
        if self.min_errors < MIN_ERRORS_FLOOR {
            return bad(format!("min_errors {} is below {MIN_ERRORS_FLOOR}", self.min_errors));
        }
        if self.max_bits == 0 {
            return bad("max_bits must be positive".into());
        }
        if self.id.is_empty() || self.id.contains([',', '\n', '"']) {
            return bad(format!("scenario id {:?} must be non-empty without commas or quotes", self.id));
        }
        Ok(())
    }

    /// Bits checked per frame: information bits only when symbols are paired.
    pub fn bits_per_frame(&self) -> usize {
        match self.mapping {
            Mapping::PlainOfdm => 2 * self.waveform.n_subcarriers,
            Mapping::Wdp => self.waveform.n_subcarriers,
        }
    }

    pub fn receiver_alpha(&self) -> f64 {
        self.eavesdropper_alpha.unwrap_or(self.waveform.alpha)
    }
}

/// Inclusive grid `start, start + step, ..., stop`.
pub fn snr_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mapping::PlainOfdm => "plain",
            Mapping::Wdp => "wdp",
        })
    }
}

impl FromStr for Mapping {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" | "ofdm" => Ok(Mapping::PlainOfdm),
            "wdp" => Ok(Mapping::Wdp),
            other => Err(format!("unknown mapping {other:?} (expected plain|wdp)")),
        }
    }
}

impl fmt::Display for CsiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CsiMode::Ideal => "ideal",
            CsiMode::Estimated => "estimated",
        })
    }
}

impl FromStr for CsiMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ideal" => Ok(CsiMode::Ideal),
            "estimated" => Ok(CsiMode::Estimated),
            other => Err(format!("unknown csi_mode {other:?} (expected ideal|estimated)")),
        }
    }
}

impl fmt::Display for PreambleStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreambleStyle::Paired => "paired",
            PreambleStyle::Random => "random",
        })
    }
}

impl FromStr for PreambleStyle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paired" => Ok(PreambleStyle::Paired),
            "random" => Ok(PreambleStyle::Random),
            other => Err(format!("unknown preamble {other:?} (expected paired|random)")),
        }
    }
}
