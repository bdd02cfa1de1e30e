//! Plain-text scenario files.
//!
//! One `key = value` per line; `#` starts a comment. Unknown keys are
//! rejected. The same keys are accepted as command-line overrides, which are
//! applied after the file.
//!
//! ```text
//! id = compression
//! mapping = wdp
//! channel = multipath:default   # or awgn, or multipath:<tap file>
//! alpha = 0.85
//! snr_grid = 0:20:2             # start:stop:step, or a comma list
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::scenario::{snr_range, ChannelModel, Scenario};
use crate::channel::{default_channel, MultipathChannel};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown scenario key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error(transparent)]
    Scenario(#[from] crate::error::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv|json)")),
        }
    }
}

pub const KEYS: &[&str] = &[
    "id",
    "n_subcarriers",
    "n_samples",
    "alpha",
    "cp_len",
    "mapping",
    "channel",
    "observer",
    "csi_mode",
    "eavesdropper_alpha",
    "preamble",
    "snr_grid",
    "min_errors",
    "max_bits",
    "seed",
    "csi_snr_db",
    "alphas",
    "mismatch_alpha",
    "workers",
    "format",
    "out",
];

pub const DEFAULT_ALPHAS: [f64; 5] = [0.95, 0.9, 0.85, 0.8, 0.75];

/// A scenario plus the run options that can live in the same file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// Channel as written (`awgn`, `multipath:default`, `multipath:<path>`).
    pub channel_source: String,
    pub alphas: Vec<f64>,
    pub mismatch_alpha: Option<f64>,
    pub workers: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Directory relative channel files are resolved against.
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            channel_source: "awgn".into(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            mismatch_alpha: None,
            workers: 1,
            format: OutputFormat::Csv,
            output: None,
            base_dir: PathBuf::from("."),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn parse_optional(key: &str, value: &str) -> Result<Option<f64>, ConfigError> {
    if value == "none" {
        Ok(None)
    } else {
        parse_value(key, value).map(Some)
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) =
                (parse_value(key, start)?, parse_value(key, stop)?, parse_value(key, step)?);
            if !(step > 0.0) || stop < start {
                return Err(ConfigError::InvalidValue {
                    key: key.into(),
                    value: value.into(),
                    reason: "range needs start <= stop and a positive step".into(),
                });
            }
            Ok(snr_range(start, stop, step))
        }
        [_] => parse_list(key, value),
        _ => Err(ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            reason: "expected start:stop:step or a comma-separated list".into(),
        }),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl RunConfig {
    /// Reads a scenario file; relative channel paths resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::parse(&text, &base)?;
        if cfg.scenario.id == Scenario::default().id && !text.lines().any(|l| l.trim_start().starts_with("id")) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                cfg.scenario.id = stem.to_string();
            }
        }
        Ok(cfg)
    }

    /// Parses scenario text without validating the result; call
    /// [`RunConfig::validate`] once all overrides are applied.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig {
            base_dir: base_dir.to_path_buf(),
            ..RunConfig::default()
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: 0,
                text: assignment.to_string(),
            });
        };
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let s = &mut self.scenario;
        match key {
            "id" => s.id = value.to_string(),
            "n_subcarriers" => s.waveform.n_subcarriers = parse_value(key, value)?,
            "n_samples" => s.waveform.n_samples = parse_value(key, value)?,
            "alpha" => s.waveform.alpha = parse_value(key, value)?,
            "cp_len" => s.waveform.cp_len = parse_value(key, value)?,
            "mapping" => s.mapping = parse_value(key, value)?,
            "channel" => {
                s.channel = self_channel(&self.base_dir, key, value)?;
                self.channel_source = value.to_string();
            }
            "observer" => s.observer = parse_value(key, value)?,
            "csi_mode" => s.csi_mode = parse_value(key, value)?,
            "eavesdropper_alpha" => s.eavesdropper_alpha = parse_optional(key, value)?,
            "preamble" => s.preamble = parse_value(key, value)?,
            "snr_grid" => s.snr_grid_db = parse_grid(key, value)?,
            "min_errors" => s.min_errors = parse_value(key, value)?,
            "max_bits" => s.max_bits = parse_value(key, value)?,
            "seed" => s.master_seed = parse_value(key, value)?,
            "csi_snr_db" => s.csi_snr_db = parse_optional(key, value)?,
            "alphas" => self.alphas = parse_list(key, value)?,
            "mismatch_alpha" => self.mismatch_alpha = parse_optional(key, value)?,
            "workers" => {
                let w: usize = parse_value(key, value)?;
                if w == 0 {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        value: value.into(),
                        reason: "must be positive".into(),
                    });
                }
                self.workers = w;
            }
            "format" => self.format = parse_value(key, value)?,
            "out" => {
                self.output = match value {
                    "" | "none" => None,
                    p => Some(PathBuf::from(p)),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate()?;
        for &a in &self.alphas {
            crate::waveform::validate_alpha(a)?;
        }
        if let Some(a) = self.mismatch_alpha {
            crate::waveform::validate_alpha(a)?;
        }
        Ok(())
    }
}

fn self_channel(base_dir: &Path, key: &str, value: &str) -> Result<ChannelModel, ConfigError> {
    if value == "awgn" {
        return Ok(ChannelModel::Awgn);
    }
    let Some(rest) = value.strip_prefix("multipath:") else {
        return Err(ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            reason: "expected awgn, multipath:default or multipath:<file>".into(),
        });
    };
    if rest == "default" {
        return Ok(ChannelModel::Multipath(default_channel()));
    }
    let path = base_dir.join(rest);
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    MultipathChannel::parse(&text)
        .map(ChannelModel::Multipath)
        .map_err(|e| ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            reason: e.to_string(),
        })
}

/// Resolved configuration in the file syntax.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.scenario;
        let w = &s.waveform;
        writeln!(f, "id = {}", s.id)?;
        writeln!(f, "n_subcarriers = {}", w.n_subcarriers)?;
        writeln!(f, "n_samples = {}", w.n_samples)?;
        writeln!(f, "alpha = {}", w.alpha)?;
        writeln!(f, "cp_len = {}", w.cp_len)?;
        writeln!(f, "mapping = {}", s.mapping)?;
        writeln!(f, "channel = {}", self.channel_source)?;
        if let ChannelModel::Multipath(ch) = &s.channel {
            for t in ch.taps() {
                writeln!(f, "#   tap delay={} gain={}{:+}j", t.delay, t.gain.re, t.gain.im)?;
            }
        }
        writeln!(f, "observer = {}", s.observer)?;
        writeln!(f, "csi_mode = {}", s.csi_mode)?;
        writeln!(f, "eavesdropper_alpha = {}", opt(s.eavesdropper_alpha))?;
        writeln!(f, "preamble = {}", s.preamble)?;
        writeln!(f, "snr_grid = {}", join(&s.snr_grid_db))?;
        writeln!(f, "min_errors = {}", s.min_errors)?;
        writeln!(f, "max_bits = {}", s.max_bits)?;
        writeln!(f, "seed = {}", s.master_seed)?;
        writeln!(f, "csi_snr_db = {}", opt(s.csi_snr_db))?;
        writeln!(f, "alphas = {}", join(&self.alphas))?;
        writeln!(f, "mismatch_alpha = {}", opt(self.mismatch_alpha))?;
        writeln!(f, "workers = {}", self.workers)?;
        writeln!(f, "format = {}", self.format)?;
        writeln!(
            f,
            "out = {}",
            self.output.as_ref().map_or("none".into(), |p| p.display().to_string())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::Observer;
    use crate::harness::scenario::{CsiMode, Mapping};

    #[test]
    fn parses_every_key() {
        let text = "\
            # comment\n\
            id = mismatch\n\
            n_subcarriers = 32\n\
            n_samples = 64\n\
            alpha = 0.85\n\
            cp_len = 6\n\
            mapping = plain\n\
            channel = multipath:default\n\
            observer = eavesdropper\n\
            csi_mode = estimated\n\
            eavesdropper_alpha = 1.0\n\
            preamble = random\n\
            snr_grid = 0:4:2\n\
            min_errors = 200\n\
            max_bits = 1000000\n\
            seed = 7\n\
            csi_snr_db = 30\n\
            alphas = 0.9, 0.8\n\
            mismatch_alpha = 1\n\
            workers = 4\n\
            format = json\n\
            out = res.json\n";
        let cfg = RunConfig::parse(text, Path::new(".")).unwrap();
        cfg.validate().unwrap();
        let s = &cfg.scenario;
        assert_eq!(s.id, "mismatch");
        assert_eq!(s.waveform.n_subcarriers, 32);
        assert_eq!(s.waveform.alpha, 0.85);
        assert_eq!(s.mapping, Mapping::PlainOfdm);
        assert_eq!(s.channel, ChannelModel::Multipath(default_channel()));
        assert_eq!(s.observer, Observer::Eavesdropper);
        assert_eq!(s.csi_mode, CsiMode::Estimated);
        assert_eq!(s.eavesdropper_alpha, Some(1.0));
        assert_eq!(s.snr_grid_db, vec![0.0, 2.0, 4.0]);
        assert_eq!((s.min_errors, s.max_bits, s.master_seed), (200, 1_000_000, 7));
        assert_eq!(s.csi_snr_db, Some(30.0));
        assert_eq!(cfg.alphas, vec![0.9, 0.8]);
        assert_eq!(cfg.mismatch_alpha, Some(1.0));
        assert_eq!(cfg.workers, 4);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.output, Some(PathBuf::from("res.json")));

        // resolved form parses back to the same configuration
        let again = RunConfig::parse(&cfg.to_string(), Path::new(".")).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse("alpha = 0.9\nbandwidth = 3\n", Path::new(".")).unwrap_err();
        assert!(matches!(&err, ConfigError::UnknownKey(k) if k == "bandwidth"));
        assert!(err.to_string().contains("bandwidth"));
    }

    #[test]
    fn syntax_and_value_errors() {
        assert!(matches!(
            RunConfig::parse("alpha 0.9\n", Path::new(".")),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("alpha = fast\n", Path::new(".")),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse("channel = rayleigh\n", Path::new(".")),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse("workers = 0\n", Path::new(".")),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse("channel = multipath:/nonexistent/taps.txt\n", Path::new(".")),
            Err(ConfigError::Io { .. })
        ));
        let cfg = RunConfig::parse("alpha = 1.5\n", Path::new(".")).unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Scenario(_))));
    }

    #[test]
    fn overrides_follow_file_values() {
        let mut cfg = RunConfig::parse("seed = 3\nalpha = 0.9\n", Path::new(".")).unwrap();
        cfg.apply_override("seed=11").unwrap();
        assert_eq!(cfg.scenario.master_seed, 11);
        assert_eq!(cfg.scenario.waveform.alpha, 0.9);
        assert!(matches!(cfg.apply_override("nope=1"), Err(ConfigError::UnknownKey(_))));
        assert!(cfg.apply_override("seed").is_err());
    }

    #[test]
    fn channel_file_resolves_relative_to_scenario() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("taps.txt"), "0 1 0\n2 0 0.5\n").unwrap();
        let scn = dir.path().join("run.scn");
        std::fs::write(&scn, "channel = multipath:taps.txt\n").unwrap();
        let cfg = RunConfig::load(&scn).unwrap();
        assert_eq!(cfg.scenario.id, "run");
        match &cfg.scenario.channel {
            ChannelModel::Multipath(ch) => assert_eq!(ch.max_delay(), 2),
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(dir.path().join("bad.txt"), "3 1 0\n1 1 0\n").unwrap();
        assert!(matches!(
            RunConfig::parse("channel = multipath:bad.txt\n", dir.path()),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn comma_grid() {
        let cfg = RunConfig::parse("snr_grid = 12, 0, 6\n", Path::new(".")).unwrap();
        assert_eq!(cfg.scenario.snr_grid_db, vec![12.0, 0.0, 6.0]);
    }
}
