//! Scenario-driven Monte-Carlo experiments and their persisted results.

pub mod config;
pub mod engine;
pub mod record;
pub mod scenario;

pub use config::{ConfigError, OutputFormat, RunConfig};
pub use engine::{
    derive_seed, frame_rng, run_csi_experiment, scenario_preambles, security_scenarios, Link, Simulator,
};
pub use record::{results_json, write_atomic, write_results_csv, BerRecord, RESULTS_CSV_HEADER};
pub use scenario::{snr_range, ChannelModel, CsiMode, Mapping, Scenario, WaveformConfig};
