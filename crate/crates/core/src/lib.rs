//! Multicarrier link simulator for opposite-sign sub-carrier pairing and
//! bandwidth-compressed (non-orthogonal) waveforms.
//!
//! The pairing hides channel phase from receivers that only know the public
//! training symbols; the compression factor `α` makes demodulation fail for
//! receivers that do not know it. [`harness`] turns both into BER and CSI
//! experiments.

pub mod channel;
pub mod csi;
pub mod error;
pub mod harness;
pub mod mapping;
pub mod waveform;

pub use error::{Error, Result};
