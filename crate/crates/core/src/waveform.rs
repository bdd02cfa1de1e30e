//! Bandwidth-compressed multicarrier modulation.
//!
//! A symbol of `N` sub-carriers is mapped onto `Q >= N` time samples through
//! the matrix `F(q, k) = exp(j 2π q k α / Q) / √Q`. With `α = 1` the columns
//! are orthonormal DFT columns (OFDM); with `α < 1` the sub-carriers overlap
//! (SEFDM). Demodulation is the matched filter `Fᴴ y`.

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Modulation matrix for one waveform configuration, stored together with its
/// conjugate transpose so both directions are a single matrix-vector product.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierMatrix {
    n_subcarriers: usize,
    n_samples: usize,
    alpha: f64,
    entries: Array2<Complex64>,
    adjoint: Array2<Complex64>,
}

/// Kernel value `exp(j 2π q k α / Q) / √Q`, evaluated directly.
pub fn kernel(q: usize, k: usize, alpha: f64, n_samples: usize) -> Complex64 {
    // Reduce q*k modulo Q before scaling so large products keep full precision
    // when α = 1.
    let phase = if alpha == 1.0 {
        2.0 * PI * ((q * k) % n_samples) as f64 / n_samples as f64
    } else {
        2.0 * PI * (q as f64) * (k as f64) * alpha / n_samples as f64
    };
    Complex64::from_polar(1.0 / (n_samples as f64).sqrt(), phase)
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

impl SubcarrierMatrix {
    pub fn new(n_subcarriers: usize, n_samples: usize, alpha: f64) -> Result<Self> {
        if n_subcarriers == 0 {
            return Err(Error::NoSubcarriers);
        }
        if n_samples < n_subcarriers {
            return Err(Error::TooFewSamples {
                n_subcarriers,
                n_samples,
            });
        }
        validate_alpha(alpha)?;
        let entries = Array2::from_shape_fn((n_samples, n_subcarriers), |(q, k)| {
            kernel(q, k, alpha, n_samples)
        });
        let adjoint = entries.t().mapv(|z| z.conj());
        Ok(Self {
            n_subcarriers,
            n_samples,
            alpha,
            entries,
            adjoint,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The `Q x N` modulation matrix.
    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    /// The `N x Q` matched-filter (conjugate transpose) matrix.
    pub fn adjoint(&self) -> &Array2<Complex64> {
        &self.adjoint
    }

    /// `F · s`: maps `N` symbols onto `Q` time samples.
    pub fn modulate(&self, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.n_subcarriers, symbols.len())?;
        Ok(self.entries.dot(&ArrayView1::from(symbols)).to_vec())
    }

    /// `Fᴴ · y`: projects `Q` prefix-free samples onto the `N` sub-carriers.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.n_samples, samples.len())?;
        Ok(self.adjoint.dot(&ArrayView1::from(samples)).to_vec())
    }

    /// Sub-carrier correlation `C = Fᴴ F`. Identity for α = 1; the
    /// off-diagonal terms measure inter-carrier interference otherwise.
    pub fn correlation_matrix(&self) -> Array2<Complex64> {
        self.adjoint.dot(&self.entries)
    }
}

/// Builds the matrix for `n_subcarriers` sub-carriers over `n_samples` samples.
pub fn build_subcarrier_matrix(
    n_subcarriers: usize,
    n_samples: usize,
    alpha: f64,
) -> Result<SubcarrierMatrix> {
    SubcarrierMatrix::new(n_subcarriers, n_samples, alpha)
}

/// Prepends the last `cp_len` samples of `x`.
pub fn add_cyclic_prefix(x: &[Complex64], cp_len: usize) -> Result<Vec<Complex64>> {
    if cp_len > x.len() {
        return Err(Error::PrefixTooLong {
            cp_len,
            n_samples: x.len(),
        });
    }
    let mut out = Vec::with_capacity(x.len() + cp_len);
    out.extend_from_slice(&x[x.len() - cp_len..]);
    out.extend_from_slice(x);
    Ok(out)
}

/// Drops the leading `cp_len` samples of a prefixed block of `n_samples + cp_len`.
pub fn remove_cyclic_prefix(
    y: &[Complex64],
    cp_len: usize,
    n_samples: usize,
) -> Result<Vec<Complex64>> {
    check_len(n_samples + cp_len, y.len())?;
    Ok(y[cp_len..].to_vec())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
