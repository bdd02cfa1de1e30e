//! Static multipath channel, AWGN and the demodulator-view composite matrix.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::waveform::SubcarrierMatrix;

/// One propagation path: delay in samples and complex gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay: usize,
    pub gain: Complex64,
}

/// Tapped-delay-line channel with strictly increasing delays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipathChannel {
    taps: Vec<Tap>,
}

impl MultipathChannel {
    pub fn new(taps: Vec<Tap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyChannel);
        }
        for w in taps.windows(2) {
            if w[1].delay <= w[0].delay {
                return Err(Error::NonIncreasingDelay {
                    previous: w[0].delay,
                    delay: w[1].delay,
                });
            }
        }
        Ok(Self { taps })
    }

    /// Single unit tap at delay 0.
    pub fn identity() -> Self {
        Self {
            taps: vec![Tap {
                delay: 0,
                gain: Complex64::new(1.0, 0.0),
            }],
        }
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn max_delay(&self) -> usize {
        self.taps.last().map_or(0, |t| t.delay)
    }

    /// Linear convolution truncated to the input length, zero initial state.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let required = self.max_delay() + 1;
        if x.len() < required {
            return Err(Error::InputShorterThanChannel {
                len: x.len(),
                required,
            });
        }
        let mut y = vec![Complex64::default(); x.len()];
        for tap in &self.taps {
            for (out, &input) in y[tap.delay..].iter_mut().zip(x) {
                *out += tap.gain * input;
            }
        }
        Ok(y)
    }

    /// `H(k) = Σ g · exp(−j 2π k α d / Q)` for each sub-carrier of `matrix`.
    pub fn frequency_response(&self, matrix: &SubcarrierMatrix) -> Vec<Complex64> {
        let q = matrix.n_samples() as f64;
        let alpha = matrix.alpha();
        (0..matrix.n_subcarriers())
            .map(|k| {
                self.taps
                    .iter()
                    .map(|t| {
                        t.gain * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * alpha * t.delay as f64 / q)
                    })
                    .sum()
            })
            .collect()
    }

    /// `G = Fᴴ H F` with `H` the circulant equivalent of the channel under a
    /// cyclic prefix of `cp_len` samples.
    pub fn composite_matrix(&self, matrix: &SubcarrierMatrix, cp_len: usize) -> Result<Array2<Complex64>> {
        if cp_len < self.max_delay() {
            return Err(Error::PrefixShorterThanChannel {
                cp_len,
                max_delay: self.max_delay(),
            });
        }
        let q = matrix.n_samples();
        if self.max_delay() >= q {
            return Err(Error::ChannelTooLong {
                max_delay: self.max_delay(),
                n_samples: q,
            });
        }
        let f = matrix.entries();
        // circularly shifted copies of each column
        let hf = Array2::from_shape_fn(f.dim(), |(row, col)| {
            self.taps
                .iter()
                .map(|t| t.gain * f[[(row + q - t.delay) % q, col]])
                .sum::<Complex64>()
        });
        Ok(matrix.adjoint().dot(&hf))
    }

    /// Parses the plain-text tap format: one `delay real imag` triple per
    /// line. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut taps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidScenario(format!("channel line {}: {what}: {raw:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad("expected `delay_samples real_gain imag_gain`"));
            }
            let delay = fields[0].parse::<usize>().map_err(|_| bad("bad delay"))?;
            let re = fields[1].parse::<f64>().map_err(|_| bad("bad real gain"))?;
            let im = fields[2].parse::<f64>().map_err(|_| bad("bad imaginary gain"))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(bad("gain must be finite"));
            }
            taps.push(Tap {
                delay,
                gain: Complex64::new(re, im),
            });
        }
        Self::new(taps)
    }
}

impl FromStr for MultipathChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for MultipathChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.taps {
            writeln!(f, "{} {} {}", t.delay, t.gain.re, t.gain.im)?;
        }
        Ok(())
    }
}

/// `0.8655 δ(t) + 0.255 e^{−jπ/2} δ(t − 3) − 0.4312 e^{jπ/2} δ(t − 5)`.
pub fn default_channel() -> MultipathChannel {
    MultipathChannel {
        taps: vec![
            Tap {
                delay: 0,
                gain: Complex64::new(0.8655, 0.0),
            },
            Tap {
                delay: 3,
                gain: Complex64::from_polar(0.255, -FRAC_PI_2),
            },
            Tap {
                delay: 5,
                gain: -Complex64::from_polar(0.4312, FRAC_PI_2),
            },
        ],
    }
}

/// Noise level and seed for [`add_awgn`]. An infinite SNR disables noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless(seed: u64) -> Self {
        Self {
            snr_db: f64::INFINITY,
            seed,
        }
    }
}

/// Per-sample complex noise variance giving `snr_db` per sub-carrier after
/// matched filtering with unit-norm columns and unit symbol energy.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn add_awgn(x: &[Complex64], spec: &NoiseSpec) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = x.to_vec();
    add_awgn_in_place(&mut out, spec.snr_db, &mut rng);
    out
}

/// Adds circularly-symmetric Gaussian noise drawn from `rng`.
pub fn add_awgn_in_place(x: &mut [Complex64], snr_db: f64, rng: &mut impl Rng) {
    if snr_db == f64::INFINITY {
        return;
    }
    let sigma = (noise_variance(snr_db) / 2.0).sqrt();
    for z in x.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z += Complex64::new(re * sigma, im * sigma);
    }
}
