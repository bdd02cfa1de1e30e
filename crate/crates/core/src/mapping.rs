//! QPSK mapping and opposite-sign sub-carrier pairing.
//!
//! Each information symbol occupies an even (0-based) sub-carrier and its
//! negation the following odd one. The public training vector is fixed; the
//! transmitted one repeats its information entries with negated copies, so an
//! observer dividing by the public vector gets the wrong phase on every paired
//! sub-carrier while the amplitude stays correct.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::waveform::check_len;

/// Gray-mapped QPSK point with unit energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpskSymbol(Complex64);

impl QpskSymbol {
    /// Maps two bits: `00 → (+1+j)/√2`, `01 → (−1+j)/√2`, `11 → (−1−j)/√2`,
    /// `10 → (+1−j)/√2`.
    pub fn from_bits(b0: u8, b1: u8) -> Self {
        let re = if b1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        let im = if b0 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        QpskSymbol(Complex64::new(re, im))
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        Self::from_bits(rng.random_range(0..2), rng.random_range(0..2))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<QpskSymbol> for Complex64 {
    fn from(s: QpskSymbol) -> Self {
        s.0
    }
}

/// Maps `2 * count` bits onto `count` QPSK symbols.
pub fn qpsk_map(bits: &[u8], count: usize) -> Result<Vec<QpskSymbol>> {
    if bits.len() % 2 != 0 {
        return Err(Error::OddBitCount(bits.len()));
    }
    check_len(2 * count, bits.len())?;
    Ok(bits
        .chunks_exact(2)
        .map(|b| QpskSymbol::from_bits(b[0], b[1]))
        .collect())
}

/// Hard-decision demapping. A component of exactly zero decides bit 0.
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(2 * symbols.len());
    for s in symbols {
        bits.push(u8::from(s.im < 0.0));
        bits.push(u8::from(s.re < 0.0));
    }
    bits
}

/// Lays `effective` out as `[s0, -s0, s1, -s1, ...]`.
pub fn wdp_expand(effective: &[Complex64]) -> Vec<Complex64> {
    effective.iter().flat_map(|&s| [s, -s]).collect()
}

/// Like [`wdp_expand`] but checks the output length against `n_subcarriers`.
pub fn wdp_expand_checked(effective: &[Complex64], n_subcarriers: usize) -> Result<Vec<Complex64>> {
    if n_subcarriers % 2 != 0 {
        return Err(Error::OddSubcarrierCount(n_subcarriers));
    }
    check_len(n_subcarriers / 2, effective.len())?;
    Ok(wdp_expand(effective))
}

/// Receiver-side pairwise combining `r[2m] - r[2m+1]`.
pub fn wdp_combine(r: &[Complex64]) -> Result<Vec<Complex64>> {
    if r.len() % 2 != 0 {
        return Err(Error::OddSubcarrierCount(r.len()));
    }
    Ok(r.chunks_exact(2).map(|p| p[0] - p[1]).collect())
}

/// A transmitted frame: the information symbols and their paired layout.
#[derive(Debug, Clone, PartialEq)]
pub struct WdpFrame {
    pub effective_symbols: Vec<QpskSymbol>,
    pub expanded: Vec<Complex64>,
}

impl WdpFrame {
    pub fn new(effective_symbols: Vec<QpskSymbol>) -> Self {
        let values: Vec<Complex64> = effective_symbols.iter().map(|s| s.value()).collect();
        let expanded = wdp_expand(&values);
        Self {
            effective_symbols,
            expanded,
        }
    }
}

/// How the public training vector relates to the transmitted paired one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PreambleStyle {
    /// Public training symbols come in equal pairs, so every paired
    /// sub-carrier of the transmitted vector is the exact negation of the
    /// public one.
    #[default]
    Paired,
    /// Public training symbols are all independent; the transmitted vector
    /// reuses its information entries, so paired sub-carriers differ from the
    /// public vector by a random QPSK rotation.
    Random,
}

/// Public (`standard`) and transmitted (`wdp`) training vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PreamblePair {
    pub standard: Vec<Complex64>,
    pub wdp: Vec<Complex64>,
}

pub fn build_preambles(seed: u64, n_subcarriers: usize, style: PreambleStyle) -> Result<PreamblePair> {
    if n_subcarriers % 2 != 0 {
        return Err(Error::OddSubcarrierCount(n_subcarriers));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut standard: Vec<Complex64> = (0..n_subcarriers)
        .map(|_| QpskSymbol::random(&mut rng).value())
        .collect();
    if style == PreambleStyle::Paired {
        for m in 0..n_subcarriers / 2 {
            standard[2 * m + 1] = standard[2 * m];
        }
    }
    let info: Vec<Complex64> = standard.iter().step_by(2).copied().collect();
    let wdp = wdp_expand(&info);
    Ok(PreamblePair { standard, wdp })
}

/// Composite matrix `G` and the effective matrices seen after pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeEffectiveMatrix {
    /// `G`, `N x N`.
    pub g: Array2<Complex64>,
    /// `N x N/2`: column `m` is `G(·, 2m) - G(·, 2m+1)`.
    pub g_prime: Array2<Complex64>,
    /// `N/2 x N/2`: `2G(ξ,k) - G(ξ,k+1) - G(ξ+1,k)` at even (0-based) ξ, k.
    /// Equals [`Self::g_combined`] when `G` is Toeplitz.
    pub g_double_prime: Array2<Complex64>,
    /// `N/2 x N/2`: `G(ξ,k) - G(ξ,k+1) - G(ξ+1,k) + G(ξ+1,k+1)`, the exact
    /// map from information symbols to combined outputs for any `G`.
    pub g_combined: Array2<Complex64>,
}

pub fn effective_composite(g: &Array2<Complex64>) -> Result<CompositeEffectiveMatrix> {
    let (rows, cols) = g.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch {
            expected: rows,
            rows,
            cols,
        });
    }
    let n = rows;
    if n % 2 != 0 {
        return Err(Error::OddSubcarrierCount(n));
    }
    let half = n / 2;
    let g_prime = Array2::from_shape_fn((n, half), |(phi, m)| g[[phi, 2 * m]] - g[[phi, 2 * m + 1]]);
    let g_double_prime = Array2::from_shape_fn((half, half), |(x, m)| {
        let (xi, k) = (2 * x, 2 * m);
        2.0 * g[[xi, k]] - g[[xi, k + 1]] - g[[xi + 1, k]]
    });
    let g_combined =
        Array2::from_shape_fn((half, half), |(x, m)| g_prime[[2 * x, m]] - g_prime[[2 * x + 1, m]]);
    Ok(CompositeEffectiveMatrix {
        g: g.clone(),
        g_prime,
        g_double_prime,
        g_combined,
    })
}

/// Residual inter-carrier interference of an effective matrix: off-diagonal
/// energy over diagonal energy.
pub fn interference_ratio(m: &Array2<Complex64>) -> f64 {
    let (mut diag, mut off) = (0.0, 0.0);
    for ((i, j), z) in m.indexed_iter() {
        if i == j {
            diag += z.norm_sqr();
        } else {
            off += z.norm_sqr();
        }
    }
    off / diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array1;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gray_mapping_table() {
        let h = FRAC_1_SQRT_2;
        let s = qpsk_map(&[0, 0], 1).unwrap();
        assert_eq!(s[0].value(), c(h, h));
        let s = qpsk_map(&[1, 1, 0, 0], 2).unwrap();
        assert_eq!(s[0].value(), c(-h, -h));
        assert_eq!(s[1].value(), c(h, h));
        assert_eq!(qpsk_map(&[0, 1], 1).unwrap()[0].value(), c(-h, h));
        assert_eq!(qpsk_map(&[1, 0], 1).unwrap()[0].value(), c(h, -h));
    }

    #[test]
    fn map_rejects_bad_lengths() {
        assert_eq!(qpsk_map(&[0, 1, 1], 1), Err(Error::OddBitCount(3)));
        assert!(matches!(qpsk_map(&[0, 1], 2), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn exhaustive_round_trip() {
        for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let s = qpsk_map(&bits, 1).unwrap();
            assert_abs_diff_eq!(s[0].value().norm(), 1.0, epsilon = 1e-12);
            assert_eq!(qpsk_demap(&[s[0].value()]), bits.to_vec());
        }
    }

    #[test]
    fn demap_quadrants_and_ties() {
        assert_eq!(qpsk_demap(&[c(0.9, 0.1)]), vec![0, 0]);
        assert_eq!(qpsk_demap(&[c(-0.3, -2.0)]), vec![1, 1]);
        assert_eq!(qpsk_demap(&[c(0.0, 0.0)]), vec![0, 0]);
        assert_eq!(qpsk_demap(&[c(-0.0, -0.0)]), vec![0, 0]);
    }

    #[test]
    fn expand_pattern() {
        let (s1, s3) = (c(1.0, 2.0), c(-3.0, 0.5));
        assert_eq!(wdp_expand(&[s1, s3]), vec![s1, -s1, s3, -s3]);
        assert!(wdp_expand(&[c(0.0, 0.0); 4]).iter().all(|z| z.norm() == 0.0));
        assert_eq!(wdp_expand_checked(&[s1], 4), Err(Error::LengthMismatch { expected: 2, actual: 1 }));
        assert_eq!(wdp_expand_checked(&[s1], 3), Err(Error::OddSubcarrierCount(3)));
    }

    #[test]
    fn combine_examples() {
        let s = [c(0.5, -0.5), c(-1.0, 1.0)];
        let combined = wdp_combine(&wdp_expand(&s)).unwrap();
        assert_eq!(combined, vec![2.0 * s[0], 2.0 * s[1]]);
        assert!(wdp_combine(&[c(0.0, 0.0); 6]).unwrap().iter().all(|z| z.norm() == 0.0));
        assert_eq!(wdp_combine(&[c(0.0, 0.0); 3]), Err(Error::OddSubcarrierCount(3)));
    }

    #[test]
    fn frame_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frame = WdpFrame::new((0..32).map(|_| QpskSymbol::random(&mut rng)).collect());
        assert_eq!(frame.expanded.len(), 64);
        for m in 0..32 {
            assert_eq!(frame.expanded[2 * m], frame.effective_symbols[m].value());
            assert_eq!(frame.expanded[2 * m] + frame.expanded[2 * m + 1], c(0.0, 0.0));
        }
    }

    #[test]
    fn preambles_are_deterministic_and_unit_modulus() {
        for style in [PreambleStyle::Paired, PreambleStyle::Random] {
            let a = build_preambles(9, 64, style).unwrap();
            assert_eq!(a, build_preambles(9, 64, style).unwrap());
            for k in 0..64 {
                assert_abs_diff_eq!(a.standard[k].norm(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(a.wdp[k].norm(), 1.0, epsilon = 1e-12);
            }
            for m in 0..32 {
                assert_eq!(a.wdp[2 * m] + a.wdp[2 * m + 1], c(0.0, 0.0));
                assert_eq!(a.wdp[2 * m], a.standard[2 * m]);
            }
        }
        let p = build_preambles(9, 64, PreambleStyle::Paired).unwrap();
        for m in 0..32 {
            assert_eq!(p.wdp[2 * m + 1], -p.standard[2 * m + 1]);
        }
        assert_eq!(build_preambles(1, 5, PreambleStyle::Paired), Err(Error::OddSubcarrierCount(5)));
    }

    #[test]
    fn effective_composite_of_identity() {
        let eff = effective_composite(&Array2::eye(8)).unwrap();
        for x in 0..4 {
            for m in 0..4 {
                let expected = if x == m { 2.0 } else { 0.0 };
                assert_eq!(eff.g_double_prime[[x, m]], c(expected, 0.0));
                assert_eq!(eff.g_combined[[x, m]], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn effective_composite_of_diagonal() {
        let d: Vec<Complex64> = (0..8).map(|k| c(1.0 + k as f64, -(k as f64) * 0.5)).collect();
        let g = Array2::from_diag(&Array1::from(d.clone()));
        let eff = effective_composite(&g).unwrap();
        for x in 0..4 {
            for m in 0..4 {
                // 2G(ξ,k) - G(ξ,k+1) - G(ξ+1,k) with only diagonal terms nonzero
                let expected = if x == m { 2.0 * d[2 * x] } else { c(0.0, 0.0) };
                assert_eq!(eff.g_double_prime[[x, m]], expected);
                let exact = if x == m { d[2 * x] + d[2 * x + 1] } else { c(0.0, 0.0) };
                assert_eq!(eff.g_combined[[x, m]], exact);
            }
        }
        for phi in 0..8 {
            for m in 0..4 {
                assert_eq!(eff.g_prime[[phi, m]], g[[phi, 2 * m]] - g[[phi, 2 * m + 1]]);
            }
        }
    }

    #[test]
    fn effective_composite_rejects_bad_shapes() {
        assert!(matches!(
            effective_composite(&Array2::zeros((4, 6))),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            effective_composite(&Array2::eye(5)),
            Err(Error::OddSubcarrierCount(5))
        );
    }

    proptest::proptest! {
        #[test]
        fn combine_is_linear(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = || -> Vec<Complex64> { (0..16).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect() };
            let (x, y) = (v(), v());
            let sum: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = wdp_combine(&sum).unwrap();
            let (cx, cy) = (wdp_combine(&x).unwrap(), wdp_combine(&y).unwrap());
            for i in 0..8 {
                proptest::prop_assert!((lhs[i] - cx[i] - cy[i]).norm() < 1e-12);
            }
        }

        #[test]
        fn expansion_pairs_cancel(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<Complex64> = (0..32).map(|_| QpskSymbol::random(&mut rng).value()).collect();
            let e = wdp_expand_checked(&s, 64).unwrap();
            for m in 0..32 {
                proptest::prop_assert_eq!(e[2 * m] + e[2 * m + 1], c(0.0, 0.0));
            }
        }

        #[test]
        fn map_demap_round_trip(bits in proptest::collection::vec(0u8..2, 0..64)) {
            let bits = if bits.len() % 2 == 1 { bits[..bits.len() - 1].to_vec() } else { bits };
            let syms: Vec<Complex64> = qpsk_map(&bits, bits.len() / 2).unwrap().into_iter().map(Complex64::from).collect();
            proptest::prop_assert_eq!(qpsk_demap(&syms), bits);
        }
    }
}
