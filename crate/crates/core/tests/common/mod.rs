#![allow(dead_code)]

use statrs::function::erf::erfc;
use wdp_core::harness::BerRecord;

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Gray-coded QPSK BER at per-symbol SNR `snr_db` (Eb/N0 = SNR / 2).
pub fn qpsk_ber(snr_db: f64) -> f64 {
    let eb_n0 = 10f64.powf(snr_db / 10.0) / 2.0;
    q_function((2.0 * eb_n0).sqrt())
}

/// SNR where the curve first falls through `target`, interpolating
/// log10(BER) linearly in dB between the bracketing points.
pub fn crossing(records: &[BerRecord], target: f64) -> Option<f64> {
    records.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.ber >= target && b.ber < target && a.ber > 0.0 && b.ber > 0.0 {
            let t = (target.log10() - a.ber.log10()) / (b.ber.log10() - a.ber.log10());
            Some(a.snr_db + t * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

pub fn report(criterion: &str, ok: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion} failed: {detail}");
}
