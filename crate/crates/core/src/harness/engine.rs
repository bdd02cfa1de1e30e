//! Frame-level Monte-Carlo engine.
//!
//! Every frame draws its bits and noise from a ChaCha stream keyed by
//! `(master_seed, scenario_id, snr_db)` with the frame index as stream
//! number, so results do not depend on how frames are scheduled. Frames are
//! evaluated in parallel batches and then folded in frame order, stopping at
//! the first frame that reaches the error target or the bit budget.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::record::BerRecord;
use super::scenario::{ChannelModel, CsiMode, Mapping, Scenario};
use crate::channel::{add_awgn_in_place, MultipathChannel};
use crate::csi::{equalize_with, estimate_csi, CsiEstimate, Observer};
use crate::error::{Error, Result};
use crate::mapping::{build_preambles, qpsk_demap, qpsk_map, wdp_combine, wdp_expand, PreamblePair};
use crate::waveform::{add_cyclic_prefix, remove_cyclic_prefix, SubcarrierMatrix};

const FIRST_BATCH: usize = 64;
const MAX_BATCH: usize = 4096;

fn key_material(master_seed: u64, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"wdp-sim/v1");
    h.update(master_seed.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().into()
}

/// Deterministic 64-bit seed derived from the master seed and a label.
pub fn derive_seed(master_seed: u64, label: &str) -> u64 {
    let k = key_material(master_seed, &[label.as_bytes()]);
    u64::from_le_bytes(k[..8].try_into().expect("8 bytes"))
}

/// Generator for `frame_index` of the point `(scenario_id, snr_db)`.
pub fn frame_rng(master_seed: u64, scenario_id: &str, snr_db: f64, frame_index: u64) -> ChaCha8Rng {
    let mut rng = point_rng(master_seed, scenario_id, snr_db);
    rng.set_stream(frame_index);
    rng
}

fn point_rng(master_seed: u64, scenario_id: &str, snr_db: f64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(key_material(
        master_seed,
        &[scenario_id.as_bytes(), &snr_db.to_bits().to_le_bytes()],
    ))
}

/// The public training vector is a property of the master seed alone, so
/// every scenario sharing a seed shares it.
pub fn scenario_preambles(scenario: &Scenario) -> Result<PreamblePair> {
    build_preambles(
        derive_seed(scenario.master_seed, "preamble"),
        scenario.waveform.n_subcarriers,
        scenario.preamble,
    )
}

/// Precomputed transmit/receive chain for one scenario at one SNR.
#[derive(Debug, Clone)]
pub struct Link {
    tx: SubcarrierMatrix,
    rx: SubcarrierMatrix,
    channel: Option<MultipathChannel>,
    cp_len: usize,
    mapping: Mapping,
    observer: Observer,
    csi_mode: CsiMode,
    ideal_csi: Vec<Complex64>,
    preambles: PreamblePair,
    snr_db: f64,
}

impl Link {
    pub fn new(scenario: &Scenario, snr_db: f64) -> Result<Self> {
        scenario.validate()?;
        let tx = scenario.waveform.matrix()?;
        let rx = if scenario.receiver_alpha() == tx.alpha() {
            tx.clone()
        } else {
            SubcarrierMatrix::new(tx.n_subcarriers(), tx.n_samples(), scenario.receiver_alpha())?
        };
        let channel = match &scenario.channel {
            ChannelModel::Awgn => None,
            ChannelModel::Multipath(ch) => Some(ch.clone()),
        };
        let ideal_csi = match &channel {
            Some(ch) => ch.frequency_response(&rx),
            None => vec![Complex64::new(1.0, 0.0); rx.n_subcarriers()],
        };
        Ok(Self {
            tx,
            rx,
            channel,
            cp_len: scenario.waveform.cp_len,
            mapping: scenario.mapping,
            observer: scenario.observer,
            csi_mode: scenario.csi_mode,
            ideal_csi,
            preambles: scenario_preambles(scenario)?,
            snr_db,
        })
    }

    pub fn ideal_csi(&self) -> &[Complex64] {
        &self.ideal_csi
    }

    /// Modulate, prefix, propagate, add noise, strip the prefix, demodulate.
    pub fn transmit(&self, symbols: &[Complex64], rng: &mut impl Rng) -> Result<Vec<Complex64>> {
        let x = add_cyclic_prefix(&self.tx.modulate(symbols)?, self.cp_len)?;
        let mut y = match &self.channel {
            Some(ch) => ch.apply(&x)?,
            None => x,
        };
        add_awgn_in_place(&mut y, self.snr_db, rng);
        self.rx.demodulate(&remove_cyclic_prefix(&y, self.cp_len, self.tx.n_samples())?)
    }

    /// Training vector actually sent.
    fn sent_preamble(&self) -> &[Complex64] {
        match self.mapping {
            Mapping::Wdp => &self.preambles.wdp,
            Mapping::PlainOfdm => &self.preambles.standard,
        }
    }

    /// Training vector the observer divides by.
    fn reference_preamble(&self) -> &[Complex64] {
        match (self.mapping, self.observer) {
            (Mapping::Wdp, Observer::Legitimate) => &self.preambles.wdp,
            _ => &self.preambles.standard,
        }
    }

    pub fn estimate(&self, rng: &mut impl Rng) -> Result<CsiEstimate> {
        let received = self.transmit(self.sent_preamble(), rng)?;
        estimate_csi(&received, self.reference_preamble(), self.observer)
    }

    /// Runs one frame; returns (bits checked, bit errors).
    pub fn run_frame(&self, rng: &mut impl Rng) -> Result<(u64, u64)> {
        let estimated;
        let csi: &[Complex64] = match self.csi_mode {
            CsiMode::Ideal => &self.ideal_csi,
            CsiMode::Estimated => {
                estimated = self.estimate(rng)?;
                &estimated.coefficients
            }
        };
        let n = self.tx.n_subcarriers();
        let n_symbols = match self.mapping {
            Mapping::PlainOfdm => n,
            Mapping::Wdp => n / 2,
        };
        let bits: Vec<u8> = (0..2 * n_symbols).map(|_| rng.random_range(0..2)).collect();
        let info: Vec<Complex64> = qpsk_map(&bits, n_symbols)?.into_iter().map(Complex64::from).collect();
        let sent = match self.mapping {
            Mapping::PlainOfdm => info,
            Mapping::Wdp => wdp_expand(&info),
        };
        let equalized = equalize_with(&self.transmit(&sent, rng)?, csi)?;
        let decided = match self.mapping {
            Mapping::PlainOfdm => equalized,
            Mapping::Wdp => wdp_combine(&equalized)?,
        };
        let errors = qpsk_demap(&decided).iter().zip(&bits).filter(|(a, b)| a != b).count();
        Ok((bits.len() as u64, errors as u64))
    }
}

/// Runs BER points on a dedicated worker pool.
pub struct Simulator {
    pool: rayon::ThreadPool,
}

impl Simulator {
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::InvalidScenario(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn run_ber_point(&self, scenario: &Scenario, snr_db: f64) -> Result<BerRecord> {
        let link = Link::new(scenario, snr_db)?;
        let base = point_rng(scenario.master_seed, &scenario.id, snr_db);
        let (mut bits, mut errors) = (0u64, 0u64);
        let mut next_frame = 0u64;
        let mut batch = FIRST_BATCH;
        'outer: loop {
            let range = next_frame..next_frame + batch as u64;
            let counts: Vec<Result<(u64, u64)>> = self.pool.install(|| {
                range
                    .into_par_iter()
                    .map(|frame| {
                        let mut rng = base.clone();
                        rng.set_stream(frame);
                        link.run_frame(&mut rng)
                    })
                    .collect()
            });
            for c in counts {
                let (b, e) = c?;
                bits += b;
                errors += e;
                next_frame += 1;
                if errors >= scenario.min_errors || bits >= scenario.max_bits {
                    break 'outer;
                }
            }
            batch = (batch * 2).min(MAX_BATCH);
        }
        Ok(BerRecord::new(&scenario.id, snr_db, bits, errors, scenario.min_errors))
    }

    /// One record per grid point, ascending SNR.
    pub fn run_ber_sweep(&self, scenario: &Scenario) -> Result<Vec<BerRecord>> {
        scenario.validate()?;
        let mut grid = scenario.snr_grid_db.clone();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid.into_iter().map(|snr| self.run_ber_point(scenario, snr)).collect()
    }

    /// Sweeps the compression factor. With `mismatch = None` the receiver
    /// uses the true factor; with `Some(a)` it demodulates with `a`.
    pub fn run_security_sweep(
        &self,
        base: &Scenario,
        alphas: &[f64],
        mismatch: Option<f64>,
    ) -> Result<Vec<BerRecord>> {
        let mut out = Vec::new();
        for s in security_scenarios(base, alphas, mismatch)? {
            out.extend(self.run_ber_sweep(&s)?);
        }
        Ok(out)
    }
}

/// Per-α scenarios of a security sweep, with distinct ids.
pub fn security_scenarios(base: &Scenario, alphas: &[f64], mismatch: Option<f64>) -> Result<Vec<Scenario>> {
    if alphas.is_empty() {
        return Err(Error::InvalidScenario("alphas is empty".into()));
    }
    alphas
        .iter()
        .map(|&alpha| {
            let mut s = base.clone();
            s.waveform.alpha = alpha;
            s.eavesdropper_alpha = mismatch;
            s.id = match mismatch {
                None => format!("{}/alpha={alpha}", base.id),
                Some(rx) => format!("{}/alpha={alpha}/rx_alpha={rx}", base.id),
            };
            s.validate()?;
            Ok(s)
        })
        .collect()
}

/// Sends the paired training vector once and returns the legitimate and the
/// eavesdropper estimates.
pub fn run_csi_experiment(scenario: &Scenario) -> Result<(CsiEstimate, CsiEstimate)> {
    if scenario.mapping != Mapping::Wdp {
        return Err(Error::InvalidScenario("csi experiment requires mapping = wdp".into()));
    }
    let snr = scenario.csi_snr_db.unwrap_or(f64::INFINITY);
    let link = Link::new(scenario, snr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(scenario.master_seed, &format!("csi/{}", scenario.id)));
    let received = link.transmit(&link.preambles.wdp, &mut rng)?;
    let legit = estimate_csi(&received, &link.preambles.wdp, Observer::Legitimate)?;
    let eaves = estimate_csi(&received, &link.preambles.standard, Observer::Eavesdropper)?;
    Ok((legit, eaves))
}
