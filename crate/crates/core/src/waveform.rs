//! Modulation, channel propagation, and demodulation pipelines.
//!
//! Both schemes share the block structure: unitary transform of N payload
//! symbols, cyclic prefix, time-varying convolution with the tap tracks,
//! AWGN, prefix removal, inverse transform. SNR is defined per complex
//! sample against unit-energy symbols, so sigma_n^2 = 10^(-snr_db/10) and
//! the transform-domain noise variance equals the time-domain one.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::modem::SymbolFrame;
use crate::transform::{dft, fwht, is_power_of_two, DftDirection, WalshOrdering};
use crate::Scheme;

/// One modulated block: N payload symbols and the CP-extended time signal.
#[derive(Clone, Debug)]
pub struct TxBlock {
    pub scheme: Scheme,
    pub payload_symbols: Vec<Complex64>,
    /// cp_len prefix samples followed by the N-sample core.
    pub time_samples: Vec<Complex64>,
    pub cp_len: usize,
}

impl TxBlock {
    pub fn core(&self) -> &[Complex64] {
        &self.time_samples[self.cp_len..]
    }
}

/// Transform-domain observation for one block.
#[derive(Clone, Debug)]
pub struct RxObservation {
    pub scheme: Scheme,
    pub z: Vec<Complex64>,
    pub noise_variance: f64,
}

pub fn noise_variance_for_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Transform the payload and prepend the cyclic prefix.
pub fn modulate(scheme: Scheme, frame: &SymbolFrame, cp_len: usize) -> Result<TxBlock> {
    let n = frame.symbols.len();
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    let core = match scheme {
        Scheme::Whtdm => fwht(&frame.symbols, WalshOrdering::Sequency)?,
        Scheme::Ofdm => dft(&frame.symbols, DftDirection::Inverse)?,
    };
    if cp_len > n {
        return Err(Error::Config(format!(
            "cp_len {cp_len} longer than block size {n}"
        )));
    }
    let mut time_samples = Vec::with_capacity(n + cp_len);
    time_samples.extend_from_slice(&core[n - cp_len..]);
    time_samples.extend_from_slice(&core);
    Ok(TxBlock {
        scheme,
        payload_symbols: frame.symbols.clone(),
        time_samples,
        cp_len,
    })
}

/// Convolve the CP-extended block with the per-sample taps, add AWGN, and
/// return the N core samples after prefix removal.
///
/// `block_start` is the absolute sample index of the first prefix sample in
/// the realization's time base. Samples before the block are taken as zero;
/// within a frame the spill-over of the previous block lands only in the
/// discarded prefix, so the core is exact either way.
pub fn propagate(
    tx: &TxBlock,
    ch: &ChannelRealization,
    block_start: usize,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>> {
    let cp = tx.cp_len;
    let n = tx.time_samples.len() - cp;
    if block_start + cp + n > ch.num_samples {
        return Err(Error::Config(format!(
            "block [{block_start}, {}) exceeds realization length {}",
            block_start + cp + n,
            ch.num_samples
        )));
    }
    if ch.max_delay_samples() > cp {
        return Err(Error::Config(format!(
            "channel memory {} exceeds cyclic prefix {cp}",
            ch.max_delay_samples()
        )));
    }
    let sigma2 = noise_variance_for_snr_db(snr_db);
    let noise_scale = (sigma2 / 2.0).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, sample) in out.iter_mut().enumerate() {
        let idx = cp + m; // position within the CP-extended block
        let abs = block_start + idx;
        let mut acc = Complex64::new(0.0, 0.0);
        for tap in &ch.taps {
            if tap.delay_samples <= idx {
                acc += tap.gains[abs] * tx.time_samples[idx - tap.delay_samples];
            }
        }
        if noise_scale > 0.0 {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            acc += Complex64::new(nr * noise_scale, ni * noise_scale);
        }
        *sample = acc;
    }
    Ok(out)
}

/// Inverse transform of the received core back to the symbol domain.
pub fn demodulate(scheme: Scheme, core: &[Complex64], noise_variance: f64) -> Result<RxObservation> {
    let z = match scheme {
        Scheme::Whtdm => fwht(core, WalshOrdering::Sequency)?,
        Scheme::Ofdm => dft(core, DftDirection::Forward)?,
    };
    Ok(RxObservation {
        scheme,
        z,
        noise_variance,
    })
}
