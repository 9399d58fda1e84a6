//! Doubly-selective tapped-delay-line channel simulation.
//!
//! Each profile tap is realized as an independent sum-of-sinusoids process
//! with the Jakes Doppler spectrum, sampled per time sample over a frame.
//! From a realization we build the per-block channel matrix (cyclic in the
//! delay dimension, time-varying along the rows) and the scheme-specific
//! equivalent channel in the transform domain.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mat::CMat;
use crate::profile::DelayProfile;
use crate::transform::{
    dft_in_place, fwht_with, DftDirection, SequencyPermutation,
};
use crate::Scheme;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Equal-amplitude oscillators per tap in the sum-of-sinusoids model.
const OSCILLATORS: usize = 32;

/// Maximum Doppler shift for a ground speed and carrier frequency.
pub fn doppler_hz(speed_kmh: f64, carrier_hz: f64) -> f64 {
    (speed_kmh / 3.6) * carrier_hz / SPEED_OF_LIGHT
}

/// One resolvable path: complex gain per sample at a fixed sample delay.
#[derive(Clone, Debug)]
pub struct TapTrack {
    pub delay_samples: usize,
    pub gains: Vec<Complex64>,
}

/// Per-sample tap gains over one frame.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub taps: Vec<TapTrack>,
    pub sample_rate_hz: f64,
    pub doppler_hz: f64,
    pub num_samples: usize,
}

impl ChannelRealization {
    pub fn max_delay_samples(&self) -> usize {
        self.taps.iter().map(|t| t.delay_samples).max().unwrap_or(0)
    }
}

/// Generate one channel realization.
///
/// Every profile tap gets its own oscillator bank with random arrival angles
/// and phases, giving an (approximately complex Gaussian) process whose
/// autocorrelation follows J0(2 pi f_d tau) and whose mean power equals the
/// tap's normalized linear power. Zero speed freezes the process. Taps that
/// round to the same sample delay keep separate tracks; their gains add
/// wherever the channel is applied.
pub fn realize_taps(
    profile: &DelayProfile,
    speed_kmh: f64,
    carrier_hz: f64,
    sample_rate_hz: f64,
    num_samples: usize,
    rng_seed: u64,
) -> Result<ChannelRealization> {
    if speed_kmh < 0.0 {
        return Err(Error::Config(format!("negative speed {speed_kmh}")));
    }
    let f_d = doppler_hz(speed_kmh, carrier_hz);
    let delays = profile.delays_in_samples(sample_rate_hz);
    let powers = profile.linear_powers();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let mut taps = Vec::with_capacity(delays.len());
    for (&delay_samples, &power) in delays.iter().zip(powers.iter()) {
        let amplitude = (power / OSCILLATORS as f64).sqrt();
        // Arrival angle sets each oscillator's Doppler shift; phase is free.
        let mut phasors = [Complex64::new(0.0, 0.0); OSCILLATORS];
        let mut rotators = [Complex64::new(1.0, 0.0); OSCILLATORS];
        for m in 0..OSCILLATORS {
            let angle = rng.gen::<f64>() * 2.0 * PI;
            let phase = rng.gen::<f64>() * 2.0 * PI;
            phasors[m] = Complex64::from_polar(amplitude, phase);
            let omega = 2.0 * PI * f_d * angle.cos() / sample_rate_hz;
            rotators[m] = Complex64::from_polar(1.0, omega);
        }
        let mut gains = Vec::with_capacity(num_samples);
        if f_d == 0.0 {
            let g: Complex64 = phasors.iter().sum();
            gains.resize(num_samples, g);
        } else {
            for _ in 0..num_samples {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..OSCILLATORS {
                    acc += phasors[m];
                    phasors[m] *= rotators[m];
                }
                gains.push(acc);
            }
        }
        taps.push(TapTrack {
            delay_samples,
            gains,
        });
    }
    Ok(ChannelRealization {
        taps,
        sample_rate_hz,
        doppler_hz: f_d,
        num_samples,
    })
}

/// Per-block channel matrix: H[n, (n-l) mod N] += h_l[core_start + n].
///
/// Cyclic indexing in the delay dimension (the prefix absorbs the memory),
/// with each tap gain evaluated at the receive instant, so the matrix equals
/// the physical pipeline exactly even while the taps move.
pub fn build_channel_matrix(
    ch: &ChannelRealization,
    n: usize,
    core_start: usize,
) -> Result<CMat> {
    if core_start + n > ch.num_samples {
        return Err(Error::Config(format!(
            "block [{core_start}, {}) exceeds realization length {}",
            core_start + n,
            ch.num_samples
        )));
    }
    let mut h = CMat::zeros(n);
    for tap in &ch.taps {
        let l = tap.delay_samples % n;
        for row in 0..n {
            let col = (row + n - l) % n;
            h[(row, col)] += tap.gains[core_start + row];
        }
    }
    Ok(h)
}

/// Dense transform-domain equivalent of `h` for the given scheme:
/// W^T H W (sequency-ordered Walsh) or F H F^H.
pub fn conjugate_by_transform(h: &CMat, scheme: Scheme) -> Result<CMat> {
    let n = h.n();
    let mut g = h.clone();
    match scheme {
        Scheme::Whtdm => {
            let perm = SequencyPermutation::new(n)?;
            let mut scratch = vec![Complex64::new(0.0, 0.0); n];
            // H W: transform each row (W is symmetric).
            for i in 0..n {
                fwht_with(&perm, g.row_mut(i), &mut scratch);
            }
            // W (H W): transform each column.
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = g[(i, j)];
                }
                fwht_with(&perm, &mut col, &mut scratch);
                for i in 0..n {
                    g[(i, j)] = col[i];
                }
            }
        }
        Scheme::Ofdm => {
            // H F^H: inverse transform of each row; then F (H F^H): forward
            // transform of each column.
            for i in 0..n {
                dft_in_place(g.row_mut(i), DftDirection::Inverse)?;
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = g[(i, j)];
                }
                dft_in_place(&mut col, DftDirection::Forward)?;
                for i in 0..n {
                    g[(i, j)] = col[i];
                }
            }
        }
    }
    Ok(g)
}

/// Equivalent channel with its banded truncation and the two spectral
/// quantities the detector needs.
#[derive(Clone, Debug)]
pub struct EquivalentChannel {
    pub scheme: Scheme,
    pub full: CMat,
    pub banded: CMat,
    pub band_half_width: usize,
    pub frobenius_norm_sq: f64,
    pub lambda_max: f64,
}

pub fn equivalent_channel(h: &CMat, scheme: Scheme, band_half_width: usize) -> Result<EquivalentChannel> {
    equivalent_channel_with(h, scheme, band_half_width, true)
}

/// Same as [`equivalent_channel`] but lets the hot path skip the power
/// iteration when the detector run will not use the memory step size.
pub(crate) fn equivalent_channel_with(
    h: &CMat,
    scheme: Scheme,
    band_half_width: usize,
    compute_lambda: bool,
) -> Result<EquivalentChannel> {
    let full = conjugate_by_transform(h, scheme)?;
    let banded = band_truncate(&full, band_half_width)?;
    let frobenius_norm_sq = full.frobenius_norm_sq();
    let lambda_max = if compute_lambda {
        largest_eigenvalue_gram(&full)
    } else {
        f64::NAN
    };
    Ok(EquivalentChannel {
        scheme,
        full,
        banded,
        band_half_width,
        frobenius_norm_sq,
        lambda_max,
    })
}

/// Keep entries with |i-j| <= band (no cyclic wrap), zero the rest.
pub fn band_truncate(g: &CMat, band: usize) -> Result<CMat> {
    let n = g.n();
    if band > n.saturating_sub(1) {
        return Err(Error::BandOutOfRange { band, size: n });
    }
    let mut out = CMat::zeros(n);
    for i in 0..n {
        let lo = i.saturating_sub(band);
        let hi = (i + band).min(n - 1);
        for j in lo..=hi {
            out[(i, j)] = g[(i, j)];
        }
    }
    Ok(out)
}

/// ||G_B||_F / ||G||_F; defined as 1.0 for the zero matrix.
pub fn frobenius_capture(g: &CMat, band: usize) -> Result<f64> {
    let banded = band_truncate(g, band)?;
    let total = g.frobenius_norm_sq();
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok((banded.frobenius_norm_sq() / total).sqrt())
}

/// Largest eigenvalue of G^H G by power iteration: deterministic all-ones
/// start, at most 100 iterations or relative change below 1e-6.
pub fn largest_eigenvalue_gram(g: &CMat) -> f64 {
    let n = g.n();
    let gh = g.conj_transpose();
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    let norm = (n as f64).sqrt();
    for z in &mut v {
        *z /= norm;
    }
    let mut lambda_prev = 0.0;
    for _ in 0..100 {
        let w = g.matvec(&v);
        let lambda = crate::mat::vec_norm_sq(&w);
        let u = gh.matvec(&w);
        let un = crate::mat::vec_norm_sq(&u).sqrt();
        if un == 0.0 {
            return 0.0;
        }
        for (vz, uz) in v.iter_mut().zip(u.iter()) {
            *vz = uz / un;
        }
        if (lambda - lambda_prev).abs() <= 1e-6 * lambda.max(f64::MIN_POSITIVE) {
            return lambda;
        }
        lambda_prev = lambda;
    }
    lambda_prev
}
