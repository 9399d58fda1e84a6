//! Physical-layer simulation toolkit for WHTDM and CP-OFDM block
//! transmission over doubly-selective multipath channels.
//!
//! WHTDM replaces the IFFT/FFT pair of CP-OFDM with the real, unitary,
//! involutive Walsh-Hadamard transform, which costs only additions. The
//! price is a non-diagonal transform-domain channel, detected here with the
//! CD-MAMP iterative equalizer (banded linear estimation plus a separable
//! QPSK denoiser, with damping and an optional conjugate-gradient-like
//! memory term). The crate provides:
//!
//! - [`transform`]: sequency-ordered FWHT, unitary DFT, dense references
//! - [`modem`]: QPSK mapping, hard demapping, bit-error counting
//! - [`channel`]: tapped-delay-line realizations with Jakes Doppler, block
//!   channel matrices, transform-domain equivalent channels
//! - [`waveform`]: modulate / propagate / demodulate pipelines
//! - [`equalizer`]: one-tap MMSE and the CD-MAMP detector
//! - [`complexity`]: transmitter operation-count model
//! - [`harness`]: deterministic Monte Carlo BER sweeps with CSV output

pub mod channel;
pub mod complexity;
pub mod config;
pub mod equalizer;
pub mod error;
pub mod harness;
pub mod mat;
pub mod modem;
pub mod profile;
pub mod rngstream;
pub mod selftest;
pub mod transform;
pub mod waveform;

pub use error::{Error, Result};

/// Simulated waveform schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Whtdm,
    Ofdm,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Whtdm => write!(f, "WHTDM"),
            Scheme::Ofdm => write!(f, "OFDM"),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "WHTDM" => Ok(Scheme::Whtdm),
            "OFDM" => Ok(Scheme::Ofdm),
            other => Err(Error::Parse(format!("unknown scheme '{other}'"))),
        }
    }
}
