//! QPSK bit mapping, hard demapping, and bit-error counting.

use num_complex::Complex64;

use crate::error::{Error, Result};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Unit-energy QPSK symbols together with the bits that produced them.
#[derive(Clone, Debug)]
pub struct SymbolFrame {
    pub symbols: Vec<Complex64>,
    pub source_bits: Vec<u8>,
}

/// Gray mapping: first bit sets the real sign, second the imaginary sign.
/// Symbol k = ((1-2 b_{2k}) + j (1-2 b_{2k+1})) / sqrt(2).
pub fn map_qpsk(bits: &[u8]) -> Result<SymbolFrame> {
    if bits.len() % 2 != 0 {
        return Err(Error::LengthMismatch {
            expected: bits.len() + 1,
            actual: bits.len(),
        });
    }
    let symbols = bits
        .chunks_exact(2)
        .map(|pair| {
            let re = if pair[0] & 1 == 0 { INV_SQRT2 } else { -INV_SQRT2 };
            let im = if pair[1] & 1 == 0 { INV_SQRT2 } else { -INV_SQRT2 };
            Complex64::new(re, im)
        })
        .collect();
    Ok(SymbolFrame {
        symbols,
        source_bits: bits.to_vec(),
    })
}

/// Hard decision per symbol; exactly-zero components decide bit 0.
pub fn demap_qpsk_hard(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in symbols {
        bits.push(u8::from(s.re < 0.0));
        bits.push(u8::from(s.im < 0.0));
    }
    bits
}

/// Hamming distance between two equal-length bit blocks.
pub fn count_bit_errors(a: &[u8], b: &[u8]) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| (**x & 1) != (**y & 1)).count() as u64)
}
