//! Walsh-Hadamard and Fourier transforms.
//!
//! The Walsh-Hadamard transform here is unitary (1/sqrt(N) scaling), real,
//! symmetric and involutive, so the same routine serves modulation and
//! demodulation. Complex inputs are transformed as two independent real
//! transforms, which is what makes the butterfly multiplier-free. The DFT
//! uses the same unitary convention so noise variance is preserved through
//! either demodulator.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Row ordering of the Walsh-Hadamard matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalshOrdering {
    /// Sylvester (natural) recursion order.
    Natural,
    /// Rows sorted by sign-change count.
    Sequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DftDirection {
    Forward,
    Inverse,
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

fn log2_checked(n: usize) -> Result<u32> {
    if is_power_of_two(n) {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// Sign of the Sylvester-ordered Hadamard entry (i, j), via the bit-count
/// parity closed form. Used as an independent check on the recursion and the
/// butterflies.
pub(crate) fn sylvester_sign(i: usize, j: usize) -> f64 {
    if (i & j).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn sign_changes_of_sylvester_row(row: usize, n: usize) -> usize {
    let mut changes = 0;
    let mut prev = sylvester_sign(row, 0);
    for j in 1..n {
        let cur = sylvester_sign(row, j);
        if cur != prev {
            changes += 1;
        }
        prev = cur;
    }
    changes
}

/// Bijection from sequency index to Sylvester row index.
///
/// Position `s` of the map holds the Sylvester-order row with exactly `s`
/// sign changes.
#[derive(Clone, Debug)]
pub struct SequencyPermutation {
    size: usize,
    map: Vec<usize>,
}

impl SequencyPermutation {
    pub fn new(n: usize) -> Result<Self> {
        let k = log2_checked(n)?;
        let map: Vec<usize> = (0..n)
            .map(|s| {
                let gray = s ^ (s >> 1);
                reverse_bits(gray, k)
            })
            .collect();
        let perm = SequencyPermutation { size: n, map };
        debug_assert!(perm.validate(), "sequency map failed sign-change check");
        Ok(perm)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Check the defining property: the Sylvester row at map[s] has exactly
    /// s sign changes, and the map is a bijection.
    pub fn validate(&self) -> bool {
        let mut seen = vec![false; self.size];
        for (s, &row) in self.map.iter().enumerate() {
            if row >= self.size || seen[row] {
                return false;
            }
            seen[row] = true;
            if sign_changes_of_sylvester_row(row, self.size) != s {
                return false;
            }
        }
        true
    }
}

fn reverse_bits(x: usize, bits: u32) -> usize {
    let mut out = 0;
    for b in 0..bits {
        out |= ((x >> b) & 1) << (bits - 1 - b);
    }
    out
}

/// In-place unnormalized Sylvester-order butterflies: v <- H_N v.
/// Only additions and subtractions on the real and imaginary parts.
pub(crate) fn fwht_butterflies(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        let step = h * 2;
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = v[j];
                let b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
            i += step;
        }
        h = step;
    }
}

/// Unitary Walsh-Hadamard transform of `v`, W v, with the requested row
/// ordering. Because W is symmetric this is also W^T v.
pub fn fwht(v: &[Complex64], ordering: WalshOrdering) -> Result<Vec<Complex64>> {
    let n = v.len();
    log2_checked(n)?;
    let mut work = v.to_vec();
    fwht_butterflies(&mut work);
    let scale = 1.0 / (n as f64).sqrt();
    match ordering {
        WalshOrdering::Natural => {
            for z in &mut work {
                *z *= scale;
            }
            Ok(work)
        }
        WalshOrdering::Sequency => {
            let perm = SequencyPermutation::new(n)?;
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (s, &src) in perm.map().iter().enumerate() {
                out[s] = work[src] * scale;
            }
            Ok(out)
        }
    }
}

/// Same transform, reusing a caller-precomputed permutation and scratch
/// buffer. `v` is transformed in place. Hot path for matrix conjugation.
pub(crate) fn fwht_with(perm: &SequencyPermutation, v: &mut [Complex64], scratch: &mut [Complex64]) {
    let n = v.len();
    debug_assert_eq!(n, perm.size());
    debug_assert_eq!(n, scratch.len());
    fwht_butterflies(v);
    let scale = 1.0 / (n as f64).sqrt();
    for (s, &src) in perm.map().iter().enumerate() {
        scratch[s] = v[src] * scale;
    }
    v.copy_from_slice(scratch);
}

/// Real orthonormal matrix with entries +-1/sqrt(N); dense reference form of
/// the Walsh-Hadamard transform.
#[derive(Clone, Debug)]
pub struct RealOrthonormalMatrix {
    size: usize,
    data: Vec<f64>,
}

impl RealOrthonormalMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.size);
        (0..self.size)
            .map(|i| {
                let row = self.row(i);
                let mut acc = Complex64::new(0.0, 0.0);
                for (w, v) in row.iter().zip(x.iter()) {
                    acc += v * *w;
                }
                acc
            })
            .collect()
    }
}

/// Dense normalized Hadamard matrix built by the Sylvester doubling
/// recursion, rows permuted per `ordering`.
pub fn dense_walsh_matrix(n: usize, ordering: WalshOrdering) -> Result<RealOrthonormalMatrix> {
    log2_checked(n)?;
    // Unnormalized Sylvester recursion H_{2m} = [[H_m, H_m], [H_m, -H_m]].
    let mut data = vec![0.0f64; n * n];
    data[0] = 1.0;
    let mut m = 1;
    while m < n {
        for i in 0..m {
            for j in 0..m {
                let v = data[i * n + j];
                data[i * n + (j + m)] = v;
                data[(i + m) * n + j] = v;
                data[(i + m) * n + (j + m)] = -v;
            }
        }
        m *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    let data: Vec<f64> = match ordering {
        WalshOrdering::Natural => data.iter().map(|v| v * scale).collect(),
        WalshOrdering::Sequency => {
            let perm = SequencyPermutation::new(n)?;
            let mut out = vec![0.0f64; n * n];
            for (s, &src) in perm.map().iter().enumerate() {
                for j in 0..n {
                    out[s * n + j] = data[src * n + j] * scale;
                }
            }
            out
        }
    };
    Ok(RealOrthonormalMatrix { size: n, data })
}

/// Unitary DFT (1/sqrt(N) scaling in both directions), radix-2 in place.
pub fn dft(v: &[Complex64], direction: DftDirection) -> Result<Vec<Complex64>> {
    let mut out = v.to_vec();
    dft_in_place(&mut out, direction)?;
    Ok(out)
}

pub(crate) fn dft_in_place(v: &mut [Complex64], direction: DftDirection) -> Result<()> {
    let n = v.len();
    let bits = log2_checked(n)?;
    if n == 1 {
        return Ok(());
    }
    for i in 0..n {
        let j = reverse_bits(i, bits);
        if j > i {
            v.swap(i, j);
        }
    }
    let sign = match direction {
        DftDirection::Forward => -1.0,
        DftDirection::Inverse => 1.0,
    };
    // Twiddle table for the full size; stage `len` uses every (n/len)-th entry.
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let mut start = 0;
        while start < n {
            for k in 0..len / 2 {
                let w = twiddles[k * stride];
                let a = v[start + k];
                let b = v[start + k + len / 2] * w;
                v[start + k] = a + b;
                v[start + k + len / 2] = a - b;
            }
            start += len;
        }
        len *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for z in v.iter_mut() {
        *z *= scale;
    }
    Ok(())
}
