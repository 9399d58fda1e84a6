//! Runtime oracle suite behind the `selftest` CLI subcommand.
//!
//! Re-runs the key cross-checks (fast transforms against dense matrices,
//! pipeline against equivalent-channel matrices, noise calibration, detector
//! sanity) so a deployed binary can prove its numerics on the host it runs
//! on.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    build_channel_matrix, conjugate_by_transform, equivalent_channel, frobenius_capture,
    realize_taps,
};
use crate::complexity::{complexity_table, scheme_tx_ops, OpCount, TxScheme};
use crate::equalizer::{cdmamp_detect, mmse_one_tap, DetectorParams};
use crate::mat::CMat;
use crate::modem::{count_bit_errors, demap_qpsk_hard, map_qpsk};
use crate::profile::DelayProfile;
use crate::transform::{
    dense_walsh_matrix, dft, fwht, DftDirection, SequencyPermutation, WalshOrdering,
};
use crate::waveform::{demodulate, modulate, noise_variance_for_snr_db, propagate};
use crate::Scheme;

type Check = (&'static str, fn() -> Result<(), String>);

fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect()
}

fn check_sequency_oracle() -> Result<(), String> {
    for k in 0..=6 {
        let n = 1usize << k;
        let perm = SequencyPermutation::new(n).map_err(|e| e.to_string())?;
        if !perm.validate() {
            return Err(format!("sequency map invalid at n={n}"));
        }
    }
    Ok(())
}

fn check_fwht_against_dense() -> Result<(), String> {
    let n = 64;
    let v = random_vec(n, 1);
    for ordering in [WalshOrdering::Natural, WalshOrdering::Sequency] {
        let fast = fwht(&v, ordering).map_err(|e| e.to_string())?;
        let dense = dense_walsh_matrix(n, ordering)
            .map_err(|e| e.to_string())?
            .matvec(&v);
        for (a, b) in fast.iter().zip(dense.iter()) {
            if (a - b).norm() > 1e-10 {
                return Err(format!("fwht/dense mismatch: {a} vs {b}"));
            }
        }
        let twice = fwht(&fast, ordering).map_err(|e| e.to_string())?;
        for (a, b) in twice.iter().zip(v.iter()) {
            if (a - b).norm() > 1e-10 {
                return Err("fwht involution failed".to_string());
            }
        }
    }
    Ok(())
}

fn check_dft_against_naive() -> Result<(), String> {
    let n = 64;
    let v = random_vec(n, 2);
    let fast = dft(&v, DftDirection::Forward).map_err(|e| e.to_string())?;
    let scale = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, x) in v.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
            acc += x * Complex64::from_polar(1.0, ang);
        }
        if (fast[k] - acc * scale).norm() > 1e-10 {
            return Err(format!("dft/naive mismatch at bin {k}"));
        }
    }
    Ok(())
}

fn check_modem_round_trip() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bits: Vec<u8> = (0..4096).map(|_| rng.gen_range(0..2u8)).collect();
    let frame = map_qpsk(&bits).map_err(|e| e.to_string())?;
    if demap_qpsk_hard(&frame.symbols) != bits {
        return Err("QPSK round trip failed".to_string());
    }
    Ok(())
}

fn check_complexity_table() -> Result<(), String> {
    let cases = [
        (TxScheme::Whtdm, OpCount { real_mults: 0, real_adds: 12_288 }),
        (TxScheme::Ofdm, OpCount { real_mults: 12_288, real_adds: 18_432 }),
        (TxScheme::Otsm, OpCount { real_mults: 0, real_adds: 8_192 }),
        (TxScheme::Otfs, OpCount { real_mults: 32_768, real_adds: 49_152 }),
    ];
    for (scheme, expect) in cases {
        let got = scheme_tx_ops(scheme, 64, 16).map_err(|e| e.to_string())?;
        if got != expect {
            return Err(format!("{} count {got:?} != {expect:?}", scheme.name()));
        }
    }
    let table = complexity_table(64, 16).map_err(|e| e.to_string())?;
    let ratio = table[1].modeled.total() as f64 / table[0].modeled.total() as f64;
    if (ratio - 2.5).abs() > 1e-12 {
        return Err(format!("OFDM/WHTDM ratio {ratio} != 2.5"));
    }
    Ok(())
}

fn check_static_diagonalization() -> Result<(), String> {
    let n = 64;
    let p = DelayProfile::load("tdlc")
        .map_err(|e| e.to_string())?
        .with_rms_spread_ns(100.0);
    let ch = realize_taps(&p, 0.0, 28e9, 7.68e6, n, 11).map_err(|e| e.to_string())?;
    let h = build_channel_matrix(&ch, n, 0).map_err(|e| e.to_string())?;
    let heq = conjugate_by_transform(&h, Scheme::Ofdm).map_err(|e| e.to_string())?;
    let total = heq.frobenius_norm_sq();
    let diag: f64 = (0..n).map(|i| heq[(i, i)].norm_sqr()).sum();
    if (total - diag) / total >= 1e-18 {
        return Err(format!(
            "static OFDM off-diagonal energy fraction {}",
            (total - diag) / total
        ));
    }
    let g = conjugate_by_transform(&h, Scheme::Whtdm).unwrap();
    let cap8 = frobenius_capture(&g, 8).map_err(|e| e.to_string())?;
    let cap_full = frobenius_capture(&g, n - 1).map_err(|e| e.to_string())?;
    if !(cap8 > 0.6 && cap8 <= cap_full && (cap_full - 1.0).abs() < 1e-12) {
        return Err(format!("banded capture structure broken: B8={cap8} full={cap_full}"));
    }
    Ok(())
}

fn check_pipeline_matches_matrix() -> Result<(), String> {
    let n = 64;
    let p = DelayProfile::load("tdlc")
        .map_err(|e| e.to_string())?
        .with_rms_spread_ns(100.0);
    let ch = realize_taps(&p, 500.0, 28e9, 7.68e6, 96, 13).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let bits: Vec<u8> = (0..2 * n).map(|_| rng.gen_range(0..2u8)).collect();
    let frame = map_qpsk(&bits).map_err(|e| e.to_string())?;
    for scheme in [Scheme::Whtdm, Scheme::Ofdm] {
        let tx = modulate(scheme, &frame, 32).map_err(|e| e.to_string())?;
        let rx = propagate(&tx, &ch, 0, f64::INFINITY, &mut rng).map_err(|e| e.to_string())?;
        let z = demodulate(scheme, &rx, 0.0).map_err(|e| e.to_string())?;
        let h = build_channel_matrix(&ch, n, 32).map_err(|e| e.to_string())?;
        let g = conjugate_by_transform(&h, scheme).map_err(|e| e.to_string())?;
        let oracle = g.matvec(&frame.symbols);
        for (a, b) in z.z.iter().zip(oracle.iter()) {
            if (a - b).norm() > 1e-9 {
                return Err(format!("{scheme}: pipeline/operator mismatch"));
            }
        }
    }
    Ok(())
}

fn check_noise_calibration() -> Result<(), String> {
    let p = DelayProfile::parse("flat", "0.0 0.0").map_err(|e| e.to_string())?;
    let ch = realize_taps(&p, 0.0, 28e9, 7.68e6, 96, 1).map_err(|e| e.to_string())?;
    let zero = crate::modem::SymbolFrame {
        symbols: vec![Complex64::new(0.0, 0.0); 64],
        source_bits: vec![],
    };
    let tx = modulate(Scheme::Ofdm, &zero, 32).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut acc = 0.0;
    let mut count = 0usize;
    for _ in 0..4000 {
        let rx = propagate(&tx, &ch, 0, 0.0, &mut rng).map_err(|e| e.to_string())?;
        acc += rx.iter().map(|z| z.norm_sqr()).sum::<f64>();
        count += rx.len();
    }
    let var = acc / count as f64;
    if (var - 1.0).abs() > 0.03 {
        return Err(format!("0 dB noise variance calibration off: {var}"));
    }
    Ok(())
}

fn check_detectors() -> Result<(), String> {
    // identity channel: both detectors must be exact at high SNR
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let bits: Vec<u8> = (0..2 * n).map(|_| rng.gen_range(0..2u8)).collect();
    let x = map_qpsk(&bits).map_err(|e| e.to_string())?.symbols;

    let params = DetectorParams::default();
    let h = CMat::identity(n);
    let eq = equivalent_channel(&h, Scheme::Whtdm, params.band_half_width)
        .map_err(|e| e.to_string())?;
    let obs = crate::waveform::RxObservation {
        scheme: Scheme::Whtdm,
        z: x.clone(),
        noise_variance: noise_variance_for_snr_db(40.0),
    };
    let xh = cdmamp_detect(&obs, &eq, &params).map_err(|e| e.to_string())?;
    let errs = count_bit_errors(&demap_qpsk_hard(&xh), &bits).map_err(|e| e.to_string())?;
    if errs != 0 {
        return Err(format!("CD-MAMP identity channel: {errs} bit errors"));
    }

    let diag: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    let xh = mmse_one_tap(&x, &diag, 1e-4).map_err(|e| e.to_string())?;
    let errs = count_bit_errors(&demap_qpsk_hard(&xh), &bits).map_err(|e| e.to_string())?;
    if errs != 0 {
        return Err(format!("one-tap MMSE identity channel: {errs} bit errors"));
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("sequency-permutation-oracle", check_sequency_oracle),
    ("fwht-dense-oracle", check_fwht_against_dense),
    ("dft-naive-oracle", check_dft_against_naive),
    ("qpsk-round-trip", check_modem_round_trip),
    ("complexity-table", check_complexity_table),
    ("static-diagonalization", check_static_diagonalization),
    ("pipeline-operator-equivalence", check_pipeline_matches_matrix),
    ("noise-calibration", check_noise_calibration),
    ("detector-sanity", check_detectors),
];

/// Run every check, log one line each to stderr, and report overall success.
pub fn run_selftest() -> bool {
    let mut ok = true;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => eprintln!("selftest {name}: PASS"),
            Err(msg) => {
                eprintln!("selftest {name}: FAIL ({msg})");
                ok = false;
            }
        }
    }
    ok
}
