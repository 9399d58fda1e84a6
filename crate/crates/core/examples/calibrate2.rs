// Scratch calibration 2: detector floor vs tau convention and band width,
// memory-vs-plain pairing at 25 iterations, and capture statistics.
use whtdm::channel::{
    build_channel_matrix, conjugate_by_transform, equivalent_channel, frobenius_capture,
    realize_taps,
};
use whtdm::config::SweepConfig;
use whtdm::equalizer::{cdmamp_detect_memory, cdmamp_detect_plain, DetectorParams};
use whtdm::harness::{run_cell, CellCoord};
use whtdm::modem::{count_bit_errors, demap_qpsk_hard, map_qpsk};
use whtdm::profile::DelayProfile;
use whtdm::rngstream::{derive_rng, derive_u64};
use whtdm::waveform::{demodulate, modulate, noise_variance_for_snr_db, propagate};
use whtdm::Scheme;
use rand::Rng;

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "tau".into());
    match mode.as_str() {
        "tau" => tau_and_band(),
        "paired" => paired_memory(),
        "capture" => capture_stats(),
        _ => eprintln!("modes: tau, paired, capture"),
    }
}

fn tau_and_band() {
    let mut cfg = SweepConfig::default();
    cfg.frames_per_seed = 30;
    cfg.detector.memory_enabled = false;
    println!("static 20/30 dB WHTDM floor vs (per_dim_variance, band):");
    for per_dim in [false, true] {
        for band in [8usize, 16, 32, 63] {
            cfg.detector.per_dim_variance = per_dim;
            cfg.detector.band_half_width = band;
            for snr in [20.0, 30.0] {
                let mut total = 0u64;
                let mut errors = 0u64;
                for seed in 0..4 {
                    let rec = run_cell(
                        &cfg,
                        &CellCoord {
                            scheme: Scheme::Whtdm,
                            snr_db: snr,
                            speed_kmh: 0.0,
                            delay_spread_ns: 100.0,
                            seed,
                        },
                    )
                    .unwrap();
                    total += rec.bits_total;
                    errors += rec.bits_error;
                }
                println!(
                    "  per_dim={per_dim} B={band} snr={snr}: {:.3e}",
                    errors as f64 / total as f64
                );
            }
        }
    }
}

fn paired_memory() {
    // 200 single-block instances at N=64, 20 dB, 120 km/h (scaled Doppler),
    // both variants at 25 iterations
    let cfg = SweepConfig::default();
    let profile = DelayProfile::load("tdlc").unwrap().with_rms_spread_ns(100.0);
    let mut params = DetectorParams::default();
    params.iterations = 25;
    if let Some(b) = std::env::args().nth(2) {
        params.band_half_width = b.parse().unwrap();
    }
    let sigma2 = noise_variance_for_snr_db(20.0);
    let mut mem_better_or_equal = 0usize;
    let mut mem_errs_total = 0u64;
    let mut plain_errs_total = 0u64;
    for inst in 0..200u64 {
        let parts = [inst];
        let mut bits_rng = derive_rng(1, "bits", &parts);
        let mut noise_rng = derive_rng(1, "noise", &parts);
        let chan_seed = derive_u64(1, "channel", &parts);
        let bits: Vec<u8> = (0..128).map(|_| bits_rng.gen_range(0..2u8)).collect();
        let ch = realize_taps(
            &profile,
            120.0 * cfg.doppler_scale,
            28e9,
            7.68e6,
            96,
            chan_seed,
        )
        .unwrap();
        let frame = map_qpsk(&bits).unwrap();
        let tx = modulate(Scheme::Whtdm, &frame, 32).unwrap();
        let rx = propagate(&tx, &ch, 0, 20.0, &mut noise_rng).unwrap();
        let z = demodulate(Scheme::Whtdm, &rx, sigma2).unwrap();
        let h = build_channel_matrix(&ch, 64, 32).unwrap();
        let eq = equivalent_channel(&h, Scheme::Whtdm, params.band_half_width).unwrap();
        let xm = cdmamp_detect_memory(&z, &eq, &params).unwrap();
        let xp = cdmamp_detect_plain(&z, &eq, &params).unwrap();
        let em = count_bit_errors(&demap_qpsk_hard(&xm), &bits).unwrap();
        let ep = count_bit_errors(&demap_qpsk_hard(&xp), &bits).unwrap();
        mem_errs_total += em;
        plain_errs_total += ep;
        if em <= ep {
            mem_better_or_equal += 1;
        }
    }
    println!(
        "memory <= plain in {mem_better_or_equal}/200 pairs; total errors mem {mem_errs_total} plain {plain_errs_total}"
    );
}

fn capture_stats() {
    let profile = DelayProfile::load("tdlc").unwrap().with_rms_spread_ns(100.0);
    for band in [8usize, 16, 24, 32, 48] {
        let mut mean = 0.0;
        for seed in 0..100u64 {
            let ch = realize_taps(&profile, 0.0, 28e9, 7.68e6, 64, seed).unwrap();
            let h = build_channel_matrix(&ch, 64, 0).unwrap();
            let g = conjugate_by_transform(&h, Scheme::Whtdm).unwrap();
            mean += frobenius_capture(&g, band).unwrap();
        }
        println!("B={band}: mean capture {:.4}", mean / 100.0);
    }
}
