// Scratch calibration 4: remaining criterion cells at the candidate
// defaults (band 48, scale 16, plain detector).
use whtdm::config::SweepConfig;
use whtdm::harness::{run_cell, CellCoord};
use whtdm::Scheme;

fn ber(cfg: &SweepConfig, scheme: Scheme, snr: f64, speed: f64, seeds: u32) -> f64 {
    let mut total = 0u64;
    let mut errors = 0u64;
    for seed in 0..seeds {
        let rec = run_cell(
            cfg,
            &CellCoord {
                scheme,
                snr_db: snr,
                speed_kmh: speed,
                delay_spread_ns: 100.0,
                seed,
            },
        )
        .unwrap();
        total += rec.bits_total;
        errors += rec.bits_error;
    }
    errors as f64 / total as f64
}

fn main() {
    let mut cfg = SweepConfig::default();
    cfg.frames_per_seed = 25;
    cfg.detector.memory_enabled = false;
    cfg.detector.band_half_width = 48;
    cfg.doppler_scale = 16.0;
    let seeds = 4;

    let wh_static30 = ber(&cfg, Scheme::Whtdm, 30.0, 0.0, seeds);
    println!("WHTDM static 30 dB: {wh_static30:.3e} (need in [2e-3, 1e-1])");
    for speed in [0.0, 120.0, 250.0, 500.0] {
        let wh = ber(&cfg, Scheme::Whtdm, 20.0, speed, seeds);
        let of = ber(&cfg, Scheme::Ofdm, 20.0, speed, seeds);
        println!("20 dB speed {speed}: WHTDM {wh:.3e} (need <= 6e-2), OFDM {of:.3e}");
    }
}
