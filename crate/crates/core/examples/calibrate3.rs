// Scratch calibration 3: criteria-oriented grid over (band, doppler scale).
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
    let seeds = 4;
    let mut cfg = SweepConfig::default();
    cfg.frames_per_seed = 25;
    let args: Vec<String> = std::env::args().collect();
    cfg.detector.memory_enabled = args.get(1).map(String::as_str) == Some("mem");
    let bands: Vec<usize> = args
        .get(2)
        .map(|s| s.split(',').map(|v| v.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![24, 32, 40]);
    let scales: Vec<f64> = args
        .get(3)
        .map(|s| s.split(',').map(|v| v.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![8.0, 12.0, 16.0]);

    println!("band scale | OF120/30 WH120/30 ratio | OF500/30 WH500/30 | WH0/20 WH500/20");
    for &band in &bands {
        for &scale in &scales {
            cfg.detector.band_half_width = band;
            cfg.doppler_scale = scale;
            let of120 = ber(&cfg, Scheme::Ofdm, 30.0, 120.0, seeds);
            let wh120 = ber(&cfg, Scheme::Whtdm, 30.0, 120.0, seeds);
            let of500 = ber(&cfg, Scheme::Ofdm, 30.0, 500.0, seeds);
            let wh500 = ber(&cfg, Scheme::Whtdm, 30.0, 500.0, seeds);
            let wh0_20 = ber(&cfg, Scheme::Whtdm, 20.0, 0.0, seeds);
            let wh500_20 = ber(&cfg, Scheme::Whtdm, 20.0, 500.0, seeds);
            println!(
                "{band:>4} {scale:>5} | {of120:>9.3e} {wh120:>9.3e} {:>5.2} | {of500:>9.3e} {wh500:>9.3e} | {wh0_20:>9.3e} {wh500_20:>9.3e}",
                of120 / wh120.max(1e-9)
            );
        }
    }
}
