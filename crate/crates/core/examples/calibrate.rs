// Scratch calibration: BER of both schemes across Doppler scale factors,
// plus the static 40 dB frame-error-free fraction.
use whtdm::config::SweepConfig;
use whtdm::harness::{run_cell, CellCoord};
use whtdm::Scheme;

fn cell_ber(cfg: &SweepConfig, scheme: Scheme, snr: f64, speed: f64, seeds: u32) -> f64 {
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
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("scales");

    let mut cfg = SweepConfig::default();
    cfg.frames_per_seed = 30;
    let seeds = 4;

    match mode {
        "scales" => {
            println!("scale speed snr OFDM WHTDM(mem) WHTDM(plain)");
            for scale in [1.0, 4.0, 8.0, 12.0, 16.0, 24.0] {
                cfg.doppler_scale = scale;
                for (speed, snr) in [(120.0, 30.0), (500.0, 30.0), (500.0, 20.0)] {
                    let ofdm = cell_ber(&cfg, Scheme::Ofdm, snr, speed, seeds);
                    cfg.detector.memory_enabled = true;
                    let wh_mem = cell_ber(&cfg, Scheme::Whtdm, snr, speed, seeds);
                    cfg.detector.memory_enabled = false;
                    let wh_plain = cell_ber(&cfg, Scheme::Whtdm, snr, speed, seeds);
                    cfg.detector.memory_enabled = true;
                    println!(
                        "{scale:>5} {speed:>5} {snr:>4} {ofdm:>10.3e} {wh_mem:>10.3e} {wh_plain:>10.3e}"
                    );
                }
            }
        }
        "static" => {
            println!("static cells (speed 0), 30 dB and 20 dB:");
            for snr in [20.0, 30.0] {
                let ofdm = cell_ber(&cfg, Scheme::Ofdm, snr, 0.0, seeds);
                cfg.detector.memory_enabled = true;
                let wh_mem = cell_ber(&cfg, Scheme::Whtdm, snr, 0.0, seeds);
                cfg.detector.memory_enabled = false;
                let wh_plain = cell_ber(&cfg, Scheme::Whtdm, snr, 0.0, seeds);
                cfg.detector.memory_enabled = true;
                println!("snr {snr}: OFDM {ofdm:.3e} WHTDM(mem) {wh_mem:.3e} WHTDM(plain) {wh_plain:.3e}");
            }
        }
        "frames40" => {
            // fraction of error-free frames, static OFDM at 40 dB
            let mut clean = 0usize;
            let frames = 400usize;
            cfg.frames_per_seed = 1;
            for seed in 0..frames as u32 {
                let rec = run_cell(
                    &cfg,
                    &CellCoord {
                        scheme: Scheme::Ofdm,
                        snr_db: 40.0,
                        speed_kmh: 0.0,
                        delay_spread_ns: 100.0,
                        seed,
                    },
                )
                .unwrap();
                if rec.bits_error == 0 {
                    clean += 1;
                }
            }
            println!(
                "static OFDM 40 dB: {clean}/{frames} error-free frames = {:.3}",
                clean as f64 / frames as f64
            );
        }
        other => eprintln!("unknown mode {other}"),
    }
}
