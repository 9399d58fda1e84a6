//! Power delay profiles.
//!
//! A profile is a list of (normalized delay, relative power in dB) taps read
//! from a plain-text file: one tap per line, `normalized_delay power_db`,
//! `#` comments. Normalized delays are multiplied by the configured RMS
//! delay spread to obtain absolute delays; linear powers are normalized to
//! sum to one.

use crate::error::{Error, Result};

/// TDL-C tap table bundled with the crate; selectable by the name "tdlc".
const TDLC: &str = include_str!("../profiles/tdlc.txt");

#[derive(Clone, Copy, Debug)]
pub struct ProfileTap {
    pub normalized_delay: f64,
    pub power_db: f64,
}

#[derive(Clone, Debug)]
pub struct DelayProfile {
    pub name: String,
    taps: Vec<ProfileTap>,
    pub rms_delay_spread_ns: f64,
}

impl DelayProfile {
    /// Parse the one-tap-per-line text format.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut taps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let delay: f64 = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("{name}:{}: missing delay", lineno + 1)))?
                .parse()
                .map_err(|_| Error::Parse(format!("{name}:{}: bad delay", lineno + 1)))?;
            let power_db: f64 = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("{name}:{}: missing power", lineno + 1)))?
                .parse()
                .map_err(|_| Error::Parse(format!("{name}:{}: bad power", lineno + 1)))?;
            if fields.next().is_some() {
                return Err(Error::Parse(format!(
                    "{name}:{}: expected two columns",
                    lineno + 1
                )));
            }
            taps.push(ProfileTap {
                normalized_delay: delay,
                power_db,
            });
        }
        if taps.is_empty() {
            return Err(Error::Parse(format!("{name}: no taps")));
        }
        let mut prev = 0.0;
        for tap in &taps {
            if tap.normalized_delay < 0.0 {
                return Err(Error::Parse(format!("{name}: negative delay")));
            }
            if tap.normalized_delay < prev {
                return Err(Error::Parse(format!(
                    "{name}: delays must be non-decreasing"
                )));
            }
            prev = tap.normalized_delay;
        }
        Ok(DelayProfile {
            name: name.to_string(),
            taps,
            rms_delay_spread_ns: 100.0,
        })
    }

    /// Resolve a profile by bundled name or filesystem path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match name_or_path {
            "tdlc" | "tdl-c" => Self::parse("tdlc", TDLC),
            // frequency-flat single tap, mostly for tests and calibration
            "flat" => Self::parse("flat", "0.0 0.0"),
            path => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Self::parse(path, &text)
            }
        }
    }

    pub fn with_rms_spread_ns(mut self, rms_ns: f64) -> Self {
        self.rms_delay_spread_ns = rms_ns;
        self
    }

    pub fn taps(&self) -> &[ProfileTap] {
        &self.taps
    }

    /// Linear tap powers normalized to unit sum.
    pub fn linear_powers(&self) -> Vec<f64> {
        let raw: Vec<f64> = self
            .taps
            .iter()
            .map(|t| 10f64.powf(t.power_db / 10.0))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }

    /// Tap delays rounded to the nearest sample at `sample_rate_hz`.
    pub fn delays_in_samples(&self, sample_rate_hz: f64) -> Vec<usize> {
        self.taps
            .iter()
            .map(|t| {
                let delay_s = t.normalized_delay * self.rms_delay_spread_ns * 1e-9;
                (delay_s * sample_rate_hz).round() as usize
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_profile_loads_and_normalizes() {
        let p = DelayProfile::load("tdlc").unwrap();
        assert_eq!(p.taps().len(), 24);
        let total: f64 = p.linear_powers().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for w in p.taps().windows(2) {
            assert!(w[0].normalized_delay <= w[1].normalized_delay);
        }
    }

    #[test]
    fn delay_rounding_at_working_rate() {
        // 100 ns spread at 7.68 MHz puts the longest TDL-C tap at sample 7.
        let p = DelayProfile::load("tdlc").unwrap().with_rms_spread_ns(100.0);
        let delays = p.delays_in_samples(7.68e6);
        assert_eq!(delays[0], 0);
        assert_eq!(*delays.last().unwrap(), 7);
        // 30 ns spread collapses it to 2.
        let p = p.with_rms_spread_ns(30.0);
        assert_eq!(*p.delays_in_samples(7.68e6).last().unwrap(), 2);
    }

    #[test]
    fn parser_accepts_comments_and_rejects_garbage() {
        let ok = DelayProfile::parse("t", "# header\n0.0 0.0\n1.0 -3.0 # tail\n").unwrap();
        assert_eq!(ok.taps().len(), 2);
        assert!(DelayProfile::parse("t", "").is_err());
        assert!(DelayProfile::parse("t", "0.0").is_err());
        assert!(DelayProfile::parse("t", "0.0 0.0 0.0").is_err());
        assert!(DelayProfile::parse("t", "1.0 0.0\n0.5 0.0").is_err());
        assert!(DelayProfile::parse("t", "-1.0 0.0").is_err());
    }
}
