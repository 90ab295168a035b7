use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::max_conflict_free_block;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Protocol {
    #[default]
    TwoLevelAfc,
    /// Control pulses block absorption for `control_dead_time` at the end of each
    /// optical storage block.
    SpinWave { control_dead_time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepeaterConfig {
    pub optical_storage_time: f64,
    pub mode_duration: f64,
    pub n_spectral_channels: u32,
    pub per_mode_success_probability: f64,
    pub attempt_cycle: f64,
    pub protocol: Protocol,
    pub monte_carlo_cycles: u64,
}

impl Default for RepeaterConfig {
    fn default() -> Self {
        Self {
            optical_storage_time: 5e-6,
            mode_duration: 1e-6,
            n_spectral_channels: 11,
            per_mode_success_probability: 0.01,
            attempt_cycle: 1e-3,
            protocol: Protocol::TwoLevelAfc,
            monte_carlo_cycles: 100_000,
        }
    }
}

impl RepeaterConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("optical_storage_time", self.optical_storage_time),
            ("mode_duration", self.mode_duration),
            ("attempt_cycle", self.attempt_cycle),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        if self.n_spectral_channels == 0 {
            return Err(Error::invalid("n_spectral_channels", "need at least one channel"));
        }
        let p = self.per_mode_success_probability;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid("per_mode_success_probability", format!("{p} not in (0, 1]")));
        }
        if let Protocol::SpinWave { control_dead_time } = self.protocol {
            if !(control_dead_time >= 0.0) {
                return Err(Error::invalid("control_dead_time", "must be ≥ 0"));
            }
        }
        if self.monte_carlo_cycles < 100_000 {
            return Err(Error::invalid("monte_carlo_cycles", "need at least 1e5 cycles"));
        }
        Ok(())
    }

    /// Temporal slots per block that can be filled, counted from the slot schedule:
    /// slot `k` occupies `[k·md, (k+1)·md)` and must end before the dead time starts.
    pub fn usable_slots(&self) -> u64 {
        let dead = match self.protocol {
            Protocol::TwoLevelAfc => return max_conflict_free_block(self.optical_storage_time, self.mode_duration),
            Protocol::SpinWave { control_dead_time } => control_dead_time,
        };
        let open = self.optical_storage_time - dead;
        let tol = 1e-12 * self.optical_storage_time;
        (0u64..)
            .take_while(|k| (*k as f64 + 1.0) * self.mode_duration <= open + tol)
            .count() as u64
    }

    pub fn effective_modes(&self) -> u64 {
        self.usable_slots() * self.n_spectral_channels as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub analytic_rate: f64,
    pub monte_carlo_rate: f64,
    pub monte_carlo_std_error: f64,
    pub effective_modes: u64,
    pub cycles: u64,
}

impl RateEstimate {
    /// Monte Carlo within three standard errors of the analytic value.
    pub fn consistent(&self) -> bool {
        (self.monte_carlo_rate - self.analytic_rate).abs()
            <= 3.0 * self.monte_carlo_std_error + 1e-12 * self.analytic_rate
    }
}

/// Heralded successes per second: `M·p/cycle` analytically, and by drawing the number of
/// successful modes in each attempt cycle.
pub fn entanglement_rate(cfg: &RepeaterConfig, seed: u64) -> Result<RateEstimate> {
    cfg.validate()?;
    let m = cfg.effective_modes();
    let p = cfg.per_mode_success_probability;
    let analytic_rate = m as f64 * p / cfg.attempt_cycle;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = Binomial::new(m, p).map_err(|e| Error::invalid("per_mode_success_probability", e.to_string()))?;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..cfg.monte_carlo_cycles {
        let k = draw.sample(&mut rng) as f64;
        sum += k;
        sum_sq += k * k;
    }
    let n = cfg.monte_carlo_cycles as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(RateEstimate {
        analytic_rate,
        monte_carlo_rate: mean / cfg.attempt_cycle,
        monte_carlo_std_error: (var / n).sqrt() / cfg.attempt_cycle,
        effective_modes: m,
        cycles: cfg.monte_carlo_cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn unit() -> RepeaterConfig {
        RepeaterConfig {
            optical_storage_time: 1e-6,
            mode_duration: 1e-6,
            n_spectral_channels: 1,
            per_mode_success_probability: 1.0,
            attempt_cycle: 1e-3,
            ..RepeaterConfig::default()
        }
    }

    #[test]
    fn trivial_rate() {
        let r = entanglement_rate(&unit(), 0).unwrap();
        assert_eq!(r.analytic_rate, 1e3);
        assert_eq!(r.monte_carlo_rate, 1e3);
        assert_eq!(r.monte_carlo_std_error, 0.0);
        assert!(r.consistent());
    }

    #[test]
    fn channels_scale_linearly() {
        let a = RepeaterConfig::default();
        let b = RepeaterConfig { n_spectral_channels: 22, ..a };
        let ra = entanglement_rate(&a, 1).unwrap();
        let rb = entanglement_rate(&b, 1).unwrap();
        assert!((rb.analytic_rate / ra.analytic_rate - 2.0).abs() < 1e-12);
        assert_eq!(a.effective_modes(), 55);
    }

    #[test]
    fn dead_time_costs_a_fifth() {
        let afc = RepeaterConfig { optical_storage_time: 10e-6, ..RepeaterConfig::default() };
        let sw = RepeaterConfig { protocol: Protocol::SpinWave { control_dead_time: 2e-6 }, ..afc };
        // Independent count: slots whose end lies at or before 8 µs.
        let brute = (0..10).filter(|k| (k + 1) as f64 <= 8.0).count() as u64;
        assert_eq!(sw.usable_slots(), brute);
        let ratio = entanglement_rate(&afc, 0).unwrap().analytic_rate / entanglement_rate(&sw, 0).unwrap().analytic_rate;
        assert!((ratio - 1.25).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_inputs() {
        let base = RepeaterConfig::default();
        let rate = |c: &RepeaterConfig| entanglement_rate(c, 3).unwrap().analytic_rate;
        let mut prev = 0.0;
        for i in 1..40 {
            let r = rate(&RepeaterConfig { optical_storage_time: i as f64 * 0.7e-6, ..base });
            assert!(r >= prev);
            prev = r;
        }
        assert!(rate(&RepeaterConfig { per_mode_success_probability: 0.02, ..base }) > rate(&base));
        assert!(rate(&RepeaterConfig { n_spectral_channels: 12, ..base }) > rate(&base));
    }

    #[test]
    fn monte_carlo_agrees_for_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for seed in 0..20 {
            let cfg = RepeaterConfig {
                optical_storage_time: rng.random_range(1e-6..100e-6),
                mode_duration: rng.random_range(0.2e-6..2e-6),
                n_spectral_channels: rng.random_range(1..16),
                per_mode_success_probability: rng.random_range(1e-4..1.0),
                attempt_cycle: rng.random_range(1e-4..1e-2),
                protocol: if seed % 2 == 0 {
                    Protocol::TwoLevelAfc
                } else {
                    Protocol::SpinWave { control_dead_time: rng.random_range(0.0..1e-6) }
                },
                monte_carlo_cycles: 100_000,
            };
            let r = entanglement_rate(&cfg, seed).unwrap();
            assert!(r.consistent(), "config {cfg:?}: {r:?}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(RepeaterConfig { per_mode_success_probability: 0.0, ..unit() }.validate().is_err());
        assert!(RepeaterConfig { monte_carlo_cycles: 10, ..unit() }.validate().is_err());
        assert!(RepeaterConfig { n_spectral_channels: 0, ..unit() }.validate().is_err());
    }
}
