//! Two-pulse photon echo decay and T₂ bookkeeping.
//!
//! The echo intensity after pulse separation `t12` follows the standard
//! `I = I₀·exp(-(4·t12/T₂)^x)` with `x = 1` for pure exponential dephasing; the
//! excitation pulses themselves are not simulated.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::util::linear_fit;
use crate::{Error, Result};

/// Relative echo intensity `exp(-4·t12/T₂)`.
pub fn two_pulse_echo_intensity(t12: f64, t2: f64) -> f64 {
    (-(4.0 * t12) / t2).exp()
}

/// Stretched form `exp(-(4·t12/T₂)^x)`.
pub fn two_pulse_echo_intensity_stretched(t12: f64, t2: f64, exponent: f64) -> f64 {
    (-((4.0 * t12) / t2).powf(exponent)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoFit {
    pub t2: f64,
    pub t2_std_error: f64,
    pub amplitude: f64,
    pub exponent: f64,
    pub residual_rms: f64,
}

/// Fits `(t12, intensity)` pairs. With `exponent = None` the stretch exponent is
/// optimised on `[0.3, 3]` as well; otherwise it is held fixed.
pub fn fit_two_pulse_echo(points: &[(f64, f64)], exponent: Option<f64>) -> Result<EchoFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 echo points, got {}",
            points.len()
        )));
    }
    if let Some((index, &(_, value))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(Error::NonPositiveEfficiency { index, value });
    }
    match exponent {
        Some(x) if !(x > 0.0) => Err(Error::invalid("exponent", "must be positive")),
        Some(x) => fit_fixed(points, x),
        None => {
            let sse = |x: f64| fit_fixed(points, x).map(|f| f.residual_rms).unwrap_or(f64::INFINITY);
            let x = golden_section(0.3, 3.0, sse);
            fit_fixed(points, x)
        }
    }
}

fn fit_fixed(points: &[(f64, f64)], x: f64) -> Result<EchoFit> {
    let u: Vec<f64> = points.iter().map(|p| p.0.powf(x)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (intercept, slope, _, se_slope, rms) = linear_fit(&u, &y);
    if !(slope < 0.0) {
        return Err(Error::InsufficientData("echo intensity does not decay".into()));
    }
    let t2 = 4.0 * (-slope).powf(-1.0 / x);
    Ok(EchoFit {
        t2,
        t2_std_error: t2 * se_slope / (x * slope.abs()),
        amplitude: intercept.exp(),
        exponent: x,
        residual_rms: rms,
    })
}

fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-7 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Measured T₂ against magnetic field, linearly interpolated and clamped at the ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTable {
    points: Vec<(f64, f64)>,
}

impl CoherenceTable {
    /// `(field_G, t2_s)` pairs in any order.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("coherence table is empty".into()));
        }
        if points.iter().any(|p| !(p.1 > 0.0) || !p.0.is_finite()) {
            return Err(Error::invalid("t2", "table entries need finite field and positive T₂"));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { points })
    }

    /// Reads `field_G,t2_s` rows.
    pub fn from_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let v: Vec<f64> = rec.iter().filter_map(|s| s.trim().parse().ok()).collect();
            if v.len() < 2 {
                return Err(Error::Config(format!("bad coherence row {rec:?}")));
            }
            points.push((v[0], v[1]));
        }
        Self::new(points)
    }

    pub fn t2_at(&self, field: f64) -> f64 {
        let p = &self.points;
        if field <= p[0].0 {
            return p[0].1;
        }
        if field >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|q| q.0 <= field);
        let (a, b) = (p[i - 1], p[i]);
        a.1 + (b.1 - a.1) * (field - a.0) / (b.0 - a.0)
    }

    /// Field with the longest tabulated T₂.
    pub fn best_field(&self) -> f64 {
        self.points
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|p| p.0)
            .unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn decay(t2: f64, noise: f64, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, noise).unwrap();
        (0..12)
            .map(|i| {
                let t = i as f64 * 40e-6;
                (t, 0.8 * two_pulse_echo_intensity(t, t2) * (1.0 + n.sample(&mut rng)))
            })
            .collect()
    }

    #[test]
    fn intensity_values() {
        assert_eq!(two_pulse_echo_intensity(0.0, 1.1e-3), 1.0);
        let v = two_pulse_echo_intensity(275e-6, 1.1e-3);
        assert!((v - (-1f64).exp()).abs() <= f64::EPSILON);
        assert_eq!(two_pulse_echo_intensity_stretched(275e-6, 1.1e-3, 1.0), v);
    }

    #[test]
    fn recovers_t2() {
        let f = fit_two_pulse_echo(&decay(490e-6, 0.0, 0), Some(1.0)).unwrap();
        assert!((f.t2 / 490e-6 - 1.0).abs() < 1e-9);
        assert!((f.amplitude - 0.8).abs() < 1e-9);
        let noisy = fit_two_pulse_echo(&decay(490e-6, 0.02, 4), Some(1.0)).unwrap();
        assert!((noisy.t2 / 490e-6 - 1.0).abs() < 0.02);
    }

    #[test]
    fn recovers_stretch_exponent() {
        let pts: Vec<(f64, f64)> = (1..15)
            .map(|i| {
                let t = i as f64 * 30e-6;
                (t, two_pulse_echo_intensity_stretched(t, 1.1e-3, 1.6))
            })
            .collect();
        let f = fit_two_pulse_echo(&pts, None).unwrap();
        assert!((f.exponent - 1.6).abs() < 1e-3);
        assert!((f.t2 / 1.1e-3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn table_interpolates() {
        let t = CoherenceTable::new(vec![(400.0, 0.6e-3), (100.0, 1.1e-3), (0.0, 0.5e-3)]).unwrap();
        assert_eq!(t.t2_at(100.0), 1.1e-3);
        assert!((t.t2_at(250.0) - 0.85e-3).abs() < 1e-15);
        assert_eq!(t.t2_at(-5.0), 0.5e-3);
        assert_eq!(t.t2_at(1e4), 0.6e-3);
        assert_eq!(t.best_field(), 100.0);
        assert!(CoherenceTable::new(vec![]).is_err());
    }
}
