//! Efficiency projection for a comb placed inside an impedance-matched cavity.
//!
//! Model: a single-sided cavity whose input mirror is chosen so that all incident light
//! is absorbed on resonance (impedance matching). The comb absorbs a share
//! `d̃/(d̃ + d0)` of it and the background the rest; the echo generated inside competes
//! with the same background on the way out. To first order in `d0/d̃` this gives a
//! background factor `exp(-2·d0/d̃)`, which multiplies the tooth dephasing factor and the
//! storage-time decay:
//!
//! ```text
//! η_cav = exp(-2·d0/d̃) · η_deph(shape, F) · exp(-τ/T_m)
//! ```
//!
//! Assumptions: unit internal absorption at matching, no mirror loss, cavity linewidth
//! wider than the comb, comb quality unchanged by the cavity. The lossless limit
//! (`d0 = 0`, no decay) is `η_deph`, which tends to 1 as F grows.

use serde::{Deserialize, Serialize};

use super::DecoherenceModel;
use crate::comb::{analytic_efficiency, CombSpec};
use crate::util::bisect;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityProjection {
    /// Ideal impedance-matched value.
    pub cavity_matched: f64,
    /// Same comb without a cavity.
    pub single_pass: f64,
    pub background_factor: f64,
    pub dephasing_factor: f64,
    pub decay_factor: f64,
}

pub fn cavity_enhanced_projection(
    spec: &CombSpec,
    dec: &DecoherenceModel,
    tau: f64,
) -> Result<CavityProjection> {
    spec.validate()?;
    dec.validate()?;
    if !(tau >= 0.0) {
        return Err(Error::invalid("tau", format!("{tau} must be ≥ 0")));
    }
    if !(spec.d0 < spec.d_peak) {
        return Err(Error::invalid("d0", "background must be below the tooth depth"));
    }
    let background_factor = (-2.0 * spec.d0 / spec.effective_contrast()).exp();
    let dephasing_factor = spec.dephasing_factor();
    let decay_factor = if tau.is_infinite() { 0.0 } else { dec.efficiency_decay(tau) };
    Ok(CavityProjection {
        cavity_matched: background_factor * dephasing_factor * decay_factor,
        single_pass: analytic_efficiency(spec)? * decay_factor,
        background_factor,
        dephasing_factor,
        decay_factor,
    })
}

/// Background depth `d0` for which the matched-cavity projection equals `target`.
pub fn calibrate_background_for_target(
    spec: &CombSpec,
    dec: &DecoherenceModel,
    tau: f64,
    target: f64,
) -> Result<f64> {
    let eval = |d0: f64| {
        cavity_enhanced_projection(&CombSpec { d0, ..*spec }, dec, tau)
            .map(|p| p.cavity_matched - target)
            .unwrap_or(f64::NAN)
    };
    bisect(0.0, spec.d_peak * (1.0 - 1e-12), eval).ok_or_else(|| {
        Error::invalid(
            "target",
            format!("{target} is not reachable for this comb at τ = {tau:e} s"),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::ToothShape;

    #[test]
    fn lossless_gaussian_limit() {
        let spec = CombSpec {
            finesse: 50.0,
            d_peak: 5.0,
            d0: 0.0,
            tooth_shape: ToothShape::Gaussian,
            ..CombSpec::default()
        };
        let p = cavity_enhanced_projection(&spec, &DecoherenceModel::none(), 30e-6).unwrap();
        assert!(p.cavity_matched >= 0.99 && p.cavity_matched <= 1.0);
    }

    #[test]
    fn vanishes_at_long_storage() {
        let spec = CombSpec { finesse: 4.0, ..CombSpec::default() };
        let p = cavity_enhanced_projection(&spec, &DecoherenceModel::default(), f64::INFINITY).unwrap();
        assert_eq!(p.cavity_matched, 0.0);
        let far = cavity_enhanced_projection(&spec, &DecoherenceModel::default(), 1.0).unwrap();
        assert!(far.cavity_matched < 1e-100);
    }

    #[test]
    fn cavity_beats_single_pass() {
        let spec = CombSpec { finesse: 4.0, d0: 0.1, ..CombSpec::default() };
        let p = cavity_enhanced_projection(&spec, &DecoherenceModel::default(), 30e-6).unwrap();
        assert!(p.cavity_matched > p.single_pass);
        assert!(cavity_enhanced_projection(&CombSpec { d0: 1.0, ..spec }, &DecoherenceModel::default(), 0.0).is_err());
    }

    #[test]
    fn calibration_round_trip() {
        let spec = CombSpec { finesse: 4.0, ..CombSpec::default() };
        let dec = DecoherenceModel::default();
        let d0 = calibrate_background_for_target(&spec, &dec, 30e-6, 0.15).unwrap();
        let p = cavity_enhanced_projection(&CombSpec { d0, ..spec }, &dec, 30e-6).unwrap();
        assert!((p.cavity_matched - 0.15).abs() < 1e-9);
        assert!(calibrate_background_for_target(&spec, &dec, 30e-6, 0.99).is_err());
    }
}
