//! Echo computed from an explicit sum over sampled atoms.
//!
//! Each atom `j` at detuning `δ_j` is excited with amplitude proportional to the input
//! spectrum `A(δ_j)` and radiates `e^{i2πδ_j t}`. To first order in the comb modulation,
//! with the mean absorption of the band attenuating the field on its way in and out,
//! the forward field after the pulse is
//!
//! ```text
//! E(t) = −e^{−d̄/2} · (S/N) · Σ_j A(δ_j) e^{i2πδ_j t}
//! ```
//!
//! where `S = ∫ d(f) df` is the area of the sampled profile. The spatial phase
//! `e^{−ikz_j}` of the stored state is cancelled by the phase of the driving field at
//! `z_j`, so it drops out of forward recall.

use std::f64::consts::PI;

use super::{DecoherenceModel, WINDOW_HALF_WIDTH_FWHM};
use crate::comb::{AtomEnsembleSample, CombSpec, OpticalDepthProfile};
use crate::signals::ComplexEnvelope;
use crate::{Complex64, Error, Result};

/// Field of the first echo on the input grid; zero outside the echo window.
pub fn atomic_echo_field(
    atoms: &AtomEnsembleSample,
    profile: &OpticalDepthProfile,
    spec: &CombSpec,
    input: &ComplexEnvelope,
    dec: &DecoherenceModel,
) -> Result<ComplexEnvelope> {
    spec.validate()?;
    let grid = input.grid();
    if (profile.df() - grid.df()).abs() > 1e-9 * grid.df() {
        return Err(Error::GridMismatch("profile and input use different frequency axes".into()));
    }
    let n = atoms.n_atoms();
    if n == 0 {
        return Err(Error::invalid("atoms", "empty ensemble"));
    }
    let dt = grid.dt();
    let tau = spec.storage_time();
    let center = input.centroid();
    let half = WINDOW_HALF_WIDTH_FWHM * input.intensity_fwhm();
    let (w0, w1) = (center + tau - half, center + tau + half);
    let last = grid.time(grid.n_samples() - 1);
    if w1 > last {
        return Err(Error::EchoBeyondGrid(format!("echo window ends at {w1:e} s")));
    }

    let samples = input.samples();
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let support: Vec<usize> = (0..samples.len())
        .filter(|&k| samples[k].norm() > 1e-9 * peak)
        .collect();
    let (k_lo, k_hi) = match (support.first(), support.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Ok(ComplexEnvelope::zeros(grid)),
    };
    let m_lo = (w0 / dt).ceil() as usize;
    let m_hi = (w1 / dt).floor() as usize;

    let area: f64 = profile.depths().iter().sum::<f64>() * profile.df();
    let scale = -(-0.5 * spec.mean_depth()).exp() * area / n as f64
        * dec.efficiency_decay(tau).sqrt();

    let mut field = vec![Complex64::new(0.0, 0.0); m_hi + 1 - m_lo];
    for &delta in &atoms.detunings {
        // A(δ) = Σ a_k e^{-i2πδ t_k} dt over the pulse support.
        let step = Complex64::from_polar(1.0, -2.0 * PI * delta * dt);
        let mut ph = Complex64::from_polar(1.0, -2.0 * PI * delta * grid.time(k_lo));
        let mut amp = Complex64::new(0.0, 0.0);
        for s in &samples[k_lo..=k_hi] {
            amp += s * ph;
            ph *= step;
        }
        amp *= dt;
        let step = step.conj();
        let mut ph = Complex64::from_polar(1.0, 2.0 * PI * delta * grid.time(m_lo));
        for v in field.iter_mut() {
            *v += amp * ph;
            ph *= step;
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_samples()];
    for (i, v) in field.into_iter().enumerate() {
        out[m_lo + i] = v * scale;
    }
    ComplexEnvelope::new(grid, out, input.carrier_detuning())
}

/// Energy of [`atomic_echo_field`], integrated over the same window as
/// [`super::store_and_recall`].
pub fn atomic_echo_energy(
    atoms: &AtomEnsembleSample,
    profile: &OpticalDepthProfile,
    spec: &CombSpec,
    input: &ComplexEnvelope,
    dec: &DecoherenceModel,
) -> Result<f64> {
    Ok(atomic_echo_field(atoms, profile, spec, input, dec)?.energy())
}
