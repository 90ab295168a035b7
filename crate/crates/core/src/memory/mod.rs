//! Store-and-recall simulation of a two-level AFC memory.
//!
//! The input pulse is filtered by the comb transfer function; the delay-`n/Δ`
//! components of the impulse response are the echoes. Decoherence is phenomenological:
//! the efficiency decays as `exp(-4τ/T₂)·exp(-τ/tm_extra) = exp(-τ/T_m)`, applied to the
//! impulse response as an amplitude factor `exp(-t/(2·T_m))`.

mod atoms;
mod cavity;
mod echo;
mod fit;

pub use atoms::{atomic_echo_energy, atomic_echo_field};
pub use cavity::{calibrate_background_for_target, cavity_enhanced_projection, CavityProjection};
pub use echo::{
    fit_two_pulse_echo, two_pulse_echo_intensity, two_pulse_echo_intensity_stretched,
    CoherenceTable, EchoFit,
};
pub use fit::{fit_exponential_decay, read_sweep_csv, write_sweep_csv, DecayFit};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::{build_profile_for_grid, transfer_function, CombSpec, PhaseMode};
use crate::signals::{gaussian_pulse, square_pulse, to_spectrum, to_time, ComplexEnvelope, TimeGrid};
use crate::{Error, Result};

/// Minimum fraction of the input spectral energy that must fall inside the comb.
pub const MIN_IN_BAND_FRACTION: f64 = 0.95;

/// Half-width of the integration windows, in units of the pulse FWHM.
pub const WINDOW_HALF_WIDTH_FWHM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceModel {
    /// Optical coherence time T₂ (s).
    #[serde(deserialize_with = "crate::util::f64_or_inf")]
    pub t2: f64,
    /// Extra phenomenological efficiency decay time (s); `inf` disables it.
    #[serde(deserialize_with = "crate::util::f64_or_inf")]
    pub tm_extra: f64,
    /// Radiative lifetime T₁ (s); only used to bound T₂.
    #[serde(deserialize_with = "crate::util::f64_or_inf")]
    pub t1: f64,
}

impl Default for DecoherenceModel {
    fn default() -> Self {
        Self {
            t2: 1.1e-3,
            tm_extra: f64::INFINITY,
            t1: 1.3e-3,
        }
    }
}

impl DecoherenceModel {
    pub fn new(t2: f64, tm_extra: f64, t1: f64) -> Result<Self> {
        let m = Self { t2, tm_extra, t1 };
        m.validate()?;
        Ok(m)
    }

    /// No decay at all.
    pub fn none() -> Self {
        Self {
            t2: f64::INFINITY,
            tm_extra: f64::INFINITY,
            t1: f64::INFINITY,
        }
    }

    /// Extra decay chosen so that the combined 1/e efficiency time equals `t_m`.
    pub fn with_combined_tm(t2: f64, t_m: f64, t1: f64) -> Result<Self> {
        let rate = 1.0 / t_m - 4.0 / t2;
        if !(rate >= 0.0) {
            return Err(Error::invalid(
                "t_m",
                format!("{t_m} s exceeds the T₂/4 limit {} s", t2 / 4.0),
            ));
        }
        Self::new(t2, 1.0 / rate, t1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t2 > 0.0 && self.tm_extra > 0.0 && self.t1 > 0.0) {
            return Err(Error::invalid("decoherence", "t2, tm_extra and t1 must be positive"));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::invalid(
                "t2",
                format!("T₂ = {} s exceeds 2·T₁ = {} s", self.t2, 2.0 * self.t1),
            ));
        }
        Ok(())
    }

    /// Combined efficiency 1/e time, `1/T_m = 4/T₂ + 1/tm_extra`.
    pub fn combined_tm(&self) -> f64 {
        1.0 / (4.0 / self.t2 + 1.0 / self.tm_extra)
    }

    /// Efficiency factor after storage time `tau`.
    pub fn efficiency_decay(&self, tau: f64) -> f64 {
        (-tau / self.combined_tm()).exp()
    }
}

#[derive(Debug, Clone)]
pub struct StorageResult {
    pub output: ComplexEnvelope,
    pub input_energy: f64,
    /// Energy-weighted centre of the input pulse (s).
    pub input_time: f64,
    pub transmitted_energy: f64,
    /// Energy-weighted centre of the directly transmitted pulse (s).
    pub transmitted_time: f64,
    pub echo_energy: f64,
    /// Energy-weighted centre of the first echo (s).
    pub echo_time: f64,
    pub efficiency: f64,
    /// `(centre time, energy)` of the echoes at 2/Δ and 3/Δ that fit on the grid.
    pub higher_order_echoes: Vec<(f64, f64)>,
}

impl StorageResult {
    /// Echo centre relative to the transmitted pulse. Both share the group delay of
    /// the comb's mean absorption (a fast-light advance of ~`2·(d̄/2)/(π²·B)` for a band
    /// of width B), so the difference is the storage time itself.
    pub fn echo_delay(&self) -> f64 {
        self.echo_time - self.transmitted_time
    }

    /// Echo centre relative to the input pulse, including the group delay.
    pub fn echo_delay_from_input(&self) -> f64 {
        self.echo_time - self.input_time
    }
}

/// Store-and-recall with the causal (minimal-phase) absorber.
pub fn store_and_recall(
    input: &ComplexEnvelope,
    spec: &CombSpec,
    dec: &DecoherenceModel,
) -> Result<StorageResult> {
    store_and_recall_with(input, spec, dec, PhaseMode::MinimalPhase)
}

pub fn store_and_recall_with(
    input: &ComplexEnvelope,
    spec: &CombSpec,
    dec: &DecoherenceModel,
    mode: PhaseMode,
) -> Result<StorageResult> {
    spec.validate()?;
    dec.validate()?;
    let grid = input.grid();
    let tau = spec.storage_time();
    if grid.span() <= 2.0 * tau {
        return Err(Error::EchoBeyondGrid(format!(
            "grid span {:e} s must exceed 2/Δ = {:e} s",
            grid.span(),
            2.0 * tau
        )));
    }
    let input_energy = input.energy();
    if !(input_energy > 0.0) {
        return Err(Error::invalid("input", "pulse carries no energy"));
    }

    let spectrum = to_spectrum(input);
    let (lo, hi) = spec.band();
    let fraction_inside = spectrum.energy_in_band(lo, hi) / spectrum.energy();
    if fraction_inside < MIN_IN_BAND_FRACTION {
        return Err(Error::BandwidthExceedsComb {
            fraction_inside,
            required: MIN_IN_BAND_FRACTION,
        });
    }

    let input_time = input.centroid();
    let half_window = WINDOW_HALF_WIDTH_FWHM * input.intensity_fwhm();
    if tau <= 2.0 * half_window {
        return Err(Error::invalid(
            "delta",
            format!("storage time {tau:e} s cannot separate the echo from a pulse of FWHM {:e} s", input.intensity_fwhm()),
        ));
    }
    let last = grid.time(grid.n_samples() - 1);
    if input_time + tau + half_window > last {
        return Err(Error::EchoBeyondGrid(format!(
            "echo window ends at {:e} s, grid ends at {last:e} s",
            input_time + tau + half_window
        )));
    }

    let profile = build_profile_for_grid(spec, grid)?;
    let tf = transfer_function(&profile, mode).with_decay(grid.dt(), dec.combined_tm());
    let output = to_time(&tf.apply(&spectrum)?, grid)?.with_carrier_detuning(input.carrier_detuning());

    let window = |center: f64| (center - half_window, center + half_window);
    let (t0, t1) = window(input_time);
    let transmitted_energy = output.energy_in_window(t0, t1);
    let transmitted_time = output.centroid_in_window(t0, t1);
    let (e0, e1) = window(input_time + tau);
    let echo_energy = output.energy_in_window(e0, e1);
    let echo_time = output.centroid_in_window(e0, e1);
    let higher_order_echoes = (2..=3)
        .map(|n| input_time + n as f64 * tau)
        .take_while(|c| c + half_window <= last)
        .map(|c| {
            let (a, b) = window(c);
            (c, output.energy_in_window(a, b))
        })
        .collect();

    Ok(StorageResult {
        output,
        input_energy,
        input_time,
        transmitted_energy,
        transmitted_time,
        echo_energy,
        echo_time,
        efficiency: echo_energy / input_energy,
        higher_order_echoes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    #[default]
    Gaussian,
    Square,
}

/// Probe pulse and grid used for each point of an efficiency sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    /// Intensity FWHM (gaussian) or duration (square) of the probe (s).
    pub pulse_fwhm: f64,
    pub pulse_shape: PulseShape,
    pub dt: f64,
    /// Fixed grid size; when absent the smallest power of two spanning
    /// `max(min_periods/Δ, pulse lead + 3/Δ)` is used.
    pub n_samples: Option<usize>,
    pub min_periods: f64,
    pub phase_mode: PhaseMode,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            pulse_fwhm: 1e-6,
            pulse_shape: PulseShape::Gaussian,
            dt: 10e-9,
            n_samples: Some(1 << 20),
            min_periods: 32.0,
            phase_mode: PhaseMode::MinimalPhase,
        }
    }
}

impl SweepSettings {
    /// Probe start time: far enough from the grid origin for the pulse tails.
    pub fn pulse_center(&self) -> f64 {
        4.0 * self.pulse_fwhm
    }

    pub fn grid_for(&self, delta: f64) -> Result<TimeGrid> {
        match self.n_samples {
            Some(n) => TimeGrid::new(n, self.dt),
            None => {
                let span = (self.min_periods / delta).max(self.pulse_center() + 3.0 / delta);
                TimeGrid::covering(span, self.dt)
            }
        }
    }

    pub fn probe(&self, grid: TimeGrid, detuning: f64) -> Result<ComplexEnvelope> {
        match self.pulse_shape {
            PulseShape::Gaussian => gaussian_pulse(grid, self.pulse_center(), self.pulse_fwhm, detuning, 1.0),
            PulseShape::Square => square_pulse(grid, self.pulse_center(), self.pulse_fwhm, detuning, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub efficiency: f64,
    pub echo_delay: f64,
}

/// One recall per storage time, with Δ = 1/τ and every other comb field from `template`.
/// Points are evaluated in parallel and returned in input order.
pub fn efficiency_sweep(
    taus: &[f64],
    template: &CombSpec,
    dec: &DecoherenceModel,
    settings: &SweepSettings,
) -> Result<Vec<SweepPoint>> {
    taus.par_iter()
        .map(|&tau| {
            if !(tau > 0.0) {
                return Err(Error::invalid("tau", format!("{tau} must be positive")));
            }
            let spec = CombSpec {
                delta: 1.0 / tau,
                ..*template
            };
            let grid = settings.grid_for(spec.delta)?;
            let probe = settings.probe(grid, template.center_detuning)?;
            let r = store_and_recall_with(&probe, &spec, dec, settings.phase_mode)?;
            Ok(SweepPoint {
                tau,
                efficiency: r.efficiency,
                echo_delay: r.echo_delay(),
            })
        })
        .collect()
}
