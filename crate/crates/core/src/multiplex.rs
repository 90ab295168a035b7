//! Spectral multiplexing with feed-forward mode mapping.
//!
//! Each channel of a [`ChannelPlan`] is a copy of the base comb translated by
//! `i·spacing`. After recall the whole field is frequency shifted (serrodyne) so that the
//! selected channel lands on the resonance of a Lorentzian filter cavity; neighbours leak
//! through with power fraction `T/(1 + (2δ/fwhm)²)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::{build_profile_for_grid, transfer_function, CombSpec, OpticalDepthProfile, PhaseMode};
use crate::memory::DecoherenceModel;
use crate::signals::{gaussian_pulse, to_spectrum, to_time, ComplexEnvelope, TimeGrid};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelPlan {
    pub n_channels: usize,
    /// Centre-to-centre channel spacing (Hz).
    pub spacing: f64,
    pub channel_bandwidth: f64,
    /// Comb of channel 0; `bandwidth` and `center_detuning` are overridden per channel.
    pub base_comb: CombSpec,
    /// Optional per-channel power gain applied to the probe pulses.
    pub gains: Option<Vec<f64>>,
}

impl Default for ChannelPlan {
    fn default() -> Self {
        Self {
            n_channels: 11,
            spacing: 10e6,
            channel_bandwidth: 1e6,
            base_comb: CombSpec::default(),
            gains: None,
        }
    }
}

impl ChannelPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::invalid("n_channels", "need at least one channel"));
        }
        if !(self.channel_bandwidth > 0.0) {
            return Err(Error::invalid("channel_bandwidth", "must be positive"));
        }
        if self.n_channels > 1 && !(self.spacing > self.channel_bandwidth) {
            return Err(Error::invalid(
                "spacing",
                format!(
                    "{} Hz must exceed the channel bandwidth {} Hz",
                    self.spacing, self.channel_bandwidth
                ),
            ));
        }
        if let Some(g) = &self.gains {
            if g.len() != self.n_channels || g.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::invalid("gains", "need one non-negative gain per channel"));
            }
        }
        for i in 0..self.n_channels {
            self.channel_comb(i).validate()?;
        }
        Ok(())
    }

    pub fn channel_center(&self, i: usize) -> f64 {
        self.base_comb.center_detuning + i as f64 * self.spacing
    }

    pub fn channel_comb(&self, i: usize) -> CombSpec {
        CombSpec {
            center_detuning: self.channel_center(i),
            bandwidth: self.channel_bandwidth,
            ..self.base_comb
        }
    }

    pub fn total_span(&self) -> f64 {
        (self.n_channels as f64 - 1.0) * self.spacing + self.channel_bandwidth
    }

    fn gain(&self, i: usize) -> f64 {
        self.gains.as_ref().map_or(1.0, |g| g[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterCavity {
    /// Power-transmission FWHM (Hz).
    pub fwhm: f64,
    pub resonance_detuning: f64,
    pub peak_transmission: f64,
}

impl Default for FilterCavity {
    fn default() -> Self {
        Self {
            fwhm: 7.5e6,
            resonance_detuning: 0.0,
            peak_transmission: 1.0,
        }
    }
}

impl FilterCavity {
    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm > 0.0 && self.fwhm.is_finite()) {
            return Err(Error::invalid("fwhm", "cavity linewidth must be positive"));
        }
        if !(self.peak_transmission > 0.0 && self.peak_transmission <= 1.0) {
            return Err(Error::invalid("peak_transmission", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Causal single-pole response `√T / (1 + i·2δ/fwhm)` for the `e^{+i2πft}` envelope
    /// convention.
    pub fn amplitude_response(&self, f: f64) -> Complex64 {
        let x = 2.0 * (f - self.resonance_detuning) / self.fwhm;
        Complex64::new(self.peak_transmission.sqrt(), 0.0) / Complex64::new(1.0, x)
    }

    pub fn power_transmission(&self, f: f64) -> f64 {
        let x = 2.0 * (f - self.resonance_detuning) / self.fwhm;
        self.peak_transmission / (1.0 + x * x)
    }
}

/// Frequency shift by a linear phase ramp `e^{i2π·shift·t}`.
pub fn serrodyne(env: &ComplexEnvelope, shift: f64) -> Result<ComplexEnvelope> {
    serrodyne_imperfect(env, shift, 0.0)
}

/// Serrodyne shift where a fraction `leakage` of the power stays unshifted.
pub fn serrodyne_imperfect(env: &ComplexEnvelope, shift: f64, leakage: f64) -> Result<ComplexEnvelope> {
    let grid = env.grid();
    if !(shift.abs() < grid.nyquist()) {
        return Err(Error::ShiftBeyondNyquist {
            shift_hz: shift,
            nyquist_hz: grid.nyquist(),
        });
    }
    if !(0.0..=1.0).contains(&leakage) {
        return Err(Error::invalid("leakage", "must lie in [0, 1]"));
    }
    let (a, b) = ((1.0 - leakage).sqrt(), leakage.sqrt());
    let samples = env
        .samples()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let ramp = Complex64::from_polar(1.0, 2.0 * PI * shift * grid.time(k));
            if leakage == 0.0 {
                s * ramp
            } else {
                s * (ramp * a + b)
            }
        })
        .collect();
    ComplexEnvelope::new(grid, samples, env.carrier_detuning() + shift)
}

pub fn cavity_filter(env: &ComplexEnvelope, cav: &FilterCavity) -> Result<ComplexEnvelope> {
    cav.validate()?;
    let spec = to_spectrum(env).filtered(|f| cav.amplitude_response(f));
    Ok(to_time(&spec, env.grid())?.with_carrier_detuning(env.carrier_detuning()))
}

/// `floor(storage / mode_duration) · n_channels`.
pub fn multimode_capacity(optical_storage_time: f64, mode_duration: f64, n_channels: usize) -> u64 {
    if !(optical_storage_time > 0.0 && mode_duration > 0.0) {
        return 0;
    }
    // Guard against 5e-6/1e-6 landing just below an integer.
    let slots = (optical_storage_time / mode_duration * (1.0 + 1e-12)).floor() as u64;
    slots * n_channels as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedforwardSettings {
    pub pulse_fwhm: f64,
    pub dt: f64,
    /// Start time of channel 0's pulse (s).
    pub lead: f64,
    pub serrodyne_leakage: f64,
    pub phase_mode: PhaseMode,
}

impl Default for FeedforwardSettings {
    fn default() -> Self {
        Self {
            pulse_fwhm: 1e-6,
            dt: 1e-9,
            lead: 5e-6,
            serrodyne_leakage: 0.0,
            phase_mode: PhaseMode::MinimalPhase,
        }
    }
}

/// Power fractions: row `i` is the run that selects channel `i`, column `j` the share of
/// channel `j`'s recalled energy that reaches the detector in its own time slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl CrosstalkMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone)]
pub struct FeedforwardRun {
    pub selected: usize,
    pub grid: TimeGrid,
    /// Detected intensity `|E|²` per grid sample.
    pub trace: Vec<f64>,
    pub slots: Vec<(f64, f64)>,
    pub crosstalk_row: Vec<f64>,
}

impl FeedforwardRun {
    pub fn time(&self, k: usize) -> f64 {
        self.grid.time(k)
    }
}

/// Memory output of a multiplexed store, shared by every feed-forward selection.
#[derive(Debug, Clone)]
pub struct FeedforwardSetup {
    plan: ChannelPlan,
    settings: FeedforwardSettings,
    slots: Vec<(f64, f64)>,
    recalled: ComplexEnvelope,
    slot_energy: Vec<f64>,
}

impl FeedforwardSetup {
    pub fn new(
        plan: &ChannelPlan,
        dec: &DecoherenceModel,
        temporal_offsets: &[f64],
        settings: &FeedforwardSettings,
    ) -> Result<Self> {
        plan.validate()?;
        dec.validate()?;
        let n = plan.n_channels;
        if temporal_offsets.len() != n {
            return Err(Error::invalid(
                "temporal_offsets",
                format!("{} offsets for {n} channels", temporal_offsets.len()),
            ));
        }
        let w = settings.pulse_fwhm;
        let tau = plan.base_comb.storage_time();
        let slots: Vec<(f64, f64)> = temporal_offsets
            .iter()
            .map(|o| (settings.lead + o - 2.0 * w, settings.lead + o + tau + 2.0 * w))
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (slots[i], slots[j]);
                if a.0 < b.1 && b.0 < a.1 {
                    return Err(Error::OverlappingSlots { first: i, second: j });
                }
            }
        }
        if slots.iter().any(|s| s.0 < settings.lead - 3.0 * w) || settings.lead < 3.0 * w {
            return Err(Error::invalid("temporal_offsets", "pulses must start after the grid origin"));
        }
        let end = slots.iter().map(|s| s.1).fold(0.0, f64::max);
        // 32 comb periods keep the bin-averaged teeth close to their continuum shape.
        let min_span = 32.0 / plan.base_comb.delta;
        let grid = TimeGrid::covering((end + 4.0 * w).max(min_span), settings.dt)?;
        let max_f = (0..n)
            .map(|i| plan.channel_center(i).abs() + plan.channel_bandwidth)
            .fold(0.0, f64::max);
        if max_f + plan.total_span() >= grid.nyquist() {
            return Err(Error::invalid("dt", "grid cannot resolve the channel plan and its shifts"));
        }

        let mut input = ComplexEnvelope::zeros(grid);
        for (i, o) in temporal_offsets.iter().enumerate() {
            let p = gaussian_pulse(grid, settings.lead + o, w, plan.channel_center(i), plan.gain(i).sqrt())?;
            input = input.added(&p)?;
        }
        let profiles = (0..n)
            .into_par_iter()
            .map(|i| build_profile_for_grid(&plan.channel_comb(i), grid))
            .collect::<Result<Vec<_>>>()?;
        let profile = OpticalDepthProfile::combined(&profiles, plan.base_comb.out_of_band_depth)?;
        let tf = transfer_function(&profile, settings.phase_mode).with_decay(grid.dt(), dec.combined_tm());
        let recalled = to_time(&tf.apply(&to_spectrum(&input))?, grid)?;
        let slot_energy = slots.iter().map(|s| recalled.energy_in_window(s.0, s.1)).collect();
        Ok(Self {
            plan: plan.clone(),
            settings: *settings,
            slots,
            recalled,
            slot_energy,
        })
    }

    pub fn recalled(&self) -> &ComplexEnvelope {
        &self.recalled
    }

    pub fn slots(&self) -> &[(f64, f64)] {
        &self.slots
    }

    /// Shifts the recalled field by `−selected·spacing` and filters it through `cav`.
    pub fn select(&self, selected: usize, cav: &FilterCavity) -> Result<FeedforwardRun> {
        if selected >= self.plan.n_channels {
            return Err(Error::invalid(
                "selected",
                format!("channel {selected} not in plan of {}", self.plan.n_channels),
            ));
        }
        let shift = -(selected as f64) * self.plan.spacing;
        let shifted = serrodyne_imperfect(&self.recalled, shift, self.settings.serrodyne_leakage)?;
        let filtered = cavity_filter(&shifted, cav)?;
        let crosstalk_row = self
            .slots
            .iter()
            .zip(&self.slot_energy)
            .map(|(s, e0)| {
                if *e0 > 0.0 {
                    filtered.energy_in_window(s.0, s.1) / e0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FeedforwardRun {
            selected,
            grid: filtered.grid(),
            trace: filtered.intensity(),
            slots: self.slots.clone(),
            crosstalk_row,
        })
    }

    pub fn crosstalk_matrix(&self, cav: &FilterCavity) -> Result<CrosstalkMatrix> {
        let rows = (0..self.plan.n_channels)
            .into_par_iter()
            .map(|i| self.select(i, cav).map(|r| r.crosstalk_row))
            .collect::<Result<Vec<_>>>()?;
        Ok(CrosstalkMatrix { rows })
    }
}

/// Stores one pulse per channel, recalls, shifts channel `selected` onto the cavity and
/// returns the detected trace with its crosstalk row.
pub fn simulate_feedforward_run(
    plan: &ChannelPlan,
    selected: usize,
    dec: &DecoherenceModel,
    cav: &FilterCavity,
    temporal_offsets: &[f64],
    settings: &FeedforwardSettings,
) -> Result<FeedforwardRun> {
    FeedforwardSetup::new(plan, dec, temporal_offsets, settings)?.select(selected, cav)
}
