//! Atomic frequency comb profiles and the absorber they form.
//!
//! A comb is a run of teeth spaced by `delta` with width `delta / finesse`, peak optical
//! depth `d_peak` and trough depth `d0`, windowed to an integer number of periods that
//! fits inside `bandwidth`. Light that passes the comb is filtered by
//! `t(f) = exp(-D(f)/2)`, where `Re D` is the optical depth and (in minimal-phase mode)
//! `Im D` is its Kramers–Kronig partner.
//!
//! The first-order echo follows from the Fourier series of the periodic depth. Writing
//! the tooth contrast `c = d_peak − d0`, the mean depth is `d0 + d̃` with `d̃ = c/F` for
//! square teeth, and the first harmonic has magnitude `d̃·sinc(π/F)`. For the causal
//! (minimal-phase) filter the coefficient of the delay `1/Δ` in `exp(-D/2)` is exactly
//! the first harmonic times `exp(-mean/2)`, which gives
//!
//! ```text
//! square:   η = (c/F)² · sinc²(π/F) · e^{-c/F} · e^{-d0}
//! gaussian: η = d̃² · e^{-π²/(2 ln2 F²)} · e^{-d̃} · e^{-d0},   d̃ = (c/F)·√(π/(4 ln2))
//! ```
//!
//! (`π²/(2 ln2) ≈ 7.12`, the usual "7/F²" dephasing term.) With `d0 = 0` the square
//! formula reduces to `(d/F)² sinc²(π/F) e^{-d/F}`.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::signals::{fft, Spectrum, TimeGrid};
use crate::{Complex64, Error, Result};

/// Minimum number of frequency bins across one tooth width `delta / finesse`.
pub const MIN_BINS_PER_TOOTH: usize = 8;

/// Reference wavelength of the storage transition (m).
pub const REFERENCE_WAVELENGTH: f64 = 795.325e-9;

/// Crystal length used for atom positions (m).
pub const CRYSTAL_LENGTH: f64 = 25e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ToothShape {
    #[default]
    Square,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// Real transmission `exp(-depth/2)`; acausal, echoes appear at ±1/Δ.
    Flat,
    /// Same magnitude with the causal (Hilbert-consistent) phase attached.
    #[default]
    MinimalPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CombSpec {
    /// Peak spacing Δ (Hz).
    pub delta: f64,
    /// F = Δ/δ.
    pub finesse: f64,
    /// Optical depth at the top of a tooth.
    pub d_peak: f64,
    /// Optical depth between teeth.
    pub d0: f64,
    /// Total comb extent (Hz).
    pub bandwidth: f64,
    pub center_detuning: f64,
    pub tooth_shape: ToothShape,
    /// Optical depth outside the comb window.
    pub out_of_band_depth: f64,
}

impl Default for CombSpec {
    fn default() -> Self {
        Self {
            delta: 200e3,
            finesse: 2.0,
            d_peak: 1.0,
            d0: 0.0,
            bandwidth: 1e6,
            center_detuning: 0.0,
            tooth_shape: ToothShape::Square,
            out_of_band_depth: 0.0,
        }
    }
}

impl CombSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.delta,
            self.finesse,
            self.d_peak,
            self.d0,
            self.bandwidth,
            self.center_detuning,
            self.out_of_band_depth,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("comb", "all comb parameters must be finite"));
        }
        if self.delta <= 0.0 {
            return Err(Error::invalid("delta", format!("{} must be positive", self.delta)));
        }
        if self.bandwidth < 2.0 * self.delta * (1.0 - 1e-9) {
            return Err(Error::invalid(
                "bandwidth",
                format!("{} must hold at least two teeth of spacing {}", self.bandwidth, self.delta),
            ));
        }
        if self.finesse < 1.0 {
            return Err(Error::invalid("finesse", format!("{} must be ≥ 1", self.finesse)));
        }
        if self.d0 < 0.0 || self.d_peak < self.d0 {
            return Err(Error::invalid(
                "d_peak",
                format!("need d_peak ≥ d0 ≥ 0, got d_peak={} d0={}", self.d_peak, self.d0),
            ));
        }
        if self.out_of_band_depth < 0.0 {
            return Err(Error::invalid("out_of_band_depth", "must be non-negative"));
        }
        Ok(())
    }

    /// Storage time 1/Δ.
    pub fn storage_time(&self) -> f64 {
        1.0 / self.delta
    }

    pub fn tooth_width(&self) -> f64 {
        self.delta / self.finesse
    }

    pub fn n_teeth(&self) -> usize {
        (self.bandwidth / self.delta + 1e-9).floor() as usize
    }

    /// Width of the comb window actually filled with teeth (`n_teeth · Δ`).
    pub fn extent(&self) -> f64 {
        self.n_teeth() as f64 * self.delta
    }

    pub fn band(&self) -> (f64, f64) {
        let half = 0.5 * self.extent();
        (self.center_detuning - half, self.center_detuning + half)
    }

    pub fn tooth_centers(&self) -> Vec<f64> {
        let first = self.first_tooth();
        (0..self.n_teeth())
            .map(|k| first + k as f64 * self.delta)
            .collect()
    }

    fn first_tooth(&self) -> f64 {
        self.center_detuning - 0.5 * (self.n_teeth() as f64 - 1.0) * self.delta
    }

    /// Mean in-band optical depth.
    pub fn mean_depth(&self) -> f64 {
        self.d0 + self.effective_contrast()
    }

    /// Tooth contrast averaged over one period (`d̃`).
    pub fn effective_contrast(&self) -> f64 {
        let c = (self.d_peak - self.d0) / self.finesse;
        match self.tooth_shape {
            ToothShape::Square => c,
            ToothShape::Gaussian => c * (PI / (4.0 * LN_2)).sqrt(),
        }
    }

    /// Intensity factor lost to dephasing of the tooth width (`|d₁|² / d̃²`).
    pub fn dephasing_factor(&self) -> f64 {
        let f = self.finesse;
        match self.tooth_shape {
            ToothShape::Square => sinc(PI / f).powi(2),
            ToothShape::Gaussian => (-PI * PI / (2.0 * LN_2 * f * f)).exp(),
        }
    }

    /// Continuous optical depth at detuning `f` (Hz).
    pub fn depth_at(&self, f: f64) -> f64 {
        let (lo, hi) = self.band();
        if f < lo || f > hi {
            return self.out_of_band_depth;
        }
        let u = self.offset_from_tooth(f);
        let contrast = self.d_peak - self.d0;
        match self.tooth_shape {
            ToothShape::Square => {
                if u.abs() <= 0.5 * self.tooth_width() {
                    self.d_peak
                } else {
                    self.d0
                }
            }
            ToothShape::Gaussian => self.d0 + contrast * self.periodized_gaussian(u),
        }
    }

    fn offset_from_tooth(&self, f: f64) -> f64 {
        let first = self.first_tooth();
        let x = (f - first) / self.delta;
        (x - x.round()) * self.delta
    }

    fn periodized_gaussian(&self, u: f64) -> f64 {
        let sigma = self.tooth_width() / (2.0 * (2.0 * LN_2).sqrt());
        (-4..=4)
            .map(|m| {
                let x = u - m as f64 * self.delta;
                (-x * x / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    }

    /// Depth averaged over `[f_lo, f_hi]`; exact for square teeth.
    fn bin_average(&self, f_lo: f64, f_hi: f64) -> f64 {
        let width = f_hi - f_lo;
        let (lo, hi) = self.band();
        let inside = overlap(f_lo, f_hi, lo, hi);
        let outside = width - inside;
        let in_band = match self.tooth_shape {
            ToothShape::Gaussian => {
                if inside > 0.0 {
                    let mid = 0.5 * (f_lo.max(lo) + f_hi.min(hi));
                    self.depth_at(mid) * inside
                } else {
                    0.0
                }
            }
            ToothShape::Square => {
                if inside > 0.0 {
                    let (a, b) = (f_lo.max(lo), f_hi.min(hi));
                    let half = 0.5 * self.tooth_width();
                    let first = self.first_tooth();
                    let k_lo = ((a - first) / self.delta).floor() as i64 - 1;
                    let k_hi = ((b - first) / self.delta).ceil() as i64 + 1;
                    let n = self.n_teeth() as i64;
                    let teeth: f64 = (k_lo.max(0)..=k_hi.min(n - 1))
                        .map(|k| {
                            let c = first + k as f64 * self.delta;
                            overlap(a, b, c - half, c + half)
                        })
                        .sum();
                    self.d0 * inside + (self.d_peak - self.d0) * teeth
                } else {
                    0.0
                }
            }
        };
        (in_band + self.out_of_band_depth * outside) / width
    }
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Optical depth per spectrum bin, on the centred frequency axis of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalDepthProfile {
    df: f64,
    depths: Vec<f64>,
}

impl OpticalDepthProfile {
    pub fn new(df: f64, depths: Vec<f64>) -> Result<Self> {
        if !(df > 0.0) {
            return Err(Error::invalid("df", "must be positive"));
        }
        if depths.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::invalid("depths", "optical depth must be finite and ≥ 0"));
        }
        Ok(Self { df, depths })
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn depths(&self) -> &[f64] {
        &self.depths
    }

    pub fn n_bins(&self) -> usize {
        self.depths.len()
    }

    pub fn frequency(&self, j: usize) -> f64 {
        (j as f64 - (self.depths.len() / 2) as f64) * self.df
    }

    /// Sum of profiles that share an axis. Each profile's out-of-band depth
    /// `background` is counted once.
    pub fn combined(profiles: &[OpticalDepthProfile], background: f64) -> Result<Self> {
        let first = profiles
            .first()
            .ok_or_else(|| Error::InsufficientData("no profiles to combine".into()))?;
        let mut depths = vec![background; first.depths.len()];
        for p in profiles {
            if p.depths.len() != first.depths.len() || p.df != first.df {
                return Err(Error::GridMismatch("profiles on different axes".into()));
            }
            for (acc, d) in depths.iter_mut().zip(&p.depths) {
                *acc += (d - background).max(0.0);
            }
        }
        Self::new(first.df, depths)
    }

    /// Writes `freq_Hz,optical_depth` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["freq_Hz", "optical_depth"])?;
        for (j, d) in self.depths.iter().enumerate() {
            out.write_record(&[self.frequency(j).to_string(), d.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn build_profile(spec: &CombSpec, df: f64, n_bins: usize) -> Result<OpticalDepthProfile> {
    spec.validate()?;
    if !(df > 0.0) || n_bins == 0 {
        return Err(Error::invalid("df", "need positive bin width and at least one bin"));
    }
    let bins_per_tooth = spec.tooth_width() / df;
    if bins_per_tooth < MIN_BINS_PER_TOOTH as f64 {
        return Err(Error::UnderResolvedTooth {
            bins_per_tooth,
            required: MIN_BINS_PER_TOOTH,
        });
    }
    let half = (n_bins / 2) as f64;
    let depths = (0..n_bins)
        .map(|j| {
            let f = (j as f64 - half) * df;
            spec.bin_average(f - 0.5 * df, f + 0.5 * df)
        })
        .collect();
    OpticalDepthProfile::new(df, depths)
}

/// Profile aligned to the spectrum axis of `grid`.
pub fn build_profile_for_grid(spec: &CombSpec, grid: TimeGrid) -> Result<OpticalDepthProfile> {
    build_profile(spec, grid.df(), grid.n_samples())
}

/// Complex amplitude transmission per spectrum bin.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    df: f64,
    t: Vec<Complex64>,
}

impl TransferFunction {
    pub fn new(df: f64, t: Vec<Complex64>) -> Self {
        Self { df, t }
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn values(&self) -> &[Complex64] {
        &self.t
    }

    pub fn apply(&self, spectrum: &Spectrum) -> Result<Spectrum> {
        if spectrum.bins().len() != self.t.len() || (spectrum.df() - self.df).abs() > 1e-9 * self.df
        {
            return Err(Error::GridMismatch(
                "transfer function and spectrum have different axes".into(),
            ));
        }
        let bins = spectrum.bins().iter().zip(&self.t).map(|(a, t)| a * t).collect();
        Spectrum::new(spectrum.grid(), bins)
    }

    /// Multiplies the impulse response by `exp(-|t|/(2·t_m))`: every echo amplitude at
    /// delay `t` is scaled by the square root of the intensity decay `exp(-t/t_m)`.
    pub fn with_decay(&self, dt: f64, t_m: f64) -> Self {
        if !t_m.is_finite() {
            return self.clone();
        }
        let n = self.t.len();
        let half = n / 2;
        let mut h: Vec<Complex64> = (0..n).map(|m| self.t[(m + half) % n]).collect();
        fft(&mut h, true);
        for (k, v) in h.iter_mut().enumerate() {
            let steps = if k < half { k as f64 } else { (n - k) as f64 };
            *v *= (-steps * dt / (2.0 * t_m)).exp() / n as f64;
        }
        fft(&mut h, false);
        let t = (0..n).map(|j| h[(j + half) % n]).collect();
        Self { df: self.df, t }
    }
}

pub fn transfer_function(profile: &OpticalDepthProfile, mode: PhaseMode) -> TransferFunction {
    let depths = profile.depths();
    let t = match mode {
        PhaseMode::Flat => depths
            .iter()
            .map(|d| Complex64::new((-0.5 * d).exp(), 0.0))
            .collect(),
        PhaseMode::MinimalPhase => minimal_phase(depths),
    };
    TransferFunction::new(profile.df(), t)
}

/// Causal transmission with `|t| = exp(-depth/2)` via the folded real cepstrum.
fn minimal_phase(depths: &[f64]) -> Vec<Complex64> {
    let n = depths.len();
    let half = n / 2;
    let mut c: Vec<Complex64> = (0..n)
        .map(|m| Complex64::new(-0.5 * depths[(m + half) % n], 0.0))
        .collect();
    fft(&mut c, true);
    for v in c.iter_mut() {
        *v /= n as f64;
    }
    for (k, v) in c.iter_mut().enumerate() {
        if k == 0 || k == half {
            continue;
        }
        if k < half {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft(&mut c, false);
    (0..n).map(|j| c[(j + half) % n].exp()).collect()
}

/// Closed-form first-echo efficiency of a comb (see module docs).
pub fn analytic_efficiency(spec: &CombSpec) -> Result<f64> {
    spec.validate()?;
    let dt = spec.effective_contrast();
    Ok(dt * dt * spec.dephasing_factor() * (-dt - spec.d0).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomEnsembleSample {
    /// Transition detuning of each atom (Hz).
    pub detunings: Vec<f64>,
    /// Excitation amplitudes, `Σ|c|² = 1`.
    pub weights: Vec<f64>,
    /// Position along the crystal (m).
    pub positions: Vec<f64>,
}

impl AtomEnsembleSample {
    pub fn n_atoms(&self) -> usize {
        self.detunings.len()
    }

    /// Wavevector of the reference transition (rad/m).
    pub fn wavevector() -> f64 {
        2.0 * PI / REFERENCE_WAVELENGTH
    }

    /// Collective free-induction amplitude `Σ c_j e^{i2πδ_j t}`.
    pub fn free_induction(&self, t: f64) -> Complex64 {
        self.detunings
            .iter()
            .zip(&self.weights)
            .map(|(d, c)| Complex64::from_polar(*c, 2.0 * PI * d * t))
            .sum()
    }

    /// Same sum including the spatial phase `e^{-ikz_j}` of the stored state.
    pub fn collective_amplitude(&self, t: f64) -> Complex64 {
        let k = Self::wavevector();
        self.detunings
            .iter()
            .zip(&self.weights)
            .zip(&self.positions)
            .map(|((d, c), z)| Complex64::from_polar(*c, 2.0 * PI * d * t - k * z))
            .sum()
    }
}

/// Draws `n_atoms` transition frequencies with density proportional to the profile.
pub fn sample_atoms(
    profile: &OpticalDepthProfile,
    n_atoms: usize,
    seed: u64,
) -> Result<AtomEnsembleSample> {
    if n_atoms < 100 {
        return Err(Error::invalid("n_atoms", format!("{n_atoms} < 100")));
    }
    let mut cumulative = Vec::with_capacity(profile.n_bins());
    let mut total = 0.0;
    for d in profile.depths() {
        total += d;
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::invalid("profile", "no absorption to sample atoms from"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let df = profile.df();
    let mut detunings = Vec::with_capacity(n_atoms);
    let mut positions = Vec::with_capacity(n_atoms);
    for _ in 0..n_atoms {
        let u = rng.random::<f64>() * total;
        let j = cumulative.partition_point(|c| *c <= u).min(profile.n_bins() - 1);
        let within: f64 = rng.random::<f64>() - 0.5;
        detunings.push(profile.frequency(j) + within * df);
        positions.push(rng.random::<f64>() * CRYSTAL_LENGTH);
    }
    let w = 1.0 / (n_atoms as f64).sqrt();
    Ok(AtomEnsembleSample {
        detunings,
        weights: vec![w; n_atoms],
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(delta: f64, bw: f64) -> CombSpec {
        CombSpec {
            delta,
            bandwidth: bw,
            ..CombSpec::default()
        }
    }

    fn count_teeth(p: &OpticalDepthProfile) -> usize {
        let d = p.depths();
        (1..d.len()).filter(|&j| d[j] > 0.5 && d[j - 1] <= 0.5).count()
    }

    #[test]
    fn fig3c_comb_has_five_teeth() {
        let s = spec(200e3, 1e6);
        let p = build_profile(&s, 1e3, 4096).unwrap();
        assert_eq!(count_teeth(&p), 5);
        let full = p.depths().iter().filter(|d| (**d - 1.0).abs() < 1e-12).count();
        assert_eq!(full, 5 * 100 - 5, "100 kHz teeth at 1 kHz bins (edge bins split)");
        assert!(p.depths().iter().all(|d| *d <= 1.0 + 1e-12));
    }

    #[test]
    fn long_storage_comb_has_twenty_teeth() {
        let s = spec(10e3, 0.2e6);
        assert_eq!(s.n_teeth(), 20);
        let p = build_profile(&s, 100.0, 8192).unwrap();
        assert_eq!(count_teeth(&p), 20);
    }

    #[test]
    fn degenerate_comb_is_flat() {
        let s = CombSpec {
            d_peak: 0.7,
            d0: 0.7,
            ..spec(200e3, 1e6)
        };
        let p = build_profile(&s, 1e3, 4096).unwrap();
        let (lo, hi) = s.band();
        for (j, d) in p.depths().iter().enumerate() {
            let f = p.frequency(j);
            if f > lo + 1e3 && f < hi - 1e3 {
                assert!((d - 0.7).abs() < 1e-12);
            }
        }
        assert_eq!(analytic_efficiency(&s).unwrap(), 0.0);
    }

    #[test]
    fn under_resolved_tooth_is_rejected() {
        let s = spec(200e3, 1e6);
        let err = build_profile(&s, 20e3, 1024).unwrap_err();
        assert!(matches!(err, Error::UnderResolvedTooth { .. }));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(CombSpec { delta: 0.0, ..CombSpec::default() }.validate().is_err());
        assert!(CombSpec { finesse: 0.5, ..CombSpec::default() }.validate().is_err());
        assert!(CombSpec { d0: 2.0, ..CombSpec::default() }.validate().is_err());
        assert!(CombSpec { bandwidth: 300e3, ..CombSpec::default() }.validate().is_err());
    }

    #[test]
    fn transparent_and_uniform_transfer() {
        let zero = OpticalDepthProfile::new(1.0, vec![0.0; 64]).unwrap();
        for mode in [PhaseMode::Flat, PhaseMode::MinimalPhase] {
            let t = transfer_function(&zero, mode);
            assert!(t.values().iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        }
        let one = OpticalDepthProfile::new(1.0, vec![1.0; 64]).unwrap();
        for mode in [PhaseMode::Flat, PhaseMode::MinimalPhase] {
            let t = transfer_function(&one, mode);
            assert!(t.values().iter().all(|v| (v.norm() - (-0.5f64).exp()).abs() < 1e-12));
        }
    }

    #[test]
    fn comb_transfer_alternates() {
        let s = spec(200e3, 1e6);
        let p = build_profile(&s, 1e3, 4096).unwrap();
        let t = transfer_function(&p, PhaseMode::Flat);
        let lo = (-0.5f64).exp();
        for (v, d) in t.values().iter().zip(p.depths()) {
            assert!(v.im == 0.0 && v.re <= 1.0);
            if *d == 1.0 {
                assert!((v.re - lo).abs() < 1e-12);
            }
            if *d == 0.0 {
                assert!((v.re - 1.0).abs() < 1e-12);
            }
        }
        let tm = transfer_function(&p, PhaseMode::MinimalPhase);
        for (a, b) in tm.values().iter().zip(t.values()) {
            assert!((a.norm() - b.re).abs() < 1e-9);
            assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn analytic_values() {
        let s = spec(200e3, 1e6);
        let expected = 0.25 * (2.0 / PI).powi(2) * (-0.5f64).exp();
        assert!((analytic_efficiency(&s).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.0614).abs() < 1e-4);
        let none = CombSpec { d_peak: 0.0, ..s };
        assert_eq!(analytic_efficiency(&none).unwrap(), 0.0);
    }

    #[test]
    fn efficiency_drops_with_background() {
        for tooth_shape in [ToothShape::Square, ToothShape::Gaussian] {
            let mut prev = f64::INFINITY;
            for d0 in [0.0, 0.05, 0.1, 0.2, 0.4, 0.8] {
                let s = CombSpec { d_peak: 1.0, d0, tooth_shape, ..CombSpec::default() };
                let eta = analytic_efficiency(&s).unwrap();
                assert!(eta < prev);
                prev = eta;
            }
        }
    }

    #[test]
    fn bin_average_conserves_mean_depth() {
        // Tooth widths that are not a whole number of bins.
        let s = CombSpec {
            finesse: 3.0,
            d_peak: 2.0,
            d0: 0.2,
            ..spec(200e3, 2e6)
        };
        let df = 3.7e3;
        let p = build_profile(&s, df, 2048).unwrap();
        let (lo, hi) = s.band();
        let integral: f64 = p.depths().iter().sum::<f64>() * df;
        let expected = s.mean_depth() * (hi - lo);
        assert!((integral - expected).abs() / expected < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = build_profile(&spec(200e3, 1e6), 1e3, 4096).unwrap();
        let a = sample_atoms(&p, 1000, 9).unwrap();
        let b = sample_atoms(&p, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_atoms(&p, 1000, 10).unwrap());
        let norm: f64 = a.weights.iter().map(|c| c * c).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(a.positions.iter().all(|z| (0.0..=CRYSTAL_LENGTH).contains(z)));
        assert!(sample_atoms(&p, 99, 0).is_err());
    }

    #[test]
    fn atoms_avoid_empty_troughs() {
        let p = build_profile(&spec(200e3, 1e6), 1e3, 4096).unwrap();
        let atoms = sample_atoms(&p, 20_000, 1).unwrap();
        let s = spec(200e3, 1e6);
        let in_teeth = atoms
            .detunings
            .iter()
            .filter(|f| s.depth_at(**f) > 0.5)
            .count();
        assert!(in_teeth as f64 / atoms.n_atoms() as f64 > 0.99);
        let occupied = p.depths().iter().filter(|d| **d > 0.0).count() as f64;
        let in_band = (s.extent() / p.df()) as f64;
        assert!((occupied / in_band - 0.5).abs() < 0.01);
    }

    #[test]
    fn free_induction_starts_at_sqrt_n() {
        let p = build_profile(&spec(200e3, 1e6), 1e3, 4096).unwrap();
        let atoms = sample_atoms(&p, 400, 2).unwrap();
        assert!((atoms.free_induction(0.0).norm() - 20.0).abs() < 1e-9);
        // The spatial phase only changes the t = 0 amplitude, never its bound.
        assert!(atoms.collective_amplitude(0.0).norm() <= 20.0 + 1e-9);
    }
}
