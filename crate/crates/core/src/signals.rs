//! Uniformly sampled complex pulse envelopes and their spectra.
//!
//! Time samples sit at `t_k = k·dt` for `k = 0..n`. Spectra use the continuous-transform
//! normalisation `A(f) = Σ a_k e^{-i2πf t_k} dt`, stored with the DC bin at index `n/2`,
//! so bin `j` is at frequency `(j − n/2)·df` with `df = 1/(n·dt)`. A positive detuning is
//! a higher optical frequency and appears in the envelope as the phase ramp `e^{+i2πft}`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    n_samples: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(n_samples: usize, dt: f64) -> Result<Self> {
        if n_samples < 2 || !n_samples.is_power_of_two() {
            return Err(Error::invalid(
                "n_samples",
                format!("{n_samples} is not a power of two ≥ 2"),
            ));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("{dt} must be positive and finite")));
        }
        Ok(Self { n_samples, dt })
    }

    /// Smallest power-of-two grid with sample period `dt` whose span is at least `min_span`.
    pub fn covering(min_span: f64, dt: f64) -> Result<Self> {
        if !(min_span > 0.0 && min_span.is_finite()) {
            return Err(Error::invalid("min_span", format!("{min_span} must be positive")));
        }
        let needed = (min_span / dt).ceil().max(2.0) as usize;
        Self::new(needed.next_power_of_two(), dt)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn span(&self) -> f64 {
        self.n_samples as f64 * self.dt
    }

    pub fn df(&self) -> f64 {
        1.0 / self.span()
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Frequency of centred spectrum bin `j`.
    pub fn frequency(&self, j: usize) -> f64 {
        (j as f64 - (self.n_samples / 2) as f64) * self.df()
    }

    /// Nearest centred spectrum bin for frequency `f` (clamped to the axis).
    pub fn bin_of(&self, f: f64) -> usize {
        let j = (f / self.df()).round() + (self.n_samples / 2) as f64;
        j.clamp(0.0, (self.n_samples - 1) as f64) as usize
    }

    pub fn sample_of(&self, t: f64) -> usize {
        (t / self.dt).round().clamp(0.0, (self.n_samples - 1) as f64) as usize
    }

    fn last_time(&self) -> f64 {
        self.time(self.n_samples - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    carrier_detuning: f64,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>, carrier_detuning: f64) -> Result<Self> {
        if samples.len() != grid.n_samples() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.n_samples()
            )));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::invalid("samples", "non-finite amplitude"));
        }
        Ok(Self {
            grid,
            samples,
            carrier_detuning,
        })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.n_samples()],
            carrier_detuning: 0.0,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn carrier_detuning(&self) -> f64 {
        self.carrier_detuning
    }

    pub fn with_carrier_detuning(mut self, carrier_detuning: f64) -> Self {
        self.carrier_detuning = carrier_detuning;
        self
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `Σ|a|²·dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.dt()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    pub fn peak_index(&self) -> usize {
        argmax(self.samples.iter().map(|s| s.norm_sqr()))
    }

    /// Energy-weighted mean time of the whole envelope.
    pub fn centroid(&self) -> f64 {
        self.centroid_in_window(0.0, self.grid.span())
    }

    /// Energy inside `[t0, t1]` (sample times, inclusive).
    pub fn energy_in_window(&self, t0: f64, t1: f64) -> f64 {
        self.window_indices(t0, t1)
            .map(|k| self.samples[k].norm_sqr())
            .sum::<f64>()
            * self.grid.dt()
    }

    /// Energy-weighted mean time inside `[t0, t1]`; NaN when the window holds no energy.
    pub fn centroid_in_window(&self, t0: f64, t1: f64) -> f64 {
        let (mut w, mut wt) = (0.0, 0.0);
        for k in self.window_indices(t0, t1) {
            let p = self.samples[k].norm_sqr();
            w += p;
            wt += p * self.grid.time(k);
        }
        wt / w
    }

    fn window_indices(&self, t0: f64, t1: f64) -> std::ops::Range<usize> {
        let dt = self.grid.dt();
        let lo = (t0 / dt).ceil().max(0.0) as usize;
        let hi = ((t1 / dt).floor() + 1.0).clamp(0.0, self.grid.n_samples() as f64) as usize;
        lo.min(hi)..hi
    }

    /// Intensity full width at half maximum, linearly interpolated between samples.
    pub fn intensity_fwhm(&self) -> f64 {
        fwhm_of(&self.intensity()) * self.grid.dt()
    }

    /// Circular shift by `k` samples (positive = later).
    pub fn shifted(&self, k: isize) -> Self {
        let n = self.samples.len() as isize;
        let mut out = vec![Complex64::new(0.0, 0.0); n as usize];
        for (i, s) in self.samples.iter().enumerate() {
            out[(i as isize + k).rem_euclid(n) as usize] = *s;
        }
        Self {
            samples: out,
            ..self.clone()
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * alpha).collect(),
            ..self.clone()
        }
    }

    /// Sample-wise sum; the carrier label of `self` is kept.
    pub fn added(&self, other: &ComplexEnvelope) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("cannot add envelopes on different grids".into()));
        }
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: TimeGrid,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: TimeGrid, bins: Vec<Complex64>) -> Result<Self> {
        if bins.len() != grid.n_samples() {
            return Err(Error::GridMismatch(format!(
                "{} bins for a grid of {}",
                bins.len(),
                grid.n_samples()
            )));
        }
        Ok(Self { grid, bins })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn df(&self) -> f64 {
        self.grid.df()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn frequency(&self, j: usize) -> f64 {
        self.grid.frequency(j)
    }

    /// `Σ|A|²·df`; equals the time-domain energy (Parseval).
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum::<f64>() * self.df()
    }

    /// Energy in bins whose centre frequency lies in `[f_lo, f_hi]`.
    pub fn energy_in_band(&self, f_lo: f64, f_hi: f64) -> f64 {
        self.bins
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let f = self.frequency(*j);
                f >= f_lo && f <= f_hi
            })
            .map(|(_, b)| b.norm_sqr())
            .sum::<f64>()
            * self.df()
    }

    pub fn peak_frequency(&self) -> f64 {
        self.frequency(argmax(self.bins.iter().map(|b| b.norm_sqr())))
    }

    pub fn intensity_fwhm(&self) -> f64 {
        let p: Vec<f64> = self.bins.iter().map(|b| b.norm_sqr()).collect();
        fwhm_of(&p) * self.df()
    }

    /// Multiplies every bin by `h(f)`.
    pub fn filtered(&self, h: impl Fn(f64) -> Complex64) -> Self {
        let bins = self
            .bins
            .iter()
            .enumerate()
            .map(|(j, b)| b * h(self.frequency(j)))
            .collect();
        Self {
            grid: self.grid,
            bins,
        }
    }
}

/// Gaussian pulse with intensity FWHM `fwhm`, centred at `center`, carrier at `detuning`.
pub fn gaussian_pulse(
    grid: TimeGrid,
    center: f64,
    fwhm: f64,
    detuning: f64,
    amplitude: f64,
) -> Result<ComplexEnvelope> {
    if !(fwhm > 0.0 && fwhm.is_finite()) {
        return Err(Error::invalid("fwhm", format!("{fwhm} must be positive")));
    }
    let (lo, hi) = (center - 3.0 * fwhm, center + 3.0 * fwhm);
    if lo < 0.0 || hi > grid.last_time() {
        return Err(Error::PulseOutsideGrid(format!(
            "pulse support [{lo:e}, {hi:e}] s exceeds grid [0, {:e}] s",
            grid.last_time()
        )));
    }
    // Field amplitude exp(-2 ln2 x²/w²) gives intensity exp(-4 ln2 x²/w²), FWHM = w.
    let k = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
    let samples = (0..grid.n_samples())
        .map(|i| {
            let t = grid.time(i);
            let env = amplitude * (-k * (t - center).powi(2)).exp();
            Complex64::from_polar(env, 2.0 * PI * detuning * t)
        })
        .collect();
    ComplexEnvelope::new(grid, samples, detuning)
}

/// Flat-top pulse of the given `duration`, centred at `center`.
pub fn square_pulse(
    grid: TimeGrid,
    center: f64,
    duration: f64,
    detuning: f64,
    amplitude: f64,
) -> Result<ComplexEnvelope> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::invalid("duration", format!("{duration} must be positive")));
    }
    let (lo, hi) = (center - duration, center + duration);
    if lo < 0.0 || hi > grid.last_time() {
        return Err(Error::PulseOutsideGrid(format!(
            "pulse support [{lo:e}, {hi:e}] s exceeds grid [0, {:e}] s",
            grid.last_time()
        )));
    }
    let samples = (0..grid.n_samples())
        .map(|i| {
            let t = grid.time(i);
            let env = if (t - center).abs() <= 0.5 * duration {
                amplitude
            } else {
                0.0
            };
            Complex64::from_polar(env, 2.0 * PI * detuning * t)
        })
        .collect();
    ComplexEnvelope::new(grid, samples, detuning)
}

pub fn to_spectrum(env: &ComplexEnvelope) -> Spectrum {
    let grid = env.grid();
    let mut buf = env.samples().to_vec();
    fft(&mut buf, false);
    let dt = grid.dt();
    let half = grid.n_samples() / 2;
    let n = grid.n_samples();
    let bins = (0..n).map(|j| buf[(j + half) % n] * dt).collect();
    Spectrum { grid, bins }
}

pub fn to_time(spec: &Spectrum, grid: TimeGrid) -> Result<ComplexEnvelope> {
    if spec.grid() != grid {
        return Err(Error::GridMismatch(format!(
            "spectrum built on {:?}, requested {:?}",
            spec.grid(),
            grid
        )));
    }
    let n = grid.n_samples();
    let half = n / 2;
    let mut buf: Vec<Complex64> = (0..n).map(|m| spec.bins[(m + half) % n]).collect();
    fft(&mut buf, true);
    let df = grid.df();
    for s in &mut buf {
        *s *= df;
    }
    ComplexEnvelope::new(grid, buf, 0.0)
}

/// In-place FFT in natural (unshifted) order; the inverse is unnormalised.
pub(crate) fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// FWHM of a sampled profile in units of samples.
fn fwhm_of(p: &[f64]) -> f64 {
    let peak = argmax(p.iter().copied());
    let half = p[peak] / 2.0;
    if half <= 0.0 {
        return 0.0;
    }
    let mut left = peak as f64;
    for i in (0..peak).rev() {
        if p[i] < half {
            left = i as f64 + (half - p[i]) / (p[i + 1] - p[i]);
            break;
        }
        left = i as f64;
    }
    let mut right = peak as f64;
    for i in peak + 1..p.len() {
        if p[i] < half {
            right = (i - 1) as f64 + (p[i - 1] - half) / (p[i - 1] - p[i]);
            break;
        }
        right = i as f64;
    }
    right - left
}

/// Writes `time_s,re,im` rows.
pub fn write_envelope_csv<W: Write>(env: &ComplexEnvelope, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "re", "im"])?;
    for (k, s) in env.samples().iter().enumerate() {
        out.write_record(&[
            env.grid().time(k).to_string(),
            s.re.to_string(),
            s.im.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `time_s,re,im` rows; the grid spacing is taken from the first two rows.
pub fn read_envelope_csv<R: Read>(r: R) -> Result<ComplexEnvelope> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad CSV field {i} in {rec:?}")))
        };
        times.push(field(0)?);
        samples.push(Complex64::new(field(1)?, field(2)?));
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData("envelope CSV needs at least two rows".into()));
    }
    let grid = TimeGrid::new(times.len(), times[1] - times[0])?;
    ComplexEnvelope::new(grid, samples, 0.0)
}

/// Writes `freq_Hz,re,im` rows.
pub fn write_spectrum_csv<W: Write>(spec: &Spectrum, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["freq_Hz", "re", "im"])?;
    for (j, b) in spec.bins().iter().enumerate() {
        out.write_record(&[spec.frequency(j).to_string(), b.re.to_string(), b.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

const BINARY_MAGIC: &[u8; 8] = b"AFCENV1\0";

/// Little-endian dump: 8-byte magic `AFCENV1\0`, `u64` sample count, `f64` dt,
/// `f64` carrier detuning, then `(f64 re, f64 im)` per sample.
pub fn write_envelope_binary<W: Write>(env: &ComplexEnvelope, mut w: W) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(env.grid().n_samples() as u64).to_le_bytes())?;
    w.write_all(&env.grid().dt().to_le_bytes())?;
    w.write_all(&env.carrier_detuning().to_le_bytes())?;
    for s in env.samples() {
        w.write_all(&s.re.to_le_bytes())?;
        w.write_all(&s.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_envelope_binary<R: Read>(mut r: R) -> Result<ComplexEnvelope> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Config("not an envelope dump (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let n = u64::from_le_bytes(next(&mut r)?) as usize;
    let dt = f64::from_le_bytes(next(&mut r)?);
    let carrier = f64::from_le_bytes(next(&mut r)?);
    let grid = TimeGrid::new(n, dt)?;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        samples.push(Complex64::new(re, im));
    }
    ComplexEnvelope::new(grid, samples, carrier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_1ns() -> TimeGrid {
        TimeGrid::new(1 << 16, 1e-9).unwrap()
    }

    fn random_envelope(grid: TimeGrid, seed: u64) -> ComplexEnvelope {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (0..grid.n_samples())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexEnvelope::new(grid, s, 0.0).unwrap()
    }

    #[test]
    fn grid_rejects_non_power_of_two() {
        assert!(TimeGrid::new(1000, 1e-9).is_err());
        assert!(TimeGrid::new(1024, 0.0).is_err());
        assert!(TimeGrid::new(1024, 1e-9).is_ok());
    }

    #[test]
    fn covering_grid_spans_request() {
        let g = TimeGrid::covering(100e-6, 10e-9).unwrap();
        assert_eq!(g.n_samples(), 16384);
        assert!(g.span() >= 100e-6);
    }

    #[test]
    fn gaussian_pulse_peaks_at_center() {
        let env = gaussian_pulse(grid_1ns(), 5e-6, 1e-6, 0.0, 1.0).unwrap();
        assert_eq!(env.peak_index(), 5000);
        assert!(env.energy() > 0.0);
        assert!((env.intensity_fwhm() - 1e-6).abs() <= 1e-9);
    }

    #[test]
    fn zero_amplitude_pulse_has_zero_energy() {
        let env = gaussian_pulse(grid_1ns(), 5e-6, 1e-6, 0.0, 0.0).unwrap();
        assert_eq!(env.energy(), 0.0);
        assert!(env.samples().iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn pulse_outside_grid_is_rejected() {
        let err = gaussian_pulse(grid_1ns(), 1e-6, 1e-6, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::PulseOutsideGrid(_)));
        assert!(gaussian_pulse(grid_1ns(), 64e-6, 1e-6, 0.0, 1.0).is_err());
        assert!(square_pulse(grid_1ns(), 0.2e-6, 1e-6, 0.0, 1.0).is_err());
    }

    #[test]
    fn detuning_shifts_spectrum_not_magnitude() {
        let g = grid_1ns();
        let a = gaussian_pulse(g, 20e-6, 1e-6, 0.0, 1.0).unwrap();
        let b = gaussian_pulse(g, 20e-6, 1e-6, 10e6, 1.0).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x.norm() - y.norm()).abs() < 1e-12);
        }
        let (fa, fb) = (to_spectrum(&a).peak_frequency(), to_spectrum(&b).peak_frequency());
        assert!(fa.abs() < g.df());
        assert!((fb - fa - 10e6).abs() <= g.df());
    }

    #[test]
    fn delta_pulse_has_flat_spectrum() {
        let g = TimeGrid::new(1024, 1e-9).unwrap();
        let mut s = vec![Complex64::new(0.0, 0.0); 1024];
        s[0] = Complex64::new(1.0, 0.0);
        let spec = to_spectrum(&ComplexEnvelope::new(g, s, 0.0).unwrap());
        let m0 = spec.bins()[0].norm();
        assert!(spec.bins().iter().all(|b| (b.norm() - m0).abs() < 1e-15));
    }

    #[test]
    fn gaussian_time_bandwidth_product() {
        // Independent check: closed-form Gaussian FWHM product 2 ln2 / π ≈ 0.441.
        let g = TimeGrid::new(1 << 16, 1e-9).unwrap();
        let env = gaussian_pulse(g, 30e-6, 1e-6, 0.0, 1.0).unwrap();
        let width = to_spectrum(&env).intensity_fwhm();
        let expected = 2.0 * std::f64::consts::LN_2 / PI / 1e-6;
        assert!((width - expected).abs() < 2.0 * g.df(), "{width} vs {expected}");
    }

    #[test]
    fn round_trip_random_envelope() {
        let g = TimeGrid::new(4096, 2e-9).unwrap();
        let env = random_envelope(g, 7);
        let back = to_time(&to_spectrum(&env), g).unwrap();
        let max = env.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
        for (a, b) in env.samples().iter().zip(back.samples()) {
            assert!((a - b).norm() < 1e-9 * max);
        }
    }

    #[test]
    fn to_time_rejects_grid_mismatch() {
        let g = TimeGrid::new(1024, 1e-9).unwrap();
        let spec = to_spectrum(&ComplexEnvelope::zeros(g));
        let other = TimeGrid::new(1024, 2e-9).unwrap();
        assert!(matches!(to_time(&spec, other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn windowed_energy_and_centroid() {
        let g = grid_1ns();
        let env = gaussian_pulse(g, 10e-6, 1e-6, 0.0, 1.0).unwrap();
        let e = env.energy_in_window(6e-6, 14e-6);
        assert!((e / env.energy() - 1.0).abs() < 1e-9);
        assert!((env.centroid_in_window(6e-6, 14e-6) - 10e-6).abs() < 1e-12);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let g = TimeGrid::new(256, 1e-9).unwrap();
        let env = random_envelope(g, 3).with_carrier_detuning(5e6);
        let mut buf = Vec::new();
        write_envelope_binary(&env, &mut buf).unwrap();
        assert_eq!(read_envelope_binary(buf.as_slice()).unwrap(), env);

        let mut text = Vec::new();
        write_envelope_csv(&env, &mut text).unwrap();
        let back = read_envelope_csv(text.as_slice()).unwrap();
        assert_eq!(back.samples(), env.samples());
        assert!((back.grid().dt() - 1e-9).abs() < 1e-24);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn parseval_holds(seed in any::<u64>(), log_n in 4u32..12) {
            let g = TimeGrid::new(1 << log_n, 1e-9).unwrap();
            let env = random_envelope(g, seed);
            let et = env.energy();
            let ef = to_spectrum(&env).energy();
            prop_assert!(((et - ef) / et).abs() < 1e-9);
        }

        #[test]
        fn transform_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let g = TimeGrid::new(512, 1e-9).unwrap();
            let x = random_envelope(g, seed);
            let y = random_envelope(g, seed.wrapping_add(1));
            let combo = x.scaled(Complex64::new(a, 0.0))
                .added(&y.scaled(Complex64::new(b, 0.0))).unwrap();
            let lhs = to_spectrum(&combo);
            let (sx, sy) = (to_spectrum(&x), to_spectrum(&y));
            for j in 0..512 {
                let rhs = sx.bins()[j] * a + sy.bins()[j] * b;
                prop_assert!((lhs.bins()[j] - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn time_shift_is_linear_phase(seed in any::<u64>(), k in -200isize..200) {
            let g = TimeGrid::new(512, 1e-9).unwrap();
            let x = random_envelope(g, seed);
            let sx = to_spectrum(&x);
            let ss = to_spectrum(&x.shifted(k));
            for j in 0..512 {
                let f = g.frequency(j);
                let ramp = Complex64::from_polar(1.0, -2.0 * PI * f * k as f64 * g.dt());
                prop_assert!((ss.bins()[j] - sx.bins()[j] * ramp).norm() < 1e-9 * (1.0 + sx.bins()[j].norm()));
            }
        }
    }
}
