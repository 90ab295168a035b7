//! Heralded photon-pair statistics and the cross-correlation g²₁₂.
//!
//! Each detection window holds a thermally distributed number of pairs. Herald and
//! signal detectors are threshold (click) detectors: a click occurs if at least one
//! photon survives independent Bernoulli loss, or if a dark count fires. The memory is
//! modelled as extra loss on the signal arm plus optional added background.
//!
//! Click probabilities follow from the thermal generating function
//! `E[x^n] = 1/(1 + μ(1 − x))`:
//!
//! ```text
//! P_h  = 1 − (1 − p_dh)/(1 + μη_h)
//! P_s  = 1 − (1 − p_ds)/(1 + μη_s)
//! P_hs = P_h + P_s − 1 + (1 − p_dh)(1 − p_ds)/(1 + μ(1 − (1 − η_h)(1 − η_s)))
//! g²   = P_hs / (P_h·P_s)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::util::bisect;
use crate::{Error, Result};

pub const MIN_WINDOWS: u64 = 10_000;
pub const CLASSICAL_BOUND: f64 = 2.0;
const BATCH: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairSourceModel {
    pub mean_pairs_per_window: f64,
    pub herald_efficiency: f64,
    /// Includes the memory efficiency when storage is on.
    pub signal_efficiency: f64,
    pub dark_prob_herald: f64,
    pub dark_prob_signal: f64,
    /// Extra noise click probability per window on the signal arm (memory background).
    pub signal_background: f64,
}

impl Default for PairSourceModel {
    fn default() -> Self {
        Self::no_memory()
    }
}

/// Memory efficiency on the signal photon used by [`PairSourceModel::with_memory`].
pub const MEMORY_EFFICIENCY: f64 = 0.0035;

impl PairSourceModel {
    /// Source calibrated to g² = 18 without storage.
    pub fn no_memory() -> Self {
        Self {
            mean_pairs_per_window: 0.061363427712193094,
            herald_efficiency: 0.1,
            signal_efficiency: 0.2,
            dark_prob_herald: 1e-6,
            dark_prob_signal: 1e-6,
            signal_background: 0.0,
        }
    }

    /// The calibrated source with the signal stored at 0.35 % efficiency and the added
    /// background that brings g² to 4.58.
    pub fn with_memory() -> Self {
        let base = Self::no_memory();
        Self {
            signal_efficiency: base.signal_efficiency * MEMORY_EFFICIENCY,
            signal_background: 1.6223382133449718e-4,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_pairs_per_window > 0.0 && self.mean_pairs_per_window.is_finite()) {
            return Err(Error::invalid("mean_pairs_per_window", "must be positive"));
        }
        for (name, v) in [("herald_efficiency", self.herald_efficiency), ("signal_efficiency", self.signal_efficiency)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(name, format!("{v} not in (0, 1]")));
            }
        }
        for (name, v) in [
            ("dark_prob_herald", self.dark_prob_herald),
            ("dark_prob_signal", self.dark_prob_signal),
            ("signal_background", self.signal_background),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Dark counts and background combined into one per-window noise probability.
    pub fn signal_noise(&self) -> f64 {
        1.0 - (1.0 - self.dark_prob_signal) * (1.0 - self.signal_background)
    }

    pub fn click_probabilities(&self) -> ClickProbabilities {
        let mu = self.mean_pairs_per_window;
        let (eh, es) = (self.herald_efficiency, self.signal_efficiency);
        let (qh, qs) = (1.0 - self.dark_prob_herald, 1.0 - self.signal_noise());
        let herald = 1.0 - qh / (1.0 + mu * eh);
        let signal = 1.0 - qs / (1.0 + mu * es);
        let both = herald + signal - 1.0 + qh * qs / (1.0 + mu * (1.0 - (1.0 - eh) * (1.0 - es)));
        ClickProbabilities { herald, signal, both }
    }

    /// Expected g² in the limit of many windows.
    pub fn expected_g2(&self) -> f64 {
        let p = self.click_probabilities();
        p.both / (p.herald * p.signal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickProbabilities {
    pub herald: f64,
    pub signal: f64,
    pub both: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CoincidenceCounts {
    pub n_windows: u64,
    pub singles_herald: u64,
    pub singles_signal: u64,
    pub coincidences: u64,
}

impl CoincidenceCounts {
    pub fn merge(self, o: Self) -> Self {
        Self {
            n_windows: self.n_windows + o.n_windows,
            singles_herald: self.singles_herald + o.singles_herald,
            singles_signal: self.singles_signal + o.singles_signal,
            coincidences: self.coincidences + o.coincidences,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.coincidences <= self.singles_herald.min(self.singles_signal)
            && self.singles_herald.max(self.singles_signal) <= self.n_windows
    }
}

fn simulate_batch(model: &PairSourceModel, n: u64, seed: u64, batch: u64) -> CoincidenceCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let pairs = Geometric::new(1.0 / (1.0 + model.mean_pairs_per_window)).expect("validated μ");
    let noise_s = model.signal_noise();
    let mut c = CoincidenceCounts { n_windows: n, ..Default::default() };
    for _ in 0..n {
        let k = pairs.sample(&mut rng);
        let mut h = rng.random::<f64>() < model.dark_prob_herald;
        let mut s = rng.random::<f64>() < noise_s;
        for _ in 0..k {
            h |= rng.random::<f64>() < model.herald_efficiency;
            s |= rng.random::<f64>() < model.signal_efficiency;
        }
        c.singles_herald += h as u64;
        c.singles_signal += s as u64;
        c.coincidences += (h && s) as u64;
    }
    c
}

/// Monte Carlo over `n_windows` detection windows. Windows are split into fixed batches
/// with their own random stream, so the result depends only on `seed`, not on the
/// number of threads.
pub fn simulate_counts(model: &PairSourceModel, n_windows: u64, seed: u64) -> Result<CoincidenceCounts> {
    model.validate()?;
    if n_windows < MIN_WINDOWS {
        return Err(Error::invalid("n_windows", format!("{n_windows} < {MIN_WINDOWS}")));
    }
    let n_batches = n_windows.div_ceil(BATCH);
    Ok((0..n_batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(n_windows - b * BATCH);
            simulate_batch(model, n, seed, b)
        })
        .reduce(CoincidenceCounts::default, CoincidenceCounts::merge))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Estimate {
    pub g2: f64,
    pub std_error: f64,
}

/// `g² = C·N/(S_h·S_s)`, with the relative error of each count taken as binomial and
/// combined in quadrature.
pub fn g2_from_counts(c: &CoincidenceCounts) -> Result<G2Estimate> {
    if c.singles_herald == 0 || c.singles_signal == 0 {
        return Err(Error::ZeroSingles);
    }
    if !c.is_consistent() {
        return Err(Error::invalid("counts", format!("inconsistent counts {c:?}")));
    }
    let n = c.n_windows as f64;
    let (sh, ss, cc) = (c.singles_herald as f64, c.singles_signal as f64, c.coincidences as f64);
    let g2 = cc * n / (sh * ss);
    let rel = |k: f64| if k > 0.0 { (1.0 - k / n) / k } else { 0.0 };
    // With no coincidences the estimate is 0; quote the error of a single count.
    let rel_c = if cc > 0.0 { rel(cc) } else { 1.0 };
    let scale = if cc > 0.0 { g2 } else { n / (sh * ss) };
    Ok(G2Estimate {
        g2,
        std_error: scale * (rel_c + rel(sh) + rel(ss)).sqrt(),
    })
}

/// Strictly above the classical bound of 2.
pub fn classicality_check(g2: f64) -> bool {
    g2 > CLASSICAL_BOUND
}

/// Mean pair number giving `target` g² with every other parameter of `template`.
pub fn solve_mean_pairs_for_g2(template: &PairSourceModel, target: f64) -> Result<f64> {
    let f = |mu: f64| PairSourceModel { mean_pairs_per_window: mu, ..*template }.expected_g2() - target;
    bisect(1e-9, 50.0, f).ok_or_else(|| Error::invalid("target", format!("g² = {target} not reachable")))
}

/// Signal background giving `target` g² with every other parameter of `template`.
pub fn solve_signal_background_for_g2(template: &PairSourceModel, target: f64) -> Result<f64> {
    let f = |b: f64| PairSourceModel { signal_background: b, ..*template }.expected_g2() - target;
    bisect(0.0, 1.0 - 1e-12, f).ok_or_else(|| Error::invalid("target", format!("g² = {target} not reachable")))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force expectation: sum over n ≤ 20 thermal pairs.
    fn enumerate(m: &PairSourceModel) -> f64 {
        let mu = m.mean_pairs_per_window;
        let (dh, ds) = (m.dark_prob_herald, m.signal_noise());
        let (mut ph, mut ps, mut phs) = (0.0, 0.0, 0.0);
        for n in 0..=20 {
            let p = mu.powi(n) / (1.0 + mu).powi(n + 1);
            let h = 1.0 - (1.0 - dh) * (1.0 - m.herald_efficiency).powi(n);
            let s = 1.0 - (1.0 - ds) * (1.0 - m.signal_efficiency).powi(n);
            ph += p * h;
            ps += p * s;
            phs += p * h * s;
        }
        phs / (ph * ps)
    }

    fn ideal(mu: f64) -> PairSourceModel {
        PairSourceModel {
            mean_pairs_per_window: mu,
            herald_efficiency: 1.0,
            signal_efficiency: 1.0,
            dark_prob_herald: 0.0,
            dark_prob_signal: 0.0,
            signal_background: 0.0,
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for m in [ideal(0.1), PairSourceModel::no_memory(), PairSourceModel::with_memory()] {
            assert!((m.expected_g2() / enumerate(&m) - 1.0).abs() < 1e-9);
        }
        assert!((ideal(0.1).expected_g2() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_g2_at_unit_efficiency() {
        let est = g2_from_counts(&simulate_counts(&ideal(0.1), 1_000_000, 11).unwrap()).unwrap();
        assert!((est.g2 - 11.0).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn perfect_correlation_limit() {
        let c = simulate_counts(&ideal(0.01), 1_000_000, 2).unwrap();
        assert_eq!(c.coincidences, c.singles_herald);
        assert_eq!(c.coincidences, c.singles_signal);
        let none = simulate_counts(&ideal(1e-300), 100_000, 2).unwrap();
        assert_eq!((none.singles_herald, none.singles_signal, none.coincidences), (0, 0, 0));
    }

    #[test]
    fn deterministic_per_seed() {
        let m = PairSourceModel::no_memory();
        let n = 3 * BATCH + 17;
        assert_eq!(simulate_counts(&m, n, 5).unwrap(), simulate_counts(&m, n, 5).unwrap());
        assert_ne!(simulate_counts(&m, n, 5).unwrap(), simulate_counts(&m, n, 6).unwrap());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        assert_eq!(one.install(|| simulate_counts(&m, n, 5).unwrap()), simulate_counts(&m, n, 5).unwrap());
    }

    #[test]
    fn independence_gives_unity() {
        let c = CoincidenceCounts { n_windows: 1000, singles_herald: 100, singles_signal: 50, coincidences: 5 };
        assert_eq!(g2_from_counts(&c).unwrap().g2, 1.0);
        let z = CoincidenceCounts { singles_signal: 0, ..c };
        assert!(matches!(g2_from_counts(&z), Err(Error::ZeroSingles)));
    }

    #[test]
    fn classical_bound_is_strict() {
        assert!(classicality_check(18.0));
        assert!(classicality_check(4.58));
        assert!(!classicality_check(2.0));
    }

    #[test]
    fn calibrated_configs_hit_targets() {
        assert!((PairSourceModel::no_memory().expected_g2() - 18.0).abs() < 1e-6);
        assert!((PairSourceModel::with_memory().expected_g2() - 4.58).abs() < 1e-6);
        let mu = solve_mean_pairs_for_g2(&PairSourceModel::no_memory(), 18.0).unwrap();
        assert!((mu / PairSourceModel::no_memory().mean_pairs_per_window - 1.0).abs() < 1e-6);
        let template = PairSourceModel { signal_background: 0.0, ..PairSourceModel::with_memory() };
        let b = solve_signal_background_for_g2(&template, 4.58).unwrap();
        assert!((b / PairSourceModel::with_memory().signal_background - 1.0).abs() < 1e-6);
    }

    #[test]
    fn loss_is_exactly_invariant_with_perfect_herald() {
        for alpha in [1.0, 0.1, 0.0035] {
            let m = PairSourceModel { signal_efficiency: alpha, ..ideal(0.1) };
            assert!((m.expected_g2() - 11.0).abs() < 1e-9);
        }
    }

    #[test]
    fn darks_degrade_g2() {
        let mut prev = f64::INFINITY;
        for k in 0..12 {
            let d = if k == 0 { 0.0 } else { 10f64.powi(k - 12) };
            let g = PairSourceModel { dark_prob_herald: d, dark_prob_signal: d, ..PairSourceModel::no_memory() }.expected_g2();
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn std_error_scales_as_inverse_root_n() {
        let m = PairSourceModel::no_memory();
        let ns = [10_000u64, 100_000, 1_000_000, 10_000_000];
        let x: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
        let y: Vec<f64> = ns
            .iter()
            .map(|n| g2_from_counts(&simulate_counts(&m, *n, 9).unwrap()).unwrap().std_error.ln())
            .collect();
        let (_, slope, ..) = crate::util::linear_fit(&x, &y);
        assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
    }
}
