//! Sweeps the storage time with a combined memory decay time of 13.1 µs and fits the
//! efficiency decay back out of the simulated points.

use afcsim::comb::CombSpec;
use afcsim::memory::{efficiency_sweep, fit_exponential_decay, DecoherenceModel, SweepSettings};

fn main() -> afcsim::Result<()> {
    let dec = DecoherenceModel::with_combined_tm(1.1e-3, 13.1e-6, 1.3e-3)?;
    let settings = SweepSettings { n_samples: None, dt: 20e-9, ..SweepSettings::default() };
    let taus: Vec<f64> = (1..=8).map(|i| i as f64 * 10e-6).collect();
    let pts = efficiency_sweep(&taus, &CombSpec::default(), &dec, &settings)?;
    for p in &pts {
        println!("τ = {:5.1} µs  η = {:.3e}  echo at {:.3} µs", p.tau * 1e6, p.efficiency, p.echo_delay * 1e6);
    }
    let fit = fit_exponential_decay(&pts.iter().map(|p| (p.tau, p.efficiency)).collect::<Vec<_>>())?;
    println!(
        "fit: η₀ = {:.4} ± {:.4}, τ₁ₑ = {:.2} ± {:.2} µs",
        fit.eta0,
        fit.eta0_std_error,
        fit.tau_1e * 1e6,
        fit.tau_1e_std_error * 1e6
    );
    Ok(())
}
