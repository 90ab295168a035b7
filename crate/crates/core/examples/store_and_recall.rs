//! Sends a 1 µs Gaussian pulse through a comb and compares the simulated first echo
//! with the closed form, for both the minimal-phase medium and a flat-phase one.

use afcsim::comb::{analytic_efficiency, CombSpec, PhaseMode};
use afcsim::memory::{store_and_recall_with, DecoherenceModel, SweepSettings};

fn main() -> afcsim::Result<()> {
    let spec = CombSpec { bandwidth: 4e6, ..CombSpec::default() };
    let settings = SweepSettings { n_samples: None, ..SweepSettings::default() };
    let grid = settings.grid_for(spec.delta)?;
    let pulse = settings.probe(grid, 0.0)?;
    println!("grid: {} samples at {} ns", grid.n_samples(), grid.dt() * 1e9);
    println!("closed form η = {:.4}", analytic_efficiency(&spec)?);

    for mode in [PhaseMode::MinimalPhase, PhaseMode::Flat] {
        let r = store_and_recall_with(&pulse, &spec, &DecoherenceModel::none(), mode)?;
        println!(
            "{mode:?}: η = {:.4}, transmitted {:.3}, echo {:.3} µs after the transmitted pulse, {:.3} µs after the input",
            r.efficiency,
            r.transmitted_energy / r.input_energy,
            r.echo_delay() * 1e6,
            r.echo_delay_from_input() * 1e6,
        );
        for (t, e) in &r.higher_order_echoes {
            println!("    later echo at {:.2} µs carries {:.2e}", (t - r.input_time) * 1e6, e / r.input_energy);
        }
    }
    Ok(())
}
