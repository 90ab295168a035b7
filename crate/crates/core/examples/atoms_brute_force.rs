//! Checks the transfer-function echo against an explicit sum over 10⁴ sampled atoms on
//! a coarse comb.

use afcsim::comb::{build_profile_for_grid, sample_atoms, CombSpec};
use afcsim::memory::{atomic_echo_energy, store_and_recall, DecoherenceModel};
use afcsim::signals::{gaussian_pulse, TimeGrid};

fn main() -> afcsim::Result<()> {
    let grid = TimeGrid::new(1 << 14, 160e-6 / 16384.0)?;
    let spec = CombSpec { d_peak: 0.5, ..CombSpec::default() };
    let dec = DecoherenceModel::none();
    let pulse = gaussian_pulse(grid, 10e-6, 1e-6, 0.0, 1.0)?;

    let r = store_and_recall(&pulse, &spec, &dec)?;
    let profile = build_profile_for_grid(&spec, grid)?;
    println!("transfer function: {:.5}", r.echo_energy / r.input_energy);
    for seed in [1, 2, 3] {
        let atoms = sample_atoms(&profile, 10_000, seed)?;
        let e = atomic_echo_energy(&atoms, &profile, &spec, &pulse, &dec)?;
        println!("atoms (seed {seed}):   {:.5}", e / r.input_energy);
    }
    Ok(())
}
