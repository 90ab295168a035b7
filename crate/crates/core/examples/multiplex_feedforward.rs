//! Stores one pulse in each of 11 spectral channels, shifts a chosen channel onto a
//! 7.5 MHz filter cavity and prints the crosstalk it lets through.

use afcsim::memory::DecoherenceModel;
use afcsim::multiplex::{multimode_capacity, ChannelPlan, FeedforwardSettings, FeedforwardSetup, FilterCavity};

fn main() -> afcsim::Result<()> {
    let plan = ChannelPlan::default();
    let cav = FilterCavity::default();
    let offsets: Vec<f64> = (0..plan.n_channels).map(|i| i as f64 * 20e-6).collect();
    let setup = FeedforwardSetup::new(&plan, &DecoherenceModel::none(), &offsets, &FeedforwardSettings::default())?;

    println!("Lorentzian leak at one spacing: {:.4}", cav.power_transmission(plan.spacing));
    for selected in [0, 5] {
        let run = setup.select(selected, &cav)?;
        let row: Vec<String> = run.crosstalk_row.iter().map(|x| format!("{x:.3}")).collect();
        println!("select {selected:2}: [{}]", row.join(" "));
    }
    println!("capacity with 5 µs storage and 1 µs modes: {}", multimode_capacity(5e-6, 1e-6, plan.n_channels));
    Ok(())
}
