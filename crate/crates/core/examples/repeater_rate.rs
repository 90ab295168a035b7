//! Compares the single-link entanglement rate of a two-level comb with a spin-wave
//! memory that loses time to control pulses.

use afcsim::repeater::{entanglement_rate, Protocol, RepeaterConfig};

fn main() -> afcsim::Result<()> {
    let protocols = [Protocol::TwoLevelAfc, Protocol::SpinWave { control_dead_time: 2e-6 }];
    for protocol in protocols {
        let cfg = RepeaterConfig { protocol, ..RepeaterConfig::default() };
        let r = entanglement_rate(&cfg, 1)?;
        println!(
            "{protocol:?}: {} modes, analytic {:.1}/s, Monte Carlo {:.1} ± {:.1}/s",
            r.effective_modes, r.analytic_rate, r.monte_carlo_rate, r.monte_carlo_std_error
        );
    }
    Ok(())
}
