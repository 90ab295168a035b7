//! Counts heralded coincidences with and without the memory in the signal arm and
//! prints g²₁₂ with its error bar.

use afcsim::quantumstats::{classicality_check, g2_from_counts, simulate_counts, PairSourceModel};

fn main() -> afcsim::Result<()> {
    let n = 5_000_000;
    for (name, model) in [("no memory", PairSourceModel::no_memory()), ("memory", PairSourceModel::with_memory())] {
        let counts = simulate_counts(&model, n, 42)?;
        let est = g2_from_counts(&counts)?;
        println!(
            "{name:9}: expected {:.2}, measured {:.2} ± {:.2}, {} coincidences, non-classical: {}",
            model.expected_g2(),
            est.g2,
            est.std_error,
            counts.coincidences,
            classicality_check(est.g2)
        );
    }
    Ok(())
}
