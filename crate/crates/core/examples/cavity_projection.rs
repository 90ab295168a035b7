//! Projects the impedance-matched cavity efficiency for an F = 4 comb and solves for the
//! background depth that gives 15 % at 30 µs.

use afcsim::comb::CombSpec;
use afcsim::memory::{calibrate_background_for_target, cavity_enhanced_projection, DecoherenceModel};

fn main() -> afcsim::Result<()> {
    let tau = 30e-6;
    let template = CombSpec { delta: 1.0 / tau, finesse: 4.0, ..CombSpec::default() };
    let dec = DecoherenceModel::new(1.1e-3, f64::INFINITY, 1.3e-3)?;

    let d0 = calibrate_background_for_target(&template, &dec, tau, 0.15)?;
    let spec = CombSpec { d0, ..template };
    println!("background depth d0 = {d0:.5}");
    for t in [10e-6, 20e-6, 30e-6, 50e-6, 100e-6] {
        let p = cavity_enhanced_projection(&spec, &dec, t)?;
        println!(
            "τ = {:5.1} µs  cavity {:.4}  single pass {:.4}  (background {:.3}, dephasing {:.3}, decay {:.3})",
            t * 1e6,
            p.cavity_matched,
            p.single_pass,
            p.background_factor,
            p.dephasing_factor,
            p.decay_factor
        );
    }
    Ok(())
}
