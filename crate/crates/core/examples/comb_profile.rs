//! Builds a square-tooth comb, prints its geometry and the closed-form echo efficiency,
//! and writes the optical-depth profile as CSV to stdout when `--csv` is given.

use afcsim::comb::{analytic_efficiency, build_profile, CombSpec, ToothShape};

fn main() -> afcsim::Result<()> {
    let spec = CombSpec { delta: 100e3, finesse: 3.0, d_peak: 2.0, d0: 0.1, tooth_shape: ToothShape::Square, ..CombSpec::default() };
    spec.validate()?;
    println!("storage time   {:.2} µs", spec.storage_time() * 1e6);
    println!("tooth width    {:.1} kHz", spec.tooth_width() * 1e-3);
    println!("teeth          {}", spec.n_teeth());
    println!("mean depth     {:.3}", spec.mean_depth());
    println!("contrast d̃     {:.3}", spec.effective_contrast());
    println!("efficiency     {:.4}", analytic_efficiency(&spec)?);

    for shape in [ToothShape::Square, ToothShape::Gaussian] {
        let s = CombSpec { tooth_shape: shape, ..spec };
        println!("{shape:?}: η = {:.4}", analytic_efficiency(&s)?);
    }

    if std::env::args().any(|a| a == "--csv") {
        let df = spec.tooth_width() / 32.0;
        let n = (1.2 * spec.bandwidth / df) as usize;
        build_profile(&spec, df, n)?.write_csv(std::io::stdout().lock())?;
    }
    Ok(())
}
