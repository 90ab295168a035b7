//! Fits two-pulse photon-echo decays: a plain exponential and a stretched one with the
//! exponent left free.

use afcsim::memory::{fit_two_pulse_echo, two_pulse_echo_intensity, two_pulse_echo_intensity_stretched};

fn main() -> afcsim::Result<()> {
    let t12: Vec<f64> = (0..12).map(|i| i as f64 * 50e-6).collect();

    let plain: Vec<_> = t12.iter().map(|&t| (t, two_pulse_echo_intensity(t, 1.1e-3))).collect();
    let f = fit_two_pulse_echo(&plain, Some(1.0))?;
    println!("exponential: T2 = {:.1} µs (truth 1100), efficiency 1/e at T2/4 = {:.1} µs", f.t2 * 1e6, f.t2 / 4.0 * 1e6);

    let stretched: Vec<_> = t12.iter().map(|&t| (t, 0.8 * two_pulse_echo_intensity_stretched(t, 0.9e-3, 1.4))).collect();
    let f = fit_two_pulse_echo(&stretched, None)?;
    println!("stretched:   T2 = {:.1} µs, x = {:.3}, amplitude {:.3}", f.t2 * 1e6, f.exponent, f.amplitude);
    Ok(())
}
