use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::util::linear_fit;
use crate::{Error, Result};

/// Result of fitting `η = η₀·exp(-τ/τ₁ₑ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub eta0: f64,
    pub tau_1e: f64,
    pub eta0_std_error: f64,
    pub tau_1e_std_error: f64,
    /// RMS of the log-space residuals.
    pub residual_rms: f64,
    pub n_points: usize,
}

/// Least-squares line through `(τ, ln η)`; standard errors come from the linear-fit
/// covariance and are propagated to `η₀` and `τ₁ₑ` to first order.
pub fn fit_exponential_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((index, &(_, value))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(Error::NonPositiveEfficiency { index, value });
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::InsufficientData("all storage times are identical".into()));
    }
    let (intercept, slope, se_intercept, se_slope, rms) = linear_fit(&x, &y);
    if !(slope < 0.0) {
        return Err(Error::InsufficientData(format!(
            "efficiency does not decay (log slope {slope:e})"
        )));
    }
    let eta0 = intercept.exp();
    Ok(DecayFit {
        eta0,
        tau_1e: -1.0 / slope,
        eta0_std_error: eta0 * se_intercept,
        tau_1e_std_error: se_slope / (slope * slope),
        residual_rms: rms,
        n_points: points.len(),
    })
}

/// Writes `tau_s,efficiency` rows.
pub fn write_sweep_csv<W: Write>(points: &[(f64, f64)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["tau_s", "efficiency"])?;
    for (tau, eta) in points {
        out.write_record(&[tau.to_string(), eta.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `tau_s,efficiency` rows (header required, `#` comment lines allowed).
pub fn read_sweep_csv<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("bad value in column {i} of {rec:?}")))
        };
        points.push((parse(0)?, parse(1)?));
    }
    Ok(points)
}
