//! Sensitivity of the two delay estimators and the validity classification.

use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::grid::{Trace, TraceUnit};
use crate::theta::ThetaCurve;

/// WVA sensitivity `K₁ = (δt_τ - δt₀)/τ` with propagated error
/// `E₁ = (|se_τ| + |se₀|)/|τ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WvaSensitivity {
    pub k1: f64,
    pub e1: f64,
    /// Both fits converged and the error bar stays out of the
    /// loss-of-sensitivity region: `k1 - e1 > 0`.
    pub valid: bool,
}

/// AWVA sensitivity `K₂(t) = (Θ₀(t) - Θ_τ(t))/τ`, evaluated at the report
/// time and maximized over the integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwvaSensitivity {
    pub k2_at_report: f64,
    pub k2_max: f64,
    /// Integration time at which `K₂` peaks (first grid index on ties).
    pub t_at_max: f64,
    /// `K₂` at the report time stays above the loss-of-sensitivity region.
    pub valid: bool,
}

/// Combine a τ = 0 baseline fit and a τ fit into the WVA sensitivity.
pub fn k1_sensitivity(fit0: &FitResult, fit_tau: &FitResult, tau: f64) -> Result<WvaSensitivity> {
    if tau == 0.0 {
        return Err(Error::Config("k1 sensitivity is undefined at tau = 0".into()));
    }
    let k1 = (fit_tau.delta_t - fit0.delta_t) / tau;
    let e1 = (fit_tau.se_delta_t.abs() + fit0.se_delta_t.abs()) / tau.abs();
    let valid = fit0.converged && fit_tau.converged && k1 - e1 > 0.0;
    Ok(WvaSensitivity { k1, e1, valid })
}

/// Pointwise sensitivity curve `K₂(t) = (Θ₀(t) - Θ_τ(t))/τ`.
pub fn k2_curve(theta0: &ThetaCurve, theta_tau: &ThetaCurve, tau: f64) -> Result<Trace> {
    if tau == 0.0 {
        return Err(Error::Config("k2 sensitivity is undefined at tau = 0".into()));
    }
    if !theta0.grid.same_as(&theta_tau.grid) {
        return Err(Error::Shape("theta curves must share a grid".into()));
    }
    let values = theta0
        .values
        .iter()
        .zip(theta_tau.values.iter())
        .map(|(a, b)| (a - b) / tau)
        .collect();
    Trace::new(theta0.grid, values, TraceUnit::Dimensionless)
}

/// Evaluate the AWVA sensitivity at a report time and its grid maximum.
pub fn k2_sensitivity(
    theta0: &ThetaCurve,
    theta_tau: &ThetaCurve,
    tau: f64,
    report_time: f64,
) -> Result<AwvaSensitivity> {
    let curve = k2_curve(theta0, theta_tau, tau)?;
    let at_report = curve.values[curve.grid.index_of(report_time)?];
    let arg = curve.argmax();
    let k2_max = curve.values[arg];
    Ok(AwvaSensitivity {
        k2_at_report: at_report,
        k2_max,
        t_at_max: curve.grid.time_at(arg),
        valid: at_report > 0.0,
    })
}
