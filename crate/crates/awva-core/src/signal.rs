//! Noiseless detector traces of the WVA and AWVA schemes.
//!
//! The pointer is a Gaussian temporal pulse. Post-selection at angle `alpha`
//! scales the detected intensity by `sin²(alpha)` and amplifies the coupling
//! delay `tau` into a peak shift `δt = tau * G`. The amplification `G` is
//! either `cot(alpha)` (the weak-value magnitude) or a fixed factor.

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, Trace, TraceUnit};

/// Gaussian pointer profile parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    /// Normalization factor I0.
    pub i0: f64,
    /// Pulse center, seconds.
    pub t0: f64,
    /// Pointer spread ω, seconds. The profile is `exp(-(t-t0)²/(4ω²))`.
    pub omega: f64,
}

impl Default for PointerConfig {
    fn default() -> Self {
        Self { i0: 1.0, t0: 1.5e-3, omega: 2.0e-4 }
    }
}

impl PointerConfig {
    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Config(format!(
                "pointer.omega must be > 0 (got {})",
                self.omega
            )));
        }
        if !(self.i0 > 0.0 && self.i0.is_finite()) {
            return Err(Error::Config(format!("pointer.i0 must be > 0 (got {})", self.i0)));
        }
        if self.t0 < grid.t_start || self.t0 > grid.t_end {
            return Err(Error::Config(format!(
                "pointer.t0 = {} must lie within the grid [{}, {}]",
                self.t0, grid.t_start, grid.t_end
            )));
        }
        Ok(())
    }

    /// Peak amplitude of the normalized profile, `i0 * (2πω²)^(-1/4)`.
    pub fn peak(&self) -> f64 {
        self.i0 * (2.0 * std::f64::consts::PI * self.omega * self.omega).powf(-0.25)
    }
}

/// How the delay amplification factor is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplificationMode {
    /// Amplification is `cot(alpha)`, the weak-value magnitude.
    FromAlpha,
    /// Amplification is the fixed factor `g`, independent of `alpha`.
    Fixed,
}

/// Post-selection parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    /// Post-selection angle, radians. Detection probability is `sin²(alpha)`.
    pub alpha: f64,
    pub amplification_mode: AmplificationMode,
    /// Fixed amplification factor, used in [`AmplificationMode::Fixed`].
    pub g: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { alpha: 0.01, amplification_mode: AmplificationMode::Fixed, g: 1.0e4 }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        // alpha = π/2 gives zero amplification but a well-defined signal, so
        // the upper bound is inclusive.
        if !(self.alpha > 0.0 && self.alpha <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!(
                "selection.alpha must lie in (0, π/2] radians (got {})",
                self.alpha
            )));
        }
        if !(self.g.is_finite() && self.g != 0.0) {
            return Err(Error::Config(format!(
                "selection.g must be finite and nonzero (got {})",
                self.g
            )));
        }
        Ok(())
    }

    /// Effective amplification factor `G`.
    pub fn amplification(&self) -> f64 {
        match self.amplification_mode {
            AmplificationMode::FromAlpha => 1.0 / self.alpha.tan(),
            AmplificationMode::Fixed => self.g,
        }
    }

    /// Post-selection probability `sin²(alpha)`.
    pub fn probability(&self) -> f64 {
        let s = self.alpha.sin();
        s * s
    }
}

/// Coupling between the system and the pointer: the time delay under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    /// Time delay τ, seconds. May be negative.
    pub tau: f64,
}

impl CouplingConfig {
    pub fn validate(&self, pointer: &PointerConfig, selection: &SelectionConfig) -> Result<()> {
        if !self.tau.is_finite() {
            return Err(Error::Config(format!("coupling.tau must be finite (got {})", self.tau)));
        }
        let shift = self.tau * selection.amplification();
        if shift.abs() >= pointer.omega {
            return Err(Error::Config(format!(
                "amplified shift |tau*G| = {:.3e} must stay below the pointer spread omega = {:.3e} \
                 (weak-measurement regime)",
                shift.abs(),
                pointer.omega
            )));
        }
        Ok(())
    }
}

/// Weak value `A_w = -cot(alpha)` (real part; the value used downstream).
pub fn weak_value(selection: &SelectionConfig) -> Result<f64> {
    selection.validate()?;
    Ok(-1.0 / selection.alpha.tan())
}

/// Amplified peak shift `δt = tau * G`.
pub fn pointer_shift(coupling: &CouplingConfig, selection: &SelectionConfig) -> Result<f64> {
    selection.validate()?;
    if !coupling.tau.is_finite() {
        return Err(Error::Config(format!("coupling.tau must be finite (got {})", coupling.tau)));
    }
    Ok(coupling.tau * selection.amplification())
}

/// Initial Gaussian pointer trace, `i0 * (2πω²)^(-1/4) * exp(-(t-t0)²/4ω²)`.
pub fn synth_pointer(grid: &TimeGrid, pointer: &PointerConfig) -> Result<Trace> {
    pointer.validate(grid)?;
    let amp = pointer.peak();
    let inv = 1.0 / (4.0 * pointer.omega * pointer.omega);
    let values = grid
        .times()
        .map(|t| {
            let u = t - pointer.t0;
            amp * (-u * u * inv).exp()
        })
        .collect();
    Trace::new(*grid, values, TraceUnit::Intensity)
}

/// The three noiseless detector traces of one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTraces {
    /// WVA output: post-selected pulse shifted by `δt`.
    pub i1: Trace,
    /// AWVA arm 1 (after the 50:50 splitter): `i1 / 2`, same shift.
    pub i21: Trace,
    /// AWVA arm 2: half-intensity pulse with no shift.
    pub i22: Trace,
}

/// Synthesize the post-selected detector traces of both schemes.
///
/// `i21` is exactly `0.5 * i1` sample by sample, and `i22` shares the same
/// amplitude with the shift removed.
pub fn synth_outputs(
    grid: &TimeGrid,
    pointer: &PointerConfig,
    selection: &SelectionConfig,
    coupling: &CouplingConfig,
) -> Result<SchemeTraces> {
    pointer.validate(grid)?;
    selection.validate()?;
    coupling.validate(pointer, selection)?;
    let shift = coupling.tau * selection.amplification();

    let amp = selection.probability() * pointer.peak();
    let inv = 1.0 / (4.0 * pointer.omega * pointer.omega);
    let n = grid.n;
    let mut i1 = Vec::with_capacity(n);
    let mut i21 = Vec::with_capacity(n);
    let mut i22 = Vec::with_capacity(n);
    for t in grid.times() {
        let us = t - pointer.t0 - shift;
        let u = t - pointer.t0;
        let v1 = amp * (-us * us * inv).exp();
        i1.push(v1);
        i21.push(0.5 * v1);
        i22.push(0.5 * (amp * (-u * u * inv).exp()));
    }
    Ok(SchemeTraces {
        i1: Trace::new(*grid, i1, TraceUnit::Intensity)?,
        i21: Trace::new(*grid, i21, TraceUnit::Intensity)?,
        i22: Trace::new(*grid, i22, TraceUnit::Intensity)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn default_grid() -> TimeGrid {
        TimeGrid::new(0.0, 3.0e-3, 1.0e-7).unwrap()
    }

    #[test]
    fn weak_value_at_quarter_pi_is_minus_one() {
        let sel = SelectionConfig { alpha: FRAC_PI_4, ..Default::default() };
        let aw = weak_value(&sel).unwrap();
        assert!((aw + 1.0).abs() < 1e-15, "got {aw}");
    }

    #[test]
    fn weak_value_at_half_pi_vanishes() {
        let sel = SelectionConfig { alpha: FRAC_PI_2, ..Default::default() };
        let aw = weak_value(&sel).unwrap();
        assert!(aw.abs() < 1e-15, "got {aw}");
    }

    #[test]
    fn weak_value_small_alpha_matches_high_precision_cot() {
        // cot(0.01) evaluated with 40-digit arithmetic
        let sel = SelectionConfig { alpha: 0.01, ..Default::default() };
        let aw = weak_value(&sel).unwrap();
        assert!((aw + 99.99666664444423).abs() < 1e-9, "got {aw}");
    }

    #[test]
    fn weak_value_rejects_out_of_range_alpha() {
        for alpha in [0.0, -0.3, FRAC_PI_2 + 0.1, f64::NAN] {
            let sel = SelectionConfig { alpha, ..Default::default() };
            assert!(weak_value(&sel).is_err(), "alpha = {alpha} accepted");
        }
    }

    #[test]
    fn pointer_shift_fixed_mode_reproduces_table_value() {
        let sel = SelectionConfig::default(); // Fixed, g = 1e4
        let shift = pointer_shift(&CouplingConfig { tau: 3e-9 }, &sel).unwrap();
        assert!((shift - 3.00e-5).abs() < 1e-17, "got {shift}");
    }

    #[test]
    fn pointer_shift_zero_tau_is_zero() {
        let sel = SelectionConfig::default();
        assert_eq!(pointer_shift(&CouplingConfig { tau: 0.0 }, &sel).unwrap(), 0.0);
    }

    #[test]
    fn pointer_shift_from_alpha_matches_cot_oracle() {
        let sel = SelectionConfig {
            amplification_mode: AmplificationMode::FromAlpha,
            ..Default::default()
        };
        let shift = pointer_shift(&CouplingConfig { tau: 3e-9 }, &sel).unwrap();
        // 3e-9 * cot(0.01) from the high-precision oracle
        assert!((shift - 2.999899999333327e-7).abs() < 1e-19, "got {shift}");
    }

    #[test]
    fn pointer_peak_matches_high_precision_value() {
        // (2π (2e-4)²)^(-1/4) evaluated with 40-digit arithmetic
        let p = PointerConfig::default();
        let grid = default_grid();
        let trace = synth_pointer(&grid, &p).unwrap();
        let at_center = trace.values[grid.index_of(1.5e-3).unwrap()];
        let expect = 44.66219208690012;
        assert!(
            ((at_center - expect) / expect).abs() < 1e-12,
            "got {at_center}, expected {expect}"
        );
    }

    #[test]
    fn pointer_is_even_about_center() {
        let grid = default_grid();
        let trace = synth_pointer(&grid, &PointerConfig::default()).unwrap();
        let c = 15000;
        for m in [1usize, 7, 100, 2000, 10000] {
            let a = trace.values[c + m];
            let b = trace.values[c - m];
            assert!(((a - b) / a.max(1e-300)).abs() < 1e-9, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn pointer_falls_to_inv_e_at_two_omega() {
        let grid = default_grid();
        let trace = synth_pointer(&grid, &PointerConfig::default()).unwrap();
        let c = 15000;
        let two_omega_steps = 4000; // 2ω / dt
        let ratio = trace.values[c + two_omega_steps] / trace.values[c];
        assert!((ratio - (-1.0f64).exp()).abs() < 1e-9, "got {ratio}");
    }

    #[test]
    fn i21_is_exactly_half_of_i1() {
        let grid = default_grid();
        let out = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 3e-9 },
        )
        .unwrap();
        for k in 0..grid.n {
            assert_eq!(out.i21.values[k].to_bits(), (0.5 * out.i1.values[k]).to_bits());
        }
    }

    #[test]
    fn zero_tau_makes_both_arms_identical() {
        let grid = default_grid();
        let out = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 0.0 },
        )
        .unwrap();
        assert_eq!(out.i21, out.i22);
    }

    #[test]
    fn i1_peak_value_and_position() {
        let grid = default_grid();
        let out = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 3e-9 },
        )
        .unwrap();
        let k = out.i1.argmax();
        // peak sits at t0 + δt = 1.53 ms
        assert_eq!(k, grid.index_of(1.53e-3).unwrap());
        // sin²(0.01) * (2πω²)^(-1/4) from the high-precision oracle
        let expect = 4.466070336701361e-3;
        let got = out.i1.values[k];
        assert!(((got - expect) / expect).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn post_selection_probability_ratio() {
        let grid = default_grid();
        let pointer = PointerConfig::default();
        let sel = SelectionConfig::default();
        let out = synth_outputs(&grid, &pointer, &sel, &CouplingConfig { tau: 0.0 }).unwrap();
        let pointer_trace = synth_pointer(&grid, &pointer).unwrap();
        let ratio = out.i1.values[15000] / pointer_trace.values[15000];
        let expect = 9.999_666_671_111_08e-5; // sin²(0.01)
        assert!(((ratio - expect) / expect).abs() < 1e-12, "got {ratio}");
    }

    #[test]
    fn argmax_tracks_shift_within_one_step() {
        let grid = default_grid();
        let pointer = PointerConfig::default();
        let mut sel = SelectionConfig::default();
        for (g, tau) in [(1e4, 1.1e-9), (1e4, -7.3e-9), (1e4, 1.9e-8), (3.3e3, 5e-9)] {
            sel.g = g;
            let out = synth_outputs(&grid, &pointer, &sel, &CouplingConfig { tau }).unwrap();
            let shift = tau * g;
            let t_peak = grid.time_at(out.i1.argmax());
            assert!(
                (t_peak - (pointer.t0 + shift)).abs() <= grid.dt,
                "tau={tau}, g={g}: peak at {t_peak}"
            );
        }
    }

    #[test]
    fn weak_regime_violation_rejected() {
        let grid = default_grid();
        let err = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 2.1e-8 }, // |tau*G| = 2.1e-4 > omega
        );
        assert!(err.is_err());
    }

    #[test]
    fn synthesis_is_pure() {
        let grid = default_grid();
        let a = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 3e-9 },
        )
        .unwrap();
        let b = synth_outputs(
            &grid,
            &PointerConfig::default(),
            &SelectionConfig::default(),
            &CouplingConfig { tau: 3e-9 },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trapezoid_of_i22_approaches_gaussian_area() {
        // ∫ i22 over the full window vs the closed-form full-line area
        // (i0/2) sin²α (2πω²)^(-1/4) * 2ω√π; window truncation ~1e-6 relative.
        let grid = default_grid();
        let pointer = PointerConfig::default();
        let sel = SelectionConfig::default();
        let out = synth_outputs(&grid, &pointer, &sel, &CouplingConfig { tau: 0.0 }).unwrap();
        let mut integral = 0.0;
        for k in 1..grid.n {
            integral += 0.5 * (out.i22.values[k - 1] + out.i22.values[k]) * grid.dt;
        }
        let area = 0.5
            * sel.probability()
            * pointer.peak()
            * 2.0
            * pointer.omega
            * std::f64::consts::PI.sqrt();
        assert!(((integral - area) / area).abs() < 2e-6, "got {integral}, expected {area}");
    }
}
