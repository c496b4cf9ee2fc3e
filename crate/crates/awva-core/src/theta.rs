//! Auto-correlative intensity: the running integral of a trace product.

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, Trace};

/// Running integral `Θ(t) = ∫₀ᵗ a·b dt'`, trapezoid rule on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCurve {
    pub grid: TimeGrid,
    /// Units I0²·s; `values[0] = 0`.
    pub values: Vec<f64>,
}

impl ThetaCurve {
    /// Curve value at a grid time.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(t)?])
    }

    /// Value at the end of the window.
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("curve has at least one sample")
    }
}

/// Integrate the product of two traces from the window start to every sample.
pub fn theta_curve(a: &Trace, b: &Trace) -> Result<ThetaCurve> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::Shape("theta_curve requires both traces on the same grid".into()));
    }
    let grid = a.grid;
    let half_dt = 0.5 * grid.dt;
    let mut values = Vec::with_capacity(grid.n);
    let mut acc = 0.0;
    let mut prev = a.values[0] * b.values[0];
    values.push(0.0);
    for k in 1..grid.n {
        let cur = a.values[k] * b.values[k];
        acc += half_dt * (prev + cur);
        values.push(acc);
        prev = cur;
    }
    Ok(ThetaCurve { grid, values })
}
