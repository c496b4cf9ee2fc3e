//! Uniform time grid and sampled traces.

use crate::error::{Error, Result};

/// A uniformly sampled time axis.
///
/// Sample `k` maps to `t_k = t_start + k * dt`, computed from the index each
/// time so no rounding accumulates across samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Sample count, `floor((t_end - t_start) / dt) + 1`.
    pub n: usize,
}

impl TimeGrid {
    /// Build a grid covering `[t_start, t_end]` with step `dt`.
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Config(format!("grid dt must be > 0 (got {dt})")));
        }
        if !t_start.is_finite() || !t_end.is_finite() || t_end <= t_start {
            return Err(Error::Config(format!(
                "grid requires t_end > t_start (got t_start={t_start}, t_end={t_end})"
            )));
        }
        let n = ((t_end - t_start) / dt).floor() as usize + 1;
        Ok(Self { t_start, t_end, dt, n })
    }

    /// Time of sample `k`.
    #[inline]
    pub fn time_at(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    /// Iterator over all sample times.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.time_at(k))
    }

    /// Index of the sample closest to `t`, if `t` lies on the grid
    /// (within a 1e-6 `dt` tolerance of a sample).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let k = ((t - self.t_start) / self.dt).round();
        if k < 0.0 || k as usize >= self.n {
            return Err(Error::Shape(format!(
                "time {t} outside grid [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        let k = k as usize;
        if (self.time_at(k) - t).abs() > 1e-6 * self.dt {
            return Err(Error::Shape(format!("time {t} does not lie on the grid")));
        }
        Ok(k)
    }

    /// True when two grids describe the same axis.
    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.n == other.n
            && self.t_start.to_bits() == other.t_start.to_bits()
            && self.dt.to_bits() == other.dt.to_bits()
    }
}

/// Physical unit of a trace's sample values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceUnit {
    /// Detector intensity in units of the pointer normalization I0.
    Intensity,
    /// Auto-correlative intensity, I0^2 * seconds.
    IntensitySquaredSeconds,
    Dimensionless,
}

impl TraceUnit {
    pub fn label(&self) -> &'static str {
        match self {
            TraceUnit::Intensity => "I0",
            TraceUnit::IntensitySquaredSeconds => "I0^2·s",
            TraceUnit::Dimensionless => "dimensionless",
        }
    }
}

/// A real-valued time series on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub unit: TraceUnit,
}

impl Trace {
    /// Wrap sample values, checking length and finiteness.
    pub fn new(grid: TimeGrid, values: Vec<f64>, unit: TraceUnit) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Shape(format!(
                "trace has {} values but grid has {} samples",
                values.len(),
                grid.n
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!(
                "non-finite sample at index {bad}"
            )));
        }
        Ok(Self { grid, values, unit })
    }

    /// Maximum absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Index of the first maximum sample (ties resolve to the lowest index).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        best
    }
}
