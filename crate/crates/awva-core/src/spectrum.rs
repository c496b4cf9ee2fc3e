//! FFT magnitude and periodogram diagnostics for noise traces.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Trace;

/// One-sided spectrum of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin frequencies in Hz, covering [0, 1/(2·dt)].
    pub freqs: Vec<f64>,
    /// Periodogram, `|DFT|² · dt / n` with `n` the original sample count.
    pub psd: Vec<f64>,
    /// Raw DFT magnitudes `|DFT|`.
    pub magnitude: Vec<f64>,
    /// True when the trace was zero-padded up to `fft_len`.
    pub zero_padded: bool,
    /// Transform length (next power of two above the sample count).
    pub fft_len: usize,
}

/// Compute the one-sided FFT magnitude and periodogram of a trace.
///
/// The trace is used as-is (mean preserved) and zero-padded to the next
/// power of two for a radix-friendly transform.
pub fn spectrum(trace: &Trace) -> Result<Spectrum> {
    let n = trace.grid.n;
    if n < 2 {
        return Err(Error::Degenerate("spectrum needs at least 2 samples".into()));
    }
    let fft_len = n.next_power_of_two();
    let mut buf: Vec<Complex<f64>> = trace
        .values
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(fft_len)
        .collect();
    FftPlanner::new().plan_fft_forward(fft_len).process(&mut buf);

    let bins = fft_len / 2 + 1;
    let df = 1.0 / (fft_len as f64 * trace.grid.dt);
    let scale = trace.grid.dt / n as f64;
    let mut freqs = Vec::with_capacity(bins);
    let mut psd = Vec::with_capacity(bins);
    let mut magnitude = Vec::with_capacity(bins);
    for (k, c) in buf.iter().take(bins).enumerate() {
        let mag = c.norm();
        freqs.push(k as f64 * df);
        magnitude.push(mag);
        psd.push(mag * mag * scale);
    }
    Ok(Spectrum { freqs, psd, magnitude, zero_padded: fft_len != n, fft_len })
}
