//! Seeded Gaussian white-noise generation, SNR calibration, and injection.

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, Trace, TraceUnit};
use crate::rng::GaussianStream;

/// Where the noise enters the AWVA optical path relative to the beam splitter.
///
/// After the splitter the full-amplitude noise lands on the halved signals,
/// so `SNR* = SNR - 10·log10(2)`; before the splitter the noise is halved
/// along with the signal and `SNR* = SNR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseInjection {
    BeforeBs,
    AfterBs,
}

/// Noise strength: either an explicit per-sample variance or a target SNR
/// that [`calibrate_sigma`] resolves into one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseAmplitude {
    /// Per-sample variance of the discrete sequence, units I0².
    Sigma2(f64),
    /// Target SNR in dB; must be resolved before generation.
    TargetSnrDb(f64),
}

/// Full description of one noise realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub amplitude: NoiseAmplitude,
    /// Random seed ξ; the same (seed, grid) always regenerates the identical
    /// sample sequence.
    pub seed: u64,
    pub injection: NoiseInjection,
}

/// Generate zero-mean Gaussian white noise with the spec's variance.
///
/// Fails if the spec still carries an unresolved target SNR.
pub fn gen_noise(grid: &TimeGrid, spec: &NoiseSpec) -> Result<Trace> {
    let sigma2 = match spec.amplitude {
        NoiseAmplitude::Sigma2(s2) => s2,
        NoiseAmplitude::TargetSnrDb(_) => {
            return Err(Error::Config(
                "noise spec carries a target SNR; resolve it to a variance with calibrate_sigma \
                 before generating"
                    .into(),
            ))
        }
    };
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::Config(format!("noise sigma2 must be >= 0 (got {sigma2})")));
    }
    let sigma = sigma2.sqrt();
    let mut stream = GaussianStream::new(spec.seed);
    let values = (0..grid.n).map(|_| sigma * stream.next_sample()).collect();
    Trace::new(*grid, values, TraceUnit::Intensity)
}

/// SNR in dB: `10 * log10(max|signal| / max|noise|)`.
pub fn snr_db(signal: &Trace, noise: &Trace) -> Result<f64> {
    if !signal.grid.same_as(&noise.grid) {
        return Err(Error::Shape("snr_db requires both traces on the same grid".into()));
    }
    let max_n = noise.max_abs();
    if max_n == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    Ok(10.0 * (signal.max_abs() / max_n).log10())
}

/// Resolve a target SNR into the per-sample variance that realizes it
/// exactly for this (seed, grid).
///
/// A unit-variance trace is generated for the seed, its realized maximum
/// `M = max|n_k|` measured, and the variance chosen so the scaled noise peaks
/// at `max|signal| * 10^(-target/10)`.
pub fn calibrate_sigma(
    target_snr_db: f64,
    signal: &Trace,
    grid: &TimeGrid,
    seed: u64,
) -> Result<f64> {
    let max_s = signal.max_abs();
    if max_s == 0.0 {
        return Err(Error::Degenerate("cannot calibrate noise against a zero signal".into()));
    }
    let unit = gen_noise(
        grid,
        &NoiseSpec {
            amplitude: NoiseAmplitude::Sigma2(1.0),
            seed,
            injection: NoiseInjection::AfterBs,
        },
    )?;
    let m = unit.max_abs();
    let sigma = max_s * 10f64.powf(-target_snr_db / 10.0) / m;
    Ok(sigma * sigma)
}

/// Pointwise sum of a trace and a noise trace; the signal's unit is kept.
pub fn inject(trace: &Trace, noise: &Trace) -> Result<Trace> {
    if !trace.grid.same_as(&noise.grid) {
        return Err(Error::Shape("inject requires both traces on the same grid".into()));
    }
    let values = trace
        .values
        .iter()
        .zip(noise.values.iter())
        .map(|(a, n)| a + n)
        .collect();
    Trace::new(trace.grid, values, trace.unit)
}
