//! Simulation and estimation of a small time delay measured by weak-value
//! amplification (WVA) and by its auto-correlative variant (AWVA).
//!
//! The library synthesizes the post-selected Gaussian detector traces of both
//! schemes on a shared uniform time grid, injects seeded Gaussian white noise,
//! and recovers the delay two ways:
//!
//! - **WVA**: Levenberg-Marquardt fit of the Gaussian pulse, reading the delay
//!   off the fitted peak shift together with its standard error.
//! - **AWVA**: the auto-correlative intensity `Θ(t)`, a running integral of the
//!   product of the shifted and unshifted detector traces; the delay enters
//!   through `ΔΘ = Θ₀ − Θ_τ`.
//!
//! [`experiment`] orchestrates Monte Carlo sweeps over delays, noise levels and
//! seeds, and aggregates per-seed sensitivities into ensemble and cross-seed
//! statistics. Everything is deterministic: one seed fully determines a noise
//! trace, and sweep output order is independent of the execution schedule. With
//! the default `parallel` feature the sweep fans out over a rayon pool; the
//! sequential path is always available as [`experiment::sweep_serial`].

pub mod error;
pub mod experiment;
pub mod fit;
pub mod grid;
pub mod noise;
pub mod rng;
pub mod sensitivity;
pub mod signal;
pub mod spectrum;
pub mod theta;

pub use error::{Error, Result};
pub use experiment::{
    cross_seed_stats, cross_seed_stats_from_values, ensemble_stats, group_records, run_ensemble,
    run_single, run_single_with_traces, sweep, sweep_serial, AwvaOutcome, CrossSeedStats,
    EnsembleStats, ExperimentPlan, GroupAggregate, NoisePairing, RunArtifacts, RunRecord,
    SweepResult, WvaOutcome,
};
pub use fit::{fit_gaussian, fit_gaussian_with, FitOptions, FitResult};
pub use grid::{TimeGrid, Trace, TraceUnit};
pub use noise::{calibrate_sigma, gen_noise, inject, snr_db, NoiseAmplitude, NoiseInjection, NoiseSpec};
pub use sensitivity::{k1_sensitivity, k2_curve, k2_sensitivity, AwvaSensitivity, WvaSensitivity};
pub use signal::{
    pointer_shift, synth_outputs, synth_pointer, weak_value, AmplificationMode, CouplingConfig,
    PointerConfig, SchemeTraces, SelectionConfig,
};
pub use spectrum::{spectrum, Spectrum};
pub use theta::{theta_curve, ThetaCurve};
