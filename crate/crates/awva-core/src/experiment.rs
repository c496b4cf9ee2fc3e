//! Monte Carlo orchestration: runs over (τ, SNR, seed), ensemble statistics,
//! and cross-seed aggregates.
//!
//! Every run is a pure function of its arguments, so the sweep parallelizes
//! over a rayon pool (default `parallel` feature) with output ordering fixed
//! by the parameter list, not the execution schedule. [`sweep_serial`] is the
//! always-available single-threaded path; [`sweep`] dispatches to the pool
//! when the feature is enabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_gaussian, FitResult};
use crate::grid::{TimeGrid, Trace};
use crate::noise::{
    calibrate_sigma, gen_noise, inject, snr_db, NoiseAmplitude, NoiseInjection, NoiseSpec,
};
use crate::rng::SplitMix64;
use crate::sensitivity::{k1_sensitivity, k2_sensitivity, AwvaSensitivity, WvaSensitivity};
use crate::signal::{synth_outputs, CouplingConfig, PointerConfig, SelectionConfig};
use crate::theta::theta_curve;

/// Whether both AWVA detector arms see the same noise realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePairing {
    /// One noise trace per seed, added to both arms (and to the WVA path).
    SharedTrace,
    /// Each arm gets its own sub-seeded realization.
    IndependentTraces,
}

/// Complete configuration of a simulated measurement campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub grid: TimeGrid,
    pub pointer: PointerConfig,
    pub selection: SelectionConfig,
    /// Delays to measure; must be nonzero.
    pub taus: Vec<f64>,
    /// Target SNR levels in dB (noiseless baselines are always added).
    pub snr_targets_db: Vec<f64>,
    /// Noise seeds ξ, one repetition of the experiment each.
    pub seeds: Vec<u64>,
    pub noise_injection: NoiseInjection,
    pub noise_pairing: NoisePairing,
    /// Integration time at which Θ and K₂ are reported.
    pub report_time: f64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            grid: TimeGrid::new(0.0, 3.0e-3, 1.0e-7).expect("default grid is valid"),
            pointer: PointerConfig::default(),
            selection: SelectionConfig::default(),
            taus: vec![3e-9, 6e-9, 9e-9, 12e-9, 15e-9],
            snr_targets_db: vec![6.6, 1.4, -3.3, -6.3],
            seeds: vec![0, 100, 200, 300, 400, 500, 600],
            noise_injection: NoiseInjection::AfterBs,
            noise_pairing: NoisePairing::SharedTrace,
            report_time: 1.5e-3,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.pointer.validate(&self.grid)?;
        self.selection.validate()?;
        if self.taus.is_empty() {
            return Err(Error::Config("experiment.taus must be nonempty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("experiment.seeds must be nonempty".into()));
        }
        for &tau in &self.taus {
            if tau == 0.0 {
                return Err(Error::Config(
                    "experiment.taus must be nonzero (sensitivities divide by tau)".into(),
                ));
            }
            CouplingConfig { tau }.validate(&self.pointer, &self.selection)?;
        }
        for &snr in &self.snr_targets_db {
            if !snr.is_finite() {
                return Err(Error::Config(format!(
                    "experiment.snr_targets_db entries must be finite (got {snr})"
                )));
            }
        }
        self.grid
            .index_of(self.report_time)
            .map_err(|_| {
                Error::Config(format!(
                    "experiment.report_time = {} must lie on the grid",
                    self.report_time
                ))
            })?;
        Ok(())
    }
}

/// WVA side of one run: both fits and the derived sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WvaOutcome {
    pub fit0: FitResult,
    pub fit_tau: FitResult,
    pub sensitivity: WvaSensitivity,
}

/// AWVA side of one run: Θ values at the report time and the sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwvaOutcome {
    pub theta0: f64,
    pub theta_tau: f64,
    pub delta_theta: f64,
    pub sensitivity: AwvaSensitivity,
}

/// One simulated measurement (one row of the runs table).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub tau: f64,
    /// Target SNR; `None` for the noiseless baseline.
    pub snr_db_target: Option<f64>,
    pub snr_db_realized: Option<f64>,
    pub snr_star_db: Option<f64>,
    pub seed: Option<u64>,
    pub sigma2: Option<f64>,
    pub wva: WvaOutcome,
    pub awva: AwvaOutcome,
}

fn arm_seed(seed: u64, arm: u64) -> u64 {
    let mut sm = SplitMix64::new(seed ^ 0xA5A5_5A5A_0F0F_F0F0);
    let mut out = 0;
    for _ in 0..=arm {
        out = sm.next_u64();
    }
    out
}

fn scaled(trace: &Trace, factor: f64) -> Result<Trace> {
    Trace::new(
        trace.grid,
        trace.values.iter().map(|v| factor * v).collect(),
        trace.unit,
    )
}

/// The intermediate traces and curves behind one [`RunRecord`], for
/// serialization and plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    /// τ = 0 detector trace with noise applied (clean when noiseless).
    pub i1_baseline: Trace,
    /// Delayed detector trace with noise applied.
    pub i1: Trace,
    pub i21: Trace,
    pub i22: Trace,
    /// Master noise realization, absent for the noiseless baseline.
    pub noise: Option<Trace>,
    pub theta0: crate::theta::ThetaCurve,
    pub theta_tau: crate::theta::ThetaCurve,
    /// Sensitivity curve K₂(t).
    pub k2: Trace,
}

/// Simulate one measurement: synthesize, calibrate and inject noise, run both
/// estimators. `snr_db_target = None` runs the noiseless baseline and leaves
/// the noise fields empty. Deterministic in all arguments.
pub fn run_single(
    plan: &ExperimentPlan,
    tau: f64,
    snr_db_target: Option<f64>,
    seed: u64,
) -> Result<RunRecord> {
    Ok(run_single_with_traces(plan, tau, snr_db_target, seed)?.0)
}

/// [`run_single`] variant that also returns the traces it worked on.
pub fn run_single_with_traces(
    plan: &ExperimentPlan,
    tau: f64,
    snr_db_target: Option<f64>,
    seed: u64,
) -> Result<(RunRecord, RunArtifacts)> {
    plan.validate()?;
    let coupling = CouplingConfig { tau };
    coupling.validate(&plan.pointer, &plan.selection)?;
    let grid = &plan.grid;
    let out_tau = synth_outputs(grid, &plan.pointer, &plan.selection, &coupling)?;
    let out_base = synth_outputs(
        grid,
        &plan.pointer,
        &plan.selection,
        &CouplingConfig { tau: 0.0 },
    )?;

    let (i1_base, i1_tau, i21, i22, master_noise, noise_fields) = match snr_db_target {
        None => (out_base.i1, out_tau.i1, out_tau.i21, out_tau.i22, None, None),
        Some(target) => {
            let sigma2 = calibrate_sigma(target, &out_tau.i1, grid, seed)?;
            let spec = NoiseSpec {
                amplitude: NoiseAmplitude::Sigma2(sigma2),
                seed,
                injection: plan.noise_injection,
            };
            let master = gen_noise(grid, &spec)?;
            let realized = snr_db(&out_tau.i1, &master)?;
            let snr_star = match plan.noise_injection {
                NoiseInjection::AfterBs => realized - 10.0 * 2.0f64.log10(),
                NoiseInjection::BeforeBs => realized,
            };
            // Noise after the splitter arrives at full amplitude on the halved
            // arms; before the splitter it is halved along with the signal.
            let arm_factor = match plan.noise_injection {
                NoiseInjection::AfterBs => 1.0,
                NoiseInjection::BeforeBs => 0.5,
            };
            let (arm1, arm2) = match plan.noise_pairing {
                NoisePairing::SharedTrace => {
                    let shared = scaled(&master, arm_factor)?;
                    (shared.clone(), shared)
                }
                NoisePairing::IndependentTraces => {
                    let gen_arm = |arm: u64| -> Result<Trace> {
                        let t = gen_noise(
                            grid,
                            &NoiseSpec { seed: arm_seed(seed, arm), ..spec },
                        )?;
                        scaled(&t, arm_factor)
                    };
                    (gen_arm(0)?, gen_arm(1)?)
                }
            };
            (
                inject(&out_base.i1, &master)?,
                inject(&out_tau.i1, &master)?,
                inject(&out_tau.i21, &arm1)?,
                inject(&out_tau.i22, &arm2)?,
                Some(master),
                Some((target, realized, snr_star, sigma2)),
            )
        }
    };

    let fit0 = fit_gaussian(&i1_base, &plan.pointer)?;
    let fit_tau = fit_gaussian(&i1_tau, &plan.pointer)?;
    let wva_sens = k1_sensitivity(&fit0, &fit_tau, tau)?;

    let theta0_curve = theta_curve(&i22, &i22)?;
    let theta_tau_curve = theta_curve(&i21, &i22)?;
    let awva_sens = k2_sensitivity(&theta0_curve, &theta_tau_curve, tau, plan.report_time)?;
    let k2 = crate::sensitivity::k2_curve(&theta0_curve, &theta_tau_curve, tau)?;
    let theta0 = theta0_curve.value_at(plan.report_time)?;
    let theta_tau = theta_tau_curve.value_at(plan.report_time)?;

    let (snr_db_target, snr_db_realized, snr_star_db, sigma2) = match noise_fields {
        Some((t, r, s, v)) => (Some(t), Some(r), Some(s), Some(v)),
        None => (None, None, None, None),
    };
    let record = RunRecord {
        tau,
        snr_db_target,
        snr_db_realized,
        snr_star_db,
        seed: snr_db_target.map(|_| seed),
        sigma2,
        wva: WvaOutcome { fit0, fit_tau, sensitivity: wva_sens },
        awva: AwvaOutcome {
            theta0,
            theta_tau,
            delta_theta: theta0 - theta_tau,
            sensitivity: awva_sens,
        },
    };
    let artifacts = RunArtifacts {
        i1_baseline: i1_base,
        i1: i1_tau,
        i21,
        i22,
        noise: master_noise,
        theta0: theta0_curve,
        theta_tau: theta_tau_curve,
        k2,
    };
    Ok((record, artifacts))
}

/// Seed-ensemble mean with max-deviation spread.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean_k2: f64,
    /// Largest absolute deviation of a member from the mean.
    pub e2: f64,
    pub per_seed: Vec<f64>,
}

/// Mean and max-deviation of a set of per-seed sensitivities.
pub fn ensemble_stats(per_seed: &[f64]) -> Result<EnsembleStats> {
    if per_seed.is_empty() {
        return Err(Error::Config("ensemble needs at least one member".into()));
    }
    let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    let e2 = per_seed.iter().map(|v| (v - mean).abs()).fold(0.0f64, f64::max);
    Ok(EnsembleStats { mean_k2: mean, e2, per_seed: per_seed.to_vec() })
}

/// Run the plan's seed list at one (τ, SNR) condition and aggregate the
/// per-seed K₂ values (measured at the report time).
pub fn run_ensemble(
    plan: &ExperimentPlan,
    tau: f64,
    snr_db_target: Option<f64>,
) -> Result<EnsembleStats> {
    plan.validate()?;
    let mut per_seed = Vec::with_capacity(plan.seeds.len());
    for &seed in &plan.seeds {
        let rec = run_single(plan, tau, snr_db_target, seed)?;
        per_seed.push(rec.awva.sensitivity.k2_at_report);
    }
    ensemble_stats(&per_seed)
}

/// Cross-seed averages where baseline and delayed measurements come from
/// different noise realizations (means first, differences of means after).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSeedStats {
    pub mean_dt0: f64,
    pub e_t0_bar: f64,
    pub mean_dt_tau: f64,
    pub e_t_tau_bar: f64,
    pub delta_dt_bar: f64,
    pub k1_bar: f64,
    pub e1_bar: f64,
    pub mean_theta0: f64,
    pub e_c0_bar: f64,
    pub mean_theta_tau: f64,
    pub e_c_tau_bar: f64,
    pub delta_theta_bar: f64,
    pub k2_bar_bar: f64,
    pub e2_bar: f64,
}

fn mean_and_max_dev(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).abs()).fold(0.0f64, f64::max);
    (mean, dev)
}

/// Cross-seed statistics from raw per-seed estimator outputs.
pub fn cross_seed_stats_from_values(
    dt0: &[f64],
    dt_tau: &[f64],
    theta0: &[f64],
    theta_tau: &[f64],
    tau: f64,
) -> Result<CrossSeedStats> {
    let n = dt0.len();
    if n < 2 {
        return Err(Error::Grouping("cross-seed statistics need at least 2 records".into()));
    }
    if dt_tau.len() != n || theta0.len() != n || theta_tau.len() != n {
        return Err(Error::Grouping("per-seed value lists must have equal length".into()));
    }
    if tau == 0.0 {
        return Err(Error::Config("cross-seed sensitivity is undefined at tau = 0".into()));
    }
    let (mean_dt0, e_t0_bar) = mean_and_max_dev(dt0);
    let (mean_dt_tau, e_t_tau_bar) = mean_and_max_dev(dt_tau);
    let (mean_theta0, e_c0_bar) = mean_and_max_dev(theta0);
    let (mean_theta_tau, e_c_tau_bar) = mean_and_max_dev(theta_tau);
    let delta_dt_bar = mean_dt_tau - mean_dt0;
    let delta_theta_bar = mean_theta0 - mean_theta_tau;
    Ok(CrossSeedStats {
        mean_dt0,
        e_t0_bar,
        mean_dt_tau,
        e_t_tau_bar,
        delta_dt_bar,
        k1_bar: delta_dt_bar / tau,
        e1_bar: (e_t0_bar + e_t_tau_bar) / tau.abs(),
        mean_theta0,
        e_c0_bar,
        mean_theta_tau,
        e_c_tau_bar,
        delta_theta_bar,
        k2_bar_bar: delta_theta_bar / tau,
        e2_bar: (e_c0_bar + e_c_tau_bar) / tau.abs(),
    })
}

/// Cross-seed statistics over records sharing one (τ, SNR) condition.
pub fn cross_seed_stats(records: &[RunRecord]) -> Result<CrossSeedStats> {
    if records.len() < 2 {
        return Err(Error::Grouping("cross-seed statistics need at least 2 records".into()));
    }
    let tau = records[0].tau;
    let snr = records[0].snr_db_target;
    for r in records {
        let same_snr = match (r.snr_db_target, snr) {
            (Some(a), Some(b)) => a.to_bits() == b.to_bits(),
            (None, None) => true,
            _ => false,
        };
        if r.tau.to_bits() != tau.to_bits() || !same_snr {
            return Err(Error::Grouping(
                "records mix (tau, snr) conditions; group before aggregating".into(),
            ));
        }
    }
    let dt0: Vec<f64> = records.iter().map(|r| r.wva.fit0.delta_t).collect();
    let dt_tau: Vec<f64> = records.iter().map(|r| r.wva.fit_tau.delta_t).collect();
    let theta0: Vec<f64> = records.iter().map(|r| r.awva.theta0).collect();
    let theta_tau: Vec<f64> = records.iter().map(|r| r.awva.theta_tau).collect();
    cross_seed_stats_from_values(&dt0, &dt_tau, &theta0, &theta_tau, tau)
}

/// Aggregates for one (τ, SNR) group of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAggregate {
    pub tau: f64,
    pub snr_db_target: f64,
    pub ensemble: EnsembleStats,
    /// Present when the group has at least two seeds.
    pub cross: Option<CrossSeedStats>,
}

/// Full output of a sweep: per-run records in deterministic order plus
/// per-group aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<RunRecord>,
    pub groups: Vec<GroupAggregate>,
}

type RunParams = (f64, Option<f64>, u64);

fn sweep_params(plan: &ExperimentPlan) -> Vec<RunParams> {
    let mut taus = plan.taus.clone();
    taus.sort_by(f64::total_cmp);
    let mut snrs = plan.snr_targets_db.clone();
    snrs.sort_by(|a, b| f64::total_cmp(b, a)); // strongest SNR first
    let mut seeds = plan.seeds.clone();
    seeds.sort_unstable();
    let mut params = Vec::new();
    for &tau in &taus {
        params.push((tau, None, 0));
        for &snr in &snrs {
            for &seed in &seeds {
                params.push((tau, Some(snr), seed));
            }
        }
    }
    params
}

/// Group records by (τ, SNR) in record order and aggregate each group.
pub fn group_records(records: &[RunRecord]) -> Result<Vec<GroupAggregate>> {
    let mut groups = Vec::new();
    let mut key_order: Vec<(u64, u64)> = Vec::new();
    for r in records {
        if let Some(snr) = r.snr_db_target {
            let key = (r.tau.to_bits(), snr.to_bits());
            if !key_order.contains(&key) {
                key_order.push(key);
            }
        }
    }
    for (tau_bits, snr_bits) in key_order {
        let members: Vec<RunRecord> = records
            .iter()
            .filter(|r| {
                r.tau.to_bits() == tau_bits
                    && r.snr_db_target.map(f64::to_bits) == Some(snr_bits)
            })
            .copied()
            .collect();
        let per_seed: Vec<f64> = members
            .iter()
            .map(|r| r.awva.sensitivity.k2_at_report)
            .collect();
        groups.push(GroupAggregate {
            tau: f64::from_bits(tau_bits),
            snr_db_target: f64::from_bits(snr_bits),
            ensemble: ensemble_stats(&per_seed)?,
            cross: if members.len() >= 2 { Some(cross_seed_stats(&members)?) } else { None },
        });
    }
    Ok(groups)
}

/// Run the full Cartesian sweep single-threaded.
///
/// This is the reference execution path; [`sweep`] must produce identical
/// output record for record.
pub fn sweep_serial(plan: &ExperimentPlan) -> Result<SweepResult> {
    plan.validate()?;
    let params = sweep_params(plan);
    let records = params
        .iter()
        .map(|&(tau, snr, seed)| run_single(plan, tau, snr, seed))
        .collect::<Result<Vec<_>>>()?;
    let groups = group_records(&records)?;
    Ok(SweepResult { records, groups })
}

/// Run the full Cartesian sweep over (τ, SNR, seed).
///
/// Records are ordered by (τ ascending, noiseless baseline first, SNR
/// descending, seed ascending) regardless of how the work is scheduled.
#[cfg(feature = "parallel")]
pub fn sweep(plan: &ExperimentPlan) -> Result<SweepResult> {
    plan.validate()?;
    let params = sweep_params(plan);
    let records = params
        .par_iter()
        .map(|&(tau, snr, seed)| run_single(plan, tau, snr, seed))
        .collect::<Result<Vec<_>>>()?;
    let groups = group_records(&records)?;
    Ok(SweepResult { records, groups })
}

/// Run the full Cartesian sweep over (τ, SNR, seed), single-threaded build.
#[cfg(not(feature = "parallel"))]
pub fn sweep(plan: &ExperimentPlan) -> Result<SweepResult> {
    sweep_serial(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan() -> ExperimentPlan {
        ExperimentPlan {
            taus: vec![3e-9, 6e-9],
            snr_targets_db: vec![6.6, 1.4],
            seeds: vec![0, 100, 200],
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_run_reproduces_reference_rows() {
        let plan = ExperimentPlan::default();
        let rec = run_single(&plan, 3e-9, None, 0).unwrap();
        // WVA row: delta_t = 3.00e-5 s, K1 = 1.0e4
        assert!((rec.wva.fit_tau.delta_t - 3.00e-5).abs() < 1e-9);
        assert!(((rec.wva.sensitivity.k1 - 1.0e4) / 1.0e4).abs() < 1e-4);
        assert!(rec.wva.sensitivity.valid);
        // AWVA row: Θ0 = 1.2442e-9, Θτ = 1.1666e-9, ΔΘ = 7.76e-11 within 1%
        assert!(((rec.awva.theta0 - 1.2442e-9) / 1.2442e-9).abs() < 0.01);
        assert!(((rec.awva.theta_tau - 1.1666e-9) / 1.1666e-9).abs() < 0.01);
        assert!(((rec.awva.delta_theta - 7.76e-11) / 7.76e-11).abs() < 0.01);
        // noise fields empty
        assert!(rec.seed.is_none());
        assert!(rec.sigma2.is_none());
        assert!(rec.snr_db_realized.is_none());
    }

    #[test]
    fn run_single_is_deterministic() {
        let plan = ExperimentPlan::default();
        let a = run_single(&plan, 3e-9, Some(1.4), 200).unwrap();
        let b = run_single(&plan, 3e-9, Some(1.4), 200).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn after_bs_offset_is_exact() {
        let plan = ExperimentPlan::default();
        let rec = run_single(&plan, 3e-9, Some(6.6), 0).unwrap();
        let realized = rec.snr_db_realized.unwrap();
        assert!((realized - 6.6).abs() < 1e-9, "realized {realized}");
        let star = rec.snr_star_db.unwrap();
        assert_eq!(star.to_bits(), (realized - 10.0 * 2.0f64.log10()).to_bits());
    }

    #[test]
    fn before_bs_keeps_snr_star_equal() {
        let plan = ExperimentPlan {
            noise_injection: NoiseInjection::BeforeBs,
            ..Default::default()
        };
        let rec = run_single(&plan, 3e-9, Some(6.6), 0).unwrap();
        assert_eq!(rec.snr_star_db, rec.snr_db_realized);
    }

    #[test]
    fn independent_pairing_changes_only_the_awva_side() {
        let shared = run_single(&ExperimentPlan::default(), 3e-9, Some(1.4), 0).unwrap();
        let plan = ExperimentPlan {
            noise_pairing: NoisePairing::IndependentTraces,
            ..Default::default()
        };
        let indep = run_single(&plan, 3e-9, Some(1.4), 0).unwrap();
        assert_eq!(shared.wva, indep.wva);
        assert_ne!(shared.awva, indep.awva);
    }

    #[test]
    fn ensemble_stats_examples() {
        let s = ensemble_stats(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean_k2, 2.0);
        assert_eq!(s.e2, 1.0);
        let single = ensemble_stats(&[0.7]).unwrap();
        assert_eq!(single.mean_k2, 0.7);
        assert_eq!(single.e2, 0.0);
        assert!(ensemble_stats(&[]).is_err());
    }

    #[test]
    fn ensemble_mean_matches_published_column() {
        // the seven K2 values of the reference table's strongest-signal block
        let col = [0.0256, 0.0257, 0.0254, 0.0263, 0.0262, 0.0256, 0.0261];
        let s = ensemble_stats(&col).unwrap();
        assert!((s.mean_k2 - 0.025842857142857144).abs() < 1e-15);
        assert!(s.mean_k2 >= col.iter().cloned().fold(f64::INFINITY, f64::min));
        assert!(s.mean_k2 <= col.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }

    #[test]
    fn run_ensemble_matches_the_sweep_group() {
        let plan = ExperimentPlan {
            taus: vec![3e-9],
            snr_targets_db: vec![6.6],
            seeds: vec![0, 100, 200],
            ..Default::default()
        };
        let ens = run_ensemble(&plan, 3e-9, Some(6.6)).unwrap();
        assert_eq!(ens.per_seed.len(), 3);
        let swept = sweep_serial(&plan).unwrap();
        assert_eq!(swept.groups[0].ensemble, ens);
        // noiseless condition collapses to one repeated value
        let base = run_ensemble(&plan, 3e-9, None).unwrap();
        assert_eq!(base.e2, 0.0);
    }

    #[test]
    fn cross_seed_stats_requires_a_consistent_group() {
        let plan = small_plan();
        let a = run_single(&plan, 3e-9, Some(6.6), 0).unwrap();
        let b = run_single(&plan, 3e-9, Some(6.6), 100).unwrap();
        let c = run_single(&plan, 3e-9, Some(1.4), 100).unwrap();
        assert!(cross_seed_stats(&[a, b]).is_ok());
        assert!(cross_seed_stats(&[a]).is_err());
        assert!(cross_seed_stats(&[a, c]).is_err());
    }

    #[test]
    fn cross_seed_stats_identical_records_have_zero_spread() {
        let plan = small_plan();
        let a = run_single(&plan, 3e-9, Some(6.6), 0).unwrap();
        let s = cross_seed_stats(&[a, a]).unwrap();
        assert_eq!(s.e_t0_bar, 0.0);
        assert_eq!(s.e_t_tau_bar, 0.0);
        assert_eq!(s.e_c0_bar, 0.0);
        assert_eq!(s.e_c_tau_bar, 0.0);
        assert_eq!(s.e1_bar, 0.0);
        assert_eq!(s.e2_bar, 0.0);
    }

    #[test]
    fn sweep_counts_and_grouping() {
        let plan = small_plan();
        let result = sweep_serial(&plan).unwrap();
        // 2 taus * (1 baseline + 2 snr * 3 seeds) = 14 records
        assert_eq!(result.records.len(), 14);
        assert_eq!(result.groups.len(), 4); // |taus| * |snrs|
        for g in &result.groups {
            assert_eq!(g.ensemble.per_seed.len(), 3);
            assert!(g.cross.is_some());
        }
    }

    #[test]
    fn sweep_order_is_independent_of_plan_list_order() {
        let plan = small_plan();
        let shuffled = ExperimentPlan {
            taus: vec![6e-9, 3e-9],
            snr_targets_db: vec![1.4, 6.6],
            seeds: vec![200, 0, 100],
            ..plan.clone()
        };
        let a = sweep_serial(&plan).unwrap();
        let b = sweep_serial(&shuffled).unwrap();
        assert_eq!(a, b);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_serial_sweeps_agree_exactly() {
        let plan = ExperimentPlan {
            taus: vec![3e-9],
            snr_targets_db: vec![6.6, -3.3],
            seeds: vec![0, 100, 200],
            ..Default::default()
        };
        let serial = sweep_serial(&plan).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let parallel = pool.install(|| sweep(&plan)).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn rejects_invalid_plans() {
        let no_taus = ExperimentPlan { taus: vec![], ..Default::default() };
        assert!(no_taus.validate().is_err());
        let zero_tau = ExperimentPlan { taus: vec![0.0], ..Default::default() };
        assert!(zero_tau.validate().is_err());
        let no_seeds = ExperimentPlan { seeds: vec![], ..Default::default() };
        assert!(no_seeds.validate().is_err());
        let off_grid = ExperimentPlan { report_time: 1.50003e-3, ..Default::default() };
        assert!(off_grid.validate().is_err());
    }
}
