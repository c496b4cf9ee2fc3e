//! Command-line front end for the delay-measurement simulator.
//!
//! Subcommands: `simulate` (one run), `sweep` (full Monte Carlo campaign),
//! `fit` / `theta` / `spectrum` (estimators on trace CSV files), and
//! `report` (aggregates and plots from a runs CSV).
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 I/O error.

mod config;
mod csvio;
mod errors;
mod svg;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use awva_core::{
    fit_gaussian_with, group_records, run_single_with_traces, spectrum, sweep, theta_curve,
    FitOptions, GroupAggregate, PointerConfig, RunRecord, Trace,
};

use config::{echo_config, load_config, ConfigDocument};
use errors::{CliError, CliResult};
use svg::{PlotKind, PlotLabels, Series};

#[derive(Parser)]
#[command(
    name = "awva",
    version,
    about = "Weak-value amplification delay measurement: simulation, estimation, reporting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one measurement and write its record, traces, and curves.
    Simulate {
        /// Time delay tau in seconds.
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        /// Target SNR in dB; omit for the noiseless baseline.
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        /// Noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configuration file (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Also render SVG plots of the traces and curves.
        #[arg(long)]
        plots: bool,
    },
    /// Run the full (tau x SNR x seed) sweep and write records + aggregates.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Also render sensitivity plots.
        #[arg(long)]
        plots: bool,
    },
    /// Fit a Gaussian pulse to a trace CSV and print the estimate.
    Fit {
        /// Trace CSV with a `t_s,value` header.
        #[arg(long)]
        input: PathBuf,
        /// Pulse-center reference in seconds; the printed shift is against it.
        #[arg(long, default_value_t = 1.5e-3)]
        t0: f64,
        /// Fit a constant baseline as a fourth parameter.
        #[arg(long)]
        with_offset: bool,
    },
    /// Integrate the product of two traces and write the running integral.
    Theta {
        #[arg(long)]
        input_a: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        /// Output CSV; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// FFT magnitude and periodogram of a trace.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Output CSV; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a runs CSV into per-group statistics (and plots).
    Report {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long)]
        plots: bool,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default exit code for usage errors clashes with the
            // numerical-failure code; usage problems are configuration errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { tau, snr_db, seed, config, out_dir, plots } => {
            run_simulate(tau, snr_db, seed, config.as_deref(), &out_dir, plots)
        }
        Command::Sweep { config, out_dir, plots } => run_sweep(config.as_deref(), &out_dir, plots),
        Command::Fit { input, t0, with_offset } => run_fit(&input, t0, with_offset),
        Command::Theta { input_a, input_b, out } => run_theta(&input_a, &input_b, out.as_deref()),
        Command::Spectrum { input, out } => run_spectrum(&input, out.as_deref()),
        Command::Report { runs, out_dir, plots } => run_report(&runs, &out_dir, plots),
    }
}

fn load_or_default(config: Option<&Path>) -> CliResult<ConfigDocument> {
    match config {
        Some(path) => load_config(path),
        None => Ok(ConfigDocument::default()),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))
}

fn write_metadata(doc: &ConfigDocument, path: &Path) -> CliResult<()> {
    let lm = FitOptions::default();
    let content = format!(
        "# awva run metadata\n\
         artifact_version = {}\n\
         prng = xoshiro256** (state seeded from xi via SplitMix64), Box-Muller transform, \
         fixed two-uniform pair order\n\
         fft = forward FFT zero-padded to the next power of two\n\
         integration = trapezoid rule on the uniform grid\n\
         lm_settings = lambda0={}, up=x{}, down=/{}, tolerance={}, max_iterations={}, \
         offset_term={}\n\
         \n\
         # resolved configuration (reproduces this run exactly)\n\
         {}",
        env!("CARGO_PKG_VERSION"),
        lm.lambda_init,
        lm.lambda_up,
        lm.lambda_down,
        lm.tolerance,
        lm.max_iterations,
        if lm.with_offset { "on" } else { "off" },
        echo_config(doc),
    );
    std::fs::write(path, content)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// Stride-decimate a trace for plotting (full data stays in the CSVs).
fn plot_points(trace: &Trace, max_points: usize) -> (Vec<f64>, Vec<f64>) {
    let stride = trace.values.len().div_ceil(max_points).max(1);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for k in (0..trace.values.len()).step_by(stride) {
        x.push(trace.grid.time_at(k));
        y.push(trace.values[k]);
    }
    (x, y)
}

fn run_flagged_non_converged(record: &RunRecord) -> bool {
    !(record.wva.fit0.converged && record.wva.fit_tau.converged)
}

fn run_simulate(
    tau: f64,
    snr_db: Option<f64>,
    seed: u64,
    config: Option<&Path>,
    out_dir: &Path,
    plots_flag: bool,
) -> CliResult<()> {
    let doc = load_or_default(config)?;
    let (record, artifacts) = run_single_with_traces(&doc.plan, tau, snr_db, seed)?;
    ensure_dir(out_dir)?;
    csvio::write_runs_csv(std::slice::from_ref(&record), &out_dir.join("runs.csv"))?;
    write_metadata(&doc, &out_dir.join("metadata.txt"))?;
    csvio::write_trace_csv(&artifacts.i1_baseline, &out_dir.join("i1_baseline.csv"))?;
    csvio::write_trace_csv(&artifacts.i1, &out_dir.join("i1.csv"))?;
    csvio::write_trace_csv(&artifacts.i21, &out_dir.join("i21.csv"))?;
    csvio::write_trace_csv(&artifacts.i22, &out_dir.join("i22.csv"))?;
    csvio::write_theta_csv(&artifacts.theta0, &out_dir.join("theta0.csv"))?;
    csvio::write_theta_csv(&artifacts.theta_tau, &out_dir.join("theta_tau.csv"))?;
    csvio::write_trace_csv(&artifacts.k2, &out_dir.join("k2_curve.csv"))?;
    if let Some(noise) = &artifacts.noise {
        csvio::write_trace_csv(noise, &out_dir.join("noise.csv"))?;
        csvio::write_spectrum_csv(&spectrum(noise)?, &out_dir.join("noise_spectrum.csv"))?;
    }

    if plots_flag || doc.plots {
        let mut series = Vec::new();
        for (name, trace) in [
            ("i1", &artifacts.i1),
            ("i21", &artifacts.i21),
            ("i22", &artifacts.i22),
        ] {
            let (x, y) = plot_points(trace, 2000);
            series.push(Series::lines(name, x, y));
        }
        svg::render_svg(
            &series,
            PlotKind::Lines,
            &PlotLabels {
                title: "Detector traces".into(),
                x_label: "t [s]".into(),
                y_label: "intensity [I0]".into(),
            },
            &out_dir.join("traces.svg"),
        )?;

        let theta0_trace = Trace::new(
            artifacts.theta0.grid,
            artifacts.theta0.values.clone(),
            awva_core::TraceUnit::IntensitySquaredSeconds,
        )?;
        let theta_tau_trace = Trace::new(
            artifacts.theta_tau.grid,
            artifacts.theta_tau.values.clone(),
            awva_core::TraceUnit::IntensitySquaredSeconds,
        )?;
        let mut theta_series = Vec::new();
        for (name, trace) in [("theta0", &theta0_trace), ("theta_tau", &theta_tau_trace)] {
            let (x, y) = plot_points(trace, 2000);
            theta_series.push(Series::lines(name, x, y));
        }
        svg::render_svg(
            &theta_series,
            PlotKind::Lines,
            &PlotLabels {
                title: "Auto-correlative intensity".into(),
                x_label: "integration time [s]".into(),
                y_label: "theta [I0^2 s]".into(),
            },
            &out_dir.join("theta.svg"),
        )?;

        let (kx, ky) = plot_points(&artifacts.k2, 2000);
        svg::render_svg(
            &[Series::lines("K2(t)", kx, ky)],
            PlotKind::Lines,
            &PlotLabels {
                title: "AWVA sensitivity vs integration time".into(),
                x_label: "integration time [s]".into(),
                y_label: "K2".into(),
            },
            &out_dir.join("k2_curve.svg"),
        )?;
    }

    println!("tau_s = {}", csvio::fmt_float(record.tau));
    if let Some(snr) = record.snr_db_realized {
        println!("snr_db_realized = {}", csvio::fmt_float(snr));
        println!("snr_star_db = {}", csvio::fmt_float(record.snr_star_db.unwrap_or(snr)));
    }
    println!("delta_t_tau_s = {}", csvio::fmt_float(record.wva.fit_tau.delta_t));
    println!("k1 = {}", csvio::fmt_float(record.wva.sensitivity.k1));
    println!("theta0 = {}", csvio::fmt_float(record.awva.theta0));
    println!("theta_tau = {}", csvio::fmt_float(record.awva.theta_tau));
    println!("k2_at_report = {}", csvio::fmt_float(record.awva.sensitivity.k2_at_report));
    println!("wva_valid = {}", record.wva.sensitivity.valid);

    if run_flagged_non_converged(&record) {
        return Err(CliError::Numerical(
            "the run's Gaussian fits did not converge (outputs were still written)".into(),
        ));
    }
    Ok(())
}

fn run_sweep(config: Option<&Path>, out_dir: &Path, plots_flag: bool) -> CliResult<()> {
    let doc = load_or_default(config)?;
    let result = sweep(&doc.plan)?;
    ensure_dir(out_dir)?;
    csvio::write_runs_csv(&result.records, &out_dir.join("runs.csv"))?;
    csvio::write_aggregates_csv(&result.groups, &out_dir.join("aggregates.csv"))?;
    write_metadata(&doc, &out_dir.join("metadata.txt"))?;
    if plots_flag || doc.plots {
        write_sensitivity_plots(&result.records, &result.groups, out_dir)?;
    }

    let non_converged = result.records.iter().filter(|r| run_flagged_non_converged(r)).count();
    let invalid = result.records.iter().filter(|r| !r.wva.sensitivity.valid).count();
    println!("records = {}", result.records.len());
    println!("groups = {}", result.groups.len());
    println!("non_converged_runs = {non_converged}");
    println!("invalid_wva_runs = {invalid}");

    if !result.records.is_empty() && non_converged == result.records.len() {
        return Err(CliError::Numerical(
            "every run's fits failed to converge (outputs were still written)".into(),
        ));
    }
    Ok(())
}

/// Sensitivity-vs-SNR plots for the smallest tau of a sweep.
fn write_sensitivity_plots(
    records: &[RunRecord],
    groups: &[GroupAggregate],
    out_dir: &Path,
) -> CliResult<()> {
    let Some(tau) = groups.iter().map(|g| g.tau).reduce(f64::min) else {
        return Ok(());
    };

    let awva: Vec<&GroupAggregate> = groups.iter().filter(|g| g.tau == tau).collect();
    let x: Vec<f64> = awva.iter().map(|g| g.snr_db_target).collect();
    let y: Vec<f64> = awva.iter().map(|g| g.ensemble.mean_k2).collect();
    let e: Vec<f64> = awva.iter().map(|g| g.ensemble.e2).collect();
    svg::render_svg(
        &[Series::error_bars("mean K2 +/- E2", x, y, e)],
        PlotKind::ErrorBars,
        &PlotLabels {
            title: "AWVA sensitivity vs SNR".into(),
            x_label: "target SNR [dB]".into(),
            y_label: "K2".into(),
        },
        &out_dir.join("awva_sensitivity.svg"),
    )?;

    // one error-bar series per seed, as in the per-measurement tables
    let mut seeds: Vec<u64> = records.iter().filter_map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let mut series = Vec::new();
    for seed in seeds {
        let members: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.tau == tau && r.seed == Some(seed))
            .collect();
        if members.is_empty() {
            continue;
        }
        series.push(Series::error_bars(
            &format!("seed {seed}"),
            members.iter().map(|r| r.snr_db_target.unwrap_or(f64::NAN)).collect(),
            members.iter().map(|r| r.wva.sensitivity.k1).collect(),
            members.iter().map(|r| r.wva.sensitivity.e1).collect(),
        ));
    }
    if !series.is_empty() {
        svg::render_svg(
            &series,
            PlotKind::ErrorBars,
            &PlotLabels {
                title: "WVA sensitivity vs SNR".into(),
                x_label: "target SNR [dB]".into(),
                y_label: "K1".into(),
            },
            &out_dir.join("wva_sensitivity.svg"),
        )?;
    }
    Ok(())
}

fn run_fit(input: &Path, t0: f64, with_offset: bool) -> CliResult<()> {
    let trace = csvio::read_trace_csv(input)?;
    let pointer = PointerConfig { t0, ..Default::default() };
    let opts = FitOptions { with_offset, ..Default::default() };
    let fit = fit_gaussian_with(&trace, &pointer, &opts)?;
    println!("delta_t_s = {}", csvio::fmt_float(fit.delta_t));
    println!("se_delta_t_s = {}", csvio::fmt_float(fit.se_delta_t));
    println!("amplitude = {}", csvio::fmt_float(fit.amplitude));
    println!("width_s = {}", csvio::fmt_float(fit.width));
    println!("offset = {}", csvio::fmt_float(fit.offset));
    println!("converged = {}", fit.converged);
    println!("iterations = {}", fit.iterations);
    println!("residual_norm = {}", csvio::fmt_float(fit.residual_norm));
    if !fit.converged {
        return Err(CliError::Numerical("fit did not converge".into()));
    }
    Ok(())
}

fn run_theta(input_a: &Path, input_b: &Path, out: Option<&Path>) -> CliResult<()> {
    let a = csvio::read_trace_csv(input_a)?;
    let b = csvio::read_trace_csv(input_b)?;
    let curve = theta_curve(&a, &b)?;
    println!("theta_final = {}", csvio::fmt_float(curve.final_value()));
    match out {
        Some(path) => csvio::write_theta_csv(&curve, path)?,
        None => {
            let trace =
                Trace::new(curve.grid, curve.values.clone(), awva_core::TraceUnit::IntensitySquaredSeconds)?;
            print!("{}", csvio::trace_to_csv(&trace));
        }
    }
    Ok(())
}

fn run_spectrum(input: &Path, out: Option<&Path>) -> CliResult<()> {
    let trace = csvio::read_trace_csv(input)?;
    let s = spectrum(&trace)?;
    println!("fft_len = {}", s.fft_len);
    println!("zero_padded = {}", s.zero_padded);
    match out {
        Some(path) => csvio::write_spectrum_csv(&s, path)?,
        None => print!("{}", csvio::spectrum_to_csv(&s)),
    }
    Ok(())
}

fn run_report(runs: &Path, out_dir: &Path, plots: bool) -> CliResult<()> {
    let records = csvio::read_runs_csv(runs)?;
    if records.is_empty() {
        return Err(CliError::Config(format!("{} holds no records", runs.display())));
    }
    let groups = group_records(&records)?;
    ensure_dir(out_dir)?;
    csvio::write_aggregates_csv(&groups, &out_dir.join("aggregates.csv"))?;
    if plots {
        write_sensitivity_plots(&records, &groups, out_dir)?;
    }
    println!("records = {}", records.len());
    println!("groups = {}", groups.len());
    Ok(())
}
