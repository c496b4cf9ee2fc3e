//! CSV serialization of traces, spectra, run records, and aggregates.
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 exactly and is locale-independent. Optional fields
//! (seed, noise parameters of baseline rows) serialize as empty cells.

use std::path::Path;

use awva_core::{
    fit::FitResult,
    grid::{TimeGrid, Trace, TraceUnit},
    sensitivity::{AwvaSensitivity, WvaSensitivity},
    AwvaOutcome, GroupAggregate, RunRecord, Spectrum, ThetaCurve, WvaOutcome,
};

use crate::errors::{CliError, CliResult};

pub const RUNS_HEADER: &str = "scheme,tau_s,snr_db_target,snr_db_realized,snr_star_db,seed,\
sigma2,delta_t0_s,se_t0_s,delta_t_tau_s,se_t_tau_s,k1,e1,theta0,theta_tau,delta_theta,\
k2_at_report,k2_max,t_at_max_s,valid";

pub const AGGREGATES_HEADER: &str = "tau_s,snr_db_target,n_seeds,mean_k2,e2,mean_dt0_s,\
e_t0_bar_s,mean_dt_tau_s,e_t_tau_bar_s,delta_dt_bar_s,k1_bar,e1_bar,mean_theta0,e_c0_bar,\
mean_theta_tau,e_c_tau_bar,delta_theta_bar,k2_bar_bar,e2_bar";

/// 17-significant-digit scientific notation; exact f64 round-trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> CliResult<T> {
    field
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse {what} from `{field}`")))
}

fn parse_opt(field: &str, what: &str, line: usize) -> CliResult<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_field::<f64>(field, what, line).map(Some)
    }
}

/// Serialize run records in their given order.
pub fn runs_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 256 + RUNS_HEADER.len());
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for r in records {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "both,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_float(r.tau),
            fmt_opt(r.snr_db_target),
            fmt_opt(r.snr_db_realized),
            fmt_opt(r.snr_star_db),
            seed,
            fmt_opt(r.sigma2),
            fmt_float(r.wva.fit0.delta_t),
            fmt_float(r.wva.fit0.se_delta_t),
            fmt_float(r.wva.fit_tau.delta_t),
            fmt_float(r.wva.fit_tau.se_delta_t),
            fmt_float(r.wva.sensitivity.k1),
            fmt_float(r.wva.sensitivity.e1),
            fmt_float(r.awva.theta0),
            fmt_float(r.awva.theta_tau),
            fmt_float(r.awva.delta_theta),
            fmt_float(r.awva.sensitivity.k2_at_report),
            fmt_float(r.awva.sensitivity.k2_max),
            fmt_float(r.awva.sensitivity.t_at_max),
            r.wva.sensitivity.valid,
        ));
    }
    out
}

pub fn write_runs_csv(records: &[RunRecord], path: &Path) -> CliResult<()> {
    if records.is_empty() {
        return Err(CliError::Config("no run records to serialize".into()));
    }
    write_file(path, &runs_to_csv(records))
}

/// Parse a runs CSV back into records.
///
/// Only the table columns are reconstructed; fit diagnostics that are not
/// serialized (iterations, residual norm, amplitude, width) come back as
/// placeholders, with `converged` inferred from the validity flag.
pub fn read_runs_csv(path: &Path) -> CliResult<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RUNS_HEADER => {}
        _ => {
            return Err(CliError::Config(format!(
                "{}: missing or unexpected runs header",
                path.display()
            )))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 20 {
            return Err(CliError::Config(format!(
                "line {line_no}: expected 20 fields, found {}",
                fields.len()
            )));
        }
        if fields[0] != "both" {
            return Err(CliError::Config(format!(
                "line {line_no}: unknown scheme `{}`",
                fields[0]
            )));
        }
        let tau = parse_field::<f64>(fields[1], "tau_s", line_no)?;
        let seed = if fields[5].is_empty() {
            None
        } else {
            Some(parse_field::<u64>(fields[5], "seed", line_no)?)
        };
        let valid = parse_field::<bool>(fields[19], "valid", line_no)?;
        let fit = |delta_t: f64, se: f64| FitResult {
            delta_t,
            se_delta_t: se,
            amplitude: 0.0,
            width: 0.0,
            offset: 0.0,
            converged: valid,
            iterations: 0,
            residual_norm: 0.0,
        };
        let k2_at_report = parse_field::<f64>(fields[16], "k2_at_report", line_no)?;
        records.push(RunRecord {
            tau,
            snr_db_target: parse_opt(fields[2], "snr_db_target", line_no)?,
            snr_db_realized: parse_opt(fields[3], "snr_db_realized", line_no)?,
            snr_star_db: parse_opt(fields[4], "snr_star_db", line_no)?,
            seed,
            sigma2: parse_opt(fields[6], "sigma2", line_no)?,
            wva: WvaOutcome {
                fit0: fit(
                    parse_field(fields[7], "delta_t0_s", line_no)?,
                    parse_field(fields[8], "se_t0_s", line_no)?,
                ),
                fit_tau: fit(
                    parse_field(fields[9], "delta_t_tau_s", line_no)?,
                    parse_field(fields[10], "se_t_tau_s", line_no)?,
                ),
                sensitivity: WvaSensitivity {
                    k1: parse_field(fields[11], "k1", line_no)?,
                    e1: parse_field(fields[12], "e1", line_no)?,
                    valid,
                },
            },
            awva: AwvaOutcome {
                theta0: parse_field(fields[13], "theta0", line_no)?,
                theta_tau: parse_field(fields[14], "theta_tau", line_no)?,
                delta_theta: parse_field(fields[15], "delta_theta", line_no)?,
                sensitivity: AwvaSensitivity {
                    k2_at_report,
                    k2_max: parse_field(fields[17], "k2_max", line_no)?,
                    t_at_max: parse_field(fields[18], "t_at_max_s", line_no)?,
                    valid: k2_at_report > 0.0,
                },
            },
        });
    }
    Ok(records)
}

/// Serialize per-group aggregates.
pub fn aggregates_to_csv(groups: &[GroupAggregate]) -> String {
    let mut out = String::from(AGGREGATES_HEADER);
    out.push('\n');
    for g in groups {
        let cross = g.cross.as_ref();
        let field = |f: fn(&awva_core::CrossSeedStats) -> f64| {
            cross.map(|c| fmt_float(f(c))).unwrap_or_default()
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_float(g.tau),
            fmt_float(g.snr_db_target),
            g.ensemble.per_seed.len(),
            fmt_float(g.ensemble.mean_k2),
            fmt_float(g.ensemble.e2),
            field(|c| c.mean_dt0),
            field(|c| c.e_t0_bar),
            field(|c| c.mean_dt_tau),
            field(|c| c.e_t_tau_bar),
            field(|c| c.delta_dt_bar),
            field(|c| c.k1_bar),
            field(|c| c.e1_bar),
            field(|c| c.mean_theta0),
            field(|c| c.e_c0_bar),
            field(|c| c.mean_theta_tau),
            field(|c| c.e_c_tau_bar),
            field(|c| c.delta_theta_bar),
            field(|c| c.k2_bar_bar),
            field(|c| c.e2_bar),
        ));
    }
    out
}

pub fn write_aggregates_csv(groups: &[GroupAggregate], path: &Path) -> CliResult<()> {
    write_file(path, &aggregates_to_csv(groups))
}

/// Serialize a trace as `t_s,value` rows.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.values.len() * 48 + 16);
    out.push_str("t_s,value\n");
    for (k, v) in trace.values.iter().enumerate() {
        out.push_str(&fmt_float(trace.grid.time_at(k)));
        out.push(',');
        out.push_str(&fmt_float(*v));
        out.push('\n');
    }
    out
}

pub fn write_trace_csv(trace: &Trace, path: &Path) -> CliResult<()> {
    write_file(path, &trace_to_csv(trace))
}

pub fn write_theta_csv(curve: &ThetaCurve, path: &Path) -> CliResult<()> {
    let trace = Trace::new(curve.grid, curve.values.clone(), TraceUnit::IntensitySquaredSeconds)?;
    write_trace_csv(&trace, path)
}

/// Read a `t_s,value` trace, rebuilding the uniform grid from the time column.
pub fn read_trace_csv(path: &Path) -> CliResult<Trace> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "t_s,value")) => {}
        _ => {
            return Err(CliError::Config(format!(
                "{}: expected `t_s,value` header",
                path.display()
            )))
        }
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (t, v) = line.split_once(',').ok_or_else(|| {
            CliError::Config(format!("line {line_no}: expected `t,value`"))
        })?;
        times.push(parse_field::<f64>(t, "t_s", line_no)?);
        values.push(parse_field::<f64>(v, "value", line_no)?);
    }
    if times.len() < 2 {
        return Err(CliError::Config("trace needs at least 2 samples".into()));
    }
    let dt = times[1] - times[0];
    if dt.is_nan() || dt <= 0.0 {
        return Err(CliError::Config("trace time column must be increasing".into()));
    }
    for (k, t) in times.iter().enumerate() {
        let expect = times[0] + k as f64 * dt;
        if (t - expect).abs() > 1e-6 * dt {
            return Err(CliError::Config(format!(
                "trace is not uniformly sampled at row {k}"
            )));
        }
    }
    let grid = TimeGrid {
        t_start: times[0],
        t_end: *times.last().expect("nonempty"),
        dt,
        n: times.len(),
    };
    Trace::new(grid, values, TraceUnit::Intensity).map_err(CliError::from)
}

pub fn spectrum_to_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("freq_hz,psd,magnitude\n");
    for k in 0..spectrum.freqs.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_float(spectrum.freqs[k]),
            fmt_float(spectrum.psd[k]),
            fmt_float(spectrum.magnitude[k])
        ));
    }
    out
}

pub fn write_spectrum_csv(spectrum: &Spectrum, path: &Path) -> CliResult<()> {
    write_file(path, &spectrum_to_csv(spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use awva_core::{run_single, ExperimentPlan};

    #[test]
    fn float_formatting_round_trips_exactly() {
        for x in [0.0, 3e-9, -6.3, 1.5e-3, 44.66219208690012, f64::MIN_POSITIVE] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn runs_csv_round_trip_is_byte_identical() {
        let plan = ExperimentPlan::default();
        let records = vec![
            run_single(&plan, 3e-9, None, 0).unwrap(),
            run_single(&plan, 3e-9, Some(6.6), 0).unwrap(),
            run_single(&plan, 3e-9, Some(-6.3), 600).unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        write_runs_csv(&records, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        let parsed = read_runs_csv(&path).unwrap();
        assert_eq!(parsed.len(), 3);
        write_runs_csv(&parsed, &path).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn baseline_rows_have_empty_noise_fields() {
        let plan = ExperimentPlan::default();
        let record = run_single(&plan, 3e-9, None, 7).unwrap();
        let csv = runs_to_csv(&[record]);
        let row = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[2], ""); // snr_db_target
        assert_eq!(fields[5], ""); // seed
        assert_eq!(fields[6], ""); // sigma2
    }

    #[test]
    fn trace_csv_round_trips() {
        let plan = ExperimentPlan::default();
        let (_, artifacts) =
            awva_core::run_single_with_traces(&plan, 3e-9, Some(6.6), 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i1.csv");
        write_trace_csv(&artifacts.i1, &path).unwrap();
        let back = read_trace_csv(&path).unwrap();
        assert_eq!(back.grid.n, artifacts.i1.grid.n);
        for k in 0..back.grid.n {
            assert_eq!(back.values[k].to_bits(), artifacts.i1.values[k].to_bits());
        }
    }

    #[test]
    fn sweep_rows_count_header_plus_records() {
        let plan = ExperimentPlan {
            taus: vec![3e-9],
            snr_targets_db: vec![6.6],
            seeds: vec![0, 100],
            ..Default::default()
        };
        let result = awva_core::sweep_serial(&plan).unwrap();
        let csv = runs_to_csv(&result.records);
        assert_eq!(csv.lines().count(), 1 + result.records.len());
        assert_eq!(csv.lines().next().unwrap(), RUNS_HEADER);
    }
}
