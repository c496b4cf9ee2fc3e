//! Plain-text configuration documents.
//!
//! The format is a sectioned `key = value` file:
//!
//! ```text
//! [selection]
//! alpha = 0.01
//! amplification_mode = fixed
//!
//! [coupling]
//! taus = [3e-9, 6e-9]
//! ```
//!
//! Lines starting with `#` are comments. Unknown sections or keys are
//! rejected with the offending line number. An empty document resolves to
//! the default plan.

use awva_core::{
    AmplificationMode, ExperimentPlan, NoiseInjection, NoisePairing, PointerConfig,
    SelectionConfig, TimeGrid,
};

use crate::errors::{CliError, CliResult};

/// A parsed configuration: the experiment plan plus output switches.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDocument {
    pub plan: ExperimentPlan,
    pub plots: bool,
}

/// Load and validate a configuration file.
pub fn load_config(path: &std::path::Path) -> CliResult<ConfigDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
    parse_config(&text)
}

/// Parse a configuration document against the defaults.
pub fn parse_config(text: &str) -> CliResult<ConfigDocument> {
    let mut doc = ConfigDocument::default();
    // grid fields are rebuilt at the end so partial edits stay consistent
    let (mut t_start, mut t_end, mut dt) =
        (doc.plan.grid.t_start, doc.plan.grid.t_end, doc.plan.grid.dt);
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {line_no}: unterminated section header")))?
                .trim();
            if !matches!(
                name,
                "time" | "pointer" | "selection" | "coupling" | "noise" | "experiment" | "output"
            ) {
                return Err(CliError::Config(format!(
                    "line {line_no}: unknown section [{name}]"
                )));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let err = |msg: String| CliError::Config(format!("line {line_no}: {msg}"));

        match (section.as_str(), key) {
            ("time", "t_start") => t_start = parse_f64(key, value).map_err(err)?,
            ("time", "t_end") => t_end = parse_f64(key, value).map_err(err)?,
            ("time", "dt") => dt = parse_f64(key, value).map_err(err)?,
            ("pointer", "i0") => doc.plan.pointer.i0 = parse_f64(key, value).map_err(err)?,
            ("pointer", "t0") => doc.plan.pointer.t0 = parse_f64(key, value).map_err(err)?,
            ("pointer", "omega") => doc.plan.pointer.omega = parse_f64(key, value).map_err(err)?,
            ("selection", "alpha") => doc.plan.selection.alpha = parse_f64(key, value).map_err(err)?,
            ("selection", "amplification_mode") => {
                doc.plan.selection.amplification_mode = match value {
                    "from_alpha" => AmplificationMode::FromAlpha,
                    "fixed" => AmplificationMode::Fixed,
                    other => {
                        return Err(err(format!(
                            "selection.amplification_mode must be `from_alpha` or `fixed` (got `{other}`)"
                        )))
                    }
                }
            }
            ("selection", "g") => doc.plan.selection.g = parse_f64(key, value).map_err(err)?,
            ("coupling", "taus") => doc.plan.taus = parse_f64_list(key, value).map_err(err)?,
            ("noise", "snr_targets_db") => {
                doc.plan.snr_targets_db = parse_f64_list(key, value).map_err(err)?
            }
            ("noise", "injection") => {
                doc.plan.noise_injection = match value {
                    "after_bs" => NoiseInjection::AfterBs,
                    "before_bs" => NoiseInjection::BeforeBs,
                    other => {
                        return Err(err(format!(
                            "noise.injection must be `after_bs` or `before_bs` (got `{other}`)"
                        )))
                    }
                }
            }
            ("noise", "pairing") => {
                doc.plan.noise_pairing = match value {
                    "shared" => NoisePairing::SharedTrace,
                    "independent" => NoisePairing::IndependentTraces,
                    other => {
                        return Err(err(format!(
                            "noise.pairing must be `shared` or `independent` (got `{other}`)"
                        )))
                    }
                }
            }
            ("experiment", "seeds") => doc.plan.seeds = parse_u64_list(key, value).map_err(err)?,
            ("experiment", "report_time") => {
                doc.plan.report_time = parse_f64(key, value).map_err(err)?
            }
            ("output", "plots") => {
                doc.plots = match value {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(err(format!(
                            "output.plots must be `true` or `false` (got `{other}`)"
                        )))
                    }
                }
            }
            ("", _) => {
                return Err(CliError::Config(format!(
                    "line {line_no}: key `{key}` appears before any [section]"
                )))
            }
            (sec, _) => {
                return Err(CliError::Config(format!(
                    "line {line_no}: unknown key `{sec}.{key}`"
                )))
            }
        }
    }

    doc.plan.grid = TimeGrid::new(t_start, t_end, dt).map_err(|e| CliError::Config(e.to_string()))?;
    doc.plan.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(doc)
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("{key} expects a number (got `{value}`)"))
}

fn strip_brackets<'v>(key: &str, value: &'v str) -> Result<&'v str, String> {
    value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| format!("{key} expects a bracketed list like [a, b, c] (got `{value}`)"))
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    strip_brackets(key, value)?
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| format!("{key}: `{v}` is not a number")))
        .collect()
}

fn parse_u64_list(key: &str, value: &str) -> Result<Vec<u64>, String> {
    strip_brackets(key, value)?
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<u64>().map_err(|_| format!("{key}: `{v}` is not an unsigned integer")))
        .collect()
}

fn fmt_list<T: std::fmt::Display>(values: &[T]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

/// Emit the fully resolved configuration as a document that parses back to
/// the same plan.
pub fn echo_config(doc: &ConfigDocument) -> String {
    let ExperimentPlan {
        grid,
        pointer: PointerConfig { i0, t0, omega },
        selection: SelectionConfig { alpha, amplification_mode, g },
        taus,
        snr_targets_db,
        seeds,
        noise_injection,
        noise_pairing,
        report_time,
    } = &doc.plan;
    let mode = match amplification_mode {
        AmplificationMode::FromAlpha => "from_alpha",
        AmplificationMode::Fixed => "fixed",
    };
    let injection = match noise_injection {
        NoiseInjection::AfterBs => "after_bs",
        NoiseInjection::BeforeBs => "before_bs",
    };
    let pairing = match noise_pairing {
        NoisePairing::SharedTrace => "shared",
        NoisePairing::IndependentTraces => "independent",
    };
    format!(
        "[time]\n\
         t_start = {}\n\
         t_end = {}\n\
         dt = {}\n\
         \n\
         [pointer]\n\
         i0 = {}\n\
         t0 = {}\n\
         omega = {}\n\
         \n\
         [selection]\n\
         alpha = {}\n\
         amplification_mode = {}\n\
         g = {}\n\
         \n\
         [coupling]\n\
         taus = {}\n\
         \n\
         [noise]\n\
         snr_targets_db = {}\n\
         injection = {}\n\
         pairing = {}\n\
         \n\
         [experiment]\n\
         seeds = {}\n\
         report_time = {}\n\
         \n\
         [output]\n\
         plots = {}\n",
        grid.t_start,
        grid.t_end,
        grid.dt,
        i0,
        t0,
        omega,
        alpha,
        mode,
        g,
        fmt_list(taus),
        fmt_list(snr_targets_db),
        injection,
        pairing,
        fmt_list(seeds),
        report_time,
        doc.plots,
    )
}
