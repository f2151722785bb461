//! Flat key-value experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. Model parameters
//! appear as top-level keys next to the experiment fields:
//!
//! ```text
//! # temporal study, case (a)
//! alpha = 0.25
//! beta = 0.75
//! a = 1
//! b = 1
//! mu = 1
//! T = 0.5
//! case = a
//! scheme = sbd
//! study = temporal_rate
//! m_fixed = 128
//! n_list = 20,40,80,160,320
//! reference = nested_fine
//! m_ref = 128
//! n_ref = 1024
//! norms = l2
//! output = out
//! format = csv
//! ```

use oldroyd_core::model::{ModelParams, ProblemCase};
use oldroyd_core::report::{ExperimentConfig, Norm, Reference, Study};
use oldroyd_core::stepper::SchemeKind;
use std::collections::BTreeMap;
use std::fmt;

/// File output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Comma-separated rows.
    Csv,
    /// Markdown table.
    Markdown,
}

impl OutputFormat {
    /// File extension for the format.
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        }
    }
}

/// A parsed configuration: the experiment plus IO choices.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// The experiment to run.
    pub experiment: ExperimentConfig,
    /// Output directory, when given.
    pub output: Option<String>,
    /// Output format (default CSV).
    pub format: OutputFormat,
}

/// Configuration parse failure with the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Key (or pseudo-key) that failed.
    pub key: String,
    /// What went wrong.
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        message: message.into(),
    }
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| err(key, format!("not a number: `{v}`"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| err(key, format!("not an integer: `{v}`"))),
        }
    }

    fn list_usize(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse()
                        .map_err(|_| err(key, format!("not an integer: `{p}`")))
                })
                .collect(),
        }
    }

    fn list_f64(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse()
                        .map_err(|_| err(key, format!("not a number: `{p}`")))
                })
                .collect(),
        }
    }
}

fn split_lines(text: &str) -> Result<Keys, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(
                &format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(Keys(map))
}

/// Case label -> problem case.
pub fn case_by_label(label: &str) -> Option<ProblemCase> {
    match label {
        "a" => Some(ProblemCase::case_a()),
        "b" => Some(ProblemCase::case_b()),
        "c" => Some(ProblemCase::case_c()),
        "d" => Some(ProblemCase::case_d()),
        _ => None,
    }
}

/// Scheme label -> scheme.
pub fn scheme_by_label(label: &str) -> Option<SchemeKind> {
    match label {
        "be" | "backward_euler" => Some(SchemeKind::BackwardEuler),
        "sbd" | "corrected_sbd" => Some(SchemeKind::CorrectedSbd),
        _ => None,
    }
}

/// Parses a full experiment configuration from flat key-value text.
pub fn parse_run_config(text: &str) -> Result<RunConfig, ConfigError> {
    let keys = split_lines(text)?;

    let params = ModelParams {
        alpha: keys.f64_or("alpha", 0.5)?,
        beta: keys.f64_or("beta", 0.5)?,
        a: keys.f64_or("a", 1.0)?,
        b: keys.f64_or("b", 1.0)?,
        mu: keys.f64_or("mu", 1.0)?,
        t_final: keys.f64_or("T", 0.5)?,
    };
    oldroyd_core::model::validate(params).map_err(|e| err(e.field, e.constraint))?;

    let case_label = keys.get("case").unwrap_or("a").to_string();
    let case = case_by_label(&case_label)
        .ok_or_else(|| err("case", format!("unknown case `{case_label}` (a|b|c|d)")))?;

    let scheme_label = keys.get("scheme").unwrap_or("sbd");
    let scheme = scheme_by_label(scheme_label).ok_or_else(|| {
        err(
            "scheme",
            format!("unknown scheme `{scheme_label}` (be|sbd)"),
        )
    })?;

    let study = match keys.get("study").unwrap_or("temporal_rate") {
        "temporal_rate" => Study::TemporalRate,
        "spatial_rate" => Study::SpatialRate,
        "temporal_prefactor" => Study::TemporalPrefactor,
        "spatial_prefactor" => Study::SpatialPrefactor,
        "inhomogeneous" => Study::Inhomogeneous,
        other => return Err(err("study", format!("unknown study `{other}`"))),
    };

    let reference = match keys.get("reference").unwrap_or("nested_fine") {
        "nested_fine" => Reference::NestedFine {
            m_ref: keys.usize_or("m_ref", 0)?,
            n_ref: keys.usize_or("n_ref", 0)?,
        },
        "spectral" => Reference::Spectral {
            mode_cut: keys.usize_or("mode_cut", 63)? as u32,
            m_ref: keys.usize_or("m_ref", 0)?,
        },
        "exact" => Reference::Exact {
            m_ref: keys.usize_or("m_ref", 0)?,
        },
        other => {
            return Err(err(
                "reference",
                format!("unknown reference `{other}` (nested_fine|spectral|exact)"),
            ))
        }
    };

    let mut norms = Vec::new();
    for part in keys.get("norms").unwrap_or("l2").split(',') {
        match part.trim() {
            "" => {}
            "l2" => norms.push(Norm::L2),
            "h1" => norms.push(Norm::H1),
            "linf" => norms.push(Norm::Linf),
            other => return Err(err("norms", format!("unknown norm `{other}` (l2|h1|linf)"))),
        }
    }

    let format = match keys.get("format").unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "md" | "markdown" => OutputFormat::Markdown,
        other => return Err(err("format", format!("unknown format `{other}` (csv|md)"))),
    };

    Ok(RunConfig {
        experiment: ExperimentConfig {
            params,
            case,
            case_label,
            scheme,
            study,
            mesh_list: keys.list_usize("mesh_list")?,
            n_list: keys.list_usize("n_list")?,
            t_list: keys.list_f64("t_list")?,
            m_fixed: keys.usize_or("m_fixed", 0)?,
            n_fixed: keys.usize_or("n_fixed", 0)?,
            reference,
            norms,
        },
        output: keys.get("output").map(str::to_string),
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
alpha = 0.25
beta = 0.75
case = b
scheme = be
study = temporal_rate
m_fixed = 16
n_list = 10, 20, 40
reference = nested_fine
m_ref = 16
n_ref = 160
norms = l2,linf
output = results
format = md
";

    #[test]
    fn parses_sample() {
        let cfg = parse_run_config(SAMPLE).unwrap();
        assert_eq!(cfg.experiment.params.alpha, 0.25);
        assert_eq!(cfg.experiment.params.mu, 1.0); // default
        assert_eq!(cfg.experiment.case_label, "b");
        assert_eq!(cfg.experiment.scheme, SchemeKind::BackwardEuler);
        assert_eq!(cfg.experiment.n_list, vec![10, 20, 40]);
        assert_eq!(cfg.experiment.norms, vec![Norm::L2, Norm::Linf]);
        assert_eq!(cfg.output.as_deref(), Some("results"));
        assert_eq!(cfg.format, OutputFormat::Markdown);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_run_config("alpha = alpha").is_err());
        assert!(parse_run_config("case = q").is_err());
        assert!(parse_run_config("norms = l3").is_err());
        assert!(parse_run_config("broken line").is_err());
        // out-of-range parameters are caught at parse time
        let e = parse_run_config("alpha = 1.2").unwrap_err();
        assert_eq!(e.key, "alpha");
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = parse_run_config("# nothing\n\nalpha = 0.5 # trailing\n").unwrap();
        assert_eq!(cfg.experiment.params.alpha, 0.5);
    }
}
