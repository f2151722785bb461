//! CSV and markdown rendering of convergence reports.
//!
//! The CSV schema is one row per (refinement level, norm):
//!
//! ```text
//! case,scheme,alpha,beta,a,b,mu,study,level_param,norm,error,rate
//! ```
//!
//! Markdown mirrors the layout of a convergence table: one row per level,
//! an error and a rate column per norm. Rendering is deterministic, so
//! identical configurations produce identical bytes.

use crate::config::OutputFormat;
use oldroyd_core::report::ConvergenceReport;
use oldroyd_core::stepper::SchemeKind;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

fn scheme_label(s: SchemeKind) -> &'static str {
    match s {
        SchemeKind::BackwardEuler => "be",
        SchemeKind::CorrectedSbd => "sbd",
    }
}

/// Formats a refinement level: integers print bare, horizons in scientific
/// notation.
fn level_str(level: f64) -> String {
    if level >= 1.0 && level.fract() == 0.0 {
        format!("{}", level as u64)
    } else {
        format!("{level:.3e}")
    }
}

/// Renders the per-row CSV described in the module docs.
pub fn render_csv(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    out.push_str("case,scheme,alpha,beta,a,b,mu,study,level_param,norm,error,rate\n");
    let p = &report.params;
    for row in &report.rows {
        for (k, norm) in report.norms.iter().enumerate() {
            let rate = row.rates[k].map(|r| format!("{r:.4}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{:.6e},{}",
                report.case_label,
                scheme_label(report.scheme),
                p.alpha,
                p.beta,
                p.a,
                p.b,
                p.mu,
                report.study.label(),
                level_str(row.level),
                norm.label(),
                row.errors[k],
                rate
            );
        }
    }
    out
}

/// Renders a markdown table with one error/rate column pair per norm.
pub fn render_markdown(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let p = &report.params;
    let _ = writeln!(
        out,
        "### case ({}), {} scheme, alpha={}, beta={}, a={}, b={}, mu={}",
        report.case_label,
        scheme_label(report.scheme),
        p.alpha,
        p.beta,
        p.a,
        p.b,
        p.mu
    );
    let _ = writeln!(
        out,
        "study: {}; reference: {}{}",
        report.study.label(),
        report.reference,
        report
            .wall_seconds
            .map(|s| format!("; wall {s:.2} s"))
            .unwrap_or_default()
    );
    out.push('\n');
    let level_header = match report.study.label() {
        "temporal_rate" => "N",
        "spatial_rate" | "inhomogeneous" => "M",
        _ => "t_N",
    };
    let mut header = format!("| {level_header} |");
    let mut rule = String::from("|---|");
    for norm in &report.norms {
        let _ = write!(header, " {}-error | rate |", norm.label());
        rule.push_str("---|---|");
    }
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{rule}");
    for row in &report.rows {
        let mut line = format!("| {} |", level_str(row.level));
        for k in 0..report.norms.len() {
            let rate = row.rates[k]
                .map(|r| format!("{r:.2}"))
                .unwrap_or_else(|| "--".into());
            let _ = write!(line, " {:.2e} | {} |", row.errors[k], rate);
        }
        let _ = writeln!(out, "{line}");
    }
    if let Some(slope) = report.fitted_slope {
        let _ = writeln!(out, "\nfitted log-log slope: {slope:.3}");
    }
    out
}

/// Renders in the requested format.
pub fn render(report: &ConvergenceReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Markdown => render_markdown(report),
    }
}

/// Writes the rendered report to `path`.
pub fn emit(report: &ConvergenceReport, format: OutputFormat, path: &Path) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, render(report, format))
}
