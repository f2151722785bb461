//! Preset convergence tables.
//!
//! Five presets reproduce the standard study layouts at two scales:
//!
//! - `t1`: temporal rates, cases (a)/(b), three (alpha, beta) pairs, BE and
//!   SBD side by side.
//! - `t2`: temporal prefactor as the horizon shrinks, N = 10 fixed.
//! - `t3`: spatial rates with a small fixed step size, SBD, L2 and max
//!   norms.
//! - `t4`: spatial prefactor as the horizon shrinks, mesh fixed.
//! - `t6`: spatial rates for the source-driven cases (c) (closed-form
//!   reference) and (d) (spectral reference).
//!
//! Desk scale shrinks the reference resolutions so a full preset finishes
//! in minutes; the full scale mirrors the original protocol (reference mesh
//! 1/512) and takes hours and several gigabytes.

use crate::emit::{render_csv, render_markdown};
use oldroyd_core::model::{ModelParams, ProblemCase};
use oldroyd_core::report::{
    run_experiment, run_prefactor_family, run_temporal_rate_family, ConvergenceReport,
    ExperimentConfig, Norm, Reference, ReportError, Study,
};
use oldroyd_core::stepper::SchemeKind;
use std::fmt::Write as _;

/// One rendered artifact of a preset run.
#[derive(Debug, Clone)]
pub struct TableArtifact {
    /// File stem (no extension).
    pub stem: String,
    /// CSV rendering (rows of every involved report).
    pub csv: String,
    /// Markdown rendering, merged across schemes where the layout calls
    /// for it.
    pub markdown: String,
}

const PAIRS: [(f64, f64); 3] = [(0.25, 0.75), (0.5, 0.5), (0.75, 0.25)];

fn pair_stem(alpha: f64, beta: f64) -> String {
    format!(
        "a{:02}b{:02}",
        (alpha * 100.0) as u32,
        (beta * 100.0) as u32
    )
}

fn base_config(alpha: f64, beta: f64, case_label: &str) -> ExperimentConfig {
    let case = match case_label {
        "a" => ProblemCase::case_a(),
        "b" => ProblemCase::case_b(),
        "c" => ProblemCase::case_c(),
        "d" => ProblemCase::case_d(),
        _ => unreachable!("preset case labels"),
    };
    ExperimentConfig {
        params: ModelParams::experiment(alpha, beta),
        case,
        case_label: case_label.to_string(),
        scheme: SchemeKind::CorrectedSbd,
        study: Study::TemporalRate,
        mesh_list: vec![],
        n_list: vec![],
        t_list: vec![],
        m_fixed: 0,
        n_fixed: 0,
        reference: Reference::NestedFine { m_ref: 0, n_ref: 0 },
        norms: vec![Norm::L2],
    }
}

/// Two-scheme temporal table in the side-by-side layout.
fn merged_temporal_markdown(be: &ConvergenceReport, sbd: &ConvergenceReport) -> String {
    let mut out = String::new();
    let p = &be.params;
    let _ = writeln!(
        out,
        "### case ({}), alpha={}, beta={}: normalized L2 error vs N",
        be.case_label, p.alpha, p.beta
    );
    let _ = writeln!(out, "reference: {}\n", be.reference);
    let _ = writeln!(out, "| N | BE error | rate | SBD error | rate |");
    let _ = writeln!(out, "|---|---|---|---|---|");
    for (rb, rs) in be.rows.iter().zip(&sbd.rows) {
        let fmt_rate = |r: Option<f64>| r.map(|v| format!("{v:.2}")).unwrap_or_else(|| "--".into());
        let _ = writeln!(
            out,
            "| {} | {:.2e} | {} | {:.2e} | {} |",
            rb.level as u64,
            rb.errors[0],
            fmt_rate(rb.rates[0]),
            rs.errors[0],
            fmt_rate(rs.rates[0]),
        );
    }
    out
}

/// Two-scheme prefactor table: one row per scheme, one column per horizon.
fn merged_prefactor_markdown(reports: &[ConvergenceReport], title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "### {title}");
    let mut header = String::from("| case | method |");
    let mut rule = String::from("|---|---|");
    for row in &reports[0].rows {
        let _ = write!(header, " {:.0e} |", row.level);
        rule.push_str("---|");
    }
    header.push_str(" rate |");
    rule.push_str("---|");
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{rule}");
    for report in reports {
        let scheme = match report.scheme {
            SchemeKind::BackwardEuler => "BE",
            SchemeKind::CorrectedSbd => "SBD",
        };
        let mut line = format!("| ({}) | {scheme} |", report.case_label);
        for row in &report.rows {
            let _ = write!(line, " {:.2e} |", row.errors[0]);
        }
        let _ = write!(
            line,
            " {} |",
            report
                .fitted_slope
                .map(|s| format!("{s:.2}"))
                .unwrap_or_else(|| "--".into())
        );
        let _ = writeln!(out, "{line}");
    }
    out
}

fn concat_csv(reports: &[&ConvergenceReport]) -> String {
    let mut out = String::new();
    for (i, report) in reports.iter().enumerate() {
        let rendered = render_csv(report);
        if i == 0 {
            out.push_str(&rendered);
        } else {
            // skip the repeated header
            if let Some(idx) = rendered.find('\n') {
                out.push_str(&rendered[idx + 1..]);
            }
        }
    }
    out
}

/// Runs one named preset. `progress` receives a line per completed leg.
pub fn run_table(
    name: &str,
    desk_scale: bool,
    progress: &mut dyn FnMut(&str),
) -> Result<Vec<TableArtifact>, ReportError> {
    match name {
        "t1" => table_t1(desk_scale, progress),
        "t2" => table_t2(desk_scale, progress),
        "t3" => table_t3(desk_scale, progress),
        "t4" => table_t4(desk_scale, progress),
        "t6" => table_t6(desk_scale, progress),
        other => Err(ReportError::BadConfig(format!(
            "unknown table `{other}` (t1|t2|t3|t4|t6)"
        ))),
    }
}

fn table_t1(desk: bool, progress: &mut dyn FnMut(&str)) -> Result<Vec<TableArtifact>, ReportError> {
    let (m, n_ref) = if desk { (128, 1024) } else { (512, 2048) };
    let mut artifacts = Vec::new();
    for (alpha, beta) in PAIRS {
        for case in ["a", "b"] {
            let mut config = base_config(alpha, beta, case);
            config.study = Study::TemporalRate;
            config.m_fixed = m;
            config.n_list = vec![20, 40, 80, 160, 320];
            config.reference = Reference::NestedFine { m_ref: m, n_ref };
            let reports = run_temporal_rate_family(
                &config,
                &[SchemeKind::BackwardEuler, SchemeKind::CorrectedSbd],
            )?;
            progress(&format!(
                "t1: case ({case}), alpha={alpha}, beta={beta} done"
            ));
            artifacts.push(TableArtifact {
                stem: format!("t1_{}_case_{case}", pair_stem(alpha, beta)),
                csv: concat_csv(&[&reports[0], &reports[1]]),
                markdown: merged_temporal_markdown(&reports[0], &reports[1]),
            });
        }
    }
    Ok(artifacts)
}

fn table_t2(desk: bool, progress: &mut dyn FnMut(&str)) -> Result<Vec<TableArtifact>, ReportError> {
    let (m, n_ref) = if desk { (128, 320) } else { (512, 500) };
    let mut reports = Vec::new();
    for case in ["a", "b"] {
        let mut config = base_config(0.25, 0.75, case);
        config.study = Study::TemporalPrefactor;
        config.m_fixed = m;
        config.n_fixed = 10;
        config.t_list = vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
        config.reference = Reference::NestedFine { m_ref: m, n_ref };
        let family = run_prefactor_family(
            &config,
            &[SchemeKind::BackwardEuler, SchemeKind::CorrectedSbd],
        )?;
        progress(&format!("t2: case ({case}) done"));
        reports.extend(family);
    }
    let refs: Vec<&ConvergenceReport> = reports.iter().collect();
    Ok(vec![TableArtifact {
        stem: "t2".into(),
        csv: concat_csv(&refs),
        markdown: merged_prefactor_markdown(
            &reports,
            "normalized L2 error as the horizon t_N shrinks, N = 10, alpha=0.25, beta=0.75",
        ),
    }])
}

fn table_t3(desk: bool, progress: &mut dyn FnMut(&str)) -> Result<Vec<TableArtifact>, ReportError> {
    let (n, meshes, m_ref): (usize, Vec<usize>, usize) = if desk {
        (256, vec![8, 16, 32, 64], 256)
    } else {
        (500, vec![8, 16, 32, 64, 128], 512)
    };
    let mut artifacts = Vec::new();
    for (alpha, beta) in PAIRS {
        for case in ["a", "b"] {
            let mut config = base_config(alpha, beta, case);
            config.study = Study::SpatialRate;
            config.scheme = SchemeKind::CorrectedSbd;
            config.n_fixed = n;
            config.mesh_list = meshes.clone();
            config.reference = Reference::NestedFine { m_ref, n_ref: n };
            config.norms = vec![Norm::L2, Norm::Linf];
            let report = run_experiment(&config)?;
            progress(&format!(
                "t3: case ({case}), alpha={alpha}, beta={beta} done"
            ));
            artifacts.push(TableArtifact {
                stem: format!("t3_{}_case_{case}", pair_stem(alpha, beta)),
                csv: render_csv(&report),
                markdown: render_markdown(&report),
            });
        }
    }
    Ok(artifacts)
}

fn table_t4(desk: bool, progress: &mut dyn FnMut(&str)) -> Result<Vec<TableArtifact>, ReportError> {
    let (n, m_ref) = if desk { (256, 256) } else { (500, 512) };
    let mut reports = Vec::new();
    for case in ["a", "b"] {
        let mut config = base_config(0.25, 0.75, case);
        config.study = Study::SpatialPrefactor;
        config.m_fixed = 64;
        config.n_fixed = n;
        config.t_list = vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
        config.reference = Reference::NestedFine { m_ref, n_ref: n };
        let family = run_prefactor_family(
            &config,
            &[SchemeKind::BackwardEuler, SchemeKind::CorrectedSbd],
        )?;
        progress(&format!("t4: case ({case}) done"));
        reports.extend(family);
    }
    let refs: Vec<&ConvergenceReport> = reports.iter().collect();
    Ok(vec![TableArtifact {
        stem: "t4".into(),
        csv: concat_csv(&refs),
        markdown: merged_prefactor_markdown(
            &reports,
            "normalized L2 error as the horizon shrinks, mesh 1/64 fixed, alpha=0.25, beta=0.75",
        ),
    }])
}

fn table_t6(desk: bool, progress: &mut dyn FnMut(&str)) -> Result<Vec<TableArtifact>, ReportError> {
    let (n, meshes): (usize, Vec<usize>) = if desk {
        (256, vec![8, 16, 32, 64])
    } else {
        (500, vec![8, 16, 32, 64, 128])
    };
    let mut artifacts = Vec::new();
    for case in ["c", "d"] {
        let mut config = base_config(0.25, 0.75, case);
        config.study = Study::Inhomogeneous;
        config.scheme = SchemeKind::CorrectedSbd;
        config.n_fixed = n;
        config.mesh_list = meshes.clone();
        config.norms = vec![Norm::L2, Norm::Linf];
        config.reference = if case == "c" {
            // closed-form solution sampled on a fine lattice
            Reference::Exact { m_ref: 512 }
        } else {
            let m_ref = if desk { 256 } else { 512 };
            Reference::Spectral {
                mode_cut: 127,
                m_ref,
            }
        };
        let report = run_experiment(&config)?;
        progress(&format!("t6: case ({case}) done"));
        artifacts.push(TableArtifact {
            stem: format!("t6_case_{case}"),
            csv: render_csv(&report),
            markdown: render_markdown(&report),
        });
    }
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use oldroyd_core::report::ReportRow;

    fn dummy(scheme: SchemeKind, case: &str, slope: Option<f64>) -> ConvergenceReport {
        ConvergenceReport {
            case_label: case.into(),
            scheme,
            params: ModelParams::experiment(0.25, 0.75),
            study: Study::TemporalRate,
            reference: "nested_fine(m=8,n=64)".into(),
            norms: vec![Norm::L2],
            rows: vec![
                ReportRow {
                    level: 20.0,
                    errors: vec![1.43e-3],
                    rates: vec![None],
                },
                ReportRow {
                    level: 40.0,
                    errors: vec![7.1e-4],
                    rates: vec![Some(1.01)],
                },
            ],
            fitted_slope: slope,
            wall_seconds: None,
        }
    }

    #[test]
    fn temporal_merge_layout() {
        let be = dummy(SchemeKind::BackwardEuler, "a", None);
        let sbd = dummy(SchemeKind::CorrectedSbd, "a", None);
        let md = merged_temporal_markdown(&be, &sbd);
        assert!(md.contains("| N | BE error | rate | SBD error | rate |"));
        assert!(md.contains("| 20 | 1.43e-3 | -- | 1.43e-3 | -- |"));
        assert!(md.contains("| 40 | 7.10e-4 | 1.01 | 7.10e-4 | 1.01 |"));
    }

    #[test]
    fn prefactor_merge_layout() {
        let reports = vec![
            dummy(SchemeKind::BackwardEuler, "a", Some(0.49)),
            dummy(SchemeKind::CorrectedSbd, "a", Some(0.5)),
        ];
        let md = merged_prefactor_markdown(&reports, "title");
        assert!(md.contains("### title"));
        assert!(md.contains("| (a) | BE |"));
        assert!(md.contains("| 0.49 |"));
    }

    #[test]
    fn csv_concatenation_keeps_one_header() {
        let be = dummy(SchemeKind::BackwardEuler, "a", None);
        let sbd = dummy(SchemeKind::CorrectedSbd, "a", None);
        let csv = concat_csv(&[&be, &sbd]);
        assert_eq!(csv.matches("case,scheme").count(), 1);
        assert_eq!(csv.lines().count(), 1 + 4);
    }

    #[test]
    fn unknown_table_is_rejected() {
        assert!(run_table("t5", true, &mut |_| {}).is_err());
    }
}
