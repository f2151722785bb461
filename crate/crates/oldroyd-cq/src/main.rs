//! Command line front end for the Oldroyd-B convolution-quadrature solver.

use oldroyd_core::cq::{be_weights, sbd_weights};
use oldroyd_core::fem::assemble;
use oldroyd_core::mesh::TriMesh;
use oldroyd_core::model::ModelParams;
use oldroyd_core::oracle::reference_solution;
use oldroyd_core::report::initial_coefficients;
use oldroyd_core::stepper::{run_scheme, StepOptions, StepSystem};
use oldroyd_cq::config::{case_by_label, parse_run_config, OutputFormat};
use oldroyd_cq::emit::{emit, render_markdown};
use oldroyd_cq::tables::run_table;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const USAGE: &str = "\
oldroyd-cq: convergence studies for the time-fractional Oldroyd-B solver

USAGE:
  oldroyd-cq weights --generator {be|sbd} --gamma G --tau T -n N
  oldroyd-cq solve   --config FILE [--snapshots OUT.csv]
  oldroyd-cq oracle  --case {a|b|c|d} --t T --grid G
                     [--alpha A] [--beta B] [--modes M]
  oldroyd-cq run     --config FILE [--out DIR] [--format csv|md]
  oldroyd-cq table   --name {t1|t2|t3|t4|t6} [--desk-scale] [--out DIR]

Config files are flat `key = value` text; see the README for the key list.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return ExitCode::from(2);
    };
    let result = match command.as_str() {
        "weights" => cmd_weights(&args[1..]),
        "solve" => cmd_solve(&args[1..]),
        "oracle" => cmd_oracle(&args[1..]),
        "run" => cmd_run(&args[1..]),
        "table" => cmd_table(&args[1..]),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => Err(format!("unknown command `{other}`\n\n{USAGE}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

/// Collects `--key value` pairs and bare flags.
fn parse_flags(args: &[String]) -> Result<HashMap<String, String>, String> {
    let mut flags = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let Some(key) = arg.strip_prefix('-') else {
            return Err(format!("unexpected argument `{arg}`"));
        };
        let key = key.strip_prefix('-').unwrap_or(key);
        if key == "desk-scale" {
            flags.insert(key.to_string(), "true".to_string());
            i += 1;
            continue;
        }
        let Some(value) = args.get(i + 1) else {
            return Err(format!("flag `{arg}` needs a value"));
        };
        flags.insert(key.to_string(), value.clone());
        i += 2;
    }
    Ok(flags)
}

fn required<'a>(flags: &'a HashMap<String, String>, key: &str) -> Result<&'a str, String> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| format!("missing required flag --{key}"))
}

fn parse_num<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {what} from `{value}`"))
}

fn cmd_weights(args: &[String]) -> Result<(), String> {
    let flags = parse_flags(args)?;
    let generator = required(&flags, "generator")?;
    let gamma: f64 = parse_num(required(&flags, "gamma")?, "--gamma")?;
    let tau: f64 = parse_num(required(&flags, "tau")?, "--tau")?;
    if tau <= 0.0 {
        return Err("--tau must be positive".into());
    }
    let n: usize = parse_num(required(&flags, "n")?, "-n")?;
    let table = match generator {
        "be" => be_weights(gamma, tau, n),
        "sbd" => sbd_weights(gamma, tau, n),
        other => return Err(format!("unknown generator `{other}` (be|sbd)")),
    };
    for w in &table.weights {
        // 17 significant digits round-trip f64 exactly
        println!("{w:.16e}");
    }
    Ok(())
}

fn cmd_solve(args: &[String]) -> Result<(), String> {
    let flags = parse_flags(args)?;
    let path = required(&flags, "config")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let cfg = parse_run_config(&text).map_err(|e| e.to_string())?;
    let exp = &cfg.experiment;
    if exp.m_fixed < 2 || exp.n_fixed < 1 {
        return Err("solve needs m_fixed >= 2 and n_fixed >= 1 in the config".into());
    }
    let mesh = TriMesh::build_uniform(exp.m_fixed).map_err(|e| e.to_string())?;
    let sys = assemble(&mesh);
    let v = initial_coefficients(&sys, &exp.case).map_err(|e| e.to_string())?;
    let params = exp.params;
    let case = exp.case;
    let sampler = |t: f64| -> Vec<f64> {
        oldroyd_core::fem::load_vector(&mesh, &|x, y| case.source.value(&params, x, y, t))
    };
    let source: Option<&dyn Fn(f64) -> Vec<f64>> = if case.source.is_none() {
        None
    } else {
        Some(&sampler)
    };
    let start = Instant::now();
    let traj = run_scheme(
        exp.scheme,
        StepSystem::Fem(&sys),
        &params,
        &v,
        source,
        exp.n_fixed,
        &StepOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let final_norm = sys.l2_norm(traj.final_snapshot());
    println!(
        "solved case ({}) with {:?}: m={}, N={}, T={}, ||U^N||_L2 = {:.6e} ({:.2} s)",
        exp.case_label,
        exp.scheme,
        exp.m_fixed,
        exp.n_fixed,
        params.t_final,
        final_norm,
        start.elapsed().as_secs_f64()
    );
    if let Some(out) = flags.get("snapshots") {
        let mut csv = String::from("n,t,x,y,value\n");
        for (i, (time, snap)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
            let n = (time / traj.tau).round() as usize;
            let _ = i;
            for (dof, &value) in snap.iter().enumerate() {
                let (x, y) = mesh.dof_position(dof);
                csv.push_str(&format!("{n},{time},{x},{y},{value:e}\n"));
            }
        }
        std::fs::write(out, csv).map_err(|e| format!("writing {out}: {e}"))?;
        println!("snapshots written to {out}");
    }
    Ok(())
}

fn cmd_oracle(args: &[String]) -> Result<(), String> {
    let flags = parse_flags(args)?;
    let label = required(&flags, "case")?;
    let case = case_by_label(label).ok_or_else(|| format!("unknown case `{label}` (a|b|c|d)"))?;
    let t: f64 = parse_num(required(&flags, "t")?, "--t")?;
    if t <= 0.0 {
        return Err("--t must be positive".into());
    }
    let grid: usize = parse_num(required(&flags, "grid")?, "--grid")?;
    if grid < 2 {
        return Err("--grid must be at least 2".into());
    }
    let alpha: f64 = parse_num(flags.get("alpha").map_or("0.25", String::as_str), "--alpha")?;
    let beta: f64 = parse_num(flags.get("beta").map_or("0.75", String::as_str), "--beta")?;
    let default_modes = if label == "a" || label == "c" {
        "31"
    } else {
        "63"
    };
    let modes: u32 = parse_num(
        flags.get("modes").map_or(default_modes, String::as_str),
        "--modes",
    )?;
    let mut params = ModelParams::experiment(alpha, beta);
    params.t_final = t;
    oldroyd_core::model::validate(params).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = (0..grid)
        .flat_map(|j| {
            (0..grid).map(move |i| (i as f64 / (grid - 1) as f64, j as f64 / (grid - 1) as f64))
        })
        .collect();
    let values = reference_solution(&params, &case, t, &pts, modes).map_err(|e| e.to_string())?;
    println!("x,y,value");
    for ((x, y), v) in pts.iter().zip(&values) {
        println!("{x},{y},{v:e}");
    }
    Ok(())
}

fn cmd_run(args: &[String]) -> Result<(), String> {
    let flags = parse_flags(args)?;
    let path = required(&flags, "config")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let cfg = parse_run_config(&text).map_err(|e| e.to_string())?;
    let format = match flags.get("format").map(String::as_str) {
        None => cfg.format,
        Some("csv") => OutputFormat::Csv,
        Some("md") | Some("markdown") => OutputFormat::Markdown,
        Some(other) => return Err(format!("unknown format `{other}` (csv|md)")),
    };
    let out_dir = flags.get("out").cloned().or_else(|| cfg.output.clone());

    let start = Instant::now();
    let mut report =
        oldroyd_core::report::run_experiment(&cfg.experiment).map_err(|e| e.to_string())?;
    report.wall_seconds = Some(start.elapsed().as_secs_f64());

    print!("{}", render_markdown(&report));
    if let Some(dir) = out_dir {
        let stem = format!(
            "report_{}_{}_{}",
            report.case_label,
            match report.scheme {
                oldroyd_core::stepper::SchemeKind::BackwardEuler => "be",
                oldroyd_core::stepper::SchemeKind::CorrectedSbd => "sbd",
            },
            report.study.label()
        );
        let path = PathBuf::from(&dir).join(format!("{stem}.{}", format.extension()));
        emit(&report, format, &path).map_err(|e| format!("writing {}: {e}", path.display()))?;
        println!("written: {}", path.display());
    }
    Ok(())
}

fn cmd_table(args: &[String]) -> Result<(), String> {
    let flags = parse_flags(args)?;
    let name = required(&flags, "name")?;
    let desk = flags.contains_key("desk-scale");
    let out_dir = flags
        .get("out")
        .cloned()
        .unwrap_or_else(|| "tables".to_string());
    if !desk {
        eprintln!(
            "note: full-scale presets use the 1/512 reference mesh and can run for hours; \
             pass --desk-scale for the minutes-scale variant"
        );
    }
    let start = Instant::now();
    let artifacts =
        run_table(name, desk, &mut |line| eprintln!("{line}")).map_err(|e| e.to_string())?;
    for artifact in &artifacts {
        let base = Path::new(&out_dir);
        std::fs::create_dir_all(base).map_err(|e| format!("creating {out_dir}: {e}"))?;
        let md_path = base.join(format!("{}.md", artifact.stem));
        let csv_path = base.join(format!("{}.csv", artifact.stem));
        std::fs::write(&md_path, &artifact.markdown)
            .map_err(|e| format!("writing {}: {e}", md_path.display()))?;
        std::fs::write(&csv_path, &artifact.csv)
            .map_err(|e| format!("writing {}: {e}", csv_path.display()))?;
        println!("{}", artifact.markdown);
        println!("written: {} and {}", md_path.display(), csv_path.display());
    }
    eprintln!(
        "table {name} finished in {:.1} s",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
