//! Error norms, empirical convergence orders, and experiment orchestration.
//!
//! A convergence study runs a ladder of refinements of one discretization
//! knob against a reference that is strictly finer than every ladder entry:
//!
//! - temporal rate: fixed mesh, halving time steps, fine-step reference on
//!   the same mesh (computed with the corrected SBD scheme);
//! - spatial rate: fixed step count, halving mesh sizes, nested fine-mesh
//!   reference run with the same scheme and step count (or a closed-form /
//!   spectral reference for the manufactured cases);
//! - prefactor studies: fixed resolutions with the final time walked down a
//!   decade ladder; the reported number is the fitted log-log slope of the
//!   error against the horizon.
//!
//! Errors between nested meshes are measured through the fine mesh: the
//! coarse solution is injected exactly (P1 on nested lattices), and the
//! difference goes through the fine mass or stiffness quadratic form, or a
//! max over fine nodes.

use crate::fem::{self, assemble, FemError, FemSystem};
use crate::linalg::LinalgError;
use crate::mesh::{nested_inject, MeshError, TriMesh};
use crate::model::{ModelParams, ProblemCase, Regularity, ScalarField};
use crate::oracle::{self, OracleError};
use crate::stepper::{run_scheme, SchemeKind, StepError, StepOptions, StepSystem};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Error norms a study can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// Discrete L2 norm through the fine mass matrix, normalized by the
    /// initial-data norm when one is available.
    L2,
    /// Discrete H1 seminorm through the fine stiffness matrix.
    H1,
    /// Max over fine-mesh nodes.
    Linf,
}

impl Norm {
    /// Lowercase label used in file output.
    pub fn label(&self) -> &'static str {
        match self {
            Norm::L2 => "l2",
            Norm::H1 => "h1",
            Norm::Linf => "linf",
        }
    }
}

/// The refinement protocol of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// Halve tau on a fixed mesh.
    TemporalRate,
    /// Halve h at a fixed step count.
    SpatialRate,
    /// Fixed N, horizon walked down a decade ladder.
    TemporalPrefactor,
    /// Fixed mesh and N, horizon walked down a decade ladder.
    SpatialPrefactor,
    /// Spatial ladder for the source-driven cases with v = 0.
    Inhomogeneous,
}

impl Study {
    /// Lowercase label used in file output.
    pub fn label(&self) -> &'static str {
        match self {
            Study::TemporalRate => "temporal_rate",
            Study::SpatialRate => "spatial_rate",
            Study::TemporalPrefactor => "temporal_prefactor",
            Study::SpatialPrefactor => "spatial_prefactor",
            Study::Inhomogeneous => "inhomogeneous",
        }
    }
}

/// Reference solution against which ladder errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// A finer discrete run: same mesh for temporal studies, nested finer
    /// mesh for spatial studies.
    NestedFine {
        /// Reference mesh subdivisions.
        m_ref: usize,
        /// Reference step count.
        n_ref: usize,
    },
    /// Mode-summed Laplace-contour solution sampled on a fine mesh.
    Spectral {
        /// Sine modes per axis.
        mode_cut: u32,
        /// Mesh carrying the error quadratic forms.
        m_ref: usize,
    },
    /// Closed-form exact solution sampled on a fine mesh.
    Exact {
        /// Mesh carrying the error quadratic forms.
        m_ref: usize,
    },
}

impl Reference {
    fn describe(&self) -> String {
        match self {
            Reference::NestedFine { m_ref, n_ref } => {
                format!("nested_fine(m={m_ref},n={n_ref})")
            }
            Reference::Spectral { mode_cut, m_ref } => {
                format!("spectral(modes={mode_cut},m={m_ref})")
            }
            Reference::Exact { m_ref } => format!("exact(m={m_ref})"),
        }
    }
}

/// Full description of one convergence experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// PDE constants and horizon.
    pub params: ModelParams,
    /// Initial data and source.
    pub case: ProblemCase,
    /// Label for file output ("a", "b", "c", "d", ...).
    pub case_label: String,
    /// Time stepping scheme under study.
    pub scheme: SchemeKind,
    /// Refinement protocol.
    pub study: Study,
    /// Mesh ladder (spatial studies).
    pub mesh_list: Vec<usize>,
    /// Step-count ladder (temporal studies).
    pub n_list: Vec<usize>,
    /// Horizon ladder (prefactor studies), strictly decreasing.
    pub t_list: Vec<f64>,
    /// Fixed mesh for temporal and prefactor studies.
    pub m_fixed: usize,
    /// Fixed step count for spatial and prefactor studies.
    pub n_fixed: usize,
    /// Reference solution.
    pub reference: Reference,
    /// Norms to report.
    pub norms: Vec<Norm>,
}

/// One refinement level of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// N, m, or t, depending on the study.
    pub level: f64,
    /// One error per requested norm.
    pub errors: Vec<f64>,
    /// Log-ratio rate against the previous row; `None` on the first row or
    /// when an error vanished.
    pub rates: Vec<Option<f64>>,
}

/// Assembled convergence table plus run metadata.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Case label.
    pub case_label: String,
    /// Scheme under study.
    pub scheme: SchemeKind,
    /// Parameters of the run.
    pub params: ModelParams,
    /// Study protocol.
    pub study: Study,
    /// Human-readable reference description.
    pub reference: String,
    /// Reported norms, in row order.
    pub norms: Vec<Norm>,
    /// Ladder rows.
    pub rows: Vec<ReportRow>,
    /// Fitted log-log slope for prefactor studies.
    pub fitted_slope: Option<f64>,
    /// Wall time, filled in by the caller when available.
    pub wall_seconds: Option<f64>,
}

/// Errors from error measurement and experiment runs.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    /// Propagated mesh failure.
    Mesh(MeshError),
    /// Propagated assembly or projection failure.
    Fem(FemError),
    /// Propagated stepping failure, with ladder context.
    Step {
        /// What was being computed.
        context: &'static str,
        /// The underlying failure.
        source: StepError,
    },
    /// Propagated oracle failure.
    Oracle(OracleError),
    /// Propagated linear algebra failure.
    Linalg(LinalgError),
    /// Configuration inconsistency.
    BadConfig(String),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Mesh(e) => write!(f, "mesh: {e}"),
            ReportError::Fem(e) => write!(f, "fem: {e}"),
            ReportError::Step { context, source } => write!(f, "{context}: {source}"),
            ReportError::Oracle(e) => write!(f, "oracle: {e}"),
            ReportError::Linalg(e) => write!(f, "linalg: {e}"),
            ReportError::BadConfig(msg) => write!(f, "bad config: {msg}"),
        }
    }
}

impl core::error::Error for ReportError {}

impl From<MeshError> for ReportError {
    fn from(e: MeshError) -> Self {
        ReportError::Mesh(e)
    }
}
impl From<FemError> for ReportError {
    fn from(e: FemError) -> Self {
        ReportError::Fem(e)
    }
}
impl From<OracleError> for ReportError {
    fn from(e: OracleError) -> Self {
        ReportError::Oracle(e)
    }
}
impl From<LinalgError> for ReportError {
    fn from(e: LinalgError) -> Self {
        ReportError::Linalg(e)
    }
}

/// L2 distance through the fine mass matrix between reference coefficients
/// on the fine mesh and a candidate on a nested coarser mesh.
pub fn l2_error(
    fine: &FemSystem,
    reference: &[f64],
    candidate_mesh: &TriMesh,
    candidate: &[f64],
) -> Result<f64, ReportError> {
    let d = difference_on_fine(fine, reference, candidate_mesh, candidate)?;
    Ok(fine.l2_norm(&d))
}

/// H1 seminorm distance through the fine stiffness matrix.
pub fn h1_error(
    fine: &FemSystem,
    reference: &[f64],
    candidate_mesh: &TriMesh,
    candidate: &[f64],
) -> Result<f64, ReportError> {
    let d = difference_on_fine(fine, reference, candidate_mesh, candidate)?;
    Ok(fine.h1_seminorm(&d))
}

/// Max-norm distance over the fine-mesh nodes.
pub fn linf_error(
    fine: &FemSystem,
    reference: &[f64],
    candidate_mesh: &TriMesh,
    candidate: &[f64],
) -> Result<f64, ReportError> {
    let d = difference_on_fine(fine, reference, candidate_mesh, candidate)?;
    Ok(d.iter().fold(0.0f64, |m, &x| m.max(libm::fabs(x))))
}

fn difference_on_fine(
    fine: &FemSystem,
    reference: &[f64],
    candidate_mesh: &TriMesh,
    candidate: &[f64],
) -> Result<Vec<f64>, ReportError> {
    if reference.len() != fine.dofs() {
        return Err(ReportError::BadConfig(format!(
            "reference has {} entries, fine mesh carries {}",
            reference.len(),
            fine.dofs()
        )));
    }
    let injected = nested_inject(candidate_mesh, fine.mesh(), candidate)?;
    Ok(injected.iter().zip(reference).map(|(c, r)| c - r).collect())
}

/// Rates between consecutive ladder entries: log(e_prev/e_cur) divided by
/// log(step_prev/step_cur). Nonpositive errors yield `None`.
pub fn eoc(errors: &[f64], steps: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), steps.len());
    let mut rates = Vec::with_capacity(errors.len().saturating_sub(1));
    for i in 1..errors.len() {
        if errors[i - 1] > 0.0 && errors[i] > 0.0 && steps[i - 1] != steps[i] {
            rates.push(Some(
                libm::log(errors[i - 1] / errors[i]) / libm::log(steps[i - 1] / steps[i]),
            ));
        } else {
            rates.push(None);
        }
    }
    rates
}

/// Projects the case's initial data onto a system: Ritz projection for
/// smooth data, L2 projection otherwise, zeros for v = 0.
pub fn initial_coefficients(sys: &FemSystem, case: &ProblemCase) -> Result<Vec<f64>, ReportError> {
    if matches!(case.initial, crate::model::InitialData::Zero) {
        return Ok(vec![0.0; sys.dofs()]);
    }
    let initial = case.initial;
    let value = move |x: f64, y: f64| initial.value(x, y);
    if initial.is_smooth() {
        let grad = move |x: f64, y: f64| initial.gradient(x, y).expect("smooth data");
        let field = ScalarField {
            value: &value,
            gradient: Some(&grad),
            regularity: Regularity::Smooth,
        };
        Ok(fem::ritz_project(sys, &field)?)
    } else {
        let field = ScalarField {
            value: &value,
            gradient: None,
            regularity: Regularity::Nonsmooth,
        };
        Ok(fem::l2_project(sys, &field)?)
    }
}

/// Runs one FEM time-stepping leg and returns the final snapshot.
pub fn fem_final_snapshot(
    scheme: SchemeKind,
    sys: &FemSystem,
    params: &ModelParams,
    case: &ProblemCase,
    n_steps: usize,
    context: &'static str,
) -> Result<Vec<f64>, ReportError> {
    let v = initial_coefficients(sys, case)?;
    let opts = StepOptions {
        // only the endpoint matters for a convergence table; the stepper
        // keeps its own dense history regardless
        snapshot_stride: n_steps.max(1),
        ..Default::default()
    };
    let params = *params;
    let case = *case;
    let mesh = sys.mesh().clone();
    let sampler = move |t: f64| -> Vec<f64> {
        fem::load_vector(&mesh, &|x, y| case.source.value(&params, x, y, t))
    };
    let source: Option<&dyn Fn(f64) -> Vec<f64>> = if case.source.is_none() {
        None
    } else {
        Some(&sampler)
    };
    let traj = run_scheme(
        scheme,
        StepSystem::Fem(sys),
        &params,
        &v,
        source,
        n_steps,
        &opts,
    )
    .map_err(|source| ReportError::Step { context, source })?;
    Ok(traj.final_snapshot().to_vec())
}

fn norm_scale(case: &ProblemCase) -> f64 {
    match case.initial.l2_norm() {
        Some(n) if n > 0.0 => n,
        _ => 1.0,
    }
}

fn measure(
    norms: &[Norm],
    fine: &FemSystem,
    reference: &[f64],
    candidate_mesh: &TriMesh,
    candidate: &[f64],
    l2_scale: f64,
) -> Result<Vec<f64>, ReportError> {
    let d = difference_on_fine(fine, reference, candidate_mesh, candidate)?;
    Ok(norms
        .iter()
        .map(|n| match n {
            Norm::L2 => fine.l2_norm(&d) / l2_scale,
            Norm::H1 => fine.h1_seminorm(&d),
            Norm::Linf => d.iter().fold(0.0f64, |m, &x| m.max(libm::fabs(x))),
        })
        .collect())
}

fn rows_with_rates(
    levels: &[f64],
    steps: &[f64],
    errors: &[Vec<f64>],
    norms: &[Norm],
) -> Vec<ReportRow> {
    let mut per_norm_rates: Vec<Vec<Option<f64>>> = Vec::new();
    for k in 0..norms.len() {
        let column: Vec<f64> = errors.iter().map(|row| row[k]).collect();
        per_norm_rates.push(eoc(&column, steps));
    }
    levels
        .iter()
        .enumerate()
        .map(|(i, &level)| ReportRow {
            level,
            errors: errors[i].clone(),
            rates: (0..norms.len())
                .map(|k| {
                    if i == 0 {
                        None
                    } else {
                        per_norm_rates[k][i - 1]
                    }
                })
                .collect(),
        })
        .collect()
}

/// Runs the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ConvergenceReport, ReportError> {
    crate::model::validate(config.params).map_err(|e| ReportError::BadConfig(format!("{e}")))?;
    if config.norms.is_empty() {
        return Err(ReportError::BadConfig("no norms requested".into()));
    }
    match config.study {
        Study::TemporalRate => temporal_rate(config),
        Study::SpatialRate | Study::Inhomogeneous => spatial_rate(config),
        Study::TemporalPrefactor | Study::SpatialPrefactor => prefactor(config),
    }
}

fn ladder_check(ladder: &[usize], what: &str) -> Result<(), ReportError> {
    if ladder.is_empty() {
        return Err(ReportError::BadConfig(format!("{what} ladder is empty")));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ReportError::BadConfig(format!(
            "{what} ladder must be strictly increasing"
        )));
    }
    Ok(())
}

fn temporal_rate(config: &ExperimentConfig) -> Result<ConvergenceReport, ReportError> {
    let mut reports = run_temporal_rate_family(config, &[config.scheme])?;
    Ok(reports.remove(0))
}

/// Temporal-rate ladders for several schemes against one shared fine-step
/// reference (which always runs the second-order scheme).
pub fn run_temporal_rate_family(
    config: &ExperimentConfig,
    schemes: &[SchemeKind],
) -> Result<Vec<ConvergenceReport>, ReportError> {
    ladder_check(&config.n_list, "step")?;
    let Reference::NestedFine { m_ref, n_ref } = config.reference else {
        return Err(ReportError::BadConfig(
            "temporal studies use a fine-step reference on the same mesh".into(),
        ));
    };
    if m_ref != config.m_fixed {
        return Err(ReportError::BadConfig(
            "temporal reference must live on the study mesh".into(),
        ));
    }
    if n_ref <= *config.n_list.last().unwrap() {
        return Err(ReportError::BadConfig(
            "reference steps must exceed every ladder entry".into(),
        ));
    }
    let mesh = TriMesh::build_uniform(config.m_fixed)?;
    let sys = assemble(&mesh);
    let reference = fem_final_snapshot(
        SchemeKind::CorrectedSbd,
        &sys,
        &config.params,
        &config.case,
        n_ref,
        "temporal reference run",
    )?;
    let scale = norm_scale(&config.case);
    let mut reports = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut errors = Vec::new();
        let mut steps = Vec::new();
        let mut levels = Vec::new();
        for &n in &config.n_list {
            let candidate = fem_final_snapshot(
                scheme,
                &sys,
                &config.params,
                &config.case,
                n,
                "temporal ladder run",
            )?;
            errors.push(measure(
                &config.norms,
                &sys,
                &reference,
                &mesh,
                &candidate,
                scale,
            )?);
            steps.push(config.params.t_final / n as f64);
            levels.push(n as f64);
        }
        reports.push(ConvergenceReport {
            case_label: config.case_label.clone(),
            scheme,
            params: config.params,
            study: config.study,
            reference: config.reference.describe(),
            norms: config.norms.clone(),
            rows: rows_with_rates(&levels, &steps, &errors, &config.norms),
            fitted_slope: None,
            wall_seconds: None,
        });
    }
    Ok(reports)
}

fn build_reference_field(config: &ExperimentConfig) -> Result<(FemSystem, Vec<f64>), ReportError> {
    match config.reference {
        Reference::NestedFine { m_ref, n_ref } => {
            let mesh = TriMesh::build_uniform(m_ref)?;
            let sys = assemble(&mesh);
            let reference = fem_final_snapshot(
                config.scheme,
                &sys,
                &config.params,
                &config.case,
                n_ref,
                "spatial reference run",
            )?;
            Ok((sys, reference))
        }
        Reference::Spectral { mode_cut, m_ref } => {
            let mesh = TriMesh::build_uniform(m_ref)?;
            let sys = assemble(&mesh);
            let reference = oracle::reference_interior(
                &config.params,
                &config.case,
                config.params.t_final,
                &mesh,
                mode_cut,
            )?;
            Ok((sys, reference))
        }
        Reference::Exact { m_ref } => {
            let exact = config.case.exact_solution().ok_or_else(|| {
                ReportError::BadConfig("case has no closed-form exact solution".into())
            })?;
            let mesh = TriMesh::build_uniform(m_ref)?;
            let sys = assemble(&mesh);
            let t = config.params.t_final;
            let reference = mesh.sample_interior(&|x, y| exact(x, y, t));
            Ok((sys, reference))
        }
    }
}

fn spatial_rate(config: &ExperimentConfig) -> Result<ConvergenceReport, ReportError> {
    ladder_check(&config.mesh_list, "mesh")?;
    let (fine_sys, reference) = build_reference_field(config)?;
    let m_fine = fine_sys.mesh().subdivisions();
    for &m in &config.mesh_list {
        if m >= m_fine || m_fine % m != 0 {
            return Err(ReportError::BadConfig(format!(
                "reference mesh {m_fine} must be a strict nested refinement of ladder mesh {m}"
            )));
        }
    }
    let scale = norm_scale(&config.case);
    let mut errors = Vec::new();
    let mut steps = Vec::new();
    let mut levels = Vec::new();
    for &m in &config.mesh_list {
        let mesh = TriMesh::build_uniform(m)?;
        let sys = assemble(&mesh);
        let candidate = fem_final_snapshot(
            config.scheme,
            &sys,
            &config.params,
            &config.case,
            config.n_fixed,
            "spatial ladder run",
        )?;
        errors.push(measure(
            &config.norms,
            &fine_sys,
            &reference,
            &mesh,
            &candidate,
            scale,
        )?);
        steps.push(1.0 / m as f64);
        levels.push(m as f64);
    }
    Ok(ConvergenceReport {
        case_label: config.case_label.clone(),
        scheme: config.scheme,
        params: config.params,
        study: config.study,
        reference: config.reference.describe(),
        norms: config.norms.clone(),
        rows: rows_with_rates(&levels, &steps, &errors, &config.norms),
        fitted_slope: None,
        wall_seconds: None,
    })
}

fn prefactor(config: &ExperimentConfig) -> Result<ConvergenceReport, ReportError> {
    let mut reports = run_prefactor_family(config, &[config.scheme])?;
    Ok(reports.remove(0))
}

/// Prefactor ladders for several schemes. Temporal-prefactor references
/// (fine-step SBD on the study mesh) are computed once per horizon and
/// shared; spatial-prefactor references are scheme-specific by design (same
/// scheme and step count, so the temporal error cancels in the difference)
/// and are computed per scheme.
pub fn run_prefactor_family(
    config: &ExperimentConfig,
    schemes: &[SchemeKind],
) -> Result<Vec<ConvergenceReport>, ReportError> {
    if config.t_list.is_empty() {
        return Err(ReportError::BadConfig("horizon ladder is empty".into()));
    }
    if config.t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ReportError::BadConfig(
            "horizon ladder must be strictly decreasing".into(),
        ));
    }
    let scale = norm_scale(&config.case);
    let mesh = TriMesh::build_uniform(config.m_fixed)?;
    let sys = assemble(&mesh);

    // per-horizon references, shared across schemes where possible
    let mut shared_refs: Vec<Option<(FemSystem, Vec<f64>)>> = Vec::new();
    if matches!(config.study, Study::TemporalPrefactor) {
        let Reference::NestedFine { m_ref, n_ref } = config.reference else {
            return Err(ReportError::BadConfig(
                "temporal prefactor needs a fine-step reference".into(),
            ));
        };
        if m_ref != config.m_fixed {
            return Err(ReportError::BadConfig(
                "temporal prefactor reference must live on the study mesh".into(),
            ));
        }
        for &t in &config.t_list {
            let mut params = config.params;
            params.t_final = t;
            let reference = fem_final_snapshot(
                SchemeKind::CorrectedSbd,
                &sys,
                &params,
                &config.case,
                n_ref,
                "prefactor reference run",
            )?;
            shared_refs.push(Some((sys.clone(), reference)));
        }
    } else {
        shared_refs.resize_with(config.t_list.len(), || None);
    }

    let mut reports = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut errors = Vec::new();
        let mut steps = Vec::new();
        let mut levels = Vec::new();
        for (idx, &t) in config.t_list.iter().enumerate() {
            let mut params = config.params;
            params.t_final = t;
            let candidate = fem_final_snapshot(
                scheme,
                &sys,
                &params,
                &config.case,
                config.n_fixed,
                "prefactor ladder run",
            )?;
            let errs = match &shared_refs[idx] {
                Some((fine_sys, reference)) => {
                    measure(&config.norms, fine_sys, reference, &mesh, &candidate, scale)?
                }
                None => {
                    let Reference::NestedFine { m_ref, n_ref } = config.reference else {
                        return Err(ReportError::BadConfig(
                            "spatial prefactor needs a nested fine-mesh reference".into(),
                        ));
                    };
                    if n_ref != config.n_fixed {
                        return Err(ReportError::BadConfig(
                            "spatial prefactor reference must reuse the study step count so the temporal error cancels"
                                .into(),
                        ));
                    }
                    let fine_mesh = TriMesh::build_uniform(m_ref)?;
                    let fine_sys = assemble(&fine_mesh);
                    let reference = fem_final_snapshot(
                        scheme,
                        &fine_sys,
                        &params,
                        &config.case,
                        config.n_fixed,
                        "prefactor reference run",
                    )?;
                    measure(
                        &config.norms,
                        &fine_sys,
                        &reference,
                        &mesh,
                        &candidate,
                        scale,
                    )?
                }
            };
            errors.push(errs);
            steps.push(t);
            levels.push(t);
        }
        // fitted slope of the first norm column in log-log coordinates
        let points: Vec<(f64, f64)> = levels
            .iter()
            .zip(&errors)
            .filter(|(_, e)| e[0] > 0.0)
            .map(|(&t, e)| (libm::log(t), libm::log(e[0])))
            .collect();
        let fitted_slope = if points.len() >= 2 {
            Some(oracle::fit_slope(&points))
        } else {
            None
        };
        reports.push(ConvergenceReport {
            case_label: config.case_label.clone(),
            scheme,
            params: config.params,
            study: config.study,
            reference: config.reference.describe(),
            norms: config.norms.clone(),
            rows: rows_with_rates(&levels, &steps, &errors, &config.norms),
            fitted_slope,
            wall_seconds: None,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InitialData;

    #[test]
    fn errors_vanish_for_identical_inputs() {
        let mesh = TriMesh::build_uniform(8).unwrap();
        let sys = assemble(&mesh);
        let coeffs: Vec<f64> = (0..sys.dofs()).map(|d| libm::sin(d as f64)).collect();
        assert_eq!(l2_error(&sys, &coeffs, &mesh, &coeffs).unwrap(), 0.0);
        assert_eq!(h1_error(&sys, &coeffs, &mesh, &coeffs).unwrap(), 0.0);
        assert_eq!(linf_error(&sys, &coeffs, &mesh, &coeffs).unwrap(), 0.0);
    }

    #[test]
    fn single_coefficient_perturbation() {
        // candidate = reference + c e_i on the same mesh:
        // squared L2 error is c^2 M_ii
        let mesh = TriMesh::build_uniform(6).unwrap();
        let sys = assemble(&mesh);
        let reference: Vec<f64> = (0..sys.dofs()).map(|d| 0.1 * d as f64).collect();
        let mut candidate = reference.clone();
        let c = 0.37;
        let i = 7;
        candidate[i] += c;
        let err = l2_error(&sys, &reference, &mesh, &candidate).unwrap();
        let want = libm::sqrt(c * c * sys.mass().get(i, i));
        assert!((err - want).abs() < 1e-14);
        let linf = linf_error(&sys, &reference, &mesh, &candidate).unwrap();
        assert!((linf - c).abs() < 1e-15);
    }

    #[test]
    fn eoc_log_ratios() {
        assert_eq!(eoc(&[4e-2, 1e-2], &[1.0, 0.5]), vec![Some(2.0)]);
        let rates = eoc(&[1e-3, 5e-4], &[0.2, 0.1]);
        assert!((rates[0].unwrap() - 1.0).abs() < 1e-12);
        // undefined marker on vanishing errors
        assert_eq!(eoc(&[1e-3, 0.0], &[0.2, 0.1]), vec![None]);
    }

    #[test]
    fn eoc_on_a_halving_error_ladder() {
        // halving ladder with errors 2.76e-4 .. 8.37e-6 yields the rate
        // sequence 1.53, 1.29, 1.15, 1.07
        let errors = [2.76e-4, 9.58e-5, 3.91e-5, 1.76e-5, 8.37e-6];
        let steps: Vec<f64> = (0..5)
            .map(|k| 0.5 / (20.0 * libm::pow(2.0, k as f64)))
            .collect();
        let rates = eoc(&errors, &steps);
        let want = [1.53, 1.29, 1.15, 1.07];
        for (rate, want) in rates.iter().zip(want) {
            assert!((rate.unwrap() - want).abs() < 5e-3);
        }
    }

    #[test]
    fn normalization_scale_is_initial_norm() {
        assert!((norm_scale(&ProblemCase::case_a()) - 1.0 / 30.0).abs() < 1e-15);
        assert!((norm_scale(&ProblemCase::case_b()) - libm::sqrt(0.5)).abs() < 1e-15);
        // v = 0 cases stay unnormalized
        assert_eq!(norm_scale(&ProblemCase::case_c()), 1.0);
    }

    #[test]
    fn initial_projection_dispatch() {
        let mesh = TriMesh::build_uniform(8).unwrap();
        let sys = assemble(&mesh);
        // zero data short-circuits
        let z = initial_coefficients(&sys, &ProblemCase::case_c()).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        // smooth data goes through the Ritz projection and lands near the
        // nodal values
        let r = initial_coefficients(&sys, &ProblemCase::case_a()).unwrap();
        let (x, y) = mesh.dof_position(0);
        assert!((r[0] - InitialData::CaseA.value(x, y)).abs() < 5e-3);
    }

    #[test]
    fn small_temporal_experiment_runs_and_is_deterministic() {
        let config = ExperimentConfig {
            params: ModelParams::experiment(0.5, 0.5),
            case: ProblemCase::case_a(),
            case_label: "a".into(),
            scheme: SchemeKind::BackwardEuler,
            study: Study::TemporalRate,
            mesh_list: vec![],
            n_list: vec![8, 16],
            t_list: vec![],
            m_fixed: 8,
            n_fixed: 0,
            reference: Reference::NestedFine {
                m_ref: 8,
                n_ref: 64,
            },
            norms: vec![Norm::L2],
        };
        let r1 = run_experiment(&config).unwrap();
        let r2 = run_experiment(&config).unwrap();
        assert_eq!(r1.rows, r2.rows);
        assert_eq!(r1.rows.len(), 2);
        assert!(r1.rows[0].errors[0] > r1.rows[1].errors[0]);
        assert!(r1.rows[1].rates[0].is_some());
    }

    #[test]
    fn bad_ladders_are_rejected() {
        let mut config = ExperimentConfig {
            params: ModelParams::experiment(0.5, 0.5),
            case: ProblemCase::case_a(),
            case_label: "a".into(),
            scheme: SchemeKind::BackwardEuler,
            study: Study::TemporalRate,
            mesh_list: vec![],
            n_list: vec![16, 8],
            t_list: vec![],
            m_fixed: 8,
            n_fixed: 0,
            reference: Reference::NestedFine {
                m_ref: 8,
                n_ref: 64,
            },
            norms: vec![Norm::L2],
        };
        assert!(matches!(
            run_experiment(&config),
            Err(ReportError::BadConfig(_))
        ));
        config.n_list = vec![8, 16];
        config.reference = Reference::NestedFine {
            m_ref: 8,
            n_ref: 16,
        };
        assert!(matches!(
            run_experiment(&config),
            Err(ReportError::BadConfig(_))
        ));
    }

    #[test]
    fn spatial_experiment_with_exact_reference() {
        // case (c) against its closed form on a tiny ladder
        let config = ExperimentConfig {
            params: ModelParams::experiment(0.25, 0.75),
            case: ProblemCase::case_c(),
            case_label: "c".into(),
            scheme: SchemeKind::CorrectedSbd,
            study: Study::Inhomogeneous,
            mesh_list: vec![4, 8],
            n_list: vec![],
            t_list: vec![],
            m_fixed: 0,
            n_fixed: 32,
            reference: Reference::Exact { m_ref: 32 },
            norms: vec![Norm::L2, Norm::Linf],
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.rows.len(), 2);
        let rate = report.rows[1].rates[0].unwrap();
        assert!(rate > 1.5, "rate {rate}");
    }
}
