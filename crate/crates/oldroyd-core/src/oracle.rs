//! Spectral reference solutions by numerical inversion of the Laplace-domain
//! solution operator.
//!
//! On the unit square the Dirichlet Laplacian diagonalizes over the sine
//! basis, so the transformed solution decouples into modes
//!
//! ```text
//! uhat_kl(z) = g(z) / (z (g(z) + lambda_kl)) * v_kl
//!            + 1 / (mu (1 + b z^beta) (g(z) + lambda_kl)) * fhat_kl(z),
//! ```
//!
//! with `lambda_kl = pi^2 (k^2 + l^2)`. Each mode is inverted along the
//! sectorial contour
//!
//! ```text
//! Gamma = { rho e^(+-i theta) : rho >= delta } u { delta e^(i psi) : |psi| <= theta },
//! ```
//!
//! oriented with increasing imaginary part, `theta in (pi/2, pi/(1+alpha))`
//! and `delta = 1/t`. Conjugate symmetry of the transforms lets the
//! quadrature run over the upper half only. The rays are truncated where
//! `|e^(z t)|` drops below a set tolerance and every piece is integrated by
//! composite Gauss-Legendre panels, which keeps the closed-form validation
//! cases below 1e-10 relative error at the default budget.

use crate::model::{g_unchecked, InitialData, ModelParams, ProblemCase};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;

/// Errors from the spectral oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// The quadrature produced a non-finite sum.
    NonFinite,
    /// Contour parameters violate the admissible sector.
    InvalidContour {
        /// Requested opening angle.
        theta: f64,
        /// Largest admissible angle, pi/(1+alpha).
        max: f64,
    },
    /// The case carries no closed-form Laplace transform of its source.
    MissingTransform,
    /// g(z) + lambda vanished on the contour (cannot happen in the sector).
    ResonantMode,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::NonFinite => write!(f, "contour quadrature sum is not finite"),
            OracleError::InvalidContour { theta, max } => {
                write!(f, "contour angle {theta} outside (pi/2, {max})")
            }
            OracleError::MissingTransform => write!(
                f,
                "source has no closed-form Laplace transform; use a fine-mesh reference instead"
            ),
            OracleError::ResonantMode => write!(f, "g(z) + lambda vanished on the contour"),
        }
    }
}

impl core::error::Error for OracleError {}

/// One sine mode of the square with its data coefficients.
///
/// Coefficients are those of the plain double sine series
/// `v = sum v_kl sin(k pi x) sin(l pi y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMode {
    /// Horizontal wavenumber.
    pub k: u32,
    /// Vertical wavenumber.
    pub l: u32,
    /// Dirichlet eigenvalue pi^2 (k^2 + l^2).
    pub lambda: f64,
    /// Sine coefficient of the initial data.
    pub v_coef: f64,
    /// Sine coefficient of the spatial source factor.
    pub f_coef: f64,
}

impl SpectralMode {
    /// Builds the mode for a case; `None` when a coefficient has no closed
    /// form.
    pub fn new(case: &ProblemCase, k: u32, l: u32) -> Option<Self> {
        let v_coef = initial_sine_coefficient(&case.initial, k, l)?;
        let f_coef = source_sine_coefficient(&case.source, k, l)?;
        Some(SpectralMode {
            k,
            l,
            lambda: PI * PI * ((k * k + l * l) as f64),
            v_coef,
            f_coef,
        })
    }
}

/// Sine-series coefficient of the initial data; `None` for custom data
/// without a closed form.
pub fn initial_sine_coefficient(initial: &InitialData, k: u32, l: u32) -> Option<f64> {
    let (kf, lf) = (k as f64, l as f64);
    match initial {
        InitialData::CaseA => {
            if k % 2 == 1 && l % 2 == 1 {
                let pi6 = PI * PI * PI * PI * PI * PI;
                Some(64.0 / (kf * kf * kf * lf * lf * lf * pi6))
            } else {
                Some(0.0)
            }
        }
        InitialData::CaseB => Some(indicator_sine_coefficient(k, l)),
        InitialData::Zero => Some(0.0),
        InitialData::SingleMode { k: mk, l: ml } => {
            Some(if *mk == k && *ml == l { 1.0 } else { 0.0 })
        }
        InitialData::Custom(_) => None,
    }
}

/// Sine-series coefficient of the spatial source factor; `None` for custom
/// sources without a declared closed form.
pub fn source_sine_coefficient(source: &crate::model::SourceTerm, k: u32, l: u32) -> Option<f64> {
    match source {
        crate::model::SourceTerm::None => Some(0.0),
        crate::model::SourceTerm::CaseC => Some(if k == 2 && l == 2 { 1.0 } else { 0.0 }),
        crate::model::SourceTerm::CaseD => Some(indicator_sine_coefficient(k, l)),
        crate::model::SourceTerm::Custom { .. } => None,
    }
}

/// Sine coefficients of the indicator of (0, 1/2] x (0, 1):
/// 4 (1 - cos(k pi / 2)) (1 - cos(l pi)) / (k l pi^2).
fn indicator_sine_coefficient(k: u32, l: u32) -> f64 {
    let (kf, lf) = (k as f64, l as f64);
    4.0 * ((1.0 - libm::cos(kf * PI / 2.0)) / (kf * PI)) * ((1.0 - libm::cos(lf * PI)) / (lf * PI))
}

/// Parameters of the sectorial integration contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    /// Opening angle, strictly inside (pi/2, pi/(1+alpha)).
    pub theta: f64,
    /// Arc radius; the standard choice is 1/t.
    pub delta: f64,
    /// Quadrature nodes per ray.
    pub n_points: usize,
    /// Quadrature nodes on the half arc.
    pub n_arc: usize,
    /// Ray truncation tolerance on |e^(z t)|.
    pub eps_trunc: f64,
}

impl Contour {
    /// The default contour for inversion at time `t`: angle 80% into the
    /// admissible interval, radius 1/t.
    pub fn standard(alpha: f64, t: f64) -> Self {
        let theta = PI / 2.0 + 0.8 * (PI / (1.0 + alpha) - PI / 2.0);
        Contour {
            theta,
            delta: 1.0 / t,
            n_points: 400,
            n_arc: 100,
            eps_trunc: 1e-14,
        }
    }

    /// Same contour with a different angle fraction in (0, 1).
    pub fn with_angle_fraction(alpha: f64, t: f64, fraction: f64) -> Self {
        let theta = PI / 2.0 + fraction * (PI / (1.0 + alpha) - PI / 2.0);
        Contour {
            theta,
            ..Contour::standard(alpha, t)
        }
    }

    /// Ray truncation radius at time `t`.
    pub fn rho_max(&self, t: f64) -> f64 {
        // a few extra e-folds absorb polynomial growth of the transform
        let decay = -libm::cos(self.theta);
        self.delta + (-libm::log(self.eps_trunc) + 8.0) / (t * decay)
    }

    fn check(&self, alpha: f64) -> Result<(), OracleError> {
        let max = PI / (1.0 + alpha);
        if !(self.theta > PI / 2.0 && self.theta < max) {
            return Err(OracleError::InvalidContour {
                theta: self.theta,
                max,
            });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (k as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if libm::fabs(dx) < 1e-15 {
                break;
            }
        }
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

const PANEL_ORDER: usize = 16;

/// Integrates `e^(z t) F(z)` over the upper half contour; the inverse
/// transform is Im(result) / pi by conjugate symmetry.
fn upper_half_integral(f: &dyn Fn(Complex64) -> Complex64, t: f64, contour: &Contour) -> Complex64 {
    let (gl_x, gl_w) = gauss_legendre(PANEL_ORDER);
    let mut total = Complex64::new(0.0, 0.0);

    // arc: z = delta e^(i psi), psi in [0, theta]
    let arc_panels = contour.n_arc.div_ceil(PANEL_ORDER).max(2);
    let dpsi = contour.theta / arc_panels as f64;
    for p in 0..arc_panels {
        let a = p as f64 * dpsi;
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let psi = a + 0.5 * dpsi * (x + 1.0);
            let dir = Complex64::from_polar(1.0, psi);
            let z = contour.delta * dir;
            let dz = Complex64::new(0.0, contour.delta) * dir;
            total += w * 0.5 * dpsi * (z * t).exp() * f(z) * dz;
        }
    }

    // ray: z = rho e^(i theta), rho in [delta, rho_max]
    let rho_max = contour.rho_max(t);
    let ray_panels = contour.n_points.div_ceil(PANEL_ORDER).max(4);
    let drho = (rho_max - contour.delta) / ray_panels as f64;
    let dir = Complex64::from_polar(1.0, contour.theta);
    for p in 0..ray_panels {
        let a = contour.delta + p as f64 * drho;
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let rho = a + 0.5 * drho * (x + 1.0);
            let z = rho * dir;
            total += w * 0.5 * drho * (z * t).exp() * f(z) * dir;
        }
    }
    total
}

/// Inverse Laplace transform (1/2 pi i) int e^(z t) F(z) dz over the
/// sectorial contour, for transforms with F(conj z) = conj F(z).
pub fn contour_inverse_laplace(
    f: &dyn Fn(Complex64) -> Complex64,
    t: f64,
    alpha: f64,
    contour: &Contour,
) -> Result<f64, OracleError> {
    contour.check(alpha)?;
    let upper = upper_half_integral(f, t, contour);
    let value = upper.im / PI;
    if !value.is_finite() {
        return Err(OracleError::NonFinite);
    }
    Ok(value)
}

/// Full-contour inversion returning the complex quadrature value; the
/// imaginary part measures how well F respects conjugate symmetry.
pub fn contour_inverse_laplace_complex(
    f: &dyn Fn(Complex64) -> Complex64,
    t: f64,
    alpha: f64,
    contour: &Contour,
) -> Result<Complex64, OracleError> {
    contour.check(alpha)?;
    let upper = upper_half_integral(f, t, contour);
    let lower = upper_half_integral(&|z: Complex64| f(z.conj()).conj(), t, contour);
    let value = (upper - lower.conj()) / Complex64::new(0.0, 2.0 * PI);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(OracleError::NonFinite);
    }
    Ok(value)
}

/// Laplace-domain modal solution:
/// `g/(z(g+lambda)) v + 1/(mu (1 + b z^beta)(g+lambda)) fhat`.
pub fn uhat_mode(
    params: &ModelParams,
    z: Complex64,
    lambda: f64,
    v_coef: f64,
    fhat: Complex64,
) -> Result<Complex64, OracleError> {
    let g = g_unchecked(params, z);
    let denom = g + lambda;
    if denom.norm() == 0.0 {
        return Err(OracleError::ResonantMode);
    }
    let homogeneous = g / (z * denom) * v_coef;
    let source =
        fhat / (params.mu * (Complex64::new(1.0, 0.0) + params.b * z.powf(params.beta)) * denom);
    Ok(homogeneous + source)
}

/// Modal solution value u_kl(t) by contour inversion.
pub fn invert_mode(
    params: &ModelParams,
    case: &ProblemCase,
    mode: &SpectralMode,
    t: f64,
    contour: &Contour,
) -> Result<f64, OracleError> {
    let needs_source = mode.f_coef != 0.0 && !case.source.is_none();
    if needs_source
        && case
            .source
            .time_laplace(params, Complex64::new(1.0, 0.0))
            .is_none()
    {
        return Err(OracleError::MissingTransform);
    }
    let transform = |z: Complex64| -> Complex64 {
        let fhat = if needs_source {
            match case.source.time_laplace(params, z) {
                Some(q) => mode.f_coef * q,
                None => Complex64::new(f64::NAN, f64::NAN),
            }
        } else {
            Complex64::new(0.0, 0.0)
        };
        uhat_mode(params, z, mode.lambda, mode.v_coef, fhat)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    contour_inverse_laplace(&transform, t, params.alpha, contour)
}

/// All modes of a case with a nonzero coefficient, k, l <= mode_cut.
pub fn case_modes(case: &ProblemCase, mode_cut: u32) -> Result<Vec<SpectralMode>, OracleError> {
    let mut modes = Vec::new();
    for k in 1..=mode_cut {
        for l in 1..=mode_cut {
            let mode = SpectralMode::new(case, k, l).ok_or(OracleError::MissingTransform)?;
            if mode.v_coef != 0.0 || mode.f_coef != 0.0 {
                modes.push(mode);
            }
        }
    }
    Ok(modes)
}

/// Mode-summed reference solution at arbitrary points.
pub fn reference_solution(
    params: &ModelParams,
    case: &ProblemCase,
    t: f64,
    points: &[(f64, f64)],
    mode_cut: u32,
) -> Result<Vec<f64>, OracleError> {
    let contour = Contour::standard(params.alpha, t);
    let modes = case_modes(case, mode_cut)?;
    let mut out = vec![0.0; points.len()];
    for mode in &modes {
        let u_kl = invert_mode(params, case, mode, t, &contour)?;
        let (kf, lf) = (mode.k as f64, mode.l as f64);
        for (o, &(x, y)) in out.iter_mut().zip(points) {
            *o += u_kl * libm::sin(kf * PI * x) * libm::sin(lf * PI * y);
        }
    }
    Ok(out)
}

/// Mode-summed reference at the interior nodes of a mesh, with per-axis
/// sine tables so the node loop is a rank-1 update per mode.
pub fn reference_interior(
    params: &ModelParams,
    case: &ProblemCase,
    t: f64,
    mesh: &crate::mesh::TriMesh,
    mode_cut: u32,
) -> Result<Vec<f64>, OracleError> {
    let contour = Contour::standard(params.alpha, t);
    let modes = case_modes(case, mode_cut)?;
    let m = mesh.subdivisions();
    // sine_table[k-1][i-1] = sin(k pi i / m) over the interior lattice lines
    let mut table = vec![vec![0.0f64; m - 1]; mode_cut as usize];
    for (krow, row) in table.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            *v = libm::sin((krow + 1) as f64 * PI * (i + 1) as f64 / m as f64);
        }
    }
    let mut out = vec![0.0; mesh.interior_dofs()];
    for mode in &modes {
        let u_kl = invert_mode(params, case, mode, t, &contour)?;
        let row_k = &table[(mode.k - 1) as usize];
        let row_l = &table[(mode.l - 1) as usize];
        for j in 1..m {
            let base = (j - 1) * (m - 1);
            let sy = u_kl * row_l[j - 1];
            for i in 1..m {
                out[base + i - 1] += sy * row_k[i - 1];
            }
        }
    }
    Ok(out)
}

/// Least-squares slope of log(lambda^nu |E_mode^(m)(t)|) against log t.
///
/// `E_mode` is the modal solution operator `g/(z(g+lambda))`; the m-th time
/// derivative multiplies the transform by z^m. For nu = 1, m = 0 and large
/// lambda this probes the smoothing envelope of the operator norm.
pub fn decay_probe(
    params: &ModelParams,
    lambda: f64,
    nu: u32,
    m_order: u32,
    t_grid: &[f64],
) -> Result<f64, OracleError> {
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let contour = Contour::standard(params.alpha, t);
        let transform = |z: Complex64| {
            let g = g_unchecked(params, z);
            z.powu(m_order) * g / (z * (g + lambda))
        };
        let e = contour_inverse_laplace(&transform, t, params.alpha, &contour)?;
        let value = libm::pow(lambda, nu as f64) * libm::fabs(e);
        if value > 0.0 {
            points.push((libm::log(t), libm::log(value)));
        }
    }
    if points.len() < 2 {
        return Err(OracleError::NonFinite);
    }
    Ok(fit_slope(&points))
}

/// As [`decay_probe`] but taking the sup over a ladder of eigenvalues
/// before fitting, which realizes operator-norm envelopes for m >= 1.
pub fn envelope_decay_probe(
    params: &ModelParams,
    lambdas: &[f64],
    nu: u32,
    m_order: u32,
    t_grid: &[f64],
) -> Result<f64, OracleError> {
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let contour = Contour::standard(params.alpha, t);
        let mut sup = 0.0f64;
        for &lambda in lambdas {
            let transform = |z: Complex64| {
                let g = g_unchecked(params, z);
                z.powu(m_order) * g / (z * (g + lambda))
            };
            let e = contour_inverse_laplace(&transform, t, params.alpha, &contour)?;
            sup = sup.max(libm::pow(lambda, nu as f64) * libm::fabs(e));
        }
        if sup > 0.0 {
            points.push((libm::log(t), libm::log(sup)));
        }
    }
    if points.len() < 2 {
        return Err(OracleError::NonFinite);
    }
    Ok(fit_slope(&points))
}

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
