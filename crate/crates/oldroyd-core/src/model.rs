//! Problem parameters, data cases, and the scalar Laplace symbol.
//!
//! The model is
//!
//! ```text
//! (1 + a D_t^alpha) u_t = mu (1 + b D_t^beta) Lap(u) + f,
//! ```
//!
//! whose Laplace transform factors through the scalar symbol
//!
//! ```text
//! g(z) = (z + a z^(alpha+1)) / (mu (1 + b z^beta)).
//! ```
//!
//! For `z` in a sector `|arg z| < theta` with `theta < pi/(1+alpha)` the
//! symbol stays inside the sector `|arg g| <= (1+alpha)|arg z|`, which is
//! what makes the contour representation of the solution operator (and the
//! stability of the time steppers) work. All complex powers use the
//! principal branch.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;

/// The five PDE constants plus the time horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Fractional order of the derivative acting on `u_t`, in (0,1).
    pub alpha: f64,
    /// Fractional order of the derivative acting on `Lap(u)`, in (0,1).
    pub beta: f64,
    /// Coefficient of `D_t^alpha u_t`, nonnegative.
    pub a: f64,
    /// Coefficient of `D_t^beta Lap(u)`, nonnegative.
    pub b: f64,
    /// Viscosity-like constant, positive.
    pub mu: f64,
    /// Final time, positive.
    pub t_final: f64,
}

impl ModelParams {
    /// The standard experiment configuration: mu = a = b = 1, T = 1/2.
    pub fn experiment(alpha: f64, beta: f64) -> Self {
        ModelParams {
            alpha,
            beta,
            a: 1.0,
            b: 1.0,
            mu: 1.0,
            t_final: 0.5,
        }
    }

    /// Classical heat equation limit (a = b = 0).
    pub fn heat(mu: f64, t_final: f64) -> Self {
        ModelParams {
            alpha: 0.5,
            beta: 0.5,
            a: 0.0,
            b: 0.0,
            mu,
            t_final,
        }
    }

    /// Upper end of the admissible contour angles, pi/(1+alpha).
    pub fn max_sector_angle(&self) -> f64 {
        PI / (1.0 + self.alpha)
    }
}

/// Validation failure naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    /// Field that failed its range check.
    pub field: &'static str,
    /// Human-readable constraint.
    pub constraint: &'static str,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.constraint)
    }
}

impl core::error::Error for ValidationError {}

/// Checks the parameter ranges and returns the parameters unchanged.
///
/// `a = 0` and `b = 0` are admitted even though the model assumes positive
/// constants; they enable regression tests against the classical heat
/// equation, and the stepper formulas remain well defined.
pub fn validate(params: ModelParams) -> Result<ModelParams, ValidationError> {
    let fail = |field, constraint| Err(ValidationError { field, constraint });
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return fail("alpha", "must lie in (0,1)");
    }
    if !(params.beta > 0.0 && params.beta < 1.0) {
        return fail("beta", "must lie in (0,1)");
    }
    if !(params.a >= 0.0 && params.a.is_finite()) {
        return fail("a", "must be nonnegative");
    }
    if !(params.b >= 0.0 && params.b.is_finite()) {
        return fail("b", "must be nonnegative");
    }
    if !(params.mu > 0.0 && params.mu.is_finite()) {
        return fail("mu", "must be positive");
    }
    if !(params.t_final > 0.0 && params.t_final.is_finite()) {
        return fail("T", "must be positive");
    }
    Ok(params)
}

/// Errors from symbol evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolError {
    /// `g` is undefined at the origin.
    ZeroArgument,
    /// The principal branch excludes the negative real axis.
    BranchCut,
}

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolError::ZeroArgument => write!(f, "g(z) is undefined at z = 0"),
            SymbolError::BranchCut => {
                write!(f, "z lies on the negative real axis (principal branch cut)")
            }
        }
    }
}

impl core::error::Error for SymbolError {}

/// g(z) = (z + a z^(alpha+1)) / (mu (1 + b z^beta)), principal branch.
pub fn g_symbol(params: &ModelParams, z: Complex64) -> Result<Complex64, SymbolError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(SymbolError::ZeroArgument);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SymbolError::BranchCut);
    }
    Ok(g_unchecked(params, z))
}

/// g(z) without domain checks, for integrands on a known-good contour.
#[inline]
pub fn g_unchecked(params: &ModelParams, z: Complex64) -> Complex64 {
    let num = z + params.a * z.powf(params.alpha + 1.0);
    let den = params.mu * (Complex64::new(1.0, 0.0) + params.b * z.powf(params.beta));
    num / den
}

/// Initial data `v` of an experiment case.
#[derive(Debug, Clone, Copy)]
pub enum InitialData {
    /// v = x y (1-x)(1-y), smooth.
    CaseA,
    /// v = indicator of (0, 1/2] x (0, 1), nonsmooth.
    CaseB,
    /// v = 0.
    Zero,
    /// v = sin(k pi x) sin(l pi y).
    SingleMode {
        /// Horizontal wavenumber.
        k: u32,
        /// Vertical wavenumber.
        l: u32,
    },
    /// Arbitrary pointwise initial data.
    Custom(fn(f64, f64) -> f64),
}

impl InitialData {
    /// Pointwise value of the initial data.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            InitialData::CaseA => x * y * (1.0 - x) * (1.0 - y),
            InitialData::CaseB => half_strip_indicator(x, y),
            InitialData::Zero => 0.0,
            InitialData::SingleMode { k, l } => {
                libm::sin(*k as f64 * PI * x) * libm::sin(*l as f64 * PI * y)
            }
            InitialData::Custom(f) => f(x, y),
        }
    }

    /// Analytic gradient where one is available (smooth cases only).
    pub fn gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        match self {
            InitialData::CaseA => Some((
                (1.0 - 2.0 * x) * y * (1.0 - y),
                x * (1.0 - x) * (1.0 - 2.0 * y),
            )),
            InitialData::Zero => Some((0.0, 0.0)),
            InitialData::SingleMode { k, l } => {
                let (kf, lf) = (*k as f64, *l as f64);
                Some((
                    kf * PI * libm::cos(kf * PI * x) * libm::sin(lf * PI * y),
                    lf * PI * libm::sin(kf * PI * x) * libm::cos(lf * PI * y),
                ))
            }
            InitialData::CaseB | InitialData::Custom(_) => None,
        }
    }

    /// True when the data has the regularity that permits a Ritz projection.
    pub fn is_smooth(&self) -> bool {
        self.gradient(0.25, 0.25).is_some()
    }

    /// L2 norm of the initial data, used to normalize reported errors.
    pub fn l2_norm(&self) -> Option<f64> {
        match self {
            // ||x(1-x)||^2 on (0,1) is 1/30
            InitialData::CaseA => Some(1.0 / 30.0),
            InitialData::CaseB => Some(libm::sqrt(0.5)),
            InitialData::Zero => Some(0.0),
            InitialData::SingleMode { .. } => Some(0.5),
            InitialData::Custom(_) => None,
        }
    }
}

/// Right-hand side `f` of an experiment case.
#[derive(Debug, Clone, Copy)]
pub enum SourceTerm {
    /// f = 0 (homogeneous problem).
    None,
    /// Manufactured source whose exact solution is t^2 sin(2 pi x) sin(2 pi y).
    CaseC,
    /// f = (1 + t^0.2) * indicator of (0, 1/2] x (0, 1).
    CaseD,
    /// Separable source S(x,y) * q(t) with an optional closed-form transform
    /// of q needed by the spectral oracle.
    Custom {
        /// Spatial factor.
        space: fn(f64, f64) -> f64,
        /// Temporal factor.
        time: fn(f64) -> f64,
        /// Laplace transform of the temporal factor, if available.
        time_laplace: Option<fn(Complex64) -> Complex64>,
    },
}

impl SourceTerm {
    /// Pointwise source value at (x, y, t).
    pub fn value(&self, params: &ModelParams, x: f64, y: f64, t: f64) -> f64 {
        match self {
            SourceTerm::None => 0.0,
            SourceTerm::CaseC => {
                case_c_time(params, t) * libm::sin(2.0 * PI * x) * libm::sin(2.0 * PI * y)
            }
            SourceTerm::CaseD => half_strip_indicator(x, y) * case_d_time(t),
            SourceTerm::Custom { space, time, .. } => space(x, y) * time(t),
        }
    }

    /// Whether the source vanishes identically.
    pub fn is_none(&self) -> bool {
        matches!(self, SourceTerm::None)
    }

    /// Laplace transform of the temporal factor, if the source is separable
    /// with a closed-form transform.
    pub fn time_laplace(&self, params: &ModelParams, z: Complex64) -> Option<Complex64> {
        match self {
            SourceTerm::None => Some(Complex64::new(0.0, 0.0)),
            SourceTerm::CaseC => Some(case_c_laplace(params, z)),
            SourceTerm::CaseD => Some(case_d_laplace(z)),
            SourceTerm::Custom { time_laplace, .. } => time_laplace.map(|f| f(z)),
        }
    }
}

/// Indicator of (0, 1/2] x (0, 1) with the jump-mean value 1/2 on the line
/// x = 1/2. The mean convention matters for quadrature: edge midpoints of
/// the uniform mesh land exactly on the jump line (even m), and with the
/// mean value the 3-point rule integrates the indicator loads exactly,
/// while the one-sided value biases every node on the line by a third.
pub fn half_strip_indicator(x: f64, y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 || x <= 0.0 {
        return 0.0;
    }
    if libm::fabs(x - 0.5) <= 1e-12 {
        0.5
    } else if x < 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Temporal factor of the case (c) source:
/// 2t + 2a t^(1-alpha)/Gamma(2-alpha) + 8 pi^2 mu t^2
///    + 16 pi^2 mu b t^(2-beta)/Gamma(3-beta).
pub fn case_c_time(params: &ModelParams, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let g2a = libm::tgamma(2.0 - params.alpha);
    let g3b = libm::tgamma(3.0 - params.beta);
    2.0 * t
        + 2.0 * params.a * libm::pow(t, 1.0 - params.alpha) / g2a
        + 8.0 * PI * PI * params.mu * t * t
        + 16.0 * PI * PI * params.mu * params.b * libm::pow(t, 2.0 - params.beta) / g3b
}

/// Laplace transform of [`case_c_time`]:
/// 2/z^2 + 2a/z^(2-alpha) + 16 pi^2 mu / z^3 + 16 pi^2 mu b / z^(3-beta).
pub fn case_c_laplace(params: &ModelParams, z: Complex64) -> Complex64 {
    2.0 * z.powf(-2.0)
        + 2.0 * params.a * z.powf(params.alpha - 2.0)
        + 16.0 * PI * PI * params.mu * z.powf(-3.0)
        + 16.0 * PI * PI * params.mu * params.b * z.powf(params.beta - 3.0)
}

/// Temporal factor of the case (d) source, 1 + t^0.2.
pub fn case_d_time(t: f64) -> f64 {
    1.0 + libm::pow(t, 0.2)
}

/// Laplace transform of [`case_d_time`]: 1/z + Gamma(1.2)/z^1.2.
pub fn case_d_laplace(z: Complex64) -> Complex64 {
    z.powf(-1.0) + libm::tgamma(1.2) * z.powf(-1.2)
}

/// An experiment case: initial data plus source.
#[derive(Debug, Clone, Copy)]
pub struct ProblemCase {
    /// Initial data v.
    pub initial: InitialData,
    /// Right-hand side f.
    pub source: SourceTerm,
}

impl ProblemCase {
    /// Case (a): smooth initial data, no source.
    pub fn case_a() -> Self {
        ProblemCase {
            initial: InitialData::CaseA,
            source: SourceTerm::None,
        }
    }

    /// Case (b): discontinuous initial data, no source.
    pub fn case_b() -> Self {
        ProblemCase {
            initial: InitialData::CaseB,
            source: SourceTerm::None,
        }
    }

    /// Case (c): zero initial data, manufactured smooth source.
    pub fn case_c() -> Self {
        ProblemCase {
            initial: InitialData::Zero,
            source: SourceTerm::CaseC,
        }
    }

    /// Case (d): zero initial data, discontinuous source.
    pub fn case_d() -> Self {
        ProblemCase {
            initial: InitialData::Zero,
            source: SourceTerm::CaseD,
        }
    }

    /// Exact solution where one is known in closed form (case (c) only).
    pub fn exact_solution(&self) -> Option<fn(f64, f64, f64) -> f64> {
        match (self.initial, self.source) {
            (InitialData::Zero, SourceTerm::CaseC) => {
                Some(|x, y, t| t * t * libm::sin(2.0 * PI * x) * libm::sin(2.0 * PI * y))
            }
            _ => None,
        }
    }
}

/// A spatial field with optional analytic gradient.
///
/// The regularity tag is experiment bookkeeping only: it records whether a
/// field is smooth enough for the Ritz projection, no Sobolev norms are
/// ever computed.
pub struct ScalarField<'a> {
    /// Pointwise field value.
    pub value: &'a dyn Fn(f64, f64) -> f64,
    /// Analytic gradient, when available.
    pub gradient: Option<&'a dyn Fn(f64, f64) -> (f64, f64)>,
    /// Bookkeeping label.
    pub regularity: Regularity,
}

/// Regularity label for experiment bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// Field admits an analytic gradient.
    Smooth,
    /// Field is only square integrable.
    Nonsmooth,
}

/// Samples of the sector bound: returns the worst excess of
/// |arg g(z)| - (1+alpha)|arg z| over `n` rays in (-theta, theta) at |z| = r.
pub fn sector_excess(params: &ModelParams, theta: f64, r: f64, n: usize) -> f64 {
    let mut worst = f64::MIN;
    for i in 0..n {
        let phi = -theta + (2.0 * theta) * (i as f64 + 0.5) / n as f64;
        let z = Complex64::from_polar(r, phi);
        let g = g_unchecked(params, z);
        let excess = libm::fabs(g.arg()) - (1.0 + params.alpha) * libm::fabs(phi);
        if excess > worst {
            worst = excess;
        }
    }
    worst
}

/// Vector of geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let ratio = libm::pow(hi / lo, 1.0 / (n - 1) as f64);
    let mut grid = Vec::with_capacity(n);
    let mut v = lo;
    for _ in 0..n {
        grid.push(v);
        v *= ratio;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64, a: f64, b: f64, mu: f64) -> ModelParams {
        ModelParams {
            alpha,
            beta,
            a,
            b,
            mu,
            t_final: 0.5,
        }
    }

    #[test]
    fn validate_accepts_experiment_parameters() {
        let p = ModelParams::experiment(0.5, 0.5);
        assert_eq!(validate(p).unwrap(), p);
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let mut p = ModelParams::experiment(0.5, 0.5);
        p.alpha = 1.2;
        let err = validate(p).unwrap_err();
        assert_eq!(err.field, "alpha");
        assert_eq!(err.constraint, "must lie in (0,1)");

        let mut p = ModelParams::experiment(0.5, 0.5);
        p.mu = 0.0;
        let err = validate(p).unwrap_err();
        assert_eq!(err.field, "mu");
    }

    #[test]
    fn g_at_one_is_one() {
        let p = params(0.5, 0.5, 1.0, 1.0, 1.0);
        let g = g_symbol(&p, Complex64::new(1.0, 0.0)).unwrap();
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn g_reduces_to_z_over_mu() {
        let p = params(0.25, 0.75, 0.0, 0.0, 2.0);
        let g = g_symbol(&p, Complex64::new(3.0, 0.0)).unwrap();
        assert!((g - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn g_domain_errors() {
        let p = params(0.5, 0.5, 1.0, 1.0, 1.0);
        assert_eq!(
            g_symbol(&p, Complex64::new(0.0, 0.0)),
            Err(SymbolError::ZeroArgument)
        );
        assert_eq!(
            g_symbol(&p, Complex64::new(-2.0, 0.0)),
            Err(SymbolError::BranchCut)
        );
    }

    #[test]
    fn sector_bound_on_unit_circle() {
        // sector bound |arg g| <= (1+alpha)|arg z| sampled on 100 rays
        let p = params(0.25, 0.75, 1.0, 1.0, 1.0);
        let theta = 0.6 * PI;
        assert!(sector_excess(&p, theta, 1.0, 100) <= 1e-12);
    }

    #[test]
    fn modulus_bound_in_sector() {
        // |g(z)| <= (1/sin(pi-theta)) (|z| + a |z|^(1+alpha)) min(1, |z|^-beta / b) / mu
        let p = params(0.4, 0.6, 1.5, 0.7, 2.0);
        let theta = PI / 2.0 + 0.8 * (p.max_sector_angle() - PI / 2.0);
        let m_theta = 1.0 / libm::sin(PI - theta);
        for &r in &[1e-3, 0.1, 1.0, 10.0, 1e3] {
            for i in 0..40 {
                let phi = -theta + 2.0 * theta * (i as f64 + 0.5) / 40.0;
                let z = Complex64::from_polar(r, phi);
                let g = g_unchecked(&p, z);
                let bound = m_theta / p.mu
                    * (r + p.a * libm::pow(r, 1.0 + p.alpha))
                    * libm::fmin(1.0, libm::pow(r, -p.beta) / p.b);
                assert!(
                    g.norm() <= bound * (1.0 + 1e-12),
                    "bound violated at r={r}, phi={phi}"
                );
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let p = params(0.3, 0.8, 1.0, 2.0, 0.5);
        for &(re, im) in &[(0.4, 1.3), (2.0, -0.1), (0.01, 5.0)] {
            let z = Complex64::new(re, im);
            let d = (g_unchecked(&p, z.conj()) - g_unchecked(&p, z).conj()).norm();
            assert!(d < 1e-14);
        }
    }

    #[test]
    fn case_values() {
        assert!((InitialData::CaseA.value(0.5, 0.5) - 0.0625).abs() < 1e-15);
        assert_eq!(InitialData::CaseB.value(0.25, 0.5), 1.0);
        assert_eq!(InitialData::CaseB.value(0.75, 0.5), 0.0);
        // case (c) source at alpha=beta=0.5, a=b=mu=1, t=1:
        // 2 + 2/Gamma(1.5) + 8 pi^2 + 16 pi^2 / Gamma(2.5)
        let p = params(0.5, 0.5, 1.0, 1.0, 1.0);
        let want =
            2.0 + 2.0 / libm::tgamma(1.5) + 8.0 * PI * PI + 16.0 * PI * PI / libm::tgamma(2.5);
        let got = SourceTerm::CaseC.value(&p, 0.25, 0.25, 1.0)
            / (libm::sin(PI / 2.0) * libm::sin(PI / 2.0));
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn case_a_gradient_matches_finite_differences() {
        let v = InitialData::CaseA;
        let eps = 1e-6;
        for &(x, y) in &[(0.3, 0.7), (0.5, 0.5), (0.1, 0.9)] {
            let (gx, gy) = v.gradient(x, y).unwrap();
            let fdx = (v.value(x + eps, y) - v.value(x - eps, y)) / (2.0 * eps);
            let fdy = (v.value(x, y + eps) - v.value(x, y - eps)) / (2.0 * eps);
            assert!((gx - fdx).abs() < 1e-6);
            assert!((gy - fdy).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_solution_only_for_case_c() {
        assert!(ProblemCase::case_c().exact_solution().is_some());
        assert!(ProblemCase::case_a().exact_solution().is_none());
        let u = ProblemCase::case_c().exact_solution().unwrap();
        assert!((u(0.25, 0.25, 0.5) - 0.25).abs() < 1e-15);
    }
}
