//! P1 Galerkin assembly on the interior-DOF space, plus the L2 and Ritz
//! projections.
//!
//! Element integrals are exact for piecewise linears: the 3x3 element mass
//! matrix is |K|/12 (1 + delta_ij) and the stiffness entries come from the
//! constant barycentric gradients. Dirichlet conditions are imposed by DOF
//! elimination, so mass and stiffness stay symmetric positive definite.
//!
//! Volume data integrals (load vectors, projection right-hand sides) use
//! the 3-point edge-midpoint rule, exact for quadratics. The committed
//! inexactness for discontinuous data is consistent across refinements
//! because the jump line x = 1/2 lies on mesh lines for even m.

use crate::linalg::{self, BandCholesky, LinalgError, SparseMatrix};
use crate::mesh::{MeshError, TriMesh};
use crate::model::ScalarField;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Assembled interior-DOF system for one mesh.
#[derive(Debug, Clone)]
pub struct FemSystem {
    mesh: TriMesh,
    mass: SparseMatrix,
    stiffness: SparseMatrix,
}

/// Errors from assembly, projection, and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum FemError {
    /// Ritz projection needs an analytic gradient.
    MissingGradient,
    /// Propagated linear solver failure.
    Solver(LinalgError),
    /// Propagated mesh failure.
    Mesh(MeshError),
}

impl fmt::Display for FemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FemError::MissingGradient => write!(
                f,
                "ritz projection requires an analytic gradient; use l2_project for nonsmooth data"
            ),
            FemError::Solver(e) => write!(f, "solver: {e}"),
            FemError::Mesh(e) => write!(f, "mesh: {e}"),
        }
    }
}

impl core::error::Error for FemError {}

impl From<LinalgError> for FemError {
    fn from(e: LinalgError) -> Self {
        FemError::Solver(e)
    }
}

impl From<MeshError> for FemError {
    fn from(e: MeshError) -> Self {
        FemError::Mesh(e)
    }
}

struct ElementGeometry {
    verts: [usize; 3],
    coords: [(f64, f64); 3],
    area: f64,
    /// Barycentric gradients, constant on the element.
    grads: [(f64, f64); 3],
}

fn element_geometry(mesh: &TriMesh, t: usize) -> ElementGeometry {
    let verts = mesh.triangles()[t];
    let coords = [
        mesh.nodes()[verts[0]],
        mesh.nodes()[verts[1]],
        mesh.nodes()[verts[2]],
    ];
    let (x0, y0) = coords[0];
    let (x1, y1) = coords[1];
    let (x2, y2) = coords[2];
    let det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    let area = 0.5 * det;
    let grads = [
        ((y1 - y2) / det, (x2 - x1) / det),
        ((y2 - y0) / det, (x0 - x2) / det),
        ((y0 - y1) / det, (x1 - x0) / det),
    ];
    ElementGeometry {
        verts,
        coords,
        area,
        grads,
    }
}

/// Assembles mass and stiffness on the interior DOFs of `mesh`.
pub fn assemble(mesh: &TriMesh) -> FemSystem {
    let n = mesh.interior_dofs();
    let mut mass_t = Vec::new();
    let mut stiff_t = Vec::new();
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        for i in 0..3 {
            let Some(gi) = mesh.interior_index(el.verts[i]) else {
                continue;
            };
            for j in 0..3 {
                let Some(gj) = mesh.interior_index(el.verts[j]) else {
                    continue;
                };
                let m = el.area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let k = el.area * (el.grads[i].0 * el.grads[j].0 + el.grads[i].1 * el.grads[j].1);
                mass_t.push((gi, gj, m));
                stiff_t.push((gi, gj, k));
            }
        }
    }
    FemSystem {
        mesh: mesh.clone(),
        mass: SparseMatrix::from_triplets(n, &mass_t, true).expect("assembly triplets"),
        stiffness: SparseMatrix::from_triplets(n, &stiff_t, true).expect("assembly triplets"),
    }
}

/// Assembles mass and stiffness over all lattice nodes (no boundary
/// elimination), for invariant checks like zero stiffness row sums.
pub fn assemble_full(mesh: &TriMesh) -> (SparseMatrix, SparseMatrix) {
    let n = mesh.nodes().len();
    let mut mass_t = Vec::new();
    let mut stiff_t = Vec::new();
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        for i in 0..3 {
            for j in 0..3 {
                let m = el.area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let k = el.area * (el.grads[i].0 * el.grads[j].0 + el.grads[i].1 * el.grads[j].1);
                mass_t.push((el.verts[i], el.verts[j], m));
                stiff_t.push((el.verts[i], el.verts[j], k));
            }
        }
    }
    (
        SparseMatrix::from_triplets(n, &mass_t, true).expect("assembly triplets"),
        SparseMatrix::from_triplets(n, &stiff_t, true).expect("assembly triplets"),
    )
}

impl FemSystem {
    /// The underlying mesh.
    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// Interior mass matrix M.
    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    /// Interior stiffness matrix K.
    pub fn stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }

    /// Interior DOF count.
    pub fn dofs(&self) -> usize {
        self.mass.dimension()
    }

    /// sqrt(x^T M x): discrete L2 norm of a coefficient vector.
    pub fn l2_norm(&self, x: &[f64]) -> f64 {
        libm::sqrt(quadratic_form(&self.mass, x))
    }

    /// sqrt(x^T K x): discrete H1 seminorm of a coefficient vector.
    pub fn h1_seminorm(&self, x: &[f64]) -> f64 {
        libm::sqrt(quadratic_form(&self.stiffness, x))
    }
}

fn quadratic_form(a: &SparseMatrix, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    a.apply_into(x, &mut y);
    let s: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
    s.max(0.0)
}

fn edge_midpoints(el: &ElementGeometry) -> [(f64, f64); 3] {
    let [(x0, y0), (x1, y1), (x2, y2)] = el.coords;
    [
        (0.5 * (x0 + x1), 0.5 * (y0 + y1)),
        (0.5 * (x1 + x2), 0.5 * (y1 + y2)),
        (0.5 * (x2 + x0), 0.5 * (y2 + y0)),
    ]
}

/// Load vector b_i = integral of f * phi_i over the interior basis, using
/// the 3-point edge-midpoint rule per triangle.
pub fn load_vector(mesh: &TriMesh, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.interior_dofs()];
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        let mids = edge_midpoints(&el);
        let fv = [
            f(mids[0].0, mids[0].1),
            f(mids[1].0, mids[1].1),
            f(mids[2].0, mids[2].1),
        ];
        // basis i is 1/2 on its two adjacent edge midpoints, 0 on the
        // opposite one
        let contrib = [
            el.area / 3.0 * 0.5 * (fv[0] + fv[2]),
            el.area / 3.0 * 0.5 * (fv[0] + fv[1]),
            el.area / 3.0 * 0.5 * (fv[1] + fv[2]),
        ];
        for (&vert, &value) in el.verts.iter().zip(&contrib) {
            if let Some(gi) = mesh.interior_index(vert) {
                b[gi] += value;
            }
        }
    }
    b
}

/// L2 projection: solves M c = (f, phi_i).
pub fn l2_project(sys: &FemSystem, f: &ScalarField<'_>) -> Result<Vec<f64>, FemError> {
    let b = load_vector(&sys.mesh, f.value);
    let chol = BandCholesky::factor(&sys.mass)?;
    Ok(chol.solve(&b)?)
}

/// Ritz projection: solves K c = (grad f, grad phi_i). Needs the analytic
/// gradient; data without one must go through [`l2_project`].
pub fn ritz_project(sys: &FemSystem, f: &ScalarField<'_>) -> Result<Vec<f64>, FemError> {
    let grad = f.gradient.ok_or(FemError::MissingGradient)?;
    let mesh = &sys.mesh;
    let mut b = vec![0.0; mesh.interior_dofs()];
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        let mids = edge_midpoints(&el);
        let mut gx = 0.0;
        let mut gy = 0.0;
        for &(mx, my) in &mids {
            let (dx, dy) = grad(mx, my);
            gx += dx;
            gy += dy;
        }
        gx /= 3.0;
        gy /= 3.0;
        for i in 0..3 {
            if let Some(gi) = mesh.interior_index(el.verts[i]) {
                b[gi] += el.area * (el.grads[i].0 * gx + el.grads[i].1 * gy);
            }
        }
    }
    let chol = BandCholesky::factor(&sys.stiffness)?;
    Ok(chol.solve(&b)?)
}

/// Value of the P1 function with interior coefficients `coeffs` at (x, y);
/// zero on the boundary.
pub fn evaluate(mesh: &TriMesh, coeffs: &[f64], x: f64, y: f64) -> Result<f64, MeshError> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(MeshError::OutOfDomain);
    }
    let full = mesh.expand_with_boundary(coeffs)?;
    Ok(evaluate_full(mesh, &full, x, y))
}

/// As [`evaluate`] but over precomputed full-lattice values; fast path for
/// loops over many points.
pub fn evaluate_full(mesh: &TriMesh, full: &[f64], x: f64, y: f64) -> f64 {
    let m = mesh.subdivisions();
    let np = m + 1;
    let fx = x * m as f64;
    let fy = y * m as f64;
    let ci = (fx as usize).min(m - 1);
    let cj = (fy as usize).min(m - 1);
    let xi = fx - ci as f64;
    let eta = fy - cj as f64;
    let v00 = full[cj * np + ci];
    let v10 = full[cj * np + ci + 1];
    let v01 = full[(cj + 1) * np + ci];
    let v11 = full[(cj + 1) * np + ci + 1];
    if eta <= xi {
        v00 * (1.0 - xi) + v10 * (xi - eta) + v11 * eta
    } else {
        v00 * (1.0 - eta) + v11 * xi + v01 * (eta - xi)
    }
}

// 7-point degree-5 triangle rule in barycentric coordinates.
fn degree5_rule() -> [(f64, f64, f64); 7] {
    let s15 = libm::sqrt(15.0);
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    [
        (1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0),
        (a1, a1, w1),
        (a1, 1.0 - 2.0 * a1, w1),
        (1.0 - 2.0 * a1, a1, w1),
        (a2, a2, w2),
        (a2, 1.0 - 2.0 * a2, w2),
        (1.0 - 2.0 * a2, a2, w2),
    ]
}

/// Load vector by the 7-point degree-5 rule; quadrature oracle for the
/// committed 3-point rule.
pub fn load_vector_degree5(mesh: &TriMesh, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    let rule = degree5_rule();
    let mut b = vec![0.0; mesh.interior_dofs()];
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        let [(x0, y0), (x1, y1), (x2, y2)] = el.coords;
        for &(l1, l2, w) in &rule {
            let l0 = 1.0 - l1 - l2;
            let x = l0 * x0 + l1 * x1 + l2 * x2;
            let y = l0 * y0 + l1 * y1 + l2 * y2;
            let fv = f(x, y) * w * el.area;
            let lam = [l0, l1, l2];
            for (&vert, &weight) in el.verts.iter().zip(&lam) {
                if let Some(gi) = mesh.interior_index(vert) {
                    b[gi] += fv * weight;
                }
            }
        }
    }
    b
}

/// L2 distance between the P1 function `coeffs` and a smooth function, by
/// the 7-point rule per element.
pub fn quad_l2_error(
    mesh: &TriMesh,
    coeffs: &[f64],
    f: &dyn Fn(f64, f64) -> f64,
) -> Result<f64, MeshError> {
    let full = mesh.expand_with_boundary(coeffs)?;
    let rule = degree5_rule();
    let mut acc = 0.0;
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        let [(x0, y0), (x1, y1), (x2, y2)] = el.coords;
        let nodal = [full[el.verts[0]], full[el.verts[1]], full[el.verts[2]]];
        for &(l1, l2, w) in &rule {
            let l0 = 1.0 - l1 - l2;
            let x = l0 * x0 + l1 * x1 + l2 * x2;
            let y = l0 * y0 + l1 * y1 + l2 * y2;
            let uh = l0 * nodal[0] + l1 * nodal[1] + l2 * nodal[2];
            let d = uh - f(x, y);
            acc += w * el.area * d * d;
        }
    }
    Ok(libm::sqrt(acc))
}

/// H1 seminorm distance between the P1 function and a smooth gradient
/// field, by the 7-point rule per element.
pub fn quad_h1_error(
    mesh: &TriMesh,
    coeffs: &[f64],
    grad: &dyn Fn(f64, f64) -> (f64, f64),
) -> Result<f64, MeshError> {
    let full = mesh.expand_with_boundary(coeffs)?;
    let rule = degree5_rule();
    let mut acc = 0.0;
    for t in 0..mesh.triangles().len() {
        let el = element_geometry(mesh, t);
        let [(x0, y0), (x1, y1), (x2, y2)] = el.coords;
        let nodal = [full[el.verts[0]], full[el.verts[1]], full[el.verts[2]]];
        let uhx: f64 = (0..3).map(|i| nodal[i] * el.grads[i].0).sum();
        let uhy: f64 = (0..3).map(|i| nodal[i] * el.grads[i].1).sum();
        for &(l1, l2, w) in &rule {
            let l0 = 1.0 - l1 - l2;
            let x = l0 * x0 + l1 * x1 + l2 * x2;
            let y = l0 * y0 + l1 * y1 + l2 * y2;
            let (gx, gy) = grad(x, y);
            let (dx, dy) = (uhx - gx, uhy - gy);
            acc += w * el.area * (dx * dx + dy * dy);
        }
    }
    Ok(libm::sqrt(acc))
}

/// Solves M x = rhs with a fresh factorization.
pub fn mass_solve(sys: &FemSystem, rhs: &[f64]) -> Result<Vec<f64>, FemError> {
    Ok(BandCholesky::factor(&sys.mass)?.solve(rhs)?)
}

/// M x with a dimension check.
pub fn mass_matvec(sys: &FemSystem, x: &[f64]) -> Result<Vec<f64>, FemError> {
    Ok(linalg::matvec(&sys.mass, x)?)
}
