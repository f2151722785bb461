//! Uniform right-triangle triangulations of the unit square.
//!
//! The square is cut into `m x m` cells and every cell is split along the
//! same diagonal (lower-left to upper-right). With this split the P1
//! stiffness matrix reduces to the classical 5-point stencil, which gives a
//! hand-checkable assembly oracle. Nodes live on the `(m+1)^2` lattice;
//! boundary nodes carry no degree of freedom.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors from mesh construction and transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshError {
    /// Meshes need at least one interior node.
    TooCoarse {
        /// Requested subdivision count.
        m: usize,
    },
    /// Fine mesh is not a refinement of the coarse mesh.
    NotNested {
        /// Coarse subdivision count.
        coarse: usize,
        /// Fine subdivision count.
        fine: usize,
    },
    /// Coefficient vector length does not match the interior DOF count.
    BadCoefficients {
        /// Expected length.
        expected: usize,
        /// Received length.
        got: usize,
    },
    /// Evaluation point lies outside the closed unit square.
    OutOfDomain,
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::TooCoarse { m } => {
                write!(f, "mesh needs m >= 2 for an interior DOF, got m = {m}")
            }
            MeshError::NotNested { coarse, fine } => {
                write!(
                    f,
                    "fine mesh m = {fine} is not a multiple of coarse m = {coarse}"
                )
            }
            MeshError::BadCoefficients { expected, got } => {
                write!(
                    f,
                    "coefficient vector has length {got}, expected {expected}"
                )
            }
            MeshError::OutOfDomain => write!(f, "point outside the closed unit square"),
        }
    }
}

impl core::error::Error for MeshError {}

/// Uniform triangulation of the unit square with interior-DOF numbering.
#[derive(Debug, Clone)]
pub struct TriMesh {
    m: usize,
    nodes: Vec<(f64, f64)>,
    triangles: Vec<[usize; 3]>,
    /// Lattice node -> interior DOF id, `None` on the boundary.
    interior_index: Vec<Option<usize>>,
    /// Interior DOF id -> lattice node.
    interior_nodes: Vec<usize>,
}

impl TriMesh {
    /// Builds the uniform mesh with `m` subdivisions per side.
    pub fn build_uniform(m: usize) -> Result<Self, MeshError> {
        if m < 2 {
            return Err(MeshError::TooCoarse { m });
        }
        let np = m + 1;
        let h = 1.0 / m as f64;
        let mut nodes = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                nodes.push((i as f64 * h, j as f64 * h));
            }
        }
        let id = |i: usize, j: usize| j * np + i;
        let mut triangles = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for i in 0..m {
                // both triangles oriented counterclockwise
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut interior_index = vec![None; np * np];
        let mut interior_nodes = Vec::with_capacity((m - 1) * (m - 1));
        for j in 1..m {
            for i in 1..m {
                interior_index[id(i, j)] = Some(interior_nodes.len());
                interior_nodes.push(id(i, j));
            }
        }
        Ok(TriMesh {
            m,
            nodes,
            triangles,
            interior_index,
            interior_nodes,
        })
    }

    /// Subdivisions per side.
    pub fn subdivisions(&self) -> usize {
        self.m
    }

    /// Mesh size h = 1/m (the longest edge is sqrt(2) h).
    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Lattice nodes as (x, y).
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Triangles as node-index triples, counterclockwise.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Number of interior degrees of freedom, (m-1)^2.
    pub fn interior_dofs(&self) -> usize {
        self.interior_nodes.len()
    }

    /// Interior DOF id of a lattice node, or `None` on the boundary.
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_index[node]
    }

    /// Lattice node of an interior DOF.
    pub fn interior_node(&self, dof: usize) -> usize {
        self.interior_nodes[dof]
    }

    /// Coordinates of an interior DOF.
    pub fn dof_position(&self, dof: usize) -> (f64, f64) {
        self.nodes[self.interior_nodes[dof]]
    }

    /// Signed area of triangle `t` (positive by construction).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (xa, ya) = self.nodes[a];
        let (xb, yb) = self.nodes[b];
        let (xc, yc) = self.nodes[c];
        0.5 * ((xb - xa) * (yc - ya) - (xc - xa) * (yb - ya))
    }

    /// Expands interior coefficients to the full lattice with zero boundary.
    pub fn expand_with_boundary(&self, coeffs: &[f64]) -> Result<Vec<f64>, MeshError> {
        if coeffs.len() != self.interior_dofs() {
            return Err(MeshError::BadCoefficients {
                expected: self.interior_dofs(),
                got: coeffs.len(),
            });
        }
        let mut full = vec![0.0; self.nodes.len()];
        for (dof, &node) in self.interior_nodes.iter().enumerate() {
            full[node] = coeffs[dof];
        }
        Ok(full)
    }

    /// Restricts full lattice values to the interior DOF vector.
    pub fn restrict_to_interior(&self, full: &[f64]) -> Vec<f64> {
        self.interior_nodes.iter().map(|&n| full[n]).collect()
    }

    /// Interior vector of `f` sampled at the interior lattice nodes.
    pub fn sample_interior(&self, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        self.interior_nodes
            .iter()
            .map(|&n| {
                let (x, y) = self.nodes[n];
                f(x, y)
            })
            .collect()
    }
}

/// Transfers P1 coefficients from a coarse mesh to the nodes of a nested
/// fine mesh. Exact: fine nodes lie on closures of coarse elements.
pub fn nested_inject(
    coarse: &TriMesh,
    fine: &TriMesh,
    coeffs: &[f64],
) -> Result<Vec<f64>, MeshError> {
    if !fine.m.is_multiple_of(coarse.m) {
        return Err(MeshError::NotNested {
            coarse: coarse.m,
            fine: fine.m,
        });
    }
    if coeffs.len() != coarse.interior_dofs() {
        return Err(MeshError::BadCoefficients {
            expected: coarse.interior_dofs(),
            got: coeffs.len(),
        });
    }
    let ratio = fine.m / coarse.m;
    let full = coarse.expand_with_boundary(coeffs)?;
    let npc = coarse.m + 1;
    let mut out = vec![0.0; fine.interior_dofs()];
    for (dof, &node) in fine.interior_nodes.iter().enumerate() {
        let npf = fine.m + 1;
        let fi = node % npf;
        let fj = node / npf;
        let (ci, ri) = (fi / ratio, fi % ratio);
        let (cj, rj) = (fj / ratio, fj % ratio);
        if ri == 0 && rj == 0 {
            out[dof] = full[cj * npc + ci];
            continue;
        }
        // local coordinates within the coarse cell (ci, cj)
        let xi = ri as f64 / ratio as f64;
        let eta = rj as f64 / ratio as f64;
        let v00 = full[cj * npc + ci];
        let v10 = full[cj * npc + ci + 1];
        let v01 = full[(cj + 1) * npc + ci];
        let v11 = full[(cj + 1) * npc + ci + 1];
        out[dof] = if eta <= xi {
            v00 * (1.0 - xi) + v10 * (xi - eta) + v11 * eta
        } else {
            v00 * (1.0 - eta) + v11 * xi + v01 * (eta - xi)
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_m2() {
        let mesh = TriMesh::build_uniform(2).unwrap();
        assert_eq!(mesh.nodes().len(), 9);
        assert_eq!(mesh.triangles().len(), 8);
        assert_eq!(mesh.interior_dofs(), 1);
    }

    #[test]
    fn counts_m4() {
        let mesh = TriMesh::build_uniform(4).unwrap();
        assert_eq!(mesh.nodes().len(), 25);
        assert_eq!(mesh.triangles().len(), 32);
        assert_eq!(mesh.interior_dofs(), 9);
        // boundary node count = total - interior
        assert_eq!(mesh.nodes().len() - mesh.interior_dofs(), 16);
    }

    #[test]
    fn reference_resolution_node_count() {
        let mesh = TriMesh::build_uniform(512).unwrap();
        assert_eq!(mesh.nodes().len(), 263_169);
    }

    #[test]
    fn rejects_m1() {
        assert!(matches!(
            TriMesh::build_uniform(1),
            Err(MeshError::TooCoarse { m: 1 })
        ));
    }

    #[test]
    fn areas_positive_and_sum_to_one() {
        let mesh = TriMesh::build_uniform(7).unwrap();
        let want = 1.0 / (2.0 * 49.0);
        let mut total = 0.0;
        for t in 0..mesh.triangles().len() {
            let a = mesh.triangle_area(t);
            assert!((a - want).abs() < 1e-15);
            total += a;
        }
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_indices_distinct_and_in_range() {
        let mesh = TriMesh::build_uniform(5).unwrap();
        for tri in mesh.triangles() {
            assert!(tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]);
            assert!(tri.iter().all(|&v| v < mesh.nodes().len()));
        }
    }

    #[test]
    fn inject_reproduces_constant_and_linear() {
        let coarse = TriMesh::build_uniform(2).unwrap();
        let fine = TriMesh::build_uniform(4).unwrap();
        // constant-1 interior field, zero boundary: the P1 function is the
        // hat at the single interior node
        let injected = nested_inject(&coarse, &fine, &[1.0]).unwrap();
        for (dof, &v) in injected.iter().enumerate() {
            let (x, y) = fine.dof_position(dof);
            // hat centered at (.5,.5) on the coarse mesh
            let hat = hat_value_m2(x, y);
            assert!((v - hat).abs() < 1e-14, "hat mismatch at ({x},{y})");
        }

        // nodal interpolant of x reproduces x at interior fine nodes
        let coarse = TriMesh::build_uniform(4).unwrap();
        let fine = TriMesh::build_uniform(8).unwrap();
        let coeffs = coarse.sample_interior(&|x, _| x);
        let injected = nested_inject(&coarse, &fine, &coeffs).unwrap();
        for (dof, &v) in injected.iter().enumerate() {
            let (x, y) = fine.dof_position(dof);
            // exact except within one coarse cell of the boundary where the
            // zero boundary condition kicks in
            if x > 0.26 && x < 0.74 && y > 0.26 && y < 0.74 {
                assert!((v - x).abs() < 1e-14);
            }
        }
    }

    // P1 hat centered at (0.5, 0.5) on the m=2 single-diagonal mesh
    fn hat_value_m2(x: f64, y: f64) -> f64 {
        let xi = 2.0 * x - 1.0;
        let eta = 2.0 * y - 1.0;
        if xi >= 0.0 && eta >= 0.0 {
            (1.0 - xi.max(eta)).max(0.0)
        } else if xi <= 0.0 && eta <= 0.0 {
            (1.0 + xi.min(eta)).max(0.0)
        } else if xi > 0.0 {
            (1.0 - xi + eta).max(0.0)
        } else {
            (1.0 + xi - eta).max(0.0)
        }
    }

    #[test]
    fn inject_rejects_non_nested() {
        let coarse = TriMesh::build_uniform(4).unwrap();
        let fine = TriMesh::build_uniform(6).unwrap();
        let coeffs = alloc::vec![0.0; coarse.interior_dofs()];
        assert!(matches!(
            nested_inject(&coarse, &fine, &coeffs),
            Err(MeshError::NotNested { coarse: 4, fine: 6 })
        ));
    }

    #[test]
    fn build_is_deterministic() {
        let a = TriMesh::build_uniform(9).unwrap();
        let b = TriMesh::build_uniform(9).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.triangles(), b.triangles());
    }
}
