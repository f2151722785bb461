//! Solver core for the time-fractional Oldroyd-B problem
//!
//! ```text
//! (1 + a D_t^alpha) u_t = mu (1 + b D_t^beta) Lap(u) + f      in (0,1)^2 x (0,T],
//! u = 0 on the boundary,   u(0) = v,   (I^(1-alpha) u_t)(0) = 0,
//! ```
//!
//! with two Riemann-Liouville derivatives of orders `alpha, beta in (0,1)`.
//! Space is discretized by piecewise-linear Galerkin finite elements on a
//! uniform triangulation of the unit square; time by convolution quadrature
//! generated by backward Euler or the corrected second-order backward
//! difference method.
//!
//! The crate is organized around the pipeline of a convergence study:
//!
//! - [`model`]: problem parameters, data cases, and the Laplace symbol `g(z)`.
//! - [`mesh`]: nested uniform triangulations with interior-DOF numbering.
//! - [`linalg`]: CSR matrices, conjugate gradients, banded Cholesky.
//! - [`fem`]: mass/stiffness assembly, load vectors, L2 and Ritz projections.
//! - [`cq`]: convolution-quadrature weights and discrete convolutions.
//! - [`stepper`]: the fully discrete BE and corrected-SBD time steppers.
//! - [`oracle`]: spectral reference solutions by numerical inversion of the
//!   Laplace-domain solution operator along a sectorial contour.
//! - [`report`]: error norms, empirical convergence orders, and experiment
//!   orchestration.
//!
//! Everything here is `no_std` + `alloc`; IO, the CLI, and file formats live
//! in the companion `oldroyd-cq` crate. All public types are immutable once
//! constructed (meshes, assembled systems, weight tables, trajectories), so
//! independent runs of a convergence ladder can safely share them across
//! threads; the steppers themselves are sequential in time by nature.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cq;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod oracle;
pub mod report;
pub mod stepper;

pub use model::{g_symbol, InitialData, ModelParams, ProblemCase, SourceTerm};
pub use stepper::{SchemeKind, Trajectory};
