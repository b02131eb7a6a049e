//! Linear finite elements on Bakhvalov-type meshes for the two-parameter
//! singularly perturbed problem
//!
//! ```text
//! -eps1 u'' + eps2 b(x) u' + c(x) u = f(x)  on (0, 1),   u(0) = u(1) = 0,
//! ```
//!
//! together with the manufactured test solution, error norms and the
//! convergence-study harness used to regenerate the published tables.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod interpolation;
pub mod manufactured;
pub mod mesh;
pub mod metrics;
pub mod problem;
pub mod quadrature;
pub mod reference;
pub mod study;

pub use error::{Error, Result};
pub use fem::{assemble, galerkin_residual, solve_tridiagonal, DiscreteSolution, PiecewiseLinear, TridiagonalSystem};
pub use interpolation::{lagrange_interpolate, pi_interpolate, InterpolantBundle};
pub use manufactured::{ExactSolution, ManufacturedSolution};
pub use mesh::{build_mesh, mesh_diagnostics, transition_points, BakhvalovMesh, LayerMode, MeshParams};
pub use metrics::{convergence_rate, energy_error_continuous, energy_norm_discrete_diff, ErrorReport};
pub use problem::{characteristic_roots, validate_problem, CharacteristicRoots, ScalarField, TwoParamBvp};
pub use quadrature::QuadratureRule;
pub use reference::{check_against_reference, reference_table, CheckReport};
pub use study::{run_study, solve_cell, ConvergenceTable, OutputFormat, StudyConfig};
