//! Fast direct solver for the Poisson equation `∇²φ = g` on uniform one-,
//! two- and three-dimensional grids. Each axis is periodic, Dirichlet or
//! Neumann on a regular or staggered grid; the operator is diagonalised with
//! discrete Fourier, sine or cosine transforms and the eigenvalues of either
//! the continuous (pseudo-spectral) or the second-order finite-difference
//! Laplacian.

pub mod eigen;
pub mod error;
pub mod field;
pub mod flow;
pub mod grid;
pub mod real;
pub mod reorder;
pub mod solver;
pub mod stencil;
pub mod transforms;
pub mod verify;

pub use eigen::{combine_eigenvalues, eigenvalues, CombinedEigenvalues, EigenvalueTable};
pub use error::{PoissonError, Result};
pub use field::{Field, FieldView, FieldViewMut, Layout, MAX_DIMS};
pub use grid::{Approximation, BoundaryCondition, GridKind, GridSpec};
pub use real::Real;
pub use reorder::{gather_lines, scatter_lines, ReorderPlan};
pub use solver::{apply_discrete_laplacian, PhaseTiming, SolveMode, SolveReport, SolverConfig, SolverPlan};
pub use transforms::{transform_pair_for, ComplexTransform, RealTransform, TransformKind, TransformPair};
