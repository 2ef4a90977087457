//! Dense assembly and direct solution of the finite-difference system, used
//! as an independent oracle for the transform-based solver.

use crate::error::{PoissonError, Result};
use crate::field::{Field, FieldView};
use crate::grid::{Approximation, BoundaryCondition, GridKind, GridSpec};
use crate::solver::SolverConfig;
use crate::stencil::stencil_row;

pub const DENSE_LIMIT: usize = 4096;

/// Row-major dense matrix of the d-dimensional FD2 Laplacian.
pub fn assemble_laplacian(config: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    let extents = config.extents();
    let total: usize = extents.iter().product();
    if total > DENSE_LIMIT {
        return Err(PoissonError::SizeGuard {
            unknowns: total,
            limit: DENSE_LIMIT,
        });
    }
    let mut strides = vec![1; extents.len()];
    for a in (0..extents.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * extents[a + 1];
    }
    let mut a = vec![vec![0.0; total]; total];
    for (row, entries) in a.iter_mut().enumerate() {
        for (axis, spec) in config.axes().iter().enumerate() {
            let i = (row / strides[axis]) % extents[axis];
            let base = row - i * strides[axis];
            let inv_dx2 = 1.0 / (spec.dx() * spec.dx());
            for (col, c) in stencil_row(spec, i) {
                entries[base + col * strides[axis]] += c * inv_dx2;
            }
        }
    }
    Ok(a)
}

// Left null vector of one axis' matrix (zero vector when it is nonsingular).
fn axis_null_weights(spec: &GridSpec) -> Vec<f64> {
    let n = spec.n();
    match (spec.bc(), spec.kind()) {
        (BoundaryCondition::Dirichlet, _) => vec![0.0; n],
        (BoundaryCondition::Neumann, GridKind::Regular) => (0..n)
            .map(|j| if j == 0 || j + 1 == n { 0.5 } else { 1.0 })
            .collect(),
        _ => vec![1.0; n],
    }
}

/// Gaussian elimination with partial pivoting. `a` is consumed.
pub fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(PoissonError::InvalidArgument("matrix is not square".into()));
    }
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("nonempty range");
        if a[p][k] == 0.0 {
            return Err(PoissonError::InvalidArgument(format!(
                "matrix is singular at column {k}"
            )));
        }
        a.swap(k, p);
        b.swap(k, p);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for (r, row) in bottom.iter_mut().enumerate() {
            let f = row[k] / pivot_row[k];
            if f != 0.0 {
                for c in k..n {
                    row[c] -= f * pivot_row[c];
                }
                b[k + 1 + r] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

/// Result of the dense oracle solve.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub solution: Field<f64>,
    /// Constant subtracted from the right-hand side (singular systems only).
    pub removed_mean: f64,
}

/// Solves the assembled FD2 system by dense elimination.
///
/// Singular systems are bordered with one extra unknown `m` and one extra
/// equation: `A φ + m·1 = g`, `wᵀ φ = 0`, where `w` is the left null vector of
/// `A`. This picks the compatible right-hand side `g - m` and the solution
/// without null-space component.
pub fn dense_oracle_solve(config: &SolverConfig, rhs: &FieldView<'_, f64>) -> Result<DenseSolution> {
    if config.approximation() != Approximation::FiniteDifference2 {
        return Err(PoissonError::UnsupportedConfig(
            "the dense oracle assembles the finite-difference operator only".into(),
        ));
    }
    let extents = config.extents();
    if rhs.extents() != extents.as_slice() {
        return Err(PoissonError::ExtentMismatch {
            expected: extents,
            found: rhs.extents().to_vec(),
        });
    }
    let mut a = assemble_laplacian(config)?;
    let mut b = rhs.to_vec();
    let total = b.len();
    let singular = config.is_singular();
    if singular {
        let mut w = vec![1.0];
        for spec in config.axes() {
            let wa = axis_null_weights(spec);
            w = w.iter().flat_map(|&x| wa.iter().map(move |&y| x * y)).collect();
        }
        for row in a.iter_mut() {
            row.push(1.0);
        }
        let mut last = w;
        last.push(0.0);
        a.push(last);
        b.push(0.0);
    }
    let x = lu_solve(a, b)?;
    let removed_mean = if singular { x[total] } else { 0.0 };
    Ok(DenseSolution {
        solution: Field::from_vec(&extents, x[..total].to_vec())?,
        removed_mean,
    })
}
