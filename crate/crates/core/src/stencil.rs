//! The 1D three-point second-difference operator with its boundary closures.
//!
//! Ghost values outside the grid are expressed through interior unknowns:
//!
//! | bc / grid            | left ghost `φ_{-1}` | right ghost `φ_n` |
//! |----------------------|---------------------|-------------------|
//! | periodic             | `φ_{n-1}`           | `φ_0`             |
//! | Dirichlet, regular   | `0`                 | `0`               |
//! | Dirichlet, staggered | `-φ_0`              | `-φ_{n-1}`        |
//! | Neumann, regular     | `φ_1`               | `φ_{n-2}`         |
//! | Neumann, staggered   | `φ_0`               | `φ_{n-1}`         |
//!
//! With these closures the sampled transform basis vectors are exact
//! eigenvectors of the resulting matrix.

use crate::grid::{BoundaryCondition, GridKind, GridSpec};

fn ghost(spec: &GridSpec, left: bool) -> Option<(usize, f64)> {
    let n = spec.n();
    let (edge, inner) = if left { (0, 1) } else { (n - 1, n.saturating_sub(2)) };
    match (spec.bc(), spec.kind()) {
        (BoundaryCondition::Periodic, _) => Some((if left { n - 1 } else { 0 }, 1.0)),
        (BoundaryCondition::Dirichlet, GridKind::Regular) => None,
        (BoundaryCondition::Dirichlet, GridKind::Staggered) => Some((edge, -1.0)),
        (BoundaryCondition::Neumann, GridKind::Regular) => Some((inner, 1.0)),
        (BoundaryCondition::Neumann, GridKind::Staggered) => Some((edge, 1.0)),
    }
}

/// Nonzero entries `(column, coefficient)` of row `j`, without the `1/Δx²`
/// factor. Duplicate columns are merged.
pub fn stencil_row(spec: &GridSpec, j: usize) -> Vec<(usize, f64)> {
    let n = spec.n();
    assert!(j < n);
    let mut row: Vec<(usize, f64)> = vec![(j, -2.0)];
    let mut push = |col: usize, c: f64| {
        if let Some(e) = row.iter_mut().find(|e| e.0 == col) {
            e.1 += c;
        } else {
            row.push((col, c));
        }
    };
    if j == 0 {
        if let Some((col, c)) = ghost(spec, true) {
            push(col, c);
        }
    } else {
        push(j - 1, 1.0);
    }
    if j + 1 == n {
        if let Some((col, c)) = ghost(spec, false) {
            push(col, c);
        }
    } else {
        push(j + 1, 1.0);
    }
    row
}

/// Dense `n × n` second-difference matrix including the `1/Δx²` factor.
pub fn dense_matrix(spec: &GridSpec) -> Vec<Vec<f64>> {
    let n = spec.n();
    let inv_dx2 = 1.0 / (spec.dx() * spec.dx());
    (0..n)
        .map(|j| {
            let mut row = vec![0.0; n];
            for (col, c) in stencil_row(spec, j) {
                row[col] += c * inv_dx2;
            }
            row
        })
        .collect()
}

/// Applies the second difference along one line.
pub fn apply_line(spec: &GridSpec, line: &[f64], out: &mut [f64]) {
    let inv_dx2 = 1.0 / (spec.dx() * spec.dx());
    for (j, o) in out.iter_mut().enumerate() {
        *o = stencil_row(spec, j)
            .into_iter()
            .map(|(col, c)| c * line[col])
            .sum::<f64>()
            * inv_dx2;
    }
}
