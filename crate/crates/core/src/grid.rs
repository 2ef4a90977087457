//! Grid, boundary condition and approximation types shared by every module.
//!
//! Fields are stored row-major: the last axis is contiguous in memory and
//! axis 0 (the x axis) has the largest stride.

use serde::{Deserialize, Serialize};

use crate::error::{PoissonError, Result};

/// Boundary condition applied identically on both faces of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
}

/// Placement of the unknowns relative to the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Nodes on (Neumann) or next to (Dirichlet) the boundary.
    Regular,
    /// Cell centres, `x_j = (j + 1/2) L / n`.
    Staggered,
}

/// Which discrete operator the solver inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approximation {
    PseudoSpectral,
    FiniteDifference2,
}

/// One axis of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    n: usize,
    length: f64,
    kind: GridKind,
    bc: BoundaryCondition,
}

impl GridSpec {
    pub fn new(n: usize, length: f64, kind: GridKind, bc: BoundaryCondition) -> Result<Self> {
        if n == 0 {
            return Err(PoissonError::InvalidGrid("point count must be positive".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(PoissonError::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        match (bc, kind) {
            (BoundaryCondition::Periodic, GridKind::Staggered) => {
                return Err(PoissonError::InvalidGrid(
                    "periodic axes use the regular grid only".into(),
                ))
            }
            (BoundaryCondition::Neumann, GridKind::Regular) if n < 2 => {
                return Err(PoissonError::InvalidGrid(format!(
                    "regular Neumann grid needs at least 2 points, got {n}"
                )))
            }
            _ => {}
        }
        Ok(Self { n, length, kind, bc })
    }

    pub fn periodic(n: usize, length: f64) -> Result<Self> {
        Self::new(n, length, GridKind::Regular, BoundaryCondition::Periodic)
    }

    pub fn dirichlet(n: usize, length: f64, kind: GridKind) -> Result<Self> {
        Self::new(n, length, kind, BoundaryCondition::Dirichlet)
    }

    pub fn neumann(n: usize, length: f64, kind: GridKind) -> Result<Self> {
        Self::new(n, length, kind, BoundaryCondition::Neumann)
    }

    /// Copy of this spec with a different point count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.length, self.kind, self.bc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Grid spacing.
    pub fn dx(&self) -> f64 {
        let n = self.n as f64;
        match (self.bc, self.kind) {
            (BoundaryCondition::Periodic, _) | (_, GridKind::Staggered) => self.length / n,
            (BoundaryCondition::Dirichlet, GridKind::Regular) => self.length / (n + 1.0),
            (BoundaryCondition::Neumann, GridKind::Regular) => self.length / (n - 1.0),
        }
    }

    /// Coordinate of point `j` in `[0, L]`.
    pub fn point(&self, j: usize) -> f64 {
        let n = self.n as f64;
        let j = j as f64;
        match (self.bc, self.kind) {
            (BoundaryCondition::Periodic, _) => j * self.length / n,
            (_, GridKind::Staggered) => (j + 0.5) * self.length / n,
            (BoundaryCondition::Dirichlet, GridKind::Regular) => (j + 1.0) * self.length / (n + 1.0),
            (BoundaryCondition::Neumann, GridKind::Regular) => j * self.length / (n - 1.0),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs().max(1.0)
    }

    #[test]
    fn spacing_examples() {
        assert!(close(GridSpec::periodic(4, 1.0).unwrap().dx(), 0.25));
        assert!(close(GridSpec::dirichlet(3, 1.0, GridKind::Regular).unwrap().dx(), 0.25));
        assert!(close(GridSpec::neumann(8, 2.0, GridKind::Staggered).unwrap().dx(), 0.25));
    }

    #[test]
    fn point_examples() {
        let pts = GridSpec::dirichlet(2, 3.0, GridKind::Regular).unwrap().points();
        assert_eq!(pts, vec![1.0, 2.0]);
        let pts = GridSpec::dirichlet(2, 1.0, GridKind::Staggered).unwrap().points();
        assert_eq!(pts, vec![0.25, 0.75]);
        let pts = GridSpec::neumann(3, 2.0, GridKind::Regular).unwrap().points();
        assert_eq!(pts, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            GridSpec::neumann(1, 1.0, GridKind::Regular),
            Err(PoissonError::InvalidGrid(_))
        ));
        assert!(GridSpec::new(4, 1.0, GridKind::Staggered, BoundaryCondition::Periodic).is_err());
        assert!(GridSpec::periodic(0, 1.0).is_err());
        assert!(GridSpec::periodic(4, -1.0).is_err());
        assert!(GridSpec::periodic(4, f64::NAN).is_err());
    }

    #[test]
    fn degenerate_single_point_axes() {
        assert!(GridSpec::periodic(1, 1.0).is_ok());
        assert!(GridSpec::dirichlet(1, 1.0, GridKind::Staggered).is_ok());
        assert!(GridSpec::neumann(1, 1.0, GridKind::Staggered).is_ok());
        assert!(GridSpec::dirichlet(1, 2.0, GridKind::Regular).is_ok());
    }

    #[test]
    fn spacing_matches_consecutive_points() {
        let kinds = [
            (BoundaryCondition::Periodic, GridKind::Regular),
            (BoundaryCondition::Dirichlet, GridKind::Regular),
            (BoundaryCondition::Dirichlet, GridKind::Staggered),
            (BoundaryCondition::Neumann, GridKind::Regular),
            (BoundaryCondition::Neumann, GridKind::Staggered),
        ];
        for (bc, kind) in kinds {
            for n in 2..40 {
                let spec = GridSpec::new(n, 1.7, kind, bc).unwrap();
                let pts = spec.points();
                for w in pts.windows(2) {
                    assert!(((w[1] - w[0]) - spec.dx()).abs() < 1e-14);
                }
                assert!(pts[0] >= 0.0 && *pts.last().unwrap() <= 1.7 + 1e-14);
            }
        }
    }
}
