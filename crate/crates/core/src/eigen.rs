//! Eigenvalues of the 1D Laplacian in the basis of each transform, for the
//! pseudo-spectral and the second-order finite-difference operators, and
//! their sum over axes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{PoissonError, Result};
use crate::grid::{Approximation, BoundaryCondition, GridKind, GridSpec};
use crate::transforms::transform_pair_for;

/// Per-axis eigenvalues `λ_k` (units 1/length²) and the indices where `λ_k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueTable {
    pub values: Vec<f64>,
    pub null_indices: Vec<usize>,
}

impl EigenvalueTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn null_indices(bc: BoundaryCondition) -> Vec<usize> {
    match bc {
        BoundaryCondition::Dirichlet => Vec::new(),
        BoundaryCondition::Periodic | BoundaryCondition::Neumann => vec![0],
    }
}

/// Wavenumber of DFT index `k` after aliasing: `min(k, n - k)`.
pub fn folded_wavenumber(k: usize, n: usize) -> usize {
    k.min(n - k)
}

/// Eigenvalues of `d²/dx²` for the sampled basis functions.
pub fn spectral_eigenvalues(spec: &GridSpec) -> Result<EigenvalueTable> {
    transform_pair_for(spec.bc(), spec.kind())?;
    let n = spec.n();
    let l = spec.length();
    let values = (0..n)
        .map(|k| {
            let w = match spec.bc() {
                BoundaryCondition::Periodic => 2.0 * PI * folded_wavenumber(k, n) as f64 / l,
                BoundaryCondition::Dirichlet => PI * (k + 1) as f64 / l,
                BoundaryCondition::Neumann => PI * k as f64 / l,
            };
            -w * w
        })
        .collect();
    Ok(EigenvalueTable {
        values,
        null_indices: null_indices(spec.bc()),
    })
}

/// Eigenvalues of the three-point second difference with the closures of
/// [`crate::stencil`].
pub fn fd2_eigenvalues(spec: &GridSpec) -> Result<EigenvalueTable> {
    transform_pair_for(spec.bc(), spec.kind())?;
    let n = spec.n() as f64;
    let dx = spec.dx();
    let values = (0..spec.n())
        .map(|k| {
            let k = k as f64;
            let angle = match (spec.bc(), spec.kind()) {
                (BoundaryCondition::Periodic, _) => k * PI / n,
                (BoundaryCondition::Dirichlet, GridKind::Regular) => PI * (k + 1.0) / (2.0 * (n + 1.0)),
                (BoundaryCondition::Dirichlet, GridKind::Staggered) => PI * (k + 1.0) / (2.0 * n),
                (BoundaryCondition::Neumann, GridKind::Regular) => PI * k / (2.0 * (n - 1.0)),
                (BoundaryCondition::Neumann, GridKind::Staggered) => PI * k / (2.0 * n),
            };
            let s = 2.0 * angle.sin() / dx;
            -s * s
        })
        .collect();
    Ok(EigenvalueTable {
        values,
        null_indices: null_indices(spec.bc()),
    })
}

pub fn eigenvalues(spec: &GridSpec, approximation: Approximation) -> Result<EigenvalueTable> {
    match approximation {
        Approximation::PseudoSpectral => spectral_eigenvalues(spec),
        Approximation::FiniteDifference2 => fd2_eigenvalues(spec),
    }
}

/// Eigenvalues of the d-dimensional Laplacian, stored row-major over the
/// per-axis mode indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedEigenvalues {
    pub extents: Vec<usize>,
    pub values: Vec<f64>,
    /// Flat indices of the modes where every axis contributes a null index.
    pub null_modes: Vec<usize>,
}

/// `λ_{k1 k2 k3} = λ_{k1} + λ_{k2} + λ_{k3}`.
pub fn combine_eigenvalues(tables: &[EigenvalueTable]) -> Result<CombinedEigenvalues> {
    if tables.is_empty() || tables.len() > 3 {
        return Err(PoissonError::InvalidArgument(format!(
            "expected 1 to 3 axes, got {}",
            tables.len()
        )));
    }
    let extents: Vec<usize> = tables.iter().map(|t| t.len()).collect();
    let mut values = vec![0.0];
    let mut null_modes = vec![0usize];
    for t in tables {
        let n = t.len();
        values = values
            .iter()
            .flat_map(|&acc| t.values.iter().map(move |&v| acc + v))
            .collect();
        null_modes = null_modes
            .iter()
            .flat_map(|&m| t.null_indices.iter().map(move |&k| m * n + k))
            .collect();
    }
    Ok(CombinedEigenvalues {
        extents,
        values,
        null_modes,
    })
}

/// Sampled basis function `k` of the forward transform for this axis
/// (the real part `cos(2πjk/n)` for periodic axes). Phases are reduced in
/// integer arithmetic, so every sample is accurate to a few ulps for any k.
pub fn mode_shape(spec: &GridSpec, k: usize) -> Vec<f64> {
    let n = spec.n();
    (0..n)
        .map(|j| {
            // angle = π·p/q
            let (p, q, sine) = match (spec.bc(), spec.kind()) {
                (BoundaryCondition::Periodic, _) => (2 * j * k, n, false),
                (BoundaryCondition::Dirichlet, GridKind::Regular) => ((j + 1) * (k + 1), n + 1, true),
                (BoundaryCondition::Dirichlet, GridKind::Staggered) => ((2 * j + 1) * (k + 1), 2 * n, true),
                (BoundaryCondition::Neumann, GridKind::Regular) => (j * k, n - 1, false),
                (BoundaryCondition::Neumann, GridKind::Staggered) => ((2 * j + 1) * k, 2 * n, false),
            };
            let angle = PI * (p % (2 * q)) as f64 / q as f64;
            if sine {
                angle.sin()
            } else {
                angle.cos()
            }
        })
        .collect()
}
