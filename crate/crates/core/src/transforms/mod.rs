//! Discrete Fourier, sine and cosine transforms with the normalisations the
//! solver relies on.
//!
//! The real transforms are unnormalised (`f̂_k = 2 Σ f_j sin(...)` and so on);
//! each forward/backward pair is made an exact inverse by scaling the backward
//! leg. The complex DFT carries its `1/n` on the forward leg instead.

mod fast;
pub mod naive;

pub use fast::{ComplexTransform, RealTransform};

use serde::{Deserialize, Serialize};

use crate::error::{PoissonError, Result};
use crate::grid::{BoundaryCondition, GridKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    /// `f̂_k = (1/n) Σ f_j e^{-2πijk/n}`
    Dft,
    /// `f_j = Σ f̂_k e^{2πijk/n}`
    Idft,
    /// `f̂_k = 2 Σ_{j<n} f_j sin(π(j+1)(k+1)/(n+1))`
    Dst1,
    /// `f̂_k = 2 Σ_{j<n} f_j sin(π(j+1/2)(k+1)/n)`
    Dst2,
    /// `f̂_k = (-1)^k f_{n-1} + 2 Σ_{j<n-1} f_j sin(π(j+1)(k+1/2)/n)`
    Dst3,
    /// `f̂_k = f_0 + (-1)^k f_{n-1} + 2 Σ_{0<j<n-1} f_j cos(πjk/(n-1))`
    Dct1,
    /// `f̂_k = 2 Σ_{j<n} f_j cos(π(j+1/2)k/n)`
    Dct2,
    /// `f̂_k = f_0 + 2 Σ_{0<j<n} f_j cos(πj(k+1/2)/n)`
    Dct3,
}

impl TransformKind {
    pub fn is_complex(self) -> bool {
        matches!(self, TransformKind::Dft | TransformKind::Idft)
    }

    /// Smallest supported line length.
    pub fn min_len(self) -> usize {
        match self {
            TransformKind::Dct1 => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Dft => "DFT",
            TransformKind::Idft => "IDFT",
            TransformKind::Dst1 => "DST-I",
            TransformKind::Dst2 => "DST-II",
            TransformKind::Dst3 => "DST-III",
            TransformKind::Dct1 => "DCT-I",
            TransformKind::Dct2 => "DCT-II",
            TransformKind::Dct3 => "DCT-III",
        }
    }
}

impl std::fmt::Display for TransformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Forward/backward transforms that diagonalise the Laplacian for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformPair {
    pub forward: TransformKind,
    pub backward: TransformKind,
}

impl TransformPair {
    /// Factor applied after the backward transform so that
    /// `backward(forward(f)) == f` for lines of length `n`.
    pub fn backward_scale(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.backward {
            TransformKind::Idft => 1.0,
            TransformKind::Dst1 => 1.0 / (2.0 * (n + 1.0)),
            TransformKind::Dct1 => 1.0 / (2.0 * (n - 1.0)),
            TransformKind::Dst3 | TransformKind::Dct3 => 1.0 / (2.0 * n),
            other => unreachable!("{other} is never a backward leg"),
        }
    }
}

/// Transform pair for one boundary condition and grid kind.
pub fn transform_pair_for(bc: BoundaryCondition, grid: GridKind) -> Result<TransformPair> {
    use BoundaryCondition::*;
    use GridKind::*;
    use TransformKind::*;
    let (forward, backward) = match (bc, grid) {
        (Periodic, Regular) => (Dft, Idft),
        (Dirichlet, Regular) => (Dst1, Dst1),
        (Dirichlet, Staggered) => (Dst2, Dst3),
        (Neumann, Regular) => (Dct1, Dct1),
        (Neumann, Staggered) => (Dct2, Dct3),
        (Periodic, Staggered) => {
            return Err(PoissonError::UnsupportedConfig(
                "no transform pair for a periodic staggered grid".into(),
            ))
        }
    };
    Ok(TransformPair { forward, backward })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let p = transform_pair_for(BoundaryCondition::Neumann, GridKind::Staggered).unwrap();
        assert_eq!((p.forward, p.backward), (TransformKind::Dct2, TransformKind::Dct3));
        assert_eq!(p.backward_scale(8), 1.0 / 16.0);

        let p = transform_pair_for(BoundaryCondition::Dirichlet, GridKind::Regular).unwrap();
        assert_eq!((p.forward, p.backward), (TransformKind::Dst1, TransformKind::Dst1));
        assert_eq!(p.backward_scale(3), 1.0 / 8.0);

        let p = transform_pair_for(BoundaryCondition::Dirichlet, GridKind::Staggered).unwrap();
        assert_eq!((p.forward, p.backward), (TransformKind::Dst2, TransformKind::Dst3));

        let p = transform_pair_for(BoundaryCondition::Neumann, GridKind::Regular).unwrap();
        assert_eq!((p.forward, p.backward), (TransformKind::Dct1, TransformKind::Dct1));
        assert_eq!(p.backward_scale(5), 1.0 / 8.0);

        let p = transform_pair_for(BoundaryCondition::Periodic, GridKind::Regular).unwrap();
        assert_eq!((p.forward, p.backward), (TransformKind::Dft, TransformKind::Idft));
        assert_eq!(p.backward_scale(7), 1.0);

        assert!(matches!(
            transform_pair_for(BoundaryCondition::Periodic, GridKind::Staggered),
            Err(PoissonError::UnsupportedConfig(_))
        ));
    }
}
