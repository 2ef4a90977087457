//! Direct O(n²) evaluation of the transform definitions.
//!
//! Deliberately literal: every sum is written exactly as defined so that it
//! can serve as an oracle for the fast transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::TransformKind;
use crate::error::{PoissonError, Result};

/// Evaluates a real transform by direct summation.
pub fn naive_real(kind: TransformKind, f: &[f64]) -> Result<Vec<f64>> {
    if kind.is_complex() {
        return Err(PoissonError::InvalidArgument(format!(
            "{kind} is a complex transform"
        )));
    }
    let n = f.len();
    if n < kind.min_len() {
        return Err(PoissonError::LengthMismatch {
            expected: kind.min_len(),
            found: n,
        });
    }
    let nf = n as f64;
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let out = (0..n)
        .map(|k| {
            let kf = k as f64;
            match kind {
                TransformKind::Dst1 => {
                    2.0 * (0..n)
                        .map(|j| f[j] * (PI * (j as f64 + 1.0) * (kf + 1.0) / (nf + 1.0)).sin())
                        .sum::<f64>()
                }
                TransformKind::Dst2 => {
                    2.0 * (0..n)
                        .map(|j| f[j] * (PI * (j as f64 + 0.5) * (kf + 1.0) / nf).sin())
                        .sum::<f64>()
                }
                TransformKind::Dst3 => {
                    sign(k) * f[n - 1]
                        + 2.0
                            * (0..n - 1)
                                .map(|j| f[j] * (PI * (j as f64 + 1.0) * (kf + 0.5) / nf).sin())
                                .sum::<f64>()
                }
                TransformKind::Dct1 => {
                    f[0] + sign(k) * f[n - 1]
                        + 2.0
                            * (1..n - 1)
                                .map(|j| f[j] * (PI * j as f64 * kf / (nf - 1.0)).cos())
                                .sum::<f64>()
                }
                TransformKind::Dct2 => {
                    2.0 * (0..n)
                        .map(|j| f[j] * (PI * (j as f64 + 0.5) * kf / nf).cos())
                        .sum::<f64>()
                }
                TransformKind::Dct3 => {
                    f[0] + 2.0
                        * (1..n)
                            .map(|j| f[j] * (PI * j as f64 * (kf + 0.5) / nf).cos())
                            .sum::<f64>()
                }
                TransformKind::Dft | TransformKind::Idft => unreachable!(),
            }
        })
        .collect();
    Ok(out)
}

/// Evaluates the DFT (with its `1/n`) or the unscaled IDFT by direct summation.
pub fn naive_complex(kind: TransformKind, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = f.len();
    if n == 0 {
        return Err(PoissonError::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    let (sign, scale) = match kind {
        TransformKind::Dft => (-1.0, 1.0 / n as f64),
        TransformKind::Idft => (1.0, 1.0),
        other => {
            return Err(PoissonError::InvalidArgument(format!(
                "{other} is a real transform"
            )))
        }
    };
    Ok((0..n)
        .map(|k| {
            let s: Complex64 = (0..n)
                .map(|j| {
                    // reduce jk mod n before scaling to keep the phase accurate
                    let phase = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    f[j] * Complex64::from_polar(1.0, phase)
                })
                .sum();
            s * scale
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-14, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn dst1_two_points() {
        let s3 = 3f64.sqrt();
        assert_close(&naive_real(TransformKind::Dst1, &[1.0, 0.0]).unwrap(), &[s3, s3]);
    }

    #[test]
    fn dst3_two_points() {
        let r2 = 2f64.sqrt();
        assert_close(
            &naive_real(TransformKind::Dst3, &[1.0, 1.0]).unwrap(),
            &[1.0 + r2, -1.0 + r2],
        );
    }

    #[test]
    fn dct1_two_points_has_empty_middle_sum() {
        assert_close(&naive_real(TransformKind::Dct1, &[3.0, 5.0]).unwrap(), &[8.0, -2.0]);
        assert!(naive_real(TransformKind::Dct1, &[1.0]).is_err());
    }

    #[test]
    fn dct2_of_ones() {
        for n in 1..12 {
            let out = naive_real(TransformKind::Dct2, &vec![1.0; n]).unwrap();
            assert!((out[0] - 2.0 * n as f64).abs() < 1e-13);
            for v in &out[1..] {
                assert!(v.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dft_two_points() {
        let f = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = naive_complex(TransformKind::Dft, &f).unwrap();
        assert!((out[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((out[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_wrong_family() {
        assert!(naive_real(TransformKind::Dft, &[1.0]).is_err());
        assert!(naive_complex(TransformKind::Dct2, &[Complex64::new(1.0, 0.0)]).is_err());
    }
}
