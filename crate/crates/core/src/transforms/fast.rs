use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::TransformKind;
use crate::error::{PoissonError, Result};
use crate::real::Real;

/// Planned real sine/cosine transform of a fixed length.
///
/// Each kind is evaluated through a complex FFT of an odd or even extension of
/// the input (length `2(n+1)`, `2(n-1)` or `2n`), so any `n` is supported in
/// `O(n log n)`. Plans are immutable; `execute_with_scratch` does not allocate.
pub struct RealTransform<T: Real> {
    kind: TransformKind,
    n: usize,
    scale: T,
    fft: Arc<dyn Fft<T>>,
    twiddles: Vec<Complex<T>>,
    ext_len: usize,
}

impl<T: Real> std::fmt::Debug for RealTransform<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealTransform")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("scale", &self.scale)
            .finish()
    }
}

impl<T: Real> RealTransform<T> {
    pub fn new(kind: TransformKind, n: usize) -> Result<Self> {
        Self::with_planner(kind, n, &mut FftPlanner::new())
    }

    pub fn with_planner(kind: TransformKind, n: usize, planner: &mut FftPlanner<T>) -> Result<Self> {
        if kind.is_complex() {
            return Err(PoissonError::InvalidArgument(format!(
                "{kind} is not a real transform"
            )));
        }
        if n < kind.min_len() {
            return Err(PoissonError::InvalidArgument(format!(
                "{kind} needs at least {} points, got {n}",
                kind.min_len()
            )));
        }
        let (ext_len, direction) = match kind {
            TransformKind::Dst1 => (2 * (n + 1), FftDirection::Forward),
            TransformKind::Dct1 => (2 * (n - 1), FftDirection::Forward),
            TransformKind::Dst2 | TransformKind::Dct2 => (2 * n, FftDirection::Forward),
            TransformKind::Dst3 | TransformKind::Dct3 => (2 * n, FftDirection::Inverse),
            _ => unreachable!(),
        };
        let nf = n as f64;
        let twiddles = match kind {
            // e^{-iπk/(2n)}, k = 0..=n
            TransformKind::Dst2 | TransformKind::Dct2 => (0..=n)
                .map(|k| {
                    let c = Complex::from_polar(1.0, -PI * k as f64 / (2.0 * nf));
                    Complex::new(T::of(c.re), T::of(c.im))
                })
                .collect(),
            // e^{iπj/(2n)}, j = 0..=n
            TransformKind::Dst3 | TransformKind::Dct3 => (0..=n)
                .map(|j| {
                    let c = Complex::from_polar(1.0, PI * j as f64 / (2.0 * nf));
                    Complex::new(T::of(c.re), T::of(c.im))
                })
                .collect(),
            _ => Vec::new(),
        };
        Ok(Self {
            kind,
            n,
            scale: T::one(),
            fft: planner.plan_fft(ext_len, direction),
            twiddles,
            ext_len,
        })
    }

    /// Multiplies every output by `scale` (used for the backward normalisation).
    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = T::of(scale);
        self
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.ext_len + self.fft.get_inplace_scratch_len()
    }

    /// Transforms `line` in place, allocating scratch.
    pub fn execute(&self, line: &mut [T]) -> Result<()> {
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.scratch_len()];
        self.execute_with_scratch(line, &mut scratch)
    }

    /// Out-of-place convenience wrapper.
    pub fn apply(&self, line: &[T]) -> Result<Vec<T>> {
        let mut out = line.to_vec();
        self.execute(&mut out)?;
        Ok(out)
    }

    pub fn execute_with_scratch(&self, line: &mut [T], scratch: &mut [Complex<T>]) -> Result<()> {
        if line.len() != self.n {
            return Err(PoissonError::LengthMismatch {
                expected: self.n,
                found: line.len(),
            });
        }
        if scratch.len() < self.scratch_len() {
            return Err(PoissonError::LengthMismatch {
                expected: self.scratch_len(),
                found: scratch.len(),
            });
        }
        let (buf, fft_scratch) = scratch.split_at_mut(self.ext_len);
        let fft_scratch = &mut fft_scratch[..self.fft.get_inplace_scratch_len()];
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        let re = |v: T| Complex::new(v, T::zero());
        let two = T::of(2.0);

        match self.kind {
            TransformKind::Dst1 => {
                // odd extension [0, f, 0, -rev(f)]
                buf[0] = zero;
                buf[n + 1] = zero;
                for (j, &v) in line.iter().enumerate() {
                    buf[j + 1] = re(v);
                    buf[self.ext_len - 1 - j] = re(-v);
                }
                self.fft.process_with_scratch(buf, fft_scratch);
                for (k, out) in line.iter_mut().enumerate() {
                    *out = -buf[k + 1].im * self.scale;
                }
            }
            TransformKind::Dct1 => {
                // even extension [f, rev(f[1..n-1])]
                for (j, &v) in line.iter().enumerate() {
                    buf[j] = re(v);
                }
                for j in 1..n - 1 {
                    buf[self.ext_len - j] = re(line[j]);
                }
                self.fft.process_with_scratch(buf, fft_scratch);
                for (k, out) in line.iter_mut().enumerate() {
                    *out = buf[k].re * self.scale;
                }
            }
            TransformKind::Dct2 | TransformKind::Dst2 => {
                let odd = self.kind == TransformKind::Dst2;
                for (j, &v) in line.iter().enumerate() {
                    buf[j] = re(v);
                    buf[2 * n - 1 - j] = re(if odd { -v } else { v });
                }
                self.fft.process_with_scratch(buf, fft_scratch);
                if odd {
                    for (k, out) in line.iter_mut().enumerate() {
                        *out = -(self.twiddles[k + 1] * buf[k + 1]).im * self.scale;
                    }
                } else {
                    for (k, out) in line.iter_mut().enumerate() {
                        *out = (self.twiddles[k] * buf[k]).re * self.scale;
                    }
                }
            }
            TransformKind::Dct3 => {
                for j in 0..n {
                    buf[j] = self.twiddles[j] * line[j];
                }
                for b in &mut buf[n..] {
                    *b = zero;
                }
                self.fft.process_with_scratch(buf, fft_scratch);
                let f0 = line[0];
                for (k, out) in line.iter_mut().enumerate() {
                    *out = (two * buf[k].re - f0) * self.scale;
                }
            }
            TransformKind::Dst3 => {
                buf[0] = zero;
                for m in 1..=n {
                    let c = if m == n { T::one() } else { two };
                    buf[m] = self.twiddles[m] * (c * line[m - 1]);
                }
                for b in &mut buf[n + 1..] {
                    *b = zero;
                }
                self.fft.process_with_scratch(buf, fft_scratch);
                for (k, out) in line.iter_mut().enumerate() {
                    *out = buf[k].im * self.scale;
                }
            }
            TransformKind::Dft | TransformKind::Idft => unreachable!(),
        }
        Ok(())
    }
}

/// Planned complex DFT (forward, scaled by `1/n`) or IDFT (unscaled).
pub struct ComplexTransform<T: Real> {
    kind: TransformKind,
    n: usize,
    scale: T,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for ComplexTransform<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexTransform")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .finish()
    }
}

impl<T: Real> ComplexTransform<T> {
    pub fn new(kind: TransformKind, n: usize) -> Result<Self> {
        Self::with_planner(kind, n, &mut FftPlanner::new())
    }

    pub fn with_planner(kind: TransformKind, n: usize, planner: &mut FftPlanner<T>) -> Result<Self> {
        if n == 0 {
            return Err(PoissonError::InvalidArgument("empty transform".into()));
        }
        let (direction, scale) = match kind {
            TransformKind::Dft => (FftDirection::Forward, T::of(1.0 / n as f64)),
            TransformKind::Idft => (FftDirection::Inverse, T::one()),
            other => {
                return Err(PoissonError::InvalidArgument(format!(
                    "{other} is not a complex transform"
                )))
            }
        };
        Ok(Self {
            kind,
            n,
            scale,
            fft: planner.plan_fft(n, direction),
        })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.fft.get_inplace_scratch_len()
    }

    pub fn execute(&self, line: &mut [Complex<T>]) -> Result<()> {
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.scratch_len()];
        self.execute_with_scratch(line, &mut scratch)
    }

    pub fn execute_with_scratch(
        &self,
        line: &mut [Complex<T>],
        scratch: &mut [Complex<T>],
    ) -> Result<()> {
        if line.len() != self.n {
            return Err(PoissonError::LengthMismatch {
                expected: self.n,
                found: line.len(),
            });
        }
        let need = self.scratch_len();
        if scratch.len() < need {
            return Err(PoissonError::LengthMismatch {
                expected: need,
                found: scratch.len(),
            });
        }
        self.fft.process_with_scratch(line, &mut scratch[..need]);
        if self.scale != T::one() {
            for v in line.iter_mut() {
                *v = *v * self.scale;
            }
        }
        Ok(())
    }
}
