use std::fmt::{Debug, Display};

use num_traits::Float;
use rustfft::FftNum;

/// Floating point scalar usable by the transforms and the solver (`f32` or `f64`).
pub trait Real: FftNum + Float + Display + Debug + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into this precision.
    fn of(v: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(v: f64) -> Self {
        v
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
