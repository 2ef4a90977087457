//! Manufactured solutions and convergence-order estimation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{PoissonError, Result};
use crate::field::Field;
use crate::grid::{BoundaryCondition, GridSpec};
use crate::solver::{SolverConfig, SolverPlan};

/// One-dimensional factor of a separable manufactured solution, with its
/// exact second derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    /// `exp(sin(2πx/L))`, periodic.
    ExpSin,
    /// `sin(πx/L)·exp(cos(πx/L))`, zero at both ends.
    SinExpCos,
    /// `exp(cos(πx/L))`, zero slope at both ends.
    ExpCos,
    /// `cos(2πmx/L)`, periodic mode.
    Fourier(usize),
    /// `sin(πmx/L)`, m ≥ 1, Dirichlet mode.
    Sine(usize),
    /// `cos(πmx/L)`, Neumann mode.
    Cosine(usize),
    Constant,
}

impl Profile {
    pub fn value(&self, x: f64, l: f64) -> f64 {
        let a = PI / l;
        match *self {
            Profile::ExpSin => (2.0 * a * x).sin().exp(),
            Profile::SinExpCos => (a * x).sin() * (a * x).cos().exp(),
            Profile::ExpCos => (a * x).cos().exp(),
            Profile::Fourier(m) => (2.0 * a * m as f64 * x).cos(),
            Profile::Sine(m) => (a * m as f64 * x).sin(),
            Profile::Cosine(m) => (a * m as f64 * x).cos(),
            Profile::Constant => 1.0,
        }
    }

    pub fn second_derivative(&self, x: f64, l: f64) -> f64 {
        let a = PI / l;
        match *self {
            Profile::ExpSin => {
                let w = 2.0 * a;
                let (s, c) = (w * x).sin_cos();
                w * w * (c * c - s) * s.exp()
            }
            Profile::SinExpCos => {
                let (s, c) = (a * x).sin_cos();
                a * a * s * c.exp() * (s * s - 3.0 * c - 1.0)
            }
            Profile::ExpCos => {
                let (s, c) = (a * x).sin_cos();
                a * a * (s * s - c) * c.exp()
            }
            Profile::Fourier(m) => {
                let w = 2.0 * a * m as f64;
                -w * w * (w * x).cos()
            }
            Profile::Sine(m) => {
                let w = a * m as f64;
                -w * w * (w * x).sin()
            }
            Profile::Cosine(m) => {
                let w = a * m as f64;
                -w * w * (w * x).cos()
            }
            Profile::Constant => 0.0,
        }
    }

    pub fn admits(&self, bc: BoundaryCondition) -> bool {
        match self {
            Profile::ExpSin | Profile::Fourier(_) => bc == BoundaryCondition::Periodic,
            Profile::SinExpCos | Profile::Sine(_) => bc == BoundaryCondition::Dirichlet,
            Profile::ExpCos | Profile::Cosine(_) => bc == BoundaryCondition::Neumann,
            Profile::Constant => bc != BoundaryCondition::Dirichlet,
        }
    }

    /// Transform index whose basis function this profile samples, if any.
    pub fn mode_index(&self) -> Option<usize> {
        match *self {
            Profile::Fourier(m) | Profile::Cosine(m) => Some(m),
            Profile::Sine(m) if m >= 1 => Some(m - 1),
            Profile::Constant => Some(0),
            _ => None,
        }
    }
}

/// How the right-hand side is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    /// The exact continuous Laplacian of the solution.
    Analytic,
    /// The solution times the plan's own discrete eigenvalue; every factor
    /// must be a mode profile. The discrete solve is then exact.
    DiscreteEigenmode,
}

/// Separable closed-form solution `φ = Π f_a(x_a)` with its Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManufacturedCase {
    pub profiles: Vec<Profile>,
    pub rhs: RhsKind,
    pub description: String,
}

impl ManufacturedCase {
    pub fn analytic(profiles: Vec<Profile>, description: impl Into<String>) -> Self {
        Self {
            profiles,
            rhs: RhsKind::Analytic,
            description: description.into(),
        }
    }

    pub fn discrete_eigenmode(profiles: Vec<Profile>, description: impl Into<String>) -> Result<Self> {
        if profiles.iter().any(|p| p.mode_index().is_none()) {
            return Err(PoissonError::InvalidArgument(
                "a discrete eigenmode case needs mode profiles on every axis".into(),
            ));
        }
        Ok(Self {
            profiles,
            rhs: RhsKind::DiscreteEigenmode,
            description: description.into(),
        })
    }

    /// A smooth non-eigenmode case matching the boundary conditions of `axes`.
    pub fn smooth_for(axes: &[GridSpec]) -> Self {
        let profiles = axes
            .iter()
            .map(|s| match s.bc() {
                BoundaryCondition::Periodic => Profile::ExpSin,
                BoundaryCondition::Dirichlet => Profile::SinExpCos,
                BoundaryCondition::Neumann => Profile::ExpCos,
            })
            .collect();
        Self::analytic(profiles, "smooth separable case")
    }

    fn check(&self, config: &SolverConfig) -> Result<()> {
        if self.profiles.len() != config.dims() {
            return Err(PoissonError::CaseMismatch(format!(
                "case has {} axes, configuration has {}",
                self.profiles.len(),
                config.dims()
            )));
        }
        for (axis, (p, s)) in self.profiles.iter().zip(config.axes()).enumerate() {
            if !p.admits(s.bc()) {
                return Err(PoissonError::CaseMismatch(format!(
                    "{p:?} does not satisfy {:?} on axis {axis}",
                    s.bc()
                )));
            }
            if let Some(k) = p.mode_index() {
                if self.rhs == RhsKind::DiscreteEigenmode && k >= s.n() {
                    return Err(PoissonError::CaseMismatch(format!(
                        "mode {k} does not exist on {} points",
                        s.n()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sampled exact solution.
    pub fn sample_solution(&self, config: &SolverConfig) -> Result<Field<f64>> {
        self.check(config)?;
        let axes = config.axes();
        Field::from_fn(&config.extents(), |idx| {
            idx.iter()
                .zip(axes)
                .zip(&self.profiles)
                .map(|((&j, s), p)| p.value(s.point(j), s.length()))
                .product()
        })
    }

    /// Sampled right-hand side for the given plan.
    pub fn sample_rhs(&self, plan: &SolverPlan<f64>) -> Result<Field<f64>> {
        let config = plan.config();
        self.check(config)?;
        let axes = config.axes();
        match self.rhs {
            RhsKind::Analytic => Field::from_fn(&config.extents(), |idx| {
                let x: Vec<(f64, f64)> = idx
                    .iter()
                    .zip(axes)
                    .map(|(&j, s)| (s.point(j), s.length()))
                    .collect();
                (0..x.len())
                    .map(|a| {
                        (0..x.len())
                            .map(|b| {
                                let (xb, lb) = x[b];
                                if a == b {
                                    self.profiles[b].second_derivative(xb, lb)
                                } else {
                                    self.profiles[b].value(xb, lb)
                                }
                            })
                            .product::<f64>()
                    })
                    .sum()
            }),
            RhsKind::DiscreteEigenmode => {
                let lambda: f64 = self
                    .profiles
                    .iter()
                    .zip(plan.eigenvalue_tables())
                    .map(|(p, t)| t.values[p.mode_index().expect("checked")])
                    .sum();
                let mut f = self.sample_solution(config)?;
                for v in f.as_mut_slice() {
                    *v *= lambda;
                }
                Ok(f)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub max: f64,
    /// Root-mean-square over grid points.
    pub l2: f64,
    /// Largest magnitude of the sampled exact solution.
    pub scale: f64,
}

fn remove_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    for x in v {
        *x -= m;
    }
}

/// Solves the sampled case with `plan` and measures the pointwise error.
/// For singular configurations both fields are compared after removing
/// their means.
pub fn mms_error(plan: &SolverPlan<f64>, case: &ManufacturedCase) -> Result<ErrorNorms> {
    let config = plan.config();
    let rhs = case.sample_rhs(plan)?;
    let (solution, _) = plan.solve_field(&rhs.view())?;
    let mut exact = case.sample_solution(config)?.to_vec();
    let mut numeric = solution.to_vec();
    if config.is_singular() {
        remove_mean(&mut exact);
        remove_mean(&mut numeric);
    }
    let n = exact.len() as f64;
    let mut max = 0.0f64;
    let mut sq = 0.0;
    for (a, b) in numeric.iter().zip(&exact) {
        let e = a - b;
        max = max.max(e.abs());
        sq += e * e;
    }
    Ok(ErrorNorms {
        max,
        l2: (sq / n).sqrt(),
        scale: exact.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    })
}

/// Errors at increasing resolution and the observed orders between
/// consecutive sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub sizes: Vec<usize>,
    pub max_errors: Vec<f64>,
    pub l2_errors: Vec<f64>,
    /// `ln(e_i / e_{i+1}) / ln(n_{i+1} / n_i)` (= `log2(e_n / e_2n)` for doubling).
    pub orders: Vec<f64>,
    /// All errors at roundoff level; no order is fitted.
    pub spectral_exact: bool,
}

impl ConvergenceReport {
    pub fn finest_order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

/// Relative error below which a discretisation is treated as exact.
pub const EXACT_THRESHOLD: f64 = 1e-10;

/// Runs `case` on `config` with every axis resized to each of `sizes`.
pub fn convergence_order(config: &SolverConfig, sizes: &[usize], case: &ManufacturedCase) -> Result<ConvergenceReport> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(PoissonError::InvalidArgument(
            "a convergence study needs at least three distinct sizes".into(),
        ));
    }
    let mut max_errors = Vec::with_capacity(sizes.len());
    let mut l2_errors = Vec::with_capacity(sizes.len());
    let mut exact = true;
    for &n in &sizes {
        let cfg = config.with_extents(&vec![n; config.dims()])?;
        let plan = SolverPlan::new(cfg)?;
        let e = mms_error(&plan, case)?;
        exact &= e.max <= EXACT_THRESHOLD * e.scale.max(1.0);
        max_errors.push(e.max);
        l2_errors.push(e.l2);
    }
    let orders = if exact {
        Vec::new()
    } else {
        sizes
            .windows(2)
            .zip(max_errors.windows(2))
            .map(|(n, e)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
            .collect()
    };
    Ok(ConvergenceReport {
        sizes,
        max_errors,
        l2_errors,
        orders,
        spectral_exact: exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Approximation, GridKind};

    // Central differences with step h have O(h²) error; h = 1e-4 gives ~1e-7 agreement.
    #[test]
    fn second_derivatives_match_finite_differences() {
        let l = 1.7;
        let h = 1e-4;
        for p in [
            Profile::ExpSin,
            Profile::SinExpCos,
            Profile::ExpCos,
            Profile::Fourier(2),
            Profile::Sine(3),
            Profile::Cosine(1),
            Profile::Constant,
        ] {
            for i in 1..20 {
                let x = l * i as f64 / 20.0;
                let fd = (p.value(x + h, l) - 2.0 * p.value(x, l) + p.value(x - h, l)) / (h * h);
                let exact = p.second_derivative(x, l);
                assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "{p:?} at {x}");
            }
        }
    }

    #[test]
    fn profiles_satisfy_their_boundary_conditions() {
        let l = 2.3;
        let h = 1e-6;
        assert!(Profile::SinExpCos.value(0.0, l).abs() < 1e-15);
        assert!(Profile::SinExpCos.value(l, l).abs() < 1e-15);
        for x in [0.0, l] {
            let slope = (Profile::ExpCos.value(x + h, l) - Profile::ExpCos.value(x - h, l)) / (2.0 * h);
            assert!(slope.abs() < 1e-8);
        }
        assert!((Profile::ExpSin.value(0.0, l) - Profile::ExpSin.value(l, l)).abs() < 1e-14);
    }

    #[test]
    fn spectral_sine_mode_is_exact() {
        let spec = GridSpec::dirichlet(16, 1.0, GridKind::Regular).unwrap();
        let plan = SolverPlan::new(SolverConfig::uniform(spec, 1, Approximation::PseudoSpectral).unwrap()).unwrap();
        let case = ManufacturedCase::analytic(vec![Profile::Sine(3)], "sin(3πx)");
        assert!(mms_error(&plan, &case).unwrap().max <= 1e-12);
    }

    #[test]
    fn fd2_sine_mode_is_second_order() {
        let spec = GridSpec::dirichlet(32, 1.0, GridKind::Regular).unwrap();
        let case = ManufacturedCase::analytic(vec![Profile::Sine(3)], "sin(3πx)");
        let e = |n: usize| {
            let cfg = SolverConfig::uniform(spec.with_n(n).unwrap(), 1, Approximation::FiniteDifference2).unwrap();
            mms_error(&SolverPlan::new(cfg).unwrap(), &case).unwrap().max
        };
        let ratio = e(32) / e(64);
        assert!((3.6..=4.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn constant_under_neumann_has_zero_error() {
        let spec = GridSpec::neumann(9, 1.0, GridKind::Staggered).unwrap();
        let plan = SolverPlan::new(SolverConfig::uniform(spec, 2, Approximation::FiniteDifference2).unwrap()).unwrap();
        let case = ManufacturedCase::analytic(vec![Profile::Constant; 2], "constant");
        assert!(mms_error(&plan, &case).unwrap().max < 1e-15);
    }

    #[test]
    fn mismatched_case_is_rejected() {
        let spec = GridSpec::periodic(8, 1.0).unwrap();
        let plan = SolverPlan::new(SolverConfig::uniform(spec, 1, Approximation::PseudoSpectral).unwrap()).unwrap();
        let case = ManufacturedCase::analytic(vec![Profile::Sine(1)], "wrong bc");
        assert!(matches!(mms_error(&plan, &case), Err(PoissonError::CaseMismatch(_))));
        let case = ManufacturedCase::analytic(vec![Profile::ExpSin; 2], "wrong dims");
        assert!(mms_error(&plan, &case).is_err());
        assert!(ManufacturedCase::discrete_eigenmode(vec![Profile::ExpSin], "x").is_err());
    }

    #[test]
    fn convergence_flags_exact_cases() {
        let spec = GridSpec::periodic(8, 1.0).unwrap();
        let cfg = SolverConfig::uniform(spec, 1, Approximation::PseudoSpectral).unwrap();
        let case = ManufacturedCase::analytic(vec![Profile::Fourier(2)], "band limited");
        let r = convergence_order(&cfg, &[16, 8, 32], &case).unwrap();
        assert!(r.spectral_exact);
        assert_eq!(r.sizes, vec![8, 16, 32]);
        assert!(r.orders.is_empty());

        let fd = SolverConfig::uniform(spec, 1, Approximation::FiniteDifference2).unwrap();
        let mode = ManufacturedCase::discrete_eigenmode(vec![Profile::Fourier(2)], "own mode").unwrap();
        assert!(convergence_order(&fd, &[8, 16, 32], &mode).unwrap().spectral_exact);

        assert!(convergence_order(&fd, &[8, 16], &mode).is_err());
    }

    #[test]
    fn order_is_independent_of_size_ordering() {
        let spec = GridSpec::neumann(8, 1.0, GridKind::Staggered).unwrap();
        let cfg = SolverConfig::uniform(spec, 1, Approximation::FiniteDifference2).unwrap();
        let case = ManufacturedCase::smooth_for(cfg.axes());
        let a = convergence_order(&cfg, &[16, 32, 64], &case).unwrap();
        let b = convergence_order(&cfg, &[64, 16, 32], &case).unwrap();
        assert_eq!(a, b);
        let p = a.finest_order().unwrap();
        assert!((1.9..=2.1).contains(&p), "{p}");
    }
}
