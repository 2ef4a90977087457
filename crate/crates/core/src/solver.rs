//! Plan/execute Poisson solver.
//!
//! A solve is three passes: forward transforms along every axis, division by
//! the summed eigenvalues, backward transforms. Non-periodic axes use real
//! sine/cosine transforms on a real work array; periodic axes are then
//! transformed with complex DFTs. Lines along non-contiguous axes are
//! gathered into a contiguous buffer by [`crate::reorder`] first.
//!
//! Singular configurations (no Dirichlet axis) have a constant null mode. Its
//! coefficient is removed from the right-hand side and reported as
//! [`SolveReport::removed_mean`]; the solution has a zero null-mode component.
//!
//! A plan is read-only during a solve and every call allocates its own
//! workspace, so one plan may serve concurrent solves on distinct fields.

use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::eigen::{combine_eigenvalues, eigenvalues, EigenvalueTable};
use crate::error::{PoissonError, Result};
use crate::field::{Field, FieldView, FieldViewMut, Layout};
use crate::grid::{Approximation, BoundaryCondition, GridSpec};
use crate::real::Real;
use crate::reorder::{gather_slice, scatter_slice, ReorderPlan};
use crate::stencil::apply_line;
use crate::transforms::{transform_pair_for, ComplexTransform, RealTransform, TransformPair};

/// Whether all axes share one boundary treatment or periodic axes are
/// combined with non-periodic ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Uniform,
    Mixed,
}

/// Validated solver configuration: one [`GridSpec`] per axis plus the
/// approximation.
///
/// Accepted patterns are every axis sharing one (bc, grid) pair, or a mix of
/// periodic axes with non-periodic axes that all share one (bc, grid) pair.
/// The periodic axes may sit at any position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    axes: Vec<GridSpec>,
    approximation: Approximation,
}

impl SolverConfig {
    pub fn new(axes: Vec<GridSpec>, approximation: Approximation) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(PoissonError::UnsupportedConfig(format!(
                "expected 1 to 3 axes, got {}",
                axes.len()
            )));
        }
        let config = Self { axes, approximation };
        config.classify()?;
        Ok(config)
    }

    /// Same grid on every axis.
    pub fn uniform(spec: GridSpec, dims: usize, approximation: Approximation) -> Result<Self> {
        Self::new(vec![spec; dims], approximation)
    }

    fn classify(&self) -> Result<SolveMode> {
        let key = |s: &GridSpec| (s.bc(), s.kind());
        let first = key(&self.axes[0]);
        if self.axes.iter().all(|s| key(s) == first) {
            return Ok(SolveMode::Uniform);
        }
        let rest: Vec<_> = self
            .axes
            .iter()
            .filter(|s| s.bc() != BoundaryCondition::Periodic)
            .map(key)
            .collect();
        if rest.windows(2).all(|w| w[0] == w[1]) {
            Ok(SolveMode::Mixed)
        } else {
            let pattern: Vec<String> = self
                .axes
                .iter()
                .map(|s| format!("{:?}/{:?}", s.bc(), s.kind()))
                .collect();
            Err(PoissonError::UnsupportedConfig(format!(
                "non-periodic axes must share one boundary condition and grid kind, got [{}]",
                pattern.join(", ")
            )))
        }
    }

    pub fn mode(&self) -> SolveMode {
        self.classify().expect("validated at construction")
    }

    pub fn axes(&self) -> &[GridSpec] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn approximation(&self) -> Approximation {
        self.approximation
    }

    pub fn extents(&self) -> Vec<usize> {
        self.axes.iter().map(|s| s.n()).collect()
    }

    pub fn len(&self) -> usize {
        self.extents().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when a constant null mode exists (no Dirichlet axis).
    pub fn is_singular(&self) -> bool {
        self.axes.iter().all(|s| s.bc() != BoundaryCondition::Dirichlet)
    }

    /// Axis indices with periodic axes first, then the rest, each in order.
    pub fn axis_order(&self) -> Vec<usize> {
        let periodic = |a: &usize| self.axes[*a].bc() == BoundaryCondition::Periodic;
        let mut order: Vec<usize> = (0..self.dims()).filter(periodic).collect();
        order.extend((0..self.dims()).filter(|a| !periodic(a)));
        order
    }

    /// Copy with new per-axis point counts.
    pub fn with_extents(&self, extents: &[usize]) -> Result<Self> {
        if extents.len() != self.dims() {
            return Err(PoissonError::ExtentMismatch {
                expected: self.extents(),
                found: extents.to_vec(),
            });
        }
        let axes = self
            .axes
            .iter()
            .zip(extents)
            .map(|(s, &n)| s.with_n(n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes, self.approximation)
    }
}

/// Wall-clock seconds spent in each phase of a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTiming {
    pub forward: f64,
    pub diagonal: f64,
    pub backward: f64,
}

impl PhaseTiming {
    pub fn total(&self) -> f64 {
        self.forward + self.diagonal + self.backward
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// Constant removed from the right-hand side to make it compatible
    /// (zero when the system is nonsingular).
    pub removed_mean: f64,
    pub mode: SolveMode,
    /// Periodic axes first; identity for uniform configurations.
    pub axis_order: Vec<usize>,
    pub timing: PhaseTiming,
}

enum AxisTransforms<T: Real> {
    Real {
        forward: RealTransform<T>,
        backward: RealTransform<T>,
    },
    Complex {
        forward: ComplexTransform<T>,
        backward: ComplexTransform<T>,
    },
}

struct AxisPlan<T: Real> {
    spec: GridSpec,
    pair: TransformPair,
    transforms: AxisTransforms<T>,
    table: EigenvalueTable,
    // None when the axis is contiguous in the work array
    reorder: Option<ReorderPlan>,
}

impl<T: Real> AxisPlan<T> {
    fn scratch_len(&self) -> usize {
        match &self.transforms {
            AxisTransforms::Real { forward, backward } => {
                forward.scratch_len().max(backward.scratch_len())
            }
            AxisTransforms::Complex { forward, backward } => {
                forward.scratch_len().max(backward.scratch_len())
            }
        }
    }

    fn is_periodic(&self) -> bool {
        matches!(self.transforms, AxisTransforms::Complex { .. })
    }
}

#[derive(Clone, Copy)]
enum Diagonal {
    Divide,
    Multiply,
}

/// Precomputed transforms and eigenvalues for one [`SolverConfig`].
pub struct SolverPlan<T: Real = f64> {
    config: SolverConfig,
    mode: SolveMode,
    axes: Vec<AxisPlan<T>>,
    eigenvalues: Vec<T>,
    null_modes: Vec<usize>,
    // value at every grid point of the backward transform of a unit null coefficient
    null_value: f64,
    layout: Layout,
}

impl<T: Real> std::fmt::Debug for SolverPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverPlan")
            .field("config", &self.config)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SolverPlan<T> {
    pub fn new(config: SolverConfig) -> Result<Self> {
        let mode = config.classify()?;
        let extents = config.extents();
        let layout = Layout::contiguous(&extents)?;
        let mut planner = FftPlanner::<T>::new();
        let dims = config.dims();
        let mut axes = Vec::with_capacity(dims);
        let mut null_value = 1.0;
        for (axis, spec) in config.axes().iter().enumerate() {
            let n = spec.n();
            let pair = transform_pair_for(spec.bc(), spec.kind())?;
            let scale = pair.backward_scale(n);
            let transforms = if spec.bc() == BoundaryCondition::Periodic {
                AxisTransforms::Complex {
                    forward: ComplexTransform::with_planner(pair.forward, n, &mut planner)?,
                    backward: ComplexTransform::with_planner(pair.backward, n, &mut planner)?,
                }
            } else {
                AxisTransforms::Real {
                    forward: RealTransform::with_planner(pair.forward, n, &mut planner)?,
                    backward: RealTransform::with_planner(pair.backward, n, &mut planner)?
                        .scaled(scale),
                }
            };
            // backward image of e_0: 1 (IDFT), 1/(2(n-1)) (DCT-I), 1/(2n) (DCT-III)
            null_value *= scale;
            let table = eigenvalues(spec, config.approximation())?;
            let reorder = if axis + 1 == dims {
                None
            } else {
                Some(ReorderPlan::new(&layout, axis)?)
            };
            axes.push(AxisPlan {
                spec: *spec,
                pair,
                transforms,
                table,
                reorder,
            });
        }
        let tables: Vec<EigenvalueTable> = axes.iter().map(|a| a.table.clone()).collect();
        let combined = combine_eigenvalues(&tables)?;
        Ok(Self {
            config,
            mode,
            eigenvalues: combined.values.iter().map(|&v| T::of(v)).collect(),
            null_modes: combined.null_modes,
            null_value,
            axes,
            layout,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn extents(&self) -> &[usize] {
        self.layout.extents()
    }

    /// Transform pair used on each axis.
    pub fn transform_pairs(&self) -> Vec<TransformPair> {
        self.axes.iter().map(|a| a.pair).collect()
    }

    pub fn eigenvalue_tables(&self) -> Vec<&EigenvalueTable> {
        self.axes.iter().map(|a| &a.table).collect()
    }

    /// Combined eigenvalues, row-major over mode indices.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn null_modes(&self) -> &[usize] {
        &self.null_modes
    }

    /// Scales one combined eigenvalue. Exists only so that verification
    /// harnesses can check that they detect a wrong operator.
    #[doc(hidden)]
    pub fn perturb_eigenvalue(&mut self, flat_index: usize, factor: f64) {
        self.eigenvalues[flat_index] = self.eigenvalues[flat_index] * T::of(factor);
    }

    fn check_extents(&self, found: &[usize]) -> Result<()> {
        if found != self.extents() {
            return Err(PoissonError::ExtentMismatch {
                expected: self.extents().to_vec(),
                found: found.to_vec(),
            });
        }
        Ok(())
    }

    fn load(&self, rhs: &FieldView<'_, T>) -> Result<Vec<T>> {
        self.check_extents(rhs.extents())?;
        let mut work = vec![T::zero(); self.layout.len()];
        rhs.copy_to_slice(&mut work);
        if let Some((index, v)) = work.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(PoissonError::NonFinite {
                index,
                value: v.as_f64(),
            });
        }
        Ok(work)
    }

    /// Solves `∇²φ = rhs` and writes φ into `solution`. Both views may address
    /// sub-blocks of larger allocations; `rhs` is left untouched.
    pub fn solve(&self, rhs: &FieldView<'_, T>, solution: &mut FieldViewMut<'_, T>) -> Result<SolveReport> {
        self.check_extents(solution.extents())?;
        let mut work = self.load(rhs)?;
        let report = self.dispatch(&mut work)?;
        solution.copy_from_slice(&work);
        Ok(report)
    }

    /// Solves in place: `field` holds the right-hand side on entry and the
    /// solution on return.
    pub fn solve_in_place(&self, field: &mut FieldViewMut<'_, T>) -> Result<SolveReport> {
        let mut work = self.load(&field.as_view())?;
        let report = self.dispatch(&mut work)?;
        field.copy_from_slice(&work);
        Ok(report)
    }

    /// Convenience wrapper returning a new tight field.
    pub fn solve_field(&self, rhs: &FieldView<'_, T>) -> Result<(Field<T>, SolveReport)> {
        let mut work = self.load(rhs)?;
        let report = self.dispatch(&mut work)?;
        Ok((Field::from_vec(self.extents(), work)?, report))
    }

    /// Mixed-boundary path: real transforms on the non-periodic axes, then
    /// complex transforms on the periodic ones, each pass over reordered lines.
    /// Rejects plans that are not mixed.
    pub fn solve_mixed(&self, rhs: &FieldView<'_, T>, solution: &mut FieldViewMut<'_, T>) -> Result<SolveReport> {
        if self.mode != SolveMode::Mixed {
            return Err(PoissonError::UnsupportedConfig(
                "solve_mixed requires a plan with both periodic and non-periodic axes".into(),
            ));
        }
        self.solve(rhs, solution)
    }

    fn dispatch(&self, work: &mut Vec<T>) -> Result<SolveReport> {
        let (removed, timing) = self.run(work, Diagonal::Divide);
        let removed_mean = if self.config.is_singular() {
            removed * self.null_value
        } else {
            0.0
        };
        Ok(SolveReport {
            removed_mean,
            mode: self.mode,
            axis_order: self.config.axis_order(),
            timing,
        })
    }

    /// Applies the plan's discrete Laplacian through the transforms
    /// (forward, multiply by eigenvalues, backward).
    pub fn apply_operator(&self, field: &FieldView<'_, T>) -> Result<Field<T>> {
        let mut work = self.load(field)?;
        self.run(&mut work, Diagonal::Multiply);
        Field::from_vec(self.extents(), work)
    }

    // Returns the real part of the (first) null-mode coefficient and the timing.
    fn run(&self, work: &mut Vec<T>, diagonal: Diagonal) -> (f64, PhaseTiming) {
        let mut timing = PhaseTiming::default();
        let mut buffer: Vec<T> = Vec::new();
        let t0 = Instant::now();
        for ax in self.axes.iter().filter(|a| !a.is_periodic()) {
            if let AxisTransforms::Real { forward, .. } = &ax.transforms {
                along_axis(work, &mut buffer, ax, |line, s| {
                    forward.execute_with_scratch(line, s).expect("line length fixed by plan")
                });
            }
        }
        let periodic: Vec<&AxisPlan<T>> = self.axes.iter().filter(|a| a.is_periodic()).collect();
        let removed;
        if periodic.is_empty() {
            timing.forward = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            removed = self.diagonal(work, diagonal, |v| (v, T::zero()), |_, re, _| re);
            timing.diagonal = t1.elapsed().as_secs_f64();
        } else {
            let mut cwork: Vec<Complex<T>> = work.iter().map(|&v| Complex::new(v, T::zero())).collect();
            let mut cbuffer: Vec<Complex<T>> = Vec::new();
            for ax in &periodic {
                if let AxisTransforms::Complex { forward, .. } = &ax.transforms {
                    along_axis(&mut cwork, &mut cbuffer, ax, |line, s| {
                        forward.execute_with_scratch(line, s).expect("line length fixed by plan")
                    });
                }
            }
            timing.forward = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            removed = self.diagonal(
                &mut cwork,
                diagonal,
                |c| (c.re, c.im),
                |_, re, im| Complex::new(re, im),
            );
            timing.diagonal = t1.elapsed().as_secs_f64();
            let t2 = Instant::now();
            for ax in periodic.iter().rev() {
                if let AxisTransforms::Complex { backward, .. } = &ax.transforms {
                    along_axis(&mut cwork, &mut cbuffer, ax, |line, s| {
                        backward.execute_with_scratch(line, s).expect("line length fixed by plan")
                    });
                }
            }
            for (w, c) in work.iter_mut().zip(&cwork) {
                *w = c.re;
            }
            timing.backward = t2.elapsed().as_secs_f64();
        }
        let t3 = Instant::now();
        for ax in self.axes.iter().rev().filter(|a| !a.is_periodic()) {
            if let AxisTransforms::Real { backward, .. } = &ax.transforms {
                along_axis(work, &mut buffer, ax, |line, s| {
                    backward.execute_with_scratch(line, s).expect("line length fixed by plan")
                });
            }
        }
        timing.backward += t3.elapsed().as_secs_f64();
        (removed, timing)
    }

    // Divides (or multiplies) each coefficient by its eigenvalue; null modes
    // are zeroed when dividing. Returns the real part of the first null coefficient.
    fn diagonal<E: Copy + Send + Sync>(
        &self,
        coeffs: &mut [E],
        op: Diagonal,
        split: impl Fn(E) -> (T, T) + Sync,
        join: impl Fn(E, T, T) -> E + Sync,
    ) -> f64 {
        let removed = self
            .null_modes
            .first()
            .map(|&i| split(coeffs[i]).0.as_f64())
            .unwrap_or(0.0);
        match op {
            Diagonal::Divide => {
                coeffs
                    .par_iter_mut()
                    .zip(self.eigenvalues.par_iter())
                    .with_min_len(4096)
                    .for_each(|(c, &lambda)| {
                        let (re, im) = split(*c);
                        *c = join(*c, re / lambda, im / lambda);
                    });
                for &i in &self.null_modes {
                    coeffs[i] = join(coeffs[i], T::zero(), T::zero());
                }
            }
            Diagonal::Multiply => {
                coeffs
                    .par_iter_mut()
                    .zip(self.eigenvalues.par_iter())
                    .with_min_len(4096)
                    .for_each(|(c, &lambda)| {
                        let (re, im) = split(*c);
                        *c = join(*c, re * lambda, im * lambda);
                    });
            }
        }
        removed
    }
}

// Runs `kernel` on every line along the axis of `ax`, reordering through
// `buffer` when the axis is not contiguous.
fn along_axis<T, E, F>(data: &mut [E], buffer: &mut Vec<E>, ax: &AxisPlan<T>, kernel: F)
where
    T: Real,
    E: Copy + Send + Sync,
    F: Fn(&mut [E], &mut [Complex<T>]) + Sync,
{
    let n = ax.spec.n();
    let scratch_len = ax.scratch_len();
    let min_lines = (4096 / n.max(1)).max(1);
    let run = |lines: &mut [E]| {
        lines
            .par_chunks_mut(n)
            .with_min_len(min_lines)
            .for_each_init(
                || vec![Complex::new(T::zero(), T::zero()); scratch_len],
                |scratch, line| kernel(line, scratch),
            );
    };
    match &ax.reorder {
        None => run(data),
        Some(plan) => {
            if buffer.len() != data.len() {
                buffer.clear();
                buffer.extend_from_slice(data);
            }
            gather_slice(plan, data, buffer);
            run(buffer);
            scatter_slice(plan, buffer, data);
        }
    }
}

/// Applies the three-point second difference (summed over axes) with the
/// boundary closures of [`crate::stencil`]. FD2 configurations only.
pub fn apply_discrete_laplacian(config: &SolverConfig, field: &FieldView<'_, f64>) -> Result<Field<f64>> {
    if config.approximation() != Approximation::FiniteDifference2 {
        return Err(PoissonError::UnsupportedConfig(
            "the discrete Laplacian is only defined for the finite-difference approximation".into(),
        ));
    }
    let extents = config.extents();
    if field.extents() != extents.as_slice() {
        return Err(PoissonError::ExtentMismatch {
            expected: extents,
            found: field.extents().to_vec(),
        });
    }
    let layout = Layout::contiguous(&extents)?;
    let data = field.to_vec();
    let mut out = vec![0.0; data.len()];
    let mut lines = vec![0.0; data.len()];
    let mut lap = vec![0.0; data.len()];
    let mut lap_scattered = vec![0.0; data.len()];
    for (axis, spec) in config.axes().iter().enumerate() {
        let plan = ReorderPlan::new(&layout, axis)?;
        gather_slice(&plan, &data, &mut lines);
        let n = spec.n();
        for (src, dst) in lines.chunks(n).zip(lap.chunks_mut(n)) {
            apply_line(spec, src, dst);
        }
        scatter_slice(&plan, &lap, &mut lap_scattered);
        for (o, v) in out.iter_mut().zip(&lap_scattered) {
            *o += v;
        }
    }
    Field::from_vec(&extents, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::mode_shape;
    use crate::grid::GridKind;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn plan_examples() {
        let p = GridSpec::periodic(8, 1.0).unwrap();
        let c = SolverConfig::uniform(p, 3, Approximation::PseudoSpectral).unwrap();
        let plan = SolverPlan::<f64>::new(c).unwrap();
        assert_eq!(plan.mode(), SolveMode::Uniform);
        assert!(plan
            .transform_pairs()
            .iter()
            .all(|t| t.forward == crate::transforms::TransformKind::Dft));

        let ns = GridSpec::neumann(6, 1.0, GridKind::Staggered).unwrap();
        let c = SolverConfig::new(vec![p, ns, ns], Approximation::FiniteDifference2).unwrap();
        let plan = SolverPlan::<f64>::new(c).unwrap();
        assert_eq!(plan.mode(), SolveMode::Mixed);
        let pairs = plan.transform_pairs();
        assert_eq!(pairs[1].forward, crate::transforms::TransformKind::Dct2);
        assert_eq!(pairs[2].backward, crate::transforms::TransformKind::Dct3);

        // periodic on the last axis is accepted by role
        let ds = GridSpec::dirichlet(5, 1.0, GridKind::Staggered).unwrap();
        let c = SolverConfig::new(vec![ds, p], Approximation::FiniteDifference2).unwrap();
        assert_eq!(c.axis_order(), vec![1, 0]);

        let dr = GridSpec::dirichlet(5, 1.0, GridKind::Regular).unwrap();
        assert!(matches!(
            SolverConfig::new(vec![p, dr, ds], Approximation::FiniteDifference2),
            Err(PoissonError::UnsupportedConfig(_))
        ));
        assert!(SolverConfig::new(vec![dr, ns], Approximation::FiniteDifference2).is_err());
        assert!(SolverConfig::new(vec![], Approximation::FiniteDifference2).is_err());
        assert!(SolverConfig::new(vec![p; 4], Approximation::FiniteDifference2).is_err());
    }

    #[test]
    fn eigenvector_in_eigenvector_out() {
        let spec = GridSpec::dirichlet(8, 1.0, GridKind::Regular).unwrap();
        for approx in [Approximation::PseudoSpectral, Approximation::FiniteDifference2] {
            let plan = SolverPlan::<f64>::new(SolverConfig::uniform(spec, 1, approx).unwrap()).unwrap();
            let v = mode_shape(&spec, 2);
            let lambda = plan.eigenvalue_tables()[0].values[2];
            let rhs: Vec<f64> = v.iter().map(|x| x * lambda).collect();
            let (sol, report) = plan
                .solve_field(&Field::from_vec(&[8], rhs).unwrap().view())
                .unwrap();
            assert_eq!(report.removed_mean, 0.0);
            let err: Vec<f64> = sol.to_vec().iter().zip(&v).map(|(a, b)| a - b).collect();
            assert!(max_abs(&err) <= 1e-12);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let spec = GridSpec::neumann(5, 1.0, GridKind::Regular).unwrap();
        let plan = SolverPlan::<f64>::new(
            SolverConfig::uniform(spec, 2, Approximation::FiniteDifference2).unwrap(),
        )
        .unwrap();
        let (sol, report) = plan.solve_field(&Field::zeros(&[5, 5]).unwrap().view()).unwrap();
        assert!(sol.to_vec().iter().all(|&v| v == 0.0));
        assert_eq!(report.removed_mean, 0.0);
    }

    #[test]
    fn constant_rhs_is_removed_for_neumann() {
        for kind in [GridKind::Regular, GridKind::Staggered] {
            let spec = GridSpec::neumann(6, 1.0, kind).unwrap();
            let plan = SolverPlan::<f64>::new(
                SolverConfig::uniform(spec, 2, Approximation::FiniteDifference2).unwrap(),
            )
            .unwrap();
            let rhs = Field::from_vec(&[6, 6], vec![2.5; 36]).unwrap();
            let (sol, report) = plan.solve_field(&rhs.view()).unwrap();
            assert!(max_abs(&sol.to_vec()) < 1e-13, "{kind:?}");
            assert!((report.removed_mean - 2.5).abs() < 1e-13, "{}", report.removed_mean);
        }
    }

    #[test]
    fn constant_rhs_is_removed_for_periodic_and_mixed() {
        let p = GridSpec::periodic(6, 1.0).unwrap();
        let ns = GridSpec::neumann(5, 1.0, GridKind::Regular).unwrap();
        for axes in [vec![p, p], vec![p, ns], vec![ns, p, p]] {
            let config = SolverConfig::new(axes, Approximation::PseudoSpectral).unwrap();
            let n = config.len();
            let plan = SolverPlan::<f64>::new(config.clone()).unwrap();
            let rhs = Field::from_vec(&config.extents(), vec![-1.5; n]).unwrap();
            let (sol, report) = plan.solve_field(&rhs.view()).unwrap();
            assert!(max_abs(&sol.to_vec()) < 1e-13);
            assert!((report.removed_mean + 1.5).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = GridSpec::periodic(4, 1.0).unwrap();
        let plan = SolverPlan::<f64>::new(
            SolverConfig::uniform(spec, 2, Approximation::PseudoSpectral).unwrap(),
        )
        .unwrap();
        let wrong = Field::<f64>::zeros(&[4, 5]).unwrap();
        assert!(matches!(
            plan.solve_field(&wrong.view()),
            Err(PoissonError::ExtentMismatch { .. })
        ));
        let mut bad = Field::<f64>::zeros(&[4, 4]).unwrap();
        bad.set(&[1, 2], f64::NAN);
        assert!(matches!(
            plan.solve_field(&bad.view()),
            Err(PoissonError::NonFinite { index: 6, .. })
        ));
        let mut out = Field::<f64>::zeros(&[4, 4]).unwrap();
        assert!(plan
            .solve_mixed(&Field::zeros(&[4, 4]).unwrap().view(), &mut out.view_mut())
            .is_err());
    }

    #[test]
    fn laplacian_examples() {
        let spec = GridSpec::dirichlet(4, 5.0, GridKind::Regular).unwrap();
        let config = SolverConfig::uniform(spec, 1, Approximation::FiniteDifference2).unwrap();
        let c = Field::from_vec(&[4], vec![3.0; 4]).unwrap();
        let lap = apply_discrete_laplacian(&config, &c.view()).unwrap();
        assert_eq!(lap.to_vec(), vec![-3.0, 0.0, 0.0, -3.0]);

        let ns = GridSpec::neumann(4, 1.0, GridKind::Regular).unwrap();
        let config = SolverConfig::uniform(ns, 2, Approximation::FiniteDifference2).unwrap();
        let c = Field::from_vec(&[4, 4], vec![1.0; 16]).unwrap();
        let lap = apply_discrete_laplacian(&config, &c.view()).unwrap();
        assert!(max_abs(&lap.to_vec()) < 1e-12);

        let spectral = SolverConfig::uniform(ns, 1, Approximation::PseudoSpectral).unwrap();
        assert!(apply_discrete_laplacian(&spectral, &Field::zeros(&[4]).unwrap().view()).is_err());
    }
}
