//! Self-checking suite run by `fastpoisson verify`: transform round trips,
//! fast-versus-naive transforms, dense-versus-fast solves, eigenvector
//! checks and convergence orders over every supported boundary row.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::eigen::{eigenvalues, mode_shape};
use crate::error::Result;
use crate::field::Field;
use crate::grid::{Approximation, BoundaryCondition, GridKind, GridSpec};
use crate::solver::{SolverConfig, SolverPlan};
use crate::stencil::dense_matrix;
use crate::transforms::naive::{naive_complex, naive_real};
use crate::transforms::{transform_pair_for, ComplexTransform, RealTransform, TransformKind};
use crate::verify::dense::dense_oracle_solve;
use crate::verify::mms::{convergence_order, mms_error, ManufacturedCase, Profile};

/// The five supported (boundary condition, grid) rows.
pub const ROWS: [(BoundaryCondition, GridKind); 5] = [
    (BoundaryCondition::Periodic, GridKind::Regular),
    (BoundaryCondition::Dirichlet, GridKind::Regular),
    (BoundaryCondition::Dirichlet, GridKind::Staggered),
    (BoundaryCondition::Neumann, GridKind::Regular),
    (BoundaryCondition::Neumann, GridKind::Staggered),
];

const ROUND_TRIP_SIZES: [usize; 11] = [2, 3, 4, 5, 8, 16, 17, 64, 127, 128, 257];
const CONVERGENCE_SIZES: [usize; 4] = [16, 32, 64, 128];
const FAULT_FACTOR: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub bc: Option<BoundaryCondition>,
    pub grid: Option<GridKind>,
    pub approximation: Option<Approximation>,
    pub seed: u64,
    /// Scales one eigenvalue of every solver plan by `1 + 1e-6`; the suite
    /// must then report failures.
    pub fault_inject: bool,
}

impl SuiteOptions {
    fn row_selected(&self, bc: BoundaryCondition, grid: GridKind) -> bool {
        self.bc.is_none_or(|b| b == bc) && self.grid.is_none_or(|g| g == grid)
    }

    fn approx_selected(&self, a: Approximation) -> bool {
        self.approximation.is_none_or(|x| x == a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub suite: String,
    pub name: String,
    /// Transforms exercised, e.g. `["DST-II", "DST-III"]`.
    pub transforms: Vec<String>,
    pub passed: bool,
    pub metric: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<CaseResult>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn row_name(bc: BoundaryCondition, grid: GridKind) -> String {
    let b = match bc {
        BoundaryCondition::Periodic => "periodic",
        BoundaryCondition::Dirichlet => "dirichlet",
        BoundaryCondition::Neumann => "neumann",
    };
    let g = match grid {
        GridKind::Regular => "regular",
        GridKind::Staggered => "staggered",
    };
    format!("{b}/{g}")
}

fn approx_name(a: Approximation) -> &'static str {
    match a {
        Approximation::PseudoSpectral => "spectral",
        Approximation::FiniteDifference2 => "fd2",
    }
}

fn spec_for(bc: BoundaryCondition, grid: GridKind, n: usize, length: f64) -> Result<GridSpec> {
    GridSpec::new(n, length, grid, bc)
}

/// Largest absolute difference relative to the largest magnitude of `b`.
pub fn relative_max_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

struct Collector {
    cases: Vec<CaseResult>,
}

impl Collector {
    fn push(&mut self, suite: &str, name: String, transforms: &[TransformKind], metric: f64, tolerance: f64) {
        self.cases.push(CaseResult {
            suite: suite.into(),
            name,
            transforms: transforms.iter().map(|k| k.name().to_string()).collect(),
            passed: metric.is_finite() && metric <= tolerance,
            metric,
            tolerance,
        });
    }
}

/// Worst round-trip error `max|b(f(x)) - x| / (n·max|x|)` over random lines.
pub fn round_trip_error(bc: BoundaryCondition, grid: GridKind, n: usize, rng: &mut impl Rng) -> Result<f64> {
    let pair = transform_pair_for(bc, grid)?;
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let back = if pair.forward.is_complex() {
        let fwd = ComplexTransform::<f64>::new(pair.forward, n)?;
        let bwd = ComplexTransform::<f64>::new(pair.backward, n)?;
        let mut line: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.execute(&mut line)?;
        bwd.execute(&mut line)?;
        line.iter().map(|c| c.re).collect::<Vec<_>>()
    } else {
        let fwd = RealTransform::<f64>::new(pair.forward, n)?;
        let bwd = RealTransform::<f64>::new(pair.backward, n)?.scaled(pair.backward_scale(n));
        bwd.apply(&fwd.apply(&x)?)?
    };
    Ok(relative_max_diff(&back, &x) / n as f64)
}

/// Worst `max|fast - naive| / (n·max|x|)` for one transform kind.
pub fn fast_vs_naive_error(kind: TransformKind, n: usize, rng: &mut impl Rng) -> Result<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let diff = if kind.is_complex() {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, -0.5 * v)).collect();
        let mut fast = z.clone();
        ComplexTransform::<f64>::new(kind, n)?.execute(&mut fast)?;
        let slow = naive_complex(kind, &z)?;
        fast.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    } else {
        let fast = RealTransform::<f64>::new(kind, n)?.apply(&x)?;
        let slow = naive_real(kind, &x)?;
        fast.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    Ok(diff / (n as f64 * xmax))
}

/// Worst `|A v_k - λ_k v_k|` over k, relative to `max|λ|·max|v_k|`, for the
/// dense FD2 matrix of `spec`.
pub fn fd2_eigen_consistency(spec: &GridSpec) -> Result<f64> {
    let a = dense_matrix(spec);
    let table = eigenvalues(spec, Approximation::FiniteDifference2)?;
    let lmax = table.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (k, &lambda) in table.values.iter().enumerate() {
        let v = mode_shape(spec, k);
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (row, &vi) in a.iter().zip(&v) {
            let av: f64 = row.iter().zip(&v).map(|(c, x)| c * x).sum();
            worst = worst.max((av - lambda * vi).abs() / (lmax * vmax));
        }
    }
    Ok(worst)
}

/// Mode profile whose sampled values form basis vector `k` of the axis.
pub fn mode_profile(spec: &GridSpec, k: usize) -> Profile {
    match spec.bc() {
        BoundaryCondition::Periodic => Profile::Fourier(k),
        BoundaryCondition::Dirichlet => Profile::Sine(k + 1),
        BoundaryCondition::Neumann => Profile::Cosine(k),
    }
}

/// Mode indices representable without aliasing on the axis.
pub fn mode_range(spec: &GridSpec) -> std::ops::Range<usize> {
    match spec.bc() {
        BoundaryCondition::Periodic => 0..spec.n() / 2 + 1,
        _ => 0..spec.n(),
    }
}

fn build_plan(config: SolverConfig, fault: bool) -> Result<SolverPlan<f64>> {
    let mut plan = SolverPlan::new(config)?;
    if fault {
        let idx = (0..plan.eigenvalues().len())
            .find(|i| !plan.null_modes().contains(i))
            .unwrap_or(0);
        plan.perturb_eigenvalue(idx, FAULT_FACTOR);
    }
    Ok(plan)
}

/// Relative difference between the fast solve and the dense oracle on a
/// random right-hand side.
pub fn dense_equivalence_error(plan: &SolverPlan<f64>, rng: &mut impl Rng) -> Result<f64> {
    let extents = plan.extents().to_vec();
    let rhs = Field::from_fn(&extents, |_| rng.gen_range(-1.0..1.0))?;
    let (fast, report) = plan.solve_field(&rhs.view())?;
    let dense = dense_oracle_solve(plan.config(), &rhs.view())?;
    let mean_err = (report.removed_mean - dense.removed_mean).abs();
    Ok(relative_max_diff(&fast.to_vec(), &dense.solution.to_vec()).max(mean_err))
}

fn transforms_of(config: &SolverConfig) -> Vec<TransformKind> {
    let mut out = Vec::new();
    for s in config.axes() {
        if let Ok(p) = transform_pair_for(s.bc(), s.kind()) {
            for k in [p.forward, p.backward] {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// Runs every selected case. Errors from individual cases are recorded as
/// failures rather than aborting the run.
pub fn run_suite(options: &SuiteOptions) -> SuiteSummary {
    let mut rng = StdRng::seed_from_u64(options.seed);
    let mut c = Collector { cases: Vec::new() };
    let fault = options.fault_inject;

    for &(bc, grid) in ROWS.iter().filter(|(b, g)| options.row_selected(*b, *g)) {
        let row = row_name(bc, grid);
        let pair = match transform_pair_for(bc, grid) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let kinds = [pair.forward, pair.backward];

        let worst = ROUND_TRIP_SIZES
            .iter()
            .map(|&n| round_trip_error(bc, grid, n, &mut rng).unwrap_or(f64::INFINITY))
            .fold(0.0f64, f64::max);
        c.push("round-trip", format!("{row} n=2..257"), &kinds, worst, 1e-12);

        for kind in kinds {
            let worst = (kind.min_len()..=64)
                .map(|n| fast_vs_naive_error(kind, n, &mut rng).unwrap_or(f64::INFINITY))
                .fold(0.0f64, f64::max);
            c.push("oracle-transform", format!("{} n<=64", kind.name()), &[kind], worst, 1e-11);
        }

        for approx in [Approximation::PseudoSpectral, Approximation::FiniteDifference2] {
            if !options.approx_selected(approx) {
                continue;
            }
            let tag = format!("{row} {}", approx_name(approx));
            run_row_solver_cases(&mut c, bc, grid, approx, &tag, &kinds, fault, &mut rng);
        }
    }

    // Mixed configurations involve a periodic axis, so they run only when no
    // boundary filter narrows the selection.
    if options.bc.is_none() {
        for &(bc, grid) in ROWS.iter().skip(1).filter(|(_, g)| options.grid.is_none_or(|x| x == *g)) {
            for approx in [Approximation::PseudoSpectral, Approximation::FiniteDifference2] {
                if options.approx_selected(approx) {
                    run_mixed_cases(&mut c, bc, grid, approx, fault, &mut rng);
                }
            }
        }
    }

    let total = c.cases.len();
    let passed = c.cases.iter().filter(|r| r.passed).count();
    SuiteSummary {
        total,
        passed,
        failed: total - passed,
        cases: c.cases,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_row_solver_cases(
    c: &mut Collector,
    bc: BoundaryCondition,
    grid: GridKind,
    approx: Approximation,
    tag: &str,
    kinds: &[TransformKind],
    fault: bool,
    rng: &mut StdRng,
) {
    let length = 1.7;
    // Eigenvector: the solve must return the sampled mode divided by its eigenvalue.
    let metric = (|| -> Result<f64> {
        let spec = spec_for(bc, grid, 16, length)?;
        let plan = build_plan(SolverConfig::uniform(spec, 1, approx)?, fault)?;
        let mut worst = 0.0f64;
        for k in mode_range(&spec) {
            let profile = mode_profile(&spec, k);
            let case = match approx {
                Approximation::PseudoSpectral => ManufacturedCase::analytic(vec![profile], "mode"),
                Approximation::FiniteDifference2 => ManufacturedCase::discrete_eigenmode(vec![profile], "mode")?,
            };
            let e = mms_error(&plan, &case)?;
            worst = worst.max(e.max / e.scale.max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    })()
    .unwrap_or(f64::INFINITY);
    c.push("eigenvector", format!("{tag} n=16 all k"), kinds, metric, 1e-12);

    if approx == Approximation::FiniteDifference2 {
        let metric = (|| -> Result<f64> {
            let mut worst = 0.0f64;
            for n in 1..=16 {
                if let Ok(spec) = spec_for(bc, grid, n, length) {
                    worst = worst.max(fd2_eigen_consistency(&spec)?);
                }
            }
            Ok(worst)
        })()
        .unwrap_or(f64::INFINITY);
        c.push("eigen-consistency", format!("{tag} n<=16"), kinds, metric, 1e-10);

        for dims in [1, 2] {
            let metric = (|| -> Result<f64> {
                let mut worst = 0.0f64;
                for n in [2, 3, 5, 8] {
                    let spec = spec_for(bc, grid, n, length)?;
                    let plan = build_plan(SolverConfig::uniform(spec, dims, approx)?, fault)?;
                    worst = worst.max(dense_equivalence_error(&plan, rng)?);
                }
                Ok(worst)
            })()
            .unwrap_or(f64::INFINITY);
            c.push("oracle-solve", format!("{tag} d={dims} n<=8"), kinds, metric, 1e-9);
        }

        let metric = (|| -> Result<f64> {
            let spec = spec_for(bc, grid, 16, length)?;
            let config = SolverConfig::uniform(spec, 1, approx)?;
            let report = convergence_order(&config, &CONVERGENCE_SIZES, &ManufacturedCase::smooth_for(config.axes()))?;
            Ok((report.finest_order().unwrap_or(0.0) - 2.0).abs())
        })()
        .unwrap_or(f64::INFINITY);
        c.push("convergence", format!("{tag} |p-2| sizes 16..128"), kinds, metric, 0.1);
    } else {
        let metric = (|| -> Result<f64> {
            let spec = spec_for(bc, grid, 12, length)?;
            let plan = build_plan(SolverConfig::uniform(spec, 2, approx)?, fault)?;
            let case = ManufacturedCase::analytic(vec![mode_profile(&spec, 1), mode_profile(&spec, 3)], "product mode");
            let e = mms_error(&plan, &case)?;
            Ok(e.max / e.scale)
        })()
        .unwrap_or(f64::INFINITY);
        c.push("eigenvector", format!("{tag} d=2 product mode"), kinds, metric, 1e-12);
    }
}

fn run_mixed_cases(
    c: &mut Collector,
    bc: BoundaryCondition,
    grid: GridKind,
    approx: Approximation,
    fault: bool,
    rng: &mut StdRng,
) {
    let tag = format!("periodic x {} {}", row_name(bc, grid), approx_name(approx));
    let axes = |n: usize| -> Result<Vec<GridSpec>> { Ok(vec![GridSpec::periodic(n, 2.0)?, spec_for(bc, grid, n, 1.3)?]) };
    let kinds = axes(4)
        .and_then(|a| SolverConfig::new(a, approx))
        .map(|cfg| transforms_of(&cfg))
        .unwrap_or_default();
    let metric = (|| -> Result<f64> {
        let ax = axes(12)?;
        let plan = build_plan(SolverConfig::new(ax.clone(), approx)?, fault)?;
        let profiles = vec![mode_profile(&ax[0], 2), mode_profile(&ax[1], 3)];
        let case = match approx {
            Approximation::PseudoSpectral => ManufacturedCase::analytic(profiles, "product mode"),
            Approximation::FiniteDifference2 => ManufacturedCase::discrete_eigenmode(profiles, "product mode")?,
        };
        let e = mms_error(&plan, &case)?;
        Ok(e.max / e.scale)
    })()
    .unwrap_or(f64::INFINITY);
    c.push("mixed", format!("{tag} product mode"), &kinds, metric, 1e-12);

    if approx == Approximation::FiniteDifference2 {
        let metric = (|| -> Result<f64> {
            let mut worst = 0.0f64;
            for n in [3, 6, 8] {
                let plan = build_plan(SolverConfig::new(axes(n)?, approx)?, fault)?;
                worst = worst.max(dense_equivalence_error(&plan, rng)?);
            }
            Ok(worst)
        })()
        .unwrap_or(f64::INFINITY);
        c.push("oracle-solve", format!("{tag} n<=8"), &kinds, metric, 1e-9);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes_and_covers_every_row() {
        let summary = run_suite(&SuiteOptions::default());
        for case in summary.cases.iter().filter(|c| !c.passed) {
            eprintln!("{case:?}");
        }
        assert!(summary.all_passed());
        let eigen_cases = summary
            .cases
            .iter()
            .filter(|c| c.suite == "eigenvector" && c.name.contains("n=16"))
            .count();
        assert_eq!(eigen_cases, 10);
    }

    #[test]
    fn filter_restricts_transforms() {
        let options = SuiteOptions {
            bc: Some(BoundaryCondition::Dirichlet),
            grid: Some(GridKind::Staggered),
            ..Default::default()
        };
        let summary = run_suite(&options);
        assert!(summary.total > 0);
        for case in &summary.cases {
            for t in &case.transforms {
                assert!(t == "DST-II" || t == "DST-III", "{case:?}");
            }
        }
    }

    #[test]
    fn fault_injection_is_detected() {
        let options = SuiteOptions {
            fault_inject: true,
            approximation: Some(Approximation::FiniteDifference2),
            bc: Some(BoundaryCondition::Neumann),
            ..Default::default()
        };
        let summary = run_suite(&options);
        assert!(!summary.all_passed());
    }
}
