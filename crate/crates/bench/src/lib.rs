//! Fixtures shared by the criterion benches and the timing tests.

use std::time::Instant;

use poisson_core::reorder::{gather_lines, scatter_lines, ReorderPlan};
use poisson_core::{Approximation, Field, GridKind, GridSpec, SolverConfig, SolverPlan};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn random_field(extents: &[usize], seed: u64) -> Field<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    Field::from_fn(extents, |_| rng.gen_range(-1.0..1.0)).expect("valid extents")
}

/// Fully periodic pseudo-spectral plan with `n` points per axis.
pub fn periodic_plan(n: usize, dims: usize) -> SolverPlan<f64> {
    let spec = GridSpec::periodic(n, 1.0).expect("valid grid");
    SolverPlan::new(SolverConfig::uniform(spec, dims, Approximation::PseudoSpectral).expect("valid config"))
        .expect("plan")
}

/// Periodic x and y with staggered Neumann z, FD2: the pressure problem of a
/// channel flow.
pub fn channel_plan(n: usize) -> SolverPlan<f64> {
    let axes = vec![
        GridSpec::periodic(n, 1.0).expect("valid grid"),
        GridSpec::periodic(n, 1.0).expect("valid grid"),
        GridSpec::neumann(n, 1.0, GridKind::Staggered).expect("valid grid"),
    ];
    SolverPlan::new(SolverConfig::new(axes, Approximation::FiniteDifference2).expect("valid config")).expect("plan")
}

/// Smallest observed gather-plus-scatter time per element, in seconds.
pub fn reorder_seconds_per_element(extents: &[usize], axis: usize, reps: usize) -> f64 {
    let field = random_field(extents, 1);
    let mut copy = field.clone();
    let plan = ReorderPlan::new(field.layout(), axis).expect("plan");
    let mut buffer = vec![0.0; plan.buffer_len()];
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        gather_lines(&plan, &field.view(), &mut buffer).expect("gather");
        scatter_lines(&plan, &buffer, &mut copy.view_mut()).expect("scatter");
        best = best.min(t.elapsed().as_secs_f64());
    }
    assert_eq!(copy.as_slice(), field.as_slice());
    best / field.as_slice().len() as f64
}
