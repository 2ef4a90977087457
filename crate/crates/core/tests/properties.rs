use poisson_core::reorder::{gather_lines, scatter_lines, ReorderPlan};
use poisson_core::verify::mms::{convergence_order, ManufacturedCase};
use poisson_core::verify::suite::{round_trip_error, ROWS};
use poisson_core::{
    Approximation, BoundaryCondition, Field, GridKind, GridSpec, Layout, SolverConfig, SolverPlan,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn row_strategy() -> impl Strategy<Value = (BoundaryCondition, GridKind)> {
    (0..ROWS.len()).prop_map(|i| ROWS[i])
}

fn approx_strategy() -> impl Strategy<Value = Approximation> {
    prop_oneof![Just(Approximation::PseudoSpectral), Just(Approximation::FiniteDifference2)]
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn config(bc: BoundaryCondition, grid: GridKind, extents: &[usize], approx: Approximation) -> SolverConfig {
    let axes = extents
        .iter()
        .enumerate()
        .map(|(a, &n)| GridSpec::new(n, 1.0 + 0.3 * a as f64, grid, bc).unwrap())
        .collect();
    SolverConfig::new(axes, approx).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip((bc, grid) in row_strategy(), n in 2usize..80, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = round_trip_error(bc, grid, n, &mut rng).unwrap();
        prop_assert!(e <= 1e-12, "{e}");
    }

    #[test]
    fn solve_is_linear(
        (bc, grid) in row_strategy(),
        approx in approx_strategy(),
        nx in 2usize..9,
        ny in 2usize..9,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        f in prop::collection::vec(-1.0f64..1.0, 64),
        g in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let cfg = config(bc, grid, &[nx, ny], approx);
        let plan = SolverPlan::<f64>::new(cfg).unwrap();
        let len = nx * ny;
        let ff = Field::from_vec(&[nx, ny], f[..len].to_vec()).unwrap();
        let gg = Field::from_vec(&[nx, ny], g[..len].to_vec()).unwrap();
        let comb: Vec<f64> = f[..len].iter().zip(&g[..len]).map(|(x, y)| a * x + b * y).collect();
        let cc = Field::from_vec(&[nx, ny], comb).unwrap();
        let (sf, _) = plan.solve_field(&ff.view()).unwrap();
        let (sg, _) = plan.solve_field(&gg.view()).unwrap();
        let (sc, _) = plan.solve_field(&cc.view()).unwrap();
        let expect: Vec<f64> = sf.as_slice().iter().zip(sg.as_slice()).map(|(x, y)| a * x + b * y).collect();
        let scale = max_abs(&expect).max(max_abs(sf.as_slice())).max(max_abs(sg.as_slice())).max(1e-300);
        prop_assert!(max_diff(sc.as_slice(), &expect) <= 1e-12 * scale * (a.abs() + b.abs() + 1.0));
    }

    #[test]
    fn periodic_solve_commutes_with_shifts(
        approx in approx_strategy(),
        nx in 2usize..12,
        ny in 2usize..12,
        sx in 0usize..12,
        sy in 0usize..12,
        f in prop::collection::vec(-1.0f64..1.0, 144),
    ) {
        let cfg = config(BoundaryCondition::Periodic, GridKind::Regular, &[nx, ny], approx);
        let plan = SolverPlan::<f64>::new(cfg).unwrap();
        let rhs = Field::from_fn(&[nx, ny], |i| f[i[0] * ny + i[1]]).unwrap();
        let shifted = Field::from_fn(&[nx, ny], |i| rhs.get(&[(i[0] + sx) % nx, (i[1] + sy) % ny])).unwrap();
        let (a, _) = plan.solve_field(&rhs.view()).unwrap();
        let (b, _) = plan.solve_field(&shifted.view()).unwrap();
        let a_shift = Field::from_fn(&[nx, ny], |i| a.get(&[(i[0] + sx) % nx, (i[1] + sy) % ny])).unwrap();
        prop_assert!(max_diff(b.as_slice(), a_shift.as_slice()) <= 1e-12 * max_abs(a.as_slice()).max(1e-300));
    }

    #[test]
    fn sub_block_solve_matches_tight_solve(
        (bc, grid) in row_strategy(),
        approx in approx_strategy(),
        nx in 2usize..8,
        ny in 2usize..8,
        ox in 0usize..3,
        oy in 0usize..3,
        f in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let cfg = config(bc, grid, &[nx, ny], approx);
        let plan = SolverPlan::<f64>::new(cfg).unwrap();
        let tight = Field::from_vec(&[nx, ny], f[..nx * ny].to_vec()).unwrap();
        let parent = [nx + ox + 2, ny + oy + 2];
        let layout = Layout::sub_block(&parent, &[ox, oy], &[nx, ny]).unwrap();
        let mut padded = Field::with_layout(vec![f64::NAN; parent[0] * parent[1]], layout.clone()).unwrap();
        padded.view_mut().copy_from_slice(tight.as_slice());
        let (expect, _) = plan.solve_field(&tight.view()).unwrap();
        plan.solve_in_place(&mut padded.view_mut()).unwrap();
        let got = padded.to_vec();
        prop_assert!(max_diff(&got, expect.as_slice()) <= 1e-14 * max_abs(expect.as_slice()).max(1e-300));
        // ghost cells untouched
        let mut inside = vec![false; parent[0] * parent[1]];
        layout.for_each_flat(|k| inside[k] = true);
        for (k, v) in padded.as_slice().iter().enumerate() {
            if !inside[k] {
                prop_assert!(v.is_nan());
            }
        }
    }

    #[test]
    fn scatter_after_gather_is_identity(
        e0 in 1usize..18,
        e1 in 1usize..20,
        e2 in 1usize..24,
        axis in 0usize..3,
        tile_pick in 0usize..4,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let tile = [1, 4, 16, 64][tile_pick];
        let mut rng = StdRng::seed_from_u64(seed);
        let f = Field::from_fn(&[e0, e1, e2], |_| rng.gen::<f64>()).unwrap();
        let plan = ReorderPlan::with_tile(f.layout(), axis, tile).unwrap();
        let mut buf = vec![0.0; plan.buffer_len()];
        gather_lines(&plan, &f.view(), &mut buf).unwrap();
        let mut g = Field::zeros(&[e0, e1, e2]).unwrap();
        scatter_lines(&plan, &buf, &mut g.view_mut()).unwrap();
        prop_assert_eq!(f.as_slice(), g.as_slice());
        let reference = ReorderPlan::with_tile(f.layout(), axis, 1).unwrap();
        let mut buf1 = vec![0.0; plan.buffer_len()];
        gather_lines(&reference, &f.view(), &mut buf1).unwrap();
        prop_assert_eq!(buf, buf1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn convergence_order_ignores_size_order(perm in Just(vec![16usize, 32, 64]).prop_shuffle()) {
        let spec = GridSpec::neumann(16, 1.0, GridKind::Staggered).unwrap();
        let cfg = SolverConfig::uniform(spec, 1, Approximation::FiniteDifference2).unwrap();
        let case = ManufacturedCase::smooth_for(cfg.axes());
        let a = convergence_order(&cfg, &perm, &case).unwrap();
        let b = convergence_order(&cfg, &[16, 32, 64], &case).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn concurrent_solves_on_a_shared_plan_match_sequential() {
    use rand::Rng;
    let cfg = config(BoundaryCondition::Neumann, GridKind::Staggered, &[24, 20], Approximation::FiniteDifference2);
    let plan = SolverPlan::<f64>::new(cfg).unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    let inputs: Vec<Field<f64>> = (0..8)
        .map(|_| Field::from_fn(&[24, 20], |_| rng.gen_range(-1.0..1.0)).unwrap())
        .collect();
    let sequential: Vec<Vec<f64>> = inputs
        .iter()
        .map(|f| plan.solve_field(&f.view()).unwrap().0.into_vec())
        .collect();
    let parallel: Vec<Vec<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .iter()
            .map(|f| s.spawn(|| plan.solve_field(&f.view()).unwrap().0.into_vec()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, parallel);
}

#[test]
fn single_precision_tracks_double() {
    for &(bc, grid) in ROWS.iter() {
        let cfg = config(bc, grid, &[16, 12], Approximation::PseudoSpectral);
        let p64 = SolverPlan::<f64>::new(cfg.clone()).unwrap();
        let p32 = SolverPlan::<f32>::new(cfg).unwrap();
        let f64_rhs = Field::from_fn(&[16, 12], |i| ((i[0] * 7 + i[1] * 3) % 11) as f64 / 11.0 - 0.5).unwrap();
        let f32_rhs = Field::from_vec(&[16, 12], f64_rhs.as_slice().iter().map(|&x| x as f32).collect()).unwrap();
        let (a, _) = p64.solve_field(&f64_rhs.view()).unwrap();
        let (b, _) = p32.solve_field(&f32_rhs.view()).unwrap();
        let b64: Vec<f64> = b.as_slice().iter().map(|&x| x as f64).collect();
        let err = max_diff(&b64, a.as_slice()) / max_abs(a.as_slice());
        assert!(err < 1e-5, "{bc:?}/{grid:?}: {err}");
    }
}

#[test]
fn three_dimensional_mixed_solve_inverts_the_operator() {
    let axes = vec![
        GridSpec::dirichlet(6, 1.0, GridKind::Staggered).unwrap(),
        GridSpec::periodic(5, 2.0).unwrap(),
        GridSpec::dirichlet(7, 1.5, GridKind::Staggered).unwrap(),
    ];
    for approx in [Approximation::PseudoSpectral, Approximation::FiniteDifference2] {
        let plan = SolverPlan::<f64>::new(SolverConfig::new(axes.clone(), approx).unwrap()).unwrap();
        let phi = Field::from_fn(&[6, 5, 7], |i| ((i[0] * 13 + i[1] * 5 + i[2] * 3) % 17) as f64 - 8.0).unwrap();
        let g = plan.apply_operator(&phi.view()).unwrap();
        let (back, _) = plan.solve_field(&g.view()).unwrap();
        assert!(max_diff(back.as_slice(), phi.as_slice()) <= 1e-12 * max_abs(phi.as_slice()));
    }
}
