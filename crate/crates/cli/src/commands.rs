use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use poisson_core::flow::{divergence, FlowParams, FlowSolver, FlowState, StaggeredVelocity};
use poisson_core::verify::{run_suite, SuiteOptions};
use poisson_core::{Field, PoissonError, Real, SolveMode, SolverConfig, SolverPlan};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::args::{BenchArgs, CommonArgs, FlowArgs, GridArgs, InitArg, SolveArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::format::{read_field, write_field, AxisHeader, FieldData, FieldHeader, Precision, FORMAT_VERSION};
use crate::manifest::RunManifest;

fn output_dir(common: &CommonArgs) -> CliResult<Option<PathBuf>> {
    if common.format_version != FORMAT_VERSION {
        return Err(CliError::Config(format!(
            "--format-version {} is not supported (supported: {FORMAT_VERSION})",
            common.format_version
        )));
    }
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<PathBuf> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

fn try_zeroed<T: Clone>(len: usize, value: T) -> CliResult<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|e| CliError::Alloc(format!("{len} elements: {e}")))?;
    v.resize(len, value);
    Ok(v)
}

/// Deterministic part of a solve report (timings go to the manifest).
#[derive(Debug, Serialize)]
struct SolveSummary {
    removed_mean: f64,
    mode: SolveMode,
    axis_order: Vec<usize>,
    extents: Vec<usize>,
    precision: Precision,
}

fn solve_typed<T: Real>(config: &SolverConfig, values: Vec<T>) -> CliResult<(Vec<T>, poisson_core::SolveReport)> {
    let plan = SolverPlan::<T>::new(config.clone())?;
    let rhs = Field::from_vec(&config.extents(), values)?;
    let (solution, report) = plan.solve_field(&rhs.view())?;
    Ok((solution.into_vec(), report))
}

pub fn solve(args: &SolveArgs) -> CliResult<RunManifest> {
    let out = output_dir(&args.common)?.ok_or_else(|| CliError::Config("--out is required".into()))?;
    let (header, data) = read_field(&args.input)?;
    let config = args.grid.resolve(Some(&header.extents), header.axes.as_deref())?;
    if config.extents() != header.extents {
        return Err(CliError::Config(format!(
            "input extents {:?} do not match configured extents {:?}",
            header.extents,
            config.extents()
        )));
    }
    let precision = data.precision();
    let (solution, report) = match data {
        FieldData::F64(v) => {
            let (s, r) = solve_typed::<f64>(&config, v)?;
            (FieldData::F64(s), r)
        }
        FieldData::F32(v) => {
            let (s, r) = solve_typed::<f32>(&config, v)?;
            (FieldData::F32(s), r)
        }
    };
    let axes = config.axes().iter().map(AxisHeader::from_spec).collect();
    let mut outputs = write_field(&out.join("solution"), &FieldHeader::new(&config.extents(), Some(axes), precision), &solution)?;
    let summary = SolveSummary {
        removed_mean: report.removed_mean,
        mode: report.mode,
        axis_order: report.axis_order.clone(),
        extents: config.extents(),
        precision,
    };
    outputs.push(write_json(&out.join("report.json"), &summary)?);
    let mut manifest = RunManifest::new(
        "solve",
        json!({ "solver": config, "input": args.input, "grid_flags": args.grid, "timing": report.timing }),
        args.common.seed,
        args.common.threads,
    );
    manifest.outputs = outputs;
    manifest.outputs.push(out.join("manifest.json"));
    manifest.write(&out)?;
    Ok(manifest)
}

/// Runs the suite. Returns the JSON summary, the manifest and whether every
/// case passed; the caller prints the summary before reporting failure.
pub fn verify(args: &VerifyArgs) -> CliResult<(String, RunManifest, bool)> {
    let out = output_dir(&args.common)?;
    let options = SuiteOptions {
        bc: args.bc.map(Into::into),
        grid: args.grid.map(Into::into),
        approximation: args.approx.map(Into::into),
        seed: args.common.seed,
        fault_inject: args.fault_inject,
    };
    let summary = run_suite(&options);
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    let mut manifest = RunManifest::new("verify", serde_json::to_value(&options)?, args.common.seed, args.common.threads);
    if let Some(dir) = out {
        manifest.outputs.push(write_json(&dir.join("summary.json"), &summary)?);
        manifest.outputs.push(dir.join("manifest.json"));
        manifest.write(&dir)?;
    }
    Ok((text, manifest, summary.all_passed()))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Benchmark phases in CSV order; `other` is wall time outside the three
/// transform phases (copying in and out, validation).
pub const BENCH_PHASES: [&str; 5] = ["forward", "diagonal", "backward", "other", "total"];

pub fn bench(args: &BenchArgs) -> CliResult<(String, RunManifest)> {
    let out = output_dir(&args.common)?;
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be positive".into()));
    }
    if args.sizes.iter().any(|&s| s == 0) {
        return Err(CliError::Config("sizes must be positive".into()));
    }
    let dims = args.grid.dims.unwrap_or(2);
    let mut csv = String::from("size,phase,median,min,threads\n");
    let mut rng = StdRng::seed_from_u64(args.common.seed);
    let mut configs = Vec::new();
    for &size in &args.sizes {
        let grid = GridArgs {
            dims: Some(dims),
            size: vec![size],
            ..args.grid.clone()
        };
        let config = grid.resolve(None, None)?;
        let total = config
            .extents()
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| CliError::Alloc(format!("{size}^{dims} points overflow the address space")))?;
        // rhs, solution and the solver's complex work array
        try_zeroed::<u8>(total.saturating_mul(32), 0)?;
        let mut rhs = try_zeroed(total, 0.0f64)?;
        rhs.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let mut solution = try_zeroed(total, 0.0f64)?;
        let plan = SolverPlan::<f64>::new(config.clone())?;
        let rhs = Field::from_vec(&config.extents(), rhs)?;
        let layout = rhs.layout().clone();
        let mut run = || -> CliResult<[f64; 5]> {
            let mut view = poisson_core::FieldViewMut::new(&mut solution, &layout)?;
            let t = Instant::now();
            let report = plan.solve(&rhs.view(), &mut view)?;
            let wall = t.elapsed().as_secs_f64();
            let tm = report.timing;
            Ok([tm.forward, tm.diagonal, tm.backward, (wall - tm.total()).max(0.0), wall])
        };
        run()?;
        let samples = (0..args.reps).map(|_| run()).collect::<CliResult<Vec<_>>>()?;
        for (p, phase) in BENCH_PHASES.iter().enumerate() {
            let col: Vec<f64> = samples.iter().map(|s| s[p]).collect();
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            writeln!(csv, "{size},{phase},{:e},{:e},{}", median(col), min, args.common.threads).expect("string write");
        }
        configs.push(config);
    }
    let mut manifest = RunManifest::new(
        "bench",
        json!({ "solvers": configs, "sizes": args.sizes, "reps": args.reps, "grid_flags": args.grid }),
        args.common.seed,
        args.common.threads,
    );
    if let Some(dir) = out {
        let path = dir.join("bench.csv");
        fs::write(&path, &csv)?;
        manifest.outputs = vec![path, dir.join("manifest.json")];
        manifest.write(&dir)?;
    }
    Ok((csv, manifest))
}

fn write_snapshot(dir: &Path, state: &FlowState, outputs: &mut Vec<PathBuf>) -> CliResult<()> {
    let g = state.velocity.grid;
    let step = state.step;
    let parts: [(&str, [usize; 2], &Vec<f64>); 3] = [
        ("u", [g.nx, g.ny], &state.velocity.u),
        ("v", [g.nx, g.nvy()], &state.velocity.v),
        ("p", [g.nx, g.ny], &state.pressure.p),
    ];
    for (name, extents, data) in parts {
        let header = FieldHeader::new(&extents, None, Precision::F64);
        outputs.extend(write_field(&dir.join(format!("{name}_{step:06}")), &header, &FieldData::F64(data.clone()))?);
    }
    Ok(())
}

/// Header of the flow time-series CSV.
pub const SERIES_HEADER: &str = "step,time,kinetic_energy,max_divergence,relative_divergence,mean_u,mean_v,cfl";

pub fn demo_flow(args: &FlowArgs) -> CliResult<(String, RunManifest)> {
    let out = output_dir(&args.common)?;
    let case: poisson_core::flow::FlowCase = args.case.into();
    let (nx, ny) = match args.size.as_slice() {
        [n] => (*n, *n),
        [nx, ny] => (*nx, *ny),
        s => return Err(CliError::Config(format!("--size needs NX[,NY], got {s:?}"))),
    };
    let grid = case.grid(nx, ny)?;
    let dt = args.dt.unwrap_or(0.25 * grid.dx().min(grid.dy()));
    let forcing = match args.forcing.as_slice() {
        [] => case.driving_force(grid, args.nu),
        [fx] => [*fx, 0.0],
        [fx, fy] => [*fx, *fy],
        f => return Err(CliError::Config(format!("--forcing needs FX[,FY], got {f:?}"))),
    };
    let params = FlowParams { nu: args.nu, dt, forcing };
    let solver = FlowSolver::new(grid, params)?;
    let velocity = match args.init {
        InitArg::Case => case.initial_velocity(grid),
        InitArg::Zero => StaggeredVelocity::zeros(grid),
    };
    let mut state = FlowState::new(velocity);
    eprintln!("advisory CFL at t=0: {:.3e}", solver.cfl(&state.velocity));

    let mut csv = format!("{SERIES_HEADER}\n");
    let div0 = divergence(&state.velocity).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let u0 = state.velocity.max_abs();
    let (mu, mv) = state.velocity.mean();
    writeln!(
        csv,
        "0,0,{:e},{:e},{:e},{:e},{:e},{:e}",
        state.velocity.kinetic_energy(),
        div0,
        if u0 > 0.0 { div0 * grid.dx().min(grid.dy()) / u0 } else { 0.0 },
        mu,
        mv,
        solver.cfl(&state.velocity)
    )
    .expect("string write");

    let mut outputs = Vec::new();
    let snapshots = out.as_ref().filter(|_| args.snapshot_every > 0);
    if let Some(dir) = snapshots {
        write_snapshot(dir, &state, &mut outputs)?;
    }
    for _ in 0..args.steps {
        let d = solver.rk3_step(&mut state).map_err(|e| match e {
            PoissonError::Instability { step, detail } => CliError::Instability(format!("step {step}: {detail}")),
            other => other.into(),
        })?;
        writeln!(
            csv,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            d.step, d.time, d.kinetic_energy, d.max_divergence, d.relative_divergence, d.mean_u, d.mean_v, d.cfl
        )
        .expect("string write");
        if let Some(dir) = snapshots {
            if state.step % args.snapshot_every == 0 {
                write_snapshot(dir, &state, &mut outputs)?;
            }
        }
    }

    let mut manifest = RunManifest::new(
        "demo-flow",
        json!({
            "case": args.case,
            "grid": grid,
            "params": params,
            "steps": args.steps,
            "init": args.init,
            "snapshot_every": args.snapshot_every,
        }),
        args.common.seed,
        args.common.threads,
    );
    if let Some(dir) = out {
        let path = dir.join("series.csv");
        fs::write(&path, &csv)?;
        outputs.push(path);
        outputs.push(dir.join("manifest.json"));
        manifest.outputs = outputs;
        manifest.write(&dir)?;
    }
    Ok((csv, manifest))
}
