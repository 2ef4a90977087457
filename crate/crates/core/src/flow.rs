//! Two-dimensional incompressible flow on a staggered grid, advanced with a
//! three-stage Runge–Kutta projection scheme whose pressure correction is
//! solved with the FD2 Poisson solver.
//!
//! Layout: `p` at cell centres `[nx, ny]`, `u` on x-faces `[nx, ny]` (face `i`
//! is the left face of cell `i`), `v` on y-faces `[nx, nvy]` with face `j` the
//! bottom face of cell `j`. With walls in y, `nvy = ny + 1` and the two
//! boundary rows stay zero; otherwise `nvy = ny`.

use std::f64::consts::PI;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{PoissonError, Result};
use crate::field::Field;
use crate::grid::{Approximation, GridKind, GridSpec};
use crate::solver::{SolverConfig, SolverPlan};

/// Low-storage RK3 coefficients, stored as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rk3Coefficients {
    pub alpha: [Ratio<i64>; 3],
    pub gamma: [Ratio<i64>; 3],
    pub zeta: [Ratio<i64>; 3],
}

impl Default for Rk3Coefficients {
    fn default() -> Self {
        let r = Ratio::new;
        Self {
            alpha: [r(8, 15), r(2, 15), r(1, 3)],
            gamma: [r(8, 15), r(5, 12), r(3, 4)],
            zeta: [r(0, 1), r(-17, 60), r(-5, 12)],
        }
    }
}

impl Rk3Coefficients {
    pub fn alpha_sum(&self) -> Ratio<i64> {
        self.alpha.iter().sum()
    }

    /// `Σα = 1` and `γ_k + ζ_k = α_k` for every stage, exactly.
    pub fn is_consistent(&self) -> bool {
        self.alpha_sum() == Ratio::from_integer(1)
            && (0..3).all(|k| self.gamma[k] + self.zeta[k] == self.alpha[k])
    }

    fn as_f64(r: Ratio<i64>) -> f64 {
        r.to_f64().expect("small rational")
    }

    pub fn stage(&self, k: usize) -> (f64, f64, f64) {
        (
            Self::as_f64(self.alpha[k]),
            Self::as_f64(self.gamma[k]),
            Self::as_f64(self.zeta[k]),
        )
    }
}

/// Uniform cell grid, periodic in x, periodic or walled in y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub walls: bool,
}

impl FlowGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, walls: bool) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(PoissonError::InvalidGrid(format!("flow grid needs at least 2x2 cells, got {nx}x{ny}")));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(PoissonError::InvalidGrid(format!("invalid domain {lx} x {ly}")));
        }
        Ok(Self { nx, ny, lx, ly, walls })
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Number of y-faces per column.
    pub fn nvy(&self) -> usize {
        if self.walls {
            self.ny + 1
        } else {
            self.ny
        }
    }

    /// Pressure Poisson configuration matching the staggered operators.
    pub fn pressure_config(&self) -> Result<SolverConfig> {
        let y = if self.walls {
            GridSpec::neumann(self.ny, self.ly, GridKind::Staggered)?
        } else {
            GridSpec::periodic(self.ny, self.ly)?
        };
        SolverConfig::new(
            vec![GridSpec::periodic(self.nx, self.lx)?, y],
            Approximation::FiniteDifference2,
        )
    }

    #[inline]
    fn xp(&self, i: usize) -> usize {
        (i + 1) % self.nx
    }

    #[inline]
    fn xm(&self, i: usize) -> usize {
        (i + self.nx - 1) % self.nx
    }
}

/// Face-centred velocity components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaggeredVelocity {
    pub grid: FlowGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl StaggeredVelocity {
    pub fn zeros(grid: FlowGrid) -> Self {
        Self {
            grid,
            u: vec![0.0; grid.nx * grid.ny],
            v: vec![0.0; grid.nx * grid.nvy()],
        }
    }

    /// Velocity `(∂ψ/∂y, -∂ψ/∂x)` of a streamfunction sampled at cell corners;
    /// discretely divergence-free by construction.
    pub fn from_streamfunction(grid: FlowGrid, psi: impl Fn(f64, f64) -> f64) -> Self {
        let (dx, dy) = (grid.dx(), grid.dy());
        let corner = |i: usize, j: usize| psi(i as f64 * dx, j as f64 * dy);
        let mut out = Self::zeros(grid);
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                out.u[i * grid.ny + j] = (corner(i, j + 1) - corner(i, j)) / dy;
            }
            let nvy = grid.nvy();
            for j in 0..nvy {
                let boundary = grid.walls && (j == 0 || j == grid.ny);
                out.v[i * nvy + j] = if boundary {
                    0.0
                } else {
                    -(corner(i + 1, j) - corner(i, j)) / dx
                };
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `½ Σ (u² + v²) ΔxΔy` over faces.
    pub fn kinetic_energy(&self) -> f64 {
        let s: f64 = self.u.iter().chain(&self.v).map(|x| x * x).sum();
        0.5 * s * self.grid.dx() * self.grid.dy()
    }

    pub fn mean(&self) -> (f64, f64) {
        let mu = self.u.iter().sum::<f64>() / self.u.len() as f64;
        let mv = self.v.iter().sum::<f64>() / self.v.len() as f64;
        (mu, mv)
    }

    fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

/// Cell-centred kinematic pressure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureField {
    pub grid: FlowGrid,
    pub p: Vec<f64>,
}

impl PressureField {
    pub fn zeros(grid: FlowGrid) -> Self {
        Self {
            grid,
            p: vec![0.0; grid.nx * grid.ny],
        }
    }
}

/// Cell-centred divergence, row-major `[nx, ny]`.
pub fn divergence(vel: &StaggeredVelocity) -> Vec<f64> {
    let g = vel.grid;
    let (dx, dy, nvy) = (g.dx(), g.dy(), g.nvy());
    let mut out = vec![0.0; g.nx * g.ny];
    for i in 0..g.nx {
        for j in 0..g.ny {
            let jt = if g.walls { j + 1 } else { (j + 1) % g.ny };
            out[i * g.ny + j] = (vel.u[g.xp(i) * g.ny + j] - vel.u[i * g.ny + j]) / dx
                + (vel.v[i * nvy + jt] - vel.v[i * nvy + j]) / dy;
        }
    }
    out
}

/// Face-centred gradient of a cell-centred scalar. Wall faces get zero.
pub fn gradient(grid: FlowGrid, p: &[f64]) -> StaggeredVelocity {
    let (dx, dy, ny, nvy) = (grid.dx(), grid.dy(), grid.ny, grid.nvy());
    let mut out = StaggeredVelocity::zeros(grid);
    for i in 0..grid.nx {
        for j in 0..ny {
            out.u[i * ny + j] = (p[i * ny + j] - p[grid.xm(i) * ny + j]) / dx;
        }
        for j in 0..nvy {
            out.v[i * nvy + j] = if grid.walls {
                if j == 0 || j == ny {
                    0.0
                } else {
                    (p[i * ny + j] - p[i * ny + j - 1]) / dy
                }
            } else {
                (p[i * ny + j] - p[i * ny + (j + ny - 1) % ny]) / dy
            };
        }
    }
    out
}

// u·v at the corner (i Δx, j Δy); zero on walls.
fn corner_flux(vel: &StaggeredVelocity, i: usize, j: usize) -> f64 {
    let g = vel.grid;
    let (ny, nvy) = (g.ny, g.nvy());
    let i = i % g.nx;
    let (ju, jv) = if g.walls {
        if j == 0 || j == ny {
            return 0.0;
        }
        (j, j)
    } else {
        (j % ny, j % ny)
    };
    let jum = if g.walls { ju - 1 } else { (ju + ny - 1) % ny };
    let ub = 0.5 * (vel.u[i * ny + jum] + vel.u[i * ny + ju]);
    let vb = 0.5 * (vel.v[g.xm(i) * nvy + jv] + vel.v[i * nvy + jv]);
    ub * vb
}

/// Conservative second-order central discretisation of `-∇·(u⊗u)`.
pub fn advective_term(vel: &StaggeredVelocity) -> StaggeredVelocity {
    let g = vel.grid;
    let (dx, dy, ny, nvy) = (g.dx(), g.dy(), g.ny, g.nvy());
    let uc = |i: usize, j: usize| 0.5 * (vel.u[i * ny + j] + vel.u[g.xp(i) * ny + j]);
    let vc = |i: usize, j: usize| {
        let jt = if g.walls { j + 1 } else { (j + 1) % ny };
        0.5 * (vel.v[i * nvy + j] + vel.v[i * nvy + jt])
    };
    let mut out = StaggeredVelocity::zeros(g);
    for i in 0..g.nx {
        for j in 0..ny {
            let (a, b) = (uc(i, j), uc(g.xm(i), j));
            out.u[i * ny + j] =
                -(a * a - b * b) / dx - (corner_flux(vel, i, j + 1) - corner_flux(vel, i, j)) / dy;
        }
        let interior = if g.walls { 1..ny } else { 0..ny };
        for j in interior {
            let jm = if g.walls { j - 1 } else { (j + ny - 1) % ny };
            let (a, b) = (vc(i, j), vc(i, jm));
            out.v[i * nvy + j] =
                -(corner_flux(vel, i + 1, j) - corner_flux(vel, i, j)) / dx - (a * a - b * b) / dy;
        }
    }
    out
}

/// `ν∇²u` with the 5-point stencil; no-slip walls use the mirrored ghost `-u`.
pub fn viscous_term(vel: &StaggeredVelocity, nu: f64) -> StaggeredVelocity {
    let g = vel.grid;
    let (ny, nvy) = (g.ny, g.nvy());
    let (cx, cy) = (nu / (g.dx() * g.dx()), nu / (g.dy() * g.dy()));
    let mut out = StaggeredVelocity::zeros(g);
    for i in 0..g.nx {
        let (ip, im) = (g.xp(i), g.xm(i));
        for j in 0..ny {
            let c = vel.u[i * ny + j];
            let (up, dn) = if g.walls {
                (
                    if j + 1 < ny { vel.u[i * ny + j + 1] } else { -c },
                    if j > 0 { vel.u[i * ny + j - 1] } else { -c },
                )
            } else {
                (vel.u[i * ny + (j + 1) % ny], vel.u[i * ny + (j + ny - 1) % ny])
            };
            out.u[i * ny + j] =
                cx * (vel.u[ip * ny + j] - 2.0 * c + vel.u[im * ny + j]) + cy * (up - 2.0 * c + dn);
        }
        let interior = if g.walls { 1..ny } else { 0..ny };
        for j in interior {
            let c = vel.v[i * nvy + j];
            let (jp, jm) = if g.walls {
                (j + 1, j - 1)
            } else {
                ((j + 1) % ny, (j + ny - 1) % ny)
            };
            out.v[i * nvy + j] = cx * (vel.v[ip * nvy + j] - 2.0 * c + vel.v[im * nvy + j])
                + cy * (vel.v[i * nvy + jp] - 2.0 * c + vel.v[i * nvy + jm]);
        }
    }
    out
}

/// Physical and numerical parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub nu: f64,
    pub dt: f64,
    /// Constant body force `(f_x, f_y)`.
    pub forcing: [f64; 2],
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    pub kinetic_energy: f64,
    /// Largest |∇·u| over the three stages of the step.
    pub max_divergence: f64,
    /// `max|∇·u| · Δx / U` over the stages (zero for a fluid at rest).
    pub relative_divergence: f64,
    pub mean_u: f64,
    pub mean_v: f64,
    pub cfl: f64,
}

/// Velocity, pressure and clock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub velocity: StaggeredVelocity,
    pub pressure: PressureField,
    pub time: f64,
    pub step: usize,
}

impl FlowState {
    pub fn new(velocity: StaggeredVelocity) -> Self {
        let grid = velocity.grid;
        Self {
            velocity,
            pressure: PressureField::zeros(grid),
            time: 0.0,
            step: 0,
        }
    }
}

/// Owns the pressure plan and coefficients; steps a [`FlowState`].
pub struct FlowSolver {
    grid: FlowGrid,
    params: FlowParams,
    coeffs: Rk3Coefficients,
    plan: SolverPlan<f64>,
}

impl FlowSolver {
    pub fn new(grid: FlowGrid, params: FlowParams) -> Result<Self> {
        if !(params.dt > 0.0 && params.dt.is_finite()) {
            return Err(PoissonError::InvalidArgument(format!("time step must be positive, got {}", params.dt)));
        }
        if !(params.nu >= 0.0 && params.nu.is_finite()) {
            return Err(PoissonError::InvalidArgument(format!("viscosity must be non-negative, got {}", params.nu)));
        }
        Ok(Self {
            grid,
            params,
            coeffs: Rk3Coefficients::default(),
            plan: SolverPlan::new(grid.pressure_config()?)?,
        })
    }

    pub fn grid(&self) -> FlowGrid {
        self.grid
    }

    pub fn params(&self) -> FlowParams {
        self.params
    }

    /// Advisory CFL number `Δt (max|u|/Δx + max|v|/Δy)`.
    pub fn cfl(&self, vel: &StaggeredVelocity) -> f64 {
        let mu = vel.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mv = vel.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.params.dt * (mu / self.grid.dx() + mv / self.grid.dy())
    }

    fn tendency(&self, vel: &StaggeredVelocity) -> StaggeredVelocity {
        let mut n = advective_term(vel);
        let visc = viscous_term(vel, self.params.nu);
        let [fx, fy] = self.params.forcing;
        let g = self.grid;
        for (a, b) in n.u.iter_mut().zip(&visc.u) {
            *a += b + fx;
        }
        let nvy = g.nvy();
        for (idx, (a, b)) in n.v.iter_mut().zip(&visc.v).enumerate() {
            let j = idx % nvy;
            if !(g.walls && (j == 0 || j == g.ny)) {
                *a += b + fy;
            }
        }
        n
    }

    /// Removes the divergence of `vel` in place: solves `∇²φ = ∇·u / scale`
    /// and subtracts `scale ∇φ`. Returns φ.
    pub fn project(&self, vel: &mut StaggeredVelocity, scale: f64) -> Result<Vec<f64>> {
        let mut rhs = divergence(vel);
        for r in rhs.iter_mut() {
            *r /= scale;
        }
        let rhs = Field::from_vec(&[self.grid.nx, self.grid.ny], rhs)?;
        let (phi, _) = self.plan.solve_field(&rhs.view())?;
        let phi = phi.into_vec();
        let grad = gradient(self.grid, &phi);
        for (a, b) in vel.u.iter_mut().zip(&grad.u) {
            *a -= scale * b;
        }
        for (a, b) in vel.v.iter_mut().zip(&grad.v) {
            *a -= scale * b;
        }
        Ok(phi)
    }

    /// One three-stage step. Returns the step diagnostics; the state is only
    /// advanced when every stage stays finite.
    pub fn rk3_step(&self, state: &mut FlowState) -> Result<StepDiagnostics> {
        let dt = self.params.dt;
        let next_step = state.step + 1;
        let mut vel = state.velocity.clone();
        let mut p = state.pressure.p.clone();
        let mut prev: Option<StaggeredVelocity> = None;
        let mut max_div = 0.0f64;
        let mut rel_div = 0.0f64;
        for k in 0..3 {
            let (alpha, gamma, zeta) = self.coeffs.stage(k);
            let n_k = self.tendency(&vel);
            let gp = gradient(self.grid, &p);
            let mut star = vel.clone();
            for (idx, s) in star.u.iter_mut().enumerate() {
                let old = prev.as_ref().map_or(0.0, |q| q.u[idx]);
                *s += dt * (-alpha * gp.u[idx] + gamma * n_k.u[idx] + zeta * old);
            }
            for (idx, s) in star.v.iter_mut().enumerate() {
                let old = prev.as_ref().map_or(0.0, |q| q.v[idx]);
                *s += dt * (-alpha * gp.v[idx] + gamma * n_k.v[idx] + zeta * old);
            }
            if !star.is_finite() {
                return Err(PoissonError::Instability {
                    step: next_step,
                    detail: format!("non-finite predictor velocity in stage {}", k + 1),
                });
            }
            let phi = self.project(&mut star, alpha * dt)?;
            for (a, b) in p.iter_mut().zip(&phi) {
                *a += b;
            }
            let div = divergence(&star);
            let d = div.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let u_max = star.max_abs();
            max_div = max_div.max(d);
            if u_max > 0.0 {
                rel_div = rel_div.max(d * self.grid.dx().min(self.grid.dy()) / u_max);
            } else if d > 0.0 {
                rel_div = f64::INFINITY;
            }
            prev = Some(n_k);
            vel = star;
        }
        if !vel.is_finite() || p.iter().any(|x| !x.is_finite()) {
            return Err(PoissonError::Instability {
                step: next_step,
                detail: "non-finite velocity or pressure after correction".into(),
            });
        }
        state.velocity = vel;
        state.pressure.p = p;
        state.step = next_step;
        state.time += dt;
        let (mean_u, mean_v) = state.velocity.mean();
        Ok(StepDiagnostics {
            step: state.step,
            time: state.time,
            kinetic_energy: state.velocity.kinetic_energy(),
            max_divergence: max_div,
            relative_divergence: rel_div,
            mean_u,
            mean_v,
            cfl: self.cfl(&state.velocity),
        })
    }
}

/// Demo cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowCase {
    TaylorGreen,
    Channel,
}

impl FlowCase {
    /// Default domain: `[0, 2π]²` periodic, or `[0, 2π] × [0, 2]` with walls.
    pub fn grid(self, nx: usize, ny: usize) -> Result<FlowGrid> {
        match self {
            FlowCase::TaylorGreen => FlowGrid::new(nx, ny, 2.0 * PI, 2.0 * PI, false),
            FlowCase::Channel => FlowGrid::new(nx, ny, 2.0 * PI, 2.0, true),
        }
    }

    /// Initial velocity. Taylor–Green uses `ψ = sin x sin y`; the channel
    /// uses a unit-centreline Poiseuille profile with a small x-periodic
    /// perturbation.
    pub fn initial_velocity(self, grid: FlowGrid) -> StaggeredVelocity {
        match self {
            FlowCase::TaylorGreen => StaggeredVelocity::from_streamfunction(grid, |x, y| x.sin() * y.sin()),
            FlowCase::Channel => {
                let (lx, h) = (grid.lx, grid.ly);
                StaggeredVelocity::from_streamfunction(grid, move |x, y| {
                    let base = 4.0 * (0.5 * h * y * y - y * y * y / 3.0) / (h * h);
                    let s = (PI * y / h).sin();
                    base + 0.05 * (2.0 * PI * x / lx).sin() * s * s
                })
            }
        }
    }

    /// Body force that sustains the channel's Poiseuille profile.
    pub fn driving_force(self, grid: FlowGrid, nu: f64) -> [f64; 2] {
        match self {
            FlowCase::TaylorGreen => [0.0, 0.0],
            FlowCase::Channel => [8.0 * nu / (grid.ly * grid.ly), 0.0],
        }
    }
}

/// Analytic Taylor–Green kinetic energy ratio `KE(t)/KE(0) = exp(-4νt)` on
/// `[0, 2π]²` with unit wavenumbers.
pub fn taylor_green_decay(nu: f64, t: f64) -> f64 {
    (-4.0 * nu * t).exp()
}

/// Runs Taylor–Green to time `t_end` on `n²` cells and returns the relative
/// deviation of `KE(t)/KE(0)` from the analytic decay.
pub fn taylor_green_energy_error(n: usize, nu: f64, t_end: f64, cfl: f64) -> Result<f64> {
    let grid = FlowCase::TaylorGreen.grid(n, n)?;
    let steps = (t_end / (cfl * grid.dx())).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let solver = FlowSolver::new(grid, FlowParams { nu, dt, forcing: [0.0, 0.0] })?;
    let mut state = FlowState::new(FlowCase::TaylorGreen.initial_velocity(grid));
    let ke0 = state.velocity.kinetic_energy();
    for _ in 0..steps {
        solver.rk3_step(&mut state)?;
    }
    let ratio = state.velocity.kinetic_energy() / ke0;
    let expect = taylor_green_decay(nu, t_end);
    Ok((ratio - expect).abs() / expect)
}
