use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_core::flow::FlowCase;
use poisson_core::{Approximation, BoundaryCondition, GridKind, GridSpec, SolverConfig};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::AxisHeader;

#[derive(Debug, Parser)]
#[command(name = "fastpoisson", version, about = "Fast direct Poisson solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve ∇²φ = g for a right-hand side stored on disk.
    Solve(SolveArgs),
    /// Run the verification suite and print a JSON summary.
    Verify(VerifyArgs),
    /// Time solves over a list of sizes and print CSV.
    Bench(BenchArgs),
    /// Run the incompressible flow demo.
    DemoFlow(FlowArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BcArg {
    Periodic,
    Dirichlet,
    Neumann,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Periodic => BoundaryCondition::Periodic,
            BcArg::Dirichlet => BoundaryCondition::Dirichlet,
            BcArg::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridArg {
    Regular,
    Staggered,
}

impl From<GridArg> for GridKind {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Regular => GridKind::Regular,
            GridArg::Staggered => GridKind::Staggered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxArg {
    Spectral,
    Fd2,
}

impl From<ApproxArg> for Approximation {
    fn from(a: ApproxArg) -> Self {
        match a {
            ApproxArg::Spectral => Approximation::PseudoSpectral,
            ApproxArg::Fd2 => Approximation::FiniteDifference2,
        }
    }
}

/// Grid description. Per-axis lists may hold one value, which then applies
/// to every axis.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct GridArgs {
    #[arg(long)]
    pub dims: Option<usize>,
    /// NX[,NY[,NZ]]
    #[arg(long, value_delimiter = ',')]
    pub size: Vec<usize>,
    /// LX[,LY[,LZ]]
    #[arg(long, value_delimiter = ',')]
    pub length: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub bc: Vec<BcArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub grid: Vec<GridArg>,
    #[arg(long, value_enum)]
    pub approx: Option<ApproxArg>,
}

fn broadcast<T: Copy>(name: &str, values: &[T], dims: usize, default: Option<T>) -> CliResult<Vec<T>> {
    match values.len() {
        0 => default
            .map(|d| vec![d; dims])
            .ok_or_else(|| CliError::Config(format!("--{name} is required"))),
        1 => Ok(vec![values[0]; dims]),
        n if n == dims => Ok(values.to_vec()),
        n => Err(CliError::Config(format!("--{name} has {n} values for {dims} dimensions"))),
    }
}

impl GridArgs {
    fn has_geometry(&self) -> bool {
        self.dims.is_some()
            || !self.size.is_empty()
            || !self.length.is_empty()
            || !self.bc.is_empty()
            || !self.grid.is_empty()
    }

    pub fn approximation(&self) -> Approximation {
        self.approx.unwrap_or(ApproxArg::Spectral).into()
    }

    /// Builds the solver configuration. Without geometry flags the axes of
    /// `header_axes` are used; `default_extents` fills in a missing `--size`.
    pub fn resolve(&self, default_extents: Option<&[usize]>, header_axes: Option<&[AxisHeader]>) -> CliResult<SolverConfig> {
        let approx = self.approximation();
        if !self.has_geometry() {
            if let Some(axes) = header_axes {
                let specs = axes.iter().map(|a| a.to_spec()).collect::<CliResult<Vec<_>>>()?;
                return Ok(SolverConfig::new(specs, approx)?);
            }
        }
        let dims = self
            .dims
            .or((!self.size.is_empty() && self.size.len() > 1).then_some(self.size.len()))
            .or(default_extents.map(|e| e.len()))
            .unwrap_or(1);
        if !(1..=3).contains(&dims) {
            return Err(CliError::Config(format!("--dims must be 1, 2 or 3, got {dims}")));
        }
        let sizes = if self.size.is_empty() {
            match default_extents {
                Some(e) if e.len() == dims => e.to_vec(),
                _ => return Err(CliError::Config("--size is required".into())),
            }
        } else {
            broadcast("size", &self.size, dims, None)?
        };
        let lengths = broadcast("length", &self.length, dims, Some(1.0))?;
        let bcs = broadcast("bc", &self.bc, dims, Some(BcArg::Periodic))?;
        let grids = broadcast("grid", &self.grid, dims, Some(GridArg::Regular))?;
        let specs = (0..dims)
            .map(|a| GridSpec::new(sizes[a], lengths[a], grids[a].into(), bcs[a].into()))
            .collect::<poisson_core::Result<Vec<_>>>()?;
        Ok(SolverConfig::new(specs, approx)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Worker threads for the solver.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Version of the field file format to write.
    #[arg(long, default_value_t = crate::format::FORMAT_VERSION)]
    pub format_version: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Right-hand side: header `.json`, payload `.bin`, or their common stem.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub bc: Option<BcArg>,
    #[arg(long, value_enum)]
    pub grid: Option<GridArg>,
    #[arg(long, value_enum)]
    pub approx: Option<ApproxArg>,
    /// Perturb one eigenvalue per plan; the suite must then fail.
    #[arg(long, hide = true)]
    pub fault_inject: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Points per axis for each benchmarked size.
    #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64, 128])]
    pub sizes: Vec<usize>,
    /// Timed repetitions per size (after one untimed warm-up solve).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseArg {
    TaylorGreen,
    Channel,
}

impl From<CaseArg> for FlowCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::TaylorGreen => FlowCase::TaylorGreen,
            CaseArg::Channel => FlowCase::Channel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    /// The case's own initial condition.
    Case,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::TaylorGreen)]
    pub case: CaseArg,
    /// NX,NY cells.
    #[arg(long, value_delimiter = ',', default_values_t = [32usize, 32])]
    pub size: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub nu: f64,
    /// Time step; defaults to a quarter of the grid spacing.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Body force FX[,FY]; defaults to the case's driving force.
    #[arg(long, value_delimiter = ',')]
    pub forcing: Vec<f64>,
    #[arg(long, value_enum, default_value_t = InitArg::Case)]
    pub init: InitArg,
    /// Write velocity and pressure snapshots every N steps (0 disables).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadcasts_and_defaults() {
        let args = GridArgs {
            dims: Some(2),
            size: vec![8],
            bc: vec![BcArg::Periodic, BcArg::Neumann],
            grid: vec![GridArg::Regular, GridArg::Staggered],
            ..Default::default()
        };
        let cfg = args.resolve(None, None).unwrap();
        assert_eq!(cfg.extents(), vec![8, 8]);
        assert_eq!(cfg.axes()[1].bc(), BoundaryCondition::Neumann);
        assert_eq!(cfg.axes()[0].length(), 1.0);

        let only_size = GridArgs { size: vec![4, 5, 6], ..Default::default() };
        assert_eq!(only_size.resolve(None, None).unwrap().extents(), vec![4, 5, 6]);

        let bad = GridArgs { size: vec![4, 5], dims: Some(3), ..Default::default() };
        assert!(matches!(bad.resolve(None, None), Err(CliError::Config(_))));
        assert!(matches!(GridArgs::default().resolve(None, None), Err(CliError::Config(_))));
    }

    #[test]
    fn header_axes_are_used_without_flags() {
        let axes = vec![AxisHeader { n: 6, length: 2.0, bc: BoundaryCondition::Dirichlet, grid: GridKind::Staggered }];
        let cfg = GridArgs::default().resolve(Some(&[6]), Some(&axes)).unwrap();
        assert_eq!(cfg.axes()[0].bc(), BoundaryCondition::Dirichlet);
        assert_eq!(cfg.axes()[0].length(), 2.0);
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from([
            "fastpoisson", "solve", "--in", "x.json", "--size", "8,8", "--bc", "periodic,dirichlet", "--grid",
            "regular,staggered", "--approx", "fd2", "--out", "o",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Solve(_)));
    }
}
