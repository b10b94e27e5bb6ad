//! Command-line front end for `csp-core`.
//!
//! Every subcommand writes JSON or CSV to stdout, or to `--output`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use csp_core::geometry2d::{planar_density_mc, Triangle};
use csp_core::inference::spatial_test;
use csp_core::moments::{convergence_rate, mixture_moments, moments, optimal_parameters};
use csp_core::montecarlo::simulate_density;
use csp_core::oracle::{case_probabilities, moments_from_probabilities, DEFAULT_TOL};
use csp_core::{
    AnchorSet, DensityVersion, IntervalPartition, MCConfig, Params, PcdError, Regime, RegionKind,
    SupportInterval, Tau,
};

#[derive(Debug, Parser)]
#[command(name = "csp", version, about = "Central similarity proximity catch digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form asymptotic mean and variance, for one cell or a partition.
    Moments(MomentsArgs),
    /// Quadrature case probabilities, one CSV row per (tau, c, kind).
    Oracle(OracleArgs),
    /// Monte Carlo distribution of the relative density.
    Simulate(SimulateArgs),
    /// Test X for complete spatial randomness given the anchors Y.
    Test(TestArgs),
    /// Tabulate moments and convergence rates over a (tau, c) grid.
    Sweep(SweepArgs),
    /// Minimizers of the convergence rate.
    Optimal(OptimalArgs),
    /// Monte Carlo relative density in a single triangle.
    PlanarSim(PlanarArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Partition {
    /// Support interval as `lo,hi`.
    #[arg(long, value_parser = parse_support, default_value = "0,1", allow_hyphen_values = true)]
    pub support: SupportInterval,
    /// Anchor points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "anchor_file")]
    pub anchors: Option<Vec<f64>>,
    /// File of anchor points, one per line.
    #[arg(long)]
    pub anchor_file: Option<PathBuf>,
}

impl Partition {
    /// No anchors means a single middle cell spanning the support.
    fn build(&self) -> Result<Option<IntervalPartition>, CliError> {
        let points = match (&self.anchors, &self.anchor_file) {
            (Some(a), _) => a.clone(),
            (None, Some(path)) => read_points(path)?,
            (None, None) => return Ok(None),
        };
        let anchors = AnchorSet::new(points)?;
        Ok(Some(IntervalPartition::with_boundary_anchors(self.support, anchors)?))
    }

    fn build_or_single(&self) -> Result<IntervalPartition, CliError> {
        Ok(self
            .build()?
            .unwrap_or_else(|| IntervalPartition::single_middle(self.support)))
    }
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Expansion parameter; `inf` allowed.
    #[arg(long)]
    pub tau: Tau,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value = "middle")]
    pub kind: RegionKind,
    #[command(flatten)]
    pub partition: Partition,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub tau: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "middle,end")]
    pub kind: Vec<RegionKind>,
    /// Absolute quadrature tolerance per quantity.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tau: Tau,
    #[arg(long)]
    pub c: f64,
    /// 1 for arcs over n_T, 2 for arcs over n(n-1).
    #[arg(long = "version", id = "density_version", default_value = "2")]
    pub density_version: DensityVersion,
    #[arg(long, env = "CSP_WORKERS")]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub partition: Partition,
    /// Also write the standardized replicates as CSV.
    #[arg(long)]
    pub standardized_csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Target-class points, one per line.
    #[arg(long)]
    pub x_file: PathBuf,
    /// Anchor points, one per line.
    #[arg(long)]
    pub y_file: PathBuf,
    #[arg(long)]
    pub tau: Tau,
    #[arg(long)]
    pub c: f64,
    #[arg(long, value_parser = parse_support, default_value = "0,1", allow_hyphen_values = true)]
    pub support: SupportInterval,
    #[arg(long = "version", id = "density_version", default_value = "2")]
    pub density_version: DensityVersion,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.05)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 100)]
    pub tau_steps: usize,
    /// Space the tau grid logarithmically.
    #[arg(long)]
    pub log: bool,
    #[arg(long, default_value_t = 0.5)]
    pub c_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub c_max: f64,
    #[arg(long, default_value_t = 1)]
    pub c_steps: usize,
    #[arg(long, value_delimiter = ',', default_value = "middle,end")]
    pub kind: Vec<RegionKind>,
    /// Sample size in the rate `mu / sqrt(n (4 nu)^3)`.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    /// One of middle_c_half, middle_full, end; all three when omitted.
    #[arg(long)]
    pub regime: Option<Regime>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct PlanarArgs {
    /// Vertices as `x1,y1,x2,y2,x3,y3`.
    #[arg(long, value_parser = parse_triangle, allow_hyphen_values = true)]
    pub triangle: Triangle,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub tau: Tau,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "CSP_WORKERS")]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] PcdError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: io::Error,
    },
    #[error("{0}")]
    Parse(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Closed-form moments of one cell kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsOutput {
    pub mu: f64,
    pub four_nu: f64,
    pub degenerate: bool,
}

fn parse_support(s: &str) -> Result<SupportInterval, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [lo, hi] = parts.as_slice() else {
        return Err(format!("expected lo,hi but got '{s}'"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    SupportInterval::new(num(lo)?, num(hi)?).map_err(|e| e.to_string())
}

fn parse_triangle(s: &str) -> Result<Triangle, String> {
    let coords = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}")))
        .collect::<Result<Vec<f64>, String>>()?;
    let coords: [f64; 6] = coords
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected six numbers, got {}", v.len()))?;
    Triangle::from_coords(coords).map_err(|e| e.to_string())
}

/// One number per line; `#` starts a comment and blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<f64>, CliError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i, body))
        })
        .map(|(i, body)| {
            body.parse::<f64>()
                .map_err(|e| CliError::Parse(format!("line {}: '{body}': {e}", i + 1)))
        })
        .collect()
}

fn read_points(path: &Path) -> Result<Vec<f64>, CliError> {
    parse_points(&fs::read_to_string(path).map_err(io_err(path))?)
}

fn emit(out: &Output, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if steps == 0 || lo > hi || (log && lo <= 0.0) {
        return Err(CliError::Parse(format!(
            "bad grid [{lo}, {hi}] with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    Ok((0..steps)
        .map(|i| {
            let v = a + (b - a) * i as f64 / (steps - 1) as f64;
            if log {
                v.exp()
            } else {
                v
            }
        })
        .collect())
}

fn run_moments(a: &MomentsArgs) -> Result<(), CliError> {
    let params = Params::new(a.tau, a.c)?;
    let text = match a.partition.build()? {
        Some(partition) => json(&mixture_moments(&partition, &params)?),
        None => {
            let m = moments(&params, a.kind);
            json(&MomentsOutput {
                mu: m.mu,
                four_nu: m.four_nu,
                degenerate: m.is_degenerate(),
            })
        }
    };
    emit(&a.out, &text)
}

fn run_oracle(a: &OracleArgs) -> Result<(), CliError> {
    let mut text = String::from("tau,c,kind,p_a,p2n,png,p2g,mu,four_nu\n");
    for &tau in &a.tau {
        for &c in &a.c {
            let params = Params::finite(tau, c)?;
            for &kind in &a.kind {
                let cp = case_probabilities(&params, kind, a.tol)?;
                let m = moments_from_probabilities(&cp);
                text.push_str(&format!(
                    "{tau},{c},{kind},{},{},{},{},{},{}\n",
                    cp.p_a, cp.p2n, cp.png, cp.p2g, m.mu, m.four_nu
                ));
            }
        }
    }
    emit(&a.out, &text)
}

fn run_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let cfg = MCConfig {
        n: a.n,
        reps: a.reps,
        seed: a.seed,
        params: Params::new(a.tau, a.c)?,
        partition: a.partition.build_or_single()?,
        density_version: a.density_version,
        workers: a.workers,
    };
    let report = simulate_density(&cfg)?;
    if let Some(path) = &a.standardized_csv {
        let mut csv = String::from("replicate,density,standardized\n");
        for (i, d) in report.densities.iter().enumerate() {
            csv.push_str(&format!("{i},{d},{}\n", opt(report.standardized.get(i).copied())));
        }
        fs::write(path, csv).map_err(io_err(path))?;
    }
    emit(&a.out, &json(&report))
}

fn run_test(a: &TestArgs) -> Result<(), CliError> {
    let xs = read_points(&a.x_file)?;
    let anchors = AnchorSet::new(read_points(&a.y_file)?)?;
    let params = Params::new(a.tau, a.c)?;
    let result = spatial_test(&xs, &anchors, a.support, &params, a.density_version)?;
    emit(&a.out, &json(&result))
}

fn run_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let taus = grid(a.tau_min, a.tau_max, a.tau_steps, a.log)?;
    let cs = grid(a.c_min, a.c_max, a.c_steps, false)?;
    let mut text = String::from("tau,c,kind,mu,four_nu,rate\n");
    for &tau in &taus {
        for &c in &cs {
            let params = Params::finite(tau, c)?;
            for &kind in &a.kind {
                let m = moments(&params, kind);
                let rate = convergence_rate(&m, a.n).ok();
                text.push_str(&format!(
                    "{tau},{c},{kind},{},{},{}\n",
                    m.mu,
                    m.four_nu,
                    opt(rate)
                ));
            }
        }
    }
    emit(&a.out, &text)
}

fn run_optimal(a: &OptimalArgs) -> Result<(), CliError> {
    let text = match a.regime {
        Some(r) => json(&optimal_parameters(r)),
        None => json(&Regime::ALL.map(optimal_parameters)),
    };
    emit(&a.out, &text)
}

fn run_planar(a: &PlanarArgs) -> Result<(), CliError> {
    let report = planar_density_mc(a.n, a.reps, a.tau, &a.triangle, a.seed, a.workers)?;
    emit(&a.out, &json(&report))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Moments(a) => run_moments(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Test(a) => run_test(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Optimal(a) => run_optimal(a),
        Command::PlanarSim(a) => run_planar(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_files() {
        let text = "# header\n0.25\n\n  0.5 # mid\n0.75\n";
        assert_eq!(parse_points(text).unwrap(), vec![0.25, 0.5, 0.75]);
        assert!(parse_points("0.1\nabc\n").is_err());
    }

    #[test]
    fn support_flag() {
        let s = parse_support("-1, 2.5").unwrap();
        assert_eq!((s.delta1(), s.delta2()), (-1.0, 2.5));
        assert!(parse_support("1").is_err());
        assert!(parse_support("2,1").is_err());
        assert!(parse_triangle("0,0,1,0,0,1").is_ok());
        assert!(parse_triangle("0,0,1,0,0").is_err());
        assert!(parse_triangle("0,0,1,1,2,2").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid(1.0, 3.0, 3, false).unwrap(), vec![1.0, 2.0, 3.0]);
        let g = grid(0.1, 10.0, 3, true).unwrap();
        assert!((g[1] - 1.0).abs() < 1e-12);
        assert!(grid(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn parses_every_subcommand() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["csp", "moments", "--tau", "inf", "--c", "0.5"]).unwrap();
        let Command::Moments(a) = cli.command else { panic!() };
        assert_eq!(a.tau, Tau::Infinity);
    }
}
