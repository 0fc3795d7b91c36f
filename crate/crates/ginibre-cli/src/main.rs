//! `ginibre`: counting statistics of the Ginibre ensembles from the command
//! line. Formula tables (`mean`, `variance`, `cumulants`), seeded Monte Carlo
//! campaigns (`simulate`), and the identity suite (`verify`).

mod expr;
mod output;
mod potentials;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginibre::finite_n::{self, EnsembleKind};
use ginibre::origin;
use ginibre::planar::{self, RadialPotential};
use ginibre::sampler::{run_campaign, CountScale, SimConfig};
use ginibre::verify::{run_identity_suite, FaultInjection};
use ginibre::Error as GinError;
use output::OutputRow;
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ginibre", version, about = "Counting statistics of eigenvalues in centred discs for the Ginibre ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for table-producing commands
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism; env GINIBRE_THREADS as fallback)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// key=value config file supplying defaults for unset flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Debug)]
enum Scale {
    #[value(name = "finite")]
    FiniteN,
    Origin,
    Bulk,
    Edge,
}

impl Scale {
    fn label(self) -> &'static str {
        match self {
            Scale::FiniteN => "finite_N",
            Scale::Origin => "origin",
            Scale::Bulk => "bulk",
            Scale::Edge => "edge",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expected number of eigenvalues in a centred disc
    Mean(MeanArgs),
    /// Number variance (and GinOE real/complex/covariance split)
    Variance(VarianceArgs),
    /// Cumulants of the count for planar beta in {2,4} ensembles
    Cumulants(CumulantArgs),
    /// Seeded Monte Carlo counting campaign
    Simulate(SimulateArgs),
    /// Run the identity/cross-check suite and report residuals
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MeanArgs {
    /// ginoe | ginue | ginse
    #[arg(long)]
    ensemble: Option<String>,
    /// finite | origin
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Matrix size (finite scale)
    #[arg(long)]
    n: Option<usize>,
    /// Grid start:stop:points for the radius (a or R)
    #[arg(long)]
    grid: Option<String>,
    /// fig2b | fig3: expand to the corresponding figure grids
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct VarianceArgs {
    #[arg(long)]
    ensemble: Option<String>,
    /// finite | origin | bulk | edge
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    #[arg(long)]
    n: Option<usize>,
    /// Grid start:stop:points for a, R or S
    #[arg(long)]
    grid: Option<String>,
    /// Potential for the finite scale (defaults to the ensemble's Gaussian)
    #[arg(long)]
    potential: Option<String>,
    /// fig5: origin-limit curves for all ensembles
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct CumulantArgs {
    /// Potential name, e.g. ginse_gaussian, mittag_leffler(2,1,0), truncated_unitary(0.2), custom
    #[arg(long)]
    potential: Option<String>,
    /// 2 or 4
    #[arg(long)]
    beta: Option<u8>,
    #[arg(long)]
    n: Option<usize>,
    /// Cumulant order p >= 1
    #[arg(long)]
    p: Option<usize>,
    /// finite | origin | bulk | edge
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Grid start:stop:points for a, R or S
    #[arg(long)]
    grid: Option<String>,
    /// fig7: N=50 cumulant curves for the Gaussian and truncated-unitary potentials
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated radii (a or R per --scale)
    #[arg(long)]
    radii: Option<String>,
    /// Alternative to --radii: start:stop:points
    #[arg(long)]
    grid: Option<String>,
    /// finite | origin counting scale
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Use the Bernoulli-product fast sampler (beta in {2,4} only)
    #[arg(long)]
    fast: bool,
    /// Potential for the fast path (defaults to the ensemble's Gaussian)
    #[arg(long)]
    potential: Option<String>,
    /// Write the accumulator checkpoint blob here
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// fig4 | fig7 campaign presets
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Test hook: perturb e^{-x} I_1(x) by this offset inside the suite
    #[arg(long, hide = true, default_value_t = 0.0)]
    inject_i1: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let threads = cli
        .threads
        .or_else(|| config.get("threads").and_then(|s| s.parse().ok()))
        .or_else(|| {
            std::env::var("GINIBRE_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        });
    if let Some(t) = threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }

    let result = match &cli.command {
        Command::Mean(args) => cmd_mean(args, &config).map(Some),
        Command::Variance(args) => cmd_variance(args, &config).map(Some),
        Command::Cumulants(args) => cmd_cumulants(args, &config).map(Some),
        Command::Simulate(args) => cmd_simulate(args, &config).map(Some),
        Command::Verify(args) => match cmd_verify(args) {
            Ok(true) => Ok(None),
            Ok(false) => return ExitCode::from(5),
            Err(e) => Err(e),
        },
    };

    match result {
        Ok(Some(rows)) => match emit(&rows, cli.format, cli.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Ok(None) => ExitCode::SUCCESS,
        Err(CmdError::Usage(msg)) => usage_error(&msg),
        Err(CmdError::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                GinError::ToleranceNotMet { .. } | GinError::NonConvergence { .. } => {
                    ExitCode::from(3)
                }
                GinError::CampaignFailures { .. } => ExitCode::from(4),
                GinError::Domain(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\nrun with --help for usage");
    ExitCode::from(2)
}

enum CmdError {
    Usage(String),
    Lib(GinError),
}

impl From<GinError> for CmdError {
    fn from(e: GinError) -> Self {
        match e {
            GinError::Domain(msg) => CmdError::Usage(msg),
            other => CmdError::Lib(other),
        }
    }
}

impl From<String> for CmdError {
    fn from(msg: String) -> Self {
        CmdError::Usage(msg)
    }
}

type CmdResult = Result<Vec<OutputRow>, CmdError>;

fn load_config(path: Option<&std::path::Path>) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path:?}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {} is not key=value: '{line}'", lineno + 1));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: Clone>(flag: &Option<T>, config: &HashMap<String, String>, key: &str, parse: impl Fn(&str) -> Option<T>) -> Option<T> {
    flag.clone().or_else(|| config.get(key).and_then(|s| parse(s)))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be start:stop:points, got '{spec}'"));
    }
    let start: f64 = parts[0].parse().map_err(|e| format!("bad grid start: {e}"))?;
    let stop: f64 = parts[1].parse().map_err(|e| format!("bad grid stop: {e}"))?;
    let points: usize = parts[2].parse().map_err(|e| format!("bad grid points: {e}"))?;
    if points == 0 || stop < start {
        return Err(format!("degenerate grid '{spec}'"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

fn parse_radii(spec: &str) -> Result<Vec<f64>, String> {
    let mut radii: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad radius '{s}': {e}")))
        .collect::<Result<_, _>>()?;
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(radii)
}

fn parse_scale(s: &str) -> Option<Scale> {
    match s {
        "finite" | "finite_N" => Some(Scale::FiniteN),
        "origin" => Some(Scale::Origin),
        "bulk" => Some(Scale::Bulk),
        "edge" => Some(Scale::Edge),
        _ => None,
    }
}

fn ensemble_of(spec: Option<String>) -> Result<EnsembleKind, CmdError> {
    let name = spec.ok_or_else(|| CmdError::Usage("--ensemble is required".into()))?;
    name.parse::<EnsembleKind>().map_err(CmdError::from)
}

fn gaussian_of(kind: EnsembleKind) -> Result<RadialPotential, CmdError> {
    let which = match kind {
        EnsembleKind::GinUE => planar::BuiltinPotential::GinueGaussian,
        EnsembleKind::GinSE => planar::BuiltinPotential::GinseGaussian,
        EnsembleKind::GinOE => {
            return Err(CmdError::Usage(
                "GinOE has no radial-potential representation".into(),
            ))
        }
    };
    Ok(planar::builtin_potential(which)?)
}

// ---------------------------------------------------------------- mean

fn mean_rows_origin(kind: EnsembleKind, grid: &[f64]) -> CmdResult {
    let mut rows = Vec::new();
    for &r in grid {
        let m = origin::mean_origin(kind, r)?;
        let mut row = OutputRow::new("mean", kind.label(), "origin", r).analytic(m.value);
        if let Some(b) = m.breakdown {
            row = row.meta_num("mean_real", b.real_part).meta_num("mean_complex", b.complex_part);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn mean_rows_finite(kind: EnsembleKind, n: usize, grid: &[f64]) -> CmdResult {
    let mut rows = Vec::new();
    for &a in grid {
        let m = finite_n::mean_disc(kind, n, a)?;
        let mut row = OutputRow::new("mean", kind.label(), "finite_N", a)
            .analytic(m.value)
            .meta_num("n", n as f64);
        if let Some(b) = m.breakdown {
            row = row.meta_num("mean_real", b.real_part).meta_num("mean_complex", b.complex_part);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_mean(args: &MeanArgs, config: &HashMap<String, String>) -> CmdResult {
    let preset = pick(&args.preset, config, "preset", |s| Some(s.to_string()));
    match preset.as_deref() {
        Some("fig2b") => {
            // deficit N - E_N(1) against its asymptote
            let mut rows = Vec::new();
            for kind in [EnsembleKind::GinOE, EnsembleKind::GinUE, EnsembleKind::GinSE] {
                for n in [50usize, 100, 200, 400] {
                    let (deficit, asymptote) = finite_n::deficit_outside(n, kind)?;
                    rows.push(
                        OutputRow::new("deficit", kind.label(), "finite_N", n as f64)
                            .analytic(deficit)
                            .meta_num("asymptote", asymptote)
                            .meta_num("ratio", deficit / asymptote),
                    );
                }
            }
            return Ok(rows);
        }
        Some("fig3") => {
            let grid = parse_grid("0:3:61")?;
            let mut rows = Vec::new();
            for kind in [EnsembleKind::GinOE, EnsembleKind::GinUE, EnsembleKind::GinSE] {
                rows.extend(mean_rows_origin(kind, &grid)?);
            }
            return Ok(rows);
        }
        Some(other) => return Err(CmdError::Usage(format!("unknown mean preset '{other}'"))),
        None => {}
    }
    let kind = ensemble_of(pick(&args.ensemble, config, "ensemble", |s| Some(s.to_string())))?;
    let scale = pick(&args.scale, config, "scale", parse_scale)
        .ok_or_else(|| CmdError::Usage("--scale is required (finite | origin)".into()))?;
    let grid = parse_grid(
        &pick(&args.grid, config, "grid", |s| Some(s.to_string()))
            .ok_or_else(|| CmdError::Usage("--grid is required".into()))?,
    )?;
    match scale {
        Scale::Origin => mean_rows_origin(kind, &grid),
        Scale::FiniteN => {
            let n = pick(&args.n, config, "n", |s| s.parse().ok())
                .ok_or_else(|| CmdError::Usage("--n is required at finite scale".into()))?;
            mean_rows_finite(kind, n, &grid)
        }
        other => Err(CmdError::Usage(format!("mean does not support scale '{}'", other.label()))),
    }
}

// ---------------------------------------------------------------- variance

fn variance_rows_origin(kind: EnsembleKind, grid: &[f64]) -> CmdResult {
    let mut rows = Vec::new();
    for &r in grid {
        let b = origin::var_origin(kind, r)?;
        let mut row = OutputRow::new("variance", kind.label(), "origin", r).analytic(b.total);
        if kind == EnsembleKind::GinOE {
            row = row
                .meta_num("var_real", b.var_real)
                .meta_num("var_complex", b.var_complex)
                .meta_num("cov_rc", b.covariance);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_variance(args: &VarianceArgs, config: &HashMap<String, String>) -> CmdResult {
    let preset = pick(&args.preset, config, "preset", |s| Some(s.to_string()));
    match preset.as_deref() {
        Some("fig5") => {
            let grid = parse_grid("0:5:51")?;
            let mut rows = Vec::new();
            for kind in [EnsembleKind::GinOE, EnsembleKind::GinUE, EnsembleKind::GinSE] {
                rows.extend(variance_rows_origin(kind, &grid)?);
            }
            return Ok(rows);
        }
        Some(other) => return Err(CmdError::Usage(format!("unknown variance preset '{other}'"))),
        None => {}
    }
    let kind = ensemble_of(pick(&args.ensemble, config, "ensemble", |s| Some(s.to_string())))?;
    let scale = pick(&args.scale, config, "scale", parse_scale)
        .ok_or_else(|| CmdError::Usage("--scale is required".into()))?;
    let grid = parse_grid(
        &pick(&args.grid, config, "grid", |s| Some(s.to_string()))
            .ok_or_else(|| CmdError::Usage("--grid is required".into()))?,
    )?;
    match scale {
        Scale::Origin => variance_rows_origin(kind, &grid),
        Scale::FiniteN => {
            if kind == EnsembleKind::GinOE {
                return Err(CmdError::Usage(
                    "finite-N GinOE variance is out of scope; use --scale origin or simulate".into(),
                ));
            }
            let n = pick(&args.n, config, "n", |s| s.parse().ok())
                .ok_or_else(|| CmdError::Usage("--n is required at finite scale".into()))?;
            let pot = match pick(&args.potential, config, "potential", |s| Some(s.to_string())) {
                Some(spec) => potentials::parse_potential(&spec, config)?,
                None => gaussian_of(kind)?,
            };
            let mut rows = Vec::new();
            for &a in &grid {
                let table = planar::moment_table(&pot, n, kind.beta(), a)?;
                let k2 = planar::cumulant_finite(&table, 2)?.value;
                rows.push(
                    OutputRow::new("variance", kind.label(), "finite_N", a)
                        .analytic(k2)
                        .meta_num("n", n as f64)
                        .meta_str("potential", &pot.label),
                );
            }
            Ok(rows)
        }
        Scale::Bulk => {
            let c = origin::universal_slope(kind);
            let mut rows = Vec::new();
            for &a in &grid {
                rows.push(
                    OutputRow::new("variance_scaled", kind.label(), "bulk", a)
                        .analytic(2.0 * a / c)
                        .meta_str("units", "sqrt(N/pi)"),
                );
            }
            Ok(rows)
        }
        Scale::Edge => {
            let c = origin::universal_slope(kind);
            let mut rows = Vec::new();
            for &s in &grid {
                let f = origin::edge_profile_f(s)?;
                rows.push(
                    OutputRow::new("variance_scaled", kind.label(), "edge", s)
                        .analytic(2.0 * f / c)
                        .meta_str("units", "sqrt(N/pi)"),
                );
            }
            Ok(rows)
        }
    }
}

// ---------------------------------------------------------------- cumulants

fn cumulant_rows_finite(
    pot: &RadialPotential,
    beta: u8,
    n: usize,
    p: usize,
    grid: &[f64],
) -> CmdResult {
    let quantity = format!("cumulant_k{p}");
    let bulk = planar::cumulant_bulk_limit(p.max(2))?;
    let mut rows = Vec::new();
    for &a in grid {
        let table = planar::moment_table(pot, n, beta, a)?;
        let kp = planar::cumulant_finite(&table, p)?.value;
        let mut row = OutputRow::new(&quantity, &format!("beta{beta}"), "finite_N", a)
            .analytic(kp)
            .meta_num("n", n as f64)
            .meta_str("potential", &pot.label);
        if a > 0.0 && a < pot.support_cutoff {
            if let Ok(dw) = pot.quarter_laplacian(a) {
                if dw > 0.0 && p >= 2 {
                    let scale = (2.0 / (n as f64 * dw)).sqrt();
                    row = row
                        .meta_num("scaled_value", scale * kp)
                        .meta_num("bulk_prediction", a * bulk);
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_cumulants(args: &CumulantArgs, config: &HashMap<String, String>) -> CmdResult {
    let preset = pick(&args.preset, config, "preset", |s| Some(s.to_string()));
    if let Some(name) = preset.as_deref() {
        if name != "fig7" {
            return Err(CmdError::Usage(format!("unknown cumulants preset '{name}'")));
        }
        let grid = parse_grid("0:1.2:25")?;
        let mut rows = Vec::new();
        for spec in ["ginse_gaussian", "truncated_unitary(0.2)"] {
            let pot = potentials::parse_potential(spec, config)?;
            for p in [3usize, 4] {
                rows.extend(cumulant_rows_finite(&pot, 4, 50, p, &grid)?);
            }
        }
        return Ok(rows);
    }
    let p = pick(&args.p, config, "p", |s| s.parse().ok())
        .ok_or_else(|| CmdError::Usage("--p is required".into()))?;
    let scale = pick(&args.scale, config, "scale", parse_scale).unwrap_or(Scale::FiniteN);
    let beta = pick(&args.beta, config, "beta", |s| s.parse().ok()).unwrap_or(4u8);
    match scale {
        Scale::FiniteN => {
            let n = pick(&args.n, config, "n", |s| s.parse().ok())
                .ok_or_else(|| CmdError::Usage("--n is required at finite scale".into()))?;
            let pot = match pick(&args.potential, config, "potential", |s| Some(s.to_string())) {
                Some(spec) => potentials::parse_potential(&spec, config)?,
                None => planar::builtin_potential(planar::BuiltinPotential::GinseGaussian)?,
            };
            for w in pot.suitability_warnings() {
                eprintln!("warning: {w}");
            }
            let grid = parse_grid(
                &pick(&args.grid, config, "grid", |s| Some(s.to_string()))
                    .ok_or_else(|| CmdError::Usage("--grid is required".into()))?,
            )?;
            cumulant_rows_finite(&pot, beta, n, p, &grid)
        }
        Scale::Origin => {
            let grid = parse_grid(
                &pick(&args.grid, config, "grid", |s| Some(s.to_string()))
                    .ok_or_else(|| CmdError::Usage("--grid is required".into()))?,
            )?;
            let mut rows = Vec::new();
            for &r in &grid {
                if r <= 0.0 {
                    continue;
                }
                let v = planar::cumulant_origin_ginse(r, p)?;
                rows.push(OutputRow::new(&format!("cumulant_k{p}"), "ginse", "origin", r).analytic(v));
            }
            Ok(rows)
        }
        Scale::Bulk => {
            let v = planar::cumulant_bulk_limit(p)?;
            Ok(vec![OutputRow::new(&format!("cumulant_k{p}"), "planar", "bulk", 0.0).analytic(v)])
        }
        Scale::Edge => {
            let grid = parse_grid(
                &pick(&args.grid, config, "grid", |s| Some(s.to_string()))
                    .ok_or_else(|| CmdError::Usage("--grid is required".into()))?,
            )?;
            let mut rows = Vec::new();
            for &s in &grid {
                let v = planar::cumulant_edge_limit(p, s)?;
                rows.push(OutputRow::new(&format!("cumulant_k{p}"), "planar", "edge", s).analytic(v));
            }
            Ok(rows)
        }
    }
}

// ---------------------------------------------------------------- simulate

struct SimPlan {
    kind: EnsembleKind,
    n: usize,
    samples: u64,
    seed: u64,
    radii: Vec<f64>,
    scale: CountScale,
    fast: bool,
    potential: Option<RadialPotential>,
}

fn simulate_plan(args: &SimulateArgs, config: &HashMap<String, String>) -> Result<SimPlan, CmdError> {
    let preset = pick(&args.preset, config, "preset", |s| Some(s.to_string()));
    let (kind, n, samples, radii, scale, fast) = match preset.as_deref() {
        Some("fig4") => (
            EnsembleKind::GinOE,
            150usize,
            4000u64,
            parse_grid("0.1:1.5:15")?,
            CountScale::FiniteN,
            false,
        ),
        Some("fig7") => (
            EnsembleKind::GinSE,
            50usize,
            1_000_000u64,
            parse_grid("0.05:1.2:24")?,
            CountScale::FiniteN,
            true,
        ),
        Some(other) => return Err(CmdError::Usage(format!("unknown simulate preset '{other}'"))),
        None => {
            let kind = ensemble_of(pick(&args.ensemble, config, "ensemble", |s| Some(s.to_string())))?;
            let n = pick(&args.n, config, "n", |s| s.parse().ok())
                .ok_or_else(|| CmdError::Usage("--n is required".into()))?;
            let samples = pick(&args.samples, config, "samples", |s| s.parse().ok())
                .ok_or_else(|| CmdError::Usage("--samples is required".into()))?;
            let radii = match (
                pick(&args.radii, config, "radii", |s| Some(s.to_string())),
                pick(&args.grid, config, "grid", |s| Some(s.to_string())),
            ) {
                (Some(r), _) => parse_radii(&r)?,
                (None, Some(g)) => parse_grid(&g)?,
                (None, None) => return Err(CmdError::Usage("--radii or --grid is required".into())),
            };
            let scale = match pick(&args.scale, config, "scale", parse_scale).unwrap_or(Scale::FiniteN) {
                Scale::FiniteN => CountScale::FiniteN,
                Scale::Origin => CountScale::Origin,
                other => {
                    return Err(CmdError::Usage(format!(
                        "simulate supports finite or origin scale, not '{}'",
                        other.label()
                    )))
                }
            };
            let fast = args.fast || config.get("fast").is_some_and(|v| v == "true" || v == "1");
            (kind, n, samples, radii, scale, fast)
        }
    };
    let seed = pick(&args.seed, config, "seed", |s| s.parse().ok()).unwrap_or(0);
    let potential = match pick(&args.potential, config, "potential", |s| Some(s.to_string())) {
        Some(spec) => Some(potentials::parse_potential(&spec, config)?),
        None => None,
    };
    Ok(SimPlan {
        kind,
        n,
        samples,
        seed,
        radii,
        scale,
        fast,
        potential,
    })
}

fn cmd_simulate(args: &SimulateArgs, config: &HashMap<String, String>) -> CmdResult {
    let plan = simulate_plan(args, config)?;
    let cfg = SimConfig {
        kind: plan.kind,
        n: plan.n,
        radii: plan.radii.clone(),
        scale: plan.scale,
        samples: plan.samples,
        seed: plan.seed,
        fast_bernoulli: plan.fast,
        potential: plan.potential.clone(),
    };
    let outcome = run_campaign(&cfg)?;
    if let Some(path) = &args.checkpoint {
        std::fs::write(path, outcome.acc.to_bytes())
            .map_err(|e| CmdError::Usage(format!("cannot write checkpoint: {e}")))?;
    }
    let reports = outcome.acc.report()?;
    let scale_label = plan.scale.label();
    let nf = plan.n as f64;

    // analytic side where available
    let pot = match (&plan.potential, plan.kind) {
        (Some(p), _) => Some(p.clone()),
        (None, EnsembleKind::GinUE | EnsembleKind::GinSE) => Some(gaussian_of(plan.kind)?),
        (None, EnsembleKind::GinOE) => None,
    };

    let mut rows = Vec::new();
    for rep in &reports {
        let radius = rep.radius;
        let a_eff = match plan.scale {
            CountScale::FiniteN => radius,
            CountScale::Origin => radius / nf.sqrt(),
        };
        let base = |q: &str| {
            OutputRow::new(q, plan.kind.label(), scale_label, radius)
                .meta_num("n", nf)
                .meta_num("samples", plan.samples as f64)
                .meta_num("seed", plan.seed as f64)
        };

        // mean
        let mean_formula = finite_n::mean_disc(plan.kind, plan.n, a_eff)?;
        let mut mean_row = base("mean")
            .mc(rep.total.mean, rep.total.se_mean)
            .analytic(mean_formula.value);
        if let Some(b) = mean_formula.breakdown {
            mean_row = mean_row
                .meta_num("analytic_mean_real", b.real_part)
                .meta_num("analytic_mean_complex", b.complex_part);
        }
        rows.push(mean_row);

        // variance (+ GinOE split)
        let mut var_row = base("variance").mc(rep.total.var, rep.total.se_var);
        match plan.kind {
            EnsembleKind::GinOE => {
                if plan.scale == CountScale::Origin {
                    let b = origin::var_origin_ginoe(radius)?;
                    var_row = var_row.analytic(b.total);
                    rows.push(
                        base("variance_real")
                            .mc(rep.real.var, rep.real.se_var)
                            .analytic(b.var_real),
                    );
                    rows.push(
                        base("variance_complex")
                            .mc(rep.complex.var, rep.complex.se_var)
                            .analytic(b.var_complex),
                    );
                    rows.push(
                        base("covariance_rc")
                            .mc(rep.cov_rc, rep.se_cov_rc)
                            .analytic(b.covariance),
                    );
                } else {
                    // bulk/outside conjecture values in units of sqrt(N/pi)
                    let unit = (nf / std::f64::consts::PI).sqrt();
                    var_row = var_row.meta_num(
                        "conjecture_total",
                        if a_eff < 1.0 { 2.0 * a_eff * unit } else { 0.0 },
                    );
                    rows.push(base("variance_real").mc(rep.real.var, rep.real.se_var));
                    rows.push(base("variance_complex").mc(rep.complex.var, rep.complex.se_var));
                    rows.push(base("covariance_rc").mc(rep.cov_rc, rep.se_cov_rc));
                }
            }
            _ => {
                if let Some(pot) = &pot {
                    let table = planar::moment_table(pot, plan.n, plan.kind.beta(), a_eff)?;
                    var_row = var_row.analytic(planar::cumulant_finite(&table, 2)?.value);
                    rows.push(
                        base("k3")
                            .mc(rep.total.k3, rep.total.se_k3)
                            .analytic(planar::cumulant_finite(&table, 3)?.value),
                    );
                    rows.push(
                        base("k4")
                            .mc(rep.total.k4, rep.total.se_k4)
                            .analytic(planar::cumulant_finite(&table, 4)?.value),
                    );
                }
            }
        }
        rows.push(var_row);
    }
    rows.push(
        OutputRow::new("campaign_failures", plan.kind.label(), scale_label, f64::NAN)
            .mc(outcome.failed_samples as f64, 0.0)
            .meta_num("redraws", outcome.redraws as f64),
    );
    Ok(rows)
}

// ---------------------------------------------------------------- verify

fn cmd_verify(args: &VerifyArgs) -> Result<bool, CmdError> {
    let results = run_identity_suite(FaultInjection {
        i1_offset: args.inject_i1,
    })?;
    let mut all_passed = true;
    println!("{:<36} {:>14} {:>10}  status", "identity", "residual", "tol");
    for r in &results {
        all_passed &= r.passed;
        println!(
            "{:<36} {:>14.3e} {:>10.1e}  {}",
            r.name,
            r.residual,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "{} identities, {}",
        results.len(),
        if all_passed { "all passed" } else { "FAILURES present" }
    );
    Ok(all_passed)
}

// ---------------------------------------------------------------- output

fn emit(rows: &[OutputRow], format: Format, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match format {
        Format::Csv => output::write_csv(rows, &mut buf)?,
        Format::Json => output::write_json(rows, &mut buf)?,
    }
    match out {
        Some(path) => std::fs::write(path, buf),
        None => std::io::stdout().write_all(&buf),
    }
}
