//! Command-line front end. Results go to JSON/CSV files, a short summary to stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dict::{merge_close, ParameterTuple, DEFAULT_MERGE_DELTA};
use crate::error::Error;
use crate::greedy::{poafd, GreedyConfig, PolarGrid};
use crate::nbest::{evaluate_tuple, solve, ApproxResult, NBestConfig};
use crate::ortho::lic_check;
use crate::probes::{bvc_probe, dbvc_probe, vanishing_probe, BoundarySequence};
use crate::rational::{admissible, blaschke_form_of, tm_to_rational};
use crate::series::C64;
use crate::space::{SpaceKind, SpaceSpec, DEFAULT_R_MAX, DEFAULT_TRUNCATION};
use crate::targets::{complex_json, Builtin, TargetSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Degenerate(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSystem { .. } | Error::DegenerateTuple(_) | Error::EmptyGrid | Error::ZeroNorm => {
                CliError::Degenerate(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "rkhs-nbest", version, about = "Greedy and n-best kernel approximation on the unit disc")]
struct Cli {
    #[command(flatten)]
    space: SpaceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Hardy,
    Bergman,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[arg(long, global = true, value_enum, default_value = "hardy")]
    space: KindArg,
    /// Bergman weight exponent (alpha > -1)
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_R_MAX)]
    rmax: f64,
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// JSON file holding a target (or a previous output with a `target` key)
    #[arg(long, conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// Builtin target f1..f4
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Greedy pre-orthogonal adaptive decomposition
    Poafd {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Polar grid as RADIALxANGULAR
        #[arg(long, default_value = "64x128")]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Multi-start n-best approximation
    Nbest {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value = "64x128")]
        grid: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        max_cycles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Boundary-behaviour probes
    Probe {
        #[command(subcommand)]
        probe: ProbeCommand,
    },
    /// Structural checks
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Recompute the residual of a saved result against its target
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// Also evaluate the approximation at this point, given as `re,im`
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Convert a saved Hardy result into a p/q rational form and check admissibility
    ToRational {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ProbeArgs {
    /// Direction of the radial sequence
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Subcommand)]
enum ProbeCommand {
    /// |<E_z, E_w>| along a radial sequence
    Dbvc {
        /// Fixed point z as `re,im`
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        args: ProbeArgs,
    },
    /// |<f, E_w>| along a radial sequence
    Bvc {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        args: ProbeArgs,
    },
    /// |<f, B^w>| for the system of fixed points extended by w
    Vanishing {
        #[command(flatten)]
        target: TargetArgs,
        /// Fixed points as `re,im;re,im;...`
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        fixed: String,
        #[command(flatten)]
        args: ProbeArgs,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Smallest Gram eigenvalue of the normalized kernels at the given points
    Lic {
        /// Points as `re,im;re,im;...`
        #[arg(long, allow_hyphen_values = true)]
        points: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpaceJson {
    kind: KindArg,
    alpha: Option<f64>,
    truncation: usize,
    rmax: f64,
}

impl SpaceJson {
    fn build(&self) -> CliResult<SpaceSpec> {
        let kind = match self.kind {
            KindArg::Hardy => SpaceKind::Hardy,
            KindArg::Bergman => SpaceKind::WeightedBergman {
                alpha: self.alpha.ok_or_else(|| invalid("space.alpha is required for bergman"))?,
            },
        };
        Ok(SpaceSpec::new(kind, self.truncation, self.rmax)?)
    }
}

impl From<&SpaceArgs> for SpaceJson {
    fn from(a: &SpaceArgs) -> Self {
        Self {
            kind: a.space,
            alpha: (a.space == KindArg::Bergman).then_some(a.alpha),
            truncation: a.truncation,
            rmax: a.rmax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ResultJson {
    #[serde(with = "complex_json")]
    parameters: Vec<C64>,
    multiplicities: Vec<usize>,
    #[serde(with = "complex_json")]
    coefficients: Vec<C64>,
    residual_norm: f64,
    objective_trace: Vec<f64>,
    interior_margin: f64,
    gram_min_eig: f64,
}

impl From<&ApproxResult> for ResultJson {
    fn from(r: &ApproxResult) -> Self {
        Self {
            parameters: r.parameters.points().to_vec(),
            multiplicities: r.parameters.multiplicities().to_vec(),
            coefficients: r.coefficients.clone(),
            residual_norm: r.residual_norm,
            objective_trace: r.objective_trace.clone(),
            interior_margin: r.interior_margin,
            gram_min_eig: r.gram_min_eig,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RunJson {
    space: SpaceJson,
    target: TargetSpec,
    config: serde_json::Value,
    result: ResultJson,
}

fn parse_grid(s: &str, r_max: f64) -> CliResult<PolarGrid> {
    let (r, a) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| invalid(format!("--grid `{s}` must look like RADIALxANGULAR")))?;
    let r: usize = r.trim().parse().map_err(|_| invalid(format!("--grid radial count `{r}` is not an integer")))?;
    let a: usize = a.trim().parse().map_err(|_| invalid(format!("--grid angular count `{a}` is not an integer")))?;
    Ok(PolarGrid::chebyshev(r, a, r_max)?)
}

fn parse_point(s: &str) -> CliResult<C64> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re.trim().parse().map_err(|_| invalid(format!("point `{s}`: bad real part")))?;
    let im: f64 = im.trim().parse().map_err(|_| invalid(format!("point `{s}`: bad imaginary part")))?;
    Ok(C64::new(re, im))
}

fn parse_points(s: &str) -> CliResult<Vec<C64>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect()
}

fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_target(args: &TargetArgs) -> CliResult<TargetSpec> {
    match (&args.input, &args.builtin) {
        (Some(path), _) => {
            let mut value = read_json(path)?;
            if let Some(t) = value.get_mut("target") {
                value = t.take();
            }
            serde_json::from_value(value).map_err(|e| invalid(format!("{}: target: {e}", path.display())))
        }
        (None, Some(name)) => Ok(TargetSpec::Builtin(Builtin::parse(name)?)),
        (None, None) => Err(invalid("a target is required: pass --input FILE or --builtin f1..f4")),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

fn trace_csv(trace: &[f64]) -> String {
    let mut s = String::from("step,value\n");
    for (i, v) in trace.iter().enumerate() {
        let _ = writeln!(s, "{i},{v:e}");
    }
    s
}

fn emit_run(
    space: &SpaceArgs,
    target: TargetSpec,
    config: serde_json::Value,
    result: &ApproxResult,
    out: &OutputArgs,
) -> CliResult<()> {
    let json = RunJson {
        space: space.into(),
        target,
        config,
        result: result.into(),
    };
    if let Some(path) = &out.output {
        write_json(path, &json)?;
    }
    if let Some(path) = &out.csv {
        write_text(path, &trace_csv(&result.objective_trace))?;
    }
    println!("residual_norm = {:.12e}", result.residual_norm);
    for (k, (p, m)) in result.parameters.clusters().iter().enumerate() {
        println!("a[{k}] = {:+.9} {:+.9}i  (multiplicity {m})", p.re, p.im);
    }
    println!("interior_margin = {:.6}", result.interior_margin);
    Ok(())
}

fn probe_output(rows: &[(f64, Option<f64>)], args: &ProbeArgs) -> CliResult<()> {
    let mut csv = String::from("j,radius,value\n");
    for (j, (r, v)) in rows.iter().enumerate() {
        match v {
            Some(v) => writeln!(csv, "{j},{r},{v:e}"),
            None => writeln!(csv, "{j},{r},"),
        }
        .expect("writing to a string");
    }
    if let Some(path) = &args.out.csv {
        write_text(path, &csv)?;
    }
    if let Some(path) = &args.out.output {
        let values: Vec<serde_json::Value> = rows
            .iter()
            .map(|(r, v)| serde_json::json!({ "radius": r, "value": v }))
            .collect();
        write_json(path, &serde_json::json!({ "theta": args.theta, "values": values }))?;
    }
    print!("{csv}");
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    let space = SpaceJson::from(&cli.space).build()?;
    match cli.command {
        Command::Poafd { target, n, rho, grid, out } => {
            let t = load_target(&target)?;
            let f = t.series(&space)?;
            let cfg = GreedyConfig {
                rho,
                grid: parse_grid(&grid, space.r_max())?,
                ..GreedyConfig::new(&space, n)
            };
            let result = poafd(&f, &space, &cfg)?;
            let config = serde_json::json!({ "n": n, "rho": rho, "grid": grid });
            emit_run(&cli.space, t, config, &result, &out)
        }
        Command::Nbest {
            target,
            n,
            starts,
            grid,
            tol,
            max_cycles,
            seed,
            out,
        } => {
            let t = load_target(&target)?;
            let f = t.series(&space)?;
            let cfg = NBestConfig {
                starts,
                grid: parse_grid(&grid, space.r_max())?,
                tol_obj: tol,
                max_cycles,
                seed,
                ..NBestConfig::new(&space, n)
            };
            let result = solve(&f, &space, &cfg)?;
            let config = serde_json::json!({
                "n": n, "starts": starts, "grid": grid, "tol": tol, "max_cycles": max_cycles, "seed": seed,
            });
            emit_run(&cli.space, t, config, &result, &out)
        }
        Command::Probe { probe } => match probe {
            ProbeCommand::Dbvc { point, args } => {
                let z = parse_point(&point)?;
                space.check_parameter(z)?;
                let seq = BoundarySequence::radial(args.theta, space.r_max())?;
                let values = dbvc_probe(&space, z, &seq)?;
                let rows: Vec<_> = seq.radii().into_iter().zip(values.into_iter().map(Some)).collect();
                probe_output(&rows, &args)
            }
            ProbeCommand::Bvc { target, args } => {
                let f = load_target(&target)?.series(&space)?;
                let seq = BoundarySequence::radial(args.theta, space.r_max())?;
                let values = bvc_probe(&f, &space, &seq)?;
                let rows: Vec<_> = seq.radii().into_iter().zip(values.into_iter().map(Some)).collect();
                probe_output(&rows, &args)
            }
            ProbeCommand::Vanishing { target, fixed, args } => {
                let f = load_target(&target)?.series(&space)?;
                let fixed = ParameterTuple::new(parse_points(&fixed)?);
                fixed.check_domain(&space)?;
                let seq = BoundarySequence::radial(args.theta, space.r_max())?;
                let values = vanishing_probe(&f, &space, &fixed, &seq)?;
                let rows: Vec<_> = seq.radii().into_iter().zip(values).collect();
                probe_output(&rows, &args)
            }
        },
        Command::Check {
            check: CheckCommand::Lic { points },
        } => {
            let tuple = ParameterTuple::new(parse_points(&points)?);
            tuple.check_domain(&space)?;
            println!("lic_min_eig = {:e}", lic_check(&space, &tuple)?);
            Ok(())
        }
        Command::Eval { input, point } => {
            let (run, space, f) = load_run(&input)?;
            let tuple = ParameterTuple::new(run.result.parameters.clone());
            let result = evaluate_tuple(&f, &space, &tuple)?;
            println!("residual_norm = {:.15e}", result.approx.residual_norm);
            println!("reported      = {:.15e}", run.result.residual_norm);
            if let Some(p) = point {
                let z = parse_point(&p)?;
                let approx = (&f - &result.residual).evaluate(z)?;
                println!("approximation({}) = {:+.15e} {:+.15e}i", p, approx.re, approx.im);
            }
            Ok(())
        }
        Command::ToRational { input, output } => {
            let (run, space, f) = load_run(&input)?;
            let tuple = merge_close(&ParameterTuple::new(run.result.parameters.clone()), DEFAULT_MERGE_DELTA);
            let result = evaluate_tuple(&f, &space, &tuple)?;
            let form = blaschke_form_of(&f, &space, &result.approx)?;
            let rational = tm_to_rational(&form)?;
            let report = admissible(&rational, form.n());
            let json = serde_json::json!({
                "p": rational.p.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "q": rational.q.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "n_degenerate": form.is_n_degenerate(),
                "admissible": report.is_admissible(),
                "resultant": report.resultant,
                "min_root_modulus": report.min_root_modulus,
                "failures": report.failures,
            });
            if let Some(path) = output {
                write_json(&path, &json)?;
            }
            println!("admissible = {}", report.is_admissible());
            for f in &report.failures {
                println!("  {f}");
            }
            Ok(())
        }
    }
}

fn load_run(path: &Path) -> CliResult<(RunJson, SpaceSpec, crate::series::PowerSeries)> {
    let run: RunJson =
        serde_json::from_value(read_json(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let space = run.space.build()?;
    let f = run.target.series(&space)?;
    if run.result.parameters.len() != run.result.multiplicities.len() {
        return Err(invalid("result.multiplicities must match result.parameters"));
    }
    Ok((run, space, f))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_VALIDATION
        }
        Err(CliError::Degenerate(msg)) => {
            eprintln!("degenerate: {msg}");
            EXIT_DEGENERATE
        }
    }
}
