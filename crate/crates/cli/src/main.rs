//! `blockline`: block partitions, line transversals and planar grid sequences.
//!
//! Results go to stdout as JSON. Bad input exits with status 2 and prints
//! `{"error": <code>, "detail": <text>}` to stderr; internal failures exit
//! with status 1. `BLOCKLINE_THREADS` caps the worker threads.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockline::blocks::{oracle_min_spread, partition, BlockInstance, DEFAULT_ORACLE_CAP};
use blockline::construct2d::{
    build_theorem3, claim1_transversal, jump_sequence, optimality_warnings, trivial_transversal,
    ConstructionParams, GridSequence2D,
};
use blockline::geom2d::{NormKind, Transversal2D, Vec2, MEMBER_TOL};
use blockline::optimize2d::{local_search, min_triangle_diameter, InitialKind, SearchConfig};
use blockline::transversal1d::{solve, solve_exact_finite, GridSequence1D, DEFAULT_EPS};
use blockline::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "blockline",
    version,
    about = "Balanced block partitions and low-spread transversals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split values into n contiguous blocks whose sizes differ by at most 1.
    Blocks {
        /// Number of blocks.
        #[arg(long)]
        n: usize,
        /// Values file: one number per line, or a JSON array.
        #[arg(long)]
        input: PathBuf,
        /// Also report the exhaustive minimum spread.
        #[arg(long)]
        oracle: bool,
        /// Divide the values by their maximum first.
        #[arg(long)]
        scale: bool,
        /// Largest number of boundary tuples the oracle may enumerate.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u128,
    },
    /// Exhaustive minimum-spread partition.
    Oracle {
        /// Number of blocks.
        #[arg(long)]
        n: usize,
        /// Values file: one number per line, or a JSON array.
        #[arg(long)]
        input: PathBuf,
        /// Divide the values by their maximum first.
        #[arg(long)]
        scale: bool,
        /// Largest number of boundary tuples to enumerate.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u128,
    },
    /// Low-spread transversal of a sequence of closed sets on the line.
    Transversal1d {
        /// Sequence JSON.
        #[arg(long)]
        input: PathBuf,
        /// Bisection tolerance on the window offset.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Use the exact solver for finite point sets.
        #[arg(long)]
        exact: bool,
    },
    /// Planar grid-like sequences.
    Grid2d {
        #[command(subcommand)]
        command: Grid2dCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Euclidean,
    Linf,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Euclidean => NormKind::Euclidean,
            NormArg::Linf => NormKind::Maximum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Trivial,
    Claim1,
    Random,
}

impl From<InitArg> for InitialKind {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Trivial => InitialKind::Trivial,
            InitArg::Claim1 => InitialKind::Claim1,
            InitArg::Random => InitialKind::Random,
        }
    }
}

#[derive(Subcommand)]
enum Grid2dCommand {
    /// Write the two-arm sequence with 2m + 2 sets.
    Generate {
        /// Size parameter, at least 2.
        #[arg(long)]
        m: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The explicit two-arm transversal.
    Claim1 {
        /// Size parameter, at least 2.
        #[arg(long)]
        m: usize,
    },
    /// Nearest points to the straight path from 0 to s.
    Trivial {
        /// Sequence JSON.
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        norm: NormArg,
    },
    /// Check a transversal and report its diameter and jumps.
    Eval {
        /// Sequence JSON.
        #[arg(long)]
        seq: PathBuf,
        /// Points as a JSON array of [x, y], or an object with a "transversal" field.
        #[arg(long)]
        transversal: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        norm: NormArg,
    },
    /// Randomized local search for a small diameter.
    Optimize {
        /// Sequence JSON.
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        norm: NormArg,
        #[arg(long, default_value_t = SearchConfig::default().restarts)]
        restarts: usize,
        /// Moves per restart.
        #[arg(long, default_value_t = SearchConfig::default().iterations)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "trivial")]
        init: InitArg,
    },
    /// Minimum diameter of the constrained triangle.
    Triangle {
        #[arg(long)]
        delta: f64,
    },
}

enum Failure {
    Input(&'static str, String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.code(), e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input("IoError", format!("{}: {e}", path.display())))
}

fn read_values(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| Failure::from(Error::from(e)));
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Failure::from(Error::Parse(format!("{l:?}: {e}"))))
        })
        .collect()
}

fn instance(path: &Path, n: usize, scale: bool) -> Result<(BlockInstance, f64), Failure> {
    let values = read_values(path)?;
    Ok(if scale {
        BlockInstance::scaled(&values, n)?
    } else {
        (BlockInstance::new(values, n)?, 1.0)
    })
}

fn read_seq2d(path: &Path) -> Result<GridSequence2D, Failure> {
    Ok(GridSequence2D::from_json(&read(path)?)?)
}

fn read_transversal(path: &Path) -> Result<Transversal2D, Failure> {
    let value: Value = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    let points = match value {
        Value::Object(mut map) => {
            match map.remove("transversal").or_else(|| map.remove("points")) {
                Some(p) => p,
                None => return Err(Error::Parse("expected a \"transversal\" field".into()).into()),
            }
        }
        other => other,
    };
    let points: Vec<Vec2> = serde_json::from_value(points).map_err(Error::from)?;
    Ok(Transversal2D::new(points))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn jumps_if_labeled(seq: &GridSequence2D, t: &Transversal2D) -> Result<(Value, Value), Failure> {
    if seq.is_labeled() {
        Ok((
            to_json(&jump_sequence(seq, t)?),
            to_json(&optimality_warnings(seq, t)?),
        ))
    } else {
        Ok((json!([]), json!([])))
    }
}

fn run(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Blocks {
            n,
            input,
            oracle,
            scale,
            cap,
        } => {
            let (inst, factor) = instance(&input, n, scale)?;
            let part = partition(&inst)?;
            let mut out = to_json(&part);
            out["config"] = json!({ "n": n, "oracle": oracle, "scale": scale, "cap": cap });
            out["scale_factor"] = json!(factor);
            if oracle {
                let (best, _) = oracle_min_spread(&inst, cap)?;
                out["oracle_spread"] = json!(best);
            }
            Ok(out)
        }
        Command::Oracle {
            n,
            input,
            scale,
            cap,
        } => {
            let (inst, factor) = instance(&input, n, scale)?;
            let (_, witness) = oracle_min_spread(&inst, cap)?;
            let mut out = to_json(&witness);
            out["config"] = json!({ "n": n, "scale": scale, "cap": cap });
            out["scale_factor"] = json!(factor);
            Ok(out)
        }
        Command::Transversal1d { input, eps, exact } => {
            let seq = GridSequence1D::from_json(&read(&input)?)?;
            let t = if exact {
                solve_exact_finite(&seq)?
            } else {
                solve(&seq, eps)?
            };
            let mut out = to_json(&t.report());
            out["config"] = json!({ "eps": eps, "exact": exact });
            Ok(out)
        }
        Command::Grid2d { command } => run_grid2d(command),
    }
}

fn run_grid2d(command: Grid2dCommand) -> Result<Value, Failure> {
    match command {
        Grid2dCommand::Generate { m, out } => {
            let p = ConstructionParams::new(m)?;
            let seq = to_json(&build_theorem3(p));
            match out {
                None => Ok(seq),
                Some(path) => {
                    let text = serde_json::to_string(&seq).expect("serializable output");
                    std::fs::write(&path, text + "\n").map_err(|e| {
                        Failure::Input("IoError", format!("{}: {e}", path.display()))
                    })?;
                    Ok(json!({
                        "config": { "m": m },
                        "out": path.display().to_string(),
                        "n": p.n(),
                        "delta": p.delta(),
                    }))
                }
            }
        }
        Grid2dCommand::Claim1 { m } => {
            let p = ConstructionParams::new(m)?;
            let t = claim1_transversal(p)?;
            let jumps = jump_sequence(&build_theorem3(p), &t)?;
            Ok(json!({
                "config": { "m": m, "norm": NormKind::Euclidean },
                "transversal": t.points,
                "z": t.z(),
                "diameter": t.diameter(NormKind::Euclidean),
                "jumps": jumps,
            }))
        }
        Grid2dCommand::Trivial { seq, norm } => {
            let seq = read_seq2d(&seq)?;
            let norm = NormKind::from(norm);
            let t = trivial_transversal(&seq, norm)?;
            Ok(json!({
                "config": { "norm": norm },
                "transversal": t.points,
                "z": t.z(),
                "diameter": t.diameter(norm),
            }))
        }
        Grid2dCommand::Eval {
            seq,
            transversal,
            norm,
        } => {
            let seq = read_seq2d(&seq)?;
            let t = read_transversal(&transversal)?;
            let norm = NormKind::from(norm);
            seq.verify(&t, MEMBER_TOL)?;
            let (jumps, warnings) = jumps_if_labeled(&seq, &t)?;
            Ok(json!({
                "config": { "norm": norm },
                "diameter": t.diameter(norm),
                "z": t.z(),
                "jumps": jumps,
                "warnings": warnings,
            }))
        }
        Grid2dCommand::Optimize {
            seq,
            norm,
            restarts,
            iters,
            seed,
            init,
        } => {
            let seq = read_seq2d(&seq)?;
            let norm = NormKind::from(norm);
            let cfg = SearchConfig {
                restarts,
                iterations: iters,
                seed,
                initial: init.into(),
            };
            let best = local_search(&seq, norm, &cfg)?;
            let (jumps, warnings) = jumps_if_labeled(&seq, &best.transversal)?;
            Ok(json!({
                "config": {
                    "norm": norm,
                    "restarts": cfg.restarts,
                    "iters": cfg.iterations,
                    "seed": cfg.seed,
                    "init": cfg.initial,
                },
                "best_diameter": best.diameter,
                "restart": best.restart,
                "transversal": best.transversal.points,
                "jumps": jumps,
                "warnings": warnings,
            }))
        }
        Grid2dCommand::Triangle { delta } => {
            let tri = min_triangle_diameter(delta)?;
            let mut out = to_json(&tri);
            out["config"] = json!({ "delta": delta });
            Ok(out)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("BLOCKLINE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Input(
            "ValidationError",
            format!("BLOCKLINE_THREADS={raw:?} is not a positive integer"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(out) => {
            let text = serde_json::to_string(&out).expect("serializable output");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(code, detail)) => {
            eprintln!("{}", json!({ "error": code, "detail": detail }));
            ExitCode::from(2)
        }
        Err(Failure::Internal(detail)) => {
            eprintln!("{}", json!({ "error": "InternalError", "detail": detail }));
            ExitCode::from(1)
        }
    }
}
