use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accretive::expr::{self, Env, Var};
use accretive::invariance::{certify_slow, SlowGrid};
use accretive::scenario::{run, RunOptions, Scenario};
use accretive::Error;
use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

mod validate;

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "accretive",
    version,
    about = "Simulate and certify invariance for accretive evolution problems"
)]
struct Cli {
    /// Only print failures and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Directory for CSV/SVG output.
    #[arg(long, env = "ACCRETIVE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Seed for sampling families; split per scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of time steps.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios: conditions, pointwise checks, time march, output.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: RunArgs,
        /// Run up to N scenarios at once.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
    },
    /// Structural and pointwise checks only, no time march.
    Check {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Certify that beta is slow near 0 with constant gamma.
    CertifySlow {
        /// Expression in x.
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: f64,
    },
    /// Cross-check the solvers against the reference oracles.
    Validate,
}

fn error_code(e: &Error) -> u8 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_INPUT
    }
}

/// Per-scenario seed, identical for serial and parallel runs.
fn split_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn run_one(path: &Path, opts: &RunOptions) -> (String, u8) {
    let result = Scenario::load(path).and_then(|s| run(&s, opts));
    match result {
        Ok(r) => {
            let code = r.exit_code() as u8;
            (r.summary(), code)
        }
        Err(e) => (format!("error: {e}\n"), error_code(&e)),
    }
}

fn cmd_run(files: &[PathBuf], args: &RunArgs, parallel: Option<usize>, quiet: bool) -> u8 {
    let opts_for = |i: usize| RunOptions {
        out_dir: args.out_dir.clone(),
        svg: args.svg,
        seed: args.seed.map(|s| split_seed(s, i)),
        steps: args.steps,
        conditions_only: false,
    };
    let results: Vec<(String, u8)> = match parallel {
        Some(n) if n > 1 && files.len() > 1 => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: cannot start thread pool: {e}");
                    return EXIT_INPUT;
                }
            };
            pool.install(|| {
                files
                    .par_iter()
                    .enumerate()
                    .map(|(i, f)| run_one(f, &opts_for(i)))
                    .collect()
            })
        }
        _ => files
            .iter()
            .enumerate()
            .map(|(i, f)| run_one(f, &opts_for(i)))
            .collect(),
    };
    let mut worst = 0;
    for (text, code) in results {
        if code >= EXIT_INPUT {
            eprint!("{text}");
        } else if !quiet || code != 0 {
            print!("{text}");
        }
        worst = worst.max(code);
    }
    worst
}

fn cmd_check(file: &Path, seed: Option<u64>, quiet: bool) -> u8 {
    let opts = RunOptions {
        seed,
        conditions_only: true,
        ..RunOptions::default()
    };
    let (text, code) = run_one(file, &opts);
    if code >= EXIT_INPUT {
        eprint!("{text}");
    } else if !quiet || code != 0 {
        print!("{text}");
    }
    code
}

fn cmd_certify_slow(beta: &str, gamma: f64, quiet: bool) -> u8 {
    let e = match expr::parse(beta) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("error: --beta: {err}");
            return EXIT_INPUT;
        }
    };
    if let Some(v) = e.variables().into_iter().find(|v| *v != Var::X) {
        eprintln!("error: --beta may only reference x, found '{}'", v.name());
        return EXIT_INPUT;
    }
    let beta = |x: f64| e.eval(&Env { x, ..Env::default() }).unwrap_or(f64::NAN);
    match certify_slow(beta, gamma, &SlowGrid::default()) {
        Ok(r) => {
            if !quiet || !r.is_certified() {
                println!("{r}");
            }
            if r.is_certified() {
                0
            } else {
                EXIT_FAIL
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INPUT
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { files, opts, parallel } => cmd_run(files, opts, *parallel, cli.quiet),
        Command::Check { file, seed } => cmd_check(file, *seed, cli.quiet),
        Command::CertifySlow { beta, gamma } => cmd_certify_slow(beta, *gamma, cli.quiet),
        Command::Validate => validate::run_all(cli.quiet),
    };
    ExitCode::from(code)
}
