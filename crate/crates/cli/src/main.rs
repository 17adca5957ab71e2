use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use densitylab_cli::verify::{run_verify_corpus, VerifySizes};
use densitylab_cli::{
    run_compare, run_density, run_gadget, run_swf, write_prefix_csv, CliError, GadgetRequest,
    OutputFormat, Report, RunConfig, DEFAULT_CHECKPOINT_MAX, DEFAULT_HORIZON,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "densitylab",
    version,
    about = "Exact densities, Pareto dominance and welfare functions on symbolic streams"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Prefix length for decisions that fall back to scanning.
    #[arg(long, global = true, env = "DENSITYLAB_HORIZON", default_value_t = DEFAULT_HORIZON)]
    horizon: u64,
    /// Largest factorial checkpoint used for density evidence.
    #[arg(long, global = true, default_value_t = DEFAULT_CHECKPOINT_MAX)]
    checkpoint_max: u64,
    /// json, csv or text.
    #[arg(long, global = true, default_value = "json")]
    output: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for `verify`.
    #[arg(long, global = true, default_value_t = 4)]
    parallelism: usize,
    /// Adds wall-clock time to the report, which makes output run-dependent.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper asymptotic density of a set expression.
    Density { set: String },
    /// Decides a dominance axiom for a pair of streams.
    Compare {
        #[arg(long)]
        axiom: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Evaluates a welfare function, and the induced order when `--y` is given.
    Swf {
        #[arg(long)]
        which: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Builds and checks a gadget.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
        /// Directory for per-stream prefix CSV files.
        #[arg(long, global = true)]
        csv_dir: Option<PathBuf>,
        #[arg(long, global = true, default_value_t = 64)]
        csv_len: u64,
    },
    /// Runs the randomized verification suites.
    Verify {
        #[arg(long)]
        density_sets: Option<usize>,
        #[arg(long)]
        chain_pairs: Option<usize>,
        #[arg(long)]
        anonymity_streams: Option<usize>,
        #[arg(long)]
        window_pairs: Option<usize>,
        #[arg(long)]
        gadget_thresholds: Option<u64>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Threshold gadget; with a second threshold, the comparison between them.
    Lemma1 {
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        s: Option<String>,
        /// Explicit finite base for the first gadget, e.g. `1,2,3,4,7`.
        #[arg(long)]
        base_r: Option<String>,
        #[arg(long)]
        base_s: Option<String>,
    },
    /// Block gadget over a sequence prefix (`--t ""` is the naturals).
    Lemma2 {
        #[arg(long, default_value = "")]
        t: String,
        #[arg(long)]
        case: String,
        #[arg(long)]
        m: Option<u64>,
    },
    /// The exact block inequality for a prefix and `m`.
    Inequality {
        #[arg(long)]
        t: String,
        #[arg(long)]
        m: u64,
    },
    /// Block counts compared with a direct scan.
    Blocks {
        #[arg(long, default_value = "")]
        t: String,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

fn emit<T: Serialize>(mut report: Report<T>, started: Option<Instant>) {
    report.timing_ms = started.map(|s| s.elapsed().as_millis() as u64);
    print!("{}", report.render());
}

fn fail(e: &CliError) -> ExitCode {
    let body = ErrorBody {
        code: e.code(),
        message: e.to_string(),
    };
    eprintln!(
        "{}",
        serde_json::to_string(&body).expect("errors serialize")
    );
    ExitCode::from(2)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = cli.global;
    let config = RunConfig {
        horizon: g.horizon,
        checkpoint_max: g.checkpoint_max,
        output: g.output.parse::<OutputFormat>()?,
        seed: g.seed,
        parallelism: g.parallelism,
    };
    config.validate()?;
    let started = g.timing.then(Instant::now);
    let command: Vec<String> = std::env::args().skip(1).collect();
    let ok = |pass: bool| {
        if pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    };
    match cli.command {
        Command::Density { set } => {
            let out = run_density(&set, &config)?;
            emit(Report::new(command, &config, out), started);
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { axiom, x, y } => {
            let out = run_compare(&axiom, &x, &y, &config)?;
            emit(Report::new(command, &config, out), started);
            Ok(ExitCode::SUCCESS)
        }
        Command::Swf {
            which,
            x,
            y,
            delta,
            tol,
        } => {
            let out = run_swf(
                &which,
                &x,
                y.as_deref(),
                delta.as_deref(),
                tol.as_deref(),
                &config,
            )?;
            emit(Report::new(command, &config, out), started);
            Ok(ExitCode::SUCCESS)
        }
        Command::Gadget {
            which,
            csv_dir,
            csv_len,
        } => {
            let req = match which {
                GadgetCommand::Lemma1 {
                    r,
                    s,
                    base_r,
                    base_s,
                } => GadgetRequest::Lemma1 {
                    r,
                    s,
                    base_r,
                    base_s,
                },
                GadgetCommand::Lemma2 { t, case, m } => GadgetRequest::Lemma2 { t, case, m },
                GadgetCommand::Inequality { t, m } => GadgetRequest::Inequality { t, m },
                GadgetCommand::Blocks { t, m } => GadgetRequest::Blocks { t, m },
            };
            let out = run_gadget(&req, &config)?;
            if let Some(dir) = csv_dir {
                for path in write_prefix_csv(&out, &dir, csv_len)? {
                    eprintln!("wrote {path}");
                }
            }
            let pass = out.passed();
            emit(Report::new(command, &config, out), started);
            Ok(ok(pass))
        }
        Command::Verify {
            density_sets,
            chain_pairs,
            anonymity_streams,
            window_pairs,
            gadget_thresholds,
            inject_fault,
        } => {
            let d = VerifySizes::default();
            let sizes = VerifySizes {
                density_sets: density_sets.unwrap_or(d.density_sets),
                chain_pairs: chain_pairs.unwrap_or(d.chain_pairs),
                gadget_thresholds: gadget_thresholds.unwrap_or(d.gadget_thresholds),
                anonymity_streams: anonymity_streams.unwrap_or(d.anonymity_streams),
                window_pairs: window_pairs.unwrap_or(d.window_pairs),
            };
            let out = run_verify_corpus(&config, &sizes, inject_fault)?;
            let pass = out.passed();
            emit(Report::new(command, &config, out), started);
            Ok(ok(pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
