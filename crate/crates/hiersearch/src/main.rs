use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hiersearch::config::{ExperimentConfig, Method, SearchParams, FUNCTION_OMEGA};
use hiersearch::exec::{ExecMode, Rayon};
use hiersearch::harness::{run_experiment, run_method, write_csv};
use hiersearch::output::{write_hierarchy, write_report, write_trace};
use hiersearch::{HarnessError, Problem};
use hiersearch_core::benchmarks::registry;
use hiersearch_core::{build_hierarchy, hierarchy_stats, CapacityPolicy, Sequential, TerminalDefaults};

#[derive(Parser)]
#[command(name = "hiersearch", version, about = "Hierarchical collaborative hyperparameter search")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one search and print its report as JSON.
    Run {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value = "hiersearch")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a per-iteration CSV trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the agent hierarchy as JSON to this file.
        #[arg(long)]
        dump_tree: Option<PathBuf>,
    },
    /// Run the experiment described by a JSON config and write CSV.
    Sweep {
        config: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compare all methods on one objective and write CSV.
    Compare {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Benchmark registry.
    Bench {
        #[command(subcommand)]
        action: BenchCmd,
    },
    /// Print the agent hierarchy for an objective as JSON.
    DumpTree {
        #[arg(long)]
        objective: String,
        #[arg(long, default_value_t = 2)]
        connections: usize,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// List benchmark keys with their known optima.
    List,
}

#[derive(Args)]
struct SearchArgs {
    /// Benchmark key such as `rastrigin-6d`, or `file:<problem.json>`.
    #[arg(long)]
    objective: String,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 3)]
    budget: usize,
    #[arg(long, default_value_t = 2)]
    connections: usize,
    /// Width exponent; the slot width is 2^(-omega-1).
    #[arg(long, default_value_t = FUNCTION_OMEGA, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
}

impl SearchArgs {
    fn params(&self) -> SearchParams {
        SearchParams {
            iterations: self.iters,
            budget: self.budget,
            connections: self.connections,
            omega: self.omega,
            delta: self.delta,
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cmd: Cmd) -> Result<(), HarnessError> {
    let mode = ExecMode::from_env()?;
    match cmd {
        Cmd::Run { search, method, seed, trace, dump_tree } => {
            let method: Method = method.parse()?;
            let params = search.params();
            params.validate()?;
            let problem = Problem::resolve(&search.objective)?;
            let space = problem.space();
            if let Some(path) = &dump_tree {
                let defaults = TerminalDefaults::uniform(params.budget, params.eps(), params.delta);
                let h = build_hierarchy(&space, &CapacityPolicy::Uniform(params.connections), &defaults)?;
                write_hierarchy(&h, BufWriter::new(File::create(path)?))?;
            }
            let objective = problem.instantiate(seed);
            let report = match mode {
                ExecMode::Sequential => run_method(&space, objective.as_ref(), method, &params, seed, &Sequential)?,
                _ => mode.install(|| run_method(&space, objective.as_ref(), method, &params, seed, &Rayon))??,
            };
            if let Some(path) = &trace {
                write_trace(&report, BufWriter::new(File::create(path)?))?;
            }
            write_report(&space, &report, io::stdout().lock())
        }
        Cmd::Sweep { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let summaries = run_experiment(&cfg, mode)?;
            write_csv(&summaries, output(out.as_ref())?)
        }
        Cmd::Compare { search, trials, seed, out } => {
            let cfg = ExperimentConfig::new(search.objective.clone(), Method::ALL.to_vec(), search.params(), trials, seed);
            let summaries = run_experiment(&cfg, mode)?;
            write_csv(&summaries, output(out.as_ref())?)
        }
        Cmd::Bench { action: BenchCmd::List } => {
            let mut out = io::stdout().lock();
            writeln!(out, "{:<20} {:>4} {:>16}", "key", "dims", "optimum")?;
            for b in registry() {
                let optimum = format!("{:.6}", b.known_optimum);
                writeln!(out, "{:<20} {:>4} {:>16}", b.key, b.dimension, optimum)?;
            }
            Ok(())
        }
        Cmd::DumpTree { objective, connections } => {
            let params = SearchParams { connections, ..SearchParams::default() };
            params.validate()?;
            let space = Problem::resolve(&objective)?.space();
            let defaults = TerminalDefaults::uniform(params.budget, params.eps(), params.delta);
            let h = build_hierarchy(&space, &CapacityPolicy::Uniform(connections), &defaults)?;
            let stats = hierarchy_stats(&h);
            log::info!("depth {}, {} nodes, {} terminals", stats.depth, stats.total_nodes, stats.terminal_count);
            write_hierarchy(&h, io::stdout().lock())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
