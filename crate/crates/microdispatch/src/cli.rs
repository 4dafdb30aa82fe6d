//! Command-line front-end. The binary in `src/main.rs` is a one-line shim
//! around [`main`].
//!
//! Exit codes: 0 on success, 1 for usage or case-validation errors, 2 for
//! runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::evaluate::EvalError;
use crate::grid::{load_case, validate_radial, DerKindTag, GridError};
use crate::pipeline::{
    self, compare_modes, run_study, Mode, PipelineError, RunConfig,
};
use crate::uncertainty::{
    generate_scenarios, read_scenarios_csv, reduce_scenarios, write_scenarios_csv,
    UncertaintyError,
};

#[derive(Debug, Parser)]
#[command(
    name = "microdispatch",
    version,
    about = "Scenario-based stochastic day-ahead scheduling of grid-connected microgrids"
)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true, env = "MICRODISPATCH_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a case file and print a summary.
    Validate {
        /// Case file (JSON).
        #[arg(long)]
        case: PathBuf,
    },
    /// Generate Monte Carlo scenarios and write them as CSV.
    Scenarios {
        #[arg(long)]
        case: PathBuf,
        /// Number of scenarios to sample.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Backward-reduce a scenario CSV to a target count.
    Reduce {
        /// Input scenario CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of scenarios to keep.
        #[arg(long, default_value_t = 30)]
        to: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full study and write all artifacts to a directory.
    Dispatch(DispatchArgs),
    /// Re-render the CSV summaries from a study directory and print a recap.
    Report {
        /// Study output directory containing report.json.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run both modes over several seeds and tabulate out-of-sample results.
    Compare {
        #[arg(long)]
        case: PathBuf,
        /// Comma-separated seed list, e.g. "1,2,3".
        #[arg(long)]
        seeds: String,
        /// Output directory for comparison.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        scenarios: usize,
        #[arg(long = "reduce-to", default_value_t = 30)]
        reduce_to: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        /// Out-of-sample scenario count.
        #[arg(long, default_value_t = 1000)]
        oos: usize,
    },
}

#[derive(Debug, Args)]
struct DispatchArgs {
    #[arg(long)]
    case: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of scenarios to generate for training.
    #[arg(long, default_value_t = 1000)]
    scenarios: usize,
    /// Training-set size after backward reduction.
    #[arg(long = "reduce-to", default_value_t = 30)]
    reduce_to: usize,
    /// Optimizer iteration cap.
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Objective weights H1 H2 (default: from the case file).
    #[arg(long, num_args = 2, value_names = ["H1", "H2"])]
    weights: Option<Vec<f64>>,
    /// Optimize against the single forecast scenario instead.
    #[arg(long)]
    deterministic: bool,
    /// Out-of-sample scenario count.
    #[arg(long, default_value_t = 1000)]
    oos: usize,
    /// Initial optimizer population.
    #[arg(long, default_value_t = 20)]
    population: usize,
    /// Stream optimizer progress to stderr.
    #[arg(long)]
    trace: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };

    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 1 for input-validation problems, 2 for runtime failures.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(grid) = err.downcast_ref::<GridError>() {
        return match grid {
            GridError::Io(_) => 2,
            _ => 1,
        };
    }
    if let Some(unc) = err.downcast_ref::<UncertaintyError>() {
        return match unc {
            UncertaintyError::Io(_) | UncertaintyError::Csv(_) => 2,
            _ => 1,
        };
    }
    if err.downcast_ref::<EvalError>().is_some() {
        return 1;
    }
    if let Some(pipe) = err.downcast_ref::<PipelineError>() {
        return match pipe {
            PipelineError::Grid(g) => match g {
                GridError::Io(_) => 2,
                _ => 1,
            },
            PipelineError::BadConfig(_) => 1,
            PipelineError::Uncertainty(u) => match u {
                UncertaintyError::Io(_) | UncertaintyError::Csv(_) => 2,
                _ => 1,
            },
            PipelineError::Eval(_) => 1,
            _ => 2,
        };
    }
    2
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Validate { case } => {
            let case = load_case(&case)?;
            let order = validate_radial(&case)?;
            let n_branches = order.len();
            println!(
                "{} buses, {} {}, radial: ok",
                case.buses.len(),
                n_branches,
                if n_branches == 1 { "branch" } else { "branches" }
            );
            println!(
                "horizon: {} steps of {} h; root bus {} (slack {:.3} pu)",
                case.horizon.steps,
                case.horizon.dt,
                case.buses[case.root()].id,
                case.base.slack_voltage_pu
            );
            let fleet: Vec<String> = [
                DerKindTag::Wt,
                DerKindTag::Pv,
                DerKindTag::Chp,
                DerKindTag::Ess,
            ]
            .iter()
            .map(|&k| format!("{} {k}", case.units_of_kind(k).len()))
            .collect();
            println!("DER fleet: {}", fleet.join(", "));
            Ok(())
        }
        Command::Scenarios { case, n, seed, out } => {
            let case = load_case(&case)?;
            let set = generate_scenarios(&case, n, seed)?;
            write_scenarios_csv(&set, &out)?;
            println!("wrote {} scenarios x {} hours to {}", set.len(), set.steps, out.display());
            Ok(())
        }
        Command::Reduce { input, to, out } => {
            let set = read_scenarios_csv(&input)?;
            let reduced = reduce_scenarios(&set, to)?;
            write_scenarios_csv(&reduced, &out)?;
            println!(
                "reduced {} scenarios to {} (total probability {:.12})",
                set.len(),
                reduced.len(),
                reduced.total_probability()
            );
            Ok(())
        }
        Command::Dispatch(args) => {
            let mut cfg = RunConfig::new(args.case, args.seed);
            cfg.n_generate = args.scenarios;
            cfg.n_reduced = args.reduce_to.min(args.scenarios);
            cfg.n_out_of_sample = args.oos;
            cfg.mode = if args.deterministic {
                Mode::Deterministic
            } else {
                Mode::Stochastic
            };
            cfg.coa.max_iterations = args.iters;
            cfg.coa.n_initial = args.population;
            cfg.weights_override = args
                .weights
                .as_ref()
                .map(|w| (w[0], w[1]));
            let result = run_study(&cfg, &args.out)?;
            if args.trace {
                eprintln!("iteration,best_fitness,mean_fitness,evaluations");
                for s in &result.optimizer.history {
                    eprintln!(
                        "{},{},{},{}",
                        s.iteration, s.best_fitness, s.mean_fitness, s.evaluations
                    );
                }
            }
            println!(
                "{} study finished in {:.1?}: best Z = {:.4}, out-of-sample Z = {:.4}",
                result.mode,
                result.wall_clock,
                result.optimizer.best_fitness,
                result.out_of_sample.z
            );
            println!("artifacts in {}", args.out.display());
            Ok(())
        }
        Command::Report { input } => {
            let report = pipeline::rerender_reports(&input)?;
            let stdout = std::io::stdout();
            pipeline::summarize(&report, &mut stdout.lock())?;
            Ok(())
        }
        Command::Compare {
            case,
            seeds,
            out,
            scenarios,
            reduce_to,
            iters,
            oos,
        } => {
            let seeds = parse_seeds(&seeds)?;
            let mut cfg = RunConfig::new(case, 0);
            cfg.n_generate = scenarios;
            cfg.n_reduced = reduce_to.min(scenarios);
            cfg.n_out_of_sample = oos;
            cfg.coa.max_iterations = iters;
            let comparison = compare_modes(&cfg, &seeds)?;
            std::fs::create_dir_all(&out)?;
            pipeline::write_comparison_csv(&comparison, &out.join("comparison.csv"))?;
            println!("seed  stochastic_oos_z  deterministic_oos_z");
            for row in &comparison.rows {
                println!(
                    "{:<5} {:<17.4} {:<.4}",
                    row.seed, row.stochastic_out_of_sample_z, row.deterministic_out_of_sample_z
                );
            }
            println!(
                "mean  {:<17.4} {:<.4}",
                comparison.mean_stochastic_out_of_sample_z,
                comparison.mean_deterministic_out_of_sample_z
            );
            Ok(())
        }
    }
}

fn parse_seeds(text: &str) -> anyhow::Result<Vec<u64>> {
    let seeds: Result<Vec<u64>, _> = text
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect();
    let seeds = seeds.map_err(|e| anyhow::anyhow!("bad --seeds list {text:?}: {e}"))?;
    if seeds.is_empty() {
        anyhow::bail!("--seeds list is empty");
    }
    Ok(seeds)
}
