//! Command-line driver: profile generation, aggregation, privacy accounting,
//! and the experiment runner.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use helnaksort::aggregation::{borda_aggregate, hra_aggregate, kemeny_optimal, ra_aggregate};
use helnaksort::datagen::{load_profile, sample_mallows, save_profile, MallowsConfig};
use helnaksort::experiment::{
    parse_sweep_config, results_to_csv, results_to_plot_csv, run_config, run_sweep,
    shuffled_batch, DataSource, ExperimentConfig, Method, PlotAxis,
};
use helnaksort::privacy::{amplification_report, local_epsilon_for_central, PrivacySpec};
use helnaksort::ranking::{average_kendall, tally};
use helnaksort::Result;

#[derive(Parser)]
#[command(
    name = "helnaksort",
    about = "Privacy-preserving ranking aggregation simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregateMethod {
    Ra,
    Hra,
    Kemeny,
    Borda,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic profile from the Mallows model.
    Generate {
        /// Number of alternatives.
        #[arg(long)]
        m: usize,
        /// Number of agents.
        #[arg(long)]
        n: usize,
        /// Dispersion; larger values concentrate on the reference ranking.
        #[arg(long, default_value_t = 0.25)]
        theta: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output profile CSV path.
        #[arg(long)]
        out: PathBuf,
    },

    /// Aggregate a profile and report the distance to it.
    Aggregate {
        #[arg(long, value_enum)]
        method: AggregateMethod,
        /// Input profile CSV path.
        #[arg(long = "in")]
        input: PathBuf,
        /// Accepted for interface uniformity; aggregation is deterministic.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optional path to also write the report to.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Print noise scale and shuffle-amplification accounting.
    Privacy {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Number of agents.
        #[arg(long)]
        n: usize,
        /// Number of alternatives.
        #[arg(long)]
        m: usize,
        /// Interpret --epsilon as the central budget and derive the local one.
        #[arg(long)]
        central: bool,
        /// Accepted for interface uniformity; accounting is deterministic.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optional path to also write the report to.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run one experiment cell and print its result row.
    Run {
        #[arg(long)]
        method: String,
        /// Number of alternatives (with --n/--theta; exclusive with --profile).
        #[arg(long)]
        m: Option<usize>,
        /// Number of agents.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        theta: Option<f64>,
        /// Input profile CSV path (exclusive with --m/--n/--theta).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// central | local (defaults to central for ddp-helnaksort, local otherwise).
        #[arg(long)]
        epsilon_scope: Option<String>,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 300)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report measured wall time instead of a fixed 0.000.
        #[arg(long)]
        timings: bool,
        /// Write the first repetition's post-shuffle answers (ddp-helnaksort only).
        #[arg(long)]
        dump_answers: Option<PathBuf>,
        /// Also print every repetition's distance.
        #[arg(long)]
        verbose: bool,
    },

    /// Run every cell of a sweep config file.
    Sweep {
        /// Sweep config path (flat key/value cells; see README).
        #[arg(long)]
        config: PathBuf,
        /// Master seed for cells that do not set their own.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit long-format plot data (x,series,y,ci).
        #[arg(long)]
        plot_data: Option<PathBuf>,
        /// Config field used as the plot x axis: k, epsilon, n, m, theta.
        #[arg(long, default_value = "k")]
        plot_x: String,
        /// Report measured wall time instead of a fixed 0.000.
        #[arg(long)]
        timings: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            m,
            n,
            theta,
            seed,
            out,
        } => {
            let cfg = MallowsConfig::new(m, n, theta, seed)?;
            let profile = sample_mallows(&cfg)?;
            save_profile(&profile, &out)?;
            println!("wrote {} rankings over {} alternatives to {}", n, m, out.display());
            Ok(())
        }

        Command::Aggregate {
            method,
            input,
            seed: _,
            out,
        } => {
            let profile = load_profile(&input)?;
            let ranking = match method {
                AggregateMethod::Ra => ra_aggregate(&tally(&profile)?),
                AggregateMethod::Hra => hra_aggregate(&tally(&profile)?),
                AggregateMethod::Borda => borda_aggregate(&tally(&profile)?),
                AggregateMethod::Kemeny => kemeny_optimal(&profile)?.0,
            };
            let distance = average_kendall(&ranking, &profile)?;
            let report = format!("ranking={ranking}\navg_kendall={distance:.6}\n");
            print!("{report}");
            if let Some(path) = out {
                fs::write(path, report)?;
            }
            Ok(())
        }

        Command::Privacy {
            epsilon,
            delta,
            k,
            n,
            m,
            central,
            seed: _,
            out,
        } => {
            let spec = if central {
                let mut spec = local_epsilon_for_central(epsilon, delta, n, m)?;
                spec.k_queries = k;
                spec
            } else {
                PrivacySpec::for_bits(epsilon, delta, k)?
            };
            let report = amplification_report(&spec, n, m)?;

            let central_cell = match report.epsilon_central {
                Some(value) => format!("{value:.6}"),
                None => format!(
                    "n/a ({})",
                    report.reason.map(|r| r.to_string()).unwrap_or_default()
                ),
            };
            let mut text = String::new();
            text.push_str(&format!("  sigma            {:.6}\n", report.sigma));
            text.push_str(&format!("  epsilon_local    {:.6}\n", report.epsilon_local));
            text.push_str(&format!("  epsilon_central  {central_cell}\n"));
            text.push_str(&format!("  n_prime          {:.6}\n", report.n_prime));
            text.push('\n');
            text.push_str(&format!("sigma={}\n", report.sigma));
            text.push_str(&format!("epsilon_local={}\n", report.epsilon_local));
            text.push_str(&format!(
                "epsilon_central={}\n",
                report
                    .epsilon_central
                    .map(|v| v.to_string())
                    .unwrap_or_default()
            ));
            text.push_str(&format!("n_prime={}\n", report.n_prime));
            text.push_str(&format!("applicable={}\n", report.applicable));
            text.push_str(&format!(
                "reason={}\n",
                report.reason.map(|r| r.to_string()).unwrap_or_default()
            ));
            print!("{text}");
            if let Some(path) = out {
                fs::write(path, text)?;
            }
            Ok(())
        }

        Command::Run {
            method,
            m,
            n,
            theta,
            profile,
            epsilon,
            epsilon_scope,
            delta,
            k,
            reps,
            seed,
            out,
            timings,
            dump_answers,
            verbose,
        } => {
            let method = Method::parse(&method)?;
            let data = match (profile, m, n) {
                (Some(path), None, None) => DataSource::ProfileFile(path),
                (None, Some(m), Some(n)) => DataSource::Mallows {
                    m,
                    n,
                    theta: theta.unwrap_or(0.25),
                },
                _ => {
                    return Err(helnaksort::Error::config(
                        "data",
                        "pass either --profile or both --m and --n",
                    ))
                }
            };
            let mut cfg = ExperimentConfig::new(method, data);
            cfg.epsilon = epsilon;
            cfg.epsilon_is_central = match epsilon_scope.as_deref() {
                None => None,
                Some("central") => Some(true),
                Some("local") => Some(false),
                Some(other) => {
                    return Err(helnaksort::Error::config(
                        "epsilon-scope",
                        format!("expected central or local, found `{other}`"),
                    ))
                }
            };
            cfg.delta = delta;
            cfg.k_queries = k;
            cfg.repetitions = reps;
            cfg.master_seed = seed;

            if let Some(path) = dump_answers {
                let batch = shuffled_batch(&cfg, 0)?;
                let file = fs::File::create(&path)?;
                batch.write_csv(file)?;
                eprintln!("wrote {} post-shuffle answers to {}", batch.len(), path.display());
            }

            let result = run_config(&cfg)?;
            if verbose {
                for (rep, distance) in result.distances.iter().enumerate() {
                    eprintln!("rep {rep}: {distance:.6}");
                }
            }
            let csv = results_to_csv(std::slice::from_ref(&result), timings);
            print!("{csv}");
            if let Some(path) = out {
                fs::write(path, csv)?;
            }
            Ok(())
        }

        Command::Sweep {
            config,
            seed,
            out,
            plot_data,
            plot_x,
            timings,
        } => {
            let text = fs::read_to_string(&config)?;
            let configs = parse_sweep_config(&text, seed)?;
            let outcomes = run_sweep(&configs);

            let mut results = Vec::new();
            let mut failures = 0;
            for (cfg, outcome) in configs.iter().zip(outcomes) {
                match outcome {
                    Ok(result) => results.push(result),
                    Err(err) => {
                        failures += 1;
                        eprintln!("cell [{}] failed: {err}", cfg.label);
                    }
                }
            }

            let csv = results_to_csv(&results, timings);
            print!("{csv}");
            if let Some(path) = out {
                fs::write(path, &csv)?;
            }
            if let Some(path) = plot_data {
                let axis = PlotAxis::parse(&plot_x)?;
                fs::write(path, results_to_plot_csv(&results, axis))?;
            }
            if failures > 0 {
                eprintln!("{failures} cell(s) failed");
            }
            Ok(())
        }
    }
}
