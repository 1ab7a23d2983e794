//! `subpop` — experiment driver for the subpopulation toolkit.
//!
//! Exit codes: 0 on success, 2 for configuration or input errors
//! (including command-line usage errors), 3 for I/O failures.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use subpop::experiment::{
    compare_results, forces_summary, indicators_for_files, render_front, run_experiment,
    ExperimentPlan, ProblemSpec, Profile,
};
use subpop::rng::{Purpose, RngStream, StreamKey};

#[derive(Parser)]
#[command(
    name = "subpop",
    version,
    about = "Run and analyze subpopulation-framework experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment plan and write the result tree
    Run {
        /// Plan (or manifest) file
        plan: PathBuf,
        /// Override the plan's base seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per CPU)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Override the plan's profile; resets runs, generations, and
        /// total_size to the profile's defaults
        #[arg(long, value_parser = clap::value_parser!(Profile))]
        profile: Option<Profile>,
        /// Output directory
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Summarize and statistically compare finished result directories
    Compare {
        /// Result directories produced by `subpop run`
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Compute ε and hypervolume-difference indicators for one solution set
    Indicators {
        /// Solution-set file (`run_NN.sol`)
        set: PathBuf,
        /// Reference-front file
        front: PathBuf,
        /// Monte Carlo samples for hypervolume above three objectives
        #[arg(long, default_value_t = 1_000_000)]
        hv_samples: u64,
        /// Seed for the Monte Carlo stream
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a problem's optimal front
    Front {
        /// Problem, e.g. `wfg4:2`
        problem: ProblemSpec,
        /// Number of points to sample
        count: usize,
        /// Sampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize merged force histograms from a result directory
    Forces {
        /// Result directory produced by `subpop run`
        dir: PathBuf,
    },
}

fn run(command: Command) -> subpop::Result<()> {
    match command {
        Command::Run {
            plan,
            seed,
            workers,
            profile,
            out,
        } => {
            let mut plan = ExperimentPlan::load(&plan)?;
            if let Some(seed) = seed {
                plan.seed = seed;
            }
            if let Some(profile) = profile {
                plan.profile = profile;
                let (runs, generations, total_size) = profile.defaults();
                plan.runs = runs;
                plan.generations = generations;
                plan.total_size = total_size;
            }
            run_experiment(&plan, &out, workers)?;
            println!("results written to {}", out.display());
            Ok(())
        }
        Command::Compare { dirs } => {
            print!("{}", compare_results(&dirs)?);
            Ok(())
        }
        Command::Indicators {
            set,
            front,
            hv_samples,
            seed,
        } => {
            let (eps, hv, se) = indicators_for_files(&set, &front, hv_samples, seed)?;
            println!("epsilon = {eps:.6}");
            if se > 0.0 {
                println!("hypervolume_diff = {hv:.6} (se {se:.6})");
            } else {
                println!("hypervolume_diff = {hv:.6} (exact)");
            }
            Ok(())
        }
        Command::Front {
            problem,
            count,
            seed,
            out,
        } => {
            let instance = problem.instance()?;
            let mut rng = RngStream::new(
                seed,
                StreamKey {
                    run: 0,
                    subpop: 0,
                    purpose: Purpose::Assess,
                },
            );
            let front = instance.front_sample(count, &mut rng)?;
            let text = render_front(&problem.to_string(), seed, &front);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| subpop::Error::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Forces { dir } => {
            print!("{}", forces_summary(&dir)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                subpop::Error::Io { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
