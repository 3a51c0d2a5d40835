use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vdlab::baselines::{dsatur, dsatur_enumerate, exact_chromatic, TieBreak};
use vdlab::descent::{self, write_trajectory_csv, SolverConfig};
use vdlab::experiments::{
    run_batch, scaling_experiment, trap_experiment, write_records_csv, Budget, ScalingFamily, TrapFamily,
};
use vdlab::graph::{parse_dimacs, write_dimacs, Graph};
use vdlab::instances::InstanceSpec;
use vdlab::verify;

#[derive(Parser)]
#[command(name = "vdlab", version, about = "Vertex Descent graph colouring laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    RingEven,
    RingOdd,
    Bounded3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trap {
    G2,
    G3,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (`path:100`, `g2:5`, `rand:200:3:seed7`, ...) as DIMACS.
    Gen {
        spec: InstanceSpec,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run Vertex Descent once on a DIMACS file.
    Solve {
        file: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        cycle_window: usize,
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Write the best colouring as `v <index> <colour>` lines.
        #[arg(long)]
        coloring: Option<PathBuf>,
    },
    /// Seeded batch of runs on one instance.
    Batch {
        spec: InstanceSpec,
        #[arg(short)]
        k: usize,
        #[arg(short, long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        cycle_window: usize,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Median steps against size, with a log–log slope.
    Scaling {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(short)]
        k: usize,
        #[arg(short, long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Budget is `factor · n³`.
        #[arg(long, default_value_t = 50)]
        budget_factor: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Failure rate on a trap family against its analytic lower bound.
    Trap {
        #[arg(long, value_enum)]
        family: Trap,
        #[arg(long)]
        size: usize,
        #[arg(short, long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Defaults to twice the vertex count.
        #[arg(long)]
        window: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// DSATUR colour count, or its extremes over every tie-break.
    Dsatur {
        file: PathBuf,
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 10_000_000)]
        branch_limit: u64,
    },
    /// Exact chromatic number by backtracking.
    Exact {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Run every verification check; exits nonzero on any violation.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Directory for per-check CSV evidence and summary.json.
        #[arg(long, default_value = "verify-out")]
        out_dir: PathBuf,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_dimacs(&text, false)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { spec, output } => {
            let text = write_dimacs(&spec.generate()?);
            match output {
                Some(p) => fs::write(&p, text)?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
        }
        Command::Solve {
            file,
            k,
            seed,
            budget,
            cycle_window,
            trajectory,
            coloring,
        } => {
            let g = read_graph(&file)?;
            let mut cfg = SolverConfig::new(k, budget, seed).with_cycle_window(cycle_window);
            cfg.record_trajectory = trajectory.is_some();
            let r = descent::run(&g, &cfg)?;
            if let (Some(path), Some(points)) = (trajectory, r.trajectory.as_ref()) {
                write_trajectory_csv(points, create(&path)?)?;
            }
            if let Some(path) = coloring {
                fs::write(path, r.best_coloring.to_lines())?;
            }
            println!(
                "{}",
                json!({"status": r.status, "steps_taken": r.steps_taken, "best_conflicts": r.best_conflicts})
            );
        }
        Command::Batch {
            spec,
            k,
            trials,
            seed,
            budget,
            cycle_window,
            output,
            summary,
        } => {
            let cfg = SolverConfig::new(k, budget, 0).with_cycle_window(cycle_window);
            let b = run_batch(&spec, &cfg, trials, seed)?;
            write_records_csv(&b.records, create(&output)?)?;
            let js = serde_json::to_value(&b.summary)?;
            match summary {
                Some(p) => write_json(&p, &js)?,
                None => println!("{js}"),
            }
        }
        Command::Scaling {
            family,
            sizes,
            k,
            trials,
            seed,
            budget_factor,
            output,
        } => {
            let family = match family {
                Family::Path => ScalingFamily::Path,
                Family::RingEven => ScalingFamily::RingEven,
                Family::RingOdd => ScalingFamily::RingOdd,
                Family::Bounded3 => ScalingFamily::BoundedDegree { delta: 3 },
            };
            let r = scaling_experiment(family, &sizes, trials, k, Budget::CubicN(budget_factor), seed)?;
            let mut w = csv::Writer::from_writer(create(&output)?);
            for row in &r.rows {
                w.serialize(row)?;
            }
            w.flush()?;
            println!("{}", json!({"family": r.family, "k": r.k, "slope": r.slope, "all_succeeded": r.all_succeeded}));
        }
        Command::Trap {
            family,
            size,
            trials,
            seed,
            budget,
            window,
            output,
            summary,
        } => {
            let family = match family {
                Trap::G2 => TrapFamily::G2,
                Trap::G3 => TrapFamily::G3,
            };
            let n = family.graph(size)?.vertex_count();
            let budget = budget.unwrap_or(match family {
                TrapFamily::G2 => 100_000,
                TrapFamily::G3 => 1_000_000,
            });
            let (report, records) = trap_experiment(family, size, trials, budget, window.unwrap_or(2 * n), seed)?;
            write_records_csv(&records, create(&output)?)?;
            let js = serde_json::to_value(&report)?;
            match summary {
                Some(p) => write_json(&p, &js)?,
                None => println!("{js}"),
            }
        }
        Command::Dsatur {
            file,
            enumerate,
            branch_limit,
        } => {
            let g = read_graph(&file)?;
            if enumerate {
                let (min, max) = dsatur_enumerate(&g, branch_limit)?;
                println!("{}", json!({"min_colours": min, "max_colours": max}));
            } else {
                let r = dsatur(&g, TieBreak::Lexicographic);
                println!("{}", json!({"colours_used": r.colours_used}));
            }
        }
        Command::Exact { file, budget } => {
            let g = read_graph(&file)?;
            println!("{}", json!({"chromatic": exact_chromatic(&g, budget)?}));
        }
        Command::Verify { seed, out_dir } => {
            fs::create_dir_all(&out_dir)?;
            let mut all = true;
            let mut summary = Vec::new();
            for check in verify::CHECKS {
                let o = check(seed);
                all &= o.passed;
                println!(
                    "[{}] {:>2}. {} ({:.1}s): {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.id,
                    o.name,
                    o.seconds,
                    o.detail
                );
                fs::write(out_dir.join(format!("check{:02}.csv", o.id)), &o.csv)?;
                summary.push(serde_json::to_value(&o)?);
            }
            write_json(&out_dir.join("summary.json"), &json!({"seed": seed, "passed": all, "checks": summary}))?;
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
