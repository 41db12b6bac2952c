use std::cmp::Ordering;
use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use prefmatch::aupcr::compute_aupcr;
use prefmatch::gen::{generate, Density, GenSpec, Model};
use prefmatch::harness::{
    parse_density_range, parse_size_range, rank_means, read_rows, run_grid, solve_with,
    write_rank_tables, Algorithm, GridConfig,
};
use prefmatch::metrics::fixed6;
use prefmatch::oracle::{brute_force_margin, oracle_optima};
use prefmatch::{
    compare_fair, compare_rank_maximal, evaluate_all, parse_instance, parse_matching, signature_of,
    unpopularity_margin, Error, Instance, Matching, Result,
};

#[derive(Parser)]
#[command(
    name = "prefmatch",
    version,
    about = "Matchings under one-sided preferences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        /// Number of posts; defaults to `--n`.
        #[arg(long)]
        posts: Option<usize>,
        #[arg(long)]
        density: Density,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a matching with one algorithm.
    Solve {
        #[arg(long)]
        algo: Algorithm,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a matching on every metric.
    Eval {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        matching: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment grid and write one CSV row per (cell, algorithm).
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "uni,hc")]
        models: Vec<Model>,
        #[arg(long, default_value = "50..200:50")]
        sizes: String,
        #[arg(long, default_value = "0.02..0.2:0.02")]
        densities: String,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        #[arg(long, value_delimiter = ',', default_value = "pom,rmm,popm,fm,amm")]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
        /// Directory for instances where AMM is not of maximum cardinality.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
    },
    /// Aggregate a bench CSV into mean dense-rank tables.
    Ranks {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "pom,rmm,popm,fm,amm")]
        algos: Vec<Algorithm>,
    },
    /// Exhaustive optima of a small instance, or check a matching against them.
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, requires = "matching")]
        check: Option<Check>,
        #[arg(short, long)]
        matching: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Amm,
    Mcamm,
    Rmm,
    Fm,
    Pom,
    Popular,
    Margin,
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_text(path)?)
}

fn read_matching(inst: &Instance, path: &Path) -> Result<Matching> {
    let m = parse_matching(&read_text(path)?)?;
    inst.validate_matching(&m)?;
    Ok(m)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Returns whether a `--check` passed; everything else reports `true`.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Gen {
            model,
            n,
            posts,
            density,
            seed,
            output,
        } => {
            let inst = generate(&GenSpec {
                model,
                n_applicants: n,
                n_posts: posts.unwrap_or(n),
                density,
                seed,
            })?;
            emit(output.as_deref(), &inst.to_text())?;
        }
        Command::Solve {
            algo,
            input,
            output,
        } => {
            let inst = read_instance(&input)?;
            let (m, heuristic) = solve_with(algo, &inst)?;
            if heuristic {
                eprintln!(
                    "warning: no popular matching; result is a heuristic least-unpopular matching"
                );
            }
            emit(output.as_deref(), &m.to_text())?;
        }
        Command::Eval {
            input,
            matching,
            json,
        } => {
            let inst = read_instance(&input)?;
            let m = read_matching(&inst, &matching)?;
            let rec = evaluate_all(&inst, &m, 0.0)?;
            let sig = signature_of(&inst, &m)?;
            if json {
                let mut v = serde_json::to_value(&rec)?;
                v["signature"] = json!(sig.to_string());
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                let avg = rec.avg_rank.map(|r| fixed6(*r.numer(), *r.denom()));
                println!("signature {sig}");
                println!("cardinality {}", rec.cardinality);
                println!("margin {}", rec.margin);
                println!(
                    "unpopularity {}",
                    fixed6(*rec.unpopularity.numer(), *rec.unpopularity.denom())
                );
                println!("rank1 {}", rec.rank1);
                println!(
                    "aupcr {} ({})",
                    rec.aupcr,
                    fixed6(rec.aupcr.numerator, rec.aupcr.denominator)
                );
                println!("rhpl {}", rec.rhpl);
                println!("avg_rank {}", avg.unwrap_or_default());
                println!(
                    "worst_rank {}",
                    rec.worst_rank.map(|w| w.to_string()).unwrap_or_default()
                );
            }
        }
        Command::Bench {
            models,
            sizes,
            densities,
            replicates,
            algos,
            seed,
            workers,
            output,
            counterexamples,
        } => {
            let cfg = GridConfig {
                models,
                sizes: parse_size_range(&sizes)?,
                densities: parse_density_range(&densities)?,
                replicates,
                algorithms: algos,
                master_seed: seed,
                workers,
                output: Some(output),
                counterexample_dir: counterexamples,
            };
            let report = run_grid(&cfg)?;
            eprintln!("{} rows written", report.rows.len());
            for cell in &report.amm_below_max {
                eprintln!("AMM below maximum cardinality: {cell}");
            }
        }
        Command::Ranks {
            input,
            output,
            algos,
        } => {
            let rows = read_rows(BufReader::new(fs::File::open(&input)?))?;
            let tables = rank_means(&rows, &algos)?;
            match output {
                Some(p) => write_rank_tables(BufWriter::new(fs::File::create(p)?), &tables)?,
                None => write_rank_tables(io::stdout().lock(), &tables)?,
            }
        }
        Command::Oracle {
            input,
            check,
            matching,
        } => {
            let inst = read_instance(&input)?;
            let o = oracle_optima(&inst)?;
            let Some(check) = check else {
                let v = json!({
                    "matching_count": o.matching_count,
                    "max_cardinality": o.max_cardinality,
                    "max_aupcr": o.max_aupcr.to_string(),
                    "mcamm_card": o.mcamm_card,
                    "min_amm_card": o.min_amm_card,
                    "rank_maximal_signature": o.rank_maximal_signature.to_string(),
                    "fair_signature": o.fair_signature.to_string(),
                    "min_margin": o.min_margin,
                    "popular_exists": o.popular_exists,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
                return Ok(true);
            };
            let path = matching.expect("clap enforces --matching");
            let m = read_matching(&inst, &path)?;
            let sig = signature_of(&inst, &m)?;
            let (ok, detail) = match check {
                Check::Amm => {
                    let v = compute_aupcr(&inst, &m)?;
                    (
                        v == o.max_aupcr,
                        format!("aupcr {v}, optimum {}", o.max_aupcr),
                    )
                }
                Check::Mcamm => {
                    let v = compute_aupcr(&inst, &m)?;
                    (
                        v == o.max_aupcr && m.len() == o.mcamm_card,
                        format!(
                            "aupcr {v} card {}, optimum {} card {}",
                            m.len(),
                            o.max_aupcr,
                            o.mcamm_card
                        ),
                    )
                }
                Check::Rmm => (
                    compare_rank_maximal(&sig, &o.rank_maximal_signature) == Ordering::Equal,
                    format!("signature {sig}, optimum {}", o.rank_maximal_signature),
                ),
                Check::Fm => (
                    compare_fair(&sig, &o.fair_signature) == Ordering::Equal,
                    format!("signature {sig}, optimum {}", o.fair_signature),
                ),
                Check::Pom => {
                    let pareto = o.is_pareto_optimal(&inst, &m);
                    (
                        pareto && m.len() == o.max_cardinality,
                        format!(
                            "pareto {pareto}, card {}, max {}",
                            m.len(),
                            o.max_cardinality
                        ),
                    )
                }
                Check::Popular => {
                    let margin = brute_force_margin(&inst, &m)?;
                    (
                        margin == 0,
                        format!(
                            "margin {margin}, popular matching exists {}",
                            o.popular_exists
                        ),
                    )
                }
                Check::Margin => {
                    let fast = unpopularity_margin(&inst, &m)?;
                    let slow = brute_force_margin(&inst, &m)?;
                    (fast == slow, format!("margin {fast}, brute force {slow}"))
                }
            };
            println!("{} {detail}", if ok { "PASS" } else { "FAIL" });
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            report_source(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report_source(e: &Error) {
    let mut src = std::error::Error::source(e);
    while let Some(s) = src {
        eprintln!("  caused by: {s}");
        src = s.source();
    }
}
