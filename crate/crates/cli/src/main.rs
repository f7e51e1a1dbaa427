use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use permtopo::experiment::{estimate_p, exact_p, write_csv};
use permtopo::numerics::{format_ratio, integral_bound, integral_i_mc, to_f64};
use permtopo::point_model::PointConfig;
use permtopo::verify::{all_passed, run_suite, Status, Suite};
use permtopo::{homotopy_type, Permutation};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "permtopo", version, about = "Topology of random permutation order complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homotopy type of the complex of a permutation.
    Htype {
        /// One-line notation, e.g. "3254176" or "3 2 5 4 1 7 6".
        #[arg(long)]
        perm: String,
    },
    /// Exact p_r(n) by enumeration.
    ExactProb {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Monte Carlo estimate of p_r(n).
    Estimate {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Monte Carlo estimates over several n, written as CSV.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Exact I(k,l), its upper bound, and an optional Monte Carlo check.
    Integral {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, requires = "seed")]
        mc_samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Random point configuration and its permutation.
    PointModel {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: permtopo::Error| e.to_string())
}

fn print_json(value: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs a subcommand; `Ok(false)` means a verification failure.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Htype { perm } => {
            let pi: Permutation = perm.parse().context("invalid permutation")?;
            print_json(&serde_json::to_value(homotopy_type(&pi))?)?;
        }
        Command::ExactProb { n, r } => {
            let p = exact_p(n, r)?;
            println!("{} ({})", format_ratio(&p), to_f64(&p));
        }
        Command::Estimate { n, r, samples, seed, workers } => {
            print_json(&serde_json::to_value(estimate_p(n, r, samples, seed, workers)?)?)?;
        }
        Command::Sweep { r, n_list, samples, seed, out, workers } => {
            let mut results = Vec::with_capacity(n_list.len());
            for n in n_list {
                let e = estimate_p(n, r, samples, seed, workers)?;
                eprintln!("n={n}: {} of {} fail", e.failures, e.samples);
                results.push(e);
            }
            let file = File::create(&out).with_context(|| format!("cannot create {}", out.display()))?;
            write_csv(&results, BufWriter::new(file))?;
        }
        Command::Integral { k, l, mc_samples, seed } => {
            let b = integral_bound(k, l)?;
            let mut value = json!({
                "k": k,
                "l": l,
                "exact": format_ratio(&b.exact),
                "exact_decimal": to_f64(&b.exact),
                "bound_factor": format_ratio(&b.factor),
                "log_term": b.log_term,
                "bound": b.bound,
                "holds": b.holds,
            });
            if let (Some(samples), Some(seed)) = (mc_samples, seed) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mc = integral_i_mc(k as u32, l as u32, samples, &mut rng)?;
                value["monte_carlo"] = json!({
                    "estimate": mc.estimate,
                    "stderr": mc.stderr,
                    "samples": mc.samples,
                    "seed": seed,
                    "within_4_sigma": mc.agrees_with(to_f64(&b.exact), 4.0),
                });
            }
            print_json(&value)?;
        }
        Command::PointModel { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = PointConfig::sample(n, &mut rng);
            let pi = q.to_permutation();
            print_json(&json!({
                "points": q,
                "permutation": pi,
                "homotopy_type": homotopy_type(&pi),
                "minimal_elements": q.minimal_elements(),
            }))?;
        }
        Command::Verify { suite, max_n } => {
            let rows = run_suite(suite, max_n)?;
            let mut out = io::stdout().lock();
            for row in &rows {
                let status = match row.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Info => "INFO",
                };
                writeln!(out, "{status}  {:<10} {}: {}", row.suite, row.check, row.detail)?;
            }
            let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
            writeln!(out, "{} checks, {failed} failed", rows.len())?;
            return Ok(all_passed(&rows));
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
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
