use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hartool_core::harness::{registry, run_with, write_csv, ExperimentConfig, RunOptions};
use hartool_core::oracle;

#[derive(Parser)]
#[command(name = "hartool", version, about = "Numerical verification of fractional maximal and potential inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Record the largest ratio of every suite member.
        #[arg(long)]
        witnesses: bool,
        /// Directory for per-sample CSV files.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List inequality ids and their parameters.
    List,
    /// Run a brute-force oracle suite.
    Oracle {
        /// Oracle name, or `all`.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(config: PathBuf, out: PathBuf, witnesses: bool, csv: Option<PathBuf>) -> Result<bool> {
    let cfg = ExperimentConfig::from_path(&config).with_context(|| format!("reading {}", config.display()))?;
    let opts = RunOptions {
        witnesses,
        keep_samples: csv.is_some(),
    };
    let output = run_with(&cfg, opts)?;
    std::fs::write(&out, output.report.to_json()?).with_context(|| format!("writing {}", out.display()))?;
    if let Some(dir) = csv {
        write_csv(&output, &dir)?;
    }
    let r = &output.report;
    for (name, s) in &r.series {
        let c: Vec<String> = s.grids.iter().map(|g| format!("N={}: {:.6e}", g.cells_per_side, g.c_emp)).collect();
        let ratio = s.ratio.map_or("-".to_string(), |x| format!("{x:.4}"));
        println!("{} [{}] {} ratio {}", r.inequality_id, name, c.join(", "), ratio);
    }
    for (name, c) in &r.checks {
        println!("check {name}: {}", if c.passed { "pass" } else { "FAIL" });
    }
    println!("verdict: {}", if r.verdict { "PASS" } else { "FAIL" });
    Ok(r.verdict)
}

fn list() {
    for (id, ineq) in registry() {
        println!("{id}: {}", ineq.summary());
        for p in ineq.required() {
            println!("    {p}");
        }
    }
}

fn run_oracle(name: &str, seed: u64) -> Result<bool> {
    let names: Vec<&str> = if name == "all" { oracle::ORACLES.to_vec() } else { vec![name] };
    let mut ok = true;
    for n in names {
        let o = oracle::run(n, seed)?;
        println!("{} {}: {} cases, {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.cases, o.detail);
        ok &= o.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            witnesses,
            csv,
            threads,
        } => {
            if let Some(t) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            run(config, out, witnesses, csv)
        }
        Command::List => {
            list();
            Ok(true)
        }
        Command::Oracle { name, seed } => run_oracle(&name, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
