//! `mpcq`: analyze conjunctive queries and simulate their evaluation on a
//! cluster of `p` servers.
//!
//! Exit codes: 0 on success, 1 on any error, 2 when a regenerated table
//! differs from its expected values.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mpcq::harness::{self, family_query, Mode, RunConfig, Table};
use mpcq::matchdb::generate;
use mpcq::planner::build_plan;
use mpcq::{parse_rational, Exec, Query};

#[derive(Parser)]
#[command(name = "mpcq", version, about = "Conjunctive queries under the massively parallel communication model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print hypergraph statistics, covers, and round bounds.
    Analyze {
        /// Query file, or a family name such as C5, L8, T3, SP2, B4_2.
        query: String,
        /// Write the report as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded experiments and report loads and answers.
    Run {
        query: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Space exponent, e.g. `1/2` or `0.5`.
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long, default_value_t = mpcq::budget::DEFAULT_C)]
        c: f64,
        /// Seed list: `0..20`, `1,5,9`, or a single seed.
        #[arg(long, default_value = "0..10")]
        seeds: String,
        /// one-round, partial, or plan.
        #[arg(long, default_value = "one-round")]
        mode: String,
        /// Drop deliveries over budget instead of only reporting them.
        #[arg(long)]
        enforce: bool,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
        /// CSV, or JSON when the path ends in `.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the running-examples table and diff it.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the space/rounds table and diff it.
    Table2 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the multi-round plan for a query.
    Plan {
        query: String,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Write a matching database as one CSV file per relation.
    Generate {
        query: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dir: PathBuf,
    },
}

fn load_query(arg: &str) -> Result<Query> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return Ok(Query::parse(&text)?);
    }
    if let Some(q) = family_query(arg) {
        return Ok(q);
    }
    if arg.contains(":-") {
        return Ok(Query::parse(arg)?);
    }
    bail!("`{arg}` is neither a query file, a family name, nor a query")
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a >= b {
            bail!("empty seed range `{s}`");
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|x| Ok(x.trim().parse()?)).collect()
}

fn emit_table(table: &Table, out: Option<&Path>) -> Result<ExitCode> {
    print!("{}", table.to_text());
    if let Some(path) = out {
        let text = if harness::wants_json(path) { table.to_json() } else { table.to_csv()? };
        harness::emit(Some(path), &text)?;
    }
    Ok(if table.matches() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { query, out } => {
            let a = harness::analyze(&load_query(&query)?)?;
            print!("{}", a.to_text());
            if let Some(path) = out {
                harness::emit(Some(&path), &serde_json::to_string_pretty(&a)?)?;
            }
        }
        Command::Run {
            query,
            n,
            p,
            eps,
            c,
            seeds,
            mode,
            enforce,
            sequential,
            out,
        } => {
            let cfg = RunConfig {
                query: load_query(&query)?,
                n,
                p,
                epsilon: parse_rational(&eps)?,
                c,
                seeds: parse_seeds(&seeds)?,
                mode: mode.parse::<Mode>()?,
                enforce,
                exec: if sequential { Exec::Sequential } else { Exec::Parallel },
            };
            let report = harness::run_experiment(&cfg)?;
            let text = match &out {
                Some(path) if harness::wants_json(path) => report.to_json(),
                _ => report.to_csv()?,
            };
            harness::emit(out.as_deref(), &text)?;
        }
        Command::Table1 { out } => return emit_table(&harness::table1(), out.as_deref()),
        Command::Table2 { out } => return emit_table(&harness::table2(), out.as_deref()),
        Command::Plan { query, eps } => {
            let plan = build_plan(&load_query(&query)?, &parse_rational(&eps)?)?;
            print!("{plan}");
        }
        Command::Generate { query, n, seed, dir } => {
            let q = load_query(&query)?;
            generate(&q, n, seed)?.write_csv(&dir)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
