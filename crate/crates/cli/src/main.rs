use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use d2d_hopping::csv_io;
use d2d_hopping::{
    find_condition_g_poly, load_pattern_config, load_sim_config, primitivity_check, read_table,
    MetricsError, MetricsReport, Prime, TableEntry, PRIMITIVE_TABLE,
};

/// Frequency-time hopping patterns for D2D discovery.
#[derive(Debug, Parser)]
#[command(name = "d2d-hop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the lexicographically first primitive polynomial of degree r over GF(p).
    FindPoly {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
    },
    /// Check a primitive-polynomial table (the built-in one by default).
    VerifyTable {
        /// CSV with header `m_min,m_max,p,r,poly`.
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Dump a pattern as CSV `s,t,i,j`.
    Pattern {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        frames: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate column period, collision ratio and continual collision.
    Metrics {
        #[arg(long)]
        spec: PathBuf,
        /// Search budget for random patterns.
        #[arg(long, default_value_t = 1000)]
        t_cap: u64,
        /// Horizon for the empirical collision ratio.
        #[arg(long, default_value_t = 10_000)]
        t_b: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a discovery simulation; writes curves.csv and distribution.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn find_poly(p: u64, r: u32) -> Result<()> {
    let p = Prime::new(p)?;
    let f = find_condition_g_poly(p, r)?;
    let check = primitivity_check(&f)?;
    println!("{f}");
    println!("p = {}", p.get());
    println!("r = {r}");
    println!("irreducible = {}", check.irreducible);
    println!("group_order = {}", check.group_order);
    let factors: Vec<String> = check.prime_factors.iter().map(u64::to_string).collect();
    println!("prime_factors = {}", factors.join(" "));
    for (q, e, w) in &check.witnesses {
        println!("witness q={q}: x^{e} mod f = {w} (must not be 1)");
    }
    if let Some(full) = &check.full_power {
        println!("x^{} mod f = {full} (must be 1)", check.group_order);
    }
    println!("condition_g = {}", check.primitive);
    if !check.primitive {
        bail!("search returned a polynomial that fails its own check");
    }
    Ok(())
}

fn verify_table(path: Option<&Path>) -> Result<()> {
    let entries: Vec<TableEntry> = match path {
        Some(p) => {
            read_table(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)
                .with_context(|| format!("cannot read table {}", p.display()))?
        }
        None => PRIMITIVE_TABLE
            .iter()
            .copied()
            .map(TableEntry::from)
            .collect(),
    };
    let mut failures = 0;
    for e in &entries {
        let label = format!("p={} r={} m={}..{} {}", e.p, e.r, e.m_min, e.m_max, e.poly);
        match e.check() {
            Ok(c) if c.passed() => println!("PASS {label}"),
            Ok(c) => {
                failures += 1;
                let mut why = Vec::new();
                if !c.degree_ok {
                    why.push("degree");
                }
                if !c.condition_g {
                    why.push("condition_g");
                }
                if !c.m_range_ok {
                    why.push("m_range");
                }
                println!("FAIL {label} ({})", why.join(", "));
            }
            Err(err) => {
                failures += 1;
                println!("FAIL {label} ({err})");
            }
        }
    }
    println!("{} rows, {failures} failed", entries.len());
    if failures > 0 {
        bail!("{failures} table rows failed");
    }
    Ok(())
}

fn pattern(spec: &Path, frames: u64, out: Option<&Path>) -> Result<()> {
    let pattern = load_pattern_config(spec)
        .with_context(|| format!("invalid pattern config {}", spec.display()))?
        .build()?;
    let mut w = output(out)?;
    csv_io::write_pattern(&mut w, &pattern, frames)?;
    w.flush()?;
    Ok(())
}

fn metrics(spec: &Path, t_cap: u64, t_b: u64, out: Option<&Path>) -> Result<()> {
    let pattern = load_pattern_config(spec)
        .with_context(|| format!("invalid pattern config {}", spec.display()))?
        .build()?;
    let report = MetricsReport::evaluate(&pattern, t_cap, t_b)?;
    let mut w = output(out)?;
    write!(w, "{report}")?;
    w.flush()?;
    Ok(())
}

fn simulate(config: &Path, out: &Path) -> Result<()> {
    let cfg = load_sim_config(config)
        .with_context(|| format!("invalid simulation config {}", config.display()))?;
    let result = d2d_hopping::run(&cfg)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut curves = BufWriter::new(File::create(out.join("curves.csv"))?);
    csv_io::write_curves(&mut curves, &csv_io::curve_rows(&result))?;
    curves.flush()?;
    let mut dist = BufWriter::new(File::create(out.join("distribution.csv"))?);
    csv_io::write_distribution(&mut dist, &result.final_discovered)?;
    dist.flush()?;
    let total = result.cumulative_pairs.last().copied().unwrap_or(0);
    println!("ues = {}", result.ue_count);
    println!("frames = {}", result.new_pairs.len());
    println!("discovered_pairs = {total}");
    Ok(())
}

/// 2 for internal consistency failures, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<MetricsError>(),
            Some(MetricsError::PeriodMismatch { .. } | MetricsError::NotPeriodic { .. })
        )
    });
    if internal {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::FindPoly { p, r } => find_poly(*p, *r),
        Command::VerifyTable { path } => verify_table(path.as_deref()),
        Command::Pattern { spec, frames, out } => pattern(spec, *frames, out.as_deref()),
        Command::Metrics {
            spec,
            t_cap,
            t_b,
            out,
        } => metrics(spec, *t_cap, *t_b, out.as_deref()),
        Command::Simulate { config, out } => simulate(config, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
