use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adderlab_core::bench::{
    metrics_from_fixture, BenchmarkConfig, ReportFormat, DEFAULT_PERIOD_NS, DEFAULT_SEED,
    DEFAULT_VECTORS, VERIFY_VECTORS,
};
use adderlab_core::netlist::{parse_netlist, write_netlist};
use adderlab_core::report::{adders_text, metrics_csv, metrics_svg, metrics_text};
use adderlab_core::sim::{verify_exhaustive, verify_random, VerifyReport};
use adderlab_core::{
    area, avg_power, critical_path, levelize, load_cell_library, run_bench, run_vectors, validate,
    AdderConfig, Architecture, CellLibrary, FaStyle, MetricsTable, Netlist, NetlistError,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

/// Generate, verify, time, and compare gate-level adders.
#[derive(Parser)]
#[command(name = "adderlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CellsArg {
    /// Cell library TOML file (default: built-in library)
    #[arg(long, value_name = "FILE")]
    cells: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an adder netlist
    Gen {
        #[arg(long)]
        arch: Architecture,
        #[arg(long)]
        width: usize,
        /// Group sizes, least significant first
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
        #[arg(long, default_value = "cell")]
        fa_style: FaStyle,
        /// Ripple segment size for hybrid architectures
        #[arg(long)]
        rca_bits: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Validate a netlist and compare it against integer addition
    Check {
        netlist: PathBuf,
        #[arg(long, conflicts_with_all = ["vectors", "seed"])]
        exhaustive: bool,
        #[arg(long, default_value_t = VERIFY_VECTORS)]
        vectors: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        cells: CellsArg,
    },
    /// Report the critical path
    Sta {
        netlist: PathBuf,
        #[command(flatten)]
        cells: CellsArg,
    },
    /// Estimate average dynamic power from a random vector stream
    Power {
        netlist: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VECTORS)]
        vectors: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PERIOD_NS)]
        period_ns: f64,
        /// Write per-gate toggle counts as CSV
        #[arg(long, value_name = "FILE")]
        toggle_dump: Option<PathBuf>,
        #[command(flatten)]
        cells: CellsArg,
    },
    /// Build, verify, and measure a set of adders and compare them
    Bench {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Compute combination metrics for a CSV of published results
    Metrics {
        #[arg(long, value_name = "CSV")]
        fixture: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            arch,
            width,
            partition,
            fa_style,
            rca_bits,
            out,
        } => {
            let mut cfg = AdderConfig::new(arch, width).with_fa_style(fa_style);
            cfg.partition = partition;
            cfg.rca_bits = rca_bits;
            let netlist = cfg.build().context("build")?;
            let depth = levelize(&netlist).context("levelize")?.depth();
            write_file(&out, &write_netlist(&netlist))?;
            println!(
                "{cfg}: {} gates, depth {depth} -> {}",
                netlist.gates.len(),
                out.display()
            );
        }
        Command::Check {
            netlist,
            exhaustive,
            vectors,
            seed,
            cells,
        } => {
            let lib = cells_for(&cells)?;
            let nl = read_netlist(&netlist, &lib)?;
            let report = if exhaustive {
                verify_exhaustive(&nl, &lib)
            } else {
                verify_random(&nl, &lib, vectors, seed)
            }
            .context("verify")?;
            print_verify(&report)?;
        }
        Command::Sta { netlist, cells } => {
            let lib = cells_for(&cells)?;
            let nl = read_netlist(&netlist, &lib)?;
            let timing = critical_path(&nl, &lib).context("timing")?;
            println!("critical delay: {} ps", timing.critical_delay_ps);
            let path: Vec<String> = timing
                .critical_path
                .iter()
                .map(|&g| format!("{}({})", g, nl.gates[g].cell))
                .collect();
            println!("critical path: {}", path.join(" -> "));
            if let Some((name, t)) = timing
                .output_arrivals
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
            {
                println!("latest output: {name} at {t} ps");
            }
            println!("area: {}", area(&nl, &lib).context("area")?);
        }
        Command::Power {
            netlist,
            vectors,
            seed,
            period_ns,
            toggle_dump,
            cells,
        } => {
            let lib = cells_for(&cells)?;
            let nl = read_netlist(&netlist, &lib)?;
            let stats = run_vectors(&nl, &lib, vectors, seed, period_ns).context("simulate")?;
            let power = avg_power(&stats, &lib, period_ns).context("power")?;
            if let Some(path) = toggle_dump {
                write_file(&path, &stats.to_csv())?;
            }
            println!("vectors: {vectors} (seed {seed}), period {period_ns} ns");
            println!("toggles: {}", stats.total());
            println!("average power: {power} uW");
        }
        Command::Bench { config, out_dir } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("config: read {}", path.display()))?;
                    BenchmarkConfig::from_toml_str(&text)?
                }
                None => BenchmarkConfig::default(),
            };
            if let Some(dir) = out_dir {
                cfg.out_dir = dir;
            }
            let lib = load_cell_library(cfg.cells.as_deref()).context("cells")?;
            let outcome = run_bench(&cfg, &lib)?;
            print!("{}", adders_text(&outcome.adders));
            write_reports(&outcome.table, &cfg.out_dir, &cfg.formats)?;
            print!("{}", metrics_text(&outcome.table));
            println!("reports written to {}", cfg.out_dir.display());
        }
        Command::Metrics { fixture, out_dir } => {
            let text = fs::read_to_string(&fixture)
                .with_context(|| format!("fixture: read {}", fixture.display()))?;
            let table = metrics_from_fixture(&text)?;
            if let Some(dir) = out_dir {
                write_reports(&table, &dir, &ReportFormat::ALL)?;
            }
            print!("{}", metrics_text(&table));
        }
    }
    Ok(())
}

fn cells_for(arg: &CellsArg) -> Result<CellLibrary> {
    load_cell_library(arg.cells.as_deref()).context("cells")
}

fn read_netlist(path: &Path, lib: &CellLibrary) -> Result<Netlist> {
    let text = fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    let nl = parse_netlist(&text).with_context(|| format!("parse {}", path.display()))?;
    validate(&nl, lib)
        .map_err(NetlistError::Invalid)
        .context("validate")?;
    Ok(nl)
}

fn print_verify(report: &VerifyReport) -> Result<()> {
    if report.passed() {
        println!(
            "ok: {} vectors agree with integer addition",
            report.vectors_checked
        );
        return Ok(());
    }
    for m in &report.mismatches {
        println!(
            "mismatch: a={:#x} b={:#x} cin={} gave sum={:#x} cout={}, expected sum={:#x} cout={}",
            m.vector.a,
            m.vector.b,
            m.vector.cin as u8,
            m.actual.sum,
            m.actual.cout as u8,
            m.expected.sum,
            m.expected.cout as u8
        );
    }
    bail!(
        "verify: {} of {} vectors disagree with integer addition",
        report.mismatch_count,
        report.vectors_checked
    )
}

fn write_reports(table: &MetricsTable, dir: &Path, formats: &[ReportFormat]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("write: create {}", dir.display()))?;
    for format in formats {
        let (name, body) = match format {
            ReportFormat::Csv => ("metrics.csv", metrics_csv(table)),
            ReportFormat::Txt => ("table.txt", metrics_text(table)),
            ReportFormat::Svg => ("fig.svg", metrics_svg(table)),
        };
        write_file(&dir.join(name), &body)?;
    }
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("write {}", path.display()))
}
