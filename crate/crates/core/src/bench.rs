//! Benchmark runs and metrics tables.
//!
//! A run builds every configured adder, checks it against the reference
//! adder, measures critical-path delay, area, and average power under one
//! shared random vector stream, and assembles a [`MetricsTable`].

use std::collections::HashSet;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    self, argmin, combo_metrics, AnalysisError, DesignPoint, Metric, MetricsRow,
};
use crate::arch::{AdderConfig, Architecture, BuildError};
use crate::cell::CellLibrary;
use crate::netlist::{validate, NetlistError};
use crate::sim::{self, SimError, VerifyReport};

/// Published comparison table: legend, delay (ns), area, power (µW).
pub const PUBLISHED_FIXTURE: &str = include_str!("../data/published.csv");

pub const DEFAULT_VECTORS: usize = 1000;
pub const DEFAULT_PERIOD_NS: f64 = 5.0;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_WIDTH: usize = 32;
/// Random vectors used to verify adders too wide for exhaustive checking.
pub const VERIFY_VECTORS: usize = 10_000;
/// Widest adder verified exhaustively.
pub const EXHAUSTIVE_MAX_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Txt,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Txt, ReportFormat::Svg];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchAdder {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legend: Option<String>,
    #[serde(flatten)]
    pub config: AdderConfig,
}

impl BenchAdder {
    pub fn legend(&self) -> String {
        self.legend
            .clone()
            .unwrap_or_else(|| format!("{}_{}", self.config.arch.name(), self.config.width))
    }
}

fn default_vectors() -> usize {
    DEFAULT_VECTORS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_period() -> f64 {
    DEFAULT_PERIOD_NS
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("bench-out")
}
fn default_formats() -> Vec<ReportFormat> {
    ReportFormat::ALL.to_vec()
}
fn default_adders() -> Vec<BenchAdder> {
    BenchmarkConfig::default_adders(DEFAULT_WIDTH)
}

/// Benchmark settings; loadable from TOML with every field optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    #[serde(default = "default_adders", rename = "adder")]
    pub adders: Vec<BenchAdder>,
    #[serde(default = "default_vectors")]
    pub n_vectors: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_period")]
    pub period_ns: f64,
    #[serde(default)]
    pub cells: Option<PathBuf>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            adders: default_adders(),
            n_vectors: DEFAULT_VECTORS,
            seed: DEFAULT_SEED,
            period_ns: DEFAULT_PERIOD_NS,
            cells: None,
            out_dir: default_out_dir(),
            formats: default_formats(),
        }
    }
}

impl BenchmarkConfig {
    /// The eight generated architectures with their published table legends.
    pub fn default_adders(width: usize) -> Vec<BenchAdder> {
        Architecture::ALL
            .into_iter()
            .map(|arch| BenchAdder {
                legend: Some(arch.report_legend().to_string()),
                config: AdderConfig::benchmark_default(arch, width),
            })
            .collect()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        let cfg: BenchmarkConfig =
            toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), BenchError> {
        if self.n_vectors < 2 {
            return Err(BenchError::Config(format!(
                "n_vectors must be at least 2, got {}",
                self.n_vectors
            )));
        }
        if !(self.period_ns.is_finite() && self.period_ns > 0.0) {
            return Err(BenchError::Config(format!(
                "period_ns must be positive, got {}",
                self.period_ns
            )));
        }
        if self.adders.is_empty() {
            return Err(BenchError::Config("at least one adder is required".into()));
        }
        let mut seen = HashSet::new();
        for a in &self.adders {
            let legend = a.legend();
            if !seen.insert(legend.clone()) {
                return Err(BenchError::Config(format!("duplicate legend `{legend}`")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("build {legend}: {cause}")]
    Build { legend: String, cause: BuildError },
    #[error("validate {legend}: {cause}")]
    Validate { legend: String, cause: NetlistError },
    #[error("verify {legend}: {mismatches} of {checked} vectors disagree with the reference adder (first: {first})")]
    Verify {
        legend: String,
        mismatches: u64,
        checked: u64,
        first: String,
    },
    #[error("simulate {legend}: {cause}")]
    Sim { legend: String, cause: SimError },
    #[error("analyse {legend}: {cause}")]
    Analysis {
        legend: String,
        cause: AnalysisError,
    },
    #[error("metrics: {0}")]
    Metrics(#[from] AnalysisError),
    #[error("fixture: {0}")]
    Fixture(String),
}

/// Per-adder measurements behind one metrics row.
#[derive(Debug, Clone)]
pub struct AdderResult {
    pub legend: String,
    pub config: AdderConfig,
    pub gates: usize,
    pub depth: usize,
    pub delay_ps: f64,
    pub area: f64,
    pub power_uw: f64,
    pub toggles: u64,
    pub verification: VerifyReport,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Generated,
    Fixture,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Generated => "generated",
            Provenance::Fixture => "fixture",
        }
    }
}

/// Metrics rows normalized over exactly this table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
    pub provenance: Provenance,
}

impl MetricsTable {
    pub fn from_points(points: &[DesignPoint], provenance: Provenance) -> Result<Self, BenchError> {
        let mut seen = HashSet::new();
        for p in points {
            if !seen.insert(p.legend.as_str()) {
                return Err(BenchError::Config(format!(
                    "duplicate legend `{}`",
                    p.legend
                )));
            }
        }
        Ok(MetricsTable {
            rows: combo_metrics(points)?,
            provenance,
        })
    }

    pub fn row(&self, legend: &str) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.legend == legend)
    }

    /// Legend of the best (smallest) design for `metric`.
    pub fn argmin(&self, metric: Metric) -> &str {
        let i = argmin(&self.rows, metric).expect("tables are never empty");
        &self.rows[i].legend
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub table: MetricsTable,
    pub adders: Vec<AdderResult>,
}

fn measure(
    adder: &BenchAdder,
    lib: &CellLibrary,
    cfg: &BenchmarkConfig,
) -> Result<AdderResult, BenchError> {
    let legend = adder.legend();
    let netlist = adder.config.build().map_err(|cause| BenchError::Build {
        legend: legend.clone(),
        cause,
    })?;
    validate(&netlist, lib).map_err(|issues| BenchError::Validate {
        legend: legend.clone(),
        cause: NetlistError::Invalid(issues),
    })?;
    let sim_err = |cause| BenchError::Sim {
        legend: legend.clone(),
        cause,
    };
    let exhaustive = netlist.width <= EXHAUSTIVE_MAX_WIDTH;
    let verification = if exhaustive {
        sim::verify_exhaustive(&netlist, lib)
    } else {
        sim::verify_random(&netlist, lib, VERIFY_VECTORS, cfg.seed)
    }
    .map_err(sim_err)?;
    if !verification.passed() {
        let first = verification
            .mismatches
            .first()
            .map(|m| {
                format!(
                    "{:?} gave {:?}, expected {:?}",
                    m.vector, m.actual, m.expected
                )
            })
            .unwrap_or_default();
        return Err(BenchError::Verify {
            legend,
            mismatches: verification.mismatch_count,
            checked: verification.vectors_checked,
            first,
        });
    }

    let analysis_err = |cause| BenchError::Analysis {
        legend: legend.clone(),
        cause,
    };
    let timing = analysis::critical_path(&netlist, lib).map_err(analysis_err)?;
    let area = analysis::area(&netlist, lib).map_err(analysis_err)?;
    let toggles =
        sim::run_vectors(&netlist, lib, cfg.n_vectors, cfg.seed, cfg.period_ns).map_err(sim_err)?;
    let power_uw = analysis::avg_power(&toggles, lib, cfg.period_ns).map_err(analysis_err)?;
    let depth = crate::netlist::levelize(&netlist)
        .map_err(|cause| BenchError::Validate {
            legend: legend.clone(),
            cause,
        })?
        .depth();

    Ok(AdderResult {
        legend: legend.clone(),
        config: adder.config.clone(),
        gates: netlist.gates.len(),
        depth,
        delay_ps: timing.critical_delay_ps,
        area,
        power_uw,
        toggles: toggles.total(),
        verification,
        exhaustive,
    })
}

/// Builds, verifies, and measures every adder. Adders are processed
/// concurrently; results keep configuration order.
pub fn run_bench(cfg: &BenchmarkConfig, lib: &CellLibrary) -> Result<BenchOutcome, BenchError> {
    cfg.check()?;
    let results: Vec<AdderResult> = cfg
        .adders
        .par_iter()
        .map(|a| measure(a, lib, cfg))
        .collect::<Result<_, _>>()?;
    let points: Vec<DesignPoint> = results
        .iter()
        .map(|r| DesignPoint {
            legend: r.legend.clone(),
            delay_ns: r.delay_ps / 1000.0,
            area: r.area,
            power_uw: r.power_uw,
        })
        .collect();
    Ok(BenchOutcome {
        table: MetricsTable::from_points(&points, Provenance::Generated)?,
        adders: results,
    })
}

#[derive(Debug, Deserialize)]
struct FixtureRow {
    legend: String,
    delay_ns: f64,
    area: f64,
    #[serde(alias = "power_uW", alias = "power")]
    power_uw: f64,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
}

/// Parses a `legend,delay_ns,area,power_uw` CSV (an optional trailing
/// `description` column is ignored).
pub fn parse_fixture(text: &str) -> Result<Vec<DesignPoint>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, record) in reader.deserialize::<FixtureRow>().enumerate() {
        let row = record.map_err(|e| BenchError::Fixture(format!("row {}: {e}", i + 1)))?;
        points.push(DesignPoint {
            legend: row.legend,
            delay_ns: row.delay_ns,
            area: row.area,
            power_uw: row.power_uw,
        });
    }
    if points.is_empty() {
        return Err(BenchError::Fixture("no data rows".into()));
    }
    Ok(points)
}

/// Combination metrics for a fixture CSV.
pub fn metrics_from_fixture(text: &str) -> Result<MetricsTable, BenchError> {
    MetricsTable::from_points(&parse_fixture(text)?, Provenance::Fixture)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_conclusions() {
        let table = metrics_from_fixture(PUBLISHED_FIXTURE).unwrap();
        assert_eq!(table.rows.len(), 12);
        assert_eq!(table.argmin(Metric::Pdp), "Adder8");
        assert_eq!(table.argmin(Metric::Edp), "Adder8");
        assert_eq!(table.argmin(Metric::Adp), "Adder11");
        assert_eq!(table.argmin(Metric::Pdap), "Adder1");
        let a8 = table.row("Adder8").unwrap();
        assert!((a8.pdp - 41.811).abs() < 1e-9);
        let min_n_pdp = table.rows.iter().map(|r| r.n_pdp).fold(f64::MAX, f64::min);
        assert_eq!(a8.n_pdp, min_n_pdp);
        for metric in Metric::ALL {
            let ones = table
                .rows
                .iter()
                .filter(|r| r.normalized(metric) == 1.0)
                .count();
            assert_eq!(ones, 1, "{metric}");
            assert!(table
                .rows
                .iter()
                .all(|r| r.normalized(metric) > 0.0 && r.normalized(metric) <= 1.0));
        }
    }

    #[test]
    fn fixture_errors() {
        assert!(matches!(
            metrics_from_fixture(""),
            Err(BenchError::Fixture(_))
        ));
        assert!(matches!(
            metrics_from_fixture("legend,delay_ns,area,power_uw\n"),
            Err(BenchError::Fixture(_))
        ));
        assert!(matches!(
            metrics_from_fixture("legend,delay_ns,area,power_uw\nA,x,1,1\n"),
            Err(BenchError::Fixture(_))
        ));
        assert!(matches!(
            metrics_from_fixture("legend,delay_ns,area,power_uw\nA,1,1,1\nA,2,2,2\n"),
            Err(BenchError::Config(_))
        ));
        assert!(matches!(
            metrics_from_fixture("legend,delay_ns,area,power_uw\nA,1,1,0\n"),
            Err(BenchError::Metrics(AnalysisError::NonPositiveMetric { .. }))
        ));
    }

    #[test]
    fn config_file_defaults_and_overrides() {
        let cfg = BenchmarkConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, BenchmarkConfig::default());
        assert_eq!(cfg.adders.len(), 8);
        let cfg = BenchmarkConfig::from_toml_str(
            r#"
            n_vectors = 64
            seed = 9
            [[adder]]
            legend = "mine"
            arch = "CSLA"
            width = 16
            partition = [4, 4, 8]
            fa_style = "gates"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.adders.len(), 1);
        assert_eq!(cfg.adders[0].config.partition, Some(vec![4, 4, 8]));
        assert_eq!(cfg.adders[0].legend(), "mine");
        assert!(BenchmarkConfig::from_toml_str("n_vectors = 1").is_err());
        assert!(BenchmarkConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn bad_partition_names_the_adder() {
        let cfg = BenchmarkConfig {
            adders: vec![BenchAdder {
                legend: Some("Adder11".into()),
                config: AdderConfig::new(Architecture::Csla, 32).with_partition(vec![8, 8, 8]),
            }],
            ..BenchmarkConfig::default()
        };
        let err = run_bench(&cfg, CellLibrary::builtin()).unwrap_err();
        assert!(matches!(
            err,
            BenchError::Build { ref legend, cause: BuildError::PartitionMismatch { .. } } if legend == "Adder11"
        ));
        assert!(err.to_string().starts_with("build Adder11"));
    }

    #[test]
    fn small_bench_runs() {
        let cfg = BenchmarkConfig {
            adders: BenchmarkConfig::default_adders(8),
            n_vectors: 100,
            ..BenchmarkConfig::default()
        };
        let out = run_bench(&cfg, CellLibrary::builtin()).unwrap();
        assert_eq!(out.table.rows.len(), 8);
        assert!(out
            .adders
            .iter()
            .all(|a| a.exhaustive && a.verification.passed()));
        assert_eq!(out.adders[0].verification.vectors_checked, 1 << 17);
    }
}
