//! Static timing, area, average power, and combination design metrics.
//!
//! Timing uses one worst-case delay per cell output: a gate output arrives
//! at the latest arrival among the gate's inputs plus that output's delay.
//! Ports and constant ties arrive at 0 ps.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cell::{CellLibrary, CellSpec};
use crate::netlist::{levelize, validate, Driver, GateId, NetId, Netlist, NetlistError};
use crate::sim::ToggleStats;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{metric} of `{legend}` must be positive, got {value}")]
    NonPositiveMetric {
        legend: String,
        metric: &'static str,
        value: f64,
    },
    #[error("no rows to analyse")]
    EmptyInput,
    #[error("reference delay must be positive, got {0}")]
    DivideByZero(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub critical_delay_ps: f64,
    /// Gates on the critical path, from the launching port to the output.
    pub critical_path: Vec<GateId>,
    /// Arrival per output port bit, e.g. `("sum[31]", 1455.0)`.
    pub output_arrivals: Vec<(String, f64)>,
    /// Arrival at every net.
    pub net_arrivals: Vec<f64>,
}

impl TimingReport {
    pub fn arrival(&self, net: NetId) -> f64 {
        self.net_arrivals[net.index()]
    }

    pub fn critical_delay_ns(&self) -> f64 {
        self.critical_delay_ps / 1000.0
    }
}

/// Longest-path timing of a validated netlist. Ties are broken towards the
/// smallest gate id, so the reported path is deterministic.
pub fn critical_path(netlist: &Netlist, lib: &CellLibrary) -> Result<TimingReport, AnalysisError> {
    validate(netlist, lib).map_err(NetlistError::Invalid)?;
    timing(netlist, lib)
}

/// Timing without the dangling-net checks of full validation; cells must
/// bind and the graph must be acyclic.
fn timing(netlist: &Netlist, lib: &CellLibrary) -> Result<TimingReport, AnalysisError> {
    let schedule = levelize(netlist)?;
    let drivers = netlist.drivers();
    let mut arrival = vec![0.0f64; netlist.net_count];
    for g in schedule.order() {
        let gate = &netlist.gates[g];
        let cell = lib
            .get(&gate.cell)
            .ok_or_else(|| AnalysisError::UnknownCell(gate.cell.clone()))?;
        let ready = gate
            .inputs
            .iter()
            .map(|n| arrival[n.index()])
            .fold(0.0, f64::max);
        for (net, out) in gate.outputs.iter().zip(&cell.outputs) {
            arrival[net.index()] = ready + out.delay_ps;
        }
    }

    let driver_gate = |net: NetId| match drivers[net.index()] {
        Some(Driver::Gate { gate, .. }) => Some(gate),
        _ => None,
    };
    // latest arrival first, then smallest driving gate id; port-driven nets last
    let better = |cand: NetId, best: NetId| {
        let (ca, ba) = (arrival[cand.index()], arrival[best.index()]);
        if ca != ba {
            return ca > ba;
        }
        match (driver_gate(cand), driver_gate(best)) {
            (Some(c), Some(b)) => c < b,
            (Some(_), None) => true,
            _ => false,
        }
    };

    let mut output_arrivals = Vec::new();
    let mut end: Option<NetId> = None;
    for port in &netlist.outputs {
        for (bit, &net) in port.nets.iter().enumerate() {
            let name = if port.nets.len() == 1 {
                port.name.clone()
            } else {
                format!("{}[{bit}]", port.name)
            };
            output_arrivals.push((name, arrival[net.index()]));
            if end.is_none_or(|best| better(net, best)) {
                end = Some(net);
            }
        }
    }

    let mut path = Vec::new();
    let mut cursor = end;
    while let Some(net) = cursor {
        let Some(g) = driver_gate(net) else { break };
        path.push(g);
        cursor = netlist.gates[g]
            .inputs
            .iter()
            .copied()
            .reduce(|best, cand| if better(cand, best) { cand } else { best });
    }
    path.reverse();

    Ok(TimingReport {
        critical_delay_ps: end.map_or(0.0, |n| arrival[n.index()]),
        critical_path: path,
        output_arrivals,
        net_arrivals: arrival,
    })
}

/// Sums `count × weight` per cell in name order, so the result does not
/// depend on gate order.
fn per_cell_sum<'a>(
    counts: impl Iterator<Item = (&'a str, u64)>,
    lib: &CellLibrary,
    weight: impl Fn(&CellSpec) -> f64,
) -> Result<f64, AnalysisError> {
    let mut by_cell: BTreeMap<&str, u64> = BTreeMap::new();
    for (cell, n) in counts {
        *by_cell.entry(cell).or_default() += n;
    }
    by_cell.into_iter().try_fold(0.0, |acc, (cell, n)| {
        lib.get(cell)
            .map(|c| acc + n as f64 * weight(c))
            .ok_or_else(|| AnalysisError::UnknownCell(cell.to_string()))
    })
}

/// Sum of cell areas; constant ties are free.
pub fn area(netlist: &Netlist, lib: &CellLibrary) -> Result<f64, AnalysisError> {
    per_cell_sum(
        netlist.gates.iter().map(|g| (g.cell.as_str(), 1)),
        lib,
        |c| c.area,
    )
}

/// Average dynamic power in µW:
/// `Σ toggles × switch energy (fJ) / ((vectors - 1) × period (ns))`.
pub fn avg_power(
    toggles: &ToggleStats,
    lib: &CellLibrary,
    period_ns: f64,
) -> Result<f64, AnalysisError> {
    if toggles.vectors_applied < 2 {
        return Err(AnalysisError::InvalidParams(format!(
            "need at least 2 applied vectors, got {}",
            toggles.vectors_applied
        )));
    }
    if !(period_ns.is_finite() && period_ns > 0.0) {
        return Err(AnalysisError::InvalidParams(format!(
            "period must be positive, got {period_ns}"
        )));
    }
    let energy_fj = per_cell_sum(
        toggles.gates.iter().map(|g| (g.cell.as_str(), g.total())),
        lib,
        |c| c.switch_energy_fj,
    )?;
    let elapsed_ns = (toggles.vectors_applied - 1) as f64 * period_ns;
    Ok(energy_fj / elapsed_ns)
}

/// Delay, area, and power of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    pub legend: String,
    pub delay_ns: f64,
    pub area: f64,
    pub power_uw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Pdp,
    Edp,
    Adp,
    Pdap,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Pdp, Metric::Edp, Metric::Adp, Metric::Pdap];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Pdp => "PDP",
            Metric::Edp => "EDP",
            Metric::Adp => "ADP",
            Metric::Pdap => "PDAP",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub legend: String,
    pub delay_ns: f64,
    pub area: f64,
    pub power_uw: f64,
    /// µW·ns
    pub pdp: f64,
    /// µW·ns²
    pub edp: f64,
    pub adp: f64,
    pub pdap: f64,
    pub n_pdp: f64,
    pub n_edp: f64,
    pub n_adp: f64,
    pub n_pdap: f64,
}

impl MetricsRow {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Pdp => self.pdp,
            Metric::Edp => self.edp,
            Metric::Adp => self.adp,
            Metric::Pdap => self.pdap,
        }
    }

    pub fn normalized(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Pdp => self.n_pdp,
            Metric::Edp => self.n_edp,
            Metric::Adp => self.n_adp,
            Metric::Pdap => self.n_pdap,
        }
    }
}

/// Divides every value by the largest one.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|&&v| !(v.is_finite() && v > 0.0)) {
        return Err(AnalysisError::NonPositiveMetric {
            legend: String::new(),
            metric: "value",
            value: bad,
        });
    }
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    Ok(values.iter().map(|v| v / max).collect())
}

/// PDP, EDP, ADP, PDAP per design, normalized across all designs.
pub fn combo_metrics(points: &[DesignPoint]) -> Result<Vec<MetricsRow>, AnalysisError> {
    if points.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    for p in points {
        for (metric, value) in [
            ("delay", p.delay_ns),
            ("area", p.area),
            ("power", p.power_uw),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(AnalysisError::NonPositiveMetric {
                    legend: p.legend.clone(),
                    metric,
                    value,
                });
            }
        }
    }
    let mut rows: Vec<MetricsRow> = points
        .iter()
        .map(|p| {
            let pdp = p.power_uw * p.delay_ns;
            MetricsRow {
                legend: p.legend.clone(),
                delay_ns: p.delay_ns,
                area: p.area,
                power_uw: p.power_uw,
                pdp,
                edp: pdp * p.delay_ns,
                adp: p.area * p.delay_ns,
                pdap: pdp * p.area,
                n_pdp: 0.0,
                n_edp: 0.0,
                n_adp: 0.0,
                n_pdap: 0.0,
            }
        })
        .collect();
    for metric in Metric::ALL {
        let values: Vec<f64> = rows.iter().map(|r| r.value(metric)).collect();
        for (row, n) in rows.iter_mut().zip(normalize(&values)?) {
            match metric {
                Metric::Pdp => row.n_pdp = n,
                Metric::Edp => row.n_edp = n,
                Metric::Adp => row.n_adp = n,
                Metric::Pdap => row.n_pdap = n,
            }
        }
    }
    Ok(rows)
}

/// Index of the row with the smallest value of `metric` (first on ties).
pub fn argmin(rows: &[MetricsRow], metric: Metric) -> Option<usize> {
    rows.iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.value(metric).total_cmp(&y.value(metric)))
        .map(|(i, _)| i)
}

/// How much `delay_a` exceeds `delay_b`, in percent of `delay_b`.
pub fn delay_exceedance(delay_a: f64, delay_b: f64) -> Result<f64, AnalysisError> {
    if delay_b.is_nan() || delay_b <= 0.0 {
        return Err(AnalysisError::DivideByZero(delay_b));
    }
    Ok(100.0 * (delay_a - delay_b) / delay_b)
}
