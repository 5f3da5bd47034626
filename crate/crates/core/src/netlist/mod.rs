//! Flat combinational gate netlists.
//!
//! Nets are dense integer ids. Every net has exactly one driver: an input
//! port bit, a constant tie, or a gate output. Gate ids are positions in
//! [`Netlist::gates`] and follow construction order, so reports derived from
//! a netlist are reproducible.

mod builder;
mod format;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::cell::CellLibrary;

pub use builder::NetlistBuilder;
pub use format::{parse_netlist, write_netlist, FormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Position of a gate in [`Netlist::gates`].
pub type GateId = usize;

/// A named, ordered group of port nets (bit 0 first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub nets: Vec<NetId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateInstance {
    pub cell: String,
    pub inputs: Vec<NetId>,
    pub outputs: Vec<NetId>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist {
    /// Operand width for adders; input width for fragments.
    pub width: usize,
    pub net_count: usize,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    /// Constant ties. They drive nets but are not cells.
    pub constants: Vec<(NetId, bool)>,
    pub gates: Vec<GateInstance>,
    /// Named probe points, e.g. group carry nets of lookahead adders.
    pub labels: Vec<(String, NetId)>,
}

/// Port view of a netlist following the adder convention
/// `a[0..w), b[0..w), cin -> sum[0..w), cout`.
#[derive(Debug, Clone, Copy)]
pub struct AdderPorts<'a> {
    pub a: &'a [NetId],
    pub b: &'a [NetId],
    pub cin: NetId,
    pub sum: &'a [NetId],
    pub cout: NetId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Driver {
    Input { port: usize, bit: usize },
    Constant(bool),
    Gate { gate: GateId, pin: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    NetOutOfRange(NetId),
    MultipleDrivers(NetId),
    UndrivenNet(NetId),
    DanglingNet(NetId),
    CombinationalLoop(Vec<GateId>),
    UnknownCell { gate: GateId, cell: String },
    ArityMismatch { gate: GateId, cell: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NetOutOfRange(n) => write!(f, "net {n} is out of range"),
            ValidationIssue::MultipleDrivers(n) => write!(f, "net {n} has multiple drivers"),
            ValidationIssue::UndrivenNet(n) => write!(f, "net {n} is undriven"),
            ValidationIssue::DanglingNet(n) => write!(f, "net {n} has no loads"),
            ValidationIssue::CombinationalLoop(gates) => {
                write!(f, "combinational loop through gates {gates:?}")
            }
            ValidationIssue::UnknownCell { gate, cell } => {
                write!(f, "gate {gate} uses unknown cell `{cell}`")
            }
            ValidationIssue::ArityMismatch { gate, cell } => {
                write!(f, "gate {gate} pin counts do not match cell `{cell}`")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("invalid netlist: {}", join_issues(.0))]
    Invalid(Vec<ValidationIssue>),
    #[error("combinational loop through gates {0:?}")]
    CombinationalLoop(Vec<GateId>),
    #[error("netlist is not an adder: {0}")]
    NotAnAdder(String),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    let shown: Vec<String> = issues.iter().take(8).map(|i| i.to_string()).collect();
    let mut s = shown.join("; ");
    if issues.len() > 8 {
        s.push_str(&format!("; ... {} more", issues.len() - 8));
    }
    s
}

/// Gates grouped by logic level. Level `k` (index `k - 1`) only reads ports,
/// constants, and outputs of lower levels; gates within a level are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub levels: Vec<Vec<GateId>>,
}

impl Schedule {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Topological gate order.
    pub fn order(&self) -> impl Iterator<Item = GateId> + '_ {
        self.levels.iter().flatten().copied()
    }

    /// Level of every gate (1-based), indexed by gate id.
    pub fn gate_levels(&self, gate_count: usize) -> Vec<usize> {
        let mut out = vec![0; gate_count];
        for (l, level) in self.levels.iter().enumerate() {
            for &g in level {
                out[g] = l + 1;
            }
        }
        out
    }
}

impl Netlist {
    pub fn input(&self, name: &str) -> Option<&Port> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&Port> {
        self.outputs.iter().find(|p| p.name == name)
    }

    pub fn label(&self, name: &str) -> Option<NetId> {
        self.labels
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, net)| net)
    }

    pub fn count_cells(&self, cell: &str) -> usize {
        self.gates.iter().filter(|g| g.cell == cell).count()
    }

    pub fn adder_ports(&self) -> Result<AdderPorts<'_>, NetlistError> {
        let w = self.width;
        if w == 0 || w > 64 {
            return Err(NetlistError::NotAnAdder(format!("unsupported width {w}")));
        }
        Ok(AdderPorts {
            a: find_port(&self.inputs, "a", w)?,
            b: find_port(&self.inputs, "b", w)?,
            cin: find_port(&self.inputs, "cin", 1)?[0],
            sum: find_port(&self.outputs, "sum", w)?,
            cout: find_port(&self.outputs, "cout", 1)?[0],
        })
    }

    /// Driver of every net; `None` for undriven nets. With multiple drivers the
    /// first one found (ports, then constants, then gates) wins.
    pub fn drivers(&self) -> Vec<Option<Driver>> {
        let mut drivers = vec![None; self.net_count];
        let mut set = |net: NetId, d: Driver| {
            if let Some(slot) = drivers.get_mut(net.index()) {
                if slot.is_none() {
                    *slot = Some(d);
                }
            }
        };
        for (p, port) in self.inputs.iter().enumerate() {
            for (bit, &net) in port.nets.iter().enumerate() {
                set(net, Driver::Input { port: p, bit });
            }
        }
        for &(net, value) in &self.constants {
            set(net, Driver::Constant(value));
        }
        for (g, gate) in self.gates.iter().enumerate() {
            for (pin, &net) in gate.outputs.iter().enumerate() {
                set(net, Driver::Gate { gate: g, pin });
            }
        }
        drivers
    }

    /// Gates reading each net.
    pub fn fanouts(&self) -> Vec<Vec<GateId>> {
        let mut out = vec![Vec::new(); self.net_count];
        for (g, gate) in self.gates.iter().enumerate() {
            for &net in &gate.inputs {
                if let Some(v) = out.get_mut(net.index()) {
                    if v.last() != Some(&g) {
                        v.push(g);
                    }
                }
            }
        }
        out
    }
}

fn find_port<'a>(ports: &'a [Port], name: &str, bits: usize) -> Result<&'a [NetId], NetlistError> {
    let p = ports
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| NetlistError::NotAnAdder(format!("missing port `{name}`")))?;
    if p.nets.len() != bits {
        return Err(NetlistError::NotAnAdder(format!(
            "port `{name}` has {} bits, expected {bits}",
            p.nets.len()
        )));
    }
    Ok(&p.nets)
}

/// Structural checks that do not need a cell library.
pub fn validate_structure(netlist: &Netlist) -> Result<(), Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    let n = netlist.net_count;
    let mut seen_out_of_range = BTreeSet::new();
    let mut check = |net: NetId, issues: &mut Vec<ValidationIssue>| {
        if net.index() >= n && seen_out_of_range.insert(net) {
            issues.push(ValidationIssue::NetOutOfRange(net));
        }
    };

    let mut driver_count = vec![0u32; n];
    let mut load_count = vec![0u32; n];
    let bump = |counts: &mut Vec<u32>, net: NetId| {
        if let Some(c) = counts.get_mut(net.index()) {
            *c += 1;
        }
    };
    for port in &netlist.inputs {
        for &net in &port.nets {
            check(net, &mut issues);
            bump(&mut driver_count, net);
        }
    }
    for &(net, _) in &netlist.constants {
        check(net, &mut issues);
        bump(&mut driver_count, net);
    }
    for gate in &netlist.gates {
        for &net in &gate.outputs {
            check(net, &mut issues);
            bump(&mut driver_count, net);
        }
        for &net in &gate.inputs {
            check(net, &mut issues);
            bump(&mut load_count, net);
        }
    }
    for port in &netlist.outputs {
        for &net in &port.nets {
            check(net, &mut issues);
            bump(&mut load_count, net);
        }
    }
    for (_, net) in &netlist.labels {
        check(*net, &mut issues);
    }

    for i in 0..n {
        let net = NetId(i as u32);
        match driver_count[i] {
            0 => issues.push(ValidationIssue::UndrivenNet(net)),
            1 => {}
            _ => issues.push(ValidationIssue::MultipleDrivers(net)),
        }
        if driver_count[i] > 0 && load_count[i] == 0 {
            issues.push(ValidationIssue::DanglingNet(net));
        }
    }

    if let Err(cycle) = levelize_inner(netlist) {
        issues.push(ValidationIssue::CombinationalLoop(cycle));
    }

    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// Full validation: structure plus binding of every gate to a library cell.
pub fn validate(netlist: &Netlist, lib: &CellLibrary) -> Result<(), Vec<ValidationIssue>> {
    let mut issues = match validate_structure(netlist) {
        Ok(()) => Vec::new(),
        Err(issues) => issues,
    };
    for (g, gate) in netlist.gates.iter().enumerate() {
        match lib.get(&gate.cell) {
            None => issues.push(ValidationIssue::UnknownCell {
                gate: g,
                cell: gate.cell.clone(),
            }),
            Some(spec) => {
                if spec.arity() != gate.inputs.len() || spec.outputs.len() != gate.outputs.len() {
                    issues.push(ValidationIssue::ArityMismatch {
                        gate: g,
                        cell: gate.cell.clone(),
                    });
                }
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// Groups gates into logic levels. Ports and constants are level 0 and a gate
/// sits one level above its deepest driving gate.
pub fn levelize(netlist: &Netlist) -> Result<Schedule, NetlistError> {
    levelize_inner(netlist).map_err(NetlistError::CombinationalLoop)
}

fn levelize_inner(netlist: &Netlist) -> Result<Schedule, Vec<GateId>> {
    let gate_count = netlist.gates.len();
    let drivers = netlist.drivers();
    let driver_gate = |net: NetId| match drivers.get(net.index()) {
        Some(Some(Driver::Gate { gate, .. })) => Some(*gate),
        _ => None,
    };

    let mut pending = vec![0usize; gate_count];
    let mut successors = vec![Vec::new(); gate_count];
    for (g, gate) in netlist.gates.iter().enumerate() {
        for &net in &gate.inputs {
            if let Some(d) = driver_gate(net) {
                pending[g] += 1;
                successors[d].push(g);
            }
        }
    }

    let mut level = vec![0usize; gate_count];
    let mut queue: VecDeque<GateId> = (0..gate_count).filter(|&g| pending[g] == 0).collect();
    for &g in &queue {
        level[g] = 1;
    }
    let mut done = 0;
    while let Some(g) = queue.pop_front() {
        done += 1;
        for &s in &successors[g] {
            level[s] = level[s].max(level[g] + 1);
            pending[s] -= 1;
            if pending[s] == 0 {
                queue.push_back(s);
            }
        }
    }

    if done < gate_count {
        return Err(find_cycle(netlist, &pending, driver_gate));
    }

    let depth = level.iter().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); depth];
    for (g, &l) in level.iter().enumerate() {
        levels[l - 1].push(g);
    }
    Ok(Schedule { levels })
}

fn find_cycle(
    netlist: &Netlist,
    pending: &[usize],
    driver_gate: impl Fn(NetId) -> Option<GateId>,
) -> Vec<GateId> {
    // Every unscheduled gate has an unscheduled driving gate, so walking
    // backwards must revisit a gate.
    let start = pending
        .iter()
        .position(|&p| p > 0)
        .expect("a gate is unscheduled");
    let mut visited_at = vec![usize::MAX; pending.len()];
    let mut walk = Vec::new();
    let mut g = start;
    while visited_at[g] == usize::MAX {
        visited_at[g] = walk.len();
        walk.push(g);
        g = netlist.gates[g]
            .inputs
            .iter()
            .filter_map(|&n| driver_gate(n))
            .find(|&d| pending[d] > 0)
            .expect("unscheduled gate has an unscheduled driver");
    }
    let mut cycle: Vec<GateId> = walk[visited_at[g]..].to_vec();
    // walk is load-to-driver; report driver-to-load starting at the smallest id
    cycle.reverse();
    let min_pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, g)| *g)
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(min_pos);
    cycle
}
