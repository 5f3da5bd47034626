//! Levelized zero-delay logic simulation.
//!
//! Gates are evaluated in schedule order on 64-bit words, one input vector
//! per bit lane, so a batch covers up to 64 vectors. Toggle counting compares
//! each settled gate output against its settled value for the previous
//! vector; glitches are not modelled.

use rayon::prelude::*;
use thiserror::Error;

use crate::cell::CellLibrary;
use crate::netlist::{levelize, validate, Driver, GateId, Netlist, NetlistError};
use crate::rng::{exhaustive_vectors, random_vectors, width_mask};

const LANES: usize = 64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("input vector {vector:?} does not fit a {width}-bit adder")]
    WidthOverflow { vector: InputVector, width: usize },
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InputVector {
    pub a: u64,
    pub b: u64,
    pub cin: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdderOutput {
    pub sum: u64,
    pub cout: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub sum: u64,
    pub cout: bool,
    /// Settled value of every net.
    pub nets: Vec<bool>,
}

/// Wide-integer reference addition.
pub fn reference_add(width: usize, v: InputVector) -> AdderOutput {
    let total = v.a as u128 + v.b as u128 + v.cin as u128;
    AdderOutput {
        sum: (total as u64) & width_mask(width),
        cout: (total >> width) & 1 == 1,
    }
}

#[derive(Debug, Clone)]
struct CompiledGate {
    inputs: Vec<usize>,
    outputs: Vec<(usize, u64)>,
}

/// A validated netlist compiled against a cell library.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    schedule: Vec<CompiledGate>,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist, lib: &CellLibrary) -> Result<Self, SimError> {
        validate(netlist, lib).map_err(NetlistError::Invalid)?;
        let order: Vec<GateId> = levelize(netlist)?.order().collect();
        Ok(Self::compile(netlist, lib, order))
    }

    /// Uses a caller-supplied gate order, which must be topological.
    pub fn with_order(
        netlist: &'a Netlist,
        lib: &CellLibrary,
        order: &[GateId],
    ) -> Result<Self, SimError> {
        validate(netlist, lib).map_err(NetlistError::Invalid)?;
        let mut position = vec![usize::MAX; netlist.gates.len()];
        for (i, &g) in order.iter().enumerate() {
            if g >= position.len() || position[g] != usize::MAX {
                return Err(SimError::InvalidParams(format!(
                    "gate order repeats or exceeds gate {g}"
                )));
            }
            position[g] = i;
        }
        if order.len() != netlist.gates.len() {
            return Err(SimError::InvalidParams("gate order is incomplete".into()));
        }
        let drivers = netlist.drivers();
        for (i, &g) in order.iter().enumerate() {
            for net in &netlist.gates[g].inputs {
                if let Some(Driver::Gate { gate, .. }) = drivers[net.index()] {
                    if position[gate] > i {
                        return Err(SimError::InvalidParams(format!(
                            "gate {g} is scheduled before its driver {gate}"
                        )));
                    }
                }
            }
        }
        Ok(Self::compile(netlist, lib, order.to_vec()))
    }

    fn compile(netlist: &'a Netlist, lib: &CellLibrary, order: Vec<GateId>) -> Self {
        let schedule = order
            .into_iter()
            .map(|id| {
                let gate = &netlist.gates[id];
                let cell = lib.get(&gate.cell).expect("validated cell binding");
                CompiledGate {
                    inputs: gate.inputs.iter().map(|n| n.index()).collect(),
                    outputs: gate
                        .outputs
                        .iter()
                        .zip(&cell.outputs)
                        .map(|(n, o)| (n.index(), o.truth_table))
                        .collect(),
                }
            })
            .collect();
        Simulator { netlist, schedule }
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    /// Net state with constant ties applied and everything else zero.
    pub fn blank_state(&self) -> Vec<u64> {
        let mut state = vec![0u64; self.netlist.net_count];
        for &(net, value) in &self.netlist.constants {
            state[net.index()] = if value { u64::MAX } else { 0 };
        }
        state
    }

    /// Evaluates every gate; input port nets must already be set.
    pub fn eval(&self, state: &mut [u64]) {
        let mut operands = [0u64; crate::cell::MAX_INPUT_PINS];
        for gate in &self.schedule {
            let k = gate.inputs.len();
            for (slot, &net) in operands.iter_mut().zip(&gate.inputs) {
                *slot = state[net];
            }
            for &(net, table) in &gate.outputs {
                state[net] = eval_word(table, k, &operands[..k]);
            }
        }
    }
}

/// Evaluates a packed truth table on 64 lanes by Shannon expansion on the
/// highest input.
fn eval_word(table: u64, k: usize, inputs: &[u64]) -> u64 {
    if k == 0 {
        return if table & 1 == 1 { u64::MAX } else { 0 };
    }
    let half = 1usize << (k - 1);
    let low_mask = if half >= 64 {
        u64::MAX
    } else {
        (1u64 << half) - 1
    };
    let lo = table & low_mask;
    let hi = (table >> half) & low_mask;
    if lo == hi {
        return eval_word(lo, k - 1, inputs);
    }
    let sel = inputs[k - 1];
    (eval_word(lo, k - 1, inputs) & !sel) | (eval_word(hi, k - 1, inputs) & sel)
}

/// Simulator bound to the adder port convention.
#[derive(Debug, Clone)]
pub struct AdderSim<'a> {
    sim: Simulator<'a>,
    width: usize,
    a: Vec<usize>,
    b: Vec<usize>,
    cin: usize,
    sum: Vec<usize>,
    cout: usize,
}

impl<'a> AdderSim<'a> {
    pub fn new(netlist: &'a Netlist, lib: &CellLibrary) -> Result<Self, SimError> {
        Self::from_simulator(Simulator::new(netlist, lib)?)
    }

    pub fn from_simulator(sim: Simulator<'a>) -> Result<Self, SimError> {
        let ports = sim.netlist.adder_ports()?;
        let idx = |nets: &[crate::netlist::NetId]| nets.iter().map(|n| n.index()).collect();
        Ok(AdderSim {
            width: sim.netlist.width,
            a: idx(ports.a),
            b: idx(ports.b),
            cin: ports.cin.index(),
            sum: idx(ports.sum),
            cout: ports.cout.index(),
            sim,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn simulator(&self) -> &Simulator<'a> {
        &self.sim
    }

    fn check(&self, v: &InputVector) -> Result<(), SimError> {
        let mask = width_mask(self.width);
        if v.a & !mask != 0 || v.b & !mask != 0 {
            return Err(SimError::WidthOverflow {
                vector: *v,
                width: self.width,
            });
        }
        Ok(())
    }

    fn check_all(&self, vectors: &[InputVector]) -> Result<(), SimError> {
        vectors.iter().try_for_each(|v| self.check(v))
    }

    /// Loads up to 64 vectors into the lanes of `state` and evaluates.
    fn eval_batch(&self, state: &mut [u64], batch: &[InputVector]) {
        debug_assert!(batch.len() <= LANES);
        for (bit, (&na, &nb)) in self.a.iter().zip(&self.b).enumerate() {
            let mut wa = 0u64;
            let mut wb = 0u64;
            for (lane, v) in batch.iter().enumerate() {
                wa |= ((v.a >> bit) & 1) << lane;
                wb |= ((v.b >> bit) & 1) << lane;
            }
            state[na] = wa;
            state[nb] = wb;
        }
        state[self.cin] = batch
            .iter()
            .enumerate()
            .fold(0, |w, (lane, v)| w | (u64::from(v.cin) << lane));
        self.sim.eval(state);
    }

    fn decode(&self, state: &[u64], lane: usize) -> AdderOutput {
        let sum = self.sum.iter().enumerate().fold(0u64, |acc, (bit, &n)| {
            acc | (((state[n] >> lane) & 1) << bit)
        });
        AdderOutput {
            sum,
            cout: (state[self.cout] >> lane) & 1 == 1,
        }
    }

    /// Evaluates one vector, keeping every net value.
    pub fn simulate(&self, v: InputVector) -> Result<SimResult, SimError> {
        self.check(&v)?;
        let mut state = self.sim.blank_state();
        self.eval_batch(&mut state, &[v]);
        let out = self.decode(&state, 0);
        Ok(SimResult {
            sum: out.sum,
            cout: out.cout,
            nets: state.iter().map(|w| w & 1 == 1).collect(),
        })
    }

    pub fn run(&self, vectors: &[InputVector]) -> Result<Vec<AdderOutput>, SimError> {
        self.check_all(vectors)?;
        let mut state = self.sim.blank_state();
        let mut out = Vec::with_capacity(vectors.len());
        for batch in vectors.chunks(LANES) {
            self.eval_batch(&mut state, batch);
            out.extend((0..batch.len()).map(|lane| self.decode(&state, lane)));
        }
        Ok(out)
    }

    /// Output transitions per gate output (in gate order) across `seq`. The
    /// first vector only establishes the initial state.
    fn transitions(&self, seq: &[InputVector]) -> Vec<Vec<u64>> {
        let netlist = self.sim.netlist;
        let mut counts: Vec<Vec<u64>> = netlist
            .gates
            .iter()
            .map(|g| vec![0; g.outputs.len()])
            .collect();
        let mut last: Vec<Vec<u64>> = counts.clone();
        let mut state = self.sim.blank_state();
        for (i, batch) in seq.chunks(LANES).enumerate() {
            self.eval_batch(&mut state, batch);
            let n = batch.len();
            let mut lanes = width_mask(n);
            if i == 0 {
                lanes &= !1;
            }
            for (g, gate) in netlist.gates.iter().enumerate() {
                for (pin, net) in gate.outputs.iter().enumerate() {
                    let w = state[net.index()];
                    let shifted = (w << 1) | last[g][pin];
                    counts[g][pin] += u64::from(((w ^ shifted) & lanes).count_ones());
                    last[g][pin] = (w >> (n - 1)) & 1;
                }
            }
        }
        counts
    }
}

/// Per-gate output transition counts from one vector stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToggleStats {
    pub gates: Vec<GateToggles>,
    pub vectors_applied: usize,
    /// Seed of the random stream, when one was used.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateToggles {
    pub gate: GateId,
    pub cell: String,
    /// Transitions per output pin.
    pub outputs: Vec<u64>,
}

impl GateToggles {
    pub fn total(&self) -> u64 {
        self.outputs.iter().sum()
    }
}

impl ToggleStats {
    pub fn total(&self) -> u64 {
        self.gates.iter().map(GateToggles::total).sum()
    }

    /// `gate,cell,toggles` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gate,cell,toggles\n");
        for g in &self.gates {
            out.push_str(&format!("{},{},{}\n", g.gate, g.cell, g.total()));
        }
        out
    }
}

fn toggle_stats(
    netlist: &Netlist,
    counts: Vec<Vec<u64>>,
    vectors_applied: usize,
    seed: Option<u64>,
) -> ToggleStats {
    ToggleStats {
        gates: netlist
            .gates
            .iter()
            .zip(counts)
            .enumerate()
            .map(|(gate, (g, outputs))| GateToggles {
                gate,
                cell: g.cell.clone(),
                outputs,
            })
            .collect(),
        vectors_applied,
        seed,
    }
}

/// Toggle counts for an explicit vector sequence.
pub fn run_stream(
    netlist: &Netlist,
    lib: &CellLibrary,
    vectors: &[InputVector],
) -> Result<ToggleStats, SimError> {
    run_stream_parallel(netlist, lib, vectors, 1)
}

/// Splits the stream into `workers` contiguous sub-streams. Each worker
/// re-applies the vector preceding its sub-stream to seed its previous
/// state, so merged counts equal the single-worker result.
pub fn run_stream_parallel(
    netlist: &Netlist,
    lib: &CellLibrary,
    vectors: &[InputVector],
    workers: usize,
) -> Result<ToggleStats, SimError> {
    if vectors.len() < 2 {
        return Err(SimError::InvalidParams(format!(
            "need at least 2 vectors, got {}",
            vectors.len()
        )));
    }
    let sim = AdderSim::new(netlist, lib)?;
    sim.check_all(vectors)?;
    let workers = workers.clamp(1, vectors.len());
    let chunk = vectors.len().div_ceil(workers);
    let partials: Vec<Vec<Vec<u64>>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let start = w * chunk;
            let end = ((w + 1) * chunk).min(vectors.len());
            if start >= end {
                return Vec::new();
            }
            sim.transitions(&vectors[start.saturating_sub(1)..end])
        })
        .collect();
    let mut merged: Vec<Vec<u64>> = netlist
        .gates
        .iter()
        .map(|g| vec![0; g.outputs.len()])
        .collect();
    for part in partials {
        for (m, p) in merged.iter_mut().zip(part) {
            for (x, y) in m.iter_mut().zip(p) {
                *x += y;
            }
        }
    }
    Ok(toggle_stats(netlist, merged, vectors.len(), None))
}

/// Applies `n_vectors` seeded random vectors (see [`crate::rng`]) and counts
/// output toggles. `period_ns` is checked here and used by power estimation.
pub fn run_vectors(
    netlist: &Netlist,
    lib: &CellLibrary,
    n_vectors: usize,
    seed: u64,
    period_ns: f64,
) -> Result<ToggleStats, SimError> {
    if n_vectors < 2 {
        return Err(SimError::InvalidParams(format!(
            "need at least 2 vectors, got {n_vectors}"
        )));
    }
    if !(period_ns.is_finite() && period_ns > 0.0) {
        return Err(SimError::InvalidParams(format!(
            "period must be positive, got {period_ns}"
        )));
    }
    let vectors = random_vectors(netlist.width, n_vectors, seed);
    let workers = rayon::current_num_threads().min(n_vectors / 256).max(1);
    let mut stats = run_stream_parallel(netlist, lib, &vectors, workers)?;
    stats.seed = Some(seed);
    Ok(stats)
}

/// Evaluates one adder input vector.
pub fn simulate(
    netlist: &Netlist,
    lib: &CellLibrary,
    vector: InputVector,
) -> Result<SimResult, SimError> {
    AdderSim::new(netlist, lib)?.simulate(vector)
}

/// Evaluates a netlist with arbitrary ports: `inputs[i]` holds the bits of
/// input port `i`; returns one value per output port. Ports are at most 64
/// bits wide.
pub fn simulate_ports(
    netlist: &Netlist,
    lib: &CellLibrary,
    inputs: &[u64],
) -> Result<Vec<u64>, SimError> {
    if inputs.len() != netlist.inputs.len() {
        return Err(SimError::InvalidParams(format!(
            "netlist has {} input ports, got {} values",
            netlist.inputs.len(),
            inputs.len()
        )));
    }
    let sim = Simulator::new(netlist, lib)?;
    let mut state = sim.blank_state();
    for (port, &value) in netlist.inputs.iter().zip(inputs) {
        if port.nets.len() > 64 {
            return Err(SimError::InvalidParams(format!(
                "port `{}` exceeds 64 bits",
                port.name
            )));
        }
        for (bit, net) in port.nets.iter().enumerate() {
            state[net.index()] = if (value >> bit) & 1 == 1 { u64::MAX } else { 0 };
        }
    }
    sim.eval(&mut state);
    Ok(netlist
        .outputs
        .iter()
        .map(|port| {
            port.nets
                .iter()
                .enumerate()
                .fold(0u64, |acc, (bit, n)| acc | ((state[n.index()] & 1) << bit))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub vector: InputVector,
    pub expected: AdderOutput,
    pub actual: AdderOutput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub vectors_checked: u64,
    pub mismatch_count: u64,
    /// The first few mismatches.
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }
}

const KEPT_MISMATCHES: usize = 8;
const VERIFY_BLOCK: usize = 64 * 256;

fn verify_iter(sim: &AdderSim<'_>, vectors: impl Iterator<Item = InputVector>) -> VerifyReport {
    let mut report = VerifyReport {
        vectors_checked: 0,
        mismatch_count: 0,
        mismatches: Vec::new(),
    };
    let mut block = Vec::with_capacity(VERIFY_BLOCK);
    let mut vectors = vectors.peekable();
    while vectors.peek().is_some() {
        block.clear();
        block.extend(vectors.by_ref().take(VERIFY_BLOCK));
        let outputs = sim.run(&block).expect("vectors fit the adder width");
        for (v, got) in block.iter().zip(outputs) {
            let want = reference_add(sim.width, *v);
            if got != want {
                report.mismatch_count += 1;
                if report.mismatches.len() < KEPT_MISMATCHES {
                    report.mismatches.push(Mismatch {
                        vector: *v,
                        expected: want,
                        actual: got,
                    });
                }
            }
        }
        report.vectors_checked += block.len() as u64;
    }
    report
}

/// Checks all `2^(2w+1)` inputs against [`reference_add`].
pub fn verify_exhaustive(netlist: &Netlist, lib: &CellLibrary) -> Result<VerifyReport, SimError> {
    let sim = AdderSim::new(netlist, lib)?;
    if sim.width > 12 {
        return Err(SimError::InvalidParams(format!(
            "exhaustive check of a {}-bit adder is too large",
            sim.width
        )));
    }
    Ok(verify_iter(&sim, exhaustive_vectors(sim.width)))
}

/// Checks `n` seeded random vectors against [`reference_add`].
pub fn verify_random(
    netlist: &Netlist,
    lib: &CellLibrary,
    n: usize,
    seed: u64,
) -> Result<VerifyReport, SimError> {
    let sim = AdderSim::new(netlist, lib)?;
    Ok(verify_iter(
        &sim,
        crate::rng::VectorStream::new(sim.width, seed).take(n),
    ))
}
