//! Gate-level laboratory for synchronous adder architectures.
//!
//! Generators build ripple carry, dual-bit ripple carry, recursive and block
//! carry lookahead (plain and hybrid), and carry select (plain and
//! incrementer-based) adders as flat netlists over a standard-cell library.
//! The netlists can be simulated, timed, and measured for area and toggle
//! power, and compared through PDP, EDP, ADP, and PDAP figures of merit.

pub mod analysis;
pub mod arch;
pub mod bench;
pub mod cell;
pub mod netlist;
pub mod report;
pub mod rng;
pub mod sim;

pub use analysis::{
    area, avg_power, combo_metrics, critical_path, delay_exceedance, normalize, DesignPoint,
    Metric, MetricsRow, TimingReport,
};
pub use arch::{AdderConfig, Architecture, BuildError, FaStyle};
pub use bench::{run_bench, BenchmarkConfig, MetricsTable, Provenance};
pub use cell::{eval_cell, load_cell_library, CellLibrary, CellSpec};
pub use netlist::{levelize, validate, GateId, NetId, Netlist, NetlistError, Schedule};
pub use sim::{run_vectors, simulate, InputVector, SimResult, ToggleStats};
