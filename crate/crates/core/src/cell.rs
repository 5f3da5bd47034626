//! Standard-cell technology model.
//!
//! A [`CellSpec`] describes one library cell by its logic function (a truth
//! table per output), a single worst-case delay per output, an area, and the
//! energy dissipated per output transition. A [`CellLibrary`] is a validated,
//! immutable set of cells keyed by name.
//!
//! Libraries are stored as TOML with one `[[cell]]` record per cell:
//!
//! ```toml
//! [[cell]]
//! name = "AO21"
//! pins = ["a1", "a2", "b"]
//! area = 2.0
//! energy_fj = 1.2
//!
//! [[cell.output]]
//! pin = "y"
//! delay_ps = 22.0
//! truthtable = "11111000"
//! ```
//!
//! `truthtable` has length `2^pins` and is written most-significant input
//! index first. Pin 0 is the least significant bit of the index, so the last
//! character is the output for all-zero inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

/// Largest supported input count; truth tables are packed into a `u64`.
pub const MAX_INPUT_PINS: usize = 6;

/// Cells the adder generators instantiate.
pub const REQUIRED_CELLS: [&str; 14] = [
    "INV", "NAND2", "NOR2", "AND2", "AND3", "AND4", "OR2", "OR3", "XOR2", "XOR3", "AO21", "MUX2",
    "FA", "DBFA",
];

const DEFAULT_LIBRARY: &str = include_str!("../data/default_cells.toml");

#[derive(Debug, Error)]
pub enum CellError {
    #[error("failed to read cell library `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed cell library: {0}")]
    Parse(String),
    #[error("cell `{0}` is defined more than once")]
    DuplicateCell(String),
    #[error("invalid cell `{cell}`: {reason}")]
    InvalidSpec { cell: String, reason: String },
    #[error("cell `{cell}` expects {expected} inputs, got {actual}")]
    ArityMismatch {
        cell: String,
        expected: usize,
        actual: usize,
    },
}

/// One output pin of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub pin: String,
    /// Bit `i` holds the output value for input index `i`.
    pub truth_table: u64,
    pub delay_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub name: String,
    pub input_pins: Vec<String>,
    pub outputs: Vec<OutputSpec>,
    pub area: f64,
    /// Femtojoules per output transition.
    pub switch_energy_fj: f64,
}

impl CellSpec {
    pub fn arity(&self) -> usize {
        self.input_pins.len()
    }

    fn validate(&self) -> Result<(), CellError> {
        let invalid = |reason: String| CellError::InvalidSpec {
            cell: self.name.clone(),
            reason,
        };
        if self.name.is_empty() {
            return Err(invalid("empty cell name".into()));
        }
        if self.input_pins.is_empty() || self.input_pins.len() > MAX_INPUT_PINS {
            return Err(invalid(format!(
                "{} input pins (supported: 1..={MAX_INPUT_PINS})",
                self.input_pins.len()
            )));
        }
        if self.outputs.is_empty() {
            return Err(invalid("no outputs".into()));
        }
        if self.area.is_nan() || self.area <= 0.0 {
            return Err(invalid(format!("area must be positive, got {}", self.area)));
        }
        if self.switch_energy_fj.is_nan() || self.switch_energy_fj < 0.0 {
            return Err(invalid(format!(
                "switch energy must be non-negative, got {}",
                self.switch_energy_fj
            )));
        }
        for out in &self.outputs {
            if out.delay_ps.is_nan() || out.delay_ps <= 0.0 {
                return Err(invalid(format!(
                    "output `{}` delay must be positive, got {}",
                    out.pin, out.delay_ps
                )));
            }
        }
        Ok(())
    }

    /// Evaluates the cell on one input assignment, `inputs[0]` being pin 0.
    pub fn eval(&self, inputs: &[bool]) -> Result<Vec<bool>, CellError> {
        if inputs.len() != self.arity() {
            return Err(CellError::ArityMismatch {
                cell: self.name.clone(),
                expected: self.arity(),
                actual: inputs.len(),
            });
        }
        let index = inputs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &bit)| acc | (usize::from(bit) << i));
        Ok(self
            .outputs
            .iter()
            .map(|o| (o.truth_table >> index) & 1 == 1)
            .collect())
    }
}

/// Evaluates `cell` on `inputs`; see [`CellSpec::eval`].
pub fn eval_cell(cell: &CellSpec, inputs: &[bool]) -> Result<Vec<bool>, CellError> {
    cell.eval(inputs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LibrarySource {
    Default,
    File(PathBuf),
}

impl fmt::Display for LibrarySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LibrarySource::Default => f.write_str("default"),
            LibrarySource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// A validated, immutable set of cells.
#[derive(Debug, Clone)]
pub struct CellLibrary {
    cells: BTreeMap<String, CellSpec>,
    source: LibrarySource,
}

impl CellLibrary {
    /// The built-in library, parsed once and shared.
    pub fn builtin() -> &'static CellLibrary {
        static LIB: OnceLock<CellLibrary> = OnceLock::new();
        LIB.get_or_init(|| {
            CellLibrary::from_toml_str(DEFAULT_LIBRARY, LibrarySource::Default)
                .expect("bundled cell library is valid")
        })
    }

    /// Source text of the built-in library.
    pub fn builtin_source() -> &'static str {
        DEFAULT_LIBRARY
    }

    pub fn from_toml_str(text: &str, source: LibrarySource) -> Result<Self, CellError> {
        let raw: RawLibrary = toml::from_str(text).map_err(|e| CellError::Parse(e.to_string()))?;
        let mut cells = BTreeMap::new();
        for raw_cell in raw.cell {
            let cell = raw_cell.into_spec()?;
            cell.validate()?;
            if cells.contains_key(&cell.name) {
                return Err(CellError::DuplicateCell(cell.name));
            }
            cells.insert(cell.name.clone(), cell);
        }
        for name in REQUIRED_CELLS {
            if !cells.contains_key(name) {
                return Err(CellError::InvalidSpec {
                    cell: name.to_string(),
                    reason: "required cell missing from library".into(),
                });
            }
        }
        Ok(CellLibrary { cells, source })
    }

    pub fn get(&self, name: &str) -> Option<&CellSpec> {
        self.cells.get(name)
    }

    pub fn cells(&self) -> impl Iterator<Item = &CellSpec> {
        self.cells.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn source(&self) -> &LibrarySource {
        &self.source
    }
}

/// Loads a library file, or the built-in library when `path` is `None`.
pub fn load_cell_library(path: Option<&Path>) -> Result<CellLibrary, CellError> {
    match path {
        None => Ok(CellLibrary::builtin().clone()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CellError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            CellLibrary::from_toml_str(&text, LibrarySource::File(p.to_path_buf()))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLibrary {
    #[serde(default)]
    cell: Vec<RawCell>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    name: String,
    pins: Vec<String>,
    area: f64,
    energy_fj: f64,
    #[serde(default)]
    output: Vec<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    pin: String,
    delay_ps: f64,
    truthtable: String,
}

impl RawCell {
    fn into_spec(self) -> Result<CellSpec, CellError> {
        let n = self.pins.len();
        let mut outputs = Vec::with_capacity(self.output.len());
        for out in self.output {
            let truth_table =
                parse_truth_table(&out.truthtable, n).map_err(|reason| CellError::InvalidSpec {
                    cell: self.name.clone(),
                    reason: format!("output `{}`: {reason}", out.pin),
                })?;
            outputs.push(OutputSpec {
                pin: out.pin,
                truth_table,
                delay_ps: out.delay_ps,
            });
        }
        Ok(CellSpec {
            name: self.name,
            input_pins: self.pins,
            outputs,
            area: self.area,
            switch_energy_fj: self.energy_fj,
        })
    }
}

fn parse_truth_table(text: &str, n_inputs: usize) -> Result<u64, String> {
    if n_inputs > MAX_INPUT_PINS {
        return Err(format!("{n_inputs} input pins exceeds {MAX_INPUT_PINS}"));
    }
    let expected = 1usize << n_inputs;
    if text.len() != expected {
        return Err(format!(
            "truth table length {} (expected {expected} for {n_inputs} pins)",
            text.len()
        ));
    }
    let mut table = 0u64;
    for (pos, ch) in text.chars().enumerate() {
        let index = expected - 1 - pos;
        match ch {
            '0' => {}
            '1' => table |= 1 << index,
            other => return Err(format!("invalid truth table character `{other}`")),
        }
    }
    Ok(table)
}

/// Renders a packed truth table back to its file form.
pub fn format_truth_table(table: u64, n_inputs: usize) -> String {
    (0..1usize << n_inputs)
        .rev()
        .map(|i| if (table >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}
