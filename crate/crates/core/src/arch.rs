//! Parametric adder generators.
//!
//! Every generator emits a flat netlist with the adder port convention
//! (`a`, `b`, `cin` in; `sum`, `cout` out) and validates it before returning.
//! Partitions are lists of group sizes stored least significant group first.
//!
//! Lookahead groups label their carry nets `g<k>.cin` and `g<k>.cout`, where
//! `k` counts lookahead groups from the least significant one. Dual-bit
//! ripple stages label their carry-out `stage<k>.cout`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::CellLibrary;
use crate::netlist::{validate, NetId, Netlist, NetlistBuilder, ValidationIssue};

pub const MAX_WIDTH: usize = 64;

/// The published CSLA partition "8-7-6-4-3-2-2", stored LSB first.
pub const PUBLISHED_CSLA_PARTITION: [usize; 7] = [2, 2, 3, 4, 6, 7, 8];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid width {0} (supported: 1..={MAX_WIDTH})")]
    InvalidWidth(usize),
    #[error("dual-bit ripple adders need an even width, got {0}")]
    OddWidth(usize),
    #[error("partition {partition:?} sums to {actual}, expected {expected} in at least one group")]
    PartitionMismatch {
        partition: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("partition {0:?} contains an empty group")]
    InvalidPartition(Vec<usize>),
    #[error("ripple segment of {rca_bits} bits is invalid for a {width}-bit hybrid adder")]
    InvalidRcaBits { rca_bits: usize, width: usize },
    #[error("carry lookahead block needs at least one generate/propagate pair")]
    EmptyBlock,
    #[error("block lookahead groups need at least 2 bits, got {0}")]
    GroupTooSmall(usize),
    #[error("generated netlist failed validation: {0:?}")]
    Invalid(Vec<ValidationIssue>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "RCA_FA")]
    RcaFa,
    #[serde(rename = "RCA_DBFA")]
    RcaDbfa,
    #[serde(rename = "RCLA")]
    Rcla,
    #[serde(rename = "RCLA_RCA")]
    RclaRca,
    #[serde(rename = "BCLA")]
    Bcla,
    #[serde(rename = "BCLA_RCA")]
    BclaRca,
    #[serde(rename = "CSLA")]
    Csla,
    #[serde(rename = "CSLA_BEC")]
    CslaBec,
}

impl Architecture {
    pub const ALL: [Architecture; 8] = [
        Architecture::RcaFa,
        Architecture::RcaDbfa,
        Architecture::Rcla,
        Architecture::RclaRca,
        Architecture::Bcla,
        Architecture::BclaRca,
        Architecture::Csla,
        Architecture::CslaBec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::RcaFa => "RCA_FA",
            Architecture::RcaDbfa => "RCA_DBFA",
            Architecture::Rcla => "RCLA",
            Architecture::RclaRca => "RCLA_RCA",
            Architecture::Bcla => "BCLA",
            Architecture::BclaRca => "BCLA_RCA",
            Architecture::Csla => "CSLA",
            Architecture::CslaBec => "CSLA_BEC",
        }
    }

    pub fn is_hybrid(self) -> bool {
        matches!(self, Architecture::RclaRca | Architecture::BclaRca)
    }

    pub fn uses_partition(self) -> bool {
        !matches!(self, Architecture::RcaFa | Architecture::RcaDbfa)
    }

    /// Legend of the matching published table row.
    pub fn report_legend(self) -> &'static str {
        match self {
            Architecture::RcaFa => "Adder1",
            Architecture::RcaDbfa => "Adder6",
            Architecture::Rcla => "Adder7",
            Architecture::RclaRca => "Adder8",
            Architecture::Bcla => "Adder9",
            Architecture::BclaRca => "Adder10",
            Architecture::Csla => "Adder11",
            Architecture::CslaBec => "Adder12",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        Architecture::ALL
            .into_iter()
            .find(|a| a.name() == wanted)
            .ok_or_else(|| {
                let names: Vec<&str> = Architecture::ALL.iter().map(|a| a.name()).collect();
                format!(
                    "unknown architecture `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// How full adders (and dual-bit full adders) are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaStyle {
    /// One compound `FA` / `DBFA` library cell.
    #[default]
    Cell,
    /// Decomposed into simple gates.
    Gates,
}

impl fmt::Display for FaStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaStyle::Cell => "cell",
            FaStyle::Gates => "gates",
        })
    }
}

impl FromStr for FaStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cell" => Ok(FaStyle::Cell),
            "gates" => Ok(FaStyle::Gates),
            _ => Err(format!(
                "unknown full-adder style `{s}` (expected cell or gates)"
            )),
        }
    }
}

/// One adder to build. Unset partition and ripple-segment size fall back to
/// [`default_partition`] and [`default_rca_bits`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdderConfig {
    pub arch: Architecture,
    pub width: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default)]
    pub fa_style: FaStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rca_bits: Option<usize>,
}

impl AdderConfig {
    pub fn new(arch: Architecture, width: usize) -> Self {
        AdderConfig {
            arch,
            width,
            partition: None,
            fa_style: FaStyle::Cell,
            rca_bits: None,
        }
    }

    pub fn with_partition(mut self, partition: Vec<usize>) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn with_fa_style(mut self, style: FaStyle) -> Self {
        self.fa_style = style;
        self
    }

    pub fn with_rca_bits(mut self, bits: usize) -> Self {
        self.rca_bits = Some(bits);
        self
    }

    /// The configuration used by default comparisons: the published gate-level
    /// dual-bit adder is built from gates, everything else from cells.
    pub fn benchmark_default(arch: Architecture, width: usize) -> Self {
        let cfg = AdderConfig::new(arch, width);
        if arch == Architecture::RcaDbfa {
            cfg.with_fa_style(FaStyle::Gates)
        } else {
            cfg
        }
    }

    pub fn partition_or_default(&self) -> Vec<usize> {
        match (&self.partition, self.arch.is_hybrid()) {
            (Some(p), _) => p.clone(),
            (None, true) => hybrid_partition(self.width.saturating_sub(self.rca_bits_or_default())),
            (None, false) => default_partition(self.arch, self.width),
        }
    }

    pub fn rca_bits_or_default(&self) -> usize {
        self.rca_bits
            .unwrap_or_else(|| default_rca_bits(self.width))
    }

    pub fn build(&self) -> Result<Netlist, BuildError> {
        let style = self.fa_style;
        let w = self.width;
        match self.arch {
            Architecture::RcaFa => build_rca(w, style),
            Architecture::RcaDbfa => build_rca_dbfa(w, style),
            Architecture::Rcla => build_rcla(w, &self.partition_or_default()),
            Architecture::RclaRca => build_rcla_rca(
                w,
                self.rca_bits_or_default(),
                &self.partition_or_default(),
                style,
            ),
            Architecture::Bcla => build_bcla(w, &self.partition_or_default(), style),
            Architecture::BclaRca => build_bcla_rca(
                w,
                self.rca_bits_or_default(),
                &self.partition_or_default(),
                style,
            ),
            Architecture::Csla => build_csla(w, &self.partition_or_default(), false, style),
            Architecture::CslaBec => build_csla(w, &self.partition_or_default(), true, style),
        }
    }
}

impl fmt::Display for AdderConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} w={} fa={}", self.arch, self.width, self.fa_style)?;
        if self.arch.is_hybrid() {
            write!(f, " rca_bits={}", self.rca_bits_or_default())?;
        }
        if self.arch.uses_partition() {
            write!(f, " partition={:?}", self.partition_or_default())?;
        }
        Ok(())
    }
}

/// Size of the least significant ripple segment of hybrid adders.
pub fn default_rca_bits(width: usize) -> usize {
    if width >= 4 {
        2
    } else {
        1
    }
}

/// Default group sizes (LSB first) for the partitioned architectures.
///
/// Lookahead adders use 4-bit groups. Hybrids cover the bits above the ripple
/// segment with a short leading group so the remaining groups sit on 4-bit
/// boundaries (32 bits: 2-bit ripple, then `[2, 4, 4, 4, 4, 4, 4, 4]`).
/// Carry-select adders grow their groups towards the MSB following the published
/// `8-7-6-4-3-2-2` sequence, which is exact at 32 bits.
pub fn default_partition(arch: Architecture, width: usize) -> Vec<usize> {
    match arch {
        Architecture::RcaFa | Architecture::RcaDbfa => Vec::new(),
        Architecture::Rcla | Architecture::Bcla => {
            let mut groups = vec![4; width / 4];
            match width % 4 {
                0 => {}
                1 => match groups.last_mut() {
                    Some(last) => *last += 1,
                    None => groups.push(1),
                },
                r => groups.push(r),
            }
            groups
        }
        Architecture::RclaRca | Architecture::BclaRca => {
            hybrid_partition(width.saturating_sub(default_rca_bits(width)))
        }
        Architecture::Csla | Architecture::CslaBec => {
            let mut groups: Vec<usize> = Vec::new();
            let mut covered = 0;
            let mut sizes = PUBLISHED_CSLA_PARTITION
                .iter()
                .copied()
                .chain(std::iter::repeat(8));
            loop {
                let next = sizes.next().unwrap();
                if covered + next > width {
                    break;
                }
                groups.push(next);
                covered += next;
            }
            let left = width - covered;
            if left > 0 {
                match groups.last_mut() {
                    Some(last) => *last += left,
                    None => groups.push(left),
                }
            }
            groups
        }
    }
}

/// Lookahead groups covering the `rest` bits above a hybrid's ripple segment.
pub fn hybrid_partition(rest: usize) -> Vec<usize> {
    let mut groups = Vec::new();
    match rest % 4 {
        0 => {}
        1 if rest >= 5 => groups.push(5),
        r => groups.push(r),
    }
    let covered: usize = groups.iter().sum();
    groups.extend(std::iter::repeat_n(4, (rest - covered) / 4));
    groups
}

/// Generate and XOR-propagate nets of one bit position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GpPair {
    pub g: NetId,
    pub p: NetId,
}

/// Prefix generate/propagate terms `G[j] = G_{j:0}`, `P[j] = P_{j:0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGp {
    pub generate: Vec<NetId>,
    pub propagate: Vec<NetId>,
}

impl BlockGp {
    /// Block generate over the whole group.
    pub fn g(&self) -> NetId {
        *self.generate.last().unwrap()
    }

    /// Block propagate over the whole group.
    pub fn p(&self) -> NetId {
        *self.propagate.last().unwrap()
    }
}

/// Emits the prefix chain `G_{j:0} = g_j + p_j G_{j-1:0}` (AO21) and
/// `P_{j:0} = p_j P_{j-1:0}` (AND2). Neither chain depends on a carry-in.
pub fn block_gp(b: &mut NetlistBuilder, gp: &[GpPair]) -> Result<BlockGp, BuildError> {
    let (first, rest) = gp.split_first().ok_or(BuildError::EmptyBlock)?;
    let mut generate = vec![first.g];
    let mut propagate = vec![first.p];
    for pair in rest {
        let g_prev = *generate.last().unwrap();
        let p_prev = *propagate.last().unwrap();
        generate.push(b.gate1("AO21", &[pair.p, g_prev, pair.g]));
        propagate.push(b.gate1("AND2", &[pair.p, p_prev]));
    }
    Ok(BlockGp {
        generate,
        propagate,
    })
}

/// `p = XOR2(a, b)`, `g = AND2(a, b)` per bit.
pub fn pg_logic(b: &mut NetlistBuilder, a: &[NetId], bb: &[NetId]) -> Vec<GpPair> {
    a.iter()
        .zip(bb)
        .map(|(&x, &y)| {
            let p = b.gate1("XOR2", &[x, y]);
            let g = b.gate1("AND2", &[x, y]);
            GpPair { g, p }
        })
        .collect()
}

/// One full adder; returns `(sum, carry)`.
pub fn full_adder(
    b: &mut NetlistBuilder,
    style: FaStyle,
    x: NetId,
    y: NetId,
    cin: NetId,
) -> (NetId, NetId) {
    match style {
        FaStyle::Cell => {
            let out = b.gate("FA", &[x, y, cin], 2);
            (out[0], out[1])
        }
        FaStyle::Gates => {
            let p = b.gate1("XOR2", &[x, y]);
            let g = b.gate1("AND2", &[x, y]);
            let s = b.gate1("XOR2", &[p, cin]);
            let t = b.gate1("AND2", &[p, cin]);
            let c = b.gate1("OR2", &[g, t]);
            (s, c)
        }
    }
}

/// Ripple chain over `a`/`b`; returns the sum bits and the carry-out.
pub fn ripple(
    b: &mut NetlistBuilder,
    style: FaStyle,
    a: &[NetId],
    bb: &[NetId],
    cin: NetId,
) -> (Vec<NetId>, NetId) {
    let mut carry = cin;
    let mut sums = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(bb) {
        let (s, c) = full_adder(b, style, x, y, carry);
        sums.push(s);
        carry = c;
    }
    (sums, carry)
}

/// Dual-bit full adder; returns `(sum0, sum1, carry)`. The gate form computes
/// the carry-out by lookahead so it does not wait for the internal carry.
pub fn dual_bit_full_adder(
    b: &mut NetlistBuilder,
    style: FaStyle,
    a: [NetId; 2],
    bb: [NetId; 2],
    cin: NetId,
) -> (NetId, NetId, NetId) {
    match style {
        FaStyle::Cell => {
            let out = b.gate("DBFA", &[a[0], bb[0], a[1], bb[1], cin], 3);
            (out[0], out[1], out[2])
        }
        FaStyle::Gates => {
            let gp = pg_logic(b, &a, &bb);
            let (p0, g0, p1, g1) = (gp[0].p, gp[0].g, gp[1].p, gp[1].g);
            let s0 = b.gate1("XOR2", &[p0, cin]);
            let c1 = b.gate1("AO21", &[p0, cin, g0]);
            let s1 = b.gate1("XOR2", &[p1, c1]);
            let t1 = b.gate1("AND2", &[p1, g0]);
            let t2 = b.gate1("AND3", &[p1, p0, cin]);
            let cout = b.gate1("OR3", &[g1, t1, t2]);
            (s0, s1, cout)
        }
    }
}

/// Binary to excess-1 converter: `y = (x + 1) mod 2^k`.
pub fn bec(b: &mut NetlistBuilder, x: &[NetId]) -> Result<Vec<NetId>, BuildError> {
    if x.len() < 2 {
        return Err(BuildError::InvalidWidth(x.len()));
    }
    let mut y = vec![b.gate1("INV", &[x[0]])];
    let mut chain = x[0];
    for i in 1..x.len() {
        if i >= 2 {
            chain = b.gate1("AND2", &[chain, x[i - 1]]);
        }
        y.push(b.gate1("XOR2", &[x[i], chain]));
    }
    Ok(y)
}

fn check_width(width: usize) -> Result<(), BuildError> {
    if width == 0 || width > MAX_WIDTH {
        Err(BuildError::InvalidWidth(width))
    } else {
        Ok(())
    }
}

fn check_partition(partition: &[usize], expected: usize) -> Result<(), BuildError> {
    if partition.contains(&0) {
        return Err(BuildError::InvalidPartition(partition.to_vec()));
    }
    let actual: usize = partition.iter().sum();
    if actual != expected || partition.is_empty() {
        return Err(BuildError::PartitionMismatch {
            partition: partition.to_vec(),
            expected,
            actual,
        });
    }
    Ok(())
}

fn finish(b: NetlistBuilder, sum: Vec<NetId>, cout: NetId) -> Result<Netlist, BuildError> {
    let netlist = b.finish_adder(sum, cout);
    validate(&netlist, CellLibrary::builtin()).map_err(BuildError::Invalid)?;
    Ok(netlist)
}

/// Ripple carry adder of `width` full adders.
pub fn build_rca(width: usize, style: FaStyle) -> Result<Netlist, BuildError> {
    check_width(width)?;
    let (mut b, a, bb, cin) = NetlistBuilder::adder(width);
    let (sum, cout) = ripple(&mut b, style, &a, &bb, cin);
    finish(b, sum, cout)
}

/// Ripple carry adder of `width / 2` dual-bit full adders.
pub fn build_rca_dbfa(width: usize, style: FaStyle) -> Result<Netlist, BuildError> {
    check_width(width)?;
    if !width.is_multiple_of(2) {
        return Err(BuildError::OddWidth(width));
    }
    let (mut b, a, bb, cin) = NetlistBuilder::adder(width);
    let mut carry = cin;
    let mut sum = Vec::with_capacity(width);
    for stage in 0..width / 2 {
        let i = 2 * stage;
        let (s0, s1, c) =
            dual_bit_full_adder(&mut b, style, [a[i], a[i + 1]], [bb[i], bb[i + 1]], carry);
        b.label(format!("stage{stage}.cout"), c);
        sum.extend([s0, s1]);
        carry = c;
    }
    finish(b, sum, carry)
}

/// Standalone `k`-bit incrementer with ports `x` and `y`.
pub fn build_bec(k: usize) -> Result<Netlist, BuildError> {
    if !(2..=MAX_WIDTH).contains(&k) {
        return Err(BuildError::InvalidWidth(k));
    }
    let mut b = NetlistBuilder::new(k);
    let x = b.add_input_port("x", k);
    let y = bec(&mut b, &x)?;
    b.add_output_port("y", y);
    let netlist = b.finish();
    validate(&netlist, CellLibrary::builtin()).map_err(BuildError::Invalid)?;
    Ok(netlist)
}

/// Carry select adder. The least significant group is a plain ripple adder;
/// each later group precomputes both carry-in cases (two ripple adders, or
/// one ripple adder plus an incrementer when `use_bec`) and multiplexes sum
/// bits and carry on the previous group's selected carry.
pub fn build_csla(
    width: usize,
    partition: &[usize],
    use_bec: bool,
    style: FaStyle,
) -> Result<Netlist, BuildError> {
    check_width(width)?;
    check_partition(partition, width)?;
    let (mut b, a, bb, cin) = NetlistBuilder::adder(width);
    let (first, rest) = partition.split_first().unwrap();
    let (mut sum, mut carry) = ripple(&mut b, style, &a[..*first], &bb[..*first], cin);
    b.label("g0.cout", carry);
    let mut lo = *first;
    for (k, &size) in rest.iter().enumerate() {
        let hi = lo + size;
        let zero = b.constant(false);
        let (s0, c0) = ripple(&mut b, style, &a[lo..hi], &bb[lo..hi], zero);
        let (s1, c1) = if use_bec {
            let mut x = s0.clone();
            x.push(c0);
            let mut y = bec(&mut b, &x)?;
            let c = y.pop().unwrap();
            (y, c)
        } else {
            let one = b.constant(true);
            ripple(&mut b, style, &a[lo..hi], &bb[lo..hi], one)
        };
        let sel = carry;
        for (&x0, &x1) in s0.iter().zip(&s1) {
            sum.push(b.gate1("MUX2", &[x0, x1, sel]));
        }
        carry = b.gate1("MUX2", &[c0, c1, sel]);
        b.label(format!("g{}.cout", k + 1), carry);
        lo = hi;
    }
    finish(b, sum, carry)
}

/// Recursive carry lookahead group: PG logic, an RCLG producing every
/// internal carry as `AO21(G_{j:0}; P_{j:0}, cin)`, and sum XORs.
fn rcla_group(
    b: &mut NetlistBuilder,
    a: &[NetId],
    bb: &[NetId],
    cin: NetId,
) -> Result<(Vec<NetId>, NetId), BuildError> {
    let gp = pg_logic(b, a, bb);
    let prefix = block_gp(b, &gp)?;
    let mut carries = Vec::with_capacity(a.len() + 1);
    carries.push(cin);
    for j in 0..a.len() {
        carries.push(b.gate1("AO21", &[prefix.propagate[j], cin, prefix.generate[j]]));
    }
    let sums = gp
        .iter()
        .zip(&carries)
        .map(|(pair, &c)| b.gate1("XOR2", &[pair.p, c]))
        .collect();
    Ok((sums, carries[a.len()]))
}

/// Block carry lookahead group: a BCLG emitting only the group carry-out,
/// and sum bits from `M - 1` serial full adders topped by one XOR3.
fn bcla_group(
    b: &mut NetlistBuilder,
    style: FaStyle,
    a: &[NetId],
    bb: &[NetId],
    cin: NetId,
) -> Result<(Vec<NetId>, NetId), BuildError> {
    let m = a.len();
    if m < 2 {
        return Err(BuildError::GroupTooSmall(m));
    }
    let gp = pg_logic(b, a, bb);
    let prefix = block_gp(b, &gp)?;
    let cout = b.gate1("AO21", &[prefix.p(), cin, prefix.g()]);
    let (mut sums, carry) = ripple(b, style, &a[..m - 1], &bb[..m - 1], cin);
    sums.push(b.gate1("XOR3", &[a[m - 1], bb[m - 1], carry]));
    Ok((sums, cout))
}

#[derive(Clone, Copy)]
enum Lookahead {
    Recursive,
    Block(FaStyle),
}

fn build_lookahead(
    width: usize,
    rca_bits: usize,
    partition: &[usize],
    kind: Lookahead,
    rca_style: FaStyle,
) -> Result<Netlist, BuildError> {
    check_width(width)?;
    check_partition(partition, width - rca_bits)?;
    if let Lookahead::Block(_) = kind {
        if let Some(&small) = partition.iter().find(|&&m| m < 2) {
            return Err(BuildError::GroupTooSmall(small));
        }
    }
    let (mut b, a, bb, cin) = NetlistBuilder::adder(width);
    let (mut sum, mut carry) = ripple(&mut b, rca_style, &a[..rca_bits], &bb[..rca_bits], cin);
    let mut lo = rca_bits;
    for (k, &size) in partition.iter().enumerate() {
        let hi = lo + size;
        b.label(format!("g{k}.cin"), carry);
        let (s, c) = match kind {
            Lookahead::Recursive => rcla_group(&mut b, &a[lo..hi], &bb[lo..hi], carry)?,
            Lookahead::Block(style) => bcla_group(&mut b, style, &a[lo..hi], &bb[lo..hi], carry)?,
        };
        b.label(format!("g{k}.cout"), c);
        sum.extend(s);
        carry = c;
        lo = hi;
    }
    finish(b, sum, carry)
}

fn check_hybrid(width: usize, rca_bits: usize) -> Result<(), BuildError> {
    check_width(width)?;
    // rca_bits == width leaves no lookahead group, which the partition check rejects
    if rca_bits == 0 || rca_bits > width {
        return Err(BuildError::InvalidRcaBits { rca_bits, width });
    }
    Ok(())
}

/// Homogeneous recursive carry lookahead adder.
pub fn build_rcla(width: usize, partition: &[usize]) -> Result<Netlist, BuildError> {
    build_lookahead(width, 0, partition, Lookahead::Recursive, FaStyle::Cell)
}

/// Ripple segment of `rca_bits` LSBs followed by recursive lookahead groups.
pub fn build_rcla_rca(
    width: usize,
    rca_bits: usize,
    partition: &[usize],
    style: FaStyle,
) -> Result<Netlist, BuildError> {
    check_hybrid(width, rca_bits)?;
    build_lookahead(width, rca_bits, partition, Lookahead::Recursive, style)
}

/// Homogeneous block carry lookahead adder.
pub fn build_bcla(
    width: usize,
    partition: &[usize],
    style: FaStyle,
) -> Result<Netlist, BuildError> {
    build_lookahead(width, 0, partition, Lookahead::Block(style), style)
}

/// Ripple segment of `rca_bits` LSBs followed by block lookahead groups.
pub fn build_bcla_rca(
    width: usize,
    rca_bits: usize,
    partition: &[usize],
    style: FaStyle,
) -> Result<Netlist, BuildError> {
    check_hybrid(width, rca_bits)?;
    build_lookahead(width, rca_bits, partition, Lookahead::Block(style), style)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{levelize, Driver};

    #[test]
    fn rca_counts() {
        let nl = build_rca(32, FaStyle::Cell).unwrap();
        assert_eq!(nl.gates.len(), 32);
        assert_eq!(nl.count_cells("FA"), 32);
        let nl = build_rca(32, FaStyle::Gates).unwrap();
        assert_eq!(nl.gates.len(), 160);
        assert!(matches!(
            build_rca(0, FaStyle::Cell),
            Err(BuildError::InvalidWidth(0))
        ));
    }

    #[test]
    fn dbfa_counts() {
        let nl = build_rca_dbfa(32, FaStyle::Cell).unwrap();
        assert_eq!(nl.count_cells("DBFA"), 16);
        assert_eq!(nl.gates.len(), 16);
        let nl = build_rca_dbfa(32, FaStyle::Gates).unwrap();
        assert_eq!(
            nl.labels
                .iter()
                .filter(|(n, _)| n.ends_with(".cout"))
                .count(),
            16
        );
        assert_eq!(nl.gates.len(), 16 * 10);
        assert_eq!(
            build_rca_dbfa(5, FaStyle::Cell),
            Err(BuildError::OddWidth(5))
        );
    }

    #[test]
    fn bec_gate_count() {
        for k in 2..10 {
            let nl = build_bec(k).unwrap();
            assert_eq!(nl.gates.len(), 2 * k - 2);
            assert_eq!(nl.count_cells("INV"), 1);
            assert_eq!(nl.count_cells("XOR2"), k - 1);
            assert_eq!(nl.count_cells("AND2"), k - 2);
        }
        assert_eq!(build_bec(1), Err(BuildError::InvalidWidth(1)));
    }

    #[test]
    fn csla_published_counts() {
        let nl = build_csla(32, &PUBLISHED_CSLA_PARTITION, false, FaStyle::Cell).unwrap();
        assert_eq!(nl.count_cells("FA"), 62);
        assert_eq!(nl.count_cells("MUX2"), 36);
        assert_eq!(nl.gates.len(), 98);
        let nl = build_csla(32, &PUBLISHED_CSLA_PARTITION, true, FaStyle::Cell).unwrap();
        assert_eq!(nl.count_cells("FA"), 32);
        assert_eq!(nl.count_cells("MUX2"), 36);
        // one (k+1)-bit incrementer per upper group
        let bec_gates: usize = PUBLISHED_CSLA_PARTITION[1..]
            .iter()
            .map(|k| 2 * (k + 1) - 2)
            .sum();
        assert_eq!(nl.gates.len(), 32 + 36 + bec_gates);
    }

    #[test]
    fn csla_partition_errors() {
        assert_eq!(
            build_csla(32, &[8, 8, 8], false, FaStyle::Cell),
            Err(BuildError::PartitionMismatch {
                partition: vec![8, 8, 8],
                expected: 32,
                actual: 24
            })
        );
        assert!(matches!(
            build_csla(8, &[4, 0, 4], false, FaStyle::Cell),
            Err(BuildError::InvalidPartition(_))
        ));
    }

    #[test]
    fn block_gp_single_pair_emits_nothing() {
        let mut b = NetlistBuilder::new(1);
        let g = b.add_input_port("g", 1)[0];
        let p = b.add_input_port("p", 1)[0];
        let before = b.gate_count();
        let block = block_gp(&mut b, &[GpPair { g, p }]).unwrap();
        assert_eq!(b.gate_count(), before);
        assert_eq!((block.g(), block.p()), (g, p));
        assert_eq!(block_gp(&mut b, &[]), Err(BuildError::EmptyBlock));
    }

    fn group_carry_gate(nl: &Netlist, k: usize) -> (usize, NetId) {
        let cin = nl.label(&format!("g{k}.cin")).unwrap();
        let cout = nl.label(&format!("g{k}.cout")).unwrap();
        let drivers = nl.drivers();
        let Some(Driver::Gate { gate, .. }) = drivers[cout.index()] else {
            panic!("group carry-out is not gate driven");
        };
        (gate, cin)
    }

    #[test]
    fn lookahead_carry_hop_is_one_ao21() {
        for nl in [
            build_rcla(32, &[4; 8]).unwrap(),
            build_bcla(32, &[4; 8], FaStyle::Cell).unwrap(),
        ] {
            for k in 1..7 {
                let (gate, cin) = group_carry_gate(&nl, k);
                assert_eq!(nl.gates[gate].cell, "AO21");
                assert!(nl.gates[gate].inputs.contains(&cin));
            }
        }
    }

    #[test]
    fn bcla_has_single_lookahead_output() {
        let nl = build_bcla(32, &[4; 8], FaStyle::Cell).unwrap();
        let fanout = nl.fanouts();
        for k in 1..8 {
            let cin = nl.label(&format!("g{k}.cin")).unwrap();
            let readers = &fanout[cin.index()];
            let ao21: Vec<_> = readers
                .iter()
                .filter(|&&g| nl.gates[g].cell == "AO21")
                .collect();
            assert_eq!(ao21.len(), 1);
            assert_eq!(readers.len(), 2, "lookahead gate plus the first full adder");
        }
        let nl = build_rcla(32, &[4; 8]).unwrap();
        let fanout = nl.fanouts();
        let cin = nl.label("g3.cin").unwrap();
        let ao21 = fanout[cin.index()]
            .iter()
            .filter(|&&g| nl.gates[g].cell == "AO21")
            .count();
        assert_eq!(ao21, 4);
    }

    #[test]
    fn rcla_single_group_sum_xors() {
        let nl = build_rcla(4, &[4]).unwrap();
        let drivers = nl.drivers();
        let sum = nl.output("sum").unwrap();
        for net in &sum.nets {
            let Some(Driver::Gate { gate, .. }) = drivers[net.index()] else {
                panic!()
            };
            assert_eq!(nl.gates[gate].cell, "XOR2");
        }
        // 4 propagate XORs plus 4 sum XORs
        assert_eq!(nl.count_cells("XOR2"), 8);
    }

    #[test]
    fn bcla_group_structure() {
        let nl = build_bcla(8, &[4, 4], FaStyle::Cell).unwrap();
        assert_eq!(nl.count_cells("FA"), 6);
        assert_eq!(nl.count_cells("XOR3"), 2);
        assert_eq!(
            build_bcla(8, &[1, 7], FaStyle::Cell),
            Err(BuildError::GroupTooSmall(1))
        );
    }

    #[test]
    fn hybrid_errors() {
        assert!(matches!(
            build_rcla_rca(32, 32, &[], FaStyle::Cell),
            Err(BuildError::PartitionMismatch { .. })
        ));
        assert!(matches!(
            build_bcla_rca(32, 33, &[], FaStyle::Cell),
            Err(BuildError::InvalidRcaBits { .. })
        ));
        assert!(matches!(
            build_rcla_rca(32, 4, &[4; 6], FaStyle::Cell),
            Err(BuildError::PartitionMismatch { .. })
        ));
        assert!(matches!(
            build_rcla_rca(32, 4, &[], FaStyle::Cell),
            Err(BuildError::PartitionMismatch { .. })
        ));
    }

    #[test]
    fn depth_growth() {
        let depth = |nl: &Netlist| levelize(nl).unwrap().depth();
        for w in [2, 4, 8, 16] {
            let d1 = depth(&build_rca(w, FaStyle::Cell).unwrap());
            let d2 = depth(&build_rca(2 * w, FaStyle::Cell).unwrap());
            assert!(d2 <= 2 * d1 + 2);
            let gd1 = depth(&build_rca(w, FaStyle::Gates).unwrap());
            let gd2 = depth(&build_rca(2 * w, FaStyle::Gates).unwrap());
            assert!(gd2 <= 2 * gd1 + 2);
        }
        // past the second group, each group adds only its carry hop
        let mut prev = depth(&build_rcla(8, &[4, 4]).unwrap());
        for groups in 3..=8 {
            let d = depth(&build_rcla(4 * groups, &vec![4; groups]).unwrap());
            assert_eq!(d, prev + 1, "{groups} groups");
            prev = d;
        }
    }

    #[test]
    fn default_partitions() {
        assert_eq!(default_partition(Architecture::Rcla, 32), vec![4; 8]);
        assert_eq!(default_partition(Architecture::Bcla, 9), vec![4, 5]);
        assert_eq!(default_partition(Architecture::Rcla, 6), vec![4, 2]);
        assert_eq!(
            default_partition(Architecture::RclaRca, 32),
            vec![2, 4, 4, 4, 4, 4, 4, 4]
        );
        assert_eq!(default_rca_bits(32), 2);
        assert_eq!(default_partition(Architecture::BclaRca, 8), vec![2, 4]);
        assert_eq!(default_partition(Architecture::BclaRca, 4), vec![2]);
        assert_eq!(default_partition(Architecture::RclaRca, 7), vec![5]);
        assert_eq!(
            default_partition(Architecture::Csla, 32),
            PUBLISHED_CSLA_PARTITION.to_vec()
        );
        assert_eq!(default_partition(Architecture::Csla, 8), vec![2, 2, 4]);
        assert_eq!(default_partition(Architecture::CslaBec, 4), vec![2, 2]);
        let cfg = AdderConfig::new(Architecture::BclaRca, 16).with_rca_bits(4);
        assert_eq!(cfg.partition_or_default(), vec![4, 4, 4]);
        for arch in Architecture::ALL {
            for w in [4, 8, 16, 32, 64] {
                let cfg = AdderConfig::new(arch, w);
                assert!(cfg.build().is_ok(), "{cfg}");
            }
        }
    }

    #[test]
    fn architecture_names_round_trip() {
        for arch in Architecture::ALL {
            assert_eq!(arch.name().parse::<Architecture>().unwrap(), arch);
        }
        assert_eq!(
            "rcla-rca".parse::<Architecture>().unwrap(),
            Architecture::RclaRca
        );
        assert!("KSA".parse::<Architecture>().is_err());
    }
}
