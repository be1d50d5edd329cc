//! Global evolution: the scattering operator applied to every block of one
//! of two interleaved partitions, alternating every step.
//!
//! Time starts at `t = 0`. The step taken from an even `t` uses the aligned
//! partition (block corners in `2Z^3`); the step from an odd `t` uses the
//! shifted partition (corners in `2Z^3 + (1,1,1)`).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::block::{BlockState, LocalCell, DIM};
use crate::rule::ScatteringRule;
use crate::state::{Cell, Configuration, Superposition, DEFAULT_PRUNE};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Aligned,
    Shifted,
}

impl Parity {
    pub const fn offset(self) -> i64 {
        match self {
            Parity::Aligned => 0,
            Parity::Shifted => 1,
        }
    }

    pub const fn other(self) -> Parity {
        match self {
            Parity::Aligned => Parity::Shifted,
            Parity::Shifted => Parity::Aligned,
        }
    }

    pub const fn at(t: u64) -> Parity {
        if t.is_multiple_of(2) {
            Parity::Aligned
        } else {
            Parity::Shifted
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Aligned => "aligned",
            Parity::Shifted => "shifted",
        }
    }

    /// Corner of the block containing `c`, and the cell's place in it.
    pub fn locate(self, c: Cell) -> (Cell, LocalCell) {
        let o = self.offset();
        let corner = |v: i64| (v - o).div_euclid(2) * 2 + o;
        let k = Cell::new(corner(c.x), corner(c.y), corner(c.z));
        let local = LocalCell::new((c.x - k.x) as u8, (c.y - k.y) as u8, (c.z - k.z) as u8);
        (k, local)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimClock {
    pub t: u64,
}

impl SimClock {
    pub fn new(t: u64) -> Self {
        SimClock { t }
    }

    pub fn parity(&self) -> Parity {
        Parity::at(self.t)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepOptions {
    pub prune: f64,
    /// A warning is logged when a step produces more branches than this.
    pub branch_budget: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { prune: DEFAULT_PRUNE, branch_budget: 1 << 20 }
    }
}

/// Occupied blocks of `conf` for the given partition, sorted by corner.
pub fn occupied_blocks(conf: &Configuration, parity: Parity) -> Vec<(Cell, BlockState)> {
    let mut blocks: BTreeMap<Cell, u8> = BTreeMap::new();
    for c in conf.cells() {
        let (corner, local) = parity.locate(*c);
        *blocks.entry(corner).or_insert(0) |= 1 << local.index();
    }
    blocks.into_iter().map(|(k, m)| (k, BlockState(m))).collect()
}

fn block_cells(corner: Cell, s: BlockState) -> impl Iterator<Item = Cell> {
    s.cells().map(move |l| corner + [l.x() as i64, l.y() as i64, l.z() as i64])
}

/// Appends the image of one branch to `out`, one entry per product of
/// per-block outputs. Entries are emitted in a fixed order.
pub fn expand_branch(
    conf: &Configuration,
    amp: Complex64,
    parity: Parity,
    rule: &ScatteringRule,
    out: &mut Vec<(Configuration, Complex64)>,
) {
    let op = rule.operator();
    let mut partial: Vec<(Vec<Cell>, Complex64)> = alloc::vec![(Vec::with_capacity(conf.len()), amp)];
    for (corner, s) in occupied_blocks(conf, parity) {
        let column = op.column(s);
        if let [(image, a)] = column {
            for (cells, x) in partial.iter_mut() {
                cells.extend(block_cells(corner, *image));
                *x *= a;
            }
        } else {
            let mut next = Vec::with_capacity(partial.len() * column.len());
            for (cells, x) in &partial {
                for (image, a) in column {
                    let mut c = cells.clone();
                    c.extend(block_cells(corner, *image));
                    next.push((c, x * a));
                }
            }
            partial = next;
        }
    }
    out.extend(partial.into_iter().map(|(mut cells, a)| {
        cells.sort_unstable();
        (Configuration::from_sorted(cells), a)
    }));
}

/// Sums contributions in order, prunes, and warns above the branch budget.
pub fn merge_contributions<I>(contributions: I, options: &StepOptions) -> Superposition
where
    I: IntoIterator<Item = (Configuration, Complex64)>,
{
    let mut s: Superposition = contributions.into_iter().collect();
    s.prune(options.prune);
    if s.len() > options.branch_budget {
        log::warn!("superposition has {} branches (budget {})", s.len(), options.branch_budget);
    }
    s
}

pub fn step(s: &Superposition, parity: Parity, rule: &ScatteringRule) -> Superposition {
    step_with(s, parity, rule, &StepOptions::default())
}

pub fn step_with(s: &Superposition, parity: Parity, rule: &ScatteringRule, options: &StepOptions) -> Superposition {
    let mut contributions = Vec::new();
    for (conf, amp) in s.iter() {
        expand_branch(conf, *amp, parity, rule, &mut contributions);
    }
    let out = merge_contributions(contributions, options);
    debug_assert!(
        libm::fabs(out.norm() - s.norm()) <= 1e-9 || options.prune > DEFAULT_PRUNE,
        "step changed the norm"
    );
    out
}

/// Applies `n` steps starting at `clock.t` and advances the clock.
pub fn run(s: &Superposition, n: u64, clock: &mut SimClock, rule: &ScatteringRule) -> Superposition {
    run_with(s, n, clock, rule, &StepOptions::default())
}

pub fn run_with(
    s: &Superposition,
    n: u64,
    clock: &mut SimClock,
    rule: &ScatteringRule,
    options: &StepOptions,
) -> Superposition {
    let mut cur = s.clone();
    for _ in 0..n {
        cur = step_with(&cur, clock.parity(), rule, options);
        clock.t += 1;
    }
    cur
}

/// Axis-aligned box of cells, `min` inclusive, `dims` cells along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub min: Cell,
    pub dims: [usize; 3],
}

/// Largest region the oracle accepts; basis indices are 64-bit masks.
pub const MAX_REGION_CELLS: usize = 64;

impl Region {
    pub fn new(min: Cell, dims: [usize; 3]) -> Self {
        Region { min, dims }
    }

    pub fn cells(&self) -> usize {
        self.dims.iter().product()
    }

    fn bit(&self, c: Cell) -> Option<u32> {
        let d = [c.x - self.min.x, c.y - self.min.y, c.z - self.min.z];
        if d.iter().zip(self.dims).any(|(v, n)| *v < 0 || *v >= n as i64) {
            return None;
        }
        let [dx, dy, _] = self.dims.map(|n| n as i64);
        Some((d[0] + dx * (d[1] + dy * d[2])) as u32)
    }

    fn cell(&self, bit: u32) -> Cell {
        let [dx, dy, _] = self.dims.map(|n| n as u32);
        let (x, rest) = (bit % dx, bit / dx);
        let (y, z) = (rest % dy, rest / dy);
        self.min + [x as i64, y as i64, z as i64]
    }
}

/// Independent reference for [`step`]: the region is treated as a register
/// of `|region|` binary cells and the dense 256x256 matrix of the rule is
/// applied to each block's eight cells in turn, as a state-vector simulator
/// applies an eight-qubit gate. The region must be a union of whole blocks
/// of `parity` and contain every occupied cell.
pub fn dense_oracle_step(
    s: &Superposition,
    region: &Region,
    parity: Parity,
    rule: &ScatteringRule,
) -> Result<Superposition, Error> {
    let n = region.cells();
    if n > MAX_REGION_CELLS {
        return Err(Error::RegionTooLarge(n));
    }
    let o = parity.offset();
    let min = region.min.to_array();
    if region.dims.iter().any(|d| d % 2 != 0) || min.iter().any(|v| (v - o).rem_euclid(2) != 0) {
        return Err(Error::RegionMisaligned);
    }

    let mut vector: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (conf, amp) in s.iter() {
        let mut index = 0u64;
        for c in conf.cells() {
            index |= 1 << region.bit(*c).ok_or(Error::OutsideRegion)?;
        }
        *vector.entry(index).or_default() += amp;
    }

    let dense = rule.operator().to_dense();
    let [dx, dy, dz] = region.dims.map(|d| d as i64);
    for bz in (0..dz).step_by(2) {
        for by in (0..dy).step_by(2) {
            for bx in (0..dx).step_by(2) {
                let corner = region.min + [bx, by, bz];
                let bits: [u32; 8] = core::array::from_fn(|l| {
                    let lc = LocalCell::from_index(l as u8);
                    region.bit(corner + [lc.x() as i64, lc.y() as i64, lc.z() as i64]).expect("inside region")
                });
                let block_mask: u64 = bits.iter().map(|b| 1u64 << b).fold(0, |a, b| a | b);
                let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
                for (index, amp) in &vector {
                    let col = bits.iter().enumerate().fold(0usize, |m, (l, b)| m | (((index >> b) & 1) as usize) << l);
                    let base = index & !block_mask;
                    for row in 0..DIM {
                        let u = dense[row * DIM + col];
                        if u == Complex64::default() {
                            continue;
                        }
                        let scattered = bits.iter().enumerate().fold(base, |m, (l, b)| m | (((row >> l) & 1) as u64) << b);
                        *next.entry(scattered).or_default() += u * amp;
                    }
                }
                vector = next;
            }
        }
    }

    let mut out: Superposition = vector
        .into_iter()
        .map(|(index, amp)| {
            let cells = (0..n as u32).filter(|b| index >> b & 1 == 1).map(|b| region.cell(b));
            (Configuration::new(cells), amp)
        })
        .collect();
    out.prune(DEFAULT_PRUNE);
    Ok(out)
}
