//! Finite configurations over the integer lattice and finite superpositions
//! of them.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;
use core::ops::Add;

use num_complex::Complex64;

use crate::Error;

/// Default amplitude below which branches are dropped.
pub const DEFAULT_PRUNE: f64 = 1e-12;

/// A lattice cell. Ordering is lexicographic in `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Cell { x, y, z }
    }

    pub const fn to_array(self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    pub const fn from_array(a: [i64; 3]) -> Self {
        Cell { x: a[0], y: a[1], z: a[2] }
    }
}

impl From<[i64; 3]> for Cell {
    fn from(a: [i64; 3]) -> Self {
        Cell::from_array(a)
    }
}

impl Add<[i64; 3]> for Cell {
    type Output = Cell;

    fn add(self, v: [i64; 3]) -> Cell {
        Cell::new(self.x + v[0], self.y + v[1], self.z + v[2])
    }
}

/// The set of occupied cells; every other cell is quiescent. Cells are kept
/// sorted and unique, which makes equality and ordering canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Configuration(Vec<Cell>);

impl Configuration {
    pub fn empty() -> Self {
        Configuration(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        let mut v: Vec<Cell> = cells.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Configuration(v)
    }

    /// Wraps cells that are already sorted and unique.
    pub(crate) fn from_sorted(cells: Vec<Cell>) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        Configuration(cells)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.0.binary_search(c).is_ok()
    }

    pub fn union(&self, other: &Configuration) -> Configuration {
        Configuration::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Cells of `self` not in `other`.
    pub fn difference(&self, other: &Configuration) -> Configuration {
        Configuration(self.0.iter().filter(|c| !other.contains(c)).copied().collect())
    }

    pub fn is_disjoint(&self, other: &Configuration) -> bool {
        self.0.iter().all(|c| !other.contains(c))
    }

    pub fn translate(&self, v: [i64; 3]) -> Configuration {
        Configuration(self.0.iter().map(|c| *c + v).collect())
    }

    /// Inclusive bounding box `(min, max)`, or `None` when empty.
    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        let first = *self.0.first()?;
        Some(self.0.iter().fold((first, first), |(lo, hi), c| {
            (
                Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z)),
                Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z)),
            )
        }))
    }
}

impl FromIterator<Cell> for Configuration {
    fn from_iter<T: IntoIterator<Item = Cell>>(iter: T) -> Self {
        Configuration::new(iter)
    }
}

pub fn translate(c: &Configuration, v: [i64; 3]) -> Configuration {
    c.translate(v)
}

/// Finite map from configurations to amplitudes. Keys are unique and the
/// iteration order is the canonical configuration order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Superposition {
    branches: BTreeMap<Configuration, Complex64>,
}

/// Merges duplicate configurations by summing their amplitudes and drops
/// exact zeros. The result is not normalized.
pub fn make_superposition<I>(branches: I) -> Result<Superposition, Error>
where
    I: IntoIterator<Item = (Configuration, Complex64)>,
{
    let mut s = Superposition::default();
    for (c, a) in branches {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        s.accumulate(c, a);
    }
    s.branches.retain(|_, a| *a != Complex64::new(0.0, 0.0));
    Ok(s)
}

impl Superposition {
    pub fn empty() -> Self {
        Superposition::default()
    }

    /// A single configuration with amplitude one.
    pub fn basis(c: Configuration) -> Self {
        let mut branches = BTreeMap::new();
        branches.insert(c, Complex64::new(1.0, 0.0));
        Superposition { branches }
    }

    pub(crate) fn accumulate(&mut self, c: Configuration, a: Complex64) {
        match self.branches.entry(c) {
            btree_map::Entry::Occupied(mut e) => *e.get_mut() += a,
            btree_map::Entry::Vacant(e) => {
                e.insert(a);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, &Complex64)> {
        self.branches.iter()
    }

    pub fn amplitude(&self, c: &Configuration) -> Complex64 {
        self.branches.get(c).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// Removes branches with `|amp| <= eps` and returns the removed mass
    /// (sum of squared magnitudes).
    pub fn prune(&mut self, eps: f64) -> f64 {
        let mut removed = 0.0;
        self.branches.retain(|_, a| {
            let keep = a.norm() > eps;
            if !keep {
                removed += a.norm_sqr();
            }
            keep
        });
        removed
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in self.branches.values_mut() {
                *a /= n;
            }
        }
    }

    pub fn translate(&self, v: [i64; 3]) -> Superposition {
        Superposition {
            branches: self.branches.iter().map(|(c, a)| (c.translate(v), *a)).collect(),
        }
    }

    /// Adds `cells` to every branch. Fails if any branch already holds one of them.
    pub fn overlay(&self, cells: &Configuration) -> Result<Superposition, Error> {
        let mut out = Superposition::default();
        for (c, a) in &self.branches {
            if !c.is_disjoint(cells) {
                return Err(Error::PlacementCollision);
            }
            out.branches.insert(c.union(cells), *a);
        }
        Ok(out)
    }

    pub fn into_branches(self) -> BTreeMap<Configuration, Complex64> {
        self.branches
    }
}

impl FromIterator<(Configuration, Complex64)> for Superposition {
    /// Like [`make_superposition`] but keeps exact zeros and does not check finiteness.
    fn from_iter<T: IntoIterator<Item = (Configuration, Complex64)>>(iter: T) -> Self {
        let mut s = Superposition::default();
        for (c, a) in iter {
            s.accumulate(c, a);
        }
        s
    }
}

pub fn norm(s: &Superposition) -> f64 {
    s.norm()
}

/// `<a|b>`, antilinear in the first argument.
pub fn inner_product(a: &Superposition, b: &Superposition) -> Complex64 {
    let (small, large, conj_small) = if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
    small
        .branches
        .iter()
        .filter_map(|(c, x)| large.branches.get(c).map(|y| if conj_small { x.conj() * y } else { y.conj() * x }))
        .sum()
}
