//! Geometry of the 2x2x2 block and generic checks on operators over its
//! 256-dimensional state space.
//!
//! Axis convention: `x` is width, `y` is height and `z` is depth. A cell's
//! linear index is `x + 2y + 4z`, and block basis states are ordered by the
//! value of their occupancy mask.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Number of cells in a block.
pub const CELLS: usize = 8;
/// Dimension of the block state space.
pub const DIM: usize = 256;

/// One of the eight cells of a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalCell(u8);

impl LocalCell {
    pub const fn new(x: u8, y: u8, z: u8) -> Self {
        assert!(x < 2 && y < 2 && z < 2, "local coordinates are 0 or 1");
        LocalCell(x | (y << 1) | (z << 2))
    }

    pub const fn from_index(index: u8) -> Self {
        assert!(index < 8, "cell index out of range");
        LocalCell(index)
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    pub const fn x(self) -> u8 {
        self.0 & 1
    }

    pub const fn y(self) -> u8 {
        (self.0 >> 1) & 1
    }

    pub const fn z(self) -> u8 {
        (self.0 >> 2) & 1
    }

    pub const fn coords(self) -> [u8; 3] {
        [self.x(), self.y(), self.z()]
    }

    /// The antipodal cell `(1-x, 1-y, 1-z)`.
    pub const fn antipode(self) -> Self {
        LocalCell(self.0 ^ 0b111)
    }

    /// Number of coordinates in which the two cells differ.
    pub const fn distance(self, other: LocalCell) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    pub fn all() -> impl Iterator<Item = LocalCell> {
        (0..8u8).map(LocalCell)
    }
}

/// Occupancy pattern of one block; bit `i` set means cell `i` is occupied.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BlockState(pub u8);

impl BlockState {
    pub const EMPTY: BlockState = BlockState(0);
    pub const FULL: BlockState = BlockState(0xff);

    pub fn from_cells<I: IntoIterator<Item = LocalCell>>(cells: I) -> Self {
        BlockState(cells.into_iter().fold(0u8, |m, c| m | (1 << c.index())))
    }

    pub const fn mask(self) -> u8 {
        self.0
    }

    pub const fn popcount(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn contains(self, cell: LocalCell) -> bool {
        self.0 & (1 << cell.index()) != 0
    }

    pub fn cells(self) -> impl Iterator<Item = LocalCell> {
        LocalCell::all().filter(move |c| self.contains(*c))
    }

    pub fn all() -> impl Iterator<Item = BlockState> {
        (0..=255u8).map(BlockState)
    }
}

impl fmt::Debug for BlockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockState({:#010b})", self.0)
    }
}

/// Point inversion through the block centre: every occupied cell moves to
/// its antipode.
pub fn invert(s: BlockState) -> BlockState {
    BlockState::from_cells(s.cells().map(LocalCell::antipode))
}

/// A proper rotation of the cube, stored both as a signed permutation
/// matrix acting on centred coordinates and as the induced cell permutation.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation {
    matrix: [[i8; 3]; 3],
    perm: [u8; 8],
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rotation").field("matrix", &self.matrix).finish()
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        matrix: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        perm: [0, 1, 2, 3, 4, 5, 6, 7],
    };

    fn from_matrix(matrix: [[i8; 3]; 3]) -> Self {
        let mut perm = [0u8; 8];
        for cell in LocalCell::all() {
            let c = cell.coords().map(|v| 2 * v as i64 - 1);
            let r = apply_matrix(&matrix, c);
            let image = LocalCell::new(((r[0] + 1) / 2) as u8, ((r[1] + 1) / 2) as u8, ((r[2] + 1) / 2) as u8);
            perm[cell.index() as usize] = image.index();
        }
        Rotation { matrix, perm }
    }

    /// Quarter turn about the x axis: `(x, y, z) -> (x, -z, y)` in centred coordinates.
    pub fn quarter_x() -> Self {
        Self::from_matrix([[1, 0, 0], [0, 0, -1], [0, 1, 0]])
    }

    /// Quarter turn about the y axis: `(x, y, z) -> (z, y, -x)`.
    pub fn quarter_y() -> Self {
        Self::from_matrix([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])
    }

    /// Quarter turn about the z axis: `(x, y, z) -> (-y, x, z)`.
    pub fn quarter_z() -> Self {
        Self::from_matrix([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        self.matrix
    }

    /// Image of a cell under the rotation.
    pub fn map_cell(&self, cell: LocalCell) -> LocalCell {
        LocalCell::from_index(self.perm[cell.index() as usize])
    }

    /// `self` after `other`: `(self * other)(c) = self(other(c))`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        Rotation::from_matrix(m)
    }

    pub fn inverse(&self) -> Rotation {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.matrix[j][i];
            }
        }
        Rotation::from_matrix(m)
    }

    /// Applies the rotation to an integer vector (direction or offset).
    pub fn apply_vector(&self, v: [i64; 3]) -> [i64; 3] {
        apply_matrix(&self.matrix, v)
    }
}

fn apply_matrix(m: &[[i8; 3]; 3], v: [i64; 3]) -> [i64; 3] {
    let mut out = [0i64; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|k| m[i][k] as i64 * v[k]).sum();
    }
    out
}

/// All 24 proper rotations of the cube, identity first, in breadth-first
/// order over the generators x, y, z.
pub fn rotations() -> Vec<Rotation> {
    let gens = [Rotation::quarter_x(), Rotation::quarter_y(), Rotation::quarter_z()];
    let mut out = alloc::vec![Rotation::IDENTITY];
    let mut frontier = 0;
    while frontier < out.len() {
        let current = out[frontier];
        for g in &gens {
            let next = g.compose(&current);
            if !out.contains(&next) {
                out.push(next);
            }
        }
        frontier += 1;
    }
    debug_assert_eq!(out.len(), 24);
    out
}

/// Bit `r(i)` of the output is bit `i` of the input.
pub fn apply_rotation(r: &Rotation, s: BlockState) -> BlockState {
    BlockState::from_cells(s.cells().map(|c| r.map_cell(c)))
}

/// Sparse 256x256 complex matrix, stored by column: `column(j)` lists the
/// nonzero entries of `op |j>` in ascending row order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    columns: Vec<Vec<(BlockState, Complex64)>>,
}

impl BlockOperator {
    pub fn identity() -> Self {
        BlockOperator {
            columns: BlockState::all().map(|s| alloc::vec![(s, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    /// Builds an operator from one image vector per basis state. Exact zeros
    /// are dropped and repeated rows are summed.
    pub fn from_columns<F>(mut image: F) -> Self
    where
        F: FnMut(BlockState) -> Vec<(BlockState, Complex64)>,
    {
        let columns = BlockState::all()
            .map(|s| {
                let mut col = image(s);
                col.sort_by_key(|(r, _)| *r);
                let mut merged: Vec<(BlockState, Complex64)> = Vec::with_capacity(col.len());
                for (r, a) in col {
                    match merged.last_mut() {
                        Some((lr, la)) if *lr == r => *la += a,
                        _ => merged.push((r, a)),
                    }
                }
                merged.retain(|(_, a)| *a != Complex64::new(0.0, 0.0));
                merged
            })
            .collect();
        BlockOperator { columns }
    }

    pub fn column(&self, s: BlockState) -> &[(BlockState, Complex64)] {
        &self.columns[s.0 as usize]
    }

    pub fn entry(&self, row: BlockState, col: BlockState) -> Complex64 {
        self.column(col)
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, a)| *a)
            .unwrap_or_default()
    }

    /// Nonzero entries as `(row, col, value)` sorted by `(row, col)`.
    pub fn entries(&self) -> Vec<(u8, u8, Complex64)> {
        let mut out: Vec<(u8, u8, Complex64)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, a)| (r.0, c as u8, *a)))
            .collect();
        out.sort_by_key(|(r, c, _)| (*r, *c));
        out
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut dense = alloc::vec![Complex64::default(); DIM * DIM];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, a) in col {
                dense[r.0 as usize * DIM + c] = *a;
            }
        }
        dense
    }

    pub fn is_finite(&self) -> bool {
        self.columns.iter().flatten().all(|(_, a)| a.re.is_finite() && a.im.is_finite())
    }

    /// Max-norm of `op^dagger op - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let dense = self.to_dense();
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = Complex64::default();
                for (r, a) in &self.columns[i] {
                    acc += a.conj() * dense[r.0 as usize * DIM + j];
                }
                if i == j {
                    acc -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Max-norm of `op P_r - P_r op`.
    pub fn commutator_residual(&self, r: &Rotation) -> f64 {
        let mut worst = 0.0f64;
        for s in BlockState::all() {
            // column s of op P_r is op|r s>; column s of P_r op is P_r op|s>.
            let lhs = self.column(apply_rotation(r, s));
            let mut rhs: Vec<(BlockState, Complex64)> =
                self.column(s).iter().map(|(row, a)| (apply_rotation(r, *row), *a)).collect();
            rhs.sort_by_key(|(row, _)| *row);
            worst = worst.max(sparse_diff_norm(lhs, &rhs));
        }
        worst
    }
}

fn sparse_diff_norm(a: &[(BlockState, Complex64)], b: &[(BlockState, Complex64)]) -> f64 {
    let mut worst = 0.0f64;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let d = match (a.get(i), b.get(j)) {
            (Some((ra, va)), Some((rb, vb))) if ra == rb => {
                i += 1;
                j += 1;
                *va - *vb
            }
            (Some((ra, va)), Some((rb, _))) if ra < rb => {
                i += 1;
                *va
            }
            (Some(_), Some((_, vb))) => {
                j += 1;
                -*vb
            }
            (Some((_, va)), None) => {
                i += 1;
                *va
            }
            (None, Some((_, vb))) => {
                j += 1;
                -*vb
            }
            (None, None) => unreachable!(),
        };
        worst = worst.max(d.norm());
    }
    worst
}

pub fn operator_is_unitary(op: &BlockOperator, tol: f64) -> bool {
    op.is_finite() && op.unitarity_residual() <= tol
}

pub fn operator_commutes_with(op: &BlockOperator, r: &Rotation, tol: f64) -> bool {
    op.commutator_residual(r) <= tol
}
