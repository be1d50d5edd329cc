//! Composite patterns: stable barriers and walls, qubit tracks, and the
//! gate gadgets, plus the harness that reads a logical gate matrix off a
//! simulated gadget.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::block::{rotations, Rotation};
use crate::evolution::{run, SimClock};
use crate::gate::Matrix;
use crate::rule::ScatteringRule;
use crate::state::{Cell, Configuration, Superposition};
use crate::Error;

/// Which track of a qubit a signal travels on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Track {
    Zero,
    One,
}

/// A point on a signal track at a given time, and the diagonal direction
/// the signal is moving in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrackRef {
    pub anchor: Cell,
    pub direction: [i64; 3],
    pub role: Track,
}

impl TrackRef {
    /// Position after `n` steps of free flight.
    pub fn advanced(&self, n: i64) -> TrackRef {
        TrackRef { anchor: self.anchor + self.direction.map(|d| d * n), ..*self }
    }
}

/// A qubit encoded as a signal on one of two parallel tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogicalQubit {
    pub id: usize,
    pub track0: TrackRef,
    pub track1: TrackRef,
}

impl LogicalQubit {
    pub fn new(id: usize, track0: Cell, track1: Cell, direction: [i64; 3]) -> Self {
        LogicalQubit {
            id,
            track0: TrackRef { anchor: track0, direction, role: Track::Zero },
            track1: TrackRef { anchor: track1, direction, role: Track::One },
        }
    }

    pub fn cell(&self, bit: u8) -> Cell {
        if bit == 0 {
            self.track0.anchor
        } else {
            self.track1.anchor
        }
    }

    /// Offset from the `|0>` track to the `|1>` track.
    pub fn separation(&self) -> [i64; 3] {
        let (a, b) = (self.track0.anchor, self.track1.anchor);
        [b.x - a.x, b.y - a.y, b.z - a.z]
    }

    fn transformed(&self, p: &Placement) -> LogicalQubit {
        let t = |r: TrackRef| TrackRef { anchor: p.apply(r.anchor), direction: p.rotation.apply_vector(r.direction), ..r };
        LogicalQubit { id: self.id, track0: t(self.track0), track1: t(self.track1) }
    }
}

/// The signal cell encoding `bit` on the given tracks.
pub fn qubit(q: &LogicalQubit, bit: u8) -> Configuration {
    Configuration::new([q.cell(bit)])
}

/// Rigid motion of a gadget: a rotation about the centre of the aligned
/// block at the origin, then a translation by an even vector. Both preserve
/// the partition structure, so a placed gadget keeps its timing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub rotation: Rotation,
    pub offset: [i64; 3],
}

impl Placement {
    pub fn new(rotation: Rotation, offset: [i64; 3]) -> Result<Self, Error> {
        if offset.iter().any(|v| v.rem_euclid(2) != 0) {
            return Err(Error::MisalignedAnchor("gadget offsets must be even"));
        }
        Ok(Placement { rotation, offset })
    }

    pub fn translation(offset: [i64; 3]) -> Result<Self, Error> {
        Self::new(Rotation::IDENTITY, offset)
    }

    pub fn apply(&self, c: Cell) -> Cell {
        let doubled = self.rotation.apply_vector(c.to_array().map(|v| 2 * v - 1));
        Cell::from_array(doubled.map(|v| (v + 1) / 2)) + self.offset
    }
}

/// A frozen arrangement of cells with logical ports.
///
/// `scaffold` holds the static cells, `control` any cells that move on their
/// own (a looping control signal). Inputs are placed at clock time `start`;
/// outputs are read `latency` steps later.
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget {
    pub name: String,
    pub scaffold: Configuration,
    pub control: Configuration,
    pub inputs: Vec<LogicalQubit>,
    pub outputs: Vec<LogicalQubit>,
    pub latency: u64,
    pub start: u64,
}

impl Gadget {
    pub fn scaffold_only(name: &str, scaffold: Configuration) -> Self {
        Gadget {
            name: name.into(),
            scaffold,
            control: Configuration::empty(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            latency: 0,
            start: 0,
        }
    }

    /// Cells present with no qubit signals.
    pub fn idle_cells(&self) -> Configuration {
        self.scaffold.union(&self.control)
    }

    pub fn placed(&self, p: &Placement) -> Gadget {
        Gadget {
            name: self.name.clone(),
            scaffold: self.scaffold.cells().iter().map(|c| p.apply(*c)).collect(),
            control: self.control.cells().iter().map(|c| p.apply(*c)).collect(),
            inputs: self.inputs.iter().map(|q| q.transformed(p)).collect(),
            outputs: self.outputs.iter().map(|q| q.transformed(p)).collect(),
            ..self.clone()
        }
    }

    /// Initial configuration for a logical basis input; qubit 0 is the most
    /// significant bit of `basis`.
    pub fn prepare(&self, basis: usize) -> Configuration {
        let n = self.inputs.len();
        let signals = self.inputs.iter().enumerate().map(|(k, q)| q.cell(((basis >> (n - 1 - k)) & 1) as u8));
        Configuration::new(self.idle_cells().cells().iter().copied().chain(signals))
    }
}

/// A 2x2x1 slab lying in the plane normal to `normal_axis`, spanning
/// `anchor + {0,1}` along the two other axes. Exactly one in-plane axis must
/// straddle the aligned partition so that each partition sees face-adjacent
/// pairs only.
pub fn stable_barrier(anchor: Cell, normal_axis: usize) -> Result<Gadget, Error> {
    let a = anchor.to_array();
    let in_plane: Vec<usize> = (0..3).filter(|&i| i != normal_axis).collect();
    let odd = in_plane.iter().filter(|&&i| a[i].rem_euclid(2) == 1).count();
    if odd != 1 {
        return Err(Error::MisalignedAnchor("barrier slab must straddle exactly one partition boundary"));
    }
    let cells = (0..4).map(|k| {
        let mut c = a;
        c[in_plane[0]] += k & 1;
        c[in_plane[1]] += k >> 1;
        Cell::from_array(c)
    });
    Ok(Gadget::scaffold_only("barrier", cells.collect()))
}

/// A fully occupied 2x2x2 cube at `anchor`. One partition sees two walls
/// normal to `normal_axis`, the other sees four barriers along that axis.
/// The anchor's parity along `normal_axis` must differ from its parity along
/// the other two axes.
pub fn stable_wall(anchor: Cell, normal_axis: usize) -> Result<Gadget, Error> {
    let p = anchor.to_array().map(|v| v.rem_euclid(2));
    let others: Vec<i64> = (0..3).filter(|&i| i != normal_axis).map(|i| p[i]).collect();
    if others[0] != others[1] || others[0] == p[normal_axis] {
        return Err(Error::MisalignedAnchor("wall cube would split into lone corners"));
    }
    let cells = (0..8).map(|k| anchor + [k & 1, (k >> 1) & 1, k >> 2]);
    Ok(Gadget::scaffold_only("wall", cells.collect()))
}

/// Runs each logical basis input through the gadget and assembles the
/// `2^n x 2^n` matrix of output amplitudes at the output ports.
pub fn extract_gate_matrix(gadget: &Gadget, qubits: usize, rule: &ScatteringRule) -> Result<Matrix, Error> {
    extract_at(gadget, qubits, rule, gadget.latency)
}

/// As [`extract_gate_matrix`] but reading after `steps` steps.
pub fn extract_at(gadget: &Gadget, qubits: usize, rule: &ScatteringRule, steps: u64) -> Result<Matrix, Error> {
    if gadget.inputs.len() != qubits || gadget.outputs.len() != qubits {
        return Err(Error::QubitCount(gadget.inputs.len(), qubits));
    }
    let readout_time = gadget.start + steps;

    let idle = guarded_run(gadget.idle_cells(), gadget.start, steps, 1, rule)?;
    let idle = match idle.iter().collect::<Vec<_>>().as_slice() {
        [(c, a)] if (**a - Complex64::new(1.0, 0.0)).norm() < 1e-12 => (*c).clone(),
        _ => return Err(Error::OffPort(readout_time)),
    };

    let dim = 1usize << qubits;
    let mut m = Matrix::zeros(dim);
    for col in 0..dim {
        let out = guarded_run(gadget.prepare(col), gadget.start, steps, BRANCH_LIMIT, rule)?;
        for (conf, amp) in out.iter() {
            let row = read_ports(conf, &idle, &gadget.outputs).ok_or(Error::OffPort(readout_time))?;
            m[(row, col)] += *amp;
        }
    }
    let residual = m.unitarity_residual();
    if residual > 1e-6 {
        return Err(Error::NonUnitaryGate(residual));
    }
    Ok(m)
}

/// A well-formed gadget never holds more than a handful of branches; a
/// scaffold that starts to disintegrate multiplies them quickly.
const BRANCH_LIMIT: usize = 64;

fn guarded_run(conf: Configuration, start: u64, steps: u64, limit: usize, rule: &ScatteringRule) -> Result<Superposition, Error> {
    let mut s = Superposition::basis(conf);
    let mut clock = SimClock::new(start);
    for _ in 0..steps {
        s = run(&s, 1, &mut clock, rule);
        if s.len() > limit {
            return Err(Error::OffPort(clock.t));
        }
    }
    Ok(s)
}

fn read_ports(conf: &Configuration, idle: &Configuration, ports: &[LogicalQubit]) -> Option<usize> {
    if !idle.cells().iter().all(|c| conf.contains(c)) {
        return None;
    }
    let signals = conf.difference(idle);
    if signals.len() != ports.len() {
        return None;
    }
    let mut row = 0;
    for q in ports {
        let bit = match (signals.contains(&q.track0.anchor), signals.contains(&q.track1.anchor)) {
            (true, false) => 0,
            (false, true) => 1,
            _ => return None,
        };
        row = (row << 1) | bit;
    }
    Some(row)
}

/// Half the offset between the two tracks of a qubit. The crossing cavity
/// needs each track of a pair to run through its own copy, so copies sit
/// `2 * TRACK_SPACING` apart and must not touch.
pub const TRACK_SPACING: i64 = 5;

/// The Hadamard gadget with the standard spacing.
///
/// In the canonical frame inputs move along `(1,-1,1)` on tracks
/// `2 * TRACK_SPACING` apart in z; outputs leave along `(1,1,1)` with the
/// same spacing.
pub fn hadamard_gadget(p: &Placement) -> Gadget {
    hadamard_with_spacing(TRACK_SPACING).placed(p)
}

/// Hadamard gadget whose tracks sit `2k` apart.
///
/// A slab under the origin block supplies the barrier half of both rule
/// inputs. The `|1>` input is bent into place by a wall cube `k` steps before
/// the block fires, and the `|0>` output is bent parallel to the `|1>`
/// output by a second cube `k` steps after.
pub fn hadamard_with_spacing(k: i64) -> Gadget {
    assert!(k >= 1);
    let fire = (k + 1 + 1) & !1;
    let bounce = fire - k;
    let mut scaffold = stable_barrier(Cell::new(0, -1, 0), 2).expect("slab anchor").scaffold;
    let walls = [
        stable_wall(Cell::new(-k, k, k + 1), 2).expect("input cube anchor"),
        stable_wall(Cell::new(k, k, -k - 1), 2).expect("output cube anchor"),
    ];
    for w in &walls {
        scaffold = scaffold.union(&w.scaffold);
    }
    let inward = [1, -1, 1];
    let track1 = Cell::new(-k, k + 1, k) + inward.map(|d| -d * bounce);
    let track0 = Cell::new(0, 1, 0) + inward.map(|d| -d * fire);
    let settled = fire + k + 1;
    let latency = (settled + 1) & !1;
    let drift = latency - settled;
    let out0 = Cell::new(k + 1, k + 1, 1 - k) + [drift; 3];
    let out1 = Cell::new(k + 1, k + 1, k + 1) + [drift; 3];
    Gadget {
        name: "hadamard".into(),
        scaffold,
        control: Configuration::empty(),
        inputs: alloc::vec![LogicalQubit::new(0, track0, track1, inward)],
        outputs: alloc::vec![LogicalQubit::new(0, out0, out1, [1, 1, 1])],
        latency: latency as u64,
        start: 0,
    }
}

/// Walls of a square cavity running along x.
///
/// The interior is `y, z` in `corner + 1 ..= corner + size`; each side is a
/// two-cell-thick plate, with the four edges left open so no block ever
/// holds cells from two plates. `x` runs over `xs[0] ..= xs[1]` with
/// `xs[0]` even and `xs[1]` odd. Signals moving along `+x` inside the
/// interior bounce between the plates and pass the open ends untouched.
pub fn cavity(xs: [i64; 2], corner: [i64; 2], size: i64) -> Result<Configuration, Error> {
    if xs[0].rem_euclid(2) != 0 || xs[1].rem_euclid(2) != 1 || corner.iter().any(|c| c.rem_euclid(2) != 0) {
        return Err(Error::MisalignedAnchor("cavity must start even, end odd and sit on even corners"));
    }
    if size < 4 || size % 2 != 0 {
        return Err(Error::MisalignedAnchor("cavity size must be even and at least 4"));
    }
    let [cy, cz] = corner;
    let mut cells = Vec::new();
    for x in xs[0]..=xs[1] {
        for along in 2..size {
            for across in [-1, 0, size + 1, size + 2] {
                cells.push(Cell::new(x, cy + across, cz + along));
                cells.push(Cell::new(x, cy + along, cz + across));
            }
        }
    }
    Ok(Configuration::new(cells))
}

/// Interior width of the crossing cavity.
pub const CAVITY_SIZE: i64 = 4;

/// Position and direction of a lone signal that enters a cavity's first
/// column at `(0, y, z)` at an even time and flies `steps` steps, the first
/// `length` of them inside the cavity.
///
/// Each axis is a reflection on `1..=size` with a repeated cell at each
/// bounce, which unfolds to free motion on a cycle of length `2 * size`. A
/// bounce is only clean when the other axis is safely away from the open
/// edges; otherwise the signal either slips out through the gap or catches
/// half a plate and scatters, and that is reported as an error.
pub fn cavity_flight(at: Cell, dir: [i64; 3], size: i64, length: i64, steps: i64) -> Result<TrackRef, Error> {
    let period = 2 * size;
    let unfold = |p: i64, v: i64| if v > 0 { p } else { period + 1 - p };
    let fold = |u: i64| {
        let r = (u - 1).rem_euclid(period) + 1;
        if r <= size { (r, 1) } else { (period + 1 - r, -1) }
    };
    let inside = |p: i64| (1..=size).contains(&p);
    if dir[0] != 1 || !inside(at.y) || !inside(at.z) {
        return Err(Error::MisalignedAnchor("signal must enter the cavity interior moving along +x"));
    }
    let (mut uy, mut uz) = (unfold(at.y, dir[1]), unfold(at.z, dir[2]));
    let bouncing = |u: i64| {
        let (p, v) = fold(u);
        (p == size && v > 0) || (p == 1 && v < 0)
    };
    let clear = |u: i64| {
        let (p, v) = fold(u);
        let low = if v > 0 { p } else { p - 1 };
        low >= 2 && low < size - 1
    };
    for k in 0..length.min(steps) {
        if (bouncing(uy) && !clear(uz)) || (bouncing(uz) && !clear(uy)) {
            return Err(Error::CavityEdge(k));
        }
        uy += 1;
        uz += 1;
    }
    let ((y, vy), (z, vz)) = (fold(uy), fold(uz));
    let inside_steps = length.min(steps);
    let free = steps - inside_steps;
    let here = TrackRef { anchor: Cell::new(at.x + inside_steps, y, z), direction: [1, vy, vz], role: Track::One };
    Ok(here.advanced(free))
}

/// Controlled-`R(pi/4)`: the one-crossing cavity.
pub fn crossing_gadget(p: &Placement) -> Result<Gadget, Error> {
    Ok(Gadget { name: "crossing".into(), ..crossing_chain(1)?.placed(p) })
}

/// Cavity in which a control and a target signal cross `crossings` times.
///
/// Qubit 0 (control) and qubit 1 (target) enter side by side along
/// `(1,1,1)` with their `|1>` tracks in the main cavity, mirrored across its
/// diagonal so they meet once every four steps. Each `|0>` track runs
/// through its own copy of the cavity, displaced by the track spacing, so it
/// is delayed in the same way but never meets anything. The gate is
/// `diag(1, 1, 1, w^crossings)` with `w = e^{i pi/4}`.
pub fn crossing_chain(crossings: u32) -> Result<Gadget, Error> {
    if crossings == 0 {
        return Err(Error::NoCrossings);
    }
    let length = 4 * crossings as i64 - 2;
    let latency = length + 2;
    let sep = 2 * TRACK_SPACING;
    let seps = [[0, -sep, 0], [0, 0, sep]];
    let ones = [Cell::new(0, 4, 2), Cell::new(0, 2, 4)];
    let dir = [1, 1, 1];
    let xs = [0, length - 1];
    let mut scaffold = cavity(xs, [0, 0], CAVITY_SIZE)?;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (id, (one, s)) in ones.iter().zip(seps).enumerate() {
        let zero = *one + s.map(|v| -v);
        let copy = cavity(xs, [-s[1], -s[2]], CAVITY_SIZE)?;
        if !near_disjoint(&scaffold, &copy) {
            return Err(Error::ZeroTrackCrossing);
        }
        scaffold = scaffold.union(&copy);
        inputs.push(LogicalQubit::new(id, zero, *one, dir));
        let out1 = cavity_flight(*one, dir, CAVITY_SIZE, length, latency)?;
        let out0 = out1.anchor + s.map(|v| -v);
        outputs.push(LogicalQubit::new(id, out0, out1.anchor, out1.direction));
    }
    Ok(Gadget {
        name: alloc::format!("crossing x{crossings}"),
        scaffold,
        control: Configuration::empty(),
        inputs,
        outputs,
        latency: latency as u64,
        start: 0,
    })
}

/// True when no block of either partition holds cells of both sets.
fn near_disjoint(a: &Configuration, b: &Configuration) -> bool {
    use crate::evolution::Parity;
    [Parity::Aligned, Parity::Shifted].iter().all(|p| {
        let blocks = |c: &Configuration| c.cells().iter().map(|&cell| p.locate(cell).0).collect::<alloc::collections::BTreeSet<_>>();
        blocks(a).is_disjoint(&blocks(b))
    })
}

impl Gadget {
    /// The same gadget with inputs placed at clock time `start` instead.
    pub fn starting_at(mut self, start: u64) -> Result<Gadget, Error> {
        if start % 2 != self.start % 2 {
            return Err(Error::MisalignedAnchor("gadgets can only be delayed by an even number of steps"));
        }
        self.start = start;
        Ok(self)
    }

    /// Renumbers the qubits: the qubit at position `k` gets id `ids[k]`.
    pub fn with_qubits(mut self, ids: &[usize]) -> Gadget {
        let relabel = |q: &mut LogicalQubit| q.id = ids[q.id];
        self.inputs.iter_mut().for_each(relabel);
        self.outputs.iter_mut().for_each(relabel);
        self
    }

    fn end(&self) -> u64 {
        self.start + self.latency
    }
}

/// Runs `second` after `first`.
///
/// Qubits are matched by id. A qubit leaving `first` must, after free
/// flight up to `second.start`, sit exactly on the matching input of
/// `second`. Qubits used by only one gadget fly freely across the other.
/// Control cells are given at a gadget's start time, so only `first` may
/// carry any.
pub fn compose(name: &str, first: &Gadget, second: &Gadget) -> Result<Gadget, Error> {
    if second.start < first.end() {
        return Err(Error::MisalignedAnchor("second gadget starts before the first finishes"));
    }
    if !second.control.is_empty() {
        return Err(Error::MisalignedAnchor("a gadget with moving control cells can only come first"));
    }
    let idle_a = first.idle_cells();
    let idle_b = second.idle_cells();
    if !idle_a.is_disjoint(&idle_b) {
        return Err(Error::PlacementCollision);
    }
    let gap = (second.start - first.end()) as i64;
    for q in &first.outputs {
        if let Some(next) = second.inputs.iter().find(|n| n.id == q.id) {
            if shift(q, gap) != *next {
                return Err(Error::OffPort(second.start));
            }
        }
    }
    let mut inputs = first.inputs.clone();
    let lead = (second.start - first.start) as i64;
    for q in &second.inputs {
        if !first.outputs.iter().any(|o| o.id == q.id) {
            inputs.push(shift(q, -lead));
        }
    }
    let mut outputs = second.outputs.clone();
    for q in &first.outputs {
        if !second.inputs.iter().any(|n| n.id == q.id) {
            outputs.push(shift(q, (second.end() - first.end()) as i64));
        }
    }
    inputs.sort_by_key(|q| q.id);
    outputs.sort_by_key(|q| q.id);
    Ok(Gadget {
        name: name.into(),
        scaffold: first.scaffold.union(&second.scaffold),
        control: first.control.union(&second.control),
        inputs,
        outputs,
        latency: second.end() - first.start,
        start: first.start,
    })
}

/// Cube that reflects a signal at `at`, moving along `dir` at a step of the
/// given parity, in `axis`. The cube's inner face fills the far side of the
/// signal's block along `axis`.
fn reflector(at: Cell, dir: [i64; 3], axis: usize) -> Result<Gadget, Error> {
    let mut corner = at.to_array();
    for (c, d) in corner.iter_mut().zip(dir) {
        if d < 0 {
            *c -= 1;
        }
    }
    corner[axis] += dir[axis];
    stable_wall(Cell::from_array(corner), axis)
}

/// Closed hexagonal orbit: six reflectors flip x, y, z, x, y, z in turn,
/// with `leg` free steps between bounces. Legs of equal length close the
/// loop, whose period is `6 * (leg + 1)`. Returns the reflectors and the
/// control signal's position at time 0, moving along `(1,1,1)`.
pub fn control_loop(leg: i64) -> Result<(Configuration, Cell), Error> {
    let start = Cell::new(0, 0, 0);
    let (mut at, mut dir) = (start, [1i64, 1, 1]);
    let mut cells = Configuration::empty();
    for k in 0..6 {
        at = at + dir.map(|d| d * leg);
        let axis = k % 3;
        let cube = reflector(at, dir, axis)?.scaffold;
        if !near_disjoint(&cells, &cube) {
            return Err(Error::PlacementCollision);
        }
        cells = cells.union(&cube);
        let mut moved = dir;
        moved[axis] = 0;
        at = at + moved;
        dir[axis] = -dir[axis];
    }
    debug_assert_eq!((at, dir), (start, [1, 1, 1]));
    Ok((cells, start))
}

/// Free steps between reflections of the phase loop's control signal.
pub const LOOP_LEG: i64 = 4;

/// Single-qubit `R(pi/4)`: a control signal circling a six-reflector loop
/// meets the qubit's `|1>` track once per period.
///
/// The qubit enters along `(1,1,1)` with its tracks `2 * TRACK_SPACING`
/// apart in z, as the Hadamard gadget emits them, and the latency equals the
/// loop period so the control is back at its start for the next qubit.
pub fn phase_loop_gadget(p: &Placement) -> Result<Gadget, Error> {
    let (scaffold, control) = control_loop(LOOP_LEG)?;
    let period = 6 * (LOOP_LEG + 1);
    let dir = [1, 1, 1];
    let one = Cell::new(-3 * LOOP_LEG, -2, 0);
    let zero = one + [0, 0, -2 * TRACK_SPACING];
    let input = LogicalQubit::new(0, zero, one, dir);
    let g = Gadget {
        name: "phase-loop".into(),
        scaffold,
        control: Configuration::new([control]),
        inputs: alloc::vec![input],
        outputs: alloc::vec![LogicalQubit { id: 0, track0: input.track0.advanced(period), track1: input.track1.advanced(period) }],
        latency: period as u64,
        start: 0,
    };
    Ok(g.placed(p))
}

/// Simulates the control cells alone for one latency and checks they come
/// back to where they started.
pub fn check_loop_period(g: &Gadget, rule: &ScatteringRule) -> Result<(), Error> {
    let end = guarded_run(g.idle_cells(), g.start, g.latency, 1, rule)?;
    let back = end.iter().next().is_some_and(|(c, _)| *c == g.idle_cells());
    if back {
        Ok(())
    } else {
        Err(Error::LoopPeriodMismatch(g.latency))
    }
}

impl Gadget {
    /// Places the gadget, with some rotation and even translation, so that
    /// its inputs at clock time `start` are exactly `wanted` (taking their
    /// ids too).
    pub fn fit_inputs(&self, wanted: &[LogicalQubit], start: u64) -> Result<Gadget, Error> {
        self.fit(&self.inputs, wanted)?.starting_at(start)
    }

    /// Places the gadget so that its outputs, at clock time `end`, are
    /// exactly `wanted`.
    pub fn fit_outputs(&self, wanted: &[LogicalQubit], end: u64) -> Result<Gadget, Error> {
        let start = end.checked_sub(self.latency).ok_or(Error::MisalignedAnchor("gadget would start before time 0"))?;
        self.fit(&self.outputs, wanted)?.starting_at(start)
    }

    fn fit(&self, ports: &[LogicalQubit], wanted: &[LogicalQubit]) -> Result<Gadget, Error> {
        if ports.len() != wanted.len() || ports.is_empty() {
            return Err(Error::QubitCount(ports.len(), wanted.len()));
        }
        for r in rotations() {
            let turned = Placement { rotation: r, offset: [0; 3] };
            let from = turned.apply(ports[0].track1.anchor);
            let to = wanted[0].track1.anchor;
            let offset = [to.x - from.x, to.y - from.y, to.z - from.z];
            let Ok(p) = Placement::new(r, offset) else { continue };
            let lands = ports.iter().zip(wanted).all(|(q, w)| {
                let t = q.transformed(&p);
                t.track0 == w.track0 && t.track1 == w.track1
            });
            if lands {
                let ids: Vec<usize> = wanted.iter().map(|w| w.id).collect();
                let mut order = alloc::vec![0; ids.len()];
                for (k, q) in ports.iter().enumerate() {
                    order[q.id] = ids[k];
                }
                return Ok(self.placed(&p).with_qubits(&order));
            }
        }
        Err(Error::NoFit)
    }
}

/// Two Hadamard gadgets back to back on one qubit.
pub fn hadamard_pair() -> Result<Gadget, Error> {
    let first = hadamard_gadget(&Placement::translation([0; 3])?);
    let next = first.outputs.clone();
    let second = hadamard_gadget(&Placement::translation([0; 3])?).fit_inputs(&next, first.latency)?;
    compose("hadamard-pair", &first, &second)
}

/// Controlled-Z from four crossings in one cavity.
pub fn controlled_z_gadget(p: &Placement) -> Result<Gadget, Error> {
    Ok(Gadget { name: "controlled-z".into(), ..crossing_chain(4)?.placed(p) })
}

/// cNOT as `(I x H) cR^4 (I x H)`, qubit 0 the control.
///
/// The four-crossing cavity hands the target back moving along the
/// Hadamard gadget's input direction, so the second Hadamard needs no
/// extra routing. The first one finishes two steps before the cavity starts
/// so its output cube stays clear of the control's path.
pub fn cnot_gadget() -> Result<Gadget, Error> {
    let h = hadamard_with_spacing(TRACK_SPACING);
    let lead = h.latency + 2;
    let cz = crossing_chain(4)?.starting_at(lead)?;
    let before: Vec<LogicalQubit> = cz.inputs.iter().filter(|q| q.id == 1).map(|q| shift(q, -2)).collect();
    let h1 = h.fit_outputs(&before, h.latency)?;
    let after: Vec<LogicalQubit> = cz.outputs.iter().filter(|q| q.id == 1).copied().collect();
    let h2 = h.fit_inputs(&after, cz.end())?;
    compose("cnot", &compose("h-cz", &h1, &cz)?, &h2)
}

fn shift(q: &LogicalQubit, n: i64) -> LogicalQubit {
    LogicalQubit { id: q.id, track0: q.track0.advanced(n), track1: q.track1.advanced(n) }
}

/// Names accepted by [`catalogue_gadget`].
pub const CATALOGUE: [&str; 8] = ["barrier", "wall", "hadamard", "crossing", "controlled-z", "phase-loop", "hadamard-pair", "cnot"];

/// A catalogue gadget in its canonical frame, then placed.
pub fn catalogue_gadget(name: &str, p: &Placement) -> Result<Gadget, Error> {
    let g = match name {
        "barrier" => stable_barrier(Cell::new(0, -1, 0), 2)?,
        "wall" => stable_wall(Cell::new(0, 0, 1), 2)?,
        "hadamard" => hadamard_with_spacing(TRACK_SPACING),
        "crossing" => return crossing_gadget(p),
        "controlled-z" => return controlled_z_gadget(p),
        "phase-loop" => return phase_loop_gadget(p),
        "hadamard-pair" => hadamard_pair()?,
        "cnot" => cnot_gadget()?,
        _ => return Err(Error::UnknownGadget),
    };
    Ok(g.placed(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Parity;
    use crate::gate;
    use core::f64::consts::FRAC_PI_4;

    fn origin() -> Placement {
        Placement::translation([0; 3]).unwrap()
    }

    fn evolve(conf: &Configuration, start: u64, n: u64) -> Superposition {
        let mut clock = SimClock::new(start);
        run(&Superposition::basis(conf.clone()), n, &mut clock, &ScatteringRule::standard())
    }

    fn single(s: &Superposition) -> Configuration {
        assert_eq!(s.len(), 1);
        s.iter().next().unwrap().0.clone()
    }

    #[test]
    fn stable_slab_holds_and_misaligned_slab_scatters() {
        let slab = stable_barrier(Cell::new(0, 1, 0), 2).unwrap().scaffold;
        assert_eq!(single(&evolve(&slab, 0, 10)), slab);

        let other = stable_barrier(Cell::new(5, 6, 9), 0).unwrap().scaffold;
        let both = slab.union(&other);
        assert_eq!(single(&evolve(&both, 0, 10)), both);

        assert!(stable_barrier(Cell::new(0, 0, 0), 2).is_err());
        // The same four cells inside one aligned block: a lone barrier-free
        // pattern that flies apart.
        let loose = Configuration::new([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)].map(|(x, y, z)| Cell::new(x, y, z)));
        let after = single(&evolve(&loose, 0, 2));
        assert_ne!(after, loose);
        assert_eq!(after.len(), 4);
    }

    #[test]
    fn wall_cube_is_stable_and_reflects() {
        let cube = stable_wall(Cell::new(0, 0, 1), 2).unwrap().scaffold;
        assert_eq!(cube.len(), 8);
        let s = Superposition::basis(cube.clone());
        let mut clock = SimClock::default();
        let mut now = s.clone();
        for _ in 0..100 {
            now = run(&now, 1, &mut clock, &ScatteringRule::standard());
            assert_eq!(now, s);
        }
        assert!(stable_wall(Cell::new(0, 0, 0), 2).is_err());
        assert!(stable_wall(Cell::new(1, 0, 1), 2).is_err());

        // Face-on approach: the signal reaches the block under the cube's
        // lower face at t = 2, stalls in z for the bounce step, then leaves
        // with z reversed.
        let conf = cube.union(&Configuration::new([Cell::new(-2, -2, -2)]));
        let path: Vec<Cell> = (1..=5).map(|n| single(&evolve(&conf, 0, n)).difference(&cube).cells()[0]).collect();
        assert_eq!(path, [(-1, -1, -1), (0, 0, 0), (1, 1, 0), (2, 2, -1), (3, 3, -2)].map(|(x, y, z)| Cell::new(x, y, z)));
    }

    #[test]
    fn reflector_flips_one_component() {
        for axis in 0..3 {
            let at = Cell::new(0, 0, 0);
            let cube = reflector(at, [1, 1, 1], axis).unwrap().scaffold;
            let s = evolve(&cube.union(&Configuration::new([at])), 0, 3);
            let mut expected = [1i64, 1, 1];
            expected[axis] = 0;
            let after_bounce = at + expected;
            let mut dir = [1i64, 1, 1];
            dir[axis] = -1;
            let want = after_bounce + dir.map(|d| 2 * d);
            assert_eq!(single(&s).difference(&cube).cells(), [want]);
        }
    }

    #[test]
    fn qubit_bits_and_free_flight() {
        let q = LogicalQubit::new(0, Cell::new(0, 0, 0), Cell::new(0, 0, 10), [1, 1, 1]);
        assert_eq!(qubit(&q, 0).cells(), [Cell::new(0, 0, 0)]);
        assert_eq!(qubit(&q, 1).cells(), [Cell::new(0, 0, 10)]);
        assert_eq!(q.separation(), [0, 0, 10]);
        for bit in 0..2 {
            let moved = evolve(&qubit(&q, bit), 0, 7);
            let want = q.cell(bit) + [7, 7, 7];
            assert_eq!(single(&moved).cells(), [want]);
        }
    }

    #[test]
    fn placement_keeps_partitions() {
        for r in rotations() {
            let p = Placement::new(r, [2, -4, 6]).unwrap();
            let (c0, _) = Parity::Aligned.locate(p.apply(Cell::new(0, 0, 0)));
            let (c1, _) = Parity::Aligned.locate(p.apply(Cell::new(1, 1, 1)));
            assert_eq!(c0, c1);
        }
        assert!(Placement::translation([1, 0, 0]).is_err());
    }

    fn check(g: &Gadget, n: usize, want: &Matrix) {
        let rule = ScatteringRule::standard();
        let m = extract_gate_matrix(g, n, &rule).unwrap();
        assert!(m.residual_up_to_phase(want) <= 1e-9, "{}: {:?}", g.name, m);
        assert!(m.unitarity_residual() <= 1e-6);
        assert!(matches!(extract_at(g, n, &rule, g.latency - 1), Err(Error::OffPort(_))), "{} early", g.name);
        assert!(matches!(extract_at(g, n, &rule, g.latency + 1), Err(Error::OffPort(_))), "{} late", g.name);
        let idle = g.idle_cells();
        let after = evolve(&idle, g.start, 4 * g.latency);
        if g.control.is_empty() {
            assert_eq!(single(&after), idle, "{} scaffold moved", g.name);
        } else {
            assert_eq!(single(&after).difference(&g.control.union(&idle)).len(), 0);
        }
    }

    #[test]
    fn hadamard_gadget_is_h_for_every_spacing() {
        check(&hadamard_gadget(&origin()), 1, &gate::hadamard());
        for k in 1..=4 {
            let g = hadamard_with_spacing(k);
            assert_eq!(g.inputs[0].separation(), [0, 0, 2 * k]);
            assert_eq!(g.outputs[0].separation(), [0, 0, 2 * k]);
            check(&g, 1, &gate::hadamard());
        }
    }

    #[test]
    fn hadamard_amplitudes_exact() {
        let m = extract_gate_matrix(&hadamard_gadget(&origin()), 1, &ScatteringRule::standard()).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - Complex64::new(want[i][j], 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hadamard_survives_any_rotation() {
        for (k, r) in rotations().into_iter().enumerate().step_by(5) {
            let p = Placement::new(r, [2 * k as i64, -4, 8]).unwrap();
            check(&hadamard_gadget(&p), 1, &gate::hadamard());
        }
    }

    #[test]
    fn two_hadamards_cancel() {
        let pair = hadamard_pair().unwrap();
        check(&pair, 1, &Matrix::identity(2));
        let m = extract_gate_matrix(&pair, 1, &ScatteringRule::standard()).unwrap();
        assert!(m[(1, 0)].norm() < 1e-9);
        assert!((m[(0, 0)].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn crossings_multiply_the_phase() {
        for n in 1..=4u32 {
            let g = crossing_chain(n).unwrap();
            check(&g, 2, &gate::controlled_phase(n as f64 * FRAC_PI_4));
        }
        assert_eq!(crossing_chain(0), Err(Error::NoCrossings));
        check(&crossing_gadget(&origin()).unwrap(), 2, &gate::controlled_r_pi_4());
        check(&controlled_z_gadget(&origin()).unwrap(), 2, &gate::controlled_z());
    }

    #[test]
    fn crossing_ports_follow_the_unfolded_orbit() {
        let g = crossing_chain(3).unwrap();
        let rule = ScatteringRule::standard();
        for q in &g.inputs {
            let out = g.outputs.iter().find(|o| o.id == q.id).unwrap();
            for (input, output) in [(q.track0, out.track0), (q.track1, out.track1)] {
                let s = run(
                    &Superposition::basis(g.scaffold.union(&Configuration::new([input.anchor]))),
                    g.latency,
                    &mut SimClock::default(),
                    &rule,
                );
                assert_eq!(single(&s).difference(&g.scaffold).cells(), [output.anchor]);
            }
        }
        assert!(matches!(cavity_flight(Cell::new(0, 1, 1), [1, -1, -1], 4, 10, 10), Err(Error::CavityEdge(0))));
    }

    #[test]
    fn cnot_from_gadgets() {
        check(&cnot_gadget().unwrap(), 2, &gate::cnot());
    }

    #[test]
    fn phase_loop() {
        let g = phase_loop_gadget(&origin()).unwrap();
        check(&g, 1, &gate::phase(FRAC_PI_4));
        let rule = ScatteringRule::standard();
        assert_eq!(check_loop_period(&g, &rule), Ok(()));
        let short = Gadget { latency: g.latency - 2, ..g.clone() };
        assert_eq!(check_loop_period(&short, &rule), Err(Error::LoopPeriodMismatch(g.latency - 2)));
        let m = extract_gate_matrix(&g, 1, &rule).unwrap();
        let rel = m[(1, 1)] / m[(0, 0)];
        assert!((rel - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-12);
    }

    #[test]
    fn control_loop_closes_for_any_leg() {
        for leg in 1..=5 {
            let (cells, start) = control_loop(leg).unwrap();
            let conf = cells.union(&Configuration::new([start]));
            assert_eq!(single(&evolve(&conf, 0, 6 * (leg as u64 + 1))), conf);
            assert_ne!(single(&evolve(&conf, 0, 6 * leg as u64)), conf);
        }
    }

    #[test]
    fn compose_checks_ports_and_overlap() {
        let h = hadamard_gadget(&origin());
        assert_eq!(compose("x", &h, &h.clone().starting_at(h.latency).unwrap()), Err(Error::PlacementCollision));
        let far = hadamard_gadget(&Placement::translation([40, 0, 0]).unwrap()).starting_at(h.latency).unwrap();
        assert!(matches!(compose("x", &h, &far), Err(Error::OffPort(_))));
        let early = hadamard_gadget(&Placement::translation([40, 0, 0]).unwrap());
        assert!(compose("x", &h, &early).is_err());
        assert!(h.clone().starting_at(3).is_err());
    }

    #[test]
    fn fit_places_a_gadget_onto_ports() {
        let h = hadamard_gadget(&origin());
        let p = Placement::new(rotations()[7], [4, 6, -2]).unwrap();
        let moved = hadamard_gadget(&p);
        let fitted = h.fit_inputs(&moved.inputs, 0).unwrap();
        assert_eq!(fitted.scaffold, moved.scaffold);
        assert_eq!(fitted.outputs, moved.outputs);
        let odd = [LogicalQubit::new(0, Cell::new(0, 0, 0), Cell::new(0, 0, 3), [1, 1, 1])];
        assert_eq!(h.fit_inputs(&odd, 0), Err(Error::NoFit));
    }

    #[test]
    fn catalogue_names_resolve() {
        for name in CATALOGUE {
            let g = catalogue_gadget(name, &origin()).unwrap();
            assert!(!g.scaffold.is_empty(), "{name}");
        }
        assert_eq!(catalogue_gadget("nope", &origin()), Err(Error::UnknownGadget));
    }

    #[test]
    fn extraction_rejects_bad_qubit_counts() {
        let h = hadamard_gadget(&origin());
        assert_eq!(extract_gate_matrix(&h, 2, &ScatteringRule::standard()), Err(Error::QubitCount(1, 2)));
    }
}
