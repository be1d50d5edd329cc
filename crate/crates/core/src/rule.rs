//! The scattering unitary: classification of the 256 block states into rule
//! classes, synthesis of the Hadamard output geometry, construction of the
//! operator and its certification.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::block::{
    apply_rotation, invert, rotations, BlockOperator, BlockState, LocalCell, Rotation,
};
use crate::Error;

/// Residual tolerance used for every operator certificate.
pub const OPERATOR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleClass {
    Empty,
    LoneSignal,
    Barrier,
    FaceDiagonalPair,
    AntipodalPair,
    Wall,
    WallWithFaceSignal,
    HadamardZeroInput,
    HadamardOneInput,
    Default,
}

impl RuleClass {
    pub const ALL: [RuleClass; 10] = [
        RuleClass::Empty,
        RuleClass::LoneSignal,
        RuleClass::Barrier,
        RuleClass::FaceDiagonalPair,
        RuleClass::AntipodalPair,
        RuleClass::Wall,
        RuleClass::WallWithFaceSignal,
        RuleClass::HadamardZeroInput,
        RuleClass::HadamardOneInput,
        RuleClass::Default,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleClass::Empty => "empty",
            RuleClass::LoneSignal => "lone_signal",
            RuleClass::Barrier => "barrier",
            RuleClass::FaceDiagonalPair => "face_diagonal_pair",
            RuleClass::AntipodalPair => "antipodal_pair",
            RuleClass::Wall => "wall",
            RuleClass::WallWithFaceSignal => "wall_with_face_signal",
            RuleClass::HadamardZeroInput => "hadamard_zero_input",
            RuleClass::HadamardOneInput => "hadamard_one_input",
            RuleClass::Default => "default",
        }
    }

    /// Canonical representative, for classes that have one.
    pub fn canonical(self) -> Option<BlockState> {
        let c = LocalCell::new;
        let state = match self {
            RuleClass::LoneSignal => BlockState::from_cells([c(0, 0, 0)]),
            RuleClass::Barrier => BlockState::from_cells([c(0, 0, 0), c(1, 0, 0)]),
            RuleClass::FaceDiagonalPair => BlockState::from_cells([c(0, 0, 0), c(1, 1, 0)]),
            RuleClass::AntipodalPair => BlockState::from_cells([c(0, 0, 0), c(1, 1, 1)]),
            RuleClass::Wall => face_mask(0, 0),
            RuleClass::WallWithFaceSignal => BlockState(face_mask(0, 0).0 | (1 << c(1, 0, 0).index())),
            RuleClass::HadamardZeroInput => HADAMARD_INPUT_ZERO,
            RuleClass::HadamardOneInput => HADAMARD_INPUT_ONE,
            RuleClass::Empty | RuleClass::Default => return None,
        };
        Some(state)
    }
}

/// Result of [`classify`]: the class and, when the class has a canonical
/// representative, the first rotation (in [`rotations`] order) mapping that
/// representative onto the classified state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: RuleClass,
    pub orientation: Option<Rotation>,
}

/// Cells with coordinate `axis` equal to `side`.
pub fn face_mask(axis: usize, side: u8) -> BlockState {
    BlockState::from_cells(LocalCell::all().filter(|c| c.coords()[axis] == side))
}

/// The face of a state that is completely occupied, if any, as `(axis, side)`.
fn full_face(s: BlockState) -> Option<(usize, u8)> {
    (0..3)
        .flat_map(|axis| [(axis, 0u8), (axis, 1u8)])
        .find(|&(axis, side)| {
            let f = face_mask(axis, side).0;
            s.0 & f == f
        })
}

/// Barrier `{(0,0,0),(1,0,0)}` plus the top of the L at `(0,1,0)`.
pub const HADAMARD_INPUT_ZERO: BlockState = BlockState(0b0000_0111);
/// Barrier along the bottom of the near face plus a lone cell at the top
/// left of the far face, `(0,1,1)`.
pub const HADAMARD_INPUT_ONE: BlockState = BlockState(0b0100_0011);
/// The two-cell barrier shared by both Hadamard inputs.
pub const HADAMARD_BARRIER: BlockState = BlockState(0b0000_0011);

fn orbit_rotation(canonical: BlockState, s: BlockState, rots: &[Rotation]) -> Option<Rotation> {
    rots.iter().copied().find(|r| apply_rotation(r, canonical) == s)
}

pub fn classify(s: BlockState) -> Classification {
    classify_with(s, &rotations())
}

fn classify_with(s: BlockState, rots: &[Rotation]) -> Classification {
    let cells: Vec<LocalCell> = s.cells().collect();
    let class = match cells.len() {
        0 => RuleClass::Empty,
        1 => RuleClass::LoneSignal,
        2 => match cells[0].distance(cells[1]) {
            1 => RuleClass::Barrier,
            2 => RuleClass::FaceDiagonalPair,
            _ => RuleClass::AntipodalPair,
        },
        3 => {
            if orbit_rotation(HADAMARD_INPUT_ZERO, s, rots).is_some() {
                RuleClass::HadamardZeroInput
            } else if orbit_rotation(HADAMARD_INPUT_ONE, s, rots).is_some() {
                RuleClass::HadamardOneInput
            } else {
                RuleClass::Default
            }
        }
        4 if full_face(s).is_some() => RuleClass::Wall,
        // A fifth cell next to a full face is always on the opposite face and
        // shares a face with exactly one wall cell.
        5 if full_face(s).is_some() => RuleClass::WallWithFaceSignal,
        _ => RuleClass::Default,
    };
    let orientation = class.canonical().and_then(|c| orbit_rotation(c, s, rots));
    Classification { class, orientation }
}

/// Pattern map of the Hadamard rule in its canonical orientation:
/// `U |input_j> = sum_i amplitudes[i][j] |output_i>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardGeometry {
    pub input0: BlockState,
    pub input1: BlockState,
    pub output0: BlockState,
    pub output1: BlockState,
    pub amplitudes: [[Complex64; 2]; 2],
}

fn hadamard_table() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

impl HadamardGeometry {
    /// Output signals leave from `(1,1,0)` (an L again) for `|0>` and from
    /// `(1,1,1)` (a dislocated L) for `|1>`. This is the least assignment
    /// found by [`synthesize_hadamard_geometry`].
    pub fn canonical() -> Self {
        Self::with_outputs(LocalCell::new(1, 1, 0), LocalCell::new(1, 1, 1))
    }

    pub fn with_outputs(signal0: LocalCell, signal1: LocalCell) -> Self {
        HadamardGeometry {
            input0: HADAMARD_INPUT_ZERO,
            input1: HADAMARD_INPUT_ONE,
            output0: BlockState(HADAMARD_BARRIER.0 | 1 << signal0.index()),
            output1: BlockState(HADAMARD_BARRIER.0 | 1 << signal1.index()),
            amplitudes: hadamard_table(),
        }
    }

    /// Same pattern map with the amplitudes replaced.
    pub fn with_amplitudes(mut self, amplitudes: [[Complex64; 2]; 2]) -> Self {
        self.amplitudes = amplitudes;
        self
    }

    pub fn output_signal(&self, bit: usize) -> LocalCell {
        let out = if bit == 0 { self.output0 } else { self.output1 };
        BlockState(out.0 & !HADAMARD_BARRIER.0).cells().next().expect("output has a signal")
    }
}

/// Rule parameters other than the geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleParams {
    pub hadamard: HadamardGeometry,
    /// Amplitude picked up by two signals crossing on a block face.
    pub crossing_phase: Complex64,
}

impl RuleParams {
    pub fn new(hadamard: HadamardGeometry) -> Self {
        RuleParams { hadamard, crossing_phase: Complex64::from_polar(1.0, FRAC_PI_4) }
    }
}

fn bounce(s: BlockState) -> BlockState {
    let (axis, side) = full_face(s).expect("wall with signal has a full face");
    let wall = face_mask(axis, side);
    let signal = BlockState(s.0 & !wall.0).cells().next().expect("one signal");
    let mut c = signal.coords();
    for (a, v) in c.iter_mut().enumerate() {
        if a != axis {
            *v = 1 - *v;
        }
    }
    BlockState(wall.0 | 1 << LocalCell::new(c[0], c[1], c[2]).index())
}

/// Builds the 256x256 scattering operator class by class and certifies it.
pub fn build_scattering_unitary(g: &HadamardGeometry) -> Result<BlockOperator, Error> {
    let op = build_operator(&RuleParams::new(*g));
    let report = verify_scattering_unitary(&op);
    if !report.unitary() {
        return Err(Error::NotUnitary(report.unitarity_residual));
    }
    if !report.covariant() {
        return Err(Error::NotCovariant(report.covariance_residual_max));
    }
    Ok(op)
}

/// Builds the operator without certifying it.
pub fn build_operator(params: &RuleParams) -> BlockOperator {
    let rots = rotations();
    let one = Complex64::new(1.0, 0.0);
    let g = &params.hadamard;
    BlockOperator::from_columns(|s| {
        let c = classify_with(s, &rots);
        match c.class {
            RuleClass::Empty | RuleClass::Barrier | RuleClass::AntipodalPair | RuleClass::Wall => {
                alloc::vec![(s, one)]
            }
            RuleClass::LoneSignal | RuleClass::Default => alloc::vec![(invert(s), one)],
            RuleClass::FaceDiagonalPair => alloc::vec![(invert(s), params.crossing_phase)],
            RuleClass::WallWithFaceSignal => alloc::vec![(bounce(s), one)],
            RuleClass::HadamardZeroInput | RuleClass::HadamardOneInput => {
                let j = usize::from(c.class == RuleClass::HadamardOneInput);
                let r = c.orientation.expect("hadamard states have an orientation");
                alloc::vec![
                    (apply_rotation(&r, g.output0), g.amplitudes[0][j]),
                    (apply_rotation(&r, g.output1), g.amplitudes[1][j]),
                ]
            }
        }
    })
}

/// All Hadamard geometries passing the synthesis constraints, least first.
#[derive(Clone, Debug)]
pub struct HadamardSynthesis {
    pub chosen: HadamardGeometry,
    pub valid: Vec<HadamardGeometry>,
}

/// Searches every placement of the two output signals outside the barrier
/// and keeps those where: the outputs differ; the operator is unitary and
/// rotation covariant; every rotation fixing a canonical input also fixes
/// the outputs; both outputs sit on the barrier-axis face opposite the one
/// holding the input signals. Candidates are ordered by
/// `(output0 cell index, output1 cell index)`.
pub fn synthesize_hadamard_geometry() -> Result<HadamardSynthesis, Error> {
    let rots = rotations();
    let free: Vec<LocalCell> = LocalCell::all().filter(|c| !HADAMARD_BARRIER.contains(*c)).collect();
    // Both input signals, (0,1,0) and (0,1,1), lie on x = 0; the barrier runs along x.
    let far_side = |c: LocalCell| c.x() == 1;
    let mut valid = Vec::new();
    for &s0 in &free {
        for &s1 in &free {
            if s0 == s1 || !far_side(s0) || !far_side(s1) {
                continue;
            }
            let g = HadamardGeometry::with_outputs(s0, s1);
            let stabilizer_ok = [g.input0, g.input1].iter().all(|input| {
                rots.iter().filter(|r| apply_rotation(r, *input) == *input).all(|r| {
                    apply_rotation(r, g.output0) == g.output0 && apply_rotation(r, g.output1) == g.output1
                })
            });
            if !stabilizer_ok {
                continue;
            }
            if build_scattering_unitary(&g).is_ok() {
                log::info!("valid hadamard outputs: |0> -> {:?}, |1> -> {:?}", s0.coords(), s1.coords());
                valid.push(g);
            }
        }
    }
    let chosen = *valid.first().ok_or(Error::NoHadamardGeometry)?;
    Ok(HadamardSynthesis { chosen, valid })
}

/// Certificate of a block operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub unitarity_residual: f64,
    pub covariance_residual_max: f64,
    pub quiescent_fixed: bool,
    /// For each class, the classes its image states fall into.
    pub class_closure: Vec<(RuleClass, BTreeSet<RuleClass>)>,
    pub class_closure_violations: usize,
    /// `U |{(0,0,0)}> = |{(1,1,1)}>`.
    pub lone_signal_moves: bool,
    /// Amplitude of `U |{(0,0,0),(1,1,0)}>` on `|{(0,0,1),(1,1,1)}>`.
    pub crossing_phase: Complex64,
    pub tol: f64,
}

fn allowed_images(class: RuleClass) -> &'static [RuleClass] {
    match class {
        RuleClass::HadamardZeroInput | RuleClass::HadamardOneInput => {
            &[RuleClass::HadamardZeroInput, RuleClass::HadamardOneInput]
        }
        RuleClass::Empty => &[RuleClass::Empty],
        RuleClass::LoneSignal => &[RuleClass::LoneSignal],
        RuleClass::Barrier => &[RuleClass::Barrier],
        RuleClass::FaceDiagonalPair => &[RuleClass::FaceDiagonalPair],
        RuleClass::AntipodalPair => &[RuleClass::AntipodalPair],
        RuleClass::Wall => &[RuleClass::Wall],
        RuleClass::WallWithFaceSignal => &[RuleClass::WallWithFaceSignal],
        RuleClass::Default => &[RuleClass::Default],
    }
}

impl Report {
    pub fn unitary(&self) -> bool {
        self.unitarity_residual <= self.tol
    }

    pub fn covariant(&self) -> bool {
        self.covariance_residual_max <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.unitary()
            && self.covariant()
            && self.quiescent_fixed
            && self.class_closure_violations == 0
            && self.lone_signal_moves
    }
}

pub fn verify_scattering_unitary(op: &BlockOperator) -> Report {
    let rots = rotations();
    let unitarity_residual = if op.is_finite() { op.unitarity_residual() } else { f64::INFINITY };
    let covariance_residual_max = rots.iter().map(|r| op.commutator_residual(r)).fold(0.0, f64::max);
    let quiescent_fixed = op.column(BlockState::EMPTY) == [(BlockState::EMPTY, Complex64::new(1.0, 0.0))];

    let classes: Vec<RuleClass> = BlockState::all().map(|s| classify_with(s, &rots).class).collect();
    let mut class_closure: Vec<(RuleClass, BTreeSet<RuleClass>)> =
        RuleClass::ALL.iter().map(|c| (*c, BTreeSet::new())).collect();
    for s in BlockState::all() {
        let from = classes[s.0 as usize];
        let slot = &mut class_closure.iter_mut().find(|(c, _)| *c == from).expect("class listed").1;
        for (row, _) in op.column(s) {
            slot.insert(classes[row.0 as usize]);
        }
    }
    let class_closure_violations = class_closure
        .iter()
        .map(|(c, imgs)| imgs.iter().filter(|i| !allowed_images(*c).contains(i)).count())
        .sum();

    let lone = RuleClass::LoneSignal.canonical().expect("canonical");
    let lone_signal_moves = op.column(lone) == [(invert(lone), Complex64::new(1.0, 0.0))];
    let pair = RuleClass::FaceDiagonalPair.canonical().expect("canonical");
    let crossing_phase = op.entry(invert(pair), pair);

    Report {
        unitarity_residual,
        covariance_residual_max,
        quiescent_fixed,
        class_closure,
        class_closure_violations,
        lone_signal_moves,
        crossing_phase,
        tol: OPERATOR_TOL,
    }
}

/// A scattering operator that has passed [`verify_scattering_unitary`].
/// Evolution only accepts operators wrapped in this type.
#[derive(Clone, Debug)]
pub struct ScatteringRule {
    op: BlockOperator,
    report: Report,
}

impl ScatteringRule {
    pub fn certify(op: BlockOperator) -> Result<Self, Error> {
        let report = verify_scattering_unitary(&op);
        if !report.passed() {
            return Err(Error::Uncertified);
        }
        Ok(ScatteringRule { op, report })
    }

    /// The rule with the frozen canonical Hadamard geometry.
    pub fn standard() -> Self {
        Self::from_params(&RuleParams::new(HadamardGeometry::canonical())).expect("standard rule certifies")
    }

    pub fn from_params(params: &RuleParams) -> Result<Self, Error> {
        Self::certify(build_operator(params))
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn report(&self) -> &Report {
        &self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::operator_is_unitary;

    fn st(cells: &[(u8, u8, u8)]) -> BlockState {
        BlockState::from_cells(cells.iter().map(|&(x, y, z)| LocalCell::new(x, y, z)))
    }

    fn amp(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-12
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(BlockState::EMPTY).class, RuleClass::Empty);
        assert_eq!(classify(st(&[(0, 0, 0), (1, 0, 0)])).class, RuleClass::Barrier);
        assert_eq!(classify(st(&[(0, 0, 0), (1, 1, 0)])).class, RuleClass::FaceDiagonalPair);
        assert_eq!(classify(st(&[(0, 0, 0), (1, 1, 1)])).class, RuleClass::AntipodalPair);
        assert_eq!(classify(face_mask(0, 0)).class, RuleClass::Wall);
        assert_eq!(classify(BlockState::FULL).class, RuleClass::Default);
        assert_eq!(classify(st(&[(0, 0, 0), (1, 0, 0), (0, 1, 0)])).class, RuleClass::HadamardZeroInput);
        assert_eq!(classify(st(&[(0, 0, 0), (1, 0, 0), (0, 1, 1)])).class, RuleClass::HadamardOneInput);
        // Three mutually face-diagonal cells around a corner.
        assert_eq!(classify(st(&[(1, 0, 0), (0, 1, 0), (0, 0, 1)])).class, RuleClass::Default);
    }

    #[test]
    fn class_populations() {
        // Brute-force counts by direct geometric predicates, independent of classify.
        let mut counts = [0usize; 6];
        for s in BlockState::all() {
            let cells: Vec<LocalCell> = s.cells().collect();
            match cells.len() {
                0 => counts[0] += 1,
                1 => counts[1] += 1,
                2 => counts[1 + cells[0].distance(cells[1]) as usize] += 1,
                4 => {
                    let same_axis = (0..3).any(|a| cells.iter().all(|c| c.coords()[a] == cells[0].coords()[a]));
                    if same_axis {
                        counts[5] += 1;
                    }
                }
                _ => {}
            }
        }
        assert_eq!(counts, [1, 8, 12, 12, 4, 6]);

        let mut by_class = alloc::collections::BTreeMap::new();
        for s in BlockState::all() {
            *by_class.entry(classify(s).class).or_insert(0usize) += 1;
        }
        let expect = [
            (RuleClass::Empty, 1),
            (RuleClass::LoneSignal, 8),
            (RuleClass::Barrier, 12),
            (RuleClass::FaceDiagonalPair, 12),
            (RuleClass::AntipodalPair, 4),
            (RuleClass::Wall, 6),
            (RuleClass::WallWithFaceSignal, 24),
            (RuleClass::HadamardZeroInput, 24),
            (RuleClass::HadamardOneInput, 24),
            (RuleClass::Default, 141),
        ];
        for (c, n) in expect {
            assert_eq!(by_class[&c], n, "{c:?}");
        }
    }

    #[test]
    fn classification_is_rotation_invariant() {
        let rots = rotations();
        for s in BlockState::all() {
            let c = classify(s);
            if let (Some(rep), Some(r)) = (c.class.canonical(), c.orientation) {
                assert_eq!(apply_rotation(&r, rep), s);
            }
            for r in &rots {
                assert_eq!(classify(apply_rotation(r, s)).class, c.class);
            }
        }
    }

    #[test]
    fn synthesis_returns_the_frozen_geometry() {
        let syn = synthesize_hadamard_geometry().unwrap();
        assert_eq!(syn.chosen, HadamardGeometry::canonical());
        assert_eq!(syn.valid.len(), 4);
        for g in &syn.valid {
            assert!(build_scattering_unitary(g).is_ok());
            assert_ne!(g.output0, g.output1);
            assert_eq!(g.output0.0 & HADAMARD_BARRIER.0, HADAMARD_BARRIER.0);
        }
        // Input patterns match the prose: an L on one face, and a lone far-face cell.
        let g = syn.chosen;
        assert_eq!(g.input0.popcount(), 3);
        assert!((0..3).any(|a| g.input0.cells().all(|c| c.coords()[a] == 0)));
        assert!(g.input1.contains(LocalCell::new(0, 1, 1)));
        assert!(!g.input1.contains(LocalCell::new(0, 0, 1)));
    }

    #[test]
    fn same_orbit_outputs_are_rejected() {
        // Both outputs are Ls: images of the two input orbits collide.
        let g = HadamardGeometry::with_outputs(LocalCell::new(1, 1, 0), LocalCell::new(1, 0, 1));
        assert!(matches!(build_scattering_unitary(&g), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn standard_rule_examples() {
        let rule = ScatteringRule::standard();
        let u = rule.operator();
        assert_eq!(u.column(BlockState::EMPTY), [(BlockState::EMPTY, amp(1.0, 0.0))]);
        assert_eq!(u.column(st(&[(0, 0, 0)])), [(st(&[(1, 1, 1)]), amp(1.0, 0.0))]);

        let crossed = u.column(st(&[(0, 0, 0), (1, 1, 0)]));
        assert_eq!(crossed.len(), 1);
        assert_eq!(crossed[0].0, st(&[(1, 1, 1), (0, 0, 1)]));
        assert!(close(crossed[0].1, Complex64::from_polar(1.0, FRAC_PI_4)));

        let g = HadamardGeometry::canonical();
        let h = FRAC_1_SQRT_2;
        let zero = u.column(g.input0);
        let one = u.column(g.input1);
        let find = |col: &[(BlockState, Complex64)], s: BlockState| col.iter().find(|(r, _)| *r == s).unwrap().1;
        assert!(close(find(zero, g.output0), amp(h, 0.0)));
        assert!(close(find(zero, g.output1), amp(h, 0.0)));
        assert!(close(find(one, g.output0), amp(h, 0.0)));
        assert!(close(find(one, g.output1), amp(-h, 0.0)));

        // Wall on x = 0, signal at (1,0,0) -> (1,1,1).
        let wall = face_mask(0, 0);
        let input = BlockState(wall.0 | 1 << LocalCell::new(1, 0, 0).index());
        let output = BlockState(wall.0 | 1 << LocalCell::new(1, 1, 1).index());
        assert_eq!(u.column(input), [(output, amp(1.0, 0.0))]);

        // Antipodal pairs and the full block are fixed as sets.
        let anti = st(&[(0, 0, 0), (1, 1, 1)]);
        assert_eq!(u.column(anti), [(anti, amp(1.0, 0.0))]);
        assert_eq!(u.column(BlockState::FULL), [(BlockState::FULL, amp(1.0, 0.0))]);
    }

    #[test]
    fn standard_rule_certificate() {
        let report = verify_scattering_unitary(ScatteringRule::standard().operator());
        assert!(report.passed(), "{report:?}");
        assert!(report.unitarity_residual <= 1e-12);
        assert!(report.covariance_residual_max <= 1e-12);
        assert!(close(report.crossing_phase, Complex64::from_polar(1.0, FRAC_PI_4)));
    }

    #[test]
    fn identity_operator_fails_only_the_motion_check() {
        let report = verify_scattering_unitary(&BlockOperator::identity());
        assert!(report.unitary() && report.covariant() && report.quiescent_fixed);
        assert!(!report.lone_signal_moves);
        assert!(!report.passed());
        assert!(matches!(ScatteringRule::certify(BlockOperator::identity()), Err(Error::Uncertified)));
    }

    #[test]
    fn altered_crossing_phase_is_recorded() {
        let mut params = RuleParams::new(HadamardGeometry::canonical());
        params.crossing_phase = Complex64::from_polar(1.0, core::f64::consts::PI / 3.0);
        let op = build_operator(&params);
        let report = verify_scattering_unitary(&op);
        assert!(report.passed());
        assert!(close(report.crossing_phase, params.crossing_phase));
    }

    #[test]
    fn plain_parameters_give_a_permutation() {
        let one = amp(1.0, 0.0);
        let zero = amp(0.0, 0.0);
        let params = RuleParams {
            hadamard: HadamardGeometry::canonical().with_amplitudes([[one, zero], [zero, one]]),
            crossing_phase: one,
        };
        let op = build_operator(&params);
        assert!(operator_is_unitary(&op, 1e-12));
        for s in BlockState::all() {
            let col = op.column(s);
            assert_eq!(col.len(), 1);
            assert_eq!(col[0].1, one);
            if s.popcount() == 1 {
                assert_eq!(op.column(col[0].0), [(s, one)]);
            }
        }
    }
}
