use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("operator is not rotation covariant (residual {0:e})")]
    NotCovariant(f64),
    #[error("no hadamard output geometry satisfies the constraints")]
    NoHadamardGeometry,
    #[error("scattering operator failed certification")]
    Uncertified,
    #[error("non-finite amplitude")]
    NonFiniteAmplitude,
    #[error("region has {0} cells, more than the oracle supports")]
    RegionTooLarge(usize),
    #[error("region is not a union of whole blocks of the requested partition")]
    RegionMisaligned,
    #[error("occupied cell lies outside the oracle region")]
    OutsideRegion,
    #[error("anchor is misaligned for this gadget: {0}")]
    MisalignedAnchor(&'static str),
    #[error("placement collision")]
    PlacementCollision,
    #[error("occupancy off the output ports at readout (t = {0})")]
    OffPort(u64),
    #[error("extracted matrix is not unitary (residual {0:e})")]
    NonUnitaryGate(f64),
    #[error("gadget has {0} qubits, expected {1}")]
    QubitCount(usize, usize),
    #[error("unknown gadget")]
    UnknownGadget,
    #[error("no rigid placement maps the gadget's ports onto the requested tracks")]
    NoFit,
    #[error("a crossing gadget needs at least one crossing")]
    NoCrossings,
    #[error("signal reaches an open cavity edge at step {0}")]
    CavityEdge(i64),
    #[error("routing brings a |0> track into a crossing")]
    ZeroTrackCrossing,
    #[error("control loop does not return to its start after {0} steps")]
    LoopPeriodMismatch(u64),
}
