//! Scene files: an initial superposition plus catalogue gadgets merged into
//! every branch.

use qgol_core::block::rotations;
use qgol_core::gadgets::{catalogue_gadget, Gadget, Placement};
use qgol_core::state::{Configuration, Superposition, DEFAULT_PRUNE};
use serde::{Deserialize, Serialize};

use crate::snapshot::{superposition_from, BranchJson};
use crate::{Error, Result};

/// A catalogue gadget instance: `orientation` indexes `block::rotations()`,
/// `anchor` is the (even) translation applied after the rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetSpec {
    pub name: String,
    pub anchor: [i64; 3],
    #[serde(default)]
    pub orientation: usize,
}

impl GadgetSpec {
    pub fn build(&self) -> Result<Gadget> {
        let rots = rotations();
        let r = rots
            .get(self.orientation)
            .ok_or_else(|| Error::invalid(format!("orientation {} is not in 0..24", self.orientation)))?;
        let p = Placement::new(*r, self.anchor)?;
        catalogue_gadget(&self.name, &p).map_err(|e| match e {
            qgol_core::Error::UnknownGadget => Error::invalid(format!("unknown gadget {:?}", self.name)),
            e => e.into(),
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default)]
    branches: Vec<BranchJson>,
    #[serde(default)]
    gadgets: Vec<GadgetSpec>,
    prune: Option<f64>,
    t0: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Scene {
    /// Branches with every gadget's idle cells already merged in.
    pub initial: Superposition,
    pub gadgets: Vec<(GadgetSpec, Gadget)>,
    pub t0: u64,
    pub prune: f64,
}

impl Scene {
    pub fn from_superposition(initial: Superposition) -> Self {
        Scene { initial, gadgets: Vec::new(), t0: 0, prune: DEFAULT_PRUNE }
    }
}

/// Cells of all `specs`, checked pairwise disjoint.
pub fn gadget_cells(specs: &[GadgetSpec]) -> Result<(Configuration, Vec<(GadgetSpec, Gadget)>)> {
    let mut cells = Configuration::empty();
    let mut built = Vec::new();
    for spec in specs {
        let g = spec.build()?;
        let idle = g.idle_cells();
        if !cells.is_disjoint(&idle) {
            return Err(qgol_core::Error::PlacementCollision.into());
        }
        cells = cells.union(&idle);
        built.push((spec.clone(), g));
    }
    Ok((cells, built))
}

/// Strict parse: unknown keys, duplicate cells, non-finite amplitudes and
/// overlapping placements are errors. A scene with gadgets but no branches
/// starts from the gadgets alone.
pub fn parse_scene(bytes: &[u8]) -> Result<Scene> {
    let file: SceneFile = serde_json::from_slice(bytes)?;
    let prune = file.prune.unwrap_or(DEFAULT_PRUNE);
    if !(prune.is_finite() && prune >= 0.0) {
        return Err(Error::invalid("prune must be a finite non-negative number"));
    }
    let mut initial = superposition_from(&file.branches)?;
    let (cells, gadgets) = gadget_cells(&file.gadgets)?;
    if file.branches.is_empty() && !gadgets.is_empty() {
        initial = Superposition::basis(Configuration::empty());
    }
    let initial = initial.overlay(&cells)?;
    Ok(Scene { initial, gadgets, t0: file.t0.unwrap_or(0), prune })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qgol_core::gadgets::hadamard_gadget;
    use qgol_core::state::Cell;

    #[test]
    fn single_signal() {
        let s = parse_scene(br#"{"branches":[{"re":1.0,"im":0.0,"cells":[[0,0,0]]}]}"#).unwrap();
        assert_eq!(s.initial, Superposition::basis(Configuration::new([Cell::new(0, 0, 0)])));
        assert_eq!((s.t0, s.prune), (0, DEFAULT_PRUNE));
    }

    #[test]
    fn hadamard_scaffold_is_merged() {
        let s = parse_scene(br#"{"gadgets":[{"name":"hadamard","anchor":[4,0,-2],"orientation":0}]}"#).unwrap();
        let expected = hadamard_gadget(&Placement::translation([4, 0, -2]).unwrap()).scaffold;
        assert_eq!(s.initial, Superposition::basis(expected));
    }

    #[test]
    fn branch_cells_are_merged_with_gadgets() {
        let s = parse_scene(
            br#"{"branches":[{"re":0.6,"im":0,"cells":[[50,0,0]]},{"re":0,"im":0.8,"cells":[[60,0,0]]}],
                 "gadgets":[{"name":"wall","anchor":[0,0,0]}],"prune":0.0,"t0":3}"#,
        )
        .unwrap();
        assert_eq!(s.initial.len(), 2);
        assert!(s.initial.iter().all(|(c, _)| c.len() == 9));
        assert_eq!((s.t0, s.prune), (3, 0.0));
    }

    #[test]
    fn errors() {
        let collide = br#"{"gadgets":[{"name":"hadamard","anchor":[0,0,0]},{"name":"barrier","anchor":[0,0,0]}]}"#;
        assert_eq!(parse_scene(collide).unwrap_err().to_string(), "placement collision");
        let onto_signal = br#"{"branches":[{"re":1,"im":0,"cells":[[0,0,1]]}],"gadgets":[{"name":"wall","anchor":[0,0,0]}]}"#;
        assert_eq!(parse_scene(onto_signal).unwrap_err().to_string(), "placement collision");
        for bad in [
            &br#"{"branches":[],"bogus":1}"#[..],
            br#"{"gadgets":[{"name":"teleporter","anchor":[0,0,0]}]}"#,
            br#"{"gadgets":[{"name":"wall","anchor":[1,0,0]}]}"#,
            br#"{"gadgets":[{"name":"wall","anchor":[0,0,0],"orientation":24}]}"#,
            br#"{"branches":[{"re":1,"im":0,"cells":[]}],"prune":-1}"#,
            br#"{"branches":[{"re":1e400,"im":0,"cells":[]}]}"#,
            br#"{"branches":"#,
        ] {
            assert!(parse_scene(bad).is_err(), "{}", String::from_utf8_lossy(bad));
        }
    }
}
