//! Trajectory export: `step_%06d.json` snapshots plus `manifest.json`.

use std::fs;
use std::path::Path;

use qgol_core::evolution::SimClock;
use qgol_core::state::Superposition;
use serde::{Deserialize, Serialize};

use crate::driver::Driver;
use crate::report::operator_checksum;
use crate::scene::Scene;
use crate::snapshot::write_snapshot;
use crate::{Error, Result};

pub const PARITY_CONVENTION: &str =
    "step from even t uses blocks with corners in 2Z^3; step from odd t uses corners in 2Z^3+(1,1,1)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub steps: u64,
    pub snapshot_every: u64,
    pub t0: u64,
    pub parity_convention: String,
    pub prune: f64,
    pub u_checksum: String,
    pub snapshots: Vec<String>,
}

impl Manifest {
    /// Fails when the trajectory was produced by a different rule table.
    pub fn check_rule(&self, driver: &Driver) -> Result<()> {
        let ours = operator_checksum(driver.rule.operator());
        if self.u_checksum != ours {
            return Err(Error::invalid(format!("rule checksum mismatch: file {}, ours {ours}", self.u_checksum)));
        }
        Ok(())
    }
}

pub fn snapshot_name(step: u64) -> String {
    format!("step_{step:06}.json")
}

/// Runs `steps` steps from the scene's initial state, keeping the snapshot
/// after every `every`-th step as well as the first and last.
pub fn simulate(scene: &Scene, steps: u64, every: u64, driver: &Driver) -> Result<(Manifest, Vec<(u64, Superposition)>)> {
    if every == 0 {
        return Err(Error::invalid("snapshot interval must be positive"));
    }
    let mut clock = SimClock::new(scene.t0);
    let mut cur = scene.initial.clone();
    let mut kept = vec![(0, cur.clone())];
    for n in 1..=steps {
        cur = driver.step(&cur, clock.parity());
        clock.t += 1;
        if n % every == 0 || n == steps {
            kept.push((n, cur.clone()));
        }
    }
    let manifest = Manifest {
        steps,
        snapshot_every: every,
        t0: scene.t0,
        parity_convention: PARITY_CONVENTION.into(),
        prune: driver.options.prune,
        u_checksum: operator_checksum(driver.rule.operator()),
        snapshots: kept.iter().map(|(n, _)| snapshot_name(*n)).collect(),
    };
    Ok((manifest, kept))
}

pub fn write_trajectory(dir: &Path, scene: &Scene, steps: u64, every: u64, driver: &Driver) -> Result<Manifest> {
    let (manifest, kept) = simulate(scene, steps, every, driver)?;
    fs::create_dir_all(dir)?;
    for (n, s) in &kept {
        fs::write(dir.join(snapshot_name(*n)), write_snapshot(s))?;
    }
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    fs::write(dir.join("manifest.json"), bytes)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    Ok(serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?)
}
