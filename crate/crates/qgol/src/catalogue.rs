//! The gadget catalogue as JSON: cells, ports and latency of every entry in
//! its canonical frame, and the layout constants they are built from.

use qgol_core::gadgets::{catalogue_gadget, Gadget, LogicalQubit, Placement, CATALOGUE, CAVITY_SIZE, LOOP_LEG, TRACK_SPACING};
use qgol_core::state::Configuration;
use serde_json::{json, Value};

use crate::Result;

fn cells(c: &Configuration) -> Value {
    json!(c.cells().iter().map(|c| c.to_array()).collect::<Vec<_>>())
}

fn ports(qs: &[LogicalQubit]) -> Value {
    qs.iter()
        .map(|q| {
            json!({
                "id": q.id,
                "track0": q.track0.anchor.to_array(),
                "track1": q.track1.anchor.to_array(),
                "direction": q.track0.direction,
            })
        })
        .collect()
}

pub fn gadget_json(g: &Gadget) -> Value {
    json!({
        "name": g.name,
        "start": g.start,
        "latency": g.latency,
        "scaffold": cells(&g.scaffold),
        "control": cells(&g.control),
        "inputs": ports(&g.inputs),
        "outputs": ports(&g.outputs),
    })
}

pub fn catalogue_json() -> Result<Value> {
    let origin = Placement::translation([0; 3])?;
    let mut gadgets = Vec::new();
    for name in CATALOGUE {
        let mut g = gadget_json(&catalogue_gadget(name, &origin)?);
        // Entries are keyed by catalogue name; composites carry their own.
        g["name"] = json!(name);
        gadgets.push(g);
    }
    Ok(json!({
        "constants": { "track_spacing": TRACK_SPACING, "cavity_size": CAVITY_SIZE, "loop_leg": LOOP_LEG },
        "gadgets": gadgets,
    }))
}
