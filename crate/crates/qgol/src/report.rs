//! Rule certificate as JSON and the checksum identifying a rule table.

use qgol_core::block::BlockOperator;
use qgol_core::rule::{synthesize_hadamard_geometry, HadamardGeometry, Report, ScatteringRule};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// One line per nonzero entry, `row col re im`, sorted by `(row, col)`.
pub fn export_operator(op: &BlockOperator) -> String {
    op.entries().iter().map(|(r, c, a)| format!("{r} {c} {} {}\n", a.re, a.im)).collect()
}

/// Hex SHA-256 of [`export_operator`].
pub fn operator_checksum(op: &BlockOperator) -> String {
    Sha256::digest(export_operator(op).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub unitarity_residual: f64,
    pub covariance_residual_max: f64,
    pub quiescent_fixed: bool,
    pub class_closure_violations: usize,
    pub class_closure: Value,
    pub lone_signal_moves: bool,
    pub crossing_phase: [f64; 2],
    pub tolerance: f64,
    pub hadamard_candidates: usize,
    pub hadamard_matches_synthesis: bool,
    pub u_checksum: String,
    pub passed: bool,
}

fn closure_json(r: &Report) -> Value {
    r.class_closure
        .iter()
        .map(|(c, imgs)| (c.name().to_string(), json!(imgs.iter().map(|i| i.name()).collect::<Vec<_>>())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

/// Certificate of `rule`, plus a check that its Hadamard geometry is the one
/// the synthesis search picks.
pub fn verify_report(rule: &ScatteringRule) -> VerifyReport {
    let r = rule.report();
    let synthesis = synthesize_hadamard_geometry();
    let (candidates, matches) = match &synthesis {
        Ok(s) => (s.valid.len(), s.chosen == HadamardGeometry::canonical()),
        Err(_) => (0, false),
    };
    VerifyReport {
        unitarity_residual: r.unitarity_residual,
        covariance_residual_max: r.covariance_residual_max,
        quiescent_fixed: r.quiescent_fixed,
        class_closure_violations: r.class_closure_violations,
        class_closure: closure_json(r),
        lone_signal_moves: r.lone_signal_moves,
        crossing_phase: [r.crossing_phase.re, r.crossing_phase.im],
        tolerance: r.tol,
        hadamard_candidates: candidates,
        hadamard_matches_synthesis: matches,
        u_checksum: operator_checksum(rule.operator()),
        passed: r.passed() && matches,
    }
}
