//! Canonical snapshot JSON: cells sorted lexicographically, branches sorted
//! by their cell lists, amplitudes written in shortest round-trip form.

use qgol_core::state::{make_superposition, Cell, Configuration, Superposition};
use qgol_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchJson {
    pub re: f64,
    pub im: f64,
    pub cells: Vec<[i64; 3]>,
}

#[derive(Serialize)]
struct SnapshotOut<'a> {
    branches: &'a [BranchJson],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotIn {
    branches: Vec<BranchJson>,
}

pub fn branches_json(s: &Superposition) -> Vec<BranchJson> {
    s.iter()
        .map(|(conf, a)| BranchJson { re: a.re, im: a.im, cells: conf.cells().iter().map(|c| c.to_array()).collect() })
        .collect()
}

pub fn write_snapshot(s: &Superposition) -> Vec<u8> {
    serde_json::to_vec(&SnapshotOut { branches: &branches_json(s) }).expect("snapshot serializes")
}

/// Builds a superposition from file branches. Duplicate cells inside a
/// branch are rejected; repeated configurations are summed.
pub fn superposition_from(branches: &[BranchJson]) -> Result<Superposition> {
    let mut out = Vec::with_capacity(branches.len());
    for b in branches {
        let conf = Configuration::new(b.cells.iter().map(|c| Cell::from_array(*c)));
        if conf.len() != b.cells.len() {
            return Err(Error::invalid("branch lists a cell twice"));
        }
        out.push((conf, Complex64::new(b.re, b.im)));
    }
    Ok(make_superposition(out)?)
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<Superposition> {
    let file: SnapshotIn = serde_json::from_slice(bytes)?;
    superposition_from(&file.branches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conf(cells: &[[i64; 3]]) -> Configuration {
        Configuration::new(cells.iter().map(|c| Cell::from_array(*c)))
    }

    #[test]
    fn empty_superposition() {
        assert_eq!(write_snapshot(&Superposition::empty()), br#"{"branches":[]}"#);
    }

    #[test]
    fn canonical_order_and_round_trip() {
        let a = (conf(&[[1, 0, 0], [-3, 2, 5]]), Complex64::new(0.1, -1.0 / 3.0));
        let b = (conf(&[[-4, 0, 0]]), Complex64::new(-0.0, std::f64::consts::FRAC_1_SQRT_2));
        let s1 = make_superposition([a.clone(), b.clone()]).unwrap();
        let s2 = make_superposition([b, a]).unwrap();
        let bytes = write_snapshot(&s1);
        assert_eq!(bytes, write_snapshot(&s2));
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with(r#"{"branches":[{"re":-0.0,"im":0.7071067811865476,"cells":[[-4,0,0]]}"#), "{text}");
        assert!(text.contains(r#""cells":[[-3,2,5],[1,0,0]]"#));
        let back = parse_snapshot(&bytes).unwrap();
        for ((c1, x), (c2, y)) in back.iter().zip(s1.iter()) {
            assert_eq!(c1, c2);
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn rejects_unknown_keys_and_duplicates() {
        assert!(parse_snapshot(br#"{"branches":[],"extra":1}"#).is_err());
        assert!(parse_snapshot(br#"{"branches":[{"re":1,"im":0,"cells":[],"w":2}]}"#).is_err());
        assert!(parse_snapshot(br#"{"branches":[{"re":1,"im":0,"cells":[[0,0,0],[0,0,0]]}]}"#).is_err());
        assert!(parse_snapshot(br#"{"branches":[{"re":1e999,"im":0,"cells":[]}]}"#).is_err());
    }
}
