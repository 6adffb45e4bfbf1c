//! JSON document form of an encoding.
//!
//! Generators are listed as sparse strings `cell(dx,dy):local:letter`, one
//! per non-identity qubit. Unknown fields are rejected. Importing a document
//! validates the encoding and fails with the violation list if it does not.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{validate, Distance, EncodingCandidate, Metrics};
use crate::error::{Error, Result};
use crate::fermion::GeneratorId;
use crate::lattice::{Cell, CellPauli, EdgeSet, Scheme, UnitCellLayout};
use crate::symplectic::{Letter, PauliWord};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDoc {
    pub scheme: Scheme,
    pub edge_set: EdgeSet,
    pub qubits_per_cell: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsDoc {
    pub distance: u32,
    pub distance_exact: bool,
    pub max_stab_weight: usize,
    pub sigma_nn: f64,
    pub sigma_nnn: f64,
    pub qubit_ratio: f64,
    /// Weight per logical term label.
    pub terms: BTreeMap<String, usize>,
}

impl MetricsDoc {
    pub fn of(m: &Metrics) -> Self {
        MetricsDoc {
            distance: m.distance.value(),
            distance_exact: m.distance.is_exact(),
            max_stab_weight: m.max_stab_weight,
            sigma_nn: m.sigma_nn.value(),
            sigma_nnn: m.sigma_nnn.value(),
            qubit_ratio: m.qubit_ratio,
            terms: m.terms.iter().map(|t| (t.label.clone(), t.weight)).collect(),
        }
    }

    pub fn distance(&self) -> Distance {
        if self.distance_exact {
            Distance::Exact(self.distance)
        } else {
            Distance::LowerBound(self.distance)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Clifford gate sequence, in application order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingDocument {
    pub schema_version: String,
    pub layout: LayoutDoc,
    pub generators: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Sparse form of a window word.
pub fn word_to_sparse(w: &PauliWord, layout: &UnitCellLayout) -> Vec<String> {
    CellPauli::from_window(w, layout)
        .qubits()
        .map(|(c, l, letter)| format!("cell({},{}):{l}:{letter}", c.x, c.y))
        .collect()
}

fn parse_entry(s: &str) -> Result<(Cell, usize, Letter)> {
    let bad = |why: &str| Error::Document(format!("bad qubit entry {s:?}: {why}"));
    let rest = s.trim().strip_prefix("cell(").ok_or_else(|| bad("expected cell(dx,dy)"))?;
    let (coords, rest) = rest.split_once(')').ok_or_else(|| bad("missing ')'"))?;
    let (dx, dy) = coords.split_once(',').ok_or_else(|| bad("expected two coordinates"))?;
    let dx: i32 = dx.trim().parse().map_err(|_| bad("bad dx"))?;
    let dy: i32 = dy.trim().parse().map_err(|_| bad("bad dy"))?;
    let mut parts = rest.strip_prefix(':').ok_or_else(|| bad("expected ':'"))?.split(':');
    let local: usize = parts.next().unwrap_or("").parse().map_err(|_| bad("bad local index"))?;
    let letter = match (parts.next(), parts.next()) {
        (Some(l), None) if l.len() == 1 => Letter::from_char(l.chars().next().expect("one char")),
        _ => None,
    }
    .filter(|&l| l != Letter::I)
    .ok_or_else(|| bad("letter must be X, Y or Z"))?;
    Ok((Cell::new(dx, dy), local, letter))
}

/// Parse a sparse list into a window word.
pub fn sparse_to_word(entries: &[String], layout: &UnitCellLayout) -> Result<PauliWord> {
    let mut w = PauliWord::identity(layout.n_slots());
    for e in entries {
        let (cell, local, letter) = parse_entry(e)?;
        if !cell.in_window() {
            return Err(Error::OutsideWindow(cell.x, cell.y));
        }
        let slot = layout
            .slot_at(cell, local)
            .ok_or_else(|| Error::Document(format!("local index {local} out of range in {e:?}")))?;
        if w.letter(slot) != Letter::I {
            return Err(Error::Document(format!("qubit listed twice: {e:?}")));
        }
        w.set(slot, letter)?;
    }
    Ok(w)
}

impl EncodingDocument {
    pub fn from_encoding(enc: &EncodingCandidate, metrics: Option<&Metrics>, provenance: Option<Provenance>) -> Self {
        let layout = enc.layout();
        EncodingDocument {
            schema_version: SCHEMA_VERSION.into(),
            layout: LayoutDoc {
                scheme: layout.scheme(),
                edge_set: layout.edge_set(),
                qubits_per_cell: layout.qubits_per_cell(),
            },
            generators: enc
                .generators()
                .iter()
                .map(|(g, w)| (g.to_string(), word_to_sparse(w, layout)))
                .collect(),
            metrics: metrics.map(MetricsDoc::of),
            provenance,
        }
    }

    pub fn layout(&self) -> Result<UnitCellLayout> {
        UnitCellLayout::new(self.layout.qubits_per_cell, self.layout.scheme, self.layout.edge_set)
    }

    /// Build the candidate without validating it.
    pub fn to_candidate(&self) -> Result<EncodingCandidate> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Document(format!(
                "unsupported schema_version {:?} (expected {SCHEMA_VERSION:?})",
                self.schema_version
            )));
        }
        let layout = self.layout()?;
        let gens = self
            .generators
            .iter()
            .map(|(name, entries)| {
                let g = GeneratorId::from_str(name)?;
                Ok((g, sparse_to_word(entries, &layout)?))
            })
            .collect::<Result<Vec<_>>>()?;
        EncodingCandidate::new(layout, gens)
    }

    /// Build and validate.
    pub fn import(&self) -> Result<EncodingCandidate> {
        let enc = self.to_candidate()?;
        validate(&enc).map_err(Error::Invalid)?;
        Ok(enc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceBudget;
    use crate::encoding::compute_metrics;
    use crate::fixtures;

    fn masks(enc: &EncodingCandidate) -> Vec<(u64, u64)> {
        enc.generators().values().map(|w| (w.x_mask(), w.z_mask())).collect()
    }

    #[test]
    fn round_trip_preserves_masks_metrics_stabilizers() {
        for enc in [fixtures::jordan_wigner_chain(), fixtures::edge_qubit_square()] {
            let m = compute_metrics(&enc, &DistanceBudget::new(3)).unwrap();
            let doc = EncodingDocument::from_encoding(&enc, Some(&m), None);
            let back = EncodingDocument::from_json(&doc.to_json_pretty()).unwrap();
            assert_eq!(back, doc);
            let enc2 = back.import().unwrap();
            assert_eq!(masks(&enc2), masks(&enc));
            assert_eq!(enc2.stabilizers(), enc.stabilizers());
            assert_eq!(compute_metrics(&enc2, &DistanceBudget::new(3)).unwrap(), m);
        }
    }

    #[test]
    fn sparse_format() {
        let enc = fixtures::jordan_wigner_chain();
        let doc = EncodingDocument::from_encoding(&enc, None, None);
        assert_eq!(doc.generators["vertex/0"], vec!["cell(0,0):0:Z"]);
        assert_eq!(doc.generators["right/0"], vec!["cell(0,0):0:Y", "cell(1,0):0:X"]);
    }

    #[test]
    fn strict_and_validating_import() {
        let doc = EncodingDocument::from_encoding(&fixtures::jordan_wigner_chain(), None, None);
        let mut v = serde_json::to_value(&doc).unwrap();
        v["extra"] = 1.into();
        assert!(EncodingDocument::from_json(&v.to_string()).is_err());

        let mut bad = doc.clone();
        bad.generators.insert("right/0".into(), vec!["cell(0,0):0:X".into()]);
        assert!(matches!(bad.import(), Err(Error::Invalid(v)) if !v.is_empty()));

        let mut ver = doc.clone();
        ver.schema_version = "0".into();
        assert!(ver.import().is_err());

        for e in ["cell(2,0):0:Z", "cell(0,0):1:Z", "cell(0,0):0:I", "cel(0,0):0:Z", "cell(0,0):0"] {
            let mut d = doc.clone();
            d.generators.insert("vertex/0".into(), vec![e.into()]);
            assert!(d.to_candidate().is_err(), "{e}");
        }
    }
}
