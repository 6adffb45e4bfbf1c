//! Clifford deformations of a base encoding.
//!
//! Every gate is replicated on all translates of the unit cell, so it acts
//! on the infinite lattice and maps generator images to new images with the
//! same commutation relations. Gates are phase blind: single-qubit gates are
//! the six permutations of `{X, Y, Z}` on one local index.
//!
//! An inter-cell CNOT with control local `a` and target local `b` at
//! displacement `δ` maps `X_a(c) → X_a(c)X_b(c+δ)` and
//! `Z_b(c) → Z_a(c−δ)Z_b(c)`. Replicating a CNOT between equal local
//! indices of different cells chains controls into targets and is not a
//! locality-preserving Clifford, so such gates are rejected.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{final_front, Found, ParetoFront, ParetoKey, SearchOutcome, SearchReport};
use crate::distance::{DistanceBudget, DistanceEngine};
use crate::encoding::{validate, weight_metrics, Distance, EncodingCandidate, Metrics};
use crate::error::{Error, Result};
use crate::exec;
use crate::fermion::ImageSource;
use crate::lattice::{Cell, CellPauli, UnitCellLayout};
use crate::symplectic::{Letter, PauliWord};

/// A permutation of `{X, Y, Z}`, stored as the images of X, Y and Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterPerm([Letter; 3]);

impl LetterPerm {
    pub const ALL: [LetterPerm; 6] = {
        use Letter::*;
        [
            LetterPerm([X, Y, Z]),
            LetterPerm([Z, Y, X]),
            LetterPerm([Y, X, Z]),
            LetterPerm([X, Z, Y]),
            LetterPerm([Y, Z, X]),
            LetterPerm([Z, X, Y]),
        ]
    };

    pub fn identity() -> Self {
        LetterPerm::ALL[0]
    }

    pub fn apply(self, l: Letter) -> Letter {
        match l {
            Letter::I => Letter::I,
            Letter::X => self.0[0],
            Letter::Y => self.0[1],
            Letter::Z => self.0[2],
        }
    }

    /// Images of X, Y, Z, e.g. `ZYX` for the Hadamard class.
    pub fn name(self) -> String {
        self.0.iter().map(|l| l.as_char()).collect()
    }
}

impl FromStr for LetterPerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LetterPerm::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Gate(format!("{s:?} is not a permutation of XYZ")))
    }
}

/// A gate replicated on every translate of the unit cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CliffordGateOp {
    SingleQubit { local: u8, perm: LetterPerm },
    Cnot { control: (Cell, u8), target: (Cell, u8) },
}

impl CliffordGateOp {
    /// Displacement from control to target.
    fn displacement(&self) -> Option<(u8, u8, Cell)> {
        match *self {
            CliffordGateOp::Cnot { control, target } => Some((control.1, target.1, target.0 - control.0)),
            _ => None,
        }
    }

    pub fn check(&self, layout: &UnitCellLayout) -> Result<()> {
        let n_c = layout.qubits_per_cell() as u8;
        match *self {
            CliffordGateOp::SingleQubit { local, .. } if local >= n_c => {
                Err(Error::Gate(format!("local index {local} exceeds the cell")))
            }
            CliffordGateOp::SingleQubit { .. } => Ok(()),
            CliffordGateOp::Cnot { control, target } => {
                if control.1 >= n_c || target.1 >= n_c {
                    return Err(Error::Gate("CNOT local index exceeds the cell".into()));
                }
                if control.1 == target.1 {
                    return Err(Error::Gate(
                        "CNOT between equal local indices is not translation-compatible".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Conjugate a lattice operator by the replicated gate.
    pub fn conjugate(&self, p: &CellPauli) -> CellPauli {
        match *self {
            CliffordGateOp::SingleQubit { local, perm } => {
                let mut out = p.clone();
                for c in p.cells().collect::<Vec<_>>() {
                    let (x, z) = p.get(c);
                    let l = Letter::from_bits(x >> local & 1 == 1, z >> local & 1 == 1);
                    let (nx, nz) = perm.apply(l).bits();
                    let bit = 1u8 << local;
                    out.set_cell(c, (x & !bit) | (nx as u8) << local, (z & !bit) | (nz as u8) << local);
                }
                out
            }
            CliffordGateOp::Cnot { .. } => {
                let (a, b, d) = self.displacement().expect("cnot");
                let mut out = p.clone();
                let cells: Vec<Cell> = p.cells().collect();
                for &c in &cells {
                    let (x, z) = p.get(c);
                    if x >> a & 1 == 1 {
                        let t = c + d;
                        let (tx, tz) = out.get(t);
                        out.set_cell(t, tx ^ 1 << b, tz);
                    }
                    if z >> b & 1 == 1 {
                        let s = c - d;
                        let (sx, sz) = out.get(s);
                        out.set_cell(s, sx, sz ^ 1 << a);
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for CliffordGateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliffordGateOp::SingleQubit { local, perm } => write!(f, "perm:{local}:{}", perm.name()),
            CliffordGateOp::Cnot { control, target } => write!(
                f,
                "cnot:{}:{}->{}:{}",
                control.0, control.1, target.0, target.1
            ),
        }
    }
}

impl FromStr for CliffordGateOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Gate(format!("cannot parse gate {s:?}"));
        if let Some(rest) = s.strip_prefix("perm:") {
            let (local, perm) = rest.split_once(':').ok_or_else(bad)?;
            return Ok(CliffordGateOp::SingleQubit {
                local: local.parse().map_err(|_| bad())?,
                perm: perm.parse()?,
            });
        }
        let rest = s.strip_prefix("cnot:").ok_or_else(bad)?;
        let (c, t) = rest.split_once("->").ok_or_else(bad)?;
        let end = |x: &str| -> Result<(Cell, u8)> {
            let (cell, local) = x.rsplit_once(':').ok_or_else(bad)?;
            let inner = cell.strip_prefix('(').and_then(|c| c.strip_suffix(')')).ok_or_else(bad)?;
            let (cx, cy) = inner.split_once(',').ok_or_else(bad)?;
            Ok((
                Cell::new(cx.trim().parse().map_err(|_| bad())?, cy.trim().parse().map_err(|_| bad())?),
                local.parse().map_err(|_| bad())?,
            ))
        };
        Ok(CliffordGateOp::Cnot {
            control: end(c)?,
            target: end(t)?,
        })
    }
}

/// Apply a replicated gate to every generator image.
///
/// Fails if the gate is malformed or an image would leave the window.
pub fn apply_clifford(enc: &EncodingCandidate, g: &CliffordGateOp) -> Result<EncodingCandidate> {
    let layout = enc.layout();
    g.check(layout)?;
    let mut gens = Vec::with_capacity(enc.generators().len());
    for &id in enc.generators().keys() {
        let img = enc.image(id).expect("lifted image");
        let w = g
            .conjugate(img)
            .to_window(layout)
            .ok_or_else(|| Error::Gate(format!("{g} pushes {id} out of the window")))?;
        gens.push((id, w));
    }
    EncodingCandidate::new(layout.clone(), gens)
}

#[derive(Clone, Debug)]
pub struct CliffordConfig {
    pub base: EncodingCandidate,
    pub n_single_qubit_samples: usize,
    pub n_cnot_pairs: usize,
    pub max_sequence_length: usize,
    pub rng_seed: u64,
    pub min_distance_filter: u32,
    pub max_vertex_weight: Option<usize>,
    pub max_hopping_weight: Option<usize>,
    pub distance_w_max: u32,
    /// Cap on distinct deformed encodings evaluated.
    pub max_sequences: Option<u64>,
    pub threads: usize,
}

impl CliffordConfig {
    pub fn new(base: EncodingCandidate) -> Self {
        CliffordConfig {
            base,
            n_single_qubit_samples: 2,
            n_cnot_pairs: 2,
            max_sequence_length: 2,
            rng_seed: 0,
            min_distance_filter: 1,
            max_vertex_weight: None,
            max_hopping_weight: None,
            distance_w_max: 4,
            max_sequences: None,
            threads: 1,
        }
    }
}

/// Displacements between cells joined by an edge, one per unordered pair.
fn connected_displacements(layout: &UnitCellLayout) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::new();
    for g in layout.generators() {
        if let (_, Some(far)) = layout.endpoints(g, Cell::ORIGIN) {
            let d = far.cell;
            if d != Cell::ORIGIN && !out.contains(&d) && !out.contains(&-d) {
                out.push(d);
            }
        }
    }
    out
}

/// Sample the gate set: per local index, `n_single_qubit_samples` distinct
/// letter permutations; every intra-cell CNOT; per connected cell pair,
/// `n_cnot_pairs` distinct inter-cell CNOTs. Requests beyond the population
/// are capped.
pub fn sample_gate_set(cfg: &CliffordConfig) -> Vec<CliffordGateOp> {
    let layout = cfg.base.layout();
    let n_c = layout.qubits_per_cell() as u8;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut gates = Vec::new();
    for local in 0..n_c {
        let mut perms: Vec<LetterPerm> = LetterPerm::ALL
            .choose_multiple(&mut rng, cfg.n_single_qubit_samples.min(6))
            .copied()
            .collect();
        perms.sort();
        gates.extend(perms.into_iter().map(|perm| CliffordGateOp::SingleQubit { local, perm }));
    }
    for a in 0..n_c {
        for b in 0..n_c {
            if a != b {
                gates.push(CliffordGateOp::Cnot {
                    control: (Cell::ORIGIN, a),
                    target: (Cell::ORIGIN, b),
                });
            }
        }
    }
    for d in connected_displacements(layout) {
        let mut population = Vec::new();
        for a in 0..n_c {
            for b in 0..n_c {
                if a != b {
                    for (c, t) in [(Cell::ORIGIN, d), (d, Cell::ORIGIN)] {
                        population.push(CliffordGateOp::Cnot {
                            control: (c, a),
                            target: (t, b),
                        });
                    }
                }
            }
        }
        let mut chosen: Vec<CliffordGateOp> = population
            .choose_multiple(&mut rng, cfg.n_cnot_pairs.min(population.len()))
            .copied()
            .collect();
        chosen.sort();
        gates.extend(chosen);
    }
    gates
}

fn map_key(enc: &EncodingCandidate) -> Vec<(u64, u64)> {
    enc.generators().values().map(|w| (w.x_mask(), w.z_mask())).collect()
}

/// Enumerate ordered gate sequences without repetition up to the maximum
/// length, keep the first sequence reaching each distinct generator map,
/// score them and stream the Pareto-accepted ones to `sink`.
pub fn clifford_deform_search(cfg: &CliffordConfig, sink: &mut dyn FnMut(&Found)) -> Result<SearchOutcome> {
    validate(&cfg.base).map_err(Error::Invalid)?;
    let gates = sample_gate_set(cfg);
    let mut report = SearchReport::default();

    let mut seen: HashSet<Vec<(u64, u64)>> = HashSet::new();
    let mut unique: Vec<(Vec<CliffordGateOp>, EncodingCandidate)> = Vec::new();
    seen.insert(map_key(&cfg.base));
    unique.push((Vec::new(), cfg.base.clone()));
    let mut stack: Vec<(Vec<usize>, EncodingCandidate)> = vec![(Vec::new(), cfg.base.clone())];
    'outer: while let Some((seq, enc)) = stack.pop() {
        if seq.len() == cfg.max_sequence_length {
            continue;
        }
        let mut children = Vec::new();
        for (i, g) in gates.iter().enumerate() {
            if seq.contains(&i) {
                continue;
            }
            report.nodes += 1;
            let Ok(next) = apply_clifford(&enc, g) else { continue };
            let mut s = seq.clone();
            s.push(i);
            if seen.insert(map_key(&next)) {
                if cfg.max_sequences.is_some_and(|m| unique.len() as u64 >= m) {
                    report.truncated = true;
                    break 'outer;
                }
                unique.push((s.iter().map(|&j| gates[j]).collect(), next.clone()));
            }
            children.push((s, next));
        }
        // Depth-first in gate order.
        stack.extend(children.into_iter().rev());
    }

    let budget = DistanceBudget::new(cfg.distance_w_max);
    let scored: Vec<Option<Metrics>> = exec::with_threads(cfg.threads, || {
        exec::map_ordered(&unique, cfg.threads.max(1), |(_, enc)| score(cfg, enc, &budget))
    });
    report.completions = unique.len() as u64;
    let mut front: ParetoFront<usize> = ParetoFront::new();
    let mut emitted = Vec::new();
    for ((gates, enc), metrics) in unique.into_iter().zip(scored) {
        let Some(metrics) = metrics else { continue };
        report.passed += 1;
        if front.update(ParetoKey::of(&metrics), emitted.len()) {
            report.note_distance(metrics.distance);
            let found = Found {
                index: emitted.len(),
                encoding: enc,
                metrics,
                gates,
            };
            sink(&found);
            emitted.push(found);
        }
    }
    report.accepted = emitted.len() as u64;
    let front = final_front(&emitted);
    report.front_size = front.len();
    Ok(SearchOutcome { report, front })
}

fn score(cfg: &CliffordConfig, enc: &EncodingCandidate, budget: &DistanceBudget) -> Option<Metrics> {
    let mut m = weight_metrics(enc).ok()?;
    if let Some(cap) = cfg.max_vertex_weight {
        if enc.generators().iter().any(|(g, w)| g.is_vertex() && w.weight() > cap) {
            return None;
        }
    }
    if let Some(cap) = cfg.max_hopping_weight {
        if m.terms.iter().any(|t| t.label.starts_with("hop") && !t.nnn && t.weight > cap) {
            return None;
        }
    }
    let d = DistanceEngine::new(enc).ok()?.search(budget).0;
    if let Distance::Exact(d) = d {
        if d < cfg.min_distance_filter {
            return None;
        }
    }
    m.distance = d;
    Some(m)
}

/// Windowed commutation parities of every generator pair, for invariance checks.
pub fn parity_fingerprint(enc: &EncodingCandidate) -> Vec<u8> {
    let layout = enc.layout();
    let imgs: Vec<&PauliWord> = enc.generators().values().collect();
    let mut out = Vec::new();
    for a in &imgs {
        for b in &imgs {
            for s in crate::lattice::all_shifts() {
                out.push(a.commute_parity(&layout.translate_clipped(b, s)).expect("same layout"));
            }
        }
    }
    out
}
