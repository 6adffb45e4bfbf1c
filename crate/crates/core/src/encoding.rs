//! Encoding candidates: generator images, validation against the fermionic
//! algebra, stabilizer derivation and quality metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::distance::{min_distance, DistanceBudget};
use crate::error::{Error, Result};
use crate::fermion::{
    edge_vertex_required_parity, hamiltonian_terms, loop_stabilizer, stabilizer_cycles, term_weight, GeneratorId,
    ImageSource, TermDescriptor,
};
use crate::lattice::{all_shifts, Cell, CellPauli, UnitCellLayout, MAX_SHIFT};
use crate::symplectic::PauliWord;

/// Number of shifts in `[-2, 2]²`.
pub const N_SHIFTS: usize = ((2 * MAX_SHIFT + 1) * (2 * MAX_SHIFT + 1)) as usize;

/// Index of a shift in `[-2, 2]²`.
#[inline]
pub fn shift_index(s: Cell) -> usize {
    let side = 2 * MAX_SHIFT + 1;
    ((s.y + MAX_SHIFT) * side + s.x + MAX_SHIFT) as usize
}

/// Commutation parities demanded by the fermionic algebra, for every ordered
/// generator pair and relative shift of the second generator.
#[derive(Clone, Debug)]
pub struct RequiredParity {
    generators: Vec<GeneratorId>,
    table: Vec<[u8; N_SHIFTS]>,
}

impl RequiredParity {
    /// Shared table for `layout`, built once per process.
    pub fn cached(layout: &UnitCellLayout) -> Arc<RequiredParity> {
        static CACHE: OnceLock<Mutex<HashMap<UnitCellLayout, Arc<RequiredParity>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().expect("parity cache poisoned");
        cache
            .entry(*layout)
            .or_insert_with(|| Arc::new(RequiredParity::new(layout)))
            .clone()
    }

    pub fn new(layout: &UnitCellLayout) -> Self {
        let generators = layout.generators();
        let n = generators.len();
        let mut table = vec![[0u8; N_SHIFTS]; n * n];
        for (i, &a) in generators.iter().enumerate() {
            for (j, &b) in generators.iter().enumerate() {
                for s in all_shifts() {
                    table[i * n + j][shift_index(s)] = edge_vertex_required_parity(layout, a, Cell::ORIGIN, b, s)
                        .expect("shifts within [-2, 2] always fit the Majorana window");
                }
            }
        }
        RequiredParity { generators, table }
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.generators
    }

    /// Parity between generator `i` at the origin and generator `j` shifted by `s`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, s: Cell) -> u8 {
        self.table[i * self.generators.len() + j][shift_index(s)]
    }
}

/// One failed requirement found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Missing(GeneratorId),
    Unexpected(GeneratorId),
    Parity {
        a: GeneratorId,
        b: GeneratorId,
        shift: Cell,
        expected: u8,
        found: u8,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing(g) => write!(f, "generator {g} has no image"),
            Violation::Unexpected(g) => write!(f, "generator {g} is not part of the layout"),
            Violation::Parity {
                a,
                b,
                shift,
                expected,
                found,
            } => write!(
                f,
                "{a} vs {b} shifted by {shift}: parity {found}, required {expected}"
            ),
        }
    }
}

/// Distance of an encoding: exact, or a lower bound when the budget ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Exact(u32),
    LowerBound(u32),
}

impl Distance {
    /// The value used for ranking: a lower bound ranks as the bound itself.
    pub fn value(self) -> u32 {
        match self {
            Distance::Exact(d) | Distance::LowerBound(d) => d,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Distance::Exact(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "Exact {d}"),
            Distance::LowerBound(d) => write!(f, "LowerBound {d}"),
        }
    }
}

/// Mean weight kept as an exact fraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sigma {
    pub total: u64,
    pub count: u64,
}

impl Sigma {
    pub fn from_weights<I: IntoIterator<Item = usize>>(weights: I) -> Self {
        weights.into_iter().fold(Sigma::default(), |s, w| Sigma {
            total: s.total + w as u64,
            count: s.count + 1,
        })
    }

    pub fn value(self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total as f64 / self.count as f64
        }
    }
}

impl Ord for Sigma {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.total as u128 * other.count.max(1) as u128;
        let b = other.total as u128 * self.count.max(1) as u128;
        a.cmp(&b)
    }
}

impl PartialOrd for Sigma {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

/// Weight of one logical term, labelled for export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermWeight {
    pub label: String,
    pub nnn: bool,
    pub weight: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub distance: Distance,
    pub max_stab_weight: usize,
    pub sigma_nn: Sigma,
    pub sigma_nnn: Sigma,
    pub qubit_ratio: f64,
    pub terms: Vec<TermWeight>,
}

/// Generator images of a translationally invariant encoding, anchored at the
/// origin cell of the window.
#[derive(Clone, Debug)]
pub struct EncodingCandidate {
    layout: UnitCellLayout,
    generators: BTreeMap<GeneratorId, PauliWord>,
    lifted: BTreeMap<GeneratorId, CellPauli>,
    stabilizers: Vec<CellPauli>,
}

impl EncodingCandidate {
    /// Build a candidate; images must use the layout's slot count.
    ///
    /// Stabilizers are derived as soon as every generator has an image.
    pub fn new<I>(layout: UnitCellLayout, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GeneratorId, PauliWord)>,
    {
        let generators: BTreeMap<_, _> = generators.into_iter().collect();
        for w in generators.values() {
            if w.n_slots() != layout.n_slots() {
                return Err(Error::SlotMismatch(w.n_slots(), layout.n_slots()));
            }
        }
        let lifted = generators
            .iter()
            .map(|(&g, w)| (g, CellPauli::from_window(w, &layout)))
            .collect();
        let mut enc = EncodingCandidate {
            layout,
            generators,
            lifted,
            stabilizers: Vec::new(),
        };
        if enc.is_complete() {
            enc.stabilizers = stabilizer_cycles(&enc.layout)
                .iter()
                .map(|c| loop_stabilizer(&enc, c))
                .collect::<Result<_>>()?;
        }
        Ok(enc)
    }

    pub fn layout(&self) -> &UnitCellLayout {
        &self.layout
    }

    pub fn generators(&self) -> &BTreeMap<GeneratorId, PauliWord> {
        &self.generators
    }

    pub fn generator(&self, g: GeneratorId) -> Option<&PauliWord> {
        self.generators.get(&g)
    }

    pub fn is_complete(&self) -> bool {
        self.layout.generators().iter().all(|g| self.generators.contains_key(g))
    }

    /// Loop stabilizers anchored at the origin, one per face and mode.
    pub fn stabilizers(&self) -> &[CellPauli] {
        &self.stabilizers
    }

    /// Same generators with one image replaced.
    pub fn with_generator(&self, g: GeneratorId, w: PauliWord) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.insert(g, w);
        EncodingCandidate::new(self.layout.clone(), gens)
    }

    /// Generators that miss the origin cell, or edges that miss their far cell.
    pub fn anchoring_issues(&self) -> Vec<GeneratorId> {
        self.generators
            .iter()
            .filter(|(g, w)| {
                let cells = self.layout.support_cells(w);
                let (_, far) = self.layout.endpoints(**g, Cell::ORIGIN);
                !cells.contains(&Cell::ORIGIN) || far.is_some_and(|m| !cells.contains(&m.cell))
            })
            .map(|(&g, _)| g)
            .collect()
    }
}

impl ImageSource for EncodingCandidate {
    fn layout(&self) -> &UnitCellLayout {
        &self.layout
    }

    fn image(&self, g: GeneratorId) -> Option<&CellPauli> {
        self.lifted.get(&g)
    }
}

/// Check every windowed commutation relation against the fermionic algebra.
pub fn validate(enc: &EncodingCandidate) -> std::result::Result<(), Vec<Violation>> {
    validate_with(enc, &RequiredParity::cached(enc.layout()))
}

/// [`validate`] with a precomputed parity table.
pub fn validate_with(enc: &EncodingCandidate, req: &RequiredParity) -> std::result::Result<(), Vec<Violation>> {
    let layout = enc.layout();
    let mut violations: Vec<Violation> = enc
        .generators
        .keys()
        .filter(|g| !req.generators().contains(g))
        .map(|&g| Violation::Unexpected(g))
        .collect();
    let gens = req.generators();
    let images: Vec<Option<&PauliWord>> = gens.iter().map(|&g| enc.generator(g)).collect();
    violations.extend(
        gens.iter()
            .zip(&images)
            .filter(|(_, w)| w.is_none())
            .map(|(&g, _)| Violation::Missing(g)),
    );
    for i in 0..gens.len() {
        let Some(a) = images[i] else { continue };
        for j in i..gens.len() {
            let Some(b) = images[j] else { continue };
            for s in all_shifts() {
                let found = a.commute_parity(&layout.translate_clipped(b, s)).expect("same layout");
                let expected = req.get(i, j, s);
                if found != expected {
                    violations.push(Violation::Parity {
                        a: gens[i],
                        b: gens[j],
                        shift: s,
                        expected,
                        found,
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Loop stabilizers of a valid encoding.
pub fn derive_stabilizers(enc: &EncodingCandidate) -> Result<Vec<CellPauli>> {
    validate(enc).map_err(Error::Invalid)?;
    Ok(enc.stabilizers.clone())
}

fn term_label(layout: &UnitCellLayout, t: &TermDescriptor) -> String {
    match *t {
        TermDescriptor::Hopping { from, to, .. } => {
            let (a, b) = (layout.site_of(from), layout.site_of(to));
            format!("hop/{}({:+},{:+})", from.mode, b.x - a.x, b.y - a.y)
        }
        TermDescriptor::OnSite { mode } => format!("onsite/{mode}"),
    }
}

/// Per-term weights for the NN and NNN term sets of a complete encoding.
pub fn term_weights(enc: &EncodingCandidate) -> Result<Vec<TermWeight>> {
    hamiltonian_terms(enc.layout(), true)
        .iter()
        .map(|t| {
            Ok(TermWeight {
                label: term_label(enc.layout(), t),
                nnn: t.is_nnn(),
                weight: term_weight(enc, t)?,
            })
        })
        .collect()
}

/// Distance, maximum stabilizer weight, term-weight averages and qubit ratio.
pub fn compute_metrics(enc: &EncodingCandidate, budget: &DistanceBudget) -> Result<Metrics> {
    let distance = min_distance(enc, budget)?;
    let mut m = weight_metrics(enc)?;
    m.distance = distance;
    Ok(m)
}

/// All metrics except the distance, which is left as `LowerBound(1)`.
pub fn weight_metrics(enc: &EncodingCandidate) -> Result<Metrics> {
    if !enc.is_complete() {
        let missing = enc
            .layout()
            .generators()
            .into_iter()
            .filter(|g| enc.generator(*g).is_none())
            .map(Violation::Missing)
            .collect();
        return Err(Error::Invalid(missing));
    }
    let terms = term_weights(enc)?;
    Ok(Metrics {
        distance: Distance::LowerBound(1),
        max_stab_weight: enc.stabilizers().iter().map(CellPauli::weight).max().unwrap_or(0),
        sigma_nn: Sigma::from_weights(terms.iter().filter(|t| !t.nnn).map(|t| t.weight)),
        sigma_nnn: Sigma::from_weights(terms.iter().map(|t| t.weight)),
        qubit_ratio: enc.layout().qubit_ratio(),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::{EdgeSet, Scheme};

    #[test]
    fn jwt_chain_validates_without_stabilizers() {
        let enc = fixtures::jordan_wigner_chain();
        assert_eq!(validate(&enc), Ok(()));
        assert!(enc.stabilizers().is_empty());
        let m = weight_metrics(&enc).unwrap();
        assert_eq!(m.max_stab_weight, 0);
        assert_eq!(m.qubit_ratio, 1.0);
        // Hoppings X_c Y_{c+1} times Z: weight 2 each; on-site Z ⊗ Z across copies: 2.
        assert!(m.terms.iter().all(|t| t.weight == 2), "{:?}", m.terms);
        assert_eq!(m.sigma_nn, Sigma { total: 6, count: 3 });
    }

    #[test]
    fn empty_map_reports_every_generator() {
        let layout = UnitCellLayout::new(2, Scheme::TwoGrids, EdgeSet::NNSquare).unwrap();
        let enc = EncodingCandidate::new(layout.clone(), []).unwrap();
        let v = validate(&enc).unwrap_err();
        assert_eq!(v.len(), layout.generators().len());
        assert!(v.iter().all(|v| matches!(v, Violation::Missing(_))));
    }

    #[test]
    fn xz_swap_is_detected() {
        let enc = fixtures::edge_qubit_square();
        assert_eq!(validate(&enc), Ok(()));
        for (&g, w) in enc.generators() {
            for (slot, l) in w.iter_support() {
                let Some(swapped) = fixtures::swap_xz(l) else { continue };
                let mut w2 = *w;
                w2.set(slot, swapped).unwrap();
                let bad = enc.with_generator(g, w2).unwrap();
                assert!(validate(&bad).is_err(), "{g} slot {slot}");
            }
        }
    }

    #[test]
    fn stabilizer_counts_per_edge_set() {
        for (es, n) in [(EdgeSet::NNSquare, 1), (EdgeSet::Triangular, 2), (EdgeSet::NNNSquare, 4)] {
            let layout = UnitCellLayout::new(1, Scheme::TwoGrids, es).unwrap();
            let gens = layout
                .generators()
                .into_iter()
                .map(|g| (g, PauliWord::identity(layout.n_slots())));
            let enc = EncodingCandidate::new(layout, gens).unwrap();
            assert_eq!(enc.stabilizers().len(), n);
        }
    }

    #[test]
    fn stabilizers_commute_with_everything() {
        let enc = fixtures::edge_qubit_square();
        let stabs = derive_stabilizers(&enc).unwrap();
        assert_eq!(stabs.len(), 1);
        for s in all_shifts() {
            for st in &stabs {
                let moved = st.translate(s);
                for g in enc.layout().generators() {
                    assert!(!enc.image(g).unwrap().anticommutes(&moved));
                }
                for other in &stabs {
                    assert!(!other.anticommutes(&moved));
                }
            }
        }
    }

    #[test]
    fn sigma_orders_exactly() {
        let a = Sigma { total: 10, count: 3 };
        let b = Sigma { total: 7, count: 2 };
        assert!(a < b);
        assert_eq!(Sigma { total: 4, count: 2 }.cmp(&Sigma { total: 6, count: 3 }), Ordering::Equal);
    }
}
