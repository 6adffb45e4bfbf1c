//! Minimum distance by weight-ordered enumeration of window errors.
//!
//! An error is *detected* when it anticommutes with some translate of a
//! stabilizer generator and *trivial* when it lies in the stabilizer group.
//! Errors are canonicalized by translation: only supports touching both the
//! left column and the bottom row of the window are enumerated, which picks
//! one representative of every translation class that fits the window.
//!
//! Stabilizer translates that stick out of the window are not discarded.
//! Detection uses their in-window part, which gives the exact commutation
//! parity. Group membership uses products of translates over a margin around
//! the window whose outside parts cancel.

use crate::encoding::{Distance, EncodingCandidate};
use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{Cell, CellPauli, UnitCellLayout};
use crate::symplectic::{Letter, PauliWord, SymplecticBasis};

/// How far the enumeration may go and how finely it is split across workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceBudget {
    pub w_max: u32,
    /// Workers to split each weight level across; 1 runs sequentially.
    pub parallel_chunks: usize,
}

impl DistanceBudget {
    pub fn new(w_max: u32) -> Self {
        DistanceBudget {
            w_max,
            parallel_chunks: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.parallel_chunks = workers.max(1);
        self
    }
}

/// Translates of `s` that touch the window.
fn touching_translates(s: &CellPauli) -> impl Iterator<Item = Cell> + '_ {
    let r = 1 + s.radius();
    (-r..=r).flat_map(move |y| (-r..=r).map(move |x| Cell::new(x, y)))
}

/// Anchors of the stabilizer translates used for group membership.
fn membership_anchors(stabs: &[CellPauli]) -> Vec<Cell> {
    let r = stabs.iter().map(CellPauli::radius).max().unwrap_or(0);
    let reach = 2 + 2 * r;
    (-reach..=reach)
        .flat_map(|y| (-reach..=reach).map(move |x| Cell::new(x, y)))
        .collect()
}

/// Precomputed detection and membership data for one encoding.
#[derive(Clone, Debug)]
pub struct DistanceEngine {
    layout: UnitCellLayout,
    detectors: Vec<PauliWord>,
    group: SymplecticBasis,
    canon_col: u64,
    canon_row: u64,
}

struct OutsideRow {
    outside: Vec<u64>,
    inside: PauliWord,
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

impl DistanceEngine {
    pub fn new(enc: &EncodingCandidate) -> Result<Self> {
        if !enc.is_complete() {
            return Err(Error::Layout("distance needs every generator image".into()));
        }
        let layout = enc.layout().clone();
        let stabs: Vec<&CellPauli> = enc.stabilizers().iter().filter(|s| !s.is_identity()).collect();

        let mut detectors: Vec<PauliWord> = stabs
            .iter()
            .flat_map(|s| touching_translates(s).map(|t| s.translate(t).clip_to_window(&layout, Cell::ORIGIN)))
            .filter(|w| !w.is_identity())
            .collect();
        detectors.sort_by_key(|w| (w.x_mask(), w.z_mask()));
        detectors.dedup();

        let owned: Vec<CellPauli> = stabs.iter().map(|s| (*s).clone()).collect();
        let anchors = membership_anchors(&owned);
        let reach = anchors.iter().map(|c| c.radius()).max().unwrap_or(0) + owned.iter().map(CellPauli::radius).max().unwrap_or(0);
        let side = (2 * reach + 1) as usize;
        let n_c = layout.qubits_per_cell();
        let words = (side * side * n_c * 2).div_ceil(64);
        let mut pivots: Vec<Option<OutsideRow>> = Vec::new();
        pivots.resize_with(words * 64, || None);
        let mut group = SymplecticBasis::new(layout.n_slots());
        for s in &owned {
            for &t in &anchors {
                let moved = s.translate(t);
                let mut outside = vec![0u64; words];
                for (c, q, l) in moved.qubits() {
                    if c.in_window() {
                        continue;
                    }
                    let base = (((c.y + reach) as usize * side + (c.x + reach) as usize) * n_c + q) * 2;
                    let (x, z) = l.bits();
                    if x {
                        outside[base / 64] |= 1 << (base % 64);
                    }
                    if z {
                        outside[(base + 1) / 64] |= 1 << ((base + 1) % 64);
                    }
                }
                let mut row = OutsideRow {
                    outside,
                    inside: moved.clip_to_window(&layout, Cell::ORIGIN),
                };
                loop {
                    match lowest_bit(&row.outside) {
                        None => {
                            group.insert(&row.inside)?;
                            break;
                        }
                        Some(p) => match &pivots[p] {
                            Some(prow) => {
                                for (a, b) in row.outside.iter_mut().zip(&prow.outside) {
                                    *a ^= b;
                                }
                                row.inside = row.inside * prow.inside;
                            }
                            None => {
                                pivots[p] = Some(row);
                                break;
                            }
                        },
                    }
                }
            }
        }

        let canon = |pred: &dyn Fn(Cell) -> bool| -> u64 {
            (-1..=1)
                .flat_map(|y| (-1..=1).map(move |x| Cell::new(x, y)))
                .filter(|&c| pred(c))
                .fold(0, |m, c| m | layout.cell_mask(c))
        };
        let canon_col = canon(&|c| c.x == -1);
        let canon_row = canon(&|c| c.y == -1);
        Ok(DistanceEngine {
            layout,
            detectors,
            group,
            canon_col,
            canon_row,
        })
    }

    pub fn layout(&self) -> &UnitCellLayout {
        &self.layout
    }

    /// Clipped stabilizer translates an error must commute with.
    pub fn detectors(&self) -> &[PauliWord] {
        &self.detectors
    }

    /// Window-supported elements of the stabilizer group.
    pub fn group(&self) -> &SymplecticBasis {
        &self.group
    }

    #[inline]
    pub fn is_detected(&self, e: &PauliWord) -> bool {
        self.detectors.iter().any(|d| e.anticommutes(d))
    }

    /// Undetected and not a stabilizer.
    #[inline]
    pub fn is_logical(&self, e: &PauliWord) -> bool {
        !self.is_detected(e) && !self.group.contains(e)
    }

    fn logical_on_support(&self, support: u64) -> Option<PauliWord> {
        let slots: Vec<u32> = (0..64).filter(|i| support >> i & 1 == 1).collect();
        let w = slots.len();
        let mut digits = vec![0u8; w];
        let n = self.layout.n_slots();
        loop {
            let mut x = 0u64;
            let mut z = 0u64;
            for (&s, &d) in slots.iter().zip(&digits) {
                let (bx, bz) = Letter::NON_IDENTITY[d as usize].bits();
                x |= (bx as u64) << s;
                z |= (bz as u64) << s;
            }
            let e = PauliWord::from_masks_unchecked(x, z, n);
            if self.is_logical(&e) {
                return Some(e);
            }
            let mut i = 0;
            loop {
                if i == w {
                    return None;
                }
                digits[i] += 1;
                if digits[i] < 3 {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    /// Lowest-weight logical error (first in enumeration order) up to `budget.w_max`.
    pub fn search(&self, budget: &DistanceBudget) -> (Distance, Option<PauliWord>) {
        let n = self.layout.n_slots() as u32;
        let w_max = budget.w_max.min(n);
        const CHUNK: usize = 1 << 14;
        for w in 1..=w_max {
            let mut chunk = Vec::with_capacity(CHUNK);
            let mut combos = Combinations::new(n, w);
            loop {
                chunk.clear();
                chunk.extend(
                    combos
                        .by_ref()
                        .filter(|m| m & self.canon_col != 0 && m & self.canon_row != 0)
                        .take(CHUNK),
                );
                if chunk.is_empty() {
                    break;
                }
                if let Some(e) = exec::find_map_first(&chunk, budget.parallel_chunks, |&m| self.logical_on_support(m)) {
                    return (Distance::Exact(w), Some(e));
                }
            }
        }
        (Distance::LowerBound(w_max + 1), None)
    }
}

/// Weight-`k` subsets of `0..n` as bit masks in increasing numeric order.
#[derive(Clone, Debug)]
pub struct Combinations {
    next: Option<u64>,
    limit: u64,
}

impl Combinations {
    pub fn new(n: u32, k: u32) -> Self {
        assert!(n <= 64);
        let next = if k > n {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some(if k == 64 { u64::MAX } else { (1u64 << k) - 1 })
        };
        Combinations {
            next,
            limit: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
        }
    }
}

impl Iterator for Combinations {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        let v = self.next?;
        self.next = if v == 0 {
            None
        } else {
            // Gosper's hack.
            let c = v & v.wrapping_neg();
            let r = v.checked_add(c);
            match r {
                Some(r) => {
                    let nv = (((r ^ v) >> 2) / c) | r;
                    (nv <= self.limit && nv.count_ones() == v.count_ones()).then_some(nv)
                }
                None => None,
            }
        };
        Some(v)
    }
}

/// Minimum distance of a complete encoding, or a lower bound past `w_max`.
pub fn min_distance(enc: &EncodingCandidate, budget: &DistanceBudget) -> Result<Distance> {
    Ok(DistanceEngine::new(enc)?.search(budget).0)
}

/// Whether `e` commutes with every stabilizer translate yet lies outside the group.
pub fn is_logical(e: &PauliWord, enc: &EncodingCandidate) -> Result<bool> {
    if e.n_slots() != enc.layout().n_slots() {
        return Err(Error::SlotMismatch(e.n_slots(), enc.layout().n_slots()));
    }
    Ok(DistanceEngine::new(enc)?.is_logical(e))
}

/// Advance `chosen` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(chosen: &mut [usize], n: usize) -> bool {
    let k = chosen.len();
    for i in (0..k).rev() {
        if chosen[i] < n - k + i {
            chosen[i] += 1;
            for j in i + 1..k {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Reference implementation over dense letter arrays.
///
/// Enumerates every window error (no translation canonicalization, no
/// pruning, one thread) and decides group membership by dense elimination
/// over the whole region covered by the stabilizer translates.
pub fn naive_min_distance(enc: &EncodingCandidate, w_max: u32) -> Result<Distance> {
    if !enc.is_complete() {
        return Err(Error::Layout("distance needs every generator image".into()));
    }
    let layout = enc.layout();
    let n_c = layout.qubits_per_cell();
    let stabs: Vec<CellPauli> = enc.stabilizers().iter().filter(|s| !s.is_identity()).cloned().collect();
    let anchors = membership_anchors(&stabs);
    let r = stabs.iter().map(CellPauli::radius).max().unwrap_or(0);
    let reach = anchors.iter().map(|c| c.radius()).max().unwrap_or(0) + r;
    let side = (2 * reach + 1) as usize;
    let n_coords = side * side * n_c;
    let coord = |c: Cell, q: usize| ((c.y + reach) as usize * side + (c.x + reach) as usize) * n_c + q;

    // Dense rows: letters 0..=3 per coordinate (I, X, Y, Z encoded as x | z << 1).
    let dense = |p: &CellPauli| -> Vec<u8> {
        let mut v = vec![0u8; n_coords];
        for (c, q, l) in p.qubits() {
            let (x, z) = l.bits();
            v[coord(c, q)] = x as u8 | (z as u8) << 1;
        }
        v
    };
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for s in &stabs {
        for &t in &anchors {
            rows.push(dense(&s.translate(t)));
        }
    }
    // Row echelon form over F2², pivots on (coordinate, bit).
    let mut echelon: Vec<(usize, u8, Vec<u8>)> = Vec::new();
    for mut row in rows {
        for (pc, pb, prow) in &echelon {
            if row[*pc] & pb != 0 {
                for (a, b) in row.iter_mut().zip(prow) {
                    *a ^= b;
                }
            }
        }
        if let Some(pc) = row.iter().position(|&v| v != 0) {
            let pb = if row[pc] & 1 != 0 { 1 } else { 2 };
            for (_, _, qrow) in echelon.iter_mut() {
                if qrow[pc] & pb != 0 {
                    for (a, b) in qrow.iter_mut().zip(&row) {
                        *a ^= b;
                    }
                }
            }
            echelon.push((pc, pb, row));
        }
    }
    let in_group = |mut v: Vec<u8>| -> bool {
        for (pc, pb, prow) in &echelon {
            if v[*pc] & pb != 0 {
                for (a, b) in v.iter_mut().zip(prow) {
                    *a ^= b;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    };
    let dense_stabs: Vec<(Vec<u8>, Vec<Cell>)> = stabs
        .iter()
        .flat_map(|s| {
            let rr = 1 + s.radius();
            (-rr..=rr)
                .flat_map(move |y| (-rr..=rr).map(move |x| Cell::new(x, y)))
                .map(move |t| s.translate(t))
        })
        .map(|p| (dense(&p), p.cells().collect()))
        .collect();
    let anticommute = |a: u8, b: u8| -> bool { ((a & 1) & (b >> 1)) ^ ((a >> 1) & (b & 1)) == 1 };

    let window: Vec<(Cell, usize)> = (-1..=1)
        .flat_map(|y| (-1..=1).flat_map(move |x| (0..n_c).map(move |q| (Cell::new(x, y), q))))
        .collect();
    let n = window.len();
    for w in 1..=w_max.min(n as u32) as usize {
        let mut chosen: Vec<usize> = (0..w).collect();
        loop {
            let mut letters = vec![1u8; w];
            loop {
                let mut e = vec![0u8; n_coords];
                for (&i, &l) in chosen.iter().zip(&letters) {
                    let (c, q) = window[i];
                    e[coord(c, q)] = l;
                }
                let detected = dense_stabs.iter().any(|(s, _)| {
                    e.iter().zip(s).filter(|(a, b)| anticommute(**a, **b)).count() % 2 == 1
                });
                if !detected && !in_group(e) {
                    return Ok(Distance::Exact(w as u32));
                }
                let mut i = 0;
                while i < w && letters[i] == 3 {
                    letters[i] = 1;
                    i += 1;
                }
                if i == w {
                    break;
                }
                letters[i] += 1;
            }
            if !next_combination(&mut chosen, n) {
                break;
            }
        }
    }
    Ok(Distance::LowerBound(w_max.min(n as u32) + 1))
}
