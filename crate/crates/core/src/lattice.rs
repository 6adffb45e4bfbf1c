//! Unit-cell layouts, the 3×3 window slot map, and translations.
//!
//! Generator images live on a 3×3 block of unit cells, packed into the 64-bit
//! masks of a [`PauliWord`] in snake order. Two translated operators whose
//! anchors differ by more than two cells along an axis have disjoint support,
//! so checking shifts in `[-2, 2]²` is equivalent to checking every
//! coefficient of the translation-polynomial commutator.
//!
//! Cell coordinates come in two flavours. Window coordinates run over
//! `0..3` with the central cell at `(1, 1)`. Lattice coordinates ([`Cell`])
//! are centred, so the window covers `-1..=1` on both axes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::GeneratorId;
use crate::symplectic::{Letter, PauliWord, MAX_SLOTS};

/// Side length of the window, in cells.
pub const WINDOW: usize = 3;
/// Number of cells in the window.
pub const WINDOW_CELLS: usize = WINDOW * WINDOW;
/// Largest relative shift (per axis) at which two window-supported operators can overlap.
pub const MAX_SHIFT: i32 = 2;
/// Most qubits a unit cell may carry.
pub const MAX_QUBITS_PER_CELL: usize = 6;

/// A unit-cell position in centred lattice coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Cell {
        Cell { x, y }
    }

    /// Whether the cell lies in the window centred on the origin.
    #[inline]
    pub fn in_window(self) -> bool {
        self.x.abs() <= 1 && self.y.abs() <= 1
    }

    /// Window coordinates `(0..3, 0..3)` of an in-window cell.
    #[inline]
    pub fn window_coords(self) -> (usize, usize) {
        debug_assert!(self.in_window());
        ((self.x + 1) as usize, (self.y + 1) as usize)
    }

    pub fn from_window(wx: usize, wy: usize) -> Cell {
        Cell::new(wx as i32 - 1, wy as i32 - 1)
    }

    /// Chebyshev distance to the origin.
    pub fn radius(self) -> i32 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Cell {
    type Output = Cell;
    fn add(self, o: Cell) -> Cell {
        Cell::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Cell {
    type Output = Cell;
    fn sub(self, o: Cell) -> Cell {
        Cell::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Cell {
    type Output = Cell;
    fn neg(self) -> Cell {
        Cell::new(-self.x, -self.y)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// All shifts with `|dx|, |dy| <= MAX_SHIFT`, row-major.
pub fn all_shifts() -> impl Iterator<Item = Cell> {
    (-MAX_SHIFT..=MAX_SHIFT).flat_map(|y| (-MAX_SHIFT..=MAX_SHIFT).map(move |x| Cell::new(x, y)))
}

/// How the fermionic modes of the two spin species map onto unit cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// One mode per cell; the encoding is duplicated for the second spin.
    #[serde(rename = "two-grids")]
    TwoGrids,
    /// Both spin modes of a site share one cell.
    #[serde(rename = "mixed")]
    Mixed,
    /// Two horizontally neighbouring same-spin sites per cell.
    #[serde(rename = "doubled-h")]
    DoubledHorizontal,
    /// As `DoubledHorizontal`, with each cell column shifted up by one site
    /// relative to its left neighbour (brick arrangement).
    #[serde(rename = "doubled-offset")]
    DoubledOffset,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::TwoGrids,
        Scheme::Mixed,
        Scheme::DoubledHorizontal,
        Scheme::DoubledOffset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::TwoGrids => "two-grids",
            Scheme::Mixed => "mixed",
            Scheme::DoubledHorizontal => "doubled-h",
            Scheme::DoubledOffset => "doubled-offset",
        }
    }

    pub fn modes_per_cell(self) -> usize {
        match self {
            Scheme::TwoGrids => 1,
            _ => 2,
        }
    }

    /// Whether one spin species is encoded and copied for the other.
    pub fn duplicates_spin(self) -> bool {
        self != Scheme::Mixed
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Layout(format!("unknown scheme {s:?}")))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which edge operators are defined directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSet {
    /// Horizontal edges only: a one-dimensional chain.
    #[serde(rename = "chain")]
    Chain,
    #[serde(rename = "nn-square")]
    NNSquare,
    /// Square plus the up-right diagonal.
    #[serde(rename = "triangular")]
    Triangular,
    #[serde(rename = "nnn-square")]
    NNNSquare,
}

impl EdgeSet {
    pub const ALL: [EdgeSet; 4] = [
        EdgeSet::Chain,
        EdgeSet::NNSquare,
        EdgeSet::Triangular,
        EdgeSet::NNNSquare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeSet::Chain => "chain",
            EdgeSet::NNSquare => "nn-square",
            EdgeSet::Triangular => "triangular",
            EdgeSet::NNNSquare => "nnn-square",
        }
    }

    /// Edge directions, in generator search order.
    pub fn kinds(self) -> &'static [EdgeKind] {
        use EdgeKind::*;
        match self {
            EdgeSet::Chain => &[Right],
            EdgeSet::NNSquare => &[Right, Up],
            EdgeSet::Triangular => &[Right, Up, DiagUR],
            EdgeSet::NNNSquare => &[Right, Up, DiagUR, DiagUL],
        }
    }

    pub fn is_two_dimensional(self) -> bool {
        self != EdgeSet::Chain
    }
}

impl FromStr for EdgeSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EdgeSet::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Layout(format!("unknown edge set {s:?}")))
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Direction of a directly defined edge, in site coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Right,
    Up,
    DiagUR,
    DiagUL,
}

impl EdgeKind {
    pub fn direction(self) -> (i32, i32) {
        match self {
            EdgeKind::Right => (1, 0),
            EdgeKind::Up => (0, 1),
            EdgeKind::DiagUR => (1, 1),
            EdgeKind::DiagUL => (-1, 1),
        }
    }
}

/// A fermionic site: square-lattice position plus spin species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub spin: u8,
}

impl Site {
    pub fn offset(self, dx: i32, dy: i32) -> Site {
        Site {
            x: self.x + dx,
            y: self.y + dy,
            spin: self.spin,
        }
    }
}

/// A fermionic mode: mode slot within the unit cell at `cell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeRef {
    pub cell: Cell,
    pub mode: u8,
}

impl ModeRef {
    pub const fn new(cell: Cell, mode: u8) -> ModeRef {
        ModeRef { cell, mode }
    }
}

impl fmt::Display for ModeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode {} at {}", self.mode, self.cell)
    }
}

/// Unit-cell layout: qubit count, mode scheme and edge set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnitCellLayout {
    qubits_per_cell: usize,
    scheme: Scheme,
    edge_set: EdgeSet,
}

impl UnitCellLayout {
    pub fn new(qubits_per_cell: usize, scheme: Scheme, edge_set: EdgeSet) -> Result<Self> {
        if !(1..=MAX_QUBITS_PER_CELL).contains(&qubits_per_cell) {
            return Err(Error::Layout(format!(
                "qubits_per_cell must be in 1..={MAX_QUBITS_PER_CELL}, got {qubits_per_cell}"
            )));
        }
        debug_assert!(qubits_per_cell * WINDOW_CELLS <= MAX_SLOTS);
        let layout = UnitCellLayout {
            qubits_per_cell,
            scheme,
            edge_set,
        };
        for mode in 0..layout.modes_per_cell() as u8 {
            for &kind in edge_set.kinds() {
                let target = layout.edge_target(mode, kind);
                if !target.cell.in_window() {
                    return Err(Error::Layout(format!(
                        "{kind:?} edge of mode {mode} reaches cell {} outside the window under {scheme}",
                        target.cell
                    )));
                }
            }
        }
        Ok(layout)
    }

    #[inline]
    pub fn qubits_per_cell(&self) -> usize {
        self.qubits_per_cell
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edge_set
    }

    pub fn modes_per_cell(&self) -> usize {
        self.scheme.modes_per_cell()
    }

    /// Qubit slots in the window.
    #[inline]
    pub fn n_slots(&self) -> usize {
        self.qubits_per_cell * WINDOW_CELLS
    }

    /// Qubits per fermionic mode.
    pub fn qubit_ratio(&self) -> f64 {
        self.qubits_per_cell as f64 / self.modes_per_cell() as f64
    }

    pub fn site_of(&self, m: ModeRef) -> Site {
        let Cell { x, y } = m.cell;
        let k = m.mode as i32;
        match self.scheme {
            Scheme::TwoGrids => Site { x, y, spin: 0 },
            Scheme::Mixed => Site { x, y, spin: m.mode },
            Scheme::DoubledHorizontal => Site {
                x: 2 * x + k,
                y,
                spin: 0,
            },
            Scheme::DoubledOffset => Site {
                x: 2 * x + k,
                y: y + x,
                spin: 0,
            },
        }
    }

    pub fn mode_at(&self, s: Site) -> ModeRef {
        match self.scheme {
            Scheme::TwoGrids => ModeRef::new(Cell::new(s.x, s.y), 0),
            Scheme::Mixed => ModeRef::new(Cell::new(s.x, s.y), s.spin),
            Scheme::DoubledHorizontal => {
                ModeRef::new(Cell::new(s.x.div_euclid(2), s.y), s.x.rem_euclid(2) as u8)
            }
            Scheme::DoubledOffset => {
                let cx = s.x.div_euclid(2);
                ModeRef::new(Cell::new(cx, s.y - cx), s.x.rem_euclid(2) as u8)
            }
        }
    }

    /// Far endpoint of the `kind` edge leaving `mode` of the origin cell.
    pub fn edge_target(&self, mode: u8, kind: EdgeKind) -> ModeRef {
        let (dx, dy) = kind.direction();
        self.mode_at(self.site_of(ModeRef::new(Cell::ORIGIN, mode)).offset(dx, dy))
    }

    /// Generators in search order: per mode, the vertex then each edge kind.
    pub fn generators(&self) -> Vec<GeneratorId> {
        (0..self.modes_per_cell() as u8)
            .flat_map(|mode| {
                std::iter::once(GeneratorId::vertex(mode)).chain(
                    self.edge_set
                        .kinds()
                        .iter()
                        .map(move |&k| GeneratorId::edge(mode, k)),
                )
            })
            .collect()
    }

    /// Endpoints of generator `g` placed at `anchor`: one mode for a vertex, two for an edge.
    pub fn endpoints(&self, g: GeneratorId, anchor: Cell) -> (ModeRef, Option<ModeRef>) {
        let own = ModeRef::new(anchor, g.mode);
        match g.kind.edge_kind() {
            None => (own, None),
            Some(k) => {
                let t = self.edge_target(g.mode, k);
                (own, Some(ModeRef::new(t.cell + anchor, t.mode)))
            }
        }
    }

    /// Edge generator joining two modes and the anchor at which it sits.
    pub fn edge_between(&self, a: ModeRef, b: ModeRef) -> Option<(GeneratorId, Cell)> {
        let sa = self.site_of(a);
        let sb = self.site_of(b);
        if sa.spin != sb.spin {
            return None;
        }
        let d = (sb.x - sa.x, sb.y - sa.y);
        for &k in self.edge_set.kinds() {
            if k.direction() == d {
                return Some((GeneratorId::edge(a.mode, k), a.cell));
            }
            if k.direction() == (-d.0, -d.1) {
                return Some((GeneratorId::edge(b.mode, k), b.cell));
            }
        }
        None
    }

    // ---- window slot map -------------------------------------------------

    /// Position of window cell `(wx, wy)` in snake order: row 0 runs
    /// left-to-right, row 1 right-to-left, row 2 left-to-right.
    #[inline]
    pub fn snake_index(wx: usize, wy: usize) -> usize {
        let col = if wy % 2 == 0 { wx } else { WINDOW - 1 - wx };
        wy * WINDOW + col
    }

    /// Inverse of [`snake_index`](Self::snake_index).
    #[inline]
    pub fn snake_cell(index: usize) -> (usize, usize) {
        let wy = index / WINDOW;
        let col = index % WINDOW;
        let wx = if wy % 2 == 0 { col } else { WINDOW - 1 - col };
        (wx, wy)
    }

    /// Slot of qubit `local` in window cell `(wx, wy)`.
    pub fn slot_of(&self, wx: usize, wy: usize, local: usize) -> Result<usize> {
        if wx >= WINDOW || wy >= WINDOW {
            return Err(Error::OutsideWindow(wx as i32 - 1, wy as i32 - 1));
        }
        if local >= self.qubits_per_cell {
            return Err(Error::SlotOutOfRange {
                slot: local,
                n_slots: self.qubits_per_cell,
            });
        }
        Ok(Self::snake_index(wx, wy) * self.qubits_per_cell + local)
    }

    /// Slot of qubit `local` in lattice cell `cell`, if the cell is in the window.
    #[inline]
    pub fn slot_at(&self, cell: Cell, local: usize) -> Option<usize> {
        if !cell.in_window() || local >= self.qubits_per_cell {
            return None;
        }
        let (wx, wy) = cell.window_coords();
        Some(Self::snake_index(wx, wy) * self.qubits_per_cell + local)
    }

    /// Lattice cell and local index of a window slot.
    #[inline]
    pub fn cell_of_slot(&self, slot: usize) -> (Cell, usize) {
        let (wx, wy) = Self::snake_cell(slot / self.qubits_per_cell);
        (Cell::from_window(wx, wy), slot % self.qubits_per_cell)
    }

    /// Bit block of a window cell inside a slot mask.
    #[inline]
    pub fn cell_mask(&self, cell: Cell) -> u64 {
        match self.slot_at(cell, 0) {
            Some(s) => ((1u64 << self.qubits_per_cell) - 1) << s,
            None => 0,
        }
    }

    /// Mask of every slot carrying local index `local`.
    pub fn local_mask(&self, local: usize) -> u64 {
        (0..WINDOW_CELLS).fold(0, |m, i| m | 1u64 << (i * self.qubits_per_cell + local))
    }

    /// Bit `snake_index` set for every window cell touched by `mask`.
    pub fn cells_touched(&self, mask: u64) -> u16 {
        let block = (1u64 << self.qubits_per_cell) - 1;
        (0..WINDOW_CELLS).fold(0u16, |acc, i| {
            if mask >> (i * self.qubits_per_cell) & block != 0 {
                acc | 1 << i
            } else {
                acc
            }
        })
    }

    /// In-window cells supporting `a`, in lattice coordinates.
    pub fn support_cells(&self, a: &PauliWord) -> Vec<Cell> {
        let touched = self.cells_touched(a.support());
        (0..WINDOW_CELLS)
            .filter(|i| touched >> i & 1 == 1)
            .map(|i| {
                let (wx, wy) = Self::snake_cell(i);
                Cell::from_window(wx, wy)
            })
            .collect()
    }

    fn shift_mask(&self, mask: u64, shift: Cell, clip: bool) -> Option<u64> {
        let block = (1u64 << self.qubits_per_cell) - 1;
        let mut out = 0u64;
        for i in 0..WINDOW_CELLS {
            let bits = mask >> (i * self.qubits_per_cell) & block;
            if bits == 0 {
                continue;
            }
            let (wx, wy) = Self::snake_cell(i);
            let dest = Cell::from_window(wx, wy) + shift;
            match self.slot_at(dest, 0) {
                Some(s) => out |= bits << s,
                None if clip => {}
                None => return None,
            }
        }
        Some(out)
    }

    /// Translate by whole cells; `None` when any supported slot would leave the window.
    pub fn translate_word(&self, a: &PauliWord, shift: Cell) -> Option<PauliWord> {
        debug_assert_eq!(a.n_slots(), self.n_slots());
        let x = self.shift_mask(a.x_mask(), shift, false)?;
        let z = self.shift_mask(a.z_mask(), shift, false)?;
        Some(PauliWord::from_masks_unchecked(x, z, self.n_slots()))
    }

    /// Translate by whole cells, dropping whatever leaves the window.
    ///
    /// The commutation parity of an in-window word with the true translate
    /// equals its parity with the clipped translate.
    pub fn translate_clipped(&self, a: &PauliWord, shift: Cell) -> PauliWord {
        let x = self.shift_mask(a.x_mask(), shift, true).unwrap_or(0);
        let z = self.shift_mask(a.z_mask(), shift, true).unwrap_or(0);
        PauliWord::from_masks_unchecked(x, z, self.n_slots())
    }
}

impl fmt::Display for UnitCellLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} / {} / {} qubit(s) per cell",
            self.scheme, self.edge_set, self.qubits_per_cell
        )
    }
}

/// Shifts `s` with `|s| <= 2` per axis for which `a` and `b + s` share a cell.
pub fn overlapping_shifts(a_cells: &[Cell], b_cells: &[Cell]) -> Vec<Cell> {
    all_shifts()
        .filter(|&s| a_cells.iter().any(|&ca| b_cells.iter().any(|&cb| cb + s == ca)))
        .collect()
}

/// A phase-free Pauli operator on the infinite lattice, keyed by cell.
///
/// Products of translated generator images (stabilizers, hopping terms,
/// composite edges) can outgrow the 3×3 window; this type holds them.
/// Each cell stores `(x_bits, z_bits)` over its local qubits.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellPauli {
    cells: BTreeMap<Cell, (u8, u8)>,
}

impl CellPauli {
    pub fn identity() -> Self {
        CellPauli::default()
    }

    /// Lift a window word, with the window centred on the origin.
    pub fn from_window(a: &PauliWord, layout: &UnitCellLayout) -> Self {
        let n_c = layout.qubits_per_cell();
        let block = (1u64 << n_c) - 1;
        let mut cells = BTreeMap::new();
        for i in 0..WINDOW_CELLS {
            let x = (a.x_mask() >> (i * n_c) & block) as u8;
            let z = (a.z_mask() >> (i * n_c) & block) as u8;
            if x | z != 0 {
                let (wx, wy) = UnitCellLayout::snake_cell(i);
                cells.insert(Cell::from_window(wx, wy), (x, z));
            }
        }
        CellPauli { cells }
    }

    /// Window word for the operator translated by `-center`; `None` if it does not fit.
    pub fn to_window_at(&self, layout: &UnitCellLayout, center: Cell) -> Option<PauliWord> {
        let mut x = 0u64;
        let mut z = 0u64;
        for (&c, &(cx, cz)) in &self.cells {
            let s = layout.slot_at(c - center, 0)?;
            x |= (cx as u64) << s;
            z |= (cz as u64) << s;
        }
        Some(PauliWord::from_masks_unchecked(x, z, layout.n_slots()))
    }

    pub fn to_window(&self, layout: &UnitCellLayout) -> Option<PauliWord> {
        self.to_window_at(layout, Cell::ORIGIN)
    }

    /// The part of the operator (translated by `-center`) inside the window.
    pub fn clip_to_window(&self, layout: &UnitCellLayout, center: Cell) -> PauliWord {
        let mut x = 0u64;
        let mut z = 0u64;
        for (&c, &(cx, cz)) in &self.cells {
            if let Some(s) = layout.slot_at(c - center, 0) {
                x |= (cx as u64) << s;
                z |= (cz as u64) << s;
            }
        }
        PauliWord::from_masks_unchecked(x, z, layout.n_slots())
    }

    pub fn translate(&self, shift: Cell) -> CellPauli {
        CellPauli {
            cells: self.cells.iter().map(|(&c, &v)| (c + shift, v)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.cells
            .values()
            .map(|&(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn anticommutes(&self, other: &CellPauli) -> bool {
        let (small, big) = if self.cells.len() <= other.cells.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut parity = 0u32;
        for (c, &(ax, az)) in &small.cells {
            if let Some(&(bx, bz)) = big.cells.get(c) {
                parity ^= (ax & bz).count_ones() ^ (az & bx).count_ones();
            }
        }
        parity & 1 == 1
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.keys().copied()
    }

    pub fn get(&self, cell: Cell) -> (u8, u8) {
        self.cells.get(&cell).copied().unwrap_or((0, 0))
    }

    pub fn set_cell(&mut self, cell: Cell, x: u8, z: u8) {
        if x | z == 0 {
            self.cells.remove(&cell);
        } else {
            self.cells.insert(cell, (x, z));
        }
    }

    /// `(cell, local, letter)` over the support, ordered by cell then local index.
    pub fn qubits(&self) -> impl Iterator<Item = (Cell, usize, Letter)> + '_ {
        self.cells.iter().flat_map(|(&c, &(x, z))| {
            (0..8).filter_map(move |q| {
                let l = Letter::from_bits(x >> q & 1 == 1, z >> q & 1 == 1);
                (l != Letter::I).then_some((c, q, l))
            })
        })
    }

    /// Largest Chebyshev radius of any supported cell.
    pub fn radius(&self) -> i32 {
        self.cells.keys().map(|c| c.radius()).max().unwrap_or(0)
    }
}

impl Mul for &CellPauli {
    type Output = CellPauli;
    fn mul(self, rhs: &CellPauli) -> CellPauli {
        let mut out = self.clone();
        for (&c, &(x, z)) in &rhs.cells {
            let (ox, oz) = out.get(c);
            out.set_cell(c, ox ^ x, oz ^ z);
        }
        out
    }
}

impl fmt::Debug for CellPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellPauli[")?;
        for (i, (c, q, l)) in self.qubits().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}:{q}:{l}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn layout(n_c: usize) -> UnitCellLayout {
        UnitCellLayout::new(n_c, Scheme::TwoGrids, EdgeSet::NNSquare).unwrap()
    }

    /// Independent enumeration of the snake order.
    fn snake_enumeration(n_c: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for wy in 0..3 {
            let xs: Vec<usize> = if wy % 2 == 0 { vec![0, 1, 2] } else { vec![2, 1, 0] };
            for wx in xs {
                for l in 0..n_c {
                    out.push((wx, wy, l));
                }
            }
        }
        out
    }

    #[test]
    fn slot_of_examples() {
        let l = layout(6);
        let order = snake_enumeration(6);
        assert_eq!(l.slot_of(0, 0, 0).unwrap(), 0);
        let idx = order.iter().position(|&t| t == (1, 0, 2)).unwrap();
        assert_eq!(idx, 8);
        assert_eq!(l.slot_of(1, 0, 2).unwrap(), idx);
        let idx = order.iter().position(|&t| t == (0, 1, 0)).unwrap();
        assert_eq!(idx, 30);
        assert_eq!(l.slot_of(0, 1, 0).unwrap(), idx);
        assert!(matches!(l.slot_of(3, 0, 0), Err(Error::OutsideWindow(..))));
        assert!(l.slot_of(0, 0, 6).is_err());
    }

    #[test]
    fn slot_map_is_bijective() {
        for n_c in 1..=6 {
            let l = layout(n_c);
            let mut seen = vec![false; l.n_slots()];
            for wy in 0..3 {
                for wx in 0..3 {
                    for q in 0..n_c {
                        let s = l.slot_of(wx, wy, q).unwrap();
                        assert!(!seen[s]);
                        seen[s] = true;
                        assert_eq!(l.cell_of_slot(s), (Cell::from_window(wx, wy), q));
                    }
                }
            }
            assert!(seen.into_iter().all(|b| b));
        }
    }

    #[test]
    fn translate_examples() {
        let l = layout(2);
        let id = PauliWord::identity(l.n_slots());
        assert_eq!(l.translate_word(&id, Cell::new(2, -1)), Some(id));

        let s = l.slot_at(Cell::ORIGIN, 1).unwrap();
        let a = PauliWord::single(s, Letter::Y, l.n_slots()).unwrap();
        let b = l.translate_word(&a, Cell::new(1, 0)).unwrap();
        assert_eq!(l.translate_word(&b, Cell::new(-1, 0)), Some(a));

        let mut w = PauliWord::identity(l.n_slots());
        w.set(l.slot_at(Cell::new(0, 0), 0).unwrap(), Letter::X).unwrap();
        w.set(l.slot_at(Cell::new(1, 0), 0).unwrap(), Letter::Z).unwrap();
        assert_eq!(l.translate_word(&w, Cell::new(1, 0)), None);
        let clipped = l.translate_clipped(&w, Cell::new(1, 0));
        assert_eq!(clipped.weight(), 1);
    }

    #[test]
    fn overlapping_shift_examples() {
        let c = |x, y| Cell::from_window(x, y);
        assert_eq!(overlapping_shifts(&[c(1, 1)], &[c(1, 1)]), vec![Cell::ORIGIN]);
        let mut got = overlapping_shifts(&[c(1, 1)], &[c(1, 1), c(2, 1)]);
        got.sort();
        let mut want = vec![Cell::new(0, 0), Cell::new(-1, 0)];
        want.sort();
        assert_eq!(got, want);
        let full: Vec<Cell> = (0..3).flat_map(|y| (0..3).map(move |x| c(x, y))).collect();
        assert_eq!(overlapping_shifts(&full, &full).len(), 25);
    }

    #[test]
    fn layouts_reject_out_of_window_edges() {
        assert!(UnitCellLayout::new(2, Scheme::DoubledOffset, EdgeSet::NNNSquare).is_err());
        assert!(UnitCellLayout::new(2, Scheme::DoubledOffset, EdgeSet::Triangular).is_ok());
        assert!(UnitCellLayout::new(0, Scheme::TwoGrids, EdgeSet::NNSquare).is_err());
        assert!(UnitCellLayout::new(7, Scheme::TwoGrids, EdgeSet::NNSquare).is_err());
        for s in Scheme::ALL {
            for e in EdgeSet::ALL {
                if let Ok(l) = UnitCellLayout::new(3, s, e) {
                    assert_eq!(l.modes_per_cell(), if s == Scheme::TwoGrids { 1 } else { 2 });
                }
            }
        }
    }

    #[test]
    fn site_mode_maps_are_inverse() {
        for s in Scheme::ALL {
            let l = UnitCellLayout::new(1, s, EdgeSet::NNSquare).unwrap();
            for x in -3..=3 {
                for y in -3..=3 {
                    for m in 0..l.modes_per_cell() as u8 {
                        let mr = ModeRef::new(Cell::new(x, y), m);
                        assert_eq!(l.mode_at(l.site_of(mr)), mr);
                    }
                }
            }
        }
    }

    #[test]
    fn doubled_horizontal_edges() {
        let l = UnitCellLayout::new(2, Scheme::DoubledHorizontal, EdgeSet::NNSquare).unwrap();
        assert_eq!(l.edge_target(0, EdgeKind::Right), ModeRef::new(Cell::ORIGIN, 1));
        assert_eq!(l.edge_target(1, EdgeKind::Right), ModeRef::new(Cell::new(1, 0), 0));
        assert_eq!(l.edge_target(0, EdgeKind::Up), ModeRef::new(Cell::new(0, 1), 0));
        let o = UnitCellLayout::new(2, Scheme::DoubledOffset, EdgeSet::NNSquare).unwrap();
        assert_eq!(o.edge_target(1, EdgeKind::Right), ModeRef::new(Cell::new(1, -1), 0));
    }

    #[test]
    fn cell_pauli_window_round_trip() {
        let l = layout(3);
        let w = PauliWord::parse("X0 Z5 Y26", l.n_slots()).unwrap();
        let c = CellPauli::from_window(&w, &l);
        assert_eq!(c.weight(), 3);
        assert_eq!(c.to_window(&l), Some(w));
        assert_eq!(c.translate(Cell::new(2, 0)).to_window(&l), None);
    }

    fn word(n: usize) -> impl Strategy<Value = PauliWord> {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliWord::from_masks(x & mask, z & mask, n).unwrap())
    }

    proptest! {
        #[test]
        fn translation_preserves_weight(a in word(18), dx in -2i32..=2, dy in -2i32..=2) {
            let l = layout(2);
            if let Some(b) = l.translate_word(&a, Cell::new(dx, dy)) {
                prop_assert_eq!(b.weight(), a.weight());
                prop_assert_eq!(l.translate_word(&b, Cell::new(-dx, dy * -1)), Some(a));
            }
        }

        #[test]
        fn overlap_shifts_antisymmetric(a in word(18), b in word(18)) {
            let l = layout(2);
            let ca = l.support_cells(&a);
            let cb = l.support_cells(&b);
            let mut fwd: Vec<Cell> = overlapping_shifts(&ca, &cb).into_iter().map(|s| -s).collect();
            let mut back = overlapping_shifts(&cb, &ca);
            fwd.sort();
            back.sort();
            prop_assert_eq!(fwd, back);
        }

        #[test]
        fn clipped_parity_matches_lattice_parity(a in word(18), b in word(18), dx in -2i32..=2, dy in -2i32..=2) {
            let l = layout(2);
            let s = Cell::new(dx, dy);
            let lifted = CellPauli::from_window(&a, &l).anticommutes(&CellPauli::from_window(&b, &l).translate(s));
            prop_assert_eq!(a.anticommutes(&l.translate_clipped(&b, s)), lifted);
        }
    }
}
