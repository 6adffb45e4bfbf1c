//! Majorana monomials, edge/vertex generators and the Fermi-Hubbard terms
//! expressed through them.
//!
//! With `V_i = -iγ_iγ̄_i` and `E_ij = -iγ_iγ_j`, the commutation parity of two
//! generators is the Majorana symplectic form `aᵀ(I + C₁)b`: an edge
//! anticommutes with the vertices at its endpoints and with every edge
//! sharing exactly one endpoint; everything else commutes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{Cell, CellPauli, EdgeKind, EdgeSet, ModeRef, UnitCellLayout, MAX_SHIFT};

/// Role of a generator within the unit cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    Vertex,
    EdgeRight,
    EdgeUp,
    EdgeDiagUR,
    EdgeDiagUL,
}

impl GeneratorKind {
    pub fn edge_kind(self) -> Option<EdgeKind> {
        match self {
            GeneratorKind::Vertex => None,
            GeneratorKind::EdgeRight => Some(EdgeKind::Right),
            GeneratorKind::EdgeUp => Some(EdgeKind::Up),
            GeneratorKind::EdgeDiagUR => Some(EdgeKind::DiagUR),
            GeneratorKind::EdgeDiagUL => Some(EdgeKind::DiagUL),
        }
    }

    pub fn from_edge(k: EdgeKind) -> Self {
        match k {
            EdgeKind::Right => GeneratorKind::EdgeRight,
            EdgeKind::Up => GeneratorKind::EdgeUp,
            EdgeKind::DiagUR => GeneratorKind::EdgeDiagUR,
            EdgeKind::DiagUL => GeneratorKind::EdgeDiagUL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Vertex => "vertex",
            GeneratorKind::EdgeRight => "right",
            GeneratorKind::EdgeUp => "up",
            GeneratorKind::EdgeDiagUR => "diag-ur",
            GeneratorKind::EdgeDiagUL => "diag-ul",
        }
    }
}

/// A fermionic generator of the unit cell: a vertex, or an edge leaving `mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId {
    pub kind: GeneratorKind,
    pub mode: u8,
}

impl GeneratorId {
    pub const fn vertex(mode: u8) -> Self {
        GeneratorId {
            kind: GeneratorKind::Vertex,
            mode,
        }
    }

    pub fn edge(mode: u8, k: EdgeKind) -> Self {
        GeneratorId {
            kind: GeneratorKind::from_edge(k),
            mode,
        }
    }

    pub fn is_vertex(self) -> bool {
        self.kind == GeneratorKind::Vertex
    }
}

/// Renders as `kind/mode`, e.g. `right/0`.
impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind.name(), self.mode)
    }
}

impl FromStr for GeneratorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Document(format!("bad generator name {s:?}"));
        let (kind, mode) = s.split_once('/').ok_or_else(bad)?;
        let kind = [
            GeneratorKind::Vertex,
            GeneratorKind::EdgeRight,
            GeneratorKind::EdgeUp,
            GeneratorKind::EdgeDiagUR,
            GeneratorKind::EdgeDiagUL,
        ]
        .into_iter()
        .find(|k| k.name() == kind)
        .ok_or_else(bad)?;
        let mode = mode.parse().map_err(|_| bad())?;
        Ok(GeneratorId { kind, mode })
    }
}

/// A Majorana monomial over `m` modes: bit `j` is `γ_j`, bit `j + m` is `γ̄_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MajoranaWord {
    bits: Vec<u64>,
    m: usize,
}

impl MajoranaWord {
    pub fn identity(m: usize) -> Self {
        MajoranaWord {
            bits: vec![0; (2 * m).div_ceil(64)],
            m,
        }
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    fn flip(&mut self, i: usize) {
        debug_assert!(i < 2 * self.m);
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    /// Multiply by `γ_j`.
    pub fn with_gamma(mut self, j: usize) -> Self {
        self.flip(j);
        self
    }

    /// Multiply by `γ̄_j`.
    pub fn with_gamma_bar(mut self, j: usize) -> Self {
        self.flip(j + self.m);
        self
    }

    pub fn vertex(j: usize, m: usize) -> Self {
        MajoranaWord::identity(m).with_gamma(j).with_gamma_bar(j)
    }

    pub fn edge(i: usize, j: usize, m: usize) -> Self {
        MajoranaWord::identity(m).with_gamma(i).with_gamma(j)
    }

    pub fn degree(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn product(&self, other: &MajoranaWord) -> Result<MajoranaWord> {
        if self.m != other.m {
            return Err(Error::ModeMismatch(self.m, other.m));
        }
        Ok(MajoranaWord {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
            m: self.m,
        })
    }
}

/// Parity of `aᵀ(I + C₁)b`: the overlap parity XOR the product of the degrees.
pub fn majorana_commute_parity(a: &MajoranaWord, b: &MajoranaWord) -> Result<u8> {
    if a.m != b.m {
        return Err(Error::ModeMismatch(a.m, b.m));
    }
    let overlap: u32 = a
        .bits
        .iter()
        .zip(&b.bits)
        .map(|(x, y)| (x & y).count_ones())
        .sum();
    Ok(((overlap as usize + a.degree() * b.degree()) & 1) as u8)
}

/// Radius, in cells, of the Majorana window used for required parities.
const MAJORANA_RADIUS: i32 = MAX_SHIFT + 1;

/// Mode index of `m` within the Majorana window, if it fits.
fn majorana_index(layout: &UnitCellLayout, m: ModeRef) -> Option<usize> {
    let side = (2 * MAJORANA_RADIUS + 1) as usize;
    if m.cell.radius() > MAJORANA_RADIUS {
        return None;
    }
    let cx = (m.cell.x + MAJORANA_RADIUS) as usize;
    let cy = (m.cell.y + MAJORANA_RADIUS) as usize;
    Some((cy * side + cx) * layout.modes_per_cell() + m.mode as usize)
}

fn majorana_modes(layout: &UnitCellLayout) -> usize {
    let side = (2 * MAJORANA_RADIUS + 1) as usize;
    side * side * layout.modes_per_cell()
}

/// Majorana monomial of generator `g` anchored at `at`.
pub fn generator_majorana(layout: &UnitCellLayout, g: GeneratorId, at: Cell) -> Result<MajoranaWord> {
    let m = majorana_modes(layout);
    let (a, b) = layout.endpoints(g, at);
    let idx = |r: ModeRef| majorana_index(layout, r).ok_or(Error::OutsideWindow(r.cell.x, r.cell.y));
    let i = idx(a)?;
    Ok(match b {
        None => MajoranaWord::vertex(i, m),
        Some(b) => MajoranaWord::edge(i, idx(b)?, m),
    })
}

/// Commutation parity the fermionic algebra demands between `a` at `at_a`
/// and `b` at `at_b`.
pub fn edge_vertex_required_parity(
    layout: &UnitCellLayout,
    a: GeneratorId,
    at_a: Cell,
    b: GeneratorId,
    at_b: Cell,
) -> Result<u8> {
    for at in [at_a, at_b] {
        if at.radius() > MAX_SHIFT {
            return Err(Error::OutsideWindow(at.x, at.y));
        }
    }
    majorana_commute_parity(
        &generator_majorana(layout, a, at_a)?,
        &generator_majorana(layout, b, at_b)?,
    )
}

/// Anything that can hand out translated generator images.
pub trait ImageSource {
    fn layout(&self) -> &UnitCellLayout;
    /// Image of `g` anchored at the origin, if assigned.
    fn image(&self, g: GeneratorId) -> Option<&CellPauli>;

    fn image_at(&self, g: GeneratorId, at: Cell) -> Result<CellPauli> {
        self.image(g)
            .map(|p| p.translate(at))
            .ok_or_else(|| Error::MissingEdge(g.to_string(), format!("unassigned at {at}")))
    }
}

/// Image of the edge operator joining two adjacent modes.
fn direct_edge<S: ImageSource + ?Sized>(src: &S, a: ModeRef, b: ModeRef) -> Result<CellPauli> {
    match src.layout().edge_between(a, b) {
        Some((g, at)) => src.image_at(g, at),
        None => Err(Error::MissingEdge(a.to_string(), b.to_string())),
    }
}

/// Product of the edge images along `path`.
///
/// A two-vertex path returns that edge's image unchanged.
pub fn composite_edge<S: ImageSource + ?Sized>(src: &S, path: &[ModeRef]) -> Result<CellPauli> {
    if path.len() < 2 {
        return Err(Error::ShortPath);
    }
    let mut acc = CellPauli::identity();
    for pair in path.windows(2) {
        acc = &acc * &direct_edge(src, pair[0], pair[1])?;
    }
    Ok(acc)
}

/// Product of the edge images around a closed cycle (first vertex repeated at the end).
pub fn loop_stabilizer<S: ImageSource + ?Sized>(src: &S, cycle: &[ModeRef]) -> Result<CellPauli> {
    if cycle.len() < 2 {
        return Err(Error::ShortPath);
    }
    if cycle.first() != cycle.last() {
        return Err(Error::OpenPath);
    }
    composite_edge(src, cycle)
}

/// Candidate vertex paths realising an edge between `j` and `k`.
fn edge_paths(layout: &UnitCellLayout, j: ModeRef, k: ModeRef) -> Vec<Vec<ModeRef>> {
    if layout.edge_between(j, k).is_some() {
        return vec![vec![j, k]];
    }
    let sj = layout.site_of(j);
    let sk = layout.site_of(k);
    let (dx, dy) = (sk.x - sj.x, sk.y - sj.y);
    if sj.spin != sk.spin || dx.abs() != 1 || dy.abs() != 1 {
        return Vec::new();
    }
    [sj.offset(dx, 0), sj.offset(0, dy)]
        .into_iter()
        .map(|mid| vec![j, layout.mode_at(mid), k])
        .filter(|p| p.windows(2).all(|w| layout.edge_between(w[0], w[1]).is_some()))
        .collect()
}

/// The two Pauli products `V_k·E_jk` and `V_j·E_jk` of the hopping between
/// `j` and `k`.
///
/// Missing diagonal edges are composed along an L-shaped path; of the two
/// such paths the one with the lighter hopping term is used.
pub fn hopping_pauli_terms<S: ImageSource + ?Sized>(
    src: &S,
    j: ModeRef,
    k: ModeRef,
) -> Result<(CellPauli, CellPauli)> {
    let layout = src.layout();
    let vj = src.image_at(GeneratorId::vertex(j.mode), j.cell)?;
    let vk = src.image_at(GeneratorId::vertex(k.mode), k.cell)?;
    let mut best: Option<(usize, (CellPauli, CellPauli))> = None;
    for path in edge_paths(layout, j, k) {
        let e = composite_edge(src, &path)?;
        let terms = (&vk * &e, &vj * &e);
        let w = terms.0.weight().max(terms.1.weight());
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, terms));
        }
    }
    best.map(|(_, t)| t)
        .ok_or_else(|| Error::MissingEdge(j.to_string(), k.to_string()))
}

/// A logical operator spread over one or two spin copies of the qubit lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermImage {
    /// One entry per copy; duplicated-spin on-site terms use two.
    pub copies: Vec<CellPauli>,
}

impl TermImage {
    pub fn single(p: CellPauli) -> Self {
        TermImage { copies: vec![p] }
    }

    pub fn weight(&self) -> usize {
        self.copies.iter().map(CellPauli::weight).sum()
    }
}

/// The `V_up·V_down` part of the density-density term of mode `mode`'s site.
///
/// For spin-duplicating schemes the two vertices sit on separate copies of
/// the lattice; for the mixed scheme both modes share the cell.
pub fn onsite_pauli_term<S: ImageSource + ?Sized>(src: &S, site: ModeRef) -> Result<TermImage> {
    let layout = src.layout();
    let v = src.image_at(GeneratorId::vertex(site.mode), site.cell)?;
    if layout.scheme().duplicates_spin() {
        return Ok(TermImage {
            copies: vec![v.clone(), v],
        });
    }
    if layout.modes_per_cell() < 2 {
        return Err(Error::MissingSpinMode);
    }
    let other = 1 - site.mode;
    let w = src.image_at(GeneratorId::vertex(other), site.cell)?;
    Ok(TermImage::single(&v * &w))
}

/// Fermi-Hubbard parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub t: f64,
    pub t_prime: f64,
    pub u: f64,
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        HamiltonianSpec {
            t: 1.0,
            t_prime: 0.0,
            u: 1.0,
        }
    }
}

impl HamiltonianSpec {
    pub fn includes_nnn(&self) -> bool {
        self.t_prime != 0.0
    }
}

/// One distinct logical term of the Hamiltonian, anchored at the origin cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermDescriptor {
    Hopping { from: ModeRef, to: ModeRef, nnn: bool },
    /// Density-density term of the site hosting `mode` in the origin cell.
    OnSite { mode: u8 },
}

impl TermDescriptor {
    pub fn is_nnn(&self) -> bool {
        matches!(self, TermDescriptor::Hopping { nnn: true, .. })
    }
}

const NN_DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const NNN_DIRS: [(i32, i32); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Logical terms for a layout: directed NN hoppings per mode, on-site terms,
/// and optionally the directed NNN hoppings.
pub fn hamiltonian_terms(layout: &UnitCellLayout, include_nnn: bool) -> Vec<TermDescriptor> {
    let modes = layout.modes_per_cell() as u8;
    let two_d = layout.edge_set().is_two_dimensional();
    let hops = |dirs: &[(i32, i32)], nnn: bool| -> Vec<TermDescriptor> {
        (0..modes)
            .flat_map(|mode| {
                let from = ModeRef::new(Cell::ORIGIN, mode);
                let s = layout.site_of(from);
                dirs.iter()
                    .filter(move |&&(_, dy)| two_d || dy == 0)
                    .map(move |&(dx, dy)| TermDescriptor::Hopping {
                        from,
                        to: layout.mode_at(s.offset(dx, dy)),
                        nnn,
                    })
            })
            .collect()
    };
    let mut out = hops(&NN_DIRS, false);
    let onsite_modes: Vec<u8> = if layout.scheme().duplicates_spin() {
        (0..modes).collect()
    } else {
        vec![0]
    };
    out.extend(onsite_modes.into_iter().map(|mode| TermDescriptor::OnSite { mode }));
    if include_nnn && two_d {
        out.extend(hops(&NNN_DIRS, true));
    }
    out
}

/// Distinct logical terms required by `spec` on `layout`.
pub fn enumerate_hamiltonian_terms(spec: &HamiltonianSpec, layout: &UnitCellLayout) -> Vec<TermDescriptor> {
    hamiltonian_terms(layout, spec.includes_nnn())
}

/// Pauli images of a term: both products for a hopping, one for on-site.
pub fn term_images<S: ImageSource + ?Sized>(src: &S, term: &TermDescriptor) -> Result<Vec<TermImage>> {
    match *term {
        TermDescriptor::Hopping { from, to, .. } => {
            let (a, b) = hopping_pauli_terms(src, from, to)?;
            Ok(vec![TermImage::single(a), TermImage::single(b)])
        }
        TermDescriptor::OnSite { mode } => Ok(vec![onsite_pauli_term(src, ModeRef::new(Cell::ORIGIN, mode))?]),
    }
}

/// Weight of a term: the heavier of the two hopping products, or the on-site weight.
pub fn term_weight<S: ImageSource + ?Sized>(src: &S, term: &TermDescriptor) -> Result<usize> {
    Ok(term_images(src, term)?
        .iter()
        .map(TermImage::weight)
        .max()
        .unwrap_or(0))
}

/// Closed vertex cycles whose images generate the stabilizers, anchored at
/// each mode of the origin cell.
pub fn stabilizer_cycles(layout: &UnitCellLayout) -> Vec<Vec<ModeRef>> {
    let faces: &[&[(i32, i32)]] = match layout.edge_set() {
        EdgeSet::Chain => &[],
        EdgeSet::NNSquare => &[&[(0, 0), (1, 0), (1, 1), (0, 1)]],
        EdgeSet::Triangular => &[&[(0, 0), (1, 0), (1, 1)], &[(0, 0), (1, 1), (0, 1)]],
        EdgeSet::NNNSquare => &[
            &[(0, 0), (1, 0), (1, 1)],
            &[(0, 0), (1, 1), (0, 1)],
            &[(0, 0), (1, 0), (0, 1)],
            &[(1, 0), (1, 1), (0, 1)],
        ],
    };
    let mut out = Vec::new();
    for mode in 0..layout.modes_per_cell() as u8 {
        let base = layout.site_of(ModeRef::new(Cell::ORIGIN, mode));
        for face in faces {
            let mut cycle: Vec<ModeRef> = face
                .iter()
                .map(|&(dx, dy)| layout.mode_at(base.offset(dx, dy)))
                .collect();
            cycle.push(cycle[0]);
            out.push(cycle);
        }
    }
    out
}
