//! Small hand-built encodings used by tests, benches and examples.

use crate::encoding::EncodingCandidate;
use crate::fermion::GeneratorId;
use crate::lattice::{Cell, CellPauli, EdgeKind, EdgeSet, Scheme, UnitCellLayout};
use crate::symplectic::{Letter, PauliWord};

fn word(layout: &UnitCellLayout, qubits: &[((i32, i32), usize, Letter)]) -> PauliWord {
    let mut w = PauliWord::identity(layout.n_slots());
    for &((x, y), q, l) in qubits {
        let slot = layout.slot_at(Cell::new(x, y), q).expect("fixture qubit inside the window");
        w.set(slot, l).expect("slot in range");
    }
    w
}

/// Jordan-Wigner on a line, one qubit per site, one copy per spin.
///
/// With `γ_j = Z…Z X_j` and `γ̄_j = Z…Z Y_j`, the strings cancel:
/// `V_j = Z_j` and `E_{j,j+1} ∝ γ_jγ_{j+1} = Y_j X_{j+1}`.
pub fn jordan_wigner_chain() -> EncodingCandidate {
    use Letter::*;
    let layout = UnitCellLayout::new(1, Scheme::TwoGrids, EdgeSet::Chain).expect("valid layout");
    let gens = [
        (GeneratorId::vertex(0), word(&layout, &[((0, 0), 0, Z)])),
        (
            GeneratorId::edge(0, EdgeKind::Right),
            word(&layout, &[((0, 0), 0, Y), ((1, 0), 0, X)]),
        ),
    ];
    EncodingCandidate::new(layout, gens).expect("fixture fits")
}

/// Majorana pair `(γ_j, γ̄_j)` of the Jordan-Wigner chain for site `j`,
/// with the `Z` string starting at site `origin`.
pub fn jordan_wigner_majoranas(j: i32, origin: i32) -> (CellPauli, CellPauli) {
    let mut g = CellPauli::identity();
    for k in origin..j {
        g.set_cell(Cell::new(k, 0), 0, 1);
    }
    let mut gb = g.clone();
    g.set_cell(Cell::new(j, 0), 1, 0);
    gb.set_cell(Cell::new(j, 0), 1, 1);
    (g, gb)
}

/// Qubits on the edges of the square lattice whose faces host the modes:
/// local 0 is the left edge of a face, local 1 its bottom edge.
///
/// Vertices are the four `Z`s around a face; each edge operator is `X` on
/// the crossed lattice edge dressed with `Z`s that fix the mutual
/// anticommutation of adjacent edges.
pub fn edge_qubit_square() -> EncodingCandidate {
    use Letter::*;
    let layout = UnitCellLayout::new(2, Scheme::TwoGrids, EdgeSet::NNSquare).expect("valid layout");
    let gens = [
        (
            GeneratorId::vertex(0),
            word(&layout, &[((0, 0), 0, Z), ((1, 0), 0, Z), ((0, 0), 1, Z), ((0, 1), 1, Z)]),
        ),
        (
            GeneratorId::edge(0, EdgeKind::Right),
            word(&layout, &[((1, 0), 0, X), ((0, 0), 0, Z), ((0, 0), 1, Z), ((1, 0), 1, Z)]),
        ),
        (
            GeneratorId::edge(0, EdgeKind::Up),
            word(&layout, &[((0, 1), 1, X), ((0, 0), 1, Z), ((1, 0), 0, Z), ((0, 0), 0, Z)]),
        ),
    ];
    EncodingCandidate::new(layout, gens).expect("fixture fits")
}

/// A distance-2 square-lattice encoding with two qubits per site.
///
/// Local 0 carries a horizontal Jordan-Wigner chain; local 1 is an
/// auxiliary qubit per site that dresses the vertical edges so that every
/// single-qubit error anticommutes with some plaquette stabilizer.
pub fn distance_two_square() -> EncodingCandidate {
    use Letter::*;
    let layout = UnitCellLayout::new(2, Scheme::TwoGrids, EdgeSet::NNSquare).expect("valid layout");
    let gens = [
        (GeneratorId::vertex(0), word(&layout, &[((-1, -1), 1, Z), ((0, 0), 0, Z)])),
        (
            GeneratorId::edge(0, EdgeKind::Right),
            word(&layout, &[((0, 0), 0, X), ((1, 0), 0, Y)]),
        ),
        (
            GeneratorId::edge(0, EdgeKind::Up),
            word(&layout, &[((-1, -1), 1, Y), ((-1, 0), 1, X), ((0, 0), 0, Z), ((0, 1), 0, Z)]),
        ),
    ];
    EncodingCandidate::new(layout, gens).expect("fixture fits")
}

/// Re-target a square-lattice encoding to `edge_set`, defining each
/// diagonal edge as the product of the two straight edges along one of
/// its L-shaped paths (the first that fits the window).
///
/// The result is valid whenever `enc` is; its triangle loops are trivial.
pub fn with_composite_diagonals(enc: &EncodingCandidate, edge_set: EdgeSet) -> crate::error::Result<EncodingCandidate> {
    use crate::fermion::composite_edge;
    use crate::lattice::ModeRef;
    let old = enc.layout();
    let layout = UnitCellLayout::new(old.qubits_per_cell(), old.scheme(), edge_set)?;
    let mut gens: Vec<(GeneratorId, PauliWord)> = Vec::new();
    for g in layout.generators() {
        if let Some(w) = enc.generator(g) {
            gens.push((g, *w));
            continue;
        }
        let kind = g.kind.edge_kind().ok_or(crate::error::Error::ShortPath)?;
        let (dx, dy) = kind.direction();
        let at = |x, y| ModeRef::new(Cell::new(x, y), g.mode);
        let paths = [
            [at(0, 0), at(dx, 0), at(dx, dy)],
            [at(0, 0), at(0, dy), at(dx, dy)],
        ];
        let w = paths
            .iter()
            .filter_map(|p| composite_edge(enc, p).ok())
            .find_map(|c| c.to_window(&layout))
            .ok_or_else(|| crate::error::Error::MissingEdge(at(0, 0).to_string(), at(dx, dy).to_string()))?;
        gens.push((g, w));
    }
    EncodingCandidate::new(layout, gens)
}

/// `X ↔ Z`; `None` for letters the swap leaves alone.
pub fn swap_xz(l: Letter) -> Option<Letter> {
    match l {
        Letter::X => Some(Letter::Z),
        Letter::Z => Some(Letter::X),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::validate;
    use crate::fermion::ImageSource;

    #[test]
    fn chain_images_follow_from_majoranas() {
        let enc = jordan_wigner_chain();
        let (g0, gb0) = jordan_wigner_majoranas(0, -3);
        let (g1, _) = jordan_wigner_majoranas(1, -3);
        assert_eq!(&(&g0 * &gb0), enc.image(GeneratorId::vertex(0)).unwrap());
        assert_eq!(&(&g0 * &g1), enc.image(GeneratorId::edge(0, EdgeKind::Right)).unwrap());
    }

    #[test]
    fn fixtures_validate() {
        assert_eq!(validate(&jordan_wigner_chain()), Ok(()));
        assert_eq!(validate(&edge_qubit_square()), Ok(()));
        assert_eq!(validate(&distance_two_square()), Ok(()));
        for es in [EdgeSet::Triangular, EdgeSet::NNNSquare] {
            let enc = with_composite_diagonals(&distance_two_square(), es).unwrap();
            assert_eq!(validate(&enc), Ok(()), "{es}");
            assert!(enc.anchoring_issues().is_empty());
        }
    }
}
