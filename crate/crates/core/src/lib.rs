//! Search and analysis of translationally invariant fermion-to-qubit encodings.
//!
//! Generator images are Pauli strings on a 3×3 window of unit cells. The
//! crate validates them against the fermionic algebra, derives loop
//! stabilizers, computes code distance, and searches for new encodings by
//! brute force or by Clifford deformation of a known one.

pub mod connectivity;
pub mod distance;
pub mod document;
pub mod encoding;
pub mod error;
pub mod exec;
pub mod fermion;
pub mod fixtures;
pub mod lattice;
pub mod search;
pub mod symplectic;

pub use encoding::{Distance, EncodingCandidate, Metrics, Violation};
pub use error::{Error, Result};
pub use lattice::{Cell, CellPauli, EdgeSet, Scheme, UnitCellLayout};
pub use symplectic::{Letter, PauliWord, SymplecticBasis};
