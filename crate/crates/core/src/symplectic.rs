//! Bit-packed binary-symplectic Pauli strings and F2 linear algebra on them.
//!
//! A [`PauliWord`] stores the X and Z parts of a Pauli string over at most
//! [`MAX_SLOTS`] qubit slots in two `u64` masks. Phases are never tracked:
//! every operation here is blind to the `{±1, ±i}` prefactor, which is all
//! that commutation parity, weight and span membership depend on.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of qubit slots a [`PauliWord`] can address.
pub const MAX_SLOTS: usize = 64;

/// Single-qubit Pauli letter, phase ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// `(x, z)` bits of the letter.
    #[inline]
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    #[inline]
    pub const fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// Whether two letters anticommute.
    #[inline]
    pub fn anticommutes(self, other: Letter) -> bool {
        self != Letter::I && other != Letter::I && self != other
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[inline]
fn slot_mask(n_slots: usize) -> u64 {
    if n_slots >= 64 {
        u64::MAX
    } else {
        (1u64 << n_slots) - 1
    }
}

/// A Pauli string over `n_slots` qubit slots, stored as X and Z bit masks.
///
/// Bit `q` of `x` (resp. `z`) is set when X (resp. Z) acts on slot `q`; both
/// set means Y. Bits at positions `>= n_slots` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    x: u64,
    z: u64,
    n_slots: u8,
}

impl PauliWord {
    /// The identity on `n_slots` slots.
    ///
    /// Panics if `n_slots` is zero or exceeds [`MAX_SLOTS`].
    pub fn identity(n_slots: usize) -> Self {
        assert!(
            (1..=MAX_SLOTS).contains(&n_slots),
            "n_slots must be in 1..=64, got {n_slots}"
        );
        PauliWord {
            x: 0,
            z: 0,
            n_slots: n_slots as u8,
        }
    }

    pub fn from_masks(x: u64, z: u64, n_slots: usize) -> Result<Self> {
        if !(1..=MAX_SLOTS).contains(&n_slots) {
            return Err(Error::SlotOutOfRange {
                slot: n_slots,
                n_slots: MAX_SLOTS,
            });
        }
        let mask = slot_mask(n_slots);
        if (x | z) & !mask != 0 {
            let slot = 63 - ((x | z) & !mask).leading_zeros() as usize;
            return Err(Error::SlotOutOfRange { slot, n_slots });
        }
        Ok(PauliWord {
            x,
            z,
            n_slots: n_slots as u8,
        })
    }

    /// Masks are trimmed to `n_slots` without complaint. For internal hot paths.
    #[inline]
    pub(crate) fn from_masks_unchecked(x: u64, z: u64, n_slots: usize) -> Self {
        let mask = slot_mask(n_slots);
        PauliWord {
            x: x & mask,
            z: z & mask,
            n_slots: n_slots as u8,
        }
    }

    /// A single-letter word.
    pub fn single(slot: usize, letter: Letter, n_slots: usize) -> Result<Self> {
        let mut w = PauliWord::identity(n_slots);
        w.set(slot, letter)?;
        Ok(w)
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn n_slots(&self) -> usize {
        self.n_slots as usize
    }

    /// Slots carrying a non-identity letter.
    #[inline]
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// Number of non-identity slots.
    #[inline]
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn letter(&self, slot: usize) -> Letter {
        debug_assert!(slot < self.n_slots());
        Letter::from_bits(self.x >> slot & 1 == 1, self.z >> slot & 1 == 1)
    }

    pub fn set(&mut self, slot: usize, letter: Letter) -> Result<()> {
        if slot >= self.n_slots() {
            return Err(Error::SlotOutOfRange {
                slot,
                n_slots: self.n_slots(),
            });
        }
        let bit = 1u64 << slot;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        Ok(())
    }

    /// Symplectic form: 0 when the words commute, 1 when they anticommute.
    pub fn commute_parity(&self, other: &PauliWord) -> Result<u8> {
        if self.n_slots != other.n_slots {
            return Err(Error::SlotMismatch(self.n_slots(), other.n_slots()));
        }
        Ok(self.anticommutes(other) as u8)
    }

    /// Unchecked variant of [`commute_parity`](Self::commute_parity).
    #[inline]
    pub fn anticommutes(&self, other: &PauliWord) -> bool {
        debug_assert_eq!(self.n_slots, other.n_slots);
        ((self.x & other.z).count_ones() ^ (self.z & other.x).count_ones()) & 1 == 1
    }

    /// Product modulo phase: the XOR of both masks.
    pub fn multiply(&self, other: &PauliWord) -> Result<PauliWord> {
        if self.n_slots != other.n_slots {
            return Err(Error::SlotMismatch(self.n_slots(), other.n_slots()));
        }
        Ok(*self * *other)
    }

    /// Parses dense (`"XIZ"`) or sparse (`"X0 Z5 Y17"`) text.
    ///
    /// Dense strings shorter than `n_slots` are padded with identity.
    pub fn parse(text: &str, n_slots: usize) -> Result<PauliWord> {
        let bad = |reason: String| Error::ParsePauli {
            text: text.to_string(),
            reason,
        };
        if !(1..=MAX_SLOTS).contains(&n_slots) {
            return Err(bad(format!("n_slots {n_slots} outside 1..=64")));
        }
        let mut word = PauliWord::identity(n_slots);
        let trimmed = text.trim();
        if trimmed.chars().any(|c| c.is_ascii_digit()) {
            for token in trimmed.split_whitespace() {
                let mut chars = token.chars();
                let letter = chars
                    .next()
                    .and_then(Letter::from_char)
                    .ok_or_else(|| bad(format!("bad token {token:?}")))?;
                let slot: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| bad(format!("bad slot index in {token:?}")))?;
                if slot >= n_slots {
                    return Err(Error::SlotOutOfRange { slot, n_slots });
                }
                if word.letter(slot) != Letter::I {
                    return Err(bad(format!("slot {slot} given twice")));
                }
                word.set(slot, letter)?;
            }
        } else {
            let chars: Vec<char> = trimmed.chars().collect();
            if chars.len() > n_slots {
                return Err(bad(format!(
                    "{} letters for {n_slots} slots",
                    chars.len()
                )));
            }
            for (slot, c) in chars.into_iter().enumerate() {
                let letter = Letter::from_char(c).ok_or_else(|| bad(format!("invalid letter {c:?}")))?;
                word.set(slot, letter)?;
            }
        }
        Ok(word)
    }

    /// Dense form, one letter per slot.
    pub fn to_dense(&self) -> String {
        (0..self.n_slots()).map(|q| self.letter(q).as_char()).collect()
    }

    /// Sparse form, e.g. `"X0 Z5"`; the identity renders as `"I"`.
    pub fn to_sparse(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.iter_support()
            .map(|(q, l)| format!("{}{}", l.as_char(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// `(slot, letter)` pairs over the support, in slot order.
    pub fn iter_support(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        let mut rest = self.support();
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((q, self.letter(q)))
        })
    }

    /// Concatenated `x ‖ z` vector as a 128-bit integer.
    #[inline]
    pub(crate) fn packed(&self) -> u128 {
        self.x as u128 | (self.z as u128) << 64
    }

    #[inline]
    pub(crate) fn from_packed(v: u128, n_slots: usize) -> PauliWord {
        PauliWord {
            x: v as u64,
            z: (v >> 64) as u64,
            n_slots: n_slots as u8,
        }
    }
}

impl Mul for PauliWord {
    type Output = PauliWord;

    #[inline]
    fn mul(self, rhs: PauliWord) -> PauliWord {
        debug_assert_eq!(self.n_slots, rhs.n_slots);
        PauliWord {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            n_slots: self.n_slots,
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dense())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord({})", self.to_sparse())
    }
}

/// Parses with `n_slots` equal to the dense length.
impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliWord::parse(s, s.trim().chars().count().max(1))
    }
}

/// Row-reduced echelon basis of a subspace of `F2^(2n)` spanned by Pauli words.
///
/// Pivots are indices into the packed `x ‖ z` vector (X bits first at
/// `0..64`, Z bits at `64..128`). Every row is zero at every other row's pivot.
#[derive(Clone, Debug, Default)]
pub struct SymplecticBasis {
    rows: Vec<u128>,
    pivots: Vec<u32>,
    n_slots: usize,
}

impl SymplecticBasis {
    pub fn new(n_slots: usize) -> Self {
        SymplecticBasis {
            rows: Vec::new(),
            pivots: Vec::new(),
            n_slots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    pub fn rows(&self) -> impl Iterator<Item = PauliWord> + '_ {
        self.rows
            .iter()
            .map(|&r| PauliWord::from_packed(r, self.n_slots))
    }

    #[inline]
    fn reduce(&self, mut v: u128) -> u128 {
        for (&row, &p) in self.rows.iter().zip(&self.pivots) {
            if v >> p & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Whether `v` lies in the span, modulo phase.
    #[inline]
    pub fn contains(&self, v: &PauliWord) -> bool {
        debug_assert_eq!(v.n_slots(), self.n_slots);
        self.reduce(v.packed()) == 0
    }

    /// Gaussian elimination step. Returns `false` iff `v` was already in the span.
    pub fn insert(&mut self, v: &PauliWord) -> Result<bool> {
        if v.n_slots() != self.n_slots {
            return Err(Error::SlotMismatch(self.n_slots, v.n_slots()));
        }
        let r = self.reduce(v.packed());
        if r == 0 {
            return Ok(false);
        }
        let p = r.trailing_zeros();
        for row in self.rows.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= r;
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        Ok(true)
    }
}

/// Functional form of [`SymplecticBasis::insert`].
pub fn span_insert(mut basis: SymplecticBasis, v: &PauliWord) -> Result<(SymplecticBasis, bool)> {
    let inserted = basis.insert(v)?;
    Ok((basis, inserted))
}
