//! Encoding searches: brute-force enumeration and Clifford deformation,
//! both feeding a Pareto front over the quality metrics.

pub mod bruteforce;
pub mod clifford;
pub mod pareto;

use rand::Rng;

use crate::encoding::{Distance, EncodingCandidate, Metrics};

pub use bruteforce::{brute_force_search, enumerate_valid, HoppingCapMode, SearchConfig};
pub use clifford::{apply_clifford, clifford_deform_search, sample_gate_set, CliffordConfig, CliffordGateOp, LetterPerm};
pub use pareto::{pareto_update, ParetoFront, ParetoKey};

/// Bernoulli draw; probability 1 never consumes randomness.
pub fn stochastic_gate<R: Rng + ?Sized>(accept_probability: f64, rng: &mut R) -> bool {
    accept_probability >= 1.0 || rng.gen_bool(accept_probability)
}

/// Counters common to both searches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    /// Search-tree nodes (brute force) or gate sequences (Clifford) visited.
    pub nodes: u64,
    /// Complete encodings reached.
    pub completions: u64,
    /// Complete encodings passing every filter.
    pub passed: u64,
    /// Encodings accepted by the Pareto front and emitted.
    pub accepted: u64,
    pub truncated: bool,
    pub best_distance: Option<Distance>,
    /// Size of the final front.
    pub front_size: usize,
}

impl SearchReport {
    fn note_distance(&mut self, d: Distance) {
        let better = match self.best_distance {
            None => true,
            Some(b) => (d.value(), d.is_exact()) > (b.value(), b.is_exact()),
        };
        if better {
            self.best_distance = Some(d);
        }
    }
}

/// An emitted encoding.
#[derive(Clone, Debug)]
pub struct Found {
    /// Position in the emitted stream.
    pub index: usize,
    pub encoding: EncodingCandidate,
    pub metrics: Metrics,
    /// Gate sequence that produced it (Clifford search only).
    pub gates: Vec<CliffordGateOp>,
}

/// Result of a search: counters plus the final Pareto front.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub report: SearchReport,
    pub front: Vec<Found>,
}

/// Final front over the emitted encodings, in emission order.
fn final_front(emitted: &[Found]) -> Vec<Found> {
    let mut front = ParetoFront::new();
    for f in emitted {
        front.update(ParetoKey::of(&f.metrics), f.clone());
    }
    front.into_entries().into_iter().map(|(_, f)| f).collect()
}

/// Solutions of `f·w = b` over the packed `x ‖ z` vectors of `n` slots.
#[derive(Clone, Debug)]
pub(crate) struct AffineSystem {
    n: usize,
    rows: Vec<(u128, bool)>,
    pivots: Vec<u32>,
    consistent: bool,
}

impl AffineSystem {
    pub(crate) fn new(n: usize) -> Self {
        AffineSystem {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            consistent: true,
        }
    }

    fn valid_mask(&self) -> u128 {
        let m = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 } as u128;
        m | m << 64
    }

    /// Add `popcount(w & f) ≡ b (mod 2)`; returns the updated consistency.
    pub(crate) fn add(&mut self, mut f: u128, mut b: bool) -> bool {
        for (&(row, rb), &p) in self.rows.iter().zip(&self.pivots) {
            if f >> p & 1 == 1 {
                f ^= row;
                b ^= rb;
            }
        }
        if f == 0 {
            self.consistent &= !b;
            return self.consistent;
        }
        let p = f.trailing_zeros();
        for (row, rb) in self.rows.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= f;
                *rb ^= b;
            }
        }
        self.rows.push((f, b));
        self.pivots.push(p);
        self.consistent
    }

    pub(crate) fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub(crate) fn dim(&self) -> usize {
        2 * self.n - self.rows.len()
    }

    pub(crate) fn satisfied(&self, w: u128) -> bool {
        self.rows.iter().all(|&(f, b)| ((w & f).count_ones() & 1 == 1) == b)
    }

    /// A particular solution and a nullspace basis.
    pub(crate) fn solution(&self) -> (u128, Vec<u128>) {
        let particular = self
            .rows
            .iter()
            .zip(&self.pivots)
            .filter(|((_, b), _)| *b)
            .fold(0u128, |acc, (_, &p)| acc | 1u128 << p);
        let pivot_mask = self.pivots.iter().fold(0u128, |m, &p| m | 1u128 << p);
        let mut free = self.valid_mask() & !pivot_mask;
        let mut basis = Vec::with_capacity(free.count_ones() as usize);
        while free != 0 {
            let v = free.trailing_zeros();
            free &= free - 1;
            let mut vec = 1u128 << v;
            for (&(row, _), &p) in self.rows.iter().zip(&self.pivots) {
                if row >> v & 1 == 1 {
                    vec |= 1u128 << p;
                }
            }
            basis.push(vec);
        }
        (particular, basis)
    }
}

/// Number of words of weight at most `cap` on `n` slots.
pub(crate) fn words_up_to(n: usize, cap: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow3 = 1u128;
    for w in 0..=cap.min(n) {
        total += binom * pow3;
        binom = binom * (n - w) as u128 / (w + 1) as u128;
        pow3 *= 3;
    }
    total
}

/// Weight of a packed word.
#[inline]
pub(crate) fn packed_weight(v: u128) -> usize {
    ((v as u64) | (v >> 64) as u64).count_ones() as usize
}

/// Call `f` on every packed word of weight `1..=cap` over `n` slots.
pub(crate) fn for_each_word_up_to(n: usize, cap: usize, mut f: impl FnMut(u128)) {
    for w in 1..=cap.min(n) as u32 {
        for support in crate::distance::Combinations::new(n as u32, w) {
            let slots: Vec<u32> = (0..64).filter(|i| support >> i & 1 == 1).collect();
            let mut digits = vec![0u8; slots.len()];
            loop {
                let mut v = 0u128;
                for (&s, &d) in slots.iter().zip(&digits) {
                    // digits 0, 1, 2 → X, Y, Z
                    if d < 2 {
                        v |= 1u128 << s;
                    }
                    if d > 0 {
                        v |= 1u128 << (s + 64);
                    }
                }
                f(v);
                let mut i = 0;
                while i < digits.len() && digits[i] == 2 {
                    digits[i] = 0;
                    i += 1;
                }
                if i == digits.len() {
                    break;
                }
                digits[i] += 1;
            }
        }
    }
}

/// Every solution of `sys` with weight at most `cap`, in unspecified order.
pub(crate) fn bounded_solutions(sys: &AffineSystem, cap: usize) -> Vec<u128> {
    const GRAY_MAX_DIM: usize = 30;
    if !sys.is_consistent() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let dim = sys.dim();
    if dim <= GRAY_MAX_DIM && (1u128 << dim) <= words_up_to(sys.n, cap) {
        let (mut v, basis) = sys.solution();
        if packed_weight(v) <= cap {
            out.push(v);
        }
        for t in 1u64..(1u64 << dim) {
            v ^= basis[t.trailing_zeros() as usize];
            if packed_weight(v) <= cap {
                out.push(v);
            }
        }
    } else {
        if sys.satisfied(0) {
            out.push(0);
        }
        for_each_word_up_to(sys.n, cap, |v| {
            if sys.satisfied(v) {
                out.push(v);
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute(n: usize, rows: &[(u128, bool)], cap: usize) -> Vec<u128> {
        let mut out = Vec::new();
        let check = |v: u128| rows.iter().all(|&(f, b)| ((v & f).count_ones() & 1 == 1) == b);
        if check(0) {
            out.push(0);
        }
        for_each_word_up_to(n, cap, |v| {
            if check(v) {
                out.push(v);
            }
        });
        out.sort();
        out
    }

    #[test]
    fn word_counts() {
        assert_eq!(words_up_to(9, 2), 1 + 27 + 36 * 9);
        let mut c = 0;
        for_each_word_up_to(5, 3, |_| c += 1);
        assert_eq!(c as u128, words_up_to(5, 3) - 1);
    }

    #[test]
    fn affine_solutions_match_brute_force() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 5, 8] {
            let mask = ((1u128 << n) - 1) | ((1u128 << n) - 1) << 64;
            for n_rows in 0..6 {
                let rows: Vec<(u128, bool)> = (0..n_rows).map(|_| (rng.gen::<u128>() & mask, rng.gen())).collect();
                let mut sys = AffineSystem::new(n);
                for &(f, b) in &rows {
                    sys.add(f, b);
                }
                // Force the Gray-code branch and the enumeration branch.
                let mut got = bounded_solutions(&sys, n);
                got.sort();
                assert_eq!(got, brute(n, &rows, n));
                let mut got = bounded_solutions(&sys, 2);
                got.sort();
                assert_eq!(got, brute(n, &rows, 2));
            }
        }
    }

    #[test]
    fn gate_is_deterministic_and_calibrated() {
        let draws = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10_000).map(|_| stochastic_gate(0.05, &mut rng)).collect::<Vec<_>>()
        };
        let a = draws(3);
        assert_eq!(a, draws(3));
        let hits = a.iter().filter(|&&b| b).count() as f64;
        let sigma = (10_000.0f64 * 0.05 * 0.95).sqrt();
        assert!((hits - 500.0).abs() <= 3.0 * sigma, "{hits}");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..100).all(|_| stochastic_gate(1.0, &mut rng)));
    }
}
