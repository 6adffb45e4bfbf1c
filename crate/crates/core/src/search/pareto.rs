//! Pareto front over (distance, max stabilizer weight, Σ_NN, Σ_NNN).
//!
//! Distance is maximized, the three weights minimized. Entries with equal
//! metrics do not dominate one another, so ties are kept.

use std::cmp::Ordering;

use crate::encoding::{Metrics, Sigma};

/// The four compared metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParetoKey {
    pub distance: u32,
    pub max_stab_weight: usize,
    pub sigma_nn: Sigma,
    pub sigma_nnn: Sigma,
}

impl ParetoKey {
    pub fn of(m: &Metrics) -> Self {
        ParetoKey {
            distance: m.distance.value(),
            max_stab_weight: m.max_stab_weight,
            sigma_nn: m.sigma_nn,
            sigma_nnn: m.sigma_nnn,
        }
    }

    /// At least as good everywhere and strictly better somewhere.
    pub fn dominates(&self, other: &ParetoKey) -> bool {
        let cmps = [
            self.distance.cmp(&other.distance),
            other.max_stab_weight.cmp(&self.max_stab_weight),
            other.sigma_nn.cmp(&self.sigma_nn),
            other.sigma_nnn.cmp(&self.sigma_nnn),
        ];
        cmps.iter().all(|c| *c != Ordering::Less) && cmps.iter().any(|c| *c == Ordering::Greater)
    }
}

/// Non-dominated entries in insertion order.
#[derive(Clone, Debug)]
pub struct ParetoFront<T> {
    entries: Vec<(ParetoKey, T)>,
    tie_cap: Option<usize>,
}

impl<T> Default for ParetoFront<T> {
    fn default() -> Self {
        ParetoFront {
            entries: Vec::new(),
            tie_cap: None,
        }
    }
}

impl<T> ParetoFront<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keep at most `cap` entries with identical metrics, evicting the oldest.
    pub fn with_tie_cap(cap: usize) -> Self {
        ParetoFront {
            entries: Vec::new(),
            tie_cap: Some(cap.max(1)),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(ParetoKey, T)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(ParetoKey, T)> {
        self.entries
    }

    pub fn is_dominated(&self, key: &ParetoKey) -> bool {
        self.entries.iter().any(|(k, _)| k.dominates(key))
    }

    /// Insert unless dominated; evicts whatever the newcomer dominates.
    pub fn update(&mut self, key: ParetoKey, item: T) -> bool {
        if self.is_dominated(&key) {
            return false;
        }
        self.entries.retain(|(k, _)| !key.dominates(k));
        if let Some(cap) = self.tie_cap {
            let ties = self.entries.iter().filter(|(k, _)| *k == key).count();
            if ties >= cap {
                let oldest = self.entries.iter().position(|(k, _)| *k == key).expect("tie present");
                self.entries.remove(oldest);
            }
        }
        self.entries.push((key, item));
        true
    }
}

/// Free-function form of [`ParetoFront::update`].
pub fn pareto_update<T>(front: &mut ParetoFront<T>, key: ParetoKey, item: T) -> bool {
    front.update(key, item)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(d: u32, s: usize, nn: u64, nnn: u64) -> ParetoKey {
        ParetoKey {
            distance: d,
            max_stab_weight: s,
            sigma_nn: Sigma { total: nn, count: 5 },
            sigma_nnn: Sigma { total: nnn, count: 9 },
        }
    }

    #[test]
    fn examples() {
        let mut f = ParetoFront::new();
        assert!(f.update(key(2, 4, 10, 20), 0));
        assert!(f.update(key(2, 4, 10, 20), 1), "ties are kept");
        assert!(!f.update(key(1, 5, 11, 21), 2));
        assert!(f.update(key(3, 4, 10, 20), 3));
        assert_eq!(f.entries().iter().map(|e| e.1).collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn tie_cap_evicts_oldest() {
        let mut f = ParetoFront::with_tie_cap(2);
        for i in 0..4 {
            assert!(f.update(key(1, 1, 1, 1), i));
        }
        assert_eq!(f.entries().iter().map(|e| e.1).collect::<Vec<_>>(), vec![2, 3]);
    }

    proptest! {
        #[test]
        fn front_is_the_non_dominated_set(
            pts in prop::collection::vec((0u32..4, 0usize..4, 0u64..4, 0u64..4), 0..60)
        ) {
            let keys: Vec<ParetoKey> = pts.iter().map(|&(d, s, a, b)| key(d, s, a, b)).collect();
            let mut f = ParetoFront::new();
            for (i, k) in keys.iter().enumerate() {
                f.update(*k, i);
            }
            let expect: Vec<usize> = (0..keys.len())
                .filter(|&i| !keys.iter().any(|o| o.dominates(&keys[i])))
                .collect();
            let mut got: Vec<usize> = f.entries().iter().map(|e| e.1).collect();
            got.sort();
            prop_assert_eq!(got, expect);
        }
    }
}
