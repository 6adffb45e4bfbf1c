//! Depth-first enumeration of generator images.
//!
//! Generators are assigned per mode in the order vertex, right, up,
//! diagonal, anti-diagonal. Every commutation relation with generators
//! already placed is linear in the new image, so candidates are drawn from
//! an affine subspace and filtered by weight, anchoring, canonical form and
//! the quadratic self-commutation constraints.
//!
//! Canonical form removes two relabeling symmetries: local qubit indices are
//! activated in order (a local index is usable once all smaller ones are
//! used somewhere), and per local index the set of letters seen so far is a
//! prefix of `Z, X, Y`.
//!
//! Edges are enumerated through their hopping term `V_j·E_jk`, which is
//! what the weight cap bounds.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{bounded_solutions, final_front, stochastic_gate, AffineSystem, Found, ParetoFront, ParetoKey, SearchOutcome, SearchReport};
use crate::distance::{DistanceBudget, DistanceEngine};
use crate::encoding::{validate_with, weight_metrics, Distance, EncodingCandidate, Metrics, RequiredParity};
use crate::error::{Error, Result};
use crate::exec;
use crate::fermion::GeneratorId;
use crate::lattice::{all_shifts, Cell, UnitCellLayout};
use crate::symplectic::PauliWord;

/// Which hopping terms the edge weight cap applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoppingCapMode {
    Nn,
    NnAndNnn,
}

impl HoppingCapMode {
    pub fn name(self) -> &'static str {
        match self {
            HoppingCapMode::Nn => "nn",
            HoppingCapMode::NnAndNnn => "nn+nnn",
        }
    }
}

impl FromStr for HoppingCapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(HoppingCapMode::Nn),
            "nn+nnn" | "nn-and-nnn" => Ok(HoppingCapMode::NnAndNnn),
            _ => Err(Error::Config(format!("unknown hopping cap mode {s:?}"))),
        }
    }
}

impl fmt::Display for HoppingCapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub layout: UnitCellLayout,
    pub max_vertex_weight: usize,
    /// Cap on each hopping term `V·E` (not on the bare edge image).
    pub max_edge_or_hopping_weight: usize,
    pub hopping_cap_mode: HoppingCapMode,
    pub min_distance_filter: u32,
    /// Every logical term must weigh at least this much.
    pub min_logical_weight_filter: Option<usize>,
    pub max_stabilizer_weight: Option<usize>,
    pub acceptance_probability: f64,
    pub rng_seed: u64,
    pub node_budget: Option<u64>,
    /// Distance budget for encodings accepted by the front.
    pub distance_w_max: u32,
    pub threads: usize,
}

impl SearchConfig {
    pub fn new(layout: UnitCellLayout) -> Self {
        SearchConfig {
            layout,
            max_vertex_weight: 2,
            max_edge_or_hopping_weight: 2,
            hopping_cap_mode: HoppingCapMode::Nn,
            min_distance_filter: 1,
            min_logical_weight_filter: None,
            max_stabilizer_weight: None,
            acceptance_probability: 1.0,
            rng_seed: 0,
            node_budget: None,
            distance_w_max: 4,
            threads: 1,
        }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.layout.n_slots();
        let bad = |m: String| Err(Error::Config(m));
        if self.max_vertex_weight == 0 || self.max_vertex_weight > n {
            return bad(format!("max_vertex_weight must be in 1..={n}"));
        }
        if self.max_edge_or_hopping_weight == 0 || self.max_edge_or_hopping_weight > n {
            return bad(format!("max_edge_or_hopping_weight must be in 1..={n}"));
        }
        if !(self.acceptance_probability > 0.0 && self.acceptance_probability <= 1.0) {
            return bad(format!(
                "acceptance_probability must be in (0, 1], got {}",
                self.acceptance_probability
            ));
        }
        if self.min_distance_filter == 0 {
            return bad("min_distance_filter must be at least 1".into());
        }
        if self.distance_w_max < self.min_distance_filter {
            return bad("distance_w_max must be at least min_distance_filter".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct State {
    imgs: Vec<PauliWord>,
    /// Letter set per local index: bit 0 Z, bit 1 X, bit 2 Y.
    seen: [u8; 8],
    used: u8,
}

/// Precomputed search context.
struct Ctx<'a> {
    cfg: &'a SearchConfig,
    layout: &'a UnitCellLayout,
    gens: Vec<GeneratorId>,
    req: RequiredParity,
    n: usize,
    caps: Vec<usize>,
    /// Image multiplied in to turn a candidate hopping term into the edge image.
    offsets: Vec<Option<usize>>,
    /// Window cells each generator must touch.
    touch: Vec<Vec<u64>>,
    /// `(edge, vertex, anchor)` hopping terms completed by generator `k`.
    hop_checks: Vec<Vec<(usize, usize, Cell)>>,
    local_masks: Vec<u64>,
    half_shifts: Vec<Cell>,
    nodes: AtomicU64,
    truncated: AtomicBool,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SearchConfig) -> Self {
        let layout = &cfg.layout;
        let gens = layout.generators();
        let vertex_idx = |mode: u8| gens.iter().position(|g| *g == GeneratorId::vertex(mode)).expect("vertex present");
        let mut caps = Vec::new();
        let mut offsets = Vec::new();
        let mut touch = Vec::new();
        let mut hop_checks = vec![Vec::new(); gens.len()];
        for (k, &g) in gens.iter().enumerate() {
            let (own, far) = layout.endpoints(g, Cell::ORIGIN);
            let mut cells = vec![layout.cell_mask(own.cell)];
            match far {
                None => {
                    caps.push(cfg.max_vertex_weight);
                    offsets.push(None);
                }
                Some(far) => {
                    caps.push(cfg.max_edge_or_hopping_weight);
                    let vj = vertex_idx(g.mode);
                    offsets.push(Some(vj));
                    cells.push(layout.cell_mask(far.cell));
                    for (v, anchor) in [(vj, Cell::ORIGIN), (vertex_idx(far.mode), far.cell)] {
                        hop_checks[k.max(v)].push((k, v, anchor));
                    }
                }
            }
            touch.push(cells);
        }
        let half_shifts = all_shifts().filter(|s| s.y > 0 || (s.y == 0 && s.x > 0)).collect();
        Ctx {
            cfg,
            layout,
            req: RequiredParity::new(layout),
            n: layout.n_slots(),
            gens,
            caps,
            offsets,
            touch,
            hop_checks,
            local_masks: (0..layout.qubits_per_cell()).map(|q| layout.local_mask(q)).collect(),
            half_shifts,
            nodes: AtomicU64::new(0),
            truncated: AtomicBool::new(false),
        }
    }

    /// Count a node; false once the budget is spent.
    fn tick(&self) -> bool {
        let c = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if self.cfg.node_budget.is_some_and(|b| c > b) {
            self.truncated.store(true, AtomicOrdering::Relaxed);
            return false;
        }
        true
    }

    fn stopped(&self) -> bool {
        self.truncated.load(AtomicOrdering::Relaxed)
    }

    /// Canonical-form update, or `None` if `w` breaks it.
    fn canonical(&self, st: &State, w: &PauliWord) -> Option<([u8; 8], u8)> {
        let mut seen = st.seen;
        let mut used = st.used;
        for (q, &m) in self.local_masks.iter().enumerate() {
            let (x, z) = (w.x_mask() & m, w.z_mask() & m);
            let letters = ((z & !x != 0) as u8) | ((x & !z != 0) as u8) << 1 | ((x & z != 0) as u8) << 2;
            if letters == 0 {
                continue;
            }
            seen[q] |= letters;
            if !matches!(seen[q], 1 | 3 | 7) {
                return None;
            }
            used |= 1 << q;
        }
        (used & used.wrapping_add(1) == 0).then_some((seen, used))
    }

    fn hop_weight(&self, v: &PauliWord, anchor: Cell, e: &PauliWord) -> usize {
        let clip = self.layout.translate_clipped(v, anchor);
        (clip * *e).weight() + v.weight() - clip.weight()
    }

    /// Valid images for generator `k` given the earlier assignments, sorted.
    fn candidates(&self, st: &State, k: usize) -> Vec<(PauliWord, [u8; 8], u8)> {
        let offset = self.offsets[k].map(|j| st.imgs[j]);
        let mut sys = AffineSystem::new(self.n);
        for (j, img) in st.imgs.iter().enumerate() {
            for s in all_shifts() {
                let c = self.layout.translate_clipped(img, s);
                let mut b = self.req.get(k, j, s) == 1;
                if c.is_identity() {
                    if b {
                        return Vec::new();
                    }
                    continue;
                }
                if let Some(o) = offset {
                    b ^= o.anticommutes(&c);
                }
                let f = c.z_mask() as u128 | (c.x_mask() as u128) << 64;
                if !sys.add(f, b) {
                    return Vec::new();
                }
            }
        }
        let mut out: Vec<(PauliWord, [u8; 8], u8)> = bounded_solutions(&sys, self.caps[k])
            .into_iter()
            .filter_map(|h| {
                let hw = PauliWord::from_masks_unchecked(h as u64, (h >> 64) as u64, self.n);
                let w = match offset {
                    Some(o) => hw * o,
                    None => hw,
                };
                self.admissible(st, k, &w)
            })
            .collect();
        out.sort_by_key(|(w, _, _)| (w.weight(), w.x_mask(), w.z_mask()));
        out
    }

    fn admissible(&self, st: &State, k: usize, w: &PauliWord) -> Option<(PauliWord, [u8; 8], u8)> {
        let support = w.support();
        if self.touch[k].iter().any(|&m| support & m == 0) {
            return None;
        }
        let (seen, used) = self.canonical(st, w)?;
        for &s in &self.half_shifts {
            if w.commute_parity(&self.layout.translate_clipped(w, s)).ok()? != self.req.get(k, k, s) {
                return None;
            }
        }
        let cap = self.cfg.max_edge_or_hopping_weight;
        for &(e, v, anchor) in &self.hop_checks[k] {
            let edge = if e == k { w } else { &st.imgs[e] };
            let vertex = if v == k { w } else { &st.imgs[v] };
            if self.hop_weight(vertex, anchor, edge) > cap {
                return None;
            }
        }
        Some((*w, seen, used))
    }

    fn encoding(&self, imgs: &[PauliWord]) -> EncodingCandidate {
        EncodingCandidate::new(self.layout.clone(), self.gens.iter().copied().zip(imgs.iter().copied()))
            .expect("search images use the layout's slots")
    }

    /// Depth-first walk below `st`; `visit` sees each complete assignment and
    /// returns false to stop.
    fn walk(&self, st: &mut State, k: usize, rng: &mut ChaCha8Rng, visit: &mut dyn FnMut(&[PauliWord]) -> bool) -> bool {
        if k == self.gens.len() {
            return visit(&st.imgs);
        }
        for (w, seen, used) in self.candidates(st, k) {
            if self.stopped() || !self.tick() {
                return false;
            }
            if !stochastic_gate(self.cfg.acceptance_probability, rng) {
                continue;
            }
            let saved = (st.seen, st.used);
            st.imgs.push(w);
            st.seen = seen;
            st.used = used;
            let go_on = self.walk(st, k + 1, rng, visit);
            st.imgs.pop();
            (st.seen, st.used) = saved;
            if !go_on {
                return false;
            }
        }
        true
    }

    fn root(&self) -> State {
        State {
            imgs: Vec::with_capacity(self.gens.len()),
            seen: [0; 8],
            used: 0,
        }
    }

    /// Run `visit_subtree(i, state, rng)` for each first-generator candidate
    /// `i`, in parallel when configured; results come back in order.
    fn subtrees<R: Send>(&self, visit_subtree: impl Fn(&mut State, &mut ChaCha8Rng) -> R + Sync + Send) -> Vec<R> {
        let top = self.candidates(&self.root(), 0);
        let indexed: Vec<(usize, (PauliWord, [u8; 8], u8))> = top.into_iter().enumerate().collect();
        exec::with_threads(self.cfg.threads, || {
            exec::map_ordered(&indexed, self.cfg.threads.max(1), |(i, (w, seen, used))| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
                rng.set_stream(*i as u64);
                if self.stopped() || !self.tick() || !stochastic_gate(self.cfg.acceptance_probability, &mut rng) {
                    return None;
                }
                let mut st = self.root();
                st.imgs.push(*w);
                st.seen = *seen;
                st.used = *used;
                Some(visit_subtree(&mut st, &mut rng))
            })
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// Filters applied to complete encodings; returns metrics with a
    /// search-time distance.
    fn evaluate(&self, enc: &EncodingCandidate) -> Option<Metrics> {
        if validate_with(enc, &self.req).is_err() {
            return None;
        }
        let mut m = weight_metrics(enc).ok()?;
        let cap = self.cfg.max_edge_or_hopping_weight;
        let capped_nnn = self.cfg.hopping_cap_mode == HoppingCapMode::NnAndNnn;
        if m.terms.iter().any(|t| t.label.starts_with("hop") && (!t.nnn || capped_nnn) && t.weight > cap) {
            return None;
        }
        if let Some(min) = self.cfg.min_logical_weight_filter {
            if m.terms.iter().any(|t| t.weight < min) {
                return None;
            }
        }
        if self.cfg.max_stabilizer_weight.is_some_and(|s| m.max_stab_weight > s) {
            return None;
        }
        let d = DistanceEngine::new(enc)
            .ok()?
            .search(&DistanceBudget::new(self.cfg.distance_w_max))
            .0;
        if let Distance::Exact(d) = d {
            if d < self.cfg.min_distance_filter {
                return None;
            }
        }
        m.distance = d;
        Some(m)
    }
}

/// Every complete, valid assignment the search visits (no metric filters),
/// up to `limit`. The stochastic gate and node budget still apply.
pub fn enumerate_valid(cfg: &SearchConfig, limit: usize) -> Result<Vec<EncodingCandidate>> {
    cfg.check()?;
    let ctx = Ctx::new(cfg);
    let per_subtree = ctx.subtrees(|st, rng| {
        let mut found = Vec::new();
        ctx.walk(st, 1, rng, &mut |imgs| {
            let enc = ctx.encoding(imgs);
            if validate_with(&enc, &ctx.req).is_ok() {
                found.push(enc);
            }
            found.len() < limit
        });
        found
    });
    Ok(per_subtree.into_iter().flatten().take(limit).collect())
}

struct Completion {
    enc: EncodingCandidate,
    metrics: Metrics,
}

/// Brute-force search; `sink` receives each Pareto-accepted encoding in order.
///
/// The emitted sequence and final front do not depend on the thread count
/// unless the node budget truncates the run.
pub fn brute_force_search(cfg: &SearchConfig, sink: &mut dyn FnMut(&Found)) -> Result<SearchOutcome> {
    cfg.check()?;
    let ctx = Ctx::new(cfg);
    let single_generator = ctx.gens.len() == 1;
    let per_subtree = ctx.subtrees(|st, rng| {
        let mut front: ParetoFront<Completion> = ParetoFront::new();
        let mut completions = 0u64;
        let mut passed = 0u64;
        let mut on_complete = |imgs: &[PauliWord]| {
            completions += 1;
            let enc = ctx.encoding(imgs);
            if let Some(metrics) = ctx.evaluate(&enc) {
                passed += 1;
                front.update(ParetoKey::of(&metrics), Completion { enc, metrics });
            }
            true
        };
        if single_generator {
            on_complete(&st.imgs);
        } else {
            ctx.walk(st, 1, rng, &mut on_complete);
        }
        (completions, passed, front)
    });

    let mut report = SearchReport::default();
    let mut global: ParetoFront<usize> = ParetoFront::new();
    let mut accepted = Vec::new();
    for (completions, passed, front) in per_subtree {
        report.completions += completions;
        report.passed += passed;
        for (key, c) in front.into_entries() {
            if global.update(key, accepted.len()) {
                accepted.push(c);
            }
        }
    }
    let mut emitted = Vec::with_capacity(accepted.len());
    for (i, c) in accepted.into_iter().enumerate() {
        report.note_distance(c.metrics.distance);
        let found = Found {
            index: i,
            encoding: c.enc,
            metrics: c.metrics,
            gates: Vec::new(),
        };
        sink(&found);
        emitted.push(found);
    }
    report.accepted = emitted.len() as u64;
    report.nodes = ctx.nodes.load(AtomicOrdering::Relaxed);
    report.truncated = ctx.truncated.load(AtomicOrdering::Relaxed);
    let front = final_front(&emitted);
    report.front_size = front.len();
    Ok(SearchOutcome { report, front })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::validate;
    use crate::fermion::ImageSource;
    use crate::lattice::{EdgeSet, Scheme};
    use crate::search::for_each_word_up_to;
    use std::collections::BTreeSet;

    fn chain(n_c: usize) -> SearchConfig {
        SearchConfig::new(UnitCellLayout::new(n_c, Scheme::TwoGrids, EdgeSet::Chain).unwrap())
    }

    fn key(enc: &EncodingCandidate) -> Vec<(u64, u64)> {
        enc.generators().values().map(|w| (w.x_mask(), w.z_mask())).collect()
    }

    #[test]
    fn toy_chain_search_finds_an_encoding() {
        let out = brute_force_search(&chain(1), &mut |_| {}).unwrap();
        assert!(out.report.accepted >= 1);
        assert!(!out.report.truncated);
        for f in &out.front {
            assert_eq!(validate(&f.encoding), Ok(()));
            assert_eq!(f.metrics.distance, Distance::Exact(1));
        }
    }

    /// Completeness at toy scale: the search visits exactly the canonical
    /// assignments a filter-only enumeration admits.
    #[test]
    fn chain_search_matches_enumerate_then_filter() {
        let cfg = chain(1);
        let ctx = Ctx::new(&cfg);
        let layout = &cfg.layout;
        let n = layout.n_slots();
        let mut words = vec![PauliWord::identity(n)];
        for_each_word_up_to(n, n, |v| words.push(PauliWord::from_masks_unchecked(v as u64, (v >> 64) as u64, n)));
        let mut expect = BTreeSet::new();
        let root = ctx.root();
        for v in &words {
            if v.weight() > cfg.max_vertex_weight {
                continue;
            }
            let Some((seen, used)) = ctx.canonical(&root, v) else { continue };
            let st = State {
                imgs: vec![*v],
                seen,
                used,
            };
            // |E| <= |V| + |V E|, so heavier edges cannot meet the hopping cap.
            for e in words.iter().filter(|e| e.weight() <= v.weight() + 2) {
                if ctx.canonical(&st, e).is_none() {
                    continue;
                }
                let enc = ctx.encoding(&[*v, *e]);
                if validate(&enc).is_ok()
                    && enc.anchoring_issues().is_empty()
                    && crate::encoding::term_weights(&enc)
                        .map(|t| t.iter().filter(|t| !t.nnn && t.label.starts_with("hop")).all(|t| t.weight <= 2))
                        .unwrap_or(false)
                {
                    expect.insert(key(&enc));
                }
            }
        }
        let got: BTreeSet<_> = enumerate_valid(&cfg, usize::MAX).unwrap().iter().map(key).collect();
        assert!(!expect.is_empty());
        assert_eq!(got, expect);
    }

    #[test]
    fn distance_filter_is_respected() {
        let mut cfg = chain(2);
        cfg.min_distance_filter = 2;
        cfg.max_vertex_weight = 3;
        cfg.max_edge_or_hopping_weight = 3;
        let out = brute_force_search(&cfg, &mut |_| {}).unwrap();
        for f in &out.front {
            let d = crate::distance::naive_min_distance(&f.encoding, 2).unwrap();
            assert!(d.value() >= 2, "{d}");
        }
    }

    #[test]
    fn low_probability_emits_a_valid_subset() {
        let full: BTreeSet<_> = enumerate_valid(&chain(1), usize::MAX).unwrap().iter().map(key).collect();
        let mut cfg = chain(1);
        cfg.acceptance_probability = 0.1;
        cfg.rng_seed = 11;
        let part = enumerate_valid(&cfg, usize::MAX).unwrap();
        for enc in &part {
            assert_eq!(validate(enc), Ok(()));
            assert!(full.contains(&key(enc)));
        }
        assert_eq!(
            part.iter().map(key).collect::<Vec<_>>(),
            enumerate_valid(&cfg, usize::MAX).unwrap().iter().map(key).collect::<Vec<_>>()
        );
    }

    #[test]
    fn budget_truncates() {
        let mut cfg = chain(1);
        cfg.node_budget = Some(1);
        let out = brute_force_search(&cfg, &mut |_| {}).unwrap();
        assert!(out.report.truncated);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let mut cfg = chain(2);
        cfg.max_vertex_weight = 2;
        cfg.max_edge_or_hopping_weight = 3;
        let run = |threads| {
            let mut c = cfg.clone();
            c.threads = threads;
            let mut seen = Vec::new();
            let out = brute_force_search(&c, &mut |f| seen.push(key(&f.encoding))).unwrap();
            (seen, out.report, out.front.iter().map(|f| key(&f.encoding)).collect::<Vec<_>>())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn config_checks() {
        let mut cfg = chain(1);
        cfg.acceptance_probability = 1.5;
        assert!(cfg.check().is_err());
        cfg.acceptance_probability = 0.0;
        assert!(cfg.check().is_err());
        let mut cfg = chain(1);
        cfg.max_vertex_weight = 10;
        assert!(cfg.check().is_err());
    }

    #[test]
    fn emitted_chain_images_are_anchored() {
        for enc in enumerate_valid(&chain(2), 50).unwrap() {
            assert!(enc.anchoring_issues().is_empty());
            assert!(enc.image(GeneratorId::vertex(0)).is_some());
        }
    }
}
