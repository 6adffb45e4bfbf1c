//! Qubit-connectivity graph demanded by an encoding on a finite patch.
//!
//! Data nodes are the qubits touched by stabilizers or logical terms anchored
//! in a `patch × patch` block of cells. Each stabilizer generator anchored in
//! the block gets one ancilla joined to its support. Each logical term is a
//! chain through its support in slot order, which is enough for a CNOT
//! ladder. Spin-duplicating schemes carry two copies of the lattice and
//! their on-site terms join the copies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::graph::UnGraph;
use serde::Serialize;

use crate::encoding::EncodingCandidate;
use crate::error::Result;
use crate::fermion::{enumerate_hamiltonian_terms, term_images, HamiltonianSpec, TermDescriptor};
use crate::lattice::{Cell, CellPauli};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Data { copy: u8, cell: Cell, local: u8 },
    Ancilla { copy: u8, cell: Cell, index: u8 },
}

impl Node {
    fn label(&self) -> String {
        match *self {
            Node::Data { copy, cell, local } => format!("q{copy}_{}_{}_{local}", cell.x, cell.y),
            Node::Ancilla { copy, cell, index } => format!("a{copy}_{}_{}_{index}", cell.x, cell.y),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrigin {
    StabilizerReadout,
    LogicalTerm,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConnectivityGraph {
    pub data_nodes: Vec<Node>,
    pub ancilla_nodes: Vec<Node>,
    /// Unordered pairs of node indices (`lo < hi`) into [`Self::nodes`] order.
    pub edges: BTreeMap<(usize, usize), BTreeSet<EdgeOrigin>>,
}

/// Node indices run over data nodes, then ancillas.
impl ConnectivityGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.data_nodes.iter().chain(&self.ancilla_nodes)
    }

    pub fn node_count(&self) -> usize {
        self.data_nodes.len() + self.ancilla_nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for &(a, b) in self.edges.keys() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Build from node lists and labelled edges; drops self-loops and merges duplicates.
    pub fn from_parts(data: Vec<Node>, ancillas: Vec<Node>, edges: impl IntoIterator<Item = (Node, Node, EdgeOrigin)>) -> Self {
        let index: BTreeMap<Node, usize> = data.iter().chain(&ancillas).enumerate().map(|(i, &n)| (n, i)).collect();
        let mut out = ConnectivityGraph {
            data_nodes: data,
            ancilla_nodes: ancillas,
            edges: BTreeMap::new(),
        };
        for (a, b, origin) in edges {
            let (a, b) = (index[&a], index[&b]);
            if a != b {
                out.edges.entry((a.min(b), a.max(b))).or_default().insert(origin);
            }
        }
        out
    }

    /// Plain graph on `n` vertices, all edges tagged as logical-term edges.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Self {
        let data: Vec<Node> = (0..n)
            .map(|i| Node::Data {
                copy: 0,
                cell: Cell::ORIGIN,
                local: i as u8,
            })
            .collect();
        let pairs: Vec<_> = edges.iter().map(|&(a, b)| (data[a], data[b], EdgeOrigin::LogicalTerm)).collect();
        Self::from_parts(data, Vec::new(), pairs)
    }
}

fn slot_order(p: &CellPauli) -> Vec<(Cell, u8)> {
    let mut qs: Vec<(Cell, u8)> = p.qubits().map(|(c, l, _)| (c, l as u8)).collect();
    qs.sort_by_key(|&(c, l)| (c.y, c.x, l));
    qs
}

/// Connectivity graph over a `patch × patch` block of anchor cells.
pub fn build_graph_on_patch(enc: &EncodingCandidate, spec: &HamiltonianSpec, patch: usize) -> Result<ConnectivityGraph> {
    let layout = enc.layout();
    let patch = patch.max(1) as i32;
    let anchors: Vec<Cell> = (0..patch).flat_map(|y| (0..patch).map(move |x| Cell::new(x, y))).collect();
    let copies: u8 = if layout.scheme().duplicates_spin() { 2 } else { 1 };

    let mut data = BTreeSet::new();
    let mut ancillas = Vec::new();
    let mut edges = Vec::new();
    for copy in 0..copies {
        for &a in &anchors {
            for (i, s) in enc.stabilizers().iter().enumerate() {
                let anc = Node::Ancilla {
                    copy,
                    cell: a,
                    index: i as u8,
                };
                ancillas.push(anc);
                for (c, l) in slot_order(&s.translate(a)) {
                    let q = Node::Data { copy, cell: c, local: l };
                    data.insert(q);
                    edges.push((anc, q, EdgeOrigin::StabilizerReadout));
                }
            }
        }
    }

    let terms: Vec<TermDescriptor> = enumerate_hamiltonian_terms(spec, layout)
        .into_iter()
        .filter(|t| match t {
            TermDescriptor::Hopping { nnn: false, .. } => spec.t != 0.0,
            TermDescriptor::Hopping { nnn: true, .. } => spec.t_prime != 0.0,
            TermDescriptor::OnSite { .. } => spec.u != 0.0,
        })
        .collect();
    for t in &terms {
        for img in term_images(enc, t)? {
            // A single-copy term is replicated on every copy.
            let placements: Vec<Vec<(u8, &CellPauli)>> = if img.copies.len() == 1 {
                (0..copies).map(|c| vec![(c, &img.copies[0])]).collect()
            } else {
                vec![img.copies.iter().enumerate().map(|(c, p)| (c as u8, p)).collect()]
            };
            for placement in placements {
                for &a in &anchors {
                    let chain: Vec<Node> = placement
                        .iter()
                        .flat_map(|&(copy, p)| {
                            slot_order(&p.translate(a))
                                .into_iter()
                                .map(move |(cell, local)| Node::Data { copy, cell, local })
                        })
                        .collect();
                    data.extend(chain.iter().copied());
                    edges.extend(chain.windows(2).map(|w| (w[0], w[1], EdgeOrigin::LogicalTerm)));
                }
            }
        }
    }
    Ok(ConnectivityGraph::from_parts(data.into_iter().collect(), ancillas, edges))
}

/// [`build_graph_on_patch`] with a 3×3 patch.
pub fn build_graph(enc: &EncodingCandidate, spec: &HamiltonianSpec) -> Result<ConnectivityGraph> {
    build_graph_on_patch(enc, spec, 3)
}

pub fn max_degree(g: &ConnectivityGraph) -> usize {
    g.degrees().into_iter().max().unwrap_or(0)
}

fn planar(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut g = UnGraph::<(), ()>::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for &(a, b) in edges {
        g.add_edge((a as u32).into(), (b as u32).into(), ());
    }
    rustworkx_core::planar::is_planar(&g)
}

pub fn is_planar(g: &ConnectivityGraph) -> bool {
    planar(g.node_count(), &g.edges.keys().copied().collect::<Vec<_>>())
}

/// Greedy planar decomposition; edges are inserted in `(min, max)` order.
pub fn planar_layers(g: &ConnectivityGraph) -> Vec<Vec<(usize, usize)>> {
    let n = g.node_count();
    let mut rest: Vec<(usize, usize)> = g.edges.keys().copied().collect();
    if planar(n, &rest) {
        return if rest.is_empty() { Vec::new() } else { vec![rest] };
    }
    let mut layers = Vec::new();
    while !rest.is_empty() {
        let mut layer = Vec::new();
        let mut skipped = Vec::new();
        for e in rest {
            layer.push(e);
            if !planar(n, &layer) {
                layer.pop();
                skipped.push(e);
            }
        }
        layers.push(layer);
        rest = skipped;
    }
    layers
}

/// Upper bound on graph thickness; 1 iff the graph is planar (and 1 for an edgeless graph).
pub fn thickness_upper_bound(g: &ConnectivityGraph) -> usize {
    planar_layers(g).len().max(1)
}

/// `ceil(|E| / (3|V| − 6))` for `|V| ≥ 3`, else 1.
pub fn euler_lower_bound(g: &ConnectivityGraph) -> usize {
    let (v, e) = (g.node_count(), g.edge_count());
    if v < 3 {
        return 1;
    }
    e.div_ceil(3 * v - 6).max(1)
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: usize,
    label: String,
    #[serde(flatten)]
    node: &'a Node,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    source: usize,
    target: usize,
    origin: &'a BTreeSet<EdgeOrigin>,
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    directed: bool,
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
    max_degree: usize,
    thickness_upper_bound: usize,
}

/// Node-link JSON.
pub fn to_json(g: &ConnectivityGraph) -> serde_json::Value {
    let doc = JsonGraph {
        directed: false,
        nodes: g
            .nodes()
            .enumerate()
            .map(|(id, node)| JsonNode { id, label: node.label(), node })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|(&(source, target), origin)| JsonEdge { source, target, origin })
            .collect(),
        max_degree: max_degree(g),
        thickness_upper_bound: thickness_upper_bound(g),
    };
    serde_json::to_value(doc).expect("graph serializes")
}

pub fn to_dot(g: &ConnectivityGraph) -> String {
    let labels: Vec<String> = g.nodes().map(Node::label).collect();
    let mut s = String::from("graph connectivity {\n");
    for n in &g.data_nodes {
        let _ = writeln!(s, "  {} [shape=circle];", n.label());
    }
    for n in &g.ancilla_nodes {
        let _ = writeln!(s, "  {} [shape=box];", n.label());
    }
    for (&(a, b), origin) in &g.edges {
        let style = if origin.contains(&EdgeOrigin::LogicalTerm) { "solid" } else { "dashed" };
        let _ = writeln!(s, "  {} -- {} [style={style}];", labels[a], labels[b]);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn complete(n: usize) -> ConnectivityGraph {
        let e: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        ConnectivityGraph::from_edge_list(n, &e)
    }

    /// Thickness is at most 2 iff some 2-colouring of the edges leaves both classes planar.
    fn has_two_partition(g: &ConnectivityGraph) -> bool {
        let e: Vec<_> = g.edges.keys().copied().collect();
        (0u64..1 << e.len()).any(|m| {
            let (a, b): (Vec<_>, Vec<_>) = e.iter().enumerate().partition(|(i, _)| m >> i & 1 == 1);
            let a: Vec<_> = a.into_iter().map(|(_, &x)| x).collect();
            let b: Vec<_> = b.into_iter().map(|(_, &x)| x).collect();
            planar(g.node_count(), &a) && planar(g.node_count(), &b)
        })
    }

    #[test]
    fn small_graphs() {
        assert_eq!(max_degree(&ConnectivityGraph::default()), 0);
        assert_eq!(max_degree(&ConnectivityGraph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)])), 2);
        let tree = ConnectivityGraph::from_edge_list(6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]);
        assert_eq!(thickness_upper_bound(&tree), 1);
        let k5 = complete(5);
        assert!(!is_planar(&k5));
        assert_eq!(thickness_upper_bound(&k5), 2);
        assert!(has_two_partition(&k5));
        let k33: Vec<_> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        assert_eq!(thickness_upper_bound(&ConnectivityGraph::from_edge_list(6, &k33)), 2);
        let grid: Vec<_> = (0..16)
            .flat_map(|i| {
                let mut v = Vec::new();
                if i % 4 < 3 {
                    v.push((i, i + 1));
                }
                if i < 12 {
                    v.push((i, i + 4));
                }
                v
            })
            .collect();
        assert_eq!(thickness_upper_bound(&ConnectivityGraph::from_edge_list(16, &grid)), 1);
    }

    #[test]
    fn euler_bound_holds_for_cliques() {
        for n in 3..12 {
            let g = complete(n);
            assert!(thickness_upper_bound(&g) >= euler_lower_bound(&g), "K{n}");
        }
    }

    #[test]
    fn single_ancilla_degree() {
        let a = Node::Ancilla {
            copy: 0,
            cell: Cell::ORIGIN,
            index: 0,
        };
        let data: Vec<Node> = (0..4)
            .map(|l| Node::Data {
                copy: 0,
                cell: Cell::ORIGIN,
                local: l,
            })
            .collect();
        let e: Vec<_> = data.iter().map(|&d| (a, d, EdgeOrigin::StabilizerReadout)).collect();
        assert_eq!(max_degree(&ConnectivityGraph::from_parts(data, vec![a], e)), 4);
    }

    #[test]
    fn jordan_wigner_has_no_ancillas() {
        let g = build_graph(&fixtures::jordan_wigner_chain(), &HamiltonianSpec::default()).unwrap();
        assert!(g.ancilla_nodes.is_empty());
        assert!(g.edge_count() > 0);
    }

    #[test]
    fn nn_square_has_one_ancilla_per_cell_and_copy() {
        let enc = fixtures::edge_qubit_square();
        let g = build_graph_on_patch(&enc, &HamiltonianSpec::default(), 2).unwrap();
        assert_eq!(g.ancilla_nodes.len(), 2 * 4);
        let deg = g.degrees();
        let w = enc.stabilizers()[0].weight();
        for i in g.data_nodes.len()..g.node_count() {
            assert_eq!(deg[i], w);
        }
        assert_eq!(g, build_graph_on_patch(&enc, &HamiltonianSpec::default(), 2).unwrap());
        assert!(to_dot(&g).matches("shape=box").count() == 8);
        assert_eq!(to_json(&g)["nodes"].as_array().unwrap().len(), g.node_count());
    }

    #[test]
    fn term_chain_has_weight_minus_one_edges() {
        let enc = fixtures::edge_qubit_square();
        let t = TermDescriptor::OnSite { mode: 0 };
        let img = &term_images(&enc, &t).unwrap()[0].copies[0];
        let chain: Vec<Node> = slot_order(img)
            .into_iter()
            .map(|(cell, local)| Node::Data { copy: 0, cell, local })
            .collect();
        let e: Vec<_> = chain.windows(2).map(|w| (w[0], w[1], EdgeOrigin::LogicalTerm)).collect();
        let g = ConnectivityGraph::from_parts(chain, Vec::new(), e);
        assert_eq!(g.edge_count(), img.weight() - 1);
    }
}
