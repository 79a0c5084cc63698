//! Schemes built on edge counting and the set sub-schemes: maximum matching,
//! maximal independent set, topological order, acyclicity and connected
//! components.

pub mod blossom;
mod components;
mod matching;
mod mis;
mod topo;

pub use components::Components;
pub use matching::{matching_certificate, MatchingCertificate, MaxMatchFrugal, MaxMatchLaconic};
pub use mis::{greedy_mis, Mis};
pub use topo::{Acyclicity, TopoSort};

use crate::field::{Fe, FieldConfig};
use crate::protocol::{Instance, SchemeError, SpaceMeter};
use crate::setops::{edge_index, ordered, prove_line, LineMode, LineSketch, SetShape};
use crate::stream::Model;

/// Vanilla stream without repeated pairs, with the requested orientation.
pub(crate) fn check_simple(name: &'static str, inst: &Instance, directed: bool) -> Result<(), SchemeError> {
    let g = &inst.graph;
    if g.model != Model::Vanilla {
        return Err(SchemeError::Model { scheme: name, expected: "vanilla", got: g.model.name() });
    }
    if g.directed != directed {
        let want = if directed { "a directed" } else { "an undirected" };
        return Err(SchemeError::Precondition(format!("{name} needs {want} graph")));
    }
    if g.has_repeated_pairs() {
        return Err(SchemeError::Precondition(format!("{name} needs a simple graph (no repeated pairs)")));
    }
    Ok(())
}

/// Index of a pair in `[n^2]`; unordered pairs are normalised first.
pub(crate) fn pair_index(u: u32, v: u32, n: usize, directed: bool) -> usize {
    let (a, b) = if directed { (u, v) } else { ordered(u, v) };
    edge_index(a, b, n)
}

pub(crate) fn pair_shape(n: usize, s: usize) -> SetShape {
    SetShape::with_v(n * n, s)
}

/// Sketch of a set of pairs along a line.
pub(crate) struct PairLine {
    pub line: LineSketch,
    n: usize,
    directed: bool,
}

impl PairLine {
    pub fn new(field: FieldConfig, n: usize, s: usize, directed: bool, r: Fe, meter: &SpaceMeter) -> Self {
        Self { line: LineSketch::new(field, pair_shape(n, s), r, meter), n, directed }
    }

    pub fn add(&mut self, u: u32, v: u32, delta: Fe) {
        self.line.update(pair_index(u, v, self.n, self.directed), delta).expect("pair in range");
    }
}

/// Honest subset polynomial for `pairs` inside the edge set.
pub(crate) fn prove_pairs_subset(
    field: &FieldConfig,
    n: usize,
    s: usize,
    directed: bool,
    pairs: &[(u32, u32)],
    edges: &[(u32, u32)],
) -> Vec<Fe> {
    let idx = |p: &[(u32, u32)]| p.iter().map(|&(u, v)| pair_index(u, v, n, directed)).collect::<Vec<_>>();
    prove_line(field, pair_shape(n, s), &idx(pairs), &idx(edges), LineMode::Subset)
}

/// `sum_{v=1}^{n} r^v`.
pub(crate) fn full_set_fingerprint(r: Fe, n: usize) -> Fe {
    let mut acc = r.zero_like();
    let mut pw = r;
    for _ in 0..n {
        acc += pw;
        pw *= r;
    }
    acc
}

/// Edge list of a simple vanilla instance in stream order.
pub(crate) fn edge_list(inst: &Instance) -> Vec<(u32, u32)> {
    inst.graph.tokens.iter().map(|t| {
        let (u, v, _) = t.kind.as_update();
        (u, v)
    }).collect()
}
