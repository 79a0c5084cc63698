//! Shortest paths. The Prover replays breadth-first (or Dijkstra) rounds:
//! each round reveals the next ball around the source together with a
//! polynomial that lets the Verifier check the reveal against its sketch of
//! the graph.

mod unweighted;
mod weighted;


pub use unweighted::{SsspUnweighted, StPath};
pub use weighted::{SsspWeightedTurnstile, SsspWeightedVanilla};


use crate::field::{Fe, FieldConfig};
use crate::protocol::{ensure, Instance, Rejection, SchemeError};
use crate::stream::{Block, ProofTranscript, StreamHeader};

pub(crate) fn source_of(header: &StreamHeader) -> u32 {
    header.source.unwrap_or(1)
}

pub(crate) fn check_source(name: &'static str, inst: &Instance) -> Result<u32, SchemeError> {
    let s = inst.graph.source.unwrap_or(1);
    if s == 0 || s as usize > inst.n() {
        return Err(SchemeError::Precondition(format!("{name}: source {s} outside [1, {}]", inst.n())));
    }
    Ok(s)
}

pub(crate) fn check_nonnegative(name: &'static str, inst: &Instance) -> Result<(), SchemeError> {
    if inst.graph.final_matrix().iter().any(|&a| a < 0) {
        return Err(SchemeError::Precondition(format!("{name}: negative final multiplicity")));
    }
    Ok(())
}

/// Labels travel as `dist + 1`, with `0` for unreachable.
pub(crate) fn encode_dist(field: &FieldConfig, d: Option<u64>) -> Fe {
    d.map_or(field.zero(), |d| field.elem(d + 1))
}

pub(crate) fn decode_dist(x: Fe, max: u64) -> Result<Option<u64>, Rejection> {
    let v = x.value();
    ensure(v <= max + 1, "label-format", || format!("label {v} above {}", max + 1))?;
    Ok(v.checked_sub(1))
}

/// Breadth-first distances over positive entries of the `n x n` matrix.
pub(crate) fn bfs_dist(n: usize, matrix: &[i64], src: u32) -> Vec<Option<u64>> {
    let mut dist = vec![None; n];
    dist[src as usize - 1] = Some(0);
    let mut frontier = vec![src as usize - 1];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for u in 0..n {
                if matrix[v * n + u] > 0 && dist[u].is_none() {
                    dist[u] = Some(d);
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Dense Dijkstra; `prev` is the least vertex realising each distance.
pub(crate) fn dijkstra(n: usize, matrix: &[i64], src: u32) -> (Vec<Option<u64>>, Vec<Option<u32>>) {
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src as usize - 1] = Some(0);
    loop {
        let next = (0..n).filter(|&v| !done[v] && dist[v].is_some()).min_by_key(|&v| (dist[v], v));
        let Some(v) = next else { break };
        done[v] = true;
        let dv = dist[v].expect("reached");
        for u in 0..n {
            let w = matrix[v * n + u];
            if w > 0 && dist[u].is_none_or(|du| dv + (w as u64) < du) {
                dist[u] = Some(dv + w as u64);
            }
        }
    }
    let prev = (0..n)
        .map(|u| {
            let du = dist[u]?;
            if u + 1 == src as usize {
                return None;
            }
            (0..n).find(|&v| {
                let w = matrix[v * n + u];
                w > 0 && dist[v].is_some_and(|dv| dv + w as u64 == du)
            })
            .map(|v| v as u32 + 1)
        })
        .collect();
    (dist, prev)
}

/// Copy of `honest` with one positive entry of the label block decremented,
/// skipping the source. Labels use the `dist + 1` encoding.
pub(crate) fn label_lie(field: &FieldConfig, honest: &ProofTranscript, label: &str, stride: usize, src: u32, rng: &mut crate::field::ProtocolRng) -> Option<ProofTranscript> {
    use rand::seq::IndexedRandom;
    let mut t = honest.clone();
    let b = t.blocks.iter_mut().find(|b| b.label() == label)?;
    let Block::Scalars { values, .. } = b else { return None };
    let idx: Vec<usize> = (0..values.len() / stride)
        .filter(|&v| v + 1 != src as usize && values[v * stride].value() > 1)
        .collect();
    let &v = idx.choose(rng)?;
    values[v * stride] -= field.one();
    Some(t)
}
