//! Dishonest Prover strategies applied to an honest transcript.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{random_nonzero, Instance};
use crate::field::{FieldConfig, ProtocolRng};
use crate::stream::{Block, ProofTranscript, VItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationPolicy {
    /// No mutation; every trial should accept the correct output.
    Honest,
    /// Add a random nonzero value to one polynomial value.
    CoeffFlip,
    /// Drop the last element of one block.
    Truncate,
    /// Change the claimed output through a degree-consistent edit.
    OutputLie,
    /// Swap two different vertices in a vertex list.
    VertexPermutationLie,
    /// Force one scalar of a `Q` block to zero (or a zero to nonzero).
    QdFlip,
    /// Decrement one distance label.
    LabelLie,
}

impl MutationPolicy {
    pub const ALL: [MutationPolicy; 7] = [
        MutationPolicy::Honest,
        MutationPolicy::CoeffFlip,
        MutationPolicy::Truncate,
        MutationPolicy::OutputLie,
        MutationPolicy::VertexPermutationLie,
        MutationPolicy::QdFlip,
        MutationPolicy::LabelLie,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationPolicy::Honest => "honest",
            MutationPolicy::CoeffFlip => "coeff-flip",
            MutationPolicy::Truncate => "truncate",
            MutationPolicy::OutputLie => "output-lie",
            MutationPolicy::VertexPermutationLie => "vertex-permutation",
            MutationPolicy::QdFlip => "qd-flip",
            MutationPolicy::LabelLie => "label-lie",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

fn pick_block<F: Fn(&Block) -> bool>(t: &ProofTranscript, pred: F, rng: &mut ProtocolRng) -> Option<usize> {
    let idx: Vec<usize> = t.blocks.iter().enumerate().filter(|(_, b)| pred(b)).map(|(i, _)| i).collect();
    idx.choose(rng).copied()
}

/// Policy-driven edits that need no knowledge of the scheme. `OutputLie`
/// adds one to the first value of the first polynomial block, which lies
/// inside every summation box.
pub fn generic_mutation(
    inst: &Instance,
    field: &FieldConfig,
    honest: &ProofTranscript,
    policy: MutationPolicy,
    rng: &mut ProtocolRng,
) -> Option<ProofTranscript> {
    let mut t = honest.clone();
    match policy {
        MutationPolicy::Honest => return None,
        MutationPolicy::CoeffFlip => {
            let b = pick_block(&t, |b| matches!(b, Block::Poly { values, .. } if !values.is_empty()), rng)?;
            if let Block::Poly { values, .. } = &mut t.blocks[b] {
                let i = rng.random_range(0..values.len());
                values[i] += random_nonzero(field, rng);
            }
        }
        MutationPolicy::Truncate => {
            let b = pick_block(&t, |b| b.element_count() > 0, rng)?;
            match &mut t.blocks[b] {
                Block::Poly { values, .. } | Block::Scalars { values, .. } => {
                    values.pop();
                }
                Block::Vertices { items, .. } => {
                    items.pop();
                }
            }
        }
        MutationPolicy::OutputLie => {
            let b = t.blocks.iter().position(|b| matches!(b, Block::Poly { values, .. } if !values.is_empty()))?;
            if let Block::Poly { values, .. } = &mut t.blocks[b] {
                values[0] += field.one();
            }
        }
        MutationPolicy::VertexPermutationLie => {
            let b = pick_block(&t, |b| matches!(b, Block::Vertices { items, .. } if items.iter().any(|i| matches!(i, VItem::V(_)))), rng)?;
            if let Block::Vertices { items, .. } = &mut t.blocks[b] {
                let pos: Vec<usize> = (0..items.len()).filter(|&i| matches!(items[i], VItem::V(_))).collect();
                let i = *pos.choose(rng)?;
                let others: Vec<usize> = pos.iter().copied().filter(|&j| items[j] != items[i]).collect();
                match others.choose(rng) {
                    Some(&j) => items.swap(i, j),
                    None => {
                        let n = inst.n() as u32;
                        if n < 2 {
                            return None;
                        }
                        let VItem::V(v) = items[i] else { unreachable!() };
                        let mut w = rng.random_range(1..n);
                        if w >= v {
                            w += 1;
                        }
                        items[i] = VItem::V(w);
                    }
                }
            }
        }
        MutationPolicy::QdFlip => {
            let b = pick_block(&t, |b| matches!(b, Block::Scalars { label, values } if label.starts_with('Q') && !values.is_empty()), rng)?;
            if let Block::Scalars { values, .. } = &mut t.blocks[b] {
                let nz: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_zero()).collect();
                match nz.choose(rng) {
                    Some(&i) => values[i] = field.zero(),
                    None => {
                        let i = rng.random_range(0..values.len());
                        values[i] = random_nonzero(field, rng);
                    }
                }
            }
        }
        MutationPolicy::LabelLie => return None,
    }
    Some(t)
}
