//! Prover help messages.
//!
//! Binary layout: magic `SVT1`, modulus (u64), block count (u32), then per
//! block a kind byte, a length-prefixed ASCII label and the payload. All
//! integers are little-endian.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::field::{Fe, FieldConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VItem {
    V(u32),
    Delim,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    /// Values of a polynomial on the grid `[d_1 + 1] x ... x [d_k + 1]`,
    /// last coordinate fastest.
    Poly { label: String, degrees: Vec<usize>, values: Vec<Fe> },
    Vertices { label: String, items: Vec<VItem> },
    Scalars { label: String, values: Vec<Fe> },
}

impl Block {
    pub fn label(&self) -> &str {
        match self {
            Block::Poly { label, .. } | Block::Vertices { label, .. } | Block::Scalars { label, .. } => label,
        }
    }

    /// Serialized field elements or vertex records (delimiters included).
    pub fn element_count(&self) -> usize {
        match self {
            Block::Poly { values, .. } | Block::Scalars { values, .. } => values.len(),
            Block::Vertices { items, .. } => items.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTranscript {
    pub modulus: u64,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ProofTranscript {
    pub fn new(field: &FieldConfig) -> Self {
        Self { modulus: field.modulus(), blocks: Vec::new() }
    }

    pub fn element_count(&self) -> usize {
        self.blocks.iter().map(Block::element_count).sum()
    }

    pub fn push_poly(&mut self, label: &str, degrees: Vec<usize>, values: Vec<Fe>) {
        self.blocks.push(Block::Poly { label: label.into(), degrees, values });
    }

    pub fn push_vertices(&mut self, label: &str, items: Vec<VItem>) {
        self.blocks.push(Block::Vertices { label: label.into(), items });
    }

    pub fn push_vertex_ids(&mut self, label: &str, ids: impl IntoIterator<Item = u32>) {
        self.push_vertices(label, ids.into_iter().map(VItem::V).collect());
    }

    /// Delimited list of sets, each followed by a delimiter.
    pub fn push_sets<I, S>(&mut self, label: &str, sets: I)
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = u32>,
    {
        let mut items = Vec::new();
        for set in sets {
            items.extend(set.into_iter().map(VItem::V));
            items.push(VItem::Delim);
        }
        self.push_vertices(label, items);
    }

    pub fn push_scalars(&mut self, label: &str, values: Vec<Fe>) {
        self.blocks.push(Block::Scalars { label: label.into(), values });
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(b"SVT1")?;
        out.write_all(&self.modulus.to_le_bytes())?;
        out.write_all(&(self.blocks.len() as u32).to_le_bytes())?;
        for b in &self.blocks {
            let kind = match b {
                Block::Poly { .. } => 0u8,
                Block::Vertices { .. } => 1,
                Block::Scalars { .. } => 2,
            };
            out.write_all(&[kind, b.label().len() as u8])?;
            out.write_all(b.label().as_bytes())?;
            match b {
                Block::Poly { degrees, values, .. } => {
                    out.write_all(&[degrees.len() as u8])?;
                    for &d in degrees {
                        out.write_all(&(d as u32).to_le_bytes())?;
                    }
                    write_values(&mut out, values)?;
                }
                Block::Scalars { values, .. } => write_values(&mut out, values)?,
                Block::Vertices { items, .. } => {
                    out.write_all(&(items.len() as u64).to_le_bytes())?;
                    for it in items {
                        let code = match it {
                            VItem::V(v) => *v,
                            VItem::Delim => 0,
                        };
                        out.write_all(&code.to_le_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self, TranscriptError> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"SVT1" {
            return Err(TranscriptError::Format("bad magic".into()));
        }
        let modulus = read_u64(&mut input)?;
        let field = FieldConfig::new(modulus).map_err(|e| TranscriptError::Format(e.to_string()))?;
        let count = read_u32(&mut input)?;
        let mut blocks = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut hdr = [0u8; 2];
            input.read_exact(&mut hdr)?;
            let mut label = vec![0u8; hdr[1] as usize];
            input.read_exact(&mut label)?;
            let label = String::from_utf8(label).ok().filter(|l| l.is_ascii()).ok_or_else(|| TranscriptError::Format("label is not ASCII".into()))?;
            blocks.push(match hdr[0] {
                0 => {
                    let mut k = [0u8; 1];
                    input.read_exact(&mut k)?;
                    let degrees = (0..k[0]).map(|_| read_u32(&mut input).map(|d| d as usize)).collect::<Result<_, _>>()?;
                    Block::Poly { label, degrees, values: read_values(&mut input, &field)? }
                }
                1 => {
                    let len = read_u64(&mut input)?;
                    let items = (0..len)
                        .map(|_| read_u32(&mut input).map(|c| if c == 0 { VItem::Delim } else { VItem::V(c) }))
                        .collect::<Result<_, _>>()?;
                    Block::Vertices { label, items }
                }
                2 => Block::Scalars { label, values: read_values(&mut input, &field)? },
                k => return Err(TranscriptError::Format(format!("unknown block kind {k}"))),
            });
        }
        Ok(Self { modulus, blocks })
    }
}

fn write_values<W: Write>(out: &mut W, values: &[Fe]) -> io::Result<()> {
    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        out.write_all(&v.value().to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_values<R: Read>(r: &mut R, field: &FieldConfig) -> Result<Vec<Fe>, TranscriptError> {
    let len = read_u64(r)?;
    (0..len)
        .map(|_| {
            let v = read_u64(r)?;
            if v >= field.modulus() {
                return Err(TranscriptError::Format(format!("value {v} not reduced")));
            }
            Ok(field.elem(v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_round_trip() {
        let f = FieldConfig::new(101).unwrap();
        let mut t = ProofTranscript::new(&f);
        t.push_poly("p", vec![2], vec![f.elem(1), f.elem(4), f.elem(9)]);
        t.push_sets("sets", vec![vec![1, 2], vec![3]]);
        t.push_scalars("q", vec![f.elem(7)]);
        assert_eq!(t.element_count(), 3 + 5 + 1);
        let back = ProofTranscript::read_from(&t.to_bytes()[..]).unwrap();
        assert_eq!(back, t);
        let mut bytes = t.to_bytes();
        bytes[0] = b'X';
        assert!(ProofTranscript::read_from(&bytes[..]).is_err());
    }
}
