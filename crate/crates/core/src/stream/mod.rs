//! Graph streams and proof transcripts.

mod text;
mod transcript;

pub use text::{parse_stream, read_binary_stream, write_binary_stream, write_stream, ParseError};
pub use transcript::{Block, ProofTranscript, TranscriptError, VItem};

/// Stream model of a graph instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Turnstile,
    Vanilla,
    Weighted,
    AdjList,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Turnstile => "turnstile",
            Model::Vanilla => "vanilla",
            Model::Weighted => "weighted",
            Model::AdjList => "adjlist",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "turnstile" => Model::Turnstile,
            "vanilla" => Model::Vanilla,
            "weighted" => Model::Weighted,
            "adjlist" => Model::AdjList,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    TurnstileEdge { u: u32, v: u32, delta: i64 },
    VanillaEdge { u: u32, v: u32 },
    WeightedEdge { u: u32, v: u32, w: i64 },
    AdjListEntry { v: u32, neighbor: u32 },
}

impl TokenKind {
    /// Endpoints and the signed amount added to the pair's multiplicity
    /// (or weight). Adjacency entries report `(v, neighbor, 1)`.
    pub fn as_update(&self) -> (u32, u32, i64) {
        match *self {
            TokenKind::TurnstileEdge { u, v, delta } => (u, v, delta),
            TokenKind::VanillaEdge { u, v } => (u, v, 1),
            TokenKind::WeightedEdge { u, v, w } => (u, v, w),
            TokenKind::AdjListEntry { v, neighbor } => (v, neighbor, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamToken {
    pub kind: TokenKind,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    pub n: usize,
    pub model: Model,
    pub directed: bool,
    /// Weight bound `W`, when the header declares one.
    pub weight_bound: Option<u64>,
    pub source: Option<u32>,
    pub target: Option<u32>,
    pub tokens: Vec<StreamToken>,
}

impl GraphInstance {
    pub fn new(n: usize, model: Model, directed: bool) -> Self {
        Self { n, model, directed, weight_bound: None, source: None, target: None, tokens: Vec::new() }
    }

    pub fn push(&mut self, kind: TokenKind) {
        let pos = self.tokens.len();
        self.tokens.push(StreamToken { kind, pos });
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Final multiplicity (or weight) matrix, row-major `n x n`, 0-based.
    /// Undirected instances are symmetrized; adjacency-list entries are
    /// taken as directed records of a symmetric relation and not doubled.
    pub fn final_matrix(&self) -> Vec<i64> {
        let n = self.n;
        let mut a = vec![0i64; n * n];
        for tok in &self.tokens {
            let (u, v, d) = tok.kind.as_update();
            let (u, v) = (u as usize - 1, v as usize - 1);
            a[u * n + v] += d;
            if !self.directed && self.model != Model::AdjList {
                a[v * n + u] += d;
            }
        }
        a
    }

    /// Edges with positive final multiplicity, `u < v` for undirected graphs.
    pub fn final_edges(&self) -> Vec<(u32, u32, i64)> {
        let n = self.n;
        let a = self.final_matrix();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if a[u * n + v] > 0 && (self.directed || u < v) {
                    out.push((u as u32 + 1, v as u32 + 1, a[u * n + v]));
                }
            }
        }
        out
    }

    /// Largest absolute per-token amount; used to size weight domains.
    pub fn max_abs_amount(&self) -> i64 {
        self.tokens.iter().map(|t| t.kind.as_update().2.abs()).max().unwrap_or(0)
    }

    /// Whether some pair appears in more than one token.
    pub fn has_repeated_pairs(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.tokens.iter().any(|t| {
            let (u, v, _) = t.kind.as_update();
            let key = if self.directed || self.model == Model::AdjList { (u, v) } else { (u.min(v), u.max(v)) };
            !seen.insert(key)
        })
    }
}

/// What a Verifier knows before the first token arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub n: usize,
    pub model: Model,
    pub directed: bool,
    pub weight_bound: Option<u64>,
    pub source: Option<u32>,
    pub target: Option<u32>,
}

impl GraphInstance {
    /// Declared `W`, or for weighted and turnstile streams the largest final
    /// entry (at least 1).
    pub fn effective_weight_bound(&self) -> Option<u64> {
        self.weight_bound.or_else(|| match self.model {
            Model::Weighted | Model::Turnstile => Some(self.final_matrix().into_iter().max().unwrap_or(0).max(1) as u64),
            _ => None,
        })
    }

    pub fn header(&self) -> StreamHeader {
        StreamHeader {
            n: self.n,
            model: self.model,
            directed: self.directed,
            weight_bound: self.effective_weight_bound(),
            source: self.source,
            target: self.target,
        }
    }
}

/// Set families streamed after the edges (inputs of the edge-count schemes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFamily {
    Induced(Vec<Vec<u32>>),
    Cross(Vec<(Vec<u32>, Vec<u32>)>),
}

impl SetFamily {
    pub fn len(&self) -> usize {
        match self {
            SetFamily::Induced(s) => s.len(),
            SetFamily::Cross(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One set per line: `1 2 3` for induced families, `1 2 | 4 5` for
    /// cross pairs. A family is cross if any line contains `|`.
    pub fn parse(text: &str, n: usize) -> Result<Self, ParseError> {
        let lines: Vec<(usize, &str)> =
            text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.starts_with('#')).collect();
        let lines: Vec<(usize, &str)> = lines.into_iter().filter(|(_, l)| !l.is_empty()).collect();
        let cross = lines.iter().any(|(_, l)| l.contains('|'));
        let parse_set = |ln: usize, part: &str| -> Result<Vec<u32>, ParseError> {
            part.split_whitespace()
                .map(|tok| {
                    let v: i64 = tok.parse().map_err(|_| ParseError::Malformed { line: ln, msg: format!("bad vertex `{tok}`") })?;
                    if v < 1 || v as usize > n {
                        return Err(ParseError::VertexOutOfRange { line: ln, vertex: v, n });
                    }
                    Ok(v as u32)
                })
                .collect()
        };
        if cross {
            let mut out = Vec::new();
            for (ln, l) in lines {
                let (a, b) = l.split_once('|').ok_or_else(|| ParseError::Malformed { line: ln, msg: "expected `U | W`".into() })?;
                out.push((parse_set(ln, a)?, parse_set(ln, b)?));
            }
            Ok(SetFamily::Cross(out))
        } else {
            lines.into_iter().map(|(ln, l)| parse_set(ln, l)).collect::<Result<_, _>>().map(SetFamily::Induced)
        }
    }

    pub fn render(&self) -> String {
        let join = |s: &[u32]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            SetFamily::Induced(sets) => sets.iter().map(|s| join(s) + "\n").collect(),
            SetFamily::Cross(pairs) => pairs.iter().map(|(a, b)| format!("{} | {}\n", join(a), join(b))).collect(),
        }
    }
}

pub trait StreamObserver {
    fn observe(&mut self, token: &StreamToken);
}

impl<F: FnMut(&StreamToken)> StreamObserver for F {
    fn observe(&mut self, token: &StreamToken) {
        self(token)
    }
}

/// Delivers every token once, in order, to each observer.
pub fn replay(instance: &GraphInstance, observers: &mut [&mut dyn StreamObserver]) {
    for tok in &instance.tokens {
        for obs in observers.iter_mut() {
            obs.observe(tok);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> GraphInstance {
        let mut g = GraphInstance::new(3, Model::Turnstile, false);
        for (u, v) in [(1, 2), (2, 3), (1, 3)] {
            g.push(TokenKind::TurnstileEdge { u, v, delta: 1 });
        }
        g
    }

    #[test]
    fn observers_see_identical_sequences() {
        let g = triangle();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut count = 0usize;
        {
            let mut oa = |t: &StreamToken| a.push(*t);
            let mut ob = |t: &StreamToken| b.push(*t);
            let mut oc = |_: &StreamToken| count += 1;
            replay(&g, &mut [&mut oa, &mut ob, &mut oc]);
        }
        assert_eq!(a, b);
        assert_eq!(count, 3);
        let mut again = Vec::new();
        replay(&g, &mut [&mut |t: &StreamToken| again.push(*t)]);
        assert_eq!(a, again);
    }

    #[test]
    fn set_family_text() {
        let f = SetFamily::parse("1 2\n\n3\n", 3).unwrap();
        assert_eq!(f, SetFamily::Induced(vec![vec![1, 2], vec![3]]));
        assert_eq!(SetFamily::parse(&f.render(), 3).unwrap(), f);
        let c = SetFamily::parse("1 | 2 3\n", 3).unwrap();
        assert_eq!(c, SetFamily::Cross(vec![(vec![1], vec![2, 3])]));
        assert_eq!(SetFamily::parse(&c.render(), 3).unwrap(), c);
        assert!(SetFamily::parse("1 4\n", 3).is_err());
    }

    #[test]
    fn cancellation() {
        let mut g = GraphInstance::new(2, Model::Turnstile, false);
        g.push(TokenKind::TurnstileEdge { u: 1, v: 2, delta: 1 });
        g.push(TokenKind::TurnstileEdge { u: 1, v: 2, delta: -1 });
        assert!(g.final_matrix().iter().all(|&x| x == 0));
        assert!(g.final_edges().is_empty());
        assert!(g.has_repeated_pairs());
    }
}
