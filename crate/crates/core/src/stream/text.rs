//! Text and binary stream file formats.
//!
//! Text: a header line `n=<int> model=<turnstile|vanilla|weighted|adjlist>
//! [W=<int>] [source=<int>] [target=<int>] [directed=<0|1>]`, then one token
//! per line (`u v D`, `u v`, `u v w` or `v: u1 u2 ...`). Blank lines and
//! lines starting with `#` are skipped.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::{GraphInstance, Model, TokenKind};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} outside [1, {n}]")]
    VertexOutOfRange { line: usize, vertex: i64, n: usize },
    #[error("empty stream file")]
    Empty,
    #[error("binary stream: {0}")]
    Binary(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, msg: msg.into() }
}

struct Header {
    n: usize,
    model: Model,
    directed: bool,
    w: Option<u64>,
    source: Option<u32>,
    target: Option<u32>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, ParseError> {
    let mut n = None;
    let mut model = None;
    let mut h = Header { n: 0, model: Model::Turnstile, directed: false, w: None, source: None, target: None };
    for field in line.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| malformed(line_no, format!("expected key=value, got `{field}`")))?;
        let num = || v.parse::<u64>().map_err(|_| malformed(line_no, format!("bad number for {k}: `{v}`")));
        match k {
            "n" => n = Some(num()? as usize),
            "model" => model = Some(Model::from_name(v).ok_or_else(|| malformed(line_no, format!("unknown model `{v}`")))?),
            "W" => h.w = Some(num()?),
            "source" => h.source = Some(num()? as u32),
            "target" => h.target = Some(num()? as u32),
            "directed" => {
                h.directed = match v {
                    "0" | "false" => false,
                    "1" | "true" => true,
                    _ => return Err(malformed(line_no, format!("bad directed flag `{v}`"))),
                }
            }
            _ => return Err(malformed(line_no, format!("unknown header key `{k}`"))),
        }
    }
    h.n = n.ok_or_else(|| malformed(line_no, "header missing n="))?;
    h.model = model.ok_or_else(|| malformed(line_no, "header missing model="))?;
    if h.n == 0 {
        return Err(malformed(line_no, "n must be positive"));
    }
    if h.n > u32::MAX as usize / 2 {
        return Err(malformed(line_no, "n too large"));
    }
    for v in [h.source, h.target].into_iter().flatten() {
        if v == 0 || v as usize > h.n {
            return Err(ParseError::VertexOutOfRange { line: line_no, vertex: v as i64, n: h.n });
        }
    }
    Ok(h)
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<u32, ParseError> {
    let v: i64 = tok.parse().map_err(|_| malformed(line, format!("bad vertex `{tok}`")))?;
    if v < 1 || v as usize > n {
        return Err(ParseError::VertexOutOfRange { line, vertex: v, n });
    }
    Ok(v as u32)
}

fn signed(line: usize, tok: &str) -> Result<i64, ParseError> {
    tok.strip_prefix('+').unwrap_or(tok).parse().map_err(|_| malformed(line, format!("bad integer `{tok}`")))
}

/// Parses the text stream format; tokens keep file order.
pub fn parse_stream(text: &str) -> Result<GraphInstance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(ParseError::Empty)?;
    let h = parse_header(hl, header)?;
    let mut g = GraphInstance::new(h.n, h.model, h.directed);
    g.weight_bound = h.w;
    g.source = h.source;
    g.target = h.target;
    let mut listed = HashSet::new();
    let mut max_w = 0i64;
    for (ln, line) in lines {
        if h.model == Model::AdjList {
            let (head, rest) = line.split_once(':').ok_or_else(|| malformed(ln, "expected `v: u1 u2 ...`"))?;
            let v = vertex(ln, head.trim(), h.n)?;
            if !listed.insert(v) {
                return Err(malformed(ln, format!("neighbor list of {v} is not contiguous")));
            }
            for tok in rest.split_whitespace() {
                let u = vertex(ln, tok, h.n)?;
                if u == v {
                    return Err(malformed(ln, "self-loop"));
                }
                g.push(TokenKind::AdjListEntry { v, neighbor: u });
            }
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let want = if h.model == Model::Vanilla { 2 } else { 3 };
        if parts.len() != want {
            return Err(malformed(ln, format!("expected {want} fields, got {}", parts.len())));
        }
        let u = vertex(ln, parts[0], h.n)?;
        let v = vertex(ln, parts[1], h.n)?;
        if u == v {
            return Err(malformed(ln, "self-loop"));
        }
        let kind = match h.model {
            Model::Turnstile => TokenKind::TurnstileEdge { u, v, delta: signed(ln, parts[2])? },
            Model::Vanilla => TokenKind::VanillaEdge { u, v },
            Model::Weighted => {
                let w = signed(ln, parts[2])?;
                if w < 1 || h.w.is_some_and(|bound| w as u64 > bound) {
                    return Err(malformed(ln, format!("weight {w} outside [1, W]")));
                }
                max_w = max_w.max(w);
                TokenKind::WeightedEdge { u, v, w }
            }
            Model::AdjList => unreachable!(),
        };
        g.push(kind);
    }
    if h.model == Model::Weighted && g.weight_bound.is_none() {
        g.weight_bound = Some(max_w.max(1) as u64);
    }
    Ok(g)
}

/// Renders an instance in the text format.
pub fn write_stream(g: &GraphInstance) -> String {
    let mut out = format!("n={} model={}", g.n, g.model.name());
    if let Some(w) = g.weight_bound {
        let _ = write!(out, " W={w}");
    }
    if let Some(s) = g.source {
        let _ = write!(out, " source={s}");
    }
    if let Some(t) = g.target {
        let _ = write!(out, " target={t}");
    }
    if g.directed {
        out.push_str(" directed=1");
    }
    out.push('\n');
    let mut i = 0;
    while i < g.tokens.len() {
        match g.tokens[i].kind {
            TokenKind::TurnstileEdge { u, v, delta } => {
                let _ = writeln!(out, "{u} {v} {delta:+}");
            }
            TokenKind::VanillaEdge { u, v } => {
                let _ = writeln!(out, "{u} {v}");
            }
            TokenKind::WeightedEdge { u, v, w } => {
                let _ = writeln!(out, "{u} {v} {w}");
            }
            TokenKind::AdjListEntry { v, .. } => {
                let _ = write!(out, "{v}:");
                while let Some(TokenKind::AdjListEntry { v: v2, neighbor }) = g.tokens.get(i).map(|t| t.kind) {
                    if v2 != v {
                        break;
                    }
                    let _ = write!(out, " {neighbor}");
                    i += 1;
                }
                out.push('\n');
                continue;
            }
        }
        i += 1;
    }
    out
}

const STREAM_MAGIC: &[u8; 4] = b"SVS1";

fn model_code(m: Model) -> u8 {
    match m {
        Model::Turnstile => 0,
        Model::Vanilla => 1,
        Model::Weighted => 2,
        Model::AdjList => 3,
    }
}

/// Binary stream format with the same semantics as the text format.
pub fn write_binary_stream<W: Write>(g: &GraphInstance, mut out: W) -> io::Result<()> {
    out.write_all(STREAM_MAGIC)?;
    out.write_all(&(g.n as u32).to_le_bytes())?;
    out.write_all(&[model_code(g.model), g.directed as u8])?;
    out.write_all(&g.weight_bound.unwrap_or(0).to_le_bytes())?;
    out.write_all(&g.source.unwrap_or(0).to_le_bytes())?;
    out.write_all(&g.target.unwrap_or(0).to_le_bytes())?;
    out.write_all(&(g.tokens.len() as u64).to_le_bytes())?;
    for t in &g.tokens {
        let (u, v, amount) = t.kind.as_update();
        out.write_all(&u.to_le_bytes())?;
        out.write_all(&v.to_le_bytes())?;
        out.write_all(&amount.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary_stream<R: Read>(mut input: R) -> Result<GraphInstance, ParseError> {
    fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N], ParseError> {
        let mut b = [0u8; N];
        r.read_exact(&mut b).map_err(|e| ParseError::Binary(e.to_string()))?;
        Ok(b)
    }
    if &take::<4, _>(&mut input)? != STREAM_MAGIC {
        return Err(ParseError::Binary("bad magic".into()));
    }
    let n = u32::from_le_bytes(take(&mut input)?) as usize;
    let [mc, dir] = take::<2, _>(&mut input)?;
    let model = match mc {
        0 => Model::Turnstile,
        1 => Model::Vanilla,
        2 => Model::Weighted,
        3 => Model::AdjList,
        _ => return Err(ParseError::Binary(format!("unknown model code {mc}"))),
    };
    let w = u64::from_le_bytes(take(&mut input)?);
    let source = u32::from_le_bytes(take(&mut input)?);
    let target = u32::from_le_bytes(take(&mut input)?);
    let count = u64::from_le_bytes(take(&mut input)?);
    let mut g = GraphInstance::new(n, model, dir != 0);
    g.weight_bound = (w != 0).then_some(w);
    g.source = (source != 0).then_some(source);
    g.target = (target != 0).then_some(target);
    for i in 0..count {
        let u = u32::from_le_bytes(take(&mut input)?);
        let v = u32::from_le_bytes(take(&mut input)?);
        let a = i64::from_le_bytes(take(&mut input)?);
        if u == 0 || v == 0 || u as usize > n || v as usize > n || u == v {
            return Err(ParseError::Binary(format!("token {i}: bad endpoints ({u}, {v})")));
        }
        g.push(match model {
            Model::Turnstile => TokenKind::TurnstileEdge { u, v, delta: a },
            Model::Vanilla => TokenKind::VanillaEdge { u, v },
            Model::Weighted => TokenKind::WeightedEdge { u, v, w: a },
            Model::AdjList => TokenKind::AdjListEntry { v: u, neighbor: v },
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_turnstile() {
        let g = parse_stream("n=3 model=turnstile\n1 2 +1\n2 3 +1\n1 3 +1\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.final_edges().len(), 3);
    }

    #[test]
    fn cancellation_to_zero() {
        let g = parse_stream("n=2 model=turnstile\n1 2 +1\n1 2 -1\n").unwrap();
        assert_eq!(g.final_matrix()[1], 0);
    }

    #[test]
    fn adjacency_groups() {
        let g = parse_stream("n=3 model=adjlist\n1: 2 3\n2: 1 3\n3: 1 2\n").unwrap();
        let heads: Vec<u32> = g.tokens.iter().map(|t| match t.kind {
            TokenKind::AdjListEntry { v, .. } => v,
            _ => panic!(),
        }).collect();
        assert_eq!(heads, vec![1, 1, 2, 2, 3, 3]);
        let err = parse_stream("n=3 model=adjlist\n1: 2\n2: 1\n1: 3\n").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 4, .. }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_stream("n=3 model=vanilla\n1 2\n\n1 x\n").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 4, .. }), "{err}");
        let err = parse_stream("n=3 model=vanilla\n1 4\n").unwrap_err();
        assert!(matches!(err, ParseError::VertexOutOfRange { line: 2, vertex: 4, .. }));
        assert!(parse_stream("model=vanilla\n").is_err());
        assert!(parse_stream("").is_err());
        assert!(parse_stream("n=3 model=weighted W=2\n1 2 3\n").is_err());
    }

    #[test]
    fn text_and_binary_round_trip() {
        let src = "n=4 model=weighted W=5 source=1 target=4 directed=1\n1 2 3\n2 4 5\n";
        let g = parse_stream(src).unwrap();
        assert_eq!(write_stream(&g), src);
        let mut buf = Vec::new();
        write_binary_stream(&g, &mut buf).unwrap();
        assert_eq!(read_binary_stream(&buf[..]).unwrap(), g);
        let adj = parse_stream("n=3 model=adjlist\n1: 2 3\n2: 1\n3: 1\n").unwrap();
        assert_eq!(parse_stream(&write_stream(&adj)).unwrap(), adj);
    }
}
