//! Connected components. Every claimed component streams as a rooted tree:
//! one record `(v, parent, parent position, child count)` per vertex, roots
//! carrying parent `0`. Parents must sit earlier in the same block, which a
//! fingerprint over `(position, vertex)` pairs confirms; tree edges must be
//! graph edges, and no edge may leave a block.

use std::collections::VecDeque;

use super::{check_simple, edge_list, full_set_fingerprint, prove_pairs_subset, PairLine};
use crate::edgecount::{self, check_poly, poly_degrees, EdgeTable, SetWorkspace, SPACE_SLACK};
use crate::extension::ShapeConfig;
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_components, DenseGraph};
use crate::protocol::{
    ensure, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter, StreamVerifier,
    Tuning,
};
use crate::setops::{check_subset, Fingerprint};
use crate::stream::{ProofTranscript, StreamHeader, StreamToken};

/// One vertex of a component's tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeRecord {
    pub vertex: u32,
    /// 0 for a root.
    pub parent: u32,
    /// 1-based position of the parent record, 0 for a root.
    pub parent_pos: u32,
    pub children: u32,
}

/// BFS trees of each claimed part, using only edges inside the part. A part
/// the Prover cannot span gets its first vertex as every parent.
pub fn tree_records(n: usize, edges: &[(u32, u32)], parts: &[Vec<u32>]) -> Vec<TreeRecord> {
    let mut part_of = vec![usize::MAX; n + 1];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            part_of[v as usize] = i;
        }
    }
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        if part_of[u as usize] == part_of[v as usize] {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
    }
    let mut records: Vec<TreeRecord> = Vec::with_capacity(n);
    let mut pos = vec![0u32; n + 1];
    for p in parts {
        let Some(&root) = p.iter().min() else { continue };
        let start = records.len();
        let mut q = VecDeque::from([(root, 0u32)]);
        pos[root as usize] = start as u32 + 1;
        let mut placed = vec![root];
        while let Some((v, parent)) = q.pop_front() {
            let parent_pos = if parent == 0 { 0 } else { pos[parent as usize] };
            records.push(TreeRecord { vertex: v, parent, parent_pos, children: 0 });
            let mut nb = adj[v as usize].clone();
            nb.sort_unstable();
            for w in nb {
                if pos[w as usize] == 0 {
                    pos[w as usize] = (start + placed.len()) as u32 + 1;
                    placed.push(w);
                    q.push_back((w, v));
                }
            }
        }
        for &v in p {
            if pos[v as usize] == 0 {
                pos[v as usize] = records.len() as u32 + 1;
                records.push(TreeRecord { vertex: v, parent: root, parent_pos: start as u32 + 1, children: 0 });
            }
        }
    }
    for i in 0..records.len() {
        let pp = records[i].parent_pos as usize;
        if pp > 0 {
            records[pp - 1].children += 1;
        }
    }
    records
}

/// Components of the simple undirected instance, ascending, by least vertex.
pub fn component_parts(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut label = vec![0usize; n + 1];
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut parts = Vec::new();
    for root in 1..=n {
        if label[root] != 0 {
            continue;
        }
        label[root] = parts.len() + 1;
        let mut part = vec![root as u32];
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if label[y] == 0 {
                    label[y] = label[root];
                    part.push(y as u32);
                    q.push_back(y);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

/// `components`: `[nt, s]`.
#[derive(Debug, Clone, Copy)]
pub struct Components {
    pub tuning: Tuning,
}

impl Components {
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, records: &[TreeRecord]) -> ProofTranscript {
        let n = inst.n();
        let shape = ShapeConfig::new(n, self.tuning.t, self.tuning.s).expect("checked shape");
        let mut tr = ProofTranscript::new(field);
        let scal = records
            .iter()
            .flat_map(|r| [r.vertex, r.parent, r.parent_pos, r.children].map(|x| field.elem(x as u64)))
            .collect();
        tr.push_scalars("T", scal);
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        for r in records {
            if r.parent == 0 || blocks.is_empty() {
                blocks.push(Vec::new());
            }
            blocks.last_mut().expect("block").push(r.vertex);
        }
        let p = edgecount::prove_pairs(field, shape, &inst.graph.final_matrix(), blocks.iter().map(|b| (&b[..], &b[..])));
        tr.push_poly("p", poly_degrees(shape.t).to_vec(), p);
        let tree: Vec<(u32, u32)> = records.iter().filter(|r| r.parent != 0).map(|r| (r.vertex, r.parent)).collect();
        tr.push_scalars("sub", prove_pairs_subset(field, n, self.tuning.s, false, &tree, &edge_list(inst)));
        tr
    }
}

struct ComponentsVerifier {
    field: FieldConfig,
    n: usize,
    s: usize,
    table: EdgeTable,
    ws: SetWorkspace,
    edges: PairLine,
    m: i64,
    r_line: Fe,
    r_vert: Fe,
    r_pos: Fe,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for ComponentsVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        let one = self.field.one();
        self.table.update(u, v, one);
        self.edges.add(u, v, one);
        self.m += 1;
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n, m) = (self.field, self.n, self.meter.clone());
        let one = f.one();
        let recs = proof.next_scalars("T", Some(4 * n))?;
        let nn = (n * n) as u64;
        let (mut verts, mut owned, mut claimed) =
            (Fingerprint::new(self.r_vert, n as u64), Fingerprint::new(self.r_pos, nn), Fingerprint::new(self.r_pos, nn));
        let _state = m.reserve(5);
        let mut tree = PairLine::new(f, n, self.s, false, self.r_line, &m);
        let (mut start, mut roots) = (1u64, 0i64);
        for (i, r) in recs.chunks(4).enumerate() {
            let pos = i as u64 + 1;
            let [v, p, q, c] = [r[0].value(), r[1].value(), r[2].value(), r[3].value()];
            let in_v = |x: u64| x >= 1 && x <= n as u64;
            ensure(in_v(v) && c < n as u64, "tree-format", || format!("bad record at position {pos}"))?;
            if p == 0 {
                ensure(q == 0, "tree-format", || format!("root at {pos} names a parent position"))?;
                if pos > 1 {
                    self.ws.close(&self.table);
                }
                start = pos;
                roots += 1;
            } else {
                ensure(in_v(p) && q >= start && q < pos, "tree-order", || format!("parent of position {pos} is not earlier in its block"))?;
                tree.add(v as u32, p as u32, one);
                claimed.update((q - 1) * n as u64 + p, one).expect("position pair");
            }
            self.ws.add_both(&self.table, v as u32, one);
            verts.update(v, one).expect("vertex id");
            owned.update((pos - 1) * n as u64 + v, f.elem(c)).expect("position pair");
        }
        if roots > 0 {
            self.ws.close(&self.table);
        }
        ensure(verts.value() == full_set_fingerprint(self.r_vert, n), "partition", || "blocks do not partition V".into())?;
        ensure(owned.value() == claimed.value(), "tree-parents", || "parent records do not match their positions".into())?;
        let t = self.table.shape().t;
        let raw = check_poly(&self.table, self.ws.accumulator(), proof.next_poly("p", &poly_degrees(t))?, &m)?;
        ensure(raw == 2 * self.m, "components-disconnected", || format!("blocks hold {} of {} edges", raw / 2, self.m))?;
        let sub = proof.next_scalars("sub", Some(super::pair_shape(n, self.s).hcost()))?;
        ensure(check_subset(&tree.line, &self.edges.line, sub, &m)?, "tree-subset", || "a tree edge is not a graph edge".into())?;
        Ok(Answer::Count(roots))
    }
}

impl Scheme for Components {
    fn name(&self) -> &'static str {
        "components"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_simple(self.name(), inst, false)?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let edges = edge_list(inst);
        let parts = component_parts(inst.n(), &edges);
        self.transcript(inst, field, &tree_records(inst.n(), &edges, &parts))
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let shape = ShapeConfig::new(header.n, self.tuning.t, self.tuning.s).expect("checked shape");
        let mut r = || field.random(&mut rng);
        let (r1, r2, r_line, r_vert, r_pos) = (r(), r(), r(), r(), r());
        let table = EdgeTable::new(field, shape, r1, r2, false, meter);
        let ws = SetWorkspace::new(&table, meter);
        Box::new(ComponentsVerifier {
            field,
            n: header.n,
            s: self.tuning.s,
            table,
            ws,
            edges: PairLine::new(field, header.n, self.tuning.s, false, r_line, meter),
            m: 0,
            r_line,
            r_vert,
            r_pos,
            _scalars: meter.reserve(4),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        *answer == Answer::Count(oracle_components(&DenseGraph::from_instance(&inst.graph)) as i64)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let (n, t) = (inst.n(), self.tuning.t);
        4 * n + (2 * t - 1) * (2 * t - 1) + super::pair_shape(n, self.tuning.s).hcost()
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        let s = self.tuning.s;
        s * s + 5 * s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rng_for, Substream};
    use crate::protocol::{run_honest, verify_transcript};
    use crate::stream::parse_stream;

    #[test]
    fn examples() {
        let s = Components { tuning: Tuning::new(2, 3) };
        let two = parse_stream("n=6 model=vanilla\n1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n").unwrap().into();
        assert_eq!(run_honest(&s, &two, 3).unwrap().outcome.answer(), Some(&Answer::Count(2)));
        let p5: Instance = parse_stream("n=5 model=vanilla\n1 2\n2 3\n3 4\n4 5\n").unwrap().into();
        assert_eq!(run_honest(&s, &p5, 3).unwrap().outcome.answer(), Some(&Answer::Count(1)));
        let edges = edge_list(&p5);
        let field = s.field(&p5).unwrap();
        for parts in [vec![vec![1, 2], vec![3, 4, 5]], vec![vec![1, 3, 5], vec![2, 4]]] {
            let tr = s.transcript(&p5, &field, &tree_records(5, &edges, &parts));
            assert!(verify_transcript(&s, &p5, field, &tr, rng_for(3, Substream::Verifier)).is_reject());
        }
    }
}
