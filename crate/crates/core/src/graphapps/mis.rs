//! Maximal independent set. The Prover streams `U` and, for every vertex
//! outside `U`, a pointer edge to a neighbour in `U`.

use super::{check_simple, edge_list, full_set_fingerprint, prove_pairs_subset, PairLine};
use crate::edgecount::{self, check_poly, poly_degrees, EdgeTable, SetWorkspace, SPACE_SLACK};
use crate::extension::ShapeConfig;
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_mis_check, DenseGraph};
use crate::protocol::{
    ensure, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter, StreamVerifier,
    Tuning,
};
use crate::setops::{check_intersection, check_subset, prove_line, Fingerprint, LineMode, LineSketch, SetShape};
use crate::stream::{ProofTranscript, StreamHeader, StreamToken};

/// Lexicographically first maximal independent set.
pub fn greedy_mis(n: usize, edges: &[(u32, u32)]) -> Vec<u32> {
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut blocked = vec![false; n + 1];
    let mut set = Vec::new();
    for v in 1..=n {
        if !blocked[v] {
            set.push(v as u32);
            for &w in &adj[v] {
                blocked[w] = true;
            }
        }
    }
    set
}

/// For each `v` outside `set`, its least neighbour inside `set`.
pub fn mis_pointers(n: usize, edges: &[(u32, u32)], set: &[u32]) -> Vec<(u32, u32)> {
    let mut inside = vec![false; n + 1];
    for &u in set {
        inside[u as usize] = true;
    }
    let mut ptr: Vec<Option<u32>> = vec![None; n + 1];
    for &(a, b) in edges {
        for (x, y) in [(a, b), (b, a)] {
            if !inside[x as usize] && inside[y as usize] {
                let p = &mut ptr[x as usize];
                *p = Some(p.map_or(y, |q| q.min(y)));
            }
        }
    }
    (1..=n as u32).filter_map(|v| ptr[v as usize].map(|u| (v, u))).collect()
}

/// `mis`: `[nt, s]`; independence by an induced edge count of zero.
#[derive(Debug, Clone, Copy)]
pub struct Mis {
    pub tuning: Tuning,
}

impl Mis {
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, set: &[u32], pointers: &[(u32, u32)]) -> ProofTranscript {
        let n = inst.n();
        let s = self.tuning.s;
        let shape = ShapeConfig::new(n, self.tuning.t, s).expect("checked shape");
        let mut tr = ProofTranscript::new(field);
        tr.push_vertex_ids("U", set.iter().copied());
        tr.push_vertex_ids("F", pointers.iter().flat_map(|&(v, u)| [v, u]));
        let p = edgecount::prove_pairs(field, shape, &inst.graph.final_matrix(), [(set, set)]);
        tr.push_poly("p", poly_degrees(shape.t).to_vec(), p);
        tr.push_scalars("sub", prove_pairs_subset(field, n, s, false, pointers, &edge_list(inst)));
        let partners: Vec<usize> = pointers.iter().map(|&(_, u)| u as usize).collect();
        let members: Vec<usize> = set.iter().map(|&u| u as usize).collect();
        tr.push_scalars("int", prove_line(field, SetShape::with_v(n, s), &partners, &members, LineMode::Intersect));
        tr
    }
}

struct MisVerifier {
    field: FieldConfig,
    n: usize,
    s: usize,
    table: EdgeTable,
    ws: SetWorkspace,
    edges: PairLine,
    r_line: Fe,
    r_cover: Fe,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for MisVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        let one = self.field.one();
        self.table.update(u, v, one);
        self.edges.add(u, v, one);
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n, m) = (self.field, self.n, self.meter.clone());
        let one = f.one();
        let vshape = SetShape::with_v(n, self.s);
        let set = proof.next_vertex_ids("U", n)?;
        ensure(set.windows(2).all(|w| w[0] < w[1]), "mis-format", || "U is not ascending".into())?;
        let mut cover = Fingerprint::new(self.r_cover, n as u64);
        let _fp = m.reserve(1);
        let mut members = LineSketch::new(f, vshape, self.r_line, &m);
        for &u in &set {
            self.ws.add_both(&self.table, u, one);
            members.update(u as usize, one).expect("vertex id");
            cover.update(u as u64, one).expect("vertex id");
        }
        self.ws.close(&self.table);
        let ids = proof.next_vertex_ids("F", n)?;
        ensure(ids.len() % 2 == 0, "mis-format", || "odd pointer list".into())?;
        let mut pointers = PairLine::new(f, n, self.s, false, self.r_line, &m);
        let mut partners = LineSketch::new(f, vshape, self.r_line, &m);
        for c in ids.chunks(2) {
            let (v, u) = (c[0], c[1]);
            ensure(v != u, "mis-format", || format!("pointer loop at {v}"))?;
            pointers.add(v, u, one);
            partners.update(u as usize, one).expect("vertex id");
            cover.update(v as u64, one).expect("vertex id");
        }
        let k = ids.len() / 2;
        ensure(cover.value() == full_set_fingerprint(self.r_cover, n), "mis-cover", || "U and the pointer sources do not partition V".into())?;
        let t = self.table.shape().t;
        let raw = check_poly(&self.table, self.ws.accumulator(), proof.next_poly("p", &poly_degrees(t))?, &m)?;
        ensure(raw == 0, "mis-independent", || format!("G[U] has {} edges", raw / 2))?;
        let sub = proof.next_scalars("sub", Some(super::pair_shape(n, self.s).hcost()))?;
        ensure(check_subset(&pointers.line, &self.edges.line, sub, &m)?, "mis-pointers", || "a pointer is not an edge".into())?;
        let int = proof.next_scalars("int", Some(vshape.hcost()))?;
        let hits = check_intersection(&partners, &members, int, &m)?;
        ensure(hits == k as i64, "mis-partners", || format!("{hits} of {k} pointers land in U"))?;
        Ok(Answer::Order(set))
    }
}

impl Scheme for Mis {
    fn name(&self) -> &'static str {
        "mis"
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
        let set = greedy_mis(inst.n(), &edges);
        self.transcript(inst, field, &set, &mis_pointers(inst.n(), &edges, &set))
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let shape = ShapeConfig::new(header.n, self.tuning.t, self.tuning.s).expect("checked shape");
        let mut r = || field.random(&mut rng);
        let (r1, r2, r_line, r_cover) = (r(), r(), r(), r());
        let table = EdgeTable::new(field, shape, r1, r2, false, meter);
        let ws = SetWorkspace::new(&table, meter);
        Box::new(MisVerifier {
            field,
            n: header.n,
            s: self.tuning.s,
            table,
            ws,
            edges: PairLine::new(field, header.n, self.tuning.s, false, r_line, meter),
            r_line,
            r_cover,
            _scalars: meter.reserve(2),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        match answer {
            Answer::Order(set) => oracle_mis_check(&DenseGraph::from_instance(&inst.graph), set),
            _ => false,
        }
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let (n, t, s) = (inst.n(), self.tuning.t, self.tuning.s);
        2 * n + (2 * t - 1) * (2 * t - 1) + super::pair_shape(n, s).hcost() + SetShape::with_v(n, s).hcost()
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        let s = self.tuning.s;
        s * s + 6 * s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![
            MutationPolicy::Honest,
            MutationPolicy::CoeffFlip,
            MutationPolicy::Truncate,
            MutationPolicy::OutputLie,
            MutationPolicy::VertexPermutationLie,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rng_for, Substream};
    use crate::protocol::verify_transcript;
    use crate::stream::parse_stream;

    fn check(text: &str, set: &[u32], pointers: &[(u32, u32)]) -> Option<Answer> {
        let inst: Instance = parse_stream(text).unwrap().into();
        let s = Mis { tuning: Tuning::new(2, 2) };
        s.check_instance(&inst).unwrap();
        let field = s.field(&inst).unwrap();
        let tr = s.transcript(&inst, &field, set, pointers);
        let out = verify_transcript(&s, &inst, field, &tr, rng_for(1, Substream::Verifier));
        assert!(!out.budget_exceeded);
        out.answer().cloned()
    }

    #[test]
    fn examples() {
        let c4 = "n=4 model=vanilla\n1 2\n2 3\n3 4\n4 1\n";
        assert_eq!(check(c4, &[1, 3], &[(2, 1), (4, 1)]), Some(Answer::Order(vec![1, 3])));
        assert_eq!(check("n=2 model=vanilla\n1 2\n", &[1, 2], &[]), None);
        assert_eq!(check("n=4 model=vanilla\n1 2\n2 3\n3 4\n", &[1], &[(2, 1)]), None);
        // a pointer that is not an edge
        assert_eq!(check("n=4 model=vanilla\n1 2\n2 3\n3 4\n", &[1, 3], &[(2, 1), (4, 1)]), None);
    }
}
