//! Topological order and acyclicity on directed vanilla streams.
//!
//! For an order `v_1, ..., v_n` the cross counts `|E(U_i, {v_(i+1)})|` with
//! `U_i = {v_1, ..., v_i}` sum to the number of forward edges, which equals
//! `m` exactly when the order is topological.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{check_simple, edge_list, full_set_fingerprint, prove_pairs_subset, PairLine};
use crate::edgecount::{self, check_poly, poly_degrees, EdgeTable, SetWorkspace, SPACE_SLACK};
use crate::extension::ShapeConfig;
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{is_topological_order, oracle_is_acyclic, DenseGraph};
use crate::protocol::{
    ensure, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter, StreamVerifier,
    Tuning,
};
use crate::setops::{check_subset, Fingerprint};
use crate::stream::{ProofTranscript, StreamHeader, StreamToken};

/// Kahn's algorithm, smallest available vertex first.
pub fn kahn_order(n: usize, edges: &[(u32, u32)]) -> Option<Vec<u32>> {
    let mut indeg = vec![0usize; n + 1];
    let mut out = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        out[u as usize].push(v);
        indeg[v as usize] += 1;
    }
    let mut heap: BinaryHeap<Reverse<u32>> = (1..=n as u32).filter(|&v| indeg[v as usize] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &w in &out[v as usize] {
            indeg[w as usize] -= 1;
            if indeg[w as usize] == 0 {
                heap.push(Reverse(w));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Some directed cycle, as its vertex sequence.
pub fn find_cycle(n: usize, edges: &[(u32, u32)]) -> Option<Vec<u32>> {
    let mut out = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        out[u as usize].push(v as usize);
    }
    let mut color = vec![0u8; n + 1];
    let mut parent = vec![0usize; n + 1];
    for root in 1..=n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if let Some(&w) = out[v].get(*i) {
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cyc = vec![v as u32];
                        let mut x = v;
                        while x != w {
                            x = parent[x];
                            cyc.push(x as u32);
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

fn push_order(tr: &mut ProofTranscript, inst: &Instance, field: &FieldConfig, tuning: Tuning, order: &[u32]) {
    let shape = ShapeConfig::new(inst.n(), tuning.t, tuning.s).expect("checked shape");
    tr.push_vertex_ids("O", order.iter().copied());
    let p = edgecount::prove_pairs(field, shape, &inst.graph.final_matrix(), (1..order.len()).map(|i| (&order[..i], &order[i..i + 1])));
    tr.push_poly("p", poly_degrees(shape.t).to_vec(), p);
}

/// Shared forward-edge check; returns the order on success.
struct OrderCheck {
    table: EdgeTable,
    ws: SetWorkspace,
    r_perm: Fe,
    m: i64,
    _scalars: Reservation,
}

impl OrderCheck {
    fn new(field: FieldConfig, n: usize, tuning: Tuning, rng: &mut ProtocolRng, meter: &SpaceMeter) -> Self {
        let shape = ShapeConfig::new(n, tuning.t, tuning.s).expect("checked shape");
        let (r1, r2, r_perm) = (field.random(rng), field.random(rng), field.random(rng));
        let table = EdgeTable::new(field, shape, r1, r2, true, meter);
        let ws = SetWorkspace::new(&table, meter);
        Self { table, ws, r_perm, m: 0, _scalars: meter.reserve(3) }
    }

    fn observe(&mut self, u: u32, v: u32) {
        self.table.update(u, v, self.table.field().one());
        self.m += 1;
    }

    fn conclude(mut self, proof: &mut ProofReader<'_>, meter: &SpaceMeter) -> Result<Vec<u32>, Rejection> {
        let f = self.table.field();
        let n = self.table.shape().n;
        let order = proof.next_vertex_ids("O", n)?;
        ensure(order.len() == n, "order-format", || format!("{} vertices, expected {n}", order.len()))?;
        let mut fp = Fingerprint::new(self.r_perm, n as u64);
        for &v in &order {
            self.ws.add_right(&self.table, v, f.one());
            self.ws.fold(&self.table);
            self.ws.clear_right(&self.table);
            self.ws.add_left(&self.table, v, f.one());
            fp.update(v as u64, f.one()).expect("vertex id");
        }
        ensure(fp.value() == full_set_fingerprint(self.r_perm, n), "order-permutation", || "order is not a permutation of V".into())?;
        let t = self.table.shape().t;
        let forward = check_poly(&self.table, self.ws.accumulator(), proof.next_poly("p", &poly_degrees(t))?, meter)?;
        ensure(forward == self.m, "order-forward", || format!("{forward} forward edges of {}", self.m))?;
        Ok(order)
    }
}

fn order_hcost(n: usize, t: usize) -> usize {
    n + (2 * t - 1) * (2 * t - 1)
}

/// `toposort`: `[nt, s]`.
#[derive(Debug, Clone, Copy)]
pub struct TopoSort {
    pub tuning: Tuning,
}

impl TopoSort {
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, order: &[u32]) -> ProofTranscript {
        let mut tr = ProofTranscript::new(field);
        push_order(&mut tr, inst, field, self.tuning, order);
        tr
    }
}

struct TopoVerifier {
    check: OrderCheck,
    meter: SpaceMeter,
}

impl StreamVerifier for TopoVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        self.check.observe(u, v);
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let meter = self.meter.clone();
        Ok(Answer::Order(self.check.conclude(proof, &meter)?))
    }
}

impl Scheme for TopoSort {
    fn name(&self) -> &'static str {
        "toposort"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_simple(self.name(), inst, true)?;
        edgecount::check_shape(inst, self.tuning)?;
        if kahn_order(inst.n(), &edge_list(inst)).is_none() {
            return Err(SchemeError::Precondition("graph has a directed cycle".into()));
        }
        Ok(())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let order = kahn_order(inst.n(), &edge_list(inst)).expect("checked acyclic");
        self.transcript(inst, field, &order)
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        Box::new(TopoVerifier { check: OrderCheck::new(field, header.n, self.tuning, &mut rng, meter), meter: meter.clone() })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        match answer {
            Answer::Order(o) => is_topological_order(&DenseGraph::from_instance(&inst.graph), o),
            _ => false,
        }
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        order_hcost(inst.n(), self.tuning.t)
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        let s = self.tuning.s;
        s * s + 4 * s + SPACE_SLACK
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

/// `acyclicity`: a flag, then either a topological order or a cycle.
#[derive(Debug, Clone, Copy)]
pub struct Acyclicity {
    pub tuning: Tuning,
}

impl Acyclicity {
    /// Transcript claiming the cycle `cycle` (closed back to its first vertex).
    pub fn cycle_transcript(&self, inst: &Instance, field: &FieldConfig, cycle: &[u32]) -> ProofTranscript {
        let mut tr = ProofTranscript::new(field);
        tr.push_scalars("flag", vec![field.zero()]);
        tr.push_vertex_ids("C", cycle.iter().copied());
        let mut sorted = cycle.to_vec();
        sorted.sort_unstable();
        tr.push_vertex_ids("Cs", sorted);
        let walk: Vec<(u32, u32)> = (0..cycle.len()).map(|i| (cycle[i], cycle[(i + 1) % cycle.len()])).collect();
        tr.push_scalars("sub", prove_pairs_subset(field, inst.n(), self.tuning.s, true, &walk, &edge_list(inst)));
        tr
    }
}

struct AcyclicityVerifier {
    check: OrderCheck,
    edges: PairLine,
    r_line: Fe,
    s: usize,
    meter: SpaceMeter,
}

impl StreamVerifier for AcyclicityVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        self.check.observe(u, v);
        self.edges.add(u, v, self.check.table.field().one());
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let meter = self.meter.clone();
        let f = self.check.table.field();
        let n = self.check.table.shape().n;
        let flag = proof.next_scalars("flag", Some(1))?[0];
        if flag == f.one() {
            self.check.conclude(proof, &meter)?;
            return Ok(Answer::Flag(true));
        }
        ensure(flag.is_zero(), "acyclicity-format", || "flag is neither 0 nor 1".into())?;
        let cycle = proof.next_vertex_ids("C", n)?;
        ensure(cycle.len() >= 2, "cycle-format", || "cycle needs two vertices".into())?;
        let sorted = proof.next_vertex_ids("Cs", n)?;
        ensure(sorted.len() == cycle.len() && sorted.windows(2).all(|w| w[0] < w[1]), "cycle-distinct", || "sorted copy has repeats".into())?;
        let r = self.check.r_perm;
        let (mut a, mut b) = (Fingerprint::new(r, n as u64), Fingerprint::new(r, n as u64));
        let _fps = meter.reserve(2);
        let mut walk = PairLine::new(f, n, self.s, true, self.r_line, &meter);
        for (i, &v) in cycle.iter().enumerate() {
            a.update(v as u64, f.one()).expect("vertex id");
            walk.add(v, cycle[(i + 1) % cycle.len()], f.one());
        }
        for &v in &sorted {
            b.update(v as u64, f.one()).expect("vertex id");
        }
        ensure(a.value() == b.value(), "cycle-distinct", || "sorted copy differs from the cycle".into())?;
        let sub = proof.next_scalars("sub", Some(super::pair_shape(n, self.s).hcost()))?;
        ensure(check_subset(&walk.line, &self.edges.line, sub, &meter)?, "cycle-subset", || "cycle uses a non-edge".into())?;
        Ok(Answer::Flag(false))
    }
}

impl Scheme for Acyclicity {
    fn name(&self) -> &'static str {
        "acyclicity"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_simple(self.name(), inst, true)?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let edges = edge_list(inst);
        match kahn_order(inst.n(), &edges) {
            Some(order) => {
                let mut tr = ProofTranscript::new(field);
                tr.push_scalars("flag", vec![field.one()]);
                push_order(&mut tr, inst, field, self.tuning, &order);
                tr
            }
            None => self.cycle_transcript(inst, field, &find_cycle(inst.n(), &edges).expect("cyclic graph")),
        }
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let check = OrderCheck::new(field, header.n, self.tuning, &mut rng, meter);
        let r_line = field.random(&mut rng);
        Box::new(AcyclicityVerifier {
            check,
            edges: PairLine::new(field, header.n, self.tuning.s, true, r_line, meter),
            r_line,
            s: self.tuning.s,
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        *answer == Answer::Flag(oracle_is_acyclic(&DenseGraph::from_instance(&inst.graph)))
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        1 + order_hcost(n, self.tuning.t).max(2 * n + super::pair_shape(n, self.tuning.s).hcost())
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
    use crate::protocol::{run_honest, verify_transcript};
    use crate::stream::parse_stream;

    fn inst(text: &str) -> Instance {
        parse_stream(text).unwrap().into()
    }

    #[test]
    fn toposort_examples() {
        let dag = inst("n=3 model=vanilla directed=1\n1 2\n2 3\n");
        let s = TopoSort { tuning: Tuning::new(2, 2) };
        let field = s.field(&dag).unwrap();
        let run = |order: &[u32]| {
            let tr = s.transcript(&dag, &field, order);
            verify_transcript(&s, &dag, field, &tr, rng_for(2, Substream::Verifier))
        };
        assert_eq!(run(&[1, 2, 3]).answer(), Some(&Answer::Order(vec![1, 2, 3])));
        assert!(run(&[2, 1, 3]).is_reject());
        assert!(run(&[1, 1, 3]).is_reject());
    }

    #[test]
    fn acyclicity_examples() {
        let s = Acyclicity { tuning: Tuning::new(2, 2) };
        let cyc = inst("n=3 model=vanilla directed=1\n1 2\n2 3\n3 1\n");
        assert_eq!(run_honest(&s, &cyc, 1).unwrap().outcome.answer(), Some(&Answer::Flag(false)));
        let dag = inst("n=4 model=vanilla directed=1\n1 2\n2 3\n1 4\n4 3\n");
        assert_eq!(run_honest(&s, &dag, 1).unwrap().outcome.answer(), Some(&Answer::Flag(true)));
        let field = s.field(&dag).unwrap();
        let fake = s.cycle_transcript(&dag, &field, &[1, 2, 3]);
        assert!(verify_transcript(&s, &dag, field, &fake, rng_for(4, Substream::Verifier)).is_reject());
    }

    #[test]
    fn cycle_finder() {
        let c = find_cycle(4, &[(1, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(find_cycle(3, &[(1, 2), (2, 3), (1, 3)]).is_none());
    }
}
