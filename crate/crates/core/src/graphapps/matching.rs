//! Maximum matching via the Tutte-Berge formula
//! `alpha'(G) = min_U (|U| + n - odd(G - U)) / 2`.
//!
//! The Prover sends a matching `M` of size `k` (the lower bound) and a set
//! `U*` with the components of `H = G - U*` such that `2k = |U*| + n - odd(H)`
//! (the upper bound). Components are certified pairwise disconnected by
//! comparing `|E(H)|` with `sum_i |E(G[U_i])|`.

use std::collections::VecDeque;

use super::blossom::{max_matching, matching_size, tutte_set};
use super::{check_simple, edge_list, full_set_fingerprint, pair_shape, prove_pairs_subset, PairLine};
use crate::edgecount::{self, check_poly, poly_degrees, EdgeTable, SetWorkspace, SPACE_SLACK};
use crate::extension::ShapeConfig;
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_matching, DenseGraph, MATCHING_LIMIT};
use crate::protocol::{
    ensure, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter, StreamVerifier,
    TrackedVec, Tuning,
};
use crate::setops::{check_intersection, check_subset, prove_line, Fingerprint, LineMode, LineSketch};
use crate::stream::{ProofTranscript, StreamHeader, StreamToken, VItem};

/// Everything an honest matching Prover sends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCertificate {
    /// Edges `(u, v)` with `u < v`.
    pub matching: Vec<(u32, u32)>,
    /// `U*`, ascending.
    pub tutte: Vec<u32>,
    /// Components of `G - U*`, each ascending, ordered by least vertex.
    pub components: Vec<Vec<u32>>,
    /// Spanning forest of `G - U*`.
    pub forest: Vec<(u32, u32)>,
}

impl MatchingCertificate {
    pub fn size(&self) -> usize {
        self.matching.len()
    }

    fn hvertices(&self, n: usize) -> Vec<u32> {
        let mut out = vec![true; n + 1];
        for &u in &self.tutte {
            out[u as usize] = false;
        }
        (1..=n as u32).filter(|&v| out[v as usize]).collect()
    }
}

/// Maximum matching plus the Gallai-Edmonds certificate.
pub fn matching_certificate(n: usize, edges: &[(u32, u32)]) -> MatchingCertificate {
    let e0: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u as usize - 1, v as usize - 1)).collect();
    let mate = max_matching(n, &e0);
    let matching: Vec<(u32, u32)> =
        (0..n).filter_map(|v| mate[v].filter(|&m| m > v).map(|m| (v as u32 + 1, m as u32 + 1))).collect();
    let tutte: Vec<u32> = tutte_set(n, &e0).into_iter().map(|v| v as u32 + 1).collect();
    let mut removed = vec![false; n];
    for &u in &tutte {
        removed[u as usize - 1] = true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &e0 {
        if !removed[u] && !removed[v] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut seen = removed.clone();
    let mut components = Vec::new();
    let mut forest = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root as u32 + 1];
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y as u32 + 1);
                    forest.push(((x.min(y) + 1) as u32, (x.max(y) + 1) as u32));
                    q.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    debug_assert_eq!(2 * matching_size(&mate), tutte.len() + n - components.iter().filter(|c| c.len() % 2 == 1).count());
    MatchingCertificate { matching, tutte, components, forest }
}

fn matching_correct(inst: &Instance, answer: &Answer) -> bool {
    let Answer::Count(k) = answer else { return false };
    let g = DenseGraph::from_instance(&inst.graph);
    let best = if inst.n() <= MATCHING_LIMIT {
        oracle_matching(&g).expect("size checked")
    } else {
        matching_certificate(inst.n(), &edge_list(inst)).size()
    };
    *k == best as i64
}

fn read_pairs(proof: &mut ProofReader<'_>, label: &str, n: usize) -> Result<Vec<(u32, u32)>, Rejection> {
    let ids = proof.next_vertex_ids(label, n)?;
    ensure(ids.len() % 2 == 0, "pair-format", || format!("odd length {} in {label}", ids.len()))?;
    let pairs: Vec<(u32, u32)> = ids.chunks(2).map(|c| (c[0], c[1])).collect();
    ensure(pairs.iter().all(|&(a, b)| a != b), "pair-format", || format!("loop in {label}"))?;
    Ok(pairs)
}

fn strictly_increasing(ids: &[u32]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

/// `maxmatch-frugal`: `[nt, s]` with two induced edge counts sharing one table.
#[derive(Debug, Clone, Copy)]
pub struct MaxMatchFrugal {
    pub tuning: Tuning,
}

impl MaxMatchFrugal {
    /// Transcript for an arbitrary (possibly dishonest) certificate.
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, cert: &MatchingCertificate) -> ProofTranscript {
        let n = inst.n();
        let shape = ShapeConfig::new(n, self.tuning.t, self.tuning.s).expect("checked shape");
        let matrix = inst.graph.final_matrix();
        let mut tr = ProofTranscript::new(field);
        tr.push_vertex_ids("M", cert.matching.iter().flat_map(|&(u, v)| [u, v]));
        let mut ends: Vec<u32> = cert.matching.iter().flat_map(|&(u, v)| [u, v]).collect();
        ends.sort_unstable();
        tr.push_vertex_ids("Mv", ends);
        tr.push_vertex_ids("U", cert.tutte.iter().copied());
        tr.push_sets("C", cert.components.iter().cloned());
        let vh = cert.hvertices(n);
        tr.push_poly("p1", poly_degrees(shape.t).to_vec(), edgecount::prove_pairs(field, shape, &matrix, [(&vh[..], &vh[..])]));
        let p2 = edgecount::prove_pairs(field, shape, &matrix, cert.components.iter().map(|c| (&c[..], &c[..])));
        tr.push_poly("p2", poly_degrees(shape.t).to_vec(), p2);
        tr.push_scalars("sub", prove_pairs_subset(field, n, self.tuning.s, false, &cert.matching, &edge_list(inst)));
        tr
    }
}

struct FrugalVerifier {
    field: FieldConfig,
    n: usize,
    table: EdgeTable,
    hset: SetWorkspace,
    comps: SetWorkspace,
    edges: PairLine,
    r_ends: Fe,
    r_part: Fe,
    r_line: Fe,
    s: usize,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for FrugalVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        let one = self.field.one();
        self.table.update(u, v, one);
        self.edges.add(u, v, one);
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n) = (self.field, self.n);
        let one = f.one();
        let matching = read_pairs(proof, "M", n)?;
        let k = matching.len();
        let mut mline = PairLine::new(f, n, self.s, false, self.r_line, &self.meter);
        let mut fp_m = Fingerprint::new(self.r_ends, n as u64);
        let _fps = self.meter.reserve(3);
        for &(a, b) in &matching {
            mline.add(a, b, one);
            fp_m.update(a as u64, one).expect("vertex id");
            fp_m.update(b as u64, one).expect("vertex id");
        }
        let ends = proof.next_vertex_ids("Mv", n)?;
        ensure(ends.len() == 2 * k && strictly_increasing(&ends), "matching-disjoint", || "endpoint list is not 2k distinct vertices".into())?;
        let mut fp_e = Fingerprint::new(self.r_ends, n as u64);
        for &v in &ends {
            fp_e.update(v as u64, one).expect("vertex id");
        }
        ensure(fp_e.value() == fp_m.value(), "matching-disjoint", || "endpoint list differs from the matching".into())?;

        let tutte = proof.next_vertex_ids("U", n)?;
        ensure(strictly_increasing(&tutte), "tutte-format", || "U* is not ascending".into())?;
        let mut fp_p = Fingerprint::new(self.r_part, n as u64);
        for v in 1..=n as u32 {
            self.hset.add_both(&self.table, v, one);
        }
        for &u in &tutte {
            self.hset.add_both(&self.table, u, -one);
            fp_p.update(u as u64, one).expect("vertex id");
        }
        self.hset.close(&self.table);

        let items = proof.next_vertices("C")?;
        let (mut len, mut odd) = (0usize, 0usize);
        for it in items {
            match *it {
                VItem::V(v) => {
                    ensure(v >= 1 && v as usize <= n, "components-format", || format!("vertex {v} out of range"))?;
                    self.comps.add_both(&self.table, v, one);
                    fp_p.update(v as u64, one).expect("vertex id");
                    len += 1;
                }
                VItem::Delim => {
                    self.comps.close(&self.table);
                    odd += len % 2;
                    len = 0;
                }
            }
        }
        ensure(len == 0, "components-format", || "unterminated component".into())?;
        ensure(fp_p.value() == full_set_fingerprint(self.r_part, n), "partition", || "U* and the components do not partition V".into())?;

        let t = self.table.shape().t;
        let m1 = check_poly(&self.table, self.hset.accumulator(), proof.next_poly("p1", &poly_degrees(t))?, &self.meter)?;
        let m2 = check_poly(&self.table, self.comps.accumulator(), proof.next_poly("p2", &poly_degrees(t))?, &self.meter)?;
        let sub = proof.next_scalars("sub", Some(pair_shape(n, self.s).hcost()))?;
        ensure(check_subset(&mline.line, &self.edges.line, sub, &self.meter)?, "matching-subset", || "M is not a subset of E".into())?;
        ensure(m1 == m2, "components-disconnected", || format!("|E(H)| = {} but components hold {}", m1 / 2, m2 / 2))?;
        ensure(2 * k + odd == tutte.len() + n, "tutte-berge", || format!("2k = {} but |U*| + n - odd = {}", 2 * k, tutte.len() + n - odd))?;
        Ok(Answer::Count(k as i64))
    }
}

impl Scheme for MaxMatchFrugal {
    fn name(&self) -> &'static str {
        "maxmatch-frugal"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_simple(self.name(), inst, false)?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        self.transcript(inst, field, &matching_certificate(inst.n(), &edge_list(inst)))
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let shape = ShapeConfig::new(header.n, self.tuning.t, self.tuning.s).expect("checked shape");
        let mut r = || field.random(&mut rng);
        let (r1, r2, r_ends, r_part, r_line) = (r(), r(), r(), r(), r());
        let table = EdgeTable::new(field, shape, r1, r2, false, meter);
        let hset = SetWorkspace::new(&table, meter);
        let comps = SetWorkspace::new(&table, meter);
        Box::new(FrugalVerifier {
            field,
            n: header.n,
            hset,
            comps,
            edges: PairLine::new(field, header.n, self.tuning.s, false, r_line, meter),
            table,
            r_ends,
            r_part,
            r_line,
            s: self.tuning.s,
            _scalars: meter.reserve(5),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        matching_correct(inst, answer)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let (n, t) = (inst.n(), self.tuning.t);
        6 * n + 2 * (2 * t - 1) * (2 * t - 1) + pair_shape(n, self.tuning.s).hcost()
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        let s = self.tuning.s;
        s * s + 7 * s + SPACE_SLACK
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

/// `maxmatch-laconic`: `[alpha' + h, v]` with `h = t` and `v = n s`. The
/// Verifier stores `M`, `U*` and a spanning forest of `H`.
#[derive(Debug, Clone, Copy)]
pub struct MaxMatchLaconic {
    pub tuning: Tuning,
}

impl MaxMatchLaconic {
    fn line_v(&self, n: usize) -> usize {
        n * self.tuning.s
    }

    fn pairs_where(n: usize, keep: impl Fn(u32, u32) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        for u in 1..=n as u32 {
            for v in u + 1..=n as u32 {
                if keep(u, v) {
                    out.push(super::pair_index(u, v, n, false));
                }
            }
        }
        out
    }

    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, cert: &MatchingCertificate) -> ProofTranscript {
        let n = inst.n();
        let v = self.line_v(n);
        let edges = edge_list(inst);
        let eidx: Vec<usize> = edges.iter().map(|&(a, b)| super::pair_index(a, b, n, false)).collect();
        let mut tr = ProofTranscript::new(field);
        tr.push_vertex_ids("M", cert.matching.iter().flat_map(|&(a, b)| [a, b]));
        tr.push_vertex_ids("U", cert.tutte.iter().copied());
        tr.push_vertex_ids("F", cert.forest.iter().flat_map(|&(a, b)| [a, b]));
        let mut sm = cert.matching.clone();
        sm.extend_from_slice(&cert.forest);
        tr.push_scalars("sub", prove_pairs_subset(field, n, v, false, &sm, &edges));
        let mut in_h = vec![true; n + 1];
        for &u in &cert.tutte {
            in_h[u as usize] = false;
        }
        let x1 = Self::pairs_where(n, |a, b| in_h[a as usize] && in_h[b as usize]);
        tr.push_scalars("i1", prove_line(field, pair_shape(n, v), &x1, &eidx, LineMode::Intersect));
        let comp = forest_labels(n, &cert.forest);
        let x2 = Self::pairs_where(n, |a, b| in_h[a as usize] && in_h[b as usize] && comp[a as usize] == comp[b as usize]);
        tr.push_scalars("i2", prove_line(field, pair_shape(n, v), &x2, &eidx, LineMode::Intersect));
        tr
    }
}

/// Component label of every vertex under the forest edges (index 0 unused).
fn forest_labels(n: usize, forest: &[(u32, u32)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..=n).collect();
    for &(a, b) in forest {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        parent[ra] = rb;
    }
    (0..=n).map(|v| find(&mut parent, v)).collect()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

struct LaconicVerifier {
    field: FieldConfig,
    n: usize,
    v: usize,
    edges: PairLine,
    r: Fe,
    meter: SpaceMeter,
}

impl StreamVerifier for LaconicVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, _) = tok.kind.as_update();
        self.edges.add(u, v, self.field.one());
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n) = (self.field, self.n);
        let one = f.one();
        let m = &self.meter;
        let matching = TrackedVec::from_vec(m, read_pairs(proof, "M", n)?);
        let k = matching.len();
        let mut used = m.vec(n + 1, false);
        for &(a, b) in matching.iter() {
            for x in [a, b] {
                ensure(!std::mem::replace(&mut used[x as usize], true), "matching-disjoint", || format!("vertex {x} matched twice"))?;
            }
        }
        let tutte = proof.next_vertex_ids("U", n)?;
        ensure(strictly_increasing(&tutte), "tutte-format", || "U* is not ascending".into())?;
        let mut in_h = m.vec(n + 1, true);
        for &u in &tutte {
            in_h[u as usize] = false;
        }
        let forest = TrackedVec::from_vec(m, read_pairs(proof, "F", n)?);
        let mut parent = TrackedVec::from_vec(m, (0..=n).collect::<Vec<usize>>());
        let mut size = m.vec(n + 1, 1usize);
        for &(a, b) in forest.iter() {
            ensure(in_h[a as usize] && in_h[b as usize], "forest-format", || format!("forest edge {{{a}, {b}}} leaves H"))?;
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            ensure(ra != rb, "forest-format", || format!("forest edge {{{a}, {b}}} closes a cycle"))?;
            parent[ra] = rb;
            size[rb] += size[ra];
        }
        let odd = (1..=n).filter(|&x| in_h[x] && find(&mut parent, x) == x && size[x] % 2 == 1).count();

        let shape = pair_shape(n, self.v);
        let sub = proof.next_scalars("sub", Some(shape.hcost()))?;
        {
            let mut s = PairLine::new(f, n, self.v, false, self.r, m);
            for &(a, b) in matching.iter().chain(forest.iter()) {
                s.add(a, b, one);
            }
            ensure(check_subset(&s.line, &self.edges.line, sub, m)?, "matching-subset", || "M or F is not a subset of E".into())?;
        }
        let mut count_pairs = |label: &str, same_comp: bool, parent: &mut TrackedVec<usize>| -> Result<i64, Rejection> {
            let values = proof.next_scalars(label, Some(shape.hcost()))?;
            let mut x = LineSketch::new(f, shape, self.r, m);
            for a in 1..=n {
                for b in a + 1..=n {
                    if in_h[a] && in_h[b] && (!same_comp || find(parent, a) == find(parent, b)) {
                        x.update((a - 1) * n + b, one).expect("pair index");
                    }
                }
            }
            check_intersection(&x, &self.edges.line, values, m)
        };
        let c1 = count_pairs("i1", false, &mut parent)?;
        let c2 = count_pairs("i2", true, &mut parent)?;
        ensure(c1 == c2, "components-disconnected", || format!("|E(H)| = {c1} but components hold {c2}"))?;
        ensure(2 * k + odd == tutte.len() + n, "tutte-berge", || format!("2k = {} but |U*| + n - odd = {}", 2 * k, tutte.len() + n - odd))?;
        Ok(Answer::Count(k as i64))
    }
}

impl Scheme for MaxMatchLaconic {
    fn name(&self) -> &'static str {
        "maxmatch-laconic"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_simple(self.name(), inst, false)?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        self.transcript(inst, field, &matching_certificate(inst.n(), &edge_list(inst)))
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let r = field.random(&mut rng);
        let v = self.line_v(header.n);
        Box::new(LaconicVerifier {
            field,
            n: header.n,
            v,
            edges: PairLine::new(field, header.n, v, false, r, meter),
            r,
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        matching_correct(inst, answer)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        5 * inst.n() + 3 * (2 * self.tuning.t - 1)
    }

    fn vcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        2 * self.line_v(n) + 7 * n + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![
            MutationPolicy::Honest,
            MutationPolicy::CoeffFlip,
            MutationPolicy::Truncate,
            MutationPolicy::VertexPermutationLie,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_honest, verify_transcript};
    use crate::field::{rng_for, Substream};
    use crate::stream::parse_stream;

    fn inst(text: &str) -> Instance {
        parse_stream(text).unwrap().into()
    }

    fn c5() -> Instance {
        inst("n=5 model=vanilla\n1 2\n2 3\n3 4\n4 5\n5 1\n")
    }

    fn star() -> Instance {
        inst("n=6 model=vanilla\n1 2\n1 3\n1 4\n1 5\n1 6\n")
    }

    fn k4() -> Instance {
        inst("n=4 model=vanilla\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n")
    }

    fn answer(s: &dyn Scheme, i: &Instance) -> Answer {
        let r = run_honest(s, i, 9).unwrap();
        assert!(!r.outcome.budget_exceeded, "{} over budget", s.name());
        r.outcome.answer().cloned().unwrap_or_else(|| panic!("{} rejected: {:?}", s.name(), r.outcome.result))
    }

    #[test]
    fn frugal_examples() {
        let s = MaxMatchFrugal { tuning: Tuning::new(2, 3) };
        assert_eq!(answer(&s, &c5()), Answer::Count(2));
        assert_eq!(answer(&s, &star()), Answer::Count(1));
        assert_eq!(answer(&MaxMatchFrugal { tuning: Tuning::new(2, 2) }, &k4()), Answer::Count(2));
    }

    #[test]
    fn laconic_examples() {
        let s = MaxMatchLaconic { tuning: Tuning::new(2, 3) };
        assert_eq!(answer(&s, &c5()), Answer::Count(2));
        assert_eq!(answer(&s, &star()), Answer::Count(1));
        assert_eq!(answer(&MaxMatchLaconic { tuning: Tuning::new(2, 2) }, &k4()), Answer::Count(2));
    }

    #[test]
    fn split_component_is_caught() {
        // path 1-2-3-4 (alpha' = 2) claimed as {1, 2} and {3, 4} with no U*,
        // then the matching {1,2} alone with an odd split {1}, {2, 3, 4}
        let i = inst("n=4 model=vanilla\n1 2\n2 3\n3 4\n");
        let cert = MatchingCertificate {
            matching: vec![(1, 2)],
            tutte: vec![],
            components: vec![vec![1], vec![2, 3, 4]],
            forest: vec![(2, 3), (3, 4)],
        };
        let s = MaxMatchFrugal { tuning: Tuning::new(2, 2) };
        let field = s.field(&i).unwrap();
        let tr = s.transcript(&i, &field, &cert);
        let out = verify_transcript(&s, &i, field, &tr, rng_for(3, Substream::Verifier));
        assert!(out.is_reject());
        let l = MaxMatchLaconic { tuning: Tuning::new(2, 2) };
        let tr = l.transcript(&i, &field, &cert);
        let out = verify_transcript(&l, &i, field, &tr, rng_for(3, Substream::Verifier));
        assert!(out.is_reject());
    }
}
