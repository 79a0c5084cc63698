//! Weighted SSSP with a linear-space Verifier.
//!
//! Both schemes grow balls `B_d` by exact distance: round `d` sends a
//! univariate `p_d(U)` whose value at `u` outside `B_d` is nonzero exactly
//! when `dist(u) = d + 1`. A final intersection check shows that no edge
//! leaves `B_D`.

use super::{check_source, decode_dist, dijkstra, encode_dist, label_lie, source_of};
use crate::edgecount::SPACE_SLACK;
use crate::extension::{unit_impulse, GridStream, ImpulseTable};
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_dijkstra, oracle_sssp_labels_valid, DenseGraph};
use crate::protocol::{
    ensure, generic_mutation, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError,
    SpaceMeter, StreamVerifier, TrackedVec, Tuning,
};
use crate::setops::{check_intersection, check_subset, prove_line, LineMode, LineSketch, SetShape};
use crate::stream::{Model, ProofTranscript, StreamHeader, StreamToken};

const UNREACHED: u64 = u64::MAX;

fn weight_bound(inst: &Instance) -> u64 {
    inst.graph.effective_weight_bound().unwrap_or(1).max(1)
}

fn weighted_field(tuning: Tuning, inst: &Instance) -> Result<FieldConfig, SchemeError> {
    let w = weight_bound(inst);
    Ok(match tuning.modulus {
        Some(p) => FieldConfig::new(p)?,
        None => FieldConfig::auto(inst.n(), Some(((inst.n() as u64 - 1).max(1) * w, w)))?,
    })
}

fn final_weights(name: &'static str, inst: &Instance, w: u64) -> Result<Vec<i64>, SchemeError> {
    let m = inst.graph.final_matrix();
    if let Some(&bad) = m.iter().find(|&&a| a < 0 || a as u64 > w) {
        return Err(SchemeError::Precondition(format!("{name}: final weight {bad} outside [0, {w}]")));
    }
    Ok(m)
}

/// `delta_w(z)` for the nodes `{0, ..., W}`.
fn weight_selector(w: u64, z: Fe, wmax: u64, field: &FieldConfig) -> Fe {
    unit_impulse(w as usize + 1, z + field.one(), wmax as usize + 1, field).expect("weight in range")
}

/// Pairs `(a, b)` with `a` inside and `b` outside the final ball.
fn cross_pairs(dist: &[u64]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = dist.len();
    (1..=n).filter(move |&a| dist[a - 1] != UNREACHED).flat_map(move |a| (1..=n).filter(move |&b| dist[b - 1] == UNREACHED).map(move |b| (a, b)))
}

fn to_labels(dist: &[Option<u64>]) -> Vec<u64> {
    dist.iter().map(|d| d.unwrap_or(UNREACHED)).collect()
}

/// `sssp-wturnstile`: `[DWn, n]`.
#[derive(Debug, Clone, Copy)]
pub struct SsspWeightedTurnstile {
    pub tuning: Tuning,
}

fn pair_shape(n: usize) -> SetShape {
    SetShape::new(n * n, n, n).expect("n x n holds n^2")
}

impl SsspWeightedTurnstile {
    fn rounds(&self, inst: &Instance, field: &FieldConfig) -> (Vec<Option<u64>>, Vec<Vec<Fe>>) {
        let n = inst.n();
        let w = weight_bound(inst);
        let matrix = inst.graph.final_matrix();
        let src = inst.graph.source.unwrap_or(1);
        let (dist, _) = dijkstra(n, &matrix, src);
        let depth = dist.iter().flatten().copied().max().unwrap_or(0);
        let len = w as usize * (n - 1) + 1;
        let table = ImpulseTable::new(*field, n);
        // a~(v, X) for every grid point X
        let arow: Vec<Vec<Fe>> = (1..=len)
            .map(|x| {
                let imp = table.eval_all(field.elem(x as u64));
                (0..n).map(|v| (0..n).fold(field.zero(), |acc, u| acc + field.from_i64(matrix[v * n + u]) * imp[u])).collect()
            })
            .collect();
        let rounds = (0..depth)
            .map(|d| {
                (0..len)
                    .map(|xi| {
                        let mut acc = field.zero();
                        for v in 0..n {
                            let Some(dv) = dist[v].filter(|&dv| dv <= d) else { continue };
                            let wv = d + 1 - dv;
                            if wv <= w {
                                acc += weight_selector(wv, arow[xi][v], w, field);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        (dist, rounds)
    }
}

struct TurnstileVerifier {
    field: FieldConfig,
    n: usize,
    w: u64,
    src: u32,
    directed: bool,
    r: Fe,
    arow: TrackedVec<Fe>,
    edges: LineSketch,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for TurnstileVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, d) = tok.kind.as_update();
        let f = self.field;
        let d = f.from_i64(d);
        let ways = if self.directed { 1 } else { 2 };
        for (a, b) in [(u, v), (v, u)].into_iter().take(ways) {
            self.arow[a as usize - 1] += d * unit_impulse(b as usize, self.r, self.n, &f).expect("vertex");
            self.edges.update((a as usize - 1) * self.n + b as usize, d).expect("pair index");
        }
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n, w, m) = (self.field, self.n, self.w, self.meter.clone());
        let depth = proof.next_scalars("D", Some(1))?[0].value();
        ensure(depth <= (n as u64 - 1) * w, "label-format", || format!("depth {depth} too large"))?;
        let mut dist = m.vec(n, UNREACHED);
        dist[self.src as usize - 1] = 0;
        let degree = w as usize * (n - 1);
        for d in 0..depth {
            let mut expected = f.zero();
            for v in 0..n {
                if dist[v] <= d && d + 1 - dist[v] <= w {
                    expected += weight_selector(d + 1 - dist[v], self.arow[v], w, &f);
                }
            }
            let values = proof.next_poly("P", &[degree])?;
            let mut gs = GridStream::new(f, &[degree], &[self.r], &[1]);
            let _gs = m.reserve(gs.live_elements());
            for &x in values {
                gs.push(x);
            }
            ensure(gs.finish().0 == expected, "sssp-sumcheck", || format!("round {d}: p^(r) differs from the sketch"))?;
            for u in 0..n {
                if dist[u] == UNREACHED && !values[u].is_zero() {
                    dist[u] = d + 1;
                }
            }
        }
        let mut cross = LineSketch::new(f, pair_shape(n), self.r, &m);
        for (a, b) in cross_pairs(&dist) {
            cross.update((a - 1) * n + b, f.one()).expect("pair index");
        }
        let leaving = check_intersection(&cross, &self.edges, proof.next_scalars("X", Some(2 * n - 1))?, &m)?;
        ensure(leaving == 0, "sssp-unreachable", || format!("{leaving} weight leaves the final ball"))?;
        Ok(Answer::Distances(dist.iter().map(|&d| (d != UNREACHED).then_some(d)).collect()))
    }
}

impl Scheme for SsspWeightedTurnstile {
    fn name(&self) -> &'static str {
        "sssp-wturnstile"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn field(&self, inst: &Instance) -> Result<FieldConfig, SchemeError> {
        weighted_field(self.tuning, inst)
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        match inst.graph.model {
            Model::Turnstile | Model::Weighted => {}
            m => return Err(SchemeError::Model { scheme: self.name(), expected: "turnstile or weighted", got: m.name() }),
        }
        check_source(self.name(), inst)?;
        final_weights(self.name(), inst, weight_bound(inst)).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let n = inst.n();
        let (dist, rounds) = self.rounds(inst, field);
        let w = weight_bound(inst);
        let mut tr = ProofTranscript::new(field);
        tr.push_scalars("D", vec![field.elem(rounds.len() as u64)]);
        for r in rounds {
            tr.push_poly("P", vec![w as usize * (n - 1)], r);
        }
        let labels = to_labels(&dist);
        let cross: Vec<usize> = cross_pairs(&labels).map(|(a, b)| (a - 1) * n + b).collect();
        let matrix = inst.graph.final_matrix();
        let edges: Vec<usize> = (0..n * n).flat_map(|i| std::iter::repeat_n(i + 1, matrix[i] as usize)).collect();
        tr.push_scalars("X", prove_line(field, pair_shape(n), &cross, &edges, LineMode::Intersect));
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let n = header.n;
        let r = field.random(&mut rng);
        Box::new(TurnstileVerifier {
            field,
            n,
            w: header.weight_bound.unwrap_or(1).max(1),
            src: source_of(header),
            directed: header.directed,
            r,
            arow: meter.vec(n, field.zero()),
            edges: LineSketch::new(field, pair_shape(n), r, meter),
            _scalars: meter.reserve(4),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        let g = DenseGraph::from_instance(&inst.graph);
        *answer == Answer::Distances(oracle_dijkstra(&g, inst.graph.source.unwrap_or(1)).0)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        let (dist, _) = dijkstra(n, &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        let depth = dist.into_iter().flatten().max().unwrap_or(0) as usize;
        1 + depth * (weight_bound(inst) as usize * (n - 1) + 1) + 2 * n - 1
    }

    fn vcost_bound(&self, inst: &Instance) -> usize {
        4 * inst.n() + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie]
    }
}

/// `sssp-wvanilla`: `[Dn, Wn]`. The Prover also sends `dist` and `prev`
/// labels, validated by a subset check of the implied weighted edges.
#[derive(Debug, Clone, Copy)]
pub struct SsspWeightedVanilla {
    pub tuning: Tuning,
}

/// Index of the weighted edge `(a, b, w)` in `[n^2 W]`.
fn wedge_index(a: usize, b: usize, w: u64, n: usize, wmax: u64) -> usize {
    ((a - 1) * n + (b - 1)) * wmax as usize + w as usize
}

fn wedge_shape(n: usize, wmax: u64) -> SetShape {
    SetShape::new(n * n * wmax as usize, wmax as usize * n, n).expect("Wn x n holds n^2 W")
}

impl SsspWeightedVanilla {
    /// Transcript for arbitrary labels; rounds follow the true distances.
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, labels: &[Option<u64>], prev: &[Option<u32>]) -> ProofTranscript {
        let n = inst.n();
        let w = weight_bound(inst);
        let matrix = inst.graph.final_matrix();
        let (dist, _) = dijkstra(n, &matrix, inst.graph.source.unwrap_or(1));
        let mut edges = Vec::new();
        for a in 1..=n {
            for b in 1..=n {
                let x = matrix[(a - 1) * n + b - 1];
                if x > 0 {
                    edges.push(wedge_index(a, b, x as u64, n, w));
                }
            }
        }
        let mut tr = ProofTranscript::new(field);
        tr.push_scalars("L", labels.iter().zip(prev).flat_map(|(&d, &p)| [encode_dist(field, d), field.elem(p.unwrap_or(0) as u64)]).collect());
        let claimed: Vec<usize> = (1..=n)
            .filter_map(|v| {
                let p = prev[v - 1]? as usize;
                let wv = labels[v - 1]?.checked_sub(labels[p - 1]?)?;
                (1..=w).contains(&wv).then(|| wedge_index(p, v, wv, n, w))
            })
            .collect();
        tr.push_scalars("S", prove_line(field, wedge_shape(n, w), &claimed, &edges, LineMode::Subset));
        let depth = labels.iter().flatten().copied().max().unwrap_or(0);
        for d in 0..depth {
            let values = (1..=n)
                .map(|u| {
                    let c = (1..=n)
                        .filter(|&v| {
                            dist[v - 1].is_some_and(|dv| dv <= d && matrix[(v - 1) * n + u - 1] == (d + 1 - dv) as i64)
                        })
                        .count();
                    field.elem(c as u64)
                })
                .collect();
            tr.push_poly("P", vec![n - 1], values);
        }
        let ball: Vec<u64> = dist.iter().map(|d| d.filter(|&d| d <= depth).unwrap_or(UNREACHED)).collect();
        let cross: Vec<usize> = cross_pairs(&ball).flat_map(|(a, b)| (1..=w).map(move |x| wedge_index(a, b, x, n, w))).collect();
        tr.push_scalars("X", prove_line(field, wedge_shape(n, w), &cross, &edges, LineMode::Intersect));
        tr
    }
}

struct VanillaVerifier {
    field: FieldConfig,
    n: usize,
    w: u64,
    src: u32,
    directed: bool,
    r: Fe,
    /// `f~(v, r, w)` at `[(v - 1) W + w - 1]`.
    ftab: TrackedVec<Fe>,
    edges: LineSketch,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for VanillaVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, wt) = tok.kind.as_update();
        let (f, n, w) = (self.field, self.n, self.w);
        let ways = if self.directed { 1 } else { 2 };
        for (a, b) in [(u, v), (v, u)].into_iter().take(ways) {
            let (a, b) = (a as usize, b as usize);
            self.ftab[(a - 1) * w as usize + wt as usize - 1] += unit_impulse(b, self.r, n, &f).expect("vertex");
            self.edges.update(wedge_index(a, b, wt as u64, n, w), f.one()).expect("weighted pair");
        }
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let (f, n, w, m) = (self.field, self.n, self.w, self.meter.clone());
        let raw = proof.next_scalars("L", Some(2 * n))?;
        let mut label = m.vec(n, UNREACHED);
        let mut prev = m.vec(n, 0usize);
        for v in 0..n {
            label[v] = decode_dist(raw[2 * v], (n as u64 - 1) * w)?.unwrap_or(UNREACHED);
            let p = raw[2 * v + 1].value();
            ensure(p <= n as u64, "label-format", || format!("prev {p} out of range"))?;
            prev[v] = p as usize;
        }
        let s = self.src as usize;
        ensure(label[s - 1] == 0 && prev[s - 1] == 0, "label-source", || "source label is not 0".into())?;
        {
            let mut claimed = LineSketch::new(f, wedge_shape(n, w), self.r, &m);
            for v in 1..=n {
                let (lv, p) = (label[v - 1], prev[v - 1]);
                if v == s {
                    continue;
                }
                if lv == UNREACHED {
                    ensure(p == 0, "label-format", || format!("unreachable {v} has a parent"))?;
                    continue;
                }
                ensure(p >= 1 && label[p - 1] < lv && lv - label[p - 1] <= w, "label-tree", || format!("prev of {v} cannot realise its label"))?;
                claimed.update(wedge_index(p, v, lv - label[p - 1], n, w), f.one()).expect("weighted pair");
            }
            ensure(check_subset(&claimed, &self.edges, proof.next_scalars("S", Some(wedge_shape(n, w).hcost()))?, &m)?, "label-subset", || "a prev edge is not in the graph".into())?;
        }
        let depth = label.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0);
        let mut dist = m.vec(n, UNREACHED);
        dist[s - 1] = 0;
        for d in 0..depth {
            let mut expected = f.zero();
            for v in 0..n {
                if dist[v] <= d && d + 1 - dist[v] <= w {
                    expected += self.ftab[v * w as usize + (d - dist[v]) as usize];
                }
            }
            let values = proof.next_poly("P", &[n - 1])?;
            let mut gs = GridStream::new(f, &[n - 1], &[self.r], &[1]);
            let _gs = m.reserve(gs.live_elements());
            for &x in values {
                gs.push(x);
            }
            ensure(gs.finish().0 == expected, "sssp-sumcheck", || format!("round {d}: p^(r) differs from the sketch"))?;
            for u in 0..n {
                if dist[u] == UNREACHED && !values[u].is_zero() {
                    dist[u] = d + 1;
                }
            }
        }
        ensure(dist.iter().zip(label.iter()).all(|(a, b)| a == b), "sssp-labels", || "labels disagree with the verified rounds".into())?;
        let mut cross = LineSketch::new(f, wedge_shape(n, w), self.r, &m);
        for (a, b) in cross_pairs(&dist) {
            for x in 1..=w {
                cross.update(wedge_index(a, b, x, n, w), f.one()).expect("weighted pair");
            }
        }
        let leaving = check_intersection(&cross, &self.edges, proof.next_scalars("X", Some(wedge_shape(n, w).hcost()))?, &m)?;
        ensure(leaving == 0, "sssp-unreachable", || format!("{leaving} edges leave the final ball"))?;
        let out = |d: u64| (d != UNREACHED).then_some(d);
        Ok(Answer::Labels {
            dist: dist.iter().map(|&d| out(d)).collect(),
            prev: prev.iter().map(|&p| (p != 0).then_some(p as u32)).collect(),
        })
    }
}

impl Scheme for SsspWeightedVanilla {
    fn name(&self) -> &'static str {
        "sssp-wvanilla"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn field(&self, inst: &Instance) -> Result<FieldConfig, SchemeError> {
        weighted_field(self.tuning, inst)
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        if inst.graph.model != Model::Weighted {
            return Err(SchemeError::Model { scheme: self.name(), expected: "weighted", got: inst.graph.model.name() });
        }
        check_source(self.name(), inst)?;
        if inst.graph.has_repeated_pairs() {
            return Err(SchemeError::Precondition("sssp-wvanilla: each edge must arrive once".into()));
        }
        final_weights(self.name(), inst, weight_bound(inst)).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let (dist, prev) = dijkstra(inst.n(), &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        self.transcript(inst, field, &dist, &prev)
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let n = header.n;
        let w = header.weight_bound.unwrap_or(1).max(1);
        let r = field.random(&mut rng);
        Box::new(VanillaVerifier {
            field,
            n,
            w,
            src: source_of(header),
            directed: header.directed,
            r,
            ftab: meter.vec(n * w as usize, field.zero()),
            edges: LineSketch::new(field, wedge_shape(n, w), r, meter),
            _scalars: meter.reserve(4),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        let Answer::Labels { dist, prev } = answer else { return false };
        let g = DenseGraph::from_instance(&inst.graph);
        let src = inst.graph.source.unwrap_or(1);
        *dist == oracle_dijkstra(&g, src).0 && oracle_sssp_labels_valid(&g, src, dist, prev)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        let (dist, _) = dijkstra(n, &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        let depth = dist.into_iter().flatten().max().unwrap_or(0) as usize;
        2 * n + depth * n + 2 * wedge_shape(n, weight_bound(inst)).hcost()
    }

    fn vcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        n * weight_bound(inst) as usize + 5 * n + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![
            MutationPolicy::Honest,
            MutationPolicy::CoeffFlip,
            MutationPolicy::Truncate,
            MutationPolicy::OutputLie,
            MutationPolicy::LabelLie,
        ]
    }

    fn mutate(&self, inst: &Instance, field: &FieldConfig, honest: &ProofTranscript, policy: MutationPolicy, rng: &mut ProtocolRng) -> Option<ProofTranscript> {
        match policy {
            MutationPolicy::LabelLie => label_lie(field, honest, "L", 2, inst.graph.source.unwrap_or(1), rng),
            _ => generic_mutation(inst, field, honest, policy, rng),
        }
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

    fn answer(s: &dyn Scheme, i: &Instance) -> Answer {
        let r = run_honest(s, i, 6).unwrap();
        assert!(!r.outcome.budget_exceeded, "{} over budget", s.name());
        r.outcome.answer().cloned().unwrap_or_else(|| panic!("{} rejected: {:?}", s.name(), r.outcome.result))
    }

    #[test]
    fn turnstile_examples() {
        let s = SsspWeightedTurnstile { tuning: Tuning::balanced(3) };
        assert_eq!(answer(&s, &inst("n=2 model=weighted source=1\n1 2 3\n")), Answer::Distances(vec![Some(0), Some(3)]));
        let tri = inst("n=3 model=weighted source=1\n1 2 1\n2 3 1\n1 3 3\n");
        assert_eq!(answer(&s, &tri), Answer::Distances(vec![Some(0), Some(1), Some(2)]));
        let wobble = inst("n=3 model=turnstile W=3 source=1\n1 2 +1\n2 3 +1\n1 3 +3\n1 3 +1\n1 3 -1\n");
        assert_eq!(answer(&s, &wobble), Answer::Distances(vec![Some(0), Some(1), Some(2)]));
        let apart = inst("n=4 model=weighted source=1\n1 2 2\n3 4 1\n");
        assert_eq!(answer(&s, &apart), Answer::Distances(vec![Some(0), Some(2), None, None]));
    }

    #[test]
    fn vanilla_examples() {
        let s = SsspWeightedVanilla { tuning: Tuning::balanced(2) };
        let one = inst("n=2 model=weighted source=1\n1 2 2\n");
        assert_eq!(answer(&s, &one), Answer::Labels { dist: vec![Some(0), Some(2)], prev: vec![None, Some(1)] });
        let tri = inst("n=4 model=weighted source=1\n1 2 1\n2 3 1\n1 3 3\n");
        assert_eq!(
            answer(&s, &tri),
            Answer::Labels { dist: vec![Some(0), Some(1), Some(2), None], prev: vec![None, Some(1), Some(2), None] }
        );
        let field = s.field(&tri).unwrap();
        let bad = s.transcript(&tri, &field, &[Some(0), Some(1), Some(2), None], &[None, Some(1), Some(1), None]);
        assert!(verify_transcript(&s, &tri, field, &bad, rng_for(2, Substream::Verifier)).is_reject());
    }
}
