//! Unweighted SSSP and st-shortest-path.
//!
//! With `v = (x, y)` shaped into `[t] x [s]`, round `d` sends
//! `p_d(X, U) = sum_y b~_d(X, y) a~(X, y, U)` on `[2t - 1] x [n]` and the row
//! `Q_d = (q_d(u))_u`, `q_d(u) = sum_x p_d(x, u)`. The next ball is the
//! source plus every `u` with `q_d(u) != 0`.

use super::{bfs_dist, check_nonnegative, check_source, decode_dist, encode_dist, label_lie, source_of};
use crate::edgecount::{token_delta, SPACE_SLACK};
use crate::extension::{unit_impulse, GridStream, ImpulseTable, ShapeConfig};
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_bfs, DenseGraph};
use crate::protocol::{
    ensure, generic_mutation, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter,
    StreamVerifier, TrackedVec, Tuning,
};
use crate::setops::BallFingerprint;
use crate::stream::{Model, ProofTranscript, StreamHeader, StreamToken};

fn check_unweighted(name: &'static str, inst: &Instance, tuning: Tuning) -> Result<ShapeConfig, SchemeError> {
    match inst.graph.model {
        Model::Turnstile | Model::Vanilla => {}
        m => return Err(SchemeError::Model { scheme: name, expected: "turnstile or vanilla", got: m.name() }),
    }
    check_source(name, inst)?;
    check_nonnegative(name, inst)?;
    Ok(ShapeConfig::new(inst.n(), tuning.t, tuning.s)?)
}

fn round_degrees(shape: ShapeConfig) -> [usize; 2] {
    [2 * (shape.t - 1), shape.n - 1]
}

/// Honest rounds: `P` then `Q` for every ball in `balls`.
struct RoundProver {
    field: FieldConfig,
    shape: ShapeConfig,
    matrix: Vec<i64>,
    /// `a~(g, y, u)` at `[(g * s + y) * n + u]`.
    arow: Vec<Fe>,
    imp: Vec<Vec<Fe>>,
}

impl RoundProver {
    fn new(field: FieldConfig, shape: ShapeConfig, matrix: Vec<i64>) -> Self {
        let (n, t, s) = (shape.n, shape.t, shape.s);
        let g = 2 * t - 1;
        let imp = ImpulseTable::new(field, t).on_integers(g);
        let mut arow = vec![field.zero(); g * s * n];
        for v in 1..=n {
            let (x, y) = shape.shape_unchecked(v);
            for u in 0..n {
                let a = matrix[(v - 1) * n + u];
                if a == 0 {
                    continue;
                }
                let a = field.from_i64(a);
                for gi in 0..g {
                    arow[(gi * s + y - 1) * n + u] += a * imp[x - 1][gi];
                }
            }
        }
        Self { field, shape, matrix, arow, imp }
    }

    fn push_round(&self, tr: &mut ProofTranscript, ball: &[bool]) {
        let (n, t, s) = (self.shape.n, self.shape.t, self.shape.s);
        let f = &self.field;
        let g = 2 * t - 1;
        let mut values = vec![f.zero(); g * n];
        for gi in 0..g {
            let mut bb = vec![f.zero(); s];
            for v in 1..=n {
                if ball[v - 1] {
                    let (x, y) = self.shape.shape_unchecked(v);
                    bb[y - 1] += self.imp[x - 1][gi];
                }
            }
            for (y, &b) in bb.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let row = &self.arow[(gi * s + y) * n..(gi * s + y + 1) * n];
                for u in 0..n {
                    values[gi * n + u] += b * row[u];
                }
            }
        }
        tr.push_poly("P", round_degrees(self.shape).to_vec(), values);
        let q = (0..n)
            .map(|u| f.from_i64((0..n).filter(|&v| ball[v]).map(|v| self.matrix[v * n + u]).sum()))
            .collect();
        tr.push_scalars("Q", q);
    }
}

fn ball(dist: &[Option<u64>], d: u64) -> Vec<bool> {
    dist.iter().map(|x| x.is_some_and(|x| x <= d)).collect()
}

/// Verifier state shared by both schemes: `a~(r1, y, r2)` and the current
/// ball `b~_d(r1, y)`.
struct Rounds {
    field: FieldConfig,
    shape: ShapeConfig,
    directed: bool,
    src: u32,
    r1: Fe,
    r2: Fe,
    beta: Fe,
    gamma: Fe,
    atab: TrackedVec<Fe>,
    ball: TrackedVec<Fe>,
    _scalars: Reservation,
    meter: SpaceMeter,
}

struct RoundOutcome {
    /// `sum_{u in B_(d+1)} gamma^u`.
    set_fp: Fe,
    has: Option<bool>,
}

impl Rounds {
    fn new(field: FieldConfig, shape: ShapeConfig, header: &StreamHeader, rng: &mut ProtocolRng, meter: &SpaceMeter) -> Self {
        let mut r = || field.random(rng);
        let (r1, r2, beta, gamma) = (r(), r(), r(), r());
        let mut me = Self {
            field,
            shape,
            directed: header.directed,
            src: source_of(header),
            r1,
            r2,
            beta,
            gamma,
            atab: meter.vec(shape.s, field.zero()),
            ball: meter.vec(shape.s, field.zero()),
            _scalars: meter.reserve(8),
            meter: meter.clone(),
        };
        let src = me.src;
        me.add_to_ball(src);
        me
    }

    fn imp_t(&self, x: usize, r: Fe) -> Fe {
        unit_impulse(x, r, self.shape.t, &self.field).expect("shaped")
    }

    fn add_to_ball(&mut self, u: u32) {
        let (x, y) = self.shape.shape_unchecked(u as usize);
        let w = self.imp_t(x, self.r1);
        self.ball[y - 1] += w;
    }

    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, d) = token_delta(&self.field, tok);
        let n = self.shape.n;
        let ways = if self.directed { 1 } else { 2 };
        for (a, b) in [(u, v), (v, u)].into_iter().take(ways) {
            let (x, y) = self.shape.shape_unchecked(a as usize);
            let w = d * self.imp_t(x, self.r1) * unit_impulse(b as usize, self.r2, n, &self.field).expect("vertex");
            self.atab[y - 1] += w;
        }
    }

    /// Reads `P` and `Q` for round `d`, rebuilding the ball in place.
    /// `balls` receives `B_(d+1)` when present; `target` is reported if given.
    fn round(
        &mut self,
        proof: &mut ProofReader<'_>,
        d: u64,
        mut balls: Option<&mut BallFingerprint>,
        target: Option<u32>,
    ) -> Result<RoundOutcome, Rejection> {
        let f = self.field;
        let (n, t) = (self.shape.n, self.shape.t);
        let expected = f.dot(&self.ball, &self.atab);
        let values = proof.next_poly("P", &round_degrees(self.shape))?;
        let mut gs = GridStream::new(f, &round_degrees(self.shape), &[self.r1, self.r2], &[t, n]);
        let _gs = self.meter.reserve(gs.live_elements());
        let mut g = f.zero();
        let mut pw = self.beta;
        for (i, &v) in values.iter().enumerate() {
            gs.push(v);
            if i % n == 0 {
                pw = self.beta;
            }
            if i / n < t {
                g += v * pw;
            }
            pw *= self.beta;
        }
        let (at, _) = gs.finish();
        ensure(at == expected, "sssp-sumcheck", || format!("round {d}: p^(r1, r2) differs from the sketch"))?;
        self.ball.fill(f.zero());
        let q = proof.next_scalars("Q", Some(n))?;
        let (mut g2, mut set_fp) = (f.zero(), f.zero());
        let (mut bpow, mut gpow) = (self.beta, self.gamma);
        let mut has = target.map(|_| false);
        for (i, &qu) in q.iter().enumerate() {
            let u = i as u32 + 1;
            g2 += qu * bpow;
            if !qu.is_zero() || u == self.src {
                self.add_to_ball(u);
                set_fp += gpow;
                if let Some(b) = balls.as_deref_mut() {
                    b.update(u as u64, d + 1, f.one()).expect("ball index");
                }
                if target == Some(u) {
                    has = Some(true);
                }
            }
            bpow *= self.beta;
            gpow *= self.gamma;
        }
        ensure(g == g2, "sssp-fingerprint", || format!("round {d}: Q_d disagrees with p^_d"))?;
        Ok(RoundOutcome { set_fp, has })
    }
}

/// `sssp-unweighted`: `[Dnt, s]`.
#[derive(Debug, Clone, Copy)]
pub struct SsspUnweighted {
    pub tuning: Tuning,
}

impl SsspUnweighted {
    /// Transcript for arbitrary labels; rounds follow the true balls.
    pub fn transcript(&self, inst: &Instance, field: &FieldConfig, labels: &[Option<u64>]) -> ProofTranscript {
        let shape = ShapeConfig::new(inst.n(), self.tuning.t, self.tuning.s).expect("checked shape");
        let matrix = inst.graph.final_matrix();
        let src = inst.graph.source.unwrap_or(1);
        let dist = bfs_dist(inst.n(), &matrix, src);
        let depth = labels.iter().flatten().copied().max().unwrap_or(0);
        let mut tr = ProofTranscript::new(field);
        tr.push_scalars("D", vec![field.elem(depth)]);
        tr.push_scalars("L", labels.iter().map(|&l| encode_dist(field, l)).collect());
        let prover = RoundProver::new(*field, shape, matrix);
        for d in 0..round_count(labels, depth) {
            prover.push_round(&mut tr, &ball(&dist, d));
        }
        tr
    }
}

/// With every label finite the claimed `B_D` is all of `V`, so no round is
/// needed to show that the ball stops growing.
fn round_count(labels: &[Option<u64>], depth: u64) -> u64 {
    if labels.iter().all(Option::is_some) {
        depth
    } else {
        depth + 1
    }
}

struct UnweightedVerifier {
    rounds: Rounds,
    beta1: Fe,
    beta2: Fe,
}

impl StreamVerifier for UnweightedVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        self.rounds.observe(tok);
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let f = self.rounds.field;
        let n = self.rounds.shape.n;
        let src = self.rounds.src;
        let depth = proof.next_scalars("D", Some(1))?[0].value();
        ensure(depth < n as u64, "label-format", || format!("depth {depth} is not below n"))?;
        let labels = proof.next_scalars("L", Some(n))?;
        let mut claimed = BallFingerprint::new(self.beta1, self.beta2, n as u64, depth);
        let mut built = BallFingerprint::new(self.beta1, self.beta2, n as u64, depth);
        let _fps = self.rounds.meter.reserve(2);
        let mut out = Vec::with_capacity(n);
        for (i, &l) in labels.iter().enumerate() {
            let v = i as u32 + 1;
            let dv = decode_dist(l, depth)?;
            ensure((dv == Some(0)) == (v == src), "label-source", || format!("vertex {v} has label {dv:?}"))?;
            if let Some(k) = dv {
                for d in k.max(1)..=depth {
                    claimed.update(v as u64, d, f.one()).expect("ball index");
                }
            }
            out.push(dv);
        }
        let mut prev = f.elem(0);
        {
            let mut pw = f.one();
            for _ in 0..src {
                pw *= self.rounds.gamma;
            }
            prev += pw;
        }
        for d in 0..round_count(&out, depth) {
            let balls = (d < depth).then_some(&mut built);
            let r = self.rounds.round(proof, d, balls, None)?;
            if d == depth {
                ensure(r.set_fp == prev, "sssp-unreachable", || format!("ball keeps growing after depth {depth}"))?;
            }
            prev = r.set_fp;
        }
        ensure(built.value() == claimed.value(), "sssp-balls", || "labels disagree with the verified balls".into())?;
        Ok(Answer::Distances(out))
    }
}

impl Scheme for SsspUnweighted {
    fn name(&self) -> &'static str {
        "sssp-unweighted"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_unweighted(self.name(), inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let dist = bfs_dist(inst.n(), &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        self.transcript(inst, field, &dist)
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let shape = ShapeConfig::new(header.n, self.tuning.t, self.tuning.s).expect("checked shape");
        let rounds = Rounds::new(field, shape, header, &mut rng, meter);
        let (beta1, beta2) = (field.random(&mut rng), field.random(&mut rng));
        Box::new(UnweightedVerifier { rounds, beta1, beta2 })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        let g = DenseGraph::from_instance(&inst.graph);
        *answer == Answer::Distances(oracle_bfs(&g, inst.graph.source.unwrap_or(1)))
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        let dist = bfs_dist(n, &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        let depth = dist.iter().flatten().copied().max().unwrap_or(0);
        1 + n + round_count(&dist, depth) as usize * ((2 * self.tuning.t - 1) * n + n)
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        2 * self.tuning.s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![
            MutationPolicy::Honest,
            MutationPolicy::CoeffFlip,
            MutationPolicy::Truncate,
            MutationPolicy::OutputLie,
            MutationPolicy::QdFlip,
            MutationPolicy::LabelLie,
        ]
    }

    fn mutate(&self, inst: &Instance, field: &FieldConfig, honest: &ProofTranscript, policy: MutationPolicy, rng: &mut ProtocolRng) -> Option<ProofTranscript> {
        match policy {
            MutationPolicy::LabelLie => label_lie(field, honest, "L", 1, inst.graph.source.unwrap_or(1), rng),
            _ => generic_mutation(inst, field, honest, policy, rng),
        }
    }
}

/// `stpath`: rounds stop once the target enters the ball.
#[derive(Debug, Clone, Copy)]
pub struct StPath {
    pub tuning: Tuning,
}

struct StPathVerifier {
    rounds: Rounds,
    target: u32,
}

impl StreamVerifier for StPathVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        self.rounds.observe(tok);
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let src = self.rounds.src;
        if self.target == src {
            return Ok(Answer::Distance(Some(0)));
        }
        let f = self.rounds.field;
        let n = self.rounds.shape.n as u64;
        let mut prev = f.one();
        for _ in 0..src {
            prev *= self.rounds.gamma;
        }
        for d in 0..n {
            let r = self.rounds.round(proof, d, None, Some(self.target))?;
            if r.has == Some(true) {
                return Ok(Answer::Distance(Some(d + 1)));
            }
            if r.set_fp == prev {
                return Ok(Answer::Distance(None));
            }
            prev = r.set_fp;
        }
        Err(Rejection::new("sssp-unreachable", "ball grew for n rounds"))
    }
}

fn target_of(inst: &Instance) -> u32 {
    inst.graph.target.unwrap_or(inst.n() as u32)
}

impl Scheme for StPath {
    fn name(&self) -> &'static str {
        "stpath"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        check_unweighted(self.name(), inst, self.tuning)?;
        let t = target_of(inst);
        if t == 0 || t as usize > inst.n() {
            return Err(SchemeError::Precondition(format!("stpath: target {t} outside [1, {}]", inst.n())));
        }
        Ok(())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let shape = ShapeConfig::new(inst.n(), self.tuning.t, self.tuning.s).expect("checked shape");
        let matrix = inst.graph.final_matrix();
        let (src, tgt) = (inst.graph.source.unwrap_or(1), target_of(inst));
        let dist = bfs_dist(inst.n(), &matrix, src);
        let mut tr = ProofTranscript::new(field);
        if src == tgt {
            return tr;
        }
        let depth = dist.iter().flatten().copied().max().unwrap_or(0);
        let last = dist[tgt as usize - 1].map_or(depth, |k| k - 1);
        let prover = RoundProver::new(*field, shape, matrix);
        for d in 0..=last {
            prover.push_round(&mut tr, &ball(&dist, d));
        }
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let shape = ShapeConfig::new(header.n, self.tuning.t, self.tuning.s).expect("checked shape");
        let target = header.target.unwrap_or(header.n as u32);
        Box::new(StPathVerifier { rounds: Rounds::new(field, shape, header, &mut rng, meter), target })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        let g = DenseGraph::from_instance(&inst.graph);
        *answer == Answer::Distance(oracle_bfs(&g, inst.graph.source.unwrap_or(1))[target_of(inst) as usize - 1])
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let n = inst.n();
        let dist = bfs_dist(n, &inst.graph.final_matrix(), inst.graph.source.unwrap_or(1));
        let depth = dist.iter().flatten().copied().max().unwrap_or(0);
        let k = dist[target_of(inst) as usize - 1].unwrap_or(depth + 1) as usize;
        k.max(1) * ((2 * self.tuning.t - 1) * n + n)
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        2 * self.tuning.s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie, MutationPolicy::QdFlip]
    }
}
