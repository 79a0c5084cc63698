//! Triangle counting: laconic and frugal sum-check schemes over the
//! update-accounting identity, plus two schemes built on induced edge counts
//! (sparse graphs and adjacency-list streams).
//!
//! Every update `(u, v, D)` creates `D * sum_z A(u, z) A(v, z)` triangles,
//! measured on the multiplicities before the update, so the final count is
//! the sum of those increments over the stream.

use rayon::prelude::*;

use crate::edgecount::{self, check_poly, poly_degrees, token_delta, EdgeGrid, EdgeTable, SetWorkspace, SPACE_SLACK};
use crate::extension::{unit_impulse, GridStream, ImpulseTable, ShapeConfig};
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_triangles, DenseGraph};
use crate::protocol::{
    ensure, generic_mutation, lift_signed, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme,
    SchemeError, SpaceMeter, StreamVerifier, TrackedVec, Tuning,
};
use crate::setops::Fingerprint;
use crate::stream::{Block, Model, ProofTranscript, StreamHeader, StreamToken, TokenKind, VItem};

fn require_undirected(name: &'static str, inst: &Instance, models: &[Model]) -> Result<(), SchemeError> {
    if !models.contains(&inst.graph.model) {
        let expected = if models.len() == 1 { models[0].name() } else { "turnstile or vanilla" };
        return Err(SchemeError::Model { scheme: name, expected, got: inst.graph.model.name() });
    }
    if inst.graph.directed {
        return Err(SchemeError::Precondition(format!("{name} needs an undirected graph")));
    }
    Ok(())
}

fn triangles_correct(inst: &Instance, answer: &Answer) -> bool {
    *answer == Answer::Count(oracle_triangles(&DenseGraph::from_instance(&inst.graph)))
}

/// Copy of `honest` with `amount` added to the first value of its first
/// polynomial block, shifting the claimed answer by a known step.
fn bump_first_poly(field: &FieldConfig, honest: &ProofTranscript, amount: u64) -> Option<ProofTranscript> {
    let mut t = honest.clone();
    let b = t.blocks.iter_mut().find(|b| matches!(b, Block::Poly { .. }))?;
    if let Block::Poly { values, .. } = b {
        values[0] += field.elem(amount);
    }
    Some(t)
}

fn shape(inst_n: usize, tuning: Tuning) -> ShapeConfig {
    ShapeConfig::new(inst_n, tuning.t, tuning.s).expect("checked shape")
}

/// `tri-laconic`: Verifier keeps `a~(v, r3, y)` for all `(v, y)`; the help
/// message is the univariate `p(X3)` of degree `2(t - 1)`.
#[derive(Debug, Clone, Copy)]
pub struct TriLaconic {
    pub tuning: Tuning,
}

struct LaconicVerifier {
    field: FieldConfig,
    shape: ShapeConfig,
    r3: Fe,
    table: TrackedVec<Fe>,
    acc: Fe,
    _scalars: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for LaconicVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, d) = token_delta(&self.field, tok);
        let s = self.shape.s;
        let (u0, v0) = (u as usize - 1, v as usize - 1);
        let inc = self.field.dot(&self.table[u0 * s..(u0 + 1) * s], &self.table[v0 * s..(v0 + 1) * s]);
        self.acc += d * inc;
        let (xu, yu) = self.shape.shape_unchecked(u as usize);
        let (xv, yv) = self.shape.shape_unchecked(v as usize);
        let t = self.shape.t;
        self.table[u0 * s + yv - 1] += d * unit_impulse(xv, self.r3, t, &self.field).expect("shaped");
        self.table[v0 * s + yu - 1] += d * unit_impulse(xu, self.r3, t, &self.field).expect("shaped");
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let t = self.shape.t;
        let values = proof.next_poly("p", &[2 * (t - 1)])?;
        let mut gs = GridStream::new(self.field, &[2 * (t - 1)], &[self.r3], &[t]);
        let _state = self.meter.reserve(gs.live_elements());
        for &v in values {
            gs.push(v);
        }
        let (at, sum) = gs.finish();
        ensure(at == self.acc, "triangle-sumcheck", || "p^(r3) differs from the accumulator".into())?;
        Ok(Answer::Count(lift_signed(sum)))
    }
}

/// Honest `p(g)` for `g` in `[2t - 1]`.
pub fn prove_laconic(field: &FieldConfig, shape: ShapeConfig, tokens: &[StreamToken]) -> Vec<Fe> {
    let (n, t, s) = (shape.n, shape.t, shape.s);
    let imp = ImpulseTable::new(*field, t).on_integers(2 * t - 1);
    (0..2 * t - 1)
        .into_par_iter()
        .map(|g| {
            let mut table = vec![field.zero(); n * s];
            let mut acc = field.zero();
            for tok in tokens {
                let (u, v, d) = token_delta(field, tok);
                let (u0, v0) = (u as usize - 1, v as usize - 1);
                acc += d * field.dot(&table[u0 * s..(u0 + 1) * s], &table[v0 * s..(v0 + 1) * s]);
                let (xu, yu) = shape.shape_unchecked(u as usize);
                let (xv, yv) = shape.shape_unchecked(v as usize);
                table[u0 * s + yv - 1] += d * imp[xv - 1][g];
                table[v0 * s + yu - 1] += d * imp[xu - 1][g];
            }
            acc
        })
        .collect()
}

impl Scheme for TriLaconic {
    fn name(&self) -> &'static str {
        "tri-laconic"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        require_undirected(self.name(), inst, &[Model::Turnstile, Model::Vanilla])?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let sh = shape(inst.n(), self.tuning);
        let mut tr = ProofTranscript::new(field);
        tr.push_poly("p", vec![2 * (sh.t - 1)], prove_laconic(field, sh, &inst.graph.tokens));
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let sh = shape(header.n, self.tuning);
        Box::new(LaconicVerifier {
            field,
            shape: sh,
            r3: field.random(&mut rng),
            table: meter.vec(sh.n * sh.s, field.zero()),
            acc: field.zero(),
            _scalars: meter.reserve(2),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        triangles_correct(inst, answer)
    }

    fn hcost_bound(&self, _inst: &Instance) -> usize {
        2 * self.tuning.t - 1
    }

    fn vcost_bound(&self, inst: &Instance) -> usize {
        inst.n() * self.tuning.s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie]
    }
}

/// `tri-frugal`: Verifier keeps `b~(r1, y, r3)` and `b~(r2, y, r3)` and a
/// nonlinear accumulator; the help message is `q(W1, W2, V3)`.
#[derive(Debug, Clone, Copy)]
pub struct TriFrugal {
    pub tuning: Tuning,
}

struct FrugalVerifier {
    field: FieldConfig,
    shape: ShapeConfig,
    r: [Fe; 3],
    b1: TrackedVec<Fe>,
    b2: TrackedVec<Fe>,
    acc: Fe,
    _scalars: Reservation,
    meter: SpaceMeter,
}

fn frugal_degrees(shape: ShapeConfig) -> [usize; 3] {
    [2 * (shape.t - 1), 2 * (shape.t - 1), 2 * (shape.n - 1)]
}

impl StreamVerifier for FrugalVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let f = self.field;
        let (u, v, d) = token_delta(&f, tok);
        let (t, n) = (self.shape.t, self.shape.n);
        let [r1, r2, r3] = self.r;
        let (xu, yu) = self.shape.shape_unchecked(u as usize);
        let (xv, yv) = self.shape.shape_unchecked(v as usize);
        let imp = |x: usize, r: Fe, size: usize| unit_impulse(x, r, size, &f).expect("in domain");
        let (du1, du2, dv1, dv2) = (imp(xu, r1, t), imp(xu, r2, t), imp(xv, r1, t), imp(xv, r2, t));
        // increment uses the tables before this token's own updates
        self.acc += d * self.b1[yu - 1] * self.b2[yv - 1] * du1 * dv2;
        let (nu, nv) = (imp(u as usize, r3, n), imp(v as usize, r3, n));
        self.b1[yu - 1] += d * du1 * nv;
        self.b2[yu - 1] += d * du2 * nv;
        self.b1[yv - 1] += d * dv1 * nu;
        self.b2[yv - 1] += d * dv2 * nu;
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let degrees = frugal_degrees(self.shape);
        let values = proof.next_poly("q", &degrees)?;
        let (t, n) = (self.shape.t, self.shape.n);
        let mut gs = GridStream::new(self.field, &degrees, &self.r, &[t, t, n]);
        let _state = self.meter.reserve(gs.live_elements());
        for &v in values {
            gs.push(v);
        }
        let (at, sum) = gs.finish();
        ensure(at == self.acc, "triangle-sumcheck", || "q^(r1, r2, r3) differs from the accumulator".into())?;
        Ok(Answer::Count(lift_signed(sum)))
    }
}

/// Honest `q` on the grid `[2t - 1]^2 x [2n - 1]`, last coordinate fastest.
pub fn prove_frugal(field: &FieldConfig, shape: ShapeConfig, tokens: &[StreamToken]) -> Vec<Fe> {
    let (n, t, s) = (shape.n, shape.t, shape.s);
    let gw = 2 * t - 1;
    let gv = 2 * n - 1;
    let imp = ImpulseTable::new(*field, t).on_integers(gw);
    let vimp = ImpulseTable::new(*field, n);
    let len = tokens.len();
    let planes: Vec<Vec<Fe>> = (0..gv)
        .into_par_iter()
        .map(|g3| {
            let dv = vimp.eval_all(field.elem(g3 as u64 + 1));
            let mut table = vec![field.zero(); gw * s];
            // column-major factor matrices: p1[w * len + j]
            let mut p1 = vec![field.zero(); gw * len];
            let mut p2 = vec![field.zero(); gw * len];
            for (j, tok) in tokens.iter().enumerate() {
                let (u, v, d) = token_delta(field, tok);
                let (xu, yu) = shape.shape_unchecked(u as usize);
                let (xv, yv) = shape.shape_unchecked(v as usize);
                for w in 0..gw {
                    p1[w * len + j] = d * table[w * s + yu - 1] * imp[xu - 1][w];
                    p2[w * len + j] = table[w * s + yv - 1] * imp[xv - 1][w];
                }
                let (nu, nv) = (dv[u as usize - 1], dv[v as usize - 1]);
                for w in 0..gw {
                    table[w * s + yu - 1] += d * imp[xu - 1][w] * nv;
                    table[w * s + yv - 1] += d * imp[xv - 1][w] * nu;
                }
            }
            let mut plane = vec![field.zero(); gw * gw];
            for w1 in 0..gw {
                let a = &p1[w1 * len..(w1 + 1) * len];
                if a.iter().all(|x| x.is_zero()) {
                    continue;
                }
                for w2 in 0..gw {
                    plane[w1 * gw + w2] = field.dot(a, &p2[w2 * len..(w2 + 1) * len]);
                }
            }
            plane
        })
        .collect();
    let mut out = Vec::with_capacity(gw * gw * gv);
    for w in 0..gw * gw {
        for plane in &planes {
            out.push(plane[w]);
        }
    }
    out
}

impl Scheme for TriFrugal {
    fn name(&self) -> &'static str {
        "tri-frugal"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        require_undirected(self.name(), inst, &[Model::Turnstile, Model::Vanilla])?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let sh = shape(inst.n(), self.tuning);
        let mut tr = ProofTranscript::new(field);
        tr.push_poly("q", frugal_degrees(sh).to_vec(), prove_frugal(field, sh, &inst.graph.tokens));
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let sh = shape(header.n, self.tuning);
        let r = [field.random(&mut rng), field.random(&mut rng), field.random(&mut rng)];
        Box::new(FrugalVerifier {
            field,
            shape: sh,
            r,
            b1: meter.vec(sh.s, field.zero()),
            b2: meter.vec(sh.s, field.zero()),
            acc: field.zero(),
            _scalars: meter.reserve(4),
            meter: meter.clone(),
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        triangles_correct(inst, answer)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let t = self.tuning.t;
        (2 * t - 1) * (2 * t - 1) * (2 * inst.n() - 1)
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        2 * self.tuning.s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie]
    }
}

/// `tri-sparse`: the Prover replays every neighbourhood `N(v)` as a set for
/// induced edge counting, which sums to three times the triangle count.
#[derive(Debug, Clone, Copy)]
pub struct TriSparse {
    pub tuning: Tuning,
}

struct SparseVerifier {
    field: FieldConfig,
    n: usize,
    table: EdgeTable,
    ws: SetWorkspace,
    input_fp: Fingerprint,
    _fp: Reservation,
    meter: SpaceMeter,
    fp_point: Fe,
}

impl StreamVerifier for SparseVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, d) = token_delta(&self.field, tok);
        self.table.update(u, v, d);
        let n = self.n as u64;
        self.input_fp.update((u as u64 - 1) * n + v as u64, d).expect("pair index");
        self.input_fp.update((v as u64 - 1) * n + u as u64, d).expect("pair index");
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let n = self.n;
        let items = proof.next_vertices("N")?;
        let mut replay = Fingerprint::new(self.fp_point, (n * n) as u64);
        let _replay = self.meter.reserve(2);
        let mut i = 1usize;
        let one = self.field.one();
        for it in items {
            match *it {
                VItem::V(w) => {
                    ensure(i <= n && w >= 1 && w as usize <= n, "replay-format", || format!("bad entry {w} in set {i}"))?;
                    replay.update((i as u64 - 1) * n as u64 + w as u64, one).expect("pair index");
                    self.ws.add_both(&self.table, w, one);
                }
                VItem::Delim => {
                    ensure(i <= n, "replay-format", || "more than n sets".into())?;
                    self.ws.close(&self.table);
                    i += 1;
                }
            }
        }
        ensure(i == n + 1, "replay-format", || format!("{} sets, expected {n}", i - 1))?;
        ensure(replay.value() == self.input_fp.value(), "replay-fingerprint", || "replayed neighbourhoods differ from the input".into())?;
        let t = self.table.shape().t;
        let values = proof.next_poly("p", &poly_degrees(t))?;
        let raw = check_poly(&self.table, self.ws.accumulator(), values, &self.meter)?;
        ensure(raw >= 0 && raw % 6 == 0, "triangle-divisibility", || format!("sum {raw} is not six times a count"))?;
        Ok(Answer::Count(raw / 6))
    }
}

impl Scheme for TriSparse {
    fn name(&self) -> &'static str {
        "tri-sparse"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        require_undirected(self.name(), inst, &[Model::Vanilla])?;
        edgecount::check_shape(inst, self.tuning).map(|_| ())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let sh = shape(inst.n(), self.tuning);
        let n = inst.n();
        let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
        for tok in &inst.graph.tokens {
            let (u, v, _) = tok.kind.as_update();
            nbrs[u as usize - 1].push(v);
            nbrs[v as usize - 1].push(u);
        }
        let p = edgecount::prove_pairs(field, sh, &inst.graph.final_matrix(), nbrs.iter().map(|s| (s.as_slice(), s.as_slice())));
        let mut tr = ProofTranscript::new(field);
        tr.push_sets("N", nbrs);
        tr.push_poly("p", poly_degrees(sh.t).to_vec(), p);
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let sh = shape(header.n, self.tuning);
        let (r1, r2, rf) = (field.random(&mut rng), field.random(&mut rng), field.random(&mut rng));
        let table = EdgeTable::new(field, sh, r1, r2, false, meter);
        let ws = SetWorkspace::new(&table, meter);
        Box::new(SparseVerifier {
            field,
            n: header.n,
            table,
            ws,
            input_fp: Fingerprint::new(rf, (header.n * header.n) as u64),
            _fp: meter.reserve(2),
            meter: meter.clone(),
            fp_point: rf,
        })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        triangles_correct(inst, answer)
    }

    fn hcost_bound(&self, inst: &Instance) -> usize {
        let t = self.tuning.t;
        (2 * t - 1) * (2 * t - 1) + 2 * inst.graph.len() + inst.n()
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

    fn mutate(&self, inst: &Instance, field: &FieldConfig, honest: &ProofTranscript, policy: MutationPolicy, rng: &mut ProtocolRng) -> Option<ProofTranscript> {
        match policy {
            MutationPolicy::OutputLie => bump_first_poly(field, honest, 6),
            _ => generic_mutation(inst, field, honest, policy, rng),
        }
    }
}

/// `tri-adj`: neighbour lists arrive in ascending vertex order and serve
/// directly as the sets of an induced edge count against the edges seen so
/// far; each triangle is counted twice.
#[derive(Debug, Clone, Copy)]
pub struct TriAdj {
    pub tuning: Tuning,
}

struct AdjVerifier {
    field: FieldConfig,
    table: EdgeTable,
    ws: SetWorkspace,
    current: Option<u32>,
    _cur: Reservation,
    meter: SpaceMeter,
}

impl StreamVerifier for AdjVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let TokenKind::AdjListEntry { v, neighbor } = tok.kind else { return };
        if self.current != Some(v) {
            if self.current.is_some() {
                self.ws.close(&self.table);
            }
            self.current = Some(v);
        }
        let one = self.field.one();
        self.ws.add_both(&self.table, neighbor, one);
        // first sighting of {v, neighbor}; it cannot lie inside G[N(v)]
        if neighbor > v {
            self.table.update(v, neighbor, one);
        }
    }

    fn conclude(mut self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        if self.current.is_some() {
            self.ws.close(&self.table);
        }
        let t = self.table.shape().t;
        let values = proof.next_poly("p", &poly_degrees(t))?;
        let raw = check_poly(&self.table, self.ws.accumulator(), values, &self.meter)?;
        ensure(raw >= 0 && raw % 2 == 0, "edgecount-parity", || format!("odd doubled count {raw}"))?;
        let twice = raw / 2;
        ensure(twice % 2 == 0, "triangle-parity", || format!("odd raw count {twice}"))?;
        Ok(Answer::Count(twice / 2))
    }
}

/// Honest `p` for the adjacency-list scheme: sets `N(v)` against the
/// graph of edges seen before each list closes.
pub fn prove_adj(field: &FieldConfig, shape: ShapeConfig, tokens: &[StreamToken]) -> Vec<Fe> {
    let n = shape.n;
    let mut grid = EdgeGrid::new(*field, shape, &vec![0; n * n]);
    let mut p = grid.zero_poly();
    let mut i = 0;
    while i < tokens.len() {
        let TokenKind::AdjListEntry { v, .. } = tokens[i].kind else { unreachable!("checked model") };
        let mut set = Vec::new();
        while let Some(TokenKind::AdjListEntry { v: v2, neighbor }) = tokens.get(i).map(|t| t.kind) {
            if v2 != v {
                break;
            }
            set.push(neighbor);
            if neighbor > v {
                grid.add_edge(v, neighbor, field.one(), false);
            }
            i += 1;
        }
        let rows = grid.set_rows(&set);
        grid.accumulate(&mut p, &rows, &rows);
    }
    p
}

impl Scheme for TriAdj {
    fn name(&self) -> &'static str {
        "tri-adj"
    }

    fn tuning(&self) -> Tuning {
        self.tuning
    }

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
        require_undirected(self.name(), inst, &[Model::AdjList])?;
        edgecount::check_shape(inst, self.tuning)?;
        let n = inst.n();
        let mut rel = vec![false; n * n];
        let mut last = 0u32;
        for tok in &inst.graph.tokens {
            let TokenKind::AdjListEntry { v, neighbor } = tok.kind else { unreachable!() };
            if v < last {
                return Err(SchemeError::Precondition("adjacency lists must arrive in ascending vertex order".into()));
            }
            last = v;
            let cell = &mut rel[(v as usize - 1) * n + neighbor as usize - 1];
            if *cell {
                return Err(SchemeError::Precondition(format!("neighbour {neighbor} repeated in the list of {v}")));
            }
            *cell = true;
        }
        for u in 0..n {
            for v in 0..n {
                if rel[u * n + v] != rel[v * n + u] {
                    return Err(SchemeError::Precondition(format!("lists are not symmetric at {{{}, {}}}", u + 1, v + 1)));
                }
            }
        }
        Ok(())
    }

    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
        let sh = shape(inst.n(), self.tuning);
        let mut tr = ProofTranscript::new(field);
        tr.push_poly("p", poly_degrees(sh.t).to_vec(), prove_adj(field, sh, &inst.graph.tokens));
        tr
    }

    fn verifier(&self, header: &StreamHeader, field: FieldConfig, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
        let sh = shape(header.n, self.tuning);
        let (r1, r2) = (field.random(&mut rng), field.random(&mut rng));
        let table = EdgeTable::new(field, sh, r1, r2, false, meter);
        let ws = SetWorkspace::new(&table, meter);
        Box::new(AdjVerifier { field, table, ws, current: None, _cur: meter.reserve(1), meter: meter.clone() })
    }

    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
        triangles_correct(inst, answer)
    }

    fn hcost_bound(&self, _inst: &Instance) -> usize {
        let t = self.tuning.t;
        (2 * t - 1) * (2 * t - 1)
    }

    fn vcost_bound(&self, _inst: &Instance) -> usize {
        let s = self.tuning.s;
        s * s + 4 * s + SPACE_SLACK
    }

    fn policies(&self) -> Vec<MutationPolicy> {
        vec![MutationPolicy::Honest, MutationPolicy::CoeffFlip, MutationPolicy::Truncate, MutationPolicy::OutputLie]
    }

    fn mutate(&self, inst: &Instance, field: &FieldConfig, honest: &ProofTranscript, policy: MutationPolicy, rng: &mut ProtocolRng) -> Option<ProofTranscript> {
        match policy {
            MutationPolicy::OutputLie => bump_first_poly(field, honest, 4),
            _ => generic_mutation(inst, field, honest, policy, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run_honest;
    use crate::stream::parse_stream;

    fn count(scheme: &dyn Scheme, text: &str) -> Answer {
        let r = run_honest(scheme, &parse_stream(text).unwrap().into(), 5).unwrap();
        assert!(!r.outcome.budget_exceeded, "{} over budget", scheme.name());
        r.outcome.answer().cloned().unwrap_or_else(|| panic!("{} rejected: {:?}", scheme.name(), r.outcome.result))
    }

    const K3: &str = "n=3 model=turnstile\n1 2 +1\n2 3 +1\n1 3 +1\n";

    #[test]
    fn laconic_examples() {
        let s = TriLaconic { tuning: Tuning::new(1, 3) };
        assert_eq!(count(&s, K3), Answer::Count(1));
        assert_eq!(count(&s, "n=3 model=turnstile\n1 2 +2\n2 3 +1\n1 3 +1\n"), Answer::Count(2));
        let mut k4 = String::from("n=4 model=turnstile\n");
        for (u, v) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
            k4 += &format!("{u} {v} +1\n");
        }
        k4 += "1 2 -1\n";
        assert_eq!(count(&TriLaconic { tuning: Tuning::new(2, 2) }, &k4), Answer::Count(2));
    }

    #[test]
    fn frugal_examples() {
        for (t, s) in [(1, 3), (3, 1)] {
            assert_eq!(count(&TriFrugal { tuning: Tuning::new(t, s) }, K3), Answer::Count(1));
        }
    }

    #[test]
    fn sparse_and_adj() {
        assert_eq!(count(&TriSparse { tuning: Tuning::new(2, 2) }, "n=3 model=vanilla\n1 2\n2 3\n1 3\n"), Answer::Count(1));
        let k4 = "n=4 model=vanilla\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
        assert_eq!(count(&TriSparse { tuning: Tuning::new(2, 2) }, k4), Answer::Count(4));
        assert_eq!(count(&TriAdj { tuning: Tuning::new(2, 2) }, "n=3 model=adjlist\n1: 2 3\n2: 1 3\n3: 1 2\n"), Answer::Count(1));
        assert_eq!(count(&TriAdj { tuning: Tuning::new(2, 2) }, "n=4 model=adjlist\n1: 2 4\n2: 1 3\n3: 2 4\n4: 1 3\n"), Answer::Count(0));
    }

    #[test]
    fn empty_stream_counts_zero() {
        let e = "n=4 model=vanilla\n";
        assert_eq!(count(&TriLaconic { tuning: Tuning::new(2, 2) }, e), Answer::Count(0));
        assert_eq!(count(&TriFrugal { tuning: Tuning::new(2, 2) }, e), Answer::Count(0));
        assert_eq!(count(&TriSparse { tuning: Tuning::new(2, 2) }, e), Answer::Count(0));
    }
}
