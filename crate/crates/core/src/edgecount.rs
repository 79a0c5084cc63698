//! Induced and cross edge counting.
//!
//! Vertices are shaped as `(x, y)` in `[t] x [s]`. The Verifier keeps the
//! `s x s` table `a~(r1, w, r2, z)`; while a vertex set streams past it builds
//! `b~(r1, .)` and `b~(r2, .)` in a reusable workspace and, at the delimiter,
//! adds `sum b~(r1, y1) b~(r2, y2) a~(r1, y1, r2, y2)` to an accumulator that
//! ends equal to `p(r1, r2)`. The Prover sends `p` on the grid `[2t - 1]^2`.

use crate::extension::{unit_impulse, GridStream, ImpulseTable, ShapeConfig};
use crate::field::{Fe, FieldConfig, ProtocolRng};
use crate::oracle::{oracle_cross_edges, oracle_induced_edges, DenseGraph};
use crate::protocol::{
    ensure, lift_signed, Answer, Instance, MutationPolicy, ProofReader, Rejection, Reservation, Scheme, SchemeError, SpaceMeter,
    StreamVerifier, TrackedVec, Tuning,
};
use crate::stream::{Model, ProofTranscript, SetFamily, StreamHeader, StreamToken};

/// Constant slack allowed on top of the leading space terms.
pub const SPACE_SLACK: usize = 32;

/// `a~(r1, w, r2, z)` for all `w, z` in `[s]`.
#[derive(Debug)]
pub struct EdgeTable {
    field: FieldConfig,
    shape: ShapeConfig,
    r1: Fe,
    r2: Fe,
    directed: bool,
    cells: TrackedVec<Fe>,
    _points: Reservation,
}

impl EdgeTable {
    pub fn new(field: FieldConfig, shape: ShapeConfig, r1: Fe, r2: Fe, directed: bool, meter: &SpaceMeter) -> Self {
        Self {
            field,
            shape,
            r1,
            r2,
            directed,
            cells: meter.vec(shape.s * shape.s, field.zero()),
            _points: meter.reserve(2),
        }
    }

    pub fn shape(&self) -> ShapeConfig {
        self.shape
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn points(&self) -> (Fe, Fe) {
        (self.r1, self.r2)
    }

    fn impulse(&self, x: usize, r: Fe) -> Fe {
        unit_impulse(x, r, self.shape.t, &self.field).expect("shaped coordinate")
    }

    /// Adds `delta` to `A(u, v)` (and `A(v, u)` when undirected).
    pub fn update(&mut self, u: u32, v: u32, delta: Fe) {
        let s = self.shape.s;
        let (xu, yu) = self.shape.shape_unchecked(u as usize);
        let (xv, yv) = self.shape.shape_unchecked(v as usize);
        let w = delta * self.impulse(xu, self.r1) * self.impulse(xv, self.r2);
        self.cells[(yu - 1) * s + yv - 1] += w;
        if !self.directed {
            let w = delta * self.impulse(xv, self.r1) * self.impulse(xu, self.r2);
            self.cells[(yv - 1) * s + yu - 1] += w;
        }
    }

    /// `sum_{y1, y2} left[y1] right[y2] a~(r1, y1, r2, y2)`.
    pub fn contract(&self, left: &[Fe], right: &[Fe]) -> Fe {
        let s = self.shape.s;
        let mut acc = self.field.zero();
        for (y1, &l) in left.iter().enumerate() {
            if !l.is_zero() {
                acc += l * self.field.dot(&self.cells[y1 * s..(y1 + 1) * s], right);
            }
        }
        acc
    }
}

/// Reusable per-set workspace: `b~(r1, .)` on the left and `b~(r2, .)` on the right.
#[derive(Debug)]
pub struct SetWorkspace {
    left: TrackedVec<Fe>,
    right: TrackedVec<Fe>,
    acc: Fe,
    _acc: Reservation,
}

impl SetWorkspace {
    pub fn new(table: &EdgeTable, meter: &SpaceMeter) -> Self {
        let z = table.field.zero();
        Self { left: meter.vec(table.shape.s, z), right: meter.vec(table.shape.s, z), acc: z, _acc: meter.reserve(1) }
    }

    pub fn left(&self) -> &[Fe] {
        &self.left
    }

    pub fn right(&self) -> &[Fe] {
        &self.right
    }

    pub fn accumulator(&self) -> Fe {
        self.acc
    }

    /// Adds `sign * delta_v` to the left array.
    pub fn add_left(&mut self, table: &EdgeTable, v: u32, sign: Fe) {
        let (x, y) = table.shape.shape_unchecked(v as usize);
        self.left[y - 1] += sign * table.impulse(x, table.r1);
    }

    pub fn add_right(&mut self, table: &EdgeTable, v: u32, sign: Fe) {
        let (x, y) = table.shape.shape_unchecked(v as usize);
        self.right[y - 1] += sign * table.impulse(x, table.r2);
    }

    /// Vertex of an induced-count set (both arrays).
    pub fn add_both(&mut self, table: &EdgeTable, v: u32, sign: Fe) {
        self.add_left(table, v, sign);
        self.add_right(table, v, sign);
    }

    /// Delimiter: fold the current set into the accumulator and clear.
    pub fn close(&mut self, table: &EdgeTable) {
        self.fold(table);
        let z = table.field.zero();
        self.left.fill(z);
        self.right.fill(z);
    }

    /// Folds the current set without clearing the workspace.
    pub fn fold(&mut self, table: &EdgeTable) {
        self.acc += table.contract(&self.left, &self.right);
    }

    pub fn clear_right(&mut self, table: &EdgeTable) {
        self.right.fill(table.field.zero());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EdgeCountError {
    #[error("vertex {0} already in the set")]
    Duplicate(u32),
}

/// A growing set `U_{i+1} = U_i + {v}` sketched without resets, with an
/// exact membership check for test-scale use.
#[derive(Debug)]
pub struct IncrementalSet {
    ws: SetWorkspace,
    members: Vec<bool>,
}

impl IncrementalSet {
    pub fn new(table: &EdgeTable, meter: &SpaceMeter) -> Self {
        Self { ws: SetWorkspace::new(table, meter), members: vec![false; table.shape.n + 1] }
    }

    pub fn workspace(&self) -> &SetWorkspace {
        &self.ws
    }
}

/// Extends the sketched set by one vertex.
pub fn incremental_set_extend(set: &mut IncrementalSet, table: &EdgeTable, v: u32) -> Result<(), EdgeCountError> {
    if std::mem::replace(&mut set.members[v as usize], true) {
        return Err(EdgeCountError::Duplicate(v));
    }
    set.ws.add_both(table, v, table.field.one());
    Ok(())
}

/// Degree bounds of the Prover polynomial.
pub fn poly_degrees(t: usize) -> [usize; 2] {
    [2 * (t - 1), 2 * (t - 1)]
}

/// Checks `p^` against the accumulator and returns the lifted sum over `[t]^2`.
pub fn check_poly(table: &EdgeTable, acc: Fe, values: &[Fe], meter: &SpaceMeter) -> Result<i64, Rejection> {
    let t = table.shape.t;
    let mut gs = GridStream::new(table.field, &poly_degrees(t), &[table.r1, table.r2], &[t, t]);
    let _state = meter.reserve(gs.live_elements());
    for &v in values {
        gs.push(v);
    }
    let (at, sum) = gs.finish();
    ensure(at == acc, "edgecount-sumcheck", || "p^(r1, r2) differs from the accumulator".into())?;
    Ok(lift_signed(sum))
}

/// `a~(g1, y1, g2, y2)` for all grid points `g1, g2` in `[2t - 1]`, built
/// separably from the final matrix.
#[derive(Debug, Clone)]
pub struct EdgeGrid {
    t: usize,
    s: usize,
    /// `delta_x(g)` for `x` in `[t]`, `g` in `[2t - 1]`.
    imp: Vec<Vec<Fe>>,
    cells: Vec<Fe>,
    field: FieldConfig,
    shape: ShapeConfig,
}

impl EdgeGrid {
    /// `matrix` is row-major `n x n` with `matrix[u][v] = A(u, v)`.
    pub fn new(field: FieldConfig, shape: ShapeConfig, matrix: &[i64]) -> Self {
        let (n, t, s) = (shape.n, shape.t, shape.s);
        let g = 2 * t - 1;
        let imp = ImpulseTable::new(field, t).on_integers(g);
        // half[g1][y1][v] = sum_{x1} A((x1, y1), v) delta_{x1}(g1)
        let mut half = vec![field.zero(); g * s * n];
        for u in 1..=n {
            let (x1, y1) = shape.shape_unchecked(u);
            for v in 1..=n {
                let a = matrix[(u - 1) * n + v - 1];
                if a == 0 {
                    continue;
                }
                let a = field.from_i64(a);
                for g1 in 0..g {
                    half[(g1 * s + y1 - 1) * n + v - 1] += a * imp[x1 - 1][g1];
                }
            }
        }
        let mut cells = vec![field.zero(); g * g * s * s];
        for g1 in 0..g {
            for y1 in 0..s {
                for v in 1..=n {
                    let h = half[(g1 * s + y1) * n + v - 1];
                    if h.is_zero() {
                        continue;
                    }
                    let (x2, y2) = shape.shape_unchecked(v);
                    for g2 in 0..g {
                        cells[((g1 * g + g2) * s + y1) * s + y2 - 1] += h * imp[x2 - 1][g2];
                    }
                }
            }
        }
        Self { t, s, imp, cells, field, shape }
    }

    /// Adds `delta` to `A(u, v)` (and `A(v, u)` when undirected).
    pub fn add_edge(&mut self, u: u32, v: u32, delta: Fe, directed: bool) {
        let g = 2 * self.t - 1;
        let s = self.s;
        let mut one_way = |a: u32, b: u32| {
            let (x1, y1) = self.shape.shape_unchecked(a as usize);
            let (x2, y2) = self.shape.shape_unchecked(b as usize);
            for g1 in 0..g {
                let w = delta * self.imp[x1 - 1][g1];
                if w.is_zero() {
                    continue;
                }
                for g2 in 0..g {
                    self.cells[((g1 * g + g2) * s + y1 - 1) * s + y2 - 1] += w * self.imp[x2 - 1][g2];
                }
            }
        };
        one_way(u, v);
        if !directed {
            one_way(v, u);
        }
    }

    /// `b~(g, y)` for every grid point: row-major `(2t - 1) x s`.
    pub fn set_rows(&self, set: &[u32]) -> Vec<Fe> {
        let g = 2 * self.t - 1;
        let mut rows = vec![self.field.zero(); g * self.s];
        for &v in set {
            let (x, y) = self.shape.shape_unchecked(v as usize);
            for gi in 0..g {
                rows[gi * self.s + y - 1] += self.imp[x - 1][gi];
            }
        }
        rows
    }

    /// Adds one set's (or pair's) contribution to the grid values of `p`.
    pub fn accumulate(&self, p: &mut [Fe], left: &[Fe], right: &[Fe]) {
        let g = 2 * self.t - 1;
        let s = self.s;
        for g1 in 0..g {
            let l = &left[g1 * s..(g1 + 1) * s];
            if l.iter().all(|x| x.is_zero()) {
                continue;
            }
            for g2 in 0..g {
                let r = &right[g2 * s..(g2 + 1) * s];
                let block = &self.cells[(g1 * g + g2) * s * s..(g1 * g + g2 + 1) * s * s];
                let mut acc = self.field.zero();
                for (y1, &lv) in l.iter().enumerate() {
                    if !lv.is_zero() {
                        acc += lv * self.field.dot(&block[y1 * s..(y1 + 1) * s], r);
                    }
                }
                p[g1 * g + g2] += acc;
            }
        }
    }

    pub fn zero_poly(&self) -> Vec<Fe> {
        vec![self.field.zero(); (2 * self.t - 1) * (2 * self.t - 1)]
    }
}

/// Honest `p` for a family of `(left, right)` pairs.
pub fn prove_pairs<'a>(
    field: &FieldConfig,
    shape: ShapeConfig,
    matrix: &[i64],
    pairs: impl IntoIterator<Item = (&'a [u32], &'a [u32])>,
) -> Vec<Fe> {
    let grid = EdgeGrid::new(*field, shape, matrix);
    let mut p = grid.zero_poly();
    for (l, r) in pairs {
        let lr = grid.set_rows(l);
        if std::ptr::eq(l, r) {
            grid.accumulate(&mut p, &lr, &lr);
        } else {
            grid.accumulate(&mut p, &lr, &grid.set_rows(r));
        }
    }
    p
}

fn check_edge_model(name: &'static str, inst: &Instance) -> Result<(), SchemeError> {
    match inst.graph.model {
        Model::Turnstile | Model::Vanilla => Ok(()),
        m => Err(SchemeError::Model { scheme: name, expected: "turnstile or vanilla", got: m.name() }),
    }
}

pub(crate) fn check_shape(inst: &Instance, tuning: Tuning) -> Result<ShapeConfig, SchemeError> {
    Ok(ShapeConfig::new(inst.n(), tuning.t, tuning.s)?)
}

pub(crate) fn token_delta(field: &FieldConfig, tok: &StreamToken) -> (u32, u32, Fe) {
    let (u, v, d) = tok.kind.as_update();
    (u, v, field.from_i64(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Induced,
    Cross,
}

/// `edgecount-induced`: `sum_i |E(G[U_i])|`.
#[derive(Debug, Clone, Copy)]
pub struct InducedEdgeCount {
    pub tuning: Tuning,
}

/// `edgecount-cross`: `sum_i |E(U_i, W_i)|`.
#[derive(Debug, Clone, Copy)]
pub struct CrossEdgeCount {
    pub tuning: Tuning,
}

struct EdgeCountVerifier {
    variant: Variant,
    field: FieldConfig,
    table: EdgeTable,
    ws: SetWorkspace,
    meter: SpaceMeter,
}

fn new_verifier(variant: Variant, header: &StreamHeader, field: FieldConfig, tuning: Tuning, mut rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
    let shape = ShapeConfig::new(header.n, tuning.t, tuning.s).expect("checked shape");
    let r1 = field.random(&mut rng);
    let r2 = field.random(&mut rng);
    let table = EdgeTable::new(field, shape, r1, r2, header.directed, meter);
    let ws = SetWorkspace::new(&table, meter);
    Box::new(EdgeCountVerifier { variant, field, table, ws, meter: meter.clone() })
}

impl StreamVerifier for EdgeCountVerifier {
    fn observe(&mut self, tok: &StreamToken) {
        let (u, v, d) = token_delta(&self.field, tok);
        self.table.update(u, v, d);
    }

    fn observe_sets(&mut self, sets: &SetFamily) {
        let one = self.field.one();
        match sets {
            SetFamily::Induced(family) => {
                for set in family {
                    for &v in set {
                        self.ws.add_both(&self.table, v, one);
                    }
                    self.ws.close(&self.table);
                }
            }
            SetFamily::Cross(pairs) => {
                for (l, r) in pairs {
                    for &v in l {
                        self.ws.add_left(&self.table, v, one);
                    }
                    for &v in r {
                        self.ws.add_right(&self.table, v, one);
                    }
                    self.ws.close(&self.table);
                }
            }
        }
    }

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection> {
        let t = self.table.shape().t;
        let values = proof.next_poly("p", &poly_degrees(t))?;
        let raw = check_poly(&self.table, self.ws.accumulator(), values, &self.meter)?;
        ensure(raw >= 0, "edgecount-range", || format!("negative count {raw}"))?;
        if self.variant == Variant::Induced && !self.table.directed {
            ensure(raw % 2 == 0, "edgecount-parity", || format!("odd doubled count {raw}"))?;
            Ok(Answer::Count(raw / 2))
        } else {
            Ok(Answer::Count(raw))
        }
    }
}

fn family_pairs(sets: &SetFamily) -> Vec<(&[u32], &[u32])> {
    match sets {
        SetFamily::Induced(f) => f.iter().map(|s| (s.as_slice(), s.as_slice())).collect(),
        SetFamily::Cross(p) => p.iter().map(|(a, b)| (a.as_slice(), b.as_slice())).collect(),
    }
}

macro_rules! edgecount_scheme {
    ($ty:ident, $name:literal, $variant:expr) => {
        impl Scheme for $ty {
            fn name(&self) -> &'static str {
                $name
            }

            fn tuning(&self) -> Tuning {
                self.tuning
            }

            fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError> {
                check_edge_model($name, inst)?;
                check_shape(inst, self.tuning)?;
                match (&inst.sets, $variant) {
                    (Some(SetFamily::Induced(_)), Variant::Induced) => Ok(()),
                    (Some(SetFamily::Cross(pairs)), Variant::Cross) => {
                        for (i, (a, b)) in pairs.iter().enumerate() {
                            if a.iter().any(|v| b.contains(v)) {
                                return Err(SchemeError::Precondition(format!("pair {} is not disjoint", i + 1)));
                            }
                        }
                        Ok(())
                    }
                    _ => Err(SchemeError::Precondition(concat!($name, " needs a matching set family").into())),
                }
            }

            fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript {
                let shape = check_shape(inst, self.tuning).expect("checked shape");
                let sets = inst.sets.as_ref().expect("checked family");
                let p = prove_pairs(field, shape, &inst.graph.final_matrix(), family_pairs(sets));
                let mut tr = ProofTranscript::new(field);
                tr.push_poly("p", poly_degrees(shape.t).to_vec(), p);
                tr
            }

            fn verifier(&self, header: &StreamHeader, field: FieldConfig, rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier> {
                new_verifier($variant, header, field, self.tuning, rng, meter)
            }

            fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool {
                let g = DenseGraph::from_instance(&inst.graph);
                let truth = match inst.sets.as_ref() {
                    Some(SetFamily::Induced(f)) => oracle_induced_edges(&g, f),
                    Some(SetFamily::Cross(p)) => oracle_cross_edges(&g, p),
                    None => return false,
                };
                *answer == Answer::Count(truth)
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

            fn mutate(
                &self,
                inst: &Instance,
                field: &FieldConfig,
                honest: &ProofTranscript,
                policy: MutationPolicy,
                rng: &mut ProtocolRng,
            ) -> Option<ProofTranscript> {
                if policy == MutationPolicy::OutputLie {
                    // shift the claimed count by one edge
                    let mut t = honest.clone();
                    let bump = if $variant == Variant::Induced { field.elem(2) } else { field.one() };
                    if let Some(crate::stream::Block::Poly { values, .. }) = t.blocks.first_mut() {
                        values[0] += bump;
                    }
                    return Some(t);
                }
                crate::protocol::generic_mutation(inst, field, honest, policy, rng)
            }
        }
    };
}

edgecount_scheme!(InducedEdgeCount, "edgecount-induced", Variant::Induced);
edgecount_scheme!(CrossEdgeCount, "edgecount-cross", Variant::Cross);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::run_honest;
    use crate::stream::parse_stream;

    fn inst(text: &str, sets: SetFamily) -> Instance {
        Instance::with_sets(parse_stream(text).unwrap(), sets)
    }

    #[test]
    fn path_and_clique() {
        let i = inst("n=3 model=vanilla\n1 2\n2 3\n", SetFamily::Induced(vec![vec![1, 2]]));
        let s = InducedEdgeCount { tuning: Tuning::new(3, 1) };
        assert_eq!(run_honest(&s, &i, 1).unwrap().outcome.answer(), Some(&Answer::Count(1)));
        let k4 = "n=4 model=vanilla\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
        let i = inst(k4, SetFamily::Induced(vec![vec![1, 2, 3], vec![3, 2, 1]]));
        for (t, s) in [(1, 4), (2, 2), (4, 1)] {
            let sc = InducedEdgeCount { tuning: Tuning::new(t, s) };
            let r = run_honest(&sc, &i, 9).unwrap();
            assert_eq!(r.outcome.answer(), Some(&Answer::Count(6)));
            assert!(!r.outcome.budget_exceeded);
        }
    }

    #[test]
    fn cross_counts() {
        let i = inst("n=2 model=vanilla\n1 2\n", SetFamily::Cross(vec![(vec![1], vec![2])]));
        let s = CrossEdgeCount { tuning: Tuning::new(1, 2) };
        assert_eq!(run_honest(&s, &i, 1).unwrap().outcome.answer(), Some(&Answer::Count(1)));
        let mut text = String::from("n=6 model=vanilla\n");
        for a in 1..=3 {
            for b in 4..=6 {
                text += &format!("{a} {b}\n");
            }
        }
        let i = inst(&text, SetFamily::Cross(vec![(vec![1, 2, 3], vec![4, 5, 6])]));
        let s = CrossEdgeCount { tuning: Tuning::new(2, 3) };
        assert_eq!(run_honest(&s, &i, 1).unwrap().outcome.answer(), Some(&Answer::Count(9)));
    }

    #[test]
    fn incremental_matches_fresh() {
        let f = FieldConfig::new(1_000_003).unwrap();
        let shape = ShapeConfig::new(6, 2, 3).unwrap();
        let meter = SpaceMeter::new();
        let table = EdgeTable::new(f, shape, f.elem(17), f.elem(99), false, &meter);
        let mut inc = IncrementalSet::new(&table, &meter);
        let mut fresh = SetWorkspace::new(&table, &meter);
        for v in 1..=6 {
            incremental_set_extend(&mut inc, &table, v).unwrap();
            fresh.add_both(&table, v, f.one());
            assert_eq!(inc.workspace().left(), fresh.left());
            assert_eq!(inc.workspace().right(), fresh.right());
        }
        assert_eq!(incremental_set_extend(&mut inc, &table, 3), Err(EdgeCountError::Duplicate(3)));
    }
}
