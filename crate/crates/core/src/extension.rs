//! Low-degree extensions over integer grids.
//!
//! Every array here lives on a box `[s_1] x ... x [s_k]` with 1-based
//! coordinates. The extension of an array is the unique polynomial of degree
//! below `s_i` in each variable that agrees with it on the box; it is a sum
//! of unit impulses (Lagrange basis polynomials) weighted by the entries.
//!
//! Polynomials sent by a prover are serialized by their values on the grid
//! `[d_1 + 1] x ... x [d_k + 1]` (last coordinate fastest), where `d_i` are
//! the degree bounds. [`GridStream`] evaluates such a block at a point while
//! it streams past, using O(k) field elements.

use thiserror::Error;

use crate::field::{Fe, FieldConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("coordinate {coord} outside domain [1, {size}]")]
    OutOfDomain { coord: usize, size: usize },
    #[error("coordinate tuple has {got} entries, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("shape {t}x{s} cannot hold {n} vertices")]
    ShapeTooSmall { n: usize, t: usize, s: usize },
    #[error("block holds {got} values, degree bounds require {expected}")]
    BlockLength { got: usize, expected: usize },
}

/// Unit impulse `delta_u(x)` over the domain `[s]`, by the direct product formula.
pub fn unit_impulse(u: usize, x: Fe, s: usize, field: &FieldConfig) -> Result<Fe, ExtensionError> {
    if u == 0 || u > s {
        return Err(ExtensionError::OutOfDomain { coord: u, size: s });
    }
    let mut num = field.one();
    let mut den = field.one();
    let uf = field.elem(u as u64);
    for xp in 1..=s {
        if xp == u {
            continue;
        }
        let xpf = field.elem(xp as u64);
        num *= x - xpf;
        den *= uf - xpf;
    }
    Ok(num * den.inv().expect("distinct grid points"))
}

/// Unit impulses over a fixed domain `[s]` with precomputed inverse denominators.
#[derive(Debug, Clone)]
pub struct ImpulseTable {
    field: FieldConfig,
    size: usize,
    inv_den: Vec<Fe>,
}

impl ImpulseTable {
    pub fn new(field: FieldConfig, size: usize) -> Self {
        assert!(size >= 1);
        assert!((size as u64) < field.modulus(), "domain larger than the field");
        let inv_den = (1..=size)
            .map(|u| {
                let uf = field.elem(u as u64);
                let den = (1..=size).filter(|&x| x != u).fold(field.one(), |acc, x| acc * (uf - field.elem(x as u64)));
                den.inv().expect("distinct grid points")
            })
            .collect();
        Self { field, size, inv_den }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    /// `delta_u(x)` in O(size) multiplications.
    pub fn eval(&self, u: usize, x: Fe) -> Fe {
        debug_assert!(u >= 1 && u <= self.size);
        let mut num = self.inv_den[u - 1];
        for xp in 1..=self.size {
            if xp != u {
                num *= x - self.field.elem(xp as u64);
            }
        }
        num
    }

    /// All of `delta_1(x), ..., delta_size(x)` in O(size) time.
    pub fn eval_all(&self, x: Fe) -> Vec<Fe> {
        let f = self.field;
        let s = self.size;
        if let Some(hit) = grid_hit(x, s) {
            return (1..=s).map(|u| if u == hit { f.one() } else { f.zero() }).collect();
        }
        let diffs: Vec<Fe> = (1..=s).map(|xp| x - f.elem(xp as u64)).collect();
        let mut prefix = vec![f.one(); s + 1];
        for i in 0..s {
            prefix[i + 1] = prefix[i] * diffs[i];
        }
        let mut suffix = vec![f.one(); s + 1];
        for i in (0..s).rev() {
            suffix[i] = suffix[i + 1] * diffs[i];
        }
        (0..s).map(|i| prefix[i] * suffix[i + 1] * self.inv_den[i]).collect()
    }

    /// Table `out[u-1][g-1] = delta_u(g)` for integer points `g` in `[points]`.
    pub fn on_integers(&self, points: usize) -> Vec<Vec<Fe>> {
        let mut out = vec![Vec::with_capacity(points); self.size];
        for g in 1..=points {
            let col = self.eval_all(self.field.elem(g as u64));
            for (u, v) in col.into_iter().enumerate() {
                out[u].push(v);
            }
        }
        out
    }
}

fn grid_hit(x: Fe, size: usize) -> Option<usize> {
    let v = x.value();
    (v >= 1 && v <= size as u64).then_some(v as usize)
}

/// Walks `delta_1(r), delta_2(r), ..., delta_D(r)` over the domain `[D]`
/// holding O(1) field elements; each step costs one inversion.
#[derive(Debug, Clone)]
pub struct LagrangeWalker {
    field: FieldConfig,
    r: Fe,
    size: usize,
    first: Fe,
    hit: Option<usize>,
    idx: usize,
    cur: Fe,
}

impl LagrangeWalker {
    pub fn new(field: FieldConfig, r: Fe, size: usize) -> Self {
        assert!(size >= 1);
        let hit = grid_hit(r, size);
        let first = match hit {
            Some(h) => if h == 1 { field.one() } else { field.zero() },
            None => {
                // delta_1(r) = prod_{b=2..D} (r - b) / (1 - b)
                let mut num = field.one();
                let mut den = field.one();
                for b in 2..=size {
                    num *= r - field.elem(b as u64);
                    den *= field.one() - field.elem(b as u64);
                }
                num * den.inv().expect("nonzero")
            }
        };
        Self { field, r, size, first, hit, idx: 1, cur: first }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Index (1-based) of the current weight.
    pub fn index(&self) -> usize {
        self.idx
    }

    pub fn weight(&self) -> Fe {
        self.cur
    }

    pub fn reset(&mut self) {
        self.idx = 1;
        self.cur = self.first;
    }

    pub fn advance(&mut self) {
        let a = self.idx;
        self.idx += 1;
        if self.idx > self.size {
            return;
        }
        let f = self.field;
        self.cur = match self.hit {
            Some(h) => if h == self.idx { f.one() } else { f.zero() },
            None => {
                let af = f.elem(a as u64);
                let num = (self.r - af) * (-f.elem((self.size - a) as u64));
                let den = (self.r - af - f.one()) * af;
                self.cur * num * den.inv().expect("r is off-grid")
            }
        };
    }
}

/// Row-major vertex shaping `v -> (ceil(v/s), ((v-1) mod s) + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShapeConfig {
    pub n: usize,
    pub t: usize,
    pub s: usize,
}

impl ShapeConfig {
    pub fn new(n: usize, t: usize, s: usize) -> Result<Self, ExtensionError> {
        if t == 0 || s == 0 || t * s < n {
            return Err(ExtensionError::ShapeTooSmall { n, t, s });
        }
        Ok(Self { n, t, s })
    }

    /// `t = ceil(n / s)`.
    pub fn with_s(n: usize, s: usize) -> Result<Self, ExtensionError> {
        let s = s.max(1);
        Self::new(n, n.max(1).div_ceil(s), s)
    }

    pub fn shape(&self, v: usize) -> Result<(usize, usize), ExtensionError> {
        if v == 0 || v > self.n {
            return Err(ExtensionError::OutOfDomain { coord: v, size: self.n });
        }
        Ok(self.shape_unchecked(v))
    }

    #[inline]
    pub fn shape_unchecked(&self, v: usize) -> (usize, usize) {
        ((v - 1) / self.s + 1, (v - 1) % self.s + 1)
    }

    pub fn unshape(&self, x: usize, y: usize) -> Result<usize, ExtensionError> {
        if x == 0 || x > self.t {
            return Err(ExtensionError::OutOfDomain { coord: x, size: self.t });
        }
        if y == 0 || y > self.s {
            return Err(ExtensionError::OutOfDomain { coord: y, size: self.s });
        }
        let v = (x - 1) * self.s + y;
        if v > self.n {
            return Err(ExtensionError::OutOfDomain { coord: v, size: self.n });
        }
        Ok(v)
    }
}

/// Evaluation of one array's extension at a fixed point, maintained under
/// pointwise updates.
#[derive(Debug, Clone)]
pub struct PointSketch {
    dims: Vec<usize>,
    point: Vec<Fe>,
    value: Fe,
}

impl PointSketch {
    pub fn new(field: &FieldConfig, dims: Vec<usize>, point: Vec<Fe>) -> Result<Self, ExtensionError> {
        if dims.len() != point.len() {
            return Err(ExtensionError::Arity { got: point.len(), expected: dims.len() });
        }
        Ok(Self { dims, point, value: field.zero() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn point(&self) -> &[Fe] {
        &self.point
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn update(&mut self, coords: &[usize], delta: Fe) -> Result<(), ExtensionError> {
        if coords.len() != self.dims.len() {
            return Err(ExtensionError::Arity { got: coords.len(), expected: self.dims.len() });
        }
        let field = FieldConfig::new(delta.modulus()).expect("element carries a prime modulus");
        let mut w = delta;
        for ((&c, &s), &x) in coords.iter().zip(&self.dims).zip(&self.point) {
            w *= unit_impulse(c, x, s, &field)?;
        }
        self.value += w;
        Ok(())
    }
}

/// Number of values in a grid block with the given per-variable degree bounds.
pub fn grid_len(degrees: &[usize]) -> usize {
    degrees.iter().map(|d| d + 1).product()
}

/// Streaming evaluator for a grid-serialized polynomial block.
///
/// Feeds values in block order and tracks two quantities: the extension's
/// value at `point`, and the plain sum of the values whose coordinates all
/// fall inside `sum_box` (coordinates `1..=sum_box[i]`).
#[derive(Debug, Clone)]
pub struct GridStream {
    walkers: Vec<LagrangeWalker>,
    sum_box: Vec<usize>,
    partial: Vec<Fe>,
    box_sum: Fe,
    counters: Vec<usize>,
    remaining: usize,
}

impl GridStream {
    pub fn new(field: FieldConfig, degrees: &[usize], point: &[Fe], sum_box: &[usize]) -> Self {
        assert_eq!(degrees.len(), point.len());
        assert_eq!(degrees.len(), sum_box.len());
        let walkers = degrees.iter().zip(point).map(|(&d, &r)| LagrangeWalker::new(field, r, d + 1)).collect();
        Self {
            walkers,
            sum_box: sum_box.to_vec(),
            partial: vec![field.zero(); degrees.len()],
            box_sum: field.zero(),
            counters: vec![1; degrees.len()],
            remaining: grid_len(degrees),
        }
    }

    /// Field elements held by this evaluator (walker state plus partial sums).
    pub fn live_elements(&self) -> usize {
        2 * self.walkers.len() + self.partial.len() + 1
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn coords(&self) -> &[usize] {
        &self.counters
    }

    pub fn push(&mut self, value: Fe) {
        assert!(self.remaining > 0, "block already complete");
        let k = self.walkers.len();
        if self.counters.iter().zip(&self.sum_box).all(|(c, b)| c <= b) {
            self.box_sum += value;
        }
        self.partial[k - 1] += value * self.walkers[k - 1].weight();
        self.remaining -= 1;
        // odometer increment with carries folding partial sums outward
        let mut i = k - 1;
        loop {
            self.counters[i] += 1;
            self.walkers[i].advance();
            if self.counters[i] <= self.walkers[i].size() || i == 0 {
                break;
            }
            self.counters[i] = 1;
            self.walkers[i].reset();
            let inner = self.partial[i];
            self.partial[i] = inner.zero_like();
            self.partial[i - 1] += inner * self.walkers[i - 1].weight();
            i -= 1;
        }
    }

    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    /// `(value at point, box sum)`; call once all values are pushed.
    pub fn finish(&self) -> (Fe, Fe) {
        assert!(self.is_complete());
        (self.partial[0], self.box_sum)
    }
}

/// Evaluates a whole grid block at a point.
pub fn grid_eval(field: FieldConfig, degrees: &[usize], values: &[Fe], point: &[Fe]) -> Result<Fe, ExtensionError> {
    let expected = grid_len(degrees);
    if values.len() != expected {
        return Err(ExtensionError::BlockLength { got: values.len(), expected });
    }
    let mut gs = GridStream::new(field, degrees, point, &vec![0; degrees.len()]);
    for &v in values {
        gs.push(v);
    }
    Ok(gs.finish().0)
}

/// Monomial exponent tuples within per-variable degree bounds, in graded
/// lexicographic order: ascending total degree, ties broken by descending
/// lexicographic order of the exponent tuple.
pub fn graded_lex_monomials(degrees: &[usize]) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = vec![vec![]];
    for &d in degrees {
        all = all
            .into_iter()
            .flat_map(|m| (0..=d).map(move |e| {
                let mut m = m.clone();
                m.push(e);
                m
            }))
            .collect();
    }
    all.sort_by(|a, b| {
        let (da, db): (usize, usize) = (a.iter().sum(), b.iter().sum());
        da.cmp(&db).then_with(|| b.cmp(a))
    });
    all
}

/// Evaluates a monomial-coefficient block (graded lexicographic order) at a
/// point by regrouping into a dense tensor and running nested Horner.
pub fn coeffs_eval(field: FieldConfig, degrees: &[usize], coeffs: &[Fe], point: &[Fe]) -> Result<Fe, ExtensionError> {
    let expected = grid_len(degrees);
    if coeffs.len() != expected {
        return Err(ExtensionError::BlockLength { got: coeffs.len(), expected });
    }
    if point.len() != degrees.len() {
        return Err(ExtensionError::Arity { got: point.len(), expected: degrees.len() });
    }
    if degrees.is_empty() {
        return Ok(coeffs[0]);
    }
    let mut dense = vec![field.zero(); expected];
    for (m, &c) in graded_lex_monomials(degrees).iter().zip(coeffs) {
        let idx = m.iter().zip(degrees).fold(0, |acc, (&e, &d)| acc * (d + 1) + e);
        dense[idx] = c;
    }
    Ok(horner_tensor(&dense, degrees, point))
}

fn horner_tensor(dense: &[Fe], degrees: &[usize], point: &[Fe]) -> Fe {
    let width = degrees[0] + 1;
    let stride = dense.len() / width;
    let mut acc = dense[0].zero_like();
    for e in (0..width).rev() {
        let slice = &dense[e * stride..(e + 1) * stride];
        let inner = if degrees.len() == 1 { slice[0] } else { horner_tensor(slice, &degrees[1..], &point[1..]) };
        acc = acc * point[0] + inner;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> FieldConfig {
        FieldConfig::new(101).unwrap()
    }

    #[test]
    fn impulse_interpolates() {
        let f = f101();
        for s in 1..6 {
            for u in 1..=s {
                for x in 1..=s {
                    let v = unit_impulse(u, f.elem(x as u64), s, &f).unwrap();
                    assert_eq!(v.value(), (u == x) as u64);
                }
            }
        }
        assert!(unit_impulse(0, f.one(), 3, &f).is_err());
        assert!(unit_impulse(4, f.one(), 3, &f).is_err());
    }

    #[test]
    fn impulse_term_by_term() {
        // s=4, u=2, x=7 over F_101: (7-1)(7-3)(7-4) / ((2-1)(2-3)(2-4)) = 72 / 2 = 36
        let f = f101();
        let direct = unit_impulse(2, f.elem(7), 4, &f).unwrap();
        let by_hand = f.elem(6 * 4 * 3) * f.elem(2).inv().unwrap();
        assert_eq!(direct, by_hand);
        assert_eq!(direct.value(), 36);
        let table = ImpulseTable::new(f, 4);
        assert_eq!(table.eval(2, f.elem(7)), direct);
        assert_eq!(table.eval_all(f.elem(7))[1], direct);
    }

    #[test]
    fn walker_matches_table() {
        let f = FieldConfig::new(1_000_003).unwrap();
        for d in 1..9 {
            let table = ImpulseTable::new(f, d);
            for r in [0u64, 1, 3, 8, 9, 77, 999_999] {
                let r = f.elem(r);
                let mut w = LagrangeWalker::new(f, r, d);
                let all = table.eval_all(r);
                for (u, expected) in all.iter().enumerate() {
                    assert_eq!(w.weight(), *expected, "d={d} u={}", u + 1);
                    w.advance();
                }
            }
        }
    }

    #[test]
    fn shaping() {
        let c = ShapeConfig::new(6, 2, 3).unwrap();
        assert_eq!(c.shape(1).unwrap(), (1, 1));
        assert_eq!(c.shape(4).unwrap(), (2, 1));
        assert!(c.shape(7).is_err());
        assert!(c.shape(0).is_err());
        let c = ShapeConfig::new(97, 97, 1).unwrap();
        for v in 1..=97 {
            let (x, y) = c.shape(v).unwrap();
            assert_eq!(c.unshape(x, y).unwrap(), v);
        }
        assert!(ShapeConfig::new(10, 3, 3).is_err());
        assert_eq!(ShapeConfig::with_s(10, 3).unwrap().t, 4);
    }

    #[test]
    fn sketch_basics() {
        let f = f101();
        let mut sk = PointSketch::new(&f, vec![4, 5], vec![f.elem(2), f.elem(3)]).unwrap();
        assert!(sk.value().is_zero());
        sk.update(&[2, 3], f.one()).unwrap();
        assert_eq!(sk.value(), f.one());
        assert!(sk.update(&[5, 1], f.one()).is_err());
        assert!(sk.update(&[1], f.one()).is_err());
    }

    #[test]
    fn coeff_blocks() {
        let f = f101();
        assert_eq!(coeffs_eval(f, &[0], &[f.elem(42)], &[f.elem(9)]).unwrap().value(), 42);
        // X^2: graded order for degree bound 2 is [1, X, X^2]
        let x2 = [f.zero(), f.zero(), f.one()];
        assert_eq!(coeffs_eval(f, &[2], &x2, &[f.elem(3)]).unwrap().value(), 9);
        assert!(coeffs_eval(f, &[2], &x2[..2], &[f.elem(3)]).is_err());
        let order = graded_lex_monomials(&[1, 1]);
        assert_eq!(order, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn grid_block_box_sum() {
        // p(X) = X^2 on grid {1,2,3}: values 1,4,9; box [2] sums 5
        let f = f101();
        let vals = [f.elem(1), f.elem(4), f.elem(9)];
        let mut gs = GridStream::new(f, &[2], &[f.elem(10)], &[2]);
        for v in vals {
            gs.push(v);
        }
        let (at, sum) = gs.finish();
        assert_eq!(at.value(), 100);
        assert_eq!(sum.value(), 5);
    }
}
