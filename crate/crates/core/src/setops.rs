//! Fingerprints and the subset / intersection sub-schemes.
//!
//! A universe `[N]` is shaped as `[h] x [v]`. The Verifier keeps, for each
//! characteristic vector, the `v` values of its extension along the line
//! `{r} x [v]` for a secret `r`. The Prover sends the univariate
//! `g(X) = sum_b S~(X, b) * T'(X, b)` (degree `2(h - 1)`) where `T'` is `T~`
//! for intersections and `1 - T~` for subset tests; the Verifier checks
//! `g(r)` against its line and sums `g` over `[h]`.

use thiserror::Error;

use crate::extension::{unit_impulse, GridStream, ImpulseTable};
use crate::field::{Fe, FieldConfig};
use crate::protocol::{ensure, lift_signed, Rejection, SpaceMeter, TrackedVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetOpsError {
    #[error("index {index} outside [1, {dim}]")]
    IndexOverflow { index: u64, dim: u64 },
    #[error("shape {h}x{v} cannot hold a universe of {universe}")]
    ShapeTooSmall { universe: usize, h: usize, v: usize },
}

/// `phi(r) = sum_j a_j r^j` over indices `1..=dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    r: Fe,
    dim: u64,
    value: Fe,
}

impl Fingerprint {
    pub fn new(r: Fe, dim: u64) -> Self {
        Self { r, dim, value: r.zero_like() }
    }

    pub fn update(&mut self, index: u64, delta: Fe) -> Result<(), SetOpsError> {
        if index == 0 || index > self.dim {
            return Err(SetOpsError::IndexOverflow { index, dim: self.dim });
        }
        self.value += delta * self.r.pow(index);
        Ok(())
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn point(&self) -> Fe {
        self.r
    }
}

/// `sum_{i,d} B_d(i) beta1^i beta2^d`, indices `i` in `[1, n]`, `d` in `[0, dmax]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallFingerprint {
    beta1: Fe,
    beta2: Fe,
    n: u64,
    dmax: u64,
    value: Fe,
}

impl BallFingerprint {
    pub fn new(beta1: Fe, beta2: Fe, n: u64, dmax: u64) -> Self {
        Self { beta1, beta2, n, dmax, value: beta1.zero_like() }
    }

    pub fn update(&mut self, i: u64, d: u64, delta: Fe) -> Result<(), SetOpsError> {
        if i == 0 || i > self.n {
            return Err(SetOpsError::IndexOverflow { index: i, dim: self.n });
        }
        if d > self.dmax {
            return Err(SetOpsError::IndexOverflow { index: d, dim: self.dmax });
        }
        self.value += delta * self.beta1.pow(i) * self.beta2.pow(d);
        Ok(())
    }

    pub fn value(&self) -> Fe {
        self.value
    }
}

/// Index of edge `(u, v)` in the universe `[n^2]`. Undirected callers pass `u < v`.
pub fn edge_index(u: u32, v: u32, n: usize) -> usize {
    (u as usize - 1) * n + v as usize
}

/// `(u, v)` with `u < v` for an unordered pair.
pub fn ordered(u: u32, v: u32) -> (u32, u32) {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetShape {
    pub universe: usize,
    pub h: usize,
    pub v: usize,
}

impl SetShape {
    pub fn new(universe: usize, h: usize, v: usize) -> Result<Self, SetOpsError> {
        if h == 0 || v == 0 || h * v < universe {
            return Err(SetOpsError::ShapeTooSmall { universe, h, v });
        }
        Ok(Self { universe, h, v })
    }

    /// `h = ceil(universe / v)`.
    pub fn with_v(universe: usize, v: usize) -> Self {
        let v = v.max(1);
        Self { universe, h: universe.max(1).div_ceil(v), v }
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        ((index - 1) / self.v + 1, (index - 1) % self.v + 1)
    }

    /// Degree bound of the Prover's polynomial.
    pub fn degree(&self) -> usize {
        2 * (self.h - 1)
    }

    /// Elements in the Prover's message.
    pub fn hcost(&self) -> usize {
        2 * self.h - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineMode {
    Intersect,
    Subset,
}

/// Extension values of one vector along `{r} x [v]`.
#[derive(Debug)]
pub struct LineSketch {
    shape: SetShape,
    field: FieldConfig,
    r: Fe,
    cells: TrackedVec<Fe>,
}

impl LineSketch {
    pub fn new(field: FieldConfig, shape: SetShape, r: Fe, meter: &SpaceMeter) -> Self {
        Self { shape, field, r, cells: meter.vec(shape.v, field.zero()) }
    }

    pub fn shape(&self) -> SetShape {
        self.shape
    }

    pub fn point(&self) -> Fe {
        self.r
    }

    pub fn cells(&self) -> &[Fe] {
        &self.cells
    }

    pub fn update(&mut self, index: usize, delta: Fe) -> Result<(), SetOpsError> {
        if index == 0 || index > self.shape.universe {
            return Err(SetOpsError::IndexOverflow { index: index as u64, dim: self.shape.universe as u64 });
        }
        let (a, b) = self.shape.split(index);
        let w = unit_impulse(a, self.r, self.shape.h, &self.field).expect("split index is in range");
        self.cells[b - 1] += delta * w;
        Ok(())
    }

    /// `sum_b S(b) T'(b)` along the line.
    pub fn pair_value(s: &LineSketch, t: &LineSketch, mode: LineMode) -> Fe {
        let one = s.field.one();
        s.cells
            .iter()
            .zip(t.cells.iter())
            .fold(s.field.zero(), |acc, (&x, &y)| acc + x * if mode == LineMode::Subset { one - y } else { y })
    }
}

/// Honest Prover polynomial for a pair of multisets given as index lists.
pub fn prove_line(field: &FieldConfig, shape: SetShape, s_items: &[usize], t_items: &[usize], mode: LineMode) -> Vec<Fe> {
    let h = shape.h;
    let table = ImpulseTable::new(*field, h);
    let mut s_rows = vec![Vec::new(); shape.v];
    for &i in s_items {
        let (a, b) = shape.split(i);
        s_rows[b - 1].push(a);
    }
    let mut t_rows = vec![Vec::new(); shape.v];
    for &i in t_items {
        let (a, b) = shape.split(i);
        t_rows[b - 1].push(a);
    }
    let one = field.one();
    (1..=2 * h - 1)
        .map(|x| {
            let w = table.eval_all(field.elem(x as u64));
            let mut g = field.zero();
            for b in 0..shape.v {
                if s_rows[b].is_empty() {
                    continue;
                }
                let sv = s_rows[b].iter().fold(field.zero(), |acc, &a| acc + w[a - 1]);
                let tv = t_rows[b].iter().fold(field.zero(), |acc, &a| acc + w[a - 1]);
                g += sv * if mode == LineMode::Subset { one - tv } else { tv };
            }
            g
        })
        .collect()
}

/// Checks the Prover polynomial against the Verifier's two lines and returns
/// its sum over `[h]`.
pub fn check_line(s: &LineSketch, t: &LineSketch, mode: LineMode, values: &[Fe], meter: &SpaceMeter) -> Result<Fe, Rejection> {
    let shape = s.shape;
    ensure(values.len() == shape.hcost(), "setop-length", || format!("{} values, expected {}", values.len(), shape.hcost()))?;
    let mut gs = GridStream::new(s.field, &[shape.degree()], &[s.r], &[shape.h]);
    let _state = meter.reserve(gs.live_elements());
    for &v in values {
        gs.push(v);
    }
    let (at_r, sum) = gs.finish();
    let expected = LineSketch::pair_value(s, t, mode);
    ensure(at_r == expected, "setop-sumcheck", || "line polynomial disagrees with sketch".into())?;
    Ok(sum)
}

/// Subset test outcome: `Ok(true)` iff the verified sum is zero.
pub fn check_subset(s: &LineSketch, t: &LineSketch, values: &[Fe], meter: &SpaceMeter) -> Result<bool, Rejection> {
    Ok(check_line(s, t, LineMode::Subset, values, meter)?.is_zero())
}

/// Verified intersection size.
pub fn check_intersection(s: &LineSketch, t: &LineSketch, values: &[Fe], meter: &SpaceMeter) -> Result<i64, Rejection> {
    Ok(lift_signed(check_line(s, t, LineMode::Intersect, values, meter)?))
}

/// Result of a standalone set-operation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetOpRun<T> {
    pub answer: Result<T, Rejection>,
    pub hcost: usize,
    pub vcost: usize,
}

fn run_line<T>(
    field: FieldConfig,
    shape: SetShape,
    s_items: &[usize],
    t_items: &[usize],
    r: Fe,
    mode: LineMode,
    forge: Option<&dyn Fn(&mut Vec<Fe>)>,
    finish: impl Fn(Fe) -> T,
) -> SetOpRun<T> {
    let meter = SpaceMeter::new();
    let mut proof = prove_line(&field, shape, s_items, t_items, mode);
    if let Some(f) = forge {
        f(&mut proof);
    }
    let answer = (|| {
        let mut ts = LineSketch::new(field, shape, r, &meter);
        let mut ss = LineSketch::new(field, shape, r, &meter);
        for &i in t_items {
            ts.update(i, field.one()).map_err(|e| Rejection::new("setop-input", e.to_string()))?;
        }
        for &i in s_items {
            ss.update(i, field.one()).map_err(|e| Rejection::new("setop-input", e.to_string()))?;
        }
        check_line(&ss, &ts, mode, &proof, &meter).map(&finish)
    })();
    SetOpRun { answer, hcost: proof.len(), vcost: meter.peak() }
}

/// `[h, v]` subset scheme: the T-stream, then the S-stream, then the proof.
pub fn subset_scheme(
    field: FieldConfig,
    shape: SetShape,
    s_items: &[usize],
    t_items: &[usize],
    r: Fe,
    forge: Option<&dyn Fn(&mut Vec<Fe>)>,
) -> SetOpRun<bool> {
    run_line(field, shape, s_items, t_items, r, LineMode::Subset, forge, |x| x.is_zero())
}

/// `[h, v]` intersection-size scheme.
pub fn intersection_scheme(
    field: FieldConfig,
    shape: SetShape,
    s_items: &[usize],
    t_items: &[usize],
    r: Fe,
    forge: Option<&dyn Fn(&mut Vec<Fe>)>,
) -> SetOpRun<i64> {
    run_line(field, shape, s_items, t_items, r, LineMode::Intersect, forge, lift_signed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rng_for, Substream};

    #[test]
    fn fingerprint_basics() {
        let f = FieldConfig::new(1_000_003).unwrap();
        let r = f.elem(12345);
        let mut a = Fingerprint::new(r, 10);
        let mut b = Fingerprint::new(r, 10);
        assert!(a.value().is_zero());
        for i in [3, 1, 4, 1, 5] {
            a.update(i, f.one()).unwrap();
        }
        for i in [5, 4, 1, 3, 1] {
            b.update(i, f.one()).unwrap();
        }
        assert_eq!(a, b);
        assert!(a.update(11, f.one()).is_err());
        assert!(a.update(0, f.one()).is_err());
    }

    #[test]
    fn k3_subset() {
        let f = FieldConfig::new(1_000_003).unwrap();
        let n = 3;
        let shape = SetShape::with_v(n * n, 3);
        let e: Vec<usize> = [(1, 2), (2, 3), (1, 3)].iter().map(|&(u, v)| edge_index(u, v, n)).collect();
        let r = f.elem(777);
        assert_eq!(subset_scheme(f, shape, &[edge_index(1, 2, n)], &e, r, None).answer, Ok(true));
        assert_eq!(intersection_scheme(f, shape, &e, &e, r, None).answer, Ok(3));
        // a non-edge of K3 minus {2,3}
        let e2 = &e[..1];
        assert_eq!(subset_scheme(f, shape, &[edge_index(2, 3, n)], e2, r, None).answer, Ok(false));
    }

    #[test]
    fn random_line_point_matches_table() {
        let f = FieldConfig::new(1_000_003).unwrap();
        let mut rng = rng_for(3, Substream::Instance);
        let r = f.random(&mut rng);
        let shape = SetShape::new(20, 4, 5).unwrap();
        let meter = SpaceMeter::new();
        let mut sk = LineSketch::new(f, shape, r, &meter);
        sk.update(7, f.one()).unwrap();
        let (a, b) = shape.split(7);
        assert_eq!((a, b), (2, 2));
        assert_eq!(sk.cells()[1], ImpulseTable::new(f, 4).eval(2, r));
        assert!(sk.update(21, f.one()).is_err());
        assert_eq!(meter.peak(), 5);
    }
}
