//! Prime-field arithmetic, modulus selection and seeded randomness.
//!
//! Elements are 64-bit residues carrying their modulus, so mixing elements
//! from two different fields is detectable. Moduli are kept below 2^62 so
//! that sums of two residues never overflow.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest modulus accepted by [`FieldConfig`].
pub const MAX_MODULUS: u64 = 1 << 62;

/// Floor applied by the automatic modulus rule.
pub const AUTO_FLOOR: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [3, 2^62)")]
    ModulusOutOfRange(u64),
    #[error("operands belong to different fields ({0} vs {1})")]
    ConfigMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no prime below 2^62 satisfies the requested bound {0}")]
    BoundTooLarge(u128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulusOrigin {
    AutoFromN,
    Explicit,
}

/// An immutable description of the prime field used by one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldConfig {
    p: u64,
    origin: ModulusOrigin,
}

impl FieldConfig {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(3..MAX_MODULUS).contains(&p) {
            return Err(FieldError::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p, origin: ModulusOrigin::Explicit })
    }

    /// Smallest prime exceeding `max(n^3, D*W*n^2, 2^20)`.
    ///
    /// `weighted` carries `(max_distance, max_weight)` for weighted shortest
    /// path schemes; the distance bound is usually the worst case `W*(n-1)`.
    pub fn auto(n: usize, weighted: Option<(u64, u64)>) -> Result<Self, FieldError> {
        let n = n.max(1) as u128;
        let mut bound = (n * n * n).max(AUTO_FLOOR as u128);
        if let Some((d, w)) = weighted {
            bound = bound.max((d.max(1) as u128) * (w.max(1) as u128) * n * n);
        }
        if bound >= MAX_MODULUS as u128 {
            return Err(FieldError::BoundTooLarge(bound));
        }
        let p = next_prime_above(bound as u64);
        if p >= MAX_MODULUS {
            return Err(FieldError::BoundTooLarge(bound));
        }
        Ok(Self { p, origin: ModulusOrigin::AutoFromN })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn origin(&self) -> ModulusOrigin {
        self.origin
    }

    /// `ceil(log2 p)`, the width of one serialized element.
    pub fn element_bits(&self) -> u64 {
        64 - (self.p - 1).leading_zeros() as u64
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe { v: 0, p: self.p }
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe { v: 1, p: self.p }
    }

    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe { v: v % self.p, p: self.p }
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        let r = (v as i128).rem_euclid(self.p as i128);
        Fe { v: r as u64, p: self.p }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe { v: rng.random_range(0..self.p), p: self.p }
    }

    /// Inner product with lazy 128-bit accumulation.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p as u128;
        let max_term = (p - 1) * (p - 1);
        let chunk = if max_term == 0 { usize::MAX } else { (u128::MAX / max_term).min(1 << 20) as usize };
        let chunk = chunk.max(1);
        let mut total: u128 = 0;
        for (ca, cb) in a.chunks(chunk).zip(b.chunks(chunk)) {
            let mut acc: u128 = 0;
            for (x, y) in ca.iter().zip(cb) {
                acc += x.v as u128 * y.v as u128;
            }
            total = (total + acc % p) % p;
        }
        Fe { v: total as u64, p: self.p }
    }
}

impl fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fe {
    v: u64,
    p: u64,
}

impl Fe {
    #[inline]
    pub fn value(self) -> u64 {
        self.v
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.v == 0
    }

    /// Zero of the same field.
    #[inline]
    pub fn zero_like(self) -> Fe {
        Fe { v: 0, p: self.p }
    }

    pub fn pow(self, mut e: u64) -> Fe {
        let mut base = self;
        let mut acc = Fe { v: 1 % self.p, p: self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Fe, FieldError> {
        if self.v == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, self.v as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fe { v: t0.rem_euclid(self.p as i128) as u64, p: self.p })
    }

    fn check(self, other: Fe) -> Result<(), FieldError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(FieldError::ConfigMismatch(self.p, other.p))
        }
    }

    pub fn checked_add(self, other: Fe) -> Result<Fe, FieldError> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(self, other: Fe) -> Result<Fe, FieldError> {
        self.check(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(self, other: Fe) -> Result<Fe, FieldError> {
        self.check(other)?;
        Ok(self * other)
    }

    pub fn checked_div(self, other: Fe) -> Result<Fe, FieldError> {
        self.check(other)?;
        Ok(self * other.inv()?)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fe {
    type Output = Fe;
    #[inline]
    fn add(self, o: Fe) -> Fe {
        debug_assert_eq!(self.p, o.p, "field mismatch");
        let s = self.v + o.v;
        Fe { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Sub for Fe {
    type Output = Fe;
    #[inline]
    fn sub(self, o: Fe) -> Fe {
        debug_assert_eq!(self.p, o.p, "field mismatch");
        let v = if self.v >= o.v { self.v - o.v } else { self.v + self.p - o.v };
        Fe { v, p: self.p }
    }
}

impl Mul for Fe {
    type Output = Fe;
    #[inline]
    fn mul(self, o: Fe) -> Fe {
        debug_assert_eq!(self.p, o.p, "field mismatch");
        let v = if self.p <= u32::MAX as u64 {
            (self.v * o.v) % self.p
        } else {
            ((self.v as u128 * o.v as u128) % self.p as u128) as u64
        };
        Fe { v, p: self.p }
    }
}

impl Neg for Fe {
    type Output = Fe;
    #[inline]
    fn neg(self) -> Fe {
        Fe { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
}

impl AddAssign for Fe {
    #[inline]
    fn add_assign(&mut self, o: Fe) {
        *self = *self + o;
    }
}

impl SubAssign for Fe {
    #[inline]
    fn sub_assign(&mut self, o: Fe) {
        *self = *self - o;
    }
}

impl MulAssign for Fe {
    #[inline]
    fn mul_assign(&mut self, o: Fe) {
        *self = *self * o;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `bound`.
pub fn next_prime_above(bound: u64) -> u64 {
    let mut c = bound + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Independent randomness sub-streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    Verifier = 1,
    Adversary = 2,
    Instance = 3,
}

pub type ProtocolRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: Substream) -> ProtocolRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldConfig {
        FieldConfig::new(7).unwrap()
    }

    #[test]
    fn small_field_identities() {
        let f = f7();
        assert_eq!((f.elem(3) + f.elem(5)).value(), 1);
        assert_eq!((f.elem(3) * f.elem(5)).value(), 1);
        assert_eq!((f.zero() * f.elem(4)).value(), 0);
        assert_eq!((f.elem(2) - f.elem(5)).value(), 4);
        assert_eq!(f.from_i64(-1).value(), 6);
    }

    #[test]
    fn inverses() {
        let f = f7();
        assert_eq!(f.elem(3).inv().unwrap().value(), 5);
        assert_eq!(f.elem(1).inv().unwrap().value(), 1);
        let g = FieldConfig::new(101).unwrap();
        assert_eq!(g.elem(2).inv().unwrap().value(), 51);
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn mismatch_is_reported() {
        let a = f7().elem(3);
        let b = FieldConfig::new(11).unwrap().elem(3);
        assert_eq!(a.checked_add(b), Err(FieldError::ConfigMismatch(7, 11)));
        assert_eq!(a.checked_mul(b), Err(FieldError::ConfigMismatch(7, 11)));
        assert!(a.checked_sub(f7().elem(1)).is_ok());
    }

    #[test]
    fn rejects_composite_and_out_of_range() {
        assert_eq!(FieldConfig::new(91), Err(FieldError::NotPrime(91)));
        assert!(matches!(FieldConfig::new(2), Err(FieldError::ModulusOutOfRange(2))));
        assert!(FieldConfig::new((1 << 61) - 1).is_ok());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0u64..5000 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), naive, "n={n}");
        }
        assert!(is_prime(2305843009213693951));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn auto_rule() {
        let f = FieldConfig::auto(16, None).unwrap();
        assert!(f.modulus() > AUTO_FLOOR);
        assert_eq!(f.modulus(), next_prime_above(AUTO_FLOOR));
        let g = FieldConfig::auto(200, None).unwrap();
        assert!(g.modulus() > 200u64.pow(3));
        let w = FieldConfig::auto(100, Some((400, 4))).unwrap();
        assert!(w.modulus() > 400 * 4 * 100 * 100);
        assert_eq!(w.origin(), ModulusOrigin::AutoFromN);
    }

    #[test]
    fn rng_is_replayable() {
        let f = FieldConfig::new(101).unwrap();
        let mut a = rng_for(9, Substream::Verifier);
        let mut b = rng_for(9, Substream::Verifier);
        let xs: Vec<_> = (0..2).map(|_| f.random(&mut a)).collect();
        let ys: Vec<_> = (0..2).map(|_| f.random(&mut b)).collect();
        assert_eq!(xs, ys);
        let mut c = rng_for(9, Substream::Adversary);
        let zs: Vec<_> = (0..8).map(|_| f.random(&mut c)).collect();
        let ws: Vec<_> = (0..8).map(|_| f.random(&mut a)).collect();
        assert_ne!(zs, ws);
    }

    #[test]
    fn distinct_seeds_distinct_first_draws() {
        let f = FieldConfig::auto(64, None).unwrap();
        let draws: std::collections::HashSet<u64> =
            (0..100).map(|s| f.random(&mut rng_for(s, Substream::Verifier)).value()).collect();
        // 100 draws from ~2^20 values: a collision or two is possible, more is not plausible.
        assert!(draws.len() >= 98);
    }

    #[test]
    fn uniformity_chi_square() {
        let f = FieldConfig::auto(64, None).unwrap();
        let mut rng = rng_for(1234, Substream::Verifier);
        let mut buckets = [0u64; 16];
        let draws = 100_000u64;
        for _ in 0..draws {
            let v = f.random(&mut rng).value();
            buckets[(v as u128 * 16 / f.modulus() as u128) as usize] += 1;
        }
        let expected = draws as f64 / 16.0;
        let chi: f64 = buckets.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square critical value, 15 degrees of freedom, alpha = 0.001
        assert!(chi < 37.697, "chi2 = {chi}");
    }

    #[test]
    fn dot_matches_naive() {
        let f = FieldConfig::new((1 << 61) - 1).unwrap();
        let mut rng = rng_for(5, Substream::Instance);
        let a: Vec<_> = (0..1000).map(|_| f.random(&mut rng)).collect();
        let b: Vec<_> = (0..1000).map(|_| f.random(&mut rng)).collect();
        let naive = a.iter().zip(&b).fold(f.zero(), |acc, (x, y)| acc + *x * *y);
        assert_eq!(f.dot(&a, &b), naive);
    }
}
