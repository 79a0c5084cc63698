use annostream::extension::{
    coeffs_eval, graded_lex_monomials, grid_eval, grid_len, unit_impulse, ImpulseTable, PointSketch, ShapeConfig,
};
use annostream::setops::Fingerprint;
use annostream::{Fe, FieldConfig};
use proptest::prelude::*;

const P_SMALL: u64 = 101;
const P_BIG: u64 = 1_000_000_007;

fn field(p: u64) -> FieldConfig {
    FieldConfig::new(p).unwrap()
}

fn dense_extension(f: &FieldConfig, dims: &[usize], values: &[Fe], point: &[Fe]) -> Fe {
    let mut total = f.zero();
    let mut coords = vec![1usize; dims.len()];
    for &a in values {
        let mut w = a;
        for ((&c, &s), &x) in coords.iter().zip(dims).zip(point) {
            w *= unit_impulse(c, x, s, f).unwrap();
        }
        total += w;
        for i in (0..dims.len()).rev() {
            if coords[i] < dims[i] {
                coords[i] += 1;
                break;
            }
            coords[i] = 1;
        }
    }
    total
}

proptest! {
    #[test]
    fn field_axioms(a in 0u64..P_BIG, b in 0u64..P_BIG, c in 0u64..P_BIG) {
        let f = field(P_BIG);
        let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, f.zero());
        prop_assert_eq!(a + (-a), f.zero());
        if !a.is_zero() {
            prop_assert_eq!(a * a.inv().unwrap(), f.one());
        }
    }

    #[test]
    fn from_i64_matches_residue(v in -1_000_000i64..1_000_000) {
        let f = field(P_SMALL);
        prop_assert_eq!(f.from_i64(v).value(), v.rem_euclid(P_SMALL as i64) as u64);
    }

    #[test]
    fn impulses_on_grid_are_indicators(s in 1usize..12, u in 1usize..12, x in 1usize..12) {
        prop_assume!(u <= s && x <= s);
        let f = field(P_BIG);
        let d = unit_impulse(u, f.elem(x as u64), s, &f).unwrap();
        prop_assert_eq!(d, if u == x { f.one() } else { f.zero() });
    }

    #[test]
    fn impulses_partition_unity(s in 1usize..16, x in 0u64..P_BIG) {
        let f = field(P_BIG);
        let x = f.elem(x);
        let table = ImpulseTable::new(f, s);
        let mut sum = f.zero();
        for u in 1..=s {
            let d = unit_impulse(u, x, s, &f).unwrap();
            prop_assert_eq!(table.eval(u, x), d);
            sum += d;
        }
        prop_assert_eq!(sum, f.one());
        prop_assert_eq!(table.eval_all(x).into_iter().fold(f.zero(), |a, b| a + b), f.one());
    }

    #[test]
    fn grid_eval_matches_dense_interpolation(
        degrees in prop::collection::vec(0usize..4, 1..4),
        seed in any::<u64>(),
        point in prop::collection::vec(0u64..P_BIG, 3),
    ) {
        use rand::{Rng, SeedableRng};
        let f = field(P_BIG);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Fe> = (0..grid_len(&degrees)).map(|_| f.elem(rng.random_range(0..P_BIG))).collect();
        let point: Vec<Fe> = point[..degrees.len()].iter().map(|&x| f.elem(x)).collect();
        let dims: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        prop_assert_eq!(grid_eval(f, &degrees, &values, &point).unwrap(), dense_extension(&f, &dims, &values, &point));
    }

    #[test]
    fn point_sketch_matches_dense_and_is_linear(
        updates in prop::collection::vec((1usize..5, 1usize..4, -5i64..6), 0..30),
        r in prop::collection::vec(0u64..P_BIG, 2),
    ) {
        let f = field(P_BIG);
        let dims = vec![4usize, 3];
        let point: Vec<Fe> = r.iter().map(|&x| f.elem(x)).collect();
        let mut sketch = PointSketch::new(&f, dims.clone(), point.clone()).unwrap();
        let mut first = PointSketch::new(&f, dims.clone(), point.clone()).unwrap();
        let mut second = PointSketch::new(&f, dims.clone(), point.clone()).unwrap();
        let mut dense = vec![f.zero(); 12];
        for (i, &(x, y, d)) in updates.iter().enumerate() {
            let delta = f.from_i64(d);
            sketch.update(&[x, y], delta).unwrap();
            if i % 2 == 0 { first.update(&[x, y], delta).unwrap(); } else { second.update(&[x, y], delta).unwrap(); }
            dense[(x - 1) * 3 + (y - 1)] += delta;
        }
        prop_assert_eq!(sketch.value(), dense_extension(&f, &dims, &dense, &point));
        prop_assert_eq!(sketch.value(), first.value() + second.value());
    }

    #[test]
    fn horner_matches_naive_monomials(
        degrees in prop::collection::vec(0usize..4, 1..4),
        seed in any::<u64>(),
        point in prop::collection::vec(0u64..P_BIG, 3),
    ) {
        use rand::{Rng, SeedableRng};
        let f = field(P_BIG);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Fe> = (0..grid_len(&degrees)).map(|_| f.elem(rng.random_range(0..P_BIG))).collect();
        let point: Vec<Fe> = point[..degrees.len()].iter().map(|&x| f.elem(x)).collect();
        let mut naive = f.zero();
        for (c, mono) in coeffs.iter().zip(graded_lex_monomials(&degrees)) {
            let mut term = *c;
            for (x, e) in point.iter().zip(mono) {
                term *= x.pow(e as u64);
            }
            naive += term;
        }
        prop_assert_eq!(coeffs_eval(f, &degrees, &coeffs, &point).unwrap(), naive);
    }

    #[test]
    fn shaping_round_trips(n in 1usize..200, s in 1usize..20) {
        let shape = ShapeConfig::with_s(n, s).unwrap();
        for v in 1..=n {
            let (x, y) = shape.shape(v).unwrap();
            prop_assert!(x >= 1 && x <= shape.t && y >= 1 && y <= shape.s);
            prop_assert_eq!(shape.unshape(x, y).unwrap(), v);
        }
        prop_assert!(shape.shape(n + 1).is_err());
    }

    #[test]
    fn fingerprints_ignore_order(
        items in prop::collection::vec((1u64..50, -3i64..4), 0..40),
        r in 1u64..P_BIG,
        perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let f = field(P_BIG);
        let mut a = Fingerprint::new(f.elem(r), 50);
        let mut b = Fingerprint::new(f.elem(r), 50);
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        for &(i, d) in &items {
            a.update(i, f.from_i64(d)).unwrap();
        }
        for &(i, d) in &shuffled {
            b.update(i, f.from_i64(d)).unwrap();
        }
        prop_assert_eq!(a.value(), b.value());
    }

    #[test]
    fn schwartz_zippel_at_small_prime(
        d in 1usize..6,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let f = field(P_SMALL);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Fe> = (0..=d).map(|_| f.elem(rng.random_range(0..P_SMALL))).collect();
        let mut b = a.clone();
        let i = rng.random_range(0..=d);
        b[i] += f.elem(rng.random_range(1..P_SMALL));
        let agree = (0..P_SMALL)
            .filter(|&x| {
                let x = f.elem(x);
                grid_eval(f, &[d], &a, &[x]).unwrap() == grid_eval(f, &[d], &b, &[x]).unwrap()
            })
            .count();
        prop_assert!(agree <= d, "distinct degree-{} polynomials agree at {} points", d, agree);
    }
}
