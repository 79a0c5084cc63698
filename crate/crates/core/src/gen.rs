//! Reproducible fixture generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::{rng_for, ProtocolRng, Substream};
use crate::protocol::Instance;
use crate::stream::{GraphInstance, Model, SetFamily, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Gnp,
    Path,
    Cycle,
    Clique,
    Dag,
    WeightedGnp,
    AdjList,
}

impl GenKind {
    pub const ALL: [GenKind; 7] =
        [GenKind::Gnp, GenKind::Path, GenKind::Cycle, GenKind::Clique, GenKind::Dag, GenKind::WeightedGnp, GenKind::AdjList];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Gnp => "gnp",
            GenKind::Path => "path",
            GenKind::Cycle => "cycle",
            GenKind::Clique => "clique",
            GenKind::Dag => "dag",
            GenKind::WeightedGnp => "weighted-gnp",
            GenKind::AdjList => "adjlist",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenOptions {
    /// Edge probability for the random kinds.
    pub p: f64,
    /// Weights are drawn from `1..=max_weight`.
    pub max_weight: u64,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self { p: 0.3, max_weight: 4 }
    }
}

fn gnp_pairs(n: usize, p: f64, rng: &mut ProtocolRng) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in 1..=n as u32 {
        for v in u + 1..=n as u32 {
            if rng.random_bool(p.clamp(0.0, 1.0)) {
                out.push((u, v));
            }
        }
    }
    out
}

fn vanilla(n: usize, directed: bool, pairs: &[(u32, u32)]) -> GraphInstance {
    let mut g = GraphInstance::new(n, Model::Vanilla, directed);
    for &(u, v) in pairs {
        g.push(TokenKind::VanillaEdge { u, v });
    }
    g
}

/// Builds the fixture of the given kind. Edge order is shuffled for the
/// random kinds; the deterministic kinds list edges in natural order.
pub fn generate(kind: GenKind, n: usize, seed: u64, opts: &GenOptions) -> GraphInstance {
    let mut rng = rng_for(seed, Substream::Instance);
    let n32 = n as u32;
    match kind {
        GenKind::Gnp => {
            let mut pairs = gnp_pairs(n, opts.p, &mut rng);
            pairs.shuffle(&mut rng);
            vanilla(n, false, &pairs)
        }
        GenKind::Path => vanilla(n, false, &(1..n32).map(|v| (v, v + 1)).collect::<Vec<_>>()),
        GenKind::Cycle => {
            let mut pairs: Vec<(u32, u32)> = (1..n32).map(|v| (v, v + 1)).collect();
            if n >= 3 {
                pairs.push((n32, 1));
            }
            vanilla(n, false, &pairs)
        }
        GenKind::Clique => {
            let pairs: Vec<(u32, u32)> = (1..=n32).flat_map(|u| (u + 1..=n32).map(move |v| (u, v))).collect();
            vanilla(n, false, &pairs)
        }
        GenKind::Dag => {
            let mut perm: Vec<u32> = (1..=n32).collect();
            perm.shuffle(&mut rng);
            let mut pairs: Vec<(u32, u32)> =
                gnp_pairs(n, opts.p, &mut rng).into_iter().map(|(i, j)| (perm[i as usize - 1], perm[j as usize - 1])).collect();
            pairs.shuffle(&mut rng);
            vanilla(n, true, &pairs)
        }
        GenKind::WeightedGnp => {
            let mut pairs = gnp_pairs(n, opts.p, &mut rng);
            pairs.shuffle(&mut rng);
            let wmax = opts.max_weight.max(1);
            let mut g = GraphInstance::new(n, Model::Weighted, false);
            g.weight_bound = Some(wmax);
            for (u, v) in pairs {
                let w = rng.random_range(1..=wmax) as i64;
                g.push(TokenKind::WeightedEdge { u, v, w });
            }
            g
        }
        GenKind::AdjList => {
            let pairs = gnp_pairs(n, opts.p, &mut rng);
            let mut lists = vec![Vec::new(); n];
            for (u, v) in pairs {
                lists[u as usize - 1].push(v);
                lists[v as usize - 1].push(u);
            }
            let mut g = GraphInstance::new(n, Model::AdjList, false);
            for (i, list) in lists.iter_mut().enumerate() {
                list.shuffle(&mut rng);
                for &w in list.iter() {
                    g.push(TokenKind::AdjListEntry { v: i as u32 + 1, neighbor: w });
                }
            }
            g
        }
    }
}

/// Re-expresses a vanilla or weighted instance as a turnstile stream that
/// also inserts and later deletes `noise` spurious unit edges.
pub fn with_turnstile_noise(g: &GraphInstance, noise: usize, seed: u64) -> GraphInstance {
    let mut rng = rng_for(seed ^ 0x7475_726e, Substream::Instance);
    let mut out = GraphInstance::new(g.n, Model::Turnstile, g.directed);
    out.weight_bound = g.weight_bound;
    out.source = g.source;
    out.target = g.target;
    let mut toks: Vec<(u32, u32, i64)> = g.tokens.iter().map(|t| t.kind.as_update()).collect();
    let n = g.n as u32;
    if n >= 2 {
        for _ in 0..noise {
            let u = rng.random_range(1..=n);
            let mut v = rng.random_range(1..n);
            if v >= u {
                v += 1;
            }
            let at = rng.random_range(0..=toks.len());
            toks.insert(at, (u, v, 1));
            let later = rng.random_range(at + 1..=toks.len());
            toks.insert(later, (u, v, -1));
        }
    }
    for (u, v, delta) in toks {
        out.push(TokenKind::TurnstileEdge { u, v, delta });
    }
    out
}

fn random_subset(n: usize, rng: &mut ProtocolRng) -> Vec<u32> {
    let mut s: Vec<u32> = (1..=n as u32).filter(|_| rng.random_bool(0.5)).collect();
    if s.is_empty() && n > 0 {
        s.push(rng.random_range(1..=n as u32));
    }
    s
}

/// `k` random vertex sets for the induced edge-count scheme.
pub fn random_induced_sets(n: usize, k: usize, seed: u64) -> SetFamily {
    let mut rng = rng_for(seed ^ 0x7365_7473, Substream::Instance);
    SetFamily::Induced((0..k).map(|_| random_subset(n, &mut rng)).collect())
}

/// `k` random pairs of disjoint vertex sets.
pub fn random_cross_sets(n: usize, k: usize, seed: u64) -> SetFamily {
    let mut rng = rng_for(seed ^ 0x6372_6f73, Substream::Instance);
    let pairs = (0..k)
        .map(|_| {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for v in 1..=n as u32 {
                match rng.random_range(0..3) {
                    0 => left.push(v),
                    1 => right.push(v),
                    _ => {}
                }
            }
            (left, right)
        })
        .collect();
    SetFamily::Cross(pairs)
}

/// A random instance satisfying the preconditions of the named scheme.
/// Odd seeds route the streaming-friendly schemes through turnstile noise.
pub fn instance_for_scheme(scheme: &str, n: usize, seed: u64) -> Option<Instance> {
    let mut rng = rng_for(seed ^ 0x5343_4845, Substream::Instance);
    let p = [0.15, 0.25, 0.35, 0.5][(seed % 4) as usize];
    let opts = GenOptions { p, max_weight: 4 };
    let noisy = seed % 2 == 1;
    let maybe_noise = |g: GraphInstance| if noisy { with_turnstile_noise(&g, n, seed) } else { g };
    let with_source = |mut g: GraphInstance, rng: &mut ProtocolRng| {
        g.source = Some(rng.random_range(1..=n as u32));
        g
    };
    let inst: Instance = match scheme {
        "tri-laconic" | "tri-frugal" => maybe_noise(generate(GenKind::Gnp, n, seed, &opts)).into(),
        "tri-sparse" | "maxmatch-frugal" | "maxmatch-laconic" | "mis" | "components" => {
            generate(GenKind::Gnp, n, seed, &opts).into()
        }
        "tri-adj" => generate(GenKind::AdjList, n, seed, &opts).into(),
        "edgecount-induced" => {
            let g = maybe_noise(generate(GenKind::Gnp, n, seed, &opts));
            Instance::with_sets(g, random_induced_sets(n, 3, seed))
        }
        "edgecount-cross" => {
            let g = maybe_noise(generate(GenKind::Gnp, n, seed, &opts));
            Instance::with_sets(g, random_cross_sets(n, 3, seed))
        }
        "toposort" => generate(GenKind::Dag, n, seed, &opts).into(),
        "acyclicity" => {
            if noisy {
                let mut g = GraphInstance::new(n, Model::Vanilla, true);
                for (u, v) in gnp_pairs(n, opts.p, &mut rng) {
                    let (a, b) = if rng.random_bool(0.5) { (u, v) } else { (v, u) };
                    g.push(TokenKind::VanillaEdge { u: a, v: b });
                }
                g.into()
            } else {
                generate(GenKind::Dag, n, seed, &opts).into()
            }
        }
        "sssp-unweighted" => with_source(maybe_noise(generate(GenKind::Gnp, n, seed, &opts)), &mut rng).into(),
        "stpath" => {
            let mut g = with_source(maybe_noise(generate(GenKind::Gnp, n, seed, &opts)), &mut rng);
            g.target = Some(rng.random_range(1..=n as u32));
            g.into()
        }
        "sssp-wturnstile" => with_source(maybe_noise(generate(GenKind::WeightedGnp, n, seed, &opts)), &mut rng).into(),
        "sssp-wvanilla" => with_source(generate(GenKind::WeightedGnp, n, seed, &opts), &mut rng).into(),
        _ => return None,
    };
    Some(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_is_acyclic, DenseGraph};
    use crate::stream::write_stream;

    #[test]
    fn clique_has_all_pairs() {
        let g = generate(GenKind::Clique, 5, 0, &GenOptions::default());
        assert_eq!(g.len(), 10);
    }

    #[test]
    fn reproducible() {
        let a = write_stream(&generate(GenKind::Gnp, 20, 9, &GenOptions::default()));
        let b = write_stream(&generate(GenKind::Gnp, 20, 9, &GenOptions::default()));
        assert_eq!(a, b);
    }

    #[test]
    fn dag_is_acyclic() {
        for seed in 0..10 {
            let g = generate(GenKind::Dag, 16, seed, &GenOptions { p: 0.5, max_weight: 1 });
            assert!(oracle_is_acyclic(&DenseGraph::from_instance(&g)));
        }
    }

    #[test]
    fn noise_cancels() {
        let g = generate(GenKind::Gnp, 12, 3, &GenOptions::default());
        let t = with_turnstile_noise(&g, 10, 3);
        assert_eq!(g.final_matrix(), t.final_matrix());
    }

    #[test]
    fn sampled_instances_meet_preconditions() {
        use crate::protocol::Tuning;
        use crate::registry::{build_scheme, SCHEME_NAMES};
        for name in SCHEME_NAMES {
            for seed in 0..8 {
                let inst = instance_for_scheme(name, 12, seed).unwrap();
                let scheme = build_scheme(name, Tuning::balanced(12)).unwrap();
                scheme.check_instance(&inst).unwrap_or_else(|e| panic!("{name} seed {seed}: {e}"));
            }
        }
    }
}
