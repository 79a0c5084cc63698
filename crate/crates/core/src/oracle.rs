//! Brute-force reference answers. Nothing here shares code with the
//! Provers; the dense graph is rebuilt from the raw tokens.

use thiserror::Error;

use crate::stream::{GraphInstance, Model, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the oracle size guard {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Final multiplicity or weight matrix, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGraph {
    pub n: usize,
    pub directed: bool,
    pub a: Vec<i64>,
}

impl DenseGraph {
    pub fn from_instance(g: &GraphInstance) -> Self {
        let n = g.n;
        let mut a = vec![0i64; n * n];
        for tok in &g.tokens {
            match tok.kind {
                TokenKind::TurnstileEdge { u, v, delta } => add(&mut a, n, u, v, delta, g.directed),
                TokenKind::VanillaEdge { u, v } => add(&mut a, n, u, v, 1, g.directed),
                TokenKind::WeightedEdge { u, v, w } => add(&mut a, n, u, v, w, g.directed),
                TokenKind::AdjListEntry { v, neighbor } => a[(v as usize - 1) * n + neighbor as usize - 1] = 1,
            }
        }
        if g.model == Model::AdjList && !g.directed {
            for i in 0..n {
                for j in 0..n {
                    let x = a[i * n + j].max(a[j * n + i]);
                    a[i * n + j] = x;
                }
            }
        }
        Self { n, directed: g.directed, a }
    }

    pub fn at(&self, u: usize, v: usize) -> i64 {
        self.a[u * self.n + v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.at(u, v) > 0
    }

    pub fn edge_count(&self) -> usize {
        let mut m = 0;
        for u in 0..self.n {
            for v in 0..self.n {
                if self.adjacent(u, v) && (self.directed || u < v) {
                    m += 1;
                }
            }
        }
        m
    }
}

fn add(a: &mut [i64], n: usize, u: u32, v: u32, d: i64, directed: bool) {
    let (u, v) = (u as usize - 1, v as usize - 1);
    a[u * n + v] += d;
    if !directed {
        a[v * n + u] += d;
    }
}

/// `sum_{u<v<w} A(u,v) A(v,w) A(u,w)` on final multiplicities.
pub fn oracle_triangles(g: &DenseGraph) -> i64 {
    let n = g.n;
    let mut t = 0;
    for u in 0..n {
        for v in u + 1..n {
            let uv = g.at(u, v);
            if uv == 0 {
                continue;
            }
            for w in v + 1..n {
                t += uv * g.at(v, w) * g.at(u, w);
            }
        }
    }
    t
}

pub const MATCHING_LIMIT: usize = 24;

/// Maximum matching size by memoized search over vertex subsets.
pub fn oracle_matching(g: &DenseGraph) -> Result<usize, OracleError> {
    if g.n > MATCHING_LIMIT {
        return Err(OracleError::TooLarge { n: g.n, limit: MATCHING_LIMIT });
    }
    let n = g.n;
    let nbr: Vec<u32> = (0..n).map(|u| (0..n).filter(|&v| v != u && (g.adjacent(u, v) || g.adjacent(v, u))).fold(0u32, |m, v| m | 1 << v)).collect();
    let mut memo = vec![u8::MAX; 1usize << n];
    fn go(mask: u32, nbr: &[u32], memo: &mut [u8]) -> u8 {
        if mask == 0 {
            return 0;
        }
        if memo[mask as usize] != u8::MAX {
            return memo[mask as usize];
        }
        let i = mask.trailing_zeros();
        let rest = mask & !(1 << i);
        let mut best = go(rest, nbr, memo);
        let mut cand = nbr[i as usize] & rest;
        while cand != 0 {
            let j = cand.trailing_zeros();
            cand &= cand - 1;
            best = best.max(1 + go(rest & !(1 << j), nbr, memo));
        }
        memo[mask as usize] = best;
        best
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok(go(full, &nbr, &mut memo) as usize)
}

/// Component sizes of the subgraph induced on `keep`, ignoring direction.
fn component_sizes(g: &DenseGraph, keep: &[bool]) -> Vec<usize> {
    let n = g.n;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    for u in 0..n {
        for v in 0..n {
            if keep[u] && keep[v] && (g.adjacent(u, v) || g.adjacent(v, u)) {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut size = vec![0usize; n];
    for v in 0..n {
        if keep[v] {
            let r = find(&mut parent, v);
            size[r] += 1;
        }
    }
    size.into_iter().filter(|&s| s > 0).collect()
}

pub fn oracle_components(g: &DenseGraph) -> usize {
    component_sizes(g, &vec![true; g.n]).len()
}

/// Number of odd components of `G - U`.
pub fn odd_components_without(g: &DenseGraph, removed: &[u32]) -> usize {
    let mut keep = vec![true; g.n];
    for &u in removed {
        keep[u as usize - 1] = false;
    }
    component_sizes(g, &keep).into_iter().filter(|s| s % 2 == 1).count()
}

pub const TUTTE_BERGE_LIMIT: usize = 16;

/// `min_U (|U| + n - odd(G - U)) / 2` by enumerating every `U`.
pub fn tutte_berge_bound(g: &DenseGraph) -> Result<usize, OracleError> {
    if g.n > TUTTE_BERGE_LIMIT {
        return Err(OracleError::TooLarge { n: g.n, limit: TUTTE_BERGE_LIMIT });
    }
    let n = g.n;
    let mut best = usize::MAX;
    for mask in 0u32..(1 << n) {
        let u: Vec<u32> = (0..n as u32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let val = u.len() + n - odd_components_without(g, &u);
        best = best.min(val);
    }
    Ok(best / 2)
}

pub fn oracle_is_independent(g: &DenseGraph, set: &[u32]) -> bool {
    set.iter().all(|&a| set.iter().all(|&b| a == b || !(g.adjacent(a as usize - 1, b as usize - 1))))
}

/// `U` is a maximal independent set.
pub fn oracle_mis_check(g: &DenseGraph, set: &[u32]) -> bool {
    let n = g.n;
    let mut inside = vec![false; n];
    for &v in set {
        if v == 0 || v as usize > n || inside[v as usize - 1] {
            return false;
        }
        inside[v as usize - 1] = true;
    }
    if !oracle_is_independent(g, set) {
        return false;
    }
    (0..n).all(|v| inside[v] || (0..n).any(|u| inside[u] && (g.adjacent(u, v) || g.adjacent(v, u))))
}

/// Whether `order` lists every vertex once with all edges pointing forward.
pub fn is_topological_order(g: &DenseGraph, order: &[u32]) -> bool {
    let n = g.n;
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v == 0 || v as usize > n || pos[v as usize - 1] != usize::MAX {
            return false;
        }
        pos[v as usize - 1] = i;
    }
    (0..n).all(|u| (0..n).all(|v| !g.adjacent(u, v) || pos[u] < pos[v]))
}

/// A topological order by repeatedly removing the smallest source.
pub fn oracle_toposort(g: &DenseGraph) -> Option<Vec<u32>> {
    let n = g.n;
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n).find(|&v| !removed[v] && (0..n).all(|u| removed[u] || !g.adjacent(u, v)))?;
        removed[next] = true;
        order.push(next as u32 + 1);
    }
    Some(order)
}

pub fn oracle_is_acyclic(g: &DenseGraph) -> bool {
    oracle_toposort(g).is_some()
}

/// Hop distances by relaxing every edge until nothing changes.
pub fn oracle_bfs(g: &DenseGraph, src: u32) -> Vec<Option<u64>> {
    let n = g.n;
    let mut d: Vec<Option<u64>> = vec![None; n];
    d[src as usize - 1] = Some(0);
    loop {
        let mut changed = false;
        for u in 0..n {
            let Some(du) = d[u] else { continue };
            for v in 0..n {
                if g.adjacent(u, v) && d[v].is_none_or(|dv| dv > du + 1) {
                    d[v] = Some(du + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Weighted distances (Floyd-Warshall) and, for each reached vertex other
/// than the source, the smallest predecessor on some shortest path.
pub fn oracle_dijkstra(g: &DenseGraph, src: u32) -> (Vec<Option<u64>>, Vec<Option<u32>>) {
    let n = g.n;
    let inf = u64::MAX / 4;
    let mut d = vec![inf; n * n];
    for u in 0..n {
        d[u * n + u] = 0;
        for v in 0..n {
            if u != v && g.adjacent(u, v) {
                d[u * n + v] = d[u * n + v].min(g.at(u, v) as u64);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    let s = src as usize - 1;
    let dist: Vec<Option<u64>> = (0..n).map(|v| (d[s * n + v] < inf).then_some(d[s * n + v])).collect();
    let prev = (0..n)
        .map(|v| {
            if v == s {
                return None;
            }
            let dv = dist[v]?;
            (0..n).find(|&u| g.adjacent(u, v) && dist[u].is_some_and(|du| du + g.at(u, v) as u64 == dv)).map(|u| u as u32 + 1)
        })
        .collect();
    (dist, prev)
}

/// Whether `(dist, prev)` is a valid shortest-path labelling.
pub fn oracle_sssp_labels_valid(g: &DenseGraph, src: u32, dist: &[Option<u64>], prev: &[Option<u32>]) -> bool {
    let (truth, _) = oracle_dijkstra(g, src);
    if dist != truth.as_slice() || prev.len() != g.n {
        return false;
    }
    (0..g.n).all(|v| match (dist[v], prev[v]) {
        (Some(0), None) => v + 1 == src as usize,
        (Some(dv), Some(p)) => {
            let u = p as usize - 1;
            p >= 1 && (p as usize) <= g.n && g.adjacent(u, v) && dist[u].is_some_and(|du| du + g.at(u, v) as u64 == dv)
        }
        (None, None) => true,
        _ => false,
    })
}

/// `sum_i |E(G[U_i])|`, counting edges by multiplicity.
pub fn oracle_induced_edges(g: &DenseGraph, sets: &[Vec<u32>]) -> i64 {
    sets.iter()
        .map(|set| {
            let mut c = 0;
            for (i, &a) in set.iter().enumerate() {
                for &b in &set[i + 1..] {
                    let (a, b) = (a as usize - 1, b as usize - 1);
                    c += if g.directed { g.at(a, b) + g.at(b, a) } else { g.at(a, b) };
                }
            }
            c
        })
        .sum()
}

/// `sum_i |E(U_i, W_i)|`; directed graphs count edges from `U_i` to `W_i`.
pub fn oracle_cross_edges(g: &DenseGraph, pairs: &[(Vec<u32>, Vec<u32>)]) -> i64 {
    pairs
        .iter()
        .map(|(u, w)| u.iter().map(|&a| w.iter().map(|&b| g.at(a as usize - 1, b as usize - 1)).sum::<i64>()).sum::<i64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::parse_stream;

    fn g(text: &str) -> DenseGraph {
        DenseGraph::from_instance(&parse_stream(text).unwrap())
    }

    #[test]
    fn triangles() {
        assert_eq!(oracle_triangles(&g("n=3 model=vanilla\n1 2\n2 3\n1 3\n")), 1);
        assert_eq!(oracle_triangles(&g("n=4 model=vanilla\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n")), 4);
        assert_eq!(oracle_triangles(&g("n=3 model=turnstile\n1 2 +2\n2 3 +1\n1 3 +1\n")), 2);
    }

    #[test]
    fn matching_and_tutte_berge() {
        let c5 = g("n=5 model=vanilla\n1 2\n2 3\n3 4\n4 5\n5 1\n");
        assert_eq!(oracle_matching(&c5).unwrap(), 2);
        assert_eq!(tutte_berge_bound(&c5).unwrap(), 2);
        let star = g("n=6 model=vanilla\n1 2\n1 3\n1 4\n1 5\n1 6\n");
        assert_eq!(oracle_matching(&star).unwrap(), 1);
        assert_eq!(odd_components_without(&star, &[1]), 5);
    }

    #[test]
    fn components_and_paths() {
        let p5 = g("n=5 model=vanilla\n1 2\n2 3\n3 4\n4 5\n");
        assert_eq!(oracle_components(&p5), 1);
        assert_eq!(oracle_bfs(&p5, 1), vec![Some(0), Some(1), Some(2), Some(3), Some(4)]);
        let two = g("n=6 model=vanilla\n1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n");
        assert_eq!(oracle_components(&two), 2);
    }

    #[test]
    fn weighted_paths() {
        let tri = g("n=3 model=weighted\n1 2 1\n2 3 1\n1 3 3\n");
        let (d, p) = oracle_dijkstra(&tri, 1);
        assert_eq!(d, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(p, vec![None, Some(1), Some(2)]);
        assert!(oracle_sssp_labels_valid(&tri, 1, &d, &p));
        assert!(!oracle_sssp_labels_valid(&tri, 1, &d, &[None, Some(1), Some(1)]));
    }

    #[test]
    fn orders_and_sets() {
        let dag = g("n=3 model=vanilla directed=1\n1 2\n2 3\n");
        assert!(is_topological_order(&dag, &[1, 2, 3]));
        assert!(!is_topological_order(&dag, &[2, 1, 3]));
        assert_eq!(oracle_toposort(&dag), Some(vec![1, 2, 3]));
        let cyc = g("n=3 model=vanilla directed=1\n1 2\n2 3\n3 1\n");
        assert!(!oracle_is_acyclic(&cyc));
        let c4 = g("n=4 model=vanilla\n1 2\n2 3\n3 4\n4 1\n");
        assert!(oracle_mis_check(&c4, &[1, 3]));
        assert!(!oracle_mis_check(&c4, &[1]));
        let k4 = g("n=4 model=vanilla\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
        assert_eq!(oracle_induced_edges(&k4, &[vec![1, 2, 3], vec![1, 2, 3]]), 6);
    }
}
