//! Edmonds' blossom algorithm and the Gallai-Edmonds split used by the
//! honest matching Prover.

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &self.adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        NONE
    }
}

/// Maximum matching of an undirected graph on `0..n`; returns the mate of
/// every vertex.
pub fn max_matching(n: usize, edges: &[(usize, usize)]) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for root in 0..n {
        if b.mate[root] != NONE {
            continue;
        }
        let mut v = b.find_path(root);
        while v != NONE {
            let pv = b.parent[v];
            let ppv = b.mate[pv];
            b.mate[v] = pv;
            b.mate[pv] = v;
            v = ppv;
        }
    }
    b.mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

pub fn matching_size(mate: &[Option<usize>]) -> usize {
    mate.iter().filter(|m| m.is_some()).count() / 2
}

/// Gallai-Edmonds set `A = N(D) \ D`, where `D` holds the vertices missed by
/// some maximum matching. Removing `A` attains the Tutte-Berge bound.
pub fn tutte_set(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let best = matching_size(&max_matching(n, edges));
    let in_d: Vec<bool> = (0..n)
        .map(|v| {
            let rest: Vec<_> = edges.iter().copied().filter(|&(a, b)| a != v && b != v).collect();
            matching_size(&max_matching(n, &rest)) == best
        })
        .collect();
    let mut in_a = vec![false; n];
    for &(u, v) in edges {
        if in_d[u] && !in_d[v] {
            in_a[v] = true;
        }
        if in_d[v] && !in_d[u] {
            in_a[u] = true;
        }
    }
    (0..n).filter(|&v| in_a[v]).collect()
}
