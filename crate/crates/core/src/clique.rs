//! Maximum cliques in small graphs: bitset branch and bound with a greedy
//! colouring bound, optionally restricted to cliques satisfying a
//! hereditary predicate.

#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    words: usize,
    adj: Vec<Vec<u64>>,
}

fn set_bit(v: &mut [u64], i: usize) {
    v[i / 64] |= 1 << (i % 64);
}

fn clear_bit(v: &mut [u64], i: usize) {
    v[i / 64] &= !(1 << (i % 64));
}

fn is_empty(v: &[u64]) -> bool {
    v.iter().all(|&w| w == 0)
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph { n, words, adj: vec![vec![0; words]; n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if f(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        set_bit(&mut self.adj[a], b);
        set_bit(&mut self.adj[b], a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] >> (b % 64) & 1 == 1
    }
}

/// Result of a clique search: the best clique found and whether the search
/// was exhaustive.
#[derive(Debug, Clone)]
pub struct CliqueResult {
    pub clique: Vec<usize>,
    pub complete: bool,
    pub nodes: u64,
}

struct Search<'a, F: FnMut(&[usize]) -> bool> {
    g: &'a Graph,
    ok: F,
    best: Vec<usize>,
    cur: Vec<usize>,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
}

impl<F: FnMut(&[usize]) -> bool> Search<'_, F> {
    /// Greedy colouring of `p`: vertices in colour order with their colour.
    fn colour(&self, p: &[u64]) -> Vec<(usize, usize)> {
        let mut uncoloured = p.to_vec();
        let mut out = Vec::new();
        let mut k = 0;
        while !is_empty(&uncoloured) {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                clear_bit(&mut uncoloured, v);
                clear_bit(&mut q, v);
                for (qw, aw) in q.iter_mut().zip(&self.g.adj[v]) {
                    *qw &= !aw;
                }
                out.push((v, k));
            }
        }
        out
    }

    fn expand(&mut self, mut p: Vec<u64>) {
        let order = self.colour(&p);
        for &(v, c) in order.iter().rev() {
            if self.cur.len() + c <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.out_of_budget = true;
                return;
            }
            self.cur.push(v);
            if (self.ok)(&self.cur) {
                if self.cur.len() > self.best.len() {
                    self.best = self.cur.clone();
                }
                let np: Vec<u64> = p.iter().zip(&self.g.adj[v]).map(|(a, b)| a & b).collect();
                if !is_empty(&np) {
                    self.expand(np);
                }
            }
            self.cur.pop();
            if self.out_of_budget {
                return;
            }
            clear_bit(&mut p, v);
        }
    }
}

/// A largest clique all of whose prefixes (in search order) satisfy `ok`;
/// `ok` must be hereditary for the result to be exact.
pub fn max_clique_where(g: &Graph, budget: u64, ok: impl FnMut(&[usize]) -> bool) -> CliqueResult {
    let mut all = vec![0u64; g.words];
    for i in 0..g.n {
        set_bit(&mut all, i);
    }
    let mut s = Search { g, ok, best: Vec::new(), cur: Vec::new(), nodes: 0, budget, out_of_budget: false };
    if g.n > 0 {
        s.expand(all);
    }
    let mut clique = s.best;
    clique.sort_unstable();
    CliqueResult { clique, complete: !s.out_of_budget, nodes: s.nodes }
}

pub fn max_clique(g: &Graph, budget: u64) -> CliqueResult {
    max_clique_where(g, budget, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(g: &Graph) -> usize {
        let mut best = 0;
        for mask in 0u32..1 << g.n {
            let v: Vec<usize> = (0..g.n).filter(|&i| mask >> i & 1 == 1).collect();
            if v.iter().enumerate().all(|(a, &x)| v[a + 1..].iter().all(|&y| g.has_edge(x, y))) {
                best = best.max(v.len());
            }
        }
        best
    }

    #[test]
    fn petersen_and_complete() {
        let k5 = Graph::from_fn(5, |_, _| true);
        assert_eq!(max_clique(&k5, 1000).clique, vec![0, 1, 2, 3, 4]);
        // Petersen graph: outer 5-cycle, inner pentagram, spokes
        let pet = Graph::from_fn(10, |a, b| {
            let (a, b) = (a.min(b), a.max(b));
            (b < 5 && (b - a == 1 || b - a == 4)) || (a >= 5 && ((b - a) == 2 || (b - a) == 3)) || b == a + 5
        });
        assert_eq!(max_clique(&pet, 1000).clique.len(), 2);
        assert!(max_clique(&Graph::new(0), 10).clique.is_empty());
    }

    proptest! {
        #[test]
        fn matches_subset_search(n in 1usize..12, seed in any::<u64>()) {
            let g = Graph::from_fn(n, |a, b| (seed.rotate_left((a * 13 + b * 7) as u32) ^ (a * b) as u64) & 3 != 0);
            let r = max_clique(&g, u64::MAX);
            prop_assert!(r.complete);
            prop_assert_eq!(r.clique.len(), brute(&g));
            for (a, &x) in r.clique.iter().enumerate() {
                for &y in &r.clique[a + 1..] {
                    prop_assert!(g.has_edge(x, y));
                }
            }
        }
    }
}
