//! Fano graphs of line sets (simple edges for product 1, triple edges for
//! the duality pairs) with canonical labelling, isomorphism and automorphism
//! groups by individualization-refinement.

use crate::lines::LineSet;
use crate::perm::{self, Perm, StabChain};

/// Edge colours: 0 none, 1 simple, 3 triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoGraph {
    pub n: usize,
    colour: Vec<u8>,
}

pub fn fano_graph(set: &LineSet) -> FanoGraph {
    let u = &set.universe;
    let m = &set.members;
    FanoGraph::from_fn(m.len(), |i, j| match u.product(m[i], m[j]) {
        1 => 1,
        -1 => 3,
        _ => 0,
    })
}

impl FanoGraph {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut colour = vec![0u8; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let c = f(i, j);
                colour[i * n + j] = c;
                colour[j * n + i] = c;
            }
        }
        FanoGraph { n, colour }
    }

    pub fn colour(&self, i: usize, j: usize) -> u8 {
        self.colour[i * self.n + j]
    }

    pub fn simple_edges(&self) -> usize {
        self.colour.iter().filter(|&&c| c == 1).count() / 2
    }

    /// The triple edges, if they form a perfect matching.
    pub fn triple_matching(&self) -> Option<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let partners: Vec<usize> = (0..self.n).filter(|&j| self.colour(i, j) == 3).collect();
            if partners.len() != 1 {
                return None;
            }
            if i < partners[0] {
                out.push((i, partners[0]));
            }
        }
        Some(out)
    }

    /// The graph with vertex `i` renamed `p[i]`.
    pub fn relabel(&self, p: &[usize]) -> FanoGraph {
        let mut inv = vec![0; self.n];
        for (i, &x) in p.iter().enumerate() {
            inv[x] = i;
        }
        FanoGraph::from_fn(self.n, |a, b| self.colour(inv[a], inv[b]))
    }
}

/// Ordered partition of the vertices.
type Partition = Vec<Vec<usize>>;

/// Refines to an equitable partition; returns the trace of the splits.
fn refine(g: &FanoGraph, p: &mut Partition) -> Vec<u64> {
    let mut trace = Vec::new();
    loop {
        let mut changed = false;
        let mut x = 0;
        while x < p.len() {
            let splitter = p[x].clone();
            let mut next: Partition = Vec::with_capacity(p.len());
            for cell in p.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(u64, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let (mut s, mut t) = (0u64, 0u64);
                        for &w in &splitter {
                            match g.colour(v, w) {
                                1 => s += 1,
                                3 => t += 1,
                                _ => {}
                            }
                        }
                        (s << 32 | t, v)
                    })
                    .collect();
                keyed.sort_unstable();
                if keyed[0].0 == keyed[keyed.len() - 1].0 {
                    next.push(cell.clone());
                    continue;
                }
                changed = true;
                let mut start = 0;
                for k in 1..=keyed.len() {
                    if k == keyed.len() || keyed[k].0 != keyed[start].0 {
                        trace.push((next.len() as u64) << 48 ^ keyed[start].0 << 8 ^ (k - start) as u64);
                        next.push(keyed[start..k].iter().map(|e| e.1).collect());
                        start = k;
                    }
                }
            }
            *p = next;
            x += 1;
        }
        if !changed {
            break;
        }
    }
    trace.push(u64::MAX - p.len() as u64);
    trace
}

fn target_cell(p: &Partition) -> Option<usize> {
    (0..p.len()).filter(|&i| p[i].len() > 1).min_by_key(|&i| (p[i].len(), i))
}

fn individualize(g: &FanoGraph, p: &Partition, cell: usize, v: usize) -> (Partition, Vec<u64>) {
    let mut q: Partition = Vec::with_capacity(p.len() + 1);
    for (i, c) in p.iter().enumerate() {
        if i == cell {
            q.push(vec![v]);
            q.push(c.iter().copied().filter(|&x| x != v).collect());
        } else {
            q.push(c.clone());
        }
    }
    let t = refine(g, &mut q);
    (q, t)
}

/// `lab[position] = vertex` for a discrete partition.
fn labelling(p: &Partition) -> Vec<usize> {
    p.iter().map(|c| c[0]).collect()
}

fn certificate(g: &FanoGraph, lab: &[usize]) -> Vec<u8> {
    let n = g.n;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(g.colour(lab[i], lab[j]));
        }
    }
    out
}

/// `σ` with `σ(lab_a[i]) = lab_b[i]`.
fn map_between(lab_a: &[usize], lab_b: &[usize]) -> Perm {
    let mut p = vec![0u32; lab_a.len()];
    for i in 0..lab_a.len() {
        p[lab_a[i]] = lab_b[i] as u32;
    }
    p
}

#[derive(Debug, Clone)]
pub struct AutGroup {
    pub generators: Vec<Perm>,
    pub order: u128,
    chain: StabChain,
}

impl AutGroup {
    pub fn chain(&self) -> &StabChain {
        &self.chain
    }
}

/// A leaf below `p` whose trace and certificate match the target, if any.
fn find_equivalent_leaf(g: &FanoGraph, p: &Partition, depth: usize, traces: &[Vec<u64>], cert: &[u8]) -> Option<Vec<usize>> {
    let Some(cell) = target_cell(p) else {
        let lab = labelling(p);
        return (certificate(g, &lab) == cert).then_some(lab);
    };
    if depth >= traces.len() {
        return None;
    }
    for &v in &p[cell] {
        let (q, t) = individualize(g, p, cell, v);
        if t != traces[depth] {
            continue;
        }
        if let Some(l) = find_equivalent_leaf(g, &q, depth + 1, traces, cert) {
            return Some(l);
        }
    }
    None
}

/// The automorphism group: along the first path of the search tree, every
/// vertex of each target cell is tested for a subtree holding a leaf
/// equivalent to the first leaf, so the orbits of the point stabilizers are
/// complete.
pub fn automorphisms(g: &FanoGraph) -> AutGroup {
    let n = g.n;
    let mut p: Partition = vec![(0..n).collect()];
    if n == 0 {
        return AutGroup { generators: Vec::new(), order: 1, chain: StabChain::new(0, &[]) };
    }
    refine(g, &mut p);
    // first path
    let mut path: Vec<(Partition, usize, usize)> = Vec::new();
    let mut traces: Vec<Vec<u64>> = Vec::new();
    let mut cur = p.clone();
    while let Some(cell) = target_cell(&cur) {
        let v = cur[cell][0];
        let (q, t) = individualize(g, &cur, cell, v);
        path.push((cur.clone(), cell, v));
        traces.push(t);
        cur = q;
    }
    let first = labelling(&cur);
    let cert = certificate(g, &first);
    let mut gens: Vec<Perm> = Vec::new();
    // deepest level first, so that each level sees the stabilizer generators
    for depth in (0..path.len()).rev() {
        let (part, cell, v) = &path[depth];
        let prefix: Vec<u32> = path[..depth].iter().map(|e| e.2 as u32).collect();
        let fixing: Vec<Perm> = gens.iter().filter(|s| prefix.iter().all(|&x| s[x as usize] == x)).cloned().collect();
        let mut orbit: Vec<bool> = vec![false; n];
        for o in perm::orbits(n, &fixing) {
            if o.contains(&(*v as u32)) {
                for x in o {
                    orbit[x as usize] = true;
                }
            }
        }
        for &w in &part[*cell] {
            if orbit[w] {
                continue;
            }
            let (q, t) = individualize(g, part, *cell, w);
            if t != traces[depth] {
                continue;
            }
            if let Some(lab) = find_equivalent_leaf(g, &q, depth + 1, &traces, &cert) {
                let s = map_between(&first, &lab);
                gens.push(s);
                let fixing: Vec<Perm> =
                    gens.iter().filter(|s| prefix.iter().all(|&x| s[x as usize] == x)).cloned().collect();
                orbit = vec![false; n];
                for o in perm::orbits(n, &fixing) {
                    if o.contains(&(*v as u32)) {
                        for x in o {
                            orbit[x as usize] = true;
                        }
                    }
                }
            }
        }
    }
    let base: Vec<u32> = path.iter().map(|e| e.2 as u32).collect();
    let chain = StabChain::with_base(n, &gens, &base);
    AutGroup { order: chain.order(), generators: gens, chain }
}

pub fn aut_order(g: &FanoGraph) -> u128 {
    automorphisms(g).order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `labelling[position] = vertex`.
    pub labelling: Vec<usize>,
    pub certificate: Vec<u8>,
}

struct Canon<'a> {
    g: &'a FanoGraph,
    aut: &'a AutGroup,
    best: Option<(Vec<Vec<u64>>, Vec<u8>, Vec<usize>)>,
}

impl Canon<'_> {
    fn search(&mut self, p: &Partition, prefix: &mut Vec<u32>, traces: &mut Vec<Vec<u64>>) {
        if let Some((bt, _, _)) = &self.best {
            let k = traces.len().min(bt.len());
            match traces[..k].cmp(&bt[..k]) {
                std::cmp::Ordering::Greater => return,
                std::cmp::Ordering::Less => self.best = None,
                std::cmp::Ordering::Equal => {}
            }
        }
        let Some(cell) = target_cell(p) else {
            let lab = labelling(p);
            let cert = certificate(self.g, &lab);
            let better = match &self.best {
                None => true,
                Some((bt, bc, _)) => (traces.as_slice(), &cert) < (bt.as_slice(), bc),
            };
            if better {
                self.best = Some((traces.clone(), cert, lab));
            }
            return;
        };
        // children up to the pointwise stabilizer of the prefix
        let chain = StabChain::with_base(self.g.n, &self.aut.generators, prefix);
        let fixing = chain.level_generators(prefix.len());
        let orbits = perm::orbits(self.g.n, &fixing);
        let mut orbit_of = vec![0usize; self.g.n];
        for (k, o) in orbits.iter().enumerate() {
            for &x in o {
                orbit_of[x as usize] = k;
            }
        }
        let mut done: Vec<bool> = vec![false; orbits.len()];
        let mut cell_vs = p[cell].clone();
        cell_vs.sort_unstable();
        for v in cell_vs {
            if done[orbit_of[v]] {
                continue;
            }
            done[orbit_of[v]] = true;
            let (q, t) = individualize(self.g, p, cell, v);
            prefix.push(v as u32);
            traces.push(t);
            self.search(&q, prefix, traces);
            traces.pop();
            prefix.pop();
        }
    }
}

/// Canonical labelling: the least leaf by (trace, certificate), pruned by
/// automorphisms fixing the individualized prefix.
pub fn canonical_form(g: &FanoGraph) -> CanonicalForm {
    let aut = automorphisms(g);
    canonical_form_with(g, &aut)
}

pub fn canonical_form_with(g: &FanoGraph, aut: &AutGroup) -> CanonicalForm {
    let mut p: Partition = vec![(0..g.n).collect()];
    if g.n == 0 {
        return CanonicalForm { labelling: Vec::new(), certificate: Vec::new() };
    }
    let t0 = refine(g, &mut p);
    let mut c = Canon { g, aut, best: None };
    c.search(&p, &mut Vec::new(), &mut vec![t0]);
    let (_, certificate, labelling) = c.best.expect("search reaches a leaf");
    CanonicalForm { labelling, certificate }
}

pub fn are_isomorphic(a: &FanoGraph, b: &FanoGraph) -> bool {
    a.n == b.n
        && a.simple_edges() == b.simple_edges()
        && canonical_form(a).certificate == canonical_form(b).certificate
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(n: usize) -> FanoGraph {
        FanoGraph::from_fn(n, |i, j| ((j - i) % n == 1 || (i + n - j) % n == 1) as u8)
    }

    fn petersen() -> FanoGraph {
        FanoGraph::from_fn(10, |a, b| {
            let (a, b) = (a.min(b), a.max(b));
            ((b < 5 && (b - a == 1 || b - a == 4)) || (a >= 5 && (b - a == 2 || b - a == 3)) || b == a + 5) as u8
        })
    }

    /// Brute-force automorphism count for tiny graphs.
    fn brute_aut(g: &FanoGraph) -> u128 {
        fn rec(g: &FanoGraph, p: &mut Vec<usize>, used: &mut Vec<bool>) -> u128 {
            let k = p.len();
            if k == g.n {
                return 1;
            }
            let mut c = 0;
            for v in 0..g.n {
                if used[v] || (0..k).any(|i| g.colour(i, k) != g.colour(p[i], v)) {
                    continue;
                }
                used[v] = true;
                p.push(v);
                c += rec(g, p, used);
                p.pop();
                used[v] = false;
            }
            c
        }
        rec(g, &mut Vec::new(), &mut vec![false; g.n])
    }

    #[test]
    fn small_groups() {
        assert_eq!(aut_order(&petersen()), 120);
        assert_eq!(aut_order(&cycle(7)), 14);
        let k4 = FanoGraph::from_fn(4, |_, _| 1);
        assert_eq!(aut_order(&k4), 24);
        // a perfect matching of triple edges on 6 vertices: 2^3 3!
        let m = FanoGraph::from_fn(6, |i, j| if i / 2 == j / 2 { 3 } else { 0 });
        assert_eq!(aut_order(&m), 48);
        assert_eq!(m.triple_matching().unwrap().len(), 3);
        assert!(!are_isomorphic(&cycle(6), &m));
        assert!(are_isomorphic(&cycle(6), &cycle(6).relabel(&[3, 1, 4, 0, 5, 2])));
    }

    fn random_graph(n: usize, seed: u64) -> FanoGraph {
        FanoGraph::from_fn(n, |i, j| {
            let h = seed.wrapping_mul(6364136223846793005).wrapping_add((i * 131 + j * 7919) as u64).rotate_left(17);
            [0u8, 1, 1, 3][(h >> 7) as usize % 4]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn canonical_form_is_relabelling_invariant(n in 1usize..9, seed in any::<u64>(), perm_seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let g = random_graph(n, seed);
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
            let h = g.relabel(&p);
            prop_assert_eq!(canonical_form(&g).certificate, canonical_form(&h).certificate);
            let a = aut_order(&g);
            prop_assert_eq!(a, aut_order(&h));
            prop_assert_eq!(a, brute_aut(&g));
        }
    }
}
