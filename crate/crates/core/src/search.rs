//! Pattern-guided search for geometric line sets: per-orbit admissible
//! subsets, patterns up to `stab ħ`, the orbit-by-orbit build with
//! stabilizers in `R_ħ`, cluster-ordered search and extensions.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lines::{prime_to_3_saturation, LineSet, LineUniverse};
use crate::sublattice::SubLattice;
use crate::orbits::OrbitDecomposition;
use crate::perm::{self, Perm, StabChain};

/// Cap on stored admissible subsets of one orbit.
pub const SUBSET_CAP: usize = 500_000;
/// Cap on the number of enumerated patterns.
pub const PATTERN_CAP: usize = 2_000_000;

/// All subsets `X ⊂ 𝔬` with `X ∪ X*` admissible (`X = X*` for a self-dual
/// orbit), grouped by size. The empty set is included.
#[derive(Debug, Clone)]
pub struct OrbitSubsets {
    pub orbit: usize,
    pub by_size: Vec<Vec<Vec<usize>>>,
}

impl OrbitSubsets {
    pub fn sizes(&self) -> Vec<usize> {
        (0..self.by_size.len()).filter(|&k| !self.by_size[k].is_empty()).collect()
    }

    pub fn total(&self) -> usize {
        self.by_size.iter().map(|v| v.len()).sum()
    }

    /// The largest size below the maximum (`bnd'`), if any.
    pub fn second_size(&self) -> Option<usize> {
        let s = self.sizes();
        (s.len() >= 2).then(|| s[s.len() - 2])
    }
}

fn compatible_lines(u: &LineUniverse, x: usize, y: usize) -> bool {
    matches!(u.product(x, y), 1 | 2)
}

fn root_free(u: &Arc<LineUniverse>, lines: &[usize]) -> bool {
    let s = LineSet::new(u.clone(), lines.iter().flat_map(|&i| [i, u.dual[i]]));
    !s.has_perp_root(s.span())
}

/// Enumerates the admissible subsets of a combinatorial orbit by a
/// hereditary depth-first search; only sizes `≥ min_size` are stored.
pub fn precompute_orbit_subsets(d: &OrbitDecomposition, o: usize, min_size: usize) -> Result<OrbitSubsets> {
    let u = d.universe().clone();
    let c = &d.comb[o];
    let self_dual = c.is_self_dual();
    let verts: Vec<usize> = if self_dual {
        c.members.iter().copied().filter(|&i| i < u.dual[i]).collect()
    } else {
        c.members.clone()
    };
    let compat = |x: usize, y: usize| {
        compatible_lines(&u, x, y) && (!self_dual || (compatible_lines(&u, x, u.dual[y]) && compatible_lines(&u, u.dual[x], y)))
    };
    let step = if self_dual { 2 } else { 1 };
    let mut by_size: Vec<Vec<Vec<usize>>> = vec![Vec::new(); c.members.len() + 1];
    let mut stored = 0usize;
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        verts: &[usize],
        chosen: &mut Vec<usize>,
        ctx: &mut dyn FnMut(&[usize]) -> Result<bool>,
        compat: &dyn Fn(usize, usize) -> bool,
    ) -> Result<()> {
        for a in start..verts.len() {
            let v = verts[a];
            if !chosen.iter().all(|&w| compat(v, w)) {
                continue;
            }
            chosen.push(v);
            if ctx(chosen)? {
                rec(a + 1, verts, chosen, ctx, compat)?;
            }
            chosen.pop();
        }
        Ok(())
    }
    let mut visit = |x: &[usize]| -> Result<bool> {
        if !root_free(&u, x) {
            return Ok(false);
        }
        let size = x.len() * step;
        if size >= min_size {
            let mut set: Vec<usize> = if self_dual { x.iter().flat_map(|&i| [i, u.dual[i]]).collect() } else { x.to_vec() };
            set.sort_unstable();
            by_size[size].push(set);
            stored += 1;
            if stored > SUBSET_CAP {
                return Err(Error::Budget(format!("orbit {o} has more than {SUBSET_CAP} admissible subsets")));
            }
        }
        Ok(true)
    };
    if min_size == 0 {
        visit(&[])?;
    }
    rec(0, &verts, &mut chosen, &mut visit, &compat)?;
    Ok(OrbitSubsets { orbit: o, by_size })
}

/// A `*`-invariant assignment of target counts to combinatorial orbits;
/// `None` outside the searched cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub values: Vec<Option<u32>>,
}

impl Pattern {
    pub fn total(&self) -> u64 {
        self.values.iter().flatten().map(|&v| v as u64).sum()
    }

    pub fn is_star_invariant(&self, d: &OrbitDecomposition) -> bool {
        (0..self.values.len()).all(|o| self.values[o] == self.values[d.comb[o].dual_partner])
    }

    /// `⟨v1, v2, …⟩` over the given orbit ids.
    pub fn display(&self, orbits: &[usize]) -> String {
        let v: Vec<String> = orbits.iter().map(|&o| self.values[o].map_or("-".into(), |x| x.to_string())).collect();
        format!("<{}>", v.join(","))
    }
}

/// Canonical representative of a vector under a finite group given by all
/// its elements (as permutations of positions).
pub fn canonical_vector(v: &[u32], elements: &[Perm]) -> Vec<u32> {
    let mut best = v.to_vec();
    for p in elements {
        let mut w = vec![0u32; v.len()];
        for (o, &x) in v.iter().enumerate() {
            w[p[o] as usize] = x;
        }
        if w < best {
            best = w;
        }
    }
    best
}

/// All assignments `units[i] ↦ value ∈ allowed[i]` with `Σ weight·value ≥
/// min_total`, one per orbit of the group (`elements` act on positions
/// `0..n`, units listed as their positions with duals sharing a value).
pub fn enumerate_patterns_with(
    n: usize,
    units: &[(usize, usize)],
    allowed: &[Vec<u32>],
    min_total: i64,
    elements: &[Perm],
) -> Result<Vec<Vec<u32>>> {
    const OUTSIDE: u32 = u32::MAX;
    let weight: Vec<i64> = units.iter().map(|&(a, b)| if a == b { 1 } else { 2 }).collect();
    let max_rest: Vec<i64> = (0..=units.len())
        .map(|i| (i..units.len()).map(|j| weight[j] * *allowed[j].iter().max().unwrap_or(&0) as i64).sum())
        .collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = Vec::new();
    let mut cur = vec![OUTSIDE; n];
    fn rec(
        i: usize,
        acc: i64,
        cur: &mut Vec<u32>,
        st: &mut dyn FnMut(&[u32]) -> Result<()>,
        units: &[(usize, usize)],
        allowed: &[Vec<u32>],
        weight: &[i64],
        max_rest: &[i64],
        min_total: i64,
    ) -> Result<()> {
        if acc + max_rest[i] < min_total {
            return Ok(());
        }
        if i == units.len() {
            return st(cur);
        }
        for &v in &allowed[i] {
            cur[units[i].0] = v;
            cur[units[i].1] = v;
            rec(i + 1, acc + weight[i] * v as i64, cur, st, units, allowed, weight, max_rest, min_total)?;
        }
        Ok(())
    }
    let mut store = |v: &[u32]| -> Result<()> {
        if seen.insert(canonical_vector(v, elements)) {
            out.push(v.to_vec());
            if out.len() > PATTERN_CAP {
                return Err(Error::Budget(format!("more than {PATTERN_CAP} patterns")));
            }
        }
        Ok(())
    };
    rec(0, 0, &mut cur, &mut store, units, allowed, &weight, &max_rest, min_total)?;
    Ok(out)
}

/// Search budgets; exceeding one makes the result incomplete.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Budget {
    pub nodes: Option<u64>,
    pub seconds: Option<f64>,
}

struct Control {
    nodes: AtomicU64,
    max_nodes: u64,
    deadline: Option<Instant>,
    stopped: AtomicBool,
    errors: Mutex<Vec<String>>,
}

impl Control {
    fn new(b: Budget) -> Self {
        Control {
            nodes: AtomicU64::new(0),
            max_nodes: b.nodes.unwrap_or(u64::MAX),
            deadline: b.seconds.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            stopped: AtomicBool::new(false),
            errors: Mutex::new(Vec::new()),
        }
    }

    fn tick(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.max_nodes || self.deadline.is_some_and(|t| Instant::now() > t) {
            self.stopped.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoundSet {
    /// Indices into the line universe.
    pub lines: Vec<usize>,
    pub size: usize,
    pub rank: usize,
    pub saturated: bool,
    /// `Some(true)` for saturated sets of rank 20, `Some(false)` when not
    /// saturated, `None` when undecided.
    pub maximal: Option<bool>,
    /// `|𝔏 ∩ 𝔬|` for every combinatorial orbit.
    pub pattern: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub sets: Vec<FoundSet>,
    pub complete: bool,
    pub nodes: u64,
    pub notes: Vec<String>,
}

/// Cluster bookkeeping for the cluster-ordered search.
#[derive(Debug, Clone)]
struct ClusterPlan {
    clusters: Vec<Vec<usize>>,
    m: i64,
    d: i64,
    /// Level after which each cluster is fully assigned.
    complete_at: Vec<usize>,
    max_bnd: usize,
}

#[derive(Debug, Clone)]
struct Plan {
    in_cluster: Vec<bool>,
    /// Unit representatives in processing order.
    order: Vec<usize>,
    fixed: Option<Vec<u32>>,
    min_total: i64,
    clusters: Option<ClusterPlan>,
    /// Discard intermediate maximal sets smaller than this.
    early_goal: Option<usize>,
}

#[derive(Clone)]
struct State {
    set: Vec<usize>,
    /// `spn` of the set.
    span: SubLattice,
    counts: Vec<u32>,
    targets: Vec<u32>,
    group: Group,
}

/// A permutation group on lines: a stabilizer chain, or all elements when
/// the group is small.
#[derive(Clone)]
enum Group {
    Chain(StabChain),
    Elements(Arc<Vec<Perm>>),
}

fn image(g: &[u32], x: &[usize]) -> Vec<usize> {
    let mut y: Vec<usize> = x.iter().map(|&p| g[p] as usize).collect();
    y.sort_unstable();
    y
}

impl Group {
    fn order(&self) -> u128 {
        match self {
            Group::Chain(c) => c.order(),
            Group::Elements(e) => e.len() as u128,
        }
    }

    /// Representatives of the orbits on a list of line subsets, in order of
    /// first appearance.
    fn orbit_reps(&self, cands: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        if self.order() == 1 || cands.len() <= 1 {
            return cands;
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut reps = Vec::new();
        for c in cands {
            if seen.contains(&c) {
                continue;
            }
            match self {
                Group::Elements(els) => seen.extend(els.iter().map(|g| image(g, &c))),
                Group::Chain(ch) => {
                    let gens = ch.strong_generators();
                    seen.insert(c.clone());
                    let mut queue = vec![c.clone()];
                    while let Some(x) = queue.pop() {
                        for s in &gens {
                            let y = image(s, &x);
                            if seen.insert(y.clone()) {
                                queue.push(y);
                            }
                        }
                    }
                }
            }
            reps.push(c);
        }
        reps
    }

    /// The setwise stabilizer of a sorted line set.
    fn set_stabilizer(&self, x: &[usize]) -> Group {
        if self.order() == 1 {
            return self.clone();
        }
        match self {
            Group::Elements(els) => Group::Elements(Arc::new(
                els.iter().filter(|g| x.iter().all(|&p| x.binary_search(&(g[p] as usize)).is_ok())).cloned().collect(),
            )),
            Group::Chain(ch) => {
                let key: Vec<u32> = x.iter().map(|&p| p as u32).collect();
                Group::Chain(
                    perm::stabilizer(ch, key, |h, s: &Vec<u32>| {
                        let mut y: Vec<u32> = s.iter().map(|&p| h[p as usize]).collect();
                        y.sort_unstable();
                        y
                    })
                    .1,
                )
            }
        }
    }
}

const UNSET: u32 = u32::MAX;

/// The search engine over one configuration with fixed orbit bounds.
pub struct Engine<'a> {
    pub d: &'a OrbitDecomposition,
    pub bnd: Vec<u64>,
    subsets: Vec<OnceLock<std::result::Result<Arc<OrbitSubsets>, String>>>,
}

impl<'a> Engine<'a> {
    pub fn new(d: &'a OrbitDecomposition, bnd: Vec<u64>) -> Self {
        let n = d.comb.len();
        Engine { d, bnd, subsets: (0..n).map(|_| OnceLock::new()).collect() }
    }

    fn universe(&self) -> &Arc<LineUniverse> {
        self.d.universe()
    }

    pub fn subsets(&self, o: usize) -> Result<Arc<OrbitSubsets>> {
        self.subsets[o]
            .get_or_init(|| precompute_orbit_subsets(self.d, o, 0).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Budget)
    }

    /// `bnd(𝒞)`.
    pub fn bnd_of(&self, cluster: &[usize]) -> u64 {
        cluster.iter().map(|&o| self.bnd[o]).sum()
    }

    fn unit(&self, o: usize) -> usize {
        o.min(self.d.comb[o].dual_partner)
    }

    fn check_cluster(&self, cluster: &[usize]) -> Result<Vec<usize>> {
        let mut c: Vec<usize> = cluster.to_vec();
        c.sort_unstable();
        c.dedup();
        let set: HashSet<usize> = c.iter().copied().collect();
        if c.iter().any(|&o| o >= self.d.comb.len() || !set.contains(&self.d.comb[o].dual_partner)) {
            return Err(Error::Invalid("cluster must be a union of combinatorial orbits closed under duality".into()));
        }
        Ok(c)
    }

    fn units_in(&self, cluster: &[usize]) -> Vec<usize> {
        let mut u: Vec<usize> = cluster.iter().map(|&o| self.unit(o)).collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// Patterns on `cluster` with `Σ π ≥ bnd(𝒞) - d`, one per orbit of the
    /// setwise stabilizer of the cluster in `stab ħ`. Values are restricted
    /// to sizes realised by admissible subsets.
    pub fn enumerate_patterns(&self, cluster: &[usize], d: i64) -> Result<Vec<Pattern>> {
        if d < 0 {
            return Ok(Vec::new());
        }
        let cluster = self.check_cluster(cluster)?;
        let units = self.units_in(&cluster);
        let pairs: Vec<(usize, usize)> = units.iter().map(|&o| (o, self.d.comb[o].dual_partner)).collect();
        let allowed: Vec<Vec<u32>> = units
            .iter()
            .map(|&o| {
                let s = self.subsets(o)?;
                Ok(s.sizes().into_iter().filter(|&k| k as u64 <= self.bnd[o]).map(|k| k as u32).collect())
            })
            .collect::<Result<_>>()?;
        let elements = &self.d.symmetry.stab_elements()?.orbit_perms;
        let min_total = self.bnd_of(&cluster) as i64 - d;
        let raw = enumerate_patterns_with(self.d.comb.len(), &pairs, &allowed, min_total, elements)?;
        Ok(raw
            .into_iter()
            .map(|v| Pattern { values: v.into_iter().map(|x| (x != u32::MAX).then_some(x)).collect() })
            .collect())
    }

    fn base_state(&self) -> State {
        let n = self.d.comb.len();
        State {
            set: Vec::new(),
            span: self.universe().set([]).span().clone(),
            counts: vec![0; n],
            targets: vec![UNSET; n],
            group: self.r_group(),
        }
    }

    /// All geometric sets with the given pattern on its cluster, one per
    /// `R_ħ`-class. Orbits are processed by decreasing target value.
    pub fn build_from_pattern(&self, pattern: &Pattern, budget: Budget) -> Result<SearchResult> {
        let cluster: Vec<usize> = (0..pattern.values.len()).filter(|&o| pattern.values[o].is_some()).collect();
        let cluster = self.check_cluster(&cluster)?;
        if !pattern.is_star_invariant(self.d) {
            return Err(Error::Invalid("pattern is not *-invariant".into()));
        }
        let mut order = self.units_in(&cluster);
        order.sort_by(|&a, &b| pattern.values[b].cmp(&pattern.values[a]).then(a.cmp(&b)));
        let fixed: Vec<u32> = pattern.values.iter().map(|v| v.unwrap_or(UNSET)).collect();
        let plan = self.plan(cluster, order, Some(fixed), pattern.total() as i64, None, None);
        self.run(&plan, self.base_state(), budget, true)
    }

    /// `Bnd_d(𝒞)`: geometric sets generated by their intersection with the
    /// cluster and meeting it in at least `bnd(𝒞) - d` lines, one per
    /// `O_ħ`-class. Pattern values are chosen orbit by orbit, sharing the
    /// build of common prefixes.
    pub fn search(&self, cluster: &[usize], d: i64, budget: Budget) -> Result<SearchResult> {
        if d < 0 {
            return Ok(SearchResult { sets: Vec::new(), complete: true, nodes: 0, notes: Vec::new() });
        }
        let cluster = self.check_cluster(cluster)?;
        let order = self.units_in(&cluster);
        let min_total = self.bnd_of(&cluster) as i64 - d;
        let plan = self.plan(cluster, order, None, min_total, None, None);
        self.run(&plan, self.base_state(), budget, true)
    }

    /// Like [`Engine::search`], with the cluster-ordered pruning: the first
    /// cluster is the lexicographically largest by `(|𝔏 ∩ 𝔠|, dif_0, dif_1,
    /// …)`, which `stab ħ` allows since it permutes the clusters
    /// transitively; the deficits of all clusters add up to at most `m·d`.
    pub fn cluster_search(&self, clusters: &[Vec<usize>], d: i64, budget: Budget, early_goal: Option<usize>) -> Result<SearchResult> {
        if d < 0 {
            return Ok(SearchResult { sets: Vec::new(), complete: true, nodes: 0, notes: Vec::new() });
        }
        let m = self.cluster_multiplicity(clusters)?;
        self.check_transitive(clusters)?;
        let mut all: Vec<usize> = clusters.concat();
        all.sort_unstable();
        all.dedup();
        let cluster = self.check_cluster(&all)?;
        let mut order: Vec<usize> = Vec::new();
        let mut complete_at = Vec::new();
        for c in clusters {
            for u in self.units_in(c) {
                if !order.contains(&u) {
                    order.push(u);
                }
            }
            let last = self.units_in(c).iter().map(|u| order.iter().position(|x| x == u).unwrap()).max().unwrap_or(0);
            complete_at.push(last);
        }
        let cp = ClusterPlan {
            clusters: clusters.to_vec(),
            m: m as i64,
            d,
            complete_at,
            max_bnd: cluster.iter().map(|&o| self.bnd[o] as usize).max().unwrap_or(0),
        };
        let min_total = self.bnd_of(&cluster) as i64 - d;
        let plan = self.plan(cluster, order, None, min_total, Some(cp), early_goal);
        self.run(&plan, self.base_state(), budget, true)
    }

    /// The common multiplicity of a cluster cover.
    pub fn cluster_multiplicity(&self, clusters: &[Vec<usize>]) -> Result<usize> {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for c in clusters {
            for &o in c {
                *count.entry(o).or_default() += 1;
            }
        }
        let mut ms: Vec<usize> = count.values().copied().collect();
        ms.sort_unstable();
        ms.dedup();
        match ms.as_slice() {
            [m] => Ok(*m),
            _ => Err(Error::Invalid("clusters do not cover their union with a constant multiplicity".into())),
        }
    }

    fn check_transitive(&self, clusters: &[Vec<usize>]) -> Result<()> {
        if clusters.len() <= 1 {
            return Ok(());
        }
        let key = |c: &[usize]| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v
        };
        let index: HashMap<Vec<usize>, usize> = clusters.iter().enumerate().map(|(i, c)| (key(c), i)).collect();
        let gens = &self.d.symmetry.stab_orbit_gens;
        let mut seen = vec![false; clusters.len()];
        seen[0] = true;
        let mut queue = vec![0];
        while let Some(i) = queue.pop() {
            for g in gens {
                let img: Vec<usize> = clusters[i].iter().map(|&o| g[o] as usize).collect();
                let j = *index
                    .get(&key(&img))
                    .ok_or_else(|| Error::Invalid("stab ħ does not permute the clusters".into()))?;
                if !seen[j] {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::Invalid("stab ħ is not transitive on the clusters".into()))
        }
    }

    fn plan(
        &self,
        cluster: Vec<usize>,
        order: Vec<usize>,
        fixed: Option<Vec<u32>>,
        min_total: i64,
        clusters: Option<ClusterPlan>,
        early_goal: Option<usize>,
    ) -> Plan {
        let mut in_cluster = vec![false; self.d.comb.len()];
        for &o in &cluster {
            in_cluster[o] = true;
        }
        Plan { in_cluster, order, fixed, min_total, clusters, early_goal }
    }

    fn r_group(&self) -> Group {
        let sym = &self.d.symmetry;
        match sym.r_elements() {
            Some(els) => Group::Elements(Arc::new(els.to_vec())),
            None => Group::Chain(sym.r_group().clone()),
        }
    }

    /// Cluster pruning after `level` has been assigned.
    fn cluster_ok(&self, plan: &Plan, level: usize, targets: &[u32]) -> bool {
        let cp = match &plan.clusters {
            Some(c) => c,
            None => return true,
        };
        let n = cp.clusters.len() as i64;
        let key = |c: &[usize]| {
            let mut k = vec![0i64; cp.max_bnd + 2];
            for &o in c {
                k[0] += targets[o] as i64;
                k[1 + (self.bnd[o] as usize - targets[o] as usize)] += 1;
            }
            k
        };
        let deficit = |c: &[usize]| -> i64 {
            c.iter().filter(|&&o| targets[o] != UNSET).map(|&o| self.bnd[o] as i64 - targets[o] as i64).sum()
        };
        let first_done = cp.complete_at[0] <= level;
        if cp.complete_at[0] == level {
            let count: i64 = cp.clusters[0].iter().map(|&o| targets[o] as i64).sum();
            let b0: i64 = cp.clusters[0].iter().map(|&o| self.bnd[o] as i64).sum();
            if count * n < b0 * n - cp.m * cp.d {
                return false;
            }
        }
        let key0 = first_done.then(|| key(&cp.clusters[0]));
        let def0 = if first_done { deficit(&cp.clusters[0]) } else { 0 };
        let mut total = 0;
        for (j, c) in cp.clusters.iter().enumerate() {
            let done = cp.complete_at[j] <= level;
            if j > 0 && done && cp.complete_at[j] == level {
                if let Some(k0) = &key0 {
                    if key(c) > *k0 {
                        return false;
                    }
                }
            }
            let dj = deficit(c);
            total += if done { dj } else { dj.max(def0) };
        }
        total <= cp.m * cp.d
    }

    fn run(&self, plan: &Plan, start: State, budget: Budget, dedup_o: bool) -> Result<SearchResult> {
        for &u in &plan.order {
            self.subsets(u)?;
        }
        let ctl = Control::new(budget);
        let out: Mutex<Vec<Vec<usize>>> = Mutex::new(Vec::new());
        let done: i64 = (0..self.d.comb.len())
            .filter(|&o| plan.in_cluster[o] && start.targets[o] != UNSET)
            .map(|o| start.targets[o] as i64)
            .sum();
        self.dfs(plan, 0, &start, done, &ctl, &out);
        let sets = out.into_inner().unwrap();
        let mut notes = ctl.errors.into_inner().unwrap();
        let complete = !ctl.stopped.load(Ordering::Relaxed) && notes.is_empty();
        if !complete && notes.is_empty() {
            notes.push("budget exhausted".into());
        }
        let found = self.finish(sets, dedup_o, &mut notes)?;
        Ok(SearchResult { sets: found, complete, nodes: ctl.nodes.load(Ordering::Relaxed), notes })
    }

    /// Dedup (under `O_ħ` when its elements are available, else `R_ħ`),
    /// flags, deterministic order.
    fn finish(&self, sets: Vec<Vec<usize>>, dedup_o: bool, notes: &mut Vec<String>) -> Result<Vec<FoundSet>> {
        let sym = &self.d.symmetry;
        let use_o = dedup_o && sym.stab_elements().is_ok();
        if dedup_o && !use_o {
            notes.push("stab ħ too large to enumerate; classes are up to R_ħ only".into());
        }
        let keyed: Vec<(Vec<usize>, Vec<usize>)> = sets
            .into_par_iter()
            .map(|s| {
                let k = if use_o { sym.canonical(&s).unwrap_or_else(|_| sym.canonical_r(&s)) } else { sym.canonical_r(&s) };
                (k, s)
            })
            .collect();
        let mut by_key: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (k, s) in keyed {
            by_key.entry(k).or_insert(s);
        }
        let mut reps: Vec<(Vec<usize>, Vec<usize>)> = by_key.into_iter().collect();
        reps.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
        let u = self.universe();
        reps.into_par_iter()
            .map(|(_, s)| {
                let ls = u.set(s.iter().copied());
                let rank = ls.rank();
                let saturated = ls.is_saturated()?;
                let maximal = if !saturated {
                    Some(false)
                } else if rank == 20 {
                    Some(true)
                } else {
                    None
                };
                Ok(FoundSet { size: s.len(), rank, saturated, maximal, pattern: sym.pattern_of(&s), lines: s })
            })
            .collect()
    }

    fn dfs(&self, plan: &Plan, level: usize, st: &State, done: i64, ctl: &Control, out: &Mutex<Vec<Vec<usize>>>) {
        if ctl.stopped.load(Ordering::Relaxed) {
            return;
        }
        let u = self.universe();
        if level == plan.order.len() {
            if st.set.is_empty() || done < plan.min_total {
                return;
            }
            match u.set(st.set.iter().copied()).is_geometric() {
                Ok(true) => out.lock().unwrap().push(st.set.clone()),
                Ok(false) => {}
                Err(e) => ctl.errors.lock().unwrap().push(e.to_string()),
            }
            return;
        }
        let o = plan.order[level];
        let od = self.d.comb[o].dual_partner;
        let weight: i64 = if o == od { 1 } else { 2 };
        let rest: i64 = plan.order[level + 1..]
            .iter()
            .map(|&x| {
                let w = if self.d.comb[x].dual_partner == x { 1 } else { 2 };
                w * match &plan.fixed {
                    Some(p) => p[x] as i64,
                    None => self.bnd[x] as i64,
                }
            })
            .sum();
        let subsets = match self.subsets(o) {
            Ok(s) => s,
            Err(e) => {
                ctl.errors.lock().unwrap().push(e.to_string());
                return;
            }
        };
        let e = st.counts[o] as usize;
        let existing: Vec<usize> = st.set.iter().copied().filter(|&i| self.d.symmetry.comb_of[i] == o).collect();
        let values: Vec<usize> = match &plan.fixed {
            Some(p) => vec![p[o] as usize],
            None => (e..=self.bnd[o] as usize).rev().collect(),
        };
        let mut branches: Vec<(usize, Vec<usize>)> = Vec::new();
        for v in values {
            if v < e || v >= subsets.by_size.len() || done + weight * v as i64 + rest < plan.min_total {
                continue;
            }
            let cands: Vec<Vec<usize>> =
                subsets.by_size[v].iter().filter(|x| existing.iter().all(|i| x.binary_search(i).is_ok())).cloned().collect();
            for x in st.group.orbit_reps(cands) {
                branches.push((v, x));
            }
        }
        let body = |(v, x): &(usize, Vec<usize>)| {
            if !ctl.tick() {
                return;
            }
            let mut members = st.set.clone();
            members.extend(x.iter().flat_map(|&i| [i, u.dual[i]]));
            let gen = u.set(members);
            if !gen.products_ok() {
                return;
            }
            // spn grows monotonically, so the parent's span may stand in for
            // its lines
            let mut rows = st.span.basis.clone();
            rows.extend(x.iter().flat_map(|&i| [u.coords[i].clone(), u.coords[u.dual[i]].clone()]));
            let span = prime_to_3_saturation(&SubLattice::new(u.coords[0].len(), &rows));
            if span.rank() > 20 || gen.has_perp_root(&span) {
                return;
            }
            let cl = LineSet::with_span(u.clone(), span);
            if !cl.products_ok() {
                return;
            }
            let counts = self.d.symmetry.pattern_of(&cl.members);
            let mut targets = st.targets.clone();
            targets[o] = *v as u32;
            targets[od] = *v as u32;
            for q in 0..counts.len() {
                let ok = if targets[q] != UNSET {
                    counts[q] == targets[q]
                } else if plan.in_cluster[q] {
                    counts[q] as u64
                        <= match &plan.fixed {
                            Some(p) => p[q] as u64,
                            None => self.bnd[q],
                        }
                } else {
                    true
                };
                if !ok {
                    return;
                }
            }
            if !self.cluster_ok(plan, level, &targets) {
                return;
            }
            if let Some(goal) = plan.early_goal {
                if cl.rank() == 20 && cl.len() < goal && matches!(cl.is_saturated(), Ok(true)) && matches!(cl.is_geometric(), Ok(true)) {
                    return;
                }
            }
            let group = st.group.set_stabilizer(x);
            let next = State { set: cl.members.clone(), span: cl.span().clone(), counts, targets, group };
            self.dfs(plan, level + 1, &next, done + weight * *v as i64, ctl, out);
        };
        if branches.len() > 1 {
            branches.par_iter().for_each(body);
        } else {
            branches.iter().for_each(body);
        }
    }

    /// `Orb_δ`: orbits outside the cluster not meeting the set maximally.
    fn deficient_orbits(&self, set: &LineSet, cluster: &[usize]) -> Vec<usize> {
        let counts = self.d.symmetry.pattern_of(&set.members);
        let mut out: Vec<usize> = (0..self.d.comb.len())
            .filter(|&o| !cluster.contains(&o) && (counts[o] as u64) < self.bnd[o])
            .map(|o| self.unit(o))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Extensions through one maximal orbit: when `Σ_{Orb_δ} (bnd - bnd') ≥
    /// bnd(Orb) - goal`, every large extension meets some `𝔬 ∈ Orb_δ` in
    /// `bnd(𝔬)` lines. Returns the geometric `𝒞`-proper extensions obtained
    /// by completing one such orbit, up to `O_ħ`.
    pub fn extend_by_maximal_orbit(&self, set: &LineSet, cluster: &[usize], goal: u64, budget: Budget) -> Result<Vec<FoundSet>> {
        let cluster = self.check_cluster(cluster)?;
        if set.rank() == 20 && set.is_saturated()? {
            return Ok(Vec::new());
        }
        let deficient = self.deficient_orbits(set, &cluster);
        let mut slack: i64 = 0;
        for &o in &deficient {
            let s = self.subsets(o)?;
            let w = if self.d.comb[o].is_self_dual() { 1 } else { 2 };
            let second = s.sizes().into_iter().filter(|&k| (k as u64) < self.bnd[o]).max().unwrap_or(0);
            slack += w * (self.bnd[o] as i64 - second as i64);
        }
        let all: Vec<usize> = (0..self.d.comb.len()).collect();
        if slack < self.bnd_of(&all) as i64 - goal as i64 {
            return Err(Error::Hypothesis("the deficiency inequality fails; use extend_general".into()));
        }
        let counts = self.d.symmetry.pattern_of(&set.members);
        let mut found: Vec<Vec<usize>> = Vec::new();
        for &o in &deficient {
            let od = self.d.comb[o].dual_partner;
            let mut fixed = vec![UNSET; self.d.comb.len()];
            let mut targets = vec![UNSET; self.d.comb.len()];
            for &c in &cluster {
                fixed[c] = counts[c];
                targets[c] = counts[c];
            }
            fixed[o] = self.bnd[o] as u32;
            fixed[od] = self.bnd[o] as u32;
            let mut unit_cluster = cluster.clone();
            unit_cluster.extend([o, od]);
            unit_cluster.sort_unstable();
            unit_cluster.dedup();
            let plan = self.plan(unit_cluster, vec![o], Some(fixed), 0, None, None);
            let start = State {
                set: set.members.clone(),
                span: set.span().clone(),
                counts: counts.clone(),
                targets,
                group: self.small_stabilizer(set),
            };
            let r = self.run(&plan, start, budget, false)?;
            if !r.complete {
                return Err(Error::Budget("extension search exhausted its budget".into()));
            }
            found.extend(r.sets.into_iter().map(|f| f.lines));
        }
        let mut notes = Vec::new();
        self.finish(found, true, &mut notes)
    }

    /// The stabilizer of a set in `R_ħ` when the group is small, else the
    /// trivial group (duplicates are then removed by canonical forms).
    fn small_stabilizer(&self, set: &LineSet) -> Group {
        let r = self.r_group();
        if r.order() <= 1 << 16 {
            r.set_stabilizer(&set.members)
        } else {
            Group::Chain(StabChain::new(self.universe().len(), &[]))
        }
    }

    /// The input together with its geometric extensions by up to
    /// `max_extra_lines` further lines (with their duals), taken from
    /// `𝔉 ∩ spn_Q 𝔏` for rank-20 inputs and from all of `𝔉` otherwise.
    pub fn extend_general(&self, set: &LineSet, max_extra_lines: usize) -> Result<Vec<FoundSet>> {
        let u = self.universe();
        let pool: Vec<usize> = if set.rank() == 20 {
            u.lines_in(&set.span_q())
        } else {
            (0..u.len()).collect()
        };
        let cands: Vec<usize> = pool.into_iter().filter(|&i| !set.contains(i) && i < u.dual[i]).collect();
        let mut found: Vec<Vec<usize>> = vec![set.members.clone()];
        let mut frontier: Vec<(Vec<usize>, usize)> = vec![(set.members.clone(), 0)];
        for _ in 0..max_extra_lines {
            let mut next = Vec::new();
            for (base, start) in &frontier {
                for (a, &l) in cands.iter().enumerate().skip(*start) {
                    if base.binary_search(&l).is_ok() {
                        continue;
                    }
                    let mut m = base.clone();
                    m.extend([l, u.dual[l]]);
                    let cl = u.set(m).closure();
                    if !cl.is_admissible() || cl.rank() > 20 {
                        continue;
                    }
                    if cl.is_geometric()? {
                        found.push(cl.members.clone());
                    }
                    next.push((cl.members.clone(), a + 1));
                }
            }
            frontier = next;
        }
        let mut notes = Vec::new();
        self.finish(found, true, &mut notes)
    }
}

/// Clusters of the main orbit in the `24A1` configurations 2 and 3.
pub fn golay_clusters(d: &OrbitDecomposition) -> Result<Vec<Vec<usize>>> {
    let u = d.universe();
    let gd = u.config.golay.as_ref().ok_or_else(|| Error::Invalid("clusters are defined for 24A1 configurations".into()))?;
    let main = &d.orbits[0];
    let supp_mask = |o: usize| d.comb[o].support.iter().fold(0u32, |m, &k| m | 1 << k);
    match gd.number {
        3 => {
            let k_set: Vec<usize> = (0..24).filter(|&p| gd.o >> p & 1 == 0 && p != gd.rbar).collect();
            Ok(k_set.iter().map(|&k| main.iter().copied().filter(|&o| supp_mask(o) >> k & 1 == 1).collect()).collect())
        }
        2 => {
            let rh = gd.rh.ok_or_else(|| Error::Invalid("configuration 2 without r_h".into()))?;
            let k_mask: u32 = (0..24).filter(|&p| gd.o >> p & 1 == 0 && p != rh && p != gd.rbar).fold(0, |m, p| m | 1 << p);
            let g = crate::golay::GolayCode::new();
            let octads: Vec<u32> =
                g.octads.iter().copied().filter(|&o| o & gd.o == 0 && o >> gd.rbar & 1 == 0 && o >> rh & 1 == 1).collect();
            Ok(octads
                .iter()
                .map(|&oc| main.iter().copied().filter(|&o| supp_mask(o) & k_mask & !oc == 0).collect())
                .collect())
        }
        _ => Err(Error::Invalid("no cluster scheme for this configuration".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burnside_count_of_cyclic_patterns() {
        // five singleton units permuted cyclically, values 0..=2
        let n = 5;
        let rot: Vec<Perm> = (0..n as u32).map(|s| (0..n as u32).map(|i| (i + s) % n as u32).collect()).collect();
        let units: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        let allowed = vec![vec![0, 1, 2]; n];
        let pats = enumerate_patterns_with(n, &units, &allowed, 0, &rot).unwrap();
        // Burnside: (3^5 + 4·3)/5
        assert_eq!(pats.len(), 51);
        let pats = enumerate_patterns_with(n, &units, &allowed, 9, &rot).unwrap();
        // totals 9 and 10: compositions counted up to rotation
        let oracle = {
            let mut seen = HashSet::new();
            for code in 0..243u32 {
                let v: Vec<u32> = (0..5).map(|i| code / 3u32.pow(i) % 3).collect();
                if v.iter().sum::<u32>() >= 9 {
                    seen.insert(canonical_vector(&v, &rot));
                }
            }
            seen.len()
        };
        assert_eq!(pats.len(), oracle);
        assert!(enumerate_patterns_with(n, &units, &allowed, 11, &rot).unwrap().is_empty());
    }

    #[test]
    fn orbit_subsets_match_power_set() {
        use crate::config::PolarizedConfig;
        use crate::orbits::decompose_orbits;
        use crate::symmetry::Symmetry;
        let u = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(2).unwrap())).unwrap();
        let d = decompose_orbits(&Symmetry::build(u.clone()).unwrap());
        let mut tested = 0;
        for o in (0..d.comb.len()).filter(|&o| d.comb[o].members.len() <= 16).take(12) {
            let s = precompute_orbit_subsets(&d, o, 0).unwrap();
            let m = &d.comb[o].members;
            let mut want: Vec<Vec<usize>> = Vec::new();
            for mask in 0u32..1 << m.len() {
                let x: Vec<usize> = (0..m.len()).filter(|&i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                if d.comb[o].is_self_dual() && !x.iter().all(|&i| x.contains(&u.dual[i])) {
                    continue;
                }
                if u.set(x.iter().flat_map(|&i| [i, u.dual[i]])).is_admissible() {
                    want.push(x);
                }
            }
            let mut got: Vec<Vec<usize>> = s.by_size.concat();
            got.sort();
            want.sort();
            assert_eq!(got, want, "orbit {o}");
            tested += 1;
        }
        assert!(tested > 0);
    }
}
