//! Orbit decomposition of the line universe, restrictions of combinatorial
//! orbits to blocks of components, and the bound ledger.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::clique::{self, Graph};
use crate::error::{Error, Result};
use crate::lines::{LineSet, LineUniverse};
use crate::perm;
use crate::symmetry::Symmetry;

/// Node cap for the pairwise clique searches.
pub const CLIQUE_BUDGET: u64 = 1 << 20;
/// Node cap for the clique search that also checks root-freeness of spans.
pub const ADMISSIBLE_BUDGET: u64 = 20_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombOrbit {
    pub id: usize,
    pub members: Vec<usize>,
    pub support: Vec<usize>,
    pub dual_partner: usize,
    /// Index of the `O_ħ`-orbit containing it.
    pub parent_orbit: usize,
}

impl CombOrbit {
    pub fn is_self_dual(&self) -> bool {
        self.dual_partner == self.id
    }
}

#[derive(Debug)]
pub struct OrbitDecomposition {
    pub symmetry: Arc<Symmetry>,
    pub comb: Vec<CombOrbit>,
    /// `O_ħ`-orbits as lists of combinatorial orbit ids, largest first.
    pub orbits: Vec<Vec<usize>>,
    pub stab_order: u128,
    pub stab_complete: bool,
}

pub fn decompose_orbits(sym: &Arc<Symmetry>) -> OrbitDecomposition {
    let n = sym.comb_orbits.len();
    let mut orbits: Vec<Vec<usize>> = perm::orbits(n, &sym.stab_orbit_gens)
        .into_iter()
        .map(|o| o.into_iter().map(|x| x as usize).collect())
        .collect();
    let lines = |o: &Vec<usize>| o.iter().map(|&c| sym.comb_orbits[c].len()).sum::<usize>();
    orbits.sort_by(|a, b| lines(b).cmp(&lines(a)).then(a[0].cmp(&b[0])));
    let mut parent = vec![0; n];
    for (i, o) in orbits.iter().enumerate() {
        for &c in o {
            parent[c] = i;
        }
    }
    let comb = (0..n)
        .map(|c| CombOrbit {
            id: c,
            members: sym.comb_orbits[c].clone(),
            support: sym.support(c),
            dual_partner: sym.dual_orbit(c),
            parent_orbit: parent[c],
        })
        .collect();
    OrbitDecomposition { symmetry: sym.clone(), comb, orbits, stab_order: sym.stab_order, stab_complete: sym.stab_complete }
}

impl OrbitDecomposition {
    pub fn universe(&self) -> &Arc<LineUniverse> {
        &self.symmetry.universe
    }

    pub fn multiplicity(&self, orbit: usize) -> usize {
        self.orbits[orbit].len()
    }

    /// Whether `𝕆_n* = 𝕆_n`.
    pub fn orbit_is_self_dual(&self, orbit: usize) -> bool {
        let c = self.orbits[orbit][0];
        self.comb[self.comb[c].dual_partner].parent_orbit == orbit
    }

    /// Number of unordered pairs `{𝔬, 𝔬*}` with `𝔬 ≠ 𝔬*` inside an orbit.
    pub fn dual_pairs_in(&self, orbit: usize) -> usize {
        self.orbits[orbit].iter().filter(|&&c| self.comb[c].dual_partner != c).count() / 2
    }
}

/// The restriction `𝔬|_B` of a combinatorial orbit to a block of components:
/// distinct ambient numerators of the members on those components.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub comps: Vec<usize>,
    pub values: Vec<Vec<i64>>,
    pub hbar: Vec<i64>,
    pub self_dual: bool,
    /// Square of the ambient denominator.
    pub denom2: i64,
}

fn block_coords(u: &LineUniverse, v: &[i64], comps: &[usize]) -> Vec<i64> {
    let n = &u.config.lattice;
    comps.iter().flat_map(|&k| n.raw_block(v, k).iter().copied()).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn restriction(d: &OrbitDecomposition, o: usize, comps: &[usize]) -> Restriction {
    let u = d.universe();
    let set: BTreeSet<Vec<i64>> = d.comb[o].members.iter().map(|&i| block_coords(u, &u.lines[i], comps)).collect();
    let den = u.config.lattice.denom;
    Restriction {
        comps: comps.to_vec(),
        values: set.into_iter().collect(),
        hbar: block_coords(u, &u.config.hbar, comps),
        self_dual: d.comb[o].is_self_dual(),
        denom2: den * den,
    }
}

impl Restriction {
    pub fn cnt(&self) -> u64 {
        self.values.len() as u64
    }

    /// `l² - l'·l''` over the block, times the squared denominator.
    fn difference(&self, a: &[i64], b: &[i64]) -> i64 {
        dot(a, a) - dot(a, b)
    }

    /// The block dual `ħ_B - l_B`.
    pub fn bar(&self, a: &[i64]) -> Vec<i64> {
        self.hbar.iter().zip(a).map(|(h, x)| h - x).collect()
    }

    /// The defect `2l² - l·ħ` of a self-dual block.
    pub fn defect(&self) -> Option<i64> {
        if !self.self_dual {
            return None;
        }
        let a = &self.values[0];
        let num = 2 * dot(a, a) - dot(a, &self.hbar);
        (num % self.denom2 == 0).then_some(num / self.denom2)
    }

    fn compatible(&self, a: &[i64], b: &[i64]) -> bool {
        let d = self.difference(a, b);
        d == 2 * self.denom2 || d == 3 * self.denom2 || (self.self_dual && d == 5 * self.denom2 && self.bar(a) == b)
    }

    /// `bnd(B)`: the largest subset with pairwise differences in
    /// `{2, 3, 5}`; `None` when the search exceeds its budget. The subset is
    /// taken `*`-invariant only for a block of defect 5, the one case where
    /// the duals of a fibre lie in the same fibre.
    pub fn bound(&self, budget: u64) -> Option<u64> {
        if self.defect() != Some(5) {
            let g = Graph::from_fn(self.values.len(), |i, j| self.compatible(&self.values[i], &self.values[j]));
            let r = clique::max_clique(&g, budget);
            return r.complete.then_some(r.clique.len() as u64);
        }
        let index: HashMap<&Vec<i64>, usize> = self.values.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            let j = *index.get(&self.bar(v))?;
            if i <= j {
                pairs.push((i, j));
            }
        }
        let vals = &self.values;
        let inner_ok = |p: &(usize, usize)| p.0 == p.1 || self.compatible(&vals[p.0], &vals[p.1]);
        let usable: Vec<(usize, usize)> = pairs.into_iter().filter(inner_ok).collect();
        let g = Graph::from_fn(usable.len(), |x, y| {
            let (a, b) = (usable[x], usable[y]);
            [a.0, a.1].iter().all(|&p| [b.0, b.1].iter().all(|&q| self.compatible(&vals[p], &vals[q])))
        });
        let r = clique::max_clique(&g, budget);
        let per = |p: &(usize, usize)| if p.0 == p.1 { 1 } else { 2 };
        r.complete.then(|| r.clique.iter().map(|&x| per(&usable[x])).sum())
    }
}

/// Blocks with their counts, bounds and (self-dual) defects.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Vec<usize>>,
    pub cnt: Vec<u64>,
    pub bnd: Vec<u64>,
    pub defect: Vec<Option<i64>>,
}

/// Restricts an orbit to the given blocks; a block whose bound search runs
/// out of budget falls back to `bnd ≤ cnt`.
pub fn block_decomposition(d: &OrbitDecomposition, o: usize, blocks: Vec<Vec<usize>>) -> BlockDecomposition {
    let rs: Vec<Restriction> = blocks.iter().map(|b| restriction(d, o, b)).collect();
    BlockDecomposition {
        cnt: rs.iter().map(|r| r.cnt()).collect(),
        bnd: rs.iter().map(|r| r.bound(CLIQUE_BUDGET).unwrap_or(r.cnt())).collect(),
        defect: rs.iter().map(|r| r.defect()).collect(),
        blocks,
    }
}

/// The irreducible components in the support as one-component blocks.
pub fn component_blocks(d: &OrbitDecomposition, o: usize) -> BlockDecomposition {
    block_decomposition(d, o, d.comb[o].support.iter().map(|&k| vec![k]).collect())
}

/// `cnt(𝔬) = ∏ cnt(B_k)` and `bnd(𝔬) ≤ cnt(𝔬) min_k bnd(B_k)/cnt(B_k)`.
pub fn block_bounds(bd: &BlockDecomposition) -> (u64, u64) {
    let cnt: u64 = bd.cnt.iter().product();
    let bnd = bd.cnt.iter().zip(&bd.bnd).map(|(c, b)| cnt / c * b).min().unwrap_or(cnt);
    (cnt, bnd)
}

/// The two-block bound for a self-dual orbit: all splittings of the support
/// into blocks of defects 2 and 3 (defect-free components joining either
/// side), minimised.
pub fn self_dual_bound(d: &OrbitDecomposition, o: usize) -> Option<u64> {
    if !d.comb[o].is_self_dual() {
        return None;
    }
    let support = &d.comb[o].support;
    let defects: Vec<i64> = support.iter().map(|&k| restriction(d, o, &[k]).defect()).collect::<Option<_>>()?;
    let pos: Vec<usize> = (0..support.len()).filter(|&i| defects[i] > 0).collect();
    let zero: Vec<usize> = (0..support.len()).filter(|&i| defects[i] == 0).map(|i| support[i]).collect();
    let mut best: Option<u64> = None;
    for mask in 0u32..1 << pos.len() {
        let sum2: i64 = pos.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| defects[i]).sum();
        if sum2 != 2 {
            continue;
        }
        let part = |want: u32| -> Vec<usize> {
            pos.iter().enumerate().filter(|(b, _)| (mask >> b & 1) == want).map(|(_, &i)| support[i]).collect()
        };
        for zero_side in [1u32, 0] {
            let mut b2 = part(1);
            let mut b3 = part(0);
            if zero_side == 1 { b2.extend(&zero) } else { b3.extend(&zero) }
            b2.sort_unstable();
            b3.sort_unstable();
            let r2 = restriction(d, o, &b2);
            let r3 = restriction(d, o, &b3);
            let bnd3 = match r3.bound(CLIQUE_BUDGET) {
                Some(b) => b,
                None => continue,
            };
            let v = bounds::lemma3_bound(r2.cnt(), r3.cnt(), bnd3);
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    best
}

/// Root-freeness of the span of `lines` together with their duals.
fn root_free(u: &Arc<LineUniverse>, lines: &[usize]) -> bool {
    let s = LineSet::new(u.clone(), lines.iter().flat_map(|&i| [i, u.dual[i]]));
    !s.has_perp_root(s.span())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BruteMethod {
    Full,
    Blocks,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BruteForceBound {
    pub bnd: u64,
    pub sharp: bool,
    pub method: BruteMethod,
}

/// `bnd(𝔬)` by enumerating admissible subsets: a maximum clique of
/// pairwise compatible lines (dual pairs for a self-dual orbit), then a
/// search among cliques with root-free spans to certify or lower it. Beyond
/// the budget, falls back to `bnd(𝔬) ≤ cnt(B_1) max|𝔏(l_1)|` over single
/// component blocks.
pub fn brute_force_bnd(d: &OrbitDecomposition, o: usize, budget: u64) -> Result<BruteForceBound> {
    let u = d.universe().clone();
    let members = &d.comb[o].members;
    let ok_pair = |i: usize, j: usize| matches!(u.product(i, j), 1 | 2);
    let (verts, weight): (Vec<usize>, u64) = if d.comb[o].is_self_dual() {
        (members.iter().copied().filter(|&i| i < u.dual[i]).collect(), 2)
    } else {
        (members.clone(), 1)
    };
    let g = Graph::from_fn(verts.len(), |a, b| {
        let (x, y) = (verts[a], verts[b]);
        ok_pair(x, y) && (weight == 1 || (ok_pair(x, u.dual[y]) && ok_pair(u.dual[x], y)))
    });
    let pairwise = clique::max_clique(&g, budget);
    if pairwise.complete {
        let omega = pairwise.clique.len() as u64 * weight;
        let lines: Vec<usize> = pairwise.clique.iter().map(|&a| verts[a]).collect();
        if root_free(&u, &lines) {
            return Ok(BruteForceBound { bnd: omega, sharp: true, method: BruteMethod::Full });
        }
        let r = clique::max_clique_where(&g, ADMISSIBLE_BUDGET, |c| {
            let lines: Vec<usize> = c.iter().map(|&a| verts[a]).collect();
            root_free(&u, &lines)
        });
        let found = r.clique.len() as u64 * weight;
        return Ok(if r.complete {
            BruteForceBound { bnd: found, sharp: true, method: BruteMethod::Full }
        } else {
            BruteForceBound { bnd: omega, sharp: found == omega, method: BruteMethod::Full }
        });
    }
    // fibres over a single component
    let mut best: Option<u64> = None;
    for &k in &d.comb[o].support {
        let r = restriction(d, o, &[k]);
        let first = block_coords(&u, &u.lines[members[0]], &[k]);
        let fibre: Vec<usize> = members.iter().copied().filter(|&i| block_coords(&u, &u.lines[i], &[k]) == first).collect();
        let fg = Graph::from_fn(fibre.len(), |a, b| ok_pair(fibre[a], fibre[b]));
        let fr = clique::max_clique(&fg, budget);
        if fr.complete {
            let v = r.cnt() * fr.clique.len() as u64;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    best.map(|b| BruteForceBound { bnd: b.min(members.len() as u64), sharp: false, method: BruteMethod::Blocks })
        .ok_or_else(|| Error::Budget(format!("bound of orbit {o} exceeds the brute-force budget")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    NaiveProduct,
    SelfDualLemma,
    BlockBruteForce,
    FullBruteForce,
}

impl Reason {
    pub fn tag(self) -> &'static str {
        match self {
            Reason::NaiveProduct => "naive-product",
            Reason::SelfDualLemma => "self-dual-lemma",
            Reason::BlockBruteForce => "block-brute-force",
            Reason::FullBruteForce => "full-brute-force",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerRow {
    /// 1-based orbit number.
    pub orbit: usize,
    pub multiplicity: usize,
    pub support: Vec<usize>,
    /// `𝕆_n* = 𝕆_n`.
    pub self_dual: bool,
    /// `𝔬* = 𝔬` for its combinatorial orbits.
    pub comb_self_dual: bool,
    pub cnt: u64,
    pub naive: u64,
    pub bnd: u64,
    pub reason: Reason,
    pub sharp: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundLedger {
    pub config: String,
    pub lines: usize,
    pub stab_order: u128,
    pub stab_complete: bool,
    pub rows: Vec<LedgerRow>,
    /// `bnd(𝔬)` for every combinatorial orbit id.
    pub comb_bnd: Vec<u64>,
    /// `Σ m(𝕆_n) cnt`.
    pub total_cnt: u64,
    /// The naive bound `bnd(Orb)` with the improved orbit bounds.
    pub bnd_total: u64,
    /// The same sum with the product bounds only.
    pub naive_total: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct LedgerOptions {
    pub brute_force_budget: u64,
    /// Skip the improvements when the naive total is already below this.
    pub goal: Option<u64>,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions { brute_force_budget: CLIQUE_BUDGET, goal: None }
    }
}

fn ledger_row(d: &OrbitDecomposition, n: usize, improve: bool, budget: u64) -> Result<LedgerRow> {
    let o = d.orbits[n][0];
    let bd = component_blocks(d, o);
    let (cnt, naive) = block_bounds(&bd);
    if cnt != d.comb[o].members.len() as u64 {
        return Err(Error::Inconsistent(format!("orbit {o}: block counts multiply to {cnt}")));
    }
    let mut bnd = naive;
    let mut reason = Reason::NaiveProduct;
    let mut sharp = false;
    if improve {
        if let Some(b) = self_dual_bound(d, o) {
            if b < bnd {
                bnd = b;
                reason = Reason::SelfDualLemma;
            }
        }
        let bf = brute_force_bnd(d, o, budget)?;
        if bf.bnd < bnd || (bf.sharp && bf.bnd == bnd) {
            if bf.bnd < bnd {
                reason = match bf.method {
                    BruteMethod::Full => Reason::FullBruteForce,
                    BruteMethod::Blocks => Reason::BlockBruteForce,
                };
            }
            bnd = bf.bnd;
            sharp = bf.sharp;
        }
    }
    Ok(LedgerRow {
        orbit: n + 1,
        multiplicity: d.orbits[n].len(),
        support: d.comb[o].support.clone(),
        self_dual: d.orbit_is_self_dual(n),
        comb_self_dual: d.comb[o].is_self_dual(),
        cnt,
        naive,
        bnd,
        reason,
        sharp,
    })
}

pub fn compute_ledger(d: &OrbitDecomposition, opts: LedgerOptions) -> Result<BoundLedger> {
    let naive_rows: Vec<LedgerRow> =
        (0..d.orbits.len()).into_par_iter().map(|n| ledger_row(d, n, false, 0)).collect::<Result<_>>()?;
    let naive_total: u64 = naive_rows.iter().map(|r| r.multiplicity as u64 * r.naive).sum();
    let improve = opts.goal.is_none_or(|m| naive_total >= m);
    let rows: Vec<LedgerRow> = if improve {
        (0..d.orbits.len())
            .into_par_iter()
            .map(|n| ledger_row(d, n, true, opts.brute_force_budget))
            .collect::<Result<_>>()?
    } else {
        naive_rows
    };
    let mut comb_bnd = vec![0; d.comb.len()];
    for (n, r) in rows.iter().enumerate() {
        for &c in &d.orbits[n] {
            comb_bnd[c] = r.bnd;
        }
    }
    Ok(BoundLedger {
        config: d.universe().config.label.clone(),
        lines: d.universe().len(),
        stab_order: d.stab_order,
        stab_complete: d.stab_complete,
        total_cnt: rows.iter().map(|r| r.multiplicity as u64 * r.cnt).sum(),
        bnd_total: rows.iter().map(|r| r.multiplicity as u64 * r.bnd).sum(),
        naive_total,
        rows,
        comb_bnd,
    })
}

impl BoundLedger {
    /// Whether the naive bound already rules out the goal.
    pub fn dismissible(&self, goal: u64) -> bool {
        self.bnd_total < goal
    }

    pub const CSV_HEADER: [&'static str; 10] =
        ["orbit", "m", "support", "self_dual", "comb_self_dual", "cnt", "naive", "bnd", "reason", "sharp"];

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.orbit.to_string(),
                    r.multiplicity.to_string(),
                    r.support.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
                    if r.self_dual { "*".into() } else { String::new() },
                    r.comb_self_dual.to_string(),
                    r.cnt.to_string(),
                    r.naive.to_string(),
                    r.bnd.to_string(),
                    r.reason.tag().into(),
                    r.sharp.to_string(),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PolarizedConfig;

    fn decomposition(n: u8) -> OrbitDecomposition {
        let u = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(n).unwrap())).unwrap();
        decompose_orbits(&Symmetry::build(u).unwrap())
    }

    #[test]
    fn config3_dual_pairs_and_ledger() {
        let d = decomposition(3);
        assert_eq!(d.stab_order, 7920);
        assert_eq!(d.orbits.len(), 1);
        assert_eq!(d.dual_pairs_in(0), 55);
        let l = compute_ledger(&d, LedgerOptions::default()).unwrap();
        assert_eq!(l.total_cnt as usize, d.universe().len());
        assert_eq!(l.rows[0].bnd, 2);
        assert_eq!(l.bnd_total, 220);
    }

    #[test]
    fn partition_and_multiplicativity() {
        for n in [1u8, 2] {
            let d = decomposition(n);
            let l = compute_ledger(&d, LedgerOptions::default()).unwrap();
            assert_eq!(l.total_cnt as usize, d.universe().len());
            for r in &l.rows {
                assert!(r.bnd <= r.naive && r.bnd <= r.cnt);
            }
            for c in &d.comb {
                assert_eq!(block_bounds(&component_blocks(&d, c.id)).0, c.members.len() as u64);
            }
        }
    }

    #[test]
    fn self_dual_defects() {
        let d = decomposition(1);
        let u = d.universe().clone();
        let mut seen = 0;
        for c in d.comb.iter().filter(|c| c.is_self_dual()) {
            seen += 1;
            let mut total = 0;
            for &k in &c.support {
                let r = restriction(&d, c.id, &[k]);
                let dk = r.defect().expect("integral defect");
                assert!((0..=5).contains(&dk));
                total += dk;
                for a in &r.values {
                    for b in &r.values {
                        let diff = (dot(a, a) - dot(a, b)) / r.denom2;
                        assert!((0..=dk).contains(&diff));
                    }
                }
                if dk <= 2 {
                    assert!(r.bound(CLIQUE_BUDGET).unwrap() <= dk.max(1) as u64);
                }
            }
            assert_eq!(total, 5);
            let _ = &u;
        }
        assert!(seen > 0);
    }

    #[test]
    fn brute_force_matches_clique_oracle() {
        let d = decomposition(2);
        let u = d.universe().clone();
        for c in d.comb.iter().take(12) {
            let bf = brute_force_bnd(&d, c.id, CLIQUE_BUDGET).unwrap();
            // oracle: largest subset X with X ∪ X* admissible, by subsets
            let m = &c.members;
            let mut best = 0;
            if m.len() <= 16 {
                for mask in 0u32..1 << m.len() {
                    let x: Vec<usize> = (0..m.len()).filter(|&i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                    if x.len() as u64 <= best {
                        continue;
                    }
                    let s = u.set(x.iter().flat_map(|&i| [i, u.dual[i]]));
                    if (!c.is_self_dual() || s.len() == x.len()) && s.is_admissible() {
                        best = x.len() as u64;
                    }
                }
                assert_eq!(bf.bnd, best, "orbit {}", c.id);
                assert!(bf.sharp);
            }
        }
    }
}
