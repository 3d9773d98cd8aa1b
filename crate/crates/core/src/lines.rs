//! The line universe `𝔉(ħ, r̄) = {l ∈ N : l² = 4, l·ħ = 3, l·r̄ = 0}`, the
//! duality `l ↦ ħ - l`, spans and the admissible / complete / saturated /
//! geometric predicates.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PolarizedConfig;
use crate::discriminant::{self, GeometricityReport};
use crate::error::{Error, Result};
use crate::lattice::ExactLattice;
use crate::matrix;
use crate::shortvec;
use crate::sublattice::{form, gram_of_rows, SubLattice};

/// Per-component candidate: numerators in ambient units, square and
/// product with `ħ_k` over `D²`.
#[derive(Debug, Clone)]
struct Candidate {
    coords: Vec<i64>,
    norm: i64,
    hdot: i64,
}

#[derive(Debug)]
pub struct LineUniverse {
    pub config: Arc<PolarizedConfig>,
    /// Ambient numerators, sorted lexicographically.
    pub lines: Vec<Vec<i64>>,
    /// Coordinates in the lattice basis.
    pub coords: Vec<Vec<i64>>,
    pub dual: Vec<usize>,
    index: HashMap<Vec<i64>, usize>,
    pub hbar_coords: Vec<i64>,
    /// Gram matrix of the lattice basis.
    pub gram: Vec<Vec<i64>>,
    /// Coordinates of the roots orthogonal to `ħ`.
    pub perp_roots: Vec<Vec<i64>>,
    products: Option<Vec<i8>>,
}

impl LineUniverse {
    pub fn build(config: Arc<PolarizedConfig>) -> Result<Arc<Self>> {
        let lines = enumerate_lines(&config);
        Self::from_lines(config, lines)
    }

    fn from_lines(config: Arc<PolarizedConfig>, lines: Vec<Vec<i64>>) -> Result<Arc<Self>> {
        let n = &config.lattice;
        let index: HashMap<Vec<i64>, usize> = lines.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let dual = lines
            .iter()
            .map(|l| {
                let d: Vec<i64> = config.hbar.iter().zip(l).map(|(h, x)| h - x).collect();
                index.get(&d).copied().ok_or_else(|| Error::Inconsistent("line set not closed under duality".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let coords: Vec<Vec<i64>> = lines.par_iter().map(|l| n.to_coords(l).expect("line outside the lattice")).collect();
        let hbar_coords = n.to_coords(&config.hbar).expect("ħ in the lattice");
        let perp_roots = n
            .roots()
            .into_iter()
            .filter(|r| n.dot_num(r, &config.hbar) == 0)
            .map(|r| n.to_coords(&r).unwrap())
            .collect();
        let gram = n.gram.clone();
        let mut u = LineUniverse { config, lines, coords, dual, index, hbar_coords, gram, perp_roots, products: None };
        let m = u.lines.len();
        if m <= 6000 {
            let mut p = vec![0i8; m * m];
            let n = &u.config.lattice;
            let rows: Vec<Vec<i8>> = (0..m)
                .into_par_iter()
                .map(|i| (0..m).map(|j| n.idot(&u.lines[i], &u.lines[j]) as i8).collect())
                .collect();
            for (i, r) in rows.into_iter().enumerate() {
                p[i * m..(i + 1) * m].copy_from_slice(&r);
            }
            u.products = Some(p);
        }
        Ok(Arc::new(u))
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn product(&self, i: usize, j: usize) -> i64 {
        match &self.products {
            Some(p) => p[i * self.lines.len() + j] as i64,
            None => self.config.lattice.idot(&self.lines[i], &self.lines[j]),
        }
    }

    pub fn index_of(&self, ambient: &[i64]) -> Option<usize> {
        self.index.get(ambient).copied()
    }

    pub fn dot_coords(&self, x: &[i64], y: &[i64]) -> i64 {
        form(x, &self.gram, y)
    }

    pub fn set(self: &Arc<Self>, members: impl IntoIterator<Item = usize>) -> LineSet {
        LineSet::new(self.clone(), members)
    }

    /// All lines of the universe lying in a sublattice.
    pub fn lines_in(&self, s: &SubLattice) -> Vec<usize> {
        (0..self.len()).filter(|&i| s.contains(&self.coords[i])).collect()
    }

    /// Lines orthogonal to the `ħ^⊥`-projections of the given vectors
    /// (ambient numerators), i.e. with `2 l·v = ħ·v`.
    pub fn orthogonal_to(&self, among: &[usize], vs: &[Vec<i64>]) -> Vec<usize> {
        let n = &self.config.lattice;
        among
            .iter()
            .copied()
            .filter(|&i| vs.iter().all(|v| 2 * n.dot_num(&self.lines[i], v) == n.dot_num(&self.config.hbar, v)))
            .collect()
    }
}

/// Component candidates of square at most 4 by class, sorted by square.
fn component_candidates(config: &PolarizedConfig, k: usize) -> Vec<Vec<Candidate>> {
    let n = &config.lattice;
    let comp = &n.components[k];
    let f = n.denom / comp.denom;
    let hk = n.raw_block(&config.hbar, k).to_vec();
    let rk = config.rbar.as_ref().map(|r| n.raw_block(r, k).to_vec());
    let mut by_class: Vec<Vec<Candidate>> = vec![Vec::new(); comp.num_classes()];
    for v in comp.dual_vectors(num_rational::Ratio::from_integer(4)) {
        let coords: Vec<i64> = v.coords.iter().map(|x| x * f).collect();
        if let Some(r) = &rk {
            if coords.iter().zip(r).map(|(a, b)| a * b).sum::<i64>() != 0 {
                continue;
            }
        }
        let norm = v.norm_num * f * f;
        let hdot = coords.iter().zip(&hk).map(|(a, b)| a * b).sum();
        by_class[v.class].push(Candidate { coords, norm, hdot });
    }
    for c in by_class.iter_mut() {
        c.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
    }
    by_class
}

/// All lines of a configuration, sorted. The search runs over glue words of
/// minimal square at most 4, and within a word over per-component
/// candidates with the budgets `Σ l_k² = 4`, `Σ l_k·ħ_k = 3`.
pub fn enumerate_lines(config: &PolarizedConfig) -> Vec<Vec<i64>> {
    let n = &config.lattice;
    let dd = n.denom * n.denom;
    let ncomp = n.components.len();
    let cands: Vec<Vec<Vec<Candidate>>> = (0..ncomp).map(|k| component_candidates(config, k)).collect();
    let hnorm: Vec<i64> = (0..ncomp)
        .map(|k| {
            let b = n.raw_block(&config.hbar, k);
            b.iter().map(|x| x * x).sum()
        })
        .collect();
    // components by decreasing |ħ_k|²
    let mut order: Vec<usize> = (0..ncomp).collect();
    order.sort_by(|&a, &b| hnorm[b].cmp(&hnorm[a]).then(a.cmp(&b)));
    let hrem: Vec<i64> = (0..=ncomp).map(|i| order[i..].iter().map(|&k| hnorm[k]).sum()).collect();
    let four = num_rational::Ratio::from_integer(4);
    let words: Vec<&Vec<u8>> = n.code.iter().filter(|w| n.word_min_norm(w) <= four).collect();
    let mut out: Vec<Vec<i64>> = words
        .par_iter()
        .flat_map_iter(|w| {
            let lists: Vec<&Vec<Candidate>> = order.iter().map(|&k| &cands[k][w[k] as usize]).collect();
            // minimal square of the remaining components
            let minrem: Vec<i64> = (0..=ncomp)
                .map(|i| lists[i..].iter().fold(0i64, |a, l| a.saturating_add(l.first().map(|c| c.norm).unwrap_or(i64::MAX))))
                .collect();
            let mut found = Vec::new();
            let mut chosen: Vec<&Candidate> = Vec::with_capacity(ncomp);
            word_dfs(0, 4 * dd, 3 * dd, &lists, &minrem, &hrem, &mut chosen, &mut |ch| {
                let mut v = vec![0i64; n.ambient_dim];
                for (i, c) in ch.iter().enumerate() {
                    let k = order[i];
                    v[n.offsets[k]..n.offsets[k] + c.coords.len()].copy_from_slice(&c.coords);
                }
                if config.satisfies_restrictions(&v) {
                    found.push(v);
                }
            });
            found
        })
        .collect();
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn word_dfs<'a>(
    i: usize,
    norm_left: i64,
    prod_left: i64,
    lists: &[&'a Vec<Candidate>],
    minrem: &[i64],
    hrem: &[i64],
    chosen: &mut Vec<&'a Candidate>,
    emit: &mut dyn FnMut(&[&Candidate]),
) {
    if i == lists.len() {
        if norm_left == 0 && prod_left == 0 {
            emit(chosen);
        }
        return;
    }
    if norm_left < minrem[i] {
        return;
    }
    // Cauchy–Schwarz on the remaining components
    if (prod_left as i128) * (prod_left as i128) > norm_left as i128 * hrem[i] as i128 {
        return;
    }
    for c in lists[i].iter() {
        if c.norm.saturating_add(minrem[i + 1]) > norm_left {
            break;
        }
        chosen.push(c);
        word_dfs(i + 1, norm_left - c.norm, prod_left - c.hdot, lists, minrem, hrem, chosen, emit);
        chosen.pop();
    }
}

/// Mild-extension enumeration cap.
pub const MILD_EXTENSION_CAP: usize = 4096;

/// A set of lines of a fixed universe, with lazily cached spans.
#[derive(Debug, Clone)]
pub struct LineSet {
    pub universe: Arc<LineUniverse>,
    /// Sorted indices into the universe.
    pub members: Vec<usize>,
    span_z: OnceLock<SubLattice>,
    span3: OnceLock<SubLattice>,
}

impl PartialEq for LineSet {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && Arc::ptr_eq(&self.universe, &other.universe)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineSetJson {
    pub config_label: String,
    pub denominator: i64,
    pub lines: Vec<Vec<i64>>,
}

impl LineSet {
    pub fn new(universe: Arc<LineUniverse>, members: impl IntoIterator<Item = usize>) -> Self {
        let mut m: Vec<usize> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        LineSet { universe, members: m, span_z: OnceLock::new(), span3: OnceLock::new() }
    }

    /// `𝔉 ∩ s` for a lattice `s` known to be `spn` of the result.
    pub fn with_span(universe: Arc<LineUniverse>, s: SubLattice) -> Self {
        let members = universe.lines_in(&s);
        let set = LineSet { universe, members, span_z: OnceLock::new(), span3: OnceLock::new() };
        let _ = set.span3.set(s);
        set
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.members.iter().all(|&i| self.contains(self.universe.dual[i]))
    }

    /// Pairwise products in `{-1, 1, 2}` for distinct lines, `-1` exactly for
    /// dual pairs.
    pub fn products_ok(&self) -> bool {
        let u = &self.universe;
        for (a, &i) in self.members.iter().enumerate() {
            for &j in &self.members[a + 1..] {
                let p = u.product(i, j);
                let ok = if u.dual[i] == j { p == -1 } else { p == 1 || p == 2 };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn generators(&self) -> Vec<Vec<i64>> {
        let mut g: Vec<Vec<i64>> = self.members.iter().map(|&i| self.universe.coords[i].clone()).collect();
        g.push(self.universe.hbar_coords.clone());
        g
    }

    /// `spn_Z 𝔏 = Z𝔏 + Zħ`.
    pub fn span_z(&self) -> &SubLattice {
        self.span_z.get_or_init(|| SubLattice::new(24, &self.generators()))
    }

    /// `spn_Q 𝔏 ∩ N` (primitive).
    pub fn span_q(&self) -> SubLattice {
        self.span_z().saturation()
    }

    /// `spn 𝔏 = (Z_3 𝔏 + Z_3 ħ) ∩ N`: the overlattice of `spn_Z` by all
    /// torsion of order prime to 3.
    pub fn span(&self) -> &SubLattice {
        self.span3.get_or_init(|| prime_to_3_saturation(self.span_z()))
    }

    pub fn rank(&self) -> usize {
        self.span_z().rank()
    }

    pub fn det_span_z(&self) -> BigInt {
        self.span_z().determinant(&self.universe.gram)
    }

    /// Whether a lattice contains a root orthogonal to `ħ`.
    pub fn has_perp_root(&self, s: &SubLattice) -> bool {
        self.universe.perp_roots.iter().any(|r| s.contains(r))
    }

    /// Symmetric, and `ħ^⊥ ∩ spn 𝔏` is root free.
    pub fn is_admissible(&self) -> bool {
        self.is_symmetric() && self.products_ok() && !self.has_perp_root(self.span())
    }

    /// Independent route: short-vector search in `ħ^⊥ ∩ spn 𝔏`.
    pub fn is_admissible_oracle(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Ok(false);
        }
        let gram = perp_gram(self.span(), &self.universe.hbar_coords, &self.universe.gram);
        Ok(gram.is_empty() || shortvec::count_of_norm(&gram, 2)? == 0)
    }

    /// `𝔉 ∩ spn 𝔏`.
    pub fn closure(&self) -> LineSet {
        LineSet::new(self.universe.clone(), self.universe.lines_in(self.span()))
    }

    pub fn is_complete(&self) -> bool {
        self.universe.lines_in(self.span()) == self.members
    }

    pub fn is_complete_in(&self, s: &SubLattice) -> bool {
        self.universe.lines_in(s) == self.members
    }

    pub fn is_q_complete(&self) -> bool {
        self.universe.lines_in(&self.span_q()) == self.members
    }

    /// All mild extensions of `spn 𝔏`: root-free overlattices inside the
    /// saturation and inside `{v : v·ħ ≡ 0 mod 3}`, reached by index-3 steps.
    pub fn mild_extensions(&self, cap: usize) -> Result<Vec<SubLattice>> {
        mild_extensions_of(self.span(), &self.universe, cap)
    }

    /// Complete in every mild extension.
    pub fn is_saturated(&self) -> Result<bool> {
        Ok(self.mild_extensions(MILD_EXTENSION_CAP)?.iter().all(|s| self.is_complete_in(s)))
    }

    /// The geometric test: admissible, rank ≤ 20, and some mild extension in
    /// which the set is complete passes the prime-wise conditions. Returns
    /// the witnessing extension and its report.
    pub fn geometric_witness(&self) -> Result<Option<(SubLattice, GeometricityReport)>> {
        if self.is_empty() || !self.is_admissible() || self.rank() > 20 {
            return Ok(None);
        }
        let rank = self.rank();
        for s in self.mild_extensions(MILD_EXTENSION_CAP)? {
            if !self.is_complete_in(&s) {
                continue;
            }
            let form = discriminant::discriminant_form(&ExactLattice::new(s.gram(&self.universe.gram))?)?;
            let rep = discriminant::geometricity_check(&form, rank);
            if rep.overall {
                return Ok(Some((s, rep)));
            }
        }
        Ok(None)
    }

    pub fn is_geometric(&self) -> Result<bool> {
        Ok(self.geometric_witness()?.is_some())
    }

    pub fn union(&self, other: &[usize]) -> LineSet {
        LineSet::new(self.universe.clone(), self.members.iter().copied().chain(other.iter().copied()))
    }

    pub fn to_json(&self) -> LineSetJson {
        LineSetJson {
            config_label: self.universe.config.label.clone(),
            denominator: self.universe.config.lattice.denom,
            lines: self.members.iter().map(|&i| self.universe.lines[i].clone()).collect(),
        }
    }

    pub fn from_json(universe: &Arc<LineUniverse>, j: &LineSetJson) -> Result<LineSet> {
        if j.denominator != universe.config.lattice.denom {
            return Err(Error::Invalid("denominator mismatch".into()));
        }
        let idx = j
            .lines
            .iter()
            .map(|l| universe.index_of(l).ok_or_else(|| Error::Invalid("vector is not a line of this configuration".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(universe.set(idx))
    }
}

/// The overlattice of `z` by all torsion of order prime to 3 in `Q z ∩ Z^n`.
pub fn prime_to_3_saturation(z: &SubLattice) -> SubLattice {
    let sat = z.saturation();
    let (d, q) = z.relative_smith(&sat);
    let three = BigInt::from(3);
    let rows: Vec<Vec<BigInt>> = d
        .iter()
        .zip(&q)
        .map(|(di, qi)| {
            let mut p = BigInt::one();
            let mut x = di.clone();
            while (&x % &three).is_zero() {
                x /= &three;
                p *= &three;
            }
            qi.iter().map(|c| c * &p).collect()
        })
        .collect();
    SubLattice::from_big(z.dim, &rows)
}

/// Gram matrix of `h^⊥ ∩ S` for a lattice `S` (coordinates) and `h ∈ S`.
pub fn perp_gram(s: &SubLattice, h: &[i64], g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let col: Vec<Vec<BigInt>> = s.basis.iter().map(|b| vec![BigInt::from(form(b, g, h))]).collect();
    let k = matrix::left_kernel(&col);
    let rows: Vec<Vec<i64>> = k
        .iter()
        .map(|kr| {
            (0..s.dim)
                .map(|c| {
                    let v: BigInt = kr.iter().zip(&s.basis).map(|(a, b)| a * BigInt::from(b[c])).sum();
                    v.to_i64().expect("coordinate overflow")
                })
                .collect()
        })
        .collect();
    gram_of_rows(&rows, g)
}

/// Mild extensions of a lattice `base ⊆ N` (see [`LineSet::mild_extensions`]).
pub fn mild_extensions_of(base: &SubLattice, u: &LineUniverse, cap: usize) -> Result<Vec<SubLattice>> {
    let sat = base.saturation();
    let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(base.basis.clone());
    queue.push_back(base.clone());
    let three = BigInt::from(3);
    while let Some(s) = queue.pop_front() {
        out.push(s.clone());
        if out.len() > cap {
            return Err(Error::Budget(format!("more than {cap} mild extensions")));
        }
        let (d, q) = s.relative_smith(&sat);
        // generators of the 3-torsion of sat/s
        let tors: Vec<Vec<BigInt>> = d
            .iter()
            .zip(&q)
            .filter(|(di, _)| !di.is_one() && (*di % &three).is_zero())
            .map(|(di, qi)| {
                let f = di / &three;
                qi.iter().map(|c| c * &f).collect()
            })
            .collect();
        let m = tors.len();
        if m == 0 {
            continue;
        }
        // one generator per order-3 subgroup: first nonzero coefficient 1
        let total = 3usize.pow(m as u32);
        for code in 1..total {
            let mut a = vec![0i64; m];
            let mut c = code;
            for x in a.iter_mut() {
                *x = (c % 3) as i64;
                c /= 3;
            }
            if a.iter().find(|&&x| x != 0) != Some(&1) {
                continue;
            }
            let x: Vec<i64> = (0..24)
                .map(|j| {
                    let v: BigInt = a.iter().zip(&tors).map(|(ai, t)| BigInt::from(*ai) * &t[j]).sum();
                    v.to_i64().expect("coordinate overflow")
                })
                .collect();
            if form(&x, &u.gram, &u.hbar_coords).rem_euclid(3) != 0 {
                continue;
            }
            let ext = s.extend(&[x]);
            if !seen.insert(ext.basis.clone()) {
                continue;
            }
            if u.perp_roots.iter().any(|r| ext.contains(r)) {
                continue;
            }
            queue.push_back(ext);
        }
    }
    Ok(out)
}

/// Exact rank of the rational span of a set of coordinate rows.
pub fn rank_of(rows: &[Vec<i64>]) -> usize {
    matrix::rank(&matrix::to_big(rows))
}

/// `i64` conversion of a determinant known to be small.
pub fn det_i64(d: &BigInt) -> i64 {
    d.to_i64().unwrap_or(if d > &BigInt::zero() { i64::MAX } else { i64::MIN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golay::{self, GolayCode};

    fn universe(n: u8) -> Arc<LineUniverse> {
        LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(n).unwrap())).unwrap()
    }

    /// Independent count for `24A1` from the code alone: lines are
    /// `½ Σ c_k r_k` with `Σ c_k² = 8`, i.e. signed octads or `±r_i ± r_j`.
    fn golay_line_count(n: u8) -> usize {
        let cfg = PolarizedConfig::builtin_24a1(n).unwrap();
        let gd = cfg.golay.clone().unwrap();
        let h: Vec<i64> = crate::config::a1_coefficients(&cfg.hbar); // 2 ħ_k
        let g = GolayCode::new();
        let mut count = 0;
        let ok = |c: &[i64]| {
            // l·ħ = Σ (c_k/2)(h_k/2)·2 = Σ c_k h_k / 2
            let p: i64 = c.iter().zip(&h).map(|(a, b)| a * b).sum();
            p == 6 && c[gd.rbar] == 0
        };
        for &o in &g.octads {
            let pts = golay::points(o);
            for signs in 0..256u32 {
                let mut c = vec![0i64; 24];
                for (i, &p) in pts.iter().enumerate() {
                    c[p] = if signs >> i & 1 == 1 { -1 } else { 1 };
                }
                count += ok(&c) as usize;
            }
        }
        for i in 0..24 {
            for j in i + 1..24 {
                for (si, sj) in [(2, 2), (2, -2), (-2, 2), (-2, -2)] {
                    let mut c = vec![0i64; 24];
                    c[i] = si;
                    c[j] = sj;
                    count += ok(&c) as usize;
                }
            }
        }
        count
    }

    #[test]
    fn line_counts_match_code_oracle() {
        for n in 1..=3 {
            let u = universe(n);
            assert_eq!(u.len(), golay_line_count(n), "config {n}");
            assert!(u.len() % 2 == 0);
            for i in 0..u.len() {
                assert_eq!(u.dual[u.dual[i]], i);
                assert_ne!(u.dual[i], i);
                assert_eq!(u.product(i, u.dual[i]), -1);
            }
        }
        assert_eq!(universe(3).len(), 440);
    }

    #[test]
    fn config3_lines_are_octads() {
        let u = universe(3);
        let gd = u.config.golay.clone().unwrap();
        for l in &u.lines {
            let c = crate::config::a1_coefficients(l);
            let supp: Vec<usize> = (0..24).filter(|&k| c[k] != 0).collect();
            assert_eq!(supp.len(), 8);
            assert_eq!((golay::mask(&supp) & gd.o).count_ones(), 6);
        }
    }

    #[test]
    fn spans_of_a_dual_pair() {
        let u = universe(3);
        let s = u.set([0, u.dual[0]]);
        assert_eq!(s.rank(), 2);
        assert!(s.is_admissible());
        assert!(s.is_admissible_oracle().unwrap());
        assert!(s.span_z().contains(&u.hbar_coords));
        assert!(s.span().contains_lattice(s.span_z()));
        assert!(s.span_q().contains_lattice(s.span()));
        assert_eq!(s.mild_extensions(16).unwrap().len(), 1);
        let empty = u.set([]);
        assert!(empty.is_admissible());
        assert!(!empty.is_geometric().unwrap());
    }

    #[test]
    fn forbidden_products() {
        let u = universe(3);
        let mut found = false;
        for j in 1..u.len() {
            if u.product(0, j) == 3 || u.product(0, j) == 0 {
                let s = u.set([0, u.dual[0], j, u.dual[j]]);
                assert!(!s.is_admissible());
                assert!(!s.is_admissible_oracle().unwrap());
                found = true;
            }
        }
        assert!(found);
    }
}
