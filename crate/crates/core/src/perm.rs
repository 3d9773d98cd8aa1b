//! Permutation groups: Schreier–Sims stabilizer chains, orbit–stabilizer for
//! arbitrary actions, and backtrack search for set images.

use std::collections::HashMap;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A permutation of `0..n` stored as its image list.
pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

/// `a ∘ b`: apply `b` first.
pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Perm {
    let mut r = vec![0u32; a.len()];
    for (i, &x) in a.iter().enumerate() {
        r[x as usize] = i as u32;
    }
    r
}

pub fn is_identity(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

pub fn from_usize(p: &[usize]) -> Perm {
    p.iter().map(|&x| x as u32).collect()
}

/// Orbits of the group generated by `gens` on `0..n`, each sorted, listed by
/// smallest point.
pub fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orb = vec![s as u32];
        let mut k = 0;
        while k < orb.len() {
            let x = orb[k] as usize;
            k += 1;
            for g in gens {
                let y = g[x] as usize;
                if !seen[y] {
                    seen[y] = true;
                    orb.push(y as u32);
                }
            }
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out
}

#[derive(Debug, Clone)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `trans[x] = u` with `u(base) = x`, for `x` in the orbit.
    trans: Vec<Option<Perm>>,
}

impl Level {
    fn new(n: usize, base: u32) -> Self {
        let mut trans = vec![None; n];
        trans[base as usize] = Some(identity(n));
        Level { base, gens: vec![], orbit: vec![base], trans }
    }

    fn rebuild(&mut self, n: usize) {
        self.trans = vec![None; n];
        self.trans[self.base as usize] = Some(identity(n));
        self.orbit = vec![self.base];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            k += 1;
            for g in &self.gens {
                let y = g[x as usize];
                if self.trans[y as usize].is_none() {
                    let u = compose(g, self.trans[x as usize].as_ref().unwrap());
                    self.trans[y as usize] = Some(u);
                    self.orbit.push(y);
                }
            }
        }
    }
}

/// A base and strong generating set with explicit transversals.
#[derive(Debug, Clone)]
pub struct StabChain {
    pub degree: usize,
    levels: Vec<Level>,
    /// The generators the chain was built from.
    pub gens: Vec<Perm>,
}

impl StabChain {
    /// Deterministic Schreier–Sims.
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        Self::with_base(degree, gens, &[])
    }

    /// Deterministic Schreier–Sims with a prescribed base prefix.
    pub fn with_base(degree: usize, gens: &[Perm], prefix: &[u32]) -> Self {
        let gens: Vec<Perm> = gens.iter().filter(|g| !is_identity(g)).cloned().collect();
        let mut ch = StabChain { degree, levels: Vec::new(), gens: gens.clone() };
        for &b in prefix {
            ch.levels.push(Level::new(degree, b));
        }
        if gens.is_empty() {
            return ch;
        }
        for g in &gens {
            ch.insert_strong(g.clone(), 0);
        }
        ch.complete();
        ch
    }

    /// Random Schreier–Sims, terminating once the chain reaches the known
    /// group order; falls back to the deterministic closure otherwise.
    pub fn with_known_order(degree: usize, gens: &[Perm], prefix: &[u32], order: u128, seed: u64) -> Self {
        let gens: Vec<Perm> = gens.iter().filter(|g| !is_identity(g)).cloned().collect();
        let mut ch = StabChain { degree, levels: Vec::new(), gens: gens.clone() };
        for &b in prefix {
            ch.levels.push(Level::new(degree, b));
        }
        if gens.is_empty() {
            return ch;
        }
        for g in &gens {
            ch.insert_strong(g.clone(), 0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // product replacement state
        let mut state: Vec<Perm> = gens.clone();
        while state.len() < 10 {
            let k = state.len() % gens.len();
            state.push(gens[k].clone());
        }
        let mut acc = identity(degree);
        let mut fails = 0;
        while ch.order() < order && fails < 200 {
            let i = rng.gen_range(0..state.len());
            let mut j = rng.gen_range(0..state.len());
            if i == j {
                j = (j + 1) % state.len();
            }
            state[i] = if rng.gen_bool(0.5) { compose(&state[i], &state[j]) } else { compose(&state[j], &state[i]) };
            acc = compose(&acc, &state[i]);
            let (res, lvl) = ch.strip(&acc, 0);
            if lvl < ch.levels.len() || !is_identity(&res) {
                ch.insert_strong(res, 0);
                fails = 0;
            } else {
                fails += 1;
            }
        }
        if ch.order() != order {
            ch.complete();
        }
        ch
    }

    /// Adds a strong generator to all levels from `from` down to the level it
    /// stops fixing base points, extending the base if needed.
    fn insert_strong(&mut self, g: Perm, from: usize) {
        let mut l = from;
        loop {
            if l == self.levels.len() {
                let b = g.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32).unwrap();
                self.levels.push(Level::new(self.degree, b));
            }
            self.levels[l].gens.push(g.clone());
            self.levels[l].rebuild(self.degree);
            if g[self.levels[l].base as usize] != self.levels[l].base {
                break;
            }
            l += 1;
        }
    }

    /// Sifts `g` starting at level `from`; returns the residue and the level
    /// where sifting stopped (`levels.len()` if it went through).
    fn strip(&self, g: &[u32], from: usize) -> (Perm, usize) {
        let mut h = g.to_vec();
        for (l, lev) in self.levels.iter().enumerate().skip(from) {
            let x = h[lev.base as usize];
            match &lev.trans[x as usize] {
                None => return (h, l),
                Some(u) => h = compose(&inverse(u), &h),
            }
        }
        let n = self.levels.len();
        (h, n)
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        'outer: loop {
            let lev = &self.levels[i];
            let orbit = lev.orbit.clone();
            let gens = lev.gens.clone();
            for &x in &orbit {
                let ux = self.levels[i].trans[x as usize].clone().unwrap();
                for s in &gens {
                    let y = s[x as usize];
                    let uy = self.levels[i].trans[y as usize].as_ref().unwrap();
                    let h = compose(&inverse(uy), &compose(s, &ux));
                    if is_identity(&h) {
                        continue;
                    }
                    let (res, j) = self.strip(&h, i + 1);
                    if j < self.levels.len() || !is_identity(&res) {
                        self.insert_strong(res, i + 1);
                        i = j.min(self.levels.len() - 1);
                        continue 'outer;
                    }
                }
            }
            if i == 0 {
                break;
            }
            i -= 1;
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        let (res, _) = self.strip(g, 0);
        is_identity(&res)
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Strong generators of the pointwise stabilizer of the first `i` base
    /// points.
    pub fn level_generators(&self, i: usize) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in self.levels.iter().skip(i) {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// All elements; only sensible for small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![identity(self.degree)];
        for lev in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lev.orbit.len());
            for &x in &lev.orbit {
                let u = lev.trans[x as usize].as_ref().unwrap();
                for h in &out {
                    next.push(compose(u, h));
                }
            }
            out = next;
        }
        out
    }

    /// Some `g` with `g(a) = b` for point sets given as membership masks.
    pub fn set_image(&self, a: &[bool], b: &[bool]) -> Option<Perm> {
        if a.iter().filter(|&&x| x).count() != b.iter().filter(|&&x| x).count() {
            return None;
        }
        let level_orbits: Vec<Vec<Vec<u32>>> = (0..=self.levels.len())
            .map(|i| {
                let gens = if i < self.levels.len() { self.levels[i].gens.clone() } else { vec![] };
                orbits(self.degree, &gens)
            })
            .collect();
        let p = identity(self.degree);
        self.set_image_rec(0, &p, a, b, &level_orbits)
    }

    fn set_image_rec(&self, i: usize, p: &Perm, a: &[bool], b: &[bool], lo: &[Vec<Vec<u32>>]) -> Option<Perm> {
        // remaining elements h of the level-i group must map a onto p^{-1}(b)
        let pinv = inverse(p);
        let mut bb = vec![false; self.degree];
        for (x, &m) in b.iter().enumerate() {
            if m {
                bb[pinv[x] as usize] = true;
            }
        }
        for orb in &lo[i] {
            let ca = orb.iter().filter(|&&x| a[x as usize]).count();
            let cb = orb.iter().filter(|&&x| bb[x as usize]).count();
            if ca != cb {
                return None;
            }
        }
        if i == self.levels.len() {
            return Some(p.clone());
        }
        let lev = &self.levels[i];
        let want = a[lev.base as usize];
        for &x in &lev.orbit {
            if bb[x as usize] != want {
                continue;
            }
            let u = lev.trans[x as usize].as_ref().unwrap();
            let q = compose(p, u);
            if let Some(g) = self.set_image_rec(i + 1, &q, a, b, lo) {
                return Some(g);
            }
        }
        None
    }
}

/// Stabilizer of `x` under an action of the group with chain `g`, by
/// orbit–stabilizer with Schreier generators. Returns the orbit size and
/// the stabilizer chain.
pub fn stabilizer<T, F>(g: &StabChain, x: T, act: F) -> (usize, StabChain)
where
    T: Hash + Eq + Clone,
    F: Fn(&Perm, &T) -> T,
{
    let n = g.degree;
    let gens = g.strong_generators();
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut pts: Vec<T> = vec![x.clone()];
    // Schreier tree: point k is gens[tree[k].1] applied to point tree[k].0
    let mut tree: Vec<(u32, u32)> = vec![(0, u32::MAX)];
    index.insert(x, 0);
    let mut k = 0;
    while k < pts.len() {
        for (si, s) in gens.iter().enumerate() {
            let y = act(s, &pts[k]);
            if !index.contains_key(&y) {
                index.insert(y.clone(), pts.len());
                tree.push((k as u32, si as u32));
                pts.push(y);
            }
        }
        k += 1;
    }
    let rep = |mut k: usize| {
        let mut r = identity(n);
        while tree[k].1 != u32::MAX {
            r = compose(&r, &gens[tree[k].1 as usize]);
            k = tree[k].0 as usize;
        }
        r
    };
    let target = g.order() / pts.len() as u128;
    let mut hgens: Vec<Perm> = Vec::new();
    let mut h = StabChain::new(n, &hgens);
    'done: for k in 0..pts.len() {
        let rk = rep(k);
        for s in &gens {
            if h.order() >= target {
                break 'done;
            }
            let y = act(s, &pts[k]);
            let j = index[&y];
            let sg = compose(&inverse(&rep(j)), &compose(s, &rk));
            if !h.contains(&sg) {
                hgens.push(sg);
                h = StabChain::with_known_order(n, &hgens, &[], target, 7);
            }
        }
    }
    (pts.len(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golay::GolayCode;

    fn sym(n: usize) -> Vec<Perm> {
        let mut cyc: Perm = (1..n as u32).collect();
        cyc.push(0);
        let mut tr = identity(n);
        tr.swap(0, 1);
        vec![cyc, tr]
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..8 {
            let ch = StabChain::new(n, &sym(n));
            assert_eq!(ch.order(), (1..=n as u128).product::<u128>());
        }
        let ch = StabChain::new(5, &[]);
        assert_eq!(ch.order(), 1);
    }

    #[test]
    fn m24_order() {
        let gens: Vec<Perm> = GolayCode::m24_generators().iter().map(|p| from_usize(p)).collect();
        let ch = StabChain::new(24, &gens);
        assert_eq!(ch.order(), 244_823_040);
        let rnd = StabChain::with_known_order(24, &gens, &[0, 1, 2], 244_823_040, 1);
        assert_eq!(rnd.order(), 244_823_040);
        assert!(gens.iter().all(|g| rnd.contains(g)));
    }

    #[test]
    fn stabilizer_of_point_and_set() {
        let ch = StabChain::new(6, &sym(6));
        let (orb, st) = stabilizer(&ch, 0u32, |g, &x| g[x as usize]);
        assert_eq!(orb, 6);
        assert_eq!(st.order(), 120);
        let (orb, st) = stabilizer(&ch, vec![0u32, 1], |g, s| {
            let mut t: Vec<u32> = s.iter().map(|&x| g[x as usize]).collect();
            t.sort();
            t
        });
        assert_eq!(orb, 15);
        assert_eq!(st.order(), 48);
    }

    #[test]
    fn set_images() {
        let ch = StabChain::with_base(6, &sym(6), &[0, 1, 2]);
        let a = [true, true, false, false, false, false];
        let b = [false, false, false, true, false, true];
        let g = ch.set_image(&a, &b).unwrap();
        assert!(b[g[0] as usize] && b[g[1] as usize]);
        // cyclic group of order 6 cannot map {0,1} to {0,2}
        let cyc = StabChain::new(6, &sym(6)[..1]);
        let c = [true, false, true, false, false, false];
        assert!(cyc.set_image(&a, &c).is_none());
        assert!(cyc.set_image(&a, &[false, true, true, false, false, false]).is_some());
        assert_eq!(cyc.elements().len(), 6);
    }
}
