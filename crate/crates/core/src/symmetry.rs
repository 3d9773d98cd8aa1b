//! Symmetries of a configuration acting on its lines.
//!
//! `R_ħ` is the reflection group of the roots orthogonal to all fixed vectors
//! (`ħ`, `r̄`, extra restrictions); per component it is a parabolic subgroup
//! after moving the fixed data to a dominant frame. `stab ħ = O_ħ/R_ħ` is
//! realised as component permutations with diagram automorphisms that keep
//! the glue code and the fixed data up to reflections, lifted to lines by
//! composing with the frame words.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::golay::GolayCode;
use crate::lines::LineUniverse;
use crate::perm::{self, Perm, StabChain};
use crate::roots::RootComponent;

/// Simple reflections of one component, cached.
#[derive(Debug, Clone)]
struct Weyl {
    simple: Vec<Vec<i64>>,
    dd: i64,
}

impl Weyl {
    fn new(c: &RootComponent) -> Self {
        Weyl { simple: c.simple_roots(), dd: c.denom * c.denom }
    }

    fn pair(&self, v: &[i64], i: usize) -> i64 {
        v.iter().zip(&self.simple[i]).map(|(a, b)| a * b).sum::<i64>()
    }

    fn reflect(&self, v: &mut [i64], i: usize) {
        let c = self.pair(v, i) / self.dd;
        if c != 0 {
            for (x, r) in v.iter_mut().zip(&self.simple[i]) {
                *x -= c * r;
            }
        }
    }

    fn apply(&self, v: &[i64], word: &[usize]) -> Vec<i64> {
        let mut x = v.to_vec();
        for &i in word {
            self.reflect(&mut x, i);
        }
        x
    }

    fn apply_inverse(&self, v: &[i64], word: &[usize]) -> Vec<i64> {
        let mut x = v.to_vec();
        for &i in word.iter().rev() {
            self.reflect(&mut x, i);
        }
        x
    }

    fn dominant(&self, v: &[i64], allowed: &[usize]) -> (Vec<i64>, Vec<usize>) {
        let mut x = v.to_vec();
        let mut word = Vec::new();
        while let Some(&i) = allowed.iter().find(|&&i| self.pair(&x, i) < 0) {
            self.reflect(&mut x, i);
            word.push(i);
        }
        (x, word)
    }
}

/// The frame of one component: a Weyl word moving the fixed blocks to
/// successive dominant positions, the simple roots generating their
/// pointwise stabilizer, and the dominant images themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentFrame {
    pub word: Vec<usize>,
    pub allowed: Vec<usize>,
    pub data: Vec<Vec<i64>>,
}

fn frame_of(w: &Weyl, fixed: &[Vec<i64>]) -> ComponentFrame {
    let mut allowed: Vec<usize> = (0..w.simple.len()).collect();
    let mut word = Vec::new();
    let mut data = Vec::new();
    for f in fixed {
        let img = w.apply(f, &word);
        let (d, wd) = w.dominant(&img, &allowed);
        word.extend(wd);
        allowed.retain(|&i| w.pair(&d, i) == 0);
        data.push(d);
    }
    ComponentFrame { word, allowed, data }
}

/// An element of the glue automorphism group: component `j` goes to
/// `sigma[j]` through the diagram isometry `phi[j]` (index into the
/// component's list).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentMap {
    pub sigma: Vec<usize>,
    pub phi: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabMethod {
    /// The stabilizer in M24 of the fixed data (`24A1` only).
    Mathieu,
    /// Backtrack over component permutations and diagram automorphisms.
    Backtrack,
}

pub const STAB_NODE_BUDGET: usize = 400_000;
/// Largest `stab ħ` whose elements are enumerated for canonical forms.
pub const STAB_ELEMENT_CAP: u128 = 200_000;
/// Largest `R_ħ` whose elements are listed for direct minimisation.
pub const R_ELEMENT_CAP: u128 = 1 << 14;

#[derive(Debug)]
pub struct Symmetry {
    pub universe: Arc<LineUniverse>,
    weyl: Vec<Weyl>,
    pub frames: Vec<ComponentFrame>,
    /// Component blocks (component numerators) of every line.
    blocks: Vec<Vec<Vec<i64>>>,
    /// Combinatorial orbit of each line.
    pub comb_of: Vec<usize>,
    /// Combinatorial orbits, each sorted, ordered by smallest line.
    pub comb_orbits: Vec<Vec<usize>>,
    /// Generators of `R_ħ` as permutations of lines.
    pub reflections: Vec<Perm>,
    pub method: StabMethod,
    /// Generators of `stab ħ` as component maps.
    pub stab_maps: Vec<ComponentMap>,
    /// `|stab ħ|`, exact when `stab_complete`.
    pub stab_order: u128,
    /// False when the backtrack ran out of budget; the group found is then a
    /// subgroup.
    pub stab_complete: bool,
    /// `stab ħ` in a faithful permutation representation (on components for
    /// `24A1`, on (component, class) pairs otherwise).
    stab_chain: StabChain,
    stab_abstract_gens: Vec<Perm>,
    /// Lifts of the generators to lines and their action on orbit ids.
    pub stab_line_gens: Vec<Perm>,
    pub stab_orbit_gens: Vec<Perm>,
    r_chain: OnceLock<StabChain>,
    elements: OnceLock<std::result::Result<StabElements, String>>,
    r_elements: OnceLock<Option<Vec<Perm>>>,
}

/// All elements of `stab ħ`, with their action on combinatorial orbits and
/// a word in the lifted generators.
#[derive(Debug)]
pub struct StabElements {
    pub orbit_perms: Vec<Perm>,
    parent: Vec<(usize, usize)>,
}

impl Symmetry {
    pub fn build(universe: Arc<LineUniverse>) -> Result<Arc<Self>> {
        Self::build_with_budget(universe, STAB_NODE_BUDGET)
    }

    pub fn build_with_budget(universe: Arc<LineUniverse>, budget: usize) -> Result<Arc<Self>> {
        let config = universe.config.clone();
        let n = &config.lattice;
        let weyl: Vec<Weyl> = n.components.iter().map(Weyl::new).collect();
        let fixed = config.fixed_vectors();
        let fixed_blocks: Vec<Vec<Vec<i64>>> = (0..n.components.len())
            .map(|k| {
                fixed
                    .iter()
                    .map(|f| n.block(f, k).ok_or_else(|| Error::Invalid("fixed vector outside the dual".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let frames: Vec<ComponentFrame> = weyl.iter().zip(&fixed_blocks).map(|(w, f)| frame_of(w, f)).collect();
        let blocks: Vec<Vec<Vec<i64>>> = universe
            .lines
            .iter()
            .map(|l| (0..n.components.len()).map(|k| n.block(l, k).expect("line outside the dual")).collect())
            .collect();

        // combinatorial orbits by canonical keys
        let mut key_index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut comb_of = Vec::with_capacity(blocks.len());
        let mut comb_orbits: Vec<Vec<usize>> = Vec::new();
        for (i, bl) in blocks.iter().enumerate() {
            let mut key = Vec::new();
            for (k, b) in bl.iter().enumerate() {
                let img = weyl[k].apply(b, &frames[k].word);
                key.extend(weyl[k].dominant(&img, &frames[k].allowed).0);
            }
            let id = *key_index.entry(key).or_insert_with(|| {
                comb_orbits.push(Vec::new());
                comb_orbits.len() - 1
            });
            comb_of.push(id);
            comb_orbits[id].push(i);
        }

        let mut sym = Symmetry {
            universe: universe.clone(),
            weyl,
            frames,
            blocks,
            comb_of,
            comb_orbits,
            reflections: Vec::new(),
            method: StabMethod::Backtrack,
            stab_maps: Vec::new(),
            stab_order: 1,
            stab_complete: true,
            stab_chain: StabChain::new(1, &[]),
            stab_abstract_gens: Vec::new(),
            stab_line_gens: Vec::new(),
            stab_orbit_gens: Vec::new(),
            r_chain: OnceLock::new(),
            elements: OnceLock::new(),
            r_elements: OnceLock::new(),
        };
        sym.reflections = sym.reflection_perms()?;
        if n.key == "24A1" {
            sym.mathieu_stab(&fixed_blocks);
        } else {
            sym.backtrack_stab(&fixed_blocks, budget);
        }
        sym.stab_line_gens = sym.stab_maps.iter().map(|m| sym.lift_map(m)).collect::<Result<_>>()?;
        sym.stab_orbit_gens = sym.stab_line_gens.iter().map(|g| sym.orbit_action(g)).collect();
        Ok(Arc::new(sym))
    }

    pub fn num_lines(&self) -> usize {
        self.blocks.len()
    }

    fn assemble(&self, blocks: &[Vec<i64>]) -> Vec<i64> {
        let n = &self.universe.config.lattice;
        let mut out = vec![0i64; n.ambient_dim];
        for (k, b) in blocks.iter().enumerate() {
            let f = n.denom / n.components[k].denom;
            for (i, x) in b.iter().enumerate() {
                out[n.offsets[k] + i] = x * f;
            }
        }
        out
    }

    fn line_perm(&self, image: impl Fn(&[Vec<i64>]) -> Vec<Vec<i64>> + Sync) -> Result<Perm> {
        self.blocks
            .iter()
            .map(|bl| {
                let v = self.assemble(&image(bl));
                self.universe
                    .index_of(&v)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Inconsistent("symmetry does not preserve the line set".into()))
            })
            .collect()
    }

    fn reflection_perms(&self) -> Result<Vec<Perm>> {
        let mut out = Vec::new();
        for (k, fr) in self.frames.iter().enumerate() {
            for &j in &fr.allowed {
                let w = &self.weyl[k];
                let p = self.line_perm(|bl| {
                    let mut nb = bl.to_vec();
                    let mut x = w.apply(&bl[k], &fr.word);
                    w.reflect(&mut x, j);
                    nb[k] = w.apply_inverse(&x, &fr.word);
                    nb
                })?;
                if !perm::is_identity(&p) && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Per-component canonical data of the fixed vectors: what a component
    /// map has to preserve.
    fn canonical_data(&self) -> Vec<Vec<Vec<i64>>> {
        self.frames.iter().map(|f| f.data.clone()).collect()
    }

    fn mathieu_stab(&mut self, _fixed_blocks: &[Vec<Vec<i64>>]) {
        self.method = StabMethod::Mathieu;
        let gens: Vec<Perm> = GolayCode::m24_generators().iter().map(|p| perm::from_usize(p)).collect();
        let m24 = StabChain::with_known_order(24, &gens, &[], 244_823_040, 11);
        let data = self.canonical_data();
        let mut ids: Vec<Vec<Vec<i64>>> = Vec::new();
        let tags: Vec<u8> = data
            .iter()
            .map(|d| match ids.iter().position(|x| x == d) {
                Some(i) => i as u8,
                None => {
                    ids.push(d.clone());
                    (ids.len() - 1) as u8
                }
            })
            .collect();
        // stabilize the colour classes one at a time, smallest first, as point
        // sets (each orbit has at most C(24, 12) elements); the largest class
        // is then fixed as well
        let mut classes: Vec<u32> =
            (0..ids.len() as u8).map(|t| (0..24).filter(|&k| tags[k] == t).fold(0u32, |m, k| m | 1 << k)).collect();
        classes.sort_by_key(|m| (m.count_ones().min(24 - m.count_ones()), *m));
        classes.pop();
        let mut st = m24;
        for mask in classes {
            st = perm::stabilizer(&st, mask, |g, &m| (0..24).filter(|&k| m >> k & 1 == 1).fold(0u32, |a, k| a | 1 << g[k]))
                .1;
        }
        self.stab_order = st.order();
        self.stab_abstract_gens = st.strong_generators();
        self.stab_maps = self
            .stab_abstract_gens
            .iter()
            .map(|g| ComponentMap { sigma: g.iter().map(|&x| x as usize).collect(), phi: vec![0; 24] })
            .collect();
        self.stab_chain = st;
    }

    fn class_points(&self) -> (Vec<usize>, usize) {
        let n = &self.universe.config.lattice;
        let mut off = Vec::new();
        let mut t = 0;
        for c in &n.components {
            off.push(t);
            t += c.num_classes();
        }
        (off, t)
    }

    fn abstract_perm(&self, m: &ComponentMap) -> Perm {
        let n = &self.universe.config.lattice;
        let (off, total) = self.class_points();
        let mut p = vec![0u32; total];
        for (j, c) in n.components.iter().enumerate() {
            let iso = &c.diagram_isometries()[m.phi[j]];
            let act = c.class_action(iso);
            for (a, &b) in act.iter().enumerate() {
                p[off[j] + a] = (off[m.sigma[j]] + b) as u32;
            }
        }
        p
    }

    fn backtrack_stab(&mut self, fixed_blocks: &[Vec<Vec<i64>>], budget: usize) {
        let n = self.universe.config.lattice.clone();
        let c = n.components.len();
        let isos: Vec<_> = n.components.iter().map(|x| x.diagram_isometries()).collect();
        let class_acts: Vec<Vec<Vec<usize>>> =
            n.components.iter().zip(&isos).map(|(x, is)| is.iter().map(|g| x.class_action(g)).collect()).collect();
        // compat[j] = (k, phi) pairs carrying the fixed data of j to that of k
        let mut compat: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c];
        for j in 0..c {
            for k in 0..c {
                let (a, b) = (&n.components[j], &n.components[k]);
                if a.kind != b.kind || a.n != b.n {
                    continue;
                }
                for (pi, g) in isos[j].iter().enumerate() {
                    let moved: Vec<Vec<i64>> = fixed_blocks[j].iter().map(|f| g.apply(f)).collect();
                    if frame_of(&self.weyl[k], &moved).data == self.frames[k].data {
                        compat[j].push((k, pi));
                    }
                }
            }
        }
        let (_, total) = self.class_points();
        let mut found: Vec<ComponentMap> = Vec::new();
        let mut abstract_gens: Vec<Perm> = Vec::new();
        let mut chain = StabChain::new(total, &[]);
        let mut nodes = 0usize;
        let mut complete = true;
        let mut sigma = vec![usize::MAX; c];
        let mut phi = vec![0usize; c];
        let mut used = vec![false; c];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            j: usize,
            s: &mut Symmetry,
            n: &crate::niemeier::NiemeierLattice,
            compat: &[Vec<(usize, usize)>],
            class_acts: &[Vec<Vec<usize>>],
            sigma: &mut Vec<usize>,
            phi: &mut Vec<usize>,
            used: &mut Vec<bool>,
            nodes: &mut usize,
            budget: usize,
            complete: &mut bool,
            found: &mut Vec<ComponentMap>,
            gens: &mut Vec<Perm>,
            chain: &mut StabChain,
            total: usize,
        ) {
            *nodes += 1;
            if *nodes > budget {
                *complete = false;
                return;
            }
            let c = sigma.len();
            if j == c {
                let ok = n.code.iter().all(|w| {
                    let mut img = vec![0u8; c];
                    for (a, &x) in w.iter().enumerate() {
                        img[sigma[a]] = class_acts[a][phi[a]][x as usize] as u8;
                    }
                    n.is_glue_word(&img)
                });
                if ok {
                    let m = ComponentMap { sigma: sigma.clone(), phi: phi.clone() };
                    let p = s.abstract_perm(&m);
                    if !chain.contains(&p) {
                        gens.push(p);
                        found.push(m);
                        *chain = StabChain::new(total, gens);
                    }
                }
                return;
            }
            for &(k, pi) in &compat[j] {
                if used[k] {
                    continue;
                }
                used[k] = true;
                sigma[j] = k;
                phi[j] = pi;
                rec(j + 1, s, n, compat, class_acts, sigma, phi, used, nodes, budget, complete, found, gens, chain, total);
                used[k] = false;
                if !*complete {
                    return;
                }
            }
        }
        rec(
            0,
            self,
            &n,
            &compat,
            &class_acts,
            &mut sigma,
            &mut phi,
            &mut used,
            &mut nodes,
            budget,
            &mut complete,
            &mut found,
            &mut abstract_gens,
            &mut chain,
            total,
        );
        self.method = StabMethod::Backtrack;
        self.stab_order = chain.order();
        self.stab_complete = complete;
        self.stab_maps = found;
        self.stab_abstract_gens = abstract_gens;
        self.stab_chain = chain;
    }

    /// The lift of a component map to a permutation of lines: on each
    /// component, the diagram isometry followed by the Weyl element taking
    /// the moved fixed data back to the fixed data.
    pub fn lift_map(&self, m: &ComponentMap) -> Result<Perm> {
        let n = &self.universe.config.lattice;
        let c = n.components.len();
        let fixed = self.universe.config.fixed_vectors();
        let mut per: Vec<(crate::roots::DiagramIsometry, Vec<usize>)> = Vec::with_capacity(c);
        for j in 0..c {
            let k = m.sigma[j];
            let g = n.components[j].diagram_isometries()[m.phi[j]].clone();
            let moved: Vec<Vec<i64>> = fixed.iter().map(|f| g.apply(&n.block(f, j).unwrap())).collect();
            let fr = frame_of(&self.weyl[k], &moved);
            if fr.data != self.frames[k].data {
                return Err(Error::Inconsistent("component map does not preserve the fixed data".into()));
            }
            per.push((g, fr.word));
        }
        self.line_perm(|bl| {
            let mut out = vec![Vec::new(); c];
            for j in 0..c {
                let k = m.sigma[j];
                let (g, wg) = &per[j];
                let x = self.weyl[k].apply(&g.apply(&bl[j]), wg);
                out[k] = self.weyl[k].apply_inverse(&x, &self.frames[k].word);
            }
            out
        })
    }

    /// Action of a line permutation on combinatorial orbit ids.
    pub fn orbit_action(&self, g: &[u32]) -> Perm {
        self.comb_orbits.iter().map(|o| self.comb_of[g[o[0]] as usize] as u32).collect()
    }

    /// `R_ħ` as a permutation group on lines.
    pub fn r_group(&self) -> &StabChain {
        self.r_chain.get_or_init(|| StabChain::new(self.num_lines(), &self.reflections))
    }

    /// Order of `R_ħ` restricted to lines.
    pub fn r_order(&self) -> u128 {
        self.r_group().order()
    }

    /// Order of `R_ħ` itself: the product of the parabolic subgroup orders.
    pub fn r_order_abstract(&self) -> u128 {
        let n = &self.universe.config.lattice;
        self.frames
            .iter()
            .zip(&n.components)
            .map(|(f, c)| parabolic_order(c, &f.allowed))
            .product()
    }

    /// All elements of `stab ħ` (via the abstract representation), each with
    /// its permutation of combinatorial orbits.
    pub fn stab_elements(&self) -> Result<&StabElements> {
        self.elements
            .get_or_init(|| {
                if self.stab_order > STAB_ELEMENT_CAP {
                    return Err(format!("|stab ħ| = {} exceeds the element cap", self.stab_order));
                }
                let deg = self.stab_chain.degree;
                let mut index: HashMap<Perm, usize> = HashMap::new();
                let mut elems: Vec<Perm> = vec![perm::identity(deg)];
                let mut orbit_perms: Vec<Perm> = vec![perm::identity(self.comb_orbits.len())];
                let mut parent = vec![(usize::MAX, usize::MAX)];
                index.insert(elems[0].clone(), 0);
                let mut k = 0;
                while k < elems.len() {
                    for (gi, g) in self.stab_abstract_gens.iter().enumerate() {
                        let e = perm::compose(g, &elems[k]);
                        if !index.contains_key(&e) {
                            index.insert(e.clone(), elems.len());
                            orbit_perms.push(perm::compose(&self.stab_orbit_gens[gi], &orbit_perms[k]));
                            parent.push((k, gi));
                            elems.push(e);
                        }
                    }
                    k += 1;
                }
                Ok(StabElements { orbit_perms, parent })
            })
            .as_ref()
            .map_err(|e| Error::Budget(e.clone()))
    }

    /// The lift of the `i`-th element of `stab ħ` to lines (well defined up
    /// to `R_ħ`).
    pub fn element_line_perm(&self, el: &StabElements, mut i: usize) -> Perm {
        let mut word = Vec::new();
        while el.parent[i].0 != usize::MAX {
            word.push(el.parent[i].1);
            i = el.parent[i].0;
        }
        // element = g_{w_last} ... applied in BFS order: e = g ∘ parent
        let mut p = perm::identity(self.num_lines());
        for &g in word.iter().rev() {
            p = perm::compose(&self.stab_line_gens[g], &p);
        }
        p
    }

    /// `|𝔏 ∩ 𝔬|` for every combinatorial orbit.
    pub fn pattern_of(&self, set: &[usize]) -> Vec<u32> {
        let mut p = vec![0u32; self.comb_orbits.len()];
        for &i in set {
            p[self.comb_of[i]] += 1;
        }
        p
    }

    /// The canonical image of a line set under `R_ħ`: orbit by orbit, the
    /// smallest image of the current intersection under the stabilizer of
    /// everything fixed so far.
    pub fn canonical_r(&self, set: &[usize]) -> Vec<usize> {
        if let Some(els) = self.r_elements() {
            return els
                .iter()
                .map(|g| {
                    let mut y: Vec<usize> = set.iter().map(|&i| g[i] as usize).collect();
                    y.sort_unstable();
                    y
                })
                .min()
                .unwrap_or_default();
        }
        self.canonical_r_chain(set)
    }

    /// All elements of `R_ħ` as line permutations, when `|R_ħ| ≤
    /// R_ELEMENT_CAP`.
    pub fn r_elements(&self) -> Option<&[Perm]> {
        self.r_elements
            .get_or_init(|| {
                let g = self.r_group();
                (g.order() <= R_ELEMENT_CAP).then(|| g.elements())
            })
            .as_deref()
    }

    /// [`Symmetry::canonical_r`] through stabilizer chains, for large `R_ħ`.
    pub fn canonical_r_chain(&self, set: &[usize]) -> Vec<usize> {
        let n = self.num_lines();
        let mut cur = vec![false; n];
        for &i in set {
            cur[i] = true;
        }
        let mut g = self.r_group().clone();
        for orb in &self.comb_orbits {
            let x: Vec<u32> = orb.iter().filter(|&&i| cur[i]).map(|&i| i as u32).collect();
            if x.is_empty() || x.len() == orb.len() || g.order() == 1 {
                continue;
            }
            let gens = g.strong_generators();
            if gens.iter().all(|s| orb.iter().all(|&i| s[i] as usize == i)) {
                continue;
            }
            // orbit of x with transporting elements
            let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
            let mut sets = vec![x.clone()];
            let mut reps = vec![perm::identity(n)];
            seen.insert(x, 0);
            let mut k = 0;
            while k < sets.len() {
                for s in &gens {
                    let mut y: Vec<u32> = sets[k].iter().map(|&p| s[p as usize]).collect();
                    y.sort_unstable();
                    if !seen.contains_key(&y) {
                        seen.insert(y.clone(), sets.len());
                        reps.push(perm::compose(s, &reps[k]));
                        sets.push(y);
                    }
                }
                k += 1;
            }
            let best = (0..sets.len()).min_by(|&a, &b| sets[a].cmp(&sets[b])).unwrap();
            if best != 0 {
                let t = &reps[best];
                let mut next = vec![false; n];
                for i in 0..n {
                    if cur[i] {
                        next[t[i] as usize] = true;
                    }
                }
                cur = next;
            }
            let target = sets[best].clone();
            let (_, st) = perm::stabilizer(&g, target, |h, s: &Vec<u32>| {
                let mut y: Vec<u32> = s.iter().map(|&p| h[p as usize]).collect();
                y.sort_unstable();
                y
            });
            g = st;
        }
        (0..n).filter(|&i| cur[i]).collect()
    }

    /// The canonical image of a line set under `O_ħ = R_ħ ⋊ stab ħ`: the
    /// smallest `R_ħ`-canonical image over the elements of `stab ħ` that
    /// minimise the pattern.
    pub fn canonical(&self, set: &[usize]) -> Result<Vec<usize>> {
        let el = self.stab_elements()?;
        let pat = self.pattern_of(set);
        let moved = |p: &Perm| {
            let mut q = vec![0u32; pat.len()];
            for (o, &v) in pat.iter().enumerate() {
                q[p[o] as usize] = v;
            }
            q
        };
        let mut best_pat: Option<Vec<u32>> = None;
        let mut cands = Vec::new();
        for (i, p) in el.orbit_perms.iter().enumerate() {
            let q = moved(p);
            match &best_pat {
                Some(b) if q > *b => {}
                Some(b) if q == *b => cands.push(i),
                _ => {
                    best_pat = Some(q);
                    cands = vec![i];
                }
            }
        }
        let mut best: Option<Vec<usize>> = None;
        for i in cands {
            let g = self.element_line_perm(el, i);
            let img: Vec<usize> = set.iter().map(|&x| g[x] as usize).collect();
            let c = self.canonical_r(&img);
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
        Ok(best.unwrap_or_default())
    }

    /// Canonical representative of a pattern under `stab ħ`.
    pub fn canonical_pattern(&self, pat: &[u32]) -> Result<Vec<u32>> {
        let el = self.stab_elements()?;
        Ok(el
            .orbit_perms
            .iter()
            .map(|p| {
                let mut q = vec![0u32; pat.len()];
                for (o, &v) in pat.iter().enumerate() {
                    q[p[o] as usize] = v;
                }
                q
            })
            .min()
            .unwrap_or_else(|| pat.to_vec()))
    }

    /// Duality on orbit ids.
    pub fn dual_orbit(&self, o: usize) -> usize {
        self.comb_of[self.universe.dual[self.comb_orbits[o][0]]]
    }

    /// Support of a combinatorial orbit: components where its lines are
    /// nonzero.
    pub fn support(&self, o: usize) -> Vec<usize> {
        let bl = &self.blocks[self.comb_orbits[o][0]];
        (0..bl.len()).filter(|&k| bl[k].iter().any(|&x| x != 0)).collect()
    }

    /// Component blocks of a line.
    pub fn blocks_of(&self, line: usize) -> &[Vec<i64>] {
        &self.blocks[line]
    }

    /// The dominant frame of component `k`.
    pub fn frame(&self, k: usize) -> &ComponentFrame {
        &self.frames[k]
    }
}

/// Order of the parabolic subgroup of a component's Weyl group generated by
/// the given simple roots: product over the connected pieces.
pub fn parabolic_order(c: &RootComponent, allowed: &[usize]) -> u128 {
    let w = Weyl::new(c);
    // Cartan entries among the allowed simple roots
    let adj = |a: usize, b: usize| {
        let s: i64 = w.simple[a].iter().zip(&w.simple[b]).map(|(x, y)| x * y).sum();
        s != 0
    };
    let mut seen = vec![false; allowed.len()];
    let mut total: u128 = 1;
    for s in 0..allowed.len() {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            for t in 0..allowed.len() {
                if !seen[t] && adj(allowed[comp[k]], allowed[t]) {
                    seen[t] = true;
                    comp.push(t);
                }
            }
            k += 1;
        }
        let idx: Vec<usize> = comp.iter().map(|&i| allowed[i]).collect();
        total *= irreducible_weyl_order(&w, &idx);
    }
    total
}

/// Weyl group order of a connected simple subsystem, identified by its rank
/// and the number of roots it generates.
fn irreducible_weyl_order(w: &Weyl, idx: &[usize]) -> u128 {
    let r = idx.len() as u128;
    // count positive roots by closing the simple roots under reflections
    let mut roots: Vec<Vec<i64>> = idx.iter().map(|&i| w.simple[i].clone()).collect();
    let mut k = 0;
    while k < roots.len() {
        for &i in idx {
            let mut y = roots[k].clone();
            w.reflect(&mut y, i);
            if !roots.contains(&y) {
                roots.push(y);
            }
        }
        k += 1;
    }
    let m = roots.len() as u128; // all roots
    let fact = |n: u128| (1..=n).product::<u128>();
    // A_r: r(r+1) roots; D_r: 2r(r-1); E6/7/8: 72/126/240
    if m == r * (r + 1) {
        fact(r + 1)
    } else if r >= 4 && m == 2 * r * (r - 1) {
        (1u128 << (r - 1)) * fact(r)
    } else {
        match (r, m) {
            (6, 72) => 51_840,
            (7, 126) => 2_903_040,
            (8, 240) => 696_729_600,
            _ => panic!("unexpected simply-laced subsystem of rank {r} with {m} roots"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PolarizedConfig;

    fn sym(n: u8) -> Arc<Symmetry> {
        let u = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(n).unwrap())).unwrap();
        Symmetry::build(u).unwrap()
    }

    #[test]
    fn mathieu_stabilizers() {
        for (n, st, r) in [(1u8, 5760u128, 20u32), (2, 1344, 14), (3, 7920, 11)] {
            let s = sym(n);
            assert_eq!(s.stab_order, st, "config {n}");
            assert_eq!(s.r_order_abstract(), 1u128 << r, "config {n}");
            // orbit actions are permutations and commute with duality
            for g in &s.stab_orbit_gens {
                let mut v = g.clone();
                v.sort();
                assert_eq!(v, perm::identity(s.comb_orbits.len()));
                for o in 0..s.comb_orbits.len() {
                    assert_eq!(s.dual_orbit(g[o] as usize), g[s.dual_orbit(o)] as usize);
                }
            }
        }
    }

    #[test]
    fn config3_orbits() {
        let s = sym(3);
        assert_eq!(s.comb_orbits.len(), 110);
        assert!(s.comb_orbits.iter().all(|o| o.len() == 4));
        assert_eq!(s.r_order(), 1 << 11);
        assert!((0..110).all(|o| s.dual_orbit(o) != o));
    }

    #[test]
    fn canonical_forms_are_invariant() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let s = sym(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let el = s.stab_elements().unwrap();
        for _ in 0..6 {
            let mut set: Vec<usize> = (0..s.num_lines()).collect();
            set.shuffle(&mut rng);
            set.truncate(rng.gen_range(3..25));
            let c = s.canonical(&set).unwrap();
            // random element of R_ħ composed with a random stab element
            let mut g = perm::identity(s.num_lines());
            for _ in 0..10 {
                let r = &s.reflections[rng.gen_range(0..s.reflections.len())];
                g = perm::compose(r, &g);
            }
            let e = s.element_line_perm(el, rng.gen_range(0..el.orbit_perms.len()));
            g = perm::compose(&e, &g);
            let img: Vec<usize> = set.iter().map(|&x| g[x] as usize).collect();
            assert_eq!(s.canonical(&img).unwrap(), c);
            assert_eq!(s.canonical_r(&set).len(), set.len());
            // both R_ħ routes are invariants
            let mut r = perm::identity(s.num_lines());
            for _ in 0..7 {
                r = perm::compose(&s.reflections[rng.gen_range(0..s.reflections.len())], &r);
            }
            let rimg: Vec<usize> = set.iter().map(|&x| r[x] as usize).collect();
            assert_eq!(s.canonical_r(&rimg), s.canonical_r(&set));
            assert_eq!(s.canonical_r_chain(&rimg), s.canonical_r_chain(&set));
        }
    }
}
