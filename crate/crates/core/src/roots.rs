//! Coordinate models of the irreducible root lattices.
//!
//! `A_n` lives in the sum-zero hyperplane of `Z^{n+1}`, `D_n` in `Z^n`, and
//! `E_8` in `Z^8` as `D_8 ∪ (D_8 + (1/2)^8)`; `E_7` and `E_6` are the
//! orthogonal complements in `E_8` of `e7+e8` and of `{e6-e7, e7+e8}`.
//! Vectors of the dual lattice are integer numerators over the component
//! denominator `denom`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, Q64};
use crate::error::{Error, Result};
use crate::lattice::ExactLattice;
use crate::matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootKind {
    A,
    D,
    E,
}

#[derive(Debug, Clone)]
pub struct RootComponent {
    pub kind: RootKind,
    pub n: usize,
    /// Dimension of the ambient coordinate space.
    pub dim: usize,
    /// Common denominator of dual-lattice coordinates.
    pub denom: i64,
    /// Representatives of the discriminant classes (numerators), class 0 first.
    pub class_reps: Vec<Vec<i64>>,
    /// `add[i][j]` = class of `rep_i + rep_j`.
    pub add: Vec<Vec<usize>>,
    /// Minimal square in each class.
    pub class_min: Vec<Q64>,
    /// Orthogonality constraints cutting out the subspace (E-types).
    constraints: Vec<Vec<i64>>,
}

/// A dual vector with cached class and square.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualVector {
    pub coords: Vec<i64>,
    pub class: usize,
    /// Square times `denom^2`.
    pub norm_num: i64,
}

impl RootComponent {
    pub fn new(kind: RootKind, n: usize) -> Result<Self> {
        match kind {
            RootKind::A if n >= 1 => Ok(Self::build_a(n)),
            RootKind::D if n >= 4 => Ok(Self::build_d(n)),
            RootKind::E if (6..=8).contains(&n) => Ok(Self::build_e(n)),
            _ => Err(Error::Invalid(format!("no root system {kind:?}{n}"))),
        }
    }

    pub fn name(&self) -> String {
        format!("{:?}{}", self.kind, self.n)
    }

    fn build_a(n: usize) -> Self {
        let d = n as i64 + 1;
        // class k: the vector e_o - (k/(n+1))·1 with o = first k coordinates
        let class_reps: Vec<Vec<i64>> =
            (0..d).map(|k| (0..d).map(|i| if i < k { d - k } else { -k }).collect()).collect();
        let add = (0..d as usize).map(|i| (0..d as usize).map(|j| (i + j) % d as usize).collect()).collect();
        let class_min = (0..d).map(|k| Q64::new(k * (d - k), d)).collect();
        RootComponent {
            kind: RootKind::A,
            n,
            dim: n + 1,
            denom: d,
            class_reps,
            add,
            class_min,
            constraints: vec![],
        }
    }

    fn build_d(n: usize) -> Self {
        let s = vec![1i64; n];
        let zero = vec![0i64; n];
        let mut v = vec![0i64; n];
        v[0] = 2;
        let mut c = vec![1i64; n];
        c[n - 1] = -1;
        let class_reps = vec![zero, s, v, c];
        let mut comp = RootComponent {
            kind: RootKind::D,
            n,
            dim: n,
            denom: 2,
            class_reps,
            add: vec![],
            class_min: vec![
                Q64::from_integer(0),
                Q64::new(n as i64, 4),
                Q64::from_integer(1),
                Q64::new(n as i64, 4),
            ],
            constraints: vec![],
        };
        comp.fill_add_table();
        comp
    }

    fn build_e(n: usize) -> Self {
        let constraints: Vec<Vec<i64>> = match n {
            8 => vec![],
            7 => vec![vec![0, 0, 0, 0, 0, 0, 2, 2]],
            _ => vec![vec![0, 0, 0, 0, 0, 2, -2, 0], vec![0, 0, 0, 0, 0, 0, 2, 2]],
        };
        let denom = match n {
            8 | 7 => 2,
            _ => 6,
        };
        let mut comp = RootComponent {
            kind: RootKind::E,
            n,
            dim: 8,
            denom,
            class_reps: vec![vec![0; 8]],
            add: vec![],
            class_min: vec![Q64::from_integer(0)],
            constraints,
        };
        if n < 8 {
            // classes are represented by the projections of E8 roots that leave E8
            let mut best: Vec<(Vec<i64>, i64)> = Vec::new();
            for r in e8_vectors(2) {
                let p = comp.project(&r);
                if comp.in_e8(&p) {
                    continue;
                }
                let nn: i64 = p.iter().map(|x| x * x).sum();
                best.push((p, nn));
            }
            let m = best.iter().map(|b| b.1).min().unwrap();
            best.retain(|b| b.1 == m);
            best.sort();
            // group by class: difference lies in E8
            let mut reps: Vec<Vec<i64>> = Vec::new();
            for (p, _) in &best {
                if !reps.iter().any(|r| {
                    let d: Vec<i64> = p.iter().zip(r).map(|(a, b)| a - b).collect();
                    comp.in_e8(&d)
                }) {
                    reps.push(p.clone());
                }
            }
            // for E6 order the two classes as g, 2g
            if reps.len() == 2 {
                let twice: Vec<i64> = reps[0].iter().map(|x| 2 * x).collect();
                let d: Vec<i64> = twice.iter().zip(&reps[1]).map(|(a, b)| a - b).collect();
                if !comp.in_e8(&d) {
                    reps.swap(0, 1);
                }
            }
            let mq = Q64::new(m, denom * denom);
            for r in reps {
                comp.class_reps.push(r);
                comp.class_min.push(mq);
            }
        }
        comp.fill_add_table();
        comp
    }

    fn fill_add_table(&mut self) {
        let h = self.class_reps.len();
        let mut add = vec![vec![0; h]; h];
        for i in 0..h {
            for j in 0..h {
                let s: Vec<i64> =
                    self.class_reps[i].iter().zip(&self.class_reps[j]).map(|(a, b)| a + b).collect();
                add[i][j] = self.class_of(&s).expect("sum of dual vectors is dual");
            }
        }
        self.add = add;
    }

    /// Orthogonal projection onto the constraint subspace (numerators over `denom`),
    /// for an E8 vector given over denominator 2.
    fn project(&self, v2: &[i64]) -> Vec<i64> {
        let f = self.denom / 2;
        let mut v: Vec<Q64> = v2.iter().map(|&x| Q64::new(x * f, 1)).collect();
        // Gram-Schmidt on constraints (over Q)
        let mut basis: Vec<Vec<Q64>> = Vec::new();
        for c in &self.constraints {
            let mut w: Vec<Q64> = c.iter().map(|&x| Q64::from_integer(x)).collect();
            for b in &basis {
                let num: Q64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                let den: Q64 = b.iter().map(|y| y * y).sum();
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= num / den * y;
                }
            }
            basis.push(w);
        }
        for b in &basis {
            let num: Q64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            let den: Q64 = b.iter().map(|y| y * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= num / den * y;
            }
        }
        v.iter()
            .map(|x| {
                assert!(x.is_integer(), "projection denominator exceeds component denominator");
                x.to_integer()
            })
            .collect()
    }

    /// Whether a vector (numerators over `denom`) lies in E8.
    fn in_e8(&self, v: &[i64]) -> bool {
        let f = self.denom / 2;
        if v.iter().any(|x| x % f != 0) {
            return false;
        }
        let y: Vec<i64> = v.iter().map(|x| x / f).collect();
        e8_contains(&y)
    }

    fn in_subspace(&self, v: &[i64]) -> bool {
        match self.kind {
            RootKind::A => v.iter().sum::<i64>() == 0,
            RootKind::D => true,
            RootKind::E => self.constraints.iter().all(|c| c.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() == 0),
        }
    }

    /// Discriminant class of a vector, or `None` if it is not in the dual lattice.
    pub fn class_of(&self, v: &[i64]) -> Option<usize> {
        if v.len() != self.dim || !self.in_subspace(v) {
            return None;
        }
        let d = self.denom;
        match self.kind {
            RootKind::A => {
                let r = v[0].rem_euclid(d);
                if v.iter().any(|x| x.rem_euclid(d) != r) {
                    return None;
                }
                Some(((d - r) % d) as usize)
            }
            RootKind::D => {
                let odd = v[0].rem_euclid(2);
                if v.iter().any(|x| x.rem_euclid(2) != odd) {
                    return None;
                }
                if odd == 0 {
                    let s: i64 = v.iter().map(|x| x / 2).sum();
                    Some(if s.rem_euclid(2) == 0 { 0 } else { 2 })
                } else {
                    let s: i64 = v.iter().map(|x| (x - 1) / 2).sum();
                    Some(if s.rem_euclid(2) == 0 { 1 } else { 3 })
                }
            }
            RootKind::E => {
                for (k, r) in self.class_reps.iter().enumerate() {
                    let diff: Vec<i64> = v.iter().zip(r).map(|(a, b)| a - b).collect();
                    if self.in_e8(&diff) {
                        return Some(k);
                    }
                }
                None
            }
        }
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn neg_class(&self, c: usize) -> usize {
        (0..self.num_classes()).find(|&j| self.add[c][j] == 0).unwrap()
    }

    pub fn norm(&self, v: &[i64]) -> Q64 {
        Q64::new(v.iter().map(|x| x * x).sum(), self.denom * self.denom)
    }

    /// All roots (vectors of square 2 in the root lattice).
    pub fn roots(&self) -> Vec<Vec<i64>> {
        let d = self.denom;
        match self.kind {
            RootKind::A => {
                let m = self.n + 1;
                let mut out = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        if i != j {
                            let mut v = vec![0; m];
                            v[i] = d;
                            v[j] = -d;
                            out.push(v);
                        }
                    }
                }
                out
            }
            RootKind::D => {
                let m = self.n;
                let mut out = Vec::new();
                for i in 0..m {
                    for j in i + 1..m {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            let mut v = vec![0; m];
                            v[i] = 2 * si;
                            v[j] = 2 * sj;
                            out.push(v);
                        }
                    }
                }
                out
            }
            RootKind::E => {
                let f = d / 2;
                e8_vectors(2)
                    .into_iter()
                    .map(|r| r.iter().map(|x| x * f).collect::<Vec<i64>>())
                    .filter(|v| self.in_subspace(v))
                    .collect()
            }
        }
    }

    /// A basis of the root lattice in ambient numerators.
    pub fn basis(&self) -> Vec<Vec<i64>> {
        let h = matrix::hnf(&matrix::to_big(&self.roots()));
        matrix::to_i64(&h).unwrap()
    }

    pub fn lattice(&self) -> ExactLattice {
        let b = self.basis();
        let dd = self.denom * self.denom;
        let gram = b
            .iter()
            .map(|x| b.iter().map(|y| x.iter().zip(y).map(|(a, c)| a * c).sum::<i64>() / dd).collect())
            .collect();
        ExactLattice::new(gram).unwrap()
    }

    pub fn determinant(&self) -> BigInt {
        self.lattice().determinant()
    }

    /// All dual vectors of square at most `bound`.
    pub fn dual_vectors(&self, bound: Q64) -> Vec<DualVector> {
        let d = self.denom;
        let mut out = Vec::new();
        match self.kind {
            RootKind::A => {
                let m = self.n + 1;
                for k in 0..d {
                    // integer m_i with Σ m = k and Σ m² - k²/(n+1) ≤ bound
                    let lim = bound + Q64::new(k * k, d);
                    let lim = lim.floor().to_integer();
                    let mut cur = vec![0i64; m];
                    a_rec(0, m, k, lim, &mut cur, &mut |ms: &[i64]| {
                        let coords: Vec<i64> = ms.iter().map(|&x| d * x - k).collect();
                        let nn = coords.iter().map(|x| x * x).sum();
                        out.push(DualVector { coords, class: ((d - k) % d) as usize, norm_num: nn });
                    });
                }
            }
            RootKind::D => {
                let lim = (bound * 4).floor().to_integer();
                for parity in 0..2 {
                    let mut cur = vec![0i64; self.n];
                    d_rec(0, self.n, parity, lim, &mut cur, &mut |ys: &[i64]| {
                        let nn: i64 = ys.iter().map(|x| x * x).sum();
                        let c = self.class_of(ys).unwrap();
                        out.push(DualVector { coords: ys.to_vec(), class: c, norm_num: nn });
                    });
                }
            }
            RootKind::E => {
                let f = d / 2;
                let bf = bound.numer().clone() as f64 / *bound.denom() as f64;
                for (k, rep) in self.class_reps.iter().enumerate() {
                    let rn = (rep.iter().map(|x| x * x).sum::<i64>() as f64).sqrt() / d as f64;
                    let wb = (bf.sqrt() + rn).powi(2) + 1e-9;
                    let lim2 = (wb * 4.0).floor() as i64;
                    for w in e8_vectors_bounded(lim2) {
                        let v: Vec<i64> = w.iter().zip(rep).map(|(a, b)| a * f + b).collect();
                        if !self.in_subspace(&v) {
                            continue;
                        }
                        let nn: i64 = v.iter().map(|x| x * x).sum();
                        if Q64::new(nn, d * d) <= bound {
                            out.push(DualVector { coords: v, class: k, norm_num: nn });
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.coords.cmp(&b.coords));
        out.dedup();
        out
    }

    /// Dominant dual vectors (nonnegative combinations of fundamental
    /// weights) of square at most `bound`: one per Weyl orbit.
    pub fn dominant_weights(&self, bound: Q64) -> Vec<DualVector> {
        use num_rational::BigRational;
        use num_traits::ToPrimitive;
        let simple = self.simple_roots();
        let r = simple.len();
        let dd = self.denom * self.denom;
        let cartan: Vec<Vec<BigRational>> = (0..r)
            .map(|i| (0..r).map(|j| BigRational::from_integer(self.pair(&simple[i], &simple[j]).into())).collect())
            .collect();
        let cinv: Vec<Vec<Q64>> = matrix::inverse_q(&cartan)
            .expect("Cartan matrix is invertible")
            .iter()
            .map(|row| row.iter().map(|x| Q64::new(x.numer().to_i64().unwrap(), x.denom().to_i64().unwrap())).collect())
            .collect();
        let mut out = Vec::new();
        let mut m = vec![0i64; r];
        fn rec(i: usize, m: &mut Vec<i64>, norm: Q64, cinv: &[Vec<Q64>], bound: Q64, f: &mut dyn FnMut(&[i64], Q64)) {
            if i == m.len() {
                f(m, norm);
                return;
            }
            let mut cur = norm;
            loop {
                rec(i + 1, m, cur, cinv, bound, f);
                // all entries of the inverse Cartan matrix are positive, so the
                // square only grows as later coefficients are added
                let mut delta = cinv[i][i];
                for j in 0..m.len() {
                    delta += cinv[i][j] * (2 * m[j]);
                }
                if cur + delta > bound {
                    break;
                }
                m[i] += 1;
                cur += delta;
            }
            m[i] = 0;
        }
        let mut collect = |ms: &[i64], norm: Q64| {
            let mut coords = vec![Q64::from_integer(0); self.dim];
            for j in 0..r {
                let c: Q64 = (0..r).map(|i| cinv[i][j] * ms[i]).sum();
                for (x, s) in coords.iter_mut().zip(&simple[j]) {
                    *x += c * *s;
                }
            }
            let coords: Vec<i64> = coords.iter().map(|x| x.to_integer()).collect();
            let nn = coords.iter().map(|x| x * x).sum::<i64>();
            debug_assert_eq!(Q64::new(nn, dd), norm);
            let class = self.class_of(&coords).expect("weight lies in the dual lattice");
            out.push(DualVector { coords, class, norm_num: nn });
        };
        rec(0, &mut m, Q64::from_integer(0), &cinv, bound, &mut collect);
        out.sort_by(|a, b| a.coords.cmp(&b.coords));
        out
    }

    /// Shortest vectors in a discriminant class.
    pub fn shortest_class_vectors(&self, class: usize) -> Vec<Vec<i64>> {
        let m = self.class_min[class];
        self.class_vectors_of_norm(class, m)
    }

    /// Vectors of square `min + 2` in a discriminant class.
    pub fn second_shortest_class_vectors(&self, class: usize) -> Vec<Vec<i64>> {
        let m = self.class_min[class] + Q64::from_integer(2);
        self.class_vectors_of_norm(class, m)
    }

    fn class_vectors_of_norm(&self, class: usize, m: Q64) -> Vec<Vec<i64>> {
        let dd = self.denom * self.denom;
        if self.kind == RootKind::A && m == self.class_min[class] {
            // direct construction: e_o with |o| = k
            let k = class;
            let d = self.denom;
            let mut out = Vec::new();
            for o in subsets(self.n + 1, k) {
                out.push((0..self.n + 1).map(|i| if o & (1 << i) != 0 { d - k as i64 } else { -(k as i64) }).collect());
            }
            out.sort();
            return out;
        }
        self.dual_vectors(m)
            .into_iter()
            .filter(|v| v.class == class && Q64::new(v.norm_num, dd) == m)
            .map(|v| v.coords)
            .collect()
    }

    /// Simple roots (numerators over `denom`).
    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        let d = self.denom;
        let m = self.dim;
        let unit = |i: usize, j: usize, si: i64, sj: i64| {
            let mut v = vec![0i64; m];
            v[i] += si * d;
            v[j] += sj * d;
            v
        };
        match self.kind {
            RootKind::A => (0..self.n).map(|i| unit(i, i + 1, 1, -1)).collect(),
            RootKind::D => {
                let mut out: Vec<Vec<i64>> = (0..self.n - 1).map(|i| unit(i, i + 1, 1, -1)).collect();
                out.push(unit(self.n - 2, self.n - 1, 1, 1));
                out
            }
            RootKind::E => {
                let f = d / 2;
                let mut out = vec![vec![f, -f, -f, -f, -f, -f, -f, f], unit(0, 1, 1, 1)];
                for i in 0..6 {
                    out.push(unit(i + 1, i, 1, -1));
                }
                out.truncate(self.n);
                out
            }
        }
    }

    /// Integer pairing of a dual vector with a root (both numerators).
    pub fn pair(&self, v: &[i64], root: &[i64]) -> i64 {
        let s: i64 = v.iter().zip(root).map(|(a, b)| a * b).sum();
        s / (self.denom * self.denom)
    }

    pub fn reflect(&self, v: &[i64], root: &[i64]) -> Vec<i64> {
        let c = self.pair(v, root);
        v.iter().zip(root).map(|(a, b)| a - c * b).collect()
    }

    /// The dominant element of the Weyl orbit of `v` relative to the simple
    /// roots indexed by `allowed` (all if `None`), and the reflection word
    /// (simple root indices, applied left to right) reaching it.
    pub fn dominant(&self, v: &[i64], allowed: Option<&[usize]>) -> (Vec<i64>, Vec<usize>) {
        let simple = self.simple_roots();
        let idx: Vec<usize> = match allowed {
            Some(a) => a.to_vec(),
            None => (0..simple.len()).collect(),
        };
        let mut x = v.to_vec();
        let mut word = Vec::new();
        loop {
            let neg = idx.iter().copied().find(|&i| x.iter().zip(&simple[i]).map(|(a, b)| a * b).sum::<i64>() < 0);
            match neg {
                Some(i) => {
                    x = self.reflect(&x, &simple[i]);
                    word.push(i);
                }
                None => return (x, word),
            }
        }
    }

    pub fn apply_word(&self, v: &[i64], word: &[usize]) -> Vec<i64> {
        let simple = self.simple_roots();
        word.iter().fold(v.to_vec(), |x, &i| self.reflect(&x, &simple[i]))
    }

    pub fn apply_word_inverse(&self, v: &[i64], word: &[usize]) -> Vec<i64> {
        let simple = self.simple_roots();
        word.iter().rev().fold(v.to_vec(), |x, &i| self.reflect(&x, &simple[i]))
    }

    /// Simple roots orthogonal to a vector.
    pub fn orthogonal_simple(&self, v: &[i64]) -> Vec<usize> {
        let simple = self.simple_roots();
        (0..simple.len()).filter(|&i| v.iter().zip(&simple[i]).map(|(a, b)| a * b).sum::<i64>() == 0).collect()
    }

    /// Representatives of the outer (diagram) automorphisms as isometries.
    pub fn diagram_isometries(&self) -> Vec<DiagramIsometry> {
        let m = self.dim;
        let id = DiagramIsometry::scaled_identity(m, 1);
        match (self.kind, self.n) {
            (RootKind::A, 1) | (RootKind::E, 7) | (RootKind::E, 8) => vec![id],
            (RootKind::A, _) | (RootKind::E, 6) => vec![id, DiagramIsometry::scaled_identity(m, -1)],
            (RootKind::D, n) => {
                let mut flip = DiagramIsometry::scaled_identity(m, 1);
                flip.mat[n - 1][n - 1] = -1;
                if n != 4 {
                    return vec![id, flip];
                }
                let h = DiagramIsometry {
                    mat: vec![vec![1, 1, 1, 1], vec![1, 1, -1, -1], vec![1, -1, 1, -1], vec![1, -1, -1, 1]],
                    scale: 2,
                };
                // close {h, flip} under composition: the symmetric group on the three nonzero classes
                let mut all = vec![id];
                let mut k = 0;
                while k < all.len() {
                    for g in [&h, &flip] {
                        let c = g.compose(&all[k]);
                        if !all.contains(&c) {
                            all.push(c);
                        }
                    }
                    k += 1;
                }
                all
            }
            _ => vec![id],
        }
    }

    /// Class permutation induced by an isometry.
    pub fn class_action(&self, g: &DiagramIsometry) -> Vec<usize> {
        self.class_reps.iter().map(|r| self.class_of(&g.apply(r)).expect("isometry preserves the dual")).collect()
    }

    /// Expected root count by type.
    pub fn expected_root_count(&self) -> usize {
        let n = self.n;
        match (self.kind, n) {
            (RootKind::A, _) => n * (n + 1),
            (RootKind::D, _) => 2 * n * (n - 1),
            (RootKind::E, 6) => 72,
            (RootKind::E, 7) => 126,
            _ => 240,
        }
    }

    /// Shortest-vector count in class `k` of `A_n` per the subset model.
    pub fn a_class_count(n: usize, k: usize) -> u64 {
        binomial(n as u64 + 1, k as u64)
    }
}

/// An isometry of a component given by an integer matrix divided by `scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramIsometry {
    pub mat: Vec<Vec<i64>>,
    pub scale: i64,
}

impl DiagramIsometry {
    pub fn scaled_identity(m: usize, sign: i64) -> Self {
        DiagramIsometry { mat: (0..m).map(|i| (0..m).map(|j| if i == j { sign } else { 0 }).collect()).collect(), scale: 1 }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.mat.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() / self.scale).collect()
    }

    pub fn compose(&self, other: &DiagramIsometry) -> DiagramIsometry {
        let m = self.mat.len();
        let mut mat = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                mat[i][j] = (0..m).map(|k| self.mat[i][k] * other.mat[k][j]).sum();
            }
        }
        let mut scale = self.scale * other.scale;
        // normalize: divide out common factors
        let g = mat.iter().flatten().fold(scale, |g, &x| crate::arith::gcd_i64(g, x));
        if g > 1 {
            for row in mat.iter_mut() {
                for x in row.iter_mut() {
                    *x /= g;
                }
            }
            scale /= g;
        }
        DiagramIsometry { mat, scale }
    }
}

fn subsets(m: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..m {
            if m - i < k {
                break;
            }
            rec(i + 1, m, k - 1, cur | 1 << i, out);
        }
    }
    rec(0, m, k, 0, &mut out);
    out
}

/// Integer vectors with prescribed sum and bounded square sum.
fn a_rec(i: usize, m: usize, rem_sum: i64, rem_norm: i64, cur: &mut [i64], f: &mut dyn FnMut(&[i64])) {
    if i == m {
        if rem_sum == 0 {
            f(cur);
        }
        return;
    }
    let left = (m - i) as i64;
    // remaining entries must realize rem_sum: Σ x² ≥ |Σ x| and ≥ (Σx)²/left
    if rem_norm < rem_sum.abs() || rem_norm * left < rem_sum * rem_sum {
        return;
    }
    let r = (rem_norm as f64).sqrt() as i64 + 1;
    for x in -r..=r {
        if x * x > rem_norm {
            continue;
        }
        cur[i] = x;
        a_rec(i + 1, m, rem_sum - x, rem_norm - x * x, cur, f);
    }
    cur[i] = 0;
}

/// Numerator vectors over 2 with all entries of the given parity.
fn d_rec(i: usize, m: usize, parity: i64, rem: i64, cur: &mut [i64], f: &mut dyn FnMut(&[i64])) {
    if i == m {
        f(cur);
        return;
    }
    let min_rest = if parity == 1 { (m - i) as i64 } else { 0 };
    if rem < min_rest {
        return;
    }
    let r = (rem as f64).sqrt() as i64 + 1;
    for x in -r..=r {
        if x.rem_euclid(2) != parity || x * x > rem {
            continue;
        }
        cur[i] = x;
        d_rec(i + 1, m, parity, rem - x * x, cur, f);
    }
    cur[i] = 0;
}

/// Membership in E8 for numerators over 2.
pub fn e8_contains(y: &[i64]) -> bool {
    let p = y[0].rem_euclid(2);
    if y.iter().any(|x| x.rem_euclid(2) != p) {
        return false;
    }
    let s: i64 = y.iter().sum();
    if p == 0 {
        (s / 2).rem_euclid(2) == 0
    } else {
        s.rem_euclid(4) == 0
    }
}

/// E8 vectors of square exactly `norm` (numerators over 2).
pub fn e8_vectors(norm: i64) -> Vec<Vec<i64>> {
    e8_vectors_bounded(4 * norm).into_iter().filter(|v| v.iter().map(|x| x * x).sum::<i64>() == 4 * norm).collect()
}

/// E8 vectors with `Σ y² ≤ lim` (numerators `y` over 2).
pub fn e8_vectors_bounded(lim: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for parity in 0..2 {
        let mut cur = vec![0i64; 8];
        d_rec(0, 8, parity, lim, &mut cur, &mut |y: &[i64]| {
            if e8_contains(y) {
                out.push(y.to_vec());
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_and_dets() {
        for (k, n) in [(RootKind::A, 1), (RootKind::A, 5), (RootKind::D, 4), (RootKind::D, 7), (RootKind::E, 6), (RootKind::E, 7), (RootKind::E, 8)] {
            let c = RootComponent::new(k, n).unwrap();
            assert_eq!(c.roots().len(), c.expected_root_count(), "{}", c.name());
            let expected_det = match (k, n) {
                (RootKind::A, n) => n as i64 + 1,
                (RootKind::D, _) => 4,
                (RootKind::E, n) => 9 - n as i64,
            };
            assert_eq!(c.determinant(), BigInt::from(expected_det), "{}", c.name());
            assert_eq!(c.num_classes() as i64, expected_det);
        }
        assert_eq!(RootComponent::new(RootKind::A, 2).unwrap().roots().len(), 6);
        assert_eq!(RootComponent::new(RootKind::D, 24).unwrap().roots().len(), 1104);
        assert!(RootComponent::new(RootKind::E, 9).is_err());
    }

    #[test]
    fn class_minima() {
        let a5 = RootComponent::new(RootKind::A, 5).unwrap();
        let v = a5.shortest_class_vectors(2);
        assert_eq!(v.len(), 15);
        assert!(v.iter().all(|x| a5.norm(x) == Q64::new(4, 3)));
        assert_eq!(a5.shortest_class_vectors(0), vec![vec![0; 6]]);
        let d8 = RootComponent::new(RootKind::D, 8).unwrap();
        let s = d8.shortest_class_vectors(1);
        assert_eq!(s.len(), 128);
        assert!(s.iter().all(|x| d8.norm(x) == Q64::from_integer(2)));
        let e6 = RootComponent::new(RootKind::E, 6).unwrap();
        assert_eq!(e6.shortest_class_vectors(1).len(), 27);
        assert_eq!(e6.class_min[1], Q64::new(4, 3));
        let e7 = RootComponent::new(RootKind::E, 7).unwrap();
        assert_eq!(e7.shortest_class_vectors(1).len(), 56);
        assert_eq!(e7.class_min[1], Q64::new(3, 2));
    }

    #[test]
    fn second_shortest() {
        let a2 = RootComponent::new(RootKind::A, 2).unwrap();
        let v = a2.second_shortest_class_vectors(1);
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| a2.norm(x) == Q64::new(8, 3)));
        let d5 = RootComponent::new(RootKind::D, 5).unwrap();
        let v = d5.second_shortest_class_vectors(1);
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| d5.norm(x) == Q64::new(13, 4)));
        let roots = d5.second_shortest_class_vectors(0);
        assert_eq!(roots.len(), 40);
    }

    #[test]
    fn dominant_weights_match_orbit_reduction() {
        for (k, n, b) in [(RootKind::A, 4, 4), (RootKind::D, 5, 4), (RootKind::E, 6, 4), (RootKind::E, 7, 4), (RootKind::D, 4, 6)] {
            let c = RootComponent::new(k, n).unwrap();
            let bound = Q64::from_integer(b);
            let mut via_orbits: Vec<Vec<i64>> = c.dual_vectors(bound).iter().map(|v| c.dominant(&v.coords, None).0).collect();
            via_orbits.sort();
            via_orbits.dedup();
            let direct: Vec<Vec<i64>> = c.dominant_weights(bound).into_iter().map(|v| v.coords).collect();
            assert_eq!(direct, via_orbits, "{}", c.name());
        }
    }

    #[test]
    fn weyl_tools() {
        for (k, n) in [(RootKind::A, 4), (RootKind::D, 4), (RootKind::D, 6), (RootKind::E, 6), (RootKind::E, 7), (RootKind::E, 8)] {
            let c = RootComponent::new(k, n).unwrap();
            let simple = c.simple_roots();
            assert_eq!(simple.len(), n);
            let roots = c.roots();
            assert!(simple.iter().all(|s| roots.contains(s)));
            let g: Vec<Vec<i64>> = simple.iter().map(|a| simple.iter().map(|b| c.pair(a, b)).collect()).collect();
            assert_eq!(ExactLattice::new(g).unwrap().determinant(), c.determinant(), "{}", c.name());
            // all roots are conjugate to the highest root
            let (d0, _) = c.dominant(&roots[0], None);
            for r in roots.iter().take(40) {
                let (d, w) = c.dominant(r, None);
                assert_eq!(d, d0);
                assert_eq!(c.apply_word(r, &w), d);
                assert_eq!(&c.apply_word_inverse(&d, &w), r);
            }
            for g in c.diagram_isometries() {
                assert!(roots.iter().all(|r| roots.contains(&g.apply(r))));
            }
        }
        let d4 = RootComponent::new(RootKind::D, 4).unwrap();
        let isos = d4.diagram_isometries();
        assert_eq!(isos.len(), 6);
        let acts: std::collections::HashSet<Vec<usize>> = isos.iter().map(|g| d4.class_action(g)).collect();
        assert_eq!(acts.len(), 6);
        let a3 = RootComponent::new(RootKind::A, 3).unwrap();
        assert_eq!(a3.class_action(&a3.diagram_isometries()[1]), vec![0, 3, 2, 1]);
    }

    #[test]
    fn class_groups() {
        let d5 = RootComponent::new(RootKind::D, 5).unwrap();
        assert_eq!(d5.add[1][1], 2);
        assert_eq!(d5.add[1][3], 0);
        let d6 = RootComponent::new(RootKind::D, 6).unwrap();
        assert_eq!(d6.add[1][1], 0);
        assert_eq!(d6.add[1][3], 2);
        let e6 = RootComponent::new(RootKind::E, 6).unwrap();
        assert_eq!(e6.add[1][1], 2);
        let a4 = RootComponent::new(RootKind::A, 4).unwrap();
        assert_eq!(a4.neg_class(1), 4);
    }
}
