//! The 23 Niemeier lattices with nonempty root system, built as glued
//! overlattices of their root lattices.
//!
//! Glue generators follow the Conway–Sloane class numbering: for `A_n`
//! class `i` has all coordinates `≡ i/(n+1)` mod 1 (internally class
//! `n+1-i`), for `D_n` classes `1, 2, 3` are `s = (1/2)^n`, `v = e_n`,
//! `c = ((1/2)^{n-1}, -1/2)`. Every table is validated when it is loaded.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::arith::{lcm_i64, Q64};
use crate::error::{Error, Result};
use crate::golay::GolayCode;
use crate::lattice::ExactLattice;
use crate::matrix;
use crate::roots::{RootComponent, RootKind};

/// Keys of the 23 lattices, in order of decreasing Coxeter number.
pub const NIEMEIER_KEYS: [&str; 23] = [
    "D24", "D16+E8", "3E8", "A24", "2D12", "A17+E7", "D10+2E7", "A15+D9", "3D8", "2A12", "A11+D7+E6", "4E6",
    "2A9+D6", "4D6", "3A8", "2A7+2D5", "4A6", "4A5+D4", "6D4", "6A4", "8A3", "12A2", "24A1",
];

#[derive(Debug, Clone)]
pub struct NiemeierLattice {
    pub key: String,
    pub components: Vec<RootComponent>,
    /// Offset of each component's block in ambient coordinates.
    pub offsets: Vec<usize>,
    pub ambient_dim: usize,
    /// Common denominator of ambient numerators.
    pub denom: i64,
    /// All glue words as internal class tuples.
    pub code: Vec<Vec<u8>>,
    code_index: HashSet<Vec<u8>>,
    /// A basis of the lattice as ambient numerator rows.
    pub basis: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
    gram_inv: Vec<Vec<i64>>,
}

fn parse_components(key: &str) -> Result<Vec<(RootKind, usize)>> {
    let mut out = Vec::new();
    for part in key.split('+') {
        let pos = part.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(|| Error::Unknown(key.into()))?;
        let mult: usize = if pos == 0 { 1 } else { part[..pos].parse().map_err(|_| Error::Unknown(key.into()))? };
        let kind = match &part[pos..pos + 1] {
            "A" => RootKind::A,
            "D" => RootKind::D,
            "E" => RootKind::E,
            _ => return Err(Error::Unknown(key.into())),
        };
        let n: usize = part[pos + 1..].parse().map_err(|_| Error::Unknown(key.into()))?;
        for _ in 0..mult {
            out.push((kind, n));
        }
    }
    Ok(out)
}

/// `prefix` followed by every cyclic shift of `cycle`, then `suffix`.
fn cyclic(prefix: &[u8], cycle: &[u8], suffix: &[u8]) -> Vec<Vec<u8>> {
    (0..cycle.len())
        .map(|s| {
            let mut w = prefix.to_vec();
            w.extend((0..cycle.len()).map(|i| cycle[(i + cycle.len() - s) % cycle.len()]));
            w.extend_from_slice(suffix);
            w
        })
        .collect()
}

fn even_permutations(v: &[u8]) -> Vec<Vec<u8>> {
    let n = v.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    permute(&mut idx, 0, &mut |p| {
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            out.push(p.iter().map(|&i| v[i]).collect());
        }
    });
    out
}

fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permute(a, k + 1, f);
        a.swap(k, i);
    }
}

/// Glue generators in Conway–Sloane numbering.
fn glue_table(key: &str) -> Vec<Vec<u8>> {
    match key {
        "D24" => vec![vec![1]],
        "D16+E8" => vec![vec![1, 0]],
        "3E8" => vec![],
        "A24" => vec![vec![5]],
        "2D12" => vec![vec![1, 2], vec![2, 1]],
        "A17+E7" => vec![vec![3, 1]],
        "D10+2E7" => vec![vec![1, 1, 0], vec![3, 0, 1]],
        "A15+D9" => vec![vec![2, 1]],
        "3D8" => cyclic(&[], &[1, 2, 2], &[]),
        "2A12" => vec![vec![1, 5]],
        "A11+D7+E6" => vec![vec![1, 1, 1]],
        "4E6" => cyclic(&[1], &[0, 1, 2], &[]),
        "2A9+D6" => vec![vec![2, 4, 0], vec![5, 0, 1], vec![0, 5, 3]],
        "4D6" => even_permutations(&[0, 1, 2, 3]),
        "3A8" => cyclic(&[], &[1, 1, 4], &[]),
        "2A7+2D5" => vec![vec![1, 1, 1, 2], vec![1, 7, 2, 1]],
        "4A6" => cyclic(&[1], &[2, 1, 6], &[]),
        "4A5+D4" => {
            let mut v = cyclic(&[2], &[0, 2, 4], &[0]);
            v.extend([vec![3, 3, 0, 0, 1], vec![3, 0, 3, 0, 2], vec![3, 0, 0, 3, 3]]);
            v
        }
        "6D4" => {
            // the hexacode: F4-linear, so also close under the class cycle 1 -> 2 -> 3
            let mut v = vec![vec![1; 6]];
            v.extend(cyclic(&[0], &[0, 2, 3, 3, 2], &[]));
            let omega: Vec<Vec<u8>> = v.iter().map(|w| w.iter().map(|&c| if c == 0 { 0 } else { c % 3 + 1 }).collect()).collect();
            v.extend(omega);
            v
        }
        "6A4" => cyclic(&[1], &[0, 1, 4, 4, 1], &[]),
        "8A3" => cyclic(&[3], &[2, 0, 0, 1, 0, 1, 1], &[]),
        "12A2" => cyclic(&[2], &[1, 1, 2, 1, 1, 1, 2, 2, 2, 1, 2], &[]),
        _ => vec![],
    }
}

impl NiemeierLattice {
    pub fn build(key: &str) -> Result<Self> {
        if !NIEMEIER_KEYS.contains(&key) {
            return Err(Error::Unknown(format!("lattice {key}")));
        }
        let comps: Vec<RootComponent> =
            parse_components(key)?.into_iter().map(|(k, n)| RootComponent::new(k, n)).collect::<Result<_>>()?;
        let mut offsets = Vec::new();
        let mut dim = 0;
        let mut denom = 1;
        for c in &comps {
            offsets.push(dim);
            dim += c.dim;
            denom = lcm_i64(denom, c.denom);
        }
        // glue words in internal numbering
        let gens: Vec<Vec<u8>> = if key == "24A1" {
            let g = GolayCode::new();
            let mut basis: Vec<u32> = Vec::new();
            for &w in &g.words {
                let mut r = w;
                for b in &basis {
                    r = r.min(r ^ b);
                }
                if r != 0 {
                    basis.push(r);
                    basis.sort_unstable_by(|a, b| b.cmp(a));
                }
            }
            basis.iter().map(|&w| (0..24).map(|i| (w >> i & 1) as u8).collect()).collect()
        } else {
            glue_table(key)
                .into_iter()
                .map(|w| {
                    w.iter()
                        .zip(&comps)
                        .map(|(&i, c)| match c.kind {
                            RootKind::A => ((c.n as u8 + 1 - i) % (c.n as u8 + 1)) as u8,
                            _ => i,
                        })
                        .collect()
                })
                .collect()
        };
        let code = close_code(&comps, &gens);
        let code_index: HashSet<Vec<u8>> = code.iter().cloned().collect();

        let mut lat = NiemeierLattice {
            key: key.to_string(),
            components: comps,
            offsets,
            ambient_dim: dim,
            denom,
            code,
            code_index,
            basis: vec![],
            gram: vec![],
            gram_inv: vec![],
        };
        lat.validate_glue()?;
        // basis: HNF of root-lattice bases plus glue lifts
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (k, c) in lat.components.iter().enumerate() {
            for b in c.basis() {
                rows.push(lat.embed(k, &b));
            }
        }
        for g in &gens {
            rows.push(lat.lift_word(g));
        }
        let h = matrix::hnf(&matrix::to_big(&rows));
        let basis = matrix::to_i64(&h).ok_or_else(|| Error::Inconsistent("basis overflow".into()))?;
        let basis: Vec<Vec<i64>> = basis.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        if basis.len() != 24 {
            return Err(Error::Inconsistent(format!("{key}: rank {}", basis.len())));
        }
        let dd = denom * denom;
        let gram: Vec<Vec<i64>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| x.iter().zip(y).map(|(a, b)| a * b).sum::<i64>() / dd).collect())
            .collect();
        let gl = ExactLattice::new(gram.clone())?;
        if gl.determinant() != BigInt::from(1) || !gl.is_even() {
            return Err(Error::Inconsistent(format!("{key}: glued lattice is not even unimodular")));
        }
        let inv = matrix::inverse_q(&matrix::to_q(&gl.gram_big())).ok_or(Error::Degenerate)?;
        let gram_inv = inv
            .iter()
            .map(|r| r.iter().map(|x| num_traits::ToPrimitive::to_i64(&x.to_integer()).unwrap()).collect())
            .collect();
        lat.basis = basis;
        lat.gram = gram;
        lat.gram_inv = gram_inv;
        Ok(lat)
    }

    pub fn all() -> Result<Vec<NiemeierLattice>> {
        NIEMEIER_KEYS.iter().map(|k| Self::build(k)).collect()
    }

    fn validate_glue(&self) -> Result<()> {
        let mut prod: u64 = 1;
        for c in &self.components {
            prod *= c.num_classes() as u64;
        }
        let n = self.code.len() as u64;
        if n * n != prod {
            return Err(Error::Inconsistent(format!("{}: |glue|^2 = {} but |discr R| = {prod}", self.key, n * n)));
        }
        for w in &self.code {
            let q = self.word_min_norm(w);
            if !q.is_integer() || q.to_integer() % 2 != 0 {
                return Err(Error::Inconsistent(format!("{}: glue word {w:?} has square {q}", self.key)));
            }
            if w.iter().any(|&c| c != 0) && q < Q64::from_integer(4) {
                return Err(Error::Inconsistent(format!("{}: glue word {w:?} creates roots", self.key)));
            }
        }
        Ok(())
    }

    /// Sum of class minima of a word: the minimal square in its coset.
    pub fn word_min_norm(&self, w: &[u8]) -> Q64 {
        w.iter().zip(&self.components).map(|(&c, comp)| comp.class_min[c as usize]).sum()
    }

    pub fn rank(&self) -> usize {
        24
    }

    pub fn gram_lattice(&self) -> ExactLattice {
        ExactLattice::new(self.gram.clone()).unwrap()
    }

    /// Embeds a component vector (numerators over the component denominator).
    pub fn embed(&self, k: usize, v: &[i64]) -> Vec<i64> {
        let c = &self.components[k];
        let f = self.denom / c.denom;
        let mut out = vec![0i64; self.ambient_dim];
        for (i, &x) in v.iter().enumerate() {
            out[self.offsets[k] + i] = x * f;
        }
        out
    }

    /// Component block of an ambient vector in component numerators, if the
    /// scaling is exact.
    pub fn block(&self, v: &[i64], k: usize) -> Option<Vec<i64>> {
        let c = &self.components[k];
        let f = self.denom / c.denom;
        let b = &v[self.offsets[k]..self.offsets[k] + c.dim];
        if b.iter().any(|x| x % f != 0) {
            return None;
        }
        Some(b.iter().map(|x| x / f).collect())
    }

    /// Raw component block (ambient numerators).
    pub fn raw_block<'a>(&self, v: &'a [i64], k: usize) -> &'a [i64] {
        &v[self.offsets[k]..self.offsets[k] + self.components[k].dim]
    }

    pub fn lift_word(&self, w: &[u8]) -> Vec<i64> {
        let mut out = vec![0i64; self.ambient_dim];
        for (k, &c) in w.iter().enumerate() {
            let e = self.embed(k, &self.components[k].class_reps[c as usize]);
            for (o, x) in out.iter_mut().zip(e) {
                *o += x;
            }
        }
        out
    }

    /// Class tuple of an ambient vector, if it lies in the dual of the root lattice.
    pub fn class_word(&self, v: &[i64]) -> Option<Vec<u8>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let mut w = Vec::with_capacity(self.components.len());
        for k in 0..self.components.len() {
            let b = self.block(v, k)?;
            w.push(self.components[k].class_of(&b)? as u8);
        }
        Some(w)
    }

    pub fn is_glue_word(&self, w: &[u8]) -> bool {
        self.code_index.contains(w)
    }

    pub fn membership(&self, v: &[i64]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::Invalid(format!("vector of length {} in ambient dimension {}", v.len(), self.ambient_dim)));
        }
        Ok(self.class_word(v).map(|w| self.is_glue_word(&w)).unwrap_or(false))
    }

    /// Inner product numerator over `denom^2`.
    pub fn dot_num(&self, a: &[i64], b: &[i64]) -> i64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn dot(&self, a: &[i64], b: &[i64]) -> Q64 {
        Q64::new(self.dot_num(a, b), self.denom * self.denom)
    }

    pub fn norm(&self, a: &[i64]) -> Q64 {
        self.dot(a, a)
    }

    /// Integer inner product of two lattice vectors.
    pub fn idot(&self, a: &[i64], b: &[i64]) -> i64 {
        self.dot_num(a, b) / (self.denom * self.denom)
    }

    /// Coordinates of a lattice vector in `basis`.
    pub fn to_coords(&self, v: &[i64]) -> Option<Vec<i64>> {
        if !self.membership(v).ok()? {
            return None;
        }
        let dd = self.denom * self.denom;
        let p: Vec<i64> = self.basis.iter().map(|b| self.dot_num(v, b) / dd).collect();
        Some((0..24).map(|i| (0..24).map(|j| self.gram_inv[i][j] * p[j]).sum()).collect())
    }

    pub fn from_coords(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.ambient_dim];
        for (c, b) in x.iter().zip(&self.basis) {
            if *c != 0 {
                for (o, y) in out.iter_mut().zip(b) {
                    *o += c * y;
                }
            }
        }
        out
    }

    /// All roots of the lattice (those of the root system).
    pub fn roots(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for (k, c) in self.components.iter().enumerate() {
            for r in c.roots() {
                out.push(self.embed(k, &r));
            }
        }
        out.sort();
        out
    }

    pub fn root_count(&self) -> usize {
        self.components.iter().map(|c| c.expected_root_count()).sum()
    }

    pub fn glue_json(&self) -> serde_json::Value {
        json!({
            "key": self.key,
            "components": self.components.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "denominator": self.denom,
            "glue_words": self.code,
        })
    }

    pub fn roots_json(&self) -> serde_json::Value {
        json!({ "key": self.key, "denominator": self.denom, "roots": self.roots() })
    }
}

fn close_code(comps: &[RootComponent], gens: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let zero = vec![0u8; comps.len()];
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(zero.clone());
    let mut words = vec![zero];
    let mut k = 0;
    while k < words.len() {
        for g in gens {
            let s: Vec<u8> =
                words[k].iter().zip(g).zip(comps).map(|((&a, &b), c)| c.add[a as usize][b as usize] as u8).collect();
            if seen.insert(s.clone()) {
                words.push(s);
            }
        }
        k += 1;
    }
    words.sort();
    words
}

/// Validation of one lattice from its Gram matrix alone.
#[derive(Debug, Clone, Serialize)]
pub struct NiemeierCheck {
    pub key: String,
    pub rank: usize,
    pub even: bool,
    pub det: String,
    /// Norm-2 vectors of the Gram matrix.
    pub roots: usize,
    /// `|R|` from the root system.
    pub expected_roots: usize,
    pub ok: bool,
}

pub fn check(key: &str) -> Result<NiemeierCheck> {
    let n = NiemeierLattice::build(key)?;
    let lat = n.gram_lattice();
    let roots = crate::shortvec::count_of_norm(&n.gram, 2)?;
    let det = lat.determinant();
    let expected_roots = n.root_count();
    let rank = n.gram.len();
    let even = lat.is_even();
    Ok(NiemeierCheck {
        key: key.to_string(),
        rank,
        even,
        ok: even && rank == 24 && det == BigInt::from(1) && roots == expected_roots,
        det: det.to_string(),
        roots,
        expected_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lattices() {
        for key in ["3E8", "D24", "24A1", "12A2", "4A5+D4"] {
            let n = NiemeierLattice::build(key).unwrap();
            assert_eq!(n.gram.len(), 24);
            assert!(n.roots().iter().all(|r| n.membership(r).unwrap()));
        }
        let n = NiemeierLattice::build("12A2").unwrap();
        assert_eq!(n.code.len(), 729);
        assert!(NiemeierLattice::build("Leech").is_err());
    }

    #[test]
    fn golay_membership() {
        let n = NiemeierLattice::build("24A1").unwrap();
        let g = GolayCode::new();
        let o = g.octads[0];
        // cw O = half the sum of the roots in O
        let mut v = vec![0i64; n.ambient_dim];
        for k in 0..24 {
            if o >> k & 1 == 1 {
                v[2 * k] = 1;
                v[2 * k + 1] = -1;
            }
        }
        assert!(n.membership(&v).unwrap());
        assert_eq!(n.norm(&v), Q64::from_integer(4));
        let mut half = vec![0i64; n.ambient_dim];
        half[0] = 1;
        half[1] = -1;
        assert!(!n.membership(&half).unwrap());
        let c = n.to_coords(&v).unwrap();
        assert_eq!(n.from_coords(&c), v);
    }

    #[test]
    fn cyclic_and_even_permutations() {
        assert_eq!(cyclic(&[1], &[0, 1, 2], &[]), vec![vec![1, 0, 1, 2], vec![1, 2, 0, 1], vec![1, 1, 2, 0]]);
        assert_eq!(even_permutations(&[0, 1, 2, 3]).len(), 12);
    }
}

#[cfg(test)]
mod all_tests {
    use super::*;

    #[test]
    fn all_lattices_even_unimodular_with_exact_roots() {
        for key in NIEMEIER_KEYS {
            let n = NiemeierLattice::build(key).unwrap_or_else(|e| panic!("{key}: {e}"));
            let c = check(key).unwrap();
            assert!(c.ok, "{c:?}");
            assert_eq!(n.roots().len(), n.root_count(), "{key}");
        }
    }
}
