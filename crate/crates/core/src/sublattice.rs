//! Sublattices of `Z^n` with fast membership, used for spans inside a
//! Niemeier lattice (coordinates in its basis).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::{self, IMat};

#[derive(Debug, Clone)]
pub struct SubLattice {
    /// Hermite normal form rows.
    pub basis: Vec<Vec<i64>>,
    pub dim: usize,
    /// `x` lies in the rational span iff `x·k = 0` for every kernel vector.
    kernel: Vec<Vec<BigInt>>,
    kernel_small: Option<Vec<Vec<i64>>>,
    /// `x` in the rational span lies in the lattice iff `x·c ≡ 0 mod e`.
    congruences: Vec<(Vec<i64>, i64)>,
}

fn big_rows(m: &[Vec<i64>]) -> IMat {
    matrix::to_big(m)
}

fn small_rows(m: &IMat) -> Option<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
}

impl SubLattice {
    /// Lattice generated by the given rows (any number, possibly dependent).
    pub fn new(dim: usize, gens: &[Vec<i64>]) -> Self {
        Self::from_big(dim, &big_rows(gens))
    }

    pub fn from_big(dim: usize, gens: &IMat) -> Self {
        let h: IMat = matrix::hnf(gens).into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        let basis = small_rows(&h).expect("sublattice basis entries exceed 64 bits");
        let r = h.len();
        if r == 0 {
            let kernel: IMat = matrix::identity(dim);
            return SubLattice { basis, dim, kernel_small: small_rows(&kernel), kernel, congruences: Vec::new() };
        }
        let kernel = matrix::left_kernel(&matrix::transpose(&h));
        let (_u, d, v) = matrix::snf(&h);
        let mut congruences = Vec::new();
        for (i, e) in d.iter().enumerate().take(r) {
            if e.is_one() {
                continue;
            }
            let e64 = e.to_i64().expect("elementary divisor exceeds 64 bits");
            let col: Vec<i64> = (0..dim).map(|a| v[a][i].mod_floor(e).to_i64().unwrap()).collect();
            congruences.push((col, e64));
        }
        SubLattice { basis, dim, kernel_small: small_rows(&kernel), kernel, congruences }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match &self.kernel_small {
            Some(k) => {
                for kv in k {
                    let s: i128 = kv.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum();
                    if s != 0 {
                        return false;
                    }
                }
            }
            None => {
                for kv in &self.kernel {
                    let s: BigInt = kv.iter().zip(x).map(|(a, b)| a * BigInt::from(*b)).sum();
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
        self.congruences.iter().all(|(c, e)| {
            let s: i128 = c.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum();
            s.rem_euclid(*e as i128) == 0
        })
    }

    pub fn contains_lattice(&self, other: &SubLattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Adds generators.
    pub fn extend(&self, more: &[Vec<i64>]) -> SubLattice {
        let new: Vec<Vec<i64>> = more.iter().filter(|v| !self.contains(v)).cloned().collect();
        if new.is_empty() {
            return self.clone();
        }
        let mut gens = self.basis.clone();
        gens.extend(new);
        SubLattice::new(self.dim, &gens)
    }

    /// `(Q L) ∩ Z^n`.
    pub fn saturation(&self) -> SubLattice {
        if self.basis.is_empty() {
            return self.clone();
        }
        SubLattice::from_big(self.dim, &matrix::saturate(&big_rows(&self.basis)))
    }

    /// Gram matrix of the basis under the ambient form `g`.
    pub fn gram(&self, g: &[Vec<i64>]) -> Vec<Vec<i64>> {
        gram_of_rows(&self.basis, g)
    }

    pub fn determinant(&self, g: &[Vec<i64>]) -> BigInt {
        matrix::det_i64(&self.gram(g))
    }

    /// Index `[other : self]` for `self ⊆ other` of the same rank.
    pub fn index_in(&self, other: &SubLattice, g: &[Vec<i64>]) -> BigInt {
        let a = self.determinant(g).abs();
        let b = other.determinant(g).abs();
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero() && !b.is_zero(), "index of non-nested lattices");
        q.sqrt()
    }

    /// Coordinates of `self`'s generators relative to a basis of `over`
    /// (which must contain `self`), followed by the Smith normal form data
    /// `(d, q)`: `self` has basis `d_i q_i` where the rows `q_i` form a basis
    /// of `over`.
    pub fn relative_smith(&self, over: &SubLattice) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
        let ob = big_rows(&over.basis);
        let m: IMat = self
            .basis
            .iter()
            .map(|row| {
                let b: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
                matrix::solve_echelon(&ob, &b).expect("sublattice not contained in the overlattice")
            })
            .collect();
        let (u, d, _v) = matrix::snf(&m);
        // u * B_self = D * Q
        let ub = matrix::mul(&u, &big_rows(&self.basis));
        let q: Vec<Vec<BigInt>> = ub
            .iter()
            .zip(&d)
            .map(|(row, di)| row.iter().map(|x| x / di).collect())
            .collect();
        (d, q)
    }
}

pub fn gram_of_rows(rows: &[Vec<i64>], g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g.len();
    let gb: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| (0..n).map(|c| (0..n).map(|k| r[k] as i128 * g[k][c] as i128).sum()).collect())
        .collect();
    rows.iter()
        .map(|r| {
            gb.iter()
                .map(|x| {
                    let s: i128 = (0..n).map(|k| x[k] * r[k] as i128).sum();
                    i64::try_from(s).expect("Gram entry exceeds 64 bits")
                })
                .collect()
        })
        .collect()
}

/// `x^T G y`.
pub fn form(x: &[i64], g: &[Vec<i64>], y: &[i64]) -> i64 {
    let mut s = 0i128;
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            if b != 0 {
                s += a as i128 * g[i][j] as i128 * b as i128;
            }
        }
    }
    s as i64
}

/// HNF key for deduplicating lattices.
pub fn key(l: &SubLattice) -> Vec<Vec<i64>> {
    l.basis.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_saturation() {
        let l = SubLattice::new(3, &[vec![2, 0, 0], vec![0, 3, 3], vec![2, 3, 3]]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[4, 6, 6]));
        assert!(!l.contains(&[1, 0, 0]));
        assert!(!l.contains(&[0, 1, 1]));
        assert!(!l.contains(&[0, 3, 4]));
        let s = l.saturation();
        assert!(s.contains(&[1, 0, 0]) && s.contains(&[0, 1, 1]) && !s.contains(&[0, 0, 1]));
        let id: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(l.index_in(&s, &id), BigInt::from(6));
        let (d, q) = l.relative_smith(&s);
        assert_eq!(d.iter().fold(BigInt::one(), |a, b| a * b), BigInt::from(6));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn empty_lattice() {
        let l = SubLattice::new(2, &[vec![0, 0]]);
        assert_eq!(l.rank(), 0);
        assert!(l.contains(&[0, 0]) && !l.contains(&[1, 0]));
    }
}
