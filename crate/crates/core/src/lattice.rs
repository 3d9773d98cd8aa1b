//! Integral lattices given by Gram matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix;

/// A free abelian group of finite rank with an integral symmetric bilinear
/// form, stored as its Gram matrix in a fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactLattice {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
}

impl ExactLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let rank = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::Invalid(format!("Gram row {i} has length {}", row.len())));
            }
            for j in 0..rank {
                if row[j] != gram[j][i] {
                    return Err(Error::Invalid(format!("Gram matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(ExactLattice { rank, gram, basis_labels: None })
    }

    /// The rank-1 lattice `<n>`.
    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        ExactLattice { rank: n, gram, basis_labels: None }
    }

    /// The hyperbolic plane U.
    pub fn hyperbolic_plane() -> Self {
        ExactLattice { rank: 2, gram: vec![vec![0, 1], vec![1, 0]], basis_labels: None }
    }

    /// Root lattice of type A_n in its simple-root basis.
    pub fn cartan_a(n: usize) -> Self {
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        ExactLattice { rank: n, gram, basis_labels: None }
    }

    /// Root lattice of type D_n (n >= 3) in its simple-root basis.
    pub fn cartan_d(n: usize) -> Self {
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
        }
        for i in 0..n.saturating_sub(2) {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
        if n >= 3 {
            g[n - 3][n - 1] = -1;
            g[n - 1][n - 3] = -1;
        }
        ExactLattice { rank: n, gram: g, basis_labels: None }
    }

    /// Root lattice of type E_n (n = 6, 7, 8) in its simple-root basis
    /// (chain 0-1-...-(n-2) with node n-1 attached to node 2).
    pub fn cartan_e(n: usize) -> Self {
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
        }
        for i in 0..n - 2 {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
        g[2][n - 1] = -1;
        g[n - 1][2] = -1;
        ExactLattice { rank: n, gram: g, basis_labels: None }
    }

    pub fn direct_sum(&self, other: &ExactLattice) -> ExactLattice {
        let n = self.rank + other.rank;
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..self.rank {
            for j in 0..self.rank {
                g[i][j] = self.gram[i][j];
            }
        }
        for i in 0..other.rank {
            for j in 0..other.rank {
                g[self.rank + i][self.rank + j] = other.gram[i][j];
            }
        }
        ExactLattice { rank: n, gram: g, basis_labels: None }
    }

    /// The same group with the form negated.
    pub fn negated(&self) -> ExactLattice {
        ExactLattice {
            rank: self.rank,
            gram: self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
            basis_labels: self.basis_labels.clone(),
        }
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.gram[i][i] % 2 == 0)
    }

    pub fn gram_big(&self) -> matrix::IMat {
        matrix::to_big(&self.gram)
    }

    pub fn determinant(&self) -> BigInt {
        matrix::det(&self.gram_big())
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.determinant().is_zero()
    }

    /// Inertia indices `(sigma_+, sigma_-)` of a nondegenerate lattice,
    /// by symmetric Gaussian elimination over Q.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let n = self.rank;
        let mut a = matrix::to_q(&self.gram_big());
        let mut pos = 0;
        let mut neg = 0;
        let mut k = 0;
        while k < n {
            // find a nonzero diagonal pivot in the remaining block
            if let Some(p) = (k..n).find(|&i| !a[i][i].is_zero()) {
                swap_sym(&mut a, k, p);
            } else if let Some((i, j)) =
                (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
            {
                // a_ii = a_jj = 0, a_ij != 0: replace e_i by e_i + e_j
                add_sym(&mut a, i, j);
                swap_sym(&mut a, k, i);
            } else {
                return Err(Error::Degenerate);
            }
            let pv = a[k][k].clone();
            if pv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &pv;
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
                for j in k..n {
                    let t = &f * &a[j][k];
                    a[j][i] -= t;
                }
            }
            k += 1;
        }
        Ok((pos, neg))
    }

    /// Inner product of two coordinate vectors.
    pub fn dot(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.rank {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += x[i] * self.gram[i][j] * y[j];
            }
        }
        s
    }

    /// Gram matrix of the sublattice spanned by the given coordinate rows.
    pub fn sublattice(&self, rows: &[Vec<i64>]) -> ExactLattice {
        let gram = rows
            .iter()
            .map(|x| rows.iter().map(|y| self.dot(x, y)).collect())
            .collect();
        ExactLattice { rank: rows.len(), gram, basis_labels: None }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rank": self.rank, "gram": self.gram })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let l: ExactLattice = serde_json::from_value(v.clone())?;
        if l.gram.len() != l.rank {
            return Err(Error::Invalid("rank does not match Gram size".into()));
        }
        ExactLattice::new(l.gram)
    }
}

fn swap_sym(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Basis change e_i -> e_i + e_j applied as a congruence.
fn add_sym(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    let n = a.len();
    for k in 0..n {
        let t = a[j][k].clone();
        a[i][k] += t;
    }
    for k in 0..n {
        let t = a[k][j].clone();
        a[k][i] += t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(ExactLattice::hyperbolic_plane().determinant(), BigInt::from(-1));
        assert_eq!(ExactLattice::diagonal(&[2]).determinant(), BigInt::from(2));
        assert_eq!(ExactLattice::cartan_e(8).determinant(), BigInt::from(1));
        assert_eq!(ExactLattice::cartan_e(7).determinant(), BigInt::from(2));
        assert_eq!(ExactLattice::cartan_e(6).determinant(), BigInt::from(3));
        assert_eq!(ExactLattice::cartan_d(5).determinant(), BigInt::from(4));
        assert_eq!(ExactLattice::cartan_a(4).determinant(), BigInt::from(5));
    }

    #[test]
    fn signatures() {
        assert_eq!(ExactLattice::hyperbolic_plane().signature().unwrap(), (1, 1));
        assert_eq!(ExactLattice::cartan_e(8).signature().unwrap(), (8, 0));
        let l = ExactLattice::cartan_e(8).negated().direct_sum(&ExactLattice::hyperbolic_plane());
        assert_eq!(l.signature().unwrap(), (1, 9));
        assert!(ExactLattice::diagonal(&[0]).signature().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let l = ExactLattice::cartan_d(4);
        let v = l.to_json();
        assert_eq!(ExactLattice::from_json(&v).unwrap(), l);
        assert!(ExactLattice::new(vec![vec![2, 1], vec![0, 2]]).is_err());
    }
}
