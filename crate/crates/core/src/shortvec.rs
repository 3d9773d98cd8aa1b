//! Exact short-vector enumeration in positive definite lattices: LLL
//! reduction and Fincke–Pohst over rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// LLL reduction of a Gram matrix (δ = 3/4). Returns the transformation
/// (rows are the new basis in old coordinates) and the reduced Gram matrix.
/// Gram–Schmidt data is floating point; the Gram matrix is kept exactly, so
/// only the quality of the reduction depends on rounding.
pub fn lll_gram(gram: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = gram.len();
    let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut g: Vec<Vec<i128>> = gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let gso = |g: &Vec<Vec<i128>>| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut mu = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j] as f64;
                for k in 0..j {
                    s -= mu[i][k] * mu[j][k] * b[k];
                }
                mu[i][j] = s / b[j];
            }
            let mut s = g[i][i] as f64;
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * b[k];
            }
            b[i] = s;
        }
        (mu, b)
    };
    let mut k = 1;
    let mut steps = 0;
    while k < n && steps < 100_000 {
        steps += 1;
        let (mut mu, _) = gso(&g);
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let r = r as i64;
                for c in 0..n {
                    t[k][c] -= r * t[j][c];
                }
                let rr = r as i128;
                let (gkk, gkj, gjj) = (g[k][k], g[k][j], g[j][j]);
                for c in 0..n {
                    if c != k {
                        g[k][c] -= rr * g[j][c];
                        g[c][k] = g[k][c];
                    }
                }
                g[k][k] = gkk - 2 * rr * gkj + rr * rr * gjj;
                mu = gso(&g).0;
            }
        }
        let (mu, b) = gso(&g);
        if b[k] >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            t.swap(k, k - 1);
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            k = k.max(2) - 1;
        }
    }
    let gram_out = recompute_gram(gram, &t);
    (t, gram_out)
}

fn recompute_gram(gram: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = gram.len();
    let gt: Vec<Vec<i128>> = t
        .iter()
        .map(|row| (0..n).map(|c| (0..n).map(|k| row[k] as i128 * gram[k][c] as i128).sum()).collect())
        .collect();
    t.iter()
        .map(|r| (0..n).map(|j| (0..n).map(|k| gt[j][k] * r[k] as i128).sum::<i128>() as i64).collect())
        .collect()
}

/// All nonzero vectors `x` (coordinates in the given basis) with
/// `min_norm ≤ x·G·x ≤ max_norm`, both signs included.
pub fn short_vectors(gram: &[Vec<i64>], min_norm: i64, max_norm: i64) -> Result<Vec<(Vec<i64>, i64)>> {
    let n = gram.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let (t, g) = lll_gram(gram);
    // rational LDL
    let mut qd = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut s = q(g[i][i]);
        for k in 0..i {
            s -= &mu[k][i] * &mu[k][i] * &qd[k];
        }
        if !s.is_positive() {
            return Err(Error::Invalid("Gram matrix is not positive definite".into()));
        }
        qd[i] = s;
        for j in i + 1..n {
            let mut s = q(g[i][j]);
            for k in 0..i {
                s -= &mu[k][i] * &mu[k][j] * &qd[k];
            }
            mu[i][j] = s / &qd[i];
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fp_rec(n, &qd, &mu, &q(max_norm), &mut x, &mut out, &g, min_norm);
    // back to the original basis
    let res = out
        .into_iter()
        .map(|(y, nn)| {
            let v: Vec<i64> = (0..n).map(|c| (0..n).map(|k| y[k] * t[k][c]).sum()).collect();
            (v, nn)
        })
        .collect();
    Ok(res)
}

#[allow(clippy::too_many_arguments)]
fn fp_rec(
    level: usize,
    qd: &[BigRational],
    mu: &[Vec<BigRational>],
    rem: &BigRational,
    x: &mut Vec<i64>,
    out: &mut Vec<(Vec<i64>, i64)>,
    g: &[Vec<i64>],
    min_norm: i64,
) {
    if level == 0 {
        if x.iter().all(|&v| v == 0) {
            return;
        }
        let n = x.len();
        let mut s = 0i128;
        for i in 0..n {
            for j in 0..n {
                s += x[i] as i128 * g[i][j] as i128 * x[j] as i128;
            }
        }
        if s >= min_norm as i128 {
            out.push((x.clone(), s as i64));
        }
        return;
    }
    let i = level - 1;
    let mut c = BigRational::zero();
    for j in i + 1..x.len() {
        if x[j] != 0 {
            c -= &mu[i][j] * q(x[j]);
        }
    }
    let cf = to_f64(&c);
    let r = (to_f64(rem) / to_f64(&qd[i])).max(0.0).sqrt();
    let lo = (cf - r).floor() as i64 - 1;
    let hi = (cf + r).ceil() as i64 + 1;
    for v in lo..=hi {
        let d = q(v) - &c;
        let used = &qd[i] * &d * &d;
        if used > *rem {
            continue;
        }
        x[i] = v;
        let nr = rem - &used;
        fp_rec(level - 1, qd, mu, &nr, x, out, g, min_norm);
    }
    x[i] = 0;
}

/// Minimum of a positive definite form, with an upper bound to search below.
pub fn minimum(gram: &[Vec<i64>], search_up_to: i64) -> Result<Option<i64>> {
    let v = short_vectors(gram, 1, search_up_to)?;
    Ok(v.iter().map(|p| p.1).min())
}

/// Number of vectors of exactly the given square.
pub fn count_of_norm(gram: &[Vec<i64>], norm: i64) -> Result<usize> {
    Ok(short_vectors(gram, norm, norm)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ExactLattice;

    #[test]
    fn root_counts() {
        assert_eq!(count_of_norm(&ExactLattice::cartan_e(8).gram, 2).unwrap(), 240);
        assert_eq!(count_of_norm(&ExactLattice::cartan_e(7).gram, 2).unwrap(), 126);
        assert_eq!(count_of_norm(&ExactLattice::cartan_d(5).gram, 2).unwrap(), 40);
        assert_eq!(count_of_norm(&ExactLattice::cartan_a(4).gram, 2).unwrap(), 20);
        assert_eq!(count_of_norm(&ExactLattice::cartan_e(8).gram, 4).unwrap(), 2160);
    }

    #[test]
    fn lll_preserves_determinant() {
        let g = vec![vec![10, 7, 3], vec![7, 9, 4], vec![3, 4, 6]];
        let (t, r) = lll_gram(&g);
        let l = ExactLattice::new(r.clone()).unwrap();
        assert_eq!(l.determinant(), ExactLattice::new(g.clone()).unwrap().determinant());
        assert_eq!(recompute_gram(&g, &t), r);
    }

    #[test]
    fn binary_minimum() {
        assert_eq!(minimum(&[vec![12, 6], vec![6, 12]], 20).unwrap(), Some(12));
        assert_eq!(minimum(&[vec![4, 0], vec![0, 32]], 3).unwrap(), None);
        assert!(short_vectors(&[vec![1, 2], vec![2, 1]], 1, 2).is_err());
    }
}
