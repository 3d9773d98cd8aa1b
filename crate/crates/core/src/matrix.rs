//! Exact integer matrix algorithms over arbitrary-precision integers:
//! determinants, Hermite and Smith normal forms, rational inverses, kernels.
//!
//! Lattices are stored by basis rows, so "row space" means the lattice
//! generated by the rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IMat = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn to_i64(m: &IMat) -> Option<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

pub fn transpose(a: &IMat) -> IMat {
    if a.is_empty() {
        return Vec::new();
    }
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

/// Gram matrix `B G B^T` of the rows of `b` under the form `g`.
pub fn gram_of(b: &IMat, g: &IMat) -> IMat {
    mul(&mul(b, g), &transpose(b))
}

/// Fraction-free Bareiss determinant.
pub fn det(m: &IMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    det(&to_big(m))
}

/// Row-style Hermite normal form: returns the nonzero rows of an echelon
/// basis of the lattice generated by the rows of `m`, pivots positive and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IMat) -> IMat {
    let mut a: IMat = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.is_empty() {
        return a;
    }
    let cols = a[0].len();
    let mut row = 0;
    for col in 0..cols {
        if row >= a.len() {
            break;
        }
        loop {
            // pick the row with the smallest nonzero entry in this column
            let piv = (row..a.len())
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()));
            let Some(p) = piv else { break };
            a.swap(row, p);
            let mut done = true;
            for i in row + 1..a.len() {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[row][col]);
                let (top, rest) = a.split_at_mut(row + 1);
                for j in col..cols {
                    let t = &q * &top[row][j];
                    rest[i - row - 1][j] -= t;
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if row < a.len() && !a[row][col].is_zero() {
            if a[row][col].is_negative() {
                for x in a[row].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..row {
                let q = a[i][col].div_floor(&a[row][col]);
                if !q.is_zero() {
                    let (top, rest) = a.split_at_mut(row);
                    for j in col..cols {
                        let t = &q * &rest[0][j];
                        top[i][j] -= t;
                    }
                }
            }
            row += 1;
        }
    }
    a.truncate(row);
    a.retain(|r| r.iter().any(|x| !x.is_zero()));
    a
}

pub fn rank(m: &IMat) -> usize {
    hnf(m).len()
}

/// Smith normal form: `(u, d, v)` with `u * m * v` diagonal with entries `d`
/// (length `min(rows, cols)`), nonnegative, each dividing the next;
/// `u` and `v` are unimodular.
pub fn snf(m: &IMat) -> (IMat, Vec<BigInt>, IMat) {
    let r = m.len();
    let c = if r == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut u = identity(r);
    let mut v = identity(c);
    let n = r.min(c);
    for t in 0..n {
        loop {
            // smallest nonzero entry in the lower-right block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if !a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..r {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &q);
                row_sub(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, j, t, &q);
                col_sub(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: if some entry is not divisible by the pivot, add its row
            let mut fixed = true;
            'outer: for i in t + 1..r {
                for j in t + 1..c {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        row_sub(&mut a, t, i, &(-BigInt::one()));
                        row_sub(&mut u, t, i, &(-BigInt::one()));
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if t < r && t < c && a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let d = (0..n).map(|i| a[i][i].clone()).collect();
    (u, d, v)
}

fn row_sub(a: &mut IMat, i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = a[k].clone();
    for (x, s) in a[i].iter_mut().zip(src.iter()) {
        *x -= q * s;
    }
}

fn col_sub(a: &mut IMat, j: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let s = row[k].clone();
        row[j] -= q * s;
    }
}

pub type QMat = Vec<Vec<BigRational>>;

pub fn to_q(m: &IMat) -> QMat {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Inverse of a square matrix over Q; `None` if singular.
pub fn inverse_q(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m.clone();
    let mut inv: QMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let pv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[i][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

/// Integer basis (rows) of the left kernel `{x : x * m = 0}`.
pub fn left_kernel(m: &IMat) -> IMat {
    let r = m.len();
    if r == 0 {
        return Vec::new();
    }
    let c = m[0].len();
    // HNF of [m | I]; rows whose m-part vanishes span the kernel.
    let aug: IMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            v
        })
        .collect();
    let h = hnf(&aug);
    h.into_iter()
        .filter(|row| row[..c].iter().all(|x| x.is_zero()))
        .map(|row| row[c..].to_vec())
        .collect()
}

/// Basis of the saturation `(Q * rows) ∩ Z^n` of the row lattice.
pub fn saturate(m: &IMat) -> IMat {
    let h = hnf(m);
    if h.is_empty() {
        return h;
    }
    // x in the saturation iff x is orthogonal to the right kernel of h.
    let k = left_kernel(&transpose(&h)); // vectors y with h y = 0
    if k.is_empty() {
        let n = h[0].len();
        return identity(n);
    }
    let kt = transpose(&k);
    hnf(&left_kernel(&kt))
}

/// Solve `x * basis = v` over Q; `None` if `v` is not in the rational span.
pub fn solve_rational(basis: &IMat, v: &[BigInt]) -> Option<Vec<BigRational>> {
    let r = basis.len();
    let c = v.len();
    // Gaussian elimination on the transposed system basis^T x = v.
    let mut a: QMat = (0..c)
        .map(|j| {
            let mut row: Vec<BigRational> =
                (0..r).map(|i| BigRational::from_integer(basis[i][j].clone())).collect();
            row.push(BigRational::from_integer(v[j].clone()));
            row
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..c).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for j in col..=r {
            a[row][j] = &a[row][j] / &pv;
        }
        for i in 0..c {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=r {
                    let t = &f * &a[row][j];
                    a[i][j] -= t;
                }
            }
        }
        piv_cols.push(col);
        row += 1;
    }
    if (row..c).any(|i| !a[i][r].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); r];
    for (i, &col) in piv_cols.iter().enumerate() {
        x[col] = a[i][r].clone();
    }
    Some(x)
}

/// Solve `x * basis = v` over Z for a basis with independent rows.
pub fn solve_integral(basis: &IMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let x = solve_rational(basis, v)?;
    x.into_iter().map(|q| if q.is_integer() { Some(q.to_integer()) } else { None }).collect()
}

/// Solve `x * basis = v` over Z for a basis in row echelon form, by
/// elimination along the pivots.
pub fn solve_echelon(basis: &IMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut x = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|c| !c.is_zero())?;
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (a, b) in rest.iter_mut().zip(row) {
                *a -= &q * b;
            }
        }
        x.push(q);
    }
    rest.iter().all(|c| c.is_zero()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(m: &[&[i64]]) -> IMat {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&b(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&b(&[&[2]])), BigInt::from(2));
        assert_eq!(det(&b(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])), BigInt::from(4));
        assert_eq!(det(&b(&[&[0, 0], &[0, 1]])), BigInt::zero());
    }

    #[test]
    fn smith_form() {
        let m = b(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (u, d, v) = snf(&m);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let prod = mul(&mul(&u, &m), &v);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { d[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[i][j], e);
            }
        }
        assert_eq!(det(&u).abs(), BigInt::one());
        assert_eq!(det(&v).abs(), BigInt::one());
    }

    #[test]
    fn hermite_and_saturation() {
        let m = b(&[&[2, 0, 0], &[0, 2, 0]]);
        assert_eq!(hnf(&m), m);
        let s = saturate(&m);
        assert_eq!(s, b(&[&[1, 0, 0], &[0, 1, 0]]));
        let k = left_kernel(&b(&[&[1, 1], &[1, 1], &[0, 1]]));
        assert_eq!(k.len(), 1);
        let x = solve_integral(&b(&[&[1, 1, 0], &[0, 1, 1]]), &[1.into(), 3.into(), 2.into()]);
        assert_eq!(x, Some(vec![BigInt::from(1), BigInt::from(2)]));
    }

    #[test]
    fn echelon_solve_agrees_with_rational_solve() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m: IMat = (0..4).map(|_| (0..6).map(|_| BigInt::from(rng.gen_range(-4..=4))).collect()).collect();
            let h = hnf(&m);
            let c: Vec<BigInt> = (0..h.len()).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
            let mut v = vec![BigInt::zero(); 6];
            for (ci, row) in c.iter().zip(&h) {
                for (a, b) in v.iter_mut().zip(row) {
                    *a += ci * b;
                }
            }
            assert_eq!(solve_echelon(&h, &v), Some(c));
            assert_eq!(solve_integral(&h, &v), solve_echelon(&h, &v));
            v[rng.gen_range(0..6)] += 1;
            assert_eq!(solve_echelon(&h, &v), solve_integral(&h, &v));
        }
    }
}
