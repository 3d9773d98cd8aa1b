//! Finite quadratic forms and discriminant forms of even lattices.
//!
//! A form is stored on a direct sum of cyclic groups `⊕ Z/n_i` with one
//! generator per summand; `q` takes values in Q/2Z and `b` in Q/Z.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, fmt_q, parse_q, reduce_mod, Q64};
use crate::error::{Error, Result};
use crate::lattice::ExactLattice;
use crate::matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinQuadForm {
    /// Orders of the generators (all > 1).
    pub orders: Vec<i64>,
    /// `b(g_i, g_j)` reduced into `[0, 1)`.
    pub bilinear: Vec<Vec<Q64>>,
    /// `q(g_i)` reduced into `[0, 2)`.
    pub quadratic: Vec<Q64>,
}

/// JSON shape `{gens, q, b}` with rationals written as `"a/b"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinQuadFormJson {
    pub gens: Vec<i64>,
    pub q: Vec<String>,
    pub b: Vec<Vec<String>>,
}

impl FinQuadForm {
    pub fn trivial() -> Self {
        FinQuadForm { orders: vec![], bilinear: vec![], quadratic: vec![] }
    }

    /// Build from generator data; values are reduced and trivial generators dropped.
    pub fn from_parts(orders: Vec<i64>, bilinear: Vec<Vec<Q64>>, quadratic: Vec<Q64>) -> Self {
        let keep: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
        FinQuadForm {
            orders: keep.iter().map(|&i| orders[i]).collect(),
            bilinear: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| reduce_mod(bilinear[i][j], 1)).collect())
                .collect(),
            quadratic: keep.iter().map(|&i| reduce_mod(quadratic[i], 2)).collect(),
        }
    }

    /// Cyclic form `Z/n` with generator square `q`.
    pub fn cyclic(n: i64, q: Q64) -> Self {
        FinQuadForm::from_parts(vec![n], vec![vec![q]], vec![q])
    }

    pub fn order(&self) -> i64 {
        self.orders.iter().product()
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn q(&self, x: &[i64]) -> Q64 {
        let k = self.orders.len();
        let mut s = Q64::zero();
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            s += self.quadratic[i] * (x[i] * x[i]);
            for j in i + 1..k {
                s += self.bilinear[i][j] * (2 * x[i] * x[j]);
            }
        }
        reduce_mod(s, 2)
    }

    pub fn b(&self, x: &[i64], y: &[i64]) -> Q64 {
        let k = self.orders.len();
        let mut s = Q64::zero();
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                s += self.bilinear[i][j] * (x[i] * y[j]);
            }
        }
        reduce_mod(s, 1)
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        (0..self.orders.len()).map(|i| (x[i] + y[i]).rem_euclid(self.orders[i])).collect()
    }

    pub fn scale(&self, x: &[i64], c: i64) -> Vec<i64> {
        (0..self.orders.len()).map(|i| (x[i] * c).rem_euclid(self.orders[i])).collect()
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        let mut o = 1;
        for i in 0..self.orders.len() {
            let n = self.orders[i];
            let oi = n / arith::gcd_i64(x[i].rem_euclid(n), n);
            o = arith::lcm_i64(o, oi);
        }
        o
    }

    /// All group elements in mixed-radix order.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &n in &self.orders {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for e in &out {
                for c in 0..n {
                    let mut v = e.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Checks that `b` polarizes `q` on generators.
    pub fn is_consistent(&self) -> bool {
        let k = self.orders.len();
        for i in 0..k {
            let n = self.orders[i];
            // n * g_i = 0: q(n g) = n^2 q(g) must vanish mod 2, b(n g, .) mod 1
            if reduce_mod(self.quadratic[i] * (n * n), 2) != Q64::zero() {
                return false;
            }
            if reduce_mod(self.quadratic[i] - self.bilinear[i][i], 1) != Q64::zero() {
                return false;
            }
            for j in 0..k {
                if self.bilinear[i][j] != self.bilinear[j][i] {
                    return false;
                }
                if reduce_mod(self.bilinear[i][j] * n, 1) != Q64::zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn negated(&self) -> Self {
        FinQuadForm::from_parts(
            self.orders.clone(),
            self.bilinear.iter().map(|r| r.iter().map(|x| -*x).collect()).collect(),
            self.quadratic.iter().map(|x| -*x).collect(),
        )
    }

    pub fn direct_sum(&self, other: &FinQuadForm) -> Self {
        let k1 = self.orders.len();
        let k = k1 + other.orders.len();
        let mut b = vec![vec![Q64::zero(); k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                b[i][j] = self.bilinear[i][j];
            }
        }
        for i in 0..other.orders.len() {
            for j in 0..other.orders.len() {
                b[k1 + i][k1 + j] = other.bilinear[i][j];
            }
        }
        let mut orders = self.orders.clone();
        orders.extend(&other.orders);
        let mut q = self.quadratic.clone();
        q.extend(&other.quadratic);
        FinQuadForm::from_parts(orders, b, q)
    }

    /// Restriction to the p-Sylow subgroup.
    pub fn p_primary(&self, p: i64) -> Self {
        let mut orders = Vec::new();
        let mut mult = Vec::new();
        for (i, &n) in self.orders.iter().enumerate() {
            let pp = arith::p_part(n, p);
            if pp > 1 {
                orders.push(pp);
                mult.push((i, n / pp));
            }
        }
        let bil = mult
            .iter()
            .map(|&(i, mi)| mult.iter().map(|&(j, mj)| self.bilinear[i][j] * (mi * mj)).collect())
            .collect();
        let q = mult.iter().map(|&(i, mi)| self.quadratic[i] * (mi * mi)).collect();
        FinQuadForm::from_parts(orders, bil, q)
    }

    /// Minimal number of generators of the p-part.
    pub fn length_p(&self, p: i64) -> usize {
        self.orders.iter().filter(|&&n| n % p == 0).count()
    }

    /// Minimal number of generators of the whole group.
    pub fn length(&self) -> usize {
        arith::prime_factors(self.order() as u64)
            .into_iter()
            .map(|p| self.length_p(p as i64))
            .max()
            .unwrap_or(0)
    }

    /// True iff every element of order 2 has integral square.
    pub fn is_even_at_2(&self) -> bool {
        let two = self.p_primary(2);
        let k = two.orders.len();
        for mask in 1u64..(1u64 << k) {
            let x: Vec<i64> =
                (0..k).map(|i| if mask >> i & 1 == 1 { two.orders[i] / 2 } else { 0 }).collect();
            if !two.q(&x).is_integer() {
                return false;
            }
        }
        true
    }

    /// Determinant of the Gram matrix of `q` on the given generators
    /// (diagonal `q(g_i)`, off-diagonal `b(g_i, g_j)`).
    pub fn gram_determinant(&self) -> BigRational {
        let k = self.orders.len();
        let m: matrix::QMat = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let v = if i == j { self.quadratic[i] } else { self.bilinear[i][j] };
                        arith::big_q(v)
                    })
                    .collect()
            })
            .collect();
        det_q(&m)
    }

    /// `det` of the p-primary part (the empty determinant is 1).
    pub fn det_p(&self, p: i64) -> BigRational {
        self.p_primary(p).gram_determinant()
    }

    /// Orthogonal complement of the subgroup generated by `gens`.
    pub fn orthogonal_complement(&self, gens: &[Vec<i64>]) -> Self {
        let elems: Vec<Vec<i64>> = self
            .elements()
            .into_iter()
            .filter(|x| gens.iter().all(|g| self.b(x, g).is_zero()))
            .collect();
        self.subgroup_form(&elems)
    }

    /// Restriction of the form to the subgroup generated by `elems`,
    /// re-expressed on independent cyclic generators.
    pub fn subgroup_form(&self, elems: &[Vec<i64>]) -> Self {
        let k = self.orders.len();
        if k == 0 {
            return FinQuadForm::trivial();
        }
        let mut rows: Vec<Vec<i64>> = elems.to_vec();
        for i in 0..k {
            let mut r = vec![0; k];
            r[i] = self.orders[i];
            rows.push(r);
        }
        let b = matrix::hnf(&matrix::to_big(&rows));
        // relations: n_i e_i expressed in the basis b
        let bq = matrix::to_q(&b);
        let binv = matrix::inverse_q(&bq).expect("full-rank subgroup lattice");
        let rel: matrix::IMat = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let v = &binv[i][j] * BigRational::from_integer(BigInt::from(self.orders[i]));
                        assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        let (_u, d, v) = matrix::snf(&rel);
        let vinv = matrix::inverse_q(&matrix::to_q(&v)).unwrap();
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for i in 0..k {
            let di = d[i].to_i64().unwrap();
            if di <= 1 {
                continue;
            }
            let mut g = vec![0i64; k];
            for j in 0..k {
                let c = vinv[i][j].to_integer();
                for t in 0..k {
                    let x = (&c * &b[j][t]).to_i64().unwrap();
                    g[t] += x;
                }
            }
            let g: Vec<i64> = g.iter().enumerate().map(|(t, &x)| x.rem_euclid(self.orders[t])).collect();
            gens.push(g);
            orders.push(di);
        }
        let bil = gens.iter().map(|x| gens.iter().map(|y| self.b(x, y)).collect()).collect();
        let q = gens.iter().map(|x| self.q(x)).collect();
        FinQuadForm::from_parts(orders, bil, q)
    }

    /// Enumerate isometries `self -> other`, given as images of generators,
    /// stopping after `limit` results.
    pub fn isometries(&self, other: &FinQuadForm, limit: usize) -> Vec<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        if self.order() != other.order() {
            return out;
        }
        let target = other.elements();
        let mut cur: Vec<Vec<i64>> = Vec::new();
        self.iso_rec(other, &target, &mut cur, &mut out, limit);
        out
    }

    fn iso_rec(
        &self,
        other: &FinQuadForm,
        target: &[Vec<i64>],
        cur: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<Vec<i64>>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let i = cur.len();
        if i == self.orders.len() {
            if other.generated_order(cur) == other.order() {
                out.push(cur.clone());
            }
            return;
        }
        for y in target {
            if other.element_order(y) != self.orders[i] || other.q(y) != self.quadratic[i] {
                continue;
            }
            if (0..i).any(|j| other.b(&cur[j], y) != self.bilinear[j][i]) {
                continue;
            }
            cur.push(y.clone());
            self.iso_rec(other, target, cur, out, limit);
            cur.pop();
            if out.len() >= limit {
                return;
            }
        }
    }

    pub fn is_isomorphic(&self, other: &FinQuadForm) -> bool {
        !self.isometries(other, 1).is_empty()
    }

    /// Order of the subgroup generated by the given elements.
    pub fn generated_order(&self, gens: &[Vec<i64>]) -> i64 {
        let mut seen = std::collections::HashSet::new();
        let zero = vec![0i64; self.orders.len()];
        seen.insert(zero.clone());
        let mut stack = vec![zero];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen.len() as i64
    }

    /// Image of an element under a map given by generator images.
    pub fn apply_map(&self, images: &[Vec<i64>], target: &FinQuadForm, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0i64; target.orders.len()];
        for i in 0..self.orders.len() {
            y = target.add(&y, &target.scale(&images[i], x[i]));
        }
        y
    }

    pub fn to_json(&self) -> FinQuadFormJson {
        FinQuadFormJson {
            gens: self.orders.clone(),
            q: self.quadratic.iter().map(fmt_q).collect(),
            b: self.bilinear.iter().map(|r| r.iter().map(fmt_q).collect()).collect(),
        }
    }

    pub fn from_json(j: &FinQuadFormJson) -> Result<Self> {
        let parse = |s: &String| parse_q(s).ok_or_else(|| Error::Invalid(format!("bad rational {s}")));
        let q = j.q.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let b = j
            .b
            .iter()
            .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if q.len() != j.gens.len() || b.len() != j.gens.len() {
            return Err(Error::Invalid("form size mismatch".into()));
        }
        let f = FinQuadForm::from_parts(j.gens.clone(), b, q);
        if !f.is_consistent() {
            return Err(Error::Invalid("b does not polarize q".into()));
        }
        Ok(f)
    }
}

fn det_q(m: &matrix::QMat) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pv = a[c][c].clone();
        d *= &pv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Discriminant form `L^∨/L` of a nondegenerate even lattice, on the
/// generators read off from the Smith normal form of the Gram matrix
/// (increasing elementary divisors).
pub fn discriminant_form(l: &ExactLattice) -> Result<FinQuadForm> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let (gens, orders) = dual_generators(l)?;
    let g = l.gram_big();
    let n = l.rank;
    let k = gens.len();
    let mut bil = vec![vec![Q64::zero(); k]; k];
    let mut q = vec![Q64::zero(); k];
    for i in 0..k {
        for j in 0..k {
            // (v_i/d_i)^T G (v_j/d_j)
            let mut s = BigInt::zero();
            for a in 0..n {
                if gens[i][a].is_zero() {
                    continue;
                }
                for b in 0..n {
                    s += &gens[i][a] * &g[a][b] * &gens[j][b];
                }
            }
            let den = BigInt::from(orders[i]) * BigInt::from(orders[j]);
            let r = BigRational::new(s, den);
            let modulus = if i == j { 2 } else { 1 };
            let red = reduce_big(&r, modulus);
            let val = Q64::new(red.numer().to_i64().unwrap(), red.denom().to_i64().unwrap());
            if i == j {
                q[i] = val;
                bil[i][i] = reduce_mod(val, 1);
            } else {
                bil[i][j] = val;
            }
        }
    }
    Ok(FinQuadForm::from_parts(orders, bil, q))
}

/// Generators of `L^∨/L` in lattice coordinates (numerators over the
/// returned orders): `(numerator vectors, orders)`.
pub fn dual_generators(l: &ExactLattice) -> Result<(Vec<Vec<BigInt>>, Vec<i64>)> {
    if !l.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let (_u, d, v) = matrix::snf(&l.gram_big());
    let n = l.rank;
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        let di = d[i].to_i64().ok_or_else(|| Error::Invalid("elementary divisor too large".into()))?;
        if di > 1 {
            gens.push((0..n).map(|a| v[a][i].clone()).collect());
            orders.push(di);
        }
    }
    Ok((gens, orders))
}

fn reduce_big(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let k = (x / &m).floor();
    x - k * m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeVerdict {
    pub p: i64,
    pub length: usize,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricityReport {
    pub rank_ok: bool,
    pub per_prime: Vec<PrimeVerdict>,
    pub overall: bool,
}

/// The prime-wise embedding conditions for a mild extension `S` with
/// discriminant form `s_discr` and `rank_l = rank` of the line set.
pub fn geometricity_check(s_discr: &FinQuadForm, rank_l: usize) -> GeometricityReport {
    let rank_ok = rank_l <= 20;
    let delta = 22i64 - rank_l as i64;
    let order = s_discr.order();
    let mut primes: Vec<i64> = arith::prime_factors(order as u64).into_iter().map(|p| p as i64).collect();
    for p in [2, 3] {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort();
    let total = BigRational::from_integer(BigInt::from(order));
    let three = BigRational::from_integer(BigInt::from(3));
    let mut per_prime = Vec::new();
    for p in primes {
        let len = s_discr.length_p(p) as i64;
        let verdict = if p > 3 {
            len < delta
                || (len == delta
                    && arith::same_square_class(&s_discr.det_p(p), &(&three * &total), p as u64))
        } else if p == 2 {
            len < delta
                || (len == delta
                    && (!s_discr.is_even_at_2() || {
                        let d = s_discr.det_p(2);
                        let t = &three * &total;
                        arith::same_square_class(&d, &t, 2) || arith::same_square_class(&d, &(-t), 2)
                    }))
        } else {
            // The summand <ħ/3> = <2/3> contributes det 6, so the complement
            // condition det T_3 = |T| reads det S_3 = 2|S| = -|S|.
            len <= delta
                || (len == delta + 1 && arith::same_square_class(&s_discr.det_p(3), &(-total.clone()), 3))
        };
        per_prime.push(PrimeVerdict { p, length: len as usize, verdict });
    }
    let overall = rank_ok && per_prime.iter().all(|v| v.verdict);
    GeometricityReport { rank_ok, per_prime, overall }
}

/// `det(spn_Z) < 1296` for a rank-20 set: then the integral span is the
/// only mild extension.
pub fn mild_det_bound(span_det: i64) -> bool {
    span_det < 1296
}

/// Build the 2-polarized hyperbolic lattice `NS ∋ h` from a positive
/// definite even lattice `S ∋ ħ` with `ħ² = 6` (inverse of the index-2
/// gluing). Returns `(NS, h)` with `h` in the coordinates of NS's basis;
/// NS's basis is a basis of `ħ^⊥ ⊂ S` (negated) followed by the glue vector.
pub fn inverse_construction(s: &ExactLattice, hbar: &[i64]) -> Result<(ExactLattice, Vec<i64>)> {
    let d = inverse_construction_data(s, hbar)?;
    Ok((d.ns, d.h))
}

/// The inverse construction together with the basis `K` of `ħ^⊥ ⊂ S` and
/// the vector `w` (`w·ħ = 3`) defining the glue, both in `S` coordinates.
#[derive(Debug, Clone)]
pub struct InverseData {
    pub ns: ExactLattice,
    pub h: Vec<i64>,
    pub k: Vec<Vec<i64>>,
    pub w: Vec<i64>,
}

pub fn inverse_construction_data(s: &ExactLattice, hbar: &[i64]) -> Result<InverseData> {
    if s.dot(hbar, hbar) != 6 {
        return Err(Error::Invalid("ħ² must be 6".into()));
    }
    let n = s.rank;
    // w with w·ħ = 3
    let prods: Vec<i64> = (0..n).map(|i| s.dot(&unit(n, i), hbar)).collect();
    let (g, coef) = ext_gcd_vec(&prods);
    if g.abs() != 3 {
        return Err(Error::Inconsistent(format!("gluing class absent: gcd of products with ħ is {g}")));
    }
    let w: Vec<i64> = coef.iter().map(|c| c * g.signum()).collect();
    let (k, t) = perp_basis(s, hbar, &w)?;
    // NS basis: K (negated form) followed by glue g = (w - ħ/2) + h/2
    let r = k.len();
    let mut gram = vec![vec![0i64; r + 1]; r + 1];
    for i in 0..r {
        for j in 0..r {
            gram[i][j] = -s.dot(&k[i], &k[j]);
        }
        let v = -s.dot(&k[i], &w);
        gram[i][r] = v;
        gram[r][i] = v;
    }
    gram[r][r] = 2 - s.dot(&w, &w);
    // h = 2g - (2w - ħ), with 2w - ħ = Σ t_i k_i
    let mut h: Vec<i64> = t.iter().map(|x| -x).collect();
    h.push(2);
    let ns = ExactLattice::new(gram)?;
    Ok(InverseData { ns, h, k, w })
}

/// Forward construction: from `NS ∋ h` (h² = 2, some vector with odd
/// product with h) build `S ∋ ħ`. Basis: `h^⊥` (negated) followed by glue.
pub fn forward_construction(ns: &ExactLattice, h: &[i64]) -> Result<(ExactLattice, Vec<i64>)> {
    if ns.dot(h, h) != 2 {
        return Err(Error::Invalid("h² must be 2".into()));
    }
    let n = ns.rank;
    let prods: Vec<i64> = (0..n).map(|i| ns.dot(&unit(n, i), h)).collect();
    let (g, coef) = ext_gcd_vec(&prods);
    if g.abs() != 1 {
        return Err(Error::Inconsistent("no vector with h-product 1".into()));
    }
    let w: Vec<i64> = coef.iter().map(|c| c * g.signum()).collect();
    // basis of h^⊥ via the same routine (h·w = 1, so 2w - h ∈ h^⊥)
    let (k, t) = perp_basis_general(ns, h, &w, 1)?;
    let r = k.len();
    let mut gram = vec![vec![0i64; r + 1]; r + 1];
    for i in 0..r {
        for j in 0..r {
            gram[i][j] = -ns.dot(&k[i], &k[j]);
        }
        let v = -ns.dot(&k[i], &w);
        gram[i][r] = v;
        gram[r][i] = v;
    }
    gram[r][r] = 2 - ns.dot(&w, &w);
    // ħ = 2 glue - (2w - h)
    let mut hb: Vec<i64> = t.iter().map(|x| -x).collect();
    hb.push(2);
    Ok((ExactLattice::new(gram)?, hb))
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Basis of `ħ^⊥` in `S` together with the coordinates of `2w - ħ` in it.
fn perp_basis(s: &ExactLattice, hbar: &[i64], w: &[i64]) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    perp_basis_general(s, hbar, w, 3)
}

/// For `x` with `x² = 2c` and `w·x = c`: basis of `x^⊥` and coordinates of `2w - x`.
fn perp_basis_general(
    s: &ExactLattice,
    x: &[i64],
    w: &[i64],
    c: i64,
) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let n = s.rank;
    // kernel of the functional v -> v·x on Z^n
    let col: matrix::IMat = (0..n).map(|i| vec![BigInt::from(s.dot(&unit(n, i), x))]).collect();
    let kb = matrix::hnf(&matrix::left_kernel(&col));
    let k: Vec<Vec<i64>> = matrix::to_i64(&kb).ok_or_else(|| Error::Invalid("overflow".into()))?;
    let target: Vec<BigInt> = (0..n).map(|i| BigInt::from(2 * w[i] - x[i])).collect();
    debug_assert_eq!(s.dot(w, x), c);
    let t = matrix::solve_integral(&kb, &target)
        .ok_or_else(|| Error::Inconsistent("2w - x not in the orthogonal complement".into()))?;
    Ok((k, t.iter().map(|v| v.to_i64().unwrap()).collect()))
}

/// gcd of a vector together with Bezout coefficients.
fn ext_gcd_vec(v: &[i64]) -> (i64, Vec<i64>) {
    let mut g = 0i64;
    let mut coef = vec![0i64; v.len()];
    for (i, &a) in v.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if g == 0 {
            g = a;
            coef[i] = 1;
            continue;
        }
        let (d, x, y) = ext_gcd(g, a);
        for c in coef.iter_mut() {
            *c *= x;
        }
        coef[i] = y;
        g = d;
    }
    (g, coef)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, x, y) = ext_gcd(b, a.rem_euclid(b));
        (d, y, x - a.div_euclid(b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_lattice_forms() {
        for n in 1..8usize {
            let f = discriminant_form(&ExactLattice::cartan_a(n)).unwrap();
            assert_eq!(f.orders, vec![n as i64 + 1]);
            // some generator of the cyclic group has square n/(n+1)
            let target = Q64::new(n as i64, n as i64 + 1);
            assert!(f.elements().iter().any(|x| f.element_order(x) == n as i64 + 1 && f.q(x) == target));
        }
        let d4 = discriminant_form(&ExactLattice::cartan_d(4)).unwrap();
        assert_eq!(d4.orders, vec![2, 2]);
        let d5 = discriminant_form(&ExactLattice::cartan_d(5)).unwrap();
        assert_eq!(d5.orders, vec![4]);
        assert_eq!(discriminant_form(&ExactLattice::hyperbolic_plane()).unwrap().order(), 1);
    }

    #[test]
    fn p_parts_and_parity() {
        let f = FinQuadForm::cyclic(12, Q64::new(1, 12));
        assert_eq!(f.p_primary(3).orders, vec![3]);
        assert_eq!(f.length_p(3), 1);
        assert_eq!(f.p_primary(5).order(), 1);
        let g = FinQuadForm::cyclic(4, Q64::new(1, 4)).direct_sum(&FinQuadForm::cyclic(2, Q64::new(1, 2)));
        assert_eq!(g.p_primary(2).order(), 8);
        assert_eq!(g.length_p(2), 2);
        let a1 = discriminant_form(&ExactLattice::cartan_a(1)).unwrap();
        assert!(!a1.is_even_at_2());
        // all three order-2 classes of D4 have square 1
        let d4 = discriminant_form(&ExactLattice::cartan_d(4)).unwrap();
        assert!(d4.is_even_at_2());
        let d6 = discriminant_form(&ExactLattice::cartan_d(6)).unwrap();
        assert!(!d6.is_even_at_2());
        assert!(FinQuadForm::trivial().is_even_at_2());
        // U(2) has an even 2-part
        let u2 = ExactLattice::new(vec![vec![0, 2], vec![2, 0]]).unwrap();
        assert!(discriminant_form(&u2).unwrap().is_even_at_2());
    }

    #[test]
    fn geometricity_trivial_branches() {
        let r = geometricity_check(&FinQuadForm::trivial(), 21);
        assert!(!r.overall);
        let f = FinQuadForm::cyclic(9, Q64::new(2, 9));
        assert!(geometricity_check(&f, 20).overall);
        assert!(mild_det_bound(321));
        assert!(!mild_det_bound(1296));
    }

    #[test]
    fn inverse_roundtrip_small() {
        // S = <l, l*> with l² = 4, l·l* = -1, ħ = l + l*
        let s = ExactLattice::new(vec![vec![4, -1], vec![-1, 4]]).unwrap();
        let (ns, h) = inverse_construction(&s, &[1, 1]).unwrap();
        assert_eq!(ns.dot(&h, &h), 2);
        assert_eq!(ns.signature().unwrap(), (1, 1));
        assert_eq!(ns.determinant() * BigInt::from(3), -s.determinant());
        let (s2, hb2) = forward_construction(&ns, &h).unwrap();
        assert_eq!(s2.dot(&hb2, &hb2), 6);
        assert_eq!(s2.determinant(), s.determinant());
    }
}
