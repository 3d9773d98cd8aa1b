//! Small exact-arithmetic helpers: rationals modulo 1 or 2, prime factors,
//! and p-adic square classes of nonzero rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rational number with 64-bit parts. Discriminant values have small
/// denominators, so this is enough for finite quadratic forms.
pub type Q64 = Ratio<i64>;

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a.lcm(&b)
    }
}

/// Reduce `x` into `[0, m)` for a positive rational modulus `m`.
pub fn reduce_mod(x: Q64, m: i64) -> Q64 {
    let m = Q64::from_integer(m);
    let k = (x / m).floor();
    x - k * m
}

/// Format a rational as `"a/b"` (or `"a"` when integral).
pub fn fmt_q(x: &Q64) -> String {
    if *x.denom() == 1 {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `"a/b"` or `"a"`.
pub fn parse_q(s: &str) -> Option<Q64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().ok()?;
            let b: i64 = b.trim().parse().ok()?;
            if b == 0 {
                None
            } else {
                Some(Q64::new(a, b))
            }
        }
        None => s.parse::<i64>().ok().map(Q64::from_integer),
    }
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// The p-part `p^v` of a positive integer.
pub fn p_part(n: i64, p: i64) -> i64 {
    let mut n = n.abs();
    let mut r = 1;
    while n % p == 0 {
        n /= p;
        r *= p;
    }
    r
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    let r = a.modpow(&e, &pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Class of a nonzero rational in `Q_p^* / (Q_p^*)^2`.
///
/// For odd p the class is (valuation parity, Legendre symbol of the unit
/// part); for p = 2 it is (valuation parity, unit part mod 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareClass {
    pub odd_valuation: bool,
    pub unit: i32,
}

pub fn square_class(x: &BigRational, p: u64) -> SquareClass {
    assert!(!x.is_zero(), "square class of zero");
    let num = x.numer().clone();
    let den = x.denom().clone();
    let vn = valuation(&num, p);
    let vd = valuation(&den, p);
    let pb = BigInt::from(p);
    let un = &num / pb.pow(vn);
    let ud = &den / pb.pow(vd);
    // unit = un / ud; modulo squares this equals un * ud.
    let u = un * ud;
    let odd_valuation = (vn as i64 - vd as i64).rem_euclid(2) == 1;
    let unit = if p == 2 {
        u.mod_floor(&BigInt::from(8)).to_i32().unwrap()
    } else {
        legendre(&u, p)
    };
    SquareClass { odd_valuation, unit }
}

/// Whether two nonzero rationals agree modulo squares of `Q_p^*`.
pub fn same_square_class(a: &BigRational, b: &BigRational, p: u64) -> bool {
    square_class(a, p) == square_class(b, p)
}

pub fn big_q(x: Q64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_and_parse() {
        assert_eq!(reduce_mod(Q64::new(-1, 2), 2), Q64::new(3, 2));
        assert_eq!(reduce_mod(Q64::new(7, 3), 1), Q64::new(1, 3));
        assert_eq!(parse_q("4/3"), Some(Q64::new(4, 3)));
        assert_eq!(parse_q("-2"), Some(Q64::from_integer(-2)));
        assert_eq!(fmt_q(&Q64::new(2, 3)), "2/3");
    }

    #[test]
    fn primes() {
        assert_eq!(prime_factors(324), vec![2, 3]);
        assert_eq!(prime_factors(143), vec![11, 13]);
        assert!(is_prime(23));
        assert_eq!(p_part(324, 3), 81);
    }

    #[test]
    fn square_classes() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        // 4 is a square everywhere
        assert!(same_square_class(&q(4, 1), &q(1, 1), 2));
        assert!(same_square_class(&q(4, 9), &q(1, 1), 3));
        // 2 is a non-residue mod 3 and mod 5, a residue mod 7
        assert!(!same_square_class(&q(2, 1), &q(1, 1), 5));
        assert!(same_square_class(&q(2, 1), &q(1, 1), 7));
        // 2-adic units: 17 = 1 mod 8 is a square, 5 is not
        assert!(same_square_class(&q(17, 1), &q(1, 1), 2));
        assert!(!same_square_class(&q(5, 1), &q(1, 1), 2));
        assert!(same_square_class(&q(1, 3), &q(3, 1), 2));
        assert_eq!(binomial(12, 6), 924);
    }
}
