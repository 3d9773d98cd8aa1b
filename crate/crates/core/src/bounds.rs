//! Numerical bounds: the two-block lemma for self-dual orbits, the maximal
//! set-system sizes used for `A_n` and `D_n` blocks, the subblock case rules,
//! and the two-distance (Elkies) bounds.

use crate::arith::Q64;
use crate::clique::{self, Graph};
use crate::error::{Error, Result};

/// `max{4u + min(cnt3 - 2u, (cnt2 - 2u) bnd3) | 0 ≤ u ≤ min(cnt2, cnt3)/2}`.
pub fn lemma3_bound(cnt2: u64, cnt3: u64, bnd3: u64) -> u64 {
    (0..=cnt2.min(cnt3) / 2)
        .map(|u| 4 * u + (cnt3 - 2 * u).min((cnt2 - 2 * u) * bnd3))
        .max()
        .unwrap_or(0)
}

/// Symmetric differences allowed between two sets of a collection.
fn allowed_difference(d: u32) -> bool {
    matches!(d, 0 | 4 | 6 | 10)
}

/// Exhaustive maximum over collections of subsets of an `n`-set (all of size
/// `m`, or arbitrary sizes when `m` is `None`) with pairwise symmetric
/// differences in `{4, 6, 10}`; with `complement_closed` the collection must
/// be closed under complements.
pub fn max_collection(n: usize, m: Option<usize>, complement_closed: bool, budget: u64) -> Result<u64> {
    if n > 20 {
        return Err(Error::Budget(format!("collections on {n} points")));
    }
    let full: u32 = (1u32 << n) - 1;
    let mut verts: Vec<u32> = (0..=full).filter(|s| m.is_none_or(|m| s.count_ones() as usize == m)).collect();
    if complement_closed {
        verts.retain(|&s| s & 1 == 1 || n == 0);
    }
    if verts.len() > 20_000 {
        return Err(Error::Budget(format!("{} candidate subsets", verts.len())));
    }
    let compatible = |a: u32, b: u32| {
        if complement_closed {
            let (ca, cb) = (full & !a, full & !b);
            [(a, b), (a, cb), (ca, b), (ca, cb)].iter().all(|&(x, y)| allowed_difference((x ^ y).count_ones()))
                && ca != b
        } else {
            allowed_difference((a ^ b).count_ones())
        }
    };
    // a complement-closed collection may hold s and its complement only when
    // their difference n is allowed
    if complement_closed && !allowed_difference(n as u32) {
        return Ok(0);
    }
    let g = Graph::from_fn(verts.len(), |i, j| compatible(verts[i], verts[j]));
    let r = clique::max_clique(&g, budget);
    if !r.complete {
        return Err(Error::Budget("set-system clique search".into()));
    }
    let k = r.clique.len() as u64;
    Ok(if complement_closed && n > 0 { 2 * k } else { k })
}

/// Maximal size of a collection of `m`-subsets of an `n`-set with pairwise
/// symmetric differences in `{0, 4, 6, 10}` (closed under complements when
/// `(n, m) = (10, 5)`). Listed values are exact; for `m = 3` outside the
/// list the counting bound `⌊n⌊(n-1)/2⌋/3⌋` is returned; other small cases
/// are computed exhaustively.
pub fn max_set_a(n: usize, m: usize) -> Result<u64> {
    if m > n {
        return Err(Error::Invalid(format!("subset size {m} exceeds {n}")));
    }
    let m = m.min(n - m);
    let table = [((6, 3), 4), ((7, 3), 7), ((8, 3), 8), ((9, 3), 12), ((10, 3), 13), ((11, 3), 17), ((8, 4), 9), ((9, 4), 12), ((10, 5), 24)];
    if let Some(&(_, v)) = table.iter().find(|(k, _)| *k == (n, m)) {
        return Ok(v);
    }
    match m {
        0 | 1 => Ok(1),
        2 => Ok((n / 2) as u64),
        3 => Ok((n * ((n - 1) / 2) / 3) as u64),
        _ => max_collection(n, Some(m), false, 1 << 22),
    }
}

/// Bound on collections of arbitrary subsets of an `n`-set, `n ≤ 10`, with
/// pairwise symmetric differences in `{0, 4, 6, 10}` (complement closed for
/// `n = 10`), and whether it is known to be sharp.
pub fn max_set_d(n: usize) -> Result<(u64, bool)> {
    const TABLE: [u64; 10] = [1, 1, 1, 2, 2, 4, 8, 10, 16, 32];
    if n == 0 || n > 10 {
        return Err(Error::Invalid(format!("set systems are tabulated for 1 ≤ n ≤ 10, got {n}")));
    }
    Ok((TABLE[n - 1], n <= 8))
}

/// Two-distance bound for `N` unit vectors in dimension `n` with products
/// `τ1`, `τ2`.
pub fn elkies_bound(n: i64, tau1: Q64, tau2: Q64) -> Result<Q64> {
    let one = Q64::from_integer(1);
    let nq = Q64::from_integer(n);
    if tau1 + tau2 > Q64::from_integer(0) {
        return Err(Error::Hypothesis("τ1 + τ2 > 0".into()));
    }
    let den = one + tau1 * tau2 * nq;
    if den <= Q64::from_integer(0) {
        return Err(Error::Hypothesis("1 + τ1 τ2 n ≤ 0".into()));
    }
    Ok((one - tau1) * (one - tau2) * nq / den)
}

/// `|𝔏| ≤ 48(rank - 1)/(26 - rank)`, rounded down to an even number.
pub fn elkies_rank_bound(rank: usize) -> Result<u64> {
    if rank == 0 || rank >= 26 {
        return Err(Error::Hypothesis(format!("rank {rank} outside 1..26")));
    }
    let b = (48 * (rank as u64 - 1)) / (26 - rank as u64);
    Ok(b - b % 2)
}

/// The cases of the subblock analysis for `A_n` and `D_n` blocks modelled in
/// `Z^n`; `support` is the size of a level set of `ħ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubblockCase {
    /// `|(r ∪ s) ∩ supp| = 1` for `l = 𝕧r - 𝕧s`.
    APoint,
    /// `|r ∩ supp| = 2` (or `|s ∩ supp| = 2`).
    APair { support: usize },
    /// One point of `r` and one point of `s` in the support.
    ARoot { support: usize },
    /// Shortest vectors `e_o` restricted to a level set with `α ≠ 0`,
    /// `|o ∩ supp| = m`.
    Shortest { support: usize, m: usize },
    /// `D_n`, shortest vectors `e_o` on the level set `α = 0`.
    ShortestZero { support: usize },
    /// `D_n`, `±2e_i` in the support.
    DTwoE,
    /// `D_n`, `l = Σ ±e_i` over `o`, level set `α = 0`, `|o ∩ supp| ∈ {0,1,2}`.
    DZero { support: usize, meet: usize },
    /// `D_n`, `α ≠ 0`, `|o ∩ supp| ≤ 3`, equal signs.
    DSameSign { support: usize, m: usize },
    /// `D_n`, `α ≠ 0`, `|o ∩ supp| = 2`, opposite signs.
    DMixed { support: usize },
}

pub fn subblock_bound(case: SubblockCase) -> Result<u64> {
    use SubblockCase::*;
    match case {
        APoint | DTwoE => Ok(1),
        APair { support } => Ok((support / 2) as u64),
        ARoot { support } | DMixed { support } => Ok(support as u64),
        Shortest { support, m } | DSameSign { support, m } => max_set_a(support, m),
        ShortestZero { support } => max_set_d(support).map(|x| x.0),
        DZero { meet, support } => match meet {
            0 => Ok(1),
            1 => Ok(2),
            2 => Ok((4 * support / 3) as u64),
            _ => Err(Error::Invalid(format!("|o ∩ supp| = {meet}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma3_values() {
        assert_eq!(lemma3_bound(0, 7, 3), 0);
        assert_eq!(lemma3_bound(2, 2, 1), 4);
        assert_eq!(lemma3_bound(4, 6, 1), 8);
    }

    #[test]
    fn set_tables() {
        assert_eq!(max_set_a(9, 3).unwrap(), 12);
        assert_eq!(max_set_a(9, 6).unwrap(), 12);
        assert_eq!(max_set_a(7, 1).unwrap(), 1);
        assert_eq!(max_set_a(10, 5).unwrap(), 24);
        assert_eq!(max_set_a(13, 3).unwrap(), 26);
        assert!(max_set_a(3, 4).is_err());
        assert_eq!(max_set_d(7).unwrap(), (8, true));
        assert_eq!(max_set_d(9).unwrap(), (16, false));
        assert!(max_set_d(11).is_err());
    }

    #[test]
    fn exhaustive_agrees_with_small_table_entries() {
        for (n, m, v) in [(6, 3, 4), (7, 3, 7), (8, 3, 8), (8, 4, 9), (8, 2, 4)] {
            assert_eq!(max_collection(n, Some(m), false, u64::MAX).unwrap(), v, "({n},{m})");
        }
        assert_eq!(max_collection(4, None, false, u64::MAX).unwrap(), 2);
    }

    #[test]
    fn large_table_entries_exhaustively() {
        for (n, m, v) in [(9, 3, 12), (10, 3, 13), (9, 4, 12)] {
            assert_eq!(max_collection(n, Some(m), false, u64::MAX).unwrap(), v, "({n},{m})");
        }
        assert_eq!(max_collection(10, Some(5), true, u64::MAX).unwrap(), 24);
    }

    #[test]
    fn elkies() {
        assert_eq!(elkies_rank_bound(20).unwrap(), 152);
        assert_eq!(elkies_rank_bound(19).unwrap(), 122);
        assert!(elkies_rank_bound(26).is_err());
        let h = Q64::new(1, 2);
        assert_eq!(elkies_bound(2, h, -h).unwrap(), Q64::from_integer(3));
        assert!(elkies_bound(2, h, h).is_err());
        assert!(elkies_bound(10, Q64::from_integer(-1), Q64::new(1, 2)).is_err());
        // the set-system bounds for n = 9, 10 come from the two-distance bound
        for n in [9i64, 10] {
            let b = elkies_bound(n, Q64::new(n - 8, n), Q64::new(n - 12, n)).unwrap();
            assert_eq!(b, Q64::from_integer(16));
        }
    }

    /// Independent oracle for the `A_n` root subblock: arcs `e_i - e_j` on a
    /// level set, pairwise `l² - l'·l''` in `{2, 3}`.
    #[test]
    fn root_subblock_rule_is_sound() {
        for t in 2..7usize {
            let arcs: Vec<(usize, usize)> = (0..t).flat_map(|i| (0..t).filter(move |&j| j != i).map(move |j| (i, j))).collect();
            let prod = |a: (usize, usize), b: (usize, usize)| {
                (a.0 == b.0) as i64 + (a.1 == b.1) as i64 - (a.0 == b.1) as i64 - (a.1 == b.0) as i64
            };
            let g = Graph::from_fn(arcs.len(), |x, y| matches!(2 - prod(arcs[x], arcs[y]), 2 | 3));
            let best = clique::max_clique(&g, u64::MAX).clique.len() as u64;
            assert!(best <= subblock_bound(SubblockCase::ARoot { support: t }).unwrap());
            if t >= 3 {
                assert_eq!(best, t as u64);
            }
        }
    }
}
