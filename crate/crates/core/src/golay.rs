//! The extended binary Golay code as the extended quadratic-residue code of
//! length 24 on the projective line over F23, points `0..=22` and `23 = ∞`.

use std::collections::HashSet;

pub const INF: usize = 23;

#[derive(Debug, Clone)]
pub struct GolayCode {
    /// All 4096 codewords as 24-bit masks, sorted.
    pub words: Vec<u32>,
    pub octads: Vec<u32>,
    pub dodecads: Vec<u32>,
    index: HashSet<u32>,
}

fn nonresidues() -> Vec<usize> {
    let q: HashSet<usize> = (1..23).map(|x| x * x % 23).collect();
    (1..23).filter(|x| !q.contains(x)).collect()
}

fn is_residue(x: usize) -> bool {
    (1..23).any(|y| y * y % 23 == x)
}

fn pow23(b: usize, e: usize) -> usize {
    let mut r = 1;
    for _ in 0..e {
        r = r * b % 23;
    }
    r
}

pub fn weight(w: u32) -> u32 {
    w.count_ones()
}

pub fn mask(points: &[usize]) -> u32 {
    points.iter().fold(0, |m, &p| m | 1 << p)
}

pub fn points(w: u32) -> Vec<usize> {
    (0..24).filter(|&i| w >> i & 1 == 1).collect()
}

impl GolayCode {
    pub fn new() -> Self {
        let n = nonresidues();
        let mut basis: Vec<u32> = Vec::new();
        for t in 0..23 {
            let mut w = mask(&n.iter().map(|x| (x + t) % 23).collect::<Vec<_>>()) | 1 << INF;
            for b in &basis {
                w = w.min(w ^ b);
            }
            if w != 0 {
                basis.push(w);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        let mut words = vec![0u32];
        for b in &basis {
            let more: Vec<u32> = words.iter().map(|w| w ^ b).collect();
            words.extend(more);
        }
        words.sort_unstable();
        let octads = words.iter().copied().filter(|&w| weight(w) == 8).collect();
        let dodecads = words.iter().copied().filter(|&w| weight(w) == 12).collect();
        let index = words.iter().copied().collect();
        GolayCode { words, octads, dodecads, index }
    }

    pub fn contains(&self, w: u32) -> bool {
        self.index.contains(&w)
    }

    pub fn weight_distribution(&self) -> [usize; 25] {
        let mut d = [0; 25];
        for &w in &self.words {
            d[weight(w) as usize] += 1;
        }
        d
    }

    /// The unique octad containing five given points.
    pub fn octad_through(&self, five: u32) -> Option<u32> {
        self.octads.iter().copied().find(|&o| o & five == five)
    }

    /// Generators of M24 as permutations of the 24 points: translation,
    /// doubling, inversion `t -> -1/t`, and the extra element
    /// `t -> t^3/9` on residues, `9 t^3` on nonresidues.
    pub fn m24_generators() -> Vec<Vec<usize>> {
        let shift: Vec<usize> = (0..24).map(|t| if t == INF { INF } else { (t + 1) % 23 }).collect();
        let double: Vec<usize> = (0..24).map(|t| if t == INF { INF } else { 2 * t % 23 }).collect();
        let inv: Vec<usize> = (0..24)
            .map(|t| match t {
                INF => 0,
                0 => INF,
                _ => (23 - pow23(t, 21)) % 23,
            })
            .collect();
        let inv9 = pow23(9, 21);
        let delta: Vec<usize> = (0..24)
            .map(|t| match t {
                INF | 0 => t,
                _ if is_residue(t) => pow23(t, 3) * inv9 % 23,
                _ => 9 * pow23(t, 3) % 23,
            })
            .collect();
        vec![shift, double, inv, delta]
    }

    pub fn apply(perm: &[usize], w: u32) -> u32 {
        (0..24).filter(|&i| w >> i & 1 == 1).fold(0, |m, i| m | 1 << perm[i])
    }
}

impl Default for GolayCode {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics() {
        let g = GolayCode::new();
        assert_eq!(g.words.len(), 4096);
        assert_eq!(g.octads.len(), 759);
        assert_eq!(g.dodecads.len(), 2576);
        let d = g.weight_distribution();
        assert_eq!((d[0], d[16], d[24]), (1, 759, 1));
        assert!(g.words.iter().all(|&w| g.contains(!w & 0xFF_FFFF)));
    }

    #[test]
    fn steiner_property() {
        let g = GolayCode::new();
        for &a in g.octads.iter().take(60) {
            for &b in &g.octads {
                assert!([0, 2, 4, 8].contains(&weight(a & b)));
            }
        }
        for five in [mask(&[0, 1, 2, 3, 4]), mask(&[5, 9, 13, 20, 23])] {
            assert_eq!(g.octads.iter().filter(|&&o| o & five == five).count(), 1);
        }
    }

    #[test]
    fn generators_preserve_code() {
        let g = GolayCode::new();
        for p in GolayCode::m24_generators() {
            let mut seen = p.clone();
            seen.sort();
            assert_eq!(seen, (0..24).collect::<Vec<_>>());
            assert!(g.octads.iter().all(|&o| g.contains(GolayCode::apply(&p, o))));
        }
    }
}
