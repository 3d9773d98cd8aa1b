//! Small random configurations for testing the search against exhaustive
//! enumeration: a Niemeier lattice, `ħ` a sum of three orthogonal roots, and
//! extra restrictions added until only a few lines remain.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::PolarizedConfig;
use crate::error::{Error, Result};
use crate::lines::{enumerate_lines, LineUniverse};
use crate::niemeier::NiemeierLattice;

/// Lattices used for toy configurations (small root systems keep the line
/// enumeration cheap).
pub const TOY_LATTICES: [&str; 6] = ["24A1", "12A2", "8A3", "6A4", "6D4", "4A6"];

#[derive(Debug, Clone, Copy)]
pub struct ToyOptions {
    pub min_lines: usize,
    pub max_lines: usize,
    pub attempts: usize,
}

impl Default for ToyOptions {
    fn default() -> Self {
        ToyOptions { min_lines: 8, max_lines: 40, attempts: 64 }
    }
}

fn orthogonal_roots(n: &NiemeierLattice, roots: &[Vec<i64>], rng: &mut ChaCha8Rng, k: usize) -> Option<Vec<Vec<i64>>> {
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for _ in 0..k {
        let ok: Vec<&Vec<i64>> = roots.iter().filter(|r| chosen.iter().all(|c| n.dot_num(c, r) == 0)).collect();
        chosen.push((*ok.choose(rng)?).clone());
    }
    Some(chosen)
}

/// A random configuration with `min_lines ≤ |𝔉| ≤ max_lines`, reproducible
/// from the seed.
pub fn toy_config(seed: u64, opts: ToyOptions) -> Result<PolarizedConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..opts.attempts {
        let key = TOY_LATTICES[rng.gen_range(0..TOY_LATTICES.len())];
        let n = Arc::new(NiemeierLattice::build(key)?);
        let roots = n.roots();
        let Some(rs) = orthogonal_roots(&n, &roots, &mut rng, 3) else { continue };
        let hbar: Vec<i64> = (0..rs[0].len()).map(|i| rs[0][i] + rs[1][i] + rs[2][i]).collect();
        let rbar = if rng.gen_bool(0.5) {
            let perp: Vec<&Vec<i64>> = roots.iter().filter(|r| n.dot_num(r, &hbar) == 0).collect();
            perp.choose(&mut rng).map(|r| (*r).clone())
        } else {
            None
        };
        let mut config = PolarizedConfig::new(&format!("toy-{seed}-{attempt}-{key}"), n.clone(), hbar, rbar)?;
        let mut lines = enumerate_lines(&config);
        let mut extra: Vec<Vec<i64>> = Vec::new();
        let mut tries = 0;
        while lines.len() > opts.max_lines && tries < 400 {
            tries += 1;
            let v = if rng.gen_bool(0.7) {
                roots.choose(&mut rng).unwrap().clone()
            } else {
                let a = roots.choose(&mut rng).unwrap();
                let b = roots.choose(&mut rng).unwrap();
                a.iter().zip(b).map(|(x, y)| x + y).collect()
            };
            let h = n.dot_num(&config.hbar, &v);
            let kept: Vec<Vec<i64>> = lines.iter().filter(|l| 2 * n.dot_num(l, &v) == h).cloned().collect();
            if kept.len() >= opts.min_lines && kept.len() < lines.len() {
                lines = kept;
                extra.push(v);
            }
        }
        if lines.len() < opts.min_lines || lines.len() > opts.max_lines {
            continue;
        }
        config = config.with_extra(extra)?;
        return Ok(config);
    }
    Err(Error::Budget(format!("no toy configuration found from seed {seed}")))
}

/// The line universe of a toy configuration.
pub fn toy_universe(seed: u64, opts: ToyOptions) -> Result<Arc<LineUniverse>> {
    LineUniverse::build(Arc::new(toy_config(seed, opts)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_sizes_and_duality() {
        for seed in 0..4 {
            let u = toy_universe(seed, ToyOptions::default()).unwrap();
            assert!((8..=40).contains(&u.len()), "seed {seed}: {} lines", u.len());
            assert!((0..u.len()).all(|i| u.dual[u.dual[i]] == i && u.product(i, u.dual[i]) == -1));
        }
    }
}
