//! Named large line sets in `N(24A1)`, each cut out of the main orbit by
//! orthogonality to a few vectors built from Golay code data:
//! `𝔏 = 𝕆1 ∩ spn(r̄, a, b, v)^⊥`, where orthogonality is taken between
//! `ħ^⊥`-projections (`2 l·v = ħ·v`).

use std::sync::Arc;

use crate::config::{a1_coefficients, a1_vector, GolayData, PolarizedConfig};
use crate::error::{Error, Result};
use crate::golay::{self, GolayCode};
use crate::lines::{LineSet, LineUniverse};

/// Registered labels with their configuration and expected size.
pub const NAMED_SETS: [(&str, u8, usize); 16] = [
    ("Lmax3", 3, 144),
    ("Lsub4", 2, 132),
    ("Lsub5", 2, 132),
    ("Lsub6", 3, 132),
    ("Lsub7", 3, 132),
    ("Misc7", 2, 126),
    ("Misc8", 2, 126),
    ("Misc9", 2, 126),
    ("Misc10", 2, 126),
    ("Misc11", 2, 124),
    ("Misc12", 2, 124),
    ("Misc13", 3, 130),
    ("Misc14", 3, 128),
    ("Misc15", 3, 126),
    ("Misc16", 3, 126),
    ("Misc17", 3, 124),
];

pub fn expected_size(label: &str) -> Option<usize> {
    NAMED_SETS.iter().find(|e| e.0 == label).map(|e| e.2)
}

pub fn config_of(label: &str) -> Option<u8> {
    NAMED_SETS.iter().find(|e| e.0 == label).map(|e| e.1)
}

/// Vector builders on 24 points (twice the root coefficients).
fn root(p: usize) -> Vec<i64> {
    let mut c = vec![0i64; 24];
    c[p] = 2;
    c
}

fn cw(m: u32) -> Vec<i64> {
    (0..24).map(|k| (m >> k & 1) as i64).collect()
}

fn sum(a: &[i64], b: &[i64], fb: i64) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + fb * y).collect()
}

fn scale(a: &[i64], f: i64) -> Vec<i64> {
    a.iter().map(|x| x * f).collect()
}

/// `𝕧_o = cw(o \ O) - cw(o ∩ O)`.
fn v_o(o: u32, big_o: u32) -> Vec<i64> {
    sum(&cw(o & !big_o), &cw(o & big_o), -1)
}

/// The main orbit `𝕆1` as a set of line indices: in configuration 2 the
/// signed octads through `r_h` meeting `O` in four points, in configuration 3
/// all lines.
pub fn main_orbit(u: &LineUniverse) -> Vec<usize> {
    let gd = u.config.golay.as_ref().expect("24A1 configuration");
    (0..u.len())
        .filter(|&i| {
            let c = a1_coefficients(&u.lines[i]);
            let supp: u32 = (0..24).filter(|&k| c[k] != 0).fold(0, |m, k| m | 1 << k);
            match gd.number {
                2 => supp.count_ones() == 8 && supp >> gd.rh.unwrap() & 1 == 1 && (supp & gd.o).count_ones() == 4,
                _ => true,
            }
        })
        .collect()
}

fn first_codeword(
    g: &GolayCode,
    weight: u32,
    meet: u32,
    big_o: u32,
    inside: &[usize],
    outside: &[usize],
    extra: impl Fn(u32) -> bool,
) -> Result<u32> {
    let words: &[u32] = match weight {
        8 => &g.octads,
        12 => &g.dodecads,
        _ => &g.words,
    };
    words
        .iter()
        .copied()
        .find(|&o| {
            o.count_ones() == weight
                && (o & big_o).count_ones() == meet
                && inside.iter().all(|&p| o >> p & 1 == 1)
                && outside.iter().all(|&p| o >> p & 1 == 0)
                && extra(o)
        })
        .ok_or_else(|| Error::Inconsistent("no codeword with the requested incidences".into()))
}

/// The orthogonality data (twice root coefficients) for a label.
pub fn defining_vectors(label: &str, gd: &GolayData) -> Result<Vec<Vec<i64>>> {
    let g = GolayCode::new();
    let big_o = gd.o;
    let rbar = gd.rbar;
    match gd.number {
        2 => {
            let rh = gd.rh.unwrap();
            let k_set: Vec<usize> = (0..24).filter(|&p| big_o >> p & 1 == 0 && p != rh && p != rbar).collect();
            let s = golay::points(big_o)[0];
            let b = sum(&cw(big_o), &root(rh), -2);
            let v_k: Vec<i64> = (0..24).map(|p| if k_set.contains(&p) { 2 } else { 0 }).collect();
            let u_s = sum(&v_k, &root(s), -2);
            let oct = |meet, w, inn: &[usize], out: &[usize]| first_codeword(&g, w, meet, big_o, inn, out, |_| true);
            let v = match label {
                "Lsub4" => root(k_set[0]),
                "Lsub5" => v_o(oct(2, 8, &[rbar, rh, s], &[])?, big_o),
                "Misc7" => v_o(oct(2, 8, &[rh, s], &[rbar])?, big_o),
                "Misc8" => sum(&v_o(oct(4, 8, &[rbar, s], &[rh])?, big_o), &root(rh), 1),
                "Misc9" => cw(oct(0, 8, &[rbar], &[rh, s])?),
                "Misc10" => v_o(oct(2, 12, &[rh, s], &[rbar])?, big_o),
                "Misc11" => v_o(oct(2, 12, &[rbar, rh, s], &[])?, big_o),
                "Misc12" => sum(&cw(oct(2, 8, &[rbar, rh], &[s])?), &root(rh), -1),
                _ => return Err(Error::Unknown(label.into())),
            };
            Ok(vec![root(rbar), b, u_s, v])
        }
        3 => {
            let k_set: Vec<usize> = (0..24).filter(|&p| big_o >> p & 1 == 0 && p != rbar).collect();
            let r = k_set[0];
            let t = k_set[1];
            let v_k: Vec<i64> = (0..24).map(|p| if k_set.contains(&p) { 2 } else { 0 }).collect();
            let w_o = |o: u32| sum(&scale(&v_o(o, big_o), 3), &cw(big_o), 1);
            let oct = |meet, w, inn: &[usize], out: &[usize]| first_codeword(&g, w, meet, big_o, inn, out, |_| true);
            let minus_s = |o: u32| {
                let s = golay::points(o & big_o)[0];
                sum(&cw(o), &root(s), -1)
            };
            let v = match label {
                "Lmax3" => root(t),
                "Lsub6" => minus_s(oct(2, 8, &[], &[rbar, r])?),
                "Lsub7" => w_o(oct(4, 8, &[rbar, r], &[])?),
                "Misc13" => minus_s(oct(2, 8, &[rbar], &[r])?),
                "Misc14" => sum(&w_o(oct(4, 8, &[rbar, r, t], &[])?), &root(t), -3),
                "Misc15" => w_o(oct(4, 8, &[r], &[rbar])?),
                "Misc16" => w_o(oct(4, 12, &[r], &[rbar])?),
                "Misc17" => {
                    let o = first_codeword(&g, 8, 4, big_o, &[], &[rbar, r], |o| {
                        let six = (o & big_o) | 1 << rbar | 1 << r;
                        !g.octads.iter().any(|&x| x & six == six)
                    })?;
                    w_o(o)
                }
                _ => return Err(Error::Unknown(label.into())),
            };
            Ok(vec![root(rbar), v_k, root(r), v])
        }
        _ => Err(Error::Unknown(label.into())),
    }
}

/// Builds a named set in its configuration's universe.
pub fn named_set_in(label: &str, u: &Arc<LineUniverse>) -> Result<LineSet> {
    let gd = u.config.golay.as_ref().ok_or_else(|| Error::Invalid("named sets live in 24A1 configurations".into()))?;
    if config_of(label) != Some(gd.number) {
        return Err(Error::Invalid(format!("{label} is not defined in configuration {}", gd.number)));
    }
    let vs: Vec<Vec<i64>> = defining_vectors(label, gd)?.iter().map(|c| a1_vector(c)).collect();
    let orbit = main_orbit(u);
    Ok(u.set(u.orthogonal_to(&orbit, &vs)))
}

/// Builds a named set together with a fresh universe.
pub fn named_set(label: &str) -> Result<LineSet> {
    let n = config_of(label).ok_or_else(|| Error::Unknown(label.into()))?;
    let u = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(n)?))?;
    named_set_in(label, &u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let u2 = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(2).unwrap())).unwrap();
        let u3 = LineUniverse::build(Arc::new(PolarizedConfig::builtin_24a1(3).unwrap())).unwrap();
        assert_eq!(main_orbit(&u2).len(), 448);
        for (label, n, size) in NAMED_SETS {
            let u = if n == 2 { &u2 } else { &u3 };
            let s = named_set_in(label, u).unwrap();
            assert_eq!(s.len(), size, "{label}");
            assert!(s.is_symmetric(), "{label}");
        }
        assert!(named_set_in("Lmax3", &u2).is_err());
        assert!(named_set("nope").is_err());
    }
}

#[cfg(test)]
mod geometry_tests {
    use super::*;

    #[test]
    fn named_sets_are_geometric_of_rank_20() {
        for (label, _, _) in NAMED_SETS {
            let s = named_set(label).unwrap();
            assert_eq!(s.rank(), 20, "{label}");
            assert!(s.is_complete(), "{label}");
            assert!(s.is_geometric().unwrap(), "{label}");
        }
    }
}
