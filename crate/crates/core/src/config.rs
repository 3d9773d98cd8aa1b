//! Polarized configurations `(N, ħ, r̄)`: a Niemeier lattice with a square-6
//! vector and an optional root orthogonal to it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{parse_q, Q64};
use crate::error::{Error, Result};
use crate::golay::{self, GolayCode};
use crate::niemeier::NiemeierLattice;

#[derive(Debug, Clone)]
pub struct PolarizedConfig {
    pub label: String,
    pub lattice: Arc<NiemeierLattice>,
    /// Ambient numerators over `lattice.denom`.
    pub hbar: Vec<i64>,
    pub rbar: Option<Vec<i64>>,
    /// Extra restrictions: lines must be orthogonal to the projection of each
    /// vector to `ħ^⊥`, i.e. `2 l·v = ħ·v`. Empty for genuine configurations.
    pub extra: Vec<Vec<i64>>,
    /// Point data for the built-in `24A1` configurations.
    pub golay: Option<GolayData>,
}

/// Code data behind a `24A1` configuration: `ħ` is built from the codeword
/// `o` (an octad or dodecad) or from the three points of `o` when it has
/// weight 3, plus the optional extra root `rh`; `rbar` is a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GolayData {
    pub number: u8,
    pub o: u32,
    pub rh: Option<usize>,
    pub rbar: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentSpec {
    Vector { component: usize, vector: Vec<i64> },
    Class { component: usize, class: usize, square: String, #[serde(default)] orbit: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSpec {
    Vector { numerators: Vec<i64> },
    Indexed { component: usize, root_index: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigJson {
    #[serde(default)]
    pub label: String,
    pub lattice: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar_components: Option<Vec<ComponentSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rbar: Option<RootSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Vec<i64>>,
}

impl PolarizedConfig {
    pub fn new(label: &str, lattice: Arc<NiemeierLattice>, hbar: Vec<i64>, rbar: Option<Vec<i64>>) -> Result<Self> {
        let n = &lattice;
        if !n.membership(&hbar)? {
            return Err(Error::Invalid("ħ is not a lattice vector".into()));
        }
        if n.norm(&hbar) != Q64::from_integer(6) {
            return Err(Error::Invalid(format!("ħ has square {}, expected 6", n.norm(&hbar))));
        }
        if let Some(r) = &rbar {
            if !n.membership(r)? || n.norm(r) != Q64::from_integer(2) {
                return Err(Error::Invalid("r̄ is not a root".into()));
            }
            if n.dot_num(r, &hbar) != 0 {
                return Err(Error::Invalid("r̄ is not orthogonal to ħ".into()));
            }
        }
        Ok(PolarizedConfig { label: label.to_string(), lattice, hbar, rbar, extra: Vec::new(), golay: None })
    }

    pub fn denom(&self) -> i64 {
        self.lattice.denom
    }

    /// Adds restrictions (ambient numerators) cutting the line set down.
    pub fn with_extra(mut self, extra: Vec<Vec<i64>>) -> Result<Self> {
        for v in &extra {
            if !self.lattice.membership(v)? {
                return Err(Error::Invalid("restriction vector is not in the lattice".into()));
            }
        }
        self.extra.extend(extra);
        Ok(self)
    }

    /// `ħ` followed by `r̄` and the extra restrictions: the vectors fixed by
    /// the reflection group of the configuration.
    pub fn fixed_vectors(&self) -> Vec<Vec<i64>> {
        let mut out = vec![self.hbar.clone()];
        out.extend(self.rbar.iter().cloned());
        out.extend(self.extra.iter().cloned());
        out
    }

    /// Whether an ambient vector satisfies the orthogonality conditions
    /// (`l·r̄ = 0` and the extra restrictions).
    pub fn satisfies_restrictions(&self, l: &[i64]) -> bool {
        let n = &self.lattice;
        if let Some(r) = &self.rbar {
            if n.dot_num(l, r) != 0 {
                return false;
            }
        }
        self.extra.iter().all(|v| 2 * n.dot_num(l, v) == n.dot_num(&self.hbar, v))
    }

    /// Component containing `r̄`.
    pub fn rbar_component(&self) -> Option<usize> {
        let r = self.rbar.as_ref()?;
        (0..self.lattice.components.len()).find(|&k| self.lattice.raw_block(r, k).iter().any(|&x| x != 0))
    }

    /// `ħ_k` in component numerators.
    pub fn hbar_block(&self, k: usize) -> Vec<i64> {
        self.lattice.block(&self.hbar, k).unwrap()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let spec: ConfigJson = serde_json::from_value(v.clone())?;
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &ConfigJson) -> Result<Self> {
        if spec.lattice == "24A1" && spec.hbar.is_none() && spec.hbar_components.is_none() {
            if let Some(num) = spec.label.strip_prefix("config").and_then(|s| s.trim().parse::<u8>().ok()) {
                return Self::builtin_24a1(num);
            }
        }
        let lat = Arc::new(NiemeierLattice::build(&spec.lattice)?);
        let d = lat.denom;
        let hbar = if let Some(h) = &spec.hbar {
            rescale(h, spec.denominator.unwrap_or(d), d)?
        } else if let Some(comps) = &spec.hbar_components {
            let mut h = vec![0i64; lat.ambient_dim];
            for c in comps {
                let (k, v) = match c {
                    ComponentSpec::Vector { component, vector } => (*component, vector.clone()),
                    ComponentSpec::Class { component, class, square, orbit } => {
                        let comp = lat.components.get(*component).ok_or_else(|| Error::Invalid("component index".into()))?;
                        let sq = parse_q(square).ok_or_else(|| Error::Invalid(format!("square {square}")))?;
                        let reps = class_orbit_representatives(comp, *class, sq);
                        let v = reps.get(*orbit).cloned().ok_or_else(|| {
                            Error::Invalid(format!("no orbit {orbit} of class {class} vectors of square {square}"))
                        })?;
                        (*component, v)
                    }
                };
                if k >= lat.components.len() {
                    return Err(Error::Invalid("component index".into()));
                }
                let e = lat.embed(k, &v);
                for (a, b) in h.iter_mut().zip(e) {
                    *a += b;
                }
            }
            h
        } else {
            return Err(Error::Invalid("config needs hbar or hbar_components".into()));
        };
        let rbar = match &spec.rbar {
            None => None,
            Some(RootSpec::Vector { numerators }) => Some(rescale(numerators, spec.denominator.unwrap_or(d), d)?),
            Some(RootSpec::Indexed { component, root_index }) => {
                let comp = lat.components.get(*component).ok_or_else(|| Error::Invalid("component index".into()))?;
                let hb = lat.block(&hbar, *component).unwrap();
                let mut roots: Vec<Vec<i64>> = comp.roots().into_iter().filter(|r| comp.pair(&hb, r) == 0).collect();
                roots.sort();
                let r = roots.get(*root_index).ok_or_else(|| Error::Invalid("root index".into()))?;
                Some(lat.embed(*component, r))
            }
        };
        let label = if spec.label.is_empty() { format!("{}-custom", spec.lattice) } else { spec.label.clone() };
        let extra = spec.extra.iter().map(|v| rescale(v, spec.denominator.unwrap_or(d), d)).collect::<Result<_>>()?;
        PolarizedConfig::new(&label, lat, hbar, rbar)?.with_extra(extra)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let spec = ConfigJson {
            label: self.label.clone(),
            lattice: self.lattice.key.clone(),
            hbar: Some(self.hbar.clone()),
            hbar_components: None,
            rbar: self.rbar.clone().map(|r| RootSpec::Vector { numerators: r }),
            denominator: Some(self.lattice.denom),
            extra: self.extra.clone(),
        };
        serde_json::to_value(spec).unwrap()
    }

    /// The three configurations in `N(24A1)`:
    /// 1. `ħ` a sum of three roots;
    /// 2. `ħ = cw O + r_h` for an octad `O` and a point `r_h ∉ O`;
    /// 3. `ħ = cw O` for a dodecad `O`;
    /// with `r̄` a root at a point outside the support of `ħ`.
    pub fn builtin_24a1(number: u8) -> Result<Self> {
        let lat = Arc::new(NiemeierLattice::build("24A1")?);
        let g = GolayCode::new();
        let first_outside = |m: u32, skip: &[usize]| (0..24).find(|&i| m >> i & 1 == 0 && !skip.contains(&i)).unwrap();
        let (o, rh, rbar) = match number {
            1 => (golay::mask(&[0, 1, 2]), None, 3),
            2 => {
                let o = g.octads[0];
                let rh = first_outside(o, &[]);
                (o, Some(rh), first_outside(o, &[rh]))
            }
            3 => {
                let o = g.dodecads[0];
                (o, None, first_outside(o, &[]))
            }
            _ => return Err(Error::Unknown(format!("24A1 configuration {number}"))),
        };
        let mut coeff = [0i64; 24]; // twice the coefficient of r_k
        for k in 0..24 {
            if o >> k & 1 == 1 {
                coeff[k] = if number == 1 { 2 } else { 1 };
            }
        }
        if let Some(p) = rh {
            coeff[p] = 2;
        }
        let hbar = a1_vector(&coeff);
        let mut rc = [0i64; 24];
        rc[rbar] = 2;
        let mut cfg = PolarizedConfig::new(&format!("24A1-config{number}"), lat, hbar, Some(a1_vector(&rc)))?;
        cfg.golay = Some(GolayData { number, o, rh, rbar });
        Ok(cfg)
    }
}

/// `Σ (c_k/2) r_k` in `N(24A1)` ambient numerators (denominator 2, each `A1`
/// spanned by `(1, -1)`).
pub fn a1_vector(twice_coeff: &[i64]) -> Vec<i64> {
    let mut v = vec![0i64; 48];
    for (k, &c) in twice_coeff.iter().enumerate() {
        v[2 * k] = c;
        v[2 * k + 1] = -c;
    }
    v
}

/// Twice the root coefficients of an `N(24A1)` vector.
pub fn a1_coefficients(v: &[i64]) -> Vec<i64> {
    (0..24).map(|k| v[2 * k]).collect()
}

fn rescale(v: &[i64], from: i64, to: i64) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| {
            let y = x * to;
            if y % from != 0 {
                Err(Error::Invalid(format!("denominator {from} does not divide into {to}")))
            } else {
                Ok(y / from)
            }
        })
        .collect()
}

/// Dominant representatives (one per Weyl orbit) of the vectors of a class
/// with a given square, sorted.
pub fn class_orbit_representatives(comp: &crate::roots::RootComponent, class: usize, square: Q64) -> Vec<Vec<i64>> {
    let dd = comp.denom * comp.denom;
    comp.dominant_weights(square)
        .into_iter()
        .filter(|v| v.class == class && Q64::new(v.norm_num, dd) == square)
        .map(|v| v.coords)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{RootComponent, RootKind};

    #[test]
    fn builtin_configs() {
        for n in 1..=3 {
            let c = PolarizedConfig::builtin_24a1(n).unwrap();
            assert_eq!(c.lattice.norm(&c.hbar), Q64::from_integer(6));
            assert!(c.rbar_component().is_some());
        }
        assert!(PolarizedConfig::builtin_24a1(4).is_err());
    }

    #[test]
    fn json_configs() {
        let v = serde_json::json!({
            "label": "toy",
            "lattice": "D24",
            "hbar_components": [{"component": 0, "class": 2, "square": "1", "orbit": 0}],
        });
        // a class-2 vector of D24 has square 1, not 6
        assert!(PolarizedConfig::from_json_value(&v).is_err());
        let v = serde_json::json!({
            "lattice": "D24",
            "hbar_components": [{"component": 0, "class": 0, "square": "6", "orbit": 0}],
            "rbar": {"component": 0, "root_index": 0}
        });
        let c = PolarizedConfig::from_json_value(&v).unwrap();
        let back = PolarizedConfig::from_json_value(&c.to_json()).unwrap();
        assert_eq!(back.hbar, c.hbar);
        assert_eq!(back.rbar, c.rbar);
    }

    #[test]
    fn orbit_representatives() {
        let a2 = RootComponent::new(RootKind::A, 2).unwrap();
        assert_eq!(class_orbit_representatives(&a2, 1, Q64::new(2, 3)).len(), 1);
        let d4 = RootComponent::new(RootKind::D, 4).unwrap();
        assert_eq!(class_orbit_representatives(&d4, 0, Q64::from_integer(2)).len(), 1);
    }
}
