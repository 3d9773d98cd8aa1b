mod common;

use std::collections::BTreeSet;

use k3lines::orbits::{compute_ledger, decompose_orbits, LedgerOptions};
use k3lines::search::{Budget, Engine};
use k3lines::symmetry::Symmetry;
use k3lines::toy::{toy_universe, ToyOptions};

use common::oracle_geometric;

#[test]
fn search_matches_exhaustive_enumeration_on_toys() {
    let mut nonempty = 0;
    for seed in 20..24u64 {
        let u = toy_universe(seed, ToyOptions::default()).unwrap();
        let sym = Symmetry::build(u.clone()).unwrap();
        let d = decompose_orbits(&sym);
        let ledger = compute_ledger(&d, LedgerOptions::default()).unwrap();
        let engine = Engine::new(&d, ledger.comb_bnd.clone());
        let all: Vec<usize> = (0..d.comb.len()).collect();
        let r = engine.search(&all, ledger.bnd_total as i64, Budget::default()).unwrap();
        assert!(r.complete, "seed {seed}: {:?}", r.notes);
        let key = |s: &[usize]| sym.canonical(s).unwrap_or_else(|_| sym.canonical_r(s));
        let found: BTreeSet<Vec<usize>> = r.sets.iter().map(|f| key(&f.lines)).collect();
        assert_eq!(found.len(), r.sets.len(), "seed {seed}: duplicate classes");
        let oracle: BTreeSet<Vec<usize>> = oracle_geometric(&u).iter().map(|s| key(s)).collect();
        assert_eq!(found, oracle, "seed {seed} ({} lines)", u.len());
        // the orbit bounds hold for every geometric set
        for s in &oracle {
            let p = sym.pattern_of(s);
            assert!((0..p.len()).all(|o| p[o] as u64 <= ledger.comb_bnd[o]));
        }
        nonempty += (!oracle.is_empty()) as usize;
    }
    assert!(nonempty >= 2);
}

#[test]
fn maximal_orbit_extension_matches_exhaustive_extension() {
    let mut checked = 0;
    for seed in [3u64, 5, 6, 7] {
        let u = toy_universe(seed, ToyOptions::default()).unwrap();
        let sym = Symmetry::build(u.clone()).unwrap();
        let d = decompose_orbits(&sym);
        let ledger = compute_ledger(&d, LedgerOptions::default()).unwrap();
        let engine = Engine::new(&d, ledger.comb_bnd.clone());
        let key = |s: &[usize]| sym.canonical(s).unwrap_or_else(|_| sym.canonical_r(s));
        let geometric = oracle_geometric(&u);
        for base in geometric.iter().filter(|s| s.len() >= 4).take(6) {
            let p = sym.pattern_of(base);
            let Some(c0) = (0..p.len()).find(|&o| p[o] > 0) else { continue };
            let cluster: Vec<usize> = {
                let mut c = vec![c0, d.comb[c0].dual_partner];
                c.dedup();
                c
            };
            let set = u.set(base.iter().copied());
            let out = engine.extend_by_maximal_orbit(&set, &cluster, ledger.bnd_total, Budget::default()).unwrap();
            for f in &out {
                let q = sym.pattern_of(&f.lines);
                assert!(cluster.iter().all(|&o| q[o] == p[o]));
            }
            // oracle: supersets agreeing on the cluster, saturating one
            // deficient orbit, generated by the base and that orbit
            let mut want = BTreeSet::new();
            for t in &geometric {
                let q = sym.pattern_of(t);
                if !base.iter().all(|x| t.binary_search(x).is_ok()) || !cluster.iter().all(|&o| q[o] == p[o]) {
                    continue;
                }
                for o in 0..q.len() {
                    if cluster.contains(&o) || p[o] as u64 >= ledger.comb_bnd[o] || q[o] as u64 != ledger.comb_bnd[o] {
                        continue;
                    }
                    let gen: Vec<usize> =
                        base.iter().copied().chain(t.iter().copied().filter(|&i| sym.comb_of[i] == o)).collect();
                    let cl = u.set(gen.iter().flat_map(|&i| [i, u.dual[i]])).closure();
                    if cl.members == *t {
                        want.insert(key(t));
                    }
                }
            }
            let got: BTreeSet<Vec<usize>> = out.iter().map(|f| key(&f.lines)).collect();
            assert_eq!(got, want, "seed {seed}, base {base:?}");
            checked += 1;
        }
    }
    assert!(checked >= 4);
}

#[test]
fn general_extension_basics() {
    let u = toy_universe(6, ToyOptions::default()).unwrap();
    let sym = Symmetry::build(u.clone()).unwrap();
    let d = decompose_orbits(&sym);
    let ledger = compute_ledger(&d, LedgerOptions::default()).unwrap();
    let engine = Engine::new(&d, ledger.comb_bnd.clone());
    let geometric = oracle_geometric(&u);
    let base = u.set(geometric[0].iter().copied());
    let zero = engine.extend_general(&base, 0).unwrap();
    assert_eq!(zero.len(), 1);
    assert_eq!(zero[0].lines, base.members);
    let key = |s: &[usize]| sym.canonical(s).unwrap_or_else(|_| sym.canonical_r(s));
    let one = engine.extend_general(&base, 1).unwrap();
    assert!(one.iter().any(|f| key(&f.lines) == key(&base.members)));
    // one extra line with its dual: exactly the geometric closures of such
    let mut want = BTreeSet::new();
    want.insert(key(&base.members));
    for l in 0..u.len() {
        if base.contains(l) {
            continue;
        }
        let cl = u.set(base.members.iter().copied().chain([l, u.dual[l]])).closure();
        if cl.is_admissible() && cl.rank() <= 20 && cl.is_geometric().unwrap() {
            want.insert(key(&cl.members));
        }
    }
    let got: BTreeSet<Vec<usize>> = one.iter().map(|f| key(&f.lines)).collect();
    assert_eq!(got, want);
}
