use k3lines::classify::{self, count_root_pairs, expected_classification, transcendental_genus};
use k3lines::graph::{are_isomorphic, fano_graph};
use k3lines::registry::{named_set, NAMED_SETS};

#[test]
fn registered_sets_match_reference_classification() {
    for (label, _, size) in NAMED_SETS {
        let s = named_set(label).unwrap();
        let r = classify::classify(label, &s).unwrap();
        assert_eq!(r.size, size);
        assert_eq!(r.rank, 20);
        let (t, aut) = expected_classification(label).unwrap();
        assert_eq!(r.t_classes, t, "{label}");
        if let Some(a) = aut {
            assert_eq!(r.aut_order, a, "{label}");
        }
        assert_eq!(r.aut_surjective, Some(true), "{label}");
        // genus coherence: one determinant, pairwise isomorphic discriminants
        let g = transcendental_genus(&s).unwrap();
        assert!(g.windows(2).all(|w| w[0].det() == w[1].det()));
    }
}

#[test]
fn fano_graphs_of_the_132_sets() {
    let g: Vec<_> = ["Lsub4", "Lsub5", "Lsub6", "Lsub7"].iter().map(|l| fano_graph(&named_set(l).unwrap())).collect();
    assert!(are_isomorphic(&g[0], &g[1]));
    assert!(are_isomorphic(&g[0], &g[2]));
    assert!(!are_isomorphic(&g[0], &g[3]));
    let m = fano_graph(&named_set("Lmax3").unwrap());
    assert_eq!(m.n, 144);
    assert_eq!(m.triple_matching().unwrap().len(), 72);
}

#[test]
fn real_structures() {
    let r = classify::real_tritangent_report(&named_set("Lsub4").unwrap()).unwrap();
    assert_eq!((r.lines, r.real_structures, r.real_tritangents, r.unique), (132, 1, Some(66), true));
    for l in ["Lmax3", "Lsub7"] {
        let r = classify::real_tritangent_report(&named_set(l).unwrap()).unwrap();
        assert_eq!(r.real_structures, 0);
        assert!(r.classes.iter().all(|c| count_root_pairs(&classify::BinaryFormClass::new(c.t[0], c.t[1], c.t[2]).unwrap()) == 0));
    }
}

#[test]
fn genus_requires_rank_20() {
    let s = named_set("Lmax3").unwrap();
    let small = s.universe.set(s.members[..8].iter().copied().chain(s.members[..8].iter().map(|&i| s.universe.dual[i])));
    assert!(transcendental_genus(&small).is_err());
}
