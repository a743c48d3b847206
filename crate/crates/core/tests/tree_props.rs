use num_bigint::BigUint;
use num_traits::One;
use tdlc::engine::Verdict;
use tdlc::tree::{
    classify, contraction_certificate, fixator_index, fixator_index_bruteforce, fixes_axis, levi_contraction_witness,
    tree_scale, DeclaredKind, Kind, TreeAut, TreeAutomorphismData, Word,
};

#[test]
fn brute_force_agrees_with_the_formula() {
    for (q, l, radius) in [(2u32, 1u32, 3u32), (2, 2, 3), (3, 1, 3), (2, 1, 4)] {
        let g = TreeAutomorphismData::translation(q, l, radius).unwrap();
        let brute = fixator_index_bruteforce(&g, 1, radius).unwrap();
        assert_eq!(brute, tree_scale(&g).unwrap().value, "q={q} l={l} R={radius}");
        assert_eq!(brute, BigUint::from(q).pow(l));
    }
}

#[test]
fn brute_force_refuses_large_balls() {
    let g = TreeAutomorphismData::translation(5, 1, 3).unwrap();
    assert_eq!(fixator_index_bruteforce(&g, 1, 3).unwrap_err().code(), "E_ENUMERATION_BOUND");
}

#[test]
fn stabilizers_of_fixed_vertices_are_tidy() {
    for q in [2u32, 3] {
        for depth in 0..3usize {
            let at = Word(vec![0; depth]);
            let k = if at.is_root() { q + 1 } else { q } as u8;
            let perm: Vec<u8> = (0..k).rev().collect();
            let aut = TreeAut::permutation(q, at.clone(), perm).unwrap();
            let g = TreeAutomorphismData::declare(&aut, DeclaredKind::Elliptic { fixed: at.clone() }, 4).unwrap();
            assert_eq!(classify(&g).unwrap().kind, Kind::Elliptic);
            // V = Fix(v) satisfies V = V_-, and g(V) = V gives displacement 1
            let image = g.portrait.get(&at).unwrap().clone();
            assert_eq!(image, at);
            assert!(fixator_index(q, &[at.clone()], &[image]).unwrap().is_one());
            assert!(tree_scale(&g).unwrap().value.is_one());
        }
    }
}

#[test]
fn levi_factor_meets_contraction_group() {
    for q in [2u32, 3] {
        for l in 1..=3u32 {
            let radius = l + 3;
            let g = TreeAutomorphismData::translation(q, l, radius).unwrap();
            let x = levi_contraction_witness(q, radius).unwrap();
            assert!(!x.portrait.is_identity());
            // x fixes both ends of the axis, so it lies in M_g
            assert!(fixes_axis(&x, &g).unwrap());
            let v = contraction_certificate(&x, &g, 1).unwrap();
            assert_eq!(v.verdict, Verdict::Yes, "q={q} l={l}: {:?}", v.witness);
        }
    }
}

#[test]
fn reflections_are_not_hyperbolic() {
    for c in -3..=3i64 {
        let aut = TreeAut::reflection(2, c).unwrap();
        let g = TreeAutomorphismData::declare(&aut, inversion_or_fixed(c), 4).unwrap();
        assert_ne!(classify(&g).unwrap().kind, Kind::Hyperbolic);
        assert!(tree_scale(&g).unwrap().value.is_one());
    }
}

fn inversion_or_fixed(c: i64) -> DeclaredKind {
    let axis = tdlc::tree::Axis::standard();
    if c % 2 == 0 {
        DeclaredKind::Elliptic { fixed: axis.vertex(c / 2) }
    } else {
        let lo = c.div_euclid(2);
        DeclaredKind::Inversion { edge: (axis.vertex(lo), axis.vertex(lo + 1)) }
    }
}
