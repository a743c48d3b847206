use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdlc::arith::{p_power, Prime, Rational};
use tdlc::engine::{
    certify, membership, scale, tidy, GroupFamily, ScaleMethod, ScaleOptions, Target, Verdict, DEFAULT_CAP,
};
use tdlc::matrix::MatrixFamily;
use tdlc::shift::default_configurations;
use tdlc::tree::{tree_scale, TreeAutomorphismData};

const OPTS: ScaleOptions = ScaleOptions { cap: DEFAULT_CAP, filtration_levels: 8 };

fn diag_family(vals: &[i64], units: &[i64], p: u64) -> MatrixFamily {
    let p = Prime::new(p).unwrap();
    let d: Vec<Rational> =
        vals.iter().zip(units).map(|(&v, &u)| p_power(p, v) * Rational::from_integer(BigInt::from(u))).collect();
    MatrixFamily::diagonal(&d, p).unwrap()
}

fn tidy_invariants<F: GroupFamily>(fam: &F, v: &F::Subgroup) {
    let r = tidy(fam, v, DEFAULT_CAP).unwrap();
    assert!(r.tidy);
    assert_eq!(r.scale, fam.index(&fam.image(&r.v_plus, 1), &r.v_plus).unwrap());
    assert_eq!(r.scale_inverse, fam.index(&fam.image(&r.v_minus, -1), &r.v_minus).unwrap());
    assert_eq!(r.v_zero, fam.intersect(&r.v_plus, &r.v_minus));
    assert_eq!(fam.image(&r.v_zero, 1), r.v_zero);
    // tidy for α means tidy for α^-1
    assert!(certify(&fam.inverse(), &r.output).tidy);
    let s = scale(fam, OPTS).unwrap();
    assert_eq!(s.value, r.scale);
    assert!(s.cross_checks.iter().any(|c| c.method == ScaleMethod::MinimizedOverFiltration));
}

fn membership_implications<F: GroupFamily + Clone>(fam: &F, x: &F::Element) {
    for f in [fam.clone(), fam.inverse()] {
        let v = |t| membership(&f, x, t, 8).unwrap().verdict;
        if v(Target::U) == Verdict::Yes {
            assert_eq!(v(Target::P), Verdict::Yes);
        }
    }
    let both_p = membership(fam, x, Target::P, 8).unwrap().verdict == Verdict::Yes
        && membership(&fam.inverse(), x, Target::P, 8).unwrap().verdict == Verdict::Yes;
    assert_eq!(membership(fam, x, Target::M, 8).unwrap().verdict == Verdict::Yes, both_p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_tidy_report_invariants(seed in any::<u64>(), which in 0usize..3) {
        let fam = default_configurations().remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = fam.random_product_subgroup(&mut rng, 3);
        tidy_invariants(&fam, &v);
        let x = fam.random_element(&mut rng, 4, seed % 2 == 0);
        membership_implications(&fam, &x);
    }

    #[test]
    fn matrix_tidy_report_invariants(
        vals in prop::collection::vec(-2i64..3, 2..4),
        level in 1u32..4,
        p in prop::sample::select(vec![2u64, 3, 5]),
        seed in any::<u64>(),
    ) {
        let units = vec![1; vals.len()];
        let fam = diag_family(&vals, &units, p);
        tidy_invariants(&fam, &fam.filtration(level));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = fam.random_in_shape(&mut rng, &fam.congruence(1));
        membership_implications(&fam, &x);
    }

    #[test]
    fn matrix_scale_of_powers(vals in prop::collection::vec(-2i64..3, 2..4), units in prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -3]), 3)) {
        let fam = diag_family(&vals, &units[..vals.len()], 7);
        let s = scale(&fam, OPTS).unwrap().value;
        for n in 1..=3u32 {
            let direct = scale(&fam.power(n as i64).unwrap(), OPTS).unwrap().value;
            prop_assert_eq!(direct, s.pow(n));
        }
    }
}

#[test]
fn tree_scale_of_powers() {
    for q in [2u32, 3] {
        for l in 1..=2u32 {
            let g = TreeAutomorphismData::translation(q, l, 8).unwrap();
            let s = tree_scale(&g).unwrap().value;
            for n in 1..=3u32 {
                assert_eq!(tree_scale(&g.power(n).unwrap()).unwrap().value, s.pow(n), "q={q} l={l} n={n}");
            }
        }
    }
    let e = TreeAutomorphismData::identity(2, 3).unwrap();
    assert_eq!(tree_scale(&e.power(3).unwrap()).unwrap().value, BigUint::from(1u32));
}
