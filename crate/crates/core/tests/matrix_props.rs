use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdlc::arith::{p_power, valuation, Matrix, Prime, Rational};
use tdlc::engine::{membership, scale, scale_inverse, GroupFamily, ScaleOptions, Target, Verdict, DEFAULT_CAP};
use tdlc::matrix::{scale_via_newton, MatrixElement, MatrixFamily};

const OPTS: ScaleOptions = ScaleOptions { cap: DEFAULT_CAP, filtration_levels: 6 };

/// `s(diag(d)) = p^(Σ max(0, v_j - v_i))`: conjugation by `diag(d)` scales
/// the `(i, j)` entry by `d_i/d_j`, which expands when `v_i < v_j`.
fn oracle(vals: &[i64], p: u64) -> BigUint {
    let e: i64 = vals.iter().flat_map(|a| vals.iter().map(move |b| (b - a).max(0))).sum();
    BigUint::from(p).pow(e as u32)
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn family(vals: &[i64], units: &[i64], p: Prime) -> MatrixFamily {
    let d: Vec<Rational> = vals.iter().zip(units).map(|(&v, &u)| p_power(p, v) * rat(u)).collect();
    MatrixFamily::diagonal(&d, p).unwrap()
}

fn unit_strategy() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![1i64, -1, 2, 3, -4, 6])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn three_methods_match_the_oracle(
        vals in prop::collection::vec(-3i64..4, 1..4),
        units in prop::collection::vec(unit_strategy(), 3),
        p in prop::sample::select(vec![5u64, 7, 11]),
    ) {
        let pr = Prime::new(p).unwrap();
        let fam = family(&vals, &units[..vals.len()], pr);
        let expected = oracle(&vals, p);
        prop_assert_eq!(scale_via_newton(&fam.element().entries, pr).unwrap(), expected.clone());
        prop_assert_eq!(fam.scale_via_index_oracle(1).unwrap(), expected.clone());
        prop_assert_eq!(fam.lattice_coindex_of_adjoint().unwrap(), expected.clone());
        prop_assert_eq!(scale(&fam, OPTS).unwrap().value, expected);
    }

    #[test]
    fn conjugation_invariance(
        vals in prop::collection::vec(-2i64..3, 2..4),
        c in prop::collection::vec(-3i64..4, 9),
    ) {
        let p = Prime::new(5).unwrap();
        let n = vals.len();
        let units = vec![1; n];
        let fam = family(&vals, &units, p);
        // unit lower triangular part times a p-adic unit diagonal
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => rat(if c[i] % 5 == 0 { 1 } else { c[i] }),
                std::cmp::Ordering::Greater => rat(c[3 * i + j]),
                std::cmp::Ordering::Less => rat(0),
            }).collect())
            .collect();
        let conj = Matrix::from_rows(rows).unwrap();
        prop_assert_eq!(valuation(&conj.det().unwrap(), p).finite(), Some(0));
        let g = fam.element().conjugate_by(&conj).unwrap();
        let conjugated = MatrixFamily::new(g).unwrap();
        prop_assert_eq!(scale(&conjugated, OPTS).unwrap().value, oracle(&vals, 5));
        prop_assert_eq!(scale_via_newton(&conjugated.element().entries, p).unwrap(), oracle(&vals, 5));
    }

    #[test]
    fn inverse_scale_one_iff_contraction_trivial(
        vals in prop::collection::vec(-2i64..3, 2..4),
        seed in any::<u64>(),
    ) {
        let p = Prime::new(3).unwrap();
        let fam = family(&vals, &vec![1; vals.len()], p);
        let trivial = fam.contraction_closure().is_trivial();
        prop_assert_eq!(scale_inverse(&fam, OPTS).unwrap().value.is_one(), trivial);
        // with U_g trivial no sampled element other than I is contracted
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = fam.random_in_shape(&mut rng, &fam.congruence(1));
        let contracted = membership(&fam, &x, Target::U, 1).unwrap().verdict == Verdict::Yes;
        if trivial {
            prop_assert_eq!(contracted, fam.is_identity(&x));
        }
    }

    #[test]
    fn scale_is_seen_inside_the_parabolic(
        vals in prop::collection::vec(-2i64..3, 2..4),
        k in 1i64..4,
    ) {
        let p = Prime::new(2).unwrap();
        let fam = family(&vals, &vec![1; vals.len()], p);
        // W = V ∩ P_α is compact open in P_α, and W- already sees all of
        // the contraction for α^-1
        let w = fam.parabolic_level(k);
        let w_minus = fam.minus_part(&w);
        let restricted = fam.index(&fam.image(&w_minus, -1), &w_minus).unwrap();
        prop_assert_eq!(restricted, scale_inverse(&fam, OPTS).unwrap().value);
    }
}

#[test]
fn non_diagonalizable_input_is_refused() {
    let p = Prime::new(5).unwrap();
    let jordan = Matrix::parse_grid("5,1;0,5").unwrap();
    let err = MatrixFamily::new(MatrixElement::new(jordan, p).unwrap()).unwrap_err();
    assert_eq!(err.code(), "E_NO_DIAGONAL_FORM");
}
