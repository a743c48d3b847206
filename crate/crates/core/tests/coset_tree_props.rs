use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdlc::arith::{parse_rational, Prime};
use tdlc::coset_tree::{
    act, adjacency_violations, build_ball, verify_local_structure, ActOutcome, BallSpec, CosetModel, CosetTreeBall,
    InertFactor, MatrixCosetModel, ShiftCosetModel, DEFAULT_VERTEX_BUDGET,
};
use tdlc::matrix::MatrixFamily;
use tdlc::shift::{default_configurations, FiniteGroup};

fn matrix_model(diag: &[&str], p: u64, level: i64) -> MatrixCosetModel {
    let d: Vec<_> = diag.iter().map(|s| parse_rational(s).unwrap()).collect();
    MatrixCosetModel::new(MatrixFamily::diagonal(&d, Prime::new(p).unwrap()).unwrap(), level).unwrap()
}

/// Degrees read straight off the edge set: every vertex has at most one
/// parent and no vertex has more than `s` children; expanded vertices have
/// exactly `s`.
fn degree_check<R>(ball: &CosetTreeBall<R>, s: usize) {
    for v in 0..ball.vertices.len() {
        assert!(ball.in_edges(v).count() <= 1);
        let out = ball.out_edges(v).count();
        if ball.expanded.contains(&v) {
            assert_eq!(out, s, "vertex {v}");
        } else {
            assert!(out <= s);
        }
    }
    // no directed cycles: levels strictly increase along edges
    assert!(ball.edges.iter().all(|&(a, b)| ball.vertices[b].level == ball.vertices[a].level + 1));
}

fn check_model<M: CosetModel>(model: &M, spec: BallSpec, rng: &mut ChaCha8Rng) {
    let ball = build_ball(model, spec, DEFAULT_VERTEX_BUDGET).unwrap();
    let s = ball.scale_inverse.to_usize().unwrap();
    degree_check(&ball, s);
    assert!(verify_local_structure(model, &ball).unwrap().ok());
    let edges: Vec<(usize, usize)> = ball.edges.iter().copied().collect();
    for _ in 0..100 {
        let w = model.sample_vminus_minus(rng);
        let k = rng.gen_range(-2..=2);
        let e = edges[rng.gen_range(0..edges.len())];
        assert_eq!(adjacency_violations(model, &ball, &w, k, &[e]).unwrap(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shift_balls(which in 0usize..3, lo in 1i64..4, hi in 1i64..4, depth in 1u32..4, seed in any::<u64>()) {
        let model = ShiftCosetModel::standard(default_configurations().remove(which)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_model(&model, BallSpec { levels: (-lo, hi), root: 0, depth }, &mut rng);
    }

    #[test]
    fn matrix_balls(
        which in 0usize..4,
        level in 1i64..3,
        lo in 1i64..3,
        hi in 1i64..3,
        seed in any::<u64>(),
    ) {
        let (diag, p): (&[&str], u64) = [(&["2", "1/2"][..], 2), (&["5", "1/5"][..], 5), (&["3", "1", "1/3"][..], 3), (&["4", "1"][..], 2)][which];
        let model = matrix_model(diag, p, level);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_model(&model, BallSpec { levels: (-lo, hi), root: 0, depth: 1 }, &mut rng);
    }
}

#[test]
fn contraction_group_acts_simply_transitively_on_visible_ends() {
    // U_α is closed for diagonal matrices: distinct coset representatives
    // move the end through V^(1), V^(2) to distinct vertices at depth 2
    let model = matrix_model(&["2", "1/2"], 2, 1);
    let ball = build_ball(&model, BallSpec { levels: (-1, 0), root: 0, depth: 2 }, DEFAULT_VERTEX_BUDGET).unwrap();
    let reps = model.family().coset_window_reps(1, 0, 2, 16).unwrap();
    assert_eq!(reps.len(), 16);
    let target = ball.find(2, &model.key(&model.canonical(2, &model.identity()).unwrap())).unwrap();
    let images: BTreeSet<usize> = reps
        .iter()
        .map(|r| match act(&model, &ball, r, 0, target).unwrap() {
            ActOutcome::Inside(i) => i,
            other => panic!("left the ball: {other:?}"),
        })
        .collect();
    assert_eq!(images.len(), 16);
    assert!(images.iter().all(|&i| ball.vertices[i].level == 2));
}

#[test]
fn inert_factor_acts_trivially() {
    let inner = ShiftCosetModel::standard(default_configurations().remove(0)).unwrap();
    let model = InertFactor::new(inner, FiniteGroup::cyclic(3).unwrap());
    let ball = build_ball(&model, BallSpec { levels: (-2, 2), root: 0, depth: 2 }, DEFAULT_VERTEX_BUDGET).unwrap();
    for a in model.k.elements() {
        let x = model.embed_k(a);
        for v in 0..ball.vertices.len() {
            assert_eq!(act(&model, &ball, &x, 0, v).unwrap(), ActOutcome::Inside(v));
        }
    }
}
