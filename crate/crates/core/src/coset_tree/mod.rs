//! The tree of left `V_-`-cosets on which `G ⋊ ⟨α⟩` acts.
//!
//! Vertex `y α^m V_-` is stored as its level `m` with a canonical
//! representative of `y α^m(V_-)`. Each vertex has one parent and
//! `s(α^-1)` children; the cosets of the identity form the path `P`,
//! which `α` translates by one.

mod ball;
mod model;

pub use ball::{
    act, act_vertex, adjacency_violations, build_ball, export, path_translation, verify_local_structure, vertex_budget,
    ActOutcome, BallSpec, CosetTreeBall, CosetVertex, ExportFormat, StructureReport, Violation, BUDGET_ENV,
    DEFAULT_VERTEX_BUDGET, JSON_SCHEMA,
};
pub use model::{CosetModel, InertFactor, MatrixCosetModel, ShiftCosetModel};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_rational, Prime};
    use crate::matrix::MatrixFamily;
    use crate::shift::default_configurations;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shift() -> ShiftCosetModel {
        ShiftCosetModel::standard(default_configurations().remove(0)).unwrap()
    }

    fn diag(a: &str, b: &str, p: u64) -> MatrixCosetModel {
        let d = [parse_rational(a).unwrap(), parse_rational(b).unwrap()];
        MatrixCosetModel::new(MatrixFamily::diagonal(&d, Prime::new(p).unwrap()).unwrap(), 1).unwrap()
    }

    #[test]
    fn shift_ball_is_a_line() {
        let m = shift();
        let ball = build_ball(&m, BallSpec::centered(3), DEFAULT_VERTEX_BUDGET).unwrap();
        assert_eq!(ball.vertices.len(), 7);
        let r = verify_local_structure(&m, &ball).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.interior_degrees.iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(path_translation(&m, &ball).unwrap(), Some(1));
    }

    #[test]
    fn matrix_ball_degrees() {
        let m = diag("2", "1/2", 2);
        let ball = build_ball(&m, BallSpec { levels: (-2, 2), root: 0, depth: 2 }, DEFAULT_VERTEX_BUDGET).unwrap();
        // 4 + 16 children of V^(0), of which 1 + 1 lie on the path
        assert_eq!(ball.descendant_count(), 4 + 16 - 2);
        let r = verify_local_structure(&m, &ball).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.interior_degrees.iter().copied().collect::<Vec<_>>(), vec![5]);
        assert_eq!(path_translation(&m, &ball).unwrap(), Some(1));
        let five = diag("5", "1/5", 5);
        let ball = build_ball(&five, BallSpec { levels: (0, 0), root: 0, depth: 1 }, 1000).unwrap();
        assert_eq!(ball.out_edges(ball.path[0]).count(), 25);
    }

    #[test]
    fn action_preserves_edges() {
        let m = diag("2", "1/2", 2);
        let ball = build_ball(&m, BallSpec { levels: (-1, 1), root: 0, depth: 2 }, DEFAULT_VERTEX_BUDGET).unwrap();
        let edges: Vec<_> = ball.edges.iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in -2..=2 {
            let w = m.sample_vminus(&mut rng);
            assert_eq!(adjacency_violations(&m, &ball, &w, k, &edges).unwrap(), 0);
        }
    }

    #[test]
    fn corrupted_ball_is_caught() {
        let m = diag("2", "1/2", 2);
        let mut ball = build_ball(&m, BallSpec { levels: (0, 1), root: 0, depth: 1 }, DEFAULT_VERTEX_BUDGET).unwrap();
        let (a, b) = *ball.edges.iter().next().unwrap();
        ball.edges.remove(&(a, b));
        assert!(!verify_local_structure(&m, &ball).unwrap().ok());
    }

    #[test]
    fn budget_and_empty_ball() {
        let m = diag("2", "1/2", 2);
        let err = build_ball(&m, BallSpec { levels: (0, 0), root: 0, depth: 10 }, 100).unwrap_err();
        assert_eq!(err.code(), "E_BUDGET");
        let empty = build_ball(&m, BallSpec { levels: (1, 0), root: 0, depth: 2 }, 100).unwrap();
        assert!(empty.vertices.is_empty());
        assert!(export(&empty, ExportFormat::Dot).starts_with("digraph"));
    }

    #[test]
    fn exports_are_deterministic() {
        let m = diag("2", "1/2", 2);
        let spec = BallSpec { levels: (-1, 1), root: 0, depth: 1 };
        let a = build_ball(&m, spec, 1000).unwrap();
        let b = build_ball(&m, spec, 1000).unwrap();
        for f in [ExportFormat::Dot, ExportFormat::Json] {
            assert_eq!(export(&a, f), export(&b, f));
        }
        let v: serde_json::Value = serde_json::from_str(&export(&a, ExportFormat::Json)).unwrap();
        assert_eq!(v["schema"], JSON_SCHEMA);
        assert_eq!(v["counts"]["path"], 3);
    }
}
