//! `GL_n(Q)` inside `GL_n(Q_p)`, with the automorphism given by
//! conjugation by a fixed invertible matrix `g`.
//!
//! When `g = C·D·C^-1` with `D` diagonal and `C` a `p`-adic unit, compact
//! open subgroups of the form `C (I + N) C^-1` with entrywise valuation
//! bounds on `N` are closed under the action and all computations reduce to
//! integer arithmetic on those bounds.

mod cosets;
mod element;
mod family;
mod shape;

pub use element::{adjoint_matrix, newton_scale_result, scale_from_valuations, scale_via_newton, DiagonalForm, MatrixElement};
pub use family::{BlockStructure, MatrixFamily};
pub use shape::{Bound, ValuationShape};
