//! Automorphisms of the `(q+1)`-regular tree, known through their action on
//! finite balls about a root.
//!
//! The full automorphism group is not representable, so every element is a
//! [`Portrait`] on a ball together with a declared global type, and every
//! verdict is relative to that ball.

mod aut;
mod classify;
mod word;

pub use aut::{Generator, Portrait, TreeAut};
pub use classify::{
    axis_segment, classify, contraction_certificate, fixator_index, fixator_index_bruteforce, fixes_axis, hull,
    levi_contraction_witness, tree_scale, Classification, DeclaredKind, Kind, TreeAutomorphismData,
    BRUTE_FORCE_MAX_Q, BRUTE_FORCE_MAX_RADIUS,
};
pub use word::{check_q, child_count, distance, Axis, AxisCoords, Ray, TreeBall, Word, MAX_Q};
