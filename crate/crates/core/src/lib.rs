//! Scales, tidy subgroups and contraction groups for automorphisms of three
//! concrete families of totally disconnected locally compact groups:
//!
//! * [`shift`]: restricted products of a finite group with the coordinate shift,
//! * [`matrix`]: rational points of `GL_n` inside `GL_n(Q_p)` acted on by conjugation,
//! * [`tree`]: automorphisms of a regular tree.
//!
//! [`engine`] holds the family-generic tidying procedure and scale
//! computations, [`coset_tree`] builds the tree of cosets on which
//! `V_-- ⋊ <α>` acts, and [`suite`] runs seeded structural checks across
//! the families.

pub mod arith;
pub mod coset_tree;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod shift;
pub mod suite;
pub mod tree;

pub use error::{Error, Result};
