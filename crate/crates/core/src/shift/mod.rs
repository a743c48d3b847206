//! Restricted products of a finite group with the shift automorphism.
//!
//! The only family in which every step of the tidying procedure is computed
//! exactly. Elements are finitely supported; subgroups are described by
//! their coordinate constraints.

mod element;
mod family;
mod group;
mod pattern;
mod quotient;
mod subgroup;

pub use element::ShiftElement;
pub use family::{all_subgroups, DerivedParts, ShiftFamily};
pub use group::{Elem, FiniteGroup, GroupKind, MAX_ORDER};
pub use pattern::ProductSubgroup;
pub use quotient::{quotient_push, QuotientSpec};
pub use subgroup::SubgroupOfF;

/// The configurations exercised by default: `(S3, A3)`, `(C4, C2)` and
/// `(D4, center)`.
pub fn default_configurations() -> Vec<ShiftFamily> {
    [("S3", "A3"), ("C4", "C2"), ("D4", "center")]
        .iter()
        .map(|(g, o)| {
            let g = FiniteGroup::by_name(g).expect("built-in group");
            let o = SubgroupOfF::parse(&g, o).expect("built-in subgroup");
            ShiftFamily::new(g, o, 1).expect("valid configuration")
        })
        .collect()
}
