//! Family-generic tidying, scale and membership computations.
//!
//! A [`GroupFamily`] value fixes both the group and the automorphism, so
//! every function here takes the family as its computation context. Contexts
//! are immutable and can be shared across threads.

mod family;
mod membership;
mod scale;
mod tidy;

pub use family::{Capabilities, GroupFamily, Steps23, T1Certificate, T2Certificate};
pub use membership::{membership, MembershipVerdict, Target, Verdict};
pub use scale::{
    minimized_over_filtration, modular_value, scale, scale_inverse, CrossCheck, ScaleMethod, ScaleOptions,
    ScaleResult, SubgroupContext,
};
pub use tidy::{
    certify, displacement_index, iterate_intersection, tidy, tidying_step1, TidyCertificate, TidyReport,
    DEFAULT_CAP, TRUNCATION_LENGTH,
};
