use std::fmt::Debug;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::membership::{MembershipVerdict, Target};
use super::scale::ScaleMethod;
use crate::error::{Error, Result};

/// What a family can do beyond the basic subgroup operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    /// Steps 2-3 of the tidying procedure (`L`, `O*`, `O''`) are available.
    pub supports_full_algorithm: bool,
    /// In this family a subgroup satisfying (T1) is already tidy, so the
    /// procedure may stop after step 1.
    pub t1_implies_t2: bool,
    /// The group is metrizable. Every family shipped here is; the engine
    /// refuses to run on one that is not.
    pub metrizable: bool,
}

/// Evidence for `V = V+ V-`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct T1Certificate {
    pub holds: bool,
    /// Number of coordinates or sampled elements examined.
    pub checked: usize,
    pub witnesses: Vec<String>,
    pub failure: Option<String>,
}

impl T1Certificate {
    pub fn pass(checked: usize, witnesses: Vec<String>) -> Self {
        T1Certificate { holds: true, checked, witnesses, failure: None }
    }

    pub fn fail(checked: usize, failure: String) -> Self {
        T1Certificate { holds: false, checked, witnesses: Vec::new(), failure: Some(failure) }
    }
}

/// Evidence that `V++` and `V--` are closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct T2Certificate {
    pub v_plus_plus_closed: bool,
    pub v_minus_minus_closed: bool,
    pub evidence: String,
}

impl T2Certificate {
    pub fn holds(&self) -> bool {
        self.v_plus_plus_closed && self.v_minus_minus_closed
    }
}

/// Output of steps 2-3 of the tidying procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Steps23<S> {
    /// Closure of the elements whose orbit lies in `O'` at almost all times.
    pub l: S,
    /// `{x in O' : l x l^-1 in O'L for all l in L}`.
    pub o_star: S,
    /// `O* L`.
    pub o_double_prime: S,
    pub notes: String,
}

/// A group together with one fixed automorphism `α`.
///
/// Implementations describe compact open subgroups exactly (no sampling of
/// infinite objects) and provide the closed forms the engine relies on.
/// Powers `α^k` are taken for any integer `k`.
pub trait GroupFamily: Send + Sync + Sized {
    type Element: Clone + Debug + PartialEq + Serialize + Send + Sync;
    type Subgroup: Clone + Debug + PartialEq + Serialize + Send + Sync;

    fn name(&self) -> String;
    fn capabilities(&self) -> Capabilities;

    /// The same group with `α` replaced by `α^-1`.
    fn inverse(&self) -> Self;

    fn identity(&self) -> Self::Element;
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn invert(&self, a: &Self::Element) -> Self::Element;
    fn is_identity(&self, x: &Self::Element) -> bool {
        *x == self.identity()
    }
    /// `α^k(x)`.
    fn apply(&self, x: &Self::Element, k: i64) -> Self::Element;
    fn render(&self, x: &Self::Element) -> String;

    /// `α^k(V)`.
    fn image(&self, v: &Self::Subgroup, k: i64) -> Self::Subgroup;
    fn intersect(&self, a: &Self::Subgroup, b: &Self::Subgroup) -> Self::Subgroup;
    fn is_subgroup_of(&self, inner: &Self::Subgroup, outer: &Self::Subgroup) -> bool;
    /// `|outer : inner|`; errors when `inner` is not contained in `outer` or
    /// the index is infinite.
    fn index(&self, outer: &Self::Subgroup, inner: &Self::Subgroup) -> Result<BigUint>;
    fn contains(&self, v: &Self::Subgroup, x: &Self::Element) -> bool;
    /// Whether `w` is a compact open subgroup of the closed subgroup `h`.
    fn is_compact_open_in(&self, w: &Self::Subgroup, h: &Self::Subgroup) -> bool;

    /// `V+ = ⋂_{n>=0} α^n(V)` in closed form.
    fn plus_part(&self, v: &Self::Subgroup) -> Self::Subgroup;
    /// `V- = ⋂_{n>=0} α^-n(V)` in closed form.
    fn minus_part(&self, v: &Self::Subgroup) -> Self::Subgroup {
        self.inverse().plus_part(v)
    }

    fn check_t1(&self, v: &Self::Subgroup) -> T1Certificate;
    fn check_t2(&self, v: &Self::Subgroup) -> T2Certificate;

    fn steps23(&self, _o_prime: &Self::Subgroup) -> Result<Steps23<Self::Subgroup>> {
        Err(Error::Unsupported(format!("{}: steps 2-3 are not available", self.name())))
    }

    /// Canonical shrinking filtration of compact open subgroups, `level >= 1`.
    fn filtration(&self, level: u32) -> Self::Subgroup;

    /// Exact membership answer, when the family has a closed form.
    fn closed_form_membership(&self, x: &Self::Element, target: Target) -> Option<MembershipVerdict>;

    fn closed_form_scale(&self) -> Option<BigUint> {
        None
    }

    fn preferred_scale_method(&self) -> ScaleMethod {
        if self.closed_form_scale().is_some() {
            ScaleMethod::ClosedForm
        } else {
            ScaleMethod::IndexAtTidy
        }
    }

    /// Further independent scale computations the family can offer.
    fn extra_scale_checks(&self) -> Result<Vec<(ScaleMethod, BigUint)>> {
        Ok(Vec::new())
    }
}
