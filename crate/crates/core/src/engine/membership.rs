use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::family::GroupFamily;
use crate::error::{Error, Result};

/// The subgroups attached to an automorphism that membership can be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    /// Contraction group: `α^n(x) -> e`.
    U,
    /// Parabolic subgroup: the forward orbit is bounded.
    P,
    /// Levi factor `P_α ∩ P_{α^-1}`.
    M,
    /// The closure of `U_α ∩ M_α`.
    U0,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::U, Target::P, Target::M, Target::U0];
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::U => "U",
            Target::P => "P",
            Target::M => "M",
            Target::U0 => "U0",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "U" => Ok(Target::U),
            "P" => Ok(Target::P),
            "M" => Ok(Target::M),
            "U0" => Ok(Target::U0),
            _ => Err(Error::Parse(format!("unknown membership target {s:?} (expected U, P, M or U0)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    /// Number of iterations of the automorphism the answer looked at.
    pub horizon: u32,
    /// For `No`, an iterate outside a fixed compact or open set. For
    /// `Unknown`, the last iterate examined.
    pub witness: Option<String>,
}

impl MembershipVerdict {
    pub fn yes(horizon: u32) -> Self {
        MembershipVerdict { verdict: Verdict::Yes, horizon, witness: None }
    }

    pub fn no(horizon: u32, witness: String) -> Self {
        MembershipVerdict { verdict: Verdict::No, horizon, witness: Some(witness) }
    }

    pub fn unknown(horizon: u32, witness: String) -> Self {
        MembershipVerdict { verdict: Verdict::Unknown, horizon, witness: Some(witness) }
    }
}

/// Three-valued membership of `x` in `target`.
///
/// Families with a closed-form predicate answer exactly; otherwise the orbit
/// is followed for `horizon` steps and the answer is `Unknown`.
pub fn membership<F: GroupFamily>(fam: &F, x: &F::Element, target: Target, horizon: u32) -> Result<MembershipVerdict> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon);
    }
    if fam.is_identity(x) {
        return Ok(MembershipVerdict::yes(horizon));
    }
    if let Some(mut v) = fam.closed_form_membership(x, target) {
        v.horizon = horizon;
        if v.verdict == Verdict::No && v.witness.is_none() {
            v.witness = Some(fam.render(&fam.apply(x, horizon as i64)));
        }
        return Ok(v);
    }
    let last = fam.apply(x, horizon as i64);
    Ok(MembershipVerdict::unknown(horizon, fam.render(&last)))
}
