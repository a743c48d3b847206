use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::family::GroupFamily;
use super::tidy::{displacement_index, tidy, tidying_step1, DEFAULT_CAP};
use crate::arith::{biguint_str, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMethod {
    ClosedForm,
    IndexAtTidy,
    MinimizedOverFiltration,
    /// `|AL : AL ∩ L|` for the adjoint action on the Lie algebra lattice.
    LatticeCoindex,
}

impl fmt::Display for ScaleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScaleMethod::ClosedForm => "closed_form",
            ScaleMethod::IndexAtTidy => "index_at_tidy",
            ScaleMethod::MinimizedOverFiltration => "minimized_over_filtration",
            ScaleMethod::LatticeCoindex => "lattice_coindex",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub method: ScaleMethod,
    #[serde(with = "biguint_str")]
    pub value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleResult {
    #[serde(with = "biguint_str")]
    pub value: BigUint,
    pub method: ScaleMethod,
    pub cross_checks: Vec<CrossCheck>,
}

impl ScaleResult {
    /// Builds a result from independent computations, failing unless they
    /// all agree. The first entry with `preferred` as method supplies the
    /// value.
    pub fn agreeing(preferred: ScaleMethod, computed: Vec<(ScaleMethod, BigUint)>) -> Result<ScaleResult> {
        let pos = computed
            .iter()
            .position(|(m, _)| *m == preferred)
            .ok_or_else(|| Error::Unsupported(format!("scale method {preferred} is not available")))?;
        let value = computed[pos].1.clone();
        if computed.iter().any(|(_, v)| *v != value) {
            let listing: Vec<String> = computed.iter().map(|(m, v)| format!("{m}={v}")).collect();
            return Err(Error::ScaleDisagreement(listing.join(", ")));
        }
        let cross_checks = computed
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, (method, value))| CrossCheck { method, value })
            .collect();
        Ok(ScaleResult { value, method: preferred, cross_checks })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleOptions {
    pub cap: usize,
    /// Filtration levels `1..=filtration_levels` are scanned for the minimum.
    pub filtration_levels: u32,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        ScaleOptions { cap: DEFAULT_CAP, filtration_levels: DEFAULT_CAP as u32 }
    }
}

/// `min` over the filtration of the displacement index of the step-1 output.
pub fn minimized_over_filtration<F: GroupFamily>(fam: &F, opts: ScaleOptions) -> Result<BigUint> {
    let mut best: Option<BigUint> = None;
    for level in 1..=opts.filtration_levels.max(1) {
        let (w, _) = tidying_step1(fam, &fam.filtration(level), opts.cap)?;
        let d = displacement_index(fam, &w)?;
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    }
    Ok(best.expect("at least one level"))
}

/// `s(α)` by every method the family supports; they must agree exactly.
pub fn scale<F: GroupFamily>(fam: &F, opts: ScaleOptions) -> Result<ScaleResult> {
    let mut computed = Vec::new();
    if let Some(c) = fam.closed_form_scale() {
        computed.push((ScaleMethod::ClosedForm, c));
    }
    let report = tidy(fam, &fam.filtration(1), opts.cap)?;
    computed.push((ScaleMethod::IndexAtTidy, report.scale));
    computed.push((ScaleMethod::MinimizedOverFiltration, minimized_over_filtration(fam, opts)?));
    computed.extend(fam.extra_scale_checks()?);
    ScaleResult::agreeing(fam.preferred_scale_method(), computed)
}

pub fn scale_inverse<F: GroupFamily>(fam: &F, opts: ScaleOptions) -> Result<ScaleResult> {
    scale(&fam.inverse(), opts)
}

/// Closed `α`-stable subgroup `h` of the ambient group with a compact open
/// subgroup `w` of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupContext<S> {
    pub h: S,
    pub w: S,
}

/// `Δ_H(α) = |α(W) : α(W) ∩ W| / |W : α(W) ∩ W|`.
pub fn modular_value<F: GroupFamily>(fam: &F, ctx: &SubgroupContext<F::Subgroup>) -> Result<Rational> {
    if !fam.is_compact_open_in(&ctx.w, &ctx.h) {
        return Err(Error::NotCompactOpen("W is not a compact open subgroup of H".into()));
    }
    if fam.image(&ctx.h, 1) != ctx.h {
        return Err(Error::InvalidInput("H is not stable under the automorphism".into()));
    }
    let aw = fam.image(&ctx.w, 1);
    let meet = fam.intersect(&aw, &ctx.w);
    let num = fam.index(&aw, &meet)?;
    let den = fam.index(&ctx.w, &meet)?;
    debug_assert!(!den.is_zero());
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}
