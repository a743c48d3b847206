use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::family::{GroupFamily, Steps23, T1Certificate, T2Certificate};
use crate::arith::biguint_str;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 64;

/// Number of terms of `α^m(V+)` and `α^-m(V-)` kept in a report.
pub const TRUNCATION_LENGTH: i64 = 4;

/// `|α(V) : V ∩ α(V)|`.
pub fn displacement_index<F: GroupFamily>(fam: &F, v: &F::Subgroup) -> Result<BigUint> {
    let av = fam.image(v, 1);
    fam.index(&av, &fam.intersect(v, &av))
}

/// `⋂_{i=0..k} α^i(V)`.
pub fn iterate_intersection<F: GroupFamily>(fam: &F, v: &F::Subgroup, k: usize) -> F::Subgroup {
    (1..=k as i64).fold(v.clone(), |acc, i| fam.intersect(&acc, &fam.image(v, i)))
}

/// Smallest `k <= cap` such that `⋂_{i=0..k} α^i(V)` satisfies (T1).
pub fn tidying_step1<F: GroupFamily>(fam: &F, v: &F::Subgroup, cap: usize) -> Result<(F::Subgroup, usize)> {
    if cap == 0 {
        return Err(Error::InvalidInput("step-1 cap must be at least 1".into()));
    }
    let mut current = v.clone();
    for k in 0..=cap {
        if k > 0 {
            current = fam.intersect(&current, &fam.image(v, k as i64));
        }
        if fam.check_t1(&current).holds {
            return Ok((current, k));
        }
    }
    Err(Error::Step1Cap { cap })
}

/// T1 and T2 evidence for a subgroup, without modifying it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TidyCertificate {
    pub t1: T1Certificate,
    pub t2: T2Certificate,
    pub tidy: bool,
}

pub fn certify<F: GroupFamily>(fam: &F, v: &F::Subgroup) -> TidyCertificate {
    let t1 = fam.check_t1(v);
    let t2 = fam.check_t2(v);
    let tidy = t1.holds && t2.holds();
    TidyCertificate { t1, t2, tidy }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyReport<S> {
    pub family: String,
    pub input: S,
    pub step1_iterations: usize,
    pub after_step1: S,
    pub steps23: Option<Steps23<S>>,
    pub output: S,
    pub v_plus: S,
    pub v_minus: S,
    pub v_zero: S,
    /// `α^m(V+)` for `m = 0..TRUNCATION_LENGTH`, an initial segment of the
    /// increasing union `V++`.
    pub v_plus_plus_truncation: Vec<S>,
    /// `α^-m(V-)` for `m = 0..TRUNCATION_LENGTH`.
    pub v_minus_minus_truncation: Vec<S>,
    pub t1: T1Certificate,
    pub t2: T2Certificate,
    #[serde(with = "biguint_str")]
    pub scale: BigUint,
    #[serde(with = "biguint_str")]
    pub scale_inverse: BigUint,
    pub tidy: bool,
}

/// Runs the tidying procedure on `V` and certifies the result.
///
/// A result that fails certification is an error, never a report with
/// `tidy: false`.
pub fn tidy<F: GroupFamily>(fam: &F, v: &F::Subgroup, cap: usize) -> Result<TidyReport<F::Subgroup>> {
    let caps = fam.capabilities();
    if !caps.metrizable {
        return Err(Error::Unsupported(format!("{}: the group is not metrizable", fam.name())));
    }
    if !caps.t1_implies_t2 && !caps.supports_full_algorithm {
        return Err(Error::Unsupported(format!("{}: no way to reach (T2) after step 1", fam.name())));
    }
    let (after_step1, k) = tidying_step1(fam, v, cap)?;
    let (steps23, output) = if caps.t1_implies_t2 {
        (None, after_step1.clone())
    } else {
        let s = fam.steps23(&after_step1)?;
        let out = s.o_double_prime.clone();
        (Some(s), out)
    };

    let cert = certify(fam, &output);
    if !cert.tidy {
        let why = cert
            .t1
            .failure
            .clone()
            .unwrap_or_else(|| format!("(T2) fails: {}", cert.t2.evidence));
        return Err(Error::NotTidy(format!("{}: output of the procedure is not tidy: {why}", fam.name())));
    }

    let v_plus = fam.plus_part(&output);
    let v_minus = fam.minus_part(&output);
    let v_zero = fam.intersect(&v_plus, &v_minus);
    debug_assert!(fam.image(&v_zero, 1) == v_zero, "V0 must be α-stable");
    let scale = fam.index(&fam.image(&v_plus, 1), &v_plus)?;
    let scale_inverse = fam.index(&fam.image(&v_minus, -1), &v_minus)?;
    Ok(TidyReport {
        family: fam.name(),
        input: v.clone(),
        step1_iterations: k,
        after_step1,
        steps23,
        output,
        v_plus_plus_truncation: (0..TRUNCATION_LENGTH).map(|m| fam.image(&v_plus, m)).collect(),
        v_minus_minus_truncation: (0..TRUNCATION_LENGTH).map(|m| fam.image(&v_minus, -m)).collect(),
        v_plus,
        v_minus,
        v_zero,
        t1: cert.t1,
        t2: cert.t2,
        scale,
        scale_inverse,
        tidy: true,
    })
}
