use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::FamilyConfig;
use crate::arith::{format_rational, p_power, Prime, Rational};
use crate::coset_tree::{
    act, adjacency_violations, build_ball, path_translation, verify_local_structure, vertex_budget, ActOutcome,
    BallSpec, CosetModel, InertFactor, MatrixCosetModel, ShiftCosetModel,
};
use crate::engine::{
    certify, displacement_index, membership, modular_value, scale, scale_inverse, tidy, GroupFamily, ScaleOptions,
    SubgroupContext, Target, Verdict, DEFAULT_CAP,
};
use crate::error::{Error, Result};
use crate::matrix::{Bound, MatrixFamily, ValuationShape};
use crate::shift::{all_subgroups, Elem, FiniteGroup, ProductSubgroup, QuotientSpec, ShiftElement, ShiftFamily, SubgroupOfF};
use crate::tree::{classify, tree_scale, Axis, DeclaredKind, Kind, TreeAut, TreeAutomorphismData, Word};

/// Short filtration scan; it only cross-checks the index at the tidy output.
const SCALE: ScaleOptions = ScaleOptions { cap: DEFAULT_CAP, filtration_levels: 6 };

/// Parameters, failed expectations and evidence gathered by one case.
#[derive(Default)]
pub(super) struct Case {
    params: BTreeMap<String, String>,
    failures: Vec<String>,
    evidence: Vec<String>,
}

impl Case {
    fn param(&mut self, key: &str, value: impl Display) {
        self.params.insert(key.to_string(), value.to_string());
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.evidence.push(msg.into());
    }

    pub(super) fn finish(self) -> (BTreeMap<String, String>, bool, String) {
        let passed = self.failures.is_empty();
        let witness = if passed { self.evidence.join("; ") } else { self.failures[0].clone() };
        (self.params, passed, witness)
    }
}

pub(super) fn run(id: &str, cfg: &FamilyConfig, rng: &mut ChaCha8Rng) -> Result<Case> {
    use FamilyConfig::*;
    match (id, cfg) {
        ("C1", Shift { .. }) => c1_factorization(&cfg.shift_family()?, rng),
        ("C2", Matrix { .. }) => c2_levi(&cfg.matrix_family()?, rng),
        ("C3", Shift { .. }) => c3_shift(&cfg.shift_family()?, rng),
        ("C3", Matrix { .. }) => c3_matrix(&cfg.matrix_family()?, rng),
        ("C4", Shift { .. }) => c4_multiplicativity(&cfg.shift_family()?, rng),
        ("C5", Matrix { .. }) => c5_commuting(&cfg.matrix_family()?, rng),
        ("C6", Shift { .. }) => c6_shift(&cfg.shift_family()?, rng),
        ("C6", Matrix { .. }) => c6_matrix(&cfg.matrix_family()?, rng),
        ("C6", Tree { q }) => c6_tree(*q, rng),
        ("C7", Shift { .. }) => c7_u0(&cfg.shift_family()?, rng),
        ("C8", Shift { .. }) => c8_quotient(&cfg.shift_family()?, rng),
        ("C9", Shift { .. }) => c9_closure(&cfg.shift_family()?, rng),
        ("C10", Shift { .. }) => c10_shift(&cfg.shift_family()?, rng),
        ("C10", Matrix { .. }) => c10_matrix(&cfg.matrix_family()?, rng),
        ("C11", Shift { .. }) => c11_shift(&cfg.shift_family()?, rng),
        ("C11", Matrix { .. }) => c11_matrix(&cfg.matrix_family()?, rng),
        ("C12", Shift { .. }) => c12_shift(&cfg.shift_family()?, rng),
        ("C12", Matrix { .. }) => c12_matrix(&cfg.matrix_family()?, rng),
        ("X1", Shift { .. }) => x1_shift(&cfg.shift_family()?, rng),
        ("X1", Matrix { .. }) => x1_matrix(&cfg.matrix_family()?, rng),
        _ => Err(Error::Unsupported(format!("check {id} does not run in the {cfg} family"))),
    }
}

fn is_yes(v: Verdict) -> bool {
    v == Verdict::Yes
}

fn in_u<F: GroupFamily>(fam: &F, x: &F::Element) -> Result<bool> {
    Ok(is_yes(membership(fam, x, Target::U, 1)?.verdict))
}

// ---- shift helpers

/// Random element of the product subgroup `v` supported in `[lo, hi]`.
fn sample_in(fam: &ShiftFamily, v: &ProductSubgroup, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> ShiftElement {
    let mut coords = Vec::new();
    for i in lo..=hi {
        if rng.gen_bool(0.6) {
            let pool: Vec<Elem> = v.get(i).iter().collect();
            coords.push((i, pool[rng.gen_range(0..pool.len())]));
        }
    }
    ShiftElement::from_coords(fam.group(), coords)
}

/// An element from `v`, from `O^Z`, or unconstrained, in equal parts.
fn sample_mixed(fam: &ShiftFamily, v: &ProductSubgroup, rng: &mut ChaCha8Rng) -> (ShiftElement, &'static str) {
    match rng.gen_range(0..3) {
        0 => (sample_in(fam, v, rng, -5, 5), "from V"),
        1 => (fam.random_element(rng, 5, true), "from O^Z"),
        _ => (fam.random_element(rng, 5, false), "from F^(Z)"),
    }
}

/// Coordinatewise search for `s` with `s_i ∈ pool(i)` and `ok(x_i, s_i)`
/// on the support of `x`, identity elsewhere. Coordinates are independent,
/// so the search is exhaustive.
fn coordinate_search(
    fam: &ShiftFamily,
    x: &ShiftElement,
    pool: impl Fn(i64) -> SubgroupOfF,
    ok: impl Fn(Elem, Elem) -> bool,
) -> Option<ShiftElement> {
    let mut coords = Vec::new();
    for (i, a) in x.support() {
        coords.push((i, pool(i).iter().find(|&s| ok(a, s))?));
    }
    Some(ShiftElement::from_coords(fam.group(), coords))
}

/// A compact open product subgroup whose window constraints are drawn from
/// `subs`.
fn random_constraints(fam: &ShiftFamily, subs: &[SubgroupOfF], rng: &mut ChaCha8Rng, radius: i64) -> ProductSubgroup {
    let mut constraints = Vec::new();
    for i in -radius..=radius {
        if rng.gen_bool(0.6) {
            constraints.push((i, subs[rng.gen_range(0..subs.len())]));
        }
    }
    ProductSubgroup::from_constraints(fam.o(), &constraints)
}

fn tidy_output(fam: &ShiftFamily, v: &ProductSubgroup) -> Result<ProductSubgroup> {
    Ok(tidy(fam, v, DEFAULT_CAP)?.output)
}

fn c1_factorization(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let o = fam.o();
    let v = fam.random_product_subgroup(rng, 2);
    let parts = fam.derived_parts(&v);
    let positive = rng.gen_bool(0.5);
    let x = if positive {
        let m = rng.gen_range(0..=3);
        case.param("sample", format!("from α^-{m}(V-)"));
        sample_in(fam, &fam.image(&parts.v_minus, -m), rng, -6, 6)
    } else {
        case.param("sample", "from F^(Z)");
        fam.random_element(rng, 4, false)
    };
    case.param("V", v.render(g));
    case.param("x", fam.render(&x));
    let lhs = fam.in_v_minus_minus(&v, &x);
    case.expect(!positive || lhs, || format!("{} was drawn from V-- but the predicate rejects it", fam.render(&x)));
    let found = coordinate_search(fam, &x, |i| parts.v_zero.get(i), |a, h| o.contains(g.mul(a, g.inv(h))));
    match found {
        Some(v0) => {
            let u = fam.multiply(&x, &fam.invert(&v0));
            case.expect(in_u(fam, &u)?, || format!("u = {} is not in U_α", fam.render(&u)));
            case.expect(fam.contains(&parts.v_zero, &v0), || format!("v0 = {} is not in V0", fam.render(&v0)));
            case.expect(fam.multiply(&u, &v0) == x, || "u·v0 differs from x".into());
            case.expect(lhs, || format!("x = {} factors as u·v0 but is not in V--", fam.render(&x)));
            case.note(format!("x = ({})·({})", fam.render(&u), fam.render(&v0)));
        }
        None => {
            case.expect(!lhs, || format!("x = {} is in V-- but has no factorization", fam.render(&x)));
            case.note(format!("x = {} is in neither side", fam.render(&x)));
        }
    }
    Ok(case)
}

fn c3_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let o = fam.o();
    // the closure of U_α is O^Z; W is a compact open subgroup of it
    let subs: Vec<SubgroupOfF> = all_subgroups(fam.group()).into_iter().filter(|s| s.is_subset_of(&o)).collect();
    let w = random_constraints(fam, &subs, rng, 3);
    case.param("W", w.render(fam.group()));
    let ctx = SubgroupContext { h: fam.all_o(), w };
    let delta = modular_value(&fam.inverse(), &ctx)?;
    let s = scale_inverse(fam, SCALE)?.value;
    case.expect(delta == Rational::from_integer(BigInt::from(s.clone())), || {
        format!("Δ = {} but s(α^-1) = {s}", format_rational(&delta))
    });
    case.note(format!("Δ = s(α^-1) = {s}"));
    Ok(case)
}

fn c4_multiplicativity(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    // H = P_α = O^Z, realised as a family over O itself
    let (og, _) = fam.o().as_group(g, &format!("O<{}", g.name()))?;
    let whole = SubgroupOfF::whole(&og);
    let h = ShiftFamily::new(og.clone(), whole, fam.exponent())?;
    let normals: Vec<SubgroupOfF> = all_subgroups(&og).into_iter().filter(|k| k.is_normal(&og)).collect();
    let k = normals[rng.gen_range(0..normals.len())];
    let spec = QuotientSpec::new(&og, whole, k)?;
    let quotient = spec.quotient_family(&h)?;
    let kernel = spec.kernel_family(&h)?;
    let (_, k_elems) = k.as_group(&og, "K")?;
    let v = h.random_product_subgroup(rng, 2);
    let vq = v.map(|s| SubgroupOfF::from_elems(s.iter().map(|a| spec.project(a))));
    let vk = v.map(|s| {
        SubgroupOfF::from_elems(s.intersect(&k).iter().map(|a| k_elems.iter().position(|&b| b == a).expect("in K") as Elem))
    });
    case.param("N", k.render(&og));
    case.param("V", v.render(&og));
    let s_h = tidy(&h, &v, DEFAULT_CAP)?.scale_inverse;
    let s_q = tidy(&quotient, &vq, DEFAULT_CAP)?.scale_inverse;
    let s_n = tidy(&kernel, &vk, DEFAULT_CAP)?.scale_inverse;
    case.expect(s_h == &s_q * &s_n, || format!("s_H = {s_h} but s_H/N · s_N = {s_q} · {s_n}"));
    case.note(format!("{s_h} = {s_q} · {s_n}"));
    Ok(case)
}

fn c6_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let v = fam.random_product_subgroup(rng, 2);
    let r = tidy(fam, &v, DEFAULT_CAP)?;
    // for tidy V, V-- = U_α V0 is bounded iff the increasing union stops
    let bounded = fam.image(&r.v_minus, -1) == r.v_minus;
    let s = scale_inverse(fam, SCALE)?.value;
    case.param("V", v.render(fam.group()));
    case.expect(bounded == s.is_one(), || format!("U_α bounded: {bounded}, s(α^-1) = {s}"));
    case.note(format!("bounded = {bounded}, s(α^-1) = {s}"));
    Ok(case)
}

fn c7_u0(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let v = fam.random_product_subgroup(rng, 2);
    let t = tidy_output(fam, &v)?;
    let parts = fam.derived_parts(&t);
    let (x, origin) = sample_mixed(fam, &t, rng);
    case.param("V", v.render(g));
    case.param("tidy", t.render(g));
    case.param("x", format!("{} ({origin})", fam.render(&x)));
    let lhs = fam.in_v_plus_plus(&t, &x) && fam.in_v_minus_minus(&t, &x);
    let rhs = fam.contains(&parts.v_zero, &x);
    case.expect(lhs == rhs, || format!("x = {}: in V++ ∩ V-- is {lhs}, in V0 is {rhs}", fam.render(&x)));
    let mut tidies = vec![t.clone()];
    for _ in 0..3 {
        tidies.push(tidy_output(fam, &fam.random_product_subgroup(rng, 2))?);
    }
    let meet = |f: &dyn Fn(&ProductSubgroup) -> ProductSubgroup| {
        tidies.iter().map(f).reduce(|a, b| a.intersect(&b)).expect("nonempty")
    };
    let u0_from_v0 = meet(&|w| fam.derived_parts(w).v_zero);
    let u0_from_v = meet(&|w| w.clone());
    case.expect(u0_from_v0 == u0_from_v, || {
        format!("⋂ V0 = {} but ⋂ V = {}", u0_from_v0.render(g), u0_from_v.render(g))
    });
    case.note(format!("membership {lhs} on both sides; U0 = {}", u0_from_v0.render(g)));
    Ok(case)
}

fn c8_quotient(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let o = fam.o();
    let normals: Vec<SubgroupOfF> =
        all_subgroups(g).into_iter().filter(|k| k.is_normal(g) && k.is_subset_of(&o)).collect();
    let k = normals[rng.gen_range(0..normals.len())];
    let spec = QuotientSpec::new(g, o, k)?;
    let quotient = spec.quotient_family(fam)?;
    let in_o = rng.gen_bool(0.4);
    let x = fam.random_element(rng, 4, in_o);
    case.param("H", format!("{}^Z", k.render(g)));
    case.param("x", fam.render(&x));
    let lhs = in_u(&quotient, &spec.push(&x))?;
    match coordinate_search(fam, &x, |_| k, |a, h| o.contains(g.mul(a, h))) {
        Some(h) => {
            let xh = fam.multiply(&x, &h);
            case.expect(in_u(fam, &xh)?, || format!("xh = {} is not in U_α", fam.render(&xh)));
            case.expect(lhs, || format!("xh ∈ U_α for h = {} but the image is not in U_α/H", fam.render(&h)));
            case.note(format!("h = {}", fam.render(&h)));
        }
        None => {
            case.expect(!lhs, || format!("image of {} is in U_α/H but no h corrects it", fam.render(&x)));
            case.note("no correcting h, image not contracted");
        }
    }
    Ok(case)
}

fn c9_closure(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let o = fam.o();
    let t = tidy_output(fam, &fam.random_product_subgroup(rng, 2))?;
    let u0 = fam.derived_parts(&t).v_zero;
    let (x, origin) = sample_mixed(fam, &t, rng);
    case.param("x", format!("{} ({origin})", fam.render(&x)));
    // the closure of U_α is the intersection of V-- over tidy V
    let lhs = fam.in_v_minus_minus(&t, &x);
    let rhs = match coordinate_search(fam, &x, |i| u0.get(i), |a, h| o.contains(g.mul(g.inv(h), a))) {
        Some(w) => {
            let u = fam.multiply(&fam.invert(&w), &x);
            case.expect(in_u(fam, &u)?, || format!("u = {} is not in U_α", fam.render(&u)));
            case.note(format!("x = ({})·({})", fam.render(&w), fam.render(&u)));
            true
        }
        None => false,
    };
    case.expect(lhs == rhs, || format!("x = {}: closure says {lhs}, U0·U_α says {rhs}", fam.render(&x)));
    Ok(case)
}

fn c10_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let o = fam.o();
    let v = match rng.gen_range(0..4) {
        0 => fam.all_o(),
        1 => {
            let above: Vec<SubgroupOfF> = all_subgroups(g).into_iter().filter(|s| o.is_subset_of(s)).collect();
            random_constraints(fam, &above, rng, 2)
        }
        _ => fam.random_product_subgroup(rng, 2),
    };
    case.param("V", v.render(g));
    let u0 = fam.derived_parts(&tidy_output(fam, &v)?).v_zero;
    let tidy_cert = certify(fam, &v).tidy;
    let t1 = fam.check_t1(&v).holds;
    let has_u0 = fam.is_subgroup_of(&u0, &v);
    let minimizing = displacement_index(fam, &v)? == scale(fam, SCALE)?.value;
    case.expect(tidy_cert == (t1 && has_u0), || format!("tidy {tidy_cert}, (T1) {t1}, contains U0 {has_u0}"));
    case.expect(tidy_cert == minimizing, || format!("tidy {tidy_cert} but minimizing {minimizing}"));
    case.note(format!("tidy {tidy_cert}, (T1) {t1}, contains U0 {has_u0}"));
    Ok(case)
}

fn c11_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let g = fam.group();
    let all_o = fam.all_o();
    case.expect(fam.o().order() > 1, || "O is trivial".into());
    case.expect(certify(fam, &all_o).tidy, || "O^Z is not tidy".into());
    let i = rng.gen_range(-2..=2);
    let v = fam
        .random_product_subgroup(rng, 2)
        .intersect(&all_o)
        .intersect(&ProductSubgroup::from_constraints(fam.o(), &[(i, SubgroupOfF::trivial(g))]));
    case.param("V", v.render(g));
    case.expect(v != all_o && v.is_subgroup_of(&all_o), || "V is not a proper subgroup of O^Z".into());
    case.expect(!certify(fam, &v).tidy, || format!("proper subgroup {} is tidy", v.render(g)));
    let out = tidy_output(fam, &v)?;
    case.expect(out == all_o, || format!("tidying gives {} instead of O^Z", out.render(g)));
    case.note("not tidy; tidying returns O^Z");
    Ok(case)
}

fn c12_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let model = ShiftCosetModel::standard(fam.clone())?;
    let spec = BallSpec { levels: (-rng.gen_range(1..=3), rng.gen_range(1..=3)), root: 0, depth: rng.gen_range(1..=3) };
    ball_checks(&model, spec, rng, &mut case)?;
    let k = FiniteGroup::cyclic(rng.gen_range(2..=3))?;
    inert_checks(&InertFactor::new(model, k), spec, &mut case)?;
    Ok(case)
}

fn x1_shift(fam: &ShiftFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let t = tidy_output(fam, &fam.all_o())?;
    let u0 = fam.derived_parts(&t).v_zero;
    let (x, origin) = sample_mixed(fam, &t, rng);
    case.param("x", format!("{} ({origin})", fam.render(&x)));
    // finitely supported x lie in the closure of a set of finitely
    // supported elements exactly when they lie in the set
    let both = in_u(fam, &x)? && in_u(&fam.inverse(), &x)?;
    let in_u0 = fam.contains(&u0, &x);
    case.expect(both == in_u0, || format!("x = {}: U_α ∩ U_α^-1 says {both}, U0 says {in_u0}", fam.render(&x)));
    case.note(format!("both {both}"));
    Ok(case)
}

// ---- matrix helpers

fn unit(rng: &mut ChaCha8Rng, p: Prime) -> Rational {
    let p = p.get() as i64;
    let mut r = rng.gen_range(1..=2 * p);
    while r % p == 0 {
        r += 1;
    }
    let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
    Rational::from_integer(BigInt::from(sign * r))
}

fn diagonal_of(fam: &MatrixFamily) -> Result<Vec<Rational>> {
    Ok(fam.element().diagonal()?.diag.clone())
}

fn render_diag(d: &[Rational]) -> String {
    d.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

fn c2_levi(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let k = rng.gen_range(1..=2);
    let inside = rng.gen_bool(0.7);
    let shape = if inside { fam.parabolic_level(k) } else { fam.congruence(k) };
    let x = fam.random_in_shape(rng, &shape);
    case.param("x", x.to_grid());
    let in_p = is_yes(fam.membership_predicates(&x, Target::P).verdict);
    match fam.levi_factorization(&x) {
        Ok((m, u)) => {
            case.expect(in_p, || "factorization exists outside P_α".into());
            case.expect(&m * &u == x, || format!("m·u differs from x: m = {}, u = {}", m.to_grid(), u.to_grid()));
            case.expect(is_yes(fam.membership_predicates(&m, Target::M).verdict), || format!("m = {} is not in M_α", m.to_grid()));
            case.expect(is_yes(fam.membership_predicates(&u, Target::U).verdict), || format!("u = {} is not in U_α", u.to_grid()));
            case.note(format!("m = {}, u = {}", m.to_grid(), u.to_grid()));
        }
        Err(e) => {
            case.expect(!in_p, || format!("x ∈ P_α has no factorization: {e}"));
            case.note("outside P_α, no factorization");
        }
    }
    Ok(case)
}

fn c3_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let e = rng.gen_range(1..=3);
    let f = fam.power(e)?;
    let k = rng.gen_range(-2..=3);
    case.param("power", e);
    case.param("W", format!("U_α at level {k}"));
    let ctx = SubgroupContext { h: f.contraction_closure(), w: f.contraction_level(k) };
    let delta = modular_value(&f.inverse(), &ctx)?;
    let s = scale_inverse(&f, SCALE)?.value;
    case.expect(delta == Rational::from_integer(BigInt::from(s.clone())), || {
        format!("Δ = {} but s(α^-1) = {s}", format_rational(&delta))
    });
    case.note(format!("Δ = s(α^-{e}) = {s}"));
    Ok(case)
}

fn c5_commuting(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let p = fam.p();
    let a = diagonal_of(fam)?;
    let b: Vec<Rational> = (0..fam.n()).map(|_| p_power(p, rng.gen_range(-3..=3)) * unit(rng, p)).collect();
    let ab: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    case.param("beta", render_diag(&b));
    let s = |d: &[Rational]| -> Result<BigUint> { Ok(scale(&MatrixFamily::diagonal(d, p)?, SCALE)?.value) };
    let (sa, sb, sab) = (s(&a)?, s(&b)?, s(&ab)?);
    case.expect(sab <= &sa * &sb, || format!("s(αβ) = {sab} exceeds s(α)s(β) = {sa}·{sb}"));
    case.note(format!("{sab} <= {sa}·{sb}"));
    Ok(case)
}

fn c6_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let p = fam.p();
    let n = fam.n();
    // fresh valuations, all equal a third of the time
    let common = rng.gen_range(-2..=2);
    let flat = rng.gen_bool(1.0 / 3.0);
    let d: Vec<Rational> = (0..n)
        .map(|_| {
            let e = if flat { common } else { rng.gen_range(-2..=2) };
            p_power(p, e) * unit(rng, p)
        })
        .collect();
    let f = MatrixFamily::diagonal(&d, p)?;
    case.param("alpha", render_diag(&d));
    let bounded = f.contraction_closure().is_trivial();
    let s = scale_inverse(&f, SCALE)?.value;
    case.expect(bounded == s.is_one(), || format!("U_α bounded: {bounded}, s(α^-1) = {s}"));
    case.note(format!("bounded = {bounded}, s(α^-1) = {s}"));
    Ok(case)
}

/// Shape with bounds in `[k, 2k]`, which is always a subgroup.
fn random_shape(n: usize, rng: &mut ChaCha8Rng) -> (i64, ValuationShape) {
    let k = rng.gen_range(1..=2);
    let extra: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=k)).collect();
    (k, ValuationShape::from_fn(n, |i, j| Bound::AtLeast(if i == j { k } else { k + extra[i * n + j] })))
}

fn c10_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let (_, v) = if rng.gen_bool(0.25) { (1, fam.congruence(rng.gen_range(1..=3))) } else { random_shape(fam.n(), rng) };
    case.param("V", &v);
    // U_α is closed here, so U0 is trivial and contained in every V
    let tidy_cert = certify(fam, &v).tidy;
    let t1 = fam.check_t1(&v).holds;
    let minimizing = displacement_index(fam, &v)? == scale(fam, SCALE)?.value;
    case.expect(tidy_cert == t1, || format!("tidy {tidy_cert}, (T1) {t1}"));
    case.expect(tidy_cert == minimizing, || format!("tidy {tidy_cert} but minimizing {minimizing}"));
    case.note(format!("tidy {tidy_cert}, (T1) {t1}"));
    Ok(case)
}

fn c11_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let k0 = rng.gen_range(1..=3);
    case.param("levels", format!("{k0}..={}", k0 + 4));
    let mut prev: Option<ValuationShape> = None;
    for k in k0..=k0 + 4 {
        let v = fam.congruence(k);
        case.expect(certify(fam, &v).tidy, || format!("level {k} is not tidy"));
        if let Some(p) = &prev {
            case.expect(fam.is_subgroup_of(&v, p) && v != *p, || format!("level {k} does not shrink"));
        }
        prev = Some(v);
    }
    case.note(format!("levels {k0}..={} tidy and strictly decreasing", k0 + 4));
    Ok(case)
}

fn c12_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let level = rng.gen_range(1..=2);
    let model = MatrixCosetModel::new(fam.clone(), level)?;
    let s = model.scale_inverse()?.to_u64().unwrap_or(u64::MAX);
    let depth = if s <= 9 { 2 } else { 1 };
    let spec = BallSpec { levels: (-rng.gen_range(1..=2), rng.gen_range(1..=2)), root: 0, depth };
    case.param("level", level);
    let ball = ball_checks(&model, spec, rng, &mut case)?;
    // U_α is closed: representatives of V_-/α(V_-) lie in U_α and move
    // V^(1) to pairwise distinct vertices
    let reps = fam.coset_window_reps(level, 0, 1, s)?;
    let target = ball.path_vertex(1).expect("level 1 is on the path");
    let mut images = BTreeSet::new();
    for r in &reps {
        match act(&model, &ball, r, 0, target)? {
            ActOutcome::Inside(i) => {
                images.insert(i);
            }
            ActOutcome::OutsideBall { level, key } => case.expect(false, || format!("image {key}@{level} left the ball")),
        }
    }
    case.expect(images.len() as u64 == s && reps.len() as u64 == s, || {
        format!("{} representatives give {} distinct images, expected {s}", reps.len(), images.len())
    });
    let k = FiniteGroup::cyclic(2)?;
    inert_checks(&InertFactor::new(model, k), spec, &mut case)?;
    Ok(case)
}

fn x1_matrix(fam: &MatrixFamily, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let x = if rng.gen_bool(0.2) { fam.identity() } else { fam.random_in_shape(rng, &fam.congruence(1)) };
    case.param("x", x.to_grid());
    let both = in_u(fam, &x)? && in_u(&fam.inverse(), &x)?;
    // U_α is closed, so U0 = U_α ∩ U_α^-1 is trivial
    let in_u0 = x.is_identity();
    case.expect(both == in_u0, || format!("U_α ∩ U_α^-1 says {both}, U0 says {in_u0}"));
    case.note(format!("both {both}"));
    Ok(case)
}

// ---- coset tree

fn ball_checks<M: CosetModel>(
    model: &M,
    spec: BallSpec,
    rng: &mut ChaCha8Rng,
    case: &mut Case,
) -> Result<crate::coset_tree::CosetTreeBall<M::Rep>> {
    case.param("ball", format!("levels {:?}, depth {}", spec.levels, spec.depth));
    let ball = build_ball(model, spec, vertex_budget())?;
    let s = ball.scale_inverse.to_usize().unwrap_or(usize::MAX);
    let report = verify_local_structure(model, &ball)?;
    case.expect(report.ok(), || {
        let v = &report.violations[0];
        format!("{}: {}", v.vertex, v.problem)
    });
    case.expect(report.interior > 0 && report.interior_degrees.iter().all(|&d| d == s + 1), || {
        format!("interior degrees {:?}, expected {}", report.interior_degrees, s + 1)
    });
    let shift = path_translation(model, &ball)?;
    case.expect(shift == Some(1), || format!("α moves the path by {shift:?}"));

    let edges: Vec<(usize, usize)> = ball.edges.iter().copied().collect();
    let mut broken = 0;
    for _ in 0..100 {
        let w = model.sample_vminus_minus(rng);
        let k = rng.gen_range(-2..=2);
        let e = edges[rng.gen_range(0..edges.len())];
        broken += adjacency_violations(model, &ball, &w, k, &[e])?;
    }
    case.expect(broken == 0, || format!("{broken} of 100 sampled edges not preserved"));

    let root = ball.path_vertex(0).expect("V^(0) is on the path");
    let mut in_vminus = 0;
    for _ in 0..20 {
        let v = model.sample_vminus_minus(rng);
        let fixes = act(model, &ball, &v, 0, root)? == ActOutcome::Inside(root);
        let member = model.in_vminus(&v);
        in_vminus += member as usize;
        case.expect(fixes == member, || format!("{} fixes V^(0): {fixes}, lies in V_-: {member}", model.key(&v)));
    }
    let e = model.identity();
    let moved = (0..ball.vertices.len()).filter(|&i| act(model, &ball, &e, 0, i).ok() != Some(ActOutcome::Inside(i))).count();
    case.expect(moved == 0, || format!("the identity moves {moved} vertices"));
    case.note(format!(
        "{} vertices, degree {}, 100 edges preserved, stabilizer agrees on 20 samples ({in_vminus} in V_-)",
        report.vertices,
        s + 1
    ));
    Ok(ball)
}

fn inert_checks<M: CosetModel>(model: &InertFactor<M>, spec: BallSpec, case: &mut Case) -> Result<()> {
    let ball = build_ball(model, spec, vertex_budget())?;
    let mut moved = 0;
    for a in model.k.elements().filter(|&a| a != model.k.identity()) {
        let x = model.embed_k(a);
        for v in 0..ball.vertices.len() {
            if act(model, &ball, &x, 0, v)? != ActOutcome::Inside(v) {
                moved += 1;
            }
        }
    }
    case.expect(moved == 0, || format!("the inert factor moves {moved} vertices"));
    case.note(format!("{} acts trivially", model.k.name()));
    Ok(())
}

// ---- tree

/// The standard axis traversed backwards.
fn reversed_axis() -> Axis {
    let a = Axis::standard();
    Axis { forward: a.backward, backward: a.forward }
}

fn c6_tree(q: u32, rng: &mut ChaCha8Rng) -> Result<Case> {
    let mut case = Case::default();
    let axis = Axis::standard();
    let (g, g_inv, label) = match rng.gen_range(0..4) {
        0 => {
            let l = rng.gen_range(1..=3u32);
            let r = l + 2;
            let g = TreeAutomorphismData::translation(q, l, r)?;
            let inv = TreeAut::translation(q, -(l as i64))?;
            let g_inv = TreeAutomorphismData::declare(&inv, DeclaredKind::Hyperbolic { axis: reversed_axis(), l }, r)?;
            (g, g_inv, format!("translation by {l}"))
        }
        1 => {
            let g = TreeAutomorphismData::identity(q, 3)?;
            (g.clone(), g, "identity".to_string())
        }
        2 => {
            let at = Word(vec![0; rng.gen_range(0..=2)]);
            let k = if at.is_root() { q + 1 } else { q } as u8;
            let mut perm: Vec<u8> = (0..k).collect();
            perm.rotate_left(1);
            let aut = TreeAut::permutation(q, at.clone(), perm)?;
            let g = TreeAutomorphismData::declare(&aut, DeclaredKind::Elliptic { fixed: at.clone() }, 3)?;
            let g_inv = TreeAutomorphismData::declare(&aut.inverse(), DeclaredKind::Elliptic { fixed: at.clone() }, 3)?;
            (g, g_inv, format!("rotation below {at}"))
        }
        _ => {
            let c = rng.gen_range(-2..=2i64);
            let aut = TreeAut::reflection(q, c)?;
            let declared = if c % 2 == 0 {
                DeclaredKind::Elliptic { fixed: axis.vertex(c / 2) }
            } else {
                let lo = c.div_euclid(2);
                DeclaredKind::Inversion { edge: (axis.vertex(lo), axis.vertex(lo + 1)) }
            };
            let g = TreeAutomorphismData::declare(&aut, declared, 4)?;
            (g.clone(), g, format!("reflection about {c}/2"))
        }
    };
    case.param("g", label);
    // contraction groups of elliptic elements and inversions are trivial,
    // those of hyperbolic elements contain conjugates of a nontrivial
    // fixator by growing powers and are unbounded
    let bounded = classify(&g)?.kind != Kind::Hyperbolic;
    let s = tree_scale(&g_inv)?.value;
    case.expect(bounded == s.is_one(), || format!("U_g bounded: {bounded}, s(g^-1) = {s}"));
    case.note(format!("bounded = {bounded}, s(g^-1) = {s}"));
    Ok(case)
}

