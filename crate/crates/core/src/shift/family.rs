use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use super::element::ShiftElement;
use super::group::FiniteGroup;
use super::pattern::ProductSubgroup;
use super::subgroup::SubgroupOfF;
use crate::engine::{
    Capabilities, GroupFamily, MembershipVerdict, ScaleMethod, Steps23, T1Certificate, T2Certificate, Target,
};
use crate::error::{Error, Result};

/// The restricted product `∏_{i∈Z} F|O` with `α = σ^n`, where
/// `(σx)_i = x_{i-1}`.
#[derive(Debug, Clone)]
pub struct ShiftFamily {
    group: Arc<FiniteGroup>,
    o: SubgroupOfF,
    n: i64,
}

/// `V+`, `V-`, `V0` and a description of `V--` for one subgroup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedParts {
    pub v_plus: ProductSubgroup,
    pub v_minus: ProductSubgroup,
    pub v_zero: ProductSubgroup,
    /// `V--` is the increasing union of `α^-m(V-)`, `m >= 0`.
    pub v_minus_minus_closed: bool,
    pub v_plus_plus_closed: bool,
}

impl ShiftFamily {
    pub fn new(group: FiniteGroup, o: SubgroupOfF, n: i64) -> Result<Self> {
        Self::with_shared(Arc::new(group), o, n)
    }

    pub fn with_shared(group: Arc<FiniteGroup>, o: SubgroupOfF, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("the shift exponent must be nonzero".into()));
        }
        if !o.is_subgroup(&group) {
            return Err(Error::NotSubgroup(format!("O = {} is not a subgroup of {}", o.render(&group), group.name())));
        }
        Ok(ShiftFamily { group, o, n })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn shared_group(&self) -> Arc<FiniteGroup> {
        self.group.clone()
    }

    pub fn o(&self) -> SubgroupOfF {
        self.o
    }

    pub fn exponent(&self) -> i64 {
        self.n
    }

    /// `O^Z`.
    pub fn all_o(&self) -> ProductSubgroup {
        ProductSubgroup::uniform(self.o)
    }

    /// A compact open subgroup: `O` outside the listed coordinates.
    pub fn product_subgroup(&self, constraints: &[(i64, SubgroupOfF)]) -> Result<ProductSubgroup> {
        for (i, s) in constraints {
            if !s.is_subgroup(&self.group) {
                return Err(Error::NotSubgroup(format!("constraint at {i} is not a subgroup")));
            }
        }
        Ok(ProductSubgroup::from_constraints(self.o, constraints))
    }

    /// Parses `i:name` constraints, `name` as in [`SubgroupOfF::parse`].
    pub fn parse_constraints(&self, specs: &[String]) -> Result<ProductSubgroup> {
        let mut out = Vec::new();
        for spec in specs {
            let (i, name) = spec
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `coordinate:subgroup`, got {spec:?}")))?;
            let i: i64 = i.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate in {spec:?}")))?;
            out.push((i, SubgroupOfF::parse(&self.group, name)?));
        }
        self.product_subgroup(&out)
    }

    pub fn is_compact_open(&self, v: &ProductSubgroup) -> bool {
        v.has_tails(self.o)
    }

    pub fn derived_parts(&self, v: &ProductSubgroup) -> DerivedParts {
        let v_plus = self.plus_part(v);
        let v_minus = self.minus_part(v);
        let v_zero = v_plus.intersect(&v_minus);
        let all_o = self.all_o();
        DerivedParts {
            v_minus_minus_closed: v_minus == all_o,
            v_plus_plus_closed: v_plus == all_o,
            v_plus,
            v_minus,
            v_zero,
        }
    }

    /// `x ∈ V-- = ⋃_{m>=0} α^-m(V-)`. The union increases, so it is enough
    /// to test one `m` that moves the whole window of `V-` past the support.
    pub fn in_v_minus_minus(&self, v: &ProductSubgroup, x: &ShiftElement) -> bool {
        let minus = self.minus_part(v);
        let m = self.escape_steps(&minus, x);
        self.contains(&minus.shift(-m * self.n), x)
    }

    /// `x ∈ V++ = ⋃_{m>=0} α^m(V+)`.
    pub fn in_v_plus_plus(&self, v: &ProductSubgroup, x: &ShiftElement) -> bool {
        let plus = self.plus_part(v);
        let m = self.escape_steps(&plus, x);
        self.contains(&plus.shift(m * self.n), x)
    }

    fn escape_steps(&self, w: &ProductSubgroup, x: &ShiftElement) -> i64 {
        let (lo, hi) = ProductSubgroup::span(&[w]);
        let (xlo, xhi) = x.support().fold((0, 0), |(a, b), (i, _)| (a.min(i), b.max(i)));
        let reach = (hi - lo) + (xhi - xlo).abs() + lo.abs() + hi.abs() + xlo.abs() + xhi.abs();
        reach / self.n.abs() + 1
    }

    /// Every coordinate of `x` lies in `O`.
    pub fn coordinates_in_o(&self, x: &ShiftElement) -> Option<(i64, u8)> {
        x.support().find(|&(_, a)| !self.o.contains(a))
    }

    /// Checks the defining property of `L` on finitely supported samples:
    /// `α^i(x) ∈ O'` for all large `|i|` exactly when `x ∈ O^Z`.
    pub fn verify_l_definition(&self, o_prime: &ProductSubgroup, samples: &[ShiftElement]) -> bool {
        samples.iter().all(|x| {
            let far = self.escape_steps(o_prime, x);
            let eventually = (far..far + 4).all(|i| {
                self.contains(o_prime, &self.apply(x, i)) && self.contains(o_prime, &self.apply(x, -i))
            });
            eventually == self.contains(&self.all_o(), x)
        })
    }

    pub fn random_element(&self, rng: &mut impl Rng, radius: i64, in_o: bool) -> ShiftElement {
        let pool: Vec<u8> = if in_o { self.o.iter().collect() } else { self.group.elements().collect() };
        let mut coords = Vec::new();
        for i in -radius..=radius {
            if rng.gen_bool(0.5) {
                coords.push((i, pool[rng.gen_range(0..pool.len())]));
            }
        }
        ShiftElement::from_coords(&self.group, coords)
    }

    /// A compact open product subgroup with random constraints on a window
    /// of the given radius.
    pub fn random_product_subgroup(&self, rng: &mut impl Rng, radius: i64) -> ProductSubgroup {
        let subs = all_subgroups(&self.group);
        let mut constraints = Vec::new();
        for i in -radius..=radius {
            if rng.gen_bool(0.6) {
                constraints.push((i, subs[rng.gen_range(0..subs.len())]));
            }
        }
        ProductSubgroup::from_constraints(self.o, &constraints)
    }

    pub fn psub_index(&self, a: &ProductSubgroup, b: &ProductSubgroup) -> Result<BigUint> {
        self.index(a, b)
    }
}

/// The subgroups generated by at most two elements.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<SubgroupOfF> {
    let mut out: Vec<SubgroupOfF> = Vec::new();
    for a in g.elements() {
        for b in g.elements().filter(|&b| b >= a) {
            let s = SubgroupOfF::generated(g, &[a, b]);
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out.sort_by_key(|s| (s.order(), *s));
    out
}

impl GroupFamily for ShiftFamily {
    type Element = ShiftElement;
    type Subgroup = ProductSubgroup;

    fn name(&self) -> String {
        format!("shift {}|{} by {}", self.group.name(), self.o.render(&self.group), self.n)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { supports_full_algorithm: true, t1_implies_t2: false, metrizable: true }
    }

    fn inverse(&self) -> Self {
        ShiftFamily { group: self.group.clone(), o: self.o, n: -self.n }
    }

    fn identity(&self) -> ShiftElement {
        ShiftElement::identity()
    }

    fn multiply(&self, a: &ShiftElement, b: &ShiftElement) -> ShiftElement {
        a.multiply(b, &self.group)
    }

    fn invert(&self, a: &ShiftElement) -> ShiftElement {
        a.invert(&self.group)
    }

    fn apply(&self, x: &ShiftElement, k: i64) -> ShiftElement {
        x.shift(k * self.n)
    }

    fn render(&self, x: &ShiftElement) -> String {
        x.render(&self.group)
    }

    fn image(&self, v: &ProductSubgroup, k: i64) -> ProductSubgroup {
        v.shift(k * self.n)
    }

    fn intersect(&self, a: &ProductSubgroup, b: &ProductSubgroup) -> ProductSubgroup {
        a.intersect(b)
    }

    fn is_subgroup_of(&self, inner: &ProductSubgroup, outer: &ProductSubgroup) -> bool {
        inner.is_subgroup_of(outer)
    }

    fn index(&self, outer: &ProductSubgroup, inner: &ProductSubgroup) -> Result<BigUint> {
        if let Some(i) = inner.find_coordinate(outer, |b, a| b.is_subset_of(&a)) {
            return Err(Error::NotContained(format!("constraint at coordinate {i} is not contained")));
        }
        let lo = outer.lo().min(inner.lo());
        let hi = outer.hi().max(inner.hi());
        let (span_lo, span_hi) = ProductSubgroup::span(&[outer, inner]);
        if let Some(i) = (span_lo..lo).chain(hi..span_hi).find(|&i| outer.get(i) != inner.get(i)) {
            return Err(Error::InfiniteIndex(format!("constraints differ periodically, first at coordinate {i}")));
        }
        let mut out = BigUint::one();
        for i in lo..hi {
            out *= BigUint::from(outer.get(i).order() / inner.get(i).order());
        }
        Ok(out)
    }

    fn contains(&self, v: &ProductSubgroup, x: &ShiftElement) -> bool {
        x.support().all(|(i, a)| v.get(i).contains(a))
    }

    fn is_compact_open_in(&self, w: &ProductSubgroup, h: &ProductSubgroup) -> bool {
        if !w.is_subgroup_of(h) {
            return false;
        }
        // compact: w_i ⊆ O almost everywhere; open in h: w_i ⊇ h_i ∩ O
        // almost everywhere
        let lo = w.lo().min(h.lo());
        let hi = w.hi().max(h.hi());
        let (span_lo, span_hi) = ProductSubgroup::span(&[w, h]);
        (span_lo..lo).chain(hi..span_hi).all(|i| w.get(i) == h.get(i).intersect(&self.o))
    }

    fn plus_part(&self, v: &ProductSubgroup) -> ProductSubgroup {
        v.ray_intersection(self.n)
    }

    fn check_t1(&self, v: &ProductSubgroup) -> T1Certificate {
        let plus = self.plus_part(v);
        let minus = self.minus_part(v);
        let (lo, hi) = ProductSubgroup::span(&[v, &plus, &minus]);
        let g = &self.group;
        for i in lo..hi {
            let prod = plus.get(i).product_set(&minus.get(i), g);
            if prod != v.get(i) {
                return T1Certificate::fail(
                    (i - lo) as usize + 1,
                    format!(
                        "coordinate {i}: V+ gives {}, V- gives {}, their product {} differs from V_i = {}",
                        plus.get(i).render(g),
                        minus.get(i).render(g),
                        prod.render(g),
                        v.get(i).render(g)
                    ),
                );
            }
        }
        let witnesses = (v.lo()..v.hi())
            .map(|i| format!("{i}: {}·{}", plus.get(i).render(g), minus.get(i).render(g)))
            .collect();
        T1Certificate::pass((hi - lo) as usize, witnesses)
    }

    fn check_t2(&self, v: &ProductSubgroup) -> T2Certificate {
        let parts = self.derived_parts(v);
        let g = &self.group;
        let describe = |name: &str, part: &ProductSubgroup, closed: bool| -> String {
            if closed {
                return format!("{name} = O^Z, so the union is O^Z");
            }
            let all_o = self.all_o();
            let i = part.find_coordinate(&all_o, |a, b| a == b).expect("differs somewhere");
            format!(
                "{name} has {} at coordinate {i}, a proper subgroup of O repeating along a tail; \
                 the union is dense in O^Z but misses elements with infinitely many such coordinates",
                part.get(i).render(g)
            )
        };
        T2Certificate {
            v_plus_plus_closed: parts.v_plus_plus_closed,
            v_minus_minus_closed: parts.v_minus_minus_closed,
            evidence: format!(
                "{}; {}",
                describe("V+", &parts.v_plus, parts.v_plus_plus_closed),
                describe("V-", &parts.v_minus, parts.v_minus_minus_closed)
            ),
        }
    }

    /// Steps 2-3 in closed form.
    ///
    /// `L` is the closure of `{x : α^i(x) ∈ O' for almost all i}`. Since `O'`
    /// is compact open, its constraints equal `O` outside a finite window
    /// `W`. For `N` past `W`, `⋂_{|i|>=N} σ^-i(O')` is the product subgroup
    /// whose constraint at `j` is `O` intersected with the constraints of
    /// `O'` at `j - i` for `|i| >= N`; when `j - i` ranges outside `W` all of
    /// those are `O`, so as `N` grows the constraint at any fixed `j`
    /// becomes `O`. The union over `N` is therefore dense in `O^Z` and
    /// contained in it, and `L = O^Z`.
    fn steps23(&self, o_prime: &ProductSubgroup) -> Result<Steps23<ProductSubgroup>> {
        let t1 = self.check_t1(o_prime);
        if !t1.holds {
            return Err(Error::NotTidy(format!(
                "steps 2-3 need (T1): {}",
                t1.failure.unwrap_or_default()
            )));
        }
        let g = &self.group;
        let o = self.o;
        let l = self.all_o();
        let o_star = o_prime.map(|s| {
            let allowed = s.product_set(&o, g);
            SubgroupOfF::from_elems(s.iter().filter(|&h| o.iter().all(|x| allowed.contains(g.conj(x, h)))))
        });
        let o_double_prime = o_star.map(|s| s.product_set(&o, g));
        let (lo, hi) = ProductSubgroup::span(&[&o_star, &o_double_prime]);
        for i in lo..hi {
            if !o_star.get(i).is_subgroup(g) || !o_double_prime.get(i).is_subgroup(g) {
                return Err(Error::NotSubgroup(format!("steps 2-3 produced a non-subgroup at coordinate {i}")));
            }
        }
        Ok(Steps23 {
            l,
            o_star,
            o_double_prime,
            notes: "L = O^Z in closed form; O* and O'' computed coordinatewise".into(),
        })
    }

    /// Level 1 is `O^Z`; level `k >= 2` puts `{e}` on `|i| <= k - 2`.
    fn filtration(&self, level: u32) -> ProductSubgroup {
        let r = level as i64 - 2;
        if r < 0 {
            return self.all_o();
        }
        let e = SubgroupOfF::trivial(&self.group);
        ProductSubgroup::from_constraints(self.o, &(-r..=r).map(|i| (i, e)).collect::<Vec<_>>())
    }

    /// For finitely supported `x` all four subgroups meet the representable
    /// elements in the same set. A basic identity neighbourhood is `{e}` on a
    /// finite window and `O` elsewhere, and the support of `α^k(x)` leaves
    /// every finite window, so `α^k(x) -> e` iff every coordinate is in `O`.
    /// If some coordinate is outside `O`, every iterate has a coordinate
    /// outside `O` at a position tending to infinity, which no compact set
    /// allows; so `x ∉ P`, hence `x ∉ M` and `x ∉ U0 ⊆ M`.
    fn closed_form_membership(&self, x: &ShiftElement, _target: Target) -> Option<MembershipVerdict> {
        Some(match self.coordinates_in_o(x) {
            None => MembershipVerdict::yes(0),
            Some((i, a)) => MembershipVerdict {
                verdict: crate::engine::Verdict::No,
                horizon: 0,
                witness: Some(format!(
                    "coordinate {i} is {} outside O; iterate k has it at {i} + {}k, leaving every compact set",
                    self.group.label(a),
                    self.n
                )),
            },
        })
    }

    fn closed_form_scale(&self) -> Option<BigUint> {
        Some(BigUint::one())
    }

    fn preferred_scale_method(&self) -> ScaleMethod {
        ScaleMethod::IndexAtTidy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{displacement_index, iterate_intersection, tidy, tidying_step1};

    fn s3_a3() -> ShiftFamily {
        let g = FiniteGroup::symmetric(3).unwrap();
        let o = SubgroupOfF::parse(&g, "A3").unwrap();
        ShiftFamily::new(g, o, 1).unwrap()
    }

    fn point(fam: &ShiftFamily, name: &str) -> ProductSubgroup {
        let s = SubgroupOfF::parse(fam.group(), name).unwrap();
        fam.product_subgroup(&[(0, s)]).unwrap()
    }

    #[test]
    fn displacement_of_point_constraint() {
        let fam = s3_a3();
        let v = point(&fam, "trivial");
        assert_eq!(displacement_index(&fam, &v).unwrap(), BigUint::from(3u32));
        assert_eq!(displacement_index(&fam, &fam.all_o()).unwrap(), BigUint::one());
    }

    #[test]
    fn iterate_intersection_extends_window() {
        let fam = s3_a3();
        let v = point(&fam, "trivial");
        let e = SubgroupOfF::trivial(fam.group());
        let expected = fam.product_subgroup(&[(0, e), (1, e), (2, e)]).unwrap();
        assert_eq!(iterate_intersection(&fam, &v, 2), expected);
        assert_eq!(iterate_intersection(&fam, &v, 0), v);
    }

    #[test]
    fn step1_of_point_constraint_is_immediate() {
        let fam = s3_a3();
        let (_, k) = tidying_step1(&fam, &point(&fam, "trivial"), 64).unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn derived_parts_of_point_constraint() {
        let fam = s3_a3();
        let parts = fam.derived_parts(&point(&fam, "trivial"));
        let e = SubgroupOfF::trivial(fam.group());
        assert!((0..10).all(|i| parts.v_plus.get(i) == e));
        assert!((-10..0).all(|i| parts.v_plus.get(i) == fam.o()));
        assert!(!parts.v_minus_minus_closed);
        let all = fam.derived_parts(&fam.all_o());
        assert!(all.v_minus_minus_closed && all.v_plus_plus_closed);
        assert_eq!(all.v_zero, fam.all_o());
    }

    #[test]
    fn tidy_reaches_all_o() {
        let fam = s3_a3();
        for name in ["trivial", "C2", "all", "A3"] {
            let r = tidy(&fam, &point(&fam, name), 64).unwrap();
            assert_eq!(r.output, fam.all_o(), "{name}");
            assert_eq!(r.scale, BigUint::one());
            assert_eq!(r.scale_inverse, BigUint::one());
        }
    }

    #[test]
    fn c2_point_needs_one_step() {
        let fam = s3_a3();
        let r = tidy(&fam, &point(&fam, "C2"), 64).unwrap();
        assert_eq!(r.step1_iterations, 1);
        let s = r.steps23.unwrap();
        assert_eq!(s.l, fam.all_o());
        assert_eq!(s.o_double_prime, fam.all_o());
    }

    #[test]
    fn steps23_requires_t1() {
        let fam = s3_a3();
        assert!(fam.steps23(&point(&fam, "C2")).is_err());
    }

    #[test]
    fn psub_index_examples() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let o = SubgroupOfF::parse(&g, "C2").unwrap();
        let fam = ShiftFamily::new(g, o, 1).unwrap();
        let b = fam.product_subgroup(&[(3, SubgroupOfF::trivial(fam.group()))]).unwrap();
        assert_eq!(fam.psub_index(&fam.all_o(), &b).unwrap(), BigUint::from(2u32));
        assert_eq!(fam.psub_index(&b, &b).unwrap(), BigUint::one());
        assert_eq!(fam.psub_index(&b, &fam.all_o()).unwrap_err().code(), "E_NOT_CONTAINED");
    }

    #[test]
    fn membership_examples() {
        let fam = s3_a3();
        let g = fam.group();
        let inside = ShiftElement::parse(g, "0:(123)").unwrap();
        let outside = ShiftElement::parse(g, "0:(12)").unwrap();
        for t in Target::ALL {
            assert_eq!(fam.closed_form_membership(&inside, t).unwrap().verdict, crate::engine::Verdict::Yes);
            assert_eq!(fam.closed_form_membership(&outside, t).unwrap().verdict, crate::engine::Verdict::No);
        }
    }

    #[test]
    fn l_definition_on_samples() {
        use rand::SeedableRng;
        let fam = s3_a3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let o_prime = point(&fam, "trivial");
        let samples: Vec<ShiftElement> = (0..40).map(|k| fam.random_element(&mut rng, 4, k % 2 == 0)).collect();
        assert!(fam.verify_l_definition(&o_prime, &samples));
    }

    #[test]
    fn minus_minus_membership() {
        let fam = s3_a3();
        let v = point(&fam, "trivial");
        let g = fam.group();
        // V- = {e} on i <= 0; pulled back far enough it allows any finite O-element
        let x = ShiftElement::parse(g, "-3:(123),5:(132)").unwrap();
        assert!(fam.in_v_minus_minus(&v, &x));
        assert!(fam.in_v_plus_plus(&v, &x));
        let y = ShiftElement::parse(g, "0:(12)").unwrap();
        assert!(!fam.in_v_minus_minus(&v, &y));
    }
}
