use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::group::FiniteGroup;
use super::subgroup::SubgroupOfF;

/// A closed subgroup `∏_i V_i` of the product `F^Z`, described by its
/// coordinate constraints.
///
/// Constraints are explicit on the window `[lo, lo + body.len())`. To the
/// left of it the constraint at `i` is `left[i mod left.len()]`, to the right
/// `right[i mod right.len()]`. Compact open subgroups of the restricted
/// product are the ones whose tails are both `[O]`; the parts `V+`, `V-`
/// of such a subgroup have tails `[O]` on one side and a periodic pattern
/// on the other.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductSubgroup {
    lo: i64,
    body: Vec<SubgroupOfF>,
    left: Vec<SubgroupOfF>,
    right: Vec<SubgroupOfF>,
}

impl PartialEq for ProductSubgroup {
    fn eq(&self, other: &Self) -> bool {
        let (lo, hi) = Self::span(&[self, other]);
        (lo..hi).all(|i| self.get(i) == other.get(i))
    }
}

impl Eq for ProductSubgroup {}

fn lcm_all(xs: impl IntoIterator<Item = usize>) -> usize {
    xs.into_iter().fold(1, |a, b| a.lcm(&b))
}

impl ProductSubgroup {
    pub fn uniform(s: SubgroupOfF) -> Self {
        ProductSubgroup { lo: 0, body: Vec::new(), left: vec![s], right: vec![s] }
    }

    /// Constraints `body` on `[lo, lo + body.len())` and `outside` elsewhere.
    pub fn windowed(lo: i64, body: Vec<SubgroupOfF>, outside: SubgroupOfF) -> Self {
        ProductSubgroup { lo, body, left: vec![outside], right: vec![outside] }.normalized()
    }

    /// `outside` everywhere except at the listed coordinates.
    pub fn from_constraints(outside: SubgroupOfF, constraints: &[(i64, SubgroupOfF)]) -> Self {
        let Some(lo) = constraints.iter().map(|c| c.0).min() else {
            return Self::uniform(outside);
        };
        let hi = constraints.iter().map(|c| c.0).max().expect("nonempty") + 1;
        let mut body = vec![outside; (hi - lo) as usize];
        for &(i, s) in constraints {
            body[(i - lo) as usize] = s;
        }
        Self::windowed(lo, body, outside)
    }

    pub fn general(lo: i64, body: Vec<SubgroupOfF>, left: Vec<SubgroupOfF>, right: Vec<SubgroupOfF>) -> Self {
        assert!(!left.is_empty() && !right.is_empty(), "tails need at least one entry");
        ProductSubgroup { lo, body, left, right }.normalized()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.body.len() as i64
    }

    pub fn body(&self) -> &[SubgroupOfF] {
        &self.body
    }

    pub fn left_tail(&self) -> &[SubgroupOfF] {
        &self.left
    }

    pub fn right_tail(&self) -> &[SubgroupOfF] {
        &self.right
    }

    pub fn get(&self, i: i64) -> SubgroupOfF {
        if i < self.lo {
            self.left[i.rem_euclid(self.left.len() as i64) as usize]
        } else if i >= self.hi() {
            self.right[i.rem_euclid(self.right.len() as i64) as usize]
        } else {
            self.body[(i - self.lo) as usize]
        }
    }

    /// Common period of all tails.
    fn tail_period(items: &[&Self]) -> i64 {
        lcm_all(items.iter().flat_map(|p| [p.left.len(), p.right.len()])) as i64
    }

    /// A coordinate range outside which every pattern in `items` repeats
    /// what it does on the range, one full tail period on each side.
    pub fn span(items: &[&Self]) -> (i64, i64) {
        let p = Self::tail_period(items);
        let lo = items.iter().map(|x| x.lo).min().expect("nonempty");
        let hi = items.iter().map(|x| x.hi()).max().expect("nonempty");
        (lo - p, hi + p)
    }

    /// Whether both tails are the single constraint `o`.
    pub fn has_tails(&self, o: SubgroupOfF) -> bool {
        self.left.iter().all(|&s| s == o) && self.right.iter().all(|&s| s == o)
    }

    /// Coordinatewise combination.
    pub fn zip_with(&self, other: &Self, f: impl Fn(SubgroupOfF, SubgroupOfF) -> SubgroupOfF) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let body = (lo..hi).map(|i| f(self.get(i), other.get(i))).collect();
        let tail = |a: &[SubgroupOfF], b: &[SubgroupOfF]| -> Vec<SubgroupOfF> {
            let n = a.len().lcm(&b.len());
            (0..n).map(|r| f(a[r % a.len()], b[r % b.len()])).collect()
        };
        ProductSubgroup { lo, body, left: tail(&self.left, &other.left), right: tail(&self.right, &other.right) }
            .normalized()
    }

    pub fn map(&self, f: impl Fn(SubgroupOfF) -> SubgroupOfF) -> Self {
        ProductSubgroup {
            lo: self.lo,
            body: self.body.iter().map(|&s| f(s)).collect(),
            left: self.left.iter().map(|&s| f(s)).collect(),
            right: self.right.iter().map(|&s| f(s)).collect(),
        }
        .normalized()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.intersect(&b))
    }

    /// Constraints moved `k` places to the right: the image under `σ^k`.
    pub fn shift(&self, k: i64) -> Self {
        let rot = |t: &[SubgroupOfF]| -> Vec<SubgroupOfF> {
            let n = t.len() as i64;
            (0..n).map(|r| t[(r - k).rem_euclid(n) as usize]).collect()
        };
        ProductSubgroup { lo: self.lo + k, body: self.body.clone(), left: rot(&self.left), right: rot(&self.right) }
    }

    /// `⋂_{m>=0} σ^{m·step}(V)`: at coordinate `i`, the meet of the
    /// constraints at `i - m·step` for `m >= 0`.
    pub fn ray_intersection(&self, step: i64) -> Self {
        assert!(step != 0, "step must be nonzero");
        let (l, r) = (self.left.len() as i64, self.right.len() as i64);
        let val = |i: i64| -> SubgroupOfF {
            let mut acc = self.get(i);
            let mut j = i;
            let mut in_tail = 0;
            // once the ray is inside a tail, one tail period of steps visits
            // every residue it will ever visit
            let tail_len = if step > 0 { l } else { r };
            while in_tail < tail_len {
                j -= step;
                acc = acc.intersect(&self.get(j));
                let past = if step > 0 { j < self.lo } else { j >= self.hi() };
                if past {
                    in_tail += 1;
                }
            }
            acc
        };
        let p = (step.unsigned_abs() as usize).lcm(&(l as usize)).lcm(&(r as usize)) as i64;
        let (lo, hi) = (self.lo - p, self.hi() + p);
        let body = (lo..hi).map(val).collect();
        let tail = |start: i64| -> Vec<SubgroupOfF> {
            let mut t = vec![SubgroupOfF::from_elems([]); p as usize];
            for i in start..start + p {
                t[i.rem_euclid(p) as usize] = val(i);
            }
            t
        };
        ProductSubgroup { lo, body, left: tail(lo - p), right: tail(hi) }.normalized()
    }

    pub fn all_coordinates(&self, other: &Self, pred: impl Fn(SubgroupOfF, SubgroupOfF) -> bool) -> bool {
        let (lo, hi) = Self::span(&[self, other]);
        (lo..hi).all(|i| pred(self.get(i), other.get(i)))
    }

    /// First coordinate (in the examined range) where `pred` fails.
    pub fn find_coordinate(&self, other: &Self, pred: impl Fn(SubgroupOfF, SubgroupOfF) -> bool) -> Option<i64> {
        let (lo, hi) = Self::span(&[self, other]);
        (lo..hi).find(|&i| !pred(self.get(i), other.get(i)))
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.all_coordinates(other, |a, b| a.is_subset_of(&b))
    }

    /// Shortest tails, then the shortest body.
    fn normalized(mut self) -> Self {
        self.left = minimal_period(&self.left);
        self.right = minimal_period(&self.right);
        while let Some(&first) = self.body.first() {
            if first != self.left[self.lo.rem_euclid(self.left.len() as i64) as usize] {
                break;
            }
            self.body.remove(0);
            self.lo += 1;
        }
        while let Some(&last) = self.body.last() {
            let i = self.hi() - 1;
            if last != self.right[i.rem_euclid(self.right.len() as i64) as usize] {
                break;
            }
            self.body.pop();
        }
        if self.body.is_empty() && self.left == self.right {
            // one periodic pattern throughout; lo carries no information
            self.lo = 0;
        }
        self
    }

    pub fn render(&self, g: &FiniteGroup) -> String {
        let tail = |t: &[SubgroupOfF]| -> String {
            let parts: Vec<String> = t.iter().map(|s| s.render(g)).collect();
            parts.join(" ")
        };
        let body: Vec<String> =
            self.body.iter().enumerate().map(|(k, s)| format!("{}:{}", self.lo + k as i64, s.render(g))).collect();
        if body.is_empty() {
            return format!("left[{}] right[{}]", tail(&self.left), tail(&self.right));
        }
        format!("left[{}] {} right[{}]", tail(&self.left), body.join(" "), tail(&self.right))
    }
}

/// Shortest `d` dividing `t.len()` with `t[r] = t[r + d]`, as a `d`-entry
/// table indexed by residue mod `d`.
fn minimal_period(t: &[SubgroupOfF]) -> Vec<SubgroupOfF> {
    let n = t.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|r| t[r] == t[(r + d) % n]) {
            return t[..d].to_vec();
        }
    }
    t.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::group::FiniteGroup;

    fn setup() -> (FiniteGroup, SubgroupOfF, SubgroupOfF) {
        let g = FiniteGroup::symmetric(3).unwrap();
        let o = SubgroupOfF::parse(&g, "A3").unwrap();
        let e = SubgroupOfF::trivial(&g);
        (g, o, e)
    }

    #[test]
    fn plus_part_of_point_constraint() {
        let (_, o, e) = setup();
        let v = ProductSubgroup::from_constraints(o, &[(0, e)]);
        let plus = v.ray_intersection(1);
        for i in -5..0 {
            assert_eq!(plus.get(i), o, "coordinate {i}");
        }
        for i in 0..20 {
            assert_eq!(plus.get(i), e, "coordinate {i}");
        }
        let minus = v.ray_intersection(-1);
        assert_eq!(minus.get(0), e);
        assert_eq!(minus.get(-7), e);
        assert_eq!(minus.get(1), o);
    }

    #[test]
    fn ray_with_stride_two() {
        let (_, o, e) = setup();
        let v = ProductSubgroup::from_constraints(o, &[(0, e)]);
        let plus = v.ray_intersection(2);
        assert_eq!(plus.get(4), e);
        assert_eq!(plus.get(5), o);
        assert_eq!(plus.get(-2), o);
        assert_eq!(plus.right_tail().len(), 2);
    }

    #[test]
    fn equality_ignores_representation() {
        let (_, o, e) = setup();
        let a = ProductSubgroup::windowed(-3, vec![o, o, e, o], o);
        let b = ProductSubgroup::from_constraints(o, &[(-1, e)]);
        assert_eq!(a, b);
        assert_eq!(a.lo(), -1);
        assert_eq!(a.body().len(), 1);
        assert_eq!(a.shift(1), ProductSubgroup::from_constraints(o, &[(0, e)]));
        assert_ne!(a, ProductSubgroup::uniform(o));
    }

    #[test]
    fn periodic_tails_shift() {
        let (_, o, e) = setup();
        let p = ProductSubgroup::general(0, vec![], vec![o], vec![e, o]);
        assert_eq!(p.get(4), e);
        assert_eq!(p.shift(1).get(5), e);
        assert_eq!(p.shift(1).get(4), o);
        assert_eq!(p.shift(2).get(0), o);
        assert_eq!(p.shift(2).get(6), e);
        let q = ProductSubgroup::general(0, vec![], vec![e, o], vec![e, o]);
        assert_eq!(q.shift(2), q);
        assert_ne!(q.shift(1), q);
    }
}
