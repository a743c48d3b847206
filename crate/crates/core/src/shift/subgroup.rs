use serde::{Deserialize, Serialize};

use super::group::{Elem, FiniteGroup, GroupKind};
use crate::error::{Error, Result};

/// A subset of a finite group, stored as a bit mask over element indices.
/// Values produced by the public constructors are subgroups.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Elem>", from = "Vec<Elem>")]
pub struct SubgroupOfF {
    bits: u128,
}

impl std::fmt::Debug for SubgroupOfF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl From<SubgroupOfF> for Vec<Elem> {
    fn from(s: SubgroupOfF) -> Self {
        s.iter().collect()
    }
}

impl From<Vec<Elem>> for SubgroupOfF {
    fn from(v: Vec<Elem>) -> Self {
        Self::from_elems(v)
    }
}

impl SubgroupOfF {
    pub(crate) fn from_elems(elems: impl IntoIterator<Item = Elem>) -> Self {
        SubgroupOfF { bits: elems.into_iter().fold(0, |b, e| b | (1u128 << e)) }
    }

    /// Validates that `elems` form a subgroup of `g`.
    pub fn new(g: &FiniteGroup, elems: &[Elem]) -> Result<Self> {
        if let Some(e) = elems.iter().find(|&&e| e as usize >= g.order()) {
            return Err(Error::NotSubgroup(format!("index {e} is outside {}", g.name())));
        }
        let s = Self::from_elems(elems.iter().copied());
        if !s.is_subgroup(g) {
            let listing: Vec<&str> = s.iter().map(|e| g.label(e)).collect();
            return Err(Error::NotSubgroup(format!("{{{}}} is not a subgroup of {}", listing.join(","), g.name())));
        }
        Ok(s)
    }

    /// This subgroup as a group in its own right, with element `i` of the
    /// result being the `i`-th element of `self` in increasing order.
    pub fn as_group(&self, g: &FiniteGroup, name: &str) -> Result<(FiniteGroup, Vec<Elem>)> {
        if !self.is_subgroup(g) {
            return Err(Error::NotSubgroup(format!("{} is not a subgroup of {}", self.render(g), g.name())));
        }
        let elems: Vec<Elem> = self.iter().collect();
        let index_of = |a: Elem| elems.iter().position(|&b| b == a).expect("closed under product");
        let labels = elems.iter().map(|&a| g.label(a).to_string()).collect();
        let rows = elems.iter().map(|&a| elems.iter().map(|&b| index_of(g.mul(a, b))).collect()).collect();
        Ok((FiniteGroup::from_table(name, labels, rows)?, elems))
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Self::from_elems([g.identity()])
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Self::from_elems(g.elements())
    }

    pub fn center(g: &FiniteGroup) -> Self {
        Self::from_elems(g.elements().filter(|&a| g.elements().all(|b| g.mul(a, b) == g.mul(b, a))))
    }

    /// Closure of `gens` under multiplication (inverses come for free in a
    /// finite group).
    pub fn generated(g: &FiniteGroup, gens: &[Elem]) -> Self {
        let mut s = Self::trivial(g);
        let mut frontier: Vec<Elem> = vec![g.identity()];
        while let Some(x) = frontier.pop() {
            for &h in gens {
                let y = g.mul(x, h);
                if !s.contains(y) {
                    s.bits |= 1u128 << y;
                    frontier.push(y);
                }
            }
        }
        s
    }

    /// Named subgroups: `trivial`, `all`, `center`, `A<n>` inside `S<n>`,
    /// `C<k>` (the subgroup generated by the first element of order `k`;
    /// in a cyclic group this is the unique subgroup of order `k`),
    /// `gen:a,b,...` and `set:a,b,...`.
    pub fn parse(g: &FiniteGroup, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let labels = |list: &str| -> Result<Vec<Elem>> {
            list.split(',').filter(|t| !t.trim().is_empty()).map(|t| g.element(t)).collect()
        };
        if let Some(list) = spec.strip_prefix("gen:") {
            return Ok(Self::generated(g, &labels(list)?));
        }
        if let Some(list) = spec.strip_prefix("set:") {
            return Self::new(g, &labels(list)?);
        }
        match spec {
            "trivial" | "e" | "1" => return Ok(Self::trivial(g)),
            "all" | "F" => return Ok(Self::whole(g)),
            "center" | "Z" => return Ok(Self::center(g)),
            _ => {}
        }
        let unknown = || Error::Parse(format!("unknown subgroup {spec:?} of {}", g.name()));
        if let Some(k) = spec.strip_prefix('A').and_then(|k| k.parse::<usize>().ok()) {
            return match g.kind() {
                GroupKind::Symmetric(n) if n == k => {
                    let alt = FiniteGroup::alternating(n)?;
                    let elems: Vec<Elem> = alt.labels().iter().map(|l| g.element(l)).collect::<Result<_>>()?;
                    Self::new(g, &elems)
                }
                GroupKind::Alternating(n) if n == k => Ok(Self::whole(g)),
                _ => Err(unknown()),
            };
        }
        if let Some(k) = spec.strip_prefix('C').and_then(|k| k.parse::<usize>().ok()) {
            let gen = g.elements().find(|&a| g.element_order(a) == k).ok_or_else(|| {
                Error::NotSubgroup(format!("{} has no element of order {k}", g.name()))
            })?;
            return Ok(Self::generated(g, &[gen]));
        }
        Err(unknown())
    }

    pub fn contains(&self, e: Elem) -> bool {
        e < 128 && self.bits & (1u128 << e) != 0
    }

    pub fn order(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        let bits = self.bits;
        (0..128u8).filter(move |&e| bits & (1u128 << e) != 0)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        SubgroupOfF { bits: self.bits & other.bits }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// The set `AB`, which need not be a subgroup.
    pub fn product_set(&self, other: &Self, g: &FiniteGroup) -> Self {
        Self::from_elems(self.iter().flat_map(|a| other.iter().map(move |b| g.mul(a, b))))
    }

    pub fn is_subgroup(&self, g: &FiniteGroup) -> bool {
        self.contains(g.identity())
            && self.iter().all(|a| self.contains(g.inv(a)) && self.iter().all(|b| self.contains(g.mul(a, b))))
    }

    pub fn is_normal(&self, g: &FiniteGroup) -> bool {
        g.elements().all(|a| self.iter().all(|h| self.contains(g.conj(a, h))))
    }

    pub fn render(&self, g: &FiniteGroup) -> String {
        let labels: Vec<&str> = self.iter().map(|e| g.label(e)).collect();
        format!("{{{}}}", labels.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_subgroups() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a3 = SubgroupOfF::parse(&s3, "A3").unwrap();
        assert_eq!(a3.order(), 3);
        assert!(a3.is_normal(&s3));
        let c2 = SubgroupOfF::parse(&s3, "C2").unwrap();
        assert_eq!(c2.order(), 2);
        assert!(!c2.is_normal(&s3));
        assert_eq!(SubgroupOfF::center(&s3).order(), 1);

        let d4 = FiniteGroup::dihedral(4).unwrap();
        let z = SubgroupOfF::parse(&d4, "center").unwrap();
        assert_eq!(z.render(&d4), "{e,r^2}");

        let c4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(SubgroupOfF::parse(&c4, "C2").unwrap().render(&c4), "{e,c^2}");
    }

    #[test]
    fn non_subgroup_rejected() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let err = SubgroupOfF::parse(&s3, "set:e,(12),(13)").unwrap_err();
        assert_eq!(err.code(), "E_NOT_SUBGROUP");
        assert!(SubgroupOfF::parse(&s3, "set:e,(12)").is_ok());
    }

    #[test]
    fn product_set_of_complements() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a3 = SubgroupOfF::parse(&s3, "A3").unwrap();
        let c2 = SubgroupOfF::parse(&s3, "C2").unwrap();
        assert_eq!(a3.product_set(&c2, &s3), SubgroupOfF::whole(&s3));
        assert_eq!(c2.intersect(&a3), SubgroupOfF::trivial(&s3));
    }
}
