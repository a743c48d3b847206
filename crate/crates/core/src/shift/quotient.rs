use super::element::ShiftElement;
use super::family::ShiftFamily;
use super::group::{Elem, FiniteGroup};
use super::subgroup::SubgroupOfF;
use crate::error::{Error, Result};

/// A normal subgroup `K ≤ O` of `F`, with the induced quotient data. The
/// subgroup `K^Z` is closed and `σ`-stable, and the quotient of the
/// restricted product by it is the restricted product of `F/K` over `O/K`.
#[derive(Debug, Clone)]
pub struct QuotientSpec {
    k: SubgroupOfF,
    quotient: FiniteGroup,
    /// Coset index of each element of `F`.
    projection: Vec<Elem>,
    o_image: SubgroupOfF,
}

impl QuotientSpec {
    pub fn new(g: &FiniteGroup, o: SubgroupOfF, k: SubgroupOfF) -> Result<Self> {
        if !k.is_subgroup(g) {
            return Err(Error::NotSubgroup(format!("K = {} is not a subgroup", k.render(g))));
        }
        if !k.is_normal(g) {
            return Err(Error::InvalidInput(format!("K = {} is not normal in {}", k.render(g), g.name())));
        }
        if !k.is_subset_of(&o) {
            return Err(Error::InvalidInput(format!("K = {} is not contained in O = {}", k.render(g), o.render(g))));
        }
        // cosets aK in order of their least element
        let mut projection = vec![Elem::MAX; g.order()];
        let mut reps: Vec<Elem> = Vec::new();
        for a in g.elements() {
            if projection[a as usize] != Elem::MAX {
                continue;
            }
            let c = reps.len() as Elem;
            for h in k.iter() {
                projection[g.mul(a, h) as usize] = c;
            }
            reps.push(a);
        }
        let labels: Vec<String> = reps.iter().map(|&a| format!("[{}]", g.label(a))).collect();
        let rows: Vec<Vec<usize>> = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| projection[g.mul(a, b) as usize] as usize).collect())
            .collect();
        let quotient = FiniteGroup::from_table(&format!("{}/{}", g.name(), k.render(g)), labels, rows)?;
        let o_image = SubgroupOfF::from_elems(o.iter().map(|a| projection[a as usize]));
        Ok(QuotientSpec { k, quotient, projection, o_image })
    }

    pub fn k(&self) -> SubgroupOfF {
        self.k
    }

    pub fn quotient_group(&self) -> &FiniteGroup {
        &self.quotient
    }

    pub fn project(&self, a: Elem) -> Elem {
        self.projection[a as usize]
    }

    /// `O/K`.
    pub fn o_image(&self) -> SubgroupOfF {
        self.o_image
    }

    /// The same shift on the quotient restricted product.
    pub fn quotient_family(&self, fam: &ShiftFamily) -> Result<ShiftFamily> {
        ShiftFamily::new(self.quotient.clone(), self.o_image, fam.exponent())
    }

    /// `K^Z` as a family in its own right.
    pub fn kernel_family(&self, fam: &ShiftFamily) -> Result<ShiftFamily> {
        let g = fam.group();
        let (kg, _) = self.k.as_group(g, &format!("K<{}", g.name()))?;
        let whole = SubgroupOfF::whole(&kg);
        ShiftFamily::new(kg, whole, fam.exponent())
    }

    pub fn push(&self, x: &ShiftElement) -> ShiftElement {
        x.map_coords(&self.quotient, |a| self.project(a))
    }
}

/// Coordinatewise image of `x` in the quotient.
pub fn quotient_push(x: &ShiftElement, spec: &QuotientSpec) -> ShiftElement {
    spec.push(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{GroupFamily, Target, Verdict};

    #[test]
    fn a3_quotient_kills_a3_elements() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let a3 = SubgroupOfF::parse(&g, "A3").unwrap();
        let q = QuotientSpec::new(&g, a3, a3).unwrap();
        assert_eq!(q.quotient_group().order(), 2);
        let x = ShiftElement::parse(&g, "0:(123),4:(132)").unwrap();
        assert!(q.push(&x).is_identity());
        assert!(q.push(&ShiftElement::identity()).is_identity());
    }

    #[test]
    fn c4_over_c2() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let c2 = SubgroupOfF::parse(&g, "C2").unwrap();
        let fam = ShiftFamily::new(g.clone(), c2, 1).unwrap();
        let q = QuotientSpec::new(&g, c2, c2).unwrap();
        let x = ShiftElement::parse(&g, "0:c").unwrap();
        let px = q.push(&x);
        assert!(!px.is_identity());
        let qf = q.quotient_family(&fam).unwrap();
        // O/K is trivial, so the class of c is outside it downstairs too
        assert_eq!(qf.closed_form_membership(&px, Target::U).unwrap().verdict, Verdict::No);
        assert_eq!(fam.closed_form_membership(&x, Target::U).unwrap().verdict, Verdict::No);
    }

    #[test]
    fn rejects_bad_kernels() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let a3 = SubgroupOfF::parse(&g, "A3").unwrap();
        let c2 = SubgroupOfF::parse(&g, "C2").unwrap();
        assert!(QuotientSpec::new(&g, a3, c2).is_err());
        let all = SubgroupOfF::whole(&g);
        assert!(QuotientSpec::new(&g, a3, all).is_err());
    }
}
