use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::group::{Elem, FiniteGroup};
use crate::error::{Error, Result};

/// A finitely supported element of `F^Z`; coordinates not listed are the
/// identity, and the identity is never listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ShiftElement {
    coords: BTreeMap<i64, Elem>,
}

impl ShiftElement {
    pub fn identity() -> Self {
        ShiftElement::default()
    }

    pub fn from_coords(g: &FiniteGroup, coords: impl IntoIterator<Item = (i64, Elem)>) -> Self {
        ShiftElement { coords: coords.into_iter().filter(|&(_, a)| a != g.identity()).collect() }
    }

    /// `i:label,i:label,...`; the empty string is the identity.
    pub fn parse(g: &FiniteGroup, text: &str) -> Result<Self> {
        let mut coords = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (i, label) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `coordinate:label`, got {part:?}")))?;
            let i: i64 = i.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate in {part:?}")))?;
            coords.push((i, g.element(label)?));
        }
        Ok(Self::from_coords(g, coords))
    }

    pub fn get(&self, g: &FiniteGroup, i: i64) -> Elem {
        self.coords.get(&i).copied().unwrap_or(g.identity())
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, Elem)> + '_ {
        self.coords.iter().map(|(&i, &a)| (i, a))
    }

    pub fn is_identity(&self) -> bool {
        self.coords.is_empty()
    }

    /// `(σ^n x)_i = x_{i-n}`.
    pub fn shift(&self, n: i64) -> Self {
        ShiftElement { coords: self.coords.iter().map(|(&i, &a)| (i + n, a)).collect() }
    }

    pub fn multiply(&self, other: &Self, g: &FiniteGroup) -> Self {
        let keys: std::collections::BTreeSet<i64> = self.coords.keys().chain(other.coords.keys()).copied().collect();
        Self::from_coords(g, keys.into_iter().map(|i| (i, g.mul(self.get(g, i), other.get(g, i)))))
    }

    pub fn invert(&self, g: &FiniteGroup) -> Self {
        Self::from_coords(g, self.support().map(|(i, a)| (i, g.inv(a))))
    }

    /// Coordinatewise image under a map of `F`.
    pub fn map_coords(&self, g_to: &FiniteGroup, f: impl Fn(Elem) -> Elem) -> Self {
        Self::from_coords(g_to, self.support().map(|(i, a)| (i, f(a))))
    }

    pub fn render(&self, g: &FiniteGroup) -> String {
        if self.is_identity() {
            return "e".to_string();
        }
        let parts: Vec<String> = self.support().map(|(i, a)| format!("{i}:{}", g.label(a))).collect();
        parts.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_examples() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let x = ShiftElement::parse(&g, "0:(12)").unwrap();
        assert_eq!(x.shift(1), ShiftElement::parse(&g, "1:(12)").unwrap());
        assert_eq!(ShiftElement::identity().shift(5), ShiftElement::identity());
        let y = ShiftElement::parse(&g, "-1:(12),2:(123)").unwrap();
        assert_eq!(y.shift(-2), ShiftElement::parse(&g, "-3:(12),0:(123)").unwrap());
    }

    #[test]
    fn canonical_drops_identity() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let x = ShiftElement::parse(&g, "0:c,3:e").unwrap();
        assert_eq!(x.support().count(), 1);
        let y = x.multiply(&x.invert(&g), &g);
        assert!(y.is_identity());
    }
}
