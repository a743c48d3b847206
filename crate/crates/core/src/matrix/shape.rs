use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::arith::{valuation, Matrix, Prime, Rational, Valuation};
use crate::error::{Error, Result};

/// Lower bound on the valuation of one entry of `N` in `I + N`.
///
/// `Free` allows any value (bound `-∞`), `Zero` forces the entry to vanish
/// (bound `+∞`). The derived order is the order of the bounds, so the
/// intersection of two constraints is their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Free,
    AtLeast(i64),
    Zero,
}

impl Bound {
    pub fn shifted(self, d: i64) -> Bound {
        match self {
            Bound::AtLeast(a) => Bound::AtLeast(a + d),
            b => b,
        }
    }

    /// Bound for a product of two entries.
    pub fn plus(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Zero, _) | (_, Bound::Zero) => Bound::Zero,
            (Bound::Free, _) | (_, Bound::Free) => Bound::Free,
            (Bound::AtLeast(a), Bound::AtLeast(b)) => Bound::AtLeast(a + b),
        }
    }

    pub fn admits(self, x: &Rational, p: Prime) -> bool {
        match (self, valuation(x, p)) {
            (_, Valuation::Infinite) => true,
            (Bound::Free, _) => true,
            (Bound::Zero, _) => false,
            (Bound::AtLeast(a), Valuation::Finite(v)) => v >= a,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::AtLeast(_))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Free => write!(f, "-inf"),
            Bound::AtLeast(a) => write!(f, "{a}"),
            Bound::Zero => write!(f, "inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The closed subgroup `{I + N : v(N_ij) >= S_ij}` of `GL_n(Q_p)`, in the
/// coordinates where the automorphism is diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ValuationShape {
    n: usize,
    entries: Vec<Bound>,
}

impl ValuationShape {
    /// The level-`k` congruence subgroup `I + p^k M_n(Z_p)`.
    pub fn congruence(n: usize, k: i64) -> Self {
        ValuationShape { n, entries: vec![Bound::AtLeast(k); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Bound) -> Self {
        ValuationShape { n, entries: (0..n * n).map(|t| f(t / n, t % n)).collect() }
    }

    /// Validates closure under multiplication: diagonal bounds at least 1 and
    /// `S_ij <= S_il + S_lj`.
    pub fn new(n: usize, entries: Vec<Bound>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("a {n}x{n} shape needs {} entries", n * n)));
        }
        let s = ValuationShape { n, entries };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) < Bound::AtLeast(1) {
                return Err(Error::InvalidInput(format!("diagonal bound at ({i},{i}) must be at least 1")));
            }
            for j in 0..n {
                for l in 0..n {
                    if self.get(i, l).plus(self.get(l, j)) < self.get(i, j) {
                        return Err(Error::InvalidInput(format!(
                            "shape is not closed under products at ({i},{j}) via {l}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Bound] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(usize, usize, Bound) -> Bound) -> Self {
        Self::from_fn(self.n, |i, j| f(i, j, self.get(i, j)))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.map(|i, j, b| b.max(other.get(i, j)))
    }

    /// Image under conjugation by `diag(p^v_1, ..., p^v_n)^m` (up to units):
    /// entry `(i, j)` moves by `m (v_i - v_j)`.
    pub fn conjugated(&self, v: &[i64], m: i64) -> Self {
        self.map(|i, j, b| b.shifted(m * (v[i] - v[j])))
    }

    pub fn is_subshape_of(&self, outer: &Self) -> bool {
        self.entries.iter().zip(&outer.entries).all(|(a, b)| a >= b)
    }

    pub fn is_compact(&self) -> bool {
        !self.entries.contains(&Bound::Free)
    }

    /// `|outer : inner|` for `inner ⊆ outer`.
    pub fn index_in(&self, outer: &Self, p: Prime) -> Result<BigUint> {
        if !self.is_subshape_of(outer) {
            return Err(Error::NotContained("inner shape is not contained in the outer one".into()));
        }
        let mut exp: i64 = 0;
        for (t, (b, a)) in self.entries.iter().zip(&outer.entries).enumerate() {
            match (a, b) {
                (Bound::AtLeast(a), Bound::AtLeast(b)) => exp += b - a,
                (x, y) if x == y => {}
                _ => {
                    return Err(Error::InfiniteIndex(format!(
                        "entry ({},{}) is {a} outside but {b} inside",
                        t / self.n,
                        t % self.n
                    )))
                }
            }
        }
        Ok(if exp == 0 { BigUint::one() } else { p.pow(exp as u32) })
    }

    /// `y ∈ I + N` with `N` obeying the bounds.
    pub fn admits(&self, y: &Matrix, p: Prime) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let mut e = y[(i, j)].clone();
                if i == j {
                    e -= Rational::one();
                }
                self.get(i, j).admits(&e, p)
            })
        })
    }

    /// An entry of `y` violating the bounds.
    pub fn first_violation(&self, y: &Matrix, p: Prime) -> Option<(usize, usize)> {
        (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).find(|&(i, j)| {
            let mut e = y[(i, j)].clone();
            if i == j {
                e -= Rational::one();
            }
            !self.get(i, j).admits(&e, p)
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(|b| *b == Bound::Zero)
    }
}

impl fmt::Display for ValuationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn conjugation_moves_entries() {
        let s = ValuationShape::congruence(2, 1).conjugated(&[1, -1], 1);
        assert_eq!(s.get(0, 1), Bound::AtLeast(3));
        assert_eq!(s.get(1, 0), Bound::AtLeast(-1));
        assert!(s.validate().is_ok());
    }

    #[test]
    fn displacement_of_congruence() {
        let v = ValuationShape::congruence(2, 1);
        let av = v.conjugated(&[1, -1], 1);
        let meet = v.intersect(&av);
        assert_eq!(meet.index_in(&av, p5()).unwrap(), BigUint::from(25u32));
    }

    #[test]
    fn validation_rejects_non_groups() {
        let bad = ValuationShape::new(2, vec![Bound::AtLeast(1), Bound::AtLeast(0), Bound::AtLeast(0), Bound::AtLeast(1)]);
        assert!(bad.is_err());
        let diag0 = ValuationShape::new(1, vec![Bound::AtLeast(0)]);
        assert!(diag0.is_err());
        assert!(ValuationShape::new(2, vec![Bound::Zero, Bound::Free, Bound::Zero, Bound::Zero]).is_ok());
    }

    #[test]
    fn infinite_index_detected() {
        let a = ValuationShape::from_fn(2, |i, j| if i < j { Bound::Free } else { Bound::Zero });
        let b = ValuationShape::from_fn(2, |i, j| if i < j { Bound::AtLeast(1) } else { Bound::Zero });
        assert_eq!(b.index_in(&a, p5()).unwrap_err().code(), "E_INFINITE_INDEX");
        assert_eq!(a.index_in(&a, p5()).unwrap(), BigUint::one());
    }
}
