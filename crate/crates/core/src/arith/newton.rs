use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::RationalPolynomial;
use super::rational::{valuation, Prime};
use crate::error::{Error, Result};

/// One edge of a Newton polygon: `multiplicity` roots of valuation `-slope`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "ratio_str")]
    pub slope: Rational64,
    pub multiplicity: usize,
}

/// Lower convex hull of the points `(i, v_p(a_i))`.
///
/// Slopes are strictly increasing. A segment of slope `s` and horizontal
/// length `m` accounts for `m` roots of valuation `-s` over an algebraic
/// closure; the `zero_roots` roots at `x = 0` (the order of `x` dividing the
/// polynomial) are not represented by segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Multiset of nonzero-root valuations as `(valuation, multiplicity)`,
    /// in decreasing valuation order.
    pub fn root_valuations(&self) -> Vec<(Rational64, usize)> {
        self.segments.iter().map(|s| (-s.slope, s.multiplicity)).collect()
    }

    pub fn degree_covered(&self) -> usize {
        self.segments.iter().map(|s| s.multiplicity).sum::<usize>() + self.zero_roots
    }
}

pub fn newton_polygon(f: &RationalPolynomial, p: Prime) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let points: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, valuation(c, p).finite().expect("nonzero coefficient")))
        .collect();
    let zero_roots = points[0].0 as usize;

    // Monotone-chain lower hull; points are already sorted by abscissa.
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a -> pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let segments = hull
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            Segment { slope: Rational64::new(dy, dx), multiplicity: dx as usize }
        })
        .collect();
    Ok(NewtonPolygon { segments, zero_roots })
}

mod ratio_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{parse_rational, Rational};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn eisenstein_slope_sign() {
        // x^2 - 5: both roots have valuation 1/2, so the slope is -1/2.
        let f = RationalPolynomial::from_i64(&[-5, 0, 1]);
        let np = newton_polygon(&f, p(5)).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: Rational64::new(-1, 2), multiplicity: 2 }]);
        assert_eq!(np.root_valuations(), vec![(Rational64::new(1, 2), 2)]);
    }

    #[test]
    fn split_valuations() {
        let f = RationalPolynomial::new(vec![q("1"), -(q("25") + q("1/25")), q("1")]);
        let np = newton_polygon(&f, p(5)).unwrap();
        assert_eq!(
            np.segments,
            vec![
                Segment { slope: Rational64::from(-2), multiplicity: 1 },
                Segment { slope: Rational64::from(2), multiplicity: 1 },
            ]
        );
    }

    #[test]
    fn unipotent_flat() {
        let f = RationalPolynomial::from_roots(&[q("1"), q("1"), q("1"), q("1")]);
        let np = newton_polygon(&f, p(3)).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: Rational64::zero(), multiplicity: 4 }]);
    }

    #[test]
    fn zero_roots_counted() {
        let f = RationalPolynomial::from_i64(&[0, 0, 1]);
        let np = newton_polygon(&f, p(2)).unwrap();
        assert!(np.segments.is_empty());
        assert_eq!(np.zero_roots, 2);
        assert_eq!(np.degree_covered(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(newton_polygon(&RationalPolynomial::zero(), p(2)), Err(Error::ZeroPolynomial));
    }
}
