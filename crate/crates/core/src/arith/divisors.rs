use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::rational::{valuation, Prime, Valuation};
use crate::error::{Error, Result};

/// Smith-form valuations `e_1 <= ... <= e_m` of an invertible rational matrix
/// over the integers localized at `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementaryDivisors {
    pub valuations: Vec<i64>,
}

impl ElementaryDivisors {
    pub fn sum(&self) -> i64 {
        self.valuations.iter().sum()
    }
}

/// Gaussian elimination that always pivots on an entry of minimal valuation
/// (ties: lowest row, then lowest column). Such a pivot divides every other
/// entry of the remaining block, so the row and column it sits in can be
/// cleared with p-integral multipliers.
pub fn elementary_divisor_valuations(a: &Matrix, p: Prime) -> Result<ElementaryDivisors> {
    let n = a.ensure_square()?;
    let mut m = a.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let Valuation::Finite(v) = valuation(&m[(i, j)], p) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, pi, pj) = best.ok_or(Error::Singular)?;
        m.swap_rows(k, pi);
        m.swap_cols(k, pj);
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = &m[(i, k)] / &pivot;
            for j in k..n {
                let t = &f * &m[(k, j)];
                m[(i, j)] -= t;
            }
        }
        for j in k + 1..n {
            m[(k, j)] = Zero::zero();
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(ElementaryDivisors { valuations: out })
}

/// Index of `AL ∩ L` in `AL`, `L` the standard lattice: the product of
/// `p^(-e)` over the negative elementary-divisor valuations `e`.
pub fn lattice_coindex(a: &Matrix, p: Prime) -> Result<BigUint> {
    let ed = elementary_divisor_valuations(a, p)?;
    let exp: i64 = ed.valuations.iter().filter(|&&e| e < 0).map(|e| -e).sum();
    Ok(if exp == 0 { BigUint::one() } else { p.pow(exp as u32) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::parse_rational;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn diagonal_divisors() {
        let a = Matrix::parse_grid("25,0,0;0,1,0;0,0,1/25").unwrap();
        assert_eq!(elementary_divisor_valuations(&a, p5()).unwrap().valuations, vec![-2, 0, 2]);
        assert_eq!(lattice_coindex(&a, p5()).unwrap(), BigUint::from(25u32));
    }

    #[test]
    fn identity_divisors() {
        let a = Matrix::identity(4);
        assert_eq!(elementary_divisor_valuations(&a, p5()).unwrap().valuations, vec![0; 4]);
        assert_eq!(lattice_coindex(&a, p5()).unwrap(), BigUint::one());
    }

    #[test]
    fn off_diagonal_unit_moves_to_pivot() {
        let a = Matrix::from_i64(&[&[5, 1], &[0, 5]]);
        assert_eq!(elementary_divisor_valuations(&a, p5()).unwrap().valuations, vec![0, 2]);
    }

    #[test]
    fn two_negative_divisors() {
        let a = Matrix::parse_grid("1/5,0;0,1/5").unwrap();
        assert_eq!(lattice_coindex(&a, p5()).unwrap(), BigUint::from(25u32));
    }

    #[test]
    fn singular_rejected() {
        let a = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(elementary_divisor_valuations(&a, p5()), Err(Error::Singular));
        let z = Matrix::from_rows(vec![vec![parse_rational("0").unwrap()]]).unwrap();
        assert_eq!(lattice_coindex(&z, p5()), Err(Error::Singular));
    }
}
