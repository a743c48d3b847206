use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{char_poly, newton_polygon, valuation, Matrix, Prime, Rational};
use crate::engine::{ScaleMethod, ScaleResult};
use crate::error::{Error, Result};

/// `g = C·D·C^-1` with `D` diagonal and `det C` a `p`-adic unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalForm {
    pub conj: Matrix,
    #[serde(skip)]
    conj_inv: Option<Matrix>,
    #[serde(with = "crate::arith::rational_vec_str")]
    pub diag: Vec<Rational>,
    pub valuations: Vec<i64>,
}

impl DiagonalForm {
    pub fn conj_inv(&self) -> &Matrix {
        self.conj_inv.as_ref().expect("set on construction")
    }
}

/// An invertible rational matrix regarded in `GL_n(Q_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixElement {
    pub entries: Matrix,
    pub p: Prime,
    pub diagonal_form: Option<DiagonalForm>,
}

impl MatrixElement {
    pub fn new(entries: Matrix, p: Prime) -> Result<Self> {
        entries.ensure_square()?;
        if entries.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(MatrixElement { entries, p, diagonal_form: None })
    }

    /// A diagonal matrix; its diagonal form is itself with `C = I`.
    pub fn from_diagonal(diag: &[Rational], p: Prime) -> Result<Self> {
        let n = diag.len();
        Self::with_diagonal_form(Matrix::diagonal(diag), Matrix::identity(n), diag.to_vec(), p)
    }

    /// Like [`MatrixElement::new`], synthesizing the diagonal form when
    /// `entries` is already diagonal.
    pub fn auto(entries: Matrix, p: Prime) -> Result<Self> {
        let n = entries.ensure_square()?;
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || entries[(i, j)].is_zero()));
        if is_diag {
            let d: Vec<Rational> = (0..n).map(|i| entries[(i, i)].clone()).collect();
            Self::from_diagonal(&d, p)
        } else {
            Self::new(entries, p)
        }
    }

    /// Validates `entries = C·diag(d)·C^-1` exactly.
    pub fn with_diagonal_form(entries: Matrix, conj: Matrix, diag: Vec<Rational>, p: Prime) -> Result<Self> {
        let n = entries.ensure_square()?;
        if conj.rows() != n || conj.cols() != n || diag.len() != n {
            return Err(Error::Dimension(format!("diagonal form does not match a {n}x{n} matrix")));
        }
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::Singular);
        }
        let det_c = conj.det()?;
        if det_c.is_zero() || valuation(&det_c, p).finite() != Some(0) {
            return Err(Error::InvalidInput("the conjugator must have p-unit determinant".into()));
        }
        let conj_inv = conj.inverse()?;
        let rebuilt = &(&conj * &Matrix::diagonal(&diag)) * &conj_inv;
        if rebuilt != entries {
            return Err(Error::InvalidInput("C·D·C^-1 does not reproduce the matrix".into()));
        }
        let valuations = diag.iter().map(|d| valuation(d, p).finite().expect("nonzero")).collect();
        Ok(MatrixElement {
            entries,
            p,
            diagonal_form: Some(DiagonalForm { conj, conj_inv: Some(conj_inv), diag, valuations }),
        })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn is_special(&self) -> bool {
        self.entries.det().is_ok_and(|d| d.is_one())
    }

    pub fn diagonal(&self) -> Result<&DiagonalForm> {
        self.diagonal_form.as_ref().ok_or(Error::MissingDiagonalForm)
    }

    pub fn inverse(&self) -> Result<Self> {
        let entries = self.entries.inverse()?;
        let diagonal_form = self.diagonal_form.as_ref().map(|f| DiagonalForm {
            conj: f.conj.clone(),
            conj_inv: f.conj_inv.clone(),
            diag: f.diag.iter().map(|d| d.recip()).collect(),
            valuations: f.valuations.iter().map(|v| -v).collect(),
        });
        Ok(MatrixElement { entries, p: self.p, diagonal_form })
    }

    /// `g^k`, keeping the diagonal form.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let entries = self.entries.pow(k)?;
        let diagonal_form = self.diagonal_form.as_ref().map(|f| DiagonalForm {
            conj: f.conj.clone(),
            conj_inv: f.conj_inv.clone(),
            diag: f.diag.iter().map(|d| d.pow(k as i32)).collect(),
            valuations: f.valuations.iter().map(|v| v * k).collect(),
        });
        Ok(MatrixElement { entries, p: self.p, diagonal_form })
    }

    /// `C g C^-1` for a `p`-unit-determinant `C`, carrying the diagonal form.
    pub fn conjugate_by(&self, c: &Matrix) -> Result<Self> {
        let ci = c.inverse()?;
        let entries = &(c * &self.entries) * &ci;
        match &self.diagonal_form {
            Some(f) => Self::with_diagonal_form(entries, c * &f.conj, f.diag.clone(), self.p),
            None => Self::new(entries, self.p),
        }
    }
}

/// Matrix of `X ↦ gXg^-1` on `n x n` matrices, in the basis of matrix
/// units `E_ij` ordered row-major.
pub fn adjoint_matrix(g: &Matrix) -> Result<Matrix> {
    g.ensure_square()?;
    let gi = g.inverse()?;
    Ok(g.kron(&gi.transpose()))
}

/// `s(g)` as the product of `|λ|_p` over the eigenvalues `λ` of `Ad(g)`
/// with `|λ|_p > 1`, read off the Newton polygon of its characteristic
/// polynomial.
pub fn scale_via_newton(g: &Matrix, p: Prime) -> Result<BigUint> {
    let cp = char_poly(&adjoint_matrix(g)?)?;
    let np = newton_polygon(&cp, p)?;
    let mut exp = num_rational::Rational64::zero();
    for s in &np.segments {
        if s.slope.is_positive() {
            exp += s.slope * num_rational::Rational64::from(s.multiplicity as i64);
        }
    }
    // a full segment sums the valuations of a Galois-stable set of roots
    debug_assert!(exp.is_integer());
    Ok(p.pow(exp.to_integer() as u32))
}

/// The scale from a diagonal form: `∏ p^(v_j - v_i)` over pairs with
/// `v_i < v_j`.
pub fn scale_from_valuations(v: &[i64], p: Prime) -> BigUint {
    let exp: i64 = v.iter().flat_map(|a| v.iter().map(move |b| (b - a).max(0))).sum();
    p.pow(exp as u32)
}

pub fn newton_scale_result(g: &Matrix, p: Prime) -> Result<ScaleResult> {
    ScaleResult::agreeing(ScaleMethod::ClosedForm, vec![(ScaleMethod::ClosedForm, scale_via_newton(g, p)?)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn adjoint_of_identity() {
        assert!(adjoint_matrix(&Matrix::identity(3)).unwrap().is_identity());
    }

    #[test]
    fn adjoint_of_diagonal() {
        let ad = adjoint_matrix(&Matrix::diagonal(&[q("5"), q("1/5")])).unwrap();
        let d: Vec<Rational> = (0..4).map(|i| ad[(i, i)].clone()).collect();
        assert_eq!(d, vec![q("1"), q("25"), q("1/25"), q("1")]);
    }

    #[test]
    fn newton_scales() {
        assert_eq!(scale_via_newton(&Matrix::diagonal(&[q("5"), q("1/5")]), p5()).unwrap(), BigUint::from(25u32));
        let g = Matrix::diagonal(&[q("25"), q("5"), q("1/125")]);
        assert_eq!(scale_via_newton(&g, p5()).unwrap(), BigUint::from(5u32).pow(10));
        assert_eq!(scale_via_newton(&Matrix::from_i64(&[&[1, 1], &[0, 1]]), p5()).unwrap(), BigUint::one());
        assert_eq!(scale_from_valuations(&[2, 1, -3], p5()), BigUint::from(5u32).pow(10));
    }

    #[test]
    fn diagonal_form_validation() {
        let c = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let d = vec![q("5"), q("1/5")];
        let g = &(&c * &Matrix::diagonal(&d)) * &c.inverse().unwrap();
        let e = MatrixElement::with_diagonal_form(g.clone(), c.clone(), d.clone(), p5()).unwrap();
        assert_eq!(e.diagonal().unwrap().valuations, vec![1, -1]);
        assert!(e.is_special());
        let wrong = MatrixElement::with_diagonal_form(g, c, vec![q("1/5"), q("5")], p5());
        assert!(wrong.is_err());
        let bad_c = Matrix::from_i64(&[&[5, 0], &[0, 1]]);
        assert!(MatrixElement::with_diagonal_form(Matrix::diagonal(&d), bad_c, d, p5()).is_err());
    }

    #[test]
    fn inverse_and_power_keep_form() {
        let e = MatrixElement::from_diagonal(&[q("5"), q("1/5")], p5()).unwrap();
        assert_eq!(e.inverse().unwrap().diagonal().unwrap().valuations, vec![-1, 1]);
        let cube = e.pow(3).unwrap();
        assert_eq!(cube.diagonal().unwrap().valuations, vec![3, -3]);
        assert_eq!(cube.entries, Matrix::diagonal(&[q("125"), q("1/125")]));
    }
}
