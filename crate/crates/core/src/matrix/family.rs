use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::element::{adjoint_matrix, scale_via_newton, MatrixElement};
use super::shape::{Bound, ValuationShape};
use crate::arith::{format_rational, lattice_coindex, p_power, valuation, Matrix, Prime, Rational};
use crate::engine::{
    displacement_index, Capabilities, GroupFamily, MembershipVerdict, ScaleMethod, T1Certificate, T2Certificate,
    Target,
};
use crate::error::{Error, Result};

/// Elements sampled per T1 certificate, besides the single-entry ones.
const T1_SAMPLES: usize = 24;

/// Indices grouped by equal valuation, in decreasing valuation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    pub blocks: Vec<Vec<usize>>,
    pub valuations: Vec<i64>,
}

/// `GL_n(Q_p)` with `α` = conjugation by `g`, for `g` with a rational
/// diagonal form. Subgroups are valuation shapes in the eigenbasis of `g`.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    g: MatrixElement,
    g_inv: Matrix,
    v: Vec<i64>,
    conj: Matrix,
    conj_inv: Matrix,
    special: bool,
}

impl MatrixFamily {
    pub fn new(g: MatrixElement) -> Result<Self> {
        let form = g.diagonal()?.clone();
        Ok(MatrixFamily {
            g_inv: g.entries.inverse()?,
            v: form.valuations.clone(),
            conj: form.conj.clone(),
            conj_inv: form.conj_inv().clone(),
            g,
            special: false,
        })
    }

    /// As [`MatrixFamily::new`], for `g` in `SL_n`.
    pub fn new_special(g: MatrixElement) -> Result<Self> {
        if !g.is_special() {
            return Err(Error::InvalidInput("the matrix does not have determinant 1".into()));
        }
        let mut fam = Self::new(g)?;
        fam.special = true;
        Ok(fam)
    }

    pub fn diagonal(diag: &[Rational], p: Prime) -> Result<Self> {
        Self::new(MatrixElement::from_diagonal(diag, p)?)
    }

    pub fn element(&self) -> &MatrixElement {
        &self.g
    }

    pub fn p(&self) -> Prime {
        self.g.p
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn valuations(&self) -> &[i64] {
        &self.v
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    pub fn to_eigen(&self, x: &Matrix) -> Matrix {
        &(&self.conj_inv * x) * &self.conj
    }

    pub fn from_eigen(&self, y: &Matrix) -> Matrix {
        &(&self.conj * y) * &self.conj_inv
    }

    pub fn block_structure(&self) -> BlockStructure {
        let mut vals: Vec<i64> = self.v.clone();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        vals.dedup();
        let blocks = vals.iter().map(|&val| (0..self.n()).filter(|&i| self.v[i] == val).collect()).collect();
        BlockStructure { blocks, valuations: vals }
    }

    /// The power `α^k` as a family.
    pub fn power(&self, k: i64) -> Result<Self> {
        let mut fam = Self::new(self.g.pow(k)?)?;
        fam.special = self.special;
        Ok(fam)
    }

    /// Level-`k` congruence subgroup `I + p^k M_n(Z_p)`.
    pub fn congruence(&self, k: i64) -> ValuationShape {
        ValuationShape::congruence(self.n(), k)
    }

    /// The closure of `U_α`: entries with `v_i > v_j` free, all else fixed.
    pub fn contraction_closure(&self) -> ValuationShape {
        let v = &self.v;
        ValuationShape::from_fn(self.n(), |i, j| if v[i] > v[j] { Bound::Free } else { Bound::Zero })
    }

    /// `U_α ∩ (I + p^k M_n(Z_p))`, compact open in the contraction closure.
    pub fn contraction_level(&self, k: i64) -> ValuationShape {
        let v = &self.v;
        ValuationShape::from_fn(self.n(), |i, j| if v[i] > v[j] { Bound::AtLeast(k) } else { Bound::Zero })
    }

    /// `P_α ∩ (I + p^k M_n(Z_p))`.
    pub fn parabolic_level(&self, k: i64) -> ValuationShape {
        let v = &self.v;
        self.congruence(k).map(|i, j, b| if v[i] < v[j] { Bound::Zero } else { b })
    }

    /// Displacement index of the level-`k` congruence subgroup, which is
    /// tidy for every `k >= 1`.
    pub fn scale_via_index_oracle(&self, k: i64) -> Result<BigUint> {
        if k < 1 {
            return Err(Error::InvalidInput("congruence level must be at least 1".into()));
        }
        displacement_index(self, &self.congruence(k))
    }

    /// `|AL : AL ∩ L|` for `A = Ad(D)` and `L` the standard lattice.
    pub fn lattice_coindex_of_adjoint(&self) -> Result<BigUint> {
        let form = self.g.diagonal()?;
        lattice_coindex(&adjoint_matrix(&Matrix::diagonal(&form.diag))?, self.p())
    }

    pub fn membership_predicates(&self, x: &Matrix, target: Target) -> MembershipVerdict {
        self.closed_form_membership(x, target).expect("matrix family has closed forms")
    }

    /// `x = m·u` with `m ∈ M_α` block diagonal and `u ∈ U_α`.
    pub fn levi_factorization(&self, x: &Matrix) -> Result<(Matrix, Matrix)> {
        let y = self.to_eigen(x);
        let v = &self.v;
        let n = self.n();
        if let Some((i, j)) = pairs(n).find(|&(i, j)| v[i] < v[j] && !y[(i, j)].is_zero()) {
            return Err(Error::InvalidInput(format!("not in the parabolic subgroup: entry ({i},{j}) is nonzero")));
        }
        let mut m = Matrix::zeros(n, n);
        for (i, j) in pairs(n).filter(|&(i, j)| v[i] == v[j]) {
            m[(i, j)] = y[(i, j)].clone();
        }
        let u = &m.inverse()? * &y;
        Ok((self.from_eigen(&m), self.from_eigen(&u)))
    }

    /// Deterministic samples of `V`, in eigen coordinates: one element per
    /// finite entry at its bound, then random ones.
    fn samples(&self, v: &ValuationShape) -> Vec<Matrix> {
        let n = self.n();
        let p = self.p();
        let mut out = Vec::new();
        for (i, j) in pairs(n) {
            if let Bound::AtLeast(b) = v.get(i, j) {
                let mut y = Matrix::identity(n);
                y[(i, j)] += p_power(p, b);
                out.push(y);
            }
        }
        let seed = v.entries().iter().fold(0xC0FFEEu64, |h, b| {
            h.rotate_left(7) ^ match b {
                Bound::Free => 1,
                Bound::Zero => 2,
                Bound::AtLeast(a) => 3 + (*a as u64).wrapping_mul(0x9E37),
            }
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..T1_SAMPLES {
            out.push(self.random_in_shape_eigen(&mut rng, v));
        }
        out
    }

    /// A random element of the shape, in eigen coordinates.
    pub fn random_in_shape_eigen(&self, rng: &mut impl Rng, v: &ValuationShape) -> Matrix {
        let n = self.n();
        let p = self.p();
        let mut y = Matrix::identity(n);
        for (i, j) in pairs(n) {
            let base = match v.get(i, j) {
                Bound::Zero => continue,
                Bound::Free => -3,
                Bound::AtLeast(b) => b,
            };
            let r: i64 = rng.gen_range(-(p.get() as i64).pow(2)..=(p.get() as i64).pow(2));
            let extra = rng.gen_range(0..3);
            y[(i, j)] += p_power(p, base + extra) * Rational::from_integer(BigInt::from(r));
        }
        y
    }

    pub fn random_in_shape(&self, rng: &mut impl Rng, v: &ValuationShape) -> Matrix {
        self.from_eigen(&self.random_in_shape_eigen(rng, v))
    }

    /// `y = L·U` in eigen coordinates with `L ∈ V+`-pattern (entries with
    /// `v_i > v_j` zero) and `U ∈ V-`-pattern, unipotent.
    fn split(&self, y: &Matrix) -> Option<(Matrix, Matrix)> {
        let n = self.n();
        // decreasing valuation order makes the V+ pattern lower triangular
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.v[b].cmp(&self.v[a]));
        let a = |i: usize, j: usize| y[(order[i], order[j])].clone();
        let mut l = Matrix::zeros(n, n);
        let mut u = Matrix::identity(n);
        for j in 0..n {
            for i in j..n {
                let mut s = a(i, j);
                for k in 0..j {
                    s -= &l[(i, k)] * &u[(k, j)];
                }
                l[(i, j)] = s;
            }
            if l[(j, j)].is_zero() {
                return None;
            }
            for k in j + 1..n {
                let mut s = a(j, k);
                for t in 0..j {
                    s -= &l[(j, t)] * &u[(t, k)];
                }
                u[(j, k)] = s / &l[(j, j)];
            }
        }
        let mut lo = Matrix::zeros(n, n);
        let mut uo = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                lo[(order[i], order[j])] = l[(i, j)].clone();
                uo[(order[i], order[j])] = u[(i, j)].clone();
            }
        }
        Some((lo, uo))
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

fn render_matrix(m: &Matrix) -> String {
    let rows: Vec<String> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| format_rational(&m[(i, j)])).collect::<Vec<_>>().join(",")).collect();
    rows.join(";")
}

impl GroupFamily for MatrixFamily {
    type Element = Matrix;
    type Subgroup = ValuationShape;

    fn name(&self) -> String {
        let d = self.g.diagonal().expect("family has a diagonal form");
        let diag: Vec<String> = d.diag.iter().map(format_rational).collect();
        format!("{}L{}(Q{}) conj by C·diag({})·C^-1", if self.special { "S" } else { "G" }, self.n(), self.p().get(), diag.join(","))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { supports_full_algorithm: false, t1_implies_t2: true, metrizable: true }
    }

    fn inverse(&self) -> Self {
        let mut fam = Self::new(self.g.inverse().expect("invertible")).expect("diagonal form is kept");
        fam.special = self.special;
        fam
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(self.n())
    }

    fn multiply(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a * b
    }

    fn invert(&self, a: &Matrix) -> Matrix {
        a.inverse().expect("group elements are invertible")
    }

    fn is_identity(&self, x: &Matrix) -> bool {
        x.is_identity()
    }

    fn apply(&self, x: &Matrix, k: i64) -> Matrix {
        match k {
            0 => x.clone(),
            1 => &(&self.g.entries * x) * &self.g_inv,
            -1 => &(&self.g_inv * x) * &self.g.entries,
            _ => {
                let gk = self.g.entries.pow(k).expect("invertible");
                let gik = self.g.entries.pow(-k).expect("invertible");
                &(&gk * x) * &gik
            }
        }
    }

    fn render(&self, x: &Matrix) -> String {
        render_matrix(x)
    }

    fn image(&self, v: &ValuationShape, k: i64) -> ValuationShape {
        v.conjugated(&self.v, k)
    }

    fn intersect(&self, a: &ValuationShape, b: &ValuationShape) -> ValuationShape {
        a.intersect(b)
    }

    fn is_subgroup_of(&self, inner: &ValuationShape, outer: &ValuationShape) -> bool {
        inner.is_subshape_of(outer)
    }

    fn index(&self, outer: &ValuationShape, inner: &ValuationShape) -> Result<BigUint> {
        inner.index_in(outer, self.p())
    }

    fn contains(&self, v: &ValuationShape, x: &Matrix) -> bool {
        v.admits(&self.to_eigen(x), self.p())
    }

    fn is_compact_open_in(&self, w: &ValuationShape, h: &ValuationShape) -> bool {
        w.is_subshape_of(h)
            && w.entries().iter().zip(h.entries()).all(|(a, b)| match (a, b) {
                (Bound::Zero, Bound::Zero) => true,
                (Bound::AtLeast(_), Bound::AtLeast(_) | Bound::Free) => true,
                _ => false,
            })
    }

    fn plus_part(&self, v: &ValuationShape) -> ValuationShape {
        let val = &self.v;
        v.map(|i, j, b| if val[i] > val[j] && b != Bound::Free { Bound::Zero } else { b })
    }

    fn minus_part(&self, v: &ValuationShape) -> ValuationShape {
        let val = &self.v;
        v.map(|i, j, b| if val[i] < val[j] && b != Bound::Free { Bound::Zero } else { b })
    }

    /// Exact factorizations `y = l·u` of sampled elements, `l ∈ V+`,
    /// `u ∈ V-`.
    fn check_t1(&self, v: &ValuationShape) -> T1Certificate {
        let plus = self.plus_part(v);
        let minus = self.minus_part(v);
        let p = self.p();
        let samples = self.samples(v);
        let mut witnesses = Vec::new();
        for (k, y) in samples.iter().enumerate() {
            let Some((l, u)) = self.split(y) else {
                return T1Certificate::fail(k + 1, format!("sample {} has no triangular factorization", render_matrix(y)));
            };
            debug_assert_eq!(&(&l * &u), y);
            if let Some((i, j)) = plus.first_violation(&l, p) {
                return T1Certificate::fail(k + 1, format!("V+ factor of sample {k} violates entry ({i},{j})"));
            }
            if let Some((i, j)) = minus.first_violation(&u, p) {
                return T1Certificate::fail(k + 1, format!("V- factor of sample {k} violates entry ({i},{j})"));
            }
            if witnesses.len() < 3 {
                witnesses.push(format!(
                    "{} = ({})·({})",
                    render_matrix(&self.from_eigen(y)),
                    render_matrix(&self.from_eigen(&l)),
                    render_matrix(&self.from_eigen(&u))
                ));
            }
        }
        T1Certificate::pass(samples.len(), witnesses)
    }

    /// `V++` is the union of the shapes `α^m(V+)`, whose entries either stay
    /// fixed or decrease without bound. A matrix has finitely many entries,
    /// so the union equals the limit shape, which is closed; likewise `V--`.
    fn check_t2(&self, v: &ValuationShape) -> T2Certificate {
        let val = &self.v;
        let pp = self.plus_part(v).map(|i, j, b| if val[i] < val[j] && b.is_finite() { Bound::Free } else { b });
        let mm = self.minus_part(v).map(|i, j, b| if val[i] > val[j] && b.is_finite() { Bound::Free } else { b });
        T2Certificate {
            v_plus_plus_closed: true,
            v_minus_minus_closed: true,
            evidence: format!("V++ = {pp} and V-- = {mm} as limit shapes, both closed"),
        }
    }

    fn filtration(&self, level: u32) -> ValuationShape {
        self.congruence(level.max(1) as i64)
    }

    /// With `y = C^-1 x C`, `α^k` multiplies `y_ij` by `(d_i/d_j)^k`, whose
    /// valuation is `k (v_i - v_j)`.
    fn closed_form_membership(&self, x: &Matrix, target: Target) -> Option<MembershipVerdict> {
        let y = self.to_eigen(x);
        let v = &self.v;
        let p = self.p();
        let n = self.n();
        let off = |i: usize, j: usize| -> Rational {
            if i == j {
                &y[(i, j)] - Rational::one()
            } else {
                y[(i, j)].clone()
            }
        };
        let escaping = pairs(n).find(|&(i, j)| v[i] < v[j] && !y[(i, j)].is_zero());
        let escape_witness = |i: usize, j: usize| {
            format!(
                "entry ({i},{j}) of C^-1·α^k(x)·C has valuation {} - {}k, unbounded",
                valuation(&y[(i, j)], p).finite().unwrap_or(0),
                v[j] - v[i]
            )
        };
        let stuck = pairs(n).find(|&(i, j)| v[i] <= v[j] && !off(i, j).is_zero());
        let verdict = match target {
            Target::P => match escaping {
                Some((i, j)) => MembershipVerdict::no(0, escape_witness(i, j)),
                None => MembershipVerdict::yes(0),
            },
            Target::M => match pairs(n).find(|&(i, j)| v[i] != v[j] && !y[(i, j)].is_zero()) {
                Some((i, j)) if v[i] < v[j] => MembershipVerdict::no(0, escape_witness(i, j)),
                Some((i, j)) => MembershipVerdict::no(
                    0,
                    format!("entry ({i},{j}) of C^-1·α^-k(x)·C has valuation decreasing by {} per step", v[i] - v[j]),
                ),
                None => MembershipVerdict::yes(0),
            },
            Target::U => match (escaping, stuck) {
                (Some((i, j)), _) => MembershipVerdict::no(0, escape_witness(i, j)),
                (None, Some((i, j))) => MembershipVerdict::no(
                    0,
                    format!("entry ({i},{j}) of C^-1·α^k(x)·C keeps valuation {}, so α^k(x) stays away from I",
                        valuation(&off(i, j), p).finite().unwrap_or(0)),
                ),
                (None, None) => MembershipVerdict::yes(0),
            },
            // U ∩ M = {I}, already closed
            Target::U0 => match pairs(n).find(|&(i, j)| !off(i, j).is_zero()) {
                Some((i, j)) => MembershipVerdict::no(0, format!("entry ({i},{j}) differs from the identity")),
                None => MembershipVerdict::yes(0),
            },
        };
        Some(verdict)
    }

    fn closed_form_scale(&self) -> Option<BigUint> {
        scale_via_newton(&self.g.entries, self.p()).ok()
    }

    fn extra_scale_checks(&self) -> Result<Vec<(ScaleMethod, BigUint)>> {
        Ok(vec![(ScaleMethod::LatticeCoindex, self.lattice_coindex_of_adjoint()?)])
    }
}
