use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{p_power, Matrix, Rational};
use crate::engine::{certify, GroupFamily};
use crate::error::{Error, Result};
use crate::matrix::MatrixFamily;
use crate::shift::{Elem, FiniteGroup, ProductSubgroup, ShiftElement, ShiftFamily};

/// What the coset tree needs from a family and a tidy subgroup `V`.
///
/// A vertex `yα^m V_-` is stored as the level `m` and a canonical
/// representative of the coset `y·α^m(V_-)` of `V_--`.
pub trait CosetModel: Send + Sync {
    type Rep: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn describe(&self) -> String;
    fn identity(&self) -> Self::Rep;
    fn multiply(&self, a: &Self::Rep, b: &Self::Rep) -> Self::Rep;
    /// `α^k(x)`.
    fn apply(&self, x: &Self::Rep, k: i64) -> Self::Rep;
    /// Canonical representative of `y·α^m(V_-)`; errors if `y ∉ V_--`.
    fn canonical(&self, m: i64, y: &Self::Rep) -> Result<Self::Rep>;
    /// Representatives of `α^m(V_-) / α^(m+1)(V_-)`.
    fn child_offsets(&self, m: i64) -> Result<Vec<Self::Rep>>;
    /// `|V_- : α(V_-)| = s(α^-1)`.
    fn scale_inverse(&self) -> Result<BigUint>;
    /// Stable text form of a representative.
    fn key(&self, x: &Self::Rep) -> String;
    fn in_vminus(&self, x: &Self::Rep) -> bool;
    fn sample_vminus_minus(&self, rng: &mut ChaCha8Rng) -> Self::Rep;
}

fn require_tidy<F: GroupFamily>(fam: &F, v: &F::Subgroup) -> Result<()> {
    let cert = certify(fam, v);
    if !cert.tidy {
        return Err(Error::NotTidy(format!("{} does not certify as tidy", fam.name())));
    }
    Ok(())
}

/// The shift family with a tidy product subgroup.
#[derive(Debug, Clone)]
pub struct ShiftCosetModel {
    fam: ShiftFamily,
    v: ProductSubgroup,
    v_minus: ProductSubgroup,
    radius: i64,
}

impl ShiftCosetModel {
    pub fn new(fam: ShiftFamily, v: ProductSubgroup) -> Result<Self> {
        require_tidy(&fam, &v)?;
        let v_minus = fam.minus_part(&v);
        Ok(ShiftCosetModel { fam, v, v_minus, radius: 4 })
    }

    /// The model for `O^Z`, the only tidy subgroup.
    pub fn standard(fam: ShiftFamily) -> Result<Self> {
        let v = fam.all_o();
        Self::new(fam, v)
    }

    pub fn family(&self) -> &ShiftFamily {
        &self.fam
    }

    pub fn subgroup(&self) -> &ProductSubgroup {
        &self.v
    }
}

impl CosetModel for ShiftCosetModel {
    type Rep = ShiftElement;

    fn describe(&self) -> String {
        format!("{} with V = {}", self.fam.name(), self.v.render(self.fam.group()))
    }

    fn identity(&self) -> ShiftElement {
        ShiftElement::identity()
    }

    fn multiply(&self, a: &ShiftElement, b: &ShiftElement) -> ShiftElement {
        a.multiply(b, self.fam.group())
    }

    fn apply(&self, x: &ShiftElement, k: i64) -> ShiftElement {
        self.fam.apply(x, k)
    }

    /// Coordinatewise, the least element of `y_i W_i` with the identity first.
    fn canonical(&self, m: i64, y: &ShiftElement) -> Result<ShiftElement> {
        if !self.fam.in_v_minus_minus(&self.v, y) {
            return Err(Error::NotContained(format!("{} is not in V--", y.render(self.fam.group()))));
        }
        let g = self.fam.group();
        let w = self.fam.image(&self.v_minus, m);
        let e = g.identity();
        let coords = y.support().map(|(i, a)| {
            let best = w.get(i).iter().map(|h| g.mul(a, h)).min_by_key(|&c| (c != e, c)).expect("subgroups are nonempty");
            (i, best)
        });
        Ok(ShiftElement::from_coords(g, coords.collect::<Vec<_>>()))
    }

    fn child_offsets(&self, m: i64) -> Result<Vec<ShiftElement>> {
        let g = self.fam.group();
        let outer = self.fam.image(&self.v_minus, m);
        let inner = self.fam.image(&self.v_minus, m + 1);
        self.fam.index(&outer, &inner)?;
        let (lo, hi) = ProductSubgroup::span(&[&outer, &inner]);
        let mut out = vec![ShiftElement::identity()];
        for i in lo..=hi {
            let (a, b) = (outer.get(i), inner.get(i));
            if a == b {
                continue;
            }
            // left coset representatives of b in a, least element first
            let mut reps: Vec<Elem> = Vec::new();
            let mut covered: Vec<Elem> = Vec::new();
            let mut elems: Vec<Elem> = a.iter().collect();
            elems.sort_by_key(|&c| (c != g.identity(), c));
            for x in elems {
                if !covered.contains(&x) {
                    reps.push(x);
                    covered.extend(b.iter().map(|h| g.mul(x, h)));
                }
            }
            out = out
                .iter()
                .flat_map(|base| reps.iter().map(move |&r| (base.clone(), r)))
                .map(|(base, r)| base.multiply(&ShiftElement::from_coords(g, [(i, r)]), g))
                .collect();
        }
        Ok(out)
    }

    fn scale_inverse(&self) -> Result<BigUint> {
        self.fam.index(&self.v_minus, &self.fam.image(&self.v_minus, 1))
    }

    fn key(&self, x: &ShiftElement) -> String {
        x.render(self.fam.group())
    }

    fn in_vminus(&self, x: &ShiftElement) -> bool {
        self.fam.contains(&self.v_minus, x)
    }

    fn sample_vminus_minus(&self, rng: &mut ChaCha8Rng) -> ShiftElement {
        self.fam.random_element(rng, self.radius, true)
    }
}

/// The matrix family with the level-`k` congruence subgroup; representatives
/// are in eigen coordinates.
#[derive(Debug, Clone)]
pub struct MatrixCosetModel {
    fam: MatrixFamily,
    level: i64,
    diag_powers: Vec<Rational>,
}

impl MatrixCosetModel {
    pub fn new(fam: MatrixFamily, level: i64) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidInput("congruence level must be at least 1".into()));
        }
        require_tidy(&fam, &fam.congruence(level))?;
        let diag_powers = fam.element().diagonal()?.diag.clone();
        Ok(MatrixCosetModel { fam, level, diag_powers })
    }

    pub fn family(&self) -> &MatrixFamily {
        &self.fam
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// `I + c E_ij` over contracted entries with `v(c) >= level`, times a
    /// block-diagonal element of `V_0`: a random element of `V_-`.
    pub fn sample_vminus(&self, rng: &mut ChaCha8Rng) -> Matrix {
        let u = self.random_unipotent(rng, self.level);
        let b = self.random_levi(rng);
        &u * &b
    }

    fn random_unipotent(&self, rng: &mut ChaCha8Rng, min_val: i64) -> Matrix {
        let p = self.fam.p();
        let mut u = Matrix::identity(self.fam.n());
        for (i, j) in self.fam.contracting_entries() {
            let r: i64 = rng.gen_range(-(p.get() as i64) * 3..=(p.get() as i64) * 3);
            u[(i, j)] = p_power(p, min_val + rng.gen_range(0..3)) * Rational::from_integer(BigInt::from(r));
        }
        u
    }

    fn random_levi(&self, rng: &mut ChaCha8Rng) -> Matrix {
        let v = self.fam.valuations();
        let n = self.fam.n();
        let p = self.fam.p();
        let mut b = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if v[i] == v[j] && rng.gen_bool(0.5) {
                    let r: i64 = rng.gen_range(-4..=4);
                    b[(i, j)] += p_power(p, self.level) * Rational::from_integer(BigInt::from(r));
                }
            }
        }
        b
    }
}

impl CosetModel for MatrixCosetModel {
    type Rep = Matrix;

    fn describe(&self) -> String {
        format!("{} with V = I + p^{} M_n(Z_p)", self.fam.name(), self.level)
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(self.fam.n())
    }

    fn multiply(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a * b
    }

    fn apply(&self, x: &Matrix, k: i64) -> Matrix {
        let n = self.fam.n();
        let mut y = x.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j && !y[(i, j)].is_zero() {
                    let f = (&self.diag_powers[i] / &self.diag_powers[j]).pow(k as i32);
                    y[(i, j)] = &y[(i, j)] * f;
                }
            }
        }
        y
    }

    fn canonical(&self, m: i64, y: &Matrix) -> Result<Matrix> {
        self.fam.canonical_coset(y, m, self.level)
    }

    fn child_offsets(&self, m: i64) -> Result<Vec<Matrix>> {
        let s = self.scale_inverse()?.to_u64().unwrap_or(u64::MAX);
        self.fam.coset_window_reps(self.level, m, 1, s)
    }

    fn scale_inverse(&self) -> Result<BigUint> {
        let v = self.fam.vminus_shape(self.level);
        self.fam.index(&v, &self.fam.image(&v, 1))
    }

    fn key(&self, x: &Matrix) -> String {
        x.to_grid()
    }

    fn in_vminus(&self, x: &Matrix) -> bool {
        self.fam.vminus_shape(self.level).admits(x, self.fam.p())
    }

    /// Unipotent part with arbitrary contracted entries times a `V_0` part.
    fn sample_vminus_minus(&self, rng: &mut ChaCha8Rng) -> Matrix {
        let u = self.random_unipotent(rng, self.level - 3);
        &u * &self.random_levi(rng)
    }
}

/// `K × G` with `α` trivial on the finite group `K`, and `V` replaced by
/// `K × V`. `K` lies in every `V_-`-coset stabiliser, so it acts trivially.
#[derive(Debug, Clone)]
pub struct InertFactor<M> {
    pub inner: M,
    pub k: Arc<FiniteGroup>,
}

impl<M: CosetModel> InertFactor<M> {
    pub fn new(inner: M, k: FiniteGroup) -> Self {
        InertFactor { inner, k: Arc::new(k) }
    }

    pub fn embed_k(&self, a: Elem) -> (Elem, M::Rep) {
        (a, self.inner.identity())
    }
}

impl<M: CosetModel> CosetModel for InertFactor<M> {
    type Rep = (Elem, M::Rep);

    fn describe(&self) -> String {
        format!("{} × {} (trivial action)", self.k.name(), self.inner.describe())
    }

    fn identity(&self) -> Self::Rep {
        (self.k.identity(), self.inner.identity())
    }

    fn multiply(&self, a: &Self::Rep, b: &Self::Rep) -> Self::Rep {
        (self.k.mul(a.0, b.0), self.inner.multiply(&a.1, &b.1))
    }

    fn apply(&self, x: &Self::Rep, k: i64) -> Self::Rep {
        (x.0, self.inner.apply(&x.1, k))
    }

    fn canonical(&self, m: i64, y: &Self::Rep) -> Result<Self::Rep> {
        Ok((self.k.identity(), self.inner.canonical(m, &y.1)?))
    }

    fn child_offsets(&self, m: i64) -> Result<Vec<Self::Rep>> {
        Ok(self.inner.child_offsets(m)?.into_iter().map(|r| (self.k.identity(), r)).collect())
    }

    fn scale_inverse(&self) -> Result<BigUint> {
        self.inner.scale_inverse()
    }

    fn key(&self, x: &Self::Rep) -> String {
        format!("{}|{}", self.k.label(x.0), self.inner.key(&x.1))
    }

    fn in_vminus(&self, x: &Self::Rep) -> bool {
        self.inner.in_vminus(&x.1)
    }

    fn sample_vminus_minus(&self, rng: &mut ChaCha8Rng) -> Self::Rep {
        let a = rng.gen_range(0..self.k.order()) as Elem;
        (a, self.inner.sample_vminus_minus(rng))
    }
}

/// `s(α^-1)` as a machine integer, for budget arithmetic.
pub(crate) fn small(x: &BigUint) -> u64 {
    x.to_u64().unwrap_or(u64::MAX).max(u64::one())
}
