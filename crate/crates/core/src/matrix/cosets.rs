use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::family::MatrixFamily;
use super::shape::{Bound, ValuationShape};
use crate::arith::{p_power, reduce_mod_power, Matrix, Rational};
use crate::engine::GroupFamily;
use crate::error::{Error, Result};

impl MatrixFamily {
    /// `V_-` for the level-`k` congruence subgroup.
    pub fn vminus_shape(&self, k: i64) -> ValuationShape {
        self.minus_part(&self.congruence(k))
    }

    /// Pairs `(i, j)` with `v_i > v_j`: the entries `α` contracts.
    pub fn contracting_entries(&self) -> Vec<(usize, usize)> {
        let v = self.valuations();
        let n = self.n();
        let mut out: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| v[i] > v[j]).collect();
        // increasing v_i within a column, as the reduction requires
        out.sort_by_key(|&(i, j)| (j, v[i], i));
        out
    }

    /// Representatives of `α^m(V_-) / α^(m+depth)(V_-)` in eigen coordinates:
    /// `I + Σ c_ij E_ij` with the `p`-adic digits of `c_ij` confined to the
    /// window `[k + m(v_i - v_j), k + (m + depth)(v_i - v_j))`.
    pub fn coset_window_reps(&self, k: i64, m: i64, depth: u32, limit: u64) -> Result<Vec<Matrix>> {
        let v = self.valuations();
        let p = self.p();
        let entries = self.contracting_entries();
        let mut slots: Vec<(usize, usize, i64)> = Vec::new();
        for &(i, j) in &entries {
            let gap = v[i] - v[j];
            let lo = k + m * gap;
            for t in lo..lo + depth as i64 * gap {
                slots.push((i, j, t));
            }
        }
        let count = p.pow(slots.len() as u32);
        if count > BigUint::from(limit) {
            return Err(Error::Budget(format!("{count} coset representatives exceed the limit {limit}")));
        }
        let pu = p.get();
        let total = count.to_u64().expect("bounded by the limit");
        let mut out = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut y = Matrix::identity(self.n());
            let mut c = code;
            for &(i, j, t) in &slots {
                let d = c % pu;
                c /= pu;
                if d != 0 {
                    y[(i, j)] += p_power(p, t) * Rational::from_integer(BigInt::from(d));
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    /// Representatives of `V_- / α^depth(V_-)` for the level-`k`
    /// congruence subgroup, in original coordinates. There are
    /// `s(α^-1)^depth` of them.
    pub fn coset_reps_vminus(&self, k: i64, depth: u32, limit: u64) -> Result<Vec<Matrix>> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be at least 1".into()));
        }
        Ok(self.coset_window_reps(k, 0, depth, limit)?.iter().map(|y| self.from_eigen(y)).collect())
    }

    /// `y = u·b` with `b` block diagonal in `V_0` and `u` block unipotent,
    /// for `y ∈ V_--` in eigen coordinates.
    pub fn split_vminus_minus(&self, y: &Matrix, k: i64) -> Result<(Matrix, Matrix)> {
        let v = self.valuations();
        let n = self.n();
        let p = self.p();
        let mut b = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if v[i] < v[j] && !y[(i, j)].is_zero() {
                    return Err(Error::NotContained(format!("entry ({i},{j}) must vanish in V--")));
                }
                if v[i] == v[j] {
                    b[(i, j)] = y[(i, j)].clone();
                }
            }
        }
        let v0 = ValuationShape::from_fn(n, |i, j| if v[i] == v[j] { Bound::AtLeast(k) } else { Bound::Zero });
        if !v0.admits(&b, p) {
            return Err(Error::NotContained("block-diagonal part is not in V0".into()));
        }
        let u = y * &b.inverse()?;
        Ok((u, b))
    }

    /// Canonical representative of the coset `y·α^m(V_-)` of the level-`k`
    /// subgroup, in eigen coordinates: a block-unipotent matrix whose
    /// contracted entries are reduced modulo `p^(k + m(v_i - v_j))`.
    pub fn canonical_coset(&self, y: &Matrix, m: i64, k: i64) -> Result<Matrix> {
        let v = self.valuations();
        let p = self.p();
        let n = self.n();
        let (mut u, _) = self.split_vminus_minus(y, k)?;
        for (i, j) in self.contracting_entries() {
            let s = k + m * (v[i] - v[j]);
            let x = u[(i, j)].clone();
            let c = reduce_mod_power(&x, p, s) - &x;
            if c.is_zero() {
                continue;
            }
            // u ← u·(I + c E_ij): adds c·(column i) to column j
            for l in 0..n {
                if !u[(l, i)].is_zero() {
                    let add = &u[(l, i)] * &c;
                    u[(l, j)] += add;
                }
            }
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_rational, Prime};
    use crate::engine::GroupFamily;

    fn fam(d: &[&str], p: u64) -> MatrixFamily {
        let d: Vec<Rational> = d.iter().map(|s| parse_rational(s).unwrap()).collect();
        MatrixFamily::diagonal(&d, Prime::new(p).unwrap()).unwrap()
    }

    #[test]
    fn rep_counts() {
        let f = fam(&["5", "1/5"], 5);
        let reps = f.coset_reps_vminus(1, 1, 1000).unwrap();
        assert_eq!(reps.len(), 25);
        assert!(reps.iter().all(|r| r[(1, 0)].is_zero() && r[(0, 0)] == Rational::from_integer(1.into())));
        assert_eq!(fam(&["5", "1"], 5).coset_reps_vminus(1, 1, 1000).unwrap().len(), 5);
        assert_eq!(fam(&["1", "1"], 5).coset_reps_vminus(1, 3, 1000).unwrap().len(), 1);
        assert_eq!(fam(&["2", "1/2"], 2).coset_reps_vminus(1, 2, 1000).unwrap().len(), 16);
        assert_eq!(f.coset_reps_vminus(1, 3, 1000).unwrap_err().code(), "E_BUDGET");
    }

    #[test]
    fn reps_are_canonical_and_distinct() {
        let f = fam(&["25", "5", "1"], 5);
        let reps = f.coset_window_reps(1, 0, 1, 1 << 20).unwrap();
        assert_eq!(reps.len(), 625);
        let mut seen = std::collections::HashSet::new();
        for r in &reps {
            assert_eq!(&f.canonical_coset(r, 1, 1).unwrap(), r);
            assert!(f.contains(&f.vminus_shape(1), r));
            assert!(seen.insert(r.to_grid()));
        }
    }

    #[test]
    fn canonical_form_is_coset_invariant() {
        let f = fam(&["25", "5", "1/5"], 5);
        let w = f.vminus_shape(1);
        let y = Matrix::parse_grid("6,1/5,3;0,1,7/25;0,0,1").unwrap();
        let base = f.canonical_coset(&y, 0, 1).unwrap();
        let h = Matrix::parse_grid("1,5,25;0,26,5;0,0,1").unwrap();
        assert!(w.admits(&h, f.p()));
        assert_eq!(f.canonical_coset(&(&y * &h), 0, 1).unwrap(), base);
        let outside = Matrix::parse_grid("1,1,0;0,1,0;0,0,1").unwrap();
        assert_ne!(f.canonical_coset(&(&y * &outside), 0, 1).unwrap(), base);
    }
}
