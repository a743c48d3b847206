use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::word::{check_q, child_count, distance, AxisCoords, TreeBall, Word};
use crate::error::{Error, Result};

/// Globally defined tree automorphisms from which portraits are cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `a_n ↦ a_(n+l)` along the standard axis, carrying branches along.
    Translate { l: i64 },
    /// `a_n ↦ a_(c-n)` on the standard axis: an inversion of the edge
    /// `{a_(c/2), a_(c/2+1)}` for odd `c`, elliptic fixing `a_(c/2)` for even.
    Reflect { c: i64 },
    /// Permutes the subtrees below `at` by `perm` on the child labels.
    Permute { at: Word, perm: Vec<u8> },
}

impl Generator {
    fn apply(&self, w: &Word) -> Word {
        match self {
            Generator::Translate { l } => {
                let mut a = AxisCoords::of(w);
                a.pos += l;
                a.word()
            }
            Generator::Reflect { c } => {
                let mut a = AxisCoords::of(w);
                a.pos = c - a.pos;
                a.word()
            }
            Generator::Permute { at, perm } => {
                if at.is_prefix_of(w) && w.len() > at.len() {
                    let mut s = w.0.clone();
                    s[at.len()] = perm[s[at.len()] as usize];
                    Word(s)
                } else {
                    w.clone()
                }
            }
        }
    }

    fn inverse(&self) -> Generator {
        match self {
            Generator::Translate { l } => Generator::Translate { l: -l },
            Generator::Reflect { c } => Generator::Reflect { c: *c },
            Generator::Permute { at, perm } => {
                let mut inv = vec![0u8; perm.len()];
                for (i, &x) in perm.iter().enumerate() {
                    inv[x as usize] = i as u8;
                }
                Generator::Permute { at: at.clone(), perm: inv }
            }
        }
    }
}

/// A composite of generators, applied first to last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeAut {
    pub q: u32,
    pub ops: Vec<Generator>,
}

impl TreeAut {
    pub fn identity(q: u32) -> Result<Self> {
        check_q(q)?;
        Ok(TreeAut { q, ops: vec![] })
    }

    pub fn translation(q: u32, l: i64) -> Result<Self> {
        check_q(q)?;
        Ok(TreeAut { q, ops: vec![Generator::Translate { l }] })
    }

    pub fn reflection(q: u32, c: i64) -> Result<Self> {
        check_q(q)?;
        Ok(TreeAut { q, ops: vec![Generator::Reflect { c }] })
    }

    pub fn permutation(q: u32, at: Word, perm: Vec<u8>) -> Result<Self> {
        check_q(q)?;
        at.validate(q)?;
        let k = child_count(&at, q) as usize;
        let distinct: BTreeSet<u8> = perm.iter().copied().collect();
        if perm.len() != k || distinct.len() != k || perm.iter().any(|&x| x as usize >= k) {
            return Err(Error::InvalidInput(format!("a permutation of the {k} children of {at} is required")));
        }
        Ok(TreeAut { q, ops: vec![Generator::Permute { at, perm }] })
    }

    pub fn apply(&self, w: &Word) -> Word {
        self.ops.iter().fold(w.clone(), |x, g| g.apply(&x))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TreeAut) -> TreeAut {
        TreeAut { q: self.q, ops: other.ops.iter().chain(&self.ops).cloned().collect() }
    }

    pub fn inverse(&self) -> TreeAut {
        TreeAut { q: self.q, ops: self.ops.iter().rev().map(Generator::inverse).collect() }
    }

    pub fn pow(&self, n: i64) -> TreeAut {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = TreeAut { q: self.q, ops: vec![] };
        for _ in 0..n.unsigned_abs() {
            out = base.compose(&out);
        }
        out
    }

    pub fn portrait(&self, radius: u32) -> Portrait {
        let ball = TreeBall { q: self.q, radius };
        let map = ball.vertices().into_iter().map(|w| (w.clone(), self.apply(&w))).collect();
        Portrait { q: self.q, radius, map }
    }
}

/// The restriction of an automorphism to the ball of radius `radius`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Portrait {
    pub q: u32,
    pub radius: u32,
    pub map: BTreeMap<Word, Word>,
}

impl Portrait {
    /// Validates that `map` is defined on exactly the ball and is an
    /// isometric embedding, hence extends to an automorphism.
    pub fn new(q: u32, radius: u32, map: BTreeMap<Word, Word>) -> Result<Self> {
        let ball = TreeBall::new(q, radius)?;
        let p = Portrait { q, radius, map };
        let verts = ball.vertices();
        if p.map.len() != verts.len() || verts.iter().any(|v| !p.map.contains_key(v)) {
            return Err(Error::InconsistentPortrait(format!("domain is not the ball of radius {radius}")));
        }
        let mut images = BTreeSet::new();
        for (v, img) in &p.map {
            img.validate(q).map_err(|e| Error::InconsistentPortrait(e.to_string()))?;
            if !images.insert(img.clone()) {
                return Err(Error::InconsistentPortrait(format!("{img} is the image of two vertices")));
            }
            if let Some(parent) = v.parent() {
                if distance(img, &p.map[&parent]) != 1 {
                    return Err(Error::InconsistentPortrait(format!("edge {parent}-{v} is not mapped to an edge")));
                }
            }
        }
        Ok(p)
    }

    pub fn ball(&self) -> TreeBall {
        TreeBall { q: self.q, radius: self.radius }
    }

    pub fn get(&self, w: &Word) -> Option<&Word> {
        self.map.get(w)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    /// `self ∘ other` on the largest ball where it is determined.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        let verts = other.ball().vertices();
        let bad_depth = verts.iter().find(|v| !self.map.contains_key(&other.map[*v])).map(Word::len);
        let radius = match bad_depth {
            Some(0) => return Err(Error::RadiusTooSmall("the composite is not determined at the root".into())),
            Some(d) => d as u32 - 1,
            None => other.radius,
        };
        let map = verts
            .into_iter()
            .filter(|v| v.len() <= radius as usize)
            .map(|v| {
                let img = self.map[&other.map[&v]].clone();
                (v, img)
            })
            .collect();
        Ok(Portrait { q: self.q, radius, map })
    }

    pub fn restrict(&self, radius: u32) -> Portrait {
        let radius = radius.min(self.radius);
        let map = self.map.iter().filter(|(v, _)| v.len() <= radius as usize).map(|(a, b)| (a.clone(), b.clone())).collect();
        Portrait { q: self.q, radius, map }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn generator_portraits_are_isometries() {
        let gens = [
            TreeAut::translation(2, 1).unwrap(),
            TreeAut::translation(3, -2).unwrap(),
            TreeAut::reflection(2, 1).unwrap(),
            TreeAut::permutation(3, w("01"), vec![2, 0, 1]).unwrap(),
            TreeAut::permutation(2, Word::root(), vec![1, 2, 0]).unwrap(),
        ];
        for g in gens {
            let p = g.portrait(3);
            Portrait::new(p.q, p.radius, p.map.clone()).unwrap();
            let back = g.inverse().compose(&g);
            assert!(back.portrait(3).is_identity());
        }
    }

    #[test]
    fn translation_moves_axis() {
        let t = TreeAut::translation(2, 1).unwrap();
        assert_eq!(t.apply(&Word::root()), w("0"));
        assert_eq!(t.apply(&w("1")), Word::root());
        assert_eq!(t.apply(&w("2")), w("01"));
    }

    #[test]
    fn rejects_non_isometric_maps() {
        let mut p = TreeAut::identity(2).unwrap().portrait(1);
        p.map.insert(w("0"), w("01"));
        assert_eq!(Portrait::new(2, 1, p.map).unwrap_err().code(), "E_PORTRAIT");
    }

    #[test]
    fn composition_shrinks_the_ball() {
        let t = TreeAut::translation(2, 1).unwrap();
        let p = t.portrait(3);
        let sq = p.compose(&p).unwrap();
        assert_eq!(sq.radius, 2);
        assert_eq!(sq, t.pow(2).portrait(2));
    }
}
