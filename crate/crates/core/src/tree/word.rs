use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported `q`, so that labels fit in one decimal digit.
pub const MAX_Q: u32 = 9;

/// A vertex of the `(q+1)`-regular tree as the label sequence of the
/// geodesic from the root. The root has neighbours `0..=q`, every other
/// vertex has children `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, c: u8) -> Word {
        let mut w = self.0.clone();
        w.push(c);
        Word(w)
    }

    pub fn parent(&self) -> Option<Word> {
        (!self.is_root()).then(|| Word(self.0[..self.len() - 1].to_vec()))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.len()).map(|k| Word(self.0[..k].to_vec()))
    }

    pub fn validate(&self, q: u32) -> Result<()> {
        for (i, &c) in self.0.iter().enumerate() {
            let bound = if i == 0 { q } else { q - 1 };
            if c as u32 > bound {
                return Err(Error::InvalidInput(format!("label {c} at depth {} of {self} exceeds {bound}", i + 1)));
            }
        }
        Ok(())
    }
}

/// Number of children of `w` in the root-anchored coding.
pub fn child_count(w: &Word, q: u32) -> u32 {
    if w.is_root() {
        q + 1
    } else {
        q
    }
}

pub fn distance(a: &Word, b: &Word) -> usize {
    let common = a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count();
    a.len() + b.len() - 2 * common
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r")?;
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `r012` or bare digits `012`; `r` or the empty string is the root.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().strip_prefix('r').unwrap_or(s.trim());
        body.chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad vertex label in `{s}`"))))
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn check_q(q: u32) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::InvalidInput(format!("q must lie in 2..={MAX_Q}, got {q}")));
    }
    Ok(())
}

/// The ball of radius `radius` about the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeBall {
    pub q: u32,
    pub radius: u32,
}

impl TreeBall {
    pub fn new(q: u32, radius: u32) -> Result<Self> {
        check_q(q)?;
        Ok(TreeBall { q, radius })
    }

    /// `1 + (q+1)(q^R - 1)/(q - 1)`.
    pub fn expected_count(&self) -> u64 {
        let q = self.q as u64;
        1 + (q + 1) * (q.pow(self.radius) - 1) / (q - 1)
    }

    /// All vertices, shorter words first, lexicographic within a length.
    pub fn vertices(&self) -> Vec<Word> {
        let mut out = vec![Word::root()];
        let mut layer = vec![Word::root()];
        for _ in 0..self.radius {
            let mut next = Vec::new();
            for w in &layer {
                for c in 0..child_count(w, self.q) {
                    next.push(w.child(c as u8));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() <= self.radius as usize && w.validate(self.q).is_ok()
    }
}

/// An eventually periodic ray out of the root: `prefix` then `period`
/// repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    pub prefix: Vec<u8>,
    pub period: Vec<u8>,
}

impl Ray {
    pub fn word(&self, n: usize) -> Word {
        Word((0..n).map(|i| if i < self.prefix.len() { self.prefix[i] } else { self.period[(i - self.prefix.len()) % self.period.len()] }).collect())
    }
}

/// A line through the root, given by its two rays. Vertex `a_n` is at
/// distance `|n|` from the root, on `forward` for `n > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub forward: Ray,
    pub backward: Ray,
}

impl Axis {
    /// The line `... 100, 10, 1, r, 0, 00, 000 ...`.
    pub fn standard() -> Self {
        Axis {
            forward: Ray { prefix: vec![0], period: vec![0] },
            backward: Ray { prefix: vec![1], period: vec![0] },
        }
    }

    pub fn validate(&self, q: u32) -> Result<()> {
        for r in [&self.forward, &self.backward] {
            if r.prefix.is_empty() || r.period.is_empty() {
                return Err(Error::InvalidInput("axis rays need a first label and a nonempty period".into()));
            }
            r.word(r.prefix.len() + r.period.len()).validate(q)?;
        }
        if self.forward.prefix[0] == self.backward.prefix[0] {
            return Err(Error::InvalidInput("axis rays must leave the root by different edges".into()));
        }
        Ok(())
    }

    pub fn vertex(&self, n: i64) -> Word {
        if n >= 0 {
            self.forward.word(n as usize)
        } else {
            self.backward.word(n.unsigned_abs() as usize)
        }
    }
}

/// Coordinates relative to the standard axis: the nearest axis vertex
/// `a_pos` and the path away from it. `branch[0]` indexes the `q - 1`
/// off-axis neighbours of `a_pos`; later letters are ordinary child labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisCoords {
    pub pos: i64,
    pub branch: Vec<u8>,
}

impl AxisCoords {
    pub fn of(w: &Word) -> AxisCoords {
        let s = &w.0;
        if s.is_empty() {
            return AxisCoords { pos: 0, branch: vec![] };
        }
        let (sign, start) = match s[0] {
            0 => (1, 0),
            1 => (-1, 1),
            c => return AxisCoords { pos: 0, branch: std::iter::once(c - 2).chain(s[1..].iter().copied()).collect() },
        };
        let zeros = s[start..].iter().take_while(|&&c| c == 0).count();
        let depth = (start + zeros) as i64;
        let rest = &s[start + zeros..];
        let branch = match rest.split_first() {
            None => vec![],
            Some((&c, tail)) => std::iter::once(c - 1).chain(tail.iter().copied()).collect(),
        };
        AxisCoords { pos: sign * depth, branch }
    }

    pub fn word(&self) -> Word {
        let mut s = Axis::standard().vertex(self.pos).0;
        if let Some((&b0, tail)) = self.branch.split_first() {
            s.push(if self.pos == 0 { b0 + 2 } else { b0 + 1 });
            s.extend_from_slice(tail);
        }
        Word(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts() {
        for q in 2..=4 {
            for r in 0..=3 {
                let b = TreeBall::new(q, r).unwrap();
                assert_eq!(b.vertices().len() as u64, b.expected_count());
            }
        }
    }

    #[test]
    fn axis_coordinates_roundtrip() {
        let ball = TreeBall::new(3, 4).unwrap();
        for w in ball.vertices() {
            assert_eq!(AxisCoords::of(&w).word(), w, "{w}");
        }
        assert_eq!(AxisCoords::of(&"100".parse().unwrap()).pos, -3);
        assert_eq!(AxisCoords::of(&"01".parse().unwrap()), AxisCoords { pos: 1, branch: vec![0] });
    }

    #[test]
    fn distances() {
        let a: Word = "012".parse().unwrap();
        let b: Word = "0".parse().unwrap();
        assert_eq!(distance(&a, &b), 2);
        assert_eq!(distance(&a, &"1".parse().unwrap()), 4);
        assert_eq!(a.to_string(), "r012");
    }
}
