use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::aut::{Portrait, TreeAut};
use super::word::{child_count, distance, Axis, TreeBall, Word};
use crate::engine::{MembershipVerdict, ScaleMethod, ScaleResult};
use crate::error::{Error, Result};

/// Brute-force enumeration is limited to `q <= 3` and radius `<= 4`.
pub const BRUTE_FORCE_MAX_Q: u32 = 3;
pub const BRUTE_FORCE_MAX_RADIUS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Elliptic,
    Hyperbolic,
    /// Swaps the ends of an edge; its square is elliptic.
    Inversion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeclaredKind {
    Elliptic { fixed: Word },
    Hyperbolic { axis: Axis, l: u32 },
    Inversion { edge: (Word, Word) },
}

impl DeclaredKind {
    pub fn kind(&self) -> Kind {
        match self {
            DeclaredKind::Elliptic { .. } => Kind::Elliptic,
            DeclaredKind::Hyperbolic { .. } => Kind::Hyperbolic,
            DeclaredKind::Inversion { .. } => Kind::Inversion,
        }
    }
}

/// An automorphism known through its portrait on a ball, with a declared
/// global type that [`classify`] checks against the portrait.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeAutomorphismData {
    pub declared: DeclaredKind,
    pub portrait: Portrait,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    /// Translation length; 0 unless hyperbolic.
    pub l: u32,
    pub min_displacement: u32,
    /// A vertex attaining the minimal displacement.
    pub witness: Word,
}

impl TreeAutomorphismData {
    pub fn new(declared: DeclaredKind, portrait: Portrait) -> Result<Self> {
        let d = TreeAutomorphismData { declared, portrait };
        classify(&d)?;
        Ok(d)
    }

    pub fn declare(aut: &TreeAut, declared: DeclaredKind, radius: u32) -> Result<Self> {
        Self::new(declared, aut.portrait(radius))
    }

    /// Translation by `l` along the standard axis.
    pub fn translation(q: u32, l: u32, radius: u32) -> Result<Self> {
        let aut = TreeAut::translation(q, l as i64)?;
        Self::declare(&aut, DeclaredKind::Hyperbolic { axis: Axis::standard(), l }, radius)
    }

    pub fn identity(q: u32, radius: u32) -> Result<Self> {
        Self::declare(&TreeAut::identity(q)?, DeclaredKind::Elliptic { fixed: Word::root() }, radius)
    }

    pub fn q(&self) -> u32 {
        self.portrait.q
    }

    pub fn radius(&self) -> u32 {
        self.portrait.radius
    }

    /// `self^n` for `n >= 1`, by composing portraits.
    pub fn power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Self::identity(self.q(), self.radius());
        }
        let mut p = self.portrait.clone();
        for _ in 1..n {
            p = self.portrait.compose(&p)?;
        }
        let declared = match &self.declared {
            DeclaredKind::Hyperbolic { axis, l } => DeclaredKind::Hyperbolic { axis: axis.clone(), l: l * n },
            DeclaredKind::Inversion { edge } if n % 2 == 0 => DeclaredKind::Elliptic { fixed: edge.0.clone() },
            d => d.clone(),
        };
        Self::new(declared, p)
    }
}

/// Recomputes the type from minimal displacement over the ball and checks
/// it against the declaration.
pub fn classify(data: &TreeAutomorphismData) -> Result<Classification> {
    let p = &data.portrait;
    let disp = |v: &Word| distance(v, &p.map[v]) as u32;
    let m = p.map.keys().map(disp).min().expect("a ball is nonempty");
    let minimizers: Vec<&Word> = p.map.keys().filter(|v| disp(v) == m).collect();
    let mut sorted = minimizers.clone();
    sorted.sort_by_key(|w| (w.len(), (*w).clone()));
    let witness = sorted[0].clone();
    let found = if m == 0 {
        Classification { kind: Kind::Elliptic, l: 0, min_displacement: 0, witness }
    } else {
        let x = sorted
            .iter()
            .find(|x| p.map.contains_key(&p.map[**x]))
            .ok_or_else(|| Error::RadiusTooSmall("no minimally displaced vertex has its image inside the ball".into()))?;
        let gx = &p.map[*x];
        let ggx = &p.map[gx];
        if m == 1 && ggx == *x {
            Classification { kind: Kind::Inversion, l: 0, min_displacement: 1, witness: (*x).clone() }
        } else if distance(x, ggx) as u32 == 2 * m {
            Classification { kind: Kind::Hyperbolic, l: m, min_displacement: m, witness: (*x).clone() }
        } else {
            return Err(Error::InconsistentPortrait(format!(
                "minimal displacement {m} at {x} is neither a fixed point, an inversion nor a translation; the ball misses the axis"
            )));
        }
    };
    let mismatch = |msg: String| Err(Error::InconsistentPortrait(msg));
    if found.kind != data.declared.kind() {
        return mismatch(format!("declared {:?} but the portrait is {:?}", data.declared.kind(), found.kind));
    }
    match &data.declared {
        DeclaredKind::Elliptic { fixed } => {
            if let Some(img) = p.get(fixed) {
                if img != fixed {
                    return mismatch(format!("declared fixed vertex {fixed} moves to {img}"));
                }
            }
        }
        DeclaredKind::Hyperbolic { axis, l } => {
            axis.validate(p.q)?;
            if *l != found.l {
                return mismatch(format!("declared translation length {l} but the portrait translates by {}", found.l));
            }
            let r = p.radius as i64;
            for n in -r..=r - *l as i64 {
                if p.get(&axis.vertex(n)) != Some(&axis.vertex(n + *l as i64)) {
                    return mismatch(format!("axis vertex {} does not move to {}", axis.vertex(n), axis.vertex(n + *l as i64)));
                }
            }
        }
        DeclaredKind::Inversion { edge } => {
            if distance(&edge.0, &edge.1) != 1 {
                return mismatch("declared inversion edge is not an edge".into());
            }
            if let (Some(a), Some(b)) = (p.get(&edge.0), p.get(&edge.1)) {
                if a != &edge.1 || b != &edge.0 {
                    return mismatch(format!("edge {}-{} is not inverted", edge.0, edge.1));
                }
            }
        }
    }
    Ok(found)
}

/// `q^l` for hyperbolic elements, 1 otherwise, cross-checked against the
/// displacement index of a fixator subgroup when the ball is large enough.
pub fn tree_scale(data: &TreeAutomorphismData) -> Result<ScaleResult> {
    let c = classify(data)?;
    let q = data.q();
    let closed = if c.kind == Kind::Hyperbolic { BigUint::from(q).pow(c.l) } else { BigUint::one() };
    let mut computed = vec![(ScaleMethod::ClosedForm, closed)];
    let segment = match &data.declared {
        DeclaredKind::Hyperbolic { axis, .. } => axis_segment(axis, 0, 1),
        DeclaredKind::Elliptic { fixed } => vec![fixed.clone()],
        DeclaredKind::Inversion { edge } => vec![edge.0.clone(), edge.1.clone()],
    };
    if let Some(image) = segment.iter().map(|v| data.portrait.get(v).cloned()).collect::<Option<Vec<Word>>>() {
        computed.push((ScaleMethod::IndexAtTidy, fixator_index(q, &segment, &image)?));
    }
    ScaleResult::agreeing(ScaleMethod::ClosedForm, computed)
}

/// Vertices `a_from, ..., a_(from+len)` of the axis.
pub fn axis_segment(axis: &Axis, from: i64, len: u32) -> Vec<Word> {
    (from..=from + len as i64).map(|n| axis.vertex(n)).collect()
}

fn geodesic(a: &Word, b: &Word) -> Vec<Word> {
    let common = a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count();
    let mut out: Vec<Word> = (common..=a.len()).map(|k| Word(a.0[..k].to_vec())).collect();
    out.extend((common + 1..=b.len()).map(|k| Word(b.0[..k].to_vec())));
    out
}

/// The smallest subtree containing `xs`.
pub fn hull(xs: &[Word]) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if let Some(first) = xs.first() {
        out.insert(first.clone());
        for x in xs {
            out.extend(geodesic(first, x));
        }
    }
    out
}

fn neighbours(w: &Word, q: u32) -> Vec<Word> {
    let mut out: Vec<Word> = (0..child_count(w, q)).map(|c| w.child(c as u8)).collect();
    out.extend(w.parent());
    out
}

fn falling(n: u32, k: u32) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n.saturating_sub(i)))
}

/// `|Fix(X) : Fix(X ∪ Y)|` in the full automorphism group, counting
/// extensions of the identity on `hull(X)` to `hull(X ∪ Y)`.
pub fn fixator_index(q: u32, xs: &[Word], ys: &[Word]) -> Result<BigUint> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("the fixed set must be nonempty".into()));
    }
    let a = hull(xs);
    let all: Vec<Word> = xs.iter().chain(ys).cloned().collect();
    let b = hull(&all);
    let mut index = BigUint::one();
    for v in &b {
        let nb = neighbours(v, q);
        let in_a = nb.iter().filter(|w| a.contains(w)).count() as u32;
        let new = nb.iter().filter(|w| b.contains(w) && !a.contains(w)).count() as u32;
        index *= if a.contains(v) {
            falling(q + 1 - in_a, new)
        } else {
            // one neighbour leads back towards hull(X)
            falling(q, new + in_a - 1)
        };
    }
    Ok(index)
}

/// `|Fix(S) : Fix(S ∪ g(S))|` for `S = {a_0, ..., a_len}` on the declared
/// axis (or the fixed vertex), by orbit enumeration under generators of the
/// fixator in the automorphism group of the ball of radius `radius`.
pub fn fixator_index_bruteforce(data: &TreeAutomorphismData, len: u32, radius: u32) -> Result<BigUint> {
    let q = data.q();
    if q > BRUTE_FORCE_MAX_Q || radius > BRUTE_FORCE_MAX_RADIUS {
        return Err(Error::EnumerationBound(format!(
            "q = {q}, R = {radius} exceeds q <= {BRUTE_FORCE_MAX_Q}, R <= {BRUTE_FORCE_MAX_RADIUS}"
        )));
    }
    if len == 0 {
        return Err(Error::InvalidInput("segment length must be at least 1".into()));
    }
    let segment: Vec<Word> = match &data.declared {
        DeclaredKind::Hyperbolic { axis, .. } => axis_segment(axis, 0, len),
        DeclaredKind::Elliptic { fixed } => geodesic(&Word::root(), fixed),
        DeclaredKind::Inversion { edge } => hull(&[Word::root(), edge.0.clone(), edge.1.clone()]).into_iter().collect(),
    };
    let image: Vec<Word> = segment
        .iter()
        .map(|v| data.portrait.get(v).cloned())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::RadiusTooSmall("the segment leaves the portrait".into()))?;
    if image.iter().chain(&segment).any(|w| w.len() > radius as usize) {
        return Err(Error::RadiusTooSmall(format!("S ∪ g(S) does not fit in the ball of radius {radius}")));
    }
    let fixed = hull(&segment);
    let mut gens: Vec<(Word, u8, u8)> = Vec::new();
    for v in (TreeBall { q, radius }).vertices() {
        if v.len() >= radius as usize {
            continue;
        }
        let free: Vec<u8> = (0..child_count(&v, q) as u8).filter(|&c| !fixed.contains(&v.child(c))).collect();
        for (i, &a) in free.iter().enumerate() {
            for &b in &free[i + 1..] {
                gens.push((v.clone(), a, b));
            }
        }
    }
    let swap = |w: &Word, (v, a, b): &(Word, u8, u8)| -> Word {
        if v.is_prefix_of(w) && w.len() > v.len() {
            let mut s = w.0.clone();
            let c = &mut s[v.len()];
            if *c == *a {
                *c = *b;
            } else if *c == *b {
                *c = *a;
            }
            Word(s)
        } else {
            w.clone()
        }
    };
    let mut seen: HashSet<Vec<Word>> = HashSet::from([image.clone()]);
    let mut queue = VecDeque::from([image]);
    while let Some(t) = queue.pop_front() {
        for g in &gens {
            let next: Vec<Word> = t.iter().map(|w| swap(w, g)).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(BigUint::from(seen.len()))
}

/// Whether `x` fixes every visible vertex of the axis of `g`.
pub fn fixes_axis(x: &TreeAutomorphismData, g: &TreeAutomorphismData) -> Result<bool> {
    let DeclaredKind::Hyperbolic { axis, .. } = &g.declared else {
        return Err(Error::InvalidInput("g must be hyperbolic".into()));
    };
    let r = x.radius() as i64;
    Ok((-r..=r).all(|n| {
        let a = axis.vertex(n);
        x.portrait.get(&a) == Some(&a)
    }))
}

/// Whether some visible axis vertex `p` towards the repelling end of `g`
/// has all points within distance `r` of the ray from `p` to that end fixed
/// by `x`. Ball-relative, with the portrait radius as horizon.
pub fn contraction_certificate(x: &TreeAutomorphismData, g: &TreeAutomorphismData, r: u32) -> Result<MembershipVerdict> {
    let DeclaredKind::Hyperbolic { axis, .. } = &g.declared else {
        return Err(Error::InvalidInput("g must be hyperbolic".into()));
    };
    classify(g)?;
    let big_r = x.radius();
    if big_r <= r {
        return Err(Error::RadiusTooSmall(format!("radius {big_r} must exceed r = {r}")));
    }
    if x.portrait.is_identity() {
        return Ok(MembershipVerdict::yes(big_r));
    }
    let ball: Vec<&Word> = x.portrait.map.keys().collect();
    for n in 0..=(big_r - r) as i64 {
        let ray: Vec<Word> = (n..=big_r as i64).map(|k| axis.vertex(-k)).collect();
        let near = ball.iter().filter(|v| ray.iter().any(|a| distance(v, a) as u32 <= r));
        if near.clone().all(|v| x.portrait.get(v) == Some(*v)) {
            return Ok(MembershipVerdict {
                witness: Some(format!("p(x,{r}) = {}", axis.vertex(-n))),
                ..MembershipVerdict::yes(big_r)
            });
        }
    }
    let c = classify(x)?;
    let deep = axis.vertex(-(big_r as i64));
    let moved = format!("{deep} moves to {}", x.portrait.map[&deep]);
    if c.kind != Kind::Elliptic {
        return Ok(MembershipVerdict::no(big_r, format!("x is {:?} and fixes no vertex; {moved}", c.kind).to_lowercase()));
    }
    Ok(MembershipVerdict::unknown(big_r, format!("no visible ray neighbourhood is fixed within radius {big_r}")))
}

/// A nontrivial element of `M_g ∩ U_g` for the translation by `l`: it swaps
/// two subtrees hanging off the forward ray, so it fixes the axis and every
/// vertex near the repelling end.
pub fn levi_contraction_witness(q: u32, radius: u32) -> Result<TreeAutomorphismData> {
    let at: Word = Word(vec![0, 1]);
    let mut perm: Vec<u8> = (0..q as u8).collect();
    perm.swap(0, 1);
    let aut = TreeAut::permutation(q, at, perm)?;
    TreeAutomorphismData::declare(&aut, DeclaredKind::Elliptic { fixed: Word::root() }, radius)
}
