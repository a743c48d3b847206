use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element in its group's table.
pub type Elem = u8;

/// Largest supported order; subgroups are stored as 128-bit masks.
pub const MAX_ORDER: usize = 128;

/// Which construction produced a table, for named-subgroup lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Cyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    Dihedral(usize),
    Table,
}

/// A finite group given by its full multiplication table.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    name: String,
    kind: GroupKind,
    labels: Vec<String>,
    /// `table[a * n + b] = a·b`.
    table: Vec<Elem>,
    inverse: Vec<Elem>,
    identity: Elem,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Validates the group axioms on a table of element indices.
    pub fn from_table(name: &str, labels: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(name, GroupKind::Table, labels, rows)
    }

    fn build(name: &str, kind: GroupKind, labels: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let bad = |msg: String| Err(Error::InvalidGroup(format!("{name}: {msg}")));
        if n == 0 || n > MAX_ORDER {
            return bad(format!("order {n} outside 1..={MAX_ORDER}"));
        }
        let mut seen = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == ',') {
                return bad(format!("label {l:?} must be nonempty without whitespace or commas"));
            }
            if seen.insert(l.as_str(), i).is_some() {
                return bad(format!("duplicate label {l:?}"));
            }
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return bad(format!("table must be {n} x {n}"));
        }
        if rows.iter().flatten().any(|&x| x >= n) {
            return bad("table entry out of range".into());
        }
        let table: Vec<Elem> = rows.iter().flatten().map(|&x| x as Elem).collect();
        let at = |a: usize, b: usize| table[a * n + b] as usize;

        let identity = (0..n).find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x));
        let Some(identity) = identity else {
            return bad("no identity element".into());
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return bad(format!("not associative at ({}, {}, {})", labels[a], labels[b], labels[c]));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| at(a, b) == identity && at(b, a) == identity) {
                Some(b) => inverse.push(b as Elem),
                None => return bad(format!("{} has no inverse", labels[a])),
            }
        }
        Ok(FiniteGroup { name: name.to_string(), kind, labels, table, inverse, identity: identity as Elem })
    }

    /// `C_n = <c>`, labels `e, c, c^2, ...`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let labels = (0..n).map(|k| power_label("c", k)).collect();
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::build(&format!("C{n}"), GroupKind::Cyclic(n), labels, rows)
    }

    /// `D_n`, the symmetries of an `n`-gon, of order `2n`. Elements
    /// `s^a r^b` with `r s = s r^-1`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("D0 is not defined".into()));
        }
        let idx = |a: usize, b: usize| a * n + b;
        let mut labels = Vec::with_capacity(2 * n);
        for a in 0..2 {
            for b in 0..n {
                labels.push(match (a, b) {
                    (0, _) => power_label("r", b),
                    (_, 0) => "s".to_string(),
                    _ => format!("s{}", power_label("r", b)),
                });
            }
        }
        let rows = (0..2 * n)
            .map(|x| {
                let (a, b) = (x / n, x % n);
                (0..2 * n)
                    .map(|y| {
                        let (c, d) = (y / n, y % n);
                        let b2 = if c == 0 { b } else { (n - b) % n };
                        idx((a + c) % 2, (b2 + d) % n)
                    })
                    .collect()
            })
            .collect();
        Self::build(&format!("D{n}"), GroupKind::Dihedral(n), labels, rows)
    }

    /// `S_n` acting on `{1..n}`; `(στ)(i) = σ(τ(i))`. Labels are cycle notation.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::permutation_group(n, false)
    }

    pub fn alternating(n: usize) -> Result<Self> {
        Self::permutation_group(n, true)
    }

    fn permutation_group(n: usize, even_only: bool) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidGroup(format!("permutation groups are built for 1 <= n <= 5, got {n}")));
        }
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| !even_only || is_even(p)).collect();
        let index: BTreeMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let rows = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                        index[&st]
                    })
                    .collect()
            })
            .collect();
        let labels = perms.iter().map(|p| cycle_label(p)).collect();
        let (name, kind) = if even_only {
            (format!("A{n}"), GroupKind::Alternating(n))
        } else {
            (format!("S{n}"), GroupKind::Symmetric(n))
        };
        Self::build(&name, kind, labels, rows)
    }

    /// `C<n>`, `S<n>`, `A<n>` or `D<n>`.
    pub fn by_name(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::Parse(format!("unknown group {spec:?} (expected C<n>, S<n>, A<n> or D<n>)"));
        let (head, tail) = spec.split_at(spec.char_indices().nth(1).map_or(spec.len(), |(i, _)| i));
        let n: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "C" | "c" => Self::cyclic(n),
            "S" | "s" => Self::symmetric(n),
            "A" | "a" => Self::alternating(n),
            "D" | "d" => Self::dihedral(n),
            _ => Err(bad()),
        }
    }

    /// Parses the plain-text table format:
    ///
    /// ```text
    /// # comment
    /// order 2
    /// labels e a
    /// e a
    /// a e
    /// ```
    ///
    /// Row `i` lists the products `l_i · l_j` by label.
    pub fn parse_table(name: &str, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let bad = |msg: &str| Error::Parse(format!("group table: {msg}"));
        let order: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("order"))
            .ok_or_else(|| bad("expected `order N` first"))?
            .trim()
            .parse()
            .map_err(|_| bad("order is not a number"))?;
        let labels: Vec<String> = lines
            .next()
            .and_then(|l| l.strip_prefix("labels"))
            .ok_or_else(|| bad("expected `labels ...` second"))?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if labels.len() != order {
            return Err(bad(&format!("order {order} but {} labels", labels.len())));
        }
        let lookup: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let rows: Vec<Vec<usize>> = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| lookup.get(t).copied().ok_or_else(|| bad(&format!("unknown label {t:?}"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() != order {
            return Err(bad(&format!("expected {order} rows, found {}", rows.len())));
        }
        Self::from_table(name, labels, rows)
    }

    pub fn to_table_text(&self) -> String {
        let mut out = format!("order {}\nlabels {}\n", self.order(), self.labels.join(" "));
        for a in self.elements() {
            let row: Vec<&str> = self.elements().map(|b| self.label(self.mul(a, b))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(|i| i as Elem)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a as usize]
    }

    /// `a b a^-1`.
    pub fn conj(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, label: &str) -> Result<Elem> {
        self.labels
            .iter()
            .position(|l| l == label.trim())
            .map(|i| i as Elem)
            .ok_or_else(|| Error::Parse(format!("{} has no element labelled {label:?}", self.name)))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

fn power_label(base: &str, k: usize) -> String {
    match k {
        0 => "e".to_string(),
        1 => base.to_string(),
        _ => format!("{base}^{k}"),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    inversions % 2 == 0
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push((i + 1).to_string());
            i = p[i];
        }
        out.push_str(&format!("({})", cycle.join("")));
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders() {
        assert_eq!(FiniteGroup::cyclic(4).unwrap().order(), 4);
        assert_eq!(FiniteGroup::symmetric(3).unwrap().order(), 6);
        assert_eq!(FiniteGroup::alternating(4).unwrap().order(), 12);
        assert_eq!(FiniteGroup::dihedral(4).unwrap().order(), 8);
        assert_eq!(FiniteGroup::by_name("S4").unwrap().order(), 24);
    }

    #[test]
    fn s3_is_nonabelian() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let a = g.element("(12)").unwrap();
        let b = g.element("(23)").unwrap();
        assert_ne!(g.mul(a, b), g.mul(b, a));
        // (12)(23) sends 1 -> 2, 2 -> 3, 3 -> 1
        assert_eq!(g.label(g.mul(a, b)), "(123)");
        assert_eq!(g.element_order(g.mul(a, b)), 3);
    }

    #[test]
    fn dihedral_relation() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let r = g.element("r").unwrap();
        let s = g.element("s").unwrap();
        assert_eq!(g.mul(r, s), g.mul(s, g.inv(r)));
        assert_eq!(g.element_order(r), 4);
        assert_eq!(g.element_order(s), 2);
    }

    #[test]
    fn table_roundtrip() {
        let g = FiniteGroup::dihedral(3).unwrap();
        let h = FiniteGroup::parse_table("D3", &g.to_table_text()).unwrap();
        assert_eq!(g.labels(), h.labels());
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(g.mul(a, b), h.mul(a, b));
            }
        }
    }

    #[test]
    fn table_rejects_non_group() {
        let text = "order 2\nlabels e a\ne a\na a\n";
        assert!(matches!(FiniteGroup::parse_table("bad", text), Err(Error::InvalidGroup(_))));
        let text = "# klein four\norder 4\nlabels e a b c\ne a b c\na e c b\nb c e a\nc b a e\n";
        assert_eq!(FiniteGroup::parse_table("V4", text).unwrap().order(), 4);
    }
}
