use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;

use super::model::{small, CosetModel};
use crate::arith::biguint_str;
use crate::error::{Error, Result};

/// Default vertex budget per ball.
pub const DEFAULT_VERTEX_BUDGET: u64 = 100_000;
/// Environment variable overriding [`DEFAULT_VERTEX_BUDGET`].
pub const BUDGET_ENV: &str = "TDLC_VERTEX_BUDGET";

pub const JSON_SCHEMA: &str = "tdlc.coset_tree/1";

pub fn vertex_budget() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_VERTEX_BUDGET)
}

/// Which part of the tree to build: the path `V^(m)` for `m` in `levels`,
/// and all descendants of `V^(root)` down to `depth` generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BallSpec {
    pub levels: (i64, i64),
    pub root: i64,
    pub depth: u32,
}

impl BallSpec {
    /// Path over `[-depth, depth]` with descendants of `V^(0)`.
    pub fn centered(depth: u32) -> Self {
        BallSpec { levels: (-(depth as i64), depth as i64), root: 0, depth }
    }

    pub fn is_empty(&self) -> bool {
        self.levels.0 > self.levels.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosetVertex<R> {
    pub level: i64,
    #[serde(skip)]
    pub rep: R,
    pub key: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetTreeBall<R> {
    pub description: String,
    pub spec: BallSpec,
    #[serde(with = "biguint_str")]
    pub scale_inverse: BigUint,
    pub vertices: Vec<CosetVertex<R>>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Path vertices in increasing level.
    pub path: Vec<usize>,
    /// Vertices whose children were all generated.
    pub expanded: BTreeSet<usize>,
    #[serde(skip)]
    index: HashMap<(i64, String), usize>,
}

impl<R> CosetTreeBall<R> {
    pub fn find(&self, level: i64, key: &str) -> Option<usize> {
        self.index.get(&(level, key.to_string())).copied()
    }

    pub fn path_vertex(&self, level: i64) -> Option<usize> {
        self.path.iter().copied().find(|&i| self.vertices[i].level == level)
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((v, 0)..=(v, usize::MAX)).map(|&(_, b)| b)
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |&&(_, b)| b == v).map(|&(a, _)| a)
    }

    /// Vertices other than the path.
    pub fn descendant_count(&self) -> usize {
        self.vertices.len() - self.path.len()
    }
}

fn insert<M: CosetModel>(
    model: &M,
    ball: &mut CosetTreeBall<M::Rep>,
    level: i64,
    rep: M::Rep,
) -> usize {
    let key = model.key(&rep);
    if let Some(&i) = ball.index.get(&(level, key.clone())) {
        return i;
    }
    let i = ball.vertices.len();
    ball.index.insert((level, key.clone()), i);
    ball.vertices.push(CosetVertex { level, rep, key });
    i
}

/// Builds the ball described by `spec`. Edges are recomputed from the
/// parent rule `x V_- -> y V_-` iff `y ∈ x α^m(V_-)`, independently of how
/// children were generated.
pub fn build_ball<M: CosetModel>(model: &M, spec: BallSpec, budget: u64) -> Result<CosetTreeBall<M::Rep>> {
    let s = model.scale_inverse()?;
    let mut ball = CosetTreeBall {
        description: model.describe(),
        spec,
        scale_inverse: s.clone(),
        vertices: vec![],
        edges: BTreeSet::new(),
        path: vec![],
        expanded: BTreeSet::new(),
        index: HashMap::new(),
    };
    if spec.is_empty() {
        return Ok(ball);
    }
    if spec.root < spec.levels.0 || spec.root > spec.levels.1 {
        return Err(Error::InvalidInput(format!("root level {} is outside {:?}", spec.root, spec.levels)));
    }
    let s_small = small(&s) as u128;
    let mut estimate: u128 = (spec.levels.1 - spec.levels.0 + 1) as u128;
    let mut layer: u128 = 1;
    for _ in 0..=spec.depth {
        estimate = estimate.saturating_add(layer);
        layer = layer.saturating_mul(s_small);
    }
    if estimate > budget as u128 {
        return Err(Error::Budget(format!("about {estimate} vertices exceed the budget of {budget}")));
    }
    let e = model.identity();
    for m in spec.levels.0..=spec.levels.1 {
        let rep = model.canonical(m, &e)?;
        let i = insert(model, &mut ball, m, rep);
        ball.path.push(i);
    }
    let root = ball.path_vertex(spec.root).expect("root lies on the path");
    let mut queue = VecDeque::from([(root, 0u32)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == spec.depth {
            continue;
        }
        let (level, rep) = (ball.vertices[v].level, ball.vertices[v].rep.clone());
        for off in model.child_offsets(level)? {
            let child = model.canonical(level + 1, &model.multiply(&rep, &off))?;
            let before = ball.vertices.len();
            let c = insert(model, &mut ball, level + 1, child);
            if c >= before || ball.path.contains(&c) {
                queue.push_back((c, d + 1));
            }
        }
        ball.expanded.insert(v);
    }
    // descendants of the root may continue the line past the top level
    let mut m = spec.levels.1 + 1;
    while let Some(i) = ball.find(m, &model.key(&model.canonical(m, &e)?)) {
        ball.path.push(i);
        m += 1;
    }
    for (i, v) in ball.vertices.iter().enumerate() {
        let parent = model.canonical(v.level - 1, &v.rep)?;
        if let Some(&p) = ball.index.get(&(v.level - 1, model.key(&parent))) {
            ball.edges.insert((p, i));
        }
    }
    Ok(ball)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub vertex: String,
    pub problem: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub vertices: usize,
    pub edges: usize,
    #[serde(with = "biguint_str")]
    pub scale_inverse: BigUint,
    /// Vertices with all children and their parent inside the ball.
    pub interior: usize,
    /// Distinct total degrees observed at interior vertices.
    pub interior_degrees: BTreeSet<usize>,
    pub violations: Vec<Violation>,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn label<R>(ball: &CosetTreeBall<R>, v: usize) -> String {
    let x = &ball.vertices[v];
    format!("{}@{}", x.key, x.level)
}

/// Checks the local structure: every edge obeys the edge rule, in-degree
/// is at most one and exactly one when the parent is present, expanded
/// vertices have `s(α^-1)` children, there are no directed cycles, and
/// every vertex is joined to the path.
pub fn verify_local_structure<M: CosetModel>(model: &M, ball: &CosetTreeBall<M::Rep>) -> Result<StructureReport> {
    let s = small(&ball.scale_inverse) as usize;
    let n = ball.vertices.len();
    let mut violations = Vec::new();
    let mut bad = |v: usize, problem: String| violations.push(Violation { vertex: label(ball, v), problem });
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &(a, b) in &ball.edges {
        indeg[b] += 1;
        outdeg[a] += 1;
        let (va, vb) = (&ball.vertices[a], &ball.vertices[b]);
        if vb.level != va.level + 1 {
            bad(b, format!("edge from level {} to level {}", va.level, vb.level));
        } else if model.key(&model.canonical(va.level, &vb.rep)?) != va.key {
            bad(b, format!("not contained in the coset of {}", label(ball, a)));
        }
    }
    let mut interior = 0;
    let mut interior_degrees = BTreeSet::new();
    for v in 0..n {
        let x = &ball.vertices[v];
        let parent = model.canonical(x.level - 1, &x.rep)?;
        let parent_present = ball.find(x.level - 1, &model.key(&parent)).is_some();
        if indeg[v] > 1 {
            bad(v, format!("in-degree {}", indeg[v]));
        }
        if parent_present && indeg[v] == 0 {
            bad(v, "parent is in the ball but the in-edge is missing".into());
        }
        if ball.expanded.contains(&v) {
            if outdeg[v] != s {
                bad(v, format!("out-degree {} instead of {s}", outdeg[v]));
            }
            if parent_present {
                interior += 1;
                interior_degrees.insert(indeg[v] + outdeg[v]);
            }
        } else if outdeg[v] > s {
            bad(v, format!("out-degree {} exceeds {s}", outdeg[v]));
        }
    }
    // Kahn's algorithm; leftover vertices lie on a cycle
    let mut deg = indeg.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for w in ball.out_edges(v).collect::<Vec<_>>() {
            deg[w] -= 1;
            if deg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if seen < n {
        let v = (0..n).find(|&v| deg[v] > 0).expect("a vertex on a cycle");
        bad(v, "lies on a directed cycle".into());
    }
    let on_path: BTreeSet<usize> = ball.path.iter().copied().collect();
    let parent_of: BTreeMap<usize, usize> = ball.edges.iter().map(|&(a, b)| (b, a)).collect();
    for v in 0..n {
        let mut cur = v;
        let mut steps = 0;
        while !on_path.contains(&cur) && steps <= n {
            match parent_of.get(&cur) {
                Some(&p) => cur = p,
                None => break,
            }
            steps += 1;
        }
        if !on_path.contains(&cur) {
            bad(v, "not joined to the path".into());
        }
    }
    Ok(StructureReport {
        vertices: n,
        edges: ball.edges.len(),
        scale_inverse: ball.scale_inverse.clone(),
        interior,
        interior_degrees,
        violations,
    })
}

/// Image of a vertex under `w α^k`: inside the ball, or the level and key of
/// a vertex outside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActOutcome {
    Inside(usize),
    OutsideBall { level: i64, key: String },
}

/// `w α^k · y α^m V_- = w α^k(y) α^(m+k) V_-`.
pub fn act_vertex<M: CosetModel>(model: &M, w: &M::Rep, k: i64, level: i64, rep: &M::Rep) -> Result<(i64, M::Rep)> {
    let image = model.multiply(w, &model.apply(rep, k));
    Ok((level + k, model.canonical(level + k, &image)?))
}

pub fn act<M: CosetModel>(model: &M, ball: &CosetTreeBall<M::Rep>, w: &M::Rep, k: i64, v: usize) -> Result<ActOutcome> {
    let x = &ball.vertices[v];
    let (level, rep) = act_vertex(model, w, k, x.level, &x.rep)?;
    let key = model.key(&rep);
    Ok(match ball.find(level, &key) {
        Some(i) => ActOutcome::Inside(i),
        None => ActOutcome::OutsideBall { level, key },
    })
}

/// The distance `α` moves the path, if it translates every visible path
/// vertex by the same amount.
pub fn path_translation<M: CosetModel>(model: &M, ball: &CosetTreeBall<M::Rep>) -> Result<Option<i64>> {
    let e = model.identity();
    let mut shift = None;
    for &v in &ball.path {
        match act(model, ball, &e, 1, v)? {
            ActOutcome::Inside(w) if ball.path.contains(&w) => {
                let d = ball.vertices[w].level - ball.vertices[v].level;
                if shift.is_some_and(|s| s != d) {
                    return Ok(None);
                }
                shift = Some(d);
            }
            ActOutcome::Inside(_) => return Ok(None),
            ActOutcome::OutsideBall { level, key } => {
                if key != ball.vertices[v].key || level != ball.vertices[v].level + 1 {
                    return Ok(None);
                }
            }
        }
    }
    Ok(shift)
}

/// Counts ball edges whose image under `w α^k` breaks the edge rule.
pub fn adjacency_violations<M: CosetModel>(
    model: &M,
    ball: &CosetTreeBall<M::Rep>,
    w: &M::Rep,
    k: i64,
    edges: &[(usize, usize)],
) -> Result<usize> {
    let mut count = 0;
    for &(a, b) in edges {
        let (va, vb) = (&ball.vertices[a], &ball.vertices[b]);
        let (la, ra) = act_vertex(model, w, k, va.level, &va.rep)?;
        let (lb, rb) = act_vertex(model, w, k, vb.level, &vb.rep)?;
        if lb != la + 1 || model.key(&model.canonical(la, &rb)?) != model.key(&ra) {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`, expected dot or json"))),
        }
    }
}

/// Vertex order used by both exports: by level, then key.
fn export_order<R>(ball: &CosetTreeBall<R>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ball.vertices.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&ball.vertices[a], &ball.vertices[b]);
        (x.level, &x.key).cmp(&(y.level, &y.key))
    });
    order
}

pub fn export<R>(ball: &CosetTreeBall<R>, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => export_dot(ball),
        ExportFormat::Json => export_json(ball),
    }
}

fn export_dot<R>(ball: &CosetTreeBall<R>) -> String {
    let order = export_order(ball);
    let id: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let on_path: BTreeSet<usize> = ball.path.iter().copied().collect();
    let mut out = String::new();
    writeln!(out, "digraph coset_tree {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=circle, fontsize=10];").unwrap();
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &v in &order {
        let x = &ball.vertices[v];
        let style = if on_path.contains(&v) { ", color=red, penwidth=2" } else { "" };
        writeln!(out, "  v{} [label=\"{}\", tooltip=\"{}\"{}];", id[&v], x.level, x.key.replace('"', "'"), style).unwrap();
        levels.entry(x.level).or_default().push(id[&v]);
    }
    for (level, ids) in &levels {
        let names: Vec<String> = ids.iter().map(|i| format!("v{i}")).collect();
        writeln!(out, "  {{ rank=same; {}; }} // level {level}", names.join("; ")).unwrap();
    }
    let mut edges: Vec<(usize, usize)> = ball.edges.iter().map(|&(a, b)| (id[&a], id[&b])).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let both = on_path.contains(&order[a]) && on_path.contains(&order[b]);
        writeln!(out, "  v{a} -> v{b}{};", if both { " [color=red, penwidth=2]" } else { "" }).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

#[derive(Serialize)]
struct JsonVertex<'a> {
    id: usize,
    level: i64,
    rep: &'a str,
    on_path: bool,
}

#[derive(Serialize)]
struct JsonCounts {
    vertices: usize,
    edges: usize,
    path: usize,
    descendants_of_root: usize,
}

#[derive(Serialize)]
struct JsonEnds {
    #[serde(rename = "-inf")]
    minus: Option<usize>,
    #[serde(rename = "+inf")]
    plus: Option<usize>,
}

#[derive(Serialize)]
struct JsonBall<'a> {
    schema: &'static str,
    parameters: JsonParams<'a>,
    counts: JsonCounts,
    vertices: Vec<JsonVertex<'a>>,
    edges: Vec<(usize, usize)>,
    path: Vec<usize>,
    ends: JsonEnds,
}

#[derive(Serialize)]
struct JsonParams<'a> {
    description: &'a str,
    levels: (i64, i64),
    root: i64,
    depth: u32,
    scale_inverse: String,
}

fn export_json<R>(ball: &CosetTreeBall<R>) -> String {
    let order = export_order(ball);
    let id: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let on_path: BTreeSet<usize> = ball.path.iter().copied().collect();
    let mut edges: Vec<(usize, usize)> = ball.edges.iter().map(|&(a, b)| (id[&a], id[&b])).collect();
    edges.sort_unstable();
    let path: Vec<usize> = ball.path.iter().map(|v| id[v]).collect();
    let descendants = match ball.path_vertex(ball.spec.root) {
        Some(r) => {
            let mut count = 0;
            let mut stack = vec![r];
            while let Some(v) = stack.pop() {
                count += 1;
                stack.extend(ball.out_edges(v).filter(|w| {
                    ball.vertices[*w].level <= ball.spec.root + ball.spec.depth as i64
                }));
            }
            count
        }
        None => 0,
    };
    let doc = JsonBall {
        schema: JSON_SCHEMA,
        parameters: JsonParams {
            description: &ball.description,
            levels: ball.spec.levels,
            root: ball.spec.root,
            depth: ball.spec.depth,
            scale_inverse: ball.scale_inverse.to_string(),
        },
        counts: JsonCounts {
            vertices: ball.vertices.len(),
            edges: edges.len(),
            path: path.len(),
            descendants_of_root: descendants,
        },
        vertices: order
            .iter()
            .map(|&v| JsonVertex {
                id: id[&v],
                level: ball.vertices[v].level,
                rep: &ball.vertices[v].key,
                on_path: on_path.contains(&v),
            })
            .collect(),
        ends: JsonEnds { minus: path.first().copied(), plus: path.last().copied() },
        edges,
        path,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}
