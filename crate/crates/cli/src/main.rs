//! `tdlc`: scales, tidy subgroups, membership queries, coset trees and the
//! structural check suite from the command line.
//!
//! Errors print a single line `CODE: message` on stderr and exit with
//! status 2; a failing suite exits with status 1.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tdlc::arith::{lattice_coindex, parse_rational, Matrix, Prime, Rational};
use tdlc::coset_tree::{
    build_ball, export, BallSpec, CosetModel, ExportFormat, MatrixCosetModel, ShiftCosetModel, BUDGET_ENV,
    DEFAULT_VERTEX_BUDGET,
};
use tdlc::engine::{
    membership, scale, tidy, GroupFamily, ScaleMethod, ScaleOptions, ScaleResult, Target, DEFAULT_CAP,
};
use tdlc::matrix::{adjoint_matrix, scale_via_newton, MatrixElement, MatrixFamily};
use tdlc::shift::{FiniteGroup, ShiftElement, ShiftFamily, SubgroupOfF};
use tdlc::suite::{run_suite, SuiteOptions, DEFAULT_CASES, DEFAULT_SEED};
use tdlc::tree::{tree_scale, Axis, DeclaredKind, TreeAut, TreeAutomorphismData};
use tdlc::{Error, Result};

#[derive(Parser)]
#[command(name = "tdlc", version, about = "Scales and tidy subgroups of automorphisms of t.d.l.c. groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute s(α), cross-checked by every available method
    Scale(ScaleArgs),
    /// Run the tidying procedure on a compact open subgroup
    Tidy(TidyArgs),
    /// Decide membership of an element in U_α, P_α, M_α or U_0
    Member(MemberArgs),
    /// Build and export a ball in the tree of V_- cosets
    Tree(TreeArgs),
    /// Run the seeded structural checks
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Shift,
    Matrix,
    Tree,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Prime for the matrix family
    #[arg(long)]
    p: Option<u64>,
    /// Diagonal entries as rationals, e.g. `5,1/5`
    #[arg(long, allow_hyphen_values = true)]
    diag: Option<String>,
    /// Matrix grid with `,` between entries and `;` between rows
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Finite group by name (`C<n>`, `S<n>`, `A<n>`, `D<n>`) or table file
    #[arg(long = "F", default_value = "S3")]
    f: String,
    /// Subgroup O of F (`trivial`, `all`, `center`, `A<n>`, `C<k>`, `gen:..`, `set:..`)
    #[arg(long = "O", default_value = "A3")]
    o: String,
    /// Exponent n of the shift σ^n
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    shift: i64,
    /// Tree valency minus one
    #[arg(long)]
    q: Option<u32>,
    /// Translation length of the tree automorphism
    #[arg(long)]
    l: Option<u32>,
    /// Use α^-1 in place of α
    #[arg(long)]
    inverse: bool,
}

#[derive(Args)]
struct ScaleArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Step-1 iteration cap
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Filtration levels scanned for the minimal displacement
    #[arg(long, default_value_t = DEFAULT_CAP as u32)]
    levels: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TidyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Shift family: `coordinate:subgroup`, repeatable; O elsewhere
    #[arg(long, allow_hyphen_values = true)]
    constraint: Vec<String>,
    /// Matrix family: start from the congruence subgroup of this level
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MemberArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Element: `i:label,...` for the shift family, a grid for the matrix family
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// U, P, M or U0; all four when omitted
    #[arg(long)]
    target: Option<String>,
    /// Iterations of α to examine
    #[arg(long, default_value_t = 16)]
    horizon: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Matrix family: level of the congruence subgroup V
    #[arg(long, default_value_t = 1)]
    level: i64,
    /// Lowest and highest path levels, e.g. `-1,1`
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    levels: String,
    /// Descendant generations below V^(0)
    #[arg(long, default_value_t = 2)]
    depth: u32,
    /// dot, json or summary
    #[arg(long, default_value = "dot")]
    format: String,
    /// Largest number of vertices to build
    #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_VERTEX_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CASES)]
    cases: usize,
    /// Check id, repeatable; all checks when omitted
    #[arg(long = "check")]
    checks: Vec<String>,
    #[arg(long)]
    json: bool,
}

enum Family {
    Shift(ShiftFamily),
    Matrix(MatrixFamily),
    /// A matrix without a rational diagonal form; only its scale is known.
    Bare(MatrixElement),
    Tree { q: u32, l: u32 },
}

fn missing(flag: &str, family: &str) -> Error {
    Error::InvalidInput(format!("--{flag} is required for the {family} family"))
}

fn finite_group(spec: &str) -> Result<FiniteGroup> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("F");
        return FiniteGroup::parse_table(name, &text);
    }
    FiniteGroup::by_name(spec)
}

impl FamilyArgs {
    fn build(&self) -> Result<Family> {
        match self.family {
            FamilyName::Shift => {
                let g = finite_group(&self.f)?;
                let o = SubgroupOfF::parse(&g, &self.o)?;
                let n = if self.inverse { -self.shift } else { self.shift };
                Ok(Family::Shift(ShiftFamily::new(g, o, n)?))
            }
            FamilyName::Matrix => {
                let p = Prime::new(self.p.ok_or_else(|| missing("p", "matrix"))?)?;
                let entries = match (&self.diag, &self.matrix) {
                    (Some(d), None) => {
                        let d: Vec<Rational> = d.split(',').map(parse_rational).collect::<Result<_>>()?;
                        Matrix::diagonal(&d)
                    }
                    (None, Some(m)) => Matrix::parse_grid(m)?,
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidInput("give either --diag or --matrix, not both".into()))
                    }
                    (None, None) => return Err(missing("diag or --matrix", "matrix")),
                };
                let mut g = MatrixElement::auto(entries, p)?;
                if self.inverse {
                    g = g.inverse()?;
                }
                match MatrixFamily::new(g.clone()) {
                    Err(Error::MissingDiagonalForm) => Ok(Family::Bare(g)),
                    other => Ok(Family::Matrix(other?)),
                }
            }
            FamilyName::Tree => {
                let q = self.q.ok_or_else(|| missing("q", "tree"))?;
                let l = self.l.ok_or_else(|| missing("l", "tree"))?;
                Ok(Family::Tree { q, l })
            }
        }
    }
}

fn tree_data(q: u32, l: u32, inverse: bool) -> Result<TreeAutomorphismData> {
    let radius = l + 2;
    if l == 0 {
        return TreeAutomorphismData::identity(q, radius);
    }
    if !inverse {
        return TreeAutomorphismData::translation(q, l, radius);
    }
    let std = Axis::standard();
    let axis = Axis { forward: std.backward, backward: std.forward };
    TreeAutomorphismData::declare(&TreeAut::translation(q, -(l as i64))?, DeclaredKind::Hyperbolic { axis, l }, radius)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn print_scale(name: &str, r: &ScaleResult, json: bool) {
    if json {
        print_json(&json!({ "family": name, "result": r }));
        return;
    }
    println!("{}", r.value);
    println!("family {name}");
    println!("method {}", r.method);
    for c in &r.cross_checks {
        println!("check {} {}", c.method, c.value);
    }
}

fn cmd_scale(a: &ScaleArgs) -> Result<bool> {
    let opts = ScaleOptions { cap: a.cap, filtration_levels: a.levels };
    match a.family.build()? {
        Family::Shift(f) => print_scale(&f.name(), &scale(&f, opts)?, a.json),
        Family::Matrix(f) => print_scale(&f.name(), &scale(&f, opts)?, a.json),
        Family::Bare(g) => {
            let newton = scale_via_newton(&g.entries, g.p)?;
            let coindex = lattice_coindex(&adjoint_matrix(&g.entries)?, g.p)?;
            let r = ScaleResult::agreeing(
                ScaleMethod::ClosedForm,
                vec![(ScaleMethod::ClosedForm, newton), (ScaleMethod::LatticeCoindex, coindex)],
            )?;
            print_scale(&format!("GL{}(Q{}) conj by {}", g.n(), g.p.get(), g.entries.to_grid()), &r, a.json);
        }
        Family::Tree { q, l } => {
            let name = format!("tree q={q} translation {l}");
            print_scale(&name, &tree_scale(&tree_data(q, l, a.family.inverse)?)?, a.json);
        }
    }
    Ok(true)
}

fn tidy_fields<F: GroupFamily>(
    fam: &F,
    v: &F::Subgroup,
    cap: usize,
    render: impl Fn(&F::Subgroup) -> String,
) -> Result<Vec<(&'static str, Value)>> {
    let r = tidy(fam, v, cap)?;
    Ok(vec![
        ("family", json!(r.family)),
        ("input", json!(render(&r.input))),
        ("step1_iterations", json!(r.step1_iterations)),
        ("after_step1", json!(render(&r.after_step1))),
        ("output", json!(render(&r.output))),
        ("v_plus", json!(render(&r.v_plus))),
        ("v_minus", json!(render(&r.v_minus))),
        ("v_zero", json!(render(&r.v_zero))),
        ("tidy", json!(r.tidy)),
        ("scale", json!(r.scale.to_string())),
        ("scale_inverse", json!(r.scale_inverse.to_string())),
    ])
}

fn cmd_tidy(a: &TidyArgs) -> Result<bool> {
    let fields = match a.family.build()? {
        Family::Shift(f) => {
            let v = f.parse_constraints(&a.constraint)?;
            let mut fields = tidy_fields(&f, &v, a.cap, |s| s.render(f.group()))?;
            fields.push(("output_is_all_o", json!(tidy(&f, &v, a.cap)?.output == f.all_o())));
            fields
        }
        Family::Matrix(f) => {
            if !a.constraint.is_empty() {
                return Err(Error::InvalidInput("--constraint applies to the shift family only".into()));
            }
            tidy_fields(&f, &f.filtration(a.level), a.cap, |s| s.to_string())?
        }
        Family::Bare(_) => return Err(Error::MissingDiagonalForm),
        Family::Tree { .. } => {
            return Err(Error::Unsupported("tidying is implemented for the shift and matrix families".into()))
        }
    };
    if a.json {
        let map: serde_json::Map<String, Value> = fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        print_json(&Value::Object(map));
    } else {
        for (k, v) in fields {
            match v {
                Value::String(s) => println!("{k} {s}"),
                other => println!("{k} {other}"),
            }
        }
    }
    Ok(true)
}

fn cmd_member(a: &MemberArgs) -> Result<bool> {
    let targets = match &a.target {
        Some(t) => vec![t.parse::<Target>()?],
        None => Target::ALL.to_vec(),
    };
    fn run<F: GroupFamily>(f: &F, x: &F::Element, targets: &[Target], horizon: u32) -> Result<Vec<(Target, Value)>> {
        targets
            .iter()
            .map(|&t| Ok((t, serde_json::to_value(membership(f, x, t, horizon)?).expect("verdict serializes"))))
            .collect()
    }
    let (name, x, verdicts) = match a.family.build()? {
        Family::Shift(f) => {
            let x = ShiftElement::parse(f.group(), &a.x)?;
            (f.name(), f.render(&x), run(&f, &x, &targets, a.horizon)?)
        }
        Family::Matrix(f) => {
            let x = Matrix::parse_grid(&a.x)?;
            (f.name(), f.render(&x), run(&f, &x, &targets, a.horizon)?)
        }
        Family::Bare(_) => return Err(Error::MissingDiagonalForm),
        Family::Tree { .. } => {
            return Err(Error::Unsupported("membership is implemented for the shift and matrix families".into()))
        }
    };
    if a.json {
        let map: serde_json::Map<String, Value> = verdicts.into_iter().map(|(t, v)| (t.to_string(), v)).collect();
        print_json(&json!({ "family": name, "x": x, "verdicts": map }));
    } else {
        println!("family {name}");
        println!("x {x}");
        for (t, v) in verdicts {
            let witness = v["witness"].as_str().map(|w| format!(" ({w})")).unwrap_or_default();
            println!("{t} {}{witness}", v["verdict"].as_str().unwrap_or("?"));
        }
    }
    Ok(true)
}

fn parse_levels(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("expected `low,high` levels, got {s:?}"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn emit_ball<M: CosetModel>(model: &M, spec: BallSpec, budget: u64, format: &str) -> Result<()> {
    let ball = build_ball(model, spec, budget)?;
    if format == "summary" {
        let r = tdlc::coset_tree::verify_local_structure(model, &ball)?;
        println!("{}", ball.description);
        println!("vertices {}", r.vertices);
        println!("edges {}", r.edges);
        println!("scale_inverse {}", r.scale_inverse);
        let degrees: Vec<String> = r.interior_degrees.iter().map(|d| d.to_string()).collect();
        println!("interior_degrees {}", degrees.join(","));
        println!("violations {}", r.violations.len());
        return Ok(());
    }
    let fmt: ExportFormat = format.parse()?;
    print!("{}", export(&ball, fmt));
    Ok(())
}

fn cmd_tree(a: &TreeArgs) -> Result<bool> {
    let levels = parse_levels(&a.levels)?;
    let spec = BallSpec { levels, root: 0, depth: a.depth };
    match a.family.build()? {
        Family::Shift(f) => emit_ball(&ShiftCosetModel::standard(f)?, spec, a.budget, &a.format)?,
        Family::Matrix(f) => emit_ball(&MatrixCosetModel::new(f, a.level)?, spec, a.budget, &a.format)?,
        Family::Bare(_) => return Err(Error::MissingDiagonalForm),
        Family::Tree { .. } => {
            return Err(Error::Unsupported("coset trees are built for the shift and matrix families".into()))
        }
    }
    Ok(true)
}

fn cmd_suite(a: &SuiteArgs) -> Result<bool> {
    let opts = SuiteOptions { seed: a.seed, cases: a.cases, ids: a.checks.clone() };
    let report = run_suite(&opts)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        for line in report.summary_lines() {
            println!("{line}");
        }
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Scale(a) => cmd_scale(a),
        Command::Tidy(a) => cmd_tidy(a),
        Command::Member(a) => cmd_member(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Suite(a) => cmd_suite(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
