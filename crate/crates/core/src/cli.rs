//! The `chc` command-line front end.
//!
//! Every subcommand produces an [`Outcome`] holding a text rendering, a JSON
//! report with sorted keys, and an exit code: 0 found/true, 1 none/false,
//! 2 error. Timing is only reported with `--timing`, so JSON reports are
//! byte-identical across runs and worker counts.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{validate_surface, Fixture, SurfaceReport, Triangulation};
use crate::disk::{
    brute_force_chc, cycle_is_contractible, find_chc, ChcSearch, DiskError, VertexCycle, DEFAULT_ORACLE_LIMIT,
};
use crate::dual::dualize;
use crate::tree::{check_proper, enumerate_proper_trees_with, CandidateTree, SearchOptions, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(name = "chc", version, about = "Contractible Hamiltonian cycles via proper trees in dual maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit a JSON report with sorted keys.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for the searches (1 = sequential).
    #[arg(long, global = true, default_value_t = default_threads())]
    pub threads: usize,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Triangulation file (one triangle per line, `#` comments).
    #[arg(conflicts_with = "fixture", required_unless_present = "fixture")]
    pub file: Option<PathBuf>,
    /// Built-in fixture, e.g. `icosahedron` or `torus_grid(3,4)`.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check that the input triangulates a connected closed surface.
    Validate(InputArgs),
    /// Print counts, Euler characteristic, orientability and degree.
    Info(InputArgs),
    /// Print the dual map, one face walk per line.
    Dual(InputArgs),
    /// Search for a proper tree in the dual map.
    FindTree {
        #[command(flatten)]
        input: InputArgs,
        /// Enumerate all proper trees instead of stopping at the first.
        #[arg(long)]
        all: bool,
        /// Maximum number of trees listed with --all.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, env = "CHC_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Search for a contractible Hamiltonian cycle.
    FindCycle {
        #[command(flatten)]
        input: InputArgs,
        /// Also run the brute-force oracle and compare verdicts.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        #[arg(long, env = "CHC_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Decide whether a cycle bounds a disk.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated vertex labels.
        #[arg(long, value_delimiter = ',', required = true)]
        cycle: Vec<String>,
    },
    /// Print a fixture in the triangle-list format.
    Gen {
        /// Family name, e.g. `octahedron`, `torus_grid(3,4)` or `torus_grid 3 4`.
        family: String,
        params: Vec<usize>,
    },
    /// Compare the proper-tree verdict with the oracle on several inputs.
    Census {
        /// Fixture names or triangulation files.
        inputs: Vec<String>,
        /// Add the seven standard fixtures.
        #[arg(long)]
        standard: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        #[arg(long, env = "CHC_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub threads: usize,
    pub timing: bool,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        RunConfig {
            command: self.command,
            threads: self.threads,
            timing: self.timing,
        }
    }
}

/// Rendered result of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub report: Value,
    pub exit_code: u8,
    /// Diagnostic for the error stream.
    pub message: Option<String>,
}

impl Outcome {
    fn new(text: String, report: Value, exit_code: u8) -> Self {
        Outcome {
            text,
            report,
            exit_code,
            message: None,
        }
    }

    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("serializable report");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
#[error("census disagreement on {}", .0.join(", "))]
pub struct DisagreementDetected(pub Vec<String>);

fn load(input: &InputArgs) -> Result<(String, Triangulation)> {
    match (&input.file, &input.fixture) {
        (_, Some(spec)) => {
            let f = Fixture::parse(spec)?;
            Ok((f.to_string(), f.generate()?))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let t = Triangulation::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok((path.display().to_string(), t))
        }
        (None, None) => bail!("no input: give a file or --fixture"),
    }
}

fn surface_json(r: &SurfaceReport) -> Value {
    serde_json::to_value(r).expect("serializable report")
}

fn tree_json(tree: &CandidateTree, m: &crate::dual::PolyhedralMap, t: &Triangulation) -> Value {
    let verdict = check_proper(tree, m, t);
    let (proper, violations) = match &verdict {
        Ok(v) => (
            v.is_proper(),
            v.violations.iter().map(|x| x.describe(t)).collect::<Vec<_>>(),
        ),
        Err(e) => (false, vec![e.to_string()]),
    };
    json!({
        "vertices": tree.vertices().iter().map(|u| Triangulation::triangle_name(*u)).collect::<Vec<_>>(),
        "edges": tree.edges().iter().map(|[a, b]| [Triangulation::triangle_name(*a), Triangulation::triangle_name(*b)]).collect::<Vec<_>>(),
        "proper": proper,
        "violations": violations,
    })
}

fn tree_text(tree: &CandidateTree) -> String {
    let vs: Vec<String> = tree.vertices().iter().map(|u| format!("t{u}")).collect();
    let es: Vec<String> = tree.edges().iter().map(|[a, b]| format!("t{a}-t{b}")).collect();
    format!("{} | {}", vs.join(" "), es.join(" "))
}

fn names(ts: &[usize]) -> Vec<String> {
    ts.iter().map(|&u| Triangulation::triangle_name(u)).collect()
}

pub fn run(config: RunConfig) -> Result<Outcome> {
    let started = Instant::now();
    let threads = config.threads.max(1);
    let mut outcome = match &config.command {
        Command::Validate(input) => {
            let (name, t) = load(input)?;
            match validate_surface(&t) {
                Ok(r) => Outcome::new(
                    format!("{name}: valid closed surface\n{r}\n"),
                    json!({"command": "validate", "input": name, "valid": true, "surface": surface_json(&r)}),
                    0,
                ),
                Err(e) => Outcome::new(
                    format!("{name}: invalid: {e}\n"),
                    json!({"command": "validate", "input": name, "valid": false, "error": e.to_string()}),
                    1,
                ),
            }
        }
        Command::Info(input) => {
            let (name, t) = load(input)?;
            let r = validate_surface(&t)?;
            Outcome::new(
                format!("{r}\n"),
                json!({"command": "info", "input": name, "surface": surface_json(&r)}),
                0,
            )
        }
        Command::Dual(input) => {
            let (name, t) = load(input)?;
            let (m, corr) = dualize(&t)?;
            let mut text = String::new();
            for (i, tri) in t.triangles().iter().enumerate() {
                let [a, b, c] = tri.map(|v| t.label(v));
                writeln!(text, "# t{i} = {a} {b} {c}")?;
            }
            let mut faces = Vec::new();
            for f in 0..m.face_count() {
                let v = corr.vertex_of(f);
                let walk = names(m.walk(f));
                writeln!(text, "{}: {}", t.label(v), walk.join(" "))?;
                faces.push(json!({"vertex": t.label(v), "walk": walk}));
            }
            let triangles: Vec<Value> = t
                .triangles()
                .iter()
                .enumerate()
                .map(|(i, tri)| json!({"id": format!("t{i}"), "vertices": tri.map(|v| t.label(v))}))
                .collect();
            Outcome::new(
                text,
                json!({
                    "command": "dual",
                    "input": name,
                    "dual_vertices": m.vertex_count(),
                    "dual_edges": m.edge_count(),
                    "faces": faces,
                    "triangles": triangles,
                }),
                0,
            )
        }
        Command::FindTree { input, all, cap, budget } => {
            let (name, t) = load(input)?;
            let r = validate_surface(&t)?;
            let (m, _) = dualize(&t)?;
            let opts = SearchOptions {
                budget: *budget,
                threads,
            };
            let limit = if *all { *cap } else { Some(1) };
            let e = enumerate_proper_trees_with(&m, &t, opts, limit);
            let verdict = match (e.trees.is_empty(), e.complete) {
                (false, _) => "found",
                (true, true) => "none",
                (true, false) => "budget_exceeded",
            };
            let mut text = format!("verdict: {verdict}\nexpansions: {}\n", e.expansions);
            let mut report = json!({
                "command": "find-tree",
                "input": name,
                "surface": surface_json(&r),
                "verdict": verdict,
                "expansions": e.expansions,
            });
            if *all {
                writeln!(text, "trees: {}{}", e.trees.len(), if e.complete { "" } else { " (incomplete)" })?;
                for tree in &e.trees {
                    writeln!(text, "{}", tree_text(tree))?;
                }
                report["complete"] = json!(e.complete);
                report["count"] = json!(e.trees.len());
                report["trees"] = e.trees.iter().map(|tr| tree_json(tr, &m, &t)).collect();
            } else if let Some(tree) = e.trees.first() {
                writeln!(text, "{tree}")?;
                report["tree"] = tree_json(tree, &m, &t);
            }
            let code = if e.trees.is_empty() { 1 } else { 0 };
            Outcome::new(text, report, code)
        }
        Command::FindCycle {
            input,
            oracle,
            oracle_limit,
            budget,
        } => {
            let (name, t) = load(input)?;
            let r = validate_surface(&t)?;
            let (m, _) = dualize(&t)?;
            let res = find_chc(&t, SearchOptions { budget: *budget, threads })?;
            let mut text = String::new();
            let mut report = json!({
                "command": "find-cycle",
                "input": name,
                "surface": surface_json(&r),
                "expansions": res.expansions,
            });
            let verdict = match &res.outcome {
                ChcSearch::Found(w) => {
                    writeln!(text, "verdict: found")?;
                    writeln!(text, "cycle: {}", w.cycle.labels(&t).join(","))?;
                    writeln!(text, "disk: {}", names(w.disk.faces()).join(" "))?;
                    report["cycle"] = json!(w.cycle.labels(&t));
                    report["disk"] = json!(names(w.disk.faces()));
                    report["tree"] = tree_json(&w.tree, &m, &t);
                    "found"
                }
                ChcSearch::None => "none",
                ChcSearch::BudgetExceeded => "budget_exceeded",
            };
            if !matches!(res.outcome, ChcSearch::Found(_)) {
                writeln!(text, "verdict: {verdict}")?;
            }
            writeln!(text, "expansions: {}", res.expansions)?;
            report["verdict"] = json!(verdict);
            let mut code = if verdict == "found" { 0 } else { 1 };
            let mut message = None;
            if *oracle {
                let o = brute_force_chc(&t, *oracle_limit, threads)?;
                let ov = if o.cycle.is_some() { "found" } else { "none" };
                writeln!(text, "oracle: {ov}")?;
                if let Some(c) = &o.cycle {
                    writeln!(text, "oracle cycle: {}", c.labels(&t).join(","))?;
                }
                let mut oj = json!({"verdict": ov, "cycles_tested": o.cycles_tested});
                if let Some(c) = &o.cycle {
                    oj["cycle"] = json!(c.labels(&t));
                }
                report["oracle"] = oj;
                if verdict != "budget_exceeded" {
                    let agree = verdict == ov;
                    writeln!(text, "agreement: {agree}")?;
                    report["agreement"] = json!(agree);
                    if !agree {
                        code = 2;
                        message = Some(DisagreementDetected(vec![name.clone()]).to_string());
                    }
                }
            }
            let mut out = Outcome::new(text, report, code);
            out.message = message;
            out
        }
        Command::Verify { input, cycle } => {
            let (name, t) = load(input)?;
            validate_surface(&t)?;
            let h = VertexCycle::from_labels(&t, cycle)?;
            let c = cycle_is_contractible(&t, &h)?;
            let mut text = format!("contractible: {}\ncycle: {}\n", c.is_contractible(), h.labels(&t).join(","));
            let mut report = json!({
                "command": "verify",
                "input": name,
                "cycle": h.labels(&t),
                "hamiltonian": h.is_hamiltonian(&t),
                "contractible": c.is_contractible(),
            });
            if let Some(w) = &c.witness {
                writeln!(text, "witness: {}", names(w).join(" "))?;
                report["witness"] = json!(names(w));
            }
            Outcome::new(text, report, if c.is_contractible() { 0 } else { 1 })
        }
        Command::Gen { family, params } => {
            let spec = if params.is_empty() {
                family.clone()
            } else {
                let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
                format!("{family}({})", ps.join(","))
            };
            let f = Fixture::parse(&spec)?;
            let t = f.generate()?;
            let text = format!("# {f}\n{}", t.to_text());
            let triangles: Vec<Vec<&str>> = t
                .triangles()
                .iter()
                .map(|tri| tri.iter().map(|&v| t.label(v)).collect())
                .collect();
            Outcome::new(
                text,
                json!({"command": "gen", "fixture": f.to_string(), "triangles": triangles}),
                0,
            )
        }
        Command::Census {
            inputs,
            standard,
            oracle_limit,
            budget,
        } => {
            let mut items = Vec::new();
            if *standard {
                for f in Fixture::STANDARD {
                    items.push((f.to_string(), f.generate()?));
                }
            }
            for spec in inputs {
                let input = match Fixture::parse(spec) {
                    Ok(_) => InputArgs {
                        file: None,
                        fixture: Some(spec.clone()),
                    },
                    Err(_) => InputArgs {
                        file: Some(PathBuf::from(spec)),
                        fixture: None,
                    },
                };
                items.push(load(&input)?);
            }
            let opts = SearchOptions {
                budget: *budget,
                threads,
            };
            let (rows, disagreement) = match census(&items, opts, *oracle_limit) {
                Ok(rows) => (rows, None),
                Err(CensusError::Disagreement { rows, names }) => (rows, Some(DisagreementDetected(names))),
                Err(CensusError::Other(e)) => return Err(e.into()),
            };
            let mut text = String::from("fixture\tn\tq\tchi\torientable\tproper_tree\toracle\tagreement\n");
            for r in &rows {
                writeln!(
                    text,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.name,
                    r.report.vertices,
                    r.report.equivelar_degree.map_or("-".to_string(), |q| q.to_string()),
                    r.report.euler_characteristic,
                    r.report.orientable,
                    r.proper_tree,
                    r.oracle,
                    r.agreement.map_or("-".to_string(), |a| a.to_string()),
                )?;
            }
            let report = json!({
                "command": "census",
                "rows": rows.iter().map(CensusRow::to_json).collect::<Vec<_>>(),
            });
            let mut out = Outcome::new(text, report, if disagreement.is_some() { 2 } else { 0 });
            out.message = disagreement.map(|d| d.to_string());
            out
        }
    };
    if config.timing {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        outcome.report["timing_ms"] = json!(ms);
        writeln!(outcome.text, "time: {ms:.1} ms")?;
    }
    Ok(outcome)
}

/// One census line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub name: String,
    pub report: SurfaceReport,
    /// `exists`, `none`, `budget_exceeded` or `not_equivelar`.
    pub proper_tree: &'static str,
    /// `exists`, `none` or `too_large`.
    pub oracle: &'static str,
    /// `None` when either side is undecided.
    pub agreement: Option<bool>,
}

impl CensusRow {
    fn to_json(&self) -> Value {
        json!({
            "fixture": self.name,
            "n": self.report.vertices,
            "q": self.report.equivelar_degree,
            "chi": self.report.euler_characteristic,
            "orientable": self.report.orientable,
            "proper_tree": self.proper_tree,
            "oracle": self.oracle,
            "agreement": self.agreement,
        })
    }
}

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census disagreement on {}", .names.join(", "))]
    Disagreement { rows: Vec<CensusRow>, names: Vec<String> },
    #[error(transparent)]
    Other(#[from] DiskError),
}

/// Runs the proper-tree search and the oracle on every input and compares
/// their verdicts. Any decided disagreement is an error.
pub fn census(
    inputs: &[(String, Triangulation)],
    opts: SearchOptions,
    oracle_limit: usize,
) -> Result<Vec<CensusRow>, CensusError> {
    let mut rows = Vec::new();
    for (name, t) in inputs {
        let report = validate_surface(t).map_err(DiskError::from)?;
        let proper_tree = match find_chc(t, opts) {
            Ok(r) => match r.outcome {
                ChcSearch::Found(_) => "exists",
                ChcSearch::None => "none",
                ChcSearch::BudgetExceeded => "budget_exceeded",
            },
            Err(DiskError::NotEquivelar) => "not_equivelar",
            Err(e) => return Err(e.into()),
        };
        let oracle = match brute_force_chc(t, oracle_limit, opts.threads) {
            Ok(o) if o.cycle.is_some() => "exists",
            Ok(_) => "none",
            Err(DiskError::TooLarge { .. }) => "too_large",
            Err(e) => return Err(e.into()),
        };
        let decided = |s: &str| s == "exists" || s == "none";
        let agreement = (decided(proper_tree) && decided(oracle)).then(|| proper_tree == oracle);
        rows.push(CensusRow {
            name: name.clone(),
            report,
            proper_tree,
            oracle,
            agreement,
        });
    }
    let names: Vec<String> = rows
        .iter()
        .filter(|r| r.agreement == Some(false))
        .map(|r| r.name.clone())
        .collect();
    if names.is_empty() {
        Ok(rows)
    } else {
        Err(CensusError::Disagreement { rows, names })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> InputArgs {
        InputArgs {
            file: None,
            fixture: Some(name.to_string()),
        }
    }

    fn config(command: Command) -> RunConfig {
        RunConfig {
            command,
            threads: 1,
            timing: false,
        }
    }

    #[test]
    fn info_on_tetrahedron() {
        let out = run(config(Command::Info(fixture("tetrahedron")))).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["surface"]["euler_characteristic"], 2);
        assert_eq!(out.report["surface"]["equivelar_degree"], 3);
        assert_eq!(out.report["surface"]["orientable"], true);
    }

    #[test]
    fn empty_census() {
        let rows = census(&[], SearchOptions::default(), DEFAULT_ORACLE_LIMIT).unwrap();
        assert!(rows.is_empty());
        let out = run(config(Command::Census {
            inputs: vec![],
            standard: false,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            budget: DEFAULT_BUDGET,
        }))
        .unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["rows"], json!([]));
    }

    #[test]
    fn platonic_census() {
        let items: Vec<_> = ["tetrahedron", "octahedron", "icosahedron"]
            .iter()
            .map(|s| (s.to_string(), crate::generate_fixture(s).unwrap()))
            .collect();
        let rows = census(&items, SearchOptions::default(), DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!(rows.len(), 3);
        for r in rows {
            assert_eq!((r.proper_tree, r.oracle, r.agreement), ("exists", "exists", Some(true)));
        }
    }

    #[test]
    fn gen_accepts_separate_params() {
        let out = run(config(Command::Gen {
            family: "torus_grid".into(),
            params: vec![3, 4],
        }))
        .unwrap();
        assert!(out.text.starts_with("# torus_grid(3,4)\n"));
        assert_eq!(out.text.lines().count(), 25);
    }
}
