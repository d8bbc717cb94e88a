//! Proper trees in the dual map: checking, search and enumeration.
//!
//! A proper tree has `n - 2` dual vertices, and on every dual face the tree
//! vertices form one contiguous arc of the boundary walk whose edges are tree
//! edges, with at most `q - 2` edges (`len(F) - 2` for non-equivelar input).
//!
//! The search grows connected subtrees from each seed in ascending order and
//! only admits a dual vertex `c` that touches the current tree `S` in exactly
//! one neighbour `s`. Then `c` and `s` share the primal edge `{v, w}`, so the
//! arcs on faces `v` and `w` grow by one at an end, and the face at the
//! remaining vertex of `c` must not meet `S` yet, otherwise its arc breaks.
//! Every rejection is permanent under growth, so rejected candidates are
//! dropped for the rest of the branch.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{equivelar_degree, Triangulation};
use crate::dual::{DualVertex, PolyhedralMap};

/// Default limit on search-node expansions.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("not a tree: {0}")]
    NotATree(String),
}

/// A subgraph of the dual edge graph proposed as a proper tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateTree {
    vertices: Vec<DualVertex>,
    edges: Vec<[DualVertex; 2]>,
}

impl CandidateTree {
    /// Normalizes vertex and edge order; structure is checked by
    /// [`check_proper`].
    pub fn new(vertices: Vec<DualVertex>, edges: Vec<[DualVertex; 2]>) -> Self {
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<_> = edges.into_iter().map(|[a, b]| [a.min(b), a.max(b)]).collect();
        edges.sort_unstable();
        edges.dedup();
        CandidateTree { vertices, edges }
    }

    /// The subgraph of `m` induced by `vertices`.
    pub fn induced(m: &PolyhedralMap, vertices: Vec<DualVertex>) -> Self {
        let set: HashSet<_> = vertices.iter().copied().collect();
        let edges = m
            .edges()
            .iter()
            .copied()
            .filter(|[a, b]| set.contains(a) && set.contains(b))
            .collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[DualVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[DualVertex; 2]] {
        &self.edges
    }

    pub fn degree(&self, u: DualVertex) -> usize {
        self.edges.iter().filter(|e| e.contains(&u)).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.vertices.iter().filter(|&&u| self.degree(u) == 1).count()
    }

    /// Number of vertices of degree three.
    pub fn branch_count(&self) -> usize {
        self.vertices.iter().filter(|&&u| self.degree(u) == 3).count()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices.iter().map(|&u| self.degree(u)).max().unwrap_or(0)
    }

    fn check_structure(&self, m: &PolyhedralMap) -> Result<(), TreeError> {
        if self.vertices.is_empty() {
            return Err(TreeError::NotATree("no vertices".into()));
        }
        if let Some(&u) = self.vertices.iter().find(|&&u| u >= m.vertex_count()) {
            return Err(TreeError::NotATree(format!("t{u} is not a dual vertex")));
        }
        let index = |u: DualVertex| self.vertices.binary_search(&u).ok();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &[a, b] in &self.edges {
            if a >= m.vertex_count() || m.edge_between(a, b).is_none() {
                return Err(TreeError::NotATree(format!("t{a}-t{b} is not a dual edge")));
            }
            let (Some(ia), Some(ib)) = (index(a), index(b)) else {
                return Err(TreeError::NotATree(format!("edge t{a}-t{b} leaves the vertex set")));
            };
            let (ra, rb) = (root(&mut parent, ia), root(&mut parent, ib));
            if ra == rb {
                return Err(TreeError::NotATree(format!("edge t{a}-t{b} closes a cycle")));
            }
            parent[ra] = rb;
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return Err(TreeError::NotATree("disconnected".into()));
        }
        Ok(())
    }
}

/// Why a tree fails to be proper. Faces are named by primal vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The tree does not have `n - 2` vertices.
    WrongSize { expected: usize, actual: usize },
    /// Tree vertices on the face do not form one contiguous arc.
    NotContiguous { face: usize },
    /// The arc is contiguous but one of its walk edges is not a tree edge.
    ArcEdgeMissing { face: usize },
    /// The arc has more edges than allowed.
    ArcTooLong { face: usize, length: usize, limit: usize },
}

impl Violation {
    pub fn describe(&self, t: &Triangulation) -> String {
        match *self {
            Violation::WrongSize { expected, actual } => {
                format!("size: tree has {actual} vertices, expected {expected}")
            }
            Violation::NotContiguous { face } => {
                format!("condition 1: tree vertices on face {} are not one boundary arc", t.label(face))
            }
            Violation::ArcEdgeMissing { face } => {
                format!("condition 1: boundary arc on face {} uses a non-tree edge", t.label(face))
            }
            Violation::ArcTooLong { face, length, limit } => format!(
                "condition 2: boundary arc on face {} has length {length} > {limit}",
                t.label(face)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperVerdict {
    /// All violations, in face order; the first is the one reported.
    pub violations: Vec<Violation>,
}

impl ProperVerdict {
    pub fn is_proper(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Longest allowed arc on face `v`.
fn arc_limit(q: Option<usize>, walk_len: usize) -> usize {
    q.unwrap_or(walk_len).saturating_sub(2)
}

/// Checks the proper-tree conditions directly from the definition.
pub fn check_proper(tree: &CandidateTree, m: &PolyhedralMap, t: &Triangulation) -> Result<ProperVerdict, TreeError> {
    tree.check_structure(m)?;
    let mut violations = Vec::new();
    let expected = t.vertex_count() - 2;
    if tree.vertices.len() != expected {
        violations.push(Violation::WrongSize {
            expected,
            actual: tree.vertices.len(),
        });
    }
    let q = equivelar_degree(t);
    let in_tree: HashSet<DualVertex> = tree.vertices.iter().copied().collect();
    let tree_edges: HashSet<[DualVertex; 2]> = tree.edges.iter().copied().collect();
    let is_tree_edge = |a: DualVertex, b: DualVertex| tree_edges.contains(&[a.min(b), a.max(b)]);

    for (face, walk) in m.faces().iter().enumerate() {
        let len = walk.len();
        let marked: Vec<bool> = walk.iter().map(|u| in_tree.contains(u)).collect();
        let count = marked.iter().filter(|&&b| b).count();
        if count == 0 {
            continue;
        }
        // walk edge i joins walk[i] and walk[i + 1]
        let arc_edges = |start: usize| (0..count - 1).map(move |k| (start + k) % len);
        let start = if count == len {
            // every vertex of the face: the arc must omit exactly one walk edge
            let missing: Vec<usize> = (0..len)
                .filter(|&i| !is_tree_edge(walk[i], walk[(i + 1) % len]))
                .collect();
            if missing.len() != 1 {
                violations.push(Violation::ArcEdgeMissing { face });
                continue;
            }
            (missing[0] + 1) % len
        } else {
            let starts: Vec<usize> = (0..len)
                .filter(|&i| marked[i] && !marked[(i + len - 1) % len])
                .collect();
            if starts.len() != 1 {
                violations.push(Violation::NotContiguous { face });
                continue;
            }
            starts[0]
        };
        if arc_edges(start).any(|i| !is_tree_edge(walk[i], walk[(i + 1) % len])) {
            violations.push(Violation::ArcEdgeMissing { face });
            continue;
        }
        let limit = arc_limit(q, len);
        if count - 1 > limit {
            violations.push(Violation::ArcTooLong {
                face,
                length: count - 1,
                limit,
            });
        }
    }
    Ok(ProperVerdict { violations })
}

/// Worker and budget settings shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of search-node expansions.
    pub budget: u64,
    /// Worker threads; 1 runs sequentially.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSearch {
    Found(CandidateTree),
    /// The whole search space was exhausted: no proper tree exists.
    None,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: TreeSearch,
    /// Expansions spent, counted in sequential order.
    pub expansions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub trees: Vec<CandidateTree>,
    /// False when the budget ran out before the space (or the cap) was done.
    pub complete: bool,
    pub expansions: u64,
}

/// Finds the first proper tree in search order.
pub fn find_proper_tree(m: &PolyhedralMap, t: &Triangulation, opts: SearchOptions) -> SearchResult {
    let e = enumerate_proper_trees_with(m, t, opts, Some(1));
    let outcome = match e.trees.into_iter().next() {
        Some(tree) => TreeSearch::Found(tree),
        None if e.complete => TreeSearch::None,
        None => TreeSearch::BudgetExceeded,
    };
    SearchResult {
        outcome,
        expansions: e.expansions,
    }
}

/// All proper trees in search order, up to `cap`, with the default budget.
pub fn enumerate_proper_trees(m: &PolyhedralMap, t: &Triangulation, cap: Option<usize>) -> Vec<CandidateTree> {
    enumerate_proper_trees_with(m, t, SearchOptions::default(), cap).trees
}

/// Result of searching from one seed with a local budget.
struct SeedRun {
    /// Trees with the local expansion count at which each was found.
    found: Vec<(CandidateTree, u64)>,
    expansions: u64,
    finished: bool,
}

pub fn enumerate_proper_trees_with(
    m: &PolyhedralMap,
    t: &Triangulation,
    opts: SearchOptions,
    cap: Option<usize>,
) -> Enumeration {
    let cap = cap.unwrap_or(usize::MAX);
    if cap == 0 {
        return Enumeration {
            trees: Vec::new(),
            complete: true,
            expansions: 0,
        };
    }
    let searcher = Searcher::new(m, t);
    let seeds = 0..m.vertex_count();

    let runs: Vec<SeedRun> = if opts.threads <= 1 {
        let mut runs = Vec::new();
        let (mut spent, mut collected) = (0u64, 0usize);
        for seed in seeds {
            let run = searcher.run(seed, opts.budget - spent, cap - collected);
            spent += run.expansions;
            collected += run.found.len();
            let stop = !run.finished || collected >= cap;
            runs.push(run);
            if stop {
                break;
            }
        }
        runs
    } else {
        // Seeds run independently with the full budget; the sequential
        // outcome is reconstructed below. When only one tree is wanted,
        // seeds after the smallest successful one are skipped.
        let best = AtomicUsize::new(usize::MAX);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            seeds
                .into_par_iter()
                .map(|seed| {
                    if cap == 1 && seed > best.load(Ordering::Relaxed) {
                        return None;
                    }
                    let run = searcher.run(seed, opts.budget, cap);
                    if !run.found.is_empty() {
                        best.fetch_min(seed, Ordering::Relaxed);
                    }
                    Some(run)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .map_while(|r| r)
        .collect()
    };
    merge_runs(runs, opts.budget, cap)
}

/// Replays per-seed runs in seed order against the global budget and cap.
fn merge_runs(runs: Vec<SeedRun>, budget: u64, cap: usize) -> Enumeration {
    let mut trees = Vec::new();
    let mut spent = 0u64;
    for run in runs {
        for (tree, at) in run.found {
            if spent + at > budget {
                return Enumeration {
                    trees,
                    complete: false,
                    expansions: budget,
                };
            }
            trees.push(tree);
            if trees.len() == cap {
                return Enumeration {
                    trees,
                    complete: true,
                    expansions: spent + at,
                };
            }
        }
        if !run.finished || spent + run.expansions > budget {
            return Enumeration {
                trees,
                complete: false,
                expansions: budget,
            };
        }
        spent += run.expansions;
    }
    Enumeration {
        trees,
        complete: true,
        expansions: spent,
    }
}

struct Searcher<'a> {
    m: &'a PolyhedralMap,
    target: usize,
    /// Longest allowed arc (in edges) per face.
    limits: Vec<usize>,
}

/// Mutable state of one seed's depth-first search.
struct State {
    tree: Vec<DualVertex>,
    in_tree: Vec<bool>,
    /// Tree neighbours of each dual vertex.
    touching: Vec<u8>,
    /// Tree vertices on each face.
    on_face: Vec<usize>,
    /// Vertices dropped from the current branch.
    excluded: Vec<bool>,
    in_frontier: Vec<bool>,
    expansions: u64,
    budget: u64,
    cap: usize,
    found: Vec<(CandidateTree, u64)>,
    out_of_budget: bool,
}

impl<'a> Searcher<'a> {
    fn new(m: &'a PolyhedralMap, t: &Triangulation) -> Self {
        let q = equivelar_degree(t);
        Searcher {
            m,
            target: t.vertex_count() - 2,
            limits: m.faces().iter().map(|w| arc_limit(q, w.len())).collect(),
        }
    }

    fn run(&self, seed: DualVertex, budget: u64, cap: usize) -> SeedRun {
        let n = self.m.vertex_count();
        let mut st = State {
            tree: Vec::with_capacity(self.target),
            in_tree: vec![false; n],
            touching: vec![0; n],
            on_face: vec![0; self.m.face_count()],
            excluded: vec![false; n],
            in_frontier: vec![false; n],
            expansions: 0,
            budget,
            cap,
            found: Vec::new(),
            out_of_budget: false,
        };
        // vertices below the seed belong to earlier seeds
        st.excluded[..seed].iter_mut().for_each(|x| *x = true);
        self.add(&mut st, seed);
        let mut frontier = BTreeSet::new();
        self.extend_frontier(&mut st, seed, &mut frontier);
        self.expand(&mut st, &mut frontier);
        SeedRun {
            found: st.found,
            expansions: st.expansions,
            finished: !st.out_of_budget,
        }
    }

    fn add(&self, st: &mut State, u: DualVertex) {
        st.tree.push(u);
        st.in_tree[u] = true;
        for w in self.m.neighbors(u) {
            st.touching[w] += 1;
        }
        for f in self.m.incident_faces(u) {
            st.on_face[f] += 1;
        }
    }

    fn remove(&self, st: &mut State, u: DualVertex) {
        st.tree.pop();
        st.in_tree[u] = false;
        for w in self.m.neighbors(u) {
            st.touching[w] -= 1;
        }
        for f in self.m.incident_faces(u) {
            st.on_face[f] -= 1;
        }
    }

    fn extend_frontier(&self, st: &mut State, u: DualVertex, frontier: &mut BTreeSet<DualVertex>) -> Vec<DualVertex> {
        let mut added = Vec::new();
        for w in self.m.neighbors(u) {
            if !st.in_tree[w] && !st.excluded[w] && !st.in_frontier[w] {
                st.in_frontier[w] = true;
                frontier.insert(w);
                added.push(w);
            }
        }
        added
    }

    /// Whether `c` (adjacent to the tree) keeps every face condition.
    fn admissible(&self, st: &State, c: DualVertex) -> bool {
        if st.touching[c] != 1 {
            return false;
        }
        let anchor = self.m.neighbors(c).into_iter().find(|&w| st.in_tree[w]).unwrap();
        let shared = self.m.incident_faces(anchor);
        self.m.incident_faces(c).into_iter().all(|f| {
            if shared.contains(&f) {
                // the arc on f grows from on_face[f] to on_face[f] + 1 vertices
                st.on_face[f] <= self.limits[f]
            } else {
                st.on_face[f] == 0
            }
        })
    }

    fn expand(&self, st: &mut State, frontier: &mut BTreeSet<DualVertex>) {
        if st.expansions >= st.budget {
            st.out_of_budget = true;
            return;
        }
        st.expansions += 1;
        if st.tree.len() == self.target {
            let tree = CandidateTree::induced(self.m, st.tree.clone());
            st.found.push((tree, st.expansions));
            return;
        }
        let Some(c) = frontier.pop_first() else {
            return;
        };
        st.in_frontier[c] = false;

        if self.admissible(st, c) {
            self.add(st, c);
            let added = self.extend_frontier(st, c, frontier);
            self.expand(st, frontier);
            for w in added {
                st.in_frontier[w] = false;
                frontier.remove(&w);
            }
            self.remove(st, c);
            if self.done(st) {
                st.in_frontier[c] = true;
                frontier.insert(c);
                return;
            }
        }

        st.excluded[c] = true;
        self.expand(st, frontier);
        st.excluded[c] = false;
        st.in_frontier[c] = true;
        frontier.insert(c);
    }

    fn done(&self, st: &State) -> bool {
        st.out_of_budget || st.found.len() >= st.cap
    }
}

impl fmt::Display for CandidateTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.vertices.iter().map(|u| format!("t{u}")).collect();
        let edges: Vec<String> = self.edges.iter().map(|[a, b]| format!("t{a}-t{b}")).collect();
        write!(f, "vertices: {}\nedges: {}", names.join(" "), edges.join(" "))
    }
}
