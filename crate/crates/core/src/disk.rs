//! Triangulated disks, contractible Hamiltonian cycles and the oracle.
//!
//! A proper tree's triangles form a disk whose boundary is a Hamiltonian
//! cycle ([`disk_from_tree`]); a Hamiltonian cycle that bounds a disk gives
//! back a proper tree ([`tree_from_cycle`]). Both directions certify their
//! results instead of trusting them. [`brute_force_chc`] decides existence
//! without any dual-map machinery.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{validate_surface, EdgeId, SurfaceError, TriangleId, Triangulation, Vertex};
use crate::dual::{dualize, DualCorrespondence, PolyhedralMap};
use crate::tree::{check_proper, find_proper_tree, CandidateTree, SearchOptions, TreeError, TreeSearch};

/// Default vertex limit for [`brute_force_chc`].
pub const DEFAULT_ORACLE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiskError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("tree is not proper: {0}")]
    ImproperTree(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("cycle has {length} vertices, a Hamiltonian cycle needs {vertices}")]
    NotHamiltonian { length: usize, vertices: usize },
    #[error("triangulation is not equivelar")]
    NotEquivelar,
    #[error("{vertices} vertices exceeds the oracle limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

/// A cycle in the edge graph, kept in canonical form: smallest vertex
/// first, then its smaller cycle neighbour.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexCycle {
    vertices: Vec<Vertex>,
}

impl VertexCycle {
    pub fn new(t: &Triangulation, vertices: Vec<Vertex>) -> Result<Self, DiskError> {
        check_cycle(t, &vertices)?;
        Ok(VertexCycle {
            vertices: canonical(vertices),
        })
    }

    pub fn from_labels<S: AsRef<str>>(t: &Triangulation, labels: &[S]) -> Result<Self, DiskError> {
        let vertices = labels
            .iter()
            .map(|l| {
                let l = l.as_ref().trim();
                t.vertex_id(l)
                    .ok_or_else(|| DiskError::NotACycle(format!("unknown vertex {l}")))
            })
            .collect::<Result<_, _>>()?;
        Self::new(t, vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_hamiltonian(&self, t: &Triangulation) -> bool {
        self.vertices.len() == t.vertex_count()
    }

    /// Cycle edges in cycle order.
    pub fn edges(&self, t: &Triangulation) -> Vec<EdgeId> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| t.edge_id(self.vertices[i], self.vertices[(i + 1) % k]).unwrap())
            .collect()
    }

    pub fn labels<'a>(&self, t: &'a Triangulation) -> Vec<&'a str> {
        self.vertices.iter().map(|&v| t.label(v)).collect()
    }
}

fn check_cycle(t: &Triangulation, vs: &[Vertex]) -> Result<(), DiskError> {
    if vs.len() < 3 {
        return Err(DiskError::NotACycle(format!("{} vertices, need at least 3", vs.len())));
    }
    if let Some(&v) = vs.iter().find(|&&v| v >= t.vertex_count()) {
        return Err(DiskError::NotACycle(format!("vertex index {v} out of range")));
    }
    let distinct: HashSet<_> = vs.iter().collect();
    if distinct.len() != vs.len() {
        return Err(DiskError::NotACycle("repeated vertex".into()));
    }
    for i in 0..vs.len() {
        let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
        if !t.is_edge(a, b) {
            return Err(DiskError::NotACycle(format!("{} {} is not an edge", t.label(a), t.label(b))));
        }
    }
    Ok(())
}

/// Rotates the smallest vertex to the front and orients toward its smaller
/// neighbour.
pub fn canonical(mut vs: Vec<Vertex>) -> Vec<Vertex> {
    if vs.is_empty() {
        return vs;
    }
    let pos = vs.iter().enumerate().min_by_key(|&(_, v)| v).unwrap().0;
    vs.rotate_left(pos);
    if vs.len() > 2 && vs[1] > vs[vs.len() - 1] {
        vs[1..].reverse();
    }
    vs
}

/// A set of triangles forming a 2-disk, with its boundary cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulatedDisk {
    faces: Vec<TriangleId>,
    boundary: VertexCycle,
}

impl TriangulatedDisk {
    pub fn faces(&self) -> &[TriangleId] {
        &self.faces
    }

    pub fn boundary(&self) -> &VertexCycle {
        &self.boundary
    }

    /// Edges lying in exactly one face of the disk.
    pub fn boundary_edges(&self, t: &Triangulation) -> Vec<EdgeId> {
        let counts = edge_counts(t, &self.faces);
        let mut b: Vec<_> = counts.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        b.sort_unstable();
        b
    }

    pub fn euler_characteristic(&self, t: &Triangulation) -> i64 {
        subcomplex_euler(t, &self.faces)
    }
}

fn edge_counts(t: &Triangulation, faces: &[TriangleId]) -> HashMap<EdgeId, usize> {
    let mut counts = HashMap::new();
    for &f in faces {
        for e in t.triangle_edges(f) {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    counts
}

fn subcomplex_euler(t: &Triangulation, faces: &[TriangleId]) -> i64 {
    let vertices: HashSet<Vertex> = faces.iter().flat_map(|&f| t.triangle(f)).collect();
    vertices.len() as i64 - edge_counts(t, faces).len() as i64 + faces.len() as i64
}

/// Certifies that `faces` form a triangulated disk and returns its boundary.
///
/// Checks: faces connected across shared edges, every vertex link within the
/// faces a single path or cycle, the boundary edges one cycle, and
/// Euler characteristic 1.
fn certify_disk(t: &Triangulation, faces: &[TriangleId]) -> Result<VertexCycle, String> {
    if faces.is_empty() {
        return Err("no faces".into());
    }
    let set: HashSet<TriangleId> = faces.iter().copied().collect();
    let mut seen = HashSet::from([faces[0]]);
    let mut stack = vec![faces[0]];
    while let Some(f) = stack.pop() {
        for nb in crate::complex::triangle_neighbors(t, f) {
            if set.contains(&nb) && seen.insert(nb) {
                stack.push(nb);
            }
        }
    }
    if seen.len() != set.len() {
        return Err("faces are not connected".into());
    }

    let chi = subcomplex_euler(t, faces);
    if chi != 1 {
        return Err(format!("euler characteristic {chi}, expected 1"));
    }

    let counts = edge_counts(t, faces);
    let mut boundary_adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for (&e, &c) in &counts {
        if c == 1 {
            let [a, b] = t.edge(e);
            boundary_adj.entry(a).or_default().push(b);
            boundary_adj.entry(b).or_default().push(a);
        }
    }
    if boundary_adj.is_empty() {
        return Err("empty boundary".into());
    }
    if let Some((&v, nb)) = boundary_adj.iter().find(|(_, nb)| nb.len() != 2) {
        return Err(format!("boundary vertex {} has boundary degree {}", t.label(v), nb.len()));
    }
    let start = *boundary_adj.keys().min().unwrap();
    let mut cycle = vec![start];
    let (mut prev, mut cur) = (start, boundary_adj[&start][0]);
    while cur != start {
        cycle.push(cur);
        let nb = &boundary_adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    if cycle.len() != boundary_adj.len() {
        return Err("boundary is not a single cycle".into());
    }

    // Interior vertices have every incident triangle in the disk; boundary
    // vertices then have a single fan because their boundary degree is 2.
    let on_boundary: HashSet<Vertex> = cycle.iter().copied().collect();
    let vertices: HashSet<Vertex> = faces.iter().flat_map(|&f| t.triangle(f)).collect();
    for &v in &vertices {
        if !on_boundary.contains(&v) && !t.vertex_triangles(v).iter().all(|f| set.contains(f)) {
            return Err(format!("vertex {} is pinched", t.label(v)));
        }
    }
    VertexCycle::new(t, cycle).map_err(|e| e.to_string())
}

/// Builds the disk dual to a proper tree and checks that its boundary is a
/// Hamiltonian cycle on `n` vertices bounding `n - 2` triangles.
pub fn disk_from_tree(
    t: &Triangulation,
    m: &PolyhedralMap,
    corr: &DualCorrespondence,
    tree: &CandidateTree,
) -> Result<TriangulatedDisk, DiskError> {
    let verdict = check_proper(tree, m, t)?;
    if let Some(v) = verdict.violations.first() {
        return Err(DiskError::ImproperTree(v.describe(t)));
    }
    let mut faces: Vec<TriangleId> = tree.vertices().iter().map(|&u| corr.triangle_of(u)).collect();
    faces.sort_unstable();
    let boundary = certify_disk(t, &faces).map_err(DiskError::InternalInconsistency)?;
    let n = t.vertex_count();
    if faces.len() != n - 2 {
        return Err(DiskError::InternalInconsistency(format!(
            "disk has {} faces, expected {}",
            faces.len(),
            n - 2
        )));
    }
    if !boundary.is_hamiltonian(t) {
        return Err(DiskError::InternalInconsistency(format!(
            "boundary has {} vertices, expected {n}",
            boundary.len()
        )));
    }
    Ok(TriangulatedDisk { faces, boundary })
}

/// Outcome of [`cycle_is_contractible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contractibility {
    /// Faces of the disk bounded by the cycle, if one exists.
    pub witness: Option<Vec<TriangleId>>,
}

impl Contractibility {
    pub fn is_contractible(&self) -> bool {
        self.witness.is_some()
    }
}

/// Decides whether `h` bounds a disk made of triangles of `t`.
///
/// Triangles are grouped into components of edge-adjacency that never cross
/// an edge of `h`. A component is a disk bounded by `h` when its boundary is
/// exactly `h` and its Euler characteristic is 1. On a sphere both sides
/// qualify; the witness is the one with fewer faces, then the one holding
/// the smallest triangle.
pub fn cycle_is_contractible(t: &Triangulation, h: &VertexCycle) -> Result<Contractibility, DiskError> {
    check_cycle(t, h.vertices())?;
    let cycle_edges: HashSet<EdgeId> = h.edges(t).into_iter().collect();

    let f = t.triangle_count();
    let mut parent: Vec<usize> = (0..f).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in 0..t.edge_count() {
        if cycle_edges.contains(&e) {
            continue;
        }
        let ts = t.edge_triangles(e);
        for w in ts.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut components: Vec<Vec<TriangleId>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for ti in 0..f {
        let r = root(&mut parent, ti);
        let i = *slot.entry(r).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[i].push(ti);
    }

    // components are listed by smallest triangle, so min_by_key keeps the
    // earliest among equally small disks
    let witness = components
        .into_iter()
        .filter(|comp| {
            let counts = edge_counts(t, comp);
            let boundary: HashSet<EdgeId> = counts.iter().filter(|&(_, &c)| c == 1).map(|(&e, _)| e).collect();
            boundary == cycle_edges && subcomplex_euler(t, comp) == 1
        })
        .min_by_key(|comp| comp.len());
    if let Some(comp) = &witness {
        if h.is_hamiltonian(t) && comp.len() != t.vertex_count() - 2 {
            return Err(DiskError::InternalInconsistency(format!(
                "disk bounded by a Hamiltonian cycle has {} faces, expected {}",
                comp.len(),
                t.vertex_count() - 2
            )));
        }
    }
    Ok(Contractibility { witness })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleTree {
    Tree(CandidateTree),
    NotContractible,
}

/// Maps a contractible Hamiltonian cycle to the dual graph of its disk and
/// checks that this graph is a proper tree.
pub fn tree_from_cycle(
    t: &Triangulation,
    m: &PolyhedralMap,
    corr: &DualCorrespondence,
    h: &VertexCycle,
) -> Result<CycleTree, DiskError> {
    check_cycle(t, h.vertices())?;
    if !h.is_hamiltonian(t) {
        return Err(DiskError::NotHamiltonian {
            length: h.len(),
            vertices: t.vertex_count(),
        });
    }
    let Some(faces) = cycle_is_contractible(t, h)?.witness else {
        return Ok(CycleTree::NotContractible);
    };
    let duals = faces.iter().map(|&f| corr.dual_vertex_of(f)).collect();
    let tree = CandidateTree::induced(m, duals);
    let verdict = check_proper(&tree, m, t)
        .map_err(|e| DiskError::InternalInconsistency(format!("dual graph of the disk: {e}")))?;
    if let Some(v) = verdict.violations.first() {
        return Err(DiskError::InternalInconsistency(format!(
            "dual graph of the disk is not proper: {}",
            v.describe(t)
        )));
    }
    Ok(CycleTree::Tree(tree))
}

/// A contractible Hamiltonian cycle with the disk and tree that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChcWitness {
    pub cycle: VertexCycle,
    pub disk: TriangulatedDisk,
    pub tree: CandidateTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChcSearch {
    Found(ChcWitness),
    None,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChcResult {
    pub outcome: ChcSearch,
    pub expansions: u64,
}

impl fmt::Display for VertexCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", vs.join(","))
    }
}

/// Searches for a contractible Hamiltonian cycle through a proper tree.
pub fn find_chc(t: &Triangulation, opts: SearchOptions) -> Result<ChcResult, DiskError> {
    let report = validate_surface(t)?;
    if report.equivelar_degree.is_none() {
        return Err(DiskError::NotEquivelar);
    }
    let (m, corr) = dualize(t)?;
    let search = find_proper_tree(&m, t, opts);
    let outcome = match search.outcome {
        TreeSearch::Found(tree) => {
            let disk = disk_from_tree(t, &m, &corr, &tree)?;
            ChcSearch::Found(ChcWitness {
                cycle: disk.boundary().clone(),
                disk,
                tree,
            })
        }
        TreeSearch::None => ChcSearch::None,
        TreeSearch::BudgetExceeded => ChcSearch::BudgetExceeded,
    };
    Ok(ChcResult {
        outcome,
        expansions: search.expansions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// First contractible Hamiltonian cycle in enumeration order.
    pub cycle: Option<VertexCycle>,
    /// Hamiltonian cycles examined, counted in sequential order.
    pub cycles_tested: u64,
}

type BranchResult = Result<(Option<VertexCycle>, u64), DiskError>;

/// Enumerates Hamiltonian cycles of the edge graph and returns the first
/// contractible one. Uses no dual-map machinery.
///
/// Cycles start at vertex 0 and are extended through neighbours in
/// ascending order; a closed path is kept only when its second vertex is
/// smaller than its last, so each cycle is seen once.
pub fn brute_force_chc(t: &Triangulation, limit: usize, threads: usize) -> Result<OracleResult, DiskError> {
    validate_surface(t)?;
    let n = t.vertex_count();
    if n > limit || n > 64 {
        return Err(DiskError::TooLarge { vertices: n, limit });
    }
    let seconds = t.neighbors(0).to_vec();
    let run = |second: Vertex| -> BranchResult {
        let mut dfs = HamiltonDfs {
            t,
            n,
            path: vec![0, second],
            visited: 1u64 | (1u64 << second),
            tested: 0,
        };
        let found = dfs.search()?;
        Ok((found, dfs.tested))
    };

    let runs: Vec<Option<BranchResult>> = if threads <= 1 {
        let mut out = Vec::new();
        for &s in &seconds {
            let r = run(s);
            let stop = !matches!(r, Ok((None, _)));
            out.push(Some(r));
            if stop {
                break;
            }
        }
        out
    } else {
        let best = AtomicUsize::new(usize::MAX);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            seconds
                .par_iter()
                .enumerate()
                .map(|(i, &s)| {
                    if i > best.load(Ordering::Relaxed) {
                        return None;
                    }
                    let r = run(s);
                    if !matches!(r, Ok((None, _))) {
                        best.fetch_min(i, Ordering::Relaxed);
                    }
                    Some(r)
                })
                .collect()
        })
    };

    let mut tested = 0;
    for r in runs.into_iter().map_while(|r| r) {
        let (cycle, count) = r?;
        tested += count;
        if cycle.is_some() {
            return Ok(OracleResult {
                cycle,
                cycles_tested: tested,
            });
        }
    }
    Ok(OracleResult {
        cycle: None,
        cycles_tested: tested,
    })
}

struct HamiltonDfs<'a> {
    t: &'a Triangulation,
    n: usize,
    path: Vec<Vertex>,
    visited: u64,
    tested: u64,
}

impl HamiltonDfs<'_> {
    fn search(&mut self) -> Result<Option<VertexCycle>, DiskError> {
        let last = *self.path.last().unwrap();
        if self.path.len() == self.n {
            if self.path[1] < last && self.t.is_edge(last, 0) {
                self.tested += 1;
                let h = VertexCycle::new(self.t, self.path.clone())?;
                if cycle_is_contractible(self.t, &h)?.is_contractible() {
                    return Ok(Some(h));
                }
            }
            return Ok(None);
        }
        for &w in self.t.neighbors(last) {
            if self.visited & (1 << w) != 0 {
                continue;
            }
            self.visited |= 1 << w;
            self.path.push(w);
            let found = self.search()?;
            self.path.pop();
            self.visited &= !(1 << w);
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}
