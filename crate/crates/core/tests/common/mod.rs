#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use chc::{check_proper, dualize, generate_fixture, CandidateTree, DualCorrespondence, PolyhedralMap, Triangulation};

pub const STANDARD: [&str; 7] = [
    "tetrahedron",
    "octahedron",
    "icosahedron",
    "cyclic7_torus",
    "torus_grid(3,3)",
    "torus_grid(3,4)",
    "torus_grid(4,4)",
];

/// Standard fixtures whose dual has at most 20 vertices.
pub const SMALL: [&str; 5] = ["tetrahedron", "octahedron", "icosahedron", "cyclic7_torus", "torus_grid(3,3)"];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load(spec: &str) -> (Triangulation, PolyhedralMap, DualCorrespondence) {
    let t = generate_fixture(spec).unwrap();
    let (m, c) = dualize(&t).unwrap();
    (t, m, c)
}

/// Every subtree of the dual with `k` vertices, found by choosing `k - 1`
/// dual edges that form a tree. Knows nothing about faces or arcs.
pub fn all_subtrees(m: &PolyhedralMap, k: usize) -> Vec<CandidateTree> {
    fn rec(
        edges: &[[usize; 2]],
        i: usize,
        chosen: &mut Vec<[usize; 2]>,
        k: usize,
        out: &mut Vec<CandidateTree>,
        n: usize,
    ) {
        if chosen.len() == k - 1 {
            let vs: HashSet<usize> = chosen.iter().flatten().copied().collect();
            if vs.len() == k {
                out.push(CandidateTree::new(vs.into_iter().collect(), chosen.clone()));
            }
            return;
        }
        if edges.len() - i < k - 1 - chosen.len() {
            return;
        }
        let e = edges[i];
        chosen.push(e);
        let vs: HashSet<usize> = chosen.iter().flatten().copied().collect();
        if vs.len() <= k && acyclic(chosen, n) {
            rec(edges, i + 1, chosen, k, out, n);
        }
        chosen.pop();
        rec(edges, i + 1, chosen, k, out, n);
    }
    let mut out = Vec::new();
    if k == 1 {
        return (0..m.vertex_count()).map(|u| CandidateTree::new(vec![u], vec![])).collect();
    }
    rec(m.edges(), 0, &mut Vec::new(), k, &mut out, m.vertex_count());
    out
}

fn acyclic(edges: &[[usize; 2]], n: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for &[a, b] in edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Brute-force proper trees: all `(n - 2)`-vertex subtrees filtered by
/// `check_proper`.
pub fn brute_force_proper_trees(t: &Triangulation, m: &PolyhedralMap) -> HashSet<CandidateTree> {
    all_subtrees(m, t.vertex_count() - 2)
        .into_iter()
        .filter(|tr| check_proper(tr, m, t).unwrap().is_proper())
        .collect()
}

/// Checks the degree, leaf, face-meeting and face-partition facts of a
/// proper tree; returns a description of the first failure.
pub fn lemma_checks(t: &Triangulation, m: &PolyhedralMap, tree: &CandidateTree) -> Result<(), String> {
    let n = t.vertex_count();
    if tree.max_degree() > 3 {
        return Err(format!("degree {} > 3", tree.max_degree()));
    }
    let leaves = tree.leaf_count();
    if leaves != tree.branch_count() + 2 {
        return Err(format!("{leaves} leaves, {} branch vertices", tree.branch_count()));
    }
    let vs: HashSet<usize> = tree.vertices().iter().copied().collect();
    for (f, walk) in m.faces().iter().enumerate() {
        if !walk.iter().any(|u| vs.contains(u)) {
            return Err(format!("face {f} misses the tree"));
        }
    }
    // faces carrying a tree edge: dual edge {a, b} lies on the faces of the
    // two primal vertices the triangles share
    let with_edge: HashSet<usize> = tree
        .edges()
        .iter()
        .flat_map(|&[a, b]| {
            let fb = m.incident_faces(b);
            m.incident_faces(a).into_iter().filter(move |f| fb.contains(f))
        })
        .collect();
    if with_edge.len() != n - leaves {
        return Err(format!("{} faces carry tree edges, expected {}", with_edge.len(), n - leaves));
    }
    let rest: HashSet<usize> = (0..n).filter(|f| !with_edge.contains(f)).collect();
    let mut leaf_faces = HashSet::new();
    for &u in tree.vertices().iter().filter(|&&u| tree.degree(u) == 1) {
        let third: Vec<usize> = m.incident_faces(u).into_iter().filter(|f| !with_edge.contains(f)).collect();
        if third.len() != 1 {
            return Err(format!("leaf t{u} lies on {} faces without tree edges", third.len()));
        }
        leaf_faces.insert(third[0]);
    }
    if rest.len() != leaves || leaf_faces != rest {
        return Err(format!(
            "{} faces without tree edges, {} distinct leaf faces, {leaves} leaves",
            rest.len(),
            leaf_faces.len()
        ));
    }
    Ok(())
}
