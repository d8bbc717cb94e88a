//! Triangulated closed surfaces: parsing, validation, counts and fixtures.
//!
//! Vertices, edges and triangles are stored by index. Vertex indices follow
//! the lexicographic order of the vertex labels; edges and triangles are
//! sorted index tuples and are themselves indexed in sorted order, so every
//! iteration order in the crate derives from the label order.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of a vertex of the triangulation.
pub type Vertex = usize;
/// Index of a triangle, in sorted triangle order.
pub type TriangleId = usize;
/// Index of an edge, in sorted edge order.
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("line {line}: expected three vertex tokens, found {found}")]
    BadLine { line: usize, found: usize },
    #[error("triangulation has no triangles")]
    Empty,
    #[error("degenerate triangle {0:?}: repeated vertex")]
    DegenerateTriangle([String; 3]),
    #[error("triangle {0:?} listed more than once")]
    DuplicateTriangle([String; 3]),
    #[error("not a closed surface: edge {edge:?} lies in {count} triangle(s)")]
    NotClosed { edge: [String; 2], count: usize },
    #[error("not a manifold: link of vertex {0} is not a single cycle")]
    NotManifold(String),
    #[error("triangulation is disconnected")]
    Disconnected,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown fixture family {0}")]
    UnknownFamily(String),
    #[error("bad fixture parameters: {0}")]
    BadParams(String),
}

/// A finite 2-dimensional simplicial complex given by its triangles.
///
/// Construction only rejects degenerate and duplicated triangles; use
/// [`validate_surface`] to check that it triangulates a closed surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    labels: Vec<String>,
    triangles: Vec<[Vertex; 3]>,
    edges: Vec<[Vertex; 2]>,
    edge_index: HashMap<[Vertex; 2], EdgeId>,
    triangle_edges: Vec<[EdgeId; 3]>,
    edge_triangles: Vec<Vec<TriangleId>>,
    vertex_triangles: Vec<Vec<TriangleId>>,
    neighbors: Vec<Vec<Vertex>>,
}

fn sort2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl Triangulation {
    pub fn new<I, S>(triangles: I) -> Result<Self, SurfaceError>
    where
        I: IntoIterator<Item = [S; 3]>,
        S: AsRef<str>,
    {
        let raw: Vec<[String; 3]> = triangles
            .into_iter()
            .map(|t| t.map(|s| s.as_ref().to_string()))
            .collect();
        if raw.is_empty() {
            return Err(SurfaceError::Empty);
        }
        for t in &raw {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(SurfaceError::DegenerateTriangle(t.clone()));
            }
        }

        let mut labels: Vec<String> = raw.iter().flatten().cloned().collect();
        labels.sort();
        labels.dedup();
        let id: HashMap<&str, Vertex> = labels
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut triangles: Vec<[Vertex; 3]> = raw
            .iter()
            .map(|t| {
                let mut v = t.clone().map(|s| id[s.as_str()]);
                v.sort_unstable();
                v
            })
            .collect();
        triangles.sort_unstable();
        if let Some(w) = triangles.windows(2).find(|w| w[0] == w[1]) {
            return Err(SurfaceError::DuplicateTriangle(
                w[0].map(|v| labels[v].clone()),
            ));
        }

        let mut edges: Vec<[Vertex; 2]> = triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [a, c], [b, c]])
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let edge_index: HashMap<[Vertex; 2], EdgeId> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let n = labels.len();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_triangles = vec![Vec::new(); edges.len()];
        let mut vertex_triangles = vec![Vec::new(); n];
        for (ti, &[a, b, c]) in triangles.iter().enumerate() {
            let te = [edge_index[&[a, b]], edge_index[&[a, c]], edge_index[&[b, c]]];
            for &e in &te {
                edge_triangles[e].push(ti);
            }
            for v in [a, b, c] {
                vertex_triangles[v].push(ti);
            }
            triangle_edges.push(te);
        }
        let mut neighbors = vec![Vec::new(); n];
        for &[a, b] in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }

        Ok(Triangulation {
            labels,
            triangles,
            edges,
            edge_index,
            triangle_edges,
            edge_triangles,
            vertex_triangles,
            neighbors,
        })
    }

    /// Parses the line-oriented text format: `#` starts a comment line,
    /// every other nonempty line names one triangle by three tokens.
    pub fn parse(text: &str) -> Result<Self, SurfaceError> {
        let mut triangles = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                &[a, b, c] => triangles.push([a, b, c]),
                _ => {
                    return Err(SurfaceError::BadLine {
                        line: i + 1,
                        found: tokens.len(),
                    })
                }
            }
        }
        Self::new(triangles)
    }

    /// Serializes to the text format, one sorted triangle per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.triangles {
            let [a, b, c] = t.map(|v| self.labels[v].as_str());
            out.push_str(&format!("{a} {b} {c}\n"));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_id(&self, label: &str) -> Option<Vertex> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn triangles(&self) -> &[[Vertex; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriangleId) -> [Vertex; 3] {
        self.triangles[t]
    }

    pub fn edges(&self) -> &[[Vertex; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> [Vertex; 2] {
        self.edges[e]
    }

    pub fn edge_id(&self, a: Vertex, b: Vertex) -> Option<EdgeId> {
        self.edge_index.get(&sort2(a, b)).copied()
    }

    pub fn triangle_edges(&self, t: TriangleId) -> [EdgeId; 3] {
        self.triangle_edges[t]
    }

    pub fn edge_triangles(&self, e: EdgeId) -> &[TriangleId] {
        &self.edge_triangles[e]
    }

    pub fn vertex_triangles(&self, v: Vertex) -> &[TriangleId] {
        &self.vertex_triangles[v]
    }

    /// Neighbours of `v` in the edge graph, ascending.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[v]
    }

    /// Number of edges containing `v`.
    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors[v].len()
    }

    pub fn is_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edge_index.contains_key(&sort2(a, b))
    }

    /// Display identifier of a triangle, `t<i>`.
    pub fn triangle_name(t: TriangleId) -> String {
        format!("t{t}")
    }
}

/// Counts and invariants of a validated closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub orientable: bool,
    /// `None` when vertex degrees differ.
    pub equivelar_degree: Option<usize>,
}

impl fmt::Display for SurfaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}", self.vertices)?;
        writeln!(f, "edges: {}", self.edges)?;
        writeln!(f, "faces: {}", self.faces)?;
        writeln!(f, "euler_characteristic: {}", self.euler_characteristic)?;
        writeln!(f, "orientable: {}", self.orientable)?;
        match self.equivelar_degree {
            Some(q) => write!(f, "equivelar_degree: {q}"),
            None => write!(f, "equivelar_degree: not equivelar"),
        }
    }
}

pub fn euler_characteristic(t: &Triangulation) -> i64 {
    t.vertex_count() as i64 - t.edge_count() as i64 + t.triangle_count() as i64
}

/// Returns the common vertex degree, or `None` if the triangulation is not
/// equivelar.
pub fn equivelar_degree(t: &Triangulation) -> Option<usize> {
    let q = t.degree(0);
    (1..t.vertex_count())
        .all(|v| t.degree(v) == q)
        .then_some(q)
}

/// Checks that `t` triangulates a connected closed surface and measures it.
pub fn validate_surface(t: &Triangulation) -> Result<SurfaceReport, SurfaceError> {
    let edge_labels = |e: EdgeId| t.edge(e).map(|v| t.label(v).to_string());
    for e in 0..t.edge_count() {
        let count = t.edge_triangles(e).len();
        if count != 2 {
            return Err(SurfaceError::NotClosed {
                edge: edge_labels(e),
                count,
            });
        }
    }
    for v in 0..t.vertex_count() {
        if !link_is_cycle(t, v) {
            return Err(SurfaceError::NotManifold(t.label(v).to_string()));
        }
    }
    if !is_connected(t) {
        return Err(SurfaceError::Disconnected);
    }
    Ok(SurfaceReport {
        vertices: t.vertex_count(),
        edges: t.edge_count(),
        faces: t.triangle_count(),
        euler_characteristic: euler_characteristic(t),
        orientable: orientable_from(t, 0),
        equivelar_degree: equivelar_degree(t),
    })
}

/// The link of `v` is a single cycle: every link vertex has link degree 2
/// and the link is connected.
fn link_is_cycle(t: &Triangulation, v: Vertex) -> bool {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for &ti in t.vertex_triangles(v) {
        let tri = t.triangle(ti);
        let mut opp = tri.iter().copied().filter(|&x| x != v);
        let (a, b) = (opp.next().unwrap(), opp.next().unwrap());
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|n| n.len() != 2) {
        return false;
    }
    let start = *adj.keys().min().unwrap();
    let mut seen = vec![start];
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[&x] {
            if !seen.contains(&y) {
                seen.push(y);
                stack.push(y);
            }
        }
    }
    seen.len() == adj.len()
}

/// Triangles sharing an edge with `ti`.
pub(crate) fn triangle_neighbors(t: &Triangulation, ti: TriangleId) -> impl Iterator<Item = TriangleId> + '_ {
    t.triangle_edges(ti)
        .into_iter()
        .flat_map(move |e| t.edge_triangles(e).iter().copied().filter(move |&x| x != ti))
}

fn is_connected(t: &Triangulation) -> bool {
    let mut seen = vec![false; t.triangle_count()];
    seen[0] = true;
    let mut stack = vec![0];
    let mut count = 1;
    while let Some(ti) = stack.pop() {
        for nb in triangle_neighbors(t, ti) {
            if !seen[nb] {
                seen[nb] = true;
                count += 1;
                stack.push(nb);
            }
        }
    }
    count == t.triangle_count()
}

/// Propagates a coherent orientation from `seed` (oriented by sorted vertex
/// order) across shared edges. Requires every edge to lie in two triangles.
pub fn orientable_from(t: &Triangulation, seed: TriangleId) -> bool {
    // orientation[ti] = cyclic vertex order, or None when not yet reached
    let mut orientation: Vec<Option<[Vertex; 3]>> = vec![None; t.triangle_count()];
    orientation[seed] = Some(t.triangle(seed));
    let mut queue = VecDeque::from([seed]);
    while let Some(ti) = queue.pop_front() {
        let [a, b, c] = orientation[ti].unwrap();
        for (x, y) in [(a, b), (b, c), (c, a)] {
            let e = t.edge_id(x, y).unwrap();
            for &nb in t.edge_triangles(e) {
                if nb == ti {
                    continue;
                }
                match orientation[nb] {
                    Some(o) => {
                        if has_directed_edge(o, x, y) {
                            return false;
                        }
                    }
                    None => {
                        let z = t.triangle(nb).into_iter().find(|&z| z != x && z != y).unwrap();
                        orientation[nb] = Some([y, x, z]);
                        queue.push_back(nb);
                    }
                }
            }
        }
    }
    true
}

fn has_directed_edge(o: [Vertex; 3], x: Vertex, y: Vertex) -> bool {
    (0..3).any(|i| o[i] == x && o[(i + 1) % 3] == y)
}

/// The fixture families shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Tetrahedron,
    Octahedron,
    Icosahedron,
    Cyclic7Torus,
    TorusGrid(usize, usize),
}

impl Fixture {
    /// The seven standard fixtures used by the census and the test suites.
    pub const STANDARD: [Fixture; 7] = [
        Fixture::Tetrahedron,
        Fixture::Octahedron,
        Fixture::Icosahedron,
        Fixture::Cyclic7Torus,
        Fixture::TorusGrid(3, 3),
        Fixture::TorusGrid(3, 4),
        Fixture::TorusGrid(4, 4),
    ];

    /// Parses `tetrahedron`, `torus_grid(3,4)`, `torus_grid:3,4` and the like.
    pub fn parse(spec: &str) -> Result<Fixture, SurfaceError> {
        let spec = spec.trim();
        let (name, params) = match spec.find(['(', ':']) {
            Some(i) => (&spec[..i], spec[i + 1..].trim_end_matches(')')),
            None => (spec, ""),
        };
        let params: Vec<usize> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params
                .split([',', 'x'])
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| SurfaceError::BadParams(format!("{spec}: {p:?} is not a count")))
                })
                .collect::<Result<_, _>>()?
        };
        let no_params = |f: Fixture| {
            if params.is_empty() {
                Ok(f)
            } else {
                Err(SurfaceError::BadParams(format!("{name} takes no parameters")))
            }
        };
        match name {
            "tetrahedron" => no_params(Fixture::Tetrahedron),
            "octahedron" => no_params(Fixture::Octahedron),
            "icosahedron" => no_params(Fixture::Icosahedron),
            "cyclic7_torus" => no_params(Fixture::Cyclic7Torus),
            "torus_grid" => match params.as_slice() {
                &[a, b] => Ok(Fixture::TorusGrid(a, b)),
                _ => Err(SurfaceError::BadParams(
                    "torus_grid needs two parameters a,b".to_string(),
                )),
            },
            other => Err(SurfaceError::UnknownFamily(other.to_string())),
        }
    }

    pub fn generate(self) -> Result<Triangulation, SurfaceError> {
        let faces: Vec<[usize; 3]> = match self {
            Fixture::Tetrahedron => vec![[1, 2, 4], [1, 3, 4], [1, 2, 3], [2, 3, 4]],
            Fixture::Octahedron => {
                // antipodal pairs {1,6}, {2,5}, {3,4}; one vertex from each
                let mut f = Vec::new();
                for a in [1, 6] {
                    for b in [2, 5] {
                        for c in [3, 4] {
                            f.push([a, b, c]);
                        }
                    }
                }
                f
            }
            Fixture::Icosahedron => {
                // apex 1, upper ring 2..=6, lower ring 7..=11, apex 12
                let mut f = Vec::new();
                for i in 0..5 {
                    let j = (i + 1) % 5;
                    let (ui, uj, li, lj) = (2 + i, 2 + j, 7 + i, 7 + j);
                    f.push([1, ui, uj]);
                    f.push([ui, uj, li]);
                    f.push([uj, li, lj]);
                    f.push([12, li, lj]);
                }
                f
            }
            Fixture::Cyclic7Torus => (0..7)
                .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
                .collect(),
            Fixture::TorusGrid(a, b) => {
                if a < 3 || b < 3 {
                    return Err(SurfaceError::BadParams(format!(
                        "torus_grid({a},{b}) needs a, b >= 3"
                    )));
                }
                let v = |i: usize, j: usize| (i % a) * b + (j % b);
                (0..a)
                    .flat_map(|i| (0..b).map(move |j| (i, j)))
                    .flat_map(|(i, j)| {
                        [
                            [v(i, j), v(i + 1, j), v(i + 1, j + 1)],
                            [v(i, j), v(i, j + 1), v(i + 1, j + 1)],
                        ]
                    })
                    .collect()
            }
        };
        Triangulation::new(faces.into_iter().map(|t| t.map(|v| v.to_string())))
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Tetrahedron => write!(f, "tetrahedron"),
            Fixture::Octahedron => write!(f, "octahedron"),
            Fixture::Icosahedron => write!(f, "icosahedron"),
            Fixture::Cyclic7Torus => write!(f, "cyclic7_torus"),
            Fixture::TorusGrid(a, b) => write!(f, "torus_grid({a},{b})"),
        }
    }
}

/// Builds the named fixture; see [`Fixture::parse`] for accepted names.
pub fn generate_fixture(spec: &str) -> Result<Triangulation, SurfaceError> {
    Fixture::parse(spec)?.generate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(spec: &str) -> SurfaceReport {
        validate_surface(&generate_fixture(spec).unwrap()).unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let r = report("tetrahedron");
        assert_eq!(
            r,
            SurfaceReport {
                vertices: 4,
                edges: 6,
                faces: 4,
                euler_characteristic: 2,
                orientable: true,
                equivelar_degree: Some(3),
            }
        );
    }

    #[test]
    fn duplicate_triangle_rejected() {
        let err = Triangulation::parse("1 2 3\n3 2 1\n").unwrap_err();
        assert!(matches!(err, SurfaceError::DuplicateTriangle(_)));
        let err = Triangulation::parse("1 2 2\n").unwrap_err();
        assert!(matches!(err, SurfaceError::DegenerateTriangle(_)));
    }

    #[test]
    fn cyclic7_torus_is_neighborly() {
        let t = generate_fixture("cyclic7_torus").unwrap();
        let r = validate_surface(&t).unwrap();
        assert_eq!((r.vertices, r.edges, r.faces), (7, 21, 14));
        assert_eq!(r.euler_characteristic, 0);
        assert!(r.orientable);
        assert_eq!(r.equivelar_degree, Some(6));
        for a in 0..7 {
            for b in a + 1..7 {
                assert!(t.is_edge(a, b));
            }
        }
    }

    #[test]
    fn degrees_of_platonic_fixtures() {
        assert_eq!(report("octahedron").equivelar_degree, Some(4));
        assert_eq!(report("icosahedron").equivelar_degree, Some(5));
        let r = report("torus_grid(3,3)");
        assert_eq!((r.vertices, r.faces, r.euler_characteristic), (9, 18, 0));
        assert_eq!(r.equivelar_degree, Some(6));
    }

    #[test]
    fn subdivided_tetrahedron_is_not_equivelar() {
        // edge 12 split by vertex 5
        let t = Triangulation::parse("1 5 4\n5 2 4\n1 5 3\n5 2 3\n1 3 4\n2 3 4\n").unwrap();
        let r = validate_surface(&t).unwrap();
        assert_eq!(r.vertices, 5);
        assert_eq!(r.euler_characteristic, 2);
        assert_eq!(r.equivelar_degree, None);
    }

    #[test]
    fn boundary_is_rejected() {
        let t = Triangulation::parse("1 2 3\n1 3 4\n").unwrap();
        assert!(matches!(
            validate_surface(&t),
            Err(SurfaceError::NotClosed { count: 1, .. })
        ));
    }

    #[test]
    fn pinched_vertex_is_not_manifold() {
        // two tetrahedron boundaries glued at vertex 1
        let t = Triangulation::parse(
            "1 2 4\n1 3 4\n1 2 3\n2 3 4\n1 5 7\n1 6 7\n1 5 6\n5 6 7\n",
        )
        .unwrap();
        assert_eq!(
            validate_surface(&t),
            Err(SurfaceError::NotManifold("1".to_string()))
        );
    }

    #[test]
    fn two_spheres_are_disconnected() {
        let t = Triangulation::parse(
            "1 2 4\n1 3 4\n1 2 3\n2 3 4\n5 6 8\n5 7 8\n5 6 7\n6 7 8\n",
        )
        .unwrap();
        assert_eq!(validate_surface(&t), Err(SurfaceError::Disconnected));
    }

    #[test]
    fn parse_errors_and_comments() {
        let t = Triangulation::parse("# tetra\n\n1 2 4\n1 3 4\n1 2 3\n2 3 4\n").unwrap();
        assert_eq!(t.triangle_count(), 4);
        assert_eq!(
            Triangulation::parse("1 2 3 4\n"),
            Err(SurfaceError::BadLine { line: 1, found: 4 })
        );
        assert_eq!(Triangulation::parse("# nothing\n"), Err(SurfaceError::Empty));
    }

    #[test]
    fn fixture_spec_parsing() {
        assert_eq!(Fixture::parse("torus_grid(3,4)").unwrap(), Fixture::TorusGrid(3, 4));
        assert_eq!(Fixture::parse("torus_grid:4,4").unwrap(), Fixture::TorusGrid(4, 4));
        assert!(matches!(
            Fixture::parse("klein"),
            Err(SurfaceError::UnknownFamily(_))
        ));
        assert!(matches!(
            generate_fixture("torus_grid(2,5)"),
            Err(SurfaceError::BadParams(_))
        ));
        assert!(matches!(
            Fixture::parse("tetrahedron(3)"),
            Err(SurfaceError::BadParams(_))
        ));
    }

    #[test]
    fn labels_are_ordered_as_strings() {
        let t = generate_fixture("icosahedron").unwrap();
        assert_eq!(t.label(0), "1");
        assert_eq!(t.label(1), "10");
        assert_eq!(t.vertex_id("2"), Some(4));
    }

    #[test]
    fn orientability_ignores_seed() {
        let t = generate_fixture("torus_grid(3,4)").unwrap();
        assert!((0..t.triangle_count()).all(|s| orientable_from(&t, s)));
    }
}
