//! The dual polyhedral map of a closed-surface triangulation.
//!
//! Dual vertices, dual edges and dual faces are indexed like the triangles,
//! edges and vertices of the triangulation they come from. The explicit
//! [`DualCorrespondence`] records those bijections.

use crate::complex::{validate_surface, EdgeId, SurfaceError, TriangleId, Triangulation, Vertex};

/// Index of a dual vertex.
pub type DualVertex = usize;

/// The dual map: cubic graph of triangles with one face per primal vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyhedralMap {
    /// Dual edge `i` joins the two triangles sharing primal edge `edge_of(i)`.
    edges: Vec<[DualVertex; 2]>,
    /// Normalized cyclic boundary walk of each dual face.
    faces: Vec<Vec<DualVertex>>,
    /// Neighbours of each dual vertex, ascending, with the joining dual edge.
    adjacency: Vec<[(DualVertex, usize); 3]>,
    /// The three dual faces (primal vertices) around each dual vertex.
    incident_faces: Vec<[usize; 3]>,
}

impl PolyhedralMap {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[[DualVertex; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<DualVertex>] {
        &self.faces
    }

    /// Boundary walk of the dual face with index `face`.
    pub fn walk(&self, face: usize) -> &[DualVertex] {
        &self.faces[face]
    }

    /// The three neighbours of `u`, ascending.
    pub fn neighbors(&self, u: DualVertex) -> [DualVertex; 3] {
        self.adjacency[u].map(|(v, _)| v)
    }

    /// Dual edges incident to `u`, ordered like [`neighbors`](Self::neighbors).
    pub fn incident_edges(&self, u: DualVertex) -> [usize; 3] {
        self.adjacency[u].map(|(_, e)| e)
    }

    /// The dual edge joining `u` and `w`, if they are adjacent.
    pub fn edge_between(&self, u: DualVertex, w: DualVertex) -> Option<usize> {
        self.adjacency[u].iter().find(|&&(v, _)| v == w).map(|&(_, e)| e)
    }

    /// Dual faces containing `u`, ascending.
    pub fn incident_faces(&self, u: DualVertex) -> [usize; 3] {
        self.incident_faces[u]
    }
}

/// Bijections between dual cells and primal cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCorrespondence {
    triangle_of: Vec<TriangleId>,
    edge_of: Vec<EdgeId>,
    vertex_of: Vec<Vertex>,
    dual_vertex_of: Vec<DualVertex>,
    dual_edge_of: Vec<usize>,
    dual_face_of: Vec<usize>,
}

impl DualCorrespondence {
    pub fn triangle_of(&self, u: DualVertex) -> TriangleId {
        self.triangle_of[u]
    }

    pub fn edge_of(&self, dual_edge: usize) -> EdgeId {
        self.edge_of[dual_edge]
    }

    pub fn vertex_of(&self, dual_face: usize) -> Vertex {
        self.vertex_of[dual_face]
    }

    pub fn dual_vertex_of(&self, t: TriangleId) -> DualVertex {
        self.dual_vertex_of[t]
    }

    pub fn dual_edge_of(&self, e: EdgeId) -> usize {
        self.dual_edge_of[e]
    }

    pub fn dual_face_of(&self, v: Vertex) -> usize {
        self.dual_face_of[v]
    }
}

/// Builds the dual map. Fails only if `t` is not a closed surface.
pub fn dualize(t: &Triangulation) -> Result<(PolyhedralMap, DualCorrespondence), SurfaceError> {
    validate_surface(t)?;
    let f = t.triangle_count();

    let edges: Vec<[DualVertex; 2]> = (0..t.edge_count())
        .map(|e| {
            let ts = t.edge_triangles(e);
            [ts[0].min(ts[1]), ts[0].max(ts[1])]
        })
        .collect();

    let adjacency: Vec<[(DualVertex, usize); 3]> = (0..f)
        .map(|u| {
            let mut adj = t.triangle_edges(u).map(|e| {
                let [a, b] = edges[e];
                (if a == u { b } else { a }, e)
            });
            adj.sort_unstable();
            adj
        })
        .collect();

    let faces: Vec<Vec<DualVertex>> = (0..t.vertex_count()).map(|v| link_walk(t, &adjacency, v)).collect();
    let incident_faces = (0..f).map(|u| t.triangle(u)).collect();

    let identity = |k: usize| (0..k).collect::<Vec<_>>();
    let corr = DualCorrespondence {
        triangle_of: identity(f),
        edge_of: identity(t.edge_count()),
        vertex_of: identity(t.vertex_count()),
        dual_vertex_of: identity(f),
        dual_edge_of: identity(t.edge_count()),
        dual_face_of: identity(t.vertex_count()),
    };
    let map = PolyhedralMap {
        edges,
        faces,
        adjacency,
        incident_faces,
    };
    Ok((map, corr))
}

/// Walks the triangles around `v`, starting at the smallest one and heading
/// toward its smaller walk neighbour.
fn link_walk(t: &Triangulation, adjacency: &[[(DualVertex, usize); 3]], v: Vertex) -> Vec<DualVertex> {
    // neighbours of `u` across the two edges of `u` that contain `v`
    let around = |u: DualVertex| -> [DualVertex; 2] {
        let mut it = adjacency[u]
            .iter()
            .filter(|&&(_, e)| t.edge(e).contains(&v))
            .map(|&(w, _)| w);
        [it.next().unwrap(), it.next().unwrap()]
    };
    let start = t.vertex_triangles(v)[0];
    let mut walk = vec![start];
    let mut prev = start;
    let mut cur = around(start)[0];
    while cur != start {
        walk.push(cur);
        let [a, b] = around(cur);
        let next = if a == prev { b } else { a };
        prev = cur;
        cur = next;
    }
    walk
}

/// Normalized boundary walk of the dual face of the vertex labelled `label`.
pub fn face_walk<'a>(
    m: &'a PolyhedralMap,
    t: &Triangulation,
    label: &str,
) -> Result<&'a [DualVertex], SurfaceError> {
    let v = t
        .vertex_id(label)
        .ok_or_else(|| SurfaceError::UnknownVertex(label.to_string()))?;
    Ok(m.walk(v))
}
