//! Triangle meshes, midpoint subdivision and vertex normals.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{add, cross, normalize, scale, Vec3};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {face} is degenerate (repeated vertex index)")]
    DegenerateFace { face: usize },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("region mask has {got} entries, expected {expected}")]
    MaskLength { got: usize, expected: usize },
    #[error("vertex {0} has no incident face")]
    IsolatedVertex(usize),
    #[error("vertex {0} has a zero-area normal accumulation")]
    DegenerateNormal(usize),
    #[error("vertex {0} has non-finite coordinates")]
    NonFiniteVertex(usize),
}

/// Triangle mesh in millimeters with counter-clockwise faces and a
/// per-vertex "refinable" region mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    refinable: Vec<bool>,
}

/// Undirected edge with `lo < hi`.
pub type Edge = (usize, usize);

#[inline]
fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Validates indices, face degeneracy and edge manifoldness. The region
    /// mask starts all-true.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = vertices.len();
        if let Some(i) = vertices.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(MeshError::NonFiniteVertex(i));
        }
        for (fi, f) in faces.iter().enumerate() {
            for &idx in f {
                if idx >= n {
                    return Err(MeshError::IndexOutOfRange {
                        face: fi,
                        index: idx,
                        count: n,
                    });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::DegenerateFace { face: fi });
            }
        }
        let mesh = Mesh {
            refinable: vec![true; n],
            vertices,
            faces,
        };
        let mut all = mesh.half_edges();
        all.sort_unstable();
        for w in all.windows(3) {
            if w[0] == w[1] && w[1] == w[2] {
                return Err(MeshError::NonManifoldEdge(w[0].0, w[0].1));
            }
        }
        Ok(mesh)
    }

    pub fn with_region_mask(mut self, mask: Vec<bool>) -> Result<Self, MeshError> {
        if mask.len() != self.vertices.len() {
            return Err(MeshError::MaskLength {
                got: mask.len(),
                expected: self.vertices.len(),
            });
        }
        self.refinable = mask;
        Ok(self)
    }

    /// Marks only `indices` as refinable.
    pub fn with_region_indices(self, indices: &[usize]) -> Result<Self, MeshError> {
        let n = self.vertices.len();
        let mut mask = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(MeshError::IndexOutOfRange {
                    face: usize::MAX,
                    index: i,
                    count: n,
                });
            }
            mask[i] = true;
        }
        self.with_region_mask(mask)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn refinable(&self) -> &[bool] {
        &self.refinable
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Same topology and mask, new positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self, MeshError> {
        if vertices.len() != self.vertices.len() {
            return Err(MeshError::MaskLength {
                got: vertices.len(),
                expected: self.vertices.len(),
            });
        }
        if let Some(i) = vertices.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(MeshError::NonFiniteVertex(i));
        }
        Ok(Mesh {
            vertices,
            faces: self.faces.clone(),
            refinable: self.refinable.clone(),
        })
    }

    pub fn same_topology(&self, other: &Mesh) -> bool {
        self.vertices.len() == other.vertices.len() && self.faces == other.faces
    }

    fn half_edges(&self) -> Vec<Edge> {
        self.faces
            .iter()
            .flat_map(|f| [edge(f[0], f[1]), edge(f[1], f[2]), edge(f[2], f[0])])
            .collect()
    }

    /// Sorted, de-duplicated undirected edges.
    pub fn edges(&self) -> Vec<Edge> {
        let mut e = self.half_edges();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Number of faces incident to each edge of [`Mesh::edges`].
    pub fn edge_face_counts(&self) -> Vec<(Edge, usize)> {
        let mut e = self.half_edges();
        e.sort_unstable();
        let mut out: Vec<(Edge, usize)> = Vec::new();
        for x in e {
            match out.last_mut() {
                Some((last, c)) if *last == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// Vertex 1-ring adjacency, neighbors sorted ascending.
    pub fn adjacency(&self) -> Adjacency {
        Adjacency::from_edges(self.vertices.len(), &self.edges())
    }
}

/// Compressed vertex adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Adjacency {
    /// `edges` need not be sorted; duplicates are removed.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Self {
        let mut pairs: Vec<(usize, usize)> = edges
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .filter(|&(a, b)| a != b && a < n && b < n)
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in &pairs {
            offsets[a + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Adjacency {
            offsets,
            neighbors: pairs.into_iter().map(|(_, b)| b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// `levels` rounds of 1-to-4 midpoint subdivision.
///
/// Original vertices keep their indices; each round appends one vertex per
/// edge, in sorted edge order. A new vertex is refinable iff both endpoints
/// of its parent edge are.
pub fn subdivide(mesh: &Mesh, levels: u32) -> Mesh {
    let mut current = mesh.clone();
    for _ in 0..levels {
        current = subdivide_once(&current);
    }
    current
}

fn subdivide_once(mesh: &Mesh) -> Mesh {
    let edges = mesh.edges();
    let base = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    let mut refinable = mesh.refinable.clone();
    vertices.reserve(edges.len());
    refinable.reserve(edges.len());
    for &(a, b) in &edges {
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]), 0.5 * (pa[2] + pb[2])]);
        refinable.push(mesh.refinable[a] && mesh.refinable[b]);
    }
    let mid = |a: usize, b: usize| -> usize {
        // every face edge is present in the sorted list
        base + edges.binary_search(&edge(a, b)).unwrap()
    };
    let mut faces = Vec::with_capacity(mesh.faces.len() * 4);
    for &[a, b, c] in &mesh.faces {
        let ab = mid(a, b);
        let bc = mid(b, c);
        let ca = mid(c, a);
        faces.push([a, ab, ca]);
        faces.push([ab, b, bc]);
        faces.push([ca, bc, c]);
        faces.push([ab, bc, ca]);
    }
    Mesh {
        vertices,
        faces,
        refinable,
    }
}

/// Area-weighted vertex normals.
pub fn compute_normals(mesh: &Mesh) -> Result<Vec<Vec3>, MeshError> {
    compute_normals_for(mesh.vertices(), mesh.faces())
}

/// Normals for the given positions over a fixed face list.
pub fn compute_normals_for(vertices: &[Vec3], faces: &[[usize; 3]]) -> Result<Vec<Vec3>, MeshError> {
    let mut acc = vec![[0.0; 3]; vertices.len()];
    let mut incident = vec![false; vertices.len()];
    for &[a, b, c] in faces {
        let pa = vertices[a];
        let n = cross(crate::math::sub(vertices[b], pa), crate::math::sub(vertices[c], pa));
        for v in [a, b, c] {
            acc[v] = add(acc[v], n);
            incident[v] = true;
        }
    }
    acc.iter()
        .enumerate()
        .map(|(i, &n)| {
            if !incident[i] {
                return Err(MeshError::IsolatedVertex(i));
            }
            normalize(n)
                .filter(|u| u.iter().all(|c| c.is_finite()))
                .ok_or(MeshError::DegenerateNormal(i))
        })
        .collect()
}

/// Point along each vertex normal: `v + n * k`.
pub fn displace(vertices: &[Vec3], normals: &[Vec3], k: &[f64]) -> Vec<Vec3> {
    vertices
        .iter()
        .zip(normals)
        .zip(k)
        .map(|((&v, &n), &k)| add(v, scale(n, k)))
        .collect()
}
