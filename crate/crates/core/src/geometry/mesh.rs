//! Triangle meshes and materials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

/// Triangles below this area (m²) are rejected: they are beneath the
/// resolution of any finite-difference stencil the crate uses.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Surface material: a scalar amplitude scale applied per bounce.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub reflection_coefficient: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, reflection_coefficient: f64) -> Result<Self> {
        let name = name.into();
        if !(0.0..=1.0).contains(&reflection_coefficient) || !reflection_coefficient.is_finite() {
            return Err(Error::InvalidMaterial {
                name,
                value: reflection_coefficient,
            });
        }
        Ok(Self {
            name,
            reflection_coefficient,
        })
    }
}

/// An undirected mesh edge with its adjacent triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshEdge {
    /// Endpoint vertex indices, v0 < v1.
    pub v0: usize,
    pub v1: usize,
    pub tri_a: usize,
    /// Second adjacent triangle; `None` for boundary edges.
    pub tri_b: Option<usize>,
}

/// Indexed triangle mesh with a per-triangle material id.
///
/// Construction validates index bounds, triangle areas, and edge
/// adjacency (no edge may be shared by more than two triangles).
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    material_ids: Vec<usize>,
    edges: Vec<MeshEdge>,
}

impl Mesh {
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        material_ids: Vec<usize>,
    ) -> Result<Self> {
        if material_ids.len() != triangles.len() {
            return Err(Error::InvalidMesh(format!(
                "material id count {} != triangle count {}",
                material_ids.len(),
                triangles.len()
            )));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references vertex {i} but mesh has {} vertices",
                        vertices.len()
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} repeats a vertex index"
                )));
            }
            let area = triangle_area(&vertices, tri);
            if !(area > DEGENERATE_AREA) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is degenerate (area {area:.3e} m² <= {DEGENERATE_AREA:.0e})"
                )));
            }
        }
        for v in &vertices {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
            }
        }
        let edges = build_edges(vertices.len(), &triangles)?;
        Ok(Self {
            vertices,
            triangles,
            material_ids,
            edges,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn material_ids(&self) -> &[usize] {
        &self.material_ids
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        triangle_area(&self.vertices, &self.triangles[t])
    }

    /// Unit normal of triangle `t` (right-hand rule on vertex order).
    pub fn triangle_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[b] - self.vertices[a])
            .cross(&(self.vertices[c] - self.vertices[a]))
            .normalize()
    }

    /// True when every edge is shared by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(|e| e.tri_b.is_some())
    }

    /// Rebuild with the same topology but different vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        Mesh::new(vertices, self.triangles.clone(), self.material_ids.clone())
    }

    /// Axis-aligned rectangular plate centered at `center`, spanned by the
    /// orthonormal-ish axes `u` (half-width `hu`) and `v` (half-width `hv`),
    /// split into two triangles.
    pub fn plate(center: Vec3, u: Vec3, v: Vec3, hu: f64, hv: f64, material: usize) -> Self {
        let p00 = center - u * hu - v * hv;
        let p10 = center + u * hu - v * hv;
        let p11 = center + u * hu + v * hv;
        let p01 = center - u * hu + v * hv;
        Mesh::new(
            vec![p00, p10, p11, p01],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![material, material],
        )
        .expect("plate construction is valid")
    }

    /// Axis-aligned cuboid (12 triangles) centered at `center`.
    pub fn cuboid(center: Vec3, half_extents: Vec3, material: usize) -> Self {
        let h = half_extents;
        let v = |x: f64, y: f64, z: f64| center + Vec3::new(x * h.x, y * h.y, z * h.z);
        let vertices = vec![
            v(-1.0, -1.0, -1.0),
            v(1.0, -1.0, -1.0),
            v(1.0, 1.0, -1.0),
            v(-1.0, 1.0, -1.0),
            v(-1.0, -1.0, 1.0),
            v(1.0, -1.0, 1.0),
            v(1.0, 1.0, 1.0),
            v(-1.0, 1.0, 1.0),
        ];
        let triangles = vec![
            [0, 2, 1],
            [0, 3, 2], // z = -1
            [4, 5, 6],
            [4, 6, 7], // z = +1
            [0, 1, 5],
            [0, 5, 4], // y = -1
            [2, 3, 7],
            [2, 7, 6], // y = +1
            [1, 2, 6],
            [1, 6, 5], // x = +1
            [3, 0, 4],
            [3, 4, 7], // x = -1
        ];
        let materials = vec![material; triangles.len()];
        Mesh::new(vertices, triangles, materials).expect("cuboid construction is valid")
    }
}

fn triangle_area(vertices: &[Vec3], tri: &[usize; 3]) -> f64 {
    let e1 = vertices[tri[1]] - vertices[tri[0]];
    let e2 = vertices[tri[2]] - vertices[tri[0]];
    0.5 * e1.cross(&e2).norm()
}

fn build_edges(vertex_count: usize, triangles: &[[usize; 3]]) -> Result<Vec<MeshEdge>> {
    use std::collections::BTreeMap;
    let _ = vertex_count;
    let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let key = (a.min(b), a.max(b));
            map.entry(key).or_default().push(t);
        }
    }
    let mut edges = Vec::with_capacity(map.len());
    for ((v0, v1), tris) in map {
        match tris.len() {
            1 => edges.push(MeshEdge {
                v0,
                v1,
                tri_a: tris[0],
                tri_b: None,
            }),
            2 => edges.push(MeshEdge {
                v0,
                v1,
                tri_a: tris[0],
                tri_b: Some(tris[1]),
            }),
            n => {
                return Err(Error::InvalidMesh(format!(
                    "edge ({v0}, {v1}) is shared by {n} triangles; adjacency is inconsistent"
                )))
            }
        }
    }
    Ok(edges)
}
