//! Closed triangulated surface meshes: validation, topology and file IO.
//!
//! A scatterer boundary must be a closed, consistently oriented 2-manifold
//! with outward normals. Validation enforces this at construction; meshes
//! that arrive inward-oriented are flipped rather than rejected, with the
//! flip recorded on the mesh.

use std::collections::BTreeMap;

use crate::geom::{signed_solid_angle, Triangle, Vec3};

pub mod gen;
pub mod io;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {tri} references vertex {vertex} out of range")]
    BadIndex { tri: usize, vertex: usize },
    #[error("vertex {vertex} has non-finite coordinates")]
    NonFiniteVertex { vertex: usize },
    #[error("triangle {tri} is degenerate (area {area:.3e})")]
    DegenerateTriangle { tri: usize, area: f64 },
    #[error("surface is not closed: {} boundary edge(s), first ones {:?}", boundary_edges.len(), preview(boundary_edges))]
    OpenSurface { boundary_edges: Vec<(usize, usize)> },
    #[error("non-manifold edge ({}, {}) shared by {count} triangles", edge.0, edge.1)]
    NonManifoldEdge { edge: (usize, usize), count: usize },
    #[error("inconsistent orientation: edge ({}, {}) traversed twice in the same direction (triangles {tri_a} and {tri_b})", edge.0, edge.1)]
    InconsistentOrientation {
        edge: (usize, usize),
        tri_a: usize,
        tri_b: usize,
    },
    #[error("mesh encloses no volume (signed volume {volume:.3e}); orientation undecidable")]
    NoVolume { volume: f64 },
    #[error("file contains {count} bodies; expected exactly one")]
    MultipleBodies { count: usize },
    #[error("unsupported mesh format {0:?}")]
    UnknownFormat(String),
}

fn preview(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    edges.iter().take(4).copied().collect()
}

/// Mesh file formats accepted by [`io::load_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    /// Gmsh ASCII v2 `.msh` (3-node triangles, physical tag = scatterer id).
    GmshV2,
    /// Wavefront `.obj`, triangulated, one object per scatterer.
    Obj,
}

impl MeshFormat {
    pub fn from_extension(path: &str) -> Option<Self> {
        let lower = path.to_ascii_lowercase();
        if lower.ends_with(".msh") {
            Some(Self::GmshV2)
        } else if lower.ends_with(".obj") {
            Some(Self::Obj)
        } else {
            None
        }
    }
}

/// Closed triangulated boundary of one scatterer, with per-triangle caches.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    /// Vertex index triples, consistently oriented with outward normals.
    pub triangles: Vec<[usize; 3]>,
    /// Integer label for multi-body scenes.
    pub scatterer_id: usize,
    /// True if validation found inward orientation and flipped every triangle.
    pub orientation_flipped: bool,
    areas: Vec<f64>,
    normals: Vec<Vec3>,
    centroids: Vec<Vec3>,
    diameters: Vec<f64>,
}

impl SurfaceMesh {
    /// Validate raw vertex/triangle data and build the cached quantities.
    pub fn build(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        scatterer_id: usize,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for (vi, v) in vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(MeshError::NonFiniteVertex { vertex: vi });
            }
        }
        let mut scale: f64 = 0.0;
        for (ti, t) in triangles.iter().enumerate() {
            for &vi in t {
                if vi >= vertices.len() {
                    return Err(MeshError::BadIndex {
                        tri: ti,
                        vertex: vi,
                    });
                }
            }
            for v in [vertices[t[0]], vertices[t[1]], vertices[t[2]]] {
                scale = scale.max(v.norm());
            }
        }
        let area_floor = 1e-14 * scale * scale;

        // Each undirected edge must be traversed exactly twice, in opposite
        // directions (closed, consistently oriented 2-manifold).
        let mut edge_use: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                edge_use.entry(key).or_default().push((ti, a < b));
            }
        }
        let mut boundary = Vec::new();
        for (edge, uses) in &edge_use {
            match uses.len() {
                1 => boundary.push(*edge),
                2 => {
                    if uses[0].1 == uses[1].1 {
                        return Err(MeshError::InconsistentOrientation {
                            edge: *edge,
                            tri_a: uses[0].0,
                            tri_b: uses[1].0,
                        });
                    }
                }
                n => {
                    return Err(MeshError::NonManifoldEdge {
                        edge: *edge,
                        count: n,
                    })
                }
            }
        }
        if !boundary.is_empty() {
            return Err(MeshError::OpenSurface {
                boundary_edges: boundary,
            });
        }

        let mut mesh = Self {
            vertices,
            triangles,
            scatterer_id,
            orientation_flipped: false,
            areas: Vec::new(),
            normals: Vec::new(),
            centroids: Vec::new(),
            diameters: Vec::new(),
        };
        mesh.rebuild_caches(area_floor)?;

        let volume = mesh.signed_volume();
        let volume_floor = 1e-12 * scale * scale * scale;
        if volume.abs() <= volume_floor {
            return Err(MeshError::NoVolume { volume });
        }
        if volume < 0.0 {
            for t in &mut mesh.triangles {
                t.swap(1, 2);
            }
            mesh.orientation_flipped = true;
            mesh.rebuild_caches(area_floor)?;
        }
        Ok(mesh)
    }

    fn rebuild_caches(&mut self, area_floor: f64) -> Result<(), MeshError> {
        let f = self.triangles.len();
        self.areas = Vec::with_capacity(f);
        self.normals = Vec::with_capacity(f);
        self.centroids = Vec::with_capacity(f);
        self.diameters = Vec::with_capacity(f);
        for (ti, t) in self.triangles.iter().enumerate() {
            let tri = Triangle::new(
                self.vertices[t[0]],
                self.vertices[t[1]],
                self.vertices[t[2]],
            );
            let area = tri.area();
            if !(area > area_floor) || !area.is_finite() {
                return Err(MeshError::DegenerateTriangle { tri: ti, area });
            }
            self.areas.push(area);
            self.normals.push(tri.unit_normal());
            self.centroids.push(tri.centroid());
            self.diameters.push(tri.diameter());
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, i: usize) -> Triangle {
        let t = self.triangles[i];
        Triangle::new(
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        )
    }

    pub fn area(&self, i: usize) -> f64 {
        self.areas[i]
    }

    /// Unit outward normal of triangle `i`.
    pub fn normal(&self, i: usize) -> Vec3 {
        self.normals[i]
    }

    pub fn centroid(&self, i: usize) -> Vec3 {
        self.centroids[i]
    }

    /// Longest edge of triangle `i`.
    pub fn diameter(&self, i: usize) -> f64 {
        self.diameters[i]
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    /// V - E + F (2 for genus-0 closed surfaces).
    pub fn euler_characteristic(&self) -> isize {
        self.num_vertices() as isize - self.num_edges() as isize + self.num_triangles() as isize
    }

    /// Enclosed volume via the divergence theorem; positive for outward
    /// orientation.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0]];
                let b = self.vertices[t[1]];
                let c = self.vertices[t[2]];
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    /// Total signed solid angle seen from `p`: 4π for interior points of an
    /// outward-oriented closed surface, 0 outside.
    pub fn solid_angle_sum(&self, p: Vec3) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                signed_solid_angle(
                    p,
                    self.vertices[t[0]],
                    self.vertices[t[1]],
                    self.vertices[t[2]],
                )
            })
            .sum()
    }

    /// Centroid of the enclosed volume region (good interior probe point for
    /// convex bodies).
    pub fn vertex_mean(&self) -> Vec3 {
        let mut s = Vec3::zeros();
        for v in &self.vertices {
            s += *v;
        }
        s / self.vertices.len() as f64
    }

    /// New mesh with every vertex mapped through `f` (re-validated).
    pub fn mapped(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self, MeshError> {
        SurfaceMesh::build(
            self.vertices.iter().map(|&v| f(v)).collect(),
            self.triangles.clone(),
            self.scatterer_id,
        )
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        // Translation cannot invalidate a valid mesh.
        self.mapped(|v| v + offset)
            .expect("translation preserves validity")
    }

    /// Uniformly rescale about the origin so the enclosed volume matches
    /// `target`. For faceted spheres this removes the inscribed-polyhedron
    /// radius bias, which otherwise dominates the discretization error.
    pub fn scaled_to_volume(&self, target: f64) -> Self {
        let s = (target / self.signed_volume()).powf(1.0 / 3.0);
        self.mapped(|v| v * s)
            .expect("uniform scaling preserves validity")
    }
}
