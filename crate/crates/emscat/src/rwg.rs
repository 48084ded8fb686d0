//! RWG (Rao-Wilton-Glisson) edge basis functions on a closed triangle mesh.
//!
//! Every interior edge carries one divergence-conforming basis function
//! supported on its two adjacent triangles:
//!
//! - on the plus triangle:  `f(r) = l/(2A+) (r - v+)`
//! - on the minus triangle: `f(r) = l/(2A-) (v- - r)`
//!
//! with surface divergence `±l/A±`. On a closed mesh every edge is interior,
//! so N = 3F/2.
//!
//! Plus/minus assignment is deterministic: the triangle that traverses the
//! shared edge from its lower to its higher vertex index is the plus side.

use std::collections::HashMap;

use crate::geom::Vec3;
use crate::mesh::SurfaceMesh;

/// One RWG basis function.
#[derive(Debug, Clone, Copy)]
pub struct RwgEdge {
    /// Shared edge endpoints as (low, high) vertex indices.
    pub vertices: (usize, usize),
    pub tri_plus: usize,
    pub tri_minus: usize,
    /// Free vertex index on the plus/minus triangle.
    pub free_plus: usize,
    pub free_minus: usize,
    /// Edge length (m).
    pub length: f64,
}

/// Per-triangle view of the (up to 3) basis functions it supports: the local
/// scatter table used by assembly.
#[derive(Debug, Clone, Copy)]
pub struct LocalBasis {
    /// Global basis index for each local edge slot.
    pub edge: [usize; 3],
    /// +1 on the plus triangle, -1 on the minus triangle.
    pub sign: [f64; 3],
    /// Free (opposite) vertex position for each local slot.
    pub free_vertex: [Vec3; 3],
    /// sign * l/(2A): multiplies `(r - free_vertex)` to give the function value.
    pub vec_scale: [f64; 3],
    /// sign * l/A: the constant surface divergence.
    pub div_scale: [f64; 3],
}

/// RWG basis over all interior edges of a closed mesh.
#[derive(Debug, Clone)]
pub struct RwgBasis {
    pub edges: Vec<RwgEdge>,
    per_triangle: Vec<LocalBasis>,
}

impl RwgBasis {
    pub fn build(mesh: &SurfaceMesh) -> Self {
        // Map undirected edge -> (plus triangle, minus triangle).
        let mut plus: HashMap<(usize, usize), usize> = HashMap::new();
        let mut minus: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, t) in mesh.triangles.iter().enumerate() {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                if a < b {
                    plus.insert(key, ti);
                } else {
                    minus.insert(key, ti);
                }
            }
        }

        let mut keys: Vec<(usize, usize)> = plus.keys().copied().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        for key in keys {
            let tp = plus[&key];
            let tm = *minus
                .get(&key)
                .expect("closed mesh: every edge has both traversals");
            let free_of = |ti: usize| {
                *mesh.triangles[ti]
                    .iter()
                    .find(|&&v| v != key.0 && v != key.1)
                    .expect("triangle has a vertex off the edge")
            };
            edges.push(RwgEdge {
                vertices: key,
                tri_plus: tp,
                tri_minus: tm,
                free_plus: free_of(tp),
                free_minus: free_of(tm),
                length: (mesh.vertices[key.1] - mesh.vertices[key.0]).norm(),
            });
        }

        // Invert into the per-triangle scatter table. Slot `a` of a triangle
        // corresponds to its local vertex `a` (the free vertex of that edge),
        // matching the panel-tensor slot convention used by assembly.
        let mut per_triangle = vec![
            LocalBasis {
                edge: [usize::MAX; 3],
                sign: [0.0; 3],
                free_vertex: [Vec3::zeros(); 3],
                vec_scale: [0.0; 3],
                div_scale: [0.0; 3],
            };
            mesh.num_triangles()
        ];
        for (n, e) in edges.iter().enumerate() {
            for (ti, sign, free) in [
                (e.tri_plus, 1.0, e.free_plus),
                (e.tri_minus, -1.0, e.free_minus),
            ] {
                let s = mesh.triangles[ti]
                    .iter()
                    .position(|&v| v == free)
                    .expect("free vertex belongs to the triangle");
                let lb = &mut per_triangle[ti];
                debug_assert_eq!(lb.edge[s], usize::MAX, "slot filled twice");
                lb.edge[s] = n;
                lb.sign[s] = sign;
                lb.free_vertex[s] = mesh.vertices[free];
                let area = mesh.area(ti);
                lb.vec_scale[s] = sign * e.length / (2.0 * area);
                lb.div_scale[s] = sign * e.length / area;
            }
        }
        debug_assert!(per_triangle
            .iter()
            .all(|lb| lb.edge.iter().all(|&e| e != usize::MAX)));

        Self {
            edges,
            per_triangle,
        }
    }

    /// Basis count N.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Scatter table for one triangle.
    pub fn local(&self, tri: usize) -> &LocalBasis {
        &self.per_triangle[tri]
    }

    /// Evaluate basis function `n` at `point` on triangle `tri`.
    ///
    /// Returns (vector value, surface divergence); zero outside the support.
    pub fn eval(&self, n: usize, tri: usize, point: Vec3) -> (Vec3, f64) {
        let lb = &self.per_triangle[tri];
        for s in 0..3 {
            if lb.edge[s] == n {
                return (
                    (point - lb.free_vertex[s]) * lb.vec_scale[s],
                    lb.div_scale[s],
                );
            }
        }
        (Vec3::zeros(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen;
    use crate::quad::QuadratureRule;

    #[test]
    fn counts_match_3f_over_2() {
        let icosa = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&icosa);
        assert_eq!(basis.len(), 30);

        let sphere = gen::sphere_1220(0.5);
        let basis = RwgBasis::build(&sphere);
        assert_eq!(basis.len(), 1830);
    }

    #[test]
    fn array_total_edges() {
        // 2x2 array with the per-sphere mesh reused: total N follows 3F/2.
        let unit = gen::icosphere(0.5, 2);
        let array = gen::grid_array(&unit, 2, 2, 2.0, 2.0);
        let total: usize = array.iter().map(|m| RwgBasis::build(m).len()).sum();
        assert_eq!(total, 4 * (3 * 320 / 2));
    }

    #[test]
    fn vanishes_at_free_vertex_and_off_support() {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        let e = &basis.edges[4];
        let (v, _) = basis.eval(4, e.tri_plus, mesh.vertices[e.free_plus]);
        assert!(v.norm() < 1e-14);
        // Any triangle not in the support gives zero.
        let other = (0..mesh.num_triangles())
            .find(|&t| t != e.tri_plus && t != e.tri_minus)
            .unwrap();
        let (v, d) = basis.eval(4, other, mesh.centroid(other));
        assert_eq!(v.norm(), 0.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn divergence_integrates_to_zero_over_support() {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        for (n, e) in basis.edges.iter().enumerate() {
            let (_, dp) = basis.eval(n, e.tri_plus, mesh.centroid(e.tri_plus));
            let (_, dm) = basis.eval(n, e.tri_minus, mesh.centroid(e.tri_minus));
            let total = dp * mesh.area(e.tri_plus) + dm * mesh.area(e.tri_minus);
            assert!(total.abs() < 1e-12 * e.length, "charge neutrality violated");
            assert!((dp * mesh.area(e.tri_plus) - e.length).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_component_continuous_across_edge() {
        // Sample random points on shared edges; the component of f normal to
        // the edge (in each triangle's plane) must agree from both sides.
        let mesh = gen::icosphere(1.0, 1);
        let basis = RwgBasis::build(&mesh);
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let mut rand01 = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for (n, e) in basis.edges.iter().enumerate() {
            let a = mesh.vertices[e.vertices.0];
            let b = mesh.vertices[e.vertices.1];
            for _ in 0..4 {
                let t = rand01();
                let p = a * (1.0 - t) + b * t;
                let edge_dir = (b - a).normalize();
                let (fp, _) = basis.eval(n, e.tri_plus, p);
                let (fm, _) = basis.eval(n, e.tri_minus, p);
                // Edge-normal direction within each triangle's plane.
                let np = mesh.normal(e.tri_plus).cross(&edge_dir);
                let nm = mesh.normal(e.tri_minus).cross(&edge_dir);
                let jump = fp.dot(&np) - fm.dot(&nm);
                assert!(
                    jump.abs() <= 1e-12 * fp.norm().max(fm.norm()).max(1e-30),
                    "normal continuity violated on edge {n}: {jump:e}"
                );
            }
        }
    }

    #[test]
    fn eval_matches_local_table() {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        let rule = QuadratureRule::seven_point();
        for tri in 0..mesh.num_triangles() {
            let lb = basis.local(tri);
            let t = mesh.triangle(tri);
            for (p, _) in rule.nodes_on(&t) {
                for s in 0..3 {
                    let (v, d) = basis.eval(lb.edge[s], tri, p);
                    let expect = (p - lb.free_vertex[s]) * lb.vec_scale[s];
                    assert!((v - expect).norm() < 1e-14);
                    assert!((d - lb.div_scale[s]).abs() < 1e-14);
                }
            }
        }
    }
}
