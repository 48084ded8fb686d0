//! Procedural closed meshes: canonical polyhedra, sphere tessellations and
//! array layouts used by the test suites and shipped example configurations.

use std::collections::HashMap;

use super::SurfaceMesh;
use crate::geom::Vec3;

/// Regular icosahedron with circumradius `radius`, outward oriented.
pub fn icosahedron(radius: f64) -> SurfaceMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let s = radius / (1.0 + phi * phi).sqrt();
    let p = phi * s;
    let vertices = vec![
        Vec3::new(-s, p, 0.0),
        Vec3::new(s, p, 0.0),
        Vec3::new(-s, -p, 0.0),
        Vec3::new(s, -p, 0.0),
        Vec3::new(0.0, -s, p),
        Vec3::new(0.0, s, p),
        Vec3::new(0.0, -s, -p),
        Vec3::new(0.0, s, -p),
        Vec3::new(p, 0.0, -s),
        Vec3::new(p, 0.0, s),
        Vec3::new(-p, 0.0, -s),
        Vec3::new(-p, 0.0, s),
    ];
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    SurfaceMesh::build(vertices, triangles, 0).expect("canonical icosahedron is valid")
}

/// Geodesic sphere: icosahedron subdivided `subdivisions` times and projected
/// to radius `radius`. F = 20·4^subdivisions.
pub fn icosphere(radius: f64, subdivisions: usize) -> SurfaceMesh {
    let base = icosahedron(radius);
    let mut vertices = base.vertices.clone();
    let mut triangles = base.triangles.clone();
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mids: Vec<usize> = (0..3)
                .map(|e| {
                    let a = t[e];
                    let b = t[(e + 1) % 3];
                    let key = (a.min(b), a.max(b));
                    *midpoint.entry(key).or_insert_with(|| {
                        let m = (vertices[a] + vertices[b]) / 2.0;
                        vertices.push(m / m.norm() * radius);
                        vertices.len() - 1
                    })
                })
                .collect();
            next.push([t[0], mids[0], mids[2]]);
            next.push([t[1], mids[1], mids[0]]);
            next.push([t[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }
    SurfaceMesh::build(vertices, triangles, 0).expect("subdivision preserves validity")
}

/// Latitude/longitude sphere with `n_stacks` polar divisions and `n_slices`
/// azimuthal divisions. F = 2·n_slices·(n_stacks-1).
pub fn uv_sphere(radius: f64, n_stacks: usize, n_slices: usize) -> SurfaceMesh {
    assert!(n_stacks >= 2 && n_slices >= 3);
    let mut vertices = Vec::new();
    vertices.push(Vec3::new(0.0, 0.0, radius)); // north pole
    for i in 1..n_stacks {
        let theta = std::f64::consts::PI * i as f64 / n_stacks as f64;
        for j in 0..n_slices {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_slices as f64;
            vertices.push(Vec3::new(
                radius * theta.sin() * phi.cos(),
                radius * theta.sin() * phi.sin(),
                radius * theta.cos(),
            ));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, -radius)); // south pole
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * n_slices + (j % n_slices);

    let mut triangles = Vec::new();
    for j in 0..n_slices {
        triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..n_stacks - 1 {
        for j in 0..n_slices {
            let a = ring(i, j);
            let b = ring(i, j + 1);
            let c = ring(i + 1, j);
            let d = ring(i + 1, j + 1);
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
    }
    for j in 0..n_slices {
        triangles.push([south, ring(n_stacks - 1, j + 1), ring(n_stacks - 1, j)]);
    }
    SurfaceMesh::build(vertices, triangles, 0).expect("uv sphere is valid")
}

/// Area-weighted Laplacian smoothing with reprojection to a sphere of the
/// given radius: evens out triangle shapes without changing the topology.
fn relax_on_sphere(
    vertices: &mut [Vec3],
    triangles: &[[usize; 3]],
    radius: f64,
    iterations: usize,
) {
    for _ in 0..iterations {
        let mut accum = vec![Vec3::zeros(); vertices.len()];
        let mut weight = vec![0.0f64; vertices.len()];
        for t in triangles {
            let tri = crate::geom::Triangle::new(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let area = tri.area();
            let c = tri.centroid();
            for &v in t {
                accum[v] += c * area;
                weight[v] += area;
            }
        }
        for (v, (a, w)) in vertices.iter_mut().zip(accum.iter().zip(&weight)) {
            let target = *a / *w;
            *v = target / target.norm() * radius;
        }
    }
}

/// Convex hull of points in general position on a sphere (incremental
/// algorithm); returns outward-oriented triangles with F = 2V - 4.
fn convex_hull_on_sphere(points: &[Vec3]) -> Vec<[usize; 3]> {
    assert!(points.len() >= 4);
    let scale = points.iter().map(|p| p.norm()).fold(0.0f64, f64::max);
    let eps = 1e-12 * scale;

    // Seed tetrahedron: two extreme points, the farthest from their line,
    // then the farthest from that plane.
    let i0 = 0usize;
    let i1 = (1..points.len())
        .max_by(|&a, &b| {
            let da = (points[a] - points[i0]).norm();
            let db = (points[b] - points[i0]).norm();
            da.partial_cmp(&db).expect("finite")
        })
        .expect("points");
    let dir = (points[i1] - points[i0]).normalize();
    let i2 = (0..points.len())
        .filter(|&i| i != i0 && i != i1)
        .max_by(|&a, &b| {
            let da = (points[a] - points[i0] - dir * (points[a] - points[i0]).dot(&dir)).norm();
            let db = (points[b] - points[i0] - dir * (points[b] - points[i0]).dot(&dir)).norm();
            da.partial_cmp(&db).expect("finite")
        })
        .expect("points");
    let n012 = (points[i1] - points[i0]).cross(&(points[i2] - points[i0]));
    let i3 = (0..points.len())
        .filter(|&i| i != i0 && i != i1 && i != i2)
        .max_by(|&a, &b| {
            let da = n012.dot(&(points[a] - points[i0])).abs();
            let db = n012.dot(&(points[b] - points[i0])).abs();
            da.partial_cmp(&db).expect("finite")
        })
        .expect("points");

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let orient = |f: &[usize; 3], apex: usize| {
        let n = (points[f[1]] - points[f[0]]).cross(&(points[f[2]] - points[f[0]]));
        n.dot(&(points[apex] - points[f[0]]))
    };
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let apex = [i0, i1, i2, i3]
            .into_iter()
            .find(|v| !f.contains(v))
            .expect("apex");
        if orient(&f, apex) > 0.0 {
            faces.push([f[0], f[2], f[1]]);
        } else {
            faces.push(f);
        }
    }

    let seed = [i0, i1, i2, i3];
    for (p, _) in points.iter().enumerate() {
        if seed.contains(&p) {
            continue;
        }
        // Faces visible from p.
        let mut visible = vec![false; faces.len()];
        let mut any = false;
        for (fi, f) in faces.iter().enumerate() {
            let n = (points[f[1]] - points[f[0]]).cross(&(points[f[2]] - points[f[0]]));
            if n.dot(&(points[p] - points[f[0]])) > eps {
                visible[fi] = true;
                any = true;
            }
        }
        if !any {
            continue; // inside the current hull (cannot happen on a sphere)
        }
        // Horizon: edges shared by exactly one visible face.
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            if !visible[fi] {
                continue;
            }
            for e in 0..3 {
                let a = f[e];
                let b = f[(e + 1) % 3];
                // The neighbor across (a, b) traverses it as (b, a).
                let neighbor_visible = faces.iter().enumerate().any(|(gi, g)| {
                    visible[gi] && gi != fi && (0..3).any(|k| g[k] == b && g[(k + 1) % 3] == a)
                });
                if !neighbor_visible {
                    horizon.push((a, b));
                }
            }
        }
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        for (a, b) in horizon {
            next.push([a, b, p]);
        }
        faces = next;
    }
    faces
}

/// Near-uniform sphere tessellation from `n_vertices` Fibonacci-spiral
/// points triangulated by their convex hull: F = 2·n_vertices - 4.
pub fn fibonacci_sphere(radius: f64, n_vertices: usize) -> SurfaceMesh {
    assert!(n_vertices >= 4);
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_vertices as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
        vertices.push(Vec3::new(
            radius * r * phi.cos(),
            radius * r * phi.sin(),
            radius * z,
        ));
    }
    let mut triangles = convex_hull_on_sphere(&vertices);
    // A few smoothing sweeps even out the spiral seams.
    relax_on_sphere(&mut vertices, &triangles, radius, 30);
    let _ = &mut triangles;
    let mesh = SurfaceMesh::build(vertices, triangles, 0).expect("hull of sphere points is valid");
    assert_eq!(mesh.num_triangles(), 2 * n_vertices - 4);
    mesh
}

/// Sphere tessellation with exactly 1220 triangles (1830 RWG edges):
/// the Fibonacci/convex-hull tessellation with 612 vertices.
pub fn sphere_1220(radius: f64) -> SurfaceMesh {
    let mesh = fibonacci_sphere(radius, 612);
    assert_eq!(mesh.num_triangles(), 1220);
    mesh
}

/// Raw tetrahedron data (outward oriented); handy for building deliberately
/// broken meshes in tests.
pub fn tetrahedron_raw() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let vertices = vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    let triangles = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    (vertices, triangles)
}

pub fn tetrahedron() -> SurfaceMesh {
    let (v, t) = tetrahedron_raw();
    SurfaceMesh::build(v, t, 0).expect("tetrahedron is valid")
}

/// Planar grid of copies of `unit`, spaced by `dx`/`dy`, centered on the
/// origin, with scatterer ids 0..nx*ny.
pub fn grid_array(unit: &SurfaceMesh, nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<SurfaceMesh> {
    let x0 = -(nx as f64 - 1.0) / 2.0 * dx;
    let y0 = -(ny as f64 - 1.0) / 2.0 * dy;
    let mut out = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let mut m = unit.translated(Vec3::new(x0 + ix as f64 * dx, y0 + iy as f64 * dy, 0.0));
            m.scatterer_id = iy * nx + ix;
            out.push(m);
        }
    }
    out
}
