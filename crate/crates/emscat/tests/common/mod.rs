//! Shared oracles for the integration suites: brute-force and adaptive
//! quadrature references that stay independent of the library's assembly
//! path (they evaluate the defining integrands directly).

#![allow(dead_code)]

use emscat::geom::{Triangle, Vec3};
use emscat::kernels::green_of_distance;
use emscat::quad::QuadratureRule;
use num_complex::Complex64;

pub fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}

pub fn rel_err_f(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// Split a triangle into its four midpoint children.
pub fn subdivide(tri: &Triangle) -> [Triangle; 4] {
    let [a, b, c] = tri.v;
    let ab = (a + b) / 2.0;
    let bc = (b + c) / 2.0;
    let ca = (c + a) / 2.0;
    [
        Triangle::new(a, ab, ca),
        Triangle::new(ab, b, bc),
        Triangle::new(ca, bc, c),
        Triangle::new(ab, bc, ca),
    ]
}

/// Quadrature nodes of a uniformly subdivided triangle.
pub fn refined_nodes(tri: &Triangle, depth: usize, rule: &QuadratureRule) -> Vec<(Vec3, f64)> {
    if depth == 0 {
        return rule.nodes_on(tri);
    }
    subdivide(tri)
        .iter()
        .flat_map(|t| refined_nodes(t, depth - 1, rule))
        .collect()
}

/// Half-RWG function on `tri` associated with the edge opposite local
/// vertex `a` (positive orientation, full `l/(2A)` normalization).
pub fn half_rwg(tri: &Triangle, a: usize, r: Vec3) -> (Vec3, f64) {
    let area = tri.area();
    let va = tri.v[(a + 1) % 3];
    let vb = tri.v[(a + 2) % 3];
    let l = (vb - va).norm();
    ((r - tri.v[a]) * (l / (2.0 * area)), l / area)
}

/// Brute-force product quadrature of the Galerkin vector-potential pair
/// integral `∬ G f_a·f_b - (1/k²) ∬ G (∇·f_a)(∇·f_b)` on a separated pair.
pub fn brute_force_pair_l(
    test_tri: &Triangle,
    src_tri: &Triangle,
    k: Complex64,
    depth: usize,
) -> [[Complex64; 3]; 3] {
    let rule = QuadratureRule::sixteen_point();
    let tn = refined_nodes(test_tri, depth, &rule);
    let sn = refined_nodes(src_tri, depth, &rule);
    let inv_k2 = 1.0 / (k * k);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for &(rp, wt) in &tn {
        for &(rq, ws) in &sn {
            let g = green_of_distance((rp - rq).norm(), k);
            let wg = g * (wt * ws);
            for a in 0..3 {
                let (fa, da) = half_rwg(test_tri, a, rp);
                for b in 0..3 {
                    let (fb, db) = half_rwg(src_tri, b, rq);
                    out[a][b] += wg * fa.dot(&fb) - wg * inv_k2 * (da * db);
                }
            }
        }
    }
    out
}

/// Brute-force product quadrature of the curl-operator pair integral
/// `∬ f_a · (∇_r G × f_b)` on a separated pair.
pub fn brute_force_pair_k(
    test_tri: &Triangle,
    src_tri: &Triangle,
    k: Complex64,
    depth: usize,
) -> [[Complex64; 3]; 3] {
    let rule = QuadratureRule::sixteen_point();
    let tn = refined_nodes(test_tri, depth, &rule);
    let sn = refined_nodes(src_tri, depth, &rule);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for &(rp, wt) in &tn {
        for &(rq, ws) in &sn {
            let rvec = rp - rq;
            let dist = rvec.norm();
            let g = green_of_distance(dist, k);
            // ∇_r G = (r-r') g (-jk - 1/R)/R
            let gs = g * (Complex64::new(-1.0 / dist, 0.0) - Complex64::new(0.0, 1.0) * k) / dist;
            let w = wt * ws;
            for a in 0..3 {
                let (fa, _) = half_rwg(test_tri, a, rp);
                for b in 0..3 {
                    let (fb, _) = half_rwg(src_tri, b, rq);
                    out[a][b] += gs * w * fa.dot(&rvec.cross(&fb));
                }
            }
        }
    }
    out
}

/// Adaptive (graded toward the observation point) quadrature of ∫ 1/R dS'.
/// Valid for observation points on or off the triangle; refinement follows
/// the child containing the projection of `obs`.
pub fn adaptive_inv_r(tri: &Triangle, obs: Vec3, levels: usize) -> f64 {
    fn smooth_part(tri: &Triangle, obs: Vec3) -> f64 {
        // Three uniform refinements of the degree-8 rule on a panel whose
        // distance from obs is comparable to its size.
        refined_nodes(tri, 3, &QuadratureRule::sixteen_point())
            .iter()
            .map(|&(p, w)| w / (obs - p).norm())
            .sum()
    }
    fn contains_projection(tri: &Triangle, obs: Vec3) -> bool {
        let n = tri.unit_normal();
        let rho = obs - n * n.dot(&(obs - tri.v[0]));
        // Barycentric test with tolerance.
        let v0 = tri.v[1] - tri.v[0];
        let v1 = tri.v[2] - tri.v[0];
        let v2 = rho - tri.v[0];
        let d00 = v0.dot(&v0);
        let d01 = v0.dot(&v1);
        let d11 = v1.dot(&v1);
        let d20 = v2.dot(&v0);
        let d21 = v2.dot(&v1);
        let denom = d00 * d11 - d01 * d01;
        let v = (d11 * d20 - d01 * d21) / denom;
        let w = (d00 * d21 - d01 * d20) / denom;
        let u = 1.0 - v - w;
        u >= -1e-12 && v >= -1e-12 && w >= -1e-12
    }
    // An in-plane interior/edge singularity is first split at the
    // observation point so each piece is vertex-singular (a case the graded
    // recursion handles cleanly).
    let n = tri.unit_normal();
    let d = n.dot(&(obs - tri.v[0]));
    let at_vertex = tri
        .v
        .iter()
        .any(|&v| (v - obs).norm() < 1e-13 * tri.diameter());
    if d.abs() < 1e-13 * tri.diameter() && contains_projection(tri, obs) && !at_vertex {
        let mut total = 0.0;
        for e in 0..3 {
            let child = Triangle::new(obs, tri.v[e], tri.v[(e + 1) % 3]);
            if child.area() > 1e-14 * tri.area() {
                total += adaptive_inv_r(&child, obs, levels);
            }
        }
        return total;
    }

    let mut total = 0.0;
    let mut current = *tri;
    let floor = 1e-13 * tri.diameter();
    for _ in 0..levels {
        if current.diameter() < floor {
            break; // remaining singular core contributes O(diameter)
        }
        let children = subdivide(&current);
        let mut singular: Option<Triangle> = None;
        for ch in &children {
            let near =
                contains_projection(ch, obs) && (obs - ch.centroid()).norm() < 2.0 * ch.diameter();
            if singular.is_none() && near {
                singular = Some(*ch);
            } else {
                total += smooth_part(ch, obs);
            }
        }
        match singular {
            Some(ch) => current = ch,
            None => return total,
        }
    }
    // Remaining singular core is O(diameter) and geometrically small.
    total
}
