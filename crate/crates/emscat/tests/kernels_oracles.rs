//! Oracle checks for the kernel layer: brute-force product quadrature for
//! separated panel pairs, adaptive refinement for the closed-form static
//! integrals, order-refinement stability for self pairs, and the Helmholtz
//! property of the Green's function.

mod common;

use common::*;
use emscat::geom::{Triangle, Vec3};
use emscat::kernels::{green, panel_pair_k, panel_pair_l, static_panel_integrals, StaticPanel};
use emscat::quad::QuadratureRule;
use num_complex::Complex64;

fn test_pair() -> (Triangle, Triangle) {
    // Two irregular triangles of diameter ~0.3, separated by ~7 m
    // (> 20 diameters, where the degree-8 product rule is converged well
    // past 1e-8).
    let t1 = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.31, 0.04, 0.02),
        Vec3::new(0.09, 0.26, 0.11),
    );
    let t2 = Triangle::new(
        Vec3::new(6.6, 1.4, 2.0),
        Vec3::new(6.9, 1.45, 2.1),
        Vec3::new(6.7, 1.7, 1.9),
    );
    (t1, t2)
}

#[test]
fn panel_pair_l_matches_brute_force_on_separated_pair() {
    let (t1, t2) = test_pair();
    // Small k so the pair is also electrically well-resolved.
    let k = Complex64::new(0.35, 0.0);
    let rule = QuadratureRule::seven_point();
    let got = panel_pair_l(&t1, &t2, k, &rule).unwrap();
    let want = brute_force_pair_l(&t1, &t2, k, 2);
    for a in 0..3 {
        for b in 0..3 {
            assert!(
                rel_err(got[a][b], want[a][b]) < 1e-8,
                "L[{a}][{b}]: got {:?} want {:?}",
                got[a][b],
                want[a][b]
            );
        }
    }
}

#[test]
fn panel_pair_k_matches_brute_force_on_separated_pair() {
    let (t1, t2) = test_pair();
    let k = Complex64::new(0.8, 0.0);
    let rule = QuadratureRule::seven_point();
    let got = panel_pair_k(&t1, &t2, k, &rule).unwrap();
    let want = brute_force_pair_k(&t1, &t2, k, 2);
    let scale = want.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    for a in 0..3 {
        for b in 0..3 {
            assert!(
                (got[a][b] - want[a][b]).norm() < 1e-8 * scale,
                "K[{a}][{b}]: got {:?} want {:?}",
                got[a][b],
                want[a][b]
            );
        }
    }
}

#[test]
fn panel_pair_l_with_complex_wavenumber() {
    let (t1, t2) = test_pair();
    let k = Complex64::new(0.5, -0.05);
    let rule = QuadratureRule::seven_point();
    let got = panel_pair_l(&t1, &t2, k, &rule).unwrap();
    let want = brute_force_pair_l(&t1, &t2, k, 2);
    for a in 0..3 {
        for b in 0..3 {
            assert!(rel_err(got[a][b], want[a][b]) < 1e-8);
        }
    }
}

#[test]
fn panel_error_decreases_monotonically_with_rule_order() {
    // On a fixed moderately separated pair, |error| against the brute-force
    // reference must decrease as the rule order increases.
    let t1 = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.3, 0.0, 0.0),
        Vec3::new(0.05, 0.28, 0.0),
    );
    let t2 = Triangle::new(
        Vec3::new(1.4, 0.3, 0.9),
        Vec3::new(1.7, 0.32, 0.95),
        Vec3::new(1.45, 0.55, 1.05),
    );
    let k = Complex64::new(1.2, 0.0);
    let want = brute_force_pair_l(&t1, &t2, k, 3);
    let mut errs = Vec::new();
    for n in [1usize, 3, 7, 16] {
        let rule = QuadratureRule::by_points(n).unwrap();
        let got = panel_pair_l(&t1, &t2, k, &rule).unwrap();
        let mut e = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                e = e.max(rel_err(got[a][b], want[a][b]));
            }
        }
        errs.push(e);
    }
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "error must decrease with rule order: {errs:?}");
    }
    assert!(
        errs[2] < 1e-6,
        "7-pt rule on this pair should be ~1e-7: {errs:?}"
    );
}

#[test]
fn self_pair_stable_under_order_increase() {
    // The self-pair value uses extraction; raising the smooth-remainder rule
    // from 7 to 16 points must not move it by more than 1e-6 relative.
    let tri = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.07, 0.0, 0.0),
        Vec3::new(0.015, 0.06, 0.0),
    );
    let k = Complex64::new(4.0, 0.0);
    let lo = panel_pair_l(&tri, &tri, k, &QuadratureRule::seven_point()).unwrap();
    let hi = panel_pair_l(&tri, &tri, k, &QuadratureRule::sixteen_point()).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            assert!(
                rel_err(lo[a][b], hi[a][b]) < 1e-6,
                "self pair unstable at [{a}][{b}]: {:?} vs {:?}",
                lo[a][b],
                hi[a][b]
            );
            assert!(lo[a][b].norm().is_finite());
        }
    }
}

#[test]
fn static_i0_at_vertex_matches_adaptive_refinement() {
    // Unit right triangle, observation at a vertex (on the singularity).
    let tri = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
    );
    let (i0, _) = static_panel_integrals(&tri, tri.v[0]).unwrap();
    let want = adaptive_inv_r(&tri, tri.v[0], 60);
    assert!(
        rel_err_f(i0, want) < 1e-10,
        "I0 at vertex: closed form {i0} vs adaptive {want}"
    );
}

#[test]
fn static_i0_near_triangle_matches_adaptive_refinement() {
    let tri = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.8, 0.1, 0.0),
        Vec3::new(0.2, 0.9, 0.0),
    );
    for obs in [
        Vec3::new(0.3, 0.3, 0.05),  // just above the interior
        Vec3::new(0.3, 0.3, 0.0),   // on the face
        Vec3::new(-0.4, -0.3, 0.2), // outside, off-plane
        Vec3::new(2.0, 2.0, 1.0),   // far
    ] {
        let (i0, _) = static_panel_integrals(&tri, obs).unwrap();
        let want = adaptive_inv_r(&tri, obs, 60);
        assert!(
            rel_err_f(i0, want) < 1e-9,
            "I0 at {obs:?}: closed form {i0} vs adaptive {want}"
        );
    }
}

#[test]
fn static_moment_matches_brute_force_off_plane() {
    // Vector moment ∫ (r'-ρ)/R dS': off-plane observation where plain
    // refined quadrature converges quickly.
    let tri = Triangle::new(
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(0.5, 0.0, 0.0),
        Vec3::new(0.1, 0.45, 0.0),
    );
    let obs = Vec3::new(0.2, 0.1, 0.35);
    let sp = StaticPanel::compute(&tri, obs).unwrap();
    let nodes = refined_nodes(&tri, 4, &QuadratureRule::sixteen_point());
    let mut want = Vec3::zeros();
    let mut want_i1 = 0.0;
    for (p, w) in nodes {
        let r = (obs - p).norm();
        want += (p - sp.rho) * (w / r);
        want_i1 += w * r;
    }
    assert!((sp.iv0 - want).norm() < 1e-10 * want.norm());
    assert!(rel_err_f(sp.i1, want_i1) < 1e-10);
}

#[test]
fn green_satisfies_helmholtz_numerically() {
    // Central finite differences: ∇²G + k²G -> 0 with O(h²) convergence
    // away from the source.
    let k = Complex64::new(2.0, 0.0);
    let src = Vec3::zeros();
    let r = Vec3::new(0.9, 0.4, 0.3);
    let lap = |h: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for axis in 0..3 {
            let mut dp = Vec3::zeros();
            dp[axis] = h;
            s += green(r + dp, src, k).unwrap() + green(r - dp, src, k).unwrap()
                - 2.0 * green(r, src, k).unwrap();
        }
        s / (h * h)
    };
    let g = green(r, src, k).unwrap();
    let res = |h: f64| (lap(h) + k * k * g).norm() / g.norm();
    let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&h| res(h)).collect();
    // O(h²): each halving should shrink the residual by ~4 (allow slack).
    assert!(errs[1] < errs[0] / 2.5);
    assert!(errs[2] < errs[1] / 2.5);
    assert!(errs[2] < 1e-4);
}
