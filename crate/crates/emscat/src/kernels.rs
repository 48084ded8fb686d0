//! Scalar Green's function, closed-form static panel integrals, and the
//! Galerkin panel-pair integrals consumed by operator assembly.
//!
//! Kernel: `G(r,r') = e^{-jkR}/(4πR)` with `R = |r-r'|` (time convention
//! `e^{+jωt}`).
//!
//! Far pairs use tensor-product Gauss rules. Pairs closer than a few triangle
//! diameters (including self and edge/vertex neighbors) use singularity
//! extraction: the `1/R` and `R` terms of the kernel expansion are integrated
//! with the classic closed-form line-integral formulas, and only the smooth
//! remainder is left to quadrature.

use num_complex::Complex64;

use crate::geom::{Triangle, Vec3};
use crate::quad::QuadratureRule;

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("green's function evaluated at coincident points")]
    CoincidentPoints,
    #[error("degenerate triangle (area {0:.3e})")]
    DegenerateTriangle(f64),
    #[error("zero wavenumber: scalar-potential term undefined")]
    ZeroWavenumber,
}

/// Free-space scalar Green's function `e^{-jkR}/(4πR)`.
pub fn green(r: Vec3, r_src: Vec3, k: Complex64) -> Result<Complex64, KernelError> {
    let dist = (r - r_src).norm();
    if dist == 0.0 {
        return Err(KernelError::CoincidentPoints);
    }
    Ok(green_of_distance(dist, k))
}

#[inline]
pub fn green_of_distance(dist: f64, k: Complex64) -> Complex64 {
    // e^{-j(kr + j ki)R} = e^{ki R} (cos(kr R) - j sin(kr R))
    let (s, c) = (k.re * dist).sin_cos();
    let amp = (k.im * dist).exp() / (FOUR_PI * dist);
    Complex64::new(c * amp, -s * amp)
}

/// Gradient with respect to the observation point:
/// `∇_r G = (r - r') * G * (-jk - 1/R)/R`.
pub fn grad_green(r: Vec3, r_src: Vec3, k: Complex64) -> Result<[Complex64; 3], KernelError> {
    let rv = r - r_src;
    let dist = rv.norm();
    if dist == 0.0 {
        return Err(KernelError::CoincidentPoints);
    }
    let g = green_of_distance(dist, k);
    let s = g * (Complex64::new(-1.0 / dist, 0.0) - Complex64::new(0.0, 1.0) * k) / dist;
    Ok([s * rv.x, s * rv.y, s * rv.z])
}

/// Smooth remainder of `G` after extracting the `1/(4πR)` and `-k²R/(8π)`
/// terms; analytic (C¹) through `R = 0` with value `-jk/(4π)`.
#[inline]
fn green_smooth(dist: f64, k: Complex64) -> Complex64 {
    let x = Complex64::new(0.0, 1.0) * k * dist; // jkR
    if x.norm() < 1e-3 {
        // (1/4π)(-jk + jk³R²/6 + k⁴R³/24)
        let jk = Complex64::new(0.0, 1.0) * k;
        let k2 = k * k;
        (-jk + jk * k2 * dist * dist / 6.0 + k2 * k2 * dist * dist * dist / 24.0) / FOUR_PI
    } else {
        let em1 = (-x).exp() - 1.0;
        em1 / (FOUR_PI * dist) + k * k * dist / (2.0 * FOUR_PI)
    }
}

/// Scalar `h(R)` such that the smooth remainder of `∇_r G` after extracting
/// the static and `R`-term gradients is `(r-r') h(R)`; bounded through `R = 0`
/// with value `jk³/(12π)`.
#[inline]
fn grad_green_smooth_scale(dist: f64, k: Complex64) -> Complex64 {
    let x = Complex64::new(0.0, 1.0) * k * dist; // jkR
    if x.norm() < 1e-3 {
        // (1/4π)(jk³/3 + k⁴R/8 - jk⁵R²/30)
        let jk3 = Complex64::new(0.0, 1.0) * k * k * k;
        let k4 = k * k * k * k;
        (jk3 / 3.0 + k4 * dist / 8.0 - jk3 * k * k * dist * dist / 30.0) / FOUR_PI
    } else {
        let r3 = dist * dist * dist;
        let bracket = Complex64::new(1.0, 0.0) - (-x).exp() * (Complex64::new(1.0, 0.0) + x);
        bracket / (FOUR_PI * r3) + k * k / (2.0 * FOUR_PI * dist)
    }
}

// ---------------------------------------------------------------------------
// Closed-form static integrals over a single triangle
// ---------------------------------------------------------------------------

/// Closed-form integrals of the static kernels over one source triangle,
/// observed from a fixed point. All quantities follow the edge-decomposition
/// line-integral formulas; valid for observation points on, near, or far from
/// the triangle.
#[derive(Debug, Clone, Copy)]
pub struct StaticPanel {
    /// Signed height of the observation point over the triangle plane.
    pub d: f64,
    /// In-plane projection of the observation point.
    pub rho: Vec3,
    /// Source-triangle unit normal used for the decomposition.
    pub normal: Vec3,
    /// ∫ 1/R dS'  (m)
    pub i0: f64,
    /// ∫ R dS'    (m³)
    pub i1: f64,
    /// ∫ (r'-ρ)/R dS'  (m²)
    pub iv0: Vec3,
    /// ∫ R (r'-ρ) dS'  (m⁴)
    pub iv1: Vec3,
    /// Σ m̂_i f_i = -∫ (r'-ρ)/R³ dS'
    pub sum_mf: Vec3,
    /// d ∫ 1/R³ dS' = sign(d) Σ β_i (0 when the point lies in the plane)
    pub d_k0: f64,
}

impl StaticPanel {
    pub fn compute(tri: &Triangle, obs: Vec3) -> Result<Self, KernelError> {
        let area = tri.area();
        if !(area > 0.0) {
            return Err(KernelError::DegenerateTriangle(area));
        }
        let normal = tri.unit_normal();
        let d = normal.dot(&(obs - tri.v[0]));
        let rho = obs - normal * d;
        let abs_d = d.abs();
        let scale = tri.diameter().max(abs_d);
        let tiny = 1e-14 * scale;

        let mut i0 = 0.0;
        let mut iv0 = Vec3::zeros();
        let mut iv1 = Vec3::zeros();
        let mut sum_mf = Vec3::zeros();
        let mut beta_sum = 0.0;
        let mut sum_t_j1 = 0.0;

        for e in 0..3 {
            let va = tri.v[e];
            let vb = tri.v[(e + 1) % 3];
            let s_hat = (vb - va).normalize();
            let m_hat = s_hat.cross(&normal); // outward in-plane edge normal
            let l_minus = (va - rho).dot(&s_hat);
            let l_plus = (vb - rho).dot(&s_hat);
            let t0 = (va - rho).dot(&m_hat);
            let r_minus = (obs - va).norm();
            let r_plus = (obs - vb).norm();
            let r0_sq = t0 * t0 + d * d;

            // ln((R+ + l+)/(R- + l-)), evaluated in the numerically safe form.
            let f = if r0_sq <= tiny * tiny {
                0.0 // multiplied by t0 ~ 0 and R0² ~ 0 wherever it appears
            } else if l_plus + r_plus > l_minus.abs() + r_minus.abs() {
                ((r_plus + l_plus) / (r_minus + l_minus)).ln()
            } else {
                ((r_minus - l_minus) / (r_plus - l_plus)).ln()
            };
            let beta = (t0 * l_plus).atan2(r0_sq + abs_d * r_plus)
                - (t0 * l_minus).atan2(r0_sq + abs_d * r_minus);
            let j1 = 0.5 * (l_plus * r_plus - l_minus * r_minus + r0_sq * f);
            let j3 =
                0.25 * (l_plus * r_plus.powi(3) - l_minus * r_minus.powi(3) + 3.0 * r0_sq * j1);

            i0 += t0 * f - abs_d * beta;
            beta_sum += beta;
            sum_t_j1 += t0 * j1;
            iv0 += m_hat * j1;
            iv1 += m_hat * (j3 / 3.0);
            sum_mf += m_hat * f;
        }

        let i1 = (sum_t_j1 + d * d * i0) / 3.0;
        let d_k0 = if abs_d <= tiny {
            0.0
        } else {
            d.signum() * beta_sum
        };

        Ok(Self {
            d,
            rho,
            normal,
            i0,
            i1,
            iv0,
            iv1,
            sum_mf,
            d_k0,
        })
    }

    /// ∫ G₀ dS' with G₀ = 1/(4πR).
    pub fn green_static(&self) -> f64 {
        self.i0 / FOUR_PI
    }

    /// ∫ G₀ (r' - v) dS'.
    pub fn green_static_moment(&self, v: Vec3) -> Vec3 {
        (self.iv0 + (self.rho - v) * self.i0) / FOUR_PI
    }

    /// ∫ ∇_r G₀ dS' = -(1/4π) ∫ (r-r')/R³ dS'.
    pub fn grad_static(&self) -> Vec3 {
        -(self.normal * self.d_k0 + self.sum_mf) / FOUR_PI
    }

    /// ∫ ∇_r G₀ × (r' - v) dS'.
    pub fn grad_static_cross(&self, v: Vec3) -> Vec3 {
        let pv = self.rho - v;
        let k2 = -self.sum_mf; // ∫ (r'-ρ)/R³
        -(self.normal.cross(&k2) * self.d + self.normal.cross(&pv) * self.d_k0 - k2.cross(&pv))
            / FOUR_PI
    }

    /// ∫ (r-r')/R dS' (used by the R-term gradient extraction).
    pub fn grad_r_term(&self) -> Vec3 {
        self.normal * (self.d * self.i0) - self.iv0
    }

    /// ∫ (r-r')/R × (r' - v) dS'.
    pub fn grad_r_term_cross(&self, v: Vec3) -> Vec3 {
        let pv = self.rho - v;
        self.normal.cross(&self.iv0) * self.d + self.normal.cross(&pv) * (self.d * self.i0)
            - self.iv0.cross(&pv)
    }
}

/// Spec-level accessor: `(∫ 1/R dS', ∫ (r'-proj)/R dS')`.
pub fn static_panel_integrals(tri: &Triangle, obs: Vec3) -> Result<(f64, Vec3), KernelError> {
    let sp = StaticPanel::compute(tri, obs)?;
    Ok((sp.i0, sp.iv0))
}

// ---------------------------------------------------------------------------
// Panel pair engine
// ---------------------------------------------------------------------------

/// Raw Galerkin pair integrals for one (test, source) triangle pair and one
/// medium, over unnormalized half-functions `(r - v_a)` on the test triangle
/// and `(r' - v_b)` on the source triangle:
///
/// - `a[a][b]  = ∬ G (r-v_a)·(r'-v_b)`
/// - `b[a][b]  = ∬ G (n̂_t×(r-v_a))·(r'-v_b)`
/// - `c[a][b]  = ∬ (r-v_a)·(∇_r G × (r'-v_b))`
/// - `cx[a][b] = ∬ (n̂_t×(r-v_a))·(∇_r G × (r'-v_b))`
/// - `bs[a]    = ∬ (n̂_t×(r-v_a))·∇_r G`
/// - `s0       = ∬ G`
///
/// RWG length/area normalization and plus/minus signs are applied by the
/// caller when scattering into global matrices.
#[derive(Debug, Clone, Copy)]
pub struct PairTensors {
    pub a: [[Complex64; 3]; 3],
    pub b: [[Complex64; 3]; 3],
    pub c: [[Complex64; 3]; 3],
    pub cx: [[Complex64; 3]; 3],
    pub bs: [Complex64; 3],
    pub s0: Complex64,
}

impl PairTensors {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            a: [[z; 3]; 3],
            b: [[z; 3]; 3],
            c: [[z; 3]; 3],
            cx: [[z; 3]; 3],
            bs: [z; 3],
            s0: z,
        }
    }
}

/// Precomputed quadrature data for one triangle under one rule.
#[derive(Debug, Clone)]
pub struct TriQuadCache {
    pub tri: Triangle,
    pub normal: Vec3,
    pub centroid: Vec3,
    pub diameter: f64,
    /// (position, weight·area)
    pub nodes: Vec<(Vec3, f64)>,
    /// Per node: r - v_a for each local vertex a.
    pub rva: Vec<[Vec3; 3]>,
    /// Per node: n̂ × (r - v_a).
    pub nrva: Vec<[Vec3; 3]>,
}

impl TriQuadCache {
    pub fn new(tri: Triangle, rule: &QuadratureRule) -> Self {
        let normal = tri.unit_normal();
        let nodes = rule.nodes_on(&tri);
        let mut rva = Vec::with_capacity(nodes.len());
        let mut nrva = Vec::with_capacity(nodes.len());
        for (p, _) in &nodes {
            let r = [p - tri.v[0], p - tri.v[1], p - tri.v[2]];
            rva.push(r);
            nrva.push([
                normal.cross(&r[0]),
                normal.cross(&r[1]),
                normal.cross(&r[2]),
            ]);
        }
        Self {
            normal,
            centroid: tri.centroid(),
            diameter: tri.diameter(),
            tri,
            nodes,
            rva,
            nrva,
        }
    }
}

/// Accumulate the far-pair quadrature contribution for every medium at once;
/// geometry factors are shared, only the kernel differs per medium.
pub fn pair_tensors_far(
    test: &TriQuadCache,
    src: &TriQuadCache,
    ks: &[Complex64],
    out: &mut [PairTensors],
) {
    debug_assert_eq!(ks.len(), out.len());
    for (i, &(rp, wt)) in test.nodes.iter().enumerate() {
        let ua = &test.rva[i];
        let nua = &test.nrva[i];
        for (j, &(rq, ws)) in src.nodes.iter().enumerate() {
            let w = wt * ws;
            let rvec = rp - rq;
            let dist = rvec.norm();
            let wb = &src.rva[j];

            // Real geometry factors shared across media.
            let mut dot_uw = [[0.0f64; 3]; 3];
            let mut dot_nw = [[0.0f64; 3]; 3];
            let mut dot_uc = [[0.0f64; 3]; 3];
            let mut dot_nc = [[0.0f64; 3]; 3];
            let mut dot_nr = [0.0f64; 3];
            for b in 0..3 {
                let cross = rvec.cross(&wb[b]);
                for a in 0..3 {
                    dot_uw[a][b] = ua[a].dot(&wb[b]);
                    dot_nw[a][b] = nua[a].dot(&wb[b]);
                    dot_uc[a][b] = ua[a].dot(&cross);
                    dot_nc[a][b] = nua[a].dot(&cross);
                }
            }
            for a in 0..3 {
                dot_nr[a] = nua[a].dot(&rvec);
            }

            for (m, &k) in ks.iter().enumerate() {
                let g = green_of_distance(dist, k);
                let gs =
                    g * (Complex64::new(-1.0 / dist, 0.0) - Complex64::new(0.0, 1.0) * k) / dist;
                let wg = g * w;
                let wgs = gs * w;
                let t = &mut out[m];
                t.s0 += wg;
                for a in 0..3 {
                    t.bs[a] += wgs * dot_nr[a];
                    for b in 0..3 {
                        t.a[a][b] += wg * dot_uw[a][b];
                        t.b[a][b] += wg * dot_nw[a][b];
                        t.c[a][b] += wgs * dot_uc[a][b];
                        t.cx[a][b] += wgs * dot_nc[a][b];
                    }
                }
            }
        }
    }
}

/// Near/self pair via singularity extraction: closed-form statics for the
/// `1/R` and `R` kernel terms at every (outer) test node, quadrature for the
/// smooth remainder.
///
/// `skip_curl` suppresses the `c`/`cx` tensors (used for the self pair, where
/// the principal value vanishes identically for flat triangles).
pub fn pair_tensors_near(
    test: &TriQuadCache,
    src: &TriQuadCache,
    ks: &[Complex64],
    skip_curl: bool,
    out: &mut [PairTensors],
) -> Result<(), KernelError> {
    debug_assert_eq!(ks.len(), out.len());
    let vb = src.tri.v;

    for (i, &(rp, wt)) in test.nodes.iter().enumerate() {
        let ua = &test.rva[i];
        let nua = &test.nrva[i];
        let sp = StaticPanel::compute(&src.tri, rp)?;

        let g_static = sp.green_static();
        let moments = [
            sp.green_static_moment(vb[0]),
            sp.green_static_moment(vb[1]),
            sp.green_static_moment(vb[2]),
        ];
        let grad0 = sp.grad_static();
        let grad_r = sp.grad_r_term();
        let crosses0 = [
            sp.grad_static_cross(vb[0]),
            sp.grad_static_cross(vb[1]),
            sp.grad_static_cross(vb[2]),
        ];
        let crosses_r = [
            sp.grad_r_term_cross(vb[0]),
            sp.grad_r_term_cross(vb[1]),
            sp.grad_r_term_cross(vb[2]),
        ];
        // R-term moments: ∫ R (r'-v_b) = iv1 + (ρ-v_b) i1
        let r_moments = [
            sp.iv1 + (sp.rho - vb[0]) * sp.i1,
            sp.iv1 + (sp.rho - vb[1]) * sp.i1,
            sp.iv1 + (sp.rho - vb[2]) * sp.i1,
        ];

        for (m, &k) in ks.iter().enumerate() {
            let k2 = k * k;
            // Static + R-term inner integrals for this medium.
            let c_r = -k2 / (2.0 * FOUR_PI); // weight of the R kernel term
            let inner_s0 = Complex64::from(g_static) + c_r * sp.i1;
            let inner_grad = [
                Complex64::from(grad0.x) + c_r * grad_r.x,
                Complex64::from(grad0.y) + c_r * grad_r.y,
                Complex64::from(grad0.z) + c_r * grad_r.z,
            ];
            let t = &mut out[m];
            t.s0 += inner_s0 * wt;
            for a in 0..3 {
                t.bs[a] += wt
                    * (inner_grad[0] * nua[a].x
                        + inner_grad[1] * nua[a].y
                        + inner_grad[2] * nua[a].z);
                for b in 0..3 {
                    let mom_x = Complex64::from(moments[b].x) + c_r * r_moments[b].x;
                    let mom_y = Complex64::from(moments[b].y) + c_r * r_moments[b].y;
                    let mom_z = Complex64::from(moments[b].z) + c_r * r_moments[b].z;
                    t.a[a][b] += wt * (mom_x * ua[a].x + mom_y * ua[a].y + mom_z * ua[a].z);
                    t.b[a][b] += wt * (mom_x * nua[a].x + mom_y * nua[a].y + mom_z * nua[a].z);
                    if !skip_curl {
                        let cr_x = Complex64::from(crosses0[b].x) + c_r * crosses_r[b].x;
                        let cr_y = Complex64::from(crosses0[b].y) + c_r * crosses_r[b].y;
                        let cr_z = Complex64::from(crosses0[b].z) + c_r * crosses_r[b].z;
                        t.c[a][b] += wt * (cr_x * ua[a].x + cr_y * ua[a].y + cr_z * ua[a].z);
                        t.cx[a][b] += wt * (cr_x * nua[a].x + cr_y * nua[a].y + cr_z * nua[a].z);
                    }
                }
            }
        }

        // Smooth remainder by quadrature over the source triangle.
        for (j, &(rq, ws)) in src.nodes.iter().enumerate() {
            let w = wt * ws;
            let rvec = rp - rq;
            let dist = rvec.norm();
            let wb_j = &src.rva[j];

            let mut dot_uw = [[0.0f64; 3]; 3];
            let mut dot_nw = [[0.0f64; 3]; 3];
            let mut dot_uc = [[0.0f64; 3]; 3];
            let mut dot_nc = [[0.0f64; 3]; 3];
            let mut dot_nr = [0.0f64; 3];
            for b in 0..3 {
                let cross = rvec.cross(&wb_j[b]);
                for a in 0..3 {
                    dot_uw[a][b] = ua[a].dot(&wb_j[b]);
                    dot_nw[a][b] = nua[a].dot(&wb_j[b]);
                    dot_uc[a][b] = ua[a].dot(&cross);
                    dot_nc[a][b] = nua[a].dot(&cross);
                }
            }
            for a in 0..3 {
                dot_nr[a] = nua[a].dot(&rvec);
            }

            for (m, &k) in ks.iter().enumerate() {
                let g = green_smooth(dist, k);
                let gs = grad_green_smooth_scale(dist, k);
                let wg = g * w;
                let wgs = gs * w;
                let t = &mut out[m];
                t.s0 += wg;
                for a in 0..3 {
                    t.bs[a] += wgs * dot_nr[a];
                    for b in 0..3 {
                        t.a[a][b] += wg * dot_uw[a][b];
                        t.b[a][b] += wg * dot_nw[a][b];
                        if !skip_curl {
                            t.c[a][b] += wgs * dot_uc[a][b];
                            t.cx[a][b] += wgs * dot_nc[a][b];
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Spec-level panel pair operations (half-RWG normalized)
// ---------------------------------------------------------------------------

fn half_rwg_scales(tri: &Triangle) -> ([f64; 3], [f64; 3]) {
    // Local slot a pairs with the edge opposite vertex a.
    let area = tri.area();
    let mut vec_scale = [0.0; 3];
    let mut div_scale = [0.0; 3];
    for a in 0..3 {
        let va = tri.v[(a + 1) % 3];
        let vb = tri.v[(a + 2) % 3];
        let l = (vb - va).norm();
        vec_scale[a] = l / (2.0 * area);
        div_scale[a] = l / area;
    }
    (vec_scale, div_scale)
}

/// Whether a pair is close enough to need singularity extraction.
pub fn is_near_pair(test: &TriQuadCache, src: &TriQuadCache, threshold_factor: f64) -> bool {
    let dist = (test.centroid - src.centroid).norm();
    dist <= threshold_factor * test.diameter.max(src.diameter)
}

/// Galerkin interaction tensor of the vector-potential operator between the
/// half-RWG functions of two triangles:
/// `L[a][b] = ∬ G f_a·f_b - (1/k²) ∬ G (∇·f_a)(∇·f_b)`.
///
/// Self and near pairs switch to singularity extraction automatically.
pub fn panel_pair_l(
    test_tri: &Triangle,
    src_tri: &Triangle,
    k: Complex64,
    rule: &QuadratureRule,
) -> Result<[[Complex64; 3]; 3], KernelError> {
    if k.norm() == 0.0 {
        return Err(KernelError::ZeroWavenumber);
    }
    let t = compute_pair(test_tri, src_tri, k, rule)?;
    let (tv, td) = half_rwg_scales(test_tri);
    let (sv, sd) = half_rwg_scales(src_tri);
    let inv_k2 = 1.0 / (k * k);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = t.a[a][b] * (tv[a] * sv[b]) - t.s0 * inv_k2 * (td[a] * sd[b]);
        }
    }
    Ok(out)
}

/// Galerkin interaction tensor of the curl operator between half-RWG
/// functions: `K[a][b] = ∬ f_a · (∇_r G × f_b)` (principal value; the ±1/2
/// residue is a Gram-matrix contribution applied at assembly level).
pub fn panel_pair_k(
    test_tri: &Triangle,
    src_tri: &Triangle,
    k: Complex64,
    rule: &QuadratureRule,
) -> Result<[[Complex64; 3]; 3], KernelError> {
    let t = compute_pair(test_tri, src_tri, k, rule)?;
    let (tv, _) = half_rwg_scales(test_tri);
    let (sv, _) = half_rwg_scales(src_tri);
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = t.c[a][b] * (tv[a] * sv[b]);
        }
    }
    Ok(out)
}

fn compute_pair(
    test_tri: &Triangle,
    src_tri: &Triangle,
    k: Complex64,
    rule: &QuadratureRule,
) -> Result<PairTensors, KernelError> {
    if !(test_tri.area() > 0.0) {
        return Err(KernelError::DegenerateTriangle(test_tri.area()));
    }
    if !(src_tri.area() > 0.0) {
        return Err(KernelError::DegenerateTriangle(src_tri.area()));
    }
    let mut out = [PairTensors::zero()];
    let ks = [k];
    let same = (test_tri.centroid() - src_tri.centroid()).norm()
        < 1e-14 * test_tri.diameter().max(src_tri.diameter());
    let test_c = TriQuadCache::new(*test_tri, rule);
    let src_c = TriQuadCache::new(*src_tri, rule);
    if same || is_near_pair(&test_c, &src_c, 3.0) {
        let near_rule = QuadratureRule::sixteen_point();
        let test_n = TriQuadCache::new(*test_tri, &near_rule);
        let src_n = TriQuadCache::new(*src_tri, &near_rule);
        pair_tensors_near(&test_n, &src_n, &ks, same, &mut out)?;
    } else {
        pair_tensors_far(&test_c, &src_c, &ks, &mut out);
    }
    Ok(out[0])
}
