//! Galerkin assembly of the tested boundary operators.
//!
//! One quadrature pass over (test, source) triangle pairs evaluates the raw
//! pair tensors for every requested medium and scatters scaled combinations
//! into caller-provided dense targets. All discrete blocks used by the
//! solvers are linear combinations of four tested primitives per medium:
//!
//! - `A[m,n]  = <f_m, L f_n>`      (vector potential, incl. the -1/k² div-div term)
//! - `B[m,n]  = <n̂×f_m, L f_n>`   (rotated testing, incl. the +1/k² ∇G div term)
//! - `C[m,n]  = <f_m, K f_n>`      (principal value)
//! - `Cx[m,n] = <n̂×f_m, K f_n>`   (principal value)
//!
//! plus the frequency-independent Gram matrices `G[m,n] = <f_m, f_n>` and
//! `Gx[m,n] = <f_m, n̂×f_n>`. The ±1/2 identity residues enter as sparse
//! Gram contributions at this level, never inside panel quadrature.
//!
//! Parallelization is over source triangles (matrix columns). Each in-flight
//! task accumulates into private column buffers merged under per-column
//! locks; every column receives exactly two commutative merges, so assembled
//! matrices are bit-reproducible regardless of thread scheduling.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::kernels::{pair_tensors_far, pair_tensors_near, KernelError, PairTensors, TriQuadCache};
use crate::linalg::{CMat, MatAccountant, TrackedMat};
use crate::medium::MediumParams;
use crate::mesh::SurfaceMesh;
use crate::quad::QuadratureRule;
use crate::rwg::RwgBasis;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Quadrature configuration for assembly.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Rule for well-separated pairs (points per triangle).
    pub far_points: usize,
    /// Rule for the smooth remainder of near pairs.
    pub near_points: usize,
    /// Pairs closer than this multiple of the larger triangle diameter use
    /// singularity extraction.
    pub near_threshold: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            far_points: 7,
            near_points: 16,
            near_threshold: 3.0,
        }
    }
}

impl QuadConfig {
    pub fn far_rule(&self) -> QuadratureRule {
        QuadratureRule::by_points(self.far_points).expect("validated rule size")
    }
    pub fn near_rule(&self) -> QuadratureRule {
        QuadratureRule::by_points(self.near_points).expect("validated rule size")
    }
}

/// Which tested primitive a target draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `<f_m, L f_n>`
    VectorPotential,
    /// `<n̂×f_m, L f_n>`
    RotatedVectorPotential,
    /// `<f_m, K f_n>` (PV)
    Curl,
    /// `<n̂×f_m, K f_n>` (PV)
    RotatedCurl,
}

/// One scaled contribution to a target: `scale * primitive(kind, medium)`.
#[derive(Debug, Clone, Copy)]
pub struct Term {
    pub medium: usize,
    pub kind: Kind,
    pub scale: Complex64,
}

impl Term {
    pub fn new(medium: usize, kind: Kind, scale: Complex64) -> Self {
        Self {
            medium,
            kind,
            scale,
        }
    }
}

/// One block region within a target matrix:
/// `mat[row_offset.., col_offset..] += Σ_terms scale * primitive`.
#[derive(Debug, Clone)]
pub struct Region {
    pub row_offset: usize,
    pub col_offset: usize,
    pub terms: Vec<Term>,
}

impl Region {
    pub fn new(row_offset: usize, col_offset: usize, terms: Vec<Term>) -> Self {
        Self {
            row_offset,
            col_offset,
            terms,
        }
    }
}

/// One scatter destination matrix with one or more disjoint block regions
/// (regions of one target must not overlap; this is the caller's contract).
pub struct Target<'a> {
    pub mat: &'a mut CMat,
    pub regions: Vec<Region>,
}

impl<'a> Target<'a> {
    pub fn new(mat: &'a mut CMat, terms: Vec<Term>) -> Self {
        Self {
            mat,
            regions: vec![Region::new(0, 0, terms)],
        }
    }

    pub fn with_regions(mat: &'a mut CMat, regions: Vec<Region>) -> Self {
        Self { mat, regions }
    }
}

/// Real sparse matrix in deduplicated triplet form; used for the RWG Gram
/// matrices (each row couples only edges sharing a triangle).
#[derive(Debug, Clone)]
pub struct SparseReal {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Sorted by (row, col), unique.
    pub entries: Vec<(u32, u32, f64)>,
}

impl SparseReal {
    fn from_triplets(n_rows: usize, n_cols: usize, mut t: Vec<(u32, u32, f64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|&(_, _, v)| v != 0.0);
        Self {
            n_rows,
            n_cols,
            entries,
        }
    }

    /// `dst += scale * self` (dense accumulate at an offset).
    pub fn add_into(&self, dst: &mut CMat, scale: Complex64, row_off: usize, col_off: usize) {
        for &(r, c, v) in &self.entries {
            dst[(row_off + r as usize, col_off + c as usize)] += scale * v;
        }
    }

    /// `y += scale * self * x` for a column vector `x`.
    pub fn mul_vec_into(&self, x: &CMat, y: &mut CMat, scale: Complex64) {
        for &(r, c, v) in &self.entries {
            let val = x[(c as usize, 0)] * (scale * v);
            y[(r as usize, 0)] += val;
        }
    }

    /// `dst[row_off.., col_off..] += scale * self * rhs` with dense `rhs`.
    pub fn mul_dense_into(
        &self,
        rhs: &CMat,
        dst: &mut CMat,
        scale: Complex64,
        row_off: usize,
        col_off: usize,
    ) {
        assert_eq!(rhs.nrows(), self.n_cols);
        for &(r, c, v) in &self.entries {
            let s = scale * v;
            for j in 0..rhs.ncols() {
                dst[(row_off + r as usize, col_off + j)] += s * rhs[(c as usize, j)];
            }
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.n_rows, self.n_cols);
        self.add_into(&mut m, Complex64::new(1.0, 0.0), 0, 0);
        m
    }
}

/// Assemble the RWG Gram matrix `G[m,n] = <f_m, f_n>` and the mixed Gram
/// `Gx[m,n] = <f_m, n̂×f_n>` (both exact: the integrands are quadratic).
pub fn assemble_grams(mesh: &SurfaceMesh, basis: &RwgBasis) -> (SparseReal, SparseReal) {
    let rule = QuadratureRule::seven_point();
    let n = basis.len();
    let mut g = Vec::new();
    let mut gx = Vec::new();
    for ti in 0..mesh.num_triangles() {
        let tri = mesh.triangle(ti);
        let nrm = mesh.normal(ti);
        let lb = basis.local(ti);
        let nodes = rule.nodes_on(&tri);
        for a in 0..3 {
            for b in 0..3 {
                let mut s = 0.0;
                let mut sx = 0.0;
                for &(p, w) in &nodes {
                    let fa = p - lb.free_vertex[a];
                    let fb = p - lb.free_vertex[b];
                    s += w * fa.dot(&fb);
                    sx += w * fa.dot(&nrm.cross(&fb));
                }
                let scale = lb.vec_scale[a] * lb.vec_scale[b];
                g.push((lb.edge[a] as u32, lb.edge[b] as u32, scale * s));
                gx.push((lb.edge[a] as u32, lb.edge[b] as u32, scale * sx));
            }
        }
    }
    (
        SparseReal::from_triplets(n, n, g),
        SparseReal::from_triplets(n, n, gx),
    )
}

struct SharedCols {
    ptr: *mut Complex64,
    nrows: usize,
    ncols: usize,
    col_stride: isize,
}

unsafe impl Send for SharedCols {}
unsafe impl Sync for SharedCols {}

/// One assembly pass over all (test, source) triangle pairs of a mesh pair.
///
/// Every target must be able to hold a (test N) × (source N) block at its
/// offsets. Media are evaluated together so geometry factors are shared.
pub fn assemble_pass(
    test: (&SurfaceMesh, &RwgBasis),
    src: (&SurfaceMesh, &RwgBasis),
    media: &[MediumParams],
    quad: &QuadConfig,
    targets: &mut [Target<'_>],
) -> Result<(), AssemblyError> {
    let (test_mesh, test_basis) = test;
    let (src_mesh, src_basis) = src;
    let n_test = test_basis.len();
    let n_src = src_basis.len();
    for t in targets.iter() {
        for r in &t.regions {
            if t.mat.nrows() < r.row_offset + n_test || t.mat.ncols() < r.col_offset + n_src {
                return Err(AssemblyError::Dimension(format!(
                    "target {}x{} cannot hold block {}x{} at ({}, {})",
                    t.mat.nrows(),
                    t.mat.ncols(),
                    n_test,
                    n_src,
                    r.row_offset,
                    r.col_offset
                )));
            }
            if r.terms.iter().any(|term| term.medium >= media.len()) {
                return Err(AssemblyError::Dimension(
                    "target medium index out of range".into(),
                ));
            }
        }
    }

    let far_rule = quad.far_rule();
    let near_rule = quad.near_rule();
    let ks: Vec<Complex64> = media.iter().map(|m| m.k).collect();
    let inv_k2: Vec<Complex64> = media.iter().map(|m| 1.0 / (m.k * m.k)).collect();

    let test_far: Vec<TriQuadCache> = (0..test_mesh.num_triangles())
        .map(|i| TriQuadCache::new(test_mesh.triangle(i), &far_rule))
        .collect();
    let test_near: Vec<TriQuadCache> = (0..test_mesh.num_triangles())
        .map(|i| TriQuadCache::new(test_mesh.triangle(i), &near_rule))
        .collect();
    let same_mesh = std::ptr::eq(test_mesh, src_mesh);
    let (src_far_own, src_near_own): (Vec<TriQuadCache>, Vec<TriQuadCache>) = if same_mesh {
        (Vec::new(), Vec::new())
    } else {
        (
            (0..src_mesh.num_triangles())
                .map(|i| TriQuadCache::new(src_mesh.triangle(i), &far_rule))
                .collect(),
            (0..src_mesh.num_triangles())
                .map(|i| TriQuadCache::new(src_mesh.triangle(i), &near_rule))
                .collect(),
        )
    };
    let src_far: &[TriQuadCache] = if same_mesh { &test_far } else { &src_far_own };
    let src_near: &[TriQuadCache] = if same_mesh { &test_near } else { &src_near_own };

    // Column ownership: each source edge (column) is touched by exactly its
    // two adjacent source triangles, so per-column locked merges are
    // commutative and the result is deterministic under any scheduling.
    // Regions must be pairwise disjoint so region-level locks suffice.
    struct RegionSpec {
        target: usize,
        row_offset: usize,
        col_offset: usize,
        terms: Vec<Term>,
    }
    let mut specs: Vec<RegionSpec> = Vec::new();
    for (ti, t) in targets.iter().enumerate() {
        for r in &t.regions {
            specs.push(RegionSpec {
                target: ti,
                row_offset: r.row_offset,
                col_offset: r.col_offset,
                terms: r.terms.clone(),
            });
        }
    }
    let locks: Vec<Vec<std::sync::Mutex<()>>> = specs
        .iter()
        .map(|_| (0..n_src).map(|_| std::sync::Mutex::new(())).collect())
        .collect();
    let shared: Vec<SharedCols> = targets
        .iter_mut()
        .map(|t| {
            let nrows = t.mat.nrows();
            let ncols = t.mat.ncols();
            let col_stride = t.mat.col_stride();
            SharedCols {
                ptr: t.mat.as_mut().as_ptr_mut(),
                nrows,
                ncols,
                col_stride,
            }
        })
        .collect();

    (0..src_mesh.num_triangles())
        .into_par_iter()
        .try_for_each(|s| {
            let src_lb = src_basis.local(s);
            let mut buf = vec![Complex64::new(0.0, 0.0); specs.len() * 3 * n_test];
            let mut tensors = vec![PairTensors::zero(); media.len()];

            for t in 0..test_mesh.num_triangles() {
                for ten in tensors.iter_mut() {
                    *ten = PairTensors::zero();
                }
                let far_t = &test_far[t];
                let far_s = &src_far[s];
                let self_pair = same_mesh && t == s;
                let dist = (far_t.centroid - far_s.centroid).norm();
                let near = dist <= quad.near_threshold * far_t.diameter.max(far_s.diameter);
                if self_pair || near {
                    pair_tensors_near(&test_near[t], &src_near[s], &ks, self_pair, &mut tensors)?;
                } else {
                    pair_tensors_far(far_t, far_s, &ks, &mut tensors);
                }

                let test_lb = test_basis.local(t);
                for (spec, chunk) in specs.iter().zip(buf.chunks_mut(3 * n_test)) {
                    for term in &spec.terms {
                        let ten = &tensors[term.medium];
                        let ik2 = inv_k2[term.medium];
                        for b in 0..3 {
                            let col = &mut chunk[b * n_test..(b + 1) * n_test];
                            let vs_b = src_lb.vec_scale[b];
                            let ds_b = src_lb.div_scale[b];
                            for a in 0..3 {
                                let row = test_lb.edge[a];
                                let vs_a = test_lb.vec_scale[a];
                                let ds_a = test_lb.div_scale[a];
                                let val = match term.kind {
                                    Kind::VectorPotential => {
                                        ten.a[a][b] * (vs_a * vs_b) - ten.s0 * ik2 * (ds_a * ds_b)
                                    }
                                    Kind::RotatedVectorPotential => {
                                        ten.b[a][b] * (vs_a * vs_b)
                                            + ten.bs[a] * ik2 * (vs_a * ds_b)
                                    }
                                    Kind::Curl => ten.c[a][b] * (vs_a * vs_b),
                                    Kind::RotatedCurl => ten.cx[a][b] * (vs_a * vs_b),
                                };
                                col[row] += term.scale * val;
                            }
                        }
                    }
                }
            }

            for ((spec, chunk), lk) in specs.iter().zip(buf.chunks(3 * n_test)).zip(locks.iter()) {
                let sh = &shared[spec.target];
                for b in 0..3 {
                    let col_local = src_lb.edge[b];
                    let col = spec.col_offset + col_local;
                    debug_assert!(col < sh.ncols && spec.row_offset + n_test <= sh.nrows);
                    let _guard = lk[col_local].lock().expect("column lock");
                    let base = unsafe { sh.ptr.offset(col as isize * sh.col_stride) };
                    for (i, v) in chunk[b * n_test..(b + 1) * n_test].iter().enumerate() {
                        unsafe {
                            *base.add(spec.row_offset + i) += *v;
                        }
                    }
                }
            }
            Ok(())
        })
}

// ---------------------------------------------------------------------------
// Spec-level block structures
// ---------------------------------------------------------------------------

/// Dense tested operator blocks of the interior-form system for one medium.
/// With these sign conventions the discrete EFIE row reads `L_e H = K_e E`
/// and the MFIE row `K_m H = L_m E` (each row holds to discretization
/// accuracy; their α-combination defines the admittance exactly).
pub struct OperatorBlocks {
    pub k_e: TrackedMat,
    pub l_e: TrackedMat,
    pub l_m: TrackedMat,
    pub k_m: TrackedMat,
    pub medium: MediumParams,
    pub n: usize,
}

/// Assemble the four interior-form blocks for a medium (tangential Galerkin
/// testing of both rows, so the L-type blocks are complex-symmetric):
///
/// - `K_e = C - ½Gx`
/// - `L_e = jkη A`
/// - `L_m = -jk A`
/// - `K_m = η (C - ½Gx)`
///
/// The identity residues enter as mixed-Gram contributions with the sign
/// required by the interior-trace jump relations for an outward normal.
pub fn assemble_interior_blocks(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    medium: &MediumParams,
    quad: &QuadConfig,
    acct: &Arc<MatAccountant>,
) -> Result<OperatorBlocks, AssemblyError> {
    let n = basis.len();
    let mut k_e = TrackedMat::zeros(n, n, acct);
    let mut l_e = TrackedMat::zeros(n, n, acct);
    let mut l_m = TrackedMat::zeros(n, n, acct);
    let mut k_m = TrackedMat::zeros(n, n, acct);

    let jk = Complex64::new(0.0, 1.0) * medium.k;
    let one = Complex64::new(1.0, 0.0);
    let mut targets = vec![
        Target::new(&mut k_e.m, vec![Term::new(0, Kind::Curl, one)]),
        Target::new(
            &mut l_e.m,
            vec![Term::new(0, Kind::VectorPotential, jk * medium.eta)],
        ),
        Target::new(&mut l_m.m, vec![Term::new(0, Kind::VectorPotential, -jk)]),
        Target::new(&mut k_m.m, vec![Term::new(0, Kind::Curl, medium.eta)]),
    ];
    assemble_pass((mesh, basis), (mesh, basis), &[*medium], quad, &mut targets)?;

    let (_, gx) = assemble_grams(mesh, basis);
    gx.add_into(&mut k_e.m, Complex64::new(-0.5, 0.0), 0, 0);
    gx.add_into(&mut k_m.m, medium.eta * -0.5, 0, 0);

    Ok(OperatorBlocks {
        k_e,
        l_e,
        l_m,
        k_m,
        medium: *medium,
        n,
    })
}

/// Exterior-problem blocks: the Gram matrices `D = G` and `D̃ = Gx`
/// (mesh-only, frequency-independent, kept in their exact sparse form) and
/// the dense radiation blocks `L_out = -jωμ B`, `K_out = C + ½Gx` with
/// exterior-medium parameters, so that a solution satisfies
/// `D E = L_out J + V_e` and `D̃ H̃ = K_out J + V_m` with the contrast
/// current `J = H̃ - H` (whose physically radiating sheet current is `-J`
/// for an outward normal).
pub struct ExteriorBlocks {
    pub d: SparseReal,
    pub d_tilde: SparseReal,
    pub l_out: TrackedMat,
    pub k_out: TrackedMat,
    pub medium: MediumParams,
    pub n: usize,
}

pub fn assemble_exterior_blocks(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    exterior: &MediumParams,
    quad: &QuadConfig,
    acct: &Arc<MatAccountant>,
) -> Result<ExteriorBlocks, AssemblyError> {
    let n = basis.len();
    let mut l_out = TrackedMat::zeros(n, n, acct);
    let mut k_out = TrackedMat::zeros(n, n, acct);
    let jk = Complex64::new(0.0, 1.0) * exterior.k;
    let mut targets = vec![
        Target::new(
            &mut l_out.m,
            vec![Term::new(
                0,
                Kind::RotatedVectorPotential,
                -jk * exterior.eta,
            )],
        ),
        Target::new(
            &mut k_out.m,
            vec![Term::new(0, Kind::Curl, Complex64::new(1.0, 0.0))],
        ),
    ];
    assemble_pass(
        (mesh, basis),
        (mesh, basis),
        &[*exterior],
        quad,
        &mut targets,
    )?;

    let (d, d_tilde) = assemble_grams(mesh, basis);
    d_tilde.add_into(&mut k_out.m, Complex64::new(0.5, 0.0), 0, 0);

    Ok(ExteriorBlocks {
        d,
        d_tilde,
        l_out,
        k_out,
        medium: *exterior,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Material;
    use crate::mesh::gen;

    fn icosa_setup() -> (SurfaceMesh, RwgBasis) {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        (mesh, basis)
    }

    #[test]
    fn gram_matrix_is_symmetric_positive_definite() {
        let (mesh, basis) = icosa_setup();
        let (g, gx) = assemble_grams(&mesh, &basis);
        let gd = g.to_dense();
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                assert!((gd[(i, j)] - gd[(j, i)]).norm() < 1e-14);
                assert!(gd[(i, j)].im.abs() < 1e-16);
            }
        }
        for seed in 0..5u64 {
            let mut x = CMat::zeros(n, 1);
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            for i in 0..n {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                x[(i, 0)] = Complex64::new(((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5, 0.0);
            }
            let gx_v = &gd * &x;
            let mut quad_form = Complex64::new(0.0, 0.0);
            for i in 0..n {
                quad_form += x[(i, 0)].conj() * gx_v[(i, 0)];
            }
            assert!(quad_form.re > 0.0, "Gram quadratic form must be positive");
        }
        let gxd = gx.to_dense();
        for i in 0..n {
            for j in 0..n {
                assert!((gxd[(i, j)] + gxd[(j, i)]).norm() < 1e-13);
                assert!(gxd[(i, j)].im.abs() < 1e-16);
            }
        }
    }

    #[test]
    fn interior_blocks_l_type_complex_symmetric() {
        let (mesh, basis) = icosa_setup();
        let medium = MediumParams::new(&Material::dielectric(2.25), 30.0e6);
        let acct = MatAccountant::new();
        let blocks =
            assemble_interior_blocks(&mesh, &basis, &medium, &QuadConfig::default(), &acct)
                .unwrap();
        let n = blocks.n;
        for (name, m) in [("L_e", &blocks.l_e.m), ("L_m", &blocks.l_m.m)] {
            let scale = m.norm_max();
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
                }
            }
            assert!(
                worst / scale <= 1e-10,
                "{name} symmetry defect {}",
                worst / scale
            );
        }
        for m in [&blocks.k_e.m, &blocks.l_e.m, &blocks.l_m.m, &blocks.k_m.m] {
            assert!(m.norm_max().is_finite());
        }
    }

    #[test]
    fn exterior_k_out_matches_interior_k_m_identity() {
        // Cross-check between the two assembly paths: K_out = C + ½Gx
        // while the interior MFIE block with the same medium is
        // K_m = η (C - ½Gx), so K_out = K_m/η + Gx entrywise.
        let (mesh, basis) = icosa_setup();
        let ext = MediumParams::new(&Material::free_space(), 50.0e6);
        let acct = MatAccountant::new();
        let blocks =
            assemble_interior_blocks(&mesh, &basis, &ext, &QuadConfig::default(), &acct).unwrap();
        let exterior =
            assemble_exterior_blocks(&mesh, &basis, &ext, &QuadConfig::default(), &acct).unwrap();
        let gx = exterior.d_tilde.to_dense();
        let n = basis.len();
        let scale = exterior.k_out.m.norm_max();
        for i in 0..n {
            for j in 0..n {
                let expect = blocks.k_m.m[(i, j)] / ext.eta + gx[(i, j)];
                assert!((exterior.k_out.m[(i, j)] - expect).norm() <= 1e-12 * scale);
            }
        }
        assert!(exterior.l_out.m.norm_max().is_finite());
    }

    #[test]
    fn pass_rejects_undersized_target() {
        let (mesh, basis) = icosa_setup();
        let medium = MediumParams::new(&Material::free_space(), 1.0e8);
        let mut small = CMat::zeros(5, 5);
        let mut targets = vec![Target::new(
            &mut small,
            vec![Term::new(0, Kind::Curl, Complex64::new(1.0, 0.0))],
        )];
        let err = assemble_pass(
            (&mesh, &basis),
            (&mesh, &basis),
            &[medium],
            &QuadConfig::default(),
            &mut targets,
        )
        .unwrap_err();
        assert!(matches!(err, AssemblyError::Dimension(_)));
    }

    #[test]
    fn assembly_is_deterministic_across_runs() {
        let (mesh, basis) = icosa_setup();
        let medium = MediumParams::new(&Material::dielectric(2.25), 80.0e6);
        let acct = MatAccountant::new();
        let run = || {
            let b = assemble_interior_blocks(&mesh, &basis, &medium, &QuadConfig::default(), &acct)
                .unwrap();
            (b.k_e.m.clone(), b.l_e.m.clone())
        };
        let (ke1, le1) = run();
        let (ke2, le2) = run();
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(ke1[(i, j)], ke2[(i, j)], "K_e not bit-reproducible");
                assert_eq!(le1[(i, j)], le2[(i, j)], "L_e not bit-reproducible");
            }
        }
    }
}
