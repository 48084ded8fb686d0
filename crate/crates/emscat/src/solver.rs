//! Scattering solvers over the shared operator primitives:
//!
//! - `single_source`: per-scatterer differential admittance `Y_s`, then one
//!   averaged N×N exterior system
//!   `w (D - L_out Y_s) E + (1-w) (D̃ Ỹ - K_out Y_s) E = w V_e + (1-w) V_m`.
//! - `pmchwt`: the classical two-current reference with 2N unknowns.
//! - `schur`: PMCHWT with the magnetic-current block eliminated (N unknowns;
//!   reproduces the known resonance artifact for lossless dielectrics).
//!
//! Matrix-fill timing includes the admittance computation; solution timing
//! covers only the final factorization and substitution. Dense-matrix bytes
//! are tracked by a per-solve accountant.

use std::time::Instant;

use faer::linalg::matmul::matmul;
use faer::Accum;
use num_complex::Complex64;

use crate::admittance::{AdmittanceError, AdmittanceSet, CONDITION_LIMIT};
use crate::excitation::{assemble_excitation, assemble_tangential_excitation, PlaneWave};
use crate::geom::Vec3;
use crate::linalg::{CMat, InPlaceLu, MatAccountant, TrackedMat};
use crate::medium::{Material, MediumParams};
use crate::mesh::SurfaceMesh;
use crate::operators::{
    assemble_grams, assemble_pass, AssemblyError, Kind, QuadConfig, Region, Target, Term,
};
use crate::postprocess::{radiate_into, Direction, FarFieldPattern, PatternError};
use crate::rwg::RwgBasis;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Admittance(#[from] AdmittanceError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("{kind} system numerically unusable at f={frequency_hz:.4e} Hz (condition estimate {cond:.3e})")]
    IllConditioned {
        kind: &'static str,
        frequency_hz: f64,
        cond: f64,
    },
    #[error("result does not carry stored admittance operators (solve with retain_admittances)")]
    NoStoredAdmittances,
}

/// One closed scatterer: mesh, RWG basis and homogeneous material.
pub struct Scatterer {
    pub mesh: SurfaceMesh,
    pub basis: RwgBasis,
    pub material: Material,
}

impl Scatterer {
    pub fn new(mesh: SurfaceMesh, material: Material) -> Self {
        let basis = RwgBasis::build(&mesh);
        Self {
            mesh,
            basis,
            material,
        }
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }
}

/// A scattering scene: disjoint closed scatterers in a homogeneous exterior.
pub struct Scene {
    pub scatterers: Vec<Scatterer>,
    pub exterior: Material,
}

impl Scene {
    pub fn new(scatterers: Vec<Scatterer>, exterior: Material) -> Result<Self, SolveError> {
        if scatterers.is_empty() {
            return Err(SolveError::Scene("scene has no scatterers".into()));
        }
        if !exterior.is_passive() {
            return Err(SolveError::Scene("exterior material is not passive".into()));
        }
        for (i, s) in scatterers.iter().enumerate() {
            if !s.material.is_passive() {
                return Err(SolveError::Scene(format!(
                    "scatterer {i} material is not passive"
                )));
            }
        }
        // Pairwise separation: bounding spheres, then a sampled containment
        // check if the spheres overlap.
        let bounds: Vec<(Vec3, f64)> = scatterers
            .iter()
            .map(|s| {
                let c = s.mesh.vertex_mean();
                let r = s
                    .mesh
                    .vertices
                    .iter()
                    .map(|v| (v - c).norm())
                    .fold(0.0f64, f64::max);
                (c, r)
            })
            .collect();
        for i in 0..scatterers.len() {
            for j in (i + 1)..scatterers.len() {
                let d = (bounds[i].0 - bounds[j].0).norm();
                if d > bounds[i].1 + bounds[j].1 {
                    continue;
                }
                let four_pi = 4.0 * std::f64::consts::PI;
                let inside =
                    |outer: &SurfaceMesh, p: Vec3| outer.solid_angle_sum(p) > 0.5 * four_pi;
                let a = &scatterers[i].mesh;
                let b = &scatterers[j].mesh;
                let probe = |m: &SurfaceMesh, other: &SurfaceMesh| {
                    m.vertices
                        .iter()
                        .step_by((m.vertices.len() / 32).max(1))
                        .any(|&v| inside(other, v))
                };
                if probe(a, b) || probe(b, a) {
                    return Err(SolveError::Scene(format!(
                        "scatterers {i} and {j} appear to intersect"
                    )));
                }
            }
        }
        Ok(Self {
            scatterers,
            exterior,
        })
    }

    /// Total basis count over all scatterers.
    pub fn total_n(&self) -> usize {
        self.scatterers.iter().map(|s| s.n()).sum()
    }

    /// Per-scatterer offsets into the global coefficient vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.scatterers
            .iter()
            .map(|s| {
                let o = off;
                off += s.n();
                o
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// EFIE/MFIE weighting for the admittance operators, in (0,1).
    pub alpha: f64,
    /// Averaging weight between the two exterior equations, in [0,1].
    pub weight: f64,
    pub quad: QuadConfig,
    /// Keep per-scatterer `Y`/`Ỹ` for field recovery (costs 2N²/scatterer).
    pub retain_admittances: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            weight: 0.5,
            quad: QuadConfig::default(),
            retain_admittances: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub fill_s: f64,
    pub solve_s: f64,
    pub total_s: f64,
}

/// Accounted dense-matrix byte counts for one solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct MemoryReport {
    /// Peak over the whole solve.
    pub peak_bytes: u64,
    /// Resident when the final factorization starts (system + retained
    /// operator blocks).
    pub solve_resident_bytes: u64,
    /// The final linear system alone.
    pub system_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    SingleSource,
    Pmchwt,
    Schur,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::SingleSource => "single_source",
            SolverKind::Pmchwt => "pmchwt",
            SolverKind::Schur => "schur",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-scatterer coefficient vectors of one solve.
pub struct ScattererSolution {
    /// Boundary tangential-electric coefficients.
    pub e: CMat,
    /// Electric current coefficients (contrast current for `single_source`,
    /// equivalent electric current for the two-current solvers).
    pub j: CMat,
    /// Magnetic current coefficients (two-current solvers only).
    pub m: Option<CMat>,
    /// Recovered interior magnetic coefficients `H = Y E`.
    pub h: Option<CMat>,
    /// Recovered equivalent-problem magnetic coefficients `H̃ = Ỹ E`.
    pub h_tilde: Option<CMat>,
}

pub struct SolveResult {
    pub kind: SolverKind,
    pub frequency_hz: f64,
    pub incident_amplitude: f64,
    /// Dimension of the factored linear system.
    pub system_dimension: usize,
    pub per_scatterer: Vec<ScattererSolution>,
    /// Retained admittance operators (single_source with retain option).
    pub admittances: Option<Vec<AdmittanceSet>>,
    pub timings: Timings,
    pub memory: MemoryReport,
    /// Condition estimate of the factored final system.
    pub condition_system: f64,
    /// Condition estimates of auxiliary factorizations (per-scatterer
    /// admittance blocks; the eliminated block for `schur`).
    pub condition_blocks: Vec<f64>,
}

impl SolveResult {
    /// Radiate this solution's currents to the far field.
    ///
    /// The single-source path radiates only its electric contrast current;
    /// since `J = H̃ - H`, the physically radiating sheet current for an
    /// outward normal is `-J`.
    pub fn far_field(
        &self,
        scene: &Scene,
        directions: Vec<Direction>,
        quad: &QuadConfig,
    ) -> Result<FarFieldPattern, SolveError> {
        let ext = MediumParams::new(&scene.exterior, self.frequency_hz);
        let mut pattern = FarFieldPattern::zeros(
            self.frequency_hz,
            self.kind.as_str(),
            self.incident_amplitude,
            directions,
        );
        for (s, sol) in scene.scatterers.iter().zip(&self.per_scatterer) {
            if self.kind == SolverKind::SingleSource {
                let mut j_sheet = sol.j.clone();
                for i in 0..j_sheet.nrows() {
                    j_sheet[(i, 0)] = -j_sheet[(i, 0)];
                }
                radiate_into(&s.mesh, &s.basis, &j_sheet, None, &ext, quad, &mut pattern)?;
            } else {
                radiate_into(
                    &s.mesh,
                    &s.basis,
                    &sol.j,
                    sol.m.as_ref(),
                    &ext,
                    quad,
                    &mut pattern,
                )?;
            }
        }
        Ok(pattern)
    }
}

fn check_frequency(pw: &PlaneWave) -> Result<(), SolveError> {
    if !(pw.frequency_hz > 0.0) {
        return Err(SolveError::Scene("frequency must be positive".into()));
    }
    Ok(())
}

/// Single-source differential-admittance solve (N unknowns).
pub fn solve_single_source(
    scene: &Scene,
    pw: &PlaneWave,
    opts: &SolverOptions,
) -> Result<SolveResult, SolveError> {
    check_frequency(pw)?;
    let t_total = Instant::now();
    let acct = MatAccountant::new();
    let ext = MediumParams::new(&scene.exterior, pw.frequency_hz);
    let n = scene.total_n();
    let offsets = scene.offsets();
    let w = Complex64::new(opts.weight, 0.0);
    let w1 = Complex64::new(1.0 - opts.weight, 0.0);

    // Per-scatterer admittance operators (independent; parallel across
    // scatterers is possible, but the panel pass is already parallel inside).
    let mut sets: Vec<AdmittanceSet> = Vec::with_capacity(scene.scatterers.len());
    for sc in &scene.scatterers {
        let interior = MediumParams::new(&sc.material, pw.frequency_hz);
        sets.push(AdmittanceSet::compute(
            &sc.mesh,
            &sc.basis,
            &interior,
            &ext,
            opts.alpha,
            &opts.quad,
            opts.retain_admittances,
            &acct,
        )?);
    }

    // Global averaged system.
    let mut sys = TrackedMat::zeros(n, n, &acct);
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let (g, gx) = assemble_grams(&sc.mesh, &sc.basis);
        // w·D block and (1-w)·D̃·Ỹ block (both block-diagonal).
        g.add_into(&mut sys.m, w, offsets[s], offsets[s]);
        let y_tilde = sets[s].y_tilde.as_ref().expect("present until released");
        gx.mul_dense_into(&y_tilde.m, &mut sys.m, w1, offsets[s], offsets[s]);
        if !opts.retain_admittances {
            // The equivalent-problem admittance is no longer needed.
            sets[s].y_tilde = None;
        }
    }
    // Radiation coupling: sys[:, cols_s] -= (w L_out + (1-w) K_out) · Y_s
    // with L_out = -jωμ B and K_out = C + ½Gx (the contrast current J
    // radiates as the sheet current -J for an outward normal).
    let jk_eta = Complex64::new(0.0, 1.0) * ext.k * ext.eta;
    for (s, sc_src) in scene.scatterers.iter().enumerate() {
        let n_s = sc_src.n();
        let mut strip = TrackedMat::zeros(n, n_s, &acct);
        for (t, sc_test) in scene.scatterers.iter().enumerate() {
            let mut targets = vec![Target::with_regions(
                &mut strip.m,
                vec![Region::new(
                    offsets[t],
                    0,
                    vec![
                        Term::new(0, Kind::RotatedVectorPotential, -w * jk_eta),
                        Term::new(0, Kind::Curl, w1),
                    ],
                )],
            )];
            assemble_pass(
                (&sc_test.mesh, &sc_test.basis),
                (&sc_src.mesh, &sc_src.basis),
                &[ext],
                &opts.quad,
                &mut targets,
            )?;
        }
        // K_out self residue: (1-w)·½·Gx on the diagonal block.
        let (_, gx) = assemble_grams(&sc_src.mesh, &sc_src.basis);
        gx.add_into(&mut strip.m, w1 * 0.5, offsets[s], 0);

        let par = faer::get_global_parallelism();
        matmul(
            sys.m.as_mut().submatrix_mut(0, offsets[s], n, n_s),
            Accum::Add,
            strip.m.as_ref(),
            sets[s].y_s.m.as_ref(),
            Complex64::new(-1.0, 0.0),
            par,
        );
    }

    // Averaged right-hand side.
    let mut rhs = CMat::zeros(n, 1);
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let exc = assemble_excitation(&sc.mesh, &sc.basis, pw, &ext, &opts.quad);
        for i in 0..sc.n() {
            rhs[(offsets[s] + i, 0)] = w * exc.v_e[(i, 0)] + w1 * exc.v_m[(i, 0)];
        }
    }

    let fill_s = t_total.elapsed().as_secs_f64();
    let solve_resident_bytes = acct.current_bytes();
    let system_bytes = sys.bytes();

    let t_solve = Instant::now();
    let lu = InPlaceLu::factor(sys);
    let condition_system = lu.condition_estimate;
    if !condition_system.is_finite() || condition_system > CONDITION_LIMIT {
        return Err(SolveError::IllConditioned {
            kind: "single_source",
            frequency_hz: pw.frequency_hz,
            cond: condition_system,
        });
    }
    lu.solve_in_place(&mut rhs);
    let solve_s = t_solve.elapsed().as_secs_f64();
    drop(lu);

    // Per-scatterer unknowns and contrast currents J = Y_s E.
    let mut per_scatterer = Vec::with_capacity(scene.scatterers.len());
    let mut condition_blocks = Vec::new();
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let n_s = sc.n();
        let mut e = CMat::zeros(n_s, 1);
        for i in 0..n_s {
            e[(i, 0)] = rhs[(offsets[s] + i, 0)];
        }
        let j = &sets[s].y_s.m * &e;
        per_scatterer.push(ScattererSolution {
            e,
            j,
            m: None,
            h: None,
            h_tilde: None,
        });
        condition_blocks.push(sets[s].cond_interior);
        condition_blocks.push(sets[s].cond_exterior);
    }

    let total_s = t_total.elapsed().as_secs_f64();
    Ok(SolveResult {
        kind: SolverKind::SingleSource,
        frequency_hz: pw.frequency_hz,
        incident_amplitude: pw.amplitude,
        system_dimension: n,
        per_scatterer,
        admittances: if opts.retain_admittances {
            Some(sets)
        } else {
            None
        },
        timings: Timings {
            fill_s,
            solve_s,
            total_s,
        },
        memory: MemoryReport {
            peak_bytes: acct.peak_bytes(),
            solve_resident_bytes,
            system_bytes,
        },
        condition_system,
        condition_blocks,
    })
}

/// Assemble the four PMCHWT sub-blocks for one (test, source) scatterer pair
/// into the given regions of one big matrix.
///
/// Row/column blocks: electric current rows first, scaled magnetic unknown
/// `M' = M/η₁` second; the magnetic-row equations are scaled by η₁ for
/// conditioning parity.
fn pmchwt_pair_regions(
    base_rows: usize,
    base_cols: usize,
    off_t: usize,
    off_s: usize,
    medium_idx: usize,
    medium: &MediumParams,
    eta1: Complex64,
) -> Vec<Region> {
    let jw = Complex64::new(0.0, 1.0) * medium.omega;
    vec![
        Region::new(
            off_t,
            off_s,
            vec![Term::new(medium_idx, Kind::VectorPotential, jw * medium.mu)],
        ),
        Region::new(
            off_t,
            base_cols + off_s,
            vec![Term::new(medium_idx, Kind::Curl, eta1)],
        ),
        Region::new(
            base_rows + off_t,
            off_s,
            vec![Term::new(medium_idx, Kind::Curl, -eta1)],
        ),
        Region::new(
            base_rows + off_t,
            base_cols + off_s,
            vec![Term::new(
                medium_idx,
                Kind::VectorPotential,
                jw * medium.epsilon * eta1 * eta1,
            )],
        ),
    ]
}

/// Classical two-current reference solve (2N unknowns).
pub fn solve_pmchwt(
    scene: &Scene,
    pw: &PlaneWave,
    opts: &SolverOptions,
) -> Result<SolveResult, SolveError> {
    check_frequency(pw)?;
    let t_total = Instant::now();
    let acct = MatAccountant::new();
    let ext = MediumParams::new(&scene.exterior, pw.frequency_hz);
    let n = scene.total_n();
    let offsets = scene.offsets();
    let eta1 = ext.eta;

    let mut sys = TrackedMat::zeros(2 * n, 2 * n, &acct);
    // Exterior contributions couple every scatterer pair.
    for (t, sc_test) in scene.scatterers.iter().enumerate() {
        for (s, sc_src) in scene.scatterers.iter().enumerate() {
            let regions = pmchwt_pair_regions(n, n, offsets[t], offsets[s], 0, &ext, eta1);
            let mut targets = vec![Target::with_regions(&mut sys.m, regions)];
            assemble_pass(
                (&sc_test.mesh, &sc_test.basis),
                (&sc_src.mesh, &sc_src.basis),
                &[ext],
                &opts.quad,
                &mut targets,
            )?;
        }
    }
    // Interior contributions are per-scatterer diagonal blocks.
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let interior = MediumParams::new(&sc.material, pw.frequency_hz);
        let regions = pmchwt_pair_regions(n, n, offsets[s], offsets[s], 0, &interior, eta1);
        let mut targets = vec![Target::with_regions(&mut sys.m, regions)];
        assemble_pass(
            (&sc.mesh, &sc.basis),
            (&sc.mesh, &sc.basis),
            &[interior],
            &opts.quad,
            &mut targets,
        )?;
    }

    // Tangentially tested incident fields.
    let mut rhs = CMat::zeros(2 * n, 1);
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let (ve, vh) = assemble_tangential_excitation(&sc.mesh, &sc.basis, pw, &ext, &opts.quad);
        for i in 0..sc.n() {
            rhs[(offsets[s] + i, 0)] = ve[(i, 0)];
            rhs[(n + offsets[s] + i, 0)] = eta1 * vh[(i, 0)];
        }
    }

    let fill_s = t_total.elapsed().as_secs_f64();
    let solve_resident_bytes = acct.current_bytes();
    let system_bytes = sys.bytes();

    let t_solve = Instant::now();
    let lu = InPlaceLu::factor(sys);
    let condition_system = lu.condition_estimate;
    if !condition_system.is_finite() || condition_system > CONDITION_LIMIT {
        return Err(SolveError::IllConditioned {
            kind: "pmchwt",
            frequency_hz: pw.frequency_hz,
            cond: condition_system,
        });
    }
    lu.solve_in_place(&mut rhs);
    let solve_s = t_solve.elapsed().as_secs_f64();
    drop(lu);

    let mut per_scatterer = Vec::with_capacity(scene.scatterers.len());
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let n_s = sc.n();
        let mut j = CMat::zeros(n_s, 1);
        let mut m = CMat::zeros(n_s, 1);
        let mut e = CMat::zeros(n_s, 1);
        for i in 0..n_s {
            j[(i, 0)] = rhs[(offsets[s] + i, 0)];
            let m_i = eta1 * rhs[(n + offsets[s] + i, 0)];
            m[(i, 0)] = m_i;
            // M = E × n̂ expanded on the same basis: m_n = -e_n.
            e[(i, 0)] = -m_i;
        }
        per_scatterer.push(ScattererSolution {
            e,
            j,
            m: Some(m),
            h: None,
            h_tilde: None,
        });
    }

    let total_s = t_total.elapsed().as_secs_f64();
    Ok(SolveResult {
        kind: SolverKind::Pmchwt,
        frequency_hz: pw.frequency_hz,
        incident_amplitude: pw.amplitude,
        system_dimension: 2 * n,
        per_scatterer,
        admittances: None,
        timings: Timings {
            fill_s,
            solve_s,
            total_s,
        },
        memory: MemoryReport {
            peak_bytes: acct.peak_bytes(),
            solve_resident_bytes,
            system_bytes,
        },
        condition_system,
        condition_blocks: Vec::new(),
    })
}

/// PMCHWT with the magnetic-current unknowns eliminated by a Schur
/// complement: an N-unknown single-source system. For lossless dielectrics
/// the eliminated block turns resonant at discrete real frequencies; its
/// condition estimate is reported so sweeps can flag the artifact.
pub fn solve_schur(
    scene: &Scene,
    pw: &PlaneWave,
    opts: &SolverOptions,
) -> Result<SolveResult, SolveError> {
    check_frequency(pw)?;
    let t_total = Instant::now();
    let acct = MatAccountant::new();
    let ext = MediumParams::new(&scene.exterior, pw.frequency_hz);
    let n = scene.total_n();
    let offsets = scene.offsets();
    let eta1 = ext.eta;

    // Assemble the three distinct PMCHWT blocks (BL = -TR).
    let mut tl = TrackedMat::zeros(n, n, &acct);
    let mut tr = TrackedMat::zeros(n, n, &acct);
    let mut br = TrackedMat::zeros(n, n, &acct);
    {
        let jw = Complex64::new(0.0, 1.0) * ext.omega;
        for (t, sc_test) in scene.scatterers.iter().enumerate() {
            for (s, sc_src) in scene.scatterers.iter().enumerate() {
                let mut targets = vec![
                    Target::with_regions(
                        &mut tl.m,
                        vec![Region::new(
                            offsets[t],
                            offsets[s],
                            vec![Term::new(0, Kind::VectorPotential, jw * ext.mu)],
                        )],
                    ),
                    Target::with_regions(
                        &mut tr.m,
                        vec![Region::new(
                            offsets[t],
                            offsets[s],
                            vec![Term::new(0, Kind::Curl, eta1)],
                        )],
                    ),
                    Target::with_regions(
                        &mut br.m,
                        vec![Region::new(
                            offsets[t],
                            offsets[s],
                            vec![Term::new(
                                0,
                                Kind::VectorPotential,
                                jw * ext.epsilon * eta1 * eta1,
                            )],
                        )],
                    ),
                ];
                assemble_pass(
                    (&sc_test.mesh, &sc_test.basis),
                    (&sc_src.mesh, &sc_src.basis),
                    &[ext],
                    &opts.quad,
                    &mut targets,
                )?;
            }
        }
        for (s, sc) in scene.scatterers.iter().enumerate() {
            let interior = MediumParams::new(&sc.material, pw.frequency_hz);
            let jwi = Complex64::new(0.0, 1.0) * interior.omega;
            let mut targets = vec![
                Target::with_regions(
                    &mut tl.m,
                    vec![Region::new(
                        offsets[s],
                        offsets[s],
                        vec![Term::new(0, Kind::VectorPotential, jwi * interior.mu)],
                    )],
                ),
                Target::with_regions(
                    &mut tr.m,
                    vec![Region::new(
                        offsets[s],
                        offsets[s],
                        vec![Term::new(0, Kind::Curl, eta1)],
                    )],
                ),
                Target::with_regions(
                    &mut br.m,
                    vec![Region::new(
                        offsets[s],
                        offsets[s],
                        vec![Term::new(
                            0,
                            Kind::VectorPotential,
                            jwi * interior.epsilon * eta1 * eta1,
                        )],
                    )],
                ),
            ];
            assemble_pass(
                (&sc.mesh, &sc.basis),
                (&sc.mesh, &sc.basis),
                &[interior],
                &opts.quad,
                &mut targets,
            )?;
        }
    }

    // Right-hand sides.
    let mut ve = CMat::zeros(n, 1);
    let mut vh = CMat::zeros(n, 1);
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let (ve_s, vh_s) =
            assemble_tangential_excitation(&sc.mesh, &sc.basis, pw, &ext, &opts.quad);
        for i in 0..sc.n() {
            ve[(offsets[s] + i, 0)] = ve_s[(i, 0)];
            vh[(offsets[s] + i, 0)] = eta1 * vh_s[(i, 0)];
        }
    }

    // Eliminate M': BR M' = vh + TR J  =>  (TL + TR BR⁻¹ TR) J = ve - TR BR⁻¹ vh.
    let lu_br = InPlaceLu::factor(br);
    let cond_eliminated = lu_br.condition_estimate;
    let mut x = TrackedMat::zeros(n, n + 1, &acct);
    for j in 0..n {
        for i in 0..n {
            x.m[(i, j)] = tr.m[(i, j)];
        }
    }
    for i in 0..n {
        x.m[(i, n)] = vh[(i, 0)];
    }
    lu_br.solve_in_place(&mut x.m);
    drop(lu_br);

    let par = faer::get_global_parallelism();
    // tl += TR · X_cols ; rhs = ve - TR · x_v.
    matmul(
        tl.m.as_mut(),
        Accum::Add,
        tr.m.as_ref(),
        x.m.as_ref().submatrix(0, 0, n, n),
        Complex64::new(1.0, 0.0),
        par,
    );
    let mut rhs = ve;
    matmul(
        rhs.as_mut(),
        Accum::Add,
        tr.m.as_ref(),
        x.m.as_ref().submatrix(0, n, n, 1),
        Complex64::new(-1.0, 0.0),
        par,
    );
    drop(tr);

    let fill_s = t_total.elapsed().as_secs_f64();
    let solve_resident_bytes = acct.current_bytes();
    let system_bytes = tl.bytes();

    let t_solve = Instant::now();
    let lu = InPlaceLu::factor(tl);
    let condition_system = lu.condition_estimate;
    if !condition_system.is_finite() {
        return Err(SolveError::IllConditioned {
            kind: "schur",
            frequency_hz: pw.frequency_hz,
            cond: condition_system,
        });
    }
    lu.solve_in_place(&mut rhs);
    let solve_s = t_solve.elapsed().as_secs_f64();
    drop(lu);

    // Back-substitute M' = x_v + X J, then M = η₁ M'.
    let mut m_prime = CMat::zeros(n, 1);
    for i in 0..n {
        m_prime[(i, 0)] = x.m[(i, n)];
    }
    matmul(
        m_prime.as_mut(),
        Accum::Add,
        x.m.as_ref().submatrix(0, 0, n, n),
        rhs.as_ref(),
        Complex64::new(1.0, 0.0),
        par,
    );
    drop(x);

    let mut per_scatterer = Vec::with_capacity(scene.scatterers.len());
    for (s, sc) in scene.scatterers.iter().enumerate() {
        let n_s = sc.n();
        let mut j = CMat::zeros(n_s, 1);
        let mut m = CMat::zeros(n_s, 1);
        let mut e = CMat::zeros(n_s, 1);
        for i in 0..n_s {
            j[(i, 0)] = rhs[(offsets[s] + i, 0)];
            let m_i = eta1 * m_prime[(offsets[s] + i, 0)];
            m[(i, 0)] = m_i;
            e[(i, 0)] = -m_i;
        }
        per_scatterer.push(ScattererSolution {
            e,
            j,
            m: Some(m),
            h: None,
            h_tilde: None,
        });
    }

    let total_s = t_total.elapsed().as_secs_f64();
    Ok(SolveResult {
        kind: SolverKind::Schur,
        frequency_hz: pw.frequency_hz,
        incident_amplitude: pw.amplitude,
        system_dimension: n,
        per_scatterer,
        admittances: None,
        timings: Timings {
            fill_s,
            solve_s,
            total_s,
        },
        memory: MemoryReport {
            peak_bytes: acct.peak_bytes(),
            solve_resident_bytes,
            system_bytes,
        },
        condition_system,
        condition_blocks: vec![cond_eliminated],
    })
}

/// Recover the magnetic coefficient vectors of a single-source result:
/// `H = Y E`, `H̃ = Ỹ E`, re-asserting the identity `J = H̃ - H`.
pub fn recover_fields(result: &mut SolveResult) -> Result<(), SolveError> {
    let sets = result
        .admittances
        .as_ref()
        .ok_or(SolveError::NoStoredAdmittances)?;
    for (sol, set) in result.per_scatterer.iter_mut().zip(sets) {
        let y = set.y.as_ref().ok_or(SolveError::NoStoredAdmittances)?;
        let yt = set
            .y_tilde
            .as_ref()
            .ok_or(SolveError::NoStoredAdmittances)?;
        let h = &y.m * &sol.e;
        let h_tilde = &yt.m * &sol.e;
        // Consistency: J = H̃ - H up to rounding of the two matrix-vector
        // products.
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..h.nrows() {
            worst = worst.max((h_tilde[(i, 0)] - h[(i, 0)] - sol.j[(i, 0)]).norm());
            scale = scale.max(h_tilde[(i, 0)].norm()).max(h[(i, 0)].norm());
        }
        if worst > 1e-10 * scale.max(1e-300) {
            return Err(SolveError::Scene(format!(
                "J = H_tilde - H identity violated ({:.3e} relative)",
                worst / scale
            )));
        }
        sol.h = Some(h);
        sol.h_tilde = Some(h_tilde);
    }
    Ok(())
}
