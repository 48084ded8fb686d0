//! Discrete surface admittance operators.
//!
//! For a medium filling the interior of a closed surface, the combined
//! EFIE/MFIE rows give the admittance relation `H = Y E` with
//!
//! `Y = (α L_e + (1-α) K_m)⁻¹ (α K_e + (1-α) L_m)`,  0 < α < 1.
//!
//! Evaluated with the scatterer material this yields `Y`; with the exterior
//! material it yields `Ỹ` for the equivalent problem. Their difference
//! `Y_s = Ỹ - Y` maps boundary electric coefficients to the contrast
//! current, `J = Y_s E`.

use num_complex::Complex64;
use std::sync::Arc;

use crate::linalg::{axpy, scale_in_place, FactoredSystem, MatAccountant, TrackedMat};
use crate::medium::MediumParams;
use crate::mesh::SurfaceMesh;
use crate::operators::{
    assemble_grams, assemble_pass, AssemblyError, Kind, OperatorBlocks, QuadConfig, Target, Term,
};
use crate::rwg::RwgBasis;

/// Condition-estimate ceiling beyond which the combined block is treated as
/// numerically unusable (double-precision safety margin).
pub const CONDITION_LIMIT: f64 = 1e14;

#[derive(Debug, thiserror::Error)]
pub enum AdmittanceError {
    #[error("alpha must lie in (0,1), got {0}")]
    BadAlpha(f64),
    #[error("combined EFIE/MFIE block numerically unusable at alpha={alpha}, f={frequency_hz:.4e} Hz (condition estimate {cond:.3e})")]
    IllConditioned {
        alpha: f64,
        frequency_hz: f64,
        cond: f64,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

fn check_alpha(alpha: f64) -> Result<(), AdmittanceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AdmittanceError::BadAlpha(alpha));
    }
    Ok(())
}

/// Admittance from pre-assembled operator blocks (consumes the blocks; the
/// combination and solve happen in their storage).
///
/// Returns `Y` such that `H = Y E`, plus the condition estimate of the
/// combined left block.
pub fn compute_admittance(
    blocks: OperatorBlocks,
    alpha: f64,
) -> Result<(TrackedMat, f64), AdmittanceError> {
    check_alpha(alpha)?;
    let OperatorBlocks {
        k_e,
        l_e,
        l_m,
        k_m,
        medium,
        ..
    } = blocks;
    let mut lhs = l_e;
    scale_in_place(&mut lhs.m, Complex64::new(alpha, 0.0));
    axpy(&mut lhs.m, Complex64::new(1.0 - alpha, 0.0), &k_m.m);
    drop(k_m);
    let mut rhs = k_e;
    scale_in_place(&mut rhs.m, Complex64::new(alpha, 0.0));
    axpy(&mut rhs.m, Complex64::new(1.0 - alpha, 0.0), &l_m.m);
    drop(l_m);

    let factored = FactoredSystem::new(&lhs.m);
    drop(lhs);
    if factored.condition_estimate > CONDITION_LIMIT {
        return Err(AdmittanceError::IllConditioned {
            alpha,
            frequency_hz: medium.omega / (2.0 * std::f64::consts::PI),
            cond: factored.condition_estimate,
        });
    }
    factored.solve_in_place(&mut rhs.m);
    Ok((rhs, factored.condition_estimate))
}

/// Assemble the combined admittance blocks for one or two media in a single
/// quadrature pass and solve for each medium's `Y`.
///
/// This is the memory-lean path used by the solvers: only the two combined
/// matrices per medium are materialized,
/// `lhs = α jkη A + (1-α) η (C - ½Gx)` and
/// `rhs = α (C - ½Gx) - (1-α) jk A`.
pub fn assemble_admittances(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    media: &[MediumParams],
    alpha: f64,
    quad: &QuadConfig,
    acct: &Arc<MatAccountant>,
) -> Result<Vec<(TrackedMat, f64)>, AdmittanceError> {
    check_alpha(alpha)?;
    let n = basis.len();
    let mut lhs: Vec<TrackedMat> = Vec::new();
    let mut rhs: Vec<TrackedMat> = Vec::new();
    for _ in media {
        lhs.push(TrackedMat::zeros(n, n, acct));
        rhs.push(TrackedMat::zeros(n, n, acct));
    }
    {
        let mut targets = Vec::with_capacity(2 * media.len());
        for (i, (l, r)) in lhs.iter_mut().zip(rhs.iter_mut()).enumerate() {
            let m = &media[i];
            let jk = Complex64::new(0.0, 1.0) * m.k;
            targets.push(Target::new(
                &mut l.m,
                vec![
                    Term::new(i, Kind::VectorPotential, jk * m.eta * alpha),
                    Term::new(i, Kind::Curl, m.eta * (1.0 - alpha)),
                ],
            ));
            targets.push(Target::new(
                &mut r.m,
                vec![
                    Term::new(i, Kind::VectorPotential, -jk * (1.0 - alpha)),
                    Term::new(i, Kind::Curl, Complex64::new(alpha, 0.0)),
                ],
            ));
        }
        assemble_pass((mesh, basis), (mesh, basis), media, quad, &mut targets)?;
    }

    let (_, gx) = assemble_grams(mesh, basis);
    let mut out = Vec::with_capacity(media.len());
    for (i, (mut l, mut r)) in lhs.into_iter().zip(rhs.into_iter()).enumerate() {
        let m = &media[i];
        gx.add_into(&mut l.m, m.eta * (-0.5 * (1.0 - alpha)), 0, 0);
        gx.add_into(&mut r.m, Complex64::new(-0.5 * alpha, 0.0), 0, 0);
        let factored = FactoredSystem::new(&l.m);
        drop(l);
        if factored.condition_estimate > CONDITION_LIMIT {
            return Err(AdmittanceError::IllConditioned {
                alpha,
                frequency_hz: m.omega / (2.0 * std::f64::consts::PI),
                cond: factored.condition_estimate,
            });
        }
        factored.solve_in_place(&mut r.m);
        out.push((r, factored.condition_estimate));
    }
    Ok(out)
}

/// Entrywise differential surface admittance `Y_s = Ỹ - Y`.
pub fn compute_ys(
    y: &TrackedMat,
    y_tilde: &TrackedMat,
    acct: &Arc<MatAccountant>,
) -> Result<TrackedMat, AdmittanceError> {
    let n = y.nrows();
    if y_tilde.nrows() != n || y.ncols() != n || y_tilde.ncols() != n {
        return Err(AdmittanceError::Dimension(n, y_tilde.nrows()));
    }
    let mut ys = TrackedMat::zeros(n, n, acct);
    for j in 0..n {
        for i in 0..n {
            ys.m[(i, j)] = y_tilde.m[(i, j)] - y.m[(i, j)];
        }
    }
    Ok(ys)
}

/// Per-scatterer admittance operators. `y` is retained only when field
/// recovery is requested; `y_tilde` may be released by the solver once the
/// final system has been formed; `y_s` is always present.
pub struct AdmittanceSet {
    pub y: Option<TrackedMat>,
    pub y_tilde: Option<TrackedMat>,
    pub y_s: TrackedMat,
    pub alpha: f64,
    pub cond_interior: f64,
    pub cond_exterior: f64,
}

impl AdmittanceSet {
    /// Compute `Y`, `Ỹ`, `Y_s` for one scatterer with a shared-geometry
    /// dual-medium pass.
    pub fn compute(
        mesh: &SurfaceMesh,
        basis: &RwgBasis,
        interior: &MediumParams,
        exterior: &MediumParams,
        alpha: f64,
        quad: &QuadConfig,
        retain_interior: bool,
        acct: &Arc<MatAccountant>,
    ) -> Result<Self, AdmittanceError> {
        let mut pair =
            assemble_admittances(mesh, basis, &[*interior, *exterior], alpha, quad, acct)?;
        let (y_tilde, cond_exterior) = pair.pop().expect("two media requested");
        let (y, cond_interior) = pair.pop().expect("two media requested");
        let y_s = compute_ys(&y, &y_tilde, acct)?;
        Ok(Self {
            y: if retain_interior { Some(y) } else { None },
            y_tilde: Some(y_tilde),
            y_s,
            alpha,
            cond_interior,
            cond_exterior,
        })
    }

    pub fn n(&self) -> usize {
        self.y_s.nrows()
    }
}
