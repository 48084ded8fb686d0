//! Surface-integral-equation (method-of-moments) solver for electromagnetic
//! scattering from closed homogeneous dielectric bodies.
//!
//! The solver discretizes the boundary of each scatterer with RWG functions
//! and offers three formulations over the same kernel primitives:
//!
//! - `single_source`: a differential-surface-admittance formulation. Each
//!   dielectric is replaced by the surrounding medium plus a single contrast
//!   electric current `J = Y_s E`, where `Y_s` is the difference between the
//!   interior admittance operators computed with the body's material and with
//!   the exterior material. The final linear system has N unknowns.
//! - `pmchwt`: the classical two-current reference formulation (2N unknowns).
//! - `schur`: the PMCHWT system with the magnetic-current block eliminated
//!   algebraically (N unknowns, prone to resonance artifacts for lossless
//!   dielectrics).
//!
//! An analytic Mie-series solution for dielectric spheres serves as ground
//! truth, and `postprocess` turns surface currents into bistatic far fields
//! and radar cross sections.
//!
//! Conventions used throughout: time factor `e^{+jωt}`, scalar Green's
//! function `e^{-jkR}/(4πR)`, SI units (meters, Hz, V/m).

pub mod admittance;
pub mod blockio;
pub mod excitation;
pub mod geom;
pub mod kernels;
pub mod linalg;
pub mod medium;
pub mod mesh;
pub mod mie;
pub mod operators;
pub mod postprocess;
pub mod quad;
pub mod rwg;
pub mod solver;

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Vacuum permittivity (F/m), defined as `1/(μ₀ c₀²)` for exact internal
/// consistency of `k₀ = ω/c₀`.
pub const EPS0: f64 = 1.0 / (MU0 * C0 * C0);

/// Free-space intrinsic impedance (Ω).
pub const ETA0: f64 = MU0 * C0;

/// Cap the dense linear-algebra parallelism (LU, GEMM). Panel assembly uses
/// the global rayon pool, which the caller configures separately.
pub fn set_dense_parallelism(threads: usize) {
    faer::set_global_parallelism(if threads <= 1 {
        faer::Par::Seq
    } else {
        faer::Par::rayon(threads)
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_space_constants_are_consistent() {
        assert!((ETA0 - 376.730_313_461_770_66).abs() < 1e-9);
        assert!((1.0 / ETA0 - 2.6544e-3).abs() < 1e-7);
        assert!(((MU0 * EPS0).sqrt() * C0 - 1.0).abs() < 1e-15);
    }
}
