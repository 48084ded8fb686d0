//! Material descriptions and derived per-frequency medium parameters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{EPS0, MU0};

/// Homogeneous isotropic material in relative units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub epsilon_r: f64,
    pub mu_r: f64,
    /// Dielectric loss tangent; ε = ε₀ εr (1 - j tanδ).
    #[serde(default)]
    pub loss_tangent: f64,
}

impl Material {
    pub fn free_space() -> Self {
        Self {
            epsilon_r: 1.0,
            mu_r: 1.0,
            loss_tangent: 0.0,
        }
    }

    pub fn dielectric(epsilon_r: f64) -> Self {
        Self {
            epsilon_r,
            mu_r: 1.0,
            loss_tangent: 0.0,
        }
    }

    pub fn is_passive(&self) -> bool {
        self.epsilon_r > 0.0 && self.mu_r > 0.0 && self.loss_tangent >= 0.0
    }

    pub fn is_lossless(&self) -> bool {
        self.loss_tangent == 0.0
    }
}

/// Frequency-resolved medium parameters.
///
/// With the `e^{+jωt}` time convention and the `e^{-jkR}` kernel, passivity
/// requires `Im(k) ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Complex permittivity (F/m).
    pub epsilon: Complex64,
    /// Complex permeability (H/m).
    pub mu: Complex64,
    /// Intrinsic impedance √(μ/ε) (Ω).
    pub eta: Complex64,
    /// Wavenumber ω√(με) (rad/m), branch with Im(k) ≤ 0.
    pub k: Complex64,
    /// Angular frequency (rad/s).
    pub omega: f64,
}

impl MediumParams {
    pub fn new(material: &Material, frequency_hz: f64) -> Self {
        let omega = 2.0 * std::f64::consts::PI * frequency_hz;
        let epsilon = Complex64::new(1.0, -material.loss_tangent) * (EPS0 * material.epsilon_r);
        let mu = Complex64::new(MU0 * material.mu_r, 0.0);
        let eta = (mu / epsilon).sqrt();
        let mut k = (mu * epsilon).sqrt() * omega;
        if k.im > 0.0 {
            k = -k;
        }
        Self {
            epsilon,
            mu,
            eta,
            k,
            omega,
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.k.im == 0.0
    }

    /// Real wavelength 2π/Re(k) (m).
    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{C0, ETA0};

    #[test]
    fn wavenumber_squared_matches_omega_squared_mu_eps() {
        for (er, tand, f) in [(1.0, 0.0, 2.0e8), (2.25, 0.0, 5.0e7), (4.0, 0.02, 1.0e9)] {
            let m = MediumParams::new(
                &Material {
                    epsilon_r: er,
                    mu_r: 1.0,
                    loss_tangent: tand,
                },
                f,
            );
            let lhs = m.k * m.k;
            let rhs = m.mu * m.epsilon * (m.omega * m.omega);
            assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm());
            assert!(m.k.im <= 0.0, "passivity requires Im(k) <= 0");
        }
    }

    #[test]
    fn free_space_at_200_mhz() {
        let m = MediumParams::new(&Material::free_space(), 2.0e8);
        assert!((m.eta.re - ETA0).abs() < 1e-9);
        assert!(m.eta.im.abs() < 1e-12);
        let k_expected = 2.0 * std::f64::consts::PI * 2.0e8 / C0;
        assert!((m.k.re - k_expected).abs() < 1e-12);
        assert!((m.wavelength() - C0 / 2.0e8).abs() < 1e-9);
    }

    #[test]
    fn dielectric_slows_the_wave() {
        let m = MediumParams::new(&Material::dielectric(2.25), 1.0e8);
        let m0 = MediumParams::new(&Material::free_space(), 1.0e8);
        assert!((m.k.re / m0.k.re - 1.5).abs() < 1e-12);
    }
}
