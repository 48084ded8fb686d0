//! Analytic spherical-wave-expansion solution for plane-wave scattering by a
//! homogeneous dielectric sphere in free space; the ground truth for the
//! surface solvers.
//!
//! Spherical Bessel functions `j_n` are computed by downward recurrence
//! (normalized against `j_0`) and `y_n` by upward recurrence; the series is
//! truncated Wiscombe-style at `N_max ≥ ka + 4(ka)^{1/3} + 10` with a
//! last-term diagnostic.

use num_complex::Complex64;

use crate::excitation::PlaneWave;
use crate::medium::{Material, MediumParams};
use crate::postprocess::{Direction, FarFieldPattern};

#[derive(Debug, thiserror::Error)]
pub enum MieError {
    #[error("series failed to converge: last-term ratio {ratio:.3e} at N_max = {n_max}")]
    NotConverged { ratio: f64, n_max: usize },
    #[error("nonpositive radius or frequency")]
    BadInput,
    #[error("plane wave frequency {pw:.6e} Hz does not match solution frequency {mie:.6e} Hz")]
    FrequencyMismatch { pw: f64, mie: f64 },
}

/// Converged Mie coefficients for one sphere at one frequency.
#[derive(Debug, Clone)]
pub struct MieSolution {
    pub radius: f64,
    pub epsilon_r: Complex64,
    pub frequency_hz: f64,
    /// Free-space wavenumber (rad/m).
    pub k0: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub n_max: usize,
    /// |a_Nmax| + |b_Nmax| relative to the partial cross-section sum.
    pub last_term_ratio: f64,
}

impl MieSolution {
    pub fn new(radius: f64, epsilon_r: Complex64, frequency_hz: f64) -> Result<Self, MieError> {
        Self::with_order(radius, epsilon_r, frequency_hz, None)
    }

    /// Build with an explicit truncation order (used by the convergence
    /// diagnostics); `None` applies the adaptive rule.
    pub fn with_order(
        radius: f64,
        epsilon_r: Complex64,
        frequency_hz: f64,
        order: Option<usize>,
    ) -> Result<Self, MieError> {
        if radius <= 0.0 || frequency_hz <= 0.0 {
            return Err(MieError::BadInput);
        }
        let ext = MediumParams::new(&Material::free_space(), frequency_hz);
        let k0 = ext.k.re;
        let x = k0 * radius;
        let n_max = order.unwrap_or(((x + 4.0 * x.cbrt() + 10.0).ceil() as usize).max(3));
        let m = epsilon_r.sqrt();

        // Riccati-Bessel ψ_n(x) = x j_n(x), χ_n(x) = -x y_n(x),
        // ξ_n = ψ_n - j χ_n (outgoing for e^{-iωt}; results are conjugated
        // into the crate convention at the far-field stage).
        let psi_x = riccati_psi_real(x, n_max);
        let chi_x = riccati_chi_real(x, n_max);
        let psi_mx = riccati_psi_complex(m * x, n_max);

        let dpsi = |psi: &[Complex64], n: usize, z: Complex64| psi[n - 1] - psi[n] * (n as f64) / z;
        let xc = Complex64::new(x, 0.0);
        let mut a = Vec::with_capacity(n_max);
        let mut b = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let psi_n_x = Complex64::new(psi_x[n], 0.0);
            let xi_n_x = Complex64::new(psi_x[n], -chi_x[n]);
            let dpsi_n_x = Complex64::new(psi_x[n - 1] - psi_x[n] * (n as f64) / x, 0.0);
            let dxi_n_x = Complex64::new(
                psi_x[n - 1] - psi_x[n] * (n as f64) / x,
                -(chi_x[n - 1] - chi_x[n] * (n as f64) / x),
            );
            let psi_n_mx = psi_mx[n];
            let dpsi_n_mx = dpsi(&psi_mx, n, m * xc);

            let a_n = (m * psi_n_mx * dpsi_n_x - psi_n_x * dpsi_n_mx)
                / (m * psi_n_mx * dxi_n_x - xi_n_x * dpsi_n_mx);
            let b_n = (psi_n_mx * dpsi_n_x - m * psi_n_x * dpsi_n_mx)
                / (psi_n_mx * dxi_n_x - m * xi_n_x * dpsi_n_mx);
            a.push(a_n);
            b.push(b_n);
        }

        let partial: f64 = a
            .iter()
            .zip(&b)
            .enumerate()
            .map(|(i, (an, bn))| (2.0 * (i + 1) as f64 + 1.0) * (an.norm() + bn.norm()))
            .sum();
        let last = (2.0 * n_max as f64 + 1.0) * (a[n_max - 1].norm() + b[n_max - 1].norm());
        let ratio = last / partial.max(1e-300);
        let sol = Self {
            radius,
            epsilon_r,
            frequency_hz,
            k0,
            a,
            b,
            n_max,
            last_term_ratio: ratio,
        };
        if order.is_none() && ratio > 1e-10 {
            return Err(MieError::NotConverged { ratio, n_max });
        }
        Ok(sol)
    }

    /// Scattering cross-section from the series sum (m²).
    pub fn scattering_cross_section(&self) -> f64 {
        let pre = 2.0 * std::f64::consts::PI / (self.k0 * self.k0);
        pre * self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| (2.0 * (i + 1) as f64 + 1.0) * (a.norm_sqr() + b.norm_sqr()))
            .sum::<f64>()
    }

    /// Extinction cross-section from the series sum (m²).
    pub fn extinction_cross_section(&self) -> f64 {
        let pre = 2.0 * std::f64::consts::PI / (self.k0 * self.k0);
        pre * self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| (2.0 * (i + 1) as f64 + 1.0) * (a.re + b.re))
            .sum::<f64>()
    }

    /// Extinction via the optical theorem from the forward scattering
    /// amplitude `S(0) = ½ Σ (2n+1)(a_n + b_n)`.
    pub fn extinction_from_forward_amplitude(&self) -> f64 {
        let s0: Complex64 = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| (a + b) * (2.0 * (i + 1) as f64 + 1.0))
            .sum::<Complex64>()
            * 0.5;
        4.0 * std::f64::consts::PI / (self.k0 * self.k0) * s0.re
    }

    /// Scattering amplitudes S1, S2 at scattering angle `cos θ`.
    fn amplitudes(&self, cos_theta: f64) -> (Complex64, Complex64) {
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        // π_n, τ_n recurrences.
        let mut pi_prev = 0.0f64; // π_0
        let mut pi_n = 1.0f64; // π_1
        for n in 1..=self.n_max {
            let nf = n as f64;
            let tau_n = nf * cos_theta * pi_n - (nf + 1.0) * pi_prev;
            let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
            s1 += (self.a[n - 1] * pi_n + self.b[n - 1] * tau_n) * w;
            s2 += (self.a[n - 1] * tau_n + self.b[n - 1] * pi_n) * w;
            let pi_next = ((2.0 * nf + 1.0) * cos_theta * pi_n - (nf + 1.0) * pi_prev) / nf;
            pi_prev = pi_n;
            pi_n = pi_next;
        }
        (s1, s2)
    }

    /// Bistatic far field for an arbitrary incident plane wave, sampled at
    /// `directions`, in the crate's `e^{+jωt}` convention.
    pub fn far_field(
        &self,
        pw: &PlaneWave,
        directions: Vec<Direction>,
    ) -> Result<FarFieldPattern, MieError> {
        if (pw.frequency_hz - self.frequency_hz).abs() > 1e-6 * self.frequency_hz {
            return Err(MieError::FrequencyMismatch {
                pw: pw.frequency_hz,
                mie: self.frequency_hz,
            });
        }
        // Wave frame: z' along propagation, x' along polarization.
        let zp = pw.k_hat;
        let xp = pw.e_hat;
        let yp = zp.cross(&xp);
        let inv_jk = Complex64::new(0.0, 1.0) / self.k0; // 1/(-jk)

        let mut pattern =
            FarFieldPattern::zeros(self.frequency_hz, "mie", pw.amplitude, directions);
        for (i, dir) in pattern.directions.clone().iter().enumerate() {
            let r = dir.unit();
            let ct = r.dot(&zp).clamp(-1.0, 1.0);
            let xc = r.dot(&xp);
            let yc = r.dot(&yp);
            let phi_p = yc.atan2(xc);
            let (s1, s2) = self.amplitudes(ct);

            // Scattering-frame unit vectors expressed globally. At the poles
            // the azimuth is arbitrary; fix φ' = 0 consistently in both the
            // frame vectors and the field combination.
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            let (theta_hat_p, phi_hat_p, cp, sp) = if st > 1e-9 {
                let cp = phi_p.cos();
                let sp = phi_p.sin();
                (
                    xp * (ct * cp) + yp * (ct * sp) - zp * st,
                    yp * cp - xp * sp,
                    cp,
                    sp,
                )
            } else {
                (xp * ct, yp, 1.0, 0.0)
            };
            // e^{-iωt} frame far field, then conjugate into e^{+jωt}.
            let f_theta_frame = inv_jk * s2 * cp * pw.amplitude;
            let f_phi_frame = -inv_jk * s1 * sp * pw.amplitude;
            let f_vec = [
                f_theta_frame * theta_hat_p.x + f_phi_frame * phi_hat_p.x,
                f_theta_frame * theta_hat_p.y + f_phi_frame * phi_hat_p.y,
                f_theta_frame * theta_hat_p.z + f_phi_frame * phi_hat_p.z,
            ];
            let f_vec = [f_vec[0].conj(), f_vec[1].conj(), f_vec[2].conj()];
            let th = dir.theta_hat();
            let ph = dir.phi_hat();
            pattern.e_theta[i] = f_vec[0] * th.x + f_vec[1] * th.y + f_vec[2] * th.z;
            pattern.e_phi[i] = f_vec[0] * ph.x + f_vec[1] * ph.y + f_vec[2] * ph.z;
        }
        Ok(pattern)
    }
}

/// ψ_n(x) for real x via Miller downward recurrence.
fn riccati_psi_real(x: f64, n_max: usize) -> Vec<f64> {
    let start = n_max + 15 + (x as usize);
    let mut up1 = 0.0f64; // ψ̃_{n+1}
    let mut up0 = 1e-280f64; // ψ̃_n
    let mut psi = vec![0.0; n_max + 1];
    for n in (0..=start).rev() {
        let val = (2.0 * n as f64 + 3.0) / x * up0 - up1;
        if n <= n_max {
            psi[n] = val;
        }
        up1 = up0;
        up0 = val;
        // Rescale to avoid overflow deep in the recursion.
        if up0.abs() > 1e250 {
            let s = 1e-250;
            up0 *= s;
            up1 *= s;
            for p in psi.iter_mut() {
                *p *= s;
            }
        }
    }
    let scale = x.sin() / psi[0];
    for p in psi.iter_mut() {
        *p *= scale;
    }
    psi
}

/// ψ_n(z) for complex z via Miller downward recurrence.
fn riccati_psi_complex(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let start = n_max + 15 + (z.norm() as usize);
    let mut up1 = Complex64::new(0.0, 0.0);
    let mut up0 = Complex64::new(1e-280, 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for n in (0..=start).rev() {
        let val = up0 * ((2.0 * n as f64 + 3.0) / z) - up1;
        if n <= n_max {
            psi[n] = val;
        }
        up1 = up0;
        up0 = val;
        if up0.norm() > 1e250 {
            let s = 1e-250;
            up0 *= s;
            up1 *= s;
            for p in psi.iter_mut() {
                *p *= s;
            }
        }
    }
    // Bring ψ̃₀ to unit magnitude first: complex division by a subnormal-
    // squared denominator overflows otherwise.
    let mag = 1.0 / psi[0].norm();
    for p in psi.iter_mut() {
        *p *= mag;
    }
    let scale = z.sin() / psi[0];
    for p in psi.iter_mut() {
        *p *= scale;
    }
    psi
}

/// χ_n(x) = -x y_n(x) via (stable) upward recurrence.
fn riccati_chi_real(x: f64, n_max: usize) -> Vec<f64> {
    let mut chi = vec![0.0; n_max + 1];
    chi[0] = x.cos();
    if n_max >= 1 {
        chi[1] = x.cos() / x + x.sin();
    }
    for n in 1..n_max {
        chi[n + 1] = (2.0 * n as f64 + 1.0) / x * chi[n] - chi[n - 1];
    }
    chi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::FOUR_PI;
    use crate::postprocess::full_sphere_grid;
    use crate::C0;

    #[test]
    fn riccati_small_orders_match_closed_forms() {
        let x = 2.7;
        let psi = riccati_psi_real(x, 3);
        assert!((psi[0] - x.sin()).abs() < 1e-14);
        assert!((psi[1] - (x.sin() / x - x.cos())).abs() < 1e-13);
        let chi = riccati_chi_real(x, 2);
        assert!((chi[0] - x.cos()).abs() < 1e-14);
        assert!((chi[1] - (x.cos() / x + x.sin())).abs() < 1e-13);
    }

    #[test]
    fn unit_permittivity_scatters_nothing() {
        let sol = MieSolution::new(0.5, Complex64::new(1.0, 0.0), 2.0e8).unwrap();
        assert!(sol.scattering_cross_section() < 1e-25);
        for (a, b) in sol.a.iter().zip(&sol.b) {
            assert!(a.norm() < 1e-14 && b.norm() < 1e-14);
        }
    }

    #[test]
    fn rayleigh_limit_backscatter() {
        // ka = 0.1, εr = 2.25: backscatter approaches 4π k⁴ a⁶ |(εr-1)/(εr+2)|².
        let a = 0.05;
        let ka = 0.1;
        let f = ka * C0 / (2.0 * std::f64::consts::PI * a);
        let er = Complex64::new(2.25, 0.0);
        let sol = MieSolution::new(a, er, f).unwrap();
        let pw = PlaneWave::minus_z(1.0, f);
        // Backscatter: opposite to propagation (-z wave -> +z direction).
        let p = sol
            .far_field(
                &pw,
                vec![Direction {
                    theta: 0.0,
                    phi: 0.0,
                }],
            )
            .unwrap();
        let sigma = p.sigma(0);
        let k = sol.k0;
        let contrast = ((er - 1.0) / (er + 2.0)).norm_sqr();
        let rayleigh = FOUR_PI * k.powi(4) * a.powi(6) * contrast;
        assert!(
            (sigma - rayleigh).abs() / rayleigh < 0.02,
            "sigma {sigma:e} vs rayleigh {rayleigh:e}"
        );
    }

    #[test]
    fn optical_theorem_and_lossless_balance() {
        let sol = MieSolution::new(0.5, Complex64::new(2.25, 0.0), 2.0e8).unwrap();
        let ext_series = sol.extinction_cross_section();
        let ext_forward = sol.extinction_from_forward_amplitude();
        assert!((ext_series - ext_forward).abs() <= 1e-8 * ext_series);
        // Lossless: extinction = scattering.
        let sca = sol.scattering_cross_section();
        assert!((ext_series - sca).abs() <= 1e-8 * ext_series);
    }

    #[test]
    fn truncation_is_converged_and_stable() {
        let sol = MieSolution::new(0.5, Complex64::new(2.25, 0.0), 4.0e8).unwrap();
        assert!(sol.last_term_ratio < 1e-10);
        // Doubling the order changes the cross-section below 1e-10 relative.
        let sol2 =
            MieSolution::with_order(0.5, Complex64::new(2.25, 0.0), 4.0e8, Some(2 * sol.n_max))
                .unwrap();
        let c1 = sol.scattering_cross_section();
        let c2 = sol2.scattering_cross_section();
        assert!((c1 - c2).abs() <= 1e-10 * c1);
    }

    #[test]
    fn integrated_pattern_matches_series_cross_section() {
        // ∫ σ dΩ / 4π must equal C_sca from the series.
        let sol = MieSolution::new(0.5, Complex64::new(2.25, 0.0), 2.0e8).unwrap();
        let pw = PlaneWave::minus_z(1.0, 2.0e8);
        let grid = full_sphere_grid(60, 120);
        let dirs: Vec<Direction> = grid.iter().map(|(d, _)| *d).collect();
        let p = sol.far_field(&pw, dirs).unwrap();
        let mut integral = 0.0;
        for (i, (_, w)) in grid.iter().enumerate() {
            integral += p.sigma(i) * w;
        }
        let c_sca = integral / FOUR_PI;
        let want = sol.scattering_cross_section();
        assert!(
            (c_sca - want).abs() / want < 2e-3,
            "integrated {c_sca:e} vs series {want:e}"
        );
    }

    #[test]
    fn pattern_is_polarization_consistent() {
        // In the E-plane (φ'=0) the field is θ̂'-polarized, in the H-plane
        // (φ'=90°) φ̂'-polarized; for a -z wave with x̂ polarization these are
        // the φ=0 and φ=90° planes.
        let sol = MieSolution::new(0.5, Complex64::new(2.25, 0.0), 1.5e8).unwrap();
        let pw = PlaneWave::minus_z(1.0, 1.5e8);
        let p = sol
            .far_field(
                &pw,
                vec![
                    Direction {
                        theta: 1.0,
                        phi: 0.0,
                    },
                    Direction {
                        theta: 1.0,
                        phi: std::f64::consts::FRAC_PI_2,
                    },
                ],
            )
            .unwrap();
        // E-plane sample: E_φ ≈ 0; H-plane: E_θ ≈ 0.
        assert!(p.e_phi[0].norm() < 1e-12 * p.e_theta[0].norm());
        assert!(p.e_theta[1].norm() < 1e-12 * p.e_phi[1].norm());
    }
}
