//! Incident plane waves and their tested excitation vectors.

use num_complex::Complex64;

use crate::geom::Vec3;
use crate::linalg::CMat;
use crate::medium::MediumParams;
use crate::mesh::SurfaceMesh;
use crate::operators::QuadConfig;
use crate::rwg::RwgBasis;

#[derive(Debug, thiserror::Error)]
pub enum ExcitationError {
    #[error("propagation and polarization must be unit and orthogonal (|k̂|={khat_norm:.3e}, |ê|={ehat_norm:.3e}, k̂·ê={dot:.3e})")]
    BadPolarization {
        khat_norm: f64,
        ehat_norm: f64,
        dot: f64,
    },
}

/// Linearly polarized incident plane wave
/// `E^i = ê A e^{-j k k̂·r}`, `H^i = (k̂ × E^i)/η`.
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub k_hat: Vec3,
    pub e_hat: Vec3,
    /// Amplitude (V/m).
    pub amplitude: f64,
    pub frequency_hz: f64,
}

impl PlaneWave {
    pub fn new(
        k_hat: Vec3,
        e_hat: Vec3,
        amplitude: f64,
        frequency_hz: f64,
    ) -> Result<Self, ExcitationError> {
        let khat_norm = k_hat.norm();
        let ehat_norm = e_hat.norm();
        let dot = k_hat.dot(&e_hat);
        if (khat_norm - 1.0).abs() > 1e-12 || (ehat_norm - 1.0).abs() > 1e-12 || dot.abs() > 1e-12 {
            return Err(ExcitationError::BadPolarization {
                khat_norm,
                ehat_norm,
                dot,
            });
        }
        Ok(Self {
            k_hat,
            e_hat,
            amplitude,
            frequency_hz,
        })
    }

    /// `-z`-directed wave polarized along `x̂`.
    pub fn minus_z(amplitude: f64, frequency_hz: f64) -> Self {
        Self {
            k_hat: Vec3::new(0.0, 0.0, -1.0),
            e_hat: Vec3::new(1.0, 0.0, 0.0),
            amplitude,
            frequency_hz,
        }
    }
}

/// Incident fields at a point in the homogeneous exterior.
pub fn incident_fields(
    pw: &PlaneWave,
    r: Vec3,
    medium: &MediumParams,
) -> ([Complex64; 3], [Complex64; 3]) {
    let phase = -pw.k_hat.dot(&r); // e^{-jk k̂·r}
    let jk = Complex64::new(0.0, 1.0) * medium.k;
    let e_scalar = (jk * phase).exp() * pw.amplitude;
    let h_dir = pw.k_hat.cross(&pw.e_hat);
    let h_scalar = e_scalar / medium.eta;
    (
        [
            e_scalar * pw.e_hat.x,
            e_scalar * pw.e_hat.y,
            e_scalar * pw.e_hat.z,
        ],
        [h_scalar * h_dir.x, h_scalar * h_dir.y, h_scalar * h_dir.z],
    )
}

/// Tested excitation vectors of the exterior system:
/// `V_e[m] = <f_m, n̂×E^i>`, `V_m[m] = <f_m, n̂×n̂×H^i>`.
#[derive(Debug)]
pub struct ExcitationVectors {
    pub v_e: CMat,
    pub v_m: CMat,
}

pub fn assemble_excitation(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    pw: &PlaneWave,
    medium: &MediumParams,
    quad: &QuadConfig,
) -> ExcitationVectors {
    let n = basis.len();
    let rule = quad.far_rule();
    let mut v_e = CMat::zeros(n, 1);
    let mut v_m = CMat::zeros(n, 1);
    for ti in 0..mesh.num_triangles() {
        let tri = mesh.triangle(ti);
        let nrm = mesh.normal(ti);
        let lb = basis.local(ti);
        for (p, w) in rule.nodes_on(&tri) {
            let (e_i, h_i) = incident_fields(pw, p, medium);
            // n̂ × E^i and n̂×n̂×H^i = (n̂·H^i)n̂ - H^i; f_m is tangential so
            // only the tangential parts survive the dot products below.
            let n_cross = |v: &[Complex64; 3]| {
                [
                    nrm.y * v[2] - nrm.z * v[1],
                    nrm.z * v[0] - nrm.x * v[2],
                    nrm.x * v[1] - nrm.y * v[0],
                ]
            };
            let nxe = n_cross(&e_i);
            let nxh = n_cross(&h_i);
            let nxnxh = n_cross(&nxh);
            for a in 0..3 {
                let f = (p - lb.free_vertex[a]) * (w * lb.vec_scale[a]);
                let m = lb.edge[a];
                v_e[(m, 0)] += f.x * nxe[0] + f.y * nxe[1] + f.z * nxe[2];
                v_m[(m, 0)] += f.x * nxnxh[0] + f.y * nxnxh[1] + f.z * nxnxh[2];
            }
        }
    }
    ExcitationVectors { v_e, v_m }
}

/// Tangentially tested incident fields `<f_m, E^i>` and `<f_m, H^i>`
/// (the right-hand side form used by the two-current reference solver).
pub fn assemble_tangential_excitation(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    pw: &PlaneWave,
    medium: &MediumParams,
    quad: &QuadConfig,
) -> (CMat, CMat) {
    let n = basis.len();
    let rule = quad.far_rule();
    let mut v_e = CMat::zeros(n, 1);
    let mut v_h = CMat::zeros(n, 1);
    for ti in 0..mesh.num_triangles() {
        let tri = mesh.triangle(ti);
        let lb = basis.local(ti);
        for (p, w) in rule.nodes_on(&tri) {
            let (e_i, h_i) = incident_fields(pw, p, medium);
            for a in 0..3 {
                let f = (p - lb.free_vertex[a]) * (w * lb.vec_scale[a]);
                let m = lb.edge[a];
                v_e[(m, 0)] += f.x * e_i[0] + f.y * e_i[1] + f.z * e_i[2];
                v_h[(m, 0)] += f.x * h_i[0] + f.y * h_i[1] + f.z * h_i[2];
            }
        }
    }
    (v_e, v_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Material;
    use crate::mesh::gen;
    use crate::{C0, ETA0};

    #[test]
    fn plane_wave_relation_at_origin() {
        let pw = PlaneWave::minus_z(1.0, 2.0e8);
        let medium = MediumParams::new(&Material::free_space(), 2.0e8);
        let (e, h) = incident_fields(&pw, Vec3::zeros(), &medium);
        assert!((e[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(e[1].norm() < 1e-15 && e[2].norm() < 1e-15);
        let h_norm = (h[0].norm_sqr() + h[1].norm_sqr() + h[2].norm_sqr()).sqrt();
        assert!((h_norm - 1.0 / ETA0).abs() < 1e-12);
        // H along k̂×ê = -ẑ×x̂ = -ŷ
        assert!((h[1] + Complex64::new(1.0 / ETA0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn one_wavelength_displacement_is_2pi_phase() {
        let pw = PlaneWave::minus_z(1.0, 1.5e8);
        let medium = MediumParams::new(&Material::free_space(), 1.5e8);
        let lambda = medium.wavelength();
        let (e0, _) = incident_fields(&pw, Vec3::zeros(), &medium);
        let (e1, _) = incident_fields(&pw, Vec3::new(0.0, 0.0, -lambda), &medium);
        assert!((e0[0] - e1[0]).norm() < 1e-12);
    }

    #[test]
    fn minus_z_wave_at_200mhz_half_wavelength_phase_flip() {
        // Half the free-space wavelength at 200 MHz is c/(2f) = 0.74948 m;
        // moving that far along the propagation direction flips the phase.
        let f = 2.0e8;
        let half_lambda = C0 / (2.0 * f);
        assert!((half_lambda - 0.749_481_145).abs() < 1e-9);
        let pw = PlaneWave::minus_z(1.0, f);
        let medium = MediumParams::new(&Material::free_space(), f);
        let (e0, _) = incident_fields(&pw, Vec3::zeros(), &medium);
        let (e1, _) = incident_fields(&pw, Vec3::new(0.0, 0.0, half_lambda), &medium);
        assert!(
            (e0[0] + e1[0]).norm() < 1e-12,
            "expected e^{{+jπ}} relation"
        );
    }

    #[test]
    fn rejects_non_orthogonal_polarization() {
        let r = PlaneWave::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.1, 0.9949874371),
            1.0,
            1e8,
        );
        assert!(r.is_err());
    }

    #[test]
    fn excitation_linearity_and_zero_amplitude() {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        let medium = MediumParams::new(&Material::free_space(), 1.0e8);
        let quad = QuadConfig::default();
        let pw0 = PlaneWave::minus_z(0.0, 1.0e8);
        let v0 = assemble_excitation(&mesh, &basis, &pw0, &medium, &quad);
        assert!(v0.v_e.norm_max() == 0.0 && v0.v_m.norm_max() == 0.0);

        let pw1 = PlaneWave::minus_z(1.0, 1.0e8);
        let pw2 = PlaneWave::minus_z(2.0, 1.0e8);
        let v1 = assemble_excitation(&mesh, &basis, &pw1, &medium, &quad);
        let v2 = assemble_excitation(&mesh, &basis, &pw2, &medium, &quad);
        for m in 0..basis.len() {
            assert!((v2.v_e[(m, 0)] - 2.0 * v1.v_e[(m, 0)]).norm() < 1e-15 * v1.v_e.norm_max());
            assert!((v2.v_m[(m, 0)] - 2.0 * v1.v_m[(m, 0)]).norm() < 1e-15 * v1.v_m.norm_max());
        }
    }

    #[test]
    fn excitation_matches_refined_quadrature() {
        // Electrically small icosahedron: the default rule must agree with a
        // much finer one to 1e-10 relative.
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        let f = 2.0e6; // kh ≈ 0.04
        let medium = MediumParams::new(&Material::free_space(), f);
        let pw =
            PlaneWave::new(Vec3::new(0.6, 0.0, -0.8), Vec3::new(0.8, 0.0, 0.6), 1.0, f).unwrap();
        let coarse = assemble_excitation(&mesh, &basis, &pw, &medium, &QuadConfig::default());
        let fine = assemble_excitation(
            &mesh,
            &basis,
            &pw,
            &medium,
            &QuadConfig {
                far_points: 16,
                ..QuadConfig::default()
            },
        );
        let scale = fine.v_e.norm_max();
        for m in 0..basis.len() {
            assert!((coarse.v_e[(m, 0)] - fine.v_e[(m, 0)]).norm() < 1e-10 * scale);
            assert!((coarse.v_m[(m, 0)] - fine.v_m[(m, 0)]).norm() < 1e-10 * scale / ETA0 + 1e-30);
        }
    }

    #[test]
    fn rotating_mesh_and_wave_together_is_invariant() {
        let mesh = gen::icosahedron(1.0);
        let basis = RwgBasis::build(&mesh);
        let f = 5.0e7;
        let medium = MediumParams::new(&Material::free_space(), f);
        let pw = PlaneWave::minus_z(1.0, f);
        let quad = QuadConfig::default();
        let v = assemble_excitation(&mesh, &basis, &pw, &medium, &quad);

        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1);
        let rmesh = mesh.mapped(|p| rot * p).unwrap();
        let rbasis = RwgBasis::build(&rmesh);
        let rpw = PlaneWave::new(rot * pw.k_hat, rot * pw.e_hat, 1.0, f).unwrap();
        let rv = assemble_excitation(&rmesh, &rbasis, &rpw, &medium, &quad);

        // Vertex order is unchanged, so edges keep their indices.
        let scale = v.v_e.norm_max();
        for m in 0..basis.len() {
            assert!((v.v_e[(m, 0)] - rv.v_e[(m, 0)]).norm() < 1e-10 * scale);
            assert!((v.v_m[(m, 0)] - rv.v_m[(m, 0)]).norm() < 1e-10 * scale);
        }
    }
}
