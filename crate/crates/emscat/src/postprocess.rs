//! Far-field radiation of RWG-expanded surface currents, RCS patterns and
//! the pattern CSV format.
//!
//! Far-field convention: `F(r̂) = lim_{r→∞} r e^{+jkr} E_s(r r̂)` (time
//! factor `e^{+jωt}`), so the bistatic radar cross section is
//! `σ = 4π (|F_θ|² + |F_φ|²) / |E^i|²`.

use num_complex::Complex64;

use crate::geom::Vec3;
use crate::kernels::FOUR_PI;
use crate::linalg::CMat;
use crate::medium::MediumParams;
use crate::mesh::SurfaceMesh;
use crate::operators::QuadConfig;
use crate::rwg::RwgBasis;

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("coefficient vector length {got} does not match basis count {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("pattern grids do not match ({0} vs {1} samples)")]
    GridMismatch(usize, usize),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Observation direction in standard spherical angles (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn unit(&self) -> Vec3 {
        Vec3::new(
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        )
    }

    pub fn theta_hat(&self) -> Vec3 {
        Vec3::new(
            self.theta.cos() * self.phi.cos(),
            self.theta.cos() * self.phi.sin(),
            -self.theta.sin(),
        )
    }

    pub fn phi_hat(&self) -> Vec3 {
        Vec3::new(-self.phi.sin(), self.phi.cos(), 0.0)
    }
}

/// Great-circle cut at constant φ: θ from 0 to 180° inclusive.
pub fn phi_cut(phi_deg: f64, step_deg: f64) -> Vec<Direction> {
    let n = (180.0 / step_deg).round() as usize + 1;
    (0..n)
        .map(|i| Direction {
            theta: (i as f64 * step_deg).to_radians(),
            phi: phi_deg.to_radians(),
        })
        .collect()
}

/// Constant-θ cut: φ from 0 to 360° exclusive of the endpoint.
pub fn theta_cut(theta_deg: f64, step_deg: f64) -> Vec<Direction> {
    let n = (360.0 / step_deg).round() as usize;
    (0..n)
        .map(|i| Direction {
            theta: theta_deg.to_radians(),
            phi: (i as f64 * step_deg).to_radians(),
        })
        .collect()
}

/// Midpoint-rule full-sphere grid with integration weights (steradians).
pub fn full_sphere_grid(n_theta: usize, n_phi: usize) -> Vec<(Direction, f64)> {
    let dt = std::f64::consts::PI / n_theta as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * dt;
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dp;
            out.push((Direction { theta, phi }, theta.sin() * dt * dp));
        }
    }
    out
}

/// Sampled bistatic far field with derived RCS.
#[derive(Debug, Clone)]
pub struct FarFieldPattern {
    pub frequency_hz: f64,
    pub solver: String,
    pub incident_amplitude: f64,
    pub directions: Vec<Direction>,
    pub e_theta: Vec<Complex64>,
    pub e_phi: Vec<Complex64>,
}

impl FarFieldPattern {
    pub fn zeros(
        frequency_hz: f64,
        solver: impl Into<String>,
        incident_amplitude: f64,
        directions: Vec<Direction>,
    ) -> Self {
        let n = directions.len();
        Self {
            frequency_hz,
            solver: solver.into(),
            incident_amplitude,
            directions,
            e_theta: vec![Complex64::new(0.0, 0.0); n],
            e_phi: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Bistatic RCS (m²) at sample `i`.
    pub fn sigma(&self, i: usize) -> f64 {
        FOUR_PI * (self.e_theta[i].norm_sqr() + self.e_phi[i].norm_sqr())
            / (self.incident_amplitude * self.incident_amplitude)
    }

    pub fn sigma_dbsm(&self, i: usize) -> f64 {
        10.0 * self.sigma(i).max(1e-300).log10()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Relative L2 difference of the complex field samples against `other`,
    /// normalized by `other`'s energy.
    pub fn l2_difference(&self, other: &Self) -> Result<f64, PatternError> {
        if self.len() != other.len() {
            return Err(PatternError::GridMismatch(self.len(), other.len()));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.len() {
            num += (self.e_theta[i] - other.e_theta[i]).norm_sqr()
                + (self.e_phi[i] - other.e_phi[i]).norm_sqr();
            den += other.e_theta[i].norm_sqr() + other.e_phi[i].norm_sqr();
        }
        Ok((num / den.max(1e-300)).sqrt())
    }

    /// Maximum pointwise relative difference of field magnitudes, normalized
    /// by the peak magnitude of `other`.
    pub fn max_difference(&self, other: &Self) -> Result<f64, PatternError> {
        if self.len() != other.len() {
            return Err(PatternError::GridMismatch(self.len(), other.len()));
        }
        let peak = (0..other.len())
            .map(|i| (other.e_theta[i].norm_sqr() + other.e_phi[i].norm_sqr()).sqrt())
            .fold(0.0f64, f64::max);
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            let d = ((self.e_theta[i] - other.e_theta[i]).norm_sqr()
                + (self.e_phi[i] - other.e_phi[i]).norm_sqr())
            .sqrt();
            worst = worst.max(d / peak.max(1e-300));
        }
        Ok(worst)
    }
}

/// Radiate RWG-expanded currents on one surface into `pattern` (accumulates,
/// so multi-scatterer scenes call this once per surface).
///
/// `j` holds electric-current coefficients; `m` optionally holds
/// magnetic-current coefficients (the two-current reference solver).
pub fn radiate_into(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    j: &CMat,
    m: Option<&CMat>,
    exterior: &MediumParams,
    quad: &QuadConfig,
    pattern: &mut FarFieldPattern,
) -> Result<(), PatternError> {
    let n = basis.len();
    if j.nrows() != n {
        return Err(PatternError::Dimension {
            got: j.nrows(),
            expected: n,
        });
    }
    if let Some(m) = m {
        if m.nrows() != n {
            return Err(PatternError::Dimension {
                got: m.nrows(),
                expected: n,
            });
        }
    }
    let k = exterior.k.re;
    let rule = quad.far_rule();
    let jj = Complex64::new(0.0, 1.0);
    // F_J = -jωμ/(4π) (I - r̂r̂)·N_J,  F_M = +jk/(4π) r̂ × N_M,
    // N_X = Σ_n x_n ∫ f_n e^{+jk r̂·r'} dS'.
    let c_j = -jj * exterior.omega * exterior.mu / FOUR_PI;
    let c_m = jj * k / FOUR_PI;

    for (idx, dir) in pattern.directions.clone().iter().enumerate() {
        let rhat = dir.unit();
        let mut n_j = [Complex64::new(0.0, 0.0); 3];
        let mut n_m = [Complex64::new(0.0, 0.0); 3];
        for ti in 0..mesh.num_triangles() {
            let tri = mesh.triangle(ti);
            let lb = basis.local(ti);
            for (p, w) in rule.nodes_on(&tri) {
                let phase = (jj * (k * rhat.dot(&p))).exp() * w;
                for a in 0..3 {
                    let f = (p - lb.free_vertex[a]) * lb.vec_scale[a];
                    let cj = j[(lb.edge[a], 0)] * phase;
                    n_j[0] += cj * f.x;
                    n_j[1] += cj * f.y;
                    n_j[2] += cj * f.z;
                    if let Some(m) = m {
                        let cm = m[(lb.edge[a], 0)] * phase;
                        n_m[0] += cm * f.x;
                        n_m[1] += cm * f.y;
                        n_m[2] += cm * f.z;
                    }
                }
            }
        }
        let th = dir.theta_hat();
        let ph = dir.phi_hat();
        // (I - r̂r̂)·N_J projected on θ̂/φ̂ is just the θ̂/φ̂ components.
        let et_j = c_j * (n_j[0] * th.x + n_j[1] * th.y + n_j[2] * th.z);
        let ep_j = c_j * (n_j[0] * ph.x + n_j[1] * ph.y + n_j[2] * ph.z);
        // r̂ × N_M: θ̂·(r̂×N) = -φ̂·N, φ̂·(r̂×N) = θ̂·N.
        let (et_m, ep_m) = if m.is_some() {
            let nm_th = n_m[0] * th.x + n_m[1] * th.y + n_m[2] * th.z;
            let nm_ph = n_m[0] * ph.x + n_m[1] * ph.y + n_m[2] * ph.z;
            (-c_m * nm_ph, c_m * nm_th)
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        };
        pattern.e_theta[idx] += et_j + et_m;
        pattern.e_phi[idx] += ep_j + ep_m;
    }
    Ok(())
}

/// Single-surface convenience wrapper around [`radiate_into`].
#[allow(clippy::too_many_arguments)]
pub fn radiate(
    mesh: &SurfaceMesh,
    basis: &RwgBasis,
    j: &CMat,
    m: Option<&CMat>,
    exterior: &MediumParams,
    quad: &QuadConfig,
    directions: Vec<Direction>,
    frequency_hz: f64,
    solver: &str,
    incident_amplitude: f64,
) -> Result<FarFieldPattern, PatternError> {
    let mut pattern = FarFieldPattern::zeros(frequency_hz, solver, incident_amplitude, directions);
    radiate_into(mesh, basis, j, m, exterior, quad, &mut pattern)?;
    Ok(pattern)
}

// ---------------------------------------------------------------------------
// CSV format
// ---------------------------------------------------------------------------

pub const CONVENTION_NOTE: &str =
    "time e^{+j w t}, far field F = lim r e^{+j k r} E_s, sigma = 4 pi |F|^2 / |Ei|^2";

pub fn pattern_to_csv(p: &FarFieldPattern) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "# frequency_hz = {:.17e}", p.frequency_hz);
    let _ = writeln!(out, "# solver = {}", p.solver);
    let _ = writeln!(
        out,
        "# incident_amplitude_v_per_m = {:.17e}",
        p.incident_amplitude
    );
    let _ = writeln!(out, "# convention = {CONVENTION_NOTE}");
    let _ = writeln!(
        out,
        "theta_deg,phi_deg,re_e_theta,im_e_theta,re_e_phi,im_e_phi,sigma_dbsm"
    );
    for i in 0..p.len() {
        let d = p.directions[i];
        let _ = writeln!(
            out,
            "{:.12},{:.12},{:.17e},{:.17e},{:.17e},{:.17e},{:.12}",
            d.theta.to_degrees(),
            d.phi.to_degrees(),
            p.e_theta[i].re,
            p.e_theta[i].im,
            p.e_phi[i].re,
            p.e_phi[i].im,
            p.sigma_dbsm(i)
        );
    }
    out
}

pub fn write_pattern_csv(
    path: impl AsRef<std::path::Path>,
    p: &FarFieldPattern,
) -> Result<(), PatternError> {
    let path = path.as_ref();
    std::fs::write(path, pattern_to_csv(p)).map_err(|source| PatternError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn pattern_from_csv(text: &str) -> Result<FarFieldPattern, PatternError> {
    let mut frequency_hz = 0.0;
    let mut solver = String::new();
    let mut amplitude = 1.0;
    let mut directions = Vec::new();
    let mut e_theta = Vec::new();
    let mut e_phi = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, val)) = rest.split_once('=') {
                match key.trim() {
                    "frequency_hz" => {
                        frequency_hz = val.trim().parse().map_err(|_| PatternError::Parse {
                            line: ln + 1,
                            msg: "bad frequency".into(),
                        })?;
                    }
                    "solver" => solver = val.trim().to_string(),
                    "incident_amplitude_v_per_m" => {
                        amplitude = val.trim().parse().map_err(|_| PatternError::Parse {
                            line: ln + 1,
                            msg: "bad amplitude".into(),
                        })?;
                    }
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("theta_deg") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(PatternError::Parse {
                line: ln + 1,
                msg: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<f64, PatternError> {
            fields[i].parse().map_err(|_| PatternError::Parse {
                line: ln + 1,
                msg: format!("bad number in field {i}"),
            })
        };
        directions.push(Direction {
            theta: num(0)?.to_radians(),
            phi: num(1)?.to_radians(),
        });
        e_theta.push(Complex64::new(num(2)?, num(3)?));
        e_phi.push(Complex64::new(num(4)?, num(5)?));
    }
    Ok(FarFieldPattern {
        frequency_hz,
        solver,
        incident_amplitude: amplitude,
        directions,
        e_theta,
        e_phi,
    })
}

pub fn read_pattern_csv(
    path: impl AsRef<std::path::Path>,
) -> Result<FarFieldPattern, PatternError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PatternError::Io {
        path: path.display().to_string(),
        source,
    })?;
    pattern_from_csv(&text)
}
