//! Small geometric helpers shared by the mesh and kernel layers.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Triangle described by its three vertex positions.
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub v: [Vec3; 3],
}

impl Triangle {
    pub fn new(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self { v: [a, b, c] }
    }

    /// Unnormalized normal `(v1-v0)×(v2-v0)`; its length is twice the area.
    pub fn normal_raw(&self) -> Vec3 {
        (self.v[1] - self.v[0]).cross(&(self.v[2] - self.v[0]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.normal_raw().norm()
    }

    pub fn unit_normal(&self) -> Vec3 {
        let n = self.normal_raw();
        n / n.norm()
    }

    pub fn centroid(&self) -> Vec3 {
        (self.v[0] + self.v[1] + self.v[2]) / 3.0
    }

    /// Longest edge length.
    pub fn diameter(&self) -> f64 {
        let e0 = (self.v[1] - self.v[0]).norm();
        let e1 = (self.v[2] - self.v[1]).norm();
        let e2 = (self.v[0] - self.v[2]).norm();
        e0.max(e1).max(e2)
    }

    /// Map barycentric coordinates `(λ1, λ2)` (with `λ0 = 1-λ1-λ2`) to a point.
    pub fn point(&self, l1: f64, l2: f64) -> Vec3 {
        self.v[0] * (1.0 - l1 - l2) + self.v[1] * l1 + self.v[2] * l2
    }
}

/// Signed solid angle subtended by triangle `(a, b, c)` seen from `p`
/// (van Oosterom & Strackee). Positive when the triangle's orientation is
/// counterclockwise as seen from `p`'s side of the plane.
pub fn signed_solid_angle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ra = a - p;
    let rb = b - p;
    let rc = c - p;
    let la = ra.norm();
    let lb = rb.norm();
    let lc = rc.norm();
    let num = ra.dot(&rb.cross(&rc));
    let den = la * lb * lc + ra.dot(&rb) * lc + rb.dot(&rc) * la + rc.dot(&ra) * lb;
    2.0 * num.atan2(den)
}
