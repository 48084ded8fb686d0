//! Symmetric Gauss quadrature rules on the reference triangle.
//!
//! Weights are normalized to the unit-area reference triangle (they sum to 1),
//! so a physical integral is `area * Σ w_i f(p_i)`.

use crate::geom::{Triangle, Vec3};

/// One quadrature node in barycentric coordinates plus its weight.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    /// Barycentric coordinates (λ0, λ1, λ2), summing to 1.
    pub bary: [f64; 3],
    pub weight: f64,
}

/// A fixed symmetric rule of known polynomial degree.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<QuadPoint>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    /// Rule selected by point count: 1, 3, 7 (degree 5, default for far
    /// pairs) or 16 (degree 8, default for the smooth remainder of near
    /// pairs).
    pub fn by_points(n: usize) -> Option<Self> {
        match n {
            1 => Some(Self::centroid()),
            3 => Some(Self::three_point()),
            7 => Some(Self::seven_point()),
            16 => Some(Self::sixteen_point()),
            _ => None,
        }
    }

    pub fn centroid() -> Self {
        let third = 1.0 / 3.0;
        Self {
            points: vec![QuadPoint {
                bary: [third; 3],
                weight: 1.0,
            }],
            degree: 1,
        }
    }

    pub fn three_point() -> Self {
        let mut points = Vec::with_capacity(3);
        push_sym3(&mut points, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
        Self { points, degree: 2 }
    }

    /// Seven-point degree-5 rule (Strang-Fix).
    pub fn seven_point() -> Self {
        let mut points = Vec::with_capacity(7);
        points.push(QuadPoint {
            bary: [1.0 / 3.0; 3],
            weight: 9.0 / 40.0,
        });
        push_sym3(
            &mut points,
            0.059_715_871_789_770,
            0.470_142_064_105_115,
            0.132_394_152_788_506,
        );
        push_sym3(
            &mut points,
            0.797_426_985_353_087,
            0.101_286_507_323_456,
            0.125_939_180_544_827,
        );
        Self { points, degree: 5 }
    }

    /// Sixteen-point degree-8 rule (Dunavant).
    pub fn sixteen_point() -> Self {
        let mut points = Vec::with_capacity(16);
        points.push(QuadPoint {
            bary: [1.0 / 3.0; 3],
            weight: 0.144_315_607_677_787_168,
        });
        push_sym3(
            &mut points,
            0.081_414_823_414_553_687,
            0.459_292_588_292_723_156,
            0.095_091_634_267_284_625,
        );
        push_sym3(
            &mut points,
            0.658_861_384_496_479_587,
            0.170_569_307_751_760_207,
            0.103_217_370_534_718_250,
        );
        push_sym3(
            &mut points,
            0.898_905_543_365_938_049,
            0.050_547_228_317_030_975,
            0.032_458_497_623_198_080,
        );
        push_sym6(
            &mut points,
            0.008_394_777_409_957_605,
            0.263_112_829_634_638_113,
            0.728_492_392_955_404_281,
            0.027_230_314_174_434_994,
        );
        Self { points, degree: 8 }
    }

    /// Physical node positions and combined weights (`w_i * area`) on a triangle.
    pub fn nodes_on(&self, tri: &Triangle) -> Vec<(Vec3, f64)> {
        let area = tri.area();
        self.points
            .iter()
            .map(|q| {
                let p = tri.v[0] * q.bary[0] + tri.v[1] * q.bary[1] + tri.v[2] * q.bary[2];
                (p, q.weight * area)
            })
            .collect()
    }

    pub fn weight_sum(&self) -> f64 {
        self.points.iter().map(|q| q.weight).sum()
    }
}

fn push_sym3(points: &mut Vec<QuadPoint>, a: f64, b: f64, w: f64) {
    points.push(QuadPoint {
        bary: [a, b, b],
        weight: w,
    });
    points.push(QuadPoint {
        bary: [b, a, b],
        weight: w,
    });
    points.push(QuadPoint {
        bary: [b, b, a],
        weight: w,
    });
}

fn push_sym6(points: &mut Vec<QuadPoint>, a: f64, b: f64, c: f64, w: f64) {
    for bary in [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ] {
        points.push(QuadPoint { bary, weight: w });
    }
}
