//! Independent numerical oracle for the spheroid: curvatures from the
//! first and second fundamental forms of the parametrization, totals from
//! composite Gauss-Legendre quadrature in the latitude.

use std::f64::consts::PI;

use super::spheroid::SpheroidReference;
use crate::Vec3;

const GL5_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

/// Pointwise differential geometry at `(beta, theta)`.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeometry {
    pub mean: f64,
    pub gauss: f64,
    pub normal: Vec3,
    /// Area element `|r_b x r_t|`.
    pub jacobian: f64,
    pub point: Vec3,
}

pub fn local_geometry(s: &SpheroidReference, beta: f64, theta: f64) -> LocalGeometry {
    let (a, c) = (s.a, s.c);
    let (sb, cb) = beta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let r = Vec3::new(a * cb * ct, a * cb * st, c * sb);
    let rb = Vec3::new(-a * sb * ct, -a * sb * st, c * cb);
    let rt = Vec3::new(-a * cb * st, a * cb * ct, 0.0);
    let rbb = Vec3::new(-a * cb * ct, -a * cb * st, -c * sb);
    let rtt = Vec3::new(-a * cb * ct, -a * cb * st, 0.0);
    let rbt = Vec3::new(a * sb * st, -a * sb * ct, 0.0);
    let cross = rt.cross(&rb);
    let jacobian = cross.norm();
    let n = cross / jacobian;
    let (e, f, g) = (rb.dot(&rb), rb.dot(&rt), rt.dot(&rt));
    let (l, m, nn) = (rbb.dot(&n), rbt.dot(&n), rtt.dot(&n));
    let det = e * g - f * f;
    LocalGeometry {
        // the second fundamental form is negative on a convex surface with
        // an outward normal
        mean: -(l * g - 2.0 * m * f + nn * e) / (2.0 * det),
        gauss: (l * nn - m * m) / det,
        normal: n,
        jacobian,
        point: r,
    }
}

/// Totals `(area, volume, int H, int H^2, int K)`.
pub fn quadrature_totals(s: &SpheroidReference, panels: usize) -> [f64; 5] {
    let (lo, hi) = (-PI / 2.0, PI / 2.0);
    let width = (hi - lo) / panels as f64;
    let mut acc = [0.0; 5];
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        for (x, w) in GL5_X.iter().zip(GL5_W) {
            let beta = mid + 0.5 * width * x;
            let g = local_geometry(s, beta, 0.0);
            // axisymmetric: the azimuthal integral is a factor 2 pi
            let da = 2.0 * PI * g.jacobian * w * 0.5 * width;
            acc[0] += da;
            acc[1] += da * g.point.dot(&g.normal) / 3.0;
            acc[2] += da * g.mean;
            acc[3] += da * g.mean * g.mean;
            acc[4] += da * g.gauss;
        }
    }
    acc
}

/// Largest discrepancy between the closed forms and the oracle over the
/// totals and a sweep of pointwise samples.
pub fn reference_discrepancy(s: &SpheroidReference) -> f64 {
    let q = quadrature_totals(s, 400);
    let closed = [s.area(), s.volume(), s.total_mean(), s.total_mean_squared(), s.total_gauss()];
    let mut worst = q.iter().zip(closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    for i in 0..=40 {
        let beta = -1.5 + 3.0 * i as f64 / 40.0;
        let theta = 0.37 * i as f64;
        let g = local_geometry(s, beta, theta);
        worst = worst
            .max((g.mean - s.mean(beta)).abs())
            .max((g.gauss - s.gauss(beta)).abs())
            .max((g.normal - s.normal(beta, theta)).norm())
            .max((g.point - s.point(beta, theta)).norm());
    }
    worst
}
