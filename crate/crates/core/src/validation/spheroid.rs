//! Closed-form geometry of the spheroid of revolution
//! `(a cos b cos t, a cos b sin t, c sin b)` with parametric latitude `b`.

use std::f64::consts::PI;

use crate::Vec3;

/// Smooth reference surface. Curvatures use the outward normal, so a
/// convex spheroid has positive mean curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpheroidReference {
    pub a: f64,
    pub c: f64,
}

impl Default for SpheroidReference {
    /// The oblate `a = 1, c = 0.5` benchmark surface.
    fn default() -> Self {
        SpheroidReference { a: 1.0, c: 0.5 }
    }
}

/// `asinh(sqrt(k) x) / sqrt(k)`, continued to `k <= 0`.
fn ash(k: f64, x: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * x).asinh() / k.sqrt()
    } else if k < 0.0 {
        ((-k).sqrt() * x).asin() / (-k).sqrt()
    } else {
        x
    }
}

/// `atan(sqrt(k) x) / sqrt(k)`, continued to `k <= 0`.
fn atn(k: f64, x: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * x).atan() / k.sqrt()
    } else if k < 0.0 {
        ((-k).sqrt() * x).atanh() / (-k).sqrt()
    } else {
        x
    }
}

impl SpheroidReference {
    fn k(&self) -> f64 {
        self.a * self.a - self.c * self.c
    }

    /// `a^2 sin^2 b + c^2 cos^2 b`, the squared speed along a meridian.
    fn d(&self, beta: f64) -> f64 {
        let (s, co) = beta.sin_cos();
        self.a * self.a * s * s + self.c * self.c * co * co
    }

    pub fn point(&self, beta: f64, theta: f64) -> Vec3 {
        let (sb, cb) = beta.sin_cos();
        let (st, ct) = theta.sin_cos();
        Vec3::new(self.a * cb * ct, self.a * cb * st, self.c * sb)
    }

    /// Parametric latitude and azimuth of a point on (or radially near)
    /// the surface.
    pub fn parameters(&self, p: &Vec3) -> (f64, f64) {
        let rho = (p.x * p.x + p.y * p.y).sqrt();
        ((p.z / self.c).atan2(rho / self.a), p.y.atan2(p.x))
    }

    pub fn normal(&self, beta: f64, theta: f64) -> Vec3 {
        let (sb, cb) = beta.sin_cos();
        let (st, ct) = theta.sin_cos();
        Vec3::new(self.c * cb * ct, self.c * cb * st, self.a * sb).normalize()
    }

    /// Meridian and parallel principal curvatures.
    pub fn principal(&self, beta: f64) -> (f64, f64) {
        let d = self.d(beta);
        (self.a * self.c / d.powf(1.5), self.c / (self.a * d.sqrt()))
    }

    pub fn mean(&self, beta: f64) -> f64 {
        let (km, kp) = self.principal(beta);
        0.5 * (km + kp)
    }

    pub fn gauss(&self, beta: f64) -> f64 {
        let d = self.d(beta);
        self.c * self.c / (d * d)
    }

    fn mean_derivative(&self, beta: f64) -> f64 {
        let d = self.d(beta);
        let dd = self.k() * (2.0 * beta).sin();
        -0.25 * dd * d.powf(-2.5) * (3.0 * self.a * self.c + self.c * d / self.a)
    }

    /// Surface Laplacian of the mean curvature, `(cos b H' / W)' / (cos b W)`
    /// with `W = sqrt(d)`. The outer derivative is a central difference of
    /// the closed-form inner flux; the proxy it feeds is only reported.
    pub fn laplacian_of_mean(&self, beta: f64) -> f64 {
        let lim = PI / 2.0 - 1e-4;
        let b = beta.clamp(-lim, lim);
        let flux = |x: f64| x.cos() * self.mean_derivative(x) / self.d(x).sqrt();
        let step = 1e-5;
        (flux(b + step) - flux(b - step)) / (2.0 * step) / (b.cos() * self.d(b).sqrt())
    }

    pub fn area(&self) -> f64 {
        2.0 * PI * self.a * self.a + 2.0 * PI * self.a * self.c * self.c * ash(self.k(), 1.0 / self.c)
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.a * self.a * self.c
    }

    /// `int H dA`.
    pub fn total_mean(&self) -> f64 {
        2.0 * PI * self.c + 2.0 * PI * self.a * self.a * atn(self.k(), 1.0 / self.c)
    }

    /// `int H^2 dA`, from the integrals of the squared principal curvatures
    /// and of their product.
    pub fn total_mean_squared(&self) -> f64 {
        let (a, c) = (self.a, self.c);
        let km2 = 4.0 * PI * (2.0 * a * a + c * c) / (3.0 * c * c);
        let kp2 = 4.0 * PI * c * c / a * ash(self.k(), 1.0 / c);
        0.25 * (km2 + 2.0 * self.total_gauss() + kp2)
    }

    /// `int K dA` for a closed genus-0 surface.
    pub fn total_gauss(&self) -> f64 {
        4.0 * PI
    }
}
