//! Points, geodesics and the metric of S²×ℝ.
//!
//! A point is a pair (P, t) with P on the unit sphere and t on the real line.
//! In the affine model the point is stored as `e^t · P`, so the sphere
//! direction is the ray through the origin and the fibre coordinate is the
//! logarithm of the Euclidean radius.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of S²×ℝ in geographic coordinates plus the fibre coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberedPoint {
    /// Longitude in (−π, π].
    pub phi: f64,
    /// Latitude in [−π/2, π/2].
    pub theta: f64,
    /// Fibre coordinate.
    pub t: f64,
}

/// A point of the affine model with `x⁰ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Direction and length of a geodesic leaving the model point (1, 0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    /// Longitude of the direction.
    pub u: f64,
    /// Altitude of the direction; `v = ±π/2` moves along the fibre only.
    pub v: f64,
    /// Arc length, `tau >= 0`.
    pub tau: f64,
}

impl FiberedPoint {
    pub const fn new(phi: f64, theta: f64, t: f64) -> Self {
        Self { phi, theta, t }
    }

    /// Unit vector of the spherical part.
    pub fn sphere_vector(&self) -> Vector3<f64> {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        Vector3::new(cp * ct, sp * ct, st)
    }

    /// Builds a normalized point from a (not necessarily unit) sphere
    /// direction. The longitude of a pole is fixed to 0.
    pub fn from_sphere_vector(v: &Vector3<f64>, t: f64) -> Self {
        let rxy = v.x.hypot(v.y);
        let theta = v.z.atan2(rxy);
        let phi = if rxy == 0.0 {
            0.0
        } else {
            wrap_angle(v.y.atan2(v.x))
        };
        Self { phi, theta, t }
    }

    fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.theta.is_finite() && self.t.is_finite()
    }
}

impl ModelPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }
}

impl From<Vector3<f64>> for ModelPoint {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let w = PI - (PI - a).rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Brings `phi` into (−π, π] and `theta` into [−π/2, π/2] without moving the
/// point. A latitude past a pole is reflected back and the longitude turned
/// by π.
pub fn normalize_point(p: FiberedPoint) -> Result<FiberedPoint> {
    if !p.is_finite() {
        return Err(Error::domain(format!("non-finite point {p:?}")));
    }
    let mut phi = p.phi;
    let mut theta = wrap_angle(p.theta);
    if theta > FRAC_PI_2 {
        theta = PI - theta;
        phi += PI;
    } else if theta < -FRAC_PI_2 {
        theta = -PI - theta;
        phi += PI;
    }
    Ok(FiberedPoint::new(wrap_angle(phi), theta, p.t))
}

/// Affine model coordinates `e^t (cos φ cos θ, sin φ cos θ, sin θ)`.
pub fn to_model(p: &FiberedPoint) -> ModelPoint {
    (p.sphere_vector() * p.t.exp()).into()
}

/// Inverse of [`to_model`]; the fibre coordinate is `ln ‖(x, y, z)‖`.
pub fn from_model(m: &ModelPoint) -> Result<FiberedPoint> {
    let v = m.as_vector();
    let r = v.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!(
            "model point {m:?} has no fibre coordinate"
        )));
    }
    Ok(FiberedPoint::from_sphere_vector(&(v / r), r.ln()))
}

/// Point reached after arc length `tau` along the geodesic with direction
/// `(u, v)` from the model point (1, 0, 0).
pub fn geodesic_point(g: &GeodesicParams) -> ModelPoint {
    let (sv, cv) = g.v.sin_cos();
    let (su, cu) = g.u.sin_cos();
    let scale = (g.tau * sv).exp();
    let (sa, ca) = (g.tau * cv).sin_cos();
    ModelPoint::new(scale * ca, scale * sa * cu, scale * sa * su)
}

/// Great-circle angle between the spherical parts of `a` and `b`, in [0, π].
pub fn spherical_angle(a: &FiberedPoint, b: &FiberedPoint) -> f64 {
    vector_angle(&a.sphere_vector(), &b.sphere_vector())
}

/// Angle between two unit vectors via `atan2(|a × b|, a · b)`.
pub(crate) fn vector_angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Geodesic distance `sqrt(σ² + Δt²)`.
pub fn distance(a: &FiberedPoint, b: &FiberedPoint) -> f64 {
    spherical_angle(a, b).hypot(a.t - b.t)
}

/// Rotation of the sphere taking the spherical part of `p` to (1, 0, 0).
pub(crate) fn frame_to_origin(p: &FiberedPoint) -> Matrix3<f64> {
    let (sp, cp) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    Matrix3::new(cp * ct, sp * ct, st, -sp, cp, 0.0, -cp * st, -sp * st, ct)
}

const SHOOT_MAX_ITER: usize = 100;
const SHOOT_TOL: f64 = 1e-15;

/// Distance obtained by solving the geodesic equations for the direction and
/// length of the geodesic joining `a` to `b`.
///
/// The isometry moving `a` to the model origin is applied first; the target
/// longitude `u` then follows from the model coordinates and a damped Newton
/// iteration solves the two remaining equations for `(v, tau)`. The shortest
/// solution whose spherical arc does not exceed π is returned.
pub fn distance_by_shooting(a: &FiberedPoint, b: &FiberedPoint) -> Result<f64> {
    Ok(shoot(a, b)?.tau)
}

/// Geodesic parameters from `a` to `b`, expressed in the frame where `a` is
/// the model origin.
pub fn shoot(a: &FiberedPoint, b: &FiberedPoint) -> Result<GeodesicParams> {
    let rel = frame_to_origin(a) * b.sphere_vector();
    let target = rel * (b.t - a.t).exp();
    let scale = target.norm();
    let w_target = target.y.hypot(target.z);
    let u = if w_target == 0.0 {
        0.0
    } else {
        target.z.atan2(target.y)
    };

    if (target - Vector3::x()).norm() <= 1e-15 {
        return Ok(GeodesicParams {
            u,
            v: 0.0,
            tau: 0.0,
        });
    }
    if w_target <= 1e-15 * scale && target.x > 0.0 {
        // pure fibre motion
        let lift = scale.ln();
        let v = if lift >= 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
        return Ok(GeodesicParams {
            u,
            v,
            tau: lift.abs(),
        });
    }

    let residual = |v: f64, tau: f64| -> (f64, f64) {
        let e = (tau * v.sin()).exp();
        let arc = tau * v.cos();
        (
            (e * arc.cos() - target.x) / scale,
            (e * arc.sin() - w_target) / scale,
        )
    };

    let mut best: Option<GeodesicParams> = None;
    let mut last_residual = f64::INFINITY;
    for &v0 in &[0.0, -0.7, 0.7, -1.3, 1.3] {
        for &tau0 in &[1.0, 2.5, 0.3, 4.0] {
            let (mut v, mut tau) = (v0, tau0);
            let (mut f0, mut f1) = residual(v, tau);
            let mut norm = f0.hypot(f1);
            for _ in 0..SHOOT_MAX_ITER {
                if norm <= SHOOT_TOL {
                    break;
                }
                let (sv, cv) = v.sin_cos();
                let e = (tau * sv).exp() / scale;
                let (sa, ca) = (tau * cv).sin_cos();
                // d/dtau and d/dv of (x, w)
                let j00 = e * (sv * ca - cv * sa);
                let j01 = e * tau * (cv * ca + sv * sa);
                let j10 = e * (sv * sa + cv * ca);
                let j11 = e * tau * (cv * sa - sv * ca);
                let det = j00 * j11 - j01 * j10;
                if det.abs() < 1e-300 {
                    break;
                }
                let dtau = (f0 * j11 - f1 * j01) / det;
                let dv = (j00 * f1 - j10 * f0) / det;
                let mut step = 1.0;
                loop {
                    let (nt, nv) = (tau - step * dtau, v - step * dv);
                    let (g0, g1) = residual(nv, nt);
                    let n = g0.hypot(g1);
                    if n < norm || step < 1e-6 {
                        tau = nt;
                        v = nv;
                        f0 = g0;
                        f1 = g1;
                        norm = n;
                        break;
                    }
                    step *= 0.5;
                }
            }
            last_residual = last_residual.min(norm);
            if norm > 1e-13 || tau < 0.0 {
                continue;
            }
            let v = wrap_angle(v);
            let arc = tau * v.cos();
            if v.abs() > FRAC_PI_2 || arc > PI + 1e-12 {
                continue;
            }
            if best.is_none_or(|b| tau < b.tau) {
                best = Some(GeodesicParams { u, v, tau });
            }
        }
    }

    let params = best.ok_or_else(|| Error::Numeric {
        routine: "distance_by_shooting",
        detail: format!(
            "no minimizing geodesic found from {a:?} to {b:?}; best scaled residual {last_residual:e}"
        ),
    })?;
    let hit = geodesic_point(&params).as_vector();
    let miss = (hit - target).norm() / scale;
    if miss > 1e-10 {
        return Err(Error::Numeric {
            routine: "distance_by_shooting",
            detail: format!("endpoint mismatch {miss:e} for {params:?}"),
        });
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, FRAC_PI_4};

    fn same_sphere_point(a: &FiberedPoint, b: &FiberedPoint) -> bool {
        (a.sphere_vector() - b.sphere_vector()).norm() < 1e-12
    }

    #[test]
    fn normalize_examples() {
        let p = normalize_point(FiberedPoint::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(p, FiberedPoint::new(0.0, 0.0, 0.0));

        let p = normalize_point(FiberedPoint::new(2.0 * PI, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(p.phi, 0.0, epsilon = 1e-15);
        assert_eq!(p.t, 1.0);

        let raw = FiberedPoint::new(0.0, 3.0 * FRAC_PI_4, 0.0);
        let p = normalize_point(raw).unwrap();
        assert_abs_diff_eq!(p.phi, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta, FRAC_PI_4, epsilon = 1e-15);
        assert!(same_sphere_point(&p, &raw));
    }

    #[test]
    fn normalize_rejects_nan() {
        assert!(matches!(
            normalize_point(FiberedPoint::new(f64::NAN, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(normalize_point(FiberedPoint::new(0.0, 0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn wrap_keeps_pi() {
        assert_eq!(wrap_angle(PI), PI);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-14);
    }

    #[test]
    fn model_examples() {
        let m = to_model(&FiberedPoint::new(0.0, 0.0, 0.0));
        assert_eq!(m, ModelPoint::new(1.0, 0.0, 0.0));

        let m = to_model(&FiberedPoint::new(FRAC_PI_2, 0.0, 0.0));
        assert_abs_diff_eq!(m.x, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(m.y, 1.0, epsilon = 1e-16);

        let m = to_model(&FiberedPoint::new(0.0, 0.0, 1.0));
        assert_abs_diff_eq!(m.x, E, epsilon = 1e-15);
        let g = geodesic_point(&GeodesicParams {
            u: 0.3,
            v: FRAC_PI_2,
            tau: 1.0,
        });
        assert_abs_diff_eq!(g.x, m.x, epsilon = 1e-15);
    }

    #[test]
    fn from_model_examples() {
        let p = from_model(&ModelPoint::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(p, FiberedPoint::new(0.0, 0.0, 0.0));

        let p = from_model(&ModelPoint::new(0.0, E, 0.0)).unwrap();
        assert_abs_diff_eq!(p.phi, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t, 1.0, epsilon = 1e-15);

        let p = from_model(&ModelPoint::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p, FiberedPoint::new(0.0, FRAC_PI_2, 0.0));

        assert!(from_model(&ModelPoint::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let g = geodesic_point(&GeodesicParams {
            u: 0.0,
            v: 0.0,
            tau: FRAC_PI_2,
        });
        assert_abs_diff_eq!(g.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.y, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.z, 0.0, epsilon = 1e-15);

        let p = from_model(&geodesic_point(&GeodesicParams {
            u: 0.0,
            v: FRAC_PI_4,
            tau: 1.0,
        }))
        .unwrap();
        let origin = FiberedPoint::new(0.0, 0.0, 0.0);
        assert_abs_diff_eq!(p.t, FRAC_PI_4.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            spherical_angle(&origin, &p),
            FRAC_PI_4.cos(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn spherical_angle_examples() {
        let a = FiberedPoint::new(0.4, -0.2, 3.0);
        assert_eq!(spherical_angle(&a, &a), 0.0);

        let n = FiberedPoint::new(0.0, FRAC_PI_2, 0.0);
        let s = FiberedPoint::new(0.0, -FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(spherical_angle(&n, &s), PI, epsilon = 1e-15);

        let theta = 0.55737781;
        let a = FiberedPoint::new(FRAC_PI_4, theta, 0.0);
        let b = FiberedPoint::new(3.0 * FRAC_PI_4, theta, 0.0);
        let expected = (theta.sin() * theta.sin()).acos();
        assert_abs_diff_eq!(spherical_angle(&a, &b), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(spherical_angle(&a, &b), 1.28720892, epsilon = 2e-8);
    }

    #[test]
    fn spherical_angle_resolves_near_antipodes() {
        let a = FiberedPoint::new(0.0, 0.0, 0.0);
        let b = FiberedPoint::new(PI - 1e-9, 0.0, 0.0);
        assert_abs_diff_eq!(spherical_angle(&a, &b), PI - 1e-9, epsilon = 1e-15);
    }

    #[test]
    fn distance_examples() {
        let a = FiberedPoint::new(1.0, 0.3, -2.0);
        assert_eq!(distance(&a, &a), 0.0);
        let b = FiberedPoint::new(1.0, 0.3, 0.5);
        assert_abs_diff_eq!(distance(&a, &b), 2.5, epsilon = 1e-15);

        let n = FiberedPoint::new(0.0, FRAC_PI_2, 0.0);
        let s = FiberedPoint::new(0.0, -FRAC_PI_2, PI / 3f64.sqrt());
        let d = distance(&n, &s);
        assert_abs_diff_eq!(d, 2.0 * PI / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(d, 3.62759873, epsilon = 1e-8);
    }

    #[test]
    fn shooting_examples() {
        let o = FiberedPoint::new(0.0, 0.0, 0.0);
        assert_eq!(distance_by_shooting(&o, &o).unwrap(), 0.0);
        let up = FiberedPoint::new(0.0, 0.0, 2.0);
        assert_abs_diff_eq!(distance_by_shooting(&o, &up).unwrap(), 2.0, epsilon = 1e-15);

        let n = FiberedPoint::new(0.0, FRAC_PI_2, 0.0);
        let s = FiberedPoint::new(0.0, -FRAC_PI_2, PI / 3f64.sqrt());
        assert_abs_diff_eq!(
            distance_by_shooting(&n, &s).unwrap(),
            distance(&n, &s),
            epsilon = 1e-9
        );

        let a = FiberedPoint::new(FRAC_PI_4, 0.55737781, 0.0);
        let b = FiberedPoint::new(3.0 * FRAC_PI_4, 0.55737781, 0.0);
        assert_abs_diff_eq!(
            distance_by_shooting(&a, &b).unwrap(),
            distance(&a, &b),
            epsilon = 1e-9
        );
    }

    #[test]
    fn frame_moves_point_to_origin() {
        for p in [
            FiberedPoint::new(0.3, 0.2, 0.0),
            FiberedPoint::new(-2.0, FRAC_PI_2, 0.0),
            FiberedPoint::new(PI, -1.0, 0.0),
        ] {
            let m = frame_to_origin(&p);
            assert!((m * p.sphere_vector() - Vector3::x()).norm() < 1e-15);
            assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-15);
            assert!((m.determinant() - 1.0).abs() < 1e-15);
        }
    }
}
