//! Volumes of geodesic balls and of S²×ℝ prisms.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};

/// Radius of a geodesic ball. Only `0 <= rho < π` is admitted: larger balls
/// wrap around the sphere factor and stop being embedded.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BallSpec(f64);

impl BallSpec {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() || rho < 0.0 {
            return Err(Error::domain(format!(
                "ball radius must be >= 0, got {rho}"
            )));
        }
        if rho >= PI {
            return Err(Error::NotEmbedded { rho });
        }
        Ok(Self(rho))
    }

    pub fn rho(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BallSpec {
    type Error = Error;
    fn try_from(rho: f64) -> Result<Self> {
        Self::new(rho)
    }
}

impl From<BallSpec> for f64 {
    fn from(b: BallSpec) -> f64 {
        b.0
    }
}

/// Volume of the geodesic ball as the integral over geodesic polar
/// coordinates, `2π ∫₀^ρ ∫_{−π/2}^{π/2} τ sin(τ cos v) dv dτ`.
///
/// For `ρ < π` the integrand is non-negative, so the absolute value that
/// appears in the general form is dropped.
pub fn ball_volume(b: BallSpec, q: &QuadratureConfig) -> Result<f64> {
    Ok(ball_volume_estimate(b, q)?.value)
}

pub fn ball_volume_estimate(b: BallSpec, q: &QuadratureConfig) -> Result<Estimate> {
    q.validate()?;
    let rho = b.rho();
    if rho == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let inner_cfg = q.scaled(1e-2);
    // the v-integrand is even, so integrate over [0, π/2] and double
    let radial = |tau: f64| {
        let slice = integrate(|v: f64| (tau * v.cos()).sin(), 0.0, FRAC_PI_2, &inner_cfg);
        2.0 * tau * slice.value
    };
    let est = integrate(radial, 0.0, rho, q);
    Ok(Estimate {
        value: 2.0 * PI * est.value,
        abs_error: 2.0 * PI * est.abs_error,
    })
}

/// Volume of the geodesic ball by slicing along the fibre: the slice at
/// height `t` is a spherical cap of angular radius `sqrt(ρ² − t²)`.
pub fn ball_volume_slab(b: BallSpec, q: &QuadratureConfig) -> Result<f64> {
    Ok(ball_volume_slab_estimate(b, q)?.value)
}

pub fn ball_volume_slab_estimate(b: BallSpec, q: &QuadratureConfig) -> Result<Estimate> {
    q.validate()?;
    let rho = b.rho();
    if rho == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let cap = |t: f64| {
        let s = 0.5 * (rho * rho - t * t).max(0.0).sqrt();
        // 2π(1 − cos σ) = 4π sin²(σ/2)
        4.0 * PI * s.sin().powi(2)
    };
    let est = integrate(cap, 0.0, rho, q);
    Ok(Estimate {
        value: 2.0 * est.value,
        abs_error: 2.0 * est.abs_error,
    })
}

/// Area of a spherical triangle on the unit sphere by angular excess.
pub fn spherical_triangle_area(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    for a in [alpha, beta, gamma] {
        if !(a > 0.0 && a < PI) {
            return Err(Error::domain(format!(
                "triangle angle {a} is outside (0, π)"
            )));
        }
    }
    let excess = alpha + beta + gamma - PI;
    if !(excess > 0.0) {
        return Err(Error::domain(format!(
            "angles ({alpha}, {beta}, {gamma}) have no positive spherical excess"
        )));
    }
    Ok(excess)
}

/// Area of the spherical digon (lune) with opening angle `alpha`.
pub fn spherical_digon_area(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(Error::domain(format!(
            "digon angle {alpha} is outside (0, π]"
        )));
    }
    Ok(2.0 * alpha)
}

/// Volume of a prism over a spherical base of the given area.
pub fn prism_volume(base_area: f64, height: f64) -> Result<f64> {
    if !(base_area > 0.0) || !(height > 0.0) || !base_area.is_finite() || !height.is_finite() {
        return Err(Error::domain(format!(
            "prism needs positive finite base area and height, got ({base_area}, {height})"
        )));
    }
    Ok(base_area * height)
}
