//! Globally adaptive 7-point Gauss / 15-point Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision limit for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 30,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_depth < 1 {
            return Err(Error::domain(format!(
                "quadrature config needs abs_tol > 0, rel_tol > 0, max_depth >= 1; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Same config with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_depth: self.max_depth,
        }
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// One G7K15 panel: (Kronrod value, |Kronrod − Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
    // insertion order keeps the heap deterministic on ties
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// until the summed error meets `max(abs_tol, rel_tol·|I|)` or no panel can
/// be split further.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            abs_error: 0.0,
        };
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Panel {
        a,
        b,
        value,
        error,
        depth: 0,
        seq,
    });
    let mut total = value;
    let mut total_err = error;
    // panels that reached max_depth
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= cfg.max_depth {
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        for (lo, hi, v, e) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            seq += 1;
            heap.push(Panel {
                a: lo,
                b: hi,
                value: v,
                error: e,
                depth: worst.depth + 1,
                seq,
            });
        }
    }

    // resum in a fixed order to avoid drift from the running updates
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let abs_error = panels.iter().map(|p| p.error).sum::<f64>() + frozen_err;
    Estimate { value, abs_error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_exactly() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x| x.powi(5) - 2.0 * x * x + 1.0, -1.0, 2.0, &cfg);
        let exact = (64.0 - 1.0) / 6.0 - 2.0 * (8.0 + 1.0) / 3.0 + 3.0;
        assert_abs_diff_eq!(est.value, exact, epsilon = 1e-13);
    }

    #[test]
    fn integrates_trig() {
        let cfg = QuadratureConfig::default();
        let est = integrate(f64::sin, 0.0, PI, &cfg);
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-13);
        assert!(est.abs_error <= 1e-10);
    }

    #[test]
    fn subdivides_hard_integrands() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &cfg);
        assert_abs_diff_eq!(est.value, 2.0 / 3.0, epsilon = 1e-11);
        let est = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg);
        assert_abs_diff_eq!(est.value, 2.0 * 100.0 * (100.0f64).atan(), epsilon = 1e-8);
    }

    #[test]
    fn empty_interval() {
        let est = integrate(|_| 1.0, 3.0, 3.0, &QuadratureConfig::default());
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn depth_limit_still_returns() {
        let cfg = QuadratureConfig::new(1e-30, 1e-30, 3).unwrap();
        let est = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &cfg);
        assert!((est.value - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(0.0, 1e-3, 5).is_err());
        assert!(QuadratureConfig::new(1e-3, -1.0, 5).is_err());
        assert!(QuadratureConfig::new(1e-3, 1e-3, 0).is_err());
        assert!(QuadratureConfig::new(1e-3, 1e-3, 1).is_ok());
    }
}
