//! Ball packings generated by the space groups 4q.I.2.
//!
//! A packing is fixed by the kernel point `K` and the glide parameter `tau`
//! (the fibre lattice is generated by `2·tau`). The ball radius is half the
//! distance from `K` to its nearest image, and the density is the ball volume
//! over the volume of the Dirichlet–Voronoi cell of `K`,
//! `|Γ_K| · (π/q) · 2τ`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, normalize_point, vector_angle, FiberedPoint};
use crate::quadrature::QuadratureConfig;
use crate::search::{golden_max, nelder_mead_max, NelderMeadOptions};
use crate::symmetry::{orbit, stabilizer_order, OrbitPoint, SpaceGroup};
use crate::volume::{ball_volume, BallSpec};

/// Points closer than this are the same point.
const SAME_POINT: f64 = 1e-10;
/// Slack for a constraint to count as binding.
const BINDING_TOL: f64 = 1e-9;
/// Slack for a neighbour ball to count as touching.
const TOUCHING_TOL: f64 = 1e-7;
const TRIANGLE_SLACK: f64 = 1e-9;

/// A kernel point and glide parameter for the group 4q.I.2.
#[derive(Debug, Clone)]
pub struct PackingConfig {
    group: SpaceGroup,
    kernel: FiberedPoint,
    pub quadrature: QuadratureConfig,
}

impl PackingConfig {
    /// Validates that `kernel` lies in the closed fundamental triangle at
    /// fibre coordinate 0 and that `tau > 0`.
    pub fn new(q: u32, kernel: FiberedPoint, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!(
                "glide parameter must be > 0, got {tau}"
            )));
        }
        let kernel = normalize_point(kernel)?;
        check_in_triangle(q, &kernel)?;
        Ok(Self {
            group: SpaceGroup::family_4q_i_2(q, tau)?,
            kernel,
            quadrature: QuadratureConfig::default(),
        })
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureConfig) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn group(&self) -> &SpaceGroup {
        &self.group
    }

    pub fn kernel(&self) -> &FiberedPoint {
        &self.kernel
    }

    pub fn q(&self) -> u32 {
        self.group.point_group().q()
    }

    pub fn tau(&self) -> f64 {
        0.5 * self.group.fiber_period()
    }

    /// Fibre window that contains every possible touching neighbour.
    pub fn search_window(&self) -> f64 {
        2.0 * self.group.fiber_period() + 2.0 * PI
    }

    pub fn orbit(&self) -> Result<Vec<OrbitPoint>> {
        orbit(&self.group, &self.kernel, self.search_window())
    }
}

fn check_in_triangle(q: u32, k: &FiberedPoint) -> Result<()> {
    let wedge = PI / f64::from(q);
    let at_pole = (k.theta - FRAC_PI_2).abs() <= TRIANGLE_SLACK;
    let inside = k.theta >= -TRIANGLE_SLACK
        && (at_pole || (k.phi >= -TRIANGLE_SLACK && k.phi <= wedge + TRIANGLE_SLACK));
    if !inside || k.t.abs() > TRIANGLE_SLACK {
        return Err(Error::domain(format!(
            "kernel point {k:?} is not in the fundamental triangle (0 <= phi <= π/{q}, theta >= 0, t = 0)"
        )));
    }
    Ok(())
}

/// Radius, density and contact data of one packing.
#[derive(Debug, Clone, Serialize)]
pub struct PackingResult {
    pub q: u32,
    pub kernel: FiberedPoint,
    pub radius: f64,
    pub tau: f64,
    pub stabilizer_order: usize,
    pub ball_volume: f64,
    /// Volume of the Dirichlet–Voronoi cell of the kernel point.
    pub cell_volume: f64,
    pub density: f64,
    pub touching_number: usize,
    /// Group elements whose image of the kernel sits at distance `2R`.
    pub binding_constraints: Vec<String>,
}

struct Neighbours {
    /// (label, distance) of every orbit point other than `K` in the window.
    entries: Vec<(String, f64)>,
}

impl Neighbours {
    fn collect(c: &PackingConfig) -> Result<Self> {
        let k = c.kernel();
        let entries: Vec<(String, f64)> = c
            .orbit()?
            .iter()
            .filter_map(|p| {
                let d = distance(k, &p.point);
                (d > SAME_POINT).then(|| (p.label(), d))
            })
            .collect();
        if entries.is_empty() {
            return Err(Error::domain(
                "kernel orbit has no other points in the window",
            ));
        }
        Ok(Self { entries })
    }

    fn radius(&self) -> f64 {
        0.5 * self
            .entries
            .iter()
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min)
    }

    fn binding(&self, radius: f64) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| (0.5 * e.1 - radius).abs() <= BINDING_TOL)
            .map(|e| e.0.clone())
            .collect()
    }

    fn touching(&self, radius: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| (e.1 - 2.0 * radius).abs() <= TOUCHING_TOL)
            .count()
    }
}

/// Largest radius for which the balls around the orbit of `K` do not
/// overlap, with the labels of the images at distance `2R`.
pub fn max_radius(c: &PackingConfig) -> Result<(f64, Vec<String>)> {
    let n = Neighbours::collect(c)?;
    let r = n.radius();
    Ok((r, n.binding(r)))
}

/// Number of orbit balls tangent to the ball at `K`.
pub fn touching_number(c: &PackingConfig) -> Result<usize> {
    let n = Neighbours::collect(c)?;
    Ok(n.touching(n.radius()))
}

pub fn density(c: &PackingConfig) -> Result<PackingResult> {
    let n = Neighbours::collect(c)?;
    let radius = n.radius();
    let ball = BallSpec::new(radius)?;
    let stab = stabilizer_order(c.group(), c.kernel());
    let volume = ball_volume(ball, &c.quadrature)?;
    let cell = stab as f64 * c.group().point_group().fundamental_area() * c.group().fiber_period();
    Ok(PackingResult {
        q: c.q(),
        kernel: *c.kernel(),
        radius,
        tau: c.tau(),
        stabilizer_order: stab,
        ball_volume: volume,
        cell_volume: cell,
        density: volume / cell,
        touching_number: n.touching(radius),
        binding_constraints: n.binding(radius),
    })
}

/// One family of neighbours at distance `sqrt(σ² + (m·τ)²)`, where `σ` is a
/// spherical angle and `m` counts glide steps along the fibre.
#[derive(Debug, Clone, Serialize)]
pub struct FiberConstraint {
    pub sphere_angle: f64,
    pub glide_steps: u32,
    pub label: String,
}

impl FiberConstraint {
    fn distance(&self, tau: f64) -> f64 {
        self.sphere_angle.hypot(f64::from(self.glide_steps) * tau)
    }
}

/// The distances from a fixed kernel point to its images as functions of
/// the glide parameter.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    constraints: Vec<FiberConstraint>,
    stabilizer_order: usize,
    base_area: f64,
}

impl ConstraintSet {
    pub fn new(q: u32, kernel: &FiberedPoint) -> Result<Self> {
        let kernel = normalize_point(*kernel)?;
        check_in_triangle(q, &kernel)?;
        // unit lattice period: translations come out in lattice units
        let g = SpaceGroup::family_4q_i_2(q, 0.5)?;
        let kv = kernel.sphere_vector();
        let mut constraints: Vec<FiberConstraint> = Vec::new();
        let mut stab = 0;
        for (i, e) in g.point_group().elements().iter().enumerate() {
            let image = e.matrix.transpose() * kv;
            let mut sigma = vector_angle(&kv, &image);
            if sigma <= SAME_POINT {
                sigma = 0.0;
            }
            let frac = g.element_translation(i).reduced();
            // the two nearest fibre offsets on either side, in glide steps
            let halves = ((frac.to_f64() * 2.0).round() as i64).rem_euclid(2);
            for k in [-1i64, 0, 1] {
                let steps = halves + 2 * k;
                if steps == 0 && sigma == 0.0 {
                    stab += 1;
                    continue;
                }
                let m = steps.unsigned_abs() as u32;
                if constraints
                    .iter()
                    .any(|c| c.glide_steps == m && (c.sphere_angle - sigma).abs() <= SAME_POINT)
                {
                    continue;
                }
                let label = match steps {
                    0 => e.word.to_string(),
                    1 => format!("{}+τ", e.word),
                    -1 => format!("{}-τ", e.word),
                    s if s > 0 => format!("{}+{s}τ", e.word),
                    s => format!("{}-{}τ", e.word, -s),
                };
                constraints.push(FiberConstraint {
                    sphere_angle: sigma,
                    glide_steps: m,
                    label,
                });
            }
        }
        Ok(Self {
            constraints,
            stabilizer_order: stab,
            base_area: g.point_group().fundamental_area(),
        })
    }

    pub fn constraints(&self) -> &[FiberConstraint] {
        &self.constraints
    }

    pub fn stabilizer_order(&self) -> usize {
        self.stabilizer_order
    }

    pub fn radius(&self, tau: f64) -> f64 {
        0.5 * self
            .constraints
            .iter()
            .map(|c| c.distance(tau))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn binding(&self, tau: f64) -> Vec<&FiberConstraint> {
        let r = self.radius(tau);
        self.constraints
            .iter()
            .filter(|c| (0.5 * c.distance(tau) - r).abs() <= BINDING_TOL)
            .collect()
    }

    pub fn cell_volume(&self, tau: f64) -> f64 {
        self.stabilizer_order as f64 * self.base_area * 2.0 * tau
    }

    /// Density at `tau`, or `None` when the ball would not be embedded.
    pub fn density(&self, tau: f64, q: &QuadratureConfig) -> Option<f64> {
        let ball = BallSpec::new(self.radius(tau)).ok()?;
        let v = ball_volume(ball, q).ok()?;
        Some(v / self.cell_volume(tau))
    }

    /// Largest useful glide parameter and whether it is the open limit where
    /// the radius reaches π.
    ///
    /// With an image at fibre offset zero the radius is capped by
    /// `σ_min / 2`; past the glide value where every other family clears that
    /// cap the radius is constant and the density only falls. Without such an
    /// image the radius grows until the ball stops being embedded.
    pub fn tau_limit(&self) -> (f64, bool) {
        let cap = self
            .constraints
            .iter()
            .filter(|c| c.glide_steps == 0)
            .map(|c| c.sphere_angle)
            .fold(f64::INFINITY, f64::min);
        if cap.is_finite() {
            let tau = self
                .constraints
                .iter()
                .filter(|c| c.glide_steps > 0)
                .map(|c| {
                    (cap * cap - c.sphere_angle.powi(2)).max(0.0).sqrt() / f64::from(c.glide_steps)
                })
                .fold(0.0, f64::max);
            (tau, false)
        } else {
            let tau = self
                .constraints
                .iter()
                .map(|c| {
                    (4.0 * PI * PI - c.sphere_angle.powi(2)).max(0.0).sqrt()
                        / f64::from(c.glide_steps)
                })
                .fold(0.0, f64::max);
            (tau, true)
        }
    }

    /// Glide values in `(0, upper)` where the nearest-image family changes.
    pub fn breakpoints(&self, upper: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (i, a) in self.constraints.iter().enumerate() {
            for b in &self.constraints[i + 1..] {
                if a.glide_steps == b.glide_steps {
                    continue;
                }
                let num = b.sphere_angle.powi(2) - a.sphere_angle.powi(2);
                let den = f64::from(a.glide_steps).powi(2) - f64::from(b.glide_steps).powi(2);
                let t2 = num / den;
                if !(t2 > 0.0) {
                    continue;
                }
                let tau = t2.sqrt();
                if tau >= upper {
                    continue;
                }
                let r2 = 2.0 * self.radius(tau);
                if (a.distance(tau) - r2).abs() <= 1e-12 * (1.0 + r2) {
                    out.push(tau);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        out
    }
}

/// Density as a function of the glide parameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauSample {
    pub tau: f64,
    pub radius: f64,
    pub density: f64,
}

/// Outcome of the search over the glide parameter at a fixed kernel point.
#[derive(Debug, Clone, Serialize)]
pub struct TauSearch {
    pub best: TauSample,
    /// Attained local maxima, in increasing `tau`.
    pub local_maxima: Vec<TauSample>,
    /// Supremum approached as the radius tends to π, when the radius is not
    /// capped by a spherical image.
    pub embedding_limit: Option<TauSample>,
    /// `best` is the embedding-limit supremum rather than an attained
    /// interior maximum.
    pub at_embedding_limit: bool,
}

const BRANCH_SCAN: usize = 12;

/// Searches the glide parameter at a fixed kernel point.
///
/// The glide axis is cut at the breakpoints where the nearest-image family
/// changes; on each branch the density is smooth and is scanned and refined
/// by golden-section search. Breakpoints are evaluated exactly since the
/// density typically peaks at one.
pub fn search_tau(cs: &ConstraintSet, q: &QuadratureConfig) -> Result<TauSearch> {
    let (upper, open) = cs.tau_limit();
    if !(upper > 0.0) {
        return Err(Error::Numeric {
            routine: "search_tau",
            detail: "glide range is empty".into(),
        });
    }
    let sample = |tau: f64| -> TauSample {
        TauSample {
            tau,
            radius: cs.radius(tau),
            density: cs.density(tau, q).unwrap_or(0.0),
        }
    };

    let mut knots = vec![0.0];
    knots.extend(cs.breakpoints(upper));
    knots.push(upper);

    let mut candidates: Vec<TauSample> = Vec::new();
    for (j, w) in knots.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let last = j + 2 == knots.len();
        let hi_open = last && open;
        if !(hi_open) {
            candidates.push(sample(hi));
        }
        let grid: Vec<TauSample> = (1..=BRANCH_SCAN)
            .map(|i| sample(lo + (hi - lo) * i as f64 / (BRANCH_SCAN + 1) as f64))
            .collect();
        let (ib, _) = grid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.density.total_cmp(&b.1.density))
            .expect("scan is non-empty");
        let a = if ib == 0 { lo } else { grid[ib - 1].tau };
        let b = if ib + 1 == grid.len() {
            hi
        } else {
            grid[ib + 1].tau
        };
        let b = if hi_open {
            b.min(upper * (1.0 - 1e-10))
        } else {
            b
        };
        let (tau, _) = golden_max(
            |t| cs.density(t, q).unwrap_or(0.0),
            a,
            b,
            1e-13 * (1.0 + hi),
        );
        candidates.push(sample(tau));
    }

    let embedding_limit = open.then(|| sample(upper * (1.0 - 1e-10)));

    let value = |t: f64| cs.density(t, q).unwrap_or(0.0);
    let mut local_maxima: Vec<TauSample> = Vec::new();
    for c in &candidates {
        if c.density <= 0.0 {
            continue;
        }
        let h = 1e-7 * c.tau;
        if open && c.tau + h >= upper {
            // running into the open end is the embedding limit, not a peak
            continue;
        }
        if value(c.tau - h) > c.density || value(c.tau + h) > c.density {
            continue;
        }
        // candidates this close belong to one peak; keep the denser
        match local_maxima
            .iter_mut()
            .find(|m| (m.tau - c.tau).abs() <= 1e-6 * (1.0 + c.tau))
        {
            Some(m) if c.density > m.density => *m = *c,
            Some(_) => {}
            None => local_maxima.push(*c),
        }
    }
    local_maxima.sort_by(|a, b| a.tau.total_cmp(&b.tau));

    let interior_best = local_maxima
        .iter()
        .copied()
        .max_by(|a, b| a.density.total_cmp(&b.density));
    let (best, at_embedding_limit) = match (interior_best, embedding_limit) {
        (Some(m), Some(lim)) if lim.density > m.density => (lim, true),
        (Some(m), _) => (m, false),
        (None, Some(lim)) => (lim, true),
        (None, None) => {
            return Err(Error::Numeric {
                routine: "search_tau",
                detail: "no local maximum found on a closed glide range".into(),
            })
        }
    };
    Ok(TauSearch {
        best,
        local_maxima,
        embedding_limit,
        at_embedding_limit,
    })
}

/// Glide search at `kernel` with the full packing evaluated at the optimum.
#[derive(Debug, Clone, Serialize)]
pub struct TauOptimum {
    pub result: PackingResult,
    pub search: TauSearch,
}

pub fn optimize_tau(q: u32, kernel: &FiberedPoint, quad: &QuadratureConfig) -> Result<TauOptimum> {
    let cs = ConstraintSet::new(q, kernel)?;
    let search = search_tau(&cs, quad)?;
    let cfg = PackingConfig::new(q, *kernel, search.best.tau)?.with_quadrature(*quad);
    Ok(TauOptimum {
        result: density(&cfg)?,
        search,
    })
}

/// Tuning for the kernel-point searches.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Grid resolution per axis for the coarse scan.
    pub grid: usize,
    pub quadrature: QuadratureConfig,
    /// Simplex restarts after the first descent.
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            quadrature: QuadratureConfig::default(),
            restarts: 3,
        }
    }
}

fn best_density_at(q: u32, k: &FiberedPoint, quad: &QuadratureConfig) -> f64 {
    ConstraintSet::new(q, k)
        .and_then(|cs| search_tau(&cs, quad))
        .map(|s| s.best.density)
        .unwrap_or(0.0)
}

#[cfg(feature = "parallel")]
fn map_points<F: Fn(&FiberedPoint) -> f64 + Sync + Send>(pts: &[FiberedPoint], f: F) -> Vec<f64> {
    use rayon::prelude::*;
    pts.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F: Fn(&FiberedPoint) -> f64>(pts: &[FiberedPoint], f: F) -> Vec<f64> {
    pts.iter().map(f).collect()
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        )
        .0
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplyTransitiveReport {
    pub result: PackingResult,
    pub search: TauSearch,
    /// Best cell of the coarse grid: (phi, theta, density).
    pub grid_best: (f64, f64, f64),
}

/// Densest packing with trivial stabilizer: the kernel point ranges over the
/// interior of the fundamental triangle together with the side on the
/// glide mirror, and the glide parameter is optimized at every point.
pub fn optimize_simply_transitive(q: u32, opts: &SearchOptions) -> Result<SimplyTransitiveReport> {
    if q < 2 {
        return Err(Error::domain(format!("q must be >= 2, got {q}")));
    }
    let wedge = PI / f64::from(q);
    let quad = opts.quadrature;
    let n = opts.grid.max(2);
    // unit-square coordinates (s, u) ↦ (phi, theta)
    let to_point = |s: f64, u: f64| -> FiberedPoint {
        let s = s.clamp(1e-9, 1.0 - 1e-9);
        let u = u.clamp(0.0, 1.0 - 1e-9);
        FiberedPoint::new(s * wedge, u * FRAC_PI_2, 0.0)
    };
    let objective = |s: f64, u: f64| -> f64 {
        let k = to_point(s, u);
        let cs = match ConstraintSet::new(q, &k) {
            Ok(cs) if cs.stabilizer_order() == 1 => cs,
            _ => return 0.0,
        };
        search_tau(&cs, &quad)
            .map(|r| r.best.density)
            .unwrap_or(0.0)
    };

    let cells: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64))
        })
        .collect();
    let pts: Vec<FiberedPoint> = cells.iter().map(|&(s, u)| to_point(s, u)).collect();
    let values = map_points(&pts, |k| best_density_at(q, k, &quad));
    let ib = argmax(&values);
    let grid_best = (pts[ib].phi, pts[ib].theta, values[ib]);

    let mut x = vec![cells[ib].0, cells[ib].1];
    let mut step = 1.0 / n as f64;
    for _ in 0..=opts.restarts {
        let r = nelder_mead_max(
            |v| objective(v[0], v[1]),
            &x,
            &NelderMeadOptions {
                initial_step: step,
                ..Default::default()
            },
        );
        x = r.x;
        step *= 1e-2;
    }
    let kernel = to_point(x[0], x[1]);
    let opt = optimize_tau(q, &kernel, &quad)?;
    Ok(SimplyTransitiveReport {
        result: opt.result,
        search: opt.search,
        grid_best,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumOptimum {
    /// `edge-A2A3`, `vertex-A3`, ...
    pub name: String,
    pub result: PackingResult,
    pub search: TauSearch,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplyTransitiveReport {
    pub strata: Vec<StratumOptimum>,
    /// Index into `strata` of the densest stratum optimum.
    pub best: usize,
}

impl MultiplyTransitiveReport {
    pub fn stratum(&self, name: &str) -> Option<&StratumOptimum> {
        self.strata.iter().find(|s| s.name == name)
    }

    pub fn best(&self) -> &StratumOptimum {
        &self.strata[self.best]
    }
}

/// Point at fraction `s` of the great-circle arc from `a` to `b`.
fn arc_point(a: &FiberedPoint, b: &FiberedPoint, s: f64) -> FiberedPoint {
    let (va, vb) = (a.sphere_vector(), b.sphere_vector());
    let omega = vector_angle(&va, &vb);
    let v = if omega == 0.0 {
        va
    } else {
        (va * ((1.0 - s) * omega).sin() + vb * (s * omega).sin()) / omega.sin()
    };
    FiberedPoint::from_sphere_vector(&v, 0.0)
}

/// Densest packings with nontrivial stabilizer, one per stratum: each
/// triangle side lying on a fibre-preserving mirror (searched along the side,
/// including any endpoint with the same stabilizer) and each vertex with
/// nontrivial stabilizer (glide search only).
pub fn optimize_multiply_transitive(
    q: u32,
    opts: &SearchOptions,
) -> Result<MultiplyTransitiveReport> {
    let group = SpaceGroup::family_4q_i_2(q, 0.5)?;
    let verts = group.point_group().fundamental_triangle();
    let names = ["A1", "A2", "A3"];
    let quad = opts.quadrature;
    let stab = |p: &FiberedPoint| stabilizer_order(&group, p);

    let mut strata = Vec::new();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let (a, b) = (verts[i], verts[j]);
        let edge_stab = stab(&arc_point(&a, &b, 0.5));
        if edge_stab <= 1 {
            continue;
        }
        let lo = if stab(&a) == edge_stab { 0.0 } else { 1e-9 };
        let hi = if stab(&b) == edge_stab {
            1.0
        } else {
            1.0 - 1e-9
        };
        let n = opts.grid.max(2);
        let params: Vec<f64> = (0..=n)
            .map(|k| lo + (hi - lo) * k as f64 / n as f64)
            .collect();
        let pts: Vec<FiberedPoint> = params.iter().map(|&s| arc_point(&a, &b, s)).collect();
        let values = map_points(&pts, |k| best_density_at(q, k, &quad));
        let ib = argmax(&values);
        let bracket_lo = params[ib.saturating_sub(1)];
        let bracket_hi = params[(ib + 1).min(n)];
        let (s_ref, v_ref) = golden_max(
            |s| best_density_at(q, &arc_point(&a, &b, s), &quad),
            bracket_lo,
            bracket_hi,
            1e-12,
        );
        let s_best = if v_ref > values[ib] {
            s_ref
        } else {
            params[ib]
        };
        let opt = optimize_tau(q, &arc_point(&a, &b, s_best), &quad)?;
        strata.push(StratumOptimum {
            name: format!("edge-{}{}", names[i], names[j]),
            result: opt.result,
            search: opt.search,
        });
    }
    for (v, name) in verts.iter().zip(names) {
        if stab(v) <= 1 {
            continue;
        }
        let opt = optimize_tau(q, v, &quad)?;
        strata.push(StratumOptimum {
            name: format!("vertex-{name}"),
            result: opt.result,
            search: opt.search,
        });
    }
    let best = argmax(&strata.iter().map(|s| s.result.density).collect::<Vec<_>>());
    Ok(MultiplyTransitiveReport { strata, best })
}
