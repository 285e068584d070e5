//! Triangulated geodesic spheres in the affine model, written as plain-text
//! polygon meshes (`v x y z` and `f i j k` records, 1-based indices).

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{
    frame_to_origin, from_model, geodesic_point, to_model, FiberedPoint, GeodesicParams, ModelPoint,
};
use crate::packing::PackingConfig;
use crate::symmetry::Isometry;
use crate::volume::BallSpec;

#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub name: String,
    pub vertices: Vec<ModelPoint>,
    /// Zero-based vertex indices of each triangle.
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Writes the mesh as an object group. `offset` is the number of vertices
    /// already written to the same stream.
    pub fn write_to<W: Write>(&self, w: &mut W, offset: usize) -> io::Result<()> {
        if !self.name.is_empty() {
            writeln!(w, "o {}", self.name)?;
        }
        for v in &self.vertices {
            writeln!(w, "v {:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
        }
        for f in &self.faces {
            writeln!(
                w,
                "f {} {} {}",
                f[0] + offset + 1,
                f[1] + offset + 1,
                f[2] + offset + 1
            )?;
        }
        Ok(())
    }
}

/// Writes several meshes into one stream with consistent vertex numbering.
pub fn write_meshes<W: Write>(meshes: &[Mesh], w: &mut W) -> io::Result<()> {
    let mut offset = 0;
    for m in meshes {
        m.write_to(w, offset)?;
        offset += m.vertices.len();
    }
    Ok(())
}

/// Boundary of the geodesic ball of radius `rho` about `center`, optionally
/// moved by a group element.
///
/// The sphere is traced by the geodesics leaving the base point `(1, 0, 0)`
/// over a `(u, v)` grid with `2·resolution` longitudes and `resolution`
/// altitude bands, then carried to `center` by the rotation and fibre shift
/// that take the base point there.
pub fn geodesic_sphere(
    center: &FiberedPoint,
    rho: BallSpec,
    resolution: usize,
    transform: Option<&Isometry>,
) -> Result<Mesh> {
    if resolution < 2 {
        return Err(Error::domain(format!(
            "mesh resolution must be >= 2, got {resolution}"
        )));
    }
    let n_u = 2 * resolution;
    let n_v = resolution;
    let rotation = frame_to_origin(center).transpose();
    let scale = center.t.exp();
    let place = |u: f64, v: f64| -> Result<ModelPoint> {
        let x = geodesic_point(&GeodesicParams {
            u,
            v,
            tau: rho.rho(),
        })
        .as_vector();
        let m = ModelPoint::from(rotation * x * scale);
        match transform {
            None => Ok(m),
            Some(g) => Ok(to_model(&g.apply(&from_model(&m)?))),
        }
    };

    let mut vertices = vec![place(0.0, -FRAC_PI_2)?];
    for j in 1..n_v {
        let v = -FRAC_PI_2 + PI * j as f64 / n_v as f64;
        for i in 0..n_u {
            vertices.push(place(2.0 * PI * i as f64 / n_u as f64, v)?);
        }
    }
    vertices.push(place(0.0, FRAC_PI_2)?);

    let ring = |j: usize, i: usize| 1 + (j - 1) * n_u + i % n_u;
    let top = vertices.len() - 1;
    let mut faces = Vec::with_capacity(2 * n_u * n_v);
    for i in 0..n_u {
        faces.push([0, ring(1, i + 1), ring(1, i)]);
    }
    for j in 1..n_v - 1 {
        for i in 0..n_u {
            faces.push([ring(j, i), ring(j, i + 1), ring(j + 1, i + 1)]);
            faces.push([ring(j, i), ring(j + 1, i + 1), ring(j + 1, i)]);
        }
    }
    for i in 0..n_u {
        faces.push([top, ring(n_v - 1, i), ring(n_v - 1, i + 1)]);
    }
    Ok(Mesh {
        name: String::new(),
        vertices,
        faces,
    })
}

/// One sphere of radius `rho` per orbit point of the packing's kernel whose
/// fibre coordinate lies in `[−window, window]`, named by the group element.
pub fn orbit_spheres(
    config: &PackingConfig,
    rho: BallSpec,
    resolution: usize,
    window: f64,
) -> Result<Vec<Mesh>> {
    let pts = crate::symmetry::orbit(config.group(), config.kernel(), window)?;
    pts.iter()
        .map(|p| {
            let mut m = geodesic_sphere(config.kernel(), rho, resolution, Some(&p.isometry))?;
            m.name = p.label();
            Ok(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vertices_lie_at_radius() {
        let c = FiberedPoint::new(0.4, -0.3, 0.7);
        let rho = 1.1;
        let m = geodesic_sphere(&c, BallSpec::new(rho).unwrap(), 12, None).unwrap();
        assert_eq!(m.vertices.len(), 2 + 24 * 11);
        assert_eq!(m.faces.len(), 2 * 24 * 11);
        for v in &m.vertices {
            let p = from_model(v).unwrap();
            assert_abs_diff_eq!(distance(&p, &c), rho, epsilon = 1e-12);
            let r = v.norm().ln();
            assert!(r >= c.t - rho - 1e-12 && r <= c.t + rho + 1e-12);
        }
    }

    #[test]
    fn transformed_sphere_is_centered_on_image() {
        let c = FiberedPoint::new(0.4, 0.3, 0.0);
        let g = Isometry::new(
            nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0)),
            crate::symmetry::FiberDirection::Preserve,
            0.8,
        )
        .unwrap();
        let image = g.apply(&c);
        let m = geodesic_sphere(&c, BallSpec::new(0.5).unwrap(), 6, Some(&g)).unwrap();
        for v in &m.vertices {
            assert_abs_diff_eq!(
                distance(&from_model(v).unwrap(), &image),
                0.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn faces_index_valid_vertices() {
        let m = geodesic_sphere(
            &FiberedPoint::new(0.0, 0.0, 0.0),
            BallSpec::new(0.3).unwrap(),
            3,
            None,
        )
        .unwrap();
        let mut used = vec![false; m.vertices.len()];
        for f in &m.faces {
            assert!(f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
            for &i in f {
                used[i] = true;
            }
        }
        assert!(used.iter().all(|&u| u));
    }

    #[test]
    fn zero_radius_collapses_to_center() {
        let c = FiberedPoint::new(1.0, 0.2, -0.4);
        let m = geodesic_sphere(&c, BallSpec::new(0.0).unwrap(), 4, None).unwrap();
        let target = to_model(&c);
        for v in &m.vertices {
            assert_abs_diff_eq!(
                (v.as_vector() - target.as_vector()).norm(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn rejects_coarse_resolution() {
        let c = FiberedPoint::new(0.0, 0.0, 0.0);
        assert!(geodesic_sphere(&c, BallSpec::new(0.3).unwrap(), 1, None).is_err());
    }

    #[test]
    fn written_records() {
        let c = FiberedPoint::new(0.0, 0.0, 0.0);
        let mut a = geodesic_sphere(&c, BallSpec::new(0.3).unwrap(), 2, None).unwrap();
        a.name = "first".into();
        let b = a.clone();
        let mut out = Vec::new();
        write_meshes(&[a, b], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let vs = text.lines().filter(|l| l.starts_with("v ")).count();
        let max_index = text
            .lines()
            .filter(|l| l.starts_with("f "))
            .flat_map(|l| {
                l[2..]
                    .split(' ')
                    .map(|s| s.parse::<usize>().unwrap())
                    .collect::<Vec<_>>()
            })
            .max()
            .unwrap();
        assert_eq!(vs, 2 * 6);
        assert_eq!(max_index, vs);
        assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), 2);
    }

    #[test]
    fn vertex_packing_orbit_has_five_spheres() {
        let tau = PI / 3f64.sqrt();
        let cfg = PackingConfig::new(2, FiberedPoint::new(0.0, FRAC_PI_2, 0.0), tau).unwrap();
        let meshes = orbit_spheres(&cfg, BallSpec::new(tau).unwrap(), 8, 2.0 * tau).unwrap();
        assert_eq!(meshes.len(), 5);
        let names: Vec<&str> = meshes.iter().map(|m| m.name.as_str()).collect();
        for label in ["e", "g3+τ", "g3-τ", "e+2τ", "e-2τ"] {
            assert!(names.contains(&label), "{label} missing from {names:?}");
        }
    }
}
