//! Analytic signed distance fields, negative inside.

use std::f64::consts::PI;

use super::{SignalDataset, SignalKind};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Matrix;

#[inline]
fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

#[inline]
fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn sdf_circle(p: [f64; 2], radius: f64) -> f64 {
    norm2(p) - radius
}

pub fn sdf_sphere(p: [f64; 3], radius: f64) -> f64 {
    norm3(p) - radius
}

/// Axis-aligned box centered at the origin.
pub fn sdf_box(p: [f64; 3], half: [f64; 3]) -> f64 {
    let q = [p[0].abs() - half[0], p[1].abs() - half[1], p[2].abs() - half[2]];
    let outside = norm3([q[0].max(0.0), q[1].max(0.0), q[2].max(0.0)]);
    outside + q[0].max(q[1]).max(q[2]).min(0.0)
}

/// Torus around the y axis.
pub fn sdf_torus(p: [f64; 3], major: f64, minor: f64) -> f64 {
    let ring = p[0].hypot(p[2]) - major;
    ring.hypot(p[1]) - minor
}

/// Regular star polygon centered at the origin with its first tip pointing up.
#[derive(Clone, Debug, PartialEq)]
pub struct StarShape {
    points: usize,
    outer_radius: f64,
    inner_radius: f64,
    vertices: Vec<[f64; 2]>,
}

impl Default for StarShape {
    fn default() -> Self {
        StarShape::new(5, 0.8, 0.4).expect("default star is valid")
    }
}

impl StarShape {
    pub fn new(points: usize, outer_radius: f64, inner_radius: f64) -> Result<Self> {
        if points < 3 {
            return Err(Error::arg(format!("a star needs at least 3 points, got {points}")));
        }
        if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
            return Err(Error::arg(format!(
                "star radii must satisfy 0 < inner < outer, got inner {inner_radius}, outer {outer_radius}"
            )));
        }
        let vertices = (0..2 * points)
            .map(|k| {
                let r = if k % 2 == 0 { outer_radius } else { inner_radius };
                let a = PI / 2.0 + k as f64 * PI / points as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Ok(StarShape {
            points,
            outer_radius,
            inner_radius,
            vertices,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Vertices alternating outer, inner, counter-clockwise.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Even-odd ray-crossing test.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let v = &self.vertices;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[j]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Unsigned distance to the boundary.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let v = &self.vertices;
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            best = best.min(segment_distance(p, v[i], v[(i + 1) % v.len()]));
        }
        best
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
    norm2([ap[0] - t * ab[0], ap[1] - t * ab[1]])
}

pub fn sdf_star(p: [f64; 2], star: &StarShape) -> f64 {
    let d = star.boundary_distance(p);
    if star.contains(p) {
        -d
    } else {
        d
    }
}

/// 2D shapes with exact signed distance.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape2 {
    Circle { radius: f64 },
    Star(StarShape),
}

impl Shape2 {
    pub fn sdf(&self, p: [f64; 2]) -> f64 {
        match self {
            Shape2::Circle { radius } => sdf_circle(p, *radius),
            Shape2::Star(s) => sdf_star(p, s),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Shape2::Circle { radius } => norm2(p) < *radius,
            Shape2::Star(s) => s.contains(p),
        }
    }
}

/// Exact SDF of `shape` at the vertices `−1 + 2i/(resolution − 1)` of a
/// `resolution²` grid, x fastest. This is the same lattice the occupancy
/// metrics use, so an IoU at the training resolution scores the samples.
pub fn star_grid_dataset(shape: &Shape2, resolution: usize) -> Result<SignalDataset> {
    if resolution < 2 {
        return Err(Error::arg("grid resolution must be at least 2"));
    }
    let vertex = |i: usize| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64;
    let mut coords = Vec::with_capacity(2 * resolution * resolution);
    let mut targets = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            let p = [vertex(i), vertex(j)];
            coords.extend_from_slice(&p);
            targets.push(shape.sdf(p));
        }
    }
    let coords = Matrix::from_vec(resolution * resolution, 2, coords)?;
    let targets = Matrix::from_vec(resolution * resolution, 1, targets)?;
    let mut ds = SignalDataset::on_unit_domain(coords, targets, SignalKind::Sdf2d)?;
    ds.grid = Some((resolution, resolution));
    Ok(ds)
}

/// 3D shapes; primitives are exact, boolean combinations give the usual
/// min/max bound (exact outside the intersection of feature regions).
#[derive(Clone, Debug, PartialEq)]
pub enum Shape3 {
    Sphere { center: [f64; 3], radius: f64 },
    Cuboid { center: [f64; 3], half: [f64; 3] },
    Torus { center: [f64; 3], major: f64, minor: f64 },
    Union(Box<Shape3>, Box<Shape3>),
    Intersection(Box<Shape3>, Box<Shape3>),
    Difference(Box<Shape3>, Box<Shape3>),
}

fn offset(p: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    [p[0] - c[0], p[1] - c[1], p[2] - c[2]]
}

impl Shape3 {
    /// Sphere of radius 0.7 with the positive octant cube `[0, 0.7]³` cut away.
    pub fn sphere_minus_box() -> Shape3 {
        Shape3::Difference(
            Box::new(Shape3::Sphere {
                center: [0.0; 3],
                radius: 0.7,
            }),
            Box::new(Shape3::Cuboid {
                center: [0.35; 3],
                half: [0.35; 3],
            }),
        )
    }

    pub fn sdf(&self, p: [f64; 3]) -> f64 {
        match self {
            Shape3::Sphere { center, radius } => sdf_sphere(offset(p, *center), *radius),
            Shape3::Cuboid { center, half } => sdf_box(offset(p, *center), *half),
            Shape3::Torus { center, major, minor } => sdf_torus(offset(p, *center), *major, *minor),
            Shape3::Union(a, b) => a.sdf(p).min(b.sdf(p)),
            Shape3::Intersection(a, b) => a.sdf(p).max(b.sdf(p)),
            Shape3::Difference(a, b) => a.sdf(p).max(-b.sdf(p)),
        }
    }

    /// Analytic containment, independent of the distance computation.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        match self {
            Shape3::Sphere { center, radius } => norm3(offset(p, *center)) < *radius,
            Shape3::Cuboid { center, half } => {
                let q = offset(p, *center);
                (0..3).all(|i| q[i].abs() < half[i])
            }
            Shape3::Torus { center, major, minor } => {
                let q = offset(p, *center);
                let ring = q[0].hypot(q[2]) - major;
                ring * ring + q[1] * q[1] < minor * minor
            }
            Shape3::Union(a, b) => a.contains(p) || b.contains(p),
            Shape3::Intersection(a, b) => a.contains(p) && b.contains(p),
            Shape3::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    fn gradient(&self, p: [f64; 3]) -> [f64; 3] {
        let h = 1e-6;
        let mut g = [0.0; 3];
        for i in 0..3 {
            let (mut a, mut b) = (p, p);
            a[i] += h;
            b[i] -= h;
            g[i] = (self.sdf(a) - self.sdf(b)) / (2.0 * h);
        }
        g
    }

    /// Moves `p` onto the zero level set by repeated gradient projection.
    fn project(&self, mut p: [f64; 3]) -> Option<[f64; 3]> {
        for _ in 0..32 {
            let d = self.sdf(p);
            if d.abs() < 1e-9 {
                return Some(p);
            }
            let g = self.gradient(p);
            let gg = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if gg < 1e-12 {
                return None;
            }
            for i in 0..3 {
                p[i] -= d * g[i] / gg;
            }
        }
        (self.sdf(p).abs() < 1e-6).then_some(p)
    }
}

fn draw_uniform(rng: &mut Rng) -> [f64; 3] {
    [rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0]
}

/// `n` samples in `[-1, 1]³`: a `1 − near_fraction` share uniform, the rest
/// surface points jittered by `N(0, sigma²)` per axis. Targets are exact SDF values.
pub fn sample_sdf3d(shape: &Shape3, rng: &mut Rng, n: usize, near_fraction: f64, sigma: f64) -> Result<SignalDataset> {
    if !(0.0..=1.0).contains(&near_fraction) || !(sigma >= 0.0) {
        return Err(Error::arg(format!(
            "near-surface fraction {near_fraction} must lie in [0, 1] and sigma {sigma} must be non-negative"
        )));
    }
    let n_near = (n as f64 * near_fraction).round() as usize;
    let mut coords = Vec::with_capacity(3 * n);
    for _ in 0..n - n_near {
        coords.extend(draw_uniform(rng));
    }
    let mut made = 0;
    let mut attempts = 0usize;
    while made < n_near {
        attempts += 1;
        if attempts > 100 * n_near + 1000 {
            return Err(Error::arg("could not place near-surface samples; is the surface inside [-1, 1]³?"));
        }
        let Some(s) = shape.project(draw_uniform(rng)) else {
            continue;
        };
        let q = [
            s[0] + rng.normal(0.0, sigma),
            s[1] + rng.normal(0.0, sigma),
            s[2] + rng.normal(0.0, sigma),
        ];
        if q.iter().all(|v| (-1.0..=1.0).contains(v)) {
            coords.extend(q);
            made += 1;
        }
    }
    let coords = Matrix::from_vec(n, 3, coords)?;
    let targets = (0..n)
        .map(|r| {
            let c = coords.row(r);
            shape.sdf([c[0], c[1], c[2]])
        })
        .collect();
    let targets = Matrix::from_vec(n, 1, targets)?;
    SignalDataset::on_unit_domain(coords, targets, SignalKind::Sdf3d)
}
