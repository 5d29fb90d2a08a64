//! Meshing of catalog shapes.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Cells, Mesh, TruncationInfo};
use crate::geometry::{AmbientSoliton, CatalogShape};
use crate::linalg::{cross3, dot, norm, orthonormal_complement};
use crate::{Error, Result};

/// Length that sets the noncompact grid spacing: `h = REFERENCE_WINDOW / count`.
/// Spacing does not depend on the truncation radius, so meshes truncated at
/// different radii share their core nodes.
pub const REFERENCE_WINDOW: f64 = 24.0;

/// Minimum accepted resolution count.
pub const MIN_RESOLUTION: usize = 16;

/// Element-count target.
///
/// `count` is the vertex count for circles, the target vertex count for spheres,
/// the number of vertices around a cylinder, and `REFERENCE_WINDOW / h` for lines
/// and discs. `axial` overrides the axial spacing of a cylinder the same way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial: Option<usize>,
}

impl Resolution {
    pub fn new(count: usize) -> Self {
        Self { count, axial: None }
    }

    pub fn with_axial(count: usize, axial: usize) -> Self {
        Self {
            count,
            axial: Some(axial),
        }
    }
}

impl From<usize> for Resolution {
    fn from(count: usize) -> Self {
        Self::new(count)
    }
}

/// Symmetric nodes on `[−tmax, tmax]` with spacing `h`. The outermost node is
/// placed exactly at `±tmax`; a remainder under `h/2` widens the last interval
/// instead of adding a sliver.
pub fn axial_nodes(h: f64, tmax: f64) -> Vec<f64> {
    let mut pos = Vec::new();
    let m = (tmax / h).floor() as usize;
    let rem = tmax - m as f64 * h;
    for j in 1..=m {
        pos.push(j as f64 * h);
    }
    if m >= 1 && rem < 0.5 * h {
        *pos.last_mut().unwrap() = tmax;
    } else {
        pos.push(tmax);
    }
    let mut nodes: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    nodes.push(0.0);
    nodes.extend(pos);
    nodes
}

fn line_tail(radius: f64) -> f64 {
    2.0 * PI.sqrt() * libm::erfc(radius / 2.0)
}

/// Samples a catalog shape. Meshes for soliton products cover the Euclidean
/// factor only.
pub fn sample_shape(
    shape: &CatalogShape,
    resolution: impl Into<Resolution>,
    truncation: Option<f64>,
) -> Result<Mesh> {
    let res = resolution.into();
    if res.count < MIN_RESOLUTION || res.axial.is_some_and(|a| a < MIN_RESOLUTION) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least {MIN_RESOLUTION}"
        )));
    }
    if !shape.is_compact() {
        match truncation {
            None => {
                return Err(Error::InvalidParameter(
                    "noncompact shapes require a truncation radius".into(),
                ))
            }
            Some(r) if !(r.is_finite() && r > 0.0) => {
                return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {r}")))
            }
            _ => {}
        }
    }
    let ambient = shape.ambient();
    let unsupported = || Error::Unsupported(format!("no mesher for {} with n = {}", shape.variant_name(), shape.n()));
    let mesh = match shape {
        CatalogShape::RoundSphere { n, center, radius } => match n {
            1 => circle(ambient, center, *radius, res.count)?,
            2 => icosphere(ambient, center, *radius, res.count)?,
            _ => return Err(unsupported()),
        },
        CatalogShape::SphereCylinder {
            n, k, center, radius, ..
        } => match (n, k) {
            (1, 1) => circle(ambient, center, *radius, res.count)?,
            (2, 2) => icosphere(ambient, center, *radius, res.count)?,
            (2, 1) => cylinder(ambient, center, *radius, res, truncation.unwrap())?,
            _ => return Err(unsupported()),
        },
        CatalogShape::SolitonSphereProduct { n, k, radius } => {
            let origin = vec![0.0; n + 1 - k];
            match n - k {
                1 => circle(ambient, &origin, *radius, res.count)?,
                2 => icosphere(ambient, &origin, *radius, res.count)?,
                _ => return Err(unsupported()),
            }
        }
        CatalogShape::Hyperplane { normal, .. } | CatalogShape::SolitonHyperplaneProduct { normal, .. } => {
            match normal.len() {
                2 => line(ambient, normal, res.count, truncation.unwrap())?,
                3 => disc(ambient, normal, res.count, truncation.unwrap())?,
                _ => return Err(unsupported()),
            }
        }
    };
    Ok(mesh.with_shape(shape.clone()))
}

fn circle(ambient: AmbientSoliton, center: &[f64], r: f64, count: usize) -> Result<Mesh> {
    let mut coords = Vec::with_capacity(2 * count);
    for i in 0..count {
        let th = 2.0 * PI * i as f64 / count as f64;
        coords.push(center[0] + r * th.cos());
        coords.push(center[1] + r * th.sin());
    }
    let edges = (0..count).map(|i| [i, (i + 1) % count]).collect();
    Mesh::new(ambient, coords, Cells::Edges(edges), None)
}

fn line(ambient: AmbientSoliton, normal: &[f64], count: usize, radius: f64) -> Result<Mesh> {
    let h = REFERENCE_WINDOW / count as f64;
    let dir = [-normal[1], normal[0]];
    let nodes = axial_nodes(h, radius);
    let mut coords = Vec::with_capacity(2 * nodes.len());
    for s in &nodes {
        coords.push(s * dir[0]);
        coords.push(s * dir[1]);
    }
    let edges = (0..nodes.len() - 1).map(|i| [i, i + 1]).collect();
    Mesh::new(
        ambient,
        coords,
        Cells::Edges(edges),
        Some(TruncationInfo {
            radius,
            tail_mass_bound: line_tail(radius),
        }),
    )
}

/// Hexagonal-ring triangulation of the disc `|x| ≤ R` in the plane `⟨x, p⟩ = 0`,
/// oriented so face normals point along `p`.
fn disc(ambient: AmbientSoliton, normal: &[f64], count: usize, radius: f64) -> Result<Mesh> {
    let h = REFERENCE_WINDOW / count as f64;
    let mut basis = orthonormal_complement(normal);
    if dot(&cross3(&basis[0], &basis[1]), normal) < 0.0 {
        basis.swap(0, 1);
    }
    let radii: Vec<f64> = axial_nodes(h, radius).into_iter().filter(|&t| t > 0.0).collect();
    let mut coords = vec![0.0; 3];
    let mut ring_start = vec![0usize];
    for (idx, rho) in radii.iter().enumerate() {
        let i = idx + 1;
        ring_start.push(coords.len() / 3);
        for j in 0..6 * i {
            let th = 2.0 * PI * j as f64 / (6 * i) as f64;
            let (c, s) = (rho * th.cos(), rho * th.sin());
            for a in 0..3 {
                coords.push(c * basis[0][a] + s * basis[1][a]);
            }
        }
    }
    let mut tris = Vec::new();
    for i in 1..=radii.len() {
        let outer = |j: usize| ring_start[i] + j % (6 * i);
        let inner = |j: usize| {
            if i == 1 {
                0
            } else {
                ring_start[i - 1] + j % (6 * (i - 1))
            }
        };
        for s in 0..6 {
            for j in 0..i {
                tris.push([outer(s * i + j), outer(s * i + j + 1), inner(s * (i - 1) + j)]);
            }
            for j in 0..i.saturating_sub(1) {
                tris.push([
                    inner(s * (i - 1) + j),
                    outer(s * i + j + 1),
                    inner(s * (i - 1) + j + 1),
                ]);
            }
        }
    }
    Mesh::new(
        ambient,
        coords,
        Cells::Triangles(tris),
        Some(TruncationInfo {
            radius,
            tail_mass_bound: 4.0 * PI * (-radius * radius / 4.0).exp(),
        }),
    )
}

/// `S¹(v, r) × [−T, T]` with `T = √(R² − (|v| + r)²)`, so every vertex has
/// `|x| ≤ R`.
fn cylinder(ambient: AmbientSoliton, center: &[f64], r: f64, res: Resolution, radius: f64) -> Result<Mesh> {
    let reach = norm(center) + r;
    if reach >= radius {
        return Err(Error::InvalidParameter(format!(
            "truncation radius {radius} does not exceed the cylinder's reach {reach}"
        )));
    }
    let tmax = (radius * radius - reach * reach).sqrt();
    let around = res.count;
    let h = match res.axial {
        Some(a) => REFERENCE_WINDOW / a as f64,
        None => 2.0 * r * (PI / around as f64).sin(),
    };
    let nodes = axial_nodes(h, tmax);
    let mut coords = Vec::with_capacity(3 * around * nodes.len());
    for t in &nodes {
        for i in 0..around {
            let th = 2.0 * PI * i as f64 / around as f64;
            coords.extend([center[0] + r * th.cos(), center[1] + r * th.sin(), *t]);
        }
    }
    let mut tris = Vec::with_capacity(2 * around * (nodes.len() - 1));
    for j in 0..nodes.len() - 1 {
        for i in 0..around {
            let a = j * around + i;
            let b = j * around + (i + 1) % around;
            let c = (j + 1) * around + (i + 1) % around;
            let d = (j + 1) * around + i;
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    let min_f = (norm(center) - r).max(0.0).powi(2) / 4.0;
    Mesh::new(
        ambient,
        coords,
        Cells::Triangles(tris),
        Some(TruncationInfo {
            radius,
            tail_mass_bound: 2.0 * PI * r * (-min_f).exp() * line_tail(tmax),
        }),
    )
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron_vertices() -> [[f64; 3]; 12] {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
}

/// Geodesic icosphere of frequency `ν ≈ √((N − 2)/10)`, which has `10ν² + 2`
/// vertices.
fn icosphere(ambient: AmbientSoliton, center: &[f64], r: f64, target: usize) -> Result<Mesh> {
    let nu = (((target as f64 - 2.0) / 10.0).sqrt().round() as usize).max(2);
    let corners = icosahedron_vertices();
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut coords = Vec::new();
    let mut tris = Vec::with_capacity(20 * nu * nu);
    for face in ICOSAHEDRON_FACES {
        let mut grid = vec![vec![0usize; nu + 1]; nu + 1];
        for i in 0..=nu {
            for j in 0..=nu - i {
                let weights = [nu - i - j, i, j];
                let mut key: Vec<(usize, usize)> = face
                    .iter()
                    .zip(weights)
                    .filter(|(_, w)| *w > 0)
                    .map(|(&c, w)| (c, w))
                    .collect();
                key.sort_unstable();
                let next = coords.len() / 3;
                let id = *index.entry(key).or_insert_with(|| {
                    let mut p = [0.0; 3];
                    for (&c, w) in face.iter().zip(weights) {
                        for a in 0..3 {
                            p[a] += w as f64 * corners[c][a];
                        }
                    }
                    let l = norm(&p);
                    for a in 0..3 {
                        coords.push(center[a] + r * p[a] / l);
                    }
                    next
                });
                grid[i][j] = id;
            }
        }
        for i in 0..nu {
            for j in 0..nu - i {
                tris.push([grid[i][j], grid[i + 1][j], grid[i][j + 1]]);
                if i + j + 2 <= nu {
                    tris.push([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                }
            }
        }
    }
    Mesh::new(ambient, coords, Cells::Triangles(tris), None)
}
