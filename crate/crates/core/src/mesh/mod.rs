//! Discrete immersed hypersurfaces: closed or open polylines in `R²` and triangle
//! meshes in `R³`.
//!
//! A mesh always lives in the Euclidean factor of its ambient soliton. For the
//! cylinder soliton `R^p × S^k` the mesh discretizes the Euclidean factor `N` of a
//! product `N × S^k`; the sphere factor is implicit and enters only through
//! closed-form spectra and the ambient's dimension bookkeeping.

mod io;
mod sample;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use io::{read_mesh_file, read_off, read_polyline_json, write_off, write_polyline_json};
pub use sample::{axial_nodes, sample_shape, Resolution, REFERENCE_WINDOW};

use crate::geometry::{euclidean_potential, AmbientSoliton, CatalogShape};
use crate::linalg::{cross3, dot, norm};
use crate::{Error, Result};

/// Minimum edge length accepted.
pub const MIN_EDGE_LENGTH: f64 = 1e-10;
/// Minimum triangle area accepted.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub enum Cells {
    Edges(Vec<[usize; 2]>),
    Triangles(Vec<[usize; 3]>),
}

impl Cells {
    pub fn len(&self) -> usize {
        match self {
            Cells::Edges(e) => e.len(),
            Cells::Triangles(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self, e: usize) -> &[usize] {
        match self {
            Cells::Edges(c) => &c[e],
            Cells::Triangles(c) => &c[e],
        }
    }
}

/// Where a mesh was cut off and how much weighted volume was discarded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationInfo {
    /// Euclidean-factor radius `R`; every vertex satisfies `|x| ≤ R`.
    pub radius: f64,
    /// Analytic upper bound on `∫_{|x| > R} e^{−f}` over the meshed factor.
    pub tail_mass_bound: f64,
}

/// Per-vertex scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexField(Vec<f64>);

impl VertexField {
    pub fn new(values: Vec<f64>, mesh: &Mesh) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::FieldMismatch {
                expected: mesh.num_vertices(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite field value at vertex {i}")));
        }
        Ok(Self(values))
    }

    /// Evaluates `f` at each vertex position (Euclidean-factor coordinates).
    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64]) -> f64) -> Self {
        Self((0..mesh.num_vertices()).map(|i| f(mesh.vertex(i))).collect())
    }

    pub fn constant(mesh: &Mesh, c: f64) -> Self {
        Self(vec![c; mesh.num_vertices()])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Geometry of one P1 element.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub nodes: [usize; 3],
    /// 2 for segments, 3 for triangles.
    pub len: usize,
    pub measure: f64,
    pub centroid: [f64; 3],
    /// `∫_e ∇φ_i · ∇φ_j` for the local hat functions.
    pub stiffness: [[f64; 3]; 3],
}

impl ElementGeometry {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.len]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    ambient: AmbientSoliton,
    coords: Vec<f64>,
    cells: Cells,
    boundary: Vec<bool>,
    truncation: Option<TruncationInfo>,
    shape: Option<CatalogShape>,
}

/// `|H⃗ + (∇̄f)^⊥|` per interior vertex, with norms.
#[derive(Clone, Debug)]
pub struct FMinimalResidual {
    /// Residual magnitude per vertex; boundary vertices carry 0.
    pub magnitudes: VertexField,
    pub sup_norm: f64,
    pub weighted_l2: f64,
}

impl Mesh {
    /// Validates and builds a mesh. `coords` is flattened with stride equal to the
    /// ambient's Euclidean dimension, which must be one more than the cell
    /// dimension.
    pub fn new(
        ambient: AmbientSoliton,
        coords: Vec<f64>,
        cells: Cells,
        truncation: Option<TruncationInfo>,
    ) -> Result<Self> {
        let dim = match cells {
            Cells::Edges(_) => 1,
            Cells::Triangles(_) => 2,
        };
        let stride = ambient.euclidean_dim();
        if stride != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                got: stride,
            });
        }
        if coords.len() % stride != 0 {
            return Err(Error::InvalidMesh(format!(
                "coordinate array length {} is not a multiple of {stride}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite coordinate at index {i}")));
        }
        let nv = coords.len() / stride;
        if nv == 0 || cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no vertices or no cells".into()));
        }
        for e in 0..cells.len() {
            let nodes = cells.nodes(e);
            if nodes.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidMesh(format!("cell {e} references a missing vertex")));
            }
            for a in 0..nodes.len() {
                for b in a + 1..nodes.len() {
                    if nodes[a] == nodes[b] {
                        return Err(Error::InvalidMesh(format!("cell {e} repeats a vertex")));
                    }
                }
            }
        }
        let boundary = boundary_flags(nv, &cells)?;
        let mesh = Self {
            ambient,
            coords,
            cells,
            boundary,
            truncation,
            shape: None,
        };
        for e in 0..mesh.num_elements() {
            let m = mesh.element_measure(e);
            let limit = if dim == 1 { MIN_EDGE_LENGTH } else { MIN_TRIANGLE_AREA };
            if !(m > limit) {
                return Err(Error::DegenerateElement { index: e, measure: m });
            }
        }
        if dim == 2 {
            for tri in mesh.triangles() {
                for a in 0..3 {
                    let l = norm(&crate::linalg::sub(mesh.vertex(tri[a]), mesh.vertex(tri[(a + 1) % 3])));
                    if l <= MIN_EDGE_LENGTH {
                        return Err(Error::DegenerateElement { index: 0, measure: l });
                    }
                }
            }
        }
        if let Some(t) = truncation {
            let rmax = (0..nv).map(|i| norm(mesh.vertex(i))).fold(0.0, f64::max);
            if rmax > t.radius * (1.0 + 1e-12) {
                return Err(Error::InvalidMesh(format!(
                    "vertex at |x| = {rmax} exceeds truncation radius {}",
                    t.radius
                )));
            }
        }
        Ok(mesh)
    }

    pub(crate) fn with_shape(mut self, shape: CatalogShape) -> Self {
        self.shape = Some(shape);
        self
    }

    pub fn ambient(&self) -> AmbientSoliton {
        self.ambient
    }

    /// Catalog shape this mesh was sampled from, if any.
    pub fn shape(&self) -> Option<&CatalogShape> {
        self.shape.as_ref()
    }

    /// Dimension of the meshed factor (1 or 2).
    pub fn dim(&self) -> usize {
        match self.cells {
            Cells::Edges(_) => 1,
            Cells::Triangles(_) => 2,
        }
    }

    /// Dimension of the represented hypersurface, including an implicit sphere
    /// factor of the cylinder soliton.
    pub fn manifold_dim(&self) -> usize {
        self.dim() + self.ambient.sphere_dim().unwrap_or(0)
    }

    pub fn stride(&self) -> usize {
        self.ambient.euclidean_dim()
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.stride()
    }

    pub fn num_elements(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        let s = self.stride();
        &self.coords[i * s..(i + 1) * s]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn cells(&self) -> &Cells {
        &self.cells
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        match &self.cells {
            Cells::Triangles(t) => t,
            Cells::Edges(_) => &[],
        }
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        match &self.cells {
            Cells::Edges(e) => e,
            Cells::Triangles(_) => &[],
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior_count(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    pub fn is_closed(&self) -> bool {
        !self.boundary.iter().any(|&b| b)
    }

    pub fn truncation(&self) -> Option<TruncationInfo> {
        self.truncation
    }

    /// Unique undirected edges (of the cells, for triangle meshes), sorted.
    pub fn unique_edges(&self) -> Vec<[usize; 2]> {
        match &self.cells {
            Cells::Edges(e) => {
                let mut v: Vec<[usize; 2]> = e.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Cells::Triangles(t) => {
                let mut v: Vec<[usize; 2]> = t
                    .iter()
                    .flat_map(|tri| (0..3).map(move |a| [tri[a].min(tri[(a + 1) % 3]), tri[a].max(tri[(a + 1) % 3])]))
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    /// `V − E + F` for triangle meshes, `V − E` for polylines.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.num_vertices() as i64;
        let e = self.unique_edges().len() as i64;
        match self.cells {
            Cells::Edges(_) => v - e,
            Cells::Triangles(ref t) => v - e + t.len() as i64,
        }
    }

    /// Longest edge.
    pub fn max_edge_length(&self) -> f64 {
        self.unique_edges()
            .iter()
            .map(|&[a, b]| norm(&crate::linalg::sub(self.vertex(a), self.vertex(b))))
            .fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> f64 {
        self.unique_edges()
            .iter()
            .map(|&[a, b]| norm(&crate::linalg::sub(self.vertex(a), self.vertex(b))))
            .fold(f64::INFINITY, f64::min)
    }

    fn element_measure(&self, e: usize) -> f64 {
        let nodes = self.cells.nodes(e);
        let a = self.vertex(nodes[0]);
        let b = self.vertex(nodes[1]);
        let ab = crate::linalg::sub(b, a);
        match self.cells {
            Cells::Edges(_) => norm(&ab),
            Cells::Triangles(_) => {
                let ac = crate::linalg::sub(self.vertex(nodes[2]), a);
                0.5 * norm(&cross3(&ab, &ac))
            }
        }
    }

    pub fn element_measures(&self) -> Vec<f64> {
        (0..self.num_elements()).map(|e| self.element_measure(e)).collect()
    }

    /// Local P1 geometry of element `e`.
    pub fn element(&self, e: usize) -> ElementGeometry {
        let nodes = self.cells.nodes(e);
        let mut g = ElementGeometry {
            nodes: [0; 3],
            len: nodes.len(),
            measure: 0.0,
            centroid: [0.0; 3],
            stiffness: [[0.0; 3]; 3],
        };
        g.nodes[..nodes.len()].copy_from_slice(nodes);
        let s = self.stride();
        for &i in nodes {
            for c in 0..s {
                g.centroid[c] += self.vertex(i)[c] / nodes.len() as f64;
            }
        }
        match self.cells {
            Cells::Edges(_) => {
                let l = self.element_measure(e);
                g.measure = l;
                g.stiffness[0][0] = 1.0 / l;
                g.stiffness[1][1] = 1.0 / l;
                g.stiffness[0][1] = -1.0 / l;
                g.stiffness[1][0] = -1.0 / l;
            }
            Cells::Triangles(_) => {
                let p: Vec<&[f64]> = nodes.iter().map(|&i| self.vertex(i)).collect();
                let twice_area = norm(&cross3(
                    &crate::linalg::sub(p[1], p[0]),
                    &crate::linalg::sub(p[2], p[0]),
                ));
                g.measure = 0.5 * twice_area;
                // edge opposite vertex k couples the other two with −½ cot θ_k
                for k in 0..3 {
                    let i = (k + 1) % 3;
                    let j = (k + 2) % 3;
                    let a = crate::linalg::sub(p[i], p[k]);
                    let b = crate::linalg::sub(p[j], p[k]);
                    let cot = dot(&a, &b) / twice_area;
                    g.stiffness[i][j] -= 0.5 * cot;
                    g.stiffness[j][i] -= 0.5 * cot;
                    g.stiffness[i][i] += 0.5 * cot;
                    g.stiffness[j][j] += 0.5 * cot;
                }
            }
        }
        g
    }

    /// Unweighted lumped vertex measure `(1/(n+1)) Σ |e|` over incident elements.
    pub fn lumped_measure(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.num_vertices()];
        let share = 1.0 / (self.dim() + 1) as f64;
        for e in 0..self.num_elements() {
            let me = self.element_measure(e);
            for &i in self.cells.nodes(e) {
                m[i] += share * me;
            }
        }
        m
    }

    /// Mixed Voronoi vertex areas: circumcentric cells on non-obtuse triangles,
    /// and the half/quarter split on obtuse ones. On polylines this is the
    /// lumped measure.
    pub fn mixed_area(&self) -> Vec<f64> {
        if self.dim() == 1 {
            return self.lumped_measure();
        }
        let mut m = vec![0.0; self.num_vertices()];
        for t in self.triangles() {
            let p: Vec<&[f64]> = t.iter().map(|&i| self.vertex(i)).collect();
            let e: Vec<Vec<f64>> = (0..3).map(|k| crate::linalg::sub(p[(k + 2) % 3], p[(k + 1) % 3])).collect();
            let area = 0.5 * norm(&cross3(&e[1], &e[2]));
            let dots: Vec<f64> = (0..3).map(|k| -dot(&e[(k + 1) % 3], &e[(k + 2) % 3])).collect();
            if let Some(k) = (0..3).find(|&k| dots[k] < 0.0) {
                for a in 0..3 {
                    m[t[a]] += if a == k { area / 2.0 } else { area / 4.0 };
                }
                continue;
            }
            // edge opposite k contributes |e_k|² cot θ_k / 8 to both its ends
            for k in 0..3 {
                let cot = dots[k] / (2.0 * area);
                let l2 = dot(&e[k], &e[k]);
                m[t[(k + 1) % 3]] += l2 * cot / 8.0;
                m[t[(k + 2) % 3]] += l2 * cot / 8.0;
            }
        }
        m
    }

    /// Lumped weighted measure `(1/(n+1)) Σ |e| · e^{−f(vertex)}`. Its total
    /// approximates `∫_M e^{−f}` over the meshed factor.
    pub fn weighted_vertex_measure(&self) -> VertexField {
        let m = self.lumped_measure();
        VertexField(
            m.iter()
                .enumerate()
                .map(|(i, mi)| mi * (-euclidean_potential(self.vertex(i))).exp())
                .collect(),
        )
    }

    /// Unit vertex normals. Polylines rotate the averaged unit tangent by −90°;
    /// triangle meshes weight each face normal by `sin θ / (|e₁||e₂|)` at the
    /// vertex, which is exact when the one-ring lies on a sphere.
    pub fn vertex_normals(&self) -> Result<Vec<Vec<f64>>> {
        let nv = self.num_vertices();
        let s = self.stride();
        let mut acc = vec![vec![0.0; s]; nv];
        match &self.cells {
            Cells::Edges(edges) => {
                for &[a, b] in edges {
                    let t = crate::linalg::sub(self.vertex(b), self.vertex(a));
                    let l = norm(&t);
                    for &i in &[a, b] {
                        acc[i][0] += t[0] / l;
                        acc[i][1] += t[1] / l;
                    }
                }
                for v in acc.iter_mut() {
                    let (tx, ty) = (v[0], v[1]);
                    v[0] = ty;
                    v[1] = -tx;
                }
            }
            Cells::Triangles(tris) => {
                for tri in tris {
                    for a in 0..3 {
                        let p = self.vertex(tri[a]);
                        let e1 = crate::linalg::sub(self.vertex(tri[(a + 1) % 3]), p);
                        let e2 = crate::linalg::sub(self.vertex(tri[(a + 2) % 3]), p);
                        let c = cross3(&e1, &e2);
                        let w = dot(&e1, &e1) * dot(&e2, &e2);
                        for k in 0..3 {
                            acc[tri[a]][k] += c[k] / w;
                        }
                    }
                }
            }
        }
        acc.into_iter()
            .enumerate()
            .map(|(i, v)| {
                let n = norm(&v);
                if n < 1e-14 {
                    Err(Error::InvalidMesh(format!("vertex {i} has no well-defined normal")))
                } else {
                    Ok(v.iter().map(|x| x / n).collect())
                }
            })
            .collect()
    }

    /// Discrete mean curvature vector `H⃗_i = −(K₀x)_i / A_i`, with `K₀` the
    /// unweighted P1 stiffness (cotangent weights for triangles) and `A_i` the
    /// mixed Voronoi area. `None` at boundary vertices.
    pub fn discrete_mean_curvature(&self) -> Result<Vec<Option<Vec<f64>>>> {
        let nv = self.num_vertices();
        let s = self.stride();
        let mut lap = vec![vec![0.0; s]; nv];
        for e in 0..self.num_elements() {
            let g = self.element(e);
            if !(g.measure > 0.0) {
                return Err(Error::DegenerateElement {
                    index: e,
                    measure: g.measure,
                });
            }
            for (a, &i) in g.nodes().iter().enumerate() {
                for (b, &j) in g.nodes().iter().enumerate() {
                    let k = g.stiffness[a][b];
                    for c in 0..s {
                        lap[i][c] -= k * self.vertex(j)[c];
                    }
                }
            }
        }
        let area = self.mixed_area();
        Ok(lap
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if self.boundary[i] {
                    None
                } else {
                    Some(v.iter().map(|x| x / area[i]).collect())
                }
            })
            .collect())
    }

    /// `|H⃗ + (∇̄f)^⊥|` at interior vertices using discrete curvature and normals.
    /// For the cylinder soliton the sphere factor is totally geodesic in the ambient
    /// and `∇̄f` has no sphere component, so the Euclidean-factor formula applies.
    pub fn fminimal_residual(&self) -> Result<FMinimalResidual> {
        if self.interior_count() == 0 {
            return Err(Error::InvalidMesh("mesh has no interior vertices".into()));
        }
        let h = self.discrete_mean_curvature()?;
        let normals = self.vertex_normals()?;
        let measure = self.weighted_vertex_measure();
        let mut mags = vec![0.0; self.num_vertices()];
        let mut sup = 0.0_f64;
        let mut l2 = 0.0;
        for (i, hv) in h.iter().enumerate() {
            let Some(hv) = hv else { continue };
            let x = self.vertex(i);
            let nu = &normals[i];
            let c = 0.5 * dot(x, nu);
            let r: Vec<f64> = hv.iter().zip(nu).map(|(hc, nc)| hc + c * nc).collect();
            let m = norm(&r);
            mags[i] = m;
            sup = sup.max(m);
            l2 += m * m * measure.values()[i];
        }
        Ok(FMinimalResidual {
            magnitudes: VertexField(mags),
            sup_norm: sup,
            weighted_l2: l2.sqrt(),
        })
    }

    /// Applies `map` to every vertex (e.g. a rotation); connectivity is kept.
    pub fn map_vertices(&self, map: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in 0..self.num_vertices() {
            let y = map(self.vertex(i));
            if y.len() != self.stride() {
                return Err(Error::DimensionMismatch {
                    expected: self.stride(),
                    got: y.len(),
                });
            }
            coords.extend(y);
        }
        let mut m = Mesh::new(self.ambient, coords, self.cells.clone(), None)?;
        m.truncation = self.truncation;
        Ok(m)
    }
}

fn boundary_flags(nv: usize, cells: &Cells) -> Result<Vec<bool>> {
    let mut boundary = vec![false; nv];
    match cells {
        Cells::Edges(edges) => {
            let mut degree = vec![0usize; nv];
            for &[a, b] in edges {
                degree[a] += 1;
                degree[b] += 1;
            }
            for (i, &d) in degree.iter().enumerate() {
                match d {
                    0 => return Err(Error::InvalidMesh(format!("vertex {i} is isolated"))),
                    1 => boundary[i] = true,
                    2 => {}
                    _ => return Err(Error::InvalidMesh(format!("vertex {i} has degree {d}"))),
                }
            }
        }
        Cells::Triangles(tris) => {
            let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut used = vec![false; nv];
            for tri in tris {
                for a in 0..3 {
                    let (i, j) = (tri[a], tri[(a + 1) % 3]);
                    *count.entry((i.min(j), i.max(j))).or_default() += 1;
                    used[i] = true;
                }
            }
            if let Some(i) = used.iter().position(|u| !u) {
                return Err(Error::InvalidMesh(format!("vertex {i} is isolated")));
            }
            for (&(i, j), &c) in &count {
                match c {
                    1 => {
                        boundary[i] = true;
                        boundary[j] = true;
                    }
                    2 => {}
                    _ => {
                        return Err(Error::InvalidMesh(format!(
                            "edge ({i}, {j}) is shared by {c} triangles"
                        )))
                    }
                }
            }
        }
    }
    Ok(boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogShape;
    use std::f64::consts::PI;

    fn circle(r: f64, n: usize) -> Mesh {
        sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], r).unwrap(), n, None).unwrap()
    }

    #[test]
    fn rejects_nonmanifold_and_degenerate() {
        let amb = AmbientSoliton::gaussian(2).unwrap();
        let star = Mesh::new(
            amb,
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, -1.0, 0.0],
            Cells::Edges(vec![[0, 1], [0, 2], [0, 3]]),
            None,
        );
        assert!(matches!(star, Err(Error::InvalidMesh(_))));
        let degenerate = Mesh::new(amb, vec![0.0, 0.0, 0.0, 0.0], Cells::Edges(vec![[0, 1]]), None);
        assert!(matches!(degenerate, Err(Error::DegenerateElement { .. })));
        let amb3 = AmbientSoliton::gaussian(3).unwrap();
        let flat_tri = Mesh::new(
            amb3,
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0],
            Cells::Triangles(vec![[0, 1, 2]]),
            None,
        );
        assert!(matches!(flat_tri, Err(Error::DegenerateElement { .. })));
        let wrong_dim = Mesh::new(amb3, vec![0.0; 6], Cells::Edges(vec![[0, 1]]), None);
        assert!(matches!(wrong_dim, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn circle_curvature_is_exact() {
        let r = 2f64.sqrt();
        let m = circle(r, 512);
        assert!(m.is_closed());
        assert_eq!(m.euler_characteristic(), 0);
        let h = m.discrete_mean_curvature().unwrap();
        for (i, hv) in h.iter().enumerate() {
            let hv = hv.as_ref().unwrap();
            assert!((norm(hv) - 1.0 / r).abs() < 1e-3);
            // points to the center
            assert!(dot(hv, m.vertex(i)) < 0.0);
        }
    }

    #[test]
    fn flat_line_has_zero_curvature_and_residual() {
        let shape = CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap();
        let m = sample_shape(&shape, 256, Some(12.0)).unwrap();
        for hv in m.discrete_mean_curvature().unwrap().into_iter().flatten() {
            assert!(norm(&hv) < 1e-12);
        }
        let r = m.fminimal_residual().unwrap();
        assert!(r.sup_norm < 1e-12);
        assert!(m.is_boundary(0) && m.is_boundary(m.num_vertices() - 1));
    }

    #[test]
    fn fminimal_residual_circle_examples() {
        let shrinker = circle(2f64.sqrt(), 512).fminimal_residual().unwrap();
        assert!(shrinker.sup_norm < 5e-3);
        let unit = circle(1.0, 512).fminimal_residual().unwrap();
        assert!((unit.sup_norm - 0.5).abs() < 5e-3);
    }

    #[test]
    fn weighted_measure_totals() {
        let r = 2f64.sqrt();
        for n in [64, 256, 1024] {
            let total = circle(r, n).weighted_vertex_measure().sum();
            let exact = 2.0 * PI * r * (-0.5f64).exp();
            assert!((total - exact).abs() < 20.0 / (n * n) as f64, "n={n}: {total} vs {exact}");
        }
        let line = sample_shape(&CatalogShape::hyperplane(1, vec![1.0, 0.0]).unwrap(), 480, Some(12.0)).unwrap();
        assert!((line.weighted_vertex_measure().sum() - 2.0 * PI.sqrt()).abs() < 1e-6);
        let sphere = sample_shape(&CatalogShape::round_sphere(2, vec![0.0; 3], 2.0).unwrap(), 10_000, None).unwrap();
        let exact = 16.0 * PI * (-1.0f64).exp();
        assert!((sphere.weighted_vertex_measure().sum() - exact).abs() < 1e-2 * exact);
    }

    #[test]
    fn normals_are_unit_and_outward() {
        let sphere = sample_shape(&CatalogShape::round_sphere(2, vec![0.0; 3], 2.0).unwrap(), 2_000, None).unwrap();
        for (i, nu) in sphere.vertex_normals().unwrap().iter().enumerate() {
            assert!((norm(nu) - 1.0).abs() < 1e-10);
            assert!(dot(nu, sphere.vertex(i)) > 0.0);
        }
        let c = circle(1.0, 64);
        for (i, nu) in c.vertex_normals().unwrap().iter().enumerate() {
            assert!((dot(nu, c.vertex(i)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn field_length_is_checked() {
        let m = circle(1.0, 32);
        assert!(matches!(VertexField::new(vec![0.0; 31], &m), Err(Error::FieldMismatch { .. })));
        assert!(VertexField::new(vec![f64::NAN; 32], &m).is_err());
    }
}
