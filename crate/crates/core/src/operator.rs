//! Gaussian-weighted Dirichlet and mass forms, pointwise drifted Laplacian, and
//! the Schrödinger gauge potential.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{euclidean_potential, CatalogShape};
use crate::mesh::{ElementGeometry, Mesh, VertexField};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Stiffness `∫⟨∇φᵢ,∇φⱼ⟩e^{−f}` and mass `∫φᵢφⱼe^{−f}` in mesh vertex order.
#[derive(Clone, Debug)]
pub struct WeightedForms {
    stiffness: CsrMatrix,
    mass: CsrMatrix,
    lumped_mass: Vec<f64>,
    vertex_measure: Vec<f64>,
    max_edge_length: f64,
}

type LocalMatrices = (ElementGeometry, [[f64; 3]; 3], [[f64; 3]; 3]);

fn consistent_mass(g: &ElementGeometry) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    let (diag, off) = match g.len {
        2 => (g.measure / 3.0, g.measure / 6.0),
        _ => (g.measure / 6.0, g.measure / 12.0),
    };
    for (a, row) in m.iter_mut().enumerate().take(g.len) {
        for (b, v) in row.iter_mut().enumerate().take(g.len) {
            *v = if a == b { diag } else { off };
        }
    }
    m
}

/// Assembles element contributions in parallel, then merges in element order.
fn assemble_with(mesh: &Mesh, local: impl Fn(&ElementGeometry) -> ([[f64; 3]; 3], [[f64; 3]; 3]) + Sync) -> Result<(CsrMatrix, CsrMatrix)> {
    let elements: Vec<LocalMatrices> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let g = mesh.element(e);
            let (k, m) = local(&g);
            (g, k, m)
        })
        .collect();
    let per = elements.first().map_or(0, |(g, _, _)| g.len * g.len);
    let mut kt = Vec::with_capacity(per * elements.len());
    let mut mt = Vec::with_capacity(per * elements.len());
    for (e, (g, k, m)) in elements.iter().enumerate() {
        if !(g.measure > 0.0) || !k.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::DegenerateElement {
                index: e,
                measure: g.measure,
            });
        }
        for (a, &i) in g.nodes().iter().enumerate() {
            for (b, &j) in g.nodes().iter().enumerate() {
                kt.push((i, j, k[a][b]));
                mt.push((i, j, m[a][b]));
            }
        }
    }
    let n = mesh.num_vertices();
    Ok((CsrMatrix::from_triplets(n, &kt), CsrMatrix::from_triplets(n, &mt)))
}

/// P1 assembly with the weight `e^{−f}` taken at each element centroid. Boundary
/// vertices are kept (natural boundary condition).
pub fn assemble(mesh: &Mesh) -> Result<WeightedForms> {
    let (stiffness, mass) = assemble_with(mesh, |g| {
        let w = (-euclidean_potential(&g.centroid)).exp();
        let mut k = g.stiffness;
        let mut m = consistent_mass(g);
        for row in k.iter_mut().chain(m.iter_mut()) {
            for v in row.iter_mut() {
                *v *= w;
            }
        }
        (k, m)
    })?;
    let lumped_mass = mass.row_sums();
    let vertex_measure = mesh
        .mixed_area()
        .iter()
        .enumerate()
        .map(|(i, a)| a * (-euclidean_potential(mesh.vertex(i))).exp())
        .collect();
    Ok(WeightedForms {
        stiffness,
        mass,
        lumped_mass,
        vertex_measure,
        max_edge_length: mesh.max_edge_length(),
    })
}

/// Unweighted stiffness plus a potential term, `∫⟨∇φᵢ,∇φⱼ⟩ + ∫Vφᵢφⱼ`, and the
/// unweighted mass. `V` is evaluated at element centroids. With
/// `V = ¼|∇f|² − ½Δf` this is the conjugate of `−Δ_f` by `e^{−f/2}`.
pub fn assemble_gauge(mesh: &Mesh, potential: impl Fn(&[f64]) -> f64 + Sync) -> Result<(CsrMatrix, CsrMatrix)> {
    let stride = mesh.stride();
    let (kv, m) = assemble_with(mesh, |g| {
        let v = potential(&g.centroid[..stride]);
        let m = consistent_mass(g);
        let mut k = g.stiffness;
        for a in 0..3 {
            for b in 0..3 {
                k[a][b] += v * m[a][b];
            }
        }
        (k, m)
    })?;
    Ok((kv, m))
}

impl WeightedForms {
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    /// Row sums of the mass matrix.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped_mass
    }

    /// Mixed Voronoi area times `e^{−f}` at each vertex.
    pub fn vertex_measure(&self) -> &[f64] {
        &self.vertex_measure
    }

    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.max_edge_length
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::FieldMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// `uᵀKu / uᵀMu`.
    pub fn rayleigh_quotient(&self, u: &VertexField) -> Result<f64> {
        self.check_len(u.values())?;
        let u = u.values();
        Ok(self.stiffness.bilinear(u, u) / self.mass.bilinear(u, u))
    }

    /// `∫ u e^{−f}` with the consistent mass, i.e. `1ᵀMu`.
    pub fn integrate(&self, u: &VertexField) -> Result<f64> {
        self.check_len(u.values())?;
        Ok(self.lumped_mass.iter().zip(u.values()).map(|(m, v)| m * v).sum())
    }

    /// Writes stiffness and mass in Matrix Market coordinate format.
    pub fn write_matrix_market<W1: Write, W2: Write>(&self, stiffness: W1, mass: W2) -> Result<()> {
        self.stiffness.write_matrix_market(stiffness, true)?;
        self.mass.write_matrix_market(mass, true)
    }
}

/// `−D⁻¹Ku`; approximates `Δ_f u` at interior vertices.
///
/// `D` is the mixed Voronoi area weighted by `e^{−f}` at the vertex, not the
/// mass row sum: barycentric areas leave an O(1) pointwise error on irregular
/// triangulations such as geodesic spheres. Rows of `K` sum to zero, so `(Ku)_i`
/// is evaluated as `Σ_j K_ij (u_j − u_i)`, which returns exactly zero on constants.
pub fn apply_drifted_laplacian(forms: &WeightedForms, u: &VertexField) -> Result<Vec<f64>> {
    forms.check_len(u.values())?;
    let u = u.values();
    Ok((0..forms.dim())
        .map(|i| {
            let ku: f64 = forms
                .stiffness
                .row(i)
                .filter(|&(j, _)| j != i)
                .map(|(j, k)| k * (u[j] - u[i]))
                .sum();
            -ku / forms.vertex_measure[i]
        })
        .collect())
}

/// Closed-form gauge potential `¼|H⃗|² + f/4 + R̄/4 − dim M̄/4 + ½∇̄∇̄f(ν,ν)`.
pub fn schrodinger_potential(shape: &CatalogShape, point: &[f64]) -> Result<f64> {
    shape.schrodinger_potential(point)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub samples: usize,
    /// `min (V − (f/4 − dim M̄/4))` over the samples.
    pub min_slack: f64,
    pub passed: bool,
}

/// Checks `V ≥ f/4 − dim M̄/4` at every sample point.
pub fn potential_lower_bound_check(shape: &CatalogShape, samples: &[Vec<f64>]) -> Result<LowerBoundReport> {
    let ambient = shape.ambient();
    let dim = ambient.dim() as f64;
    let mut min_slack = f64::INFINITY;
    for x in samples {
        let v = shape.schrodinger_potential(x)?;
        let bound = ambient.potential(x)? / 4.0 - dim / 4.0;
        min_slack = min_slack.min(v - bound);
    }
    Ok(LowerBoundReport {
        samples: samples.len(),
        min_slack,
        passed: samples.is_empty() || min_slack >= -1e-12,
    })
}
