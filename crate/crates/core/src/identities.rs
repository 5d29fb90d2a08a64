//! Numerical checks of the weighted identities satisfied by coordinate
//! functions on self-shrinkers.
//!
//! Weak checks use `‖Ku − λMu‖_{D⁻¹} / ‖u‖_M` with `D` the lumped mass.
//! Pointwise checks compare `−D⁻¹K` (mixed-area `D`) against closed forms at interior
//! vertices and measure the mismatch in the gauge frame, `|lhs − rhs|·e^{−f/2}`,
//! which is the natural scale for an error in `L²_f`; the unweighted maximum is
//! reported alongside.

use serde::Serialize;

use crate::geometry::{euclidean_potential, CatalogShape};
use crate::linalg::{dot, norm_sq};
use crate::mesh::{Mesh, VertexField};
use crate::operator::{apply_drifted_laplacian, assemble, WeightedForms};
use crate::{Error, Result};

/// Default absolute tolerance of the mean-zero check on closed meshes.
pub const MEAN_ZERO_TOL_CLOSED: f64 = 1e-10;
/// Default absolute tolerance of the mean-zero check on truncated meshes.
pub const MEAN_ZERO_TOL_TRUNCATED: f64 = 1e-6;
/// Relative tolerance of the orthogonality check.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Shape classes with separately calibrated discretization constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceFamily {
    Sphere,
    Cylinder,
    Hyperplane,
}

impl ToleranceFamily {
    pub fn of_mesh(mesh: &Mesh) -> Self {
        match mesh.shape() {
            Some(CatalogShape::RoundSphere { .. } | CatalogShape::SolitonSphereProduct { .. }) => Self::Sphere,
            Some(CatalogShape::SphereCylinder { n, k, .. }) if n == k => Self::Sphere,
            Some(CatalogShape::SphereCylinder { .. }) => Self::Cylinder,
            Some(CatalogShape::Hyperplane { .. } | CatalogShape::SolitonHyperplaneProduct { .. }) => Self::Hyperplane,
            None if mesh.is_closed() => Self::Sphere,
            None => Self::Cylinder,
        }
    }
}

/// Which identity a tolerance applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Weak residual of `Δ_f⟨x,v⟩ = −½⟨x,v⟩`.
    Coordinate,
    /// Pointwise `|x|²` identity and inequalities.
    Pointwise,
    /// Weak residual of `Δ_f⟨ν,v⟩ + |A|²⟨ν,v⟩ = 0`.
    Stability,
    /// Sup-norm of `H⃗ + (∇̄f)^⊥`.
    FMinimal,
}

/// `C` in `tol(h) = C·h`: about three times the largest `residual / h` seen in
/// refinement studies on the catalog meshes of each family.
pub fn tolerance_coefficient(kind: CheckKind, family: ToleranceFamily) -> f64 {
    use CheckKind::*;
    use ToleranceFamily::*;
    match (kind, family) {
        (Coordinate, Sphere) => 0.08,
        (Coordinate, Cylinder) => 0.06,
        (Coordinate, Hyperplane) => 0.1,
        (Pointwise, Sphere) => 0.2,
        (Pointwise, Cylinder) => 0.5,
        (Pointwise, Hyperplane) => 1.0,
        (Stability, Sphere) => 0.08,
        (Stability, Cylinder) => 0.06,
        (Stability, Hyperplane) => 0.1,
        (FMinimal, Sphere) => 0.04,
        (FMinimal, Cylinder) => 0.05,
        (FMinimal, Hyperplane) => 0.05,
    }
}

/// `tol(h) = C·h` with `h` the longest edge.
pub fn tolerance(kind: CheckKind, mesh: &Mesh) -> f64 {
    tolerance_coefficient(kind, ToleranceFamily::of_mesh(mesh)) * mesh.max_edge_length()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshSummary {
    pub shape: Option<String>,
    pub dim: usize,
    pub manifold_dim: usize,
    pub vertices: usize,
    pub elements: usize,
    pub max_edge_length: f64,
    pub closed: bool,
    pub truncation_radius: Option<f64>,
}

impl MeshSummary {
    pub fn of(mesh: &Mesh) -> Self {
        Self {
            shape: mesh.shape().map(|s| s.variant_name().to_owned()),
            dim: mesh.dim(),
            manifold_dim: mesh.manifold_dim(),
            vertices: mesh.num_vertices(),
            elements: mesh.num_elements(),
            max_edge_length: mesh.max_edge_length(),
            closed: mesh.is_closed(),
            truncation_radius: mesh.truncation().map(|t| t.radius),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub mesh: MeshSummary,
}

impl IdentityReport {
    fn new(id: &str, mesh: &Mesh, lhs: Option<f64>, rhs: Option<f64>, residual: f64, tol: f64) -> Self {
        Self {
            id: id.to_owned(),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual.abs() <= tol,
            skipped: false,
            note: None,
            mesh: MeshSummary::of(mesh),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// `Σ u_i μ_i` with `μ` the weighted vertex measure.
pub fn weighted_integral(mesh: &Mesh, u: &VertexField) -> Result<f64> {
    if u.len() != mesh.num_vertices() {
        return Err(Error::FieldMismatch {
            expected: mesh.num_vertices(),
            got: u.len(),
        });
    }
    let mu = mesh.weighted_vertex_measure();
    Ok(u.values().iter().zip(mu.values()).map(|(a, b)| a * b).sum())
}

/// `⟨u, w⟩` in `L²_f` with the lumped weighted measure.
pub fn weighted_inner(mesh: &Mesh, u: &VertexField, w: &VertexField) -> Result<f64> {
    let prod: Vec<f64> = u.values().iter().zip(w.values()).map(|(a, b)| a * b).collect();
    weighted_integral(mesh, &VertexField::new(prod, mesh)?)
}

/// `‖Ku − λMu‖_{D⁻¹} / ‖u‖_M`; the absolute norm when `u` vanishes.
pub fn weak_residual(forms: &WeightedForms, u: &[f64], lambda: f64) -> f64 {
    let ku = forms.stiffness().mul_vec(u);
    let mu = forms.mass().mul_vec(u);
    let num: f64 = ku
        .iter()
        .zip(&mu)
        .zip(forms.lumped_mass())
        .map(|((k, m), d)| (k - lambda * m).powi(2) / d)
        .sum::<f64>()
        .sqrt();
    let den = dot(u, &mu).sqrt();
    if den > 1e-12 {
        num / den
    } else {
        num
    }
}

fn coordinate_field(mesh: &Mesh, v: &[f64]) -> Result<VertexField> {
    if v.len() != mesh.stride() {
        return Err(Error::DimensionMismatch {
            expected: mesh.stride(),
            got: v.len(),
        });
    }
    Ok(VertexField::from_fn(mesh, |x| dot(x, v)))
}

/// Weak form of `Δ_f⟨x,v⟩ = −½⟨x,v⟩`.
pub fn check_coordinate_identity(mesh: &Mesh, v: &[f64]) -> Result<IdentityReport> {
    let forms = assemble(mesh)?;
    check_coordinate_identity_with(mesh, &forms, v)
}

pub fn check_coordinate_identity_with(mesh: &Mesh, forms: &WeightedForms, v: &[f64]) -> Result<IdentityReport> {
    let u = coordinate_field(mesh, v)?;
    let res = weak_residual(forms, u.values(), 0.5);
    let rq = forms.rayleigh_quotient(&u).unwrap_or(f64::NAN);
    let lhs = rq.is_finite().then_some(rq);
    Ok(IdentityReport::new(
        "coordinate-eigenfunction",
        mesh,
        lhs,
        Some(0.5),
        res,
        tolerance(CheckKind::Coordinate, mesh),
    ))
}

/// Gauge-frame and raw maxima of `|a − b|` over interior vertices.
fn interior_mismatch(mesh: &Mesh, a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut gauge = 0.0_f64;
    let mut raw = 0.0_f64;
    for i in (0..mesh.num_vertices()).filter(|&i| !mesh.is_boundary(i)) {
        let d = (a[i] - b[i]).abs();
        raw = raw.max(d);
        gauge = gauge.max(d * (-0.5 * euclidean_potential(mesh.vertex(i))).exp());
    }
    (gauge, raw)
}

/// Pointwise `Δ_f|x|² = −|x|² + 2p − 2|proj ν|²` (one report) and the interval
/// `−Σxᵢ² + 2(j − 1) ≤ Δ_f Σ₁ʲ xᵢ² ≤ −Σxᵢ² + 2j` (second report).
pub fn check_xsq_identities(mesh: &Mesh, j: usize) -> Result<Vec<IdentityReport>> {
    let forms = assemble(mesh)?;
    check_xsq_identities_with(mesh, &forms, j)
}

pub fn check_xsq_identities_with(mesh: &Mesh, forms: &WeightedForms, j: usize) -> Result<Vec<IdentityReport>> {
    let p = mesh.stride();
    if j == 0 || j > p {
        return Err(Error::InvalidParameter(format!("coordinate count must be in 1..={p}, got {j}")));
    }
    if mesh.interior_count() == 0 {
        return Err(Error::InvalidMesh("mesh has no interior vertices".into()));
    }
    let normals = mesh.vertex_normals()?;
    let tol = tolerance(CheckKind::Pointwise, mesh);

    let xsq = VertexField::from_fn(mesh, norm_sq);
    let lhs = apply_drifted_laplacian(forms, &xsq)?;
    let rhs: Vec<f64> = (0..mesh.num_vertices())
        .map(|i| -xsq.values()[i] + 2.0 * p as f64 - 2.0 * norm_sq(&normals[i]))
        .collect();
    let (gauge, raw) = interior_mismatch(mesh, &lhs, &rhs);
    let first_interior = (0..mesh.num_vertices()).find(|&i| !mesh.is_boundary(i)).unwrap();
    let full = IdentityReport::new(
        "xsq-laplacian",
        mesh,
        Some(lhs[first_interior]),
        Some(rhs[first_interior]),
        gauge,
        tol,
    )
    .with_note(format!("unweighted max mismatch {raw:e}"));

    let partial = VertexField::from_fn(mesh, |x| norm_sq(&x[..j]));
    let lap = apply_drifted_laplacian(forms, &partial)?;
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    let mut violation = 0.0_f64;
    for i in (0..mesh.num_vertices()).filter(|&i| !mesh.is_boundary(i)) {
        let s = partial.values()[i];
        let w = (-0.5 * euclidean_potential(mesh.vertex(i))).exp();
        let lower = lap[i] - (-s + 2.0 * (j as f64 - 1.0));
        let upper = (-s + 2.0 * j as f64) - lap[i];
        min_lower = min_lower.min(lower * w);
        min_upper = min_upper.min(upper * w);
        violation = violation.max(-lower * w).max(-upper * w);
    }
    let interval = IdentityReport::new(
        "xsq-partial-bounds",
        mesh,
        Some(min_lower),
        Some(min_upper),
        violation.max(0.0),
        tol,
    )
    .with_note(format!("j = {j}; lhs/rhs are the minimum lower/upper slacks"));
    Ok(vec![full, interval])
}

/// Integrability premise under which the mean-zero property is asserted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanZeroMode {
    /// `u` does not change sign.
    SignDefinite,
    /// `|∇u| ∈ L¹_f`.
    L1,
}

/// `∫Δ_f u·e^{−f} = −1ᵀKu`, which vanishes when either premise holds.
pub fn check_mean_zero(mesh: &Mesh, u: &VertexField, mode: MeanZeroMode) -> Result<IdentityReport> {
    let forms = assemble(mesh)?;
    check_mean_zero_with(mesh, &forms, u, mode)
}

pub fn check_mean_zero_with(
    mesh: &Mesh,
    forms: &WeightedForms,
    u: &VertexField,
    mode: MeanZeroMode,
) -> Result<IdentityReport> {
    if u.len() != forms.dim() {
        return Err(Error::FieldMismatch {
            expected: forms.dim(),
            got: u.len(),
        });
    }
    let ku = forms.stiffness().mul_vec(u.values());
    let value = -ku.iter().sum::<f64>();
    let tol = if mesh.is_closed() {
        MEAN_ZERO_TOL_CLOSED
    } else {
        MEAN_ZERO_TOL_TRUNCATED
    };
    let note = match mode {
        MeanZeroMode::SignDefinite => {
            let min = u.values().iter().copied().fold(f64::INFINITY, f64::min);
            let max = u.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if min < 0.0 && max > 0.0 {
                "sign-definite premise fails: field changes sign".to_owned()
            } else {
                "sign-definite".to_owned()
            }
        }
        MeanZeroMode::L1 => {
            let grad_l1: f64 = (0..mesh.num_elements())
                .map(|e| {
                    let g = mesh.element(e);
                    let mut q = 0.0;
                    for (a, &i) in g.nodes().iter().enumerate() {
                        for (b, &jj) in g.nodes().iter().enumerate() {
                            q += g.stiffness[a][b] * u.values()[i] * u.values()[jj];
                        }
                    }
                    let w = (-euclidean_potential(&g.centroid[..mesh.stride()])).exp();
                    (q.max(0.0) * g.measure).sqrt() * w
                })
                .sum();
            format!("∫|∇u|e^(-f) = {grad_l1:e}")
        }
    };
    Ok(IdentityReport::new("mean-zero", mesh, Some(value), Some(0.0), value, tol).with_note(note))
}

/// `|⟨u,w⟩_{L²_f}| ≤ tol·‖u‖‖w‖` for eigenfunctions with distinct eigenvalues.
pub fn check_orthogonality(
    mesh: &Mesh,
    u: &VertexField,
    w: &VertexField,
    lambda_u: f64,
    lambda_w: f64,
) -> Result<IdentityReport> {
    let inner = weighted_inner(mesh, u, w)?;
    let nu = weighted_inner(mesh, u, u)?.sqrt();
    let nw = weighted_inner(mesh, w, w)?.sqrt();
    // a vanishing field is orthogonal to everything; keep an absolute floor
    let tol = (ORTHOGONALITY_TOL * nu * nw).max(1e-14);
    let r = IdentityReport::new("orthogonality", mesh, Some(inner), Some(0.0), inner, tol);
    if lambda_u == lambda_w {
        // not implied by self-adjointness; the value is still reported
        let mut r = r.with_note("equal eigenvalues: theorem check skipped");
        r.skipped = true;
        return Ok(r);
    }
    Ok(r)
}

/// Weak form of `Δ_f⟨ν,v⟩ + |A|²⟨ν,v⟩ = 0` with discrete normals.
pub fn check_stability_equation(shape: &CatalogShape, mesh: &Mesh, v: &[f64]) -> Result<IdentityReport> {
    let forms = assemble(mesh)?;
    check_stability_equation_with(shape, mesh, &forms, v)
}

pub fn check_stability_equation_with(
    shape: &CatalogShape,
    mesh: &Mesh,
    forms: &WeightedForms,
    v: &[f64],
) -> Result<IdentityReport> {
    if v.len() != mesh.stride() {
        return Err(Error::DimensionMismatch {
            expected: mesh.stride(),
            got: v.len(),
        });
    }
    let a2 = shape.second_fundamental_norm_const();
    let u = (0..mesh.num_vertices())
        .map(|i| exact_normal(shape, mesh.vertex(i)).map(|nu| dot(&nu, v)))
        .collect::<Result<Vec<f64>>>()?;
    let res = weak_residual(forms, &u, a2);
    Ok(IdentityReport::new(
        "stability",
        mesh,
        forms.rayleigh_quotient(&VertexField::new(u, mesh)?).ok().filter(|x| x.is_finite()),
        Some(a2),
        res,
        tolerance(CheckKind::Stability, mesh),
    ))
}

/// Normal of `shape` at a mesh vertex. Soliton meshes only carry the Euclidean
/// factor, so the point is padded with a point of the sphere factor.
fn exact_normal(shape: &CatalogShape, x: &[f64]) -> Result<Vec<f64>> {
    let ambient = shape.ambient();
    let mut point = x.to_vec();
    if let (Some(k), Some(r)) = (ambient.sphere_dim(), ambient.sphere_radius()) {
        if point.len() + k + 1 == ambient.point_len() {
            point.push(r);
            point.extend(std::iter::repeat_n(0.0, k));
        }
    }
    let mut nu = shape.unit_normal(&point)?;
    nu.truncate(x.len());
    Ok(nu)
}

/// f-minimality of the sampled surface: `sup |H⃗ + (∇̄f)^⊥|` against `tol(h)`.
pub fn check_fminimal(mesh: &Mesh) -> Result<IdentityReport> {
    let r = mesh.fminimal_residual()?;
    Ok(IdentityReport::new(
        "f-minimal",
        mesh,
        Some(r.sup_norm),
        Some(0.0),
        r.sup_norm,
        tolerance(CheckKind::FMinimal, mesh),
    )
    .with_note(format!("weighted L2 {:e}", r.weighted_l2)))
}
