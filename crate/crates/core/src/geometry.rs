//! Exact ambient solitons and the catalog of model hypersurfaces.
//!
//! Two ambient spaces are supported: the Gaussian soliton `R^p` and the round
//! cylinder soliton `R^p × S^k` whose sphere factor has radius `√(2(k−1))`.
//! Both carry the potential `f(x, y) = |x|²/4`, where `x` is the position in the
//! Euclidean factor.
//!
//! Points of `R^p × S^k` are stored as the concatenation `(x, y)` with
//! `x ∈ R^p` and `y ∈ R^{k+1}`, `|y| = √(2(k−1))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm, norm_sq, orthonormal_complement, scale, sub};
use crate::{Error, Result};

/// Tolerance for on-surface / on-ambient preconditions.
pub const SURFACE_TOL: f64 = 1e-9;
/// Unit-length tolerance for direction vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum AmbientSoliton {
    Gaussian { p: usize },
    CylinderSoliton { p: usize, k: usize },
}

impl AmbientSoliton {
    pub fn gaussian(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("Gaussian ambient needs p >= 1".into()));
        }
        Ok(Self::Gaussian { p })
    }

    pub fn cylinder(p: usize, k: usize) -> Result<Self> {
        if p == 0 || k < 2 {
            return Err(Error::InvalidParameter(format!(
                "cylinder soliton needs p >= 1 and k >= 2 (got p={p}, k={k})"
            )));
        }
        Ok(Self::CylinderSoliton { p, k })
    }

    /// Dimension `p` of the Euclidean factor.
    pub fn euclidean_dim(&self) -> usize {
        match *self {
            Self::Gaussian { p } | Self::CylinderSoliton { p, .. } => p,
        }
    }

    pub fn sphere_dim(&self) -> Option<usize> {
        match *self {
            Self::Gaussian { .. } => None,
            Self::CylinderSoliton { k, .. } => Some(k),
        }
    }

    /// Radius `√(2(k−1))` of the sphere factor.
    pub fn sphere_radius(&self) -> Option<f64> {
        self.sphere_dim().map(|k| (2.0 * (k as f64 - 1.0)).sqrt())
    }

    /// Intrinsic dimension of the ambient manifold.
    pub fn dim(&self) -> usize {
        self.euclidean_dim() + self.sphere_dim().unwrap_or(0)
    }

    /// Number of coordinates of an ambient point in its standard embedding.
    pub fn point_len(&self) -> usize {
        self.euclidean_dim() + self.sphere_dim().map_or(0, |k| k + 1)
    }

    /// Scalar curvature; the sphere factor `S^k_R` contributes `k(k−1)/R²`.
    pub fn scalar_curvature(&self) -> f64 {
        match (self.sphere_dim(), self.sphere_radius()) {
            (Some(k), Some(r)) => (k * (k - 1)) as f64 / (r * r),
            _ => 0.0,
        }
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.point_len() {
            return Err(Error::DimensionMismatch {
                expected: self.point_len(),
                got: point.len(),
            });
        }
        if let Some(r) = self.sphere_radius() {
            let y = &point[self.euclidean_dim()..];
            let defect = (norm(y) - r).abs();
            if defect > SURFACE_TOL * r.max(1.0) {
                return Err(Error::OffSurface {
                    defect,
                    tol: SURFACE_TOL,
                });
            }
        }
        Ok(())
    }

    /// `f = |x|²/4`, independent of the sphere coordinates.
    pub fn potential(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        Ok(euclidean_potential(&point[..self.euclidean_dim()]))
    }

    /// `∇̄f = x/2`, embedded with zero sphere components.
    pub fn potential_gradient(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point)?;
        let p = self.euclidean_dim();
        let mut g = vec![0.0; point.len()];
        for i in 0..p {
            g[i] = 0.5 * point[i];
        }
        Ok(g)
    }

    /// `∇̄∇̄f(u, w) = ½⟨u_x, w_x⟩`.
    pub fn potential_hessian(&self, u: &[f64], w: &[f64]) -> f64 {
        let p = self.euclidean_dim();
        0.5 * dot(&u[..p], &w[..p])
    }

    /// Ricci tensor of the product metric. The Euclidean factor is flat, the round
    /// `S^k_R` has `ric = (k−1)/R² · g`.
    pub fn ricci(&self, u: &[f64], w: &[f64]) -> f64 {
        match (self.sphere_dim(), self.sphere_radius()) {
            (Some(k), Some(r)) => {
                let p = self.euclidean_dim();
                (k as f64 - 1.0) / (r * r) * dot(&u[p..], &w[p..])
            }
            _ => 0.0,
        }
    }

    /// `(ric_f − ½g)(u, w)`; zero on a normalized gradient shrinking soliton.
    pub fn bakry_emery_residual(&self, point: &[f64], u: &[f64], w: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        for d in [u, w] {
            if d.len() != point.len() {
                return Err(Error::DimensionMismatch {
                    expected: point.len(),
                    got: d.len(),
                });
            }
        }
        if let Some(r) = self.sphere_radius() {
            let p = self.euclidean_dim();
            for d in [u, w] {
                let defect = dot(&d[p..], &point[p..]).abs() / r;
                if defect > SURFACE_TOL * norm(d).max(1.0) {
                    return Err(Error::NonTangent(defect));
                }
            }
        }
        Ok(self.potential_hessian(u, w) + self.ricci(u, w) - 0.5 * dot(u, w))
    }
}

/// `|x|²/4` on Euclidean-factor coordinates.
pub fn euclidean_potential(x: &[f64]) -> f64 {
    0.25 * norm_sq(x)
}

/// Squared norm of the second fundamental form, with a flag set when only the
/// Euclidean-factor sphere contributes (soliton products).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondFundamentalNorm {
    pub value: f64,
    pub euclidean_factor_only: bool,
}

/// Exact parametric hypersurfaces.
///
/// `SphereCylinder { n, k, center, radius }` is `S^k(center, radius) × R^{n−k}` in
/// `R^{n+1}`, with the sphere factor in the first `k+1` coordinates.
/// `SolitonSphereProduct { n, k, radius }` is `S^{n−k}_radius × S^k_{√(2(k−1))}`
/// inside `R^{n+1−k} × S^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeDescriptor", into = "ShapeDescriptor")]
pub enum CatalogShape {
    RoundSphere {
        n: usize,
        center: Vec<f64>,
        radius: f64,
    },
    SphereCylinder {
        n: usize,
        k: usize,
        center: Vec<f64>,
        radius: f64,
    },
    Hyperplane {
        n: usize,
        normal: Vec<f64>,
    },
    SolitonSphereProduct {
        n: usize,
        k: usize,
        radius: f64,
    },
    SolitonHyperplaneProduct {
        n: usize,
        k: usize,
        normal: Vec<f64>,
    },
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

fn check_unit(v: &[f64], expected_len: usize) -> Result<()> {
    if v.len() != expected_len {
        return Err(Error::DimensionMismatch {
            expected: expected_len,
            got: v.len(),
        });
    }
    if (norm(v) - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!(
            "normal must have unit length, |v| = {}",
            norm(v)
        )));
    }
    Ok(())
}

impl CatalogShape {
    pub fn round_sphere(n: usize, center: Vec<f64>, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sphere dimension must be >= 1".into()));
        }
        check_radius(radius)?;
        if center.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: center.len(),
            });
        }
        Ok(Self::RoundSphere { n, center, radius })
    }

    /// `S^n(o, √(2n))`.
    pub fn shrinking_sphere(n: usize) -> Result<Self> {
        Self::round_sphere(n, vec![0.0; n + 1], (2.0 * n as f64).sqrt())
    }

    pub fn sphere_cylinder(n: usize, k: usize, center: Vec<f64>, radius: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "sphere-cylinder needs 1 <= k <= n (got n={n}, k={k})"
            )));
        }
        check_radius(radius)?;
        if center.len() != k + 1 {
            return Err(Error::DimensionMismatch {
                expected: k + 1,
                got: center.len(),
            });
        }
        Ok(Self::SphereCylinder {
            n,
            k,
            center,
            radius,
        })
    }

    /// `S^k(o, √(2k)) × R^{n−k}`.
    pub fn shrinking_cylinder(n: usize, k: usize) -> Result<Self> {
        Self::sphere_cylinder(n, k, vec![0.0; k + 1], (2.0 * k as f64).sqrt())
    }

    pub fn hyperplane(n: usize, normal: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("hyperplane dimension must be >= 1".into()));
        }
        check_unit(&normal, n + 1)?;
        Ok(Self::Hyperplane { n, normal })
    }

    pub fn soliton_sphere_product(n: usize, k: usize, radius: f64) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParameter(format!(
                "soliton product needs k < n (got n={n}, k={k})"
            )));
        }
        AmbientSoliton::cylinder(n + 1 - k, k)?;
        check_radius(radius)?;
        Ok(Self::SolitonSphereProduct { n, k, radius })
    }

    pub fn soliton_hyperplane_product(n: usize, k: usize, normal: Vec<f64>) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParameter(format!(
                "soliton product needs k < n (got n={n}, k={k})"
            )));
        }
        AmbientSoliton::cylinder(n + 1 - k, k)?;
        check_unit(&normal, n + 1 - k)?;
        Ok(Self::SolitonHyperplaneProduct { n, k, normal })
    }

    /// Hypersurface dimension.
    pub fn n(&self) -> usize {
        match *self {
            Self::RoundSphere { n, .. }
            | Self::SphereCylinder { n, .. }
            | Self::Hyperplane { n, .. }
            | Self::SolitonSphereProduct { n, .. }
            | Self::SolitonHyperplaneProduct { n, .. } => n,
        }
    }

    pub fn ambient(&self) -> AmbientSoliton {
        match *self {
            Self::RoundSphere { n, .. } | Self::SphereCylinder { n, .. } | Self::Hyperplane { n, .. } => {
                AmbientSoliton::Gaussian { p: n + 1 }
            }
            Self::SolitonSphereProduct { n, k, .. } | Self::SolitonHyperplaneProduct { n, k, .. } => {
                AmbientSoliton::CylinderSoliton { p: n + 1 - k, k }
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            Self::RoundSphere { .. } | Self::SolitonSphereProduct { .. } => true,
            Self::SphereCylinder { n, k, .. } => n == k,
            Self::Hyperplane { .. } | Self::SolitonHyperplaneProduct { .. } => false,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::RoundSphere { .. } => "RoundSphere",
            Self::SphereCylinder { .. } => "SphereCylinder",
            Self::Hyperplane { .. } => "Hyperplane",
            Self::SolitonSphereProduct { .. } => "SolitonSphereProduct",
            Self::SolitonHyperplaneProduct { .. } => "SolitonHyperplaneProduct",
        }
    }

    /// Sphere-type factor as (sphere dimension, center, radius); the sphere sits in
    /// the leading coordinates of the Euclidean factor.
    fn sphere_factor(&self) -> Option<(usize, Vec<f64>, f64)> {
        match self {
            Self::RoundSphere { n, center, radius } => Some((*n, center.clone(), *radius)),
            Self::SphereCylinder {
                k, center, radius, ..
            } => Some((*k, center.clone(), *radius)),
            Self::SolitonSphereProduct { n, k, radius } => Some((n - k, vec![0.0; n + 1 - k], *radius)),
            _ => None,
        }
    }

    /// Distance-like defect of `point` from the shape.
    pub fn surface_defect(&self, point: &[f64]) -> Result<f64> {
        let ambient = self.ambient();
        if point.len() != ambient.point_len() {
            return Err(Error::DimensionMismatch {
                expected: ambient.point_len(),
                got: point.len(),
            });
        }
        let p = ambient.euclidean_dim();
        let mut defect = match ambient.sphere_radius() {
            Some(r) => (norm(&point[p..]) - r).abs(),
            None => 0.0,
        };
        match self {
            Self::Hyperplane { normal, .. } | Self::SolitonHyperplaneProduct { normal, .. } => {
                defect = defect.max(dot(&point[..p], normal).abs());
            }
            _ => {
                let (k, center, r) = self.sphere_factor().expect("sphere-type shape");
                let rel = sub(&point[..=k], &center);
                defect = defect.max((norm(&rel) - r).abs());
            }
        }
        Ok(defect)
    }

    fn check_on_surface(&self, point: &[f64]) -> Result<()> {
        let defect = self.surface_defect(point)?;
        let scale = 1.0 + norm(point);
        if defect > SURFACE_TOL * scale {
            return Err(Error::OffSurface {
                defect,
                tol: SURFACE_TOL,
            });
        }
        Ok(())
    }

    /// Outward unit normal in ambient coordinates.
    pub fn unit_normal(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_on_surface(point)?;
        let mut nu = vec![0.0; point.len()];
        match self {
            Self::Hyperplane { normal, .. } | Self::SolitonHyperplaneProduct { normal, .. } => {
                nu[..normal.len()].copy_from_slice(normal);
            }
            _ => {
                let (k, center, r) = self.sphere_factor().expect("sphere-type shape");
                for i in 0..=k {
                    nu[i] = (point[i] - center[i]) / r;
                }
            }
        }
        Ok(nu)
    }

    /// Mean curvature vector `H⃗ = tr A`. Spheres of dimension `k` and radius `r`
    /// contribute `−(k/r)ν`; flat factors and the soliton's sphere factor contribute
    /// nothing.
    pub fn mean_curvature_vector(&self, point: &[f64]) -> Result<Vec<f64>> {
        let nu = self.unit_normal(point)?;
        Ok(match self.sphere_factor() {
            Some((k, _, r)) => scale(&nu, -(k as f64) / r),
            None => vec![0.0; point.len()],
        })
    }

    /// `H⃗ + (∇̄f)^⊥`; identically zero exactly on self-shrinkers.
    pub fn shrinker_residual(&self, point: &[f64]) -> Result<Vec<f64>> {
        let nu = self.unit_normal(point)?;
        let h = self.mean_curvature_vector(point)?;
        let grad = self.ambient().potential_gradient(point)?;
        let c = dot(&grad, &nu);
        Ok(h.iter().zip(&nu).map(|(hi, ni)| hi + c * ni).collect())
    }

    /// `|A|²` of the hypersurface, constant on every catalog shape.
    pub fn second_fundamental_norm(&self, point: &[f64]) -> Result<SecondFundamentalNorm> {
        self.check_on_surface(point)?;
        let value = match self.sphere_factor() {
            Some((k, _, r)) => k as f64 / (r * r),
            None => 0.0,
        };
        Ok(SecondFundamentalNorm {
            value,
            euclidean_factor_only: matches!(
                self,
                Self::SolitonSphereProduct { .. } | Self::SolitonHyperplaneProduct { .. }
            ),
        })
    }

    /// Constant `|A|²` without a base point.
    pub fn second_fundamental_norm_const(&self) -> f64 {
        match self.sphere_factor() {
            Some((k, _, r)) => k as f64 / (r * r),
            None => 0.0,
        }
    }

    /// Potential of the unitarily equivalent Schrödinger operator,
    /// `¼|∇f|² − ½Δf = ¼|H⃗|² + f/4 + R̄/4 − dim M̄/4 + ½ ∇̄∇̄f(ν, ν)`.
    pub fn schrodinger_potential(&self, point: &[f64]) -> Result<f64> {
        let ambient = self.ambient();
        let h = self.mean_curvature_vector(point)?;
        let nu = self.unit_normal(point)?;
        let f = ambient.potential(point)?;
        Ok(0.25 * norm_sq(&h) + 0.25 * f + 0.25 * ambient.scalar_curvature()
            - 0.25 * ambient.dim() as f64
            + 0.5 * ambient.potential_hessian(&nu, &nu))
    }

    /// Deterministic sample of points on the shape. Flat directions are sampled
    /// uniformly in `[−extent, extent]`.
    pub fn sample_points(&self, count: usize, seed: u64, extent: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = self.ambient();
        let p = ambient.euclidean_dim();
        let uniform = Uniform::new_inclusive(-extent, extent).expect("finite extent");
        let random_unit = |d: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
            loop {
                let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let n = norm(&g);
                if n > 1e-8 {
                    return scale(&g, 1.0 / n);
                }
            }
        };
        (0..count)
            .map(|_| {
                let mut x = vec![0.0; ambient.point_len()];
                match self {
                    Self::Hyperplane { normal, .. } | Self::SolitonHyperplaneProduct { normal, .. } => {
                        for b in orthonormal_complement(normal) {
                            let c: f64 = uniform.sample(&mut rng);
                            for i in 0..p {
                                x[i] += c * b[i];
                            }
                        }
                    }
                    _ => {
                        let (k, center, r) = self.sphere_factor().expect("sphere-type shape");
                        let u = random_unit(k + 1, &mut rng);
                        for i in 0..=k {
                            x[i] = center[i] + r * u[i];
                        }
                        for xi in x.iter_mut().take(p).skip(k + 1) {
                            *xi = uniform.sample(&mut rng);
                        }
                    }
                }
                if let (Some(k), Some(r)) = (ambient.sphere_dim(), ambient.sphere_radius()) {
                    let u = random_unit(k + 1, &mut rng);
                    for i in 0..=k {
                        x[p + i] = r * u[i];
                    }
                }
                x
            })
            .collect()
    }
}

/// JSON form of a [`CatalogShape`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    pub variant: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
}

impl From<CatalogShape> for ShapeDescriptor {
    fn from(shape: CatalogShape) -> Self {
        let variant = shape.variant_name().to_string();
        let mut d = ShapeDescriptor {
            variant,
            n: shape.n(),
            k: None,
            radius: None,
            center: None,
            normal: None,
        };
        match shape {
            CatalogShape::RoundSphere { center, radius, .. } => {
                d.radius = Some(radius);
                d.center = Some(center);
            }
            CatalogShape::SphereCylinder {
                k, center, radius, ..
            } => {
                d.k = Some(k);
                d.radius = Some(radius);
                d.center = Some(center);
            }
            CatalogShape::Hyperplane { normal, .. } => d.normal = Some(normal),
            CatalogShape::SolitonSphereProduct { k, radius, .. } => {
                d.k = Some(k);
                d.radius = Some(radius);
            }
            CatalogShape::SolitonHyperplaneProduct { k, normal, .. } => {
                d.k = Some(k);
                d.normal = Some(normal);
            }
        }
        d
    }
}

impl TryFrom<ShapeDescriptor> for CatalogShape {
    type Error = Error;

    fn try_from(d: ShapeDescriptor) -> Result<Self> {
        let missing = |field: &str| Error::Parse(format!("{} descriptor needs \"{field}\"", d.variant));
        let n = d.n;
        match d.variant.as_str() {
            "RoundSphere" => {
                let radius = d.radius.ok_or_else(|| missing("radius"))?;
                let center = d.center.clone().unwrap_or_else(|| vec![0.0; n + 1]);
                CatalogShape::round_sphere(n, center, radius)
            }
            "SphereCylinder" => {
                let k = d.k.ok_or_else(|| missing("k"))?;
                let radius = d.radius.ok_or_else(|| missing("radius"))?;
                let center = d.center.clone().unwrap_or_else(|| vec![0.0; k + 1]);
                CatalogShape::sphere_cylinder(n, k, center, radius)
            }
            "Hyperplane" => {
                let normal = d.normal.clone().ok_or_else(|| missing("normal"))?;
                CatalogShape::hyperplane(n, normal)
            }
            "SolitonSphereProduct" => {
                let k = d.k.ok_or_else(|| missing("k"))?;
                let radius = d.radius.ok_or_else(|| missing("radius"))?;
                CatalogShape::soliton_sphere_product(n, k, radius)
            }
            "SolitonHyperplaneProduct" => {
                let k = d.k.ok_or_else(|| missing("k"))?;
                let normal = d.normal.clone().ok_or_else(|| missing("normal"))?;
                CatalogShape::soliton_hyperplane_product(n, k, normal)
            }
            other => Err(Error::Parse(format!("unknown shape variant \"{other}\""))),
        }
    }
}

/// Parameter `t` of a member of the sphere collection; `Infinite` is the
/// hyperplane `⟨x, p⟩ = 0`, never a large-`t` stand-in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MemberParameter {
    Finite(f64),
    Infinite,
}

/// The sphere `S^n(tp, √(2n + t²))`, or the hyperplane `⟨x, p⟩ = 0` for `t = ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereFamilyMember {
    direction: Vec<f64>,
    parameter: MemberParameter,
}

impl SphereFamilyMember {
    pub fn new(direction: Vec<f64>, parameter: MemberParameter) -> Result<Self> {
        if direction.len() < 2 {
            return Err(Error::InvalidParameter("direction must live in R^{n+1}, n >= 1".into()));
        }
        let len = direction.len();
        check_unit(&direction, len)?;
        if let MemberParameter::Finite(t) = parameter {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
            }
        }
        Ok(Self { direction, parameter })
    }

    pub fn finite(direction: Vec<f64>, t: f64) -> Result<Self> {
        Self::new(direction, MemberParameter::Finite(t))
    }

    pub fn infinite(direction: Vec<f64>) -> Result<Self> {
        Self::new(direction, MemberParameter::Infinite)
    }

    pub fn n(&self) -> usize {
        self.direction.len() - 1
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn parameter(&self) -> MemberParameter {
        self.parameter
    }

    pub fn center(&self) -> Option<Vec<f64>> {
        match self.parameter {
            MemberParameter::Finite(t) => Some(scale(&self.direction, t)),
            MemberParameter::Infinite => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self.parameter {
            MemberParameter::Finite(t) => Some((2.0 * self.n() as f64 + t * t).sqrt()),
            MemberParameter::Infinite => None,
        }
    }

    /// `|x − tp|² − (2n + t²)`, evaluated as `|x|² − 2t⟨x, p⟩ − 2n` so that large `t`
    /// does not cancel; `⟨x, p⟩` for the hyperplane member.
    pub fn defining_function(&self, x: &[f64]) -> f64 {
        let xp = dot(x, &self.direction);
        match self.parameter {
            MemberParameter::Finite(t) => norm_sq(x) - 2.0 * t * xp - 2.0 * self.n() as f64,
            MemberParameter::Infinite => xp,
        }
    }
}

/// Parametric families whose self-shrinker members are found by [`rigidity_roots`].
/// `None` leaves a parameter free; `Some` pins it.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeFamily {
    SphereCylinder {
        n: usize,
        k: usize,
        center: Option<Vec<f64>>,
        radius: Option<f64>,
    },
    SolitonSphereProduct {
        n: usize,
        k: usize,
        radius: Option<f64>,
    },
}

/// Number of sampled points used to confirm each root.
pub const ROOT_VERIFICATION_SAMPLES: usize = 64;

/// Parameters at which the family's shrinker residual vanishes identically.
///
/// For `S^k(v, r) × R^{n−k}` the residual is `(r/2 − k/r + ½⟨v, ν⟩) ν`, an affine
/// function of `ν ∈ S^k`; it vanishes for every `ν` iff `v = 0` and `r² = 2k`.
/// For `S^{n−k}_r × S^k` in the cylinder soliton the coefficient is
/// `r/2 − (n−k)/r`, so `r² = 2(n−k)`.
pub fn rigidity_roots(family: &ShapeFamily) -> Result<Vec<CatalogShape>> {
    let candidate = match family {
        ShapeFamily::SphereCylinder {
            n,
            k,
            center,
            radius,
        } => {
            let root_r = (2.0 * *k as f64).sqrt();
            let center_ok = center.as_ref().is_none_or(|v| norm(v) <= SURFACE_TOL);
            let radius_ok = radius.is_none_or(|r| (r - root_r).abs() <= SURFACE_TOL);
            if center_ok && radius_ok {
                Some(CatalogShape::sphere_cylinder(*n, *k, vec![0.0; k + 1], root_r)?)
            } else {
                None
            }
        }
        ShapeFamily::SolitonSphereProduct { n, k, radius } => {
            if k >= n {
                return Err(Error::InvalidParameter(format!(
                    "soliton product needs k < n (got n={n}, k={k})"
                )));
            }
            let root_r = (2.0 * (n - k) as f64).sqrt();
            if radius.is_none_or(|r| (r - root_r).abs() <= SURFACE_TOL) {
                Some(CatalogShape::soliton_sphere_product(*n, *k, root_r)?)
            } else {
                None
            }
        }
    };
    let mut roots = Vec::new();
    if let Some(shape) = candidate {
        if residual_sup(&shape, ROOT_VERIFICATION_SAMPLES, crate::DEFAULT_SEED)? < 1e-12 {
            roots.push(shape);
        }
    }
    Ok(roots)
}

/// Sup-norm of the shrinker residual over `count` sampled points.
pub fn residual_sup(shape: &CatalogShape, count: usize, seed: u64) -> Result<f64> {
    let mut sup = 0.0_f64;
    for x in shape.sample_points(count, seed, 4.0) {
        sup = sup.max(norm(&shape.shrinker_residual(&x)?));
    }
    Ok(sup)
}
