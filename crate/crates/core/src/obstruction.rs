//! Obstruction scans: intersection with the sphere collection `S(tp, √(2n+t²))`,
//! ball-product and halfspace containment, and the Gauss-image spread.
//!
//! Every test evaluates a defining function `g` (negative inside) at the mesh
//! vertices and at the chord midpoints of every edge. Quadratic `g` can change
//! sign inside an edge whose endpoints agree, which the midpoints catch in
//! practice.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{AmbientSoliton, SphereFamilyMember};
use crate::linalg::{dot, norm, norm_sq};
use crate::mesh::Mesh;
use crate::spectral::format_g6;
use crate::{Error, Result};

/// `|g|` below this counts as contact, i.e. intersection of closed sets.
pub const CONTACT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Inside,
    Outside,
    Crosses,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentVerdict {
    pub classification: Classification,
    /// `min g` over vertices.
    pub margin: f64,
    /// `max g` over vertices.
    pub max: f64,
    /// Vertices with `|g| < CONTACT_TOL`.
    pub contacts: usize,
    /// Whether `g` takes both strict signs over vertices and edge midpoints.
    pub sign_change: bool,
    /// Vertices attaining `min g` and `max g`.
    pub witnesses: Vec<usize>,
}

impl ContainmentVerdict {
    /// Crossing by contact only is reported on the side the mesh stays on.
    pub fn describe(&self) -> &'static str {
        match self.classification {
            Classification::Inside => "inside",
            Classification::Outside => "outside",
            Classification::Crosses if self.sign_change => "crosses",
            Classification::Crosses if self.max > CONTACT_TOL => "outside-with-contact",
            Classification::Crosses => "inside-with-contact",
        }
    }

    pub fn intersects(&self) -> bool {
        self.classification == Classification::Crosses
    }

    /// Smallest `|g|` over vertices.
    pub fn min_abs(&self) -> f64 {
        if self.sign_change || self.contacts > 0 {
            0.0
        } else {
            self.margin.abs().min(self.max.abs())
        }
    }
}

fn verdict(mesh: &Mesh, g: impl Fn(&[f64]) -> f64 + Sync) -> ContainmentVerdict {
    let values: Vec<f64> = (0..mesh.num_vertices()).map(|i| g(mesh.vertex(i))).collect();
    let s = mesh.stride();
    let mut mid = vec![0.0; s];
    let (mut neg, mut pos) = (false, false);
    for &v in &values {
        neg |= v < -CONTACT_TOL;
        pos |= v > CONTACT_TOL;
    }
    if !(neg && pos) {
        for [a, b] in mesh.unique_edges() {
            for (c, m) in mid.iter_mut().enumerate() {
                *m = 0.5 * (mesh.vertex(a)[c] + mesh.vertex(b)[c]);
            }
            let v = g(&mid);
            neg |= v < -CONTACT_TOL;
            pos |= v > CONTACT_TOL;
        }
    }
    let (mut lo, mut hi) = (0, 0);
    for (i, &v) in values.iter().enumerate() {
        if v < values[lo] {
            lo = i;
        }
        if v > values[hi] {
            hi = i;
        }
    }
    let contacts = values.iter().filter(|v| v.abs() < CONTACT_TOL).count();
    let sign_change = neg && pos;
    let classification = if sign_change || contacts > 0 {
        Classification::Crosses
    } else if values[hi] < 0.0 {
        Classification::Inside
    } else {
        Classification::Outside
    };
    let mut witnesses = vec![lo];
    if hi != lo {
        witnesses.push(hi);
    }
    ContainmentVerdict {
        classification,
        margin: values[lo],
        max: values[hi],
        contacts,
        sign_change,
        witnesses,
    }
}

fn gaussian_dim(mesh: &Mesh) -> Result<usize> {
    match mesh.ambient() {
        AmbientSoliton::Gaussian { .. } => Ok(mesh.dim()),
        other => Err(Error::Unsupported(format!("test needs a Gaussian ambient, got {other:?}"))),
    }
}

fn check_direction(mesh: &Mesh, p: &[f64]) -> Result<()> {
    if p.len() != mesh.stride() {
        return Err(Error::DimensionMismatch {
            expected: mesh.stride(),
            got: p.len(),
        });
    }
    if (norm(p) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("direction must be a unit vector (|p| = {})", norm(p))));
    }
    Ok(())
}

/// Member `S(tp, √(2n+t²))` of the collection; `t = None` (or `+∞`) is the
/// hyperplane `⟨x,p⟩ = 0`.
pub fn sphere_member_gap(mesh: &Mesh, p: &[f64], t: Option<f64>) -> Result<ContainmentVerdict> {
    gaussian_dim(mesh)?;
    check_direction(mesh, p)?;
    let member = match t {
        Some(t) if t != f64::INFINITY => SphereFamilyMember::finite(p.to_vec(), t)?,
        _ => SphereFamilyMember::infinite(p.to_vec())?,
    };
    Ok(verdict(mesh, |x| member.defining_function(x)))
}

/// `count` unit directions in `R^dim`: evenly spaced angles in the plane and a
/// Fibonacci lattice on `S²`, both with a seeded phase.
pub fn scan_directions(dim: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let phase = ChaCha8Rng::seed_from_u64(seed).random_range(0.0..2.0 * PI);
    match dim {
        2 => Ok((0..count)
            .map(|i| {
                let a = phase + 2.0 * PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = phase + golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect())
        }
        _ => Err(Error::Unsupported(format!("direction sampling in R^{dim}"))),
    }
}

/// `0, step, 2·step, …` up to and including `tmax`.
pub fn t_grid(tmax: f64, step: f64) -> Vec<f64> {
    let count = (tmax / step + 1e-9).floor() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberResult {
    pub direction: Vec<f64>,
    /// `None` for the hyperplane member.
    pub t: Option<f64>,
    pub verdict: String,
    pub margin: f64,
    pub min_abs_g: f64,
    pub witness: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub directions: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub members: Vec<MemberResult>,
    /// Indices into `members` of members the mesh does not meet.
    pub misses: Vec<usize>,
    pub passed: bool,
}

impl ScanReport {
    /// One line per member: index, direction, t, verdict, margin.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "member\tp\tt\tverdict\tmargin")?;
        for (i, m) in self.members.iter().enumerate() {
            let p: Vec<String> = m.direction.iter().map(|&x| format_g6(x)).collect();
            let t = m.t.map_or_else(|| "inf".to_string(), format_g6);
            writeln!(w, "{i}\t{}\t{t}\t{}\t{}", p.join(","), m.verdict, format_g6(m.margin))?;
        }
        Ok(())
    }
}

/// Tests every member `(p, t)` with `p` from [`scan_directions`] and `t` from
/// `t_grid ∪ {∞}`. A proper self-shrinker meets all of them.
pub fn scan_collection(mesh: &Mesh, directions: usize, t_grid: &[f64], seed: u64) -> Result<ScanReport> {
    gaussian_dim(mesh)?;
    if directions == 0 {
        return Err(Error::InvalidParameter("scan needs at least one direction".into()));
    }
    let dirs = scan_directions(mesh.stride(), directions, seed)?;
    let ts: Vec<Option<f64>> = t_grid.iter().map(|&t| Some(t)).chain([None]).collect();
    let jobs: Vec<(usize, usize)> = (0..dirs.len()).flat_map(|d| (0..ts.len()).map(move |j| (d, j))).collect();
    let members = jobs
        .par_iter()
        .map(|&(d, j)| {
            let v = sphere_member_gap(mesh, &dirs[d], ts[j])?;
            Ok(MemberResult {
                direction: dirs[d].clone(),
                t: ts[j],
                verdict: v.describe().to_string(),
                margin: v.margin,
                min_abs_g: v.min_abs(),
                witness: if v.margin.abs() <= v.max.abs() { v.witnesses[0] } else { *v.witnesses.last().unwrap() },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let misses: Vec<usize> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.min_abs_g > 0.0)
        .map(|(i, _)| i)
        .collect();
    Ok(ScanReport {
        directions,
        seed,
        t_grid: t_grid.to_vec(),
        passed: misses.is_empty(),
        members,
        misses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallTest {
    /// Closed ball of radius² `2k + |v|²`.
    Inside,
    /// Closed ball of radius² `2(k+1) + |v|²`.
    Outside,
}

/// Containment in `B^{k+1}(v, ρ) × R^{n−k}` over the first `k+1` coordinates,
/// with `g = Σ (xᵢ − vᵢ)² − ρ²`.
pub fn ball_product_verdict(mesh: &Mesh, k: usize, v: &[f64], test: BallTest) -> Result<ContainmentVerdict> {
    let n = gaussian_dim(mesh)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("ball factor dimension k={k} exceeds n={n}")));
    }
    if v.len() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            got: v.len(),
        });
    }
    let base = match test {
        BallTest::Inside => 2 * k,
        BallTest::Outside => 2 * (k + 1),
    };
    let rho2 = base as f64 + norm_sq(v);
    Ok(verdict(mesh, |x| {
        x[..=k].iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() - rho2
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub directions: usize,
    pub seed: u64,
    /// Directions whose hyperplane splits the mesh into a part in the closed
    /// ball `|x|² ≤ 2n` and a part outside the open ball.
    pub realizing: Vec<Vec<f64>>,
    /// `|x|² = 2n` on the whole mesh: the sphere, where the pattern is allowed.
    pub sphere_exception: bool,
    pub passed: bool,
}

/// Looks for hyperplanes `⟨x,v⟩ = 0` with `|x|² ≤ 2n` on one closed side and
/// `|x|² ≥ 2n` on the other.
pub fn hyperplane_separation_scan(mesh: &Mesh, directions: usize, seed: u64) -> Result<SeparationReport> {
    let n = gaussian_dim(mesh)? as f64;
    let dirs = scan_directions(mesh.stride(), directions, seed)?;
    let gap: Vec<f64> = (0..mesh.num_vertices())
        .map(|i| 2.0 * n - norm_sq(mesh.vertex(i)))
        .collect();
    let tol = CONTACT_TOL;
    let sphere_exception = gap.iter().all(|g| g.abs() < 1e-9);
    let realizing: Vec<Vec<f64>> = dirs
        .into_iter()
        .filter(|v| {
            let side: Vec<f64> = (0..mesh.num_vertices()).map(|i| dot(mesh.vertex(i), v)).collect();
            let pattern = |s: f64| {
                side.iter().zip(&gap).all(|(&h, &g)| {
                    (h * s < -tol || g * s >= -tol) && (h * s > tol || g * s <= tol)
                })
            };
            pattern(1.0) || pattern(-1.0)
        })
        .collect();
    Ok(SeparationReport {
        directions,
        seed,
        passed: realizing.is_empty() || sphere_exception,
        realizing,
        sphere_exception,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "test")]
pub enum SolitonTest {
    /// `|x|² ≤ 2(n−k)` on the Euclidean factor.
    InsideBall,
    /// `|x|² ≤ 2(n+1−k)` on the Euclidean factor.
    OutsideBall,
    /// `⟨x,v⟩ ≤ 0` on the Euclidean factor.
    Halfspace { v: Vec<f64> },
}

/// Containment tests in `R^{n+1−k} × S^k`. Only the Euclidean factor enters.
pub fn soliton_containment(mesh: &Mesh, test: &SolitonTest) -> Result<ContainmentVerdict> {
    let AmbientSoliton::CylinderSoliton { k, .. } = mesh.ambient() else {
        return Err(Error::Unsupported("test needs the cylinder soliton ambient".into()));
    };
    let n = mesh.manifold_dim();
    Ok(match test {
        SolitonTest::InsideBall => {
            let r2 = 2.0 * (n - k) as f64;
            verdict(mesh, |x| norm_sq(x) - r2)
        }
        SolitonTest::OutsideBall => {
            let r2 = 2.0 * (n + 1 - k) as f64;
            verdict(mesh, |x| norm_sq(x) - r2)
        }
        SolitonTest::Halfspace { v } => {
            check_direction(mesh, v)?;
            verdict(mesh, |x| dot(x, v))
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussImageSpread {
    /// Normalized measure-weighted mean normal, if it is not zero.
    pub center: Option<Vec<f64>>,
    /// Largest angle between a vertex normal and the center; `π` without a center.
    pub angular_radius: f64,
    /// Whether the discrete Gauss image fits in the closed hemisphere about the center.
    pub in_semisphere: bool,
}

/// Angular radius of the discrete Gauss image about its mean direction.
pub fn gauss_image_spread(mesh: &Mesh) -> Result<GaussImageSpread> {
    let normals = mesh.vertex_normals()?;
    let w = mesh.lumped_measure();
    let mut mean = vec![0.0; mesh.stride()];
    for (nu, wi) in normals.iter().zip(&w) {
        for (m, x) in mean.iter_mut().zip(nu) {
            *m += wi * x;
        }
    }
    let total: f64 = w.iter().sum();
    let len = norm(&mean);
    if len < 1e-12 * total {
        return Ok(GaussImageSpread {
            center: None,
            angular_radius: PI,
            in_semisphere: false,
        });
    }
    let center: Vec<f64> = mean.iter().map(|m| m / len).collect();
    let angular_radius = normals
        .iter()
        .map(|nu| dot(nu, &center).clamp(-1.0, 1.0).acos())
        .fold(0.0, f64::max);
    Ok(GaussImageSpread {
        in_semisphere: angular_radius <= PI / 2.0 + 1e-9,
        center: Some(center),
        angular_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogShape;
    use crate::mesh::sample_shape;

    fn sphere2() -> Mesh {
        sample_shape(&CatalogShape::round_sphere(2, vec![0.0; 3], 2.0).unwrap(), 2000, None).unwrap()
    }

    #[test]
    fn member_gap_examples() {
        let m = sphere2();
        let p = [0.0, 0.6, 0.8];
        let v = sphere_member_gap(&m, &p, Some(1.0)).unwrap();
        assert!(v.sign_change && v.describe() == "crosses");
        let v = sphere_member_gap(&m, &p, Some(0.0)).unwrap();
        assert!(v.intersects() && v.margin.abs() < 1e-12 && v.max.abs() < 1e-12);
        assert_eq!(v.contacts, m.num_vertices());

        let plane = CatalogShape::hyperplane(2, vec![0.0, 0.0, 1.0]).unwrap();
        let pm = sample_shape(&plane, 16, Some(12.0)).unwrap();
        let v = sphere_member_gap(&pm, &[0.0, 0.0, 1.0], None).unwrap();
        assert!(v.intersects() && v.margin.abs() < 1e-12);
        assert!(sphere_member_gap(&pm, &[0.0, 1.0], None).is_err());
        assert!(sphere_member_gap(&pm, &[0.0, 0.0, 1.0], Some(-1.0)).is_err());
    }

    #[test]
    fn sphere_scan_has_no_misses() {
        let r = scan_collection(&sphere2(), 100, &t_grid(10.0, 0.5), 7).unwrap();
        assert_eq!(r.members.len(), 100 * 22);
        assert!(r.passed && r.misses.is_empty());
    }

    #[test]
    fn small_circle_misses_members() {
        let c = sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], 1.0).unwrap(), 256, None).unwrap();
        let r = scan_collection(&c, 64, &t_grid(10.0, 0.5), 7).unwrap();
        assert!(!r.passed);
        // |x| = 1 < √2: the t = 0 member is missed in every direction
        assert!(r.members.iter().filter(|m| m.t == Some(0.0)).all(|m| m.verdict == "inside"));
        let mut buf = Vec::new();
        r.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("member\tp\tt\tverdict\tmargin\n"));
        assert_eq!(text.lines().count(), 1 + r.members.len());
    }

    #[test]
    fn ball_product_examples() {
        let m = sphere2();
        let v = ball_product_verdict(&m, 2, &[0.0; 3], BallTest::Outside).unwrap();
        assert_eq!(v.classification, Classification::Inside);
        assert!((v.margin + 2.0).abs() < 1e-12);
        let v = ball_product_verdict(&m, 2, &[0.0; 3], BallTest::Inside).unwrap();
        assert!(v.margin.abs() < 1e-12 && v.describe() == "inside-with-contact");
        assert!(ball_product_verdict(&m, 3, &[0.0; 4], BallTest::Inside).is_err());

        let cyl = CatalogShape::shrinking_cylinder(2, 1).unwrap();
        let cm = sample_shape(&cyl, 32, Some(12.0)).unwrap();
        let v = ball_product_verdict(&cm, 1, &[0.0, 0.0], BallTest::Inside).unwrap();
        assert_eq!(v.contacts, cm.num_vertices());
        assert_eq!(v.describe(), "inside-with-contact");
    }

    #[test]
    fn separation_examples() {
        let r = hyperplane_separation_scan(&sphere2(), 50, 3).unwrap();
        assert!(r.sphere_exception && r.passed && r.realizing.len() == 50);
        let cm = sample_shape(&CatalogShape::shrinking_cylinder(2, 1).unwrap(), 32, Some(12.0)).unwrap();
        let r = hyperplane_separation_scan(&cm, 50, 3).unwrap();
        assert!(r.passed && r.realizing.is_empty());
        let pm = sample_shape(&CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap(), 256, Some(12.0)).unwrap();
        let r = hyperplane_separation_scan(&pm, 50, 3).unwrap();
        assert!(r.passed && r.realizing.is_empty());
    }

    #[test]
    fn soliton_examples() {
        let s = CatalogShape::soliton_sphere_product(3, 2, 2f64.sqrt()).unwrap();
        let m = sample_shape(&s, 256, None).unwrap();
        let v = soliton_containment(&m, &SolitonTest::InsideBall).unwrap();
        assert!(v.margin.abs() < 1e-12 && v.describe() == "inside-with-contact");
        let v = soliton_containment(&m, &SolitonTest::OutsideBall).unwrap();
        assert_eq!(v.classification, Classification::Inside);
        let h = CatalogShape::soliton_hyperplane_product(3, 2, vec![0.6, 0.8]).unwrap();
        let hm = sample_shape(&h, 256, Some(12.0)).unwrap();
        let v = soliton_containment(&hm, &SolitonTest::Halfspace { v: vec![0.6, 0.8] }).unwrap();
        assert!(v.intersects() && v.margin.abs() < 1e-12);
        assert!(soliton_containment(&sphere2(), &SolitonTest::InsideBall).is_err());
    }

    #[test]
    fn gauss_image() {
        let s = gauss_image_spread(&sphere2()).unwrap();
        assert!(!s.in_semisphere);
        let pm = sample_shape(&CatalogShape::hyperplane(2, vec![0.0, 0.0, 1.0]).unwrap(), 16, Some(12.0)).unwrap();
        let s = gauss_image_spread(&pm).unwrap();
        assert!(s.in_semisphere && s.angular_radius < 1e-8);
    }

    #[test]
    fn directions_are_unit_and_seeded() {
        let a = scan_directions(3, 100, 1).unwrap();
        assert!(a.iter().all(|d| (norm(d) - 1.0).abs() < 1e-12));
        assert_eq!(a, scan_directions(3, 100, 1).unwrap());
        assert_ne!(a, scan_directions(3, 100, 2).unwrap());
        assert_eq!(t_grid(8.0, 0.5).len(), 17);
    }
}
