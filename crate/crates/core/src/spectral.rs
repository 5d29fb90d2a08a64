//! Lowest eigenpairs of `Ku = λMu`, closed-form reference spectra, tensor sums
//! for product manifolds, and eigenspace identification.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::mesh::VertexField;
use crate::operator::WeightedForms;
use crate::sparse::{CsrMatrix, EnvelopeCholesky};
use crate::{Error, Result, DEFAULT_SEED};

/// Shift used for shift-invert; left of the kernel so `K − σM` is definite.
pub const DEFAULT_SHIFT: f64 = -1e-3;
/// Default residual tolerance in the `M⁻¹` norm.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for locating 0 and ½ in a computed spectrum.
pub const SHRINKER_VALUE_TOL: f64 = 2e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Computed,
    ClosedForm,
    TensorSum,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::ClosedForm => "closed-form",
            Provenance::TensorSum => "tensor-sum",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityGroup {
    pub value: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<Vec<Vec<f64>>>,
    residuals: Option<Vec<f64>>,
    groups: Vec<MultiplicityGroup>,
    cluster_tol: f64,
    provenance: Provenance,
    /// The listed values are the entire spectrum.
    exhaustive: bool,
}

/// Single-link clustering of sorted values.
pub fn cluster(values: &[f64], tol: f64) -> Vec<MultiplicityGroup> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &v in values {
        match groups.last_mut() {
            Some((sum, count)) if v - prev <= tol => {
                *sum += v;
                *count += 1;
            }
            _ => groups.push((v, 1)),
        }
        prev = v;
    }
    groups
        .into_iter()
        .map(|(s, c)| MultiplicityGroup {
            value: s / c as f64,
            count: c,
        })
        .collect()
}

impl Spectrum {
    fn build(mut values: Vec<f64>, provenance: Provenance, cluster_tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        let groups = cluster(&values, cluster_tol);
        Self {
            eigenvalues: values,
            eigenvectors: None,
            residuals: None,
            groups,
            cluster_tol,
            provenance,
            exhaustive: false,
        }
    }

    /// Spectrum of a point, `{0}`; neutral for [`tensor_sum_spectrum`].
    pub fn point() -> Self {
        let mut s = Self::build(vec![0.0], Provenance::ClosedForm, 1e-6);
        s.exhaustive = true;
        s
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&[Vec<f64>]> {
        self.eigenvectors.as_deref()
    }

    pub fn residuals(&self) -> Option<&[f64]> {
        self.residuals.as_deref()
    }

    pub fn groups(&self) -> &[MultiplicityGroup] {
        &self.groups
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.as_ref().map(|r| r.iter().copied().fold(0.0, f64::max))
    }

    /// Recomputes multiplicity groups with a new tolerance.
    pub fn regroup(&mut self, tol: f64) {
        self.cluster_tol = tol;
        self.groups = cluster(&self.eigenvalues, tol);
    }

    /// Index of the group each eigenvalue belongs to.
    pub fn group_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for (g, grp) in self.groups.iter().enumerate() {
            out.extend(std::iter::repeat_n(g, grp.count));
        }
        out
    }

    /// Number of eigenvalues within `tol` of `target`.
    pub fn multiplicity_near(&self, target: f64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|v| (*v - target).abs() <= tol).count()
    }

    /// TSV with columns index, eigenvalue, multiplicity group, residual,
    /// provenance. Numbers carry six significant digits.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index\teigenvalue\tgroup\tresidual\tprovenance")?;
        let groups = self.group_indices();
        for (i, v) in self.eigenvalues.iter().enumerate() {
            let res = self.residuals.as_ref().map_or_else(|| "NA".to_owned(), |r| format_g6(r[i]));
            writeln!(w, "{i}\t{}\t{}\t{res}\t{}", format_g6(*v), groups[i], self.provenance.as_str())?;
        }
        Ok(())
    }
}

/// `%.6g`-style formatting.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// Solver knobs; the defaults give bitwise reproducible output.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub shift: f64,
    pub seed: u64,
    pub max_restarts: usize,
    /// Defaults to `m + 2` so whole low multiplets enter each block.
    pub block_size: Option<usize>,
    /// Defaults to `max(2m + 20, 4·block)`, capped at the dimension.
    pub max_basis: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            shift: DEFAULT_SHIFT,
            seed: DEFAULT_SEED,
            max_restarts: 40,
            block_size: None,
            max_basis: None,
        }
    }
}

/// Estimated eigenvalue splitting from P1 discretization, `h²(1 + λ)²/12`.
pub fn discretization_gap(h: f64, lambda_max: f64) -> f64 {
    h * h * (1.0 + lambda_max.max(0.0)).powi(2) / 12.0
}

/// `max(1e−6, 5·tol, 10·gap)`.
pub fn clustering_tolerance(tol: f64, gap: f64) -> f64 {
    1e-6_f64.max(5.0 * tol).max(10.0 * gap)
}

/// The `m` smallest eigenpairs of the weighted forms.
pub fn lowest_eigenpairs(forms: &WeightedForms, m: usize, tol: f64) -> Result<Spectrum> {
    lowest_eigenpairs_with(forms, m, tol, &SolverOptions::default())
}

pub fn lowest_eigenpairs_with(forms: &WeightedForms, m: usize, tol: f64, opts: &SolverOptions) -> Result<Spectrum> {
    let h = forms.max_edge_length();
    let result = solve_generalized(forms.stiffness(), forms.mass(), m, tol, opts);
    let regroup = |s: &mut Spectrum| {
        let lmax = s.eigenvalues.last().copied().unwrap_or(0.0);
        s.regroup(clustering_tolerance(tol, discretization_gap(h, lmax)));
    };
    match result {
        Ok(mut s) => {
            regroup(&mut s);
            Ok(s)
        }
        Err(Error::NotConverged {
            max_residual,
            mut partial,
        }) => {
            regroup(&mut partial);
            Err(Error::NotConverged { max_residual, partial })
        }
        Err(e) => Err(e),
    }
}

struct Basis {
    q: Vec<Vec<f64>>,
    mq: Vec<Vec<f64>>,
    kq: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
}

impl Basis {
    /// M-orthogonalizes `v` against the basis (two Gram–Schmidt passes) and
    /// appends it unless it is numerically dependent.
    fn push(&mut self, mut v: Vec<f64>, k: &CsrMatrix, mass: &CsrMatrix, solver: &EnvelopeCholesky) -> bool {
        let before = mass.bilinear(&v, &v).sqrt();
        if !(before > 0.0) {
            return false;
        }
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.mq.iter().map(|mq| dot(mq, &v)).collect();
            for (c, q) in coeffs.iter().zip(&self.q) {
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let mv = mass.mul_vec(&v);
        let after = dot(&v, &mv).sqrt();
        if !(after > DEFLATION_TOL * before) {
            return false;
        }
        for x in v.iter_mut() {
            *x /= after;
        }
        let mq: Vec<f64> = mv.iter().map(|x| x / after).collect();
        self.z.push(solver.solve(&mq));
        self.kq.push(k.mul_vec(&v));
        self.q.push(v);
        self.mq.push(mq);
        true
    }
}

/// Relative norm below which a new Krylov direction counts as dependent.
const DEFLATION_TOL: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Block shift-invert Lanczos for `Ku = λMu` with full M-reorthogonalization.
///
/// Krylov blocks of `T = (K − σM)⁻¹M` are M-orthonormalized into `Q`, starting
/// from random vectors already smoothed by `T²`. Ritz pairs come from the
/// projected pencil `QᵀKQ y = λy` (so Ritz values are upper bounds), and
/// residuals `‖Ku − λMu‖_{M⁻¹}` are measured for M-normalized `u`. Unconverged
/// runs restart from the best Ritz vectors; stagnation ends the iteration with
/// [`Error::NotConverged`] carrying the best partial spectrum.
pub fn solve_generalized(k: &CsrMatrix, mass: &CsrMatrix, m: usize, tol: f64, opts: &SolverOptions) -> Result<Spectrum> {
    let n = k.dim();
    if mass.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mass.dim(),
        });
    }
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "eigenpair count must satisfy 1 <= m < {n}, got {m}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let shifted = k.add_scaled(mass, -opts.shift);
    let solver = EnvelopeCholesky::factor(&shifted)?;
    let mass_factor = EnvelopeCholesky::factor(mass)?;
    let block = opts.block_size.unwrap_or(m + 2).clamp(1, n);
    let kmax = opts.max_basis.unwrap_or((2 * m + 20).max(4 * block)).clamp(m + 1, n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Vec<f64>> = (0..block)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            for _ in 0..2 {
                v = solver.solve(&mass.mul_vec(&v));
                let s = mass.bilinear(&v, &v).sqrt();
                v.iter_mut().for_each(|x| *x /= s);
            }
            v
        })
        .collect();
    let mut best: Option<Spectrum> = None;
    let mut best_res = f64::INFINITY;
    let mut stalled = 0;

    for _restart in 0..=opts.max_restarts {
        let mut basis = Basis {
            q: Vec::new(),
            mq: Vec::new(),
            kq: Vec::new(),
            z: Vec::new(),
        };
        let mut current = std::mem::take(&mut start);
        while basis.q.len() < kmax {
            let first = basis.q.len();
            for v in current.drain(..) {
                if basis.q.len() >= kmax {
                    break;
                }
                basis.push(v, k, mass, &solver);
            }
            if basis.q.len() == first {
                break;
            }
            current = basis.z[first..].to_vec();
        }
        let dim = basis.q.len();
        if dim < m {
            return Err(Error::InvalidParameter(format!(
                "Krylov space collapsed to dimension {dim} < {m}"
            )));
        }
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (dot(&basis.q[i], &basis.kq[j]) + dot(&basis.q[j], &basis.kq[i]));
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let ritz = |idx: usize| -> (Vec<f64>, Vec<f64>) {
            let mut u = vec![0.0; n];
            let mut ku = vec![0.0; n];
            for c in 0..dim {
                let y = eig.eigenvectors[(c, idx)];
                for ((ui, kui), (qi, kqi)) in u.iter_mut().zip(ku.iter_mut()).zip(basis.q[c].iter().zip(&basis.kq[c])) {
                    *ui += y * qi;
                    *kui += y * kqi;
                }
            }
            (u, ku)
        };
        let mut values = Vec::with_capacity(m);
        let mut vectors = Vec::with_capacity(m);
        let mut residuals = Vec::with_capacity(m);
        for &idx in order.iter().take(m) {
            let lambda = eig.eigenvalues[idx];
            let (u, ku) = ritz(idx);
            let mu = mass.mul_vec(&u);
            let r: Vec<f64> = ku.iter().zip(&mu).map(|(a, b)| a - lambda * b).collect();
            let minv_r = mass_factor.solve(&r);
            residuals.push(dot(&r, &minv_r).max(0.0).sqrt());
            values.push(lambda);
            vectors.push(u);
        }
        let max_res = residuals.iter().copied().fold(0.0, f64::max);
        let mut spectrum = Spectrum::build(values, Provenance::Computed, clustering_tolerance(tol, 0.0));
        spectrum.eigenvectors = Some(vectors);
        spectrum.residuals = Some(residuals);
        if max_res < tol {
            return Ok(spectrum);
        }
        if max_res < 0.5 * best_res {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if max_res < best_res {
            best_res = max_res;
            best = Some(spectrum);
        }
        if stalled >= 3 {
            break;
        }
        start = order.iter().take(block).map(|&idx| ritz(idx).0).collect();
    }
    Err(Error::NotConverged {
        max_residual: best_res,
        partial: Box::new(best.expect("at least one iteration")),
    })
}

/// One-factor spectra with known closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factor", rename_all = "snake_case")]
pub enum ClosedFormFactor {
    /// Circle of radius `r`: `k²/r²`, multiplicity 2 for `k ≥ 1`.
    Circle { r: f64 },
    /// Weighted line `Δ_f` with `f = s²/4`: `m/2`, simple.
    HermiteLine,
    /// `S^n_r`: `ℓ(ℓ+n−1)/r²` with spherical-harmonic multiplicity.
    RoundSphere { n: usize, r: f64 },
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of degree-`ℓ` spherical harmonics on `S^n`.
pub fn spherical_harmonic_multiplicity(n: usize, l: usize) -> usize {
    if l < 2 {
        binomial(n + l, n)
    } else {
        binomial(n + l, n) - binomial(n + l - 2, n)
    }
}

/// The `count` smallest eigenvalues of a closed-form factor, with multiplicity.
pub fn closed_form_spectrum(factor: ClosedFormFactor, count: usize) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(count);
    let mut level = 0usize;
    while values.len() < count {
        let (value, mult) = match factor {
            ClosedFormFactor::Circle { r } => {
                let l = level as f64;
                (l * l / (r * r), if level == 0 { 1 } else { 2 })
            }
            ClosedFormFactor::HermiteLine => (level as f64 / 2.0, 1),
            ClosedFormFactor::RoundSphere { n, r } => (
                (level * (level + n - 1)) as f64 / (r * r),
                spherical_harmonic_multiplicity(n, level),
            ),
        };
        values.extend(std::iter::repeat_n(value, mult.min(count - values.len())));
        level += 1;
    }
    Ok(Spectrum::build(values, Provenance::ClosedForm, 1e-6))
}

/// The `count` smallest sums `λᵢ + μⱼ`. Sums are trustworthy only up to
/// `min(max a + min b, min a + max b)`; exceeding that is an error.
pub fn tensor_sum_spectrum(a: &Spectrum, b: &Spectrum, count: usize) -> Result<Spectrum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientDepth("empty input spectrum".into()));
    }
    let mut sums: Vec<f64> = a
        .eigenvalues
        .iter()
        .flat_map(|x| b.eigenvalues.iter().map(move |y| x + y))
        .collect();
    if sums.len() < count {
        return Err(Error::InsufficientDepth(format!(
            "{} sums available, {count} requested",
            sums.len()
        )));
    }
    sums.sort_by(f64::total_cmp);
    sums.truncate(count);
    let (amin, amax) = (a.eigenvalues[0], *a.eigenvalues.last().unwrap());
    let (bmin, bmax) = (b.eigenvalues[0], *b.eigenvalues.last().unwrap());
    let mut bound = f64::INFINITY;
    if !a.exhaustive {
        bound = bound.min(amax + bmin);
    }
    if !b.exhaustive {
        bound = bound.min(amin + bmax);
    }
    let largest = *sums.last().unwrap();
    if largest > bound + 1e-12 * (1.0 + bound.abs()) {
        return Err(Error::InsufficientDepth(format!(
            "largest retained sum {largest} exceeds the reliable bound {bound}"
        )));
    }
    let tol = a.cluster_tol.max(b.cluster_tol);
    let mut s = Spectrum::build(sums, Provenance::TensorSum, tol);
    s.exhaustive = a.exhaustive && b.exhaustive;
    Ok(s)
}

/// M-orthonormal basis of the span of `vectors` (modified Gram–Schmidt, two
/// passes); dependent vectors are dropped.
fn m_orthonormalize(vectors: &[Vec<f64>], mass: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut mout: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        let before = mass.bilinear(&v, &v).sqrt();
        for _ in 0..2 {
            for (q, mq) in out.iter().zip(&mout) {
                let c = dot(mq, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let mv = mass.mul_vec(&v);
        let after = dot(&v, &mv).sqrt();
        if after > 1e-10 * before && after > 0.0 {
            out.push(v.iter().map(|x| x / after).collect());
            mout.push(mv.iter().map(|x| x / after).collect());
        }
    }
    out
}

/// Largest principal angle, in degrees, between the span of `references` and
/// the computed eigenspace at `target` under the mass inner product.
///
/// The eigenspace is the multiplicity group containing `target`. If it has lower
/// dimension than the references, 90° is returned.
pub fn match_eigenspace(
    spectrum: &Spectrum,
    forms: &WeightedForms,
    target: f64,
    references: &[VertexField],
) -> Result<f64> {
    let vectors = spectrum
        .eigenvectors()
        .ok_or_else(|| Error::InvalidParameter("spectrum carries no eigenvectors".into()))?;
    let groups = spectrum.group_indices();
    let nearest = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .filter(|(_, v)| (*v - target).abs() <= spectrum.cluster_tol.max(1e-12))
        .map(|(i, _)| groups[i])
        .ok_or(Error::EigenvalueNotFound(target))?;
    let space: Vec<Vec<f64>> = groups
        .iter()
        .zip(vectors)
        .filter(|(g, _)| **g == nearest)
        .map(|(_, v)| v.clone())
        .collect();
    let n = forms.dim();
    for r in references {
        if r.len() != n {
            return Err(Error::FieldMismatch { expected: n, got: r.len() });
        }
    }
    let refs: Vec<Vec<f64>> = references.iter().map(|r| r.values().to_vec()).collect();
    let qr = m_orthonormalize(&refs, forms.mass());
    if qr.len() < refs.len() {
        return Err(Error::InvalidParameter("reference fields are linearly dependent".into()));
    }
    let qe = m_orthonormalize(&space, forms.mass());
    if qe.len() < qr.len() {
        return Ok(90.0);
    }
    let mqe: Vec<Vec<f64>> = qe.iter().map(|v| forms.mass().mul_vec(v)).collect();
    let c = DMatrix::from_fn(qr.len(), qe.len(), |i, j| dot(&qr[i], &mqe[j]));
    let svd = c.svd(false, false);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(smin.clamp(-1.0, 1.0).acos().to_degrees())
}

/// Multiplicities of 0 and ½ in a computed spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct ShrinkerSpectrumCheck {
    pub zero_multiplicity: usize,
    pub half_multiplicity: usize,
    pub expected_half_multiplicity: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks that 0 appears and ½ appears at least `expected_half` times.
pub fn check_shrinker_spectrum(spectrum: &Spectrum, expected_half: usize, tol: f64) -> ShrinkerSpectrumCheck {
    let zero = spectrum.multiplicity_near(0.0, tol);
    let half = spectrum.multiplicity_near(0.5, tol);
    ShrinkerSpectrumCheck {
        zero_multiplicity: zero,
        half_multiplicity: half,
        expected_half_multiplicity: expected_half,
        tolerance: tol,
        passed: zero >= 1 && half >= expected_half,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CatalogShape;
    use crate::mesh::sample_shape;
    use crate::operator::assemble;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let h = closed_form_spectrum(ClosedFormFactor::HermiteLine, 3).unwrap();
        assert_eq!(h.eigenvalues(), &[0.0, 0.5, 1.0]);
        let c = closed_form_spectrum(ClosedFormFactor::Circle { r: 2f64.sqrt() }, 5).unwrap();
        assert_close(c.eigenvalues(), &[0.0, 0.5, 0.5, 2.0, 2.0], 1e-14);
        let s = closed_form_spectrum(ClosedFormFactor::RoundSphere { n: 2, r: 2f64.sqrt() }, 4).unwrap();
        assert_close(s.eigenvalues(), &[0.0, 1.0, 1.0, 1.0], 1e-14);
        assert_eq!(s.provenance(), Provenance::ClosedForm);
    }

    #[test]
    fn harmonic_multiplicities() {
        // S¹: 1, 2, 2, ...; S²: 2ℓ+1; S³: (ℓ+1)²
        assert_eq!((0..4).map(|l| spherical_harmonic_multiplicity(1, l)).collect::<Vec<_>>(), [1, 2, 2, 2]);
        for l in 0..6 {
            assert_eq!(spherical_harmonic_multiplicity(2, l), 2 * l + 1);
            assert_eq!(spherical_harmonic_multiplicity(3, l), (l + 1) * (l + 1));
        }
    }

    #[test]
    fn tensor_sum_examples() {
        let c = closed_form_spectrum(ClosedFormFactor::Circle { r: 2f64.sqrt() }, 5).unwrap();
        let h = closed_form_spectrum(ClosedFormFactor::HermiteLine, 5).unwrap();
        let t = tensor_sum_spectrum(&c, &h, 8).unwrap();
        assert_close(t.eigenvalues(), &[0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.5], 1e-14);
        let s = closed_form_spectrum(ClosedFormFactor::RoundSphere { n: 2, r: 2f64.sqrt() }, 4).unwrap();
        let cs = tensor_sum_spectrum(&c, &s, 5).unwrap();
        assert_close(cs.eigenvalues(), &[0.0, 0.5, 0.5, 1.0, 1.0], 1e-14);
        let id = tensor_sum_spectrum(&c, &Spectrum::point(), 5).unwrap();
        assert_eq!(id.eigenvalues(), c.eigenvalues());
        assert!(matches!(tensor_sum_spectrum(&c, &h, 30), Err(Error::InsufficientDepth(_))));
        assert!(matches!(tensor_sum_spectrum(&c, &h, 20), Err(Error::InsufficientDepth(_))));
    }

    #[test]
    fn clustering_merges_close_values() {
        let g = cluster(&[0.0, 0.5, 0.5001, 0.5002, 2.0], 1e-3);
        assert_eq!(g.iter().map(|g| g.count).collect::<Vec<_>>(), [1, 3, 1]);
    }

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(0.5), "0.5");
        assert_eq!(format_g6(2.0), "2");
        assert_eq!(format_g6(1.23456789e-9), "1.23457e-09");
        assert_eq!(format_g6(123456.7), "123457");
        assert_eq!(format_g6(-0.000123456789), "-0.000123457");
        assert_eq!(format_g6(0.0), "0");
    }

    #[test]
    fn circle_spectrum_and_eigenspaces() {
        let m = sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], 2f64.sqrt()).unwrap(), 512, None).unwrap();
        let f = assemble(&m).unwrap();
        let s = lowest_eigenpairs(&f, 5, 1e-9).unwrap();
        assert_close(s.eigenvalues(), &[0.0, 0.5, 0.5, 2.0, 2.0], 1e-2);
        assert!(s.max_residual().unwrap() < 1e-9);
        let refs = [VertexField::from_fn(&m, |x| x[0]), VertexField::from_fn(&m, |x| x[1])];
        assert!(match_eigenspace(&s, &f, 0.5, &refs).unwrap() < 2.0);
        let one = [VertexField::constant(&m, 1.0)];
        assert!(match_eigenspace(&s, &f, 0.0, &one).unwrap() < 0.1);
        assert!(matches!(match_eigenspace(&s, &f, 1.0, &one), Err(Error::EigenvalueNotFound(_))));
        let vecs = s.eigenvectors().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let g = f.mass().bilinear(&vecs[i], &vecs[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-8);
            }
        }
        let check = check_shrinker_spectrum(&s, 2, SHRINKER_VALUE_TOL);
        assert!(check.passed);
    }

    #[test]
    fn solver_is_deterministic() {
        let m = sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], 1.0).unwrap(), 200, None).unwrap();
        let f = assemble(&m).unwrap();
        let a = lowest_eigenpairs(&f, 4, 1e-9).unwrap();
        let b = lowest_eigenpairs(&f, 4, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solver_rejects_bad_counts() {
        let m = sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], 1.0).unwrap(), 16, None).unwrap();
        let f = assemble(&m).unwrap();
        assert!(lowest_eigenpairs(&f, 0, 1e-8).is_err());
        assert!(lowest_eigenpairs(&f, 16, 1e-8).is_err());
    }

    #[test]
    fn tsv_export() {
        let c = closed_form_spectrum(ClosedFormFactor::Circle { r: 2f64.sqrt() }, 3).unwrap();
        let mut buf = Vec::new();
        c.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index\teigenvalue\tgroup\tresidual\tprovenance");
        assert_eq!(lines[2], "1\t0.5\t1\tNA\tclosed-form");
    }
}
