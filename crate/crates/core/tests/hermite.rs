mod common;

use common::{hermite_reference, max_diff, HermiteOracle};
use shrinker_spectra::mesh::sample_shape;
use shrinker_spectra::operator::{assemble, assemble_gauge};
use shrinker_spectra::spectral::{lowest_eigenpairs, solve_generalized, SolverOptions};
use shrinker_spectra::CatalogShape;

fn line_mesh(count: usize) -> shrinker_spectra::Mesh {
    let shape = CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap();
    sample_shape(&shape, count, Some(12.0)).unwrap()
}

#[test]
fn oracle_reproduces_half_integers() {
    let got = hermite_reference(5);
    assert!(max_diff(&got, &[0.0, 0.5, 1.0, 1.5, 2.0]) < 1e-4, "{got:?}");
}

#[test]
fn bisection_agrees_with_a_dense_solver() {
    let n = 60;
    let o = HermiteOracle::new(n, 6.0);
    let h = 12.0 / (n + 1) as f64;
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let s = -6.0 + (i + 1) as f64 * h;
        match i.abs_diff(j) {
            0 => 2.0 / (h * h) + s * s / 16.0 - 0.25,
            1 => -1.0 / (h * h),
            _ => 0.0,
        }
    });
    let mut dense: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    for (m, want) in dense.iter().take(6).enumerate() {
        assert!((o.eigenvalue(m, -1.0, 200.0) - want).abs() < 1e-9);
    }
}

#[test]
fn line_fem_matches_the_oracle() {
    let mesh = line_mesh(2048);
    let forms = assemble(&mesh).unwrap();
    let spec = lowest_eigenpairs(&forms, 5, 1e-10).unwrap();
    let reference = hermite_reference(5);
    assert!(max_diff(spec.eigenvalues(), &reference) < 1e-3, "{:?}", spec.eigenvalues());
}

#[test]
fn gauge_conjugate_has_the_same_spectrum() {
    let mesh = line_mesh(2048);
    let forms = assemble(&mesh).unwrap();
    let weighted = lowest_eigenpairs(&forms, 5, 1e-10).unwrap();
    // ¼|∇f|² − ½Δf with f = s²/4 on the line
    let (k, m) = assemble_gauge(&mesh, |x| (x[0] * x[0] + x[1] * x[1]) / 16.0 - 0.25).unwrap();
    let gauged = solve_generalized(&k, &m, 5, 1e-10, &SolverOptions::default()).unwrap();
    let d = max_diff(weighted.eigenvalues(), gauged.eigenvalues());
    assert!(d < 5e-3, "{:?} vs {:?}", weighted.eigenvalues(), gauged.eigenvalues());
}
