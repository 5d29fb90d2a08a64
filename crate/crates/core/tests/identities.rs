use shrinker_spectra::cli::identity_battery;
use shrinker_spectra::identities::{check_coordinate_identity, check_fminimal, IdentityReport};
use shrinker_spectra::mesh::sample_shape;
use shrinker_spectra::{CatalogShape, Mesh};

fn failures(reports: &[IdentityReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.pass && !r.skipped)
        .map(|r| format!("{} residual {:e} tol {:e}", r.id, r.residual, r.tol))
        .collect()
}

fn battery_passes(mesh: &Mesh) {
    let reports = identity_battery(mesh).unwrap();
    assert!(!reports.is_empty());
    let bad = failures(&reports);
    assert!(bad.is_empty(), "{:?}: {bad:?}", mesh.shape().map(|s| s.variant_name()));
}

/// Observed order `log(r₀/r₁)/log(h₀/h₁)` between consecutive levels.
fn orders(levels: &[(f64, f64)]) -> Vec<f64> {
    levels.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect()
}

#[test]
fn sphere_refinement_stays_under_tolerance() {
    let shape = CatalogShape::shrinking_sphere(2).unwrap();
    let mut fmin = Vec::new();
    for count in [642, 2562, 10242] {
        let mesh = sample_shape(&shape, count, None).unwrap();
        battery_passes(&mesh);
        let r = check_fminimal(&mesh).unwrap();
        fmin.push((mesh.max_edge_length(), r.residual));
    }
    let o = orders(&fmin);
    assert!(o.iter().all(|&p| p >= 1.0), "{fmin:?} {o:?}");
}

#[test]
fn circle_refinement_converges() {
    let shape = CatalogShape::shrinking_sphere(1).unwrap();
    let mut coord = Vec::new();
    for count in [128, 256, 512] {
        let mesh = sample_shape(&shape, count, None).unwrap();
        battery_passes(&mesh);
        let r = check_coordinate_identity(&mesh, &[1.0, 0.0]).unwrap();
        coord.push((mesh.max_edge_length(), r.residual));
    }
    assert!(orders(&coord).iter().all(|&p| p >= 1.0), "{coord:?}");
}

#[test]
fn cylinder_refinement_stays_under_tolerance() {
    let shape = CatalogShape::shrinking_cylinder(2, 1).unwrap();
    for count in [32, 64, 128] {
        battery_passes(&sample_shape(&shape, count, Some(12.0)).unwrap());
    }
}

#[test]
fn cylinder_pointwise_mismatch_is_small() {
    let shape = CatalogShape::shrinking_cylinder(2, 1).unwrap();
    let mesh = sample_shape(&shape, 64, Some(12.0)).unwrap();
    let reports = identity_battery(&mesh).unwrap();
    let xsq = reports.iter().find(|r| r.id == "xsq-laplacian").unwrap();
    assert!(xsq.residual < 5e-2, "{xsq:?}");
}

#[test]
fn hyperplanes_pass() {
    let line = CatalogShape::hyperplane(1, vec![0.6, 0.8]).unwrap();
    for count in [512, 2048] {
        battery_passes(&sample_shape(&line, count, Some(12.0)).unwrap());
    }
    let plane = CatalogShape::hyperplane(2, vec![0.0, 0.0, 1.0]).unwrap();
    for count in [64, 128] {
        battery_passes(&sample_shape(&plane, count, Some(12.0)).unwrap());
    }
}

#[test]
fn soliton_products_pass() {
    let s = CatalogShape::soliton_sphere_product(3, 2, 2f64.sqrt()).unwrap();
    battery_passes(&sample_shape(&s, 512, None).unwrap());
    let s = CatalogShape::soliton_sphere_product(4, 2, 2.0).unwrap();
    battery_passes(&sample_shape(&s, 2562, None).unwrap());
    let h = CatalogShape::soliton_hyperplane_product(3, 2, vec![0.6, 0.8]).unwrap();
    battery_passes(&sample_shape(&h, 2048, Some(12.0)).unwrap());
}

#[test]
fn off_radius_sphere_fails_fminimality() {
    let shape = CatalogShape::round_sphere(2, vec![0.0; 3], 1.9).unwrap();
    let mesh = sample_shape(&shape, 2562, None).unwrap();
    let r = check_fminimal(&mesh).unwrap();
    // |H⃗| = 2/r inward, x^⊥/2 = r/2 outward
    assert!((r.residual - (2.0 / 1.9 - 0.95)).abs() < 1e-2, "{r:?}");
    assert!(!r.pass);
}

#[test]
fn weighted_line_measure_changes_by_the_gaussian_tail() {
    let line = CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap();
    let total = |r: f64| sample_shape(&line, 2048, Some(r)).unwrap().weighted_vertex_measure().sum();
    // ∫_{8<|s|<12} e^{−s²/4} ds
    let tail = 2.0 * std::f64::consts::PI.sqrt() * (libm::erfc(4.0) - libm::erfc(6.0));
    let d = total(12.0) - total(8.0);
    assert!(tail > 1e-8);
    assert!((d - tail).abs() < 1e-10, "{d:e} vs {tail:e}");
}
