use shrinker_spectra::mesh::sample_shape;
use shrinker_spectra::obstruction::{
    ball_product_verdict, hyperplane_separation_scan, scan_collection, soliton_containment, t_grid, BallTest,
    Classification, SolitonTest,
};
use shrinker_spectra::CatalogShape;

const DIRECTIONS: usize = 100;
const SEED: u64 = 0x5EED;

#[test]
fn shrinkers_meet_every_member() {
    let grid = t_grid(8.0, 0.5);
    let shapes = [
        (CatalogShape::shrinking_sphere(1).unwrap(), 512, None),
        (CatalogShape::shrinking_sphere(2).unwrap(), 2562, None),
        (CatalogShape::shrinking_cylinder(2, 1).unwrap(), 64, Some(12.0)),
        (CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap(), 512, Some(12.0)),
        (CatalogShape::hyperplane(2, vec![0.0, 0.6, 0.8]).unwrap(), 64, Some(12.0)),
    ];
    for (shape, count, trunc) in shapes {
        let mesh = sample_shape(&shape, count, trunc).unwrap();
        let r = scan_collection(&mesh, DIRECTIONS, &grid, SEED).unwrap();
        assert_eq!(r.members.len(), DIRECTIONS * (grid.len() + 1));
        assert!(r.passed && r.misses.is_empty(), "{}: {:?}", shape.variant_name(), r.misses.len());
    }
}

#[test]
fn scan_is_seed_deterministic() {
    let mesh = sample_shape(&CatalogShape::shrinking_sphere(2).unwrap(), 642, None).unwrap();
    let grid = t_grid(4.0, 1.0);
    let a = scan_collection(&mesh, 20, &grid, 9).unwrap();
    let b = scan_collection(&mesh, 20, &grid, 9).unwrap();
    let (mut ta, mut tb) = (Vec::new(), Vec::new());
    a.write_tsv(&mut ta).unwrap();
    b.write_tsv(&mut tb).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn contact_cases_have_zero_margin() {
    // round cylinder against the ball product of its own radius
    let cyl = sample_shape(&CatalogShape::shrinking_cylinder(2, 1).unwrap(), 64, Some(12.0)).unwrap();
    let v = ball_product_verdict(&cyl, 1, &[0.0, 0.0], BallTest::Inside).unwrap();
    assert!(v.margin.abs() < 1e-9 && v.max.abs() < 1e-9, "{v:?}");
    assert_eq!(v.contacts, cyl.num_vertices());

    // S^{n−k}(√(2(n−k))) × S^k in the cylinder soliton
    for (n, k) in [(3, 2), (4, 2)] {
        let r = (2.0 * (n - k) as f64).sqrt();
        let shape = CatalogShape::soliton_sphere_product(n, k, r).unwrap();
        let count = if n - k == 1 { 256 } else { 642 };
        let mesh = sample_shape(&shape, count, None).unwrap();
        let v = soliton_containment(&mesh, &SolitonTest::InsideBall).unwrap();
        assert!(v.margin.abs() < 1e-9 && v.max.abs() < 1e-9, "{v:?}");
        assert_eq!(v.describe(), "inside-with-contact");
    }
}

#[test]
fn small_sphere_lies_inside_the_ball() {
    let s = CatalogShape::round_sphere(2, vec![0.0; 3], 1.5).unwrap();
    let mesh = sample_shape(&s, 642, None).unwrap();
    let v = ball_product_verdict(&mesh, 2, &[0.0; 3], BallTest::Inside).unwrap();
    assert_eq!(v.classification, Classification::Inside);
    assert!((v.margin - (1.5f64.powi(2) - 4.0)).abs() < 1e-12);
}

#[test]
fn only_the_sphere_realizes_a_separation() {
    let sphere = sample_shape(&CatalogShape::shrinking_sphere(2).unwrap(), 642, None).unwrap();
    let r = hyperplane_separation_scan(&sphere, DIRECTIONS, SEED).unwrap();
    assert!(r.passed && r.sphere_exception);
    let plane = sample_shape(&CatalogShape::hyperplane(2, vec![1.0, 0.0, 0.0]).unwrap(), 64, Some(12.0)).unwrap();
    let r = hyperplane_separation_scan(&plane, DIRECTIONS, SEED).unwrap();
    assert!(r.passed && r.realizing.is_empty());
}
