//! End-to-end acceptance run. Prints one line per criterion and exits nonzero if
//! any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{circle_reference, hermite_reference, max_diff, sorted_sums};
use shrinker_spectra::cli::identity_battery;
use shrinker_spectra::geometry::{residual_sup, rigidity_roots, ShapeFamily};
use shrinker_spectra::identities::{check_fminimal, check_stability_equation};
use shrinker_spectra::mesh::sample_shape;
use shrinker_spectra::obstruction::{
    ball_product_verdict, scan_collection, soliton_containment, t_grid, BallTest, SolitonTest,
};
use shrinker_spectra::operator::assemble;
use shrinker_spectra::spectral::{lowest_eigenpairs, match_eigenspace};
use shrinker_spectra::{CatalogShape, Mesh, VertexField};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn spectrum_of(mesh: &Mesh, m: usize) -> Vec<f64> {
    let forms = assemble(mesh).unwrap();
    lowest_eigenpairs(&forms, m, 1e-8).unwrap().eigenvalues().to_vec()
}

fn circle_spectrum() -> Outcome {
    let start = Instant::now();
    let mesh = sample_shape(&CatalogShape::shrinking_sphere(1).unwrap(), 512, None).unwrap();
    let got = spectrum_of(&mesh, 5);
    let elapsed = start.elapsed();
    let err = max_diff(&got, &circle_reference(2f64.sqrt(), 5));
    outcome(
        err < 1e-2 && elapsed < Duration::from_secs(1),
        format!("max error {err:.2e}, {:.3} s", elapsed.as_secs_f64()),
    )
}

fn sphere_spectrum() -> Outcome {
    let start = Instant::now();
    let mesh = sample_shape(&CatalogShape::round_sphere(2, vec![0.0; 3], 2.0).unwrap(), 10242, None).unwrap();
    let forms = assemble(&mesh).unwrap();
    let spec = lowest_eigenpairs(&forms, 4, 1e-8).unwrap();
    let elapsed = start.elapsed();
    let err = max_diff(spec.eigenvalues(), &[0.0, 0.5, 0.5, 0.5]);
    let coords: Vec<VertexField> = (0..3).map(|c| VertexField::from_fn(&mesh, move |x| x[c])).collect();
    let angle = match_eigenspace(&spec, &forms, 0.5, &coords).unwrap();
    outcome(
        err < 2e-2 && angle < 3.0 && elapsed < Duration::from_secs(30),
        format!(
            "{} vertices, max error {err:.2e}, angle {angle:.3} deg, {:.2} s",
            mesh.num_vertices(),
            elapsed.as_secs_f64()
        ),
    )
}

fn cylinder_spectrum() -> Outcome {
    let shape = CatalogShape::shrinking_cylinder(2, 1).unwrap();
    let start = Instant::now();
    let at12 = spectrum_of(&sample_shape(&shape, 64, Some(12.0)).unwrap(), 8);
    let elapsed = start.elapsed();
    let at8 = spectrum_of(&sample_shape(&shape, 64, Some(8.0)).unwrap(), 8);
    let oracle = sorted_sums(&circle_reference(2f64.sqrt(), 8), &hermite_reference(8), 8);
    let err = max_diff(&at12, &oracle);
    let drift = max_diff(&at12, &at8);
    outcome(
        err < 2e-2 && drift < 1e-3 && elapsed < Duration::from_secs(60),
        format!("max error {err:.2e}, R=8 vs R=12 change {drift:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn hermite_oracle() -> Outcome {
    let got = hermite_reference(5);
    let err = max_diff(&got, &[0.0, 0.5, 1.0, 1.5, 2.0]);
    outcome(err < 1e-4, format!("max error {err:.2e}"))
}

fn identity_suite() -> Outcome {
    let shapes: Vec<(CatalogShape, usize, Option<f64>)> = vec![
        (CatalogShape::shrinking_sphere(1).unwrap(), 512, None),
        (CatalogShape::shrinking_sphere(2).unwrap(), 10242, None),
        (CatalogShape::shrinking_cylinder(2, 1).unwrap(), 64, Some(12.0)),
        (CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap(), 2048, Some(12.0)),
        (CatalogShape::hyperplane(2, vec![0.0, 0.0, 1.0]).unwrap(), 128, Some(12.0)),
        (CatalogShape::soliton_sphere_product(3, 2, 2f64.sqrt()).unwrap(), 512, None),
        (CatalogShape::soliton_sphere_product(4, 2, 2.0).unwrap(), 10242, None),
        (CatalogShape::soliton_hyperplane_product(3, 2, vec![0.0, 1.0]).unwrap(), 2048, Some(12.0)),
    ];
    let mut failed = Vec::new();
    let mut checks = 0;
    let mut cylinder_pointwise = f64::NAN;
    for (shape, count, trunc) in &shapes {
        let mesh = sample_shape(shape, *count, *trunc).unwrap();
        for r in identity_battery(&mesh).unwrap() {
            checks += 1;
            if !r.pass && !r.skipped {
                failed.push(format!("{}:{} {:.2e}>{:.2e}", shape.variant_name(), r.id, r.residual, r.tol));
            }
            if matches!(shape, CatalogShape::SphereCylinder { .. }) && r.id == "xsq-laplacian" {
                cylinder_pointwise = r.residual;
            }
        }
    }
    outcome(
        failed.is_empty() && cylinder_pointwise < 5e-2,
        format!(
            "{checks} checks on {} shapes, cylinder pointwise {cylinder_pointwise:.2e}, failures {failed:?}",
            shapes.len()
        ),
    )
}

fn rigidity() -> Outcome {
    let mut worst_root = 0.0_f64;
    let mut weakest_off = f64::INFINITY;
    let mut wrong = Vec::new();
    for n in 1..=4 {
        for k in 1..=n {
            let roots = rigidity_roots(&ShapeFamily::SphereCylinder { n, k, center: None, radius: None }).unwrap();
            let r = (2.0 * k as f64).sqrt();
            match roots.as_slice() {
                [CatalogShape::SphereCylinder { center, radius, .. }]
                    if center.iter().all(|&c| c == 0.0) && (radius - r).abs() < 1e-12 => {}
                _ => wrong.push(format!("SphereCylinder n={n} k={k}")),
            }
            worst_root = worst_root.max(residual_sup(&CatalogShape::shrinking_cylinder(n, k).unwrap(), 64, 1).unwrap());
            for s in [0.9, 1.1] {
                let off = CatalogShape::sphere_cylinder(n, k, vec![0.0; k + 1], s * r).unwrap();
                weakest_off = weakest_off.min(residual_sup(&off, 64, 1).unwrap());
            }
            let pinned = ShapeFamily::SphereCylinder { n, k, center: None, radius: Some(1.1 * r) };
            if !rigidity_roots(&pinned).unwrap().is_empty() {
                wrong.push(format!("SphereCylinder n={n} k={k} r=1.1·√(2k)"));
            }
        }
        for k in 2..n {
            let roots = rigidity_roots(&ShapeFamily::SolitonSphereProduct { n, k, radius: None }).unwrap();
            let r = (2.0 * (n - k) as f64).sqrt();
            match roots.as_slice() {
                [CatalogShape::SolitonSphereProduct { radius, .. }] if (radius - r).abs() < 1e-12 => {}
                _ => wrong.push(format!("SolitonSphereProduct n={n} k={k}")),
            }
            worst_root = worst_root.max(residual_sup(&CatalogShape::soliton_sphere_product(n, k, r).unwrap(), 64, 1).unwrap());
            for s in [0.9, 1.1] {
                let off = CatalogShape::soliton_sphere_product(n, k, s * r).unwrap();
                weakest_off = weakest_off.min(residual_sup(&off, 64, 1).unwrap());
            }
        }
    }
    outcome(
        wrong.is_empty() && worst_root < 1e-12 && weakest_off > 0.05,
        format!("root residual {worst_root:.2e}, perturbed minimum {weakest_off:.3}, mismatches {wrong:?}"),
    )
}

fn obstruction() -> Outcome {
    let grid = t_grid(8.0, 0.5);
    let shapes: Vec<(CatalogShape, usize, Option<f64>)> = vec![
        (CatalogShape::shrinking_sphere(1).unwrap(), 512, None),
        (CatalogShape::shrinking_sphere(2).unwrap(), 2562, None),
        (CatalogShape::shrinking_cylinder(2, 1).unwrap(), 64, Some(12.0)),
        (CatalogShape::hyperplane(1, vec![0.0, 1.0]).unwrap(), 512, Some(12.0)),
        (CatalogShape::hyperplane(2, vec![0.0, 0.0, 1.0]).unwrap(), 64, Some(12.0)),
    ];
    let mut misses = 0;
    let mut members = 0;
    for (shape, count, trunc) in &shapes {
        let mesh = sample_shape(shape, *count, *trunc).unwrap();
        let r = scan_collection(&mesh, 100, &grid, shrinker_spectra::DEFAULT_SEED).unwrap();
        misses += r.misses.len();
        members += r.members.len();
    }

    let cyl = sample_shape(&CatalogShape::shrinking_cylinder(2, 1).unwrap(), 64, Some(12.0)).unwrap();
    let ball = ball_product_verdict(&cyl, 1, &[0.0, 0.0], BallTest::Inside).unwrap();
    let product = CatalogShape::soliton_sphere_product(3, 2, 2f64.sqrt()).unwrap();
    let soliton = soliton_containment(&sample_shape(&product, 512, None).unwrap(), &SolitonTest::InsideBall).unwrap();
    let contact = ball.margin.abs().max(soliton.margin.abs());

    let circle = sample_shape(&CatalogShape::round_sphere(1, vec![0.0, 0.0], 1.0).unwrap(), 512, None).unwrap();
    let fmin = check_fminimal(&circle).unwrap().residual;
    outcome(
        misses == 0 && contact < 1e-9 && (fmin - 0.5).abs() < 5e-3,
        format!("{misses} misses in {members} members, contact margin {contact:.2e}, circle f-minimal {fmin:.4}"),
    )
}

fn stability() -> Outcome {
    let shape = CatalogShape::round_sphere(2, vec![0.0; 3], 2.0).unwrap();
    let mesh = sample_shape(&shape, 10242, None).unwrap();
    let worst = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        .iter()
        .map(|v| check_stability_equation(&shape, &mesh, v).unwrap().residual)
        .fold(0.0, f64::max);
    outcome(worst < 2e-3, format!("max weak residual {worst:.3e}"))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["spectrum", "--shape", "sphere", "--resolution", "2562", "-m", "4", "--json"],
        &["identities", "--shape", "cylinder", "--json"],
        &["obstructions", "--shape", "sphere", "--resolution", "642", "--json"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let go = || Command::new(env!("CARGO_BIN_EXE_shrinker-spectra")).args(args).output().unwrap();
        let (a, b) = (go(), go());
        if a.stdout.is_empty() || a.stdout != b.stdout || a.status.code() != b.status.code() {
            differing.push(args[0]);
        }
    }
    outcome(differing.is_empty(), format!("{} commands, differing {differing:?}", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("circle spectrum", circle_spectrum),
        ("sphere spectrum", sphere_spectrum),
        ("cylinder spectrum", cylinder_spectrum),
        ("hermite oracle", hermite_oracle),
        ("identity suite", identity_suite),
        ("rigidity", rigidity),
        ("obstruction", obstruction),
        ("stability", stability),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {} {name}: {} ({})", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
