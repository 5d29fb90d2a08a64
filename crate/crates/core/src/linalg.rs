//! Small dense-vector helpers on `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Orthonormal basis of the complement of a unit vector, by Gram–Schmidt on the
/// canonical basis. Deterministic for a given input.
pub fn orthonormal_complement(unit: &[f64]) -> Vec<Vec<f64>> {
    let d = unit.len();
    let mut basis: Vec<Vec<f64>> = vec![unit.to_vec()];
    for i in 0..d {
        if basis.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&e, b);
                axpy(-c, b, &mut e);
            }
        }
        let n = norm(&e);
        if n > 1e-6 {
            basis.push(scale(&e, 1.0 / n));
        }
    }
    basis.remove(0);
    basis
}
