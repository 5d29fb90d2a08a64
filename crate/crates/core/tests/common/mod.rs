//! Reference computations shared by the integration tests. Nothing here calls
//! into the library.

#![allow(dead_code)]

/// Eigenvalues of `−u'' + (s/2)u'` on `[−a, a]` with Dirichlet ends, via the
/// symmetric conjugate `−ψ'' + (s²/16 − ¼)ψ` on `nodes` interior points.
pub struct HermiteOracle {
    diag: Vec<f64>,
    off: f64,
}

impl HermiteOracle {
    pub fn new(nodes: usize, a: f64) -> Self {
        let h = 2.0 * a / (nodes + 1) as f64;
        let diag = (1..=nodes)
            .map(|i| {
                let s = -a + i as f64 * h;
                2.0 / (h * h) + s * s / 16.0 - 0.25
            })
            .collect();
        Self { diag, off: -1.0 / (h * h) }
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - x } else { a - x - self.off * self.off / d };
            if d == 0.0 {
                d = -f64::EPSILON;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `m`-th eigenvalue (0-based) by bisection on `[lo, hi]`.
    pub fn eigenvalue(&self, m: usize, mut lo: f64, mut hi: f64) -> f64 {
        assert!(self.count_below(lo) <= m && self.count_below(hi) > m);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > m {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The first `count` Hermite-line eigenvalues from a 10⁴-node oracle on `[−12, 12]`.
pub fn hermite_reference(count: usize) -> Vec<f64> {
    let oracle = HermiteOracle::new(10_000, 12.0);
    (0..count).map(|m| oracle.eigenvalue(m, -1.0, 50.0)).collect()
}

/// `k²/r²` with multiplicity 2 for `k ≥ 1`, listed in order.
pub fn circle_reference(r: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut k = 1;
    while out.len() < count {
        let v = (k * k) as f64 / (r * r);
        out.push(v);
        out.push(v);
        k += 1;
    }
    out.truncate(count);
    out
}

/// Sorted pairwise sums, smallest `count`.
pub fn sorted_sums(a: &[f64], b: &[f64], count: usize) -> Vec<f64> {
    let mut s: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    s.sort_by(f64::total_cmp);
    s.truncate(count);
    s
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
