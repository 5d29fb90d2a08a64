//! Compressed sparse row matrices and an envelope (profile) Cholesky factorization
//! with reverse Cuthill–McKee ordering.

use std::collections::VecDeque;
use std::io::Write;

use crate::{Error, Result};

/// Square sparse matrix in CSR layout. Symmetric matrices store both triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed in
    /// the order they appear in `triplets`, which keeps the result bitwise
    /// reproducible for a fixed input order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        // stable: equal (row, col) keep input order
        order.sort_by_key(|&t| (triplets[t].0, triplets[t].1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &t in &order {
            let (r, c, v) = triplets[t];
            assert!(r < n && c < n, "triplet ({r}, {c}) out of bounds for n = {n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, a)| a * x[j]).sum();
        }
    }

    /// `uᵀ A v`
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let av = self.mul_vec(v);
        u.iter().zip(&av).map(|(a, b)| a * b).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, a)| a).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij − a_ji| / max |a_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut d = 0.0_f64;
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                d = d.max((a - self.get(j, i)).abs());
            }
        }
        d / scale
    }

    /// `self + alpha * other`, on the union pattern.
    pub fn add_scaled(&self, other: &CsrMatrix, alpha: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, a)| (i, j, a)));
        }
        for i in 0..other.n {
            t.extend(other.row(i).map(|(j, a)| (i, j, alpha * a)));
        }
        CsrMatrix::from_triplets(self.n, &t)
    }

    /// Writes Matrix Market coordinate format. With `symmetric`, only the lower
    /// triangle is emitted.
    pub fn write_matrix_market<W: Write>(&self, mut w: W, symmetric: bool) -> Result<()> {
        let kind = if symmetric { "symmetric" } else { "general" };
        writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
        let entries: Vec<(usize, usize, f64)> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, a)| (i, j, a)))
            .filter(|&(i, j, _)| !symmetric || j <= i)
            .collect();
        writeln!(w, "{} {} {}", self.n, self.n, entries.len())?;
        for (i, j, a) in entries {
            writeln!(w, "{} {} {:.16e}", i + 1, j + 1, a)?;
        }
        Ok(())
    }

    /// Reverse Cuthill–McKee ordering of the adjacency graph. `perm[new] = old`.
    pub fn rcm_ordering(&self) -> Vec<usize> {
        let n = self.n;
        let degree: Vec<usize> = (0..n).map(|i| self.row(i).filter(|&(j, _)| j != i).count()).collect();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let bfs_levels = |start: usize, visited_mask: &[bool]| -> (usize, usize) {
            // returns (eccentricity, a farthest node of minimum degree)
            let mut dist = vec![usize::MAX; n];
            dist[start] = 0;
            let mut q = VecDeque::from([start]);
            let mut last = start;
            while let Some(u) = q.pop_front() {
                if dist[u] > dist[last] || (dist[u] == dist[last] && degree[u] < degree[last]) {
                    last = u;
                }
                for (v, _) in self.row(u) {
                    if !visited_mask[v] && dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            (dist[last], last)
        };
        for seed in 0..n {
            if visited[seed] {
                continue;
            }
            // pseudo-peripheral start node reached from `seed`
            let mut start = seed;
            let (mut ecc, mut far) = bfs_levels(start, &visited);
            for _ in 0..8 {
                let (e2, f2) = bfs_levels(far, &visited);
                if e2 <= ecc {
                    break;
                }
                (start, ecc, far) = (far, e2, f2);
            }
            visited[start] = true;
            let mut q = VecDeque::from([start]);
            while let Some(u) = q.pop_front() {
                order.push(u);
                let mut nbrs: Vec<usize> = self.row(u).map(|(v, _)| v).filter(|&v| !visited[v]).collect();
                nbrs.sort_by_key(|&v| (degree[v], v));
                for v in nbrs {
                    visited[v] = true;
                    q.push_back(v);
                }
            }
        }
        order.reverse();
        order
    }
}

/// `L Lᵀ` factorization of a symmetric positive definite matrix stored by rows
/// over each row's envelope, after a symmetric permutation.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        Self::factor_with_ordering(a, a.rcm_ordering())
    }

    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for i in 0..n {
            let old = perm[i];
            first[i] = a.row(old).map(|(j, _)| inv[j]).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; start[n]];
        for i in 0..n {
            for (j_old, v) in a.row(perm[i]) {
                let j = inv[j_old];
                if j <= i {
                    values[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = values[start[i] + j - fi];
                let ri = start[i] + lo - fi;
                let rj = start[j] + lo - fj;
                let len = j - lo;
                let row_i = &values[ri..ri + len];
                let row_j = &values[rj..rj + len];
                s -= row_i.iter().zip(row_j).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    values[start[i] + j - fi] = s / values[start[j + 1] - 1];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    values[start[i] + i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self {
            perm,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        // Lᵀ x = y
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (l, yj) in row[..i - fi].iter().zip(&mut y[fi..i]) {
                *yj -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
