//! Compressed sparse row matrices and Jacobi-preconditioned conjugate gradients.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

/// Row-by-row builder; entries within a row may be pushed in any order and
/// duplicates are summed.
#[derive(Debug, Default)]
pub struct CsrBuilder {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    row: Vec<(usize, f64)>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        CsrBuilder { n, row_ptr: vec![0], ..Default::default() }
    }

    pub fn push(&mut self, col: usize, val: f64) {
        self.row.push((col, val));
    }

    pub fn end_row(&mut self) {
        self.row.sort_by_key(|e| e.0);
        let mut last = None;
        for &(c, v) in &self.row {
            if last == Some(c) {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
                last = Some(c);
            }
        }
        self.row.clear();
        self.row_ptr.push(self.cols.len());
    }

    pub fn finish(self) -> Csr {
        assert_eq!(self.row_ptr.len(), self.n + 1, "row count mismatch");
        Csr { n: self.n, row_ptr: self.row_ptr, cols: self.cols, vals: self.vals }
    }
}

impl Csr {
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .find(|&k| self.cols[k] == j)
            .map_or(0.0, |k| self.vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| self.get(self.cols[k], i) == self.vals[k]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// `‖b − Ax‖ / ‖b‖` at exit.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `Ax = b` for symmetric positive definite `A`, starting from `x`.
pub fn pcg(a: &Csr, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<CgOutcome> {
    let n = a.n;
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Domain(format!("non-positive diagonal entry {} in row {i}", diag[i])));
    }
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome { iterations: 0, relative_residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..=max_iter {
        let res = dot(&r, &r).sqrt() / bnorm;
        if res <= rel_tol {
            return Ok(CgOutcome { iterations: it, relative_residual: res });
        }
        if it == max_iter {
            return Err(Error::NoConvergence { iterations: it, residual: res });
        }
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> Csr {
        let mut b = CsrBuilder::new(n);
        for i in 0..n {
            b.push(i, 2.0);
            if i > 0 {
                b.push(i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i + 1, -1.0);
            }
            b.end_row();
        }
        b.finish()
    }

    #[test]
    fn duplicates_are_summed() {
        let mut b = CsrBuilder::new(1);
        b.push(0, 1.0);
        b.push(0, 2.5);
        b.end_row();
        assert_eq!(b.finish().get(0, 0), 3.5);
    }

    #[test]
    fn cg_solves_tridiagonal() {
        let a = laplace_1d(50);
        assert!(a.is_symmetric());
        let exact: Vec<f64> = (0..50).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut b = vec![0.0; 50];
        a.mul(&exact, &mut b);
        let mut x = vec![0.0; 50];
        let out = pcg(&a, &b, &mut x, 1e-13, 500).unwrap();
        assert!(out.relative_residual <= 1e-13);
        for (u, v) in x.iter().zip(&exact) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cg_reports_iteration_cap() {
        let a = laplace_1d(100);
        let b = vec![1.0; 100];
        let mut x = vec![0.0; 100];
        assert!(matches!(pcg(&a, &b, &mut x, 1e-14, 3), Err(Error::NoConvergence { iterations: 3, .. })));
    }
}
