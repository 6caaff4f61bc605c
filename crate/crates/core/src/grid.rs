//! Uniform rectangular node grids.

use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes `(a1 + i h1, a2 + j h2)` for `i < n1`, `j < n2`, stored with `i`
/// varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub a1: f64,
    pub a2: f64,
    pub h1: f64,
    pub h2: f64,
    pub n1: usize,
    pub n2: usize,
}

impl Grid {
    /// Grid with `n1 × n2` nodes spanning `[a1, b1] × [a2, b2]`.
    pub fn new(a1: f64, b1: f64, n1: usize, a2: f64, b2: f64, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::Config(format!("grid needs at least 2 nodes per axis, got {n1} x {n2}")));
        }
        if !(b1 > a1 && b2 > a2) || ![a1, b1, a2, b2].iter().all(|v| v.is_finite()) {
            return Err(Error::Config(format!("invalid rectangle [{a1}, {b1}] x [{a2}, {b2}]")));
        }
        Ok(Grid {
            a1,
            a2,
            h1: (b1 - a1) / (n1 - 1) as f64,
            h2: (b2 - a2) / (n2 - 1) as f64,
            n1,
            n2,
        })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn b1(&self) -> f64 {
        self.a1 + (self.n1 - 1) as f64 * self.h1
    }

    pub fn b2(&self) -> f64 {
        self.a2 + (self.n2 - 1) as f64 * self.h2
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n1, k / self.n1)
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.a1 + i as f64 * self.h1
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        self.a2 + j as f64 * self.h2
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.x1(i), self.x2(j)]
    }

    pub fn cell_area(&self) -> f64 {
        self.h1 * self.h2
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n1 || j + 1 == self.n2
    }

    /// Nearest node to `p`.
    pub fn nearest(&self, p: [f64; 2]) -> Result<(usize, usize)> {
        let fi = (p[0] - self.a1) / self.h1;
        let fj = (p[1] - self.a2) / self.h2;
        let tol = 1e-9;
        if fi < -tol || fj < -tol || fi > (self.n1 - 1) as f64 + tol || fj > (self.n2 - 1) as f64 + tol {
            return Err(Error::OutOfBounds(format!(
                "({}, {}) outside [{}, {}] x [{}, {}]",
                p[0],
                p[1],
                self.a1,
                self.b1(),
                self.a2,
                self.b2()
            )));
        }
        let i = (fi.round().max(0.0) as usize).min(self.n1 - 1);
        let j = (fj.round().max(0.0) as usize).min(self.n2 - 1);
        Ok((i, j))
    }

    /// Measure of the union of closed cells with at least half of their
    /// corners in `mask`.
    pub fn cell_measure(&self, mask: &[bool]) -> f64 {
        self.cell_count(mask) as f64 * self.cell_area()
    }

    pub fn cell_count(&self, mask: &[bool]) -> usize {
        let mut count = 0;
        for j in 0..self.n2 - 1 {
            for i in 0..self.n1 - 1 {
                let c = [self.idx(i, j), self.idx(i + 1, j), self.idx(i, j + 1), self.idx(i + 1, j + 1)];
                if c.iter().filter(|&&k| mask[k]).count() >= 2 {
                    count += 1;
                }
            }
        }
        count
    }
}
