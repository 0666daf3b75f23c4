//! Uniform rectangular grids holding extended-real samples.
//!
//! A grid represents a function on the box spanned by its nodes; everything
//! outside the box is +inf, so grid functions are always compactly
//! supported. Values are stored row-major with the last axis fastest.

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// A uniformly spaced n-dimensional grid, n in {1, 2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<ExtReal>,
}

impl Grid {
    pub fn new(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<ExtReal>,
    ) -> Result<Grid> {
        let n = origin.len();
        if n == 0 || n > 3 {
            return Err(Error::invalid("dim", format!("grids support 1..=3 axes, got {n}")));
        }
        if spacing.len() != n || shape.len() != n {
            return Err(Error::invalid("shape", "origin/spacing/shape lengths differ"));
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid("spacing", "spacings must be positive and finite"));
        }
        if shape.contains(&0) {
            return Err(Error::invalid("shape", "axes must have at least one node"));
        }
        let total: usize = shape.iter().product();
        if values.len() != total {
            return Err(Error::invalid(
                "values",
                format!("expected {total} values, got {}", values.len()),
            ));
        }
        Ok(Grid { origin, spacing, shape, values })
    }

    /// Builds a grid by sampling `f` at every node.
    pub fn sample(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        mut f: impl FnMut(&[f64]) -> ExtReal,
    ) -> Result<Grid> {
        let total: usize = shape.iter().product();
        let mut g = Grid::new(origin, spacing, shape, vec![ExtReal::ZERO; total])?;
        let mut x = vec![0.0; g.dim()];
        for flat in 0..total {
            g.node_at(flat, &mut x);
            g.values[flat] = f(&x);
        }
        Ok(g)
    }

    /// Symmetric 1-D grid on [-half, half] with `len` nodes.
    pub fn sample_1d(half: f64, len: usize, f: impl FnMut(&[f64]) -> ExtReal) -> Result<Grid> {
        let h = 2.0 * half / (len - 1) as f64;
        Grid::sample(vec![-half], vec![h], vec![len], f)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [ExtReal] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinate of node `i` along `axis`.
    pub fn axis_node(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (d, &i) in idx.iter().enumerate() {
            flat = flat * self.shape[d] + i;
        }
        flat
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for d in (0..self.dim()).rev() {
            idx[d] = flat % self.shape[d];
            flat /= self.shape[d];
        }
        idx
    }

    /// Writes the coordinates of the node with flat index `flat` into `x`.
    pub fn node_at(&self, mut flat: usize, x: &mut [f64]) {
        for d in (0..self.dim()).rev() {
            let i = flat % self.shape[d];
            flat /= self.shape[d];
            x[d] = self.axis_node(d, i);
        }
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.node_at(flat, &mut x);
        x
    }

    pub fn value(&self, idx: &[usize]) -> ExtReal {
        self.values[self.flat_index(idx)]
    }

    /// Flat offsets of the first node of every line along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        let len = self.shape[axis];
        let mut starts = Vec::with_capacity(self.len() / len);
        for flat in 0..self.len() {
            // A node starts a line iff its index along `axis` is zero.
            if (flat / stride).is_multiple_of(len) {
                starts.push(flat);
            }
        }
        starts
    }

    /// max(1, largest |finite value|); the scale used by relative tolerances.
    pub fn finite_scale(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|v| v.finite_value())
            .fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn has_finite_value(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Multilinear interpolation. Returns +inf outside the bounding box or
    /// whenever any corner of the enclosing cell is +inf (the function is
    /// +inf off its effective domain, and we keep the lower semi-continuous
    /// extension of the finite part).
    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let n = self.dim();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for d in 0..n {
            let m = self.shape[d];
            let t = (x[d] - self.origin[d]) / self.spacing[d];
            let slack = 1e-9 * (m as f64).max(1.0);
            if t < -slack || t > (m - 1) as f64 + slack {
                return Ok(ExtReal::INF);
            }
            if m == 1 {
                base[d] = 0;
                frac[d] = 0.0;
                continue;
            }
            let i = (t.floor() as isize).clamp(0, m as isize - 2) as usize;
            base[d] = i;
            frac[d] = (t - i as f64).clamp(0.0, 1.0);
        }
        // Accumulate over the 2^n corners of the cell. Corners with weight
        // exactly 0 are skipped: a query on a cell face only sees the face,
        // so a finite node keeps its liminf value next to an inf region.
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for d in 0..n {
                if corner >> d & 1 == 1 && self.shape[d] > 1 {
                    idx[d] = base[d] + 1;
                    w *= frac[d];
                } else {
                    idx[d] = base[d];
                    w *= 1.0 - frac[d];
                }
            }
            if w == 0.0 {
                continue;
            }
            let v = self.value(&idx[..n]);
            if v.is_inf() {
                return Ok(ExtReal::INF);
            }
            acc += w * v.raw();
        }
        Ok(ExtReal::finite(acc))
    }
}
