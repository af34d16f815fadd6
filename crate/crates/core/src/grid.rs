//! Grid descriptors and scalar grid fields for the two model geometries.
//!
//! A torus grid covers `[0, 2pi)^{2n}` with periodic wrap; a radial grid is a
//! uniform 1-D grid in `s = log r^2` on a truncated interval `[s_min, s_max]`.

use std::sync::Arc;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Torus,
    Radial,
}

/// Immutable description of a discretization grid, shared by all fields on it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDesc {
    pub kind: GridKind,
    /// Complex dimension n of the underlying model.
    pub complex_dim: usize,
    /// Node counts per real axis (torus: 2n axes ordered x1,y1,x2,y2; radial: one s axis).
    pub dims: Vec<usize>,
    /// Node spacings per axis.
    pub spacings: Vec<f64>,
    /// Left end of the s interval (radial only, 0 for torus).
    pub s_min: f64,
}

impl GridDesc {
    pub fn torus(n: usize, resolution: usize) -> Result<Arc<Self>> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidModel(format!("torus complex dimension must be 1 or 2, got {n}")));
        }
        if resolution < 4 {
            return Err(Error::InvalidModel(format!("torus resolution must be >= 4, got {resolution}")));
        }
        let h = TWO_PI / resolution as f64;
        Ok(Arc::new(GridDesc {
            kind: GridKind::Torus,
            complex_dim: n,
            dims: vec![resolution; 2 * n],
            spacings: vec![h; 2 * n],
            s_min: 0.0,
        }))
    }

    pub fn radial(n: usize, nodes: usize, s_min: f64, s_max: f64) -> Result<Arc<Self>> {
        if n < 2 {
            return Err(Error::InvalidModel(format!("radial complex dimension must be >= 2, got {n}")));
        }
        if nodes < 4 {
            return Err(Error::InvalidModel(format!("radial grid needs >= 4 nodes, got {nodes}")));
        }
        if !(s_min < s_max) {
            return Err(Error::InvalidModel(format!("require s_min < s_max, got [{s_min}, {s_max}]")));
        }
        let h = (s_max - s_min) / (nodes - 1) as f64;
        Ok(Arc::new(GridDesc {
            kind: GridKind::Radial,
            complex_dim: n,
            dims: vec![nodes],
            spacings: vec![h],
            s_min,
        }))
    }

    pub fn node_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides matching `dims`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    pub fn s_at(&self, i: usize) -> f64 {
        debug_assert_eq!(self.kind, GridKind::Radial);
        self.s_min + i as f64 * self.spacings[0]
    }

    pub fn s_max(&self) -> f64 {
        self.s_min + (self.dims[0] - 1) as f64 * self.spacings[0]
    }

    /// Real coordinates of a flat node index (torus).
    pub fn coords(&self, mut idx: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            let i = idx % self.dims[a];
            idx /= self.dims[a];
            c[a] = i as f64 * self.spacings[a];
        }
        c
    }
}

/// One real 64-bit value per grid node.
#[derive(Clone, Debug)]
pub struct GridField {
    pub desc: Arc<GridDesc>,
    pub data: Vec<f64>,
}

impl GridField {
    pub fn zeros(desc: &Arc<GridDesc>) -> Self {
        GridField { desc: desc.clone(), data: vec![0.0; desc.node_count()] }
    }

    pub fn constant(desc: &Arc<GridDesc>, value: f64) -> Self {
        GridField { desc: desc.clone(), data: vec![value; desc.node_count()] }
    }

    /// Sample a function of the real coordinates (torus) at every node.
    pub fn from_coord_fn(desc: &Arc<GridDesc>, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = desc.node_count();
        let mut data = Vec::with_capacity(n);
        for idx in 0..n {
            data.push(f(&desc.coords(idx)));
        }
        GridField { desc: desc.clone(), data }
    }

    /// Sample a function of s at every node (radial).
    pub fn from_s_fn(desc: &Arc<GridDesc>, f: impl Fn(f64) -> f64) -> Self {
        debug_assert_eq!(desc.kind, GridKind::Radial);
        let data = (0..desc.dims[0]).map(|i| f(desc.s_at(i))).collect();
        GridField { desc: desc.clone(), data }
    }

    pub fn same_grid(&self, other: &GridField) -> Result<()> {
        if self.desc.dims != other.desc.dims || self.desc.kind != other.desc.kind {
            return Err(Error::ShapeMismatch {
                expected: self.desc.dims.clone(),
                got: other.desc.dims.clone(),
            });
        }
        Ok(())
    }

    pub fn check_shape(&self, desc: &GridDesc) -> Result<()> {
        if self.desc.dims != desc.dims || self.desc.kind != desc.kind {
            return Err(Error::ShapeMismatch { expected: desc.dims.clone(), got: self.desc.dims.clone() });
        }
        Ok(())
    }

    pub fn sup_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { desc: self.desc.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn axpy(&mut self, a: f64, x: &GridField) {
        for (s, v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
    }

    pub fn scaled(&self, a: f64) -> GridField {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &GridField) -> GridField {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        GridField { desc: self.desc.clone(), data }
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        GridField { desc: self.desc.clone(), data }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Centered first difference along a torus axis (periodic wrap).
    pub fn d1_axis(&self, axis: usize) -> GridField {
        self.stencil_axis(axis, |um, _u0, up, h| (up - um) / (2.0 * h))
    }

    /// Centered second difference along a torus axis (periodic wrap).
    pub fn d2_axis(&self, axis: usize) -> GridField {
        self.stencil_axis(axis, |um, u0, up, h| (up - 2.0 * u0 + um) / (h * h))
    }

    fn stencil_axis(&self, axis: usize, f: impl Fn(f64, f64, f64, f64) -> f64) -> GridField {
        debug_assert_eq!(self.desc.kind, GridKind::Torus);
        let dims = &self.desc.dims;
        let strides = self.desc.strides();
        let len = dims[axis];
        let stride = strides[axis];
        let h = self.desc.spacings[axis];
        let total = self.desc.node_count();
        let block = stride * len;
        let mut out = vec![0.0; total];
        for base in (0..total).step_by(block) {
            for inner in 0..stride {
                let line = base + inner;
                for k in 0..len {
                    let i0 = line + k * stride;
                    let im = line + ((k + len - 1) % len) * stride;
                    let ip = line + ((k + 1) % len) * stride;
                    out[i0] = f(self.data[im], self.data[i0], self.data[ip], h);
                }
            }
        }
        GridField { desc: self.desc.clone(), data: out }
    }

    /// Mixed second difference along two distinct torus axes.
    pub fn d_mixed(&self, a: usize, b: usize) -> GridField {
        debug_assert_eq!(self.desc.kind, GridKind::Torus);
        debug_assert_ne!(a, b);
        let dims = &self.desc.dims;
        let strides = self.desc.strides();
        let (la, lb) = (dims[a], dims[b]);
        let (sa, sb) = (strides[a], strides[b]);
        let denom = 4.0 * self.desc.spacings[a] * self.desc.spacings[b];
        let total = self.desc.node_count();
        let mut out = vec![0.0; total];
        for idx in 0..total {
            let ka = (idx / sa) % la;
            let kb = (idx / sb) % lb;
            let base = idx - ka * sa - kb * sb;
            let kap = (ka + 1) % la;
            let kam = (ka + la - 1) % la;
            let kbp = (kb + 1) % lb;
            let kbm = (kb + lb - 1) % lb;
            out[idx] = (self.data[base + kap * sa + kbp * sb] - self.data[base + kap * sa + kbm * sb]
                - self.data[base + kam * sa + kbp * sb]
                + self.data[base + kam * sa + kbm * sb])
                / denom;
        }
        GridField { desc: self.desc.clone(), data: out }
    }

    /// First s-derivative on a radial grid, second-order one-sided at the ends.
    pub fn ds1(&self) -> GridField {
        debug_assert_eq!(self.desc.kind, GridKind::Radial);
        let u = &self.data;
        let m = u.len();
        let h = self.desc.spacings[0];
        let mut out = vec![0.0; m];
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        for i in 1..m - 1 {
            out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        out[m - 1] = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h);
        GridField { desc: self.desc.clone(), data: out }
    }

    /// Second s-derivative on a radial grid, second-order one-sided at the ends.
    pub fn ds2(&self) -> GridField {
        debug_assert_eq!(self.desc.kind, GridKind::Radial);
        let u = &self.data;
        let m = u.len();
        let h2 = self.desc.spacings[0] * self.desc.spacings[0];
        let mut out = vec![0.0; m];
        out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2;
        for i in 1..m - 1 {
            out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
        }
        out[m - 1] = (2.0 * u[m - 1] - 5.0 * u[m - 2] + 4.0 * u[m - 3] - u[m - 4]) / h2;
        GridField { desc: self.desc.clone(), data: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_second_difference_of_cos_is_minus_cos() {
        let desc = GridDesc::torus(1, 128).unwrap();
        let u = GridField::from_coord_fn(&desc, |c| c[0].cos());
        let uxx = u.d2_axis(0);
        let exact = GridField::from_coord_fn(&desc, |c| -c[0].cos());
        let err = uxx.sub(&exact).sup_abs();
        assert!(err < 3e-4, "err={err}");
    }

    #[test]
    fn radial_one_sided_stencils_are_second_order() {
        let d1 = GridDesc::radial(2, 64, -1.0, 1.0).unwrap();
        let d2 = GridDesc::radial(2, 128, -1.0, 1.0).unwrap();
        let errs: Vec<f64> = [d1, d2]
            .iter()
            .map(|d| {
                let u = GridField::from_s_fn(d, |s| (2.0 * s).sin());
                let exact = GridField::from_s_fn(d, |s| -4.0 * (2.0 * s).sin());
                u.ds2().sub(&exact).sup_abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.0, "ratio {}", errs[0] / errs[1]);
    }

    #[test]
    fn mixed_difference_of_product_mode() {
        let desc = GridDesc::torus(1, 96).unwrap();
        let u = GridField::from_coord_fn(&desc, |c| c[0].sin() * c[1].sin());
        let uxy = u.d_mixed(0, 1);
        let exact = GridField::from_coord_fn(&desc, |c| c[0].cos() * c[1].cos());
        assert!(uxy.sub(&exact).sup_abs() < 2e-3);
    }
}
