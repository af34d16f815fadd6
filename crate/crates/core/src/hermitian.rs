//! Hermitian (1,1)-form fields on model grids.
//!
//! Torus fields store the independent matrix components per node; the radial
//! model stores only the two eigenvalues (perpendicular with multiplicity n-1
//! and radial), which is exact under the U(n) symmetry of radial data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridDesc, GridKind};

/// Per-node storage for the three supported model shapes.
#[derive(Clone, Debug)]
pub enum HermData {
    /// Torus n=1: the single real entry h_{11bar}.
    Scalar(Vec<f64>),
    /// Torus n=2: diagonal entries plus the complex off-diagonal h_{12bar}.
    Two { h11: Vec<f64>, h22: Vec<f64>, re12: Vec<f64>, im12: Vec<f64> },
    /// Radial: eigenvalue pair (lambda_perp multiplicity n-1, lambda_rad).
    RadialPair { perp: Vec<f64>, rad: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct HermitianField {
    pub desc: Arc<GridDesc>,
    pub data: HermData,
}

impl HermitianField {
    pub fn zeros(desc: &Arc<GridDesc>) -> Self {
        let m = desc.node_count();
        let data = match (desc.kind, desc.complex_dim) {
            (GridKind::Torus, 1) => HermData::Scalar(vec![0.0; m]),
            (GridKind::Torus, 2) => HermData::Two {
                h11: vec![0.0; m],
                h22: vec![0.0; m],
                re12: vec![0.0; m],
                im12: vec![0.0; m],
            },
            (GridKind::Radial, _) => HermData::RadialPair { perp: vec![0.0; m], rad: vec![0.0; m] },
            _ => unreachable!("grid constructors reject other shapes"),
        };
        HermitianField { desc: desc.clone(), data }
    }

    /// Identity form (delta_{ij}) on a torus grid; (1,1) eigenvalues on radial.
    pub fn identity(desc: &Arc<GridDesc>) -> Self {
        let mut out = Self::zeros(desc);
        match &mut out.data {
            HermData::Scalar(h) => h.fill(1.0),
            HermData::Two { h11, h22, .. } => {
                h11.fill(1.0);
                h22.fill(1.0);
            }
            HermData::RadialPair { perp, rad } => {
                perp.fill(1.0);
                rad.fill(1.0);
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.desc.node_count()
    }

    pub fn same_shape(&self, other: &HermitianField) -> Result<()> {
        let ok = match (&self.data, &other.data) {
            (HermData::Scalar(_), HermData::Scalar(_)) => true,
            (HermData::Two { .. }, HermData::Two { .. }) => true,
            (HermData::RadialPair { .. }, HermData::RadialPair { .. }) => true,
            _ => false,
        };
        if !ok || self.desc.dims != other.desc.dims {
            return Err(Error::ShapeMismatch {
                expected: self.desc.dims.clone(),
                got: other.desc.dims.clone(),
            });
        }
        Ok(())
    }

    pub fn map2(&self, other: &HermitianField, f: impl Fn(f64, f64) -> f64) -> HermitianField {
        let data = match (&self.data, &other.data) {
            (HermData::Scalar(a), HermData::Scalar(b)) => {
                HermData::Scalar(zip(a, b, &f))
            }
            (
                HermData::Two { h11: a11, h22: a22, re12: ar, im12: ai },
                HermData::Two { h11: b11, h22: b22, re12: br, im12: bi },
            ) => HermData::Two {
                h11: zip(a11, b11, &f),
                h22: zip(a22, b22, &f),
                re12: zip(ar, br, &f),
                im12: zip(ai, bi, &f),
            },
            (
                HermData::RadialPair { perp: ap, rad: ar },
                HermData::RadialPair { perp: bp, rad: br },
            ) => HermData::RadialPair { perp: zip(ap, bp, &f), rad: zip(ar, br, &f) },
            _ => panic!("shape mismatch in map2"),
        };
        HermitianField { desc: self.desc.clone(), data }
    }

    pub fn add(&self, other: &HermitianField) -> HermitianField {
        self.map2(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &HermitianField) -> HermitianField {
        self.map2(other, |a, b| a - b)
    }

    pub fn add_scaled(&self, c: f64, other: &HermitianField) -> HermitianField {
        self.map2(other, |a, b| a + c * b)
    }

    pub fn scaled(&self, c: f64) -> HermitianField {
        let data = match &self.data {
            HermData::Scalar(a) => HermData::Scalar(a.iter().map(|v| c * v).collect()),
            HermData::Two { h11, h22, re12, im12 } => HermData::Two {
                h11: h11.iter().map(|v| c * v).collect(),
                h22: h22.iter().map(|v| c * v).collect(),
                re12: re12.iter().map(|v| c * v).collect(),
                im12: im12.iter().map(|v| c * v).collect(),
            },
            HermData::RadialPair { perp, rad } => HermData::RadialPair {
                perp: perp.iter().map(|v| c * v).collect(),
                rad: rad.iter().map(|v| c * v).collect(),
            },
        };
        HermitianField { desc: self.desc.clone(), data }
    }

    /// det of the node matrix.
    pub fn det_at(&self, i: usize) -> f64 {
        match &self.data {
            HermData::Scalar(h) => h[i],
            HermData::Two { h11, h22, re12, im12 } => {
                h11[i] * h22[i] - (re12[i] * re12[i] + im12[i] * im12[i])
            }
            HermData::RadialPair { perp, rad } => {
                perp[i].powi(self.desc.complex_dim as i32 - 1) * rad[i]
            }
        }
    }

    /// log det of the node matrix; requires positivity.
    pub fn log_det_at(&self, i: usize) -> f64 {
        match &self.data {
            HermData::Scalar(h) => h[i].ln(),
            HermData::Two { .. } => self.det_at(i).ln(),
            HermData::RadialPair { perp, rad } => {
                (self.desc.complex_dim - 1) as f64 * perp[i].ln() + rad[i].ln()
            }
        }
    }

    /// Smallest eigenvalue of the node matrix (against the identity).
    pub fn min_eigen_at(&self, i: usize) -> f64 {
        match &self.data {
            HermData::Scalar(h) => h[i],
            HermData::Two { h11, h22, re12, im12 } => {
                let tr = h11[i] + h22[i];
                let det = h11[i] * h22[i] - (re12[i] * re12[i] + im12[i] * im12[i]);
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                tr / 2.0 - disc
            }
            HermData::RadialPair { perp, rad } => perp[i].min(rad[i]),
        }
    }

    /// Global minimum eigenvalue over all nodes.
    pub fn min_eigen(&self) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut node = 0;
        for i in 0..self.node_count() {
            let e = self.min_eigen_at(i);
            if e < best {
                best = e;
                node = i;
            }
        }
        (best, node)
    }

    pub fn check_positive(&self, floor: f64) -> Result<()> {
        let (e, node) = self.min_eigen();
        if !(e > floor) {
            return Err(Error::SingularMetric { node, eigenvalue: e, floor });
        }
        Ok(())
    }

    /// trace(self^{-1} other) at one node; self must be positive definite.
    pub fn inv_trace_against_at(&self, other: &HermitianField, i: usize) -> f64 {
        match (&self.data, &other.data) {
            (HermData::Scalar(g), HermData::Scalar(a)) => a[i] / g[i],
            (
                HermData::Two { h11: g11, h22: g22, re12: gr, im12: gi },
                HermData::Two { h11: a11, h22: a22, re12: ar, im12: ai },
            ) => {
                let det = g11[i] * g22[i] - (gr[i] * gr[i] + gi[i] * gi[i]);
                // tr(g^{-1}A) = (g22 A11 + g11 A22 - 2 Re(g12bar A12)) / det g
                (g22[i] * a11[i] + g11[i] * a22[i] - 2.0 * (gr[i] * ar[i] + gi[i] * ai[i])) / det
            }
            (
                HermData::RadialPair { perp: gp, rad: gr },
                HermData::RadialPair { perp: ap, rad: ar },
            ) => (self.desc.complex_dim - 1) as f64 * ap[i] / gp[i] + ar[i] / gr[i],
            _ => panic!("shape mismatch in inv_trace_against_at"),
        }
    }

    /// trace of self^{-1} against the identity.
    pub fn inv_trace_at(&self, i: usize) -> f64 {
        match &self.data {
            HermData::Scalar(g) => 1.0 / g[i],
            HermData::Two { h11, h22, re12, im12 } => {
                let det = h11[i] * h22[i] - (re12[i] * re12[i] + im12[i] * im12[i]);
                (h11[i] + h22[i]) / det
            }
            HermData::RadialPair { perp, rad } => {
                (self.desc.complex_dim - 1) as f64 / perp[i] + 1.0 / rad[i]
            }
        }
    }

    /// Eigenvalue range of self^{-1} other at one node (other need not be positive).
    pub fn rel_eigen_at(&self, other: &HermitianField, i: usize) -> (f64, f64) {
        match (&self.data, &other.data) {
            (HermData::Scalar(g), HermData::Scalar(a)) => {
                let r = a[i] / g[i];
                (r, r)
            }
            (HermData::Two { .. }, HermData::Two { .. }) => {
                // Roots of lambda^2 - tr(B^{-1}A) lambda + det A / det B.
                let tr = self.inv_trace_against_at(other, i);
                let dr = other.det_at(i) / self.det_at(i);
                let disc = (tr * tr / 4.0 - dr).max(0.0).sqrt();
                (tr / 2.0 - disc, tr / 2.0 + disc)
            }
            (
                HermData::RadialPair { perp: gp, rad: gr },
                HermData::RadialPair { perp: ap, rad: ar },
            ) => {
                let a = ap[i] / gp[i];
                let b = ar[i] / gr[i];
                (a.min(b), a.max(b))
            }
            _ => panic!("shape mismatch in rel_eigen_at"),
        }
    }

    /// Squared norm of `other` measured with self as metric:
    /// g^{i jbar} g^{k lbar} A_{i lbar} A_{k jbar} (real, >= 0 for Hermitian A).
    pub fn norm_sq_wrt_at(&self, other: &HermitianField, i: usize) -> f64 {
        match (&self.data, &other.data) {
            (HermData::Scalar(g), HermData::Scalar(a)) => {
                let r = a[i] / g[i];
                r * r
            }
            (HermData::Two { .. }, HermData::Two { .. }) => {
                // For 2x2, |A|_g^2 = tr((g^{-1}A)^2) = tr^2 - 2 det(g^{-1}A).
                let tr = self.inv_trace_against_at(other, i);
                let dr = other.det_at(i) / self.det_at(i);
                tr * tr - 2.0 * dr
            }
            (
                HermData::RadialPair { perp: gp, rad: gr },
                HermData::RadialPair { perp: ap, rad: ar },
            ) => {
                let p = ap[i] / gp[i];
                let r = ar[i] / gr[i];
                (self.desc.complex_dim - 1) as f64 * p * p + r * r
            }
            _ => panic!("shape mismatch in norm_sq_wrt_at"),
        }
    }

    pub fn all_finite(&self) -> bool {
        let chk = |v: &Vec<f64>| v.iter().all(|x| x.is_finite());
        match &self.data {
            HermData::Scalar(h) => chk(h),
            HermData::Two { h11, h22, re12, im12 } => chk(h11) && chk(h22) && chk(re12) && chk(im12),
            HermData::RadialPair { perp, rad } => chk(perp) && chk(rad),
        }
    }

    /// Sup over nodes of the Frobenius-style component magnitude (coordinate norm).
    pub fn sup_component(&self) -> f64 {
        let sup = |v: &Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        match &self.data {
            HermData::Scalar(h) => sup(h),
            HermData::Two { h11, h22, re12, im12 } => {
                sup(h11).max(sup(h22)).max(sup(re12)).max(sup(im12))
            }
            HermData::RadialPair { perp, rad } => sup(perp).max(sup(rad)),
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: &impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDesc;

    #[test]
    fn two_by_two_determinant_and_trace() {
        let desc = GridDesc::torus(2, 4).unwrap();
        let mut g = HermitianField::identity(&desc);
        if let HermData::Two { h11, h22, re12, im12 } = &mut g.data {
            h11[0] = 2.0;
            h22[0] = 3.0;
            re12[0] = 0.5;
            im12[0] = -0.25;
        }
        let det = 2.0 * 3.0 - (0.25 + 0.0625);
        assert!((g.det_at(0) - det).abs() < 1e-15);
        let id = HermitianField::identity(&desc);
        assert!((g.inv_trace_against_at(&id, 0) - 5.0 / det).abs() < 1e-15);
        assert!((g.inv_trace_at(0) - 5.0 / det).abs() < 1e-15);
    }

    #[test]
    fn min_eigen_matches_closed_form() {
        let desc = GridDesc::torus(2, 4).unwrap();
        let mut g = HermitianField::identity(&desc);
        if let HermData::Two { h11, h22, re12, im12 } = &mut g.data {
            h11[0] = 2.0;
            h22[0] = 0.5;
            re12[0] = 0.0;
            im12[0] = 0.0;
        }
        assert!((g.min_eigen_at(0) - 0.5).abs() < 1e-15);
        let id = HermitianField::identity(&desc);
        let (lo, hi) = id.rel_eigen_at(&g, 0);
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn radial_pair_log_det_uses_multiplicity() {
        let desc = GridDesc::radial(3, 8, 0.0, 1.0).unwrap();
        let mut g = HermitianField::identity(&desc);
        if let HermData::RadialPair { perp, rad } = &mut g.data {
            perp[0] = 2.0;
            rad[0] = 5.0;
        }
        assert!((g.log_det_at(0) - (2.0f64.ln() * 2.0 + 5.0f64.ln())).abs() < 1e-14);
        assert!((g.det_at(0) - 20.0).abs() < 1e-13);
    }
}
