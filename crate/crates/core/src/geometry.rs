//! Model geometries and pointwise differential-geometric operators.
//!
//! Two globally coordinatized models are supported: a periodic torus (complex
//! dimension 1 or 2, real period 2*pi per axis) and a radial plane sampled on a
//! uniform grid in s = log r^2. The torus background is delta + Hessian(psi);
//! the radial background comes from a potential P0(s) with metric eigenvalues
//! (e^{-s} P0', e^{-s} P0'').

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridDesc, GridField, GridKind};
use crate::hermitian::{HermData, HermitianField};

/// Minimum metric eigenvalue treated as positive; below this the metric is
/// reported degenerate rather than clamped.
pub const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ModelGeometry {
    pub desc: Arc<GridDesc>,
    /// Background metric g0 at every node.
    pub g0: HermitianField,
    /// Cached log det g0.
    pub log_det_g0: GridField,
    /// Torus potential perturbation psi (zero field when flat).
    pub psi: Option<GridField>,
}

impl ModelGeometry {
    /// Periodic torus with background potential perturbation psi.
    pub fn torus(n: usize, resolution: usize, psi: Option<GridField>) -> Result<Self> {
        let desc = GridDesc::torus(n, resolution)?;
        let mut g0 = HermitianField::identity(&desc);
        if let Some(ref p) = psi {
            p.check_shape(&desc)?;
            g0 = g0.add(&complex_hessian(p, &desc)?);
        }
        g0.check_positive(EIGEN_FLOOR)?;
        let log_det_g0 = log_det(&g0);
        Ok(ModelGeometry { desc, g0, log_det_g0, psi })
    }

    /// Radial plane from a background potential P0 given by value-free
    /// derivative samplers (P0', P0'').
    pub fn radial(
        n: usize,
        nodes: usize,
        s_min: f64,
        s_max: f64,
        p0_prime: impl Fn(f64) -> f64,
        p0_doubleprime: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let desc = GridDesc::radial(n, nodes, s_min, s_max)?;
        let m = desc.node_count();
        let mut perp = Vec::with_capacity(m);
        let mut rad = Vec::with_capacity(m);
        for i in 0..m {
            let s = desc.s_at(i);
            let dp = p0_prime(s);
            let ddp = p0_doubleprime(s);
            if !(dp > 0.0 && ddp > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "radial background needs P0' > 0 and P0'' > 0; at s={s} got ({dp}, {ddp})"
                )));
            }
            perp.push((-s).exp() * dp);
            rad.push((-s).exp() * ddp);
        }
        let g0 = HermitianField { desc: desc.clone(), data: HermData::RadialPair { perp, rad } };
        g0.check_positive(EIGEN_FLOOR)?;
        let log_det_g0 = log_det(&g0);
        Ok(ModelGeometry { desc, g0, log_det_g0, psi: None })
    }

    /// Flat radial plane, P0(s) = e^s (the Euclidean |z|^2 potential).
    pub fn radial_flat(n: usize, nodes: usize, s_min: f64, s_max: f64) -> Result<Self> {
        Self::radial(n, nodes, s_min, s_max, f64::exp, f64::exp)
    }

    pub fn n(&self) -> usize {
        self.desc.complex_dim
    }
}

/// Discrete complex Hessian of a scalar field.
///
/// Torus: v_{ij_bar} = 1/4 (d_{x_i} d_{x_j} + d_{y_i} d_{y_j}) u
///                   + i/4 (d_{x_i} d_{y_j} - d_{y_i} d_{x_j}) u
/// with centered second-order periodic differences (axes ordered x1,y1,x2,y2).
/// Radial: eigenvalue pair (e^{-s} u', e^{-s} u'').
pub fn complex_hessian(u: &GridField, desc: &Arc<GridDesc>) -> Result<HermitianField> {
    u.check_shape(desc)?;
    let data = match (desc.kind, desc.complex_dim) {
        (GridKind::Torus, 1) => {
            let uxx = u.d2_axis(0);
            let uyy = u.d2_axis(1);
            let h: Vec<f64> = uxx
                .data
                .iter()
                .zip(&uyy.data)
                .map(|(a, b)| 0.25 * (a + b))
                .collect();
            HermData::Scalar(h)
        }
        (GridKind::Torus, 2) => {
            let h11: Vec<f64> = u
                .d2_axis(0)
                .data
                .iter()
                .zip(&u.d2_axis(1).data)
                .map(|(a, b)| 0.25 * (a + b))
                .collect();
            let h22: Vec<f64> = u
                .d2_axis(2)
                .data
                .iter()
                .zip(&u.d2_axis(3).data)
                .map(|(a, b)| 0.25 * (a + b))
                .collect();
            let re12: Vec<f64> = u
                .d_mixed(0, 2)
                .data
                .iter()
                .zip(&u.d_mixed(1, 3).data)
                .map(|(a, b)| 0.25 * (a + b))
                .collect();
            let im12: Vec<f64> = u
                .d_mixed(0, 3)
                .data
                .iter()
                .zip(&u.d_mixed(1, 2).data)
                .map(|(a, b)| 0.25 * (a - b))
                .collect();
            HermData::Two { h11, h22, re12, im12 }
        }
        (GridKind::Radial, _) => {
            let du = u.ds1();
            let ddu = u.ds2();
            let mut perp = Vec::with_capacity(u.data.len());
            let mut rad = Vec::with_capacity(u.data.len());
            for i in 0..u.data.len() {
                let es = (-desc.s_at(i)).exp();
                perp.push(es * du.data[i]);
                rad.push(es * ddu.data[i]);
            }
            HermData::RadialPair { perp, rad }
        }
        _ => unreachable!(),
    };
    Ok(HermitianField { desc: desc.clone(), data })
}

/// Metric Laplacian: Delta_g u = g^{i jbar} u_{i jbar}.
pub fn laplacian(u: &GridField, g: &HermitianField) -> Result<GridField> {
    u.check_shape(&g.desc)?;
    g.check_positive(EIGEN_FLOOR)?;
    let hess = complex_hessian(u, &g.desc)?;
    let data = (0..g.node_count())
        .map(|i| g.inv_trace_against_at(&hess, i))
        .collect();
    Ok(GridField { desc: g.desc.clone(), data })
}

/// log det g as a grid field.
pub fn log_det(g: &HermitianField) -> GridField {
    let data = (0..g.node_count()).map(|i| g.log_det_at(i)).collect();
    GridField { desc: g.desc.clone(), data }
}

/// Ricci form R_{i jbar} = -d_i d_jbar log det g.
///
/// Radial metrics use the reduction -log det g = n s - (n-1) log P_g' - log
/// P_g'' up to the coordinate factor; in eigenvalue variables this is
/// phi(s) = -(n-1) log lambda_perp - log lambda_rad - n s + n s, applied
/// through the radial Hessian.
pub fn ricci_form(g: &HermitianField) -> Result<HermitianField> {
    g.check_positive(EIGEN_FLOOR)?;
    match &g.data {
        HermData::RadialPair { perp, rad } => {
            let nm1 = (g.desc.complex_dim - 1) as f64;
            let phi_data: Vec<f64> = perp
                .iter()
                .zip(rad)
                .map(|(p, r)| -nm1 * p.ln() - r.ln())
                .collect();
            let phi = GridField { desc: g.desc.clone(), data: phi_data };
            complex_hessian(&phi, &g.desc)
        }
        _ => {
            let neg_log = log_det(g).scaled(-1.0);
            complex_hessian(&neg_log, &g.desc)
        }
    }
}

/// Pointwise curvature magnitude |Rm| with respect to g.
///
/// Torus n=1: the only component is R_{1 1bar 1 1bar} = g * R_{1 1bar}, so
/// |Rm| = |R_{1 1bar}| / g. Radial: with a = lambda_rad, b = lambda_perp as
/// functions of s, the three normalized sectional quantities are
///   A = -e^{-s} (log a)'' / a                       (radial holomorphic)
///   B = e^{-s} [ (a-b)^2/b - a' + a - b ] / (a b)   (mixed)
///   C = -2 e^{-s} (a - b) / b^2                     (perpendicular)
/// and the reported norm is max(|A|, |B|, |C|).
pub fn curvature_norm(g: &HermitianField) -> Result<GridField> {
    g.check_positive(EIGEN_FLOOR)?;
    match (&g.data, g.desc.complex_dim) {
        (HermData::Scalar(gd), 1) => {
            let r = ricci_form(g)?;
            let rd = match &r.data {
                HermData::Scalar(v) => v,
                _ => unreachable!(),
            };
            let data = gd.iter().zip(rd).map(|(gv, rv)| (rv / gv).abs()).collect();
            Ok(GridField { desc: g.desc.clone(), data })
        }
        (HermData::RadialPair { perp, rad }, _) => {
            let desc = &g.desc;
            let b = GridField { desc: desc.clone(), data: perp.clone() };
            let a = GridField { desc: desc.clone(), data: rad.clone() };
            let log_a = a.map(f64::ln);
            let log_a_dd = log_a.ds2();
            let a_d = a.ds1();
            let m = desc.node_count();
            let mut out = Vec::with_capacity(m);
            for i in 0..m {
                let es = (-desc.s_at(i)).exp();
                let av = a.data[i];
                let bv = b.data[i];
                let ca = -es * log_a_dd.data[i] / av;
                let cb = es * ((av - bv) * (av - bv) / bv - a_d.data[i] + av - bv) / (av * bv);
                let cc = -2.0 * es * (av - bv) / (bv * bv);
                out.push(ca.abs().max(cb.abs()).max(cc.abs()));
            }
            Ok(GridField { desc: desc.clone(), data: out })
        }
        _ => Err(Error::Unsupported(
            "curvature_norm supports torus n=1 and radial models only".into(),
        )),
    }
}

/// Distance-like weight rho >= 1: (1+e^s)^{1/2} on the radial plane, the
/// constant 1 on the compact torus.
pub fn distance_like(desc: &Arc<GridDesc>) -> GridField {
    match desc.kind {
        GridKind::Torus => GridField::constant(desc, 1.0),
        GridKind::Radial => GridField::from_s_fn(desc, |s| (1.0 + s.exp()).sqrt()),
    }
}

/// Global generalized eigenvalue range of B^{-1}A over all nodes.
pub fn eigen_range(a: &HermitianField, b: &HermitianField) -> Result<(f64, f64)> {
    a.same_shape(b)?;
    b.check_positive(EIGEN_FLOOR)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.node_count() {
        let (l, h) = b.rel_eigen_at(a, i);
        lo = lo.min(l);
        hi = hi.max(h);
    }
    Ok((lo, hi))
}
