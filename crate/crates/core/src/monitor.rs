//! A priori estimate quantities computed on flow snapshots, the pointwise
//! inequality suite, discrete Hölder seminorms, and the volume growth check.
//!
//! Every function here is a pure function of immutable snapshot data. Uniform
//! constants are realized as suprema over a run, never assumed.

use num_complex::Complex64;

use crate::background::{BackgroundPath, Forcing, PrescribedForm};
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{complex_hessian, laplacian, ricci_form, ModelGeometry, EIGEN_FLOOR};
use crate::grid::{GridField, GridKind};
use crate::hermitian::{HermData, HermitianField};

/// Torus backgrounds whose first derivatives exceed this are rejected by the
/// third-order quantity: its covariant derivatives are evaluated as plain
/// partials, which is only trustworthy near a flat background.
pub const CHRISTOFFEL_TOL: f64 = 0.25;

#[derive(Clone, Debug)]
pub struct MonitorRecord {
    pub t: f64,
    pub sup_v: f64,
    pub sup_w: f64,
    pub trace_min: f64,
    pub trace_max: f64,
    pub equiv_cmin: f64,
    pub equiv_cmax: f64,
    pub q_max: f64,
    pub s_max: f64,
    pub gradw_max: f64,
    pub lp_energy: f64,
    pub dissipation: f64,
    pub ricci_residual: f64,
    pub heat_residual: f64,
    /// min over nodes of (n + Delta_sigma v) - n (det g / det sigma)^{1/n}.
    pub amgm_margin: f64,
    /// sup over nodes of |det g / det g0 - exp(f - w)|.
    pub eq_residual: f64,
    /// Discrete total volume of (M, g) (truncated region on the radial model).
    pub volume: f64,
    /// sup |F| with F = g^{i jbar} (sigma_t)_{i jbar} - f_t.
    pub sup_big_f: f64,
    pub steps: u64,
    pub dt_used: f64,
}

/// Suprema over a run of each tracked quantity: the empirically realized
/// uniform constants.
#[derive(Clone, Debug, Default)]
pub struct RealizedConstants {
    pub sup_v: f64,
    pub sup_w: f64,
    pub trace_max: f64,
    pub trace_min: f64,
    pub equiv_cmax: f64,
    pub equiv_cmin: f64,
    pub q_max: f64,
    pub s_max: f64,
    pub gradw_max: f64,
    pub ricci_residual: f64,
    pub sup_big_f: f64,
}

#[derive(Clone, Debug)]
pub struct MonitorReport {
    pub records: Vec<MonitorRecord>,
    pub realized: RealizedConstants,
    pub status: String,
    pub error: Option<String>,
}

impl MonitorReport {
    pub fn from_records(records: Vec<MonitorRecord>, status: String, error: Option<String>) -> Self {
        let mut realized = RealizedConstants {
            trace_min: f64::INFINITY,
            equiv_cmin: f64::INFINITY,
            ..Default::default()
        };
        for r in &records {
            realized.sup_v = realized.sup_v.max(r.sup_v);
            realized.sup_w = realized.sup_w.max(r.sup_w);
            realized.trace_max = realized.trace_max.max(r.trace_max);
            realized.trace_min = realized.trace_min.min(r.trace_min);
            realized.equiv_cmax = realized.equiv_cmax.max(r.equiv_cmax);
            realized.equiv_cmin = realized.equiv_cmin.min(r.equiv_cmin);
            realized.q_max = realized.q_max.max(r.q_max);
            realized.s_max = realized.s_max.max(r.s_max);
            realized.gradw_max = realized.gradw_max.max(r.gradw_max);
            realized.ricci_residual = realized.ricci_residual.max(r.ricci_residual);
            realized.sup_big_f = realized.sup_big_f.max(r.sup_big_f);
        }
        MonitorReport { records, realized, status, error }
    }
}

/// n + Delta_sigma v, the trace quantity of the second-order estimate.
pub fn trace_sigma(v: &GridField, sigma: &HermitianField) -> Result<GridField> {
    let lap = laplacian(v, sigma)?;
    let n = sigma.desc.complex_dim as f64;
    Ok(lap.map(|x| n + x))
}

/// Realized equivalence constants of g against g0.
pub fn equivalence_constants(g: &HermitianField, model: &ModelGeometry) -> Result<(f64, f64)> {
    crate::geometry::eigen_range(g, &model.g0)
}

fn sup_first_derivatives(h: &HermitianField) -> f64 {
    let comps: Vec<&Vec<f64>> = match &h.data {
        HermData::Scalar(a) => vec![a],
        HermData::Two { h11, h22, re12, im12 } => vec![h11, h22, re12, im12],
        HermData::RadialPair { perp, rad } => vec![perp, rad],
    };
    let mut worst = 0.0f64;
    for c in comps {
        let f = GridField { desc: h.desc.clone(), data: c.clone() };
        match h.desc.kind {
            GridKind::Torus => {
                for a in 0..h.desc.dims.len() {
                    worst = worst.max(f.d1_axis(a).sup_abs());
                }
            }
            GridKind::Radial => worst = worst.max(f.ds1().sup_abs()),
        }
    }
    worst
}

/// Complex derivative d_k = 1/2 (d_{x_k} - i d_{y_k}) of a real torus field.
fn complex_deriv(f: &GridField, k: usize) -> Vec<Complex64> {
    let fx = f.d1_axis(2 * k);
    let fy = f.d1_axis(2 * k + 1);
    fx.data
        .iter()
        .zip(&fy.data)
        .map(|(&a, &b)| Complex64::new(0.5 * a, -0.5 * b))
        .collect()
}

/// Third-order quantity Q = g^{ij} g^{kl} g^{mn} v_{;ilm} v_{;jkn} (indices in
/// the paper's barred pattern), contracted with three inverse metrics.
///
/// Torus: covariant derivatives are evaluated as partials, valid for flat (or
/// nearly flat) sigma; backgrounds with sup|d sigma| > CHRISTOFFEL_TOL are
/// rejected. Radial: closed-form covariant reduction with respect to sigma.
pub fn third_order_q(v: &GridField, g: &HermitianField, sigma: &HermitianField) -> Result<GridField> {
    let desc = &g.desc;
    v.check_shape(desc)?;
    g.check_positive(EIGEN_FLOOR)?;
    match desc.kind {
        GridKind::Torus => {
            let dsig = sup_first_derivatives(sigma);
            if dsig > CHRISTOFFEL_TOL {
                return Err(Error::Unsupported(format!(
                    "third-order quantity needs a near-flat torus background: sup|d sigma| = {dsig:.3} exceeds {CHRISTOFFEL_TOL}"
                )));
            }
            let hv = complex_hessian(v, desc)?;
            let nn = desc.complex_dim;
            let total = desc.node_count();
            // Hessian components as complex fields c[i][j] = v_{i jbar}.
            let comp = |re: &Vec<f64>, im_sign: f64, im: Option<&Vec<f64>>| -> Vec<Complex64> {
                match im {
                    None => re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
                    Some(imv) => re
                        .iter()
                        .zip(imv)
                        .map(|(&r, &i)| Complex64::new(r, im_sign * i))
                        .collect(),
                }
            };
            let c: Vec<Vec<Vec<Complex64>>> = match &hv.data {
                HermData::Scalar(h) => vec![vec![comp(h, 0.0, None)]],
                HermData::Two { h11, h22, re12, im12 } => vec![
                    vec![comp(h11, 0.0, None), comp(re12, 1.0, Some(im12))],
                    vec![comp(re12, -1.0, Some(im12)), comp(h22, 0.0, None)],
                ],
                _ => unreachable!(),
            };
            // T[i][j][k] = d_k c[i][j]; derivative of the real/imag parts.
            let mut t = vec![vec![vec![Vec::new(); nn]; nn]; nn];
            for i in 0..nn {
                for j in 0..nn {
                    let re = GridField {
                        desc: desc.clone(),
                        data: c[i][j].iter().map(|z| z.re).collect(),
                    };
                    let im = GridField {
                        desc: desc.clone(),
                        data: c[i][j].iter().map(|z| z.im).collect(),
                    };
                    for k in 0..nn {
                        let dre = complex_deriv(&re, k);
                        let dim = complex_deriv(&im, k);
                        t[i][j][k] = dre
                            .iter()
                            .zip(&dim)
                            .map(|(a, b)| a + Complex64::new(0.0, 1.0) * b)
                            .collect::<Vec<Complex64>>();
                    }
                }
            }
            let mut out = vec![0.0; total];
            for node in 0..total {
                // Inverse metric as a complex matrix B = G^{-1}.
                let b = inverse_matrix(g, node);
                let mut q = Complex64::new(0.0, 0.0);
                for i in 0..nn {
                    for j in 0..nn {
                        for k in 0..nn {
                            for l in 0..nn {
                                for m in 0..nn {
                                    for n2 in 0..nn {
                                        q += b[j][i]
                                            * b[l][k]
                                            * b[n2][m]
                                            * t[i][l][m][node]
                                            * t[j][k][n2][node].conj();
                                    }
                                }
                            }
                        }
                    }
                }
                out[node] = q.re.max(0.0);
            }
            Ok(GridField { desc: desc.clone(), data: out })
        }
        GridKind::Radial => {
            let (sv_perp, sv_rad) = radial_pair(sigma);
            let hv = complex_hessian(v, desc)?;
            let (vv_perp, vv_rad) = radial_pair(&hv);
            let (g_perp, g_rad) = radial_pair(g);
            let a_v = GridField { desc: desc.clone(), data: vv_rad.to_vec() };
            let a_v_d = a_v.ds1();
            let a_s = GridField { desc: desc.clone(), data: sv_rad.to_vec() };
            let a_s_d = a_s.ds1();
            let nm1 = (desc.complex_dim - 1) as f64;
            let m = desc.node_count();
            let mut out = vec![0.0; m];
            for i in 0..m {
                let e = (-desc.s_at(i) / 2.0).exp();
                let t111 = e * (a_v_d.data[i] - a_s_d.data[i] * vv_rad[i] / sv_rad[i]);
                let tperp = e * ((vv_rad[i] - vv_perp[i]) - (sv_rad[i] - sv_perp[i]) * vv_perp[i] / sv_perp[i]);
                out[i] = t111 * t111 / g_rad[i].powi(3)
                    + 2.0 * nm1 * tperp * tperp / (g_rad[i] * g_perp[i] * g_perp[i]);
            }
            Ok(GridField { desc: desc.clone(), data: out })
        }
    }
}

fn radial_pair(h: &HermitianField) -> (&[f64], &[f64]) {
    match &h.data {
        HermData::RadialPair { perp, rad } => (perp, rad),
        _ => panic!("expected radial field"),
    }
}

/// Complex inverse of the node metric (1x1 or 2x2).
fn inverse_matrix(g: &HermitianField, i: usize) -> Vec<Vec<Complex64>> {
    match &g.data {
        HermData::Scalar(h) => vec![vec![Complex64::new(1.0 / h[i], 0.0)]],
        HermData::Two { h11, h22, re12, im12 } => {
            let det = h11[i] * h22[i] - (re12[i] * re12[i] + im12[i] * im12[i]);
            let g12 = Complex64::new(re12[i], im12[i]);
            vec![
                vec![Complex64::new(h22[i] / det, 0.0), -g12 / det],
                vec![-g12.conj() / det, Complex64::new(h11[i] / det, 0.0)],
            ]
        }
        HermData::RadialPair { .. } => panic!("matrix inverse is torus-only"),
    }
}

/// |grad w|^2 with respect to g.
pub fn grad_w_sq(w: &GridField, g: &HermitianField) -> Result<GridField> {
    let desc = &g.desc;
    w.check_shape(desc)?;
    match desc.kind {
        GridKind::Torus => {
            let nn = desc.complex_dim;
            let grads: Vec<Vec<Complex64>> = (0..nn).map(|k| complex_deriv(w, k)).collect();
            let total = desc.node_count();
            let mut out = vec![0.0; total];
            for node in 0..total {
                let b = inverse_matrix(g, node);
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..nn {
                    for j in 0..nn {
                        // g^{i jbar} w_i conj(w_j) with g^{i jbar} = B[j][i].
                        acc += b[j][i] * grads[i][node] * grads[j][node].conj();
                    }
                }
                out[node] = acc.re.max(0.0);
            }
            Ok(GridField { desc: desc.clone(), data: out })
        }
        GridKind::Radial => {
            let (_, g_rad) = radial_pair(g);
            let wd = w.ds1();
            let data = (0..desc.node_count())
                .map(|i| {
                    let e = (-desc.s_at(i)).exp();
                    wd.data[i] * wd.data[i] * e / g_rad[i]
                })
                .collect();
            Ok(GridField { desc: desc.clone(), data })
        }
    }
}

/// S = squared g-norm of the complex Hessian of w.
pub fn s_quantity(w: &GridField, g: &HermitianField) -> Result<GridField> {
    let hw = complex_hessian(w, &g.desc)?;
    let data = (0..g.node_count()).map(|i| g.norm_sq_wrt_at(&hw, i)).collect();
    Ok(GridField { desc: g.desc.clone(), data })
}

/// Per-node volume weights of (M, g): det g * cell volume on the torus,
/// trapezoid weights of the radial volume element pi^n/(n-1)! P'^{n-1} P'' ds.
pub fn volume_weights(g: &HermitianField) -> Vec<f64> {
    let desc = &g.desc;
    match desc.kind {
        GridKind::Torus => {
            let cell: f64 = desc.spacings.iter().product();
            (0..desc.node_count()).map(|i| g.det_at(i) * cell).collect()
        }
        GridKind::Radial => {
            let n = desc.complex_dim;
            let mut cn = std::f64::consts::PI.powi(n as i32);
            for k in 1..n {
                cn /= k as f64;
            }
            let h = desc.spacings[0];
            let m = desc.node_count();
            let (perp, rad) = radial_pair(g);
            (0..m)
                .map(|i| {
                    let s = desc.s_at(i);
                    let pp = s.exp() * perp[i]; // P_g'
                    let ppp = s.exp() * rad[i]; // P_g''
                    let wgt = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
                    cn * pp.powi(n as i32 - 1) * ppp * h * wgt
                })
                .collect()
        }
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// L^p energy and dissipation pair of the convergence argument:
/// (int w^p dV, int |grad w^k|^2 dV), with p = 2k+2.
pub fn lp_diagnostics(w: &GridField, g: &HermitianField, p: u32, k: u32) -> Result<(f64, f64)> {
    if k < 1 || p != 2 * k + 2 {
        return Err(Error::Config(format!("L^p diagnostics need p = 2k+2 with k >= 1; got p={p}, k={k}")));
    }
    let weights = volume_weights(g);
    let energy = kahan_sum(
        w.data
            .iter()
            .zip(&weights)
            .map(|(&wv, &vol)| wv.powi(p as i32) * vol),
    );
    let wk = w.map(|x| x.powi(k as i32));
    let gk = grad_w_sq(&wk, g)?;
    let dissipation = kahan_sum(gk.data.iter().zip(&weights).map(|(&d, &vol)| d * vol));
    Ok((energy, dissipation))
}

/// sup over interior nodes of |Ric(g) - Omega|_{g0}. The radial model excludes
/// a 10%-width layer at each truncation end.
pub fn ricci_residual(
    g: &HermitianField,
    omega: &PrescribedForm,
    model: &ModelGeometry,
) -> Result<f64> {
    let diff = ricci_form(g)?.sub(&omega.form);
    let m = g.node_count();
    let (lo, hi) = match g.desc.kind {
        GridKind::Torus => (0, m),
        GridKind::Radial => {
            let skirt = m / 10;
            (skirt, m - skirt)
        }
    };
    let mut worst = 0.0f64;
    for i in lo..hi {
        worst = worst.max(model.g0.norm_sq_wrt_at(&diff, i).max(0.0).sqrt());
    }
    Ok(worst)
}

/// F = g^{i jbar} (sigma_t)_{i jbar} - f_t (f is static, so f_t = 0).
pub fn big_f(g: &HermitianField, path: &BackgroundPath, _forcing: &Forcing) -> GridField {
    let slope = path.sigma_t();
    let data = (0..g.node_count()).map(|i| g.inv_trace_against_at(slope, i)).collect();
    GridField { desc: g.desc.clone(), data }
}

/// sup |Delta_g w - dw/dt - F| at the middle of three consecutive snapshots,
/// with the time derivative centered between the outer pair.
pub fn heat_residual(
    prev: (f64, &GridField),
    mid: (f64, &GridField, &HermitianField),
    next: (f64, &GridField),
    path: &BackgroundPath,
    forcing: &Forcing,
) -> Result<f64> {
    let (t0, w0) = prev;
    let (t1, w1, g1) = mid;
    let (t2, w2) = next;
    if !(t0 < t1 && t1 < t2) {
        return Err(Error::Config(format!("heat residual needs increasing times, got {t0}, {t1}, {t2}")));
    }
    let lap = laplacian(w1, g1)?;
    let f = big_f(g1, path, forcing);
    let inv_dt = 1.0 / (t2 - t0);
    // Skip the radial truncation nodes: w there follows the boundary
    // conditions, not the evolution equation.
    let count = w1.data.len();
    let (lo, hi) = match w1.desc.kind {
        crate::grid::GridKind::Torus => (0, count),
        crate::grid::GridKind::Radial => (1, count - 1),
    };
    let mut worst = 0.0f64;
    for i in lo..hi {
        let wt = (w2.data[i] - w0.data[i]) * inv_dt;
        worst = worst.max((lap.data[i] - wt - f.data[i]).abs());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolderMode {
    Elliptic,
    Parabolic,
}

/// Discrete Hölder seminorm estimator over a window of snapshots.
///
/// The supremum runs over axis-aligned node pairs at power-of-two separations
/// up to coordinate distance 1 (inclusive), base points subsampled by
/// `base_stride`, and (in parabolic mode) all snapshot pairs with
/// |t - t'| <= 1; the denominator is |x-x'|^alpha + |t-t'|^{alpha/2}.
pub fn holder_seminorm(
    snaps: &[(f64, &[f64])],
    dims: &[usize],
    spacings: &[f64],
    periodic: bool,
    alpha: f64,
    mode: HolderMode,
    base_stride: usize,
) -> Result<f64> {
    if snaps.is_empty() {
        return Err(Error::Config("empty snapshot window".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let total: usize = dims.iter().product();
    for (_, d) in snaps {
        if d.len() != total {
            return Err(Error::ShapeMismatch { expected: dims.to_vec(), got: vec![d.len()] });
        }
    }
    let stride = base_stride.max(1);
    let mut strides = vec![1usize; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }
    // Power-of-two spatial offsets per axis within coordinate distance 1.
    let offsets: Vec<Vec<usize>> = (0..dims.len())
        .map(|a| {
            let mut v = Vec::new();
            let mut o = 1usize;
            let cap = if periodic { dims[a] / 2 } else { dims[a] - 1 };
            while o <= cap && o as f64 * spacings[a] <= 1.0 + 1e-12 {
                v.push(o);
                o *= 2;
            }
            v
        })
        .collect();

    let mut sup = 0.0f64;
    let time_pairs: Vec<(usize, usize)> = match mode {
        HolderMode::Elliptic => (0..snaps.len()).map(|i| (i, i)).collect(),
        HolderMode::Parabolic => {
            let mut v = Vec::new();
            for i in 0..snaps.len() {
                for j in i..snaps.len() {
                    if (snaps[j].0 - snaps[i].0).abs() <= 1.0 + 1e-12 {
                        v.push((i, j));
                    }
                }
            }
            v
        }
    };
    for &(ia, ib) in &time_pairs {
        let (ta, da) = snaps[ia];
        let (tb, db) = snaps[ib];
        let dt_term = if ia == ib { 0.0 } else { (tb - ta).abs().powf(alpha / 2.0) };
        for idx in (0..total).step_by(stride) {
            // Pure time pair at the same node.
            if ia != ib {
                let num = (db[idx] - da[idx]).abs();
                sup = sup.max(num / dt_term);
            }
            for axis in 0..dims.len() {
                let coord = (idx / strides[axis]) % dims[axis];
                for &off in &offsets[axis] {
                    let nb_coord = if periodic {
                        (coord + off) % dims[axis]
                    } else if coord + off < dims[axis] {
                        coord + off
                    } else {
                        continue;
                    };
                    let nb_idx = (idx as isize
                        + (nb_coord as isize - coord as isize) * strides[axis] as isize)
                        as usize;
                    let dist = (off as f64) * spacings[axis];
                    let denom = dist.powf(alpha) + dt_term;
                    let num = (db[nb_idx] - da[idx]).abs();
                    sup = sup.max(num / denom);
                }
            }
        }
    }
    Ok(sup)
}

/// min over nodes of tr(sigma^{-1} g) - n (det g / det sigma)^{1/n}; an
/// algebraic AM-GM identity, nonnegative for positive pairs.
pub fn amgm_margin(sigma: &HermitianField, g: &HermitianField) -> Result<f64> {
    sigma.check_positive(EIGEN_FLOOR)?;
    let n = sigma.desc.complex_dim as f64;
    let mut worst = f64::INFINITY;
    for i in 0..sigma.node_count() {
        let tr = sigma.inv_trace_against_at(g, i);
        let ratio = (g.det_at(i) / sigma.det_at(i)).max(0.0);
        worst = worst.min(tr - n * ratio.powf(1.0 / n));
    }
    Ok(worst)
}

/// Outcome of the run-level inequality suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub amgm_margin: f64,
    pub eq_residual: f64,
    /// Worst per-step increase of sup|w| (static backgrounds only).
    pub w_slack_per_step: f64,
    /// Worst relative drift of the total volume (torus n=1 static only).
    pub volume_drift: f64,
    pub equiv_bounded: bool,
    pub failure: Option<String>,
    pub pass: bool,
}

/// Check the pointwise and run-level inequalities across recorded data.
pub fn inequality_suite(
    records: &[MonitorRecord],
    background_static: bool,
    check_volume: bool,
) -> SuiteOutcome {
    let mut failure = None;
    for (i, r) in records.iter().enumerate() {
        let fields = [
            ("sup_v", r.sup_v),
            ("sup_w", r.sup_w),
            ("trace_min", r.trace_min),
            ("trace_max", r.trace_max),
            ("equiv_cmin", r.equiv_cmin),
            ("equiv_cmax", r.equiv_cmax),
            ("q_max", r.q_max),
            ("s_max", r.s_max),
            ("gradw_max", r.gradw_max),
            ("lp_energy", r.lp_energy),
            ("amgm_margin", r.amgm_margin),
            ("eq_residual", r.eq_residual),
            ("volume", r.volume),
        ];
        for (name, v) in fields {
            if v.is_nan() && failure.is_none() {
                failure = Some(format!("{name} is NaN at record {i} (t={})", r.t));
            }
        }
    }
    let amgm = records.iter().map(|r| r.amgm_margin).fold(f64::INFINITY, f64::min);
    let eq = records.iter().map(|r| r.eq_residual).fold(0.0f64, f64::max);
    let mut w_slack = 0.0f64;
    if background_static {
        for pair in records.windows(2) {
            let steps = (pair[1].steps - pair[0].steps).max(1) as f64;
            w_slack = w_slack.max((pair[1].sup_w - pair[0].sup_w) / steps);
        }
    }
    let mut vol_drift = 0.0f64;
    if check_volume {
        if let Some(first) = records.first() {
            for r in records {
                vol_drift = vol_drift.max((r.volume - first.volume).abs() / first.volume.abs().max(1.0));
            }
        }
    }
    let equiv_bounded = records
        .iter()
        .all(|r| r.equiv_cmin.is_finite() && r.equiv_cmax.is_finite() && r.equiv_cmin > 0.0);
    let pass = failure.is_none()
        && amgm >= -1e-12
        && eq <= 1e-10
        && (!background_static || w_slack <= 1e-8)
        && (!check_volume || vol_drift <= 1e-12)
        && equiv_bounded;
    SuiteOutcome {
        amgm_margin: amgm,
        eq_residual: eq,
        w_slack_per_step: w_slack,
        volume_drift: vol_drift,
        equiv_bounded,
        failure,
        pass,
    }
}

/// Lemma-3.1-style Laplacian inequality on a flat torus background h:
/// min over nodes of Delta_ht A - |grad A|^2_ht / A + tr_h Ric(ht), with
/// A = n + Delta_h u and ht = h + ddbar u. Nonnegative up to stencil error.
pub fn laplacian_inequality_check(model: &ModelGeometry, u: &GridField) -> Result<f64> {
    if model.desc.kind != GridKind::Torus || model.psi.is_some() {
        return Err(Error::Unsupported("the Laplacian inequality check needs a flat torus background".into()));
    }
    let h = &model.g0;
    let ht = h.add(&complex_hessian(u, &model.desc)?);
    ht.check_positive(EIGEN_FLOOR)?;
    let a = trace_sigma(u, h)?;
    let lap_a = laplacian(&a, &ht)?;
    let grad_a = grad_w_sq(&a, &ht)?;
    let ric = ricci_form(&ht)?;
    let mut worst = f64::INFINITY;
    for i in 0..model.desc.node_count() {
        let tr_ric = h.inv_trace_against_at(&ric, i);
        worst = worst.min(lap_a.data[i] - grad_a.data[i] / a.data[i] + tr_ric);
    }
    Ok(worst)
}

/// Volume growth of the background: max over radii of V0(r) / r^{2n}
/// (trapezoid integration of the radial volume element). The torus passes
/// vacuously with a zero estimate.
pub fn volume_growth_check(model: &ModelGeometry, radii: &[f64]) -> Result<(f64, bool)> {
    if model.desc.kind == GridKind::Torus {
        return Ok((0.0, true));
    }
    let desc = &model.desc;
    let m = desc.node_count();
    let mut cum = vec![0.0; m];
    let (perp, rad) = radial_pair(&model.g0);
    let n = desc.complex_dim;
    let mut cn = std::f64::consts::PI.powi(n as i32);
    for k in 1..n {
        cn /= k as f64;
    }
    let integrand: Vec<f64> = (0..m)
        .map(|i| {
            let s = desc.s_at(i);
            cn * (s.exp() * perp[i]).powi(n as i32 - 1) * (s.exp() * rad[i])
        })
        .collect();
    let h = desc.spacings[0];
    for i in 1..m {
        cum[i] = cum[i - 1] + 0.5 * h * (integrand[i - 1] + integrand[i]);
    }
    let mut worst = 0.0f64;
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::Config(format!("radii must be positive, got {r}")));
        }
        let s_r = (r * r).ln();
        if s_r > desc.s_max() + 1e-12 {
            return Err(Error::Unsupported(format!(
                "radius {r} (s = {s_r:.3}) exceeds the truncation s_max = {}",
                desc.s_max()
            )));
        }
        let vol = if s_r <= desc.s_min {
            0.0
        } else {
            let pos = (s_r - desc.s_min) / h;
            let i = (pos.floor() as usize).min(m - 2);
            let frac = pos - i as f64;
            let f_end = integrand[i] + (integrand[i + 1] - integrand[i]) * frac;
            cum[i] + 0.5 * (frac * h) * (integrand[i] + f_end)
        };
        worst = worst.max(vol / r.powi(2 * n as i32));
    }
    Ok((worst, worst.is_finite()))
}

/// One full monitor record for a flow state.
#[allow(clippy::too_many_arguments)]
pub fn compute_record(
    model: &ModelGeometry,
    path: &BackgroundPath,
    forcing: &Forcing,
    omega: Option<&PrescribedForm>,
    state: &FlowState,
    p: u32,
    k: u32,
    heat_residual: f64,
) -> Result<MonitorRecord> {
    let sigma = path.sigma_at(state.t);
    let trace = trace_sigma(&state.v, &sigma)?;
    let (cmin, cmax) = equivalence_constants(&state.g, model)?;
    let q = third_order_q(&state.v, &state.g, &sigma)?;
    let s = s_quantity(&state.w, &state.g)?;
    let gw = grad_w_sq(&state.w, &state.g)?;
    let (energy, dissipation) = lp_diagnostics(&state.w, &state.g, p, k)?;
    let zero_form;
    let omega_ref = match omega {
        Some(o) => o,
        None => {
            zero_form = PrescribedForm::zero(&model.desc);
            &zero_form
        }
    };
    let ricci = ricci_residual(&state.g, omega_ref, model)?;
    let amgm = amgm_margin(&sigma, &state.g)?;
    let f = forcing.f_at(state.t);
    // The equation holds at every torus node; the two radial truncation nodes
    // carry boundary conditions instead and are excluded.
    let count = model.desc.node_count();
    let (lo, hi) = match model.desc.kind {
        crate::grid::GridKind::Torus => (0, count),
        crate::grid::GridKind::Radial => (1, count - 1),
    };
    let mut eq_res = 0.0f64;
    for i in lo..hi {
        let ratio = (state.g.log_det_at(i) - model.log_det_g0.data[i]).exp();
        eq_res = eq_res.max((ratio - (f.data[i] - state.w.data[i]).exp()).abs());
    }
    let volume = kahan_sum(volume_weights(&state.g).into_iter());
    let bf = big_f(&state.g, path, forcing);
    Ok(MonitorRecord {
        t: state.t,
        sup_v: state.v.sup_abs(),
        sup_w: state.w.sup_abs(),
        trace_min: trace.min(),
        trace_max: trace.max(),
        equiv_cmin: cmin,
        equiv_cmax: cmax,
        q_max: q.max(),
        s_max: s.max(),
        gradw_max: gw.max(),
        lp_energy: energy,
        dissipation,
        ricci_residual: ricci,
        heat_residual,
        amgm_margin: amgm,
        eq_residual: eq_res,
        volume,
        sup_big_f: bf.sup_abs(),
        steps: state.steps,
        dt_used: state.dt_last,
    })
}
