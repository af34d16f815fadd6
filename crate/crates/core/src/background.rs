//! Background paths sigma(t), forcing profiles, prescribed Ricci forms, and
//! the initial-data gauge normalization.
//!
//! Every supported schedule is affine in t, so a path is stored as an endpoint
//! form plus a constant slope; the time derivative is exact.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft::solve_periodic_poisson;
use crate::geometry::{complex_hessian, distance_like, ricci_form, ModelGeometry, EIGEN_FLOOR};
use crate::grid::{GridDesc, GridField, GridKind};
use crate::hermitian::{HermData, HermitianField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    KrfLinear,
    Interpolation,
}

/// The background path sigma(t) = sigma0 + t * slope on [0, horizon].
#[derive(Clone, Debug)]
pub struct BackgroundPath {
    pub kind: ScheduleKind,
    pub sigma0: HermitianField,
    pub slope: HermitianField,
    pub horizon: f64,
}

impl BackgroundPath {
    /// sigma(t) = omega_0 for all t.
    pub fn constant(model: &ModelGeometry, horizon: f64) -> Result<Self> {
        Self::new(ScheduleKind::Constant, model.g0.clone(), HermitianField::zeros(&model.desc), horizon)
    }

    /// sigma(t) = omega_0 - t Ric_0 (the Kahler-Ricci flow schedule).
    pub fn krf_linear(model: &ModelGeometry, horizon: f64) -> Result<Self> {
        let ric = ricci_form(&model.g0)?;
        Self::new(ScheduleKind::KrfLinear, model.g0.clone(), ric.scaled(-1.0), horizon)
    }

    /// sigma(t) = (T-t)/T sigma_start + t/T sigma_end on [0, T].
    pub fn interpolation(sigma_start: HermitianField, sigma_end: HermitianField, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "interpolation horizon must be positive, got {horizon}"
            )));
        }
        sigma_start.same_shape(&sigma_end)?;
        let slope = sigma_end.sub(&sigma_start).scaled(1.0 / horizon);
        Self::new(ScheduleKind::Interpolation, sigma_start, slope, horizon)
    }

    fn new(kind: ScheduleKind, sigma0: HermitianField, slope: HermitianField, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidSchedule(format!("horizon must be finite and >= 0, got {horizon}")));
        }
        let path = BackgroundPath { kind, sigma0, slope, horizon };
        // Min eigenvalue of an affine Hermitian family is concave in t, so
        // positivity at the endpoints covers the whole interval.
        for t in [0.0, horizon] {
            let sig = path.sigma_at(t);
            let (e, node) = sig.min_eigen();
            if !(e > EIGEN_FLOOR) {
                return Err(Error::InvalidSchedule(format!(
                    "sigma({t}) not positive definite: min eigenvalue {e:e} at node {node}"
                )));
            }
        }
        Ok(path)
    }

    pub fn sigma_at(&self, t: f64) -> HermitianField {
        self.sigma0.add_scaled(t, &self.slope)
    }

    /// Exact time derivative (constant over the path).
    pub fn sigma_t(&self) -> &HermitianField {
        &self.slope
    }
}

/// Decay certificate parameters of a forcing potential.
#[derive(Clone, Copy, Debug)]
pub struct Decay {
    pub c1: f64,
    pub eps: f64,
}

/// Static forcing f = f0, f_t = 0 (the time-dependence hook is the `f_at`
/// signature; all applications use static data).
#[derive(Clone, Debug)]
pub struct Forcing {
    pub f0: GridField,
    pub decay: Option<Decay>,
}

impl Forcing {
    pub fn zero(desc: &Arc<GridDesc>) -> Self {
        Forcing { f0: GridField::zeros(desc), decay: None }
    }

    pub fn from_field(f0: GridField) -> Self {
        Forcing { f0, decay: None }
    }

    pub fn f_at(&self, _t: f64) -> &GridField {
        &self.f0
    }

    /// max over nodes of |f0| (1 + rho^{2+eps}); equals C1 for profile-built
    /// forcings.
    pub fn decay_certificate(&self) -> Option<f64> {
        let d = self.decay?;
        let rho = distance_like(&self.f0.desc);
        let mut worst = 0.0f64;
        for (f, r) in self.f0.data.iter().zip(&rho.data) {
            worst = worst.max(f.abs() * (1.0 + r.powf(2.0 + d.eps)));
        }
        Some(worst)
    }
}

/// The target Ricci form Omega, built from potentials and hence closed.
#[derive(Clone, Debug)]
pub struct PrescribedForm {
    pub form: HermitianField,
}

impl PrescribedForm {
    pub fn zero(desc: &Arc<GridDesc>) -> Self {
        PrescribedForm { form: HermitianField::zeros(desc) }
    }

    /// Omega = Ric(g0) - ddbar f0, the pairing hypothesis of the modified flow.
    pub fn from_forcing(model: &ModelGeometry, forcing: &Forcing) -> Result<Self> {
        let ric0 = ricci_form(&model.g0)?;
        let hf = complex_hessian(&forcing.f0, &model.desc)?;
        Ok(PrescribedForm { form: ric0.sub(&hf) })
    }
}

/// Decay-profile forcing f0 = C1 / (1 + rho^{2+eps}).
pub fn forcing_profile(c1: f64, eps: f64, desc: &Arc<GridDesc>) -> Result<Forcing> {
    if !(c1 >= 0.0) {
        return Err(Error::InvalidForcing(format!("C1 must be >= 0, got {c1}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidForcing(format!("eps must be > 0, got {eps}")));
    }
    let rho = distance_like(desc);
    let f0 = rho.map(|r| c1 / (1.0 + r.powf(2.0 + eps)));
    Ok(Forcing { f0, decay: Some(Decay { c1, eps }) })
}

/// Recover the potential of a ddbar-exact form.
///
/// Torus: trigonometric inversion of the discrete real Laplacian acting on
/// 4 * trace(form), normalized to zero mean, then verified against the full
/// form. Radial: the radial eigenvalue is integrated twice with the discrete
/// second-difference operator inverted exactly, pinned by phi(s_max) = 0 and
/// the far-end first derivative from the perpendicular eigenvalue.
pub fn potential_from_form(form: &HermitianField, desc: &Arc<GridDesc>) -> Result<GridField> {
    match desc.kind {
        GridKind::Torus => {
            let mut tr = vec![0.0; desc.node_count()];
            match &form.data {
                HermData::Scalar(h) => tr.copy_from_slice(h),
                HermData::Two { h11, h22, .. } => {
                    for i in 0..tr.len() {
                        tr[i] = h11[i] + h22[i];
                    }
                }
                HermData::RadialPair { .. } => {
                    return Err(Error::ShapeMismatch { expected: desc.dims.clone(), got: form.desc.dims.clone() })
                }
            }
            let rhs = GridField { desc: desc.clone(), data: tr }.scaled(4.0);
            let phi = solve_periodic_poisson(&rhs, 1e-10)?;
            let back = complex_hessian(&phi, desc)?;
            let residual = back.sub(form).sup_component();
            if residual > 1e-8 {
                return Err(Error::NotExact {
                    reason: "form is not the complex Hessian of any periodic potential".into(),
                    residual,
                });
            }
            Ok(phi)
        }
        GridKind::Radial => {
            let (perp, rad) = match &form.data {
                HermData::RadialPair { perp, rad } => (perp, rad),
                _ => {
                    return Err(Error::ShapeMismatch { expected: desc.dims.clone(), got: form.desc.dims.clone() })
                }
            };
            let m = desc.node_count();
            let h = desc.spacings[0];
            // phi'' (in s) and the far-end phi' targets.
            let r: Vec<f64> = (0..m).map(|i| desc.s_at(i).exp() * rad[i]).collect();
            let q_end = desc.s_at(m - 1).exp() * perp[m - 1];
            let mut phi = vec![0.0; m];
            // phi[m-1] = 0; one-sided derivative and the interior row at m-2
            // determine phi[m-2], phi[m-3]; then backward recurrence.
            // (3 phi[m-1] - 4 phi[m-2] + phi[m-3]) / (2h) = q_end
            // (phi[m-1] - 2 phi[m-2] + phi[m-3]) / h^2 = r[m-2]
            // Subtracting: -2 phi[m-2] = 2h q_end - h^2 r[m-2] ... solve the 2x2.
            let b1 = 2.0 * h * q_end; // -4 phi[m-2] + phi[m-3] = b1
            let b2 = h * h * r[m - 2]; // -2 phi[m-2] + phi[m-3] = b2
            phi[m - 2] = (b2 - b1) / 2.0;
            phi[m - 3] = b2 + 2.0 * phi[m - 2];
            for i in (1..m - 2).rev() {
                phi[i - 1] = 2.0 * phi[i] - phi[i + 1] + h * h * r[i];
            }
            let out = GridField { desc: desc.clone(), data: phi };
            let back = complex_hessian(&out, desc)?;
            let residual = back.sub(form).sup_component();
            if residual > 1e-8 {
                return Err(Error::NotExact {
                    reason: "radial eigenvalue pair does not integrate to a single potential".into(),
                    residual,
                });
            }
            Ok(out)
        }
    }
}

/// Tilde transform absorbing initial data: the path gains ddbar(u - t f0),
/// the forcing becomes zero, and the initial potential becomes zero. The
/// correspondence is v = v_tilde + u - t f0, and the induced metric g(t) is
/// identical node-wise in either presentation.
pub fn normalize_initial_data(
    path: &BackgroundPath,
    forcing: &Forcing,
    u: &GridField,
) -> Result<(BackgroundPath, Forcing, GridField)> {
    let desc = &path.sigma0.desc;
    u.check_shape(desc)?;
    let hu = complex_hessian(u, desc)?;
    let hf = complex_hessian(&forcing.f0, desc)?;
    let sigma0 = path.sigma0.add(&hu);
    let slope = path.slope.sub(&hf);
    let tilde = BackgroundPath::new(path.kind, sigma0, slope, path.horizon).map_err(|e| match e {
        Error::InvalidSchedule(msg) => Error::InvalidSchedule(format!("tilde path degenerate: {msg}")),
        other => other,
    })?;
    Ok((tilde, Forcing::zero(desc), GridField::zeros(desc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_are_affine() {
        let psi_desc = GridDesc::torus(1, 64).unwrap();
        let psi = GridField::from_coord_fn(&psi_desc, |c| 0.4 * c[0].cos());
        let model = ModelGeometry::torus(1, 64, Some(psi)).unwrap();
        let path = BackgroundPath::krf_linear(&model, 2.0).unwrap();
        let mid = path.sigma_at(0.75);
        let avg = path.sigma_at(0.5).add(&path.sigma_at(1.0)).scaled(0.5);
        assert!(mid.sub(&avg).sup_component() < 1e-15);
    }

    #[test]
    fn krf_flat_background_is_constant() {
        let model = ModelGeometry::torus(1, 32, None).unwrap();
        let path = BackgroundPath::krf_linear(&model, 5.0).unwrap();
        assert!(path.slope.sup_component() < 1e-13);
    }

    #[test]
    fn krf_conformal_slope_matches_symbolic_ricci() {
        let psi_desc = GridDesc::torus(1, 256).unwrap();
        let psi = GridField::from_coord_fn(&psi_desc, |c| 0.4 * c[0].cos());
        let model = ModelGeometry::torus(1, 256, Some(psi)).unwrap();
        let path = BackgroundPath::krf_linear(&model, 1.0).unwrap();
        let sig = path.sigma_at(0.5);
        // sigma(0.5) = g0 - 0.5 Ric0 with Ric0 from the smooth conformal oracle.
        let expect = GridField::from_coord_fn(&model.desc, |c| {
            let g = 1.0 - 0.1 * c[0].cos();
            let gp = 0.1 * c[0].sin();
            let gpp = 0.1 * c[0].cos();
            let ric = -0.25 * (gpp * g - gp * gp) / (g * g);
            g - 0.5 * ric
        });
        if let HermData::Scalar(v) = &sig.data {
            let err = v
                .iter()
                .zip(&expect.data)
                .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
            assert!(err < 5e-4, "err={err}");
        }
    }

    #[test]
    fn forcing_profile_values_and_certificate() {
        let desc = GridDesc::radial(2, 257, -8.0, 8.0).unwrap();
        let f = forcing_profile(1.0, 1.0, &desc).unwrap();
        let i0 = ((0.0 - desc.s_min) / desc.spacings[0]).round() as usize;
        let expect = 1.0 / (1.0 + 2.0f64.powf(1.5));
        assert!((f.f0.data[i0] - expect).abs() < 1e-12);
        let cert = f.decay_certificate().unwrap();
        assert!((cert - 1.0).abs() < 1e-12);
        assert!(forcing_profile(1.0, 0.0, &desc).is_err());
        let z = forcing_profile(0.0, 1.0, &desc).unwrap();
        assert_eq!(z.f0.sup_abs(), 0.0);
    }

    #[test]
    fn potential_round_trip_torus() {
        let desc = GridDesc::torus(1, 128).unwrap();
        let phi = GridField::from_coord_fn(&desc, |c| 0.4 * c[0].cos());
        let form = complex_hessian(&phi, &desc).unwrap();
        let back = potential_from_form(&form, &desc).unwrap();
        assert!(back.sub(&phi).sup_abs() < 1e-10);
    }

    #[test]
    fn potential_rejects_constant_trace() {
        let desc = GridDesc::torus(1, 32).unwrap();
        let mut form = HermitianField::zeros(&desc);
        if let HermData::Scalar(h) = &mut form.data {
            h.fill(0.3);
        }
        match potential_from_form(&form, &desc) {
            Err(Error::NotExact { .. }) => {}
            other => panic!("expected NotExact, got {other:?}"),
        }
    }

    #[test]
    fn potential_round_trip_radial() {
        let desc = GridDesc::radial(2, 257, -3.0, 3.0).unwrap();
        let phi = GridField::from_s_fn(&desc, |s| {
            let v = (1.0 + s.exp()).ln();
            v - (1.0 + 3.0f64.exp()).ln()
        });
        let form = complex_hessian(&phi, &desc).unwrap();
        let back = potential_from_form(&form, &desc).unwrap();
        assert!(back.sub(&phi).sup_abs() < 1e-9, "err={}", back.sub(&phi).sup_abs());
    }

    #[test]
    fn potential_rejects_inconsistent_radial_pair() {
        let desc = GridDesc::radial(2, 129, -2.0, 2.0).unwrap();
        let perp = (0..129).map(|i| (-desc.s_at(i)).exp()).collect::<Vec<_>>();
        // rad inconsistent with any potential whose perp matches.
        let rad = vec![5.0; 129];
        let form = HermitianField { desc: desc.clone(), data: HermData::RadialPair { perp, rad } };
        assert!(matches!(potential_from_form(&form, &desc), Err(Error::NotExact { .. })));
    }

    #[test]
    fn normalize_initial_data_identity_cases() {
        let model = ModelGeometry::torus(1, 64, None).unwrap();
        let path = BackgroundPath::constant(&model, 1.0).unwrap();
        let forcing = Forcing::zero(&model.desc);
        let u = GridField::zeros(&model.desc);
        let (tilde, f_tilde, v0) = normalize_initial_data(&path, &forcing, &u).unwrap();
        assert!(tilde.sigma0.sub(&path.sigma0).sup_component() == 0.0);
        assert_eq!(v0.sup_abs(), 0.0);
        assert_eq!(f_tilde.f0.sup_abs(), 0.0);
        // Spatially constant forcing leaves the path unchanged too.
        let fc = Forcing::from_field(GridField::constant(&model.desc, 0.7));
        let (tilde2, _, _) = normalize_initial_data(&path, &fc, &u).unwrap();
        assert!(tilde2.slope.sup_component() < 1e-12);
    }

    #[test]
    fn normalize_initial_data_adds_hessian() {
        let model = ModelGeometry::torus(1, 128, None).unwrap();
        let path = BackgroundPath::constant(&model, 1.0).unwrap();
        let u = GridField::from_coord_fn(&model.desc, |c| 0.4 * c[0].cos());
        let (tilde, _, _) = normalize_initial_data(&path, &Forcing::zero(&model.desc), &u).unwrap();
        let expect = GridField::from_coord_fn(&model.desc, |c| 1.0 - 0.1 * c[0].cos());
        if let HermData::Scalar(v) = &tilde.sigma0.data {
            let err = v
                .iter()
                .zip(&expect.data)
                .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
            assert!(err < 1e-4);
        }
    }
}
