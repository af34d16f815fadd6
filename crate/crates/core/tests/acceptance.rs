//! Acceptance gate: one test per criterion, each printing a single
//! `A<k> pass|FAIL` line. The manufactured torus convergence run is shared
//! across criteria through a `OnceLock`.

use std::sync::OnceLock;

use maflow::background::{BackgroundPath, Forcing, PrescribedForm};
use maflow::flow::{Method, Problem, RunOutcome, RunSettings, RunStatus};
use maflow::geometry::{complex_hessian, log_det, ModelGeometry};
use maflow::grid::GridField;
use maflow::hermitian::{HermData, HermitianField};
use maflow::monitor::{
    holder_seminorm, inequality_suite, ricci_residual, volume_growth_check, HolderMode,
};
use maflow::scenarios::{run_scenario, Overrides};

fn verdict_line(name: &str, pass: bool, detail: &str) {
    println!("{name} {} ({detail})", if pass { "pass" } else { "FAIL" });
}

/// Manufactured prescribed-Ricci problem on the flat torus at a given
/// resolution: g1 = g0 + ddbar(0.1 cos x), f0 = log(det g1 / det g0).
struct Manufactured {
    model: ModelGeometry,
    path: BackgroundPath,
    forcing: Forcing,
    omega: PrescribedForm,
    g1: HermitianField,
}

fn manufactured(res: usize) -> Manufactured {
    let model = ModelGeometry::torus(1, res, None).unwrap();
    let phi = GridField::from_coord_fn(&model.desc, |c| 0.1 * c[0].cos());
    let g1 = model.g0.add(&complex_hessian(&phi, &model.desc).unwrap());
    let f0 = log_det(&g1).sub(&model.log_det_g0);
    let forcing = Forcing::from_field(f0);
    let omega = PrescribedForm::from_forcing(&model, &forcing).unwrap();
    let path = BackgroundPath::constant(&model, 100.0).unwrap();
    Manufactured { model, path, forcing, omega, g1 }
}

struct SharedRun {
    problem: Manufactured,
    outcome: RunOutcome,
}

fn convergence_run() -> &'static SharedRun {
    static RUN: OnceLock<SharedRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let problem = manufactured(128);
        let settings = RunSettings {
            t_max: 100.0,
            dt_safety: 0.5,
            tol_w: 1e-7,
            record_interval: 0.1,
            snapshot_interval: Some(0.1),
            method: Method::Explicit,
            p: 4,
            k: 1,
            ..Default::default()
        };
        let prob = Problem::new(&problem.model, &problem.path, &problem.forcing);
        let outcome = prob
            .run(GridField::zeros(&problem.model.desc), &settings, Some(&problem.omega))
            .unwrap();
        SharedRun { problem, outcome }
    })
}

fn flat_run() -> &'static RunOutcome {
    static RUN: OnceLock<(ModelGeometry, BackgroundPath, Forcing, RunOutcome)> = OnceLock::new();
    let (_, _, _, outcome) = RUN.get_or_init(|| {
        let model = ModelGeometry::torus(1, 128, None).unwrap();
        let path = BackgroundPath::constant(&model, 1.0).unwrap();
        let forcing = Forcing::zero(&model.desc);
        let prob = Problem::new(&model, &path, &forcing);
        let state = prob.make_state(GridField::zeros(&model.desc), 0.0).unwrap();
        let dt = prob.stable_dt(&state.g, 0.5);
        let settings = RunSettings {
            t_max: 100.5 * dt,
            dt_fixed: Some(dt),
            tol_w: 0.0,
            record_interval: 10.0 * dt,
            method: Method::Explicit,
            ..Default::default()
        };
        let outcome = prob.run(GridField::zeros(&model.desc), &settings, None).unwrap();
        (model, path, forcing, outcome)
    });
    outcome
}

#[test]
fn a1_flat_stationarity() {
    let outcome = flat_run();
    let term = &outcome.traj.terminal;
    let sup_v = term.v.sup_abs();
    let pass = term.steps >= 100 && sup_v <= 1e-12;
    verdict_line("A1", pass, &format!("{} steps, sup|v| = {sup_v:e}", term.steps));
    assert!(pass, "flat torus drifted: sup|v| = {sup_v:e} after {} steps", term.steps);
}

#[test]
fn a2_manufactured_convergence() {
    let run = convergence_run();
    let term = &run.outcome.traj.terminal;
    let converged = run.outcome.traj.status == RunStatus::Converged;
    let metric_diff = term.g.sub(&run.problem.g1).sup_component();
    let ricci = ricci_residual(&term.g, &run.problem.omega, &run.problem.model).unwrap();
    let pass = converged && metric_diff <= 5e-3 && ricci <= 1e-3;
    verdict_line(
        "A2",
        pass,
        &format!(
            "status {}, sup|g - g1| = {metric_diff:.3e}, ricci residual = {ricci:.3e}",
            run.outcome.traj.status
        ),
    );
    assert!(pass);
}

#[test]
fn a3_energy_monotonicity() {
    let run = convergence_run();
    let sup_f0 = run.problem.forcing.f_at(0.0).sup_abs();
    assert!(sup_f0 < 3.0, "energy monotonicity needs sup|f0| < 3, got {sup_f0}");
    let records = &run.outcome.report.records;
    let mut worst = f64::NEG_INFINITY;
    for pair in records.windows(2) {
        let steps = (pair[1].steps - pair[0].steps).max(1) as f64;
        worst = worst.max((pair[1].lp_energy - pair[0].lp_energy) / steps);
    }
    let pass = worst <= 1e-8;
    verdict_line("A3", pass, &format!("worst energy increase per step = {worst:.3e}"));
    assert!(pass);
}

#[test]
fn a4_inequality_suite() {
    let flat = inequality_suite(&flat_run().report.records, true, true);
    let conv = inequality_suite(&convergence_run().outcome.report.records, true, true);
    let (_, radial_report, _) =
        run_scenario("radial_prescribed_ricci", &Overrides::default()).unwrap();
    let radial = inequality_suite(&radial_report.records, true, false);
    let pass = flat.pass && conv.pass && radial.pass;
    verdict_line(
        "A4",
        pass,
        &format!(
            "amgm >= {:.1e}, eq residual <= {:.1e}, w slack <= {:.1e}, volume drift <= {:.1e}",
            flat.amgm_margin.min(conv.amgm_margin).min(radial.amgm_margin),
            flat.eq_residual.max(conv.eq_residual).max(radial.eq_residual),
            flat.w_slack_per_step.max(conv.w_slack_per_step).max(radial.w_slack_per_step),
            flat.volume_drift.max(conv.volume_drift)
        ),
    );
    assert!(pass, "suite outcomes: flat {flat:?}, manufactured {conv:?}, radial {radial:?}");
}

#[test]
fn a5_gauge_identities() {
    let (_, _, verdict) = run_scenario("psh_gauge_check", &Overrides::default()).unwrap();
    let detail: Vec<String> =
        verdict.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    verdict_line("A5", verdict.pass, &detail.join("; "));
    assert!(verdict.pass);
}

#[test]
fn a6_radial_convergence_with_decay() {
    let (_, _, verdict) = run_scenario("radial_prescribed_ricci", &Overrides::default()).unwrap();
    let detail: Vec<String> =
        verdict.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    verdict_line("A6", verdict.pass, &detail.join("; "));
    assert!(
        verdict.pass,
        "radial_prescribed_ricci verdict failed: {}; the interior Ricci residual at 2048 nodes \
         sits on the f64 rounding-noise floor of the discrete Hessian (scales like h^-4; the \
         same recipe passes at 512 nodes)",
        detail.join("; ")
    );
}

#[test]
fn a7_krf_flat_limit() {
    let (_, _, verdict) = run_scenario("krf_torus", &Overrides::default()).unwrap();
    let detail: Vec<String> =
        verdict.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    verdict_line("A7", verdict.pass, &detail.join("; "));
    assert!(
        verdict.pass,
        "krf_torus verdict failed: {}; the dominant curvature mode decays like exp(-t/4), which \
         reaches 1e-3 only near t = 14, not by the required t = 5",
        detail.join("; ")
    );
}

/// Heat residual of the manufactured problem at a fixed grid: step explicitly
/// with dt = 0.2 h^2 to t ~ 1, then form the centered residual over a window
/// of 200 steps each side. The window spans 2 * 200 * dt, so the dominant
/// error is the centered-difference term of order (steps * dt)^2 and refining
/// h -> h/2, dt -> dt/4 must shrink it by ~16.
fn heat_residual_at(res: usize) -> f64 {
    let problem = manufactured(res);
    let prob = Problem::new(&problem.model, &problem.path, &problem.forcing);
    let h = problem.model.desc.spacings[0];
    let dt = 0.2 * h * h;
    let mut state = prob.make_state(GridField::zeros(&problem.model.desc), 0.0).unwrap();
    while state.t < 1.0 {
        state = prob.step(&state, dt).unwrap();
    }
    let mut s1 = state.clone();
    for _ in 0..200 {
        s1 = prob.step(&s1, dt).unwrap();
    }
    let mut s2 = s1.clone();
    for _ in 0..200 {
        s2 = prob.step(&s2, dt).unwrap();
    }
    maflow::monitor::heat_residual(
        (state.t, &state.w),
        (s1.t, &s1.w, &s1.g),
        (s2.t, &s2.w),
        &problem.path,
        &problem.forcing,
    )
    .unwrap()
}

#[test]
fn a8_heat_residual_convergence() {
    let coarse = heat_residual_at(128);
    let fine = heat_residual_at(256);
    let factor = coarse / fine;
    let pass = factor >= 3.5;
    verdict_line(
        "A8",
        pass,
        &format!("residual {coarse:.3e} -> {fine:.3e}, factor {factor:.2}"),
    );
    assert!(pass);
}

#[test]
fn a9_volume_growth() {
    let model = ModelGeometry::radial_flat(2, 1024, -10.0, 4.0).unwrap();
    let radii = [0.5, 1.0, 2.0, 5.0, 7.0];
    let (c3, finite) = volume_growth_check(&model, &radii).unwrap();
    let expected = std::f64::consts::PI.powi(2) / 2.0;
    let rel = (c3 - expected).abs() / expected;
    let pass = finite && rel <= 0.01;
    verdict_line("A9", pass, &format!("C3 = {c3:.6}, expected {expected:.6}, rel err {rel:.2e}"));
    assert!(pass);
}

#[test]
fn a10_holder_estimator() {
    // Closed form: a linear field on the unit segment has alpha = 1/2
    // seminorm sup |x - y|^{1/2} = 1 over pairs at distance <= 1.
    let nodes = 129usize;
    let spacing = 1.0 / (nodes - 1) as f64;
    let field: Vec<f64> = (0..nodes).map(|i| i as f64 * spacing).collect();
    let snaps = [(0.0, field.as_slice())];
    let linear = holder_seminorm(&snaps, &[nodes], &[spacing], false, 0.5, HolderMode::Elliptic, 1)
        .unwrap();
    let linear_ok = (linear - 1.0).abs() <= 1e-12;

    // Parabolic 2+alpha surrogate on the manufactured run: the seminorm of the
    // metric potential's Hessian plus the seminorm of w over three-snapshot
    // windows stays within 10x its first-window value.
    let run = convergence_run();
    let desc = &run.problem.model.desc;
    let prob = Problem::new(&run.problem.model, &run.problem.path, &run.problem.forcing);
    let snapshots = &run.outcome.traj.snapshots;
    assert!(snapshots.len() >= 3, "need at least three snapshots, got {}", snapshots.len());
    let mut hessians: Vec<Vec<f64>> = Vec::with_capacity(snapshots.len());
    let mut rates: Vec<Vec<f64>> = Vec::with_capacity(snapshots.len());
    for (t, v) in snapshots {
        let hess = complex_hessian(v, desc).unwrap();
        let data = match hess.data {
            HermData::Scalar(d) => d,
            _ => unreachable!("torus n = 1 Hessian is scalar"),
        };
        hessians.push(data);
        let (rhs, _) = prob.ma_rhs(v, *t).unwrap();
        rates.push(rhs.scaled(-1.0).data);
    }
    let window_norm = |j: usize| -> f64 {
        let hess_snaps: Vec<(f64, &[f64])> =
            (j..j + 3).map(|i| (snapshots[i].0, hessians[i].as_slice())).collect();
        let w_snaps: Vec<(f64, &[f64])> =
            (j..j + 3).map(|i| (snapshots[i].0, rates[i].as_slice())).collect();
        let a = holder_seminorm(&hess_snaps, &desc.dims, &desc.spacings, true, 0.5, HolderMode::Parabolic, 1)
            .unwrap();
        let b = holder_seminorm(&w_snaps, &desc.dims, &desc.spacings, true, 0.5, HolderMode::Parabolic, 1)
            .unwrap();
        a + b
    };
    let baseline = window_norm(0);
    let mut worst = 0.0f64;
    for j in 0..snapshots.len() - 2 {
        worst = worst.max(window_norm(j));
    }
    let bounded = baseline > 0.0 && worst <= 10.0 * baseline;
    let pass = linear_ok && bounded;
    verdict_line(
        "A10",
        pass,
        &format!(
            "linear seminorm = {linear:.15}, window baseline = {baseline:.3e}, worst = {worst:.3e}"
        ),
    );
    assert!(pass);
}
