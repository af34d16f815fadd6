//! TOML run configuration: model, schedule, forcing, prescribed form, and
//! run-control blocks, with defaults filled and invariants validated on parse.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::background::{forcing_profile, BackgroundPath, Forcing, PrescribedForm};
use crate::error::{Error, Result};
use crate::flow::{Method, RunSettings};
use crate::geometry::ModelGeometry;
use crate::grid::GridField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub schedule: ScheduleBlock,
    #[serde(default)]
    pub forcing: ForcingBlock,
    #[serde(default)]
    pub prescribed: PrescribedBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Torus,
    Radial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: ModelKind,
    pub n: usize,
    /// Nodes per axis (torus) or total radial nodes.
    pub resolution: usize,
    #[serde(default = "default_s_min")]
    pub s_min: f64,
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    /// Torus background potential psi = A cos x1 (0 = flat).
    #[serde(default)]
    pub psi_cos_amplitude: f64,
}

fn default_s_min() -> f64 {
    -2.0
}

fn default_s_max() -> f64 {
    2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKindConfig {
    Constant,
    KrfLinear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleBlock {
    pub kind: ScheduleKindConfig,
}

impl Default for ScheduleBlock {
    fn default() -> Self {
        ScheduleBlock { kind: ScheduleKindConfig::Constant }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    None,
    /// f0 = c1 / (1 + rho^{2+eps}) from the model's distance-like function.
    Decay,
    /// Torus recipe f0 = A cos x1.
    Cos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingBlock {
    pub kind: ForcingKind,
    #[serde(default)]
    pub c1: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub amplitude: f64,
}

fn default_eps() -> f64 {
    1.0
}

impl Default for ForcingBlock {
    fn default() -> Self {
        ForcingBlock { kind: ForcingKind::None, c1: 0.0, eps: default_eps(), amplitude: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrescribedKind {
    None,
    /// Omega = Ric0 - ddbar f0.
    FromForcing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrescribedBlock {
    pub kind: PrescribedKind,
}

impl Default for PrescribedBlock {
    fn default() -> Self {
        PrescribedBlock { kind: PrescribedKind::None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Auto,
    Explicit,
    SemiImplicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt_safety")]
    pub dt_safety: f64,
    #[serde(default = "default_tol_w")]
    pub tol_w: f64,
    #[serde(default = "default_record_interval")]
    pub record_interval: f64,
    #[serde(default)]
    pub snapshot_interval: Option<f64>,
    #[serde(default = "default_method")]
    pub method: MethodConfig,
    #[serde(default = "default_p")]
    pub p: u32,
    #[serde(default = "default_k")]
    pub k: u32,
}

fn default_t_max() -> f64 {
    1.0
}

fn default_dt_safety() -> f64 {
    0.2
}

fn default_tol_w() -> f64 {
    1e-7
}

fn default_record_interval() -> f64 {
    0.1
}

fn default_method() -> MethodConfig {
    MethodConfig::Auto
}

fn default_p() -> u32 {
    4
}

fn default_k() -> u32 {
    1
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            t_max: default_t_max(),
            dt_safety: default_dt_safety(),
            tol_w: default_tol_w(),
            record_interval: default_record_interval(),
            snapshot_interval: None,
            method: default_method(),
            p: default_p(),
            k: default_k(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.resolution < 8 {
            return Err(Error::Config(format!("resolution must be >= 8, got {}", m.resolution)));
        }
        match m.kind {
            ModelKind::Torus => {
                if !(m.n == 1 || m.n == 2) {
                    return Err(Error::Config(format!("torus n must be 1 or 2, got {}", m.n)));
                }
            }
            ModelKind::Radial => {
                if m.n < 2 {
                    return Err(Error::Config(format!("radial n must be >= 2, got {}", m.n)));
                }
                if !(m.s_min < m.s_max) {
                    return Err(Error::Config(format!(
                        "require s_min < s_max, got [{}, {}]",
                        m.s_min, m.s_max
                    )));
                }
            }
        }
        let r = &self.run;
        if !(r.dt_safety > 0.0 && r.dt_safety <= 0.5) {
            return Err(Error::Config(format!("dt_safety must be in (0, 0.5], got {}", r.dt_safety)));
        }
        if !(r.tol_w > 0.0) {
            return Err(Error::Config(format!("tol_w must be > 0, got {}", r.tol_w)));
        }
        if !(r.t_max >= 0.0 && r.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be finite and >= 0, got {}", r.t_max)));
        }
        if !(r.record_interval > 0.0) {
            return Err(Error::Config(format!(
                "record_interval must be > 0, got {}",
                r.record_interval
            )));
        }
        if let Some(si) = r.snapshot_interval {
            if !(si > 0.0) {
                return Err(Error::Config(format!("snapshot_interval must be > 0, got {si}")));
            }
        }
        if self.forcing.kind == ForcingKind::Decay && !(self.forcing.eps > 0.0) {
            return Err(Error::Config(format!("forcing eps must be > 0, got {}", self.forcing.eps)));
        }
        Ok(())
    }
}

/// Parse a TOML document into a validated config; unknown keys are errors
/// naming the key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serialize a config back to TOML; parse(write(config)) is the identity.
pub fn write_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))
}

/// A fully assembled problem ready to run (owns every component the flow
/// borrows).
pub struct Instance {
    pub model: ModelGeometry,
    pub path: BackgroundPath,
    pub forcing: Forcing,
    pub omega: Option<PrescribedForm>,
    pub settings: RunSettings,
    pub out_dir: Option<String>,
}

/// Build the model, background path, forcing, prescribed form, and run
/// settings described by a validated config.
pub fn instantiate(cfg: &RunConfig) -> Result<Instance> {
    cfg.validate()?;
    let m = &cfg.model;
    let model = match m.kind {
        ModelKind::Torus => {
            let desc = crate::grid::GridDesc::torus(m.n, m.resolution)?;
            let psi = if m.psi_cos_amplitude != 0.0 {
                let a = m.psi_cos_amplitude;
                Some(GridField::from_coord_fn(&desc, |c| a * c[0].cos()))
            } else {
                None
            };
            ModelGeometry::torus(m.n, m.resolution, psi)?
        }
        ModelKind::Radial => ModelGeometry::radial_flat(m.n, m.resolution, m.s_min, m.s_max)?,
    };
    let horizon = cfg.run.t_max.max(1.0);
    let path = match cfg.schedule.kind {
        ScheduleKindConfig::Constant => BackgroundPath::constant(&model, horizon)?,
        ScheduleKindConfig::KrfLinear => BackgroundPath::krf_linear(&model, horizon)?,
    };
    let forcing = build_forcing(&cfg.forcing, &model)?;
    let omega = match cfg.prescribed.kind {
        PrescribedKind::None => None,
        PrescribedKind::FromForcing => Some(PrescribedForm::from_forcing(&model, &forcing)?),
    };
    let settings = RunSettings {
        t_max: cfg.run.t_max,
        dt_safety: cfg.run.dt_safety,
        tol_w: cfg.run.tol_w,
        record_interval: cfg.run.record_interval,
        snapshot_interval: cfg.run.snapshot_interval,
        method: match cfg.run.method {
            MethodConfig::Auto => Method::Auto,
            MethodConfig::Explicit => Method::Explicit,
            MethodConfig::SemiImplicit => Method::SemiImplicit,
        },
        p: cfg.run.p,
        k: cfg.run.k,
        ..Default::default()
    };
    Ok(Instance {
        model,
        path,
        forcing,
        omega,
        settings,
        out_dir: cfg.output.dir.clone(),
    })
}

fn build_forcing(block: &ForcingBlock, model: &ModelGeometry) -> Result<Forcing> {
    let desc: &Arc<_> = &model.desc;
    match block.kind {
        ForcingKind::None => Ok(Forcing::zero(desc)),
        ForcingKind::Decay => forcing_profile(block.c1, block.eps, desc),
        ForcingKind::Cos => {
            let a = block.amplitude;
            Ok(Forcing::from_field(GridField::from_coord_fn(desc, |c| a * c[0].cos())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_fills_defaults() {
        let cfg = parse_config("[model]\nkind = \"torus\"\nn = 1\nresolution = 64\n").unwrap();
        assert_eq!(cfg.run.dt_safety, 0.2);
        assert_eq!(cfg.run.tol_w, 1e-7);
        assert_eq!(cfg.run.p, 4);
        assert_eq!(cfg.run.k, 1);
        assert_eq!(cfg.schedule.kind, ScheduleKindConfig::Constant);
        assert_eq!(cfg.forcing.kind, ForcingKind::None);
    }

    #[test]
    fn unknown_key_is_named_in_error() {
        let err = parse_config("[modle]\nkind = \"torus\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("modle"), "message was: {msg}");
    }

    #[test]
    fn invalid_resolution_names_the_field() {
        let err = parse_config("[model]\nkind = \"torus\"\nn = 1\nresolution = 0\n").unwrap_err();
        assert!(err.to_string().contains("resolution"));
    }

    #[test]
    fn out_of_range_safety_rejected() {
        let text = "[model]\nkind = \"torus\"\nn = 1\nresolution = 64\n[run]\ndt_safety = 0.9\n";
        assert!(parse_config(text).unwrap_err().to_string().contains("dt_safety"));
    }

    #[test]
    fn radial_requires_increasing_s_range() {
        let text = "[model]\nkind = \"radial\"\nn = 2\nresolution = 64\ns_min = 3.0\ns_max = 1.0\n";
        assert!(parse_config(text).unwrap_err().to_string().contains("s_min"));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "[model]\nkind = \"radial\"\nn = 2\nresolution = 128\ns_min = -1.0\ns_max = 5.0\n\
                    [forcing]\nkind = \"decay\"\nc1 = 0.2\n[prescribed]\nkind = \"from_forcing\"\n\
                    [run]\nt_max = 2.5\ntol_w = 1e-9\n";
        let cfg = parse_config(text).unwrap();
        let round = parse_config(&write_config(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, round);
    }

    #[test]
    fn instantiate_builds_matching_model() {
        let text = "[model]\nkind = \"torus\"\nn = 1\nresolution = 32\npsi_cos_amplitude = 0.4\n\
                    [schedule]\nkind = \"krf_linear\"\n";
        let inst = instantiate(&parse_config(text).unwrap()).unwrap();
        assert_eq!(inst.model.desc.dims, vec![32, 32]);
        assert!(inst.path.slope.sup_component() > 0.0);
        assert!(inst.omega.is_none());
    }
}
