//! Run artifacts on disk: a fixed-column CSV time series, raw little-endian
//! f64 snapshots with JSON sidecars, and a manifest listing every file.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::grid::{GridDesc, GridKind};
use crate::monitor::MonitorReport;

/// CSV column order is part of the external contract.
pub const CSV_COLUMNS: [&str; 16] = [
    "t",
    "sup_v",
    "sup_w",
    "trace_min",
    "trace_max",
    "equiv_cmin",
    "equiv_cmax",
    "Q_max",
    "S_max",
    "gradw_max",
    "lp_energy",
    "dissipation",
    "ricci_residual",
    "heat_residual",
    "dt_used",
    "status",
];

#[derive(Clone, Debug)]
pub struct OutputLayout {
    pub dir: PathBuf,
    pub series_path: PathBuf,
    pub manifest_path: PathBuf,
}

impl OutputLayout {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let series_path = dir.join("timeseries.csv");
        let manifest_path = dir.join("manifest.json");
        if series_path == manifest_path {
            return Err(Error::LayoutCollision(format!("{}", series_path.display())));
        }
        Ok(OutputLayout { dir, series_path, manifest_path })
    }

    fn snapshot_paths(&self, index: usize) -> (PathBuf, PathBuf) {
        (
            self.dir.join(format!("snapshot_{index:04}.json")),
            self.dir.join(format!("snapshot_{index:04}.bin")),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotSidecar {
    pub model_kind: String,
    pub n: usize,
    pub dims: Vec<usize>,
    pub spacings: Vec<f64>,
    pub t: f64,
    pub value_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub size_bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

fn kind_name(kind: GridKind) -> &'static str {
    match kind {
        GridKind::Torus => "torus",
        GridKind::Radial => "radial",
    }
}

/// Write the time series, every trajectory snapshot, and the manifest.
pub fn write_outputs(
    report: &MonitorReport,
    traj: &Trajectory,
    desc: &GridDesc,
    layout: &OutputLayout,
) -> Result<Manifest> {
    fs::create_dir_all(&layout.dir)?;
    let mut written: Vec<PathBuf> = Vec::new();

    let mut csv = String::new();
    csv.push_str(&CSV_COLUMNS.join(","));
    csv.push('\n');
    let last = report.records.len().saturating_sub(1);
    for (i, r) in report.records.iter().enumerate() {
        let status = if i == last { report.status.as_str() } else { "running" };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.sup_v,
            r.sup_w,
            r.trace_min,
            r.trace_max,
            r.equiv_cmin,
            r.equiv_cmax,
            r.q_max,
            r.s_max,
            r.gradw_max,
            r.lp_energy,
            r.dissipation,
            r.ricci_residual,
            r.heat_residual,
            r.dt_used,
            status,
        ));
    }
    fs::write(&layout.series_path, csv)?;
    written.push(layout.series_path.clone());

    for (i, (t, field)) in traj.snapshots.iter().enumerate() {
        let (json_path, bin_path) = layout.snapshot_paths(i);
        if written.contains(&json_path) || written.contains(&bin_path) {
            return Err(Error::LayoutCollision(format!("{}", json_path.display())));
        }
        let sidecar = SnapshotSidecar {
            model_kind: kind_name(desc.kind).to_string(),
            n: desc.complex_dim,
            dims: desc.dims.clone(),
            spacings: desc.spacings.clone(),
            t: *t,
            value_count: field.data.len(),
        };
        let json = serde_json::to_string_pretty(&sidecar)
            .map_err(|e| Error::Config(format!("sidecar serialization: {e}")))?;
        fs::write(&json_path, json)?;
        let mut bin = fs::File::create(&bin_path)?;
        let mut bytes = Vec::with_capacity(field.data.len() * 8);
        for v in &field.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bin.write_all(&bytes)?;
        written.push(json_path);
        written.push(bin_path);
    }

    let mut files = Vec::with_capacity(written.len());
    for path in &written {
        let size_bytes = fs::metadata(path)?.len();
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        files.push(ManifestEntry { name, size_bytes });
    }
    let manifest = Manifest { files };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    fs::write(&layout.manifest_path, json)?;
    Ok(manifest)
}

/// Read back a snapshot's raw values (little-endian f64, row-major).
pub fn read_snapshot_values(bin_path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let bytes = fs::read(bin_path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Config(format!("snapshot byte length {} not a multiple of 8", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{BackgroundPath, Forcing};
    use crate::flow::{Problem, RunSettings};
    use crate::geometry::ModelGeometry;
    use crate::grid::GridField;

    fn small_run() -> (ModelGeometry, crate::flow::RunOutcome) {
        let model = ModelGeometry::torus(1, 16, None).unwrap();
        let path = BackgroundPath::constant(&model, 1.0).unwrap();
        let forcing = Forcing::from_field(GridField::from_coord_fn(&model.desc, |c| 0.05 * c[0].cos()));
        let prob = Problem::new(&model, &path, &forcing);
        let settings = RunSettings {
            t_max: 0.1,
            record_interval: 0.05,
            snapshot_interval: Some(0.05),
            ..Default::default()
        };
        let out = prob.run(GridField::zeros(&model.desc), &settings, None).unwrap();
        (model, out)
    }

    #[test]
    fn csv_has_fixed_header_and_row_count() {
        let (model, out) = small_run();
        let dir = tempfile::tempdir().unwrap();
        let layout = OutputLayout::new(dir.path()).unwrap();
        write_outputs(&out.report, &out.traj, &model.desc, &layout).unwrap();
        let text = std::fs::read_to_string(&layout.series_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.count(), out.report.records.len());
        // Rows strictly increasing in t.
        let ts: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(ts.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn empty_report_writes_header_only() {
        let (model, mut out) = small_run();
        out.report.records.clear();
        out.traj.snapshots.clear();
        let dir = tempfile::tempdir().unwrap();
        let layout = OutputLayout::new(dir.path()).unwrap();
        let manifest = write_outputs(&out.report, &out.traj, &model.desc, &layout).unwrap();
        let text = std::fs::read_to_string(&layout.series_path).unwrap();
        assert_eq!(text.trim_end(), CSV_COLUMNS.join(","));
        assert_eq!(manifest.files.len(), 1);
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let (model, out) = small_run();
        let dir = tempfile::tempdir().unwrap();
        let layout = OutputLayout::new(dir.path()).unwrap();
        let manifest = write_outputs(&out.report, &out.traj, &model.desc, &layout).unwrap();
        // CSV + 2 files per snapshot.
        assert_eq!(manifest.files.len(), 1 + 2 * out.traj.snapshots.len());
        for (i, (t, field)) in out.traj.snapshots.iter().enumerate() {
            let (json_path, bin_path) = layout.snapshot_paths(i);
            let sidecar: SnapshotSidecar =
                serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
            assert_eq!(sidecar.value_count, sidecar.dims.iter().product::<usize>());
            assert_eq!(sidecar.t, *t);
            let values = read_snapshot_values(&bin_path).unwrap();
            assert_eq!(values.len(), field.data.len());
            for (a, b) in values.iter().zip(&field.data) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
