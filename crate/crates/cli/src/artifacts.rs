//! Artifact files, written through a temp file in the target directory and
//! renamed into place, so an interrupted run never leaves a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;
use teamdiff_core::engine::RunTrace;

use crate::error::CliError;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn pair(v: Option<[f64; 2]>, t: usize) -> String {
    opt(v.map(|p| p[t]))
}

/// Streams rows of `metrics.csv`: one row per recorded iteration per run.
pub struct MetricsCsv {
    writer: csv::Writer<NamedTempFile>,
    path: PathBuf,
    centroid_dims: Option<[usize; 2]>,
}

impl MetricsCsv {
    /// Centroid coordinates get columns only when `centroid_dims` is given.
    pub fn create(dir: &Path, centroid_dims: Option<[usize; 2]>) -> Result<Self, CliError> {
        let path = dir.join("metrics.csv");
        let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
        let mut header = vec!["run_id".to_string(), "iter".into(), "mu".into()];
        if let Some([m1, m2]) = centroid_dims {
            header.extend((0..m1).map(|j| format!("centroid1_{j}")));
            header.extend((0..m2).map(|j| format!("centroid2_{j}")));
        }
        for name in [
            "within", "cross", "grad_norm", "perturbation", "perturbation_agent", "baseline_gap", "loss",
        ] {
            header.push(format!("{name}_1"));
            header.push(format!("{name}_2"));
        }
        header.extend(["nash_error".into(), "d_real".into(), "d_fake".into()]);
        writeln!(
            tmp,
            "# {}. within_t/cross_t: max squared distance of team t's models/estimates to the \
             team/opponent centroid; perturbation_t: squared centroid residual against the \
             centralized step; perturbation_agent_t: max per-agent residual; baseline_gap_t: \
             squared distance to the coupled-noise centralized iterate; empty cells are not \
             measured.",
            header.join(",")
        )
        .map_err(|e| CliError::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(tmp);
        writer.write_record(&header).map_err(|e| csv_err(&path, e))?;
        Ok(MetricsCsv {
            writer,
            path,
            centroid_dims,
        })
    }

    pub fn write_run(&mut self, mu: f64, trace: &RunTrace) -> Result<(), CliError> {
        for r in &trace.records {
            let mut row = vec![trace.run.to_string(), r.iter.to_string(), format!("{mu:e}")];
            if self.centroid_dims.is_some() {
                row.extend(r.centroid.iter().flatten().map(|x| format!("{x:e}")));
            }
            for t in 0..2 {
                row.push(format!("{:e}", r.within[t]));
            }
            for t in 0..2 {
                row.push(format!("{:e}", r.cross[t]));
            }
            for v in [r.grad_norm_max, r.perturbation, r.perturbation_agent, r.baseline_gap] {
                row.push(pair(v, 0));
                row.push(pair(v, 1));
            }
            row.push(opt(r.losses.map(|l| l.team1)));
            row.push(opt(r.losses.map(|l| l.team2)));
            row.push(opt(r.nash_error));
            row.push(opt(r.losses.map(|l| l.d_real)));
            row.push(opt(r.losses.map(|l| l.d_fake)));
            self.writer.write_record(&row).map_err(|e| csv_err(&self.path, e))?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let tmp = self
            .writer
            .into_inner()
            .map_err(|e| CliError::io(&self.path, e.into_error()))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(&self.path, e))?;
        tmp.persist(&self.path).map_err(|e| CliError::io(&self.path, e.error))?;
        Ok(self.path)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// Writes `value` as pretty JSON to `dir/name` atomically.
pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    serde_json::to_writer_pretty(&mut tmp, value).map_err(|e| CliError::io(&path, e.into()))?;
    writeln!(tmp).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}
