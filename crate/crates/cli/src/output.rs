//! Curve files and metadata sidecars.
//!
//! A run writes into a staging directory next to the target and only moves the
//! finished files into place, so a failed run leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twirlkit::form_factors::{ProbeCurve, TAIL_FRACTION};
use twirlkit::parallel::pairwise_sum;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("json error on {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

/// One curve as it appears on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub name: String,
    /// Name of the abscissa column: `t`, or `k` for doping sweeps.
    pub x_label: String,
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: Vec<usize>,
}

impl CurveTable {
    pub fn from_curve(name: impl Into<String>, curve: &ProbeCurve) -> Self {
        CurveTable {
            name: name.into(),
            x_label: "t".into(),
            x: curve.times.clone(),
            mean: curve.mean.clone(),
            stderr: curve.stderr.clone(),
            n_samples: curve.n_samples.clone(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn summary(&self) -> CurveSummary {
        CurveSummary::of(&self.x, &self.mean)
    }

    pub fn write(&self, path: &Path) -> Result<(), OutputError> {
        let csv_err = |source| OutputError::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record([self.x_label.as_str(), "mean", "stderr", "n_samples"]).map_err(csv_err)?;
        for i in 0..self.x.len() {
            // `{:?}` prints the shortest string that parses back to the same f64
            let row = [
                format!("{:?}", self.x[i]),
                format!("{:?}", self.mean[i]),
                format!("{:?}", self.stderr[i]),
                self.n_samples[i].to_string(),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io(path))
    }

    pub fn read(path: &Path) -> Result<Self, OutputError> {
        let csv_err = |source| OutputError::Csv { path: path.to_path_buf(), source };
        let format = |message: String| OutputError::Format { path: path.to_path_buf(), message };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let header = r.headers().map_err(csv_err)?.clone();
        if header.len() != 4 || &header[1] != "mean" || &header[2] != "stderr" || &header[3] != "n_samples" {
            return Err(format(format!("unexpected header {header:?}")));
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let mut table = CurveTable {
            name,
            x_label: header[0].to_string(),
            x: vec![],
            mean: vec![],
            stderr: vec![],
            n_samples: vec![],
        };
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            let num = |i: usize| record[i].parse::<f64>().map_err(|e| format(format!("column {i}: {e}")));
            table.x.push(num(0)?);
            table.mean.push(num(1)?);
            table.stderr.push(num(2)?);
            table.n_samples.push(record[3].parse().map_err(|e| format(format!("n_samples: {e}")))?);
        }
        Ok(table)
    }
}

/// Statistics recomputable from a curve file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub points: usize,
    pub first: f64,
    pub last: f64,
    pub min: f64,
    pub x_at_min: f64,
    pub max: f64,
    /// Mean of the trailing `TAIL_FRACTION` of the points.
    pub tail_mean: f64,
}

impl CurveSummary {
    pub fn of(x: &[f64], mean: &[f64]) -> Self {
        let n = mean.len();
        let (imin, min) = mean
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .unwrap_or((0, f64::NAN));
        let width = ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, n.max(1));
        CurveSummary {
            points: n,
            first: mean.first().copied().unwrap_or(f64::NAN),
            last: mean.last().copied().unwrap_or(f64::NAN),
            min,
            x_at_min: x.get(imin).copied().unwrap_or(f64::NAN),
            max: mean.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            tail_mean: if n == 0 { f64::NAN } else { pairwise_sum(&mean[n - width..]) / width as f64 },
        }
    }
}

/// Files of one run, staged until [`Staging::commit`].
pub struct Staging {
    target: PathBuf,
    dir: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self, OutputError> {
        fs::create_dir_all(target).map_err(io(target))?;
        let dir = target.join(format!(".staging-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(io(&dir))?;
        }
        fs::create_dir(&dir).map_err(io(&dir))?;
        Ok(Staging { target: target.to_path_buf(), dir, files: vec![], committed: false })
    }

    pub fn write_curve(&mut self, table: &CurveTable) -> Result<String, OutputError> {
        let name = table.file_name();
        table.write(&self.dir.join(&name))?;
        self.files.push(name.clone());
        Ok(name)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), OutputError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|source| OutputError::Json { path: path.clone(), source })?;
        fs::write(&path, text + "\n").map_err(io(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Moves every staged file into the target directory.
    pub fn commit(mut self) -> Result<Vec<PathBuf>, OutputError> {
        let mut out = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let dest = self.target.join(name);
            fs::rename(self.dir.join(name), &dest).map_err(io(&dest))?;
            out.push(dest);
        }
        self.committed = true;
        fs::remove_dir_all(&self.dir).map_err(io(&self.dir))?;
        Ok(out)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CurveTable {
        CurveTable {
            name: "c4".into(),
            x_label: "t".into(),
            x: vec![0.1, 1.0 / 3.0, 7.25e-9],
            mean: vec![1.0, 0.1 + 0.2, -2.5e300],
            stderr: vec![0.0, 1e-17, 3.0],
            n_samples: vec![4, 4, 4],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c4.csv");
        let t = table();
        t.write(&path).unwrap();
        let back = CurveTable::read(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.summary(), t.summary());
    }

    #[test]
    fn uncommitted_staging_is_removed() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut s = Staging::new(dir.path()).unwrap();
            s.write_curve(&table()).unwrap();
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        let mut s = Staging::new(dir.path()).unwrap();
        s.write_curve(&table()).unwrap();
        s.commit().unwrap();
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, ["c4.csv"]);
    }
}
