//! Binary-labelled datasets: synthetic Gaussian or autocorrelated inputs, or
//! a CSV file with columns `x0, …, x{m−1}, y`.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DatasetSource {
    GaussianIid,
    Autocorrelated,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub source: DatasetSource,
}

/// `+1` when the coordinates sum to a nonnegative value, else `−1`.
pub fn label_of(x: &[f64]) -> i8 {
    if x.iter().sum::<f64>() >= 0.0 {
        1
    } else {
        -1
    }
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<i8>, source: DatasetSource) -> std::result::Result<Self, String> {
        if inputs.len() != labels.len() {
            return Err(format!("{} inputs but {} labels", inputs.len(), labels.len()));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(format!("label {bad} is not ±1"));
        }
        if let Some(first) = inputs.first() {
            if first.is_empty() || inputs.iter().any(|x| x.len() != first.len()) {
                return Err("inputs must share one nonzero width".into());
            }
        }
        Ok(Self { inputs, labels, source })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        let mut header: Vec<String> = (0..self.width()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        w.write_record(&header).map_err(|e| csv_error(path, e))?;
        for (x, y) in self.inputs.iter().zip(&self.labels) {
            let mut rec: Vec<String> = x.iter().map(f64::to_string).collect();
            rec.push(y.to_string());
            w.write_record(&rec).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let width = r.headers().map_err(|e| csv_error(path, e))?.len();
        if width < 2 {
            return Err(CliError::Data { path: path.into(), msg: "need at least one input column and a label column".into() });
        }
        let (mut inputs, mut labels) = (Vec::new(), Vec::new());
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let row: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Data { path: path.into(), msg: format!("record {}: {e}", i + 1) })?;
            let (x, y) = row.split_at(width - 1);
            labels.push(match y[0] {
                v if v == 1.0 => 1,
                v if v == -1.0 => -1,
                v => return Err(CliError::Data { path: path.into(), msg: format!("record {}: label {v} is not ±1", i + 1) }),
            });
            inputs.push(x.to_vec());
        }
        Dataset::new(inputs, labels, DatasetSource::Csv).map_err(|msg| CliError::Data { path: path.into(), msg })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Data { path: path.into(), msg: e.to_string() }
}

/// `GAUSSIAN_IID` draws every coordinate from `𝒩(0, 1)`; `AUTOCORRELATED`
/// draws one `x₀` and sets `x_i = i·x₀` for `i = 1..=L`.
pub fn synthesize_dataset(source: DatasetSource, l: usize, m: usize, rng: &mut impl Rng) -> Result<Dataset> {
    if l == 0 || m == 0 {
        return Err(CliError::Config("dataset needs L ≥ 1 and m ≥ 1".into()));
    }
    let inputs: Vec<Vec<f64>> = match source {
        DatasetSource::GaussianIid => (0..l).map(|_| (0..m).map(|_| rng.sample(StandardNormal)).collect()).collect(),
        DatasetSource::Autocorrelated => {
            let x0: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            (1..=l).map(|i| x0.iter().map(|v| i as f64 * v).collect()).collect()
        }
        DatasetSource::Csv => return Err(CliError::Config("CSV datasets are loaded, not synthesized".into())),
    };
    let labels = inputs.iter().map(|x| label_of(x)).collect();
    Ok(Dataset { inputs, labels, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qvar::qcore::RngStream;

    #[test]
    fn autocorrelated_labels_are_constant() {
        let d = synthesize_dataset(DatasetSource::Autocorrelated, 30, 3, &mut RngStream::new(5, 0).rng()).unwrap();
        assert!(d.labels.iter().all(|&y| y == d.labels[0]));
        assert_eq!(d.inputs[2][1], 3.0 * d.inputs[0][1]);
    }

    #[test]
    fn single_coordinate_label_is_its_sign() {
        let d = synthesize_dataset(DatasetSource::GaussianIid, 200, 1, &mut RngStream::new(6, 0).rng()).unwrap();
        for (x, y) in d.inputs.iter().zip(&d.labels) {
            assert_eq!(*y, if x[0] >= 0.0 { 1 } else { -1 });
        }
        assert_eq!(label_of(&[0.0, 0.0]), 1);
    }

    #[test]
    fn gaussian_labels_are_balanced() {
        let n = 10_000;
        let d = synthesize_dataset(DatasetSource::GaussianIid, n, 4, &mut RngStream::new(7, 0).rng()).unwrap();
        let pos = d.labels.iter().filter(|&&y| y == 1).count() as f64;
        // Binomial(n, ½) has standard deviation √n/2.
        assert!((pos - 0.5 * n as f64).abs() < 3.0 * (n as f64).sqrt() / 2.0, "{pos}");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let d = synthesize_dataset(DatasetSource::GaussianIid, 25, 3, &mut RngStream::new(8, 0).rng()).unwrap();
        d.save_csv(&path).unwrap();
        let back = Dataset::load_csv(&path).unwrap();
        assert_eq!(back.inputs, d.inputs);
        assert_eq!(back.labels, d.labels);
        assert_eq!(back.source, DatasetSource::Csv);
    }

    #[test]
    fn rejects_bad_files_and_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x0,y\n0.5,2\n").unwrap();
        assert!(Dataset::load_csv(&path).is_err());
        std::fs::write(&path, "x0,y\nabc,1\n").unwrap();
        assert!(Dataset::load_csv(&path).is_err());
        assert!(synthesize_dataset(DatasetSource::GaussianIid, 0, 1, &mut RngStream::new(1, 0).rng()).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![], DatasetSource::Csv).is_err());
    }
}
