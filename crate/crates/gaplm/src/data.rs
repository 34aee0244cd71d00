//! CSV ingestion: column selection, row filtering, standardization of the
//! covariates and the min-max map of smooth covariates onto [0, 1].

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::model::CovariatePartition;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub path: PathBuf,
    pub response: String,
    /// Covariates entering the additive nonparametric part, in order.
    pub smooth: Vec<String>,
    pub linear_certain: Vec<String>,
    pub linear_exploratory: Vec<String>,
    pub family: QuasiFamily,
    /// Center and scale every covariate by sample mean / sample sd.
    pub standardize: bool,
    /// Columns where a literal 0 encodes a missing measurement.
    pub na_zero: Vec<String>,
}

impl DatasetConfig {
    pub fn used_columns(&self) -> Vec<&str> {
        let mut cols = vec![self.response.as_str()];
        cols.extend(self.smooth.iter().map(|s| s.as_str()));
        cols.extend(self.linear_certain.iter().map(|s| s.as_str()));
        cols.extend(self.linear_exploratory.iter().map(|s| s.as_str()));
        cols
    }
}

/// Mean/sd pair recorded for back-transformation of reported coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStandardization {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

/// Post-standardization range of a smooth covariate; prediction points are
/// mapped through (v - min) / (max - min) and clamped into [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothScaler {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl SmoothScaler {
    pub fn to_unit(&self, value: f64) -> f64 {
        let t = (value - self.min) / (self.max - self.min);
        if !(0.0..=1.0).contains(&t) {
            log::warn!(
                "evaluation point {value} for '{}' outside the training range; clamped",
                self.name
            );
        }
        t.clamp(0.0, 1.0)
    }

    pub fn from_unit(&self, t: f64) -> f64 {
        self.min + t * (self.max - self.min)
    }
}

/// A loaded, filtered and standardized data set ready for fitting.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub y: Array1<f64>,
    /// Smooth covariates mapped to [0, 1], n x p.
    pub x_smooth: Array2<f64>,
    /// Linear covariates, certain block first, n x d.
    pub z: Array2<f64>,
    pub partition: CovariatePartition,
    pub smooth_names: Vec<String>,
    pub family: QuasiFamily,
    pub n_dropped: usize,
    pub standardization: Vec<ColumnStandardization>,
    pub scalers: Vec<SmoothScaler>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn smooth_index(&self, name: &str) -> Result<usize> {
        self.smooth_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Config(format!("'{name}' is not a smooth covariate")))
    }

    pub fn linear_index(&self, name: &str) -> Result<usize> {
        let d_c = self.partition.d_c();
        if let Some(i) = self.partition.certain.iter().position(|n| n == name) {
            return Ok(i);
        }
        if let Some(i) = self.partition.exploratory.iter().position(|n| n == name) {
            return Ok(d_c + i);
        }
        Err(Error::Config(format!("'{name}' is not a linear covariate")))
    }

    pub fn linear_names(&self) -> Vec<String> {
        let mut names = self.partition.certain.clone();
        names.extend(self.partition.exploratory.clone());
        names
    }

    /// Copy of the data with one row removed (leave-one-out folds).
    pub fn without_row(&self, row: usize) -> Dataset {
        let n = self.n();
        let keep: Vec<usize> = (0..n).filter(|&i| i != row).collect();
        let mut out = self.clone();
        out.y = Array1::from_iter(keep.iter().map(|&i| self.y[i]));
        out.x_smooth = select_rows(&self.x_smooth, &keep);
        out.z = select_rows(&self.z, &keep);
        out
    }
}

fn select_rows(m: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), m.ncols()), |(i, j)| m[[rows[i], j]])
}

fn is_missing(field: &str) -> bool {
    let t = field.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan") || t == "?"
}

/// Read, filter and standardize a CSV data set.
///
/// Rows with missing or non-numeric values in any used column are dropped
/// (with a logged count), as are rows with a zero in any `na_zero` column.
pub fn load_csv(config: &DatasetConfig) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&config.path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();

    let col_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("column '{name}' not found in the CSV header")))
    };

    let used = config.used_columns();
    {
        let mut seen = std::collections::HashSet::new();
        for c in &used {
            if !seen.insert(*c) {
                return Err(Error::Config(format!("column '{c}' used more than once")));
            }
        }
    }
    let indices: Vec<usize> = used.iter().map(|c| col_index(c)).collect::<Result<_>>()?;
    let na_zero_pos: Vec<usize> = config
        .na_zero
        .iter()
        .map(|c| {
            used.iter()
                .position(|u| u == c)
                .ok_or_else(|| Error::Config(format!("na-zero column '{c}' is not a used column")))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dropped = 0usize;
    'records: for record in reader.records() {
        let record = record?;
        let mut row = Vec::with_capacity(indices.len());
        for &idx in &indices {
            let field = record.get(idx).unwrap_or("");
            if is_missing(field) {
                dropped += 1;
                continue 'records;
            }
            match field.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    dropped += 1;
                    continue 'records;
                }
            }
        }
        for &p in &na_zero_pos {
            if row[p] == 0.0 {
                dropped += 1;
                continue 'records;
            }
        }
        rows.push(row);
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with missing or excluded values");
    }
    if rows.is_empty() {
        return Err(Error::Data("no usable rows after filtering".into()));
    }

    let n = rows.len();
    let p = config.smooth.len();
    let d_c = config.linear_certain.len();
    let d = d_c + config.linear_exploratory.len();

    let y = Array1::from_shape_fn(n, |i| rows[i][0]);
    if config.family == QuasiFamily::BernoulliLogit {
        if let Err(e) = config.family.validate_response(y.as_slice().unwrap()) {
            return Err(Error::Data(format!(
                "response '{}' is not binary: {e}",
                config.response
            )));
        }
    }

    let mut x_smooth = Array2::from_shape_fn((n, p), |(i, j)| rows[i][1 + j]);
    let mut z = Array2::from_shape_fn((n, d), |(i, j)| rows[i][1 + p + j]);

    let covariate_names: Vec<String> = config
        .smooth
        .iter()
        .chain(config.linear_certain.iter())
        .chain(config.linear_exploratory.iter())
        .cloned()
        .collect();

    // constant-column check happens before standardization so the error
    // names the offending column rather than failing on a 0/0
    let mut standardization = Vec::new();
    for (j, name) in covariate_names.iter().enumerate() {
        let col: Vec<f64> = if j < p {
            (0..n).map(|i| x_smooth[[i, j]]).collect()
        } else {
            (0..n).map(|i| z[[i, j - p]]).collect()
        };
        let mean = crate::stats::mean(&col);
        let sd = crate::stats::sd(&col);
        if !(sd > 0.0) {
            return Err(Error::Data(format!(
                "column '{name}' is constant (sd = 0) over the usable rows"
            )));
        }
        if config.standardize {
            standardization.push(ColumnStandardization {
                name: name.clone(),
                mean,
                sd,
            });
            if j < p {
                for i in 0..n {
                    x_smooth[[i, j]] = (x_smooth[[i, j]] - mean) / sd;
                }
            } else {
                for i in 0..n {
                    z[[i, j - p]] = (z[[i, j - p]] - mean) / sd;
                }
            }
        }
    }

    // map smooth covariates onto [0, 1] by the sample range
    let mut scalers = Vec::with_capacity(p);
    for j in 0..p {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for i in 0..n {
            min = min.min(x_smooth[[i, j]]);
            max = max.max(x_smooth[[i, j]]);
        }
        if !(max > min) {
            return Err(Error::Data(format!(
                "smooth column '{}' has zero range",
                config.smooth[j]
            )));
        }
        for i in 0..n {
            x_smooth[[i, j]] = (x_smooth[[i, j]] - min) / (max - min);
        }
        scalers.push(SmoothScaler {
            name: config.smooth[j].clone(),
            min,
            max,
        });
    }

    let partition = CovariatePartition::new(
        config.linear_certain.clone(),
        config.linear_exploratory.clone(),
    )?;

    Ok(Dataset {
        y,
        x_smooth,
        z,
        partition,
        smooth_names: config.smooth.clone(),
        family: config.family,
        n_dropped: dropped,
        standardization,
        scalers,
    })
}
