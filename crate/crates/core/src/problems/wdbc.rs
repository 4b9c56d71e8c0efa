use std::path::Path;

use super::dataset::{Split, SupervisedDataset, Targets};
use super::linear::poly2_expand;
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, RngStream};
use crate::scalar::Scalar;

pub const WDBC_FEATURES: usize = 30;
const WDBC_COLUMNS: usize = WDBC_FEATURES + 2;

/// Rows of the breast-cancer file as read: id, label (M→1, B→0), 30 features.
#[derive(Debug, Clone, PartialEq)]
pub struct WdbcRaw {
    pub ids: Vec<u64>,
    pub labels: Vec<usize>,
    pub features: Vec<[f64; WDBC_FEATURES]>,
}

impl WdbcRaw {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Parses the comma-separated layout `id,diagnosis,f1..f30` without header.
/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_wdbc(text: &str) -> Result<WdbcRaw> {
    let mut raw = WdbcRaw {
        ids: Vec::new(),
        labels: Vec::new(),
        features: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != WDBC_COLUMNS {
            return Err(Error::Schema {
                line: line_no,
                expected: WDBC_COLUMNS,
                found: cols.len(),
            });
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let id = cols[0]
            .parse::<u64>()
            .map_err(|e| parse_err(format!("id `{}`: {e}", cols[0])))?;
        let label = match cols[1] {
            "M" => 1,
            "B" => 0,
            other => return Err(parse_err(format!("diagnosis `{other}` is not M or B"))),
        };
        let mut row = [0.0; WDBC_FEATURES];
        for (k, slot) in row.iter_mut().enumerate() {
            let s = cols[k + 2];
            let v = s
                .parse::<f64>()
                .map_err(|e| parse_err(format!("feature {} `{s}`: {e}", k + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(format!("feature {} is not finite", k + 1)));
            }
            *slot = v;
        }
        raw.ids.push(id);
        raw.labels.push(label);
        raw.features.push(row);
    }
    Ok(raw)
}

pub fn load_wdbc_raw(path: impl AsRef<Path>) -> Result<WdbcRaw> {
    parse_wdbc(&std::fs::read_to_string(path)?)
}

/// Seeded partition of the instances into test, training and validation rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WdbcSplit {
    pub n_test: usize,
    pub n_val: usize,
}

impl WdbcSplit {
    /// 369 test, 200 training.
    pub const FULL_TRAIN: WdbcSplit = WdbcSplit {
        n_test: 369,
        n_val: 0,
    };
    /// 369 test, 140 training, 60 validation.
    pub const WITH_VALIDATION: WdbcSplit = WdbcSplit {
        n_test: 369,
        n_val: 60,
    };

    /// Split tag per row. A random permutation assigns the first `n_test`
    /// rows to test and the last `n_val` to validation, so with the same
    /// seed the validation variant trains on a subset of the full variant.
    pub fn assign(&self, n: usize, rng: &mut RngStream) -> Result<Vec<Split>> {
        if self.n_test + self.n_val >= n {
            return Err(Error::invalid(format!(
                "split {}/{} leaves no training rows out of {n}",
                self.n_test, self.n_val
            )));
        }
        let perm = rng.permutation(n);
        let mut tags = vec![Split::Train; n];
        for &i in &perm[..self.n_test] {
            tags[i] = Split::Test;
        }
        for &i in &perm[n - self.n_val..] {
            tags[i] = Split::Validation;
        }
        Ok(tags)
    }
}

/// Per-feature mean and population standard deviation of the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::invalid("standardizer: no rows"));
        };
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, &v) in mean.iter_mut().zip(r.iter()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, &v), &m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        // Constant features are centered but left unscaled.
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }
}

/// Standardizes with training-split statistics, then applies
/// [`poly2_expand`] (496 features including the constant).
pub fn wdbc_dataset<T: Scalar>(
    raw: &WdbcRaw,
    split: WdbcSplit,
    rng: &mut RngStream,
) -> Result<SupervisedDataset<T>> {
    let tags = split.assign(raw.len(), rng)?;
    let train_rows: Vec<&[f64]> = raw
        .features
        .iter()
        .zip(&tags)
        .filter(|(_, &t)| t == Split::Train)
        .map(|(r, _)| r.as_slice())
        .collect();
    let standardizer = Standardizer::fit(&train_rows)?;
    let width = 1 + WDBC_FEATURES + WDBC_FEATURES * (WDBC_FEATURES + 1) / 2;
    let mut data = Vec::with_capacity(raw.len() * width);
    for row in &raw.features {
        let z = standardizer.apply(row);
        data.extend(poly2_expand(&z).into_iter().map(T::lit));
    }
    let matrix = DenseMatrix::from_row_major(raw.len(), width, data)?;
    SupervisedDataset::new(matrix, Targets::Class(raw.labels.clone()), tags)
}

/// Reads the file and builds the expanded, standardized dataset.
pub fn load_wdbc<T: Scalar>(
    path: impl AsRef<Path>,
    split: WdbcSplit,
    rng: &mut RngStream,
) -> Result<SupervisedDataset<T>> {
    wdbc_dataset(&load_wdbc_raw(path)?, split, rng)
}
