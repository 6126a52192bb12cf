//! Numerically stable scalar/vector primitives shared by every other module.
//!
//! All arithmetic is 64-bit. Accumulations run in plain left-to-right order
//! with a fixed iteration order so a seeded run is bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest f64 strictly below 1. Sigmoid outputs are clamped here so they
/// never saturate to exactly 1 for finite inputs.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Dense row-major matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row slices; all rows must share one width.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    left_rows: rows.len(),
                    left_cols: cols,
                    right_rows: rows.len(),
                    right_cols: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Elementwise map into a new matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        (0..m.rows).map(|i| m.row(i).to_vec()).collect()
    }
}

/// Logistic function that neither overflows nor returns exactly 0 or 1 for
/// finite input. Symmetric: `sigmoid(-x) = 1 - sigmoid(x)` up to rounding.
pub fn stable_sigmoid(x: f64) -> f64 {
    let s = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, ONE_BELOW)
}

/// Max-shifted log-softmax of one row of logits.
pub fn log_softmax_row(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyLogits);
    }
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for &x in v {
        sum += (x - max).exp();
    }
    let lse = sum.ln();
    Ok(v.iter().map(|&x| x - max - lse).collect())
}

/// Scales a nonnegative vector to sum to one, preserving entry ratios.
pub fn normalize_positive(v: &[f64]) -> Result<Vec<f64>> {
    let mut sum = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x < 0.0 {
            return Err(Error::NegativeEntry { index: i, value: x });
        }
        sum += x;
    }
    if sum <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    Ok(v.iter().map(|&x| x / sum).collect())
}

/// Central-difference gradient `(f(x + h e_k) - f(x - h e_k)) / 2h` per
/// coordinate. Used as the independent oracle for every analytic gradient.
pub fn finite_diff_gradient<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        let orig = probe[k];
        probe[k] = orig + h;
        let plus = f(&probe);
        probe[k] = orig - h;
        let minus = f(&probe);
        probe[k] = orig;
        grad[k] = (plus - minus) / (2.0 * h);
    }
    grad
}
