//! Skew class-balanced re-weighting: skew logits, per-batch sample
//! estimates, target-anchored skew, entropy, threshold, effective number,
//! and the per-sample loss weights they induce.
//!
//! The pipeline for one minibatch of pair samples:
//!
//! 1. `skew_logits` squashes the non-visual predicate logits through a
//!    sigmoid, giving per-class pseudo-counts in (0, 1) per sample.
//! 2. `sample_estimates` sums them per class into batch-level counts `m_y`.
//! 3. Each sample gets a skew score anchored at its target logit and an
//!    entropy score; samples whose skew exceeds the batch threshold get an
//!    adaptive `beta = 1 - H`, the rest fall back to uniform weighting.
//! 4. Per-class weights are reciprocals of the effective number
//!    `(1 - beta^m) / (1 - beta)`, rescaled so they sum to the class count.

use crate::error::{Error, Result};
use crate::numerics::{normalize_positive, stable_sigmoid, Matrix};
use serde::{Deserialize, Serialize};

/// Variance floor below which a sample's skew is defined as exactly zero.
const SKEW_VARIANCE_FLOOR: f64 = 1e-12;
/// Upper cap on beta; only reachable when `lambda_skew` is zero.
const BETA_CAP: f64 = 1.0 - 1e-9;
/// Floor applied to sample estimates before the effective number.
const ESTIMATE_FLOOR: f64 = 1.0;

/// Which non-visual logits feed the skew estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkewVariant {
    /// Sigmoid of the label-embedding head output.
    Emb,
    /// Sigmoid of the raw frequency-prior logits.
    Freq,
    /// Sigmoid of their elementwise sum.
    FreqEmb,
}

/// Sigmoid-activated per-pair, per-predicate estimates; entries strictly
/// inside (0, 1), one column per predicate class including background.
#[derive(Debug, Clone)]
pub struct SkewLogits {
    matrix: Matrix,
}

impl SkewLogits {
    /// Wraps a matrix whose entries are already strictly inside (0, 1).
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        for i in 0..matrix.rows() {
            for (j, &v) in matrix.row(i).iter().enumerate() {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "skew logit [{i}][{j}] = {v} outside (0, 1)"
                    )));
                }
            }
        }
        Ok(SkewLogits { matrix })
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_classes(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Batch-level per-class pseudo-counts `m_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleEstimates(pub Vec<f64>);

impl SampleEstimates {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-sample weighting diagnostics for one minibatch.
#[derive(Debug, Clone)]
pub struct SkewDiagnostics {
    /// Target-anchored skew per sample.
    pub skew: Vec<f64>,
    /// Entropy term per sample, in [0, lambda_skew].
    pub entropy: Vec<f64>,
    /// Adaptive beta per sample, in [0, 1); zero at or below the threshold.
    pub beta: Vec<f64>,
    /// Effective number at the sample's target class.
    pub effective_number: Vec<f64>,
    /// Normalized loss weight at the sample's target class.
    pub weight: Vec<f64>,
    /// Batch threshold: mean skew minus delta.
    pub threshold: f64,
    /// Mean skew over the batch.
    pub mean_skew: f64,
}

impl SkewDiagnostics {
    /// Uniform weighting (every weight one): the conventional
    /// cross-entropy branch, used when re-weighting is disabled.
    pub fn uniform(samples: usize) -> Self {
        SkewDiagnostics {
            skew: vec![0.0; samples],
            entropy: vec![0.0; samples],
            beta: vec![0.0; samples],
            effective_number: vec![1.0; samples],
            weight: vec![1.0; samples],
            threshold: f64::INFINITY,
            mean_skew: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }
}

/// Builds the skew logits for the selected variant. `freq` carries the raw
/// frequency-prior logits, `emb` the embedding-head logits; both are squashed
/// (elementwise-summed first for [`SkewVariant::FreqEmb`]).
pub fn skew_logits(freq: &Matrix, emb: &Matrix, variant: SkewVariant) -> Result<SkewLogits> {
    if !freq.same_shape(emb) {
        return Err(Error::ShapeMismatch {
            left_rows: freq.rows(),
            left_cols: freq.cols(),
            right_rows: emb.rows(),
            right_cols: emb.cols(),
        });
    }
    let matrix = match variant {
        SkewVariant::Emb => emb.map(stable_sigmoid),
        SkewVariant::Freq => freq.map(stable_sigmoid),
        SkewVariant::FreqEmb => {
            let mut out = Matrix::zeros(freq.rows(), freq.cols());
            for (o, (&a, &b)) in out
                .data_mut()
                .iter_mut()
                .zip(freq.data().iter().zip(emb.data().iter()))
            {
                *o = stable_sigmoid(a + b);
            }
            out
        }
    };
    Ok(SkewLogits { matrix })
}

/// Column sums of the skew logits: the per-class sample estimates.
pub fn sample_estimates(skew: &SkewLogits) -> SampleEstimates {
    let cols = skew.num_classes();
    let mut sums = vec![0.0; cols];
    for i in 0..skew.rows() {
        for (j, &v) in skew.row(i).iter().enumerate() {
            sums[j] += v;
        }
    }
    SampleEstimates(sums)
}

/// Third standardized moment of a sample's class scores with deviations
/// taken from the target class's score rather than the mean. Zero-variance
/// rows return exactly zero.
pub fn target_skew(row: &[f64], target: usize) -> Result<f64> {
    if target >= row.len() {
        return Err(Error::IndexOutOfRange {
            what: "target class",
            index: target,
            size: row.len(),
        });
    }
    let n = row.len() as f64;
    let anchor = row[target];
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for &v in row {
        let d = v - anchor;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if m2 < SKEW_VARIANCE_FLOOR {
        return Ok(0.0);
    }
    Ok(m3 / m2.powf(1.5))
}

/// Entropy of the row's induced distribution in base `row.len()`, scaled by
/// `lambda_skew`; lies in `[0, lambda_skew]` with the maximum at uniform.
pub fn entropy_skew(row: &[f64], lambda_skew: f64) -> Result<f64> {
    let p = normalize_positive(row)?;
    let mut nats = 0.0;
    for &q in &p {
        if q > 0.0 {
            nats -= q * q.ln();
        }
    }
    if nats == 0.0 {
        return Ok(0.0);
    }
    let h = lambda_skew * nats / (p.len() as f64).ln();
    Ok(h.clamp(0.0, lambda_skew))
}

/// Batch threshold: mean skew minus delta.
pub fn skew_threshold(skews: &[f64], delta: f64) -> Result<f64> {
    if skews.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mean = skews.iter().sum::<f64>() / skews.len() as f64;
    Ok(mean - delta)
}

/// Effective number of samples `(1 - beta^m) / (1 - beta)`; equals one at
/// `beta = 0` and approaches `m` as `beta` approaches one. The exponent may
/// be fractional.
pub fn effective_number(beta: f64, m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidBeta(beta));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - beta.powf(m)) / (1.0 - beta))
}

/// Per-class weights for one sample's beta against the batch estimates:
/// reciprocal effective numbers rescaled to sum to the class count.
/// Estimates are floored at one so the weights stay bounded.
pub fn class_weights(beta: f64, estimates: &SampleEstimates) -> Result<Vec<f64>> {
    let classes = estimates.len();
    if classes == 0 {
        return Err(Error::EmptyBatch);
    }
    let mut raw = Vec::with_capacity(classes);
    for &m in &estimates.0 {
        let e = effective_number(beta, m.max(ESTIMATE_FLOOR))?;
        raw.push(1.0 / e);
    }
    let sum: f64 = raw.iter().sum();
    let scale = classes as f64 / sum;
    Ok(raw.iter().map(|u| u * scale).collect())
}

/// Runs the full weighting pipeline for one batch: skew and entropy per
/// sample, the batch threshold, adaptive beta, and the normalized weight at
/// each sample's target class.
pub fn compute_sample_weights(
    skew: &SkewLogits,
    targets: &[usize],
    delta: f64,
    lambda_skew: f64,
) -> Result<SkewDiagnostics> {
    let samples = skew.rows();
    if samples == 0 {
        return Err(Error::EmptyBatch);
    }
    if targets.len() != samples {
        return Err(Error::LengthMismatch {
            what: "targets and batch rows",
            left: targets.len(),
            right: samples,
        });
    }
    let classes = skew.num_classes();
    for &t in targets {
        if t >= classes {
            return Err(Error::IndexOutOfRange {
                what: "target class",
                index: t,
                size: classes,
            });
        }
    }

    let estimates = sample_estimates(skew);

    let mut skews = Vec::with_capacity(samples);
    for (i, &t) in targets.iter().enumerate() {
        skews.push(target_skew(skew.row(i), t)?);
    }
    let threshold = skew_threshold(&skews, delta)?;
    let mean_skew = threshold + delta;

    let mut entropy = Vec::with_capacity(samples);
    let mut beta = Vec::with_capacity(samples);
    let mut effective = Vec::with_capacity(samples);
    let mut weight = Vec::with_capacity(samples);
    for (i, &t) in targets.iter().enumerate() {
        let h = entropy_skew(skew.row(i), lambda_skew)?;
        let b = if skews[i] > threshold {
            (1.0 - h).min(BETA_CAP)
        } else {
            0.0
        };
        let w = class_weights(b, &estimates)?;
        effective.push(effective_number(b, estimates.0[t].max(ESTIMATE_FLOOR))?);
        weight.push(w[t]);
        entropy.push(h);
        beta.push(b);
    }

    Ok(SkewDiagnostics {
        skew: skews,
        entropy,
        beta,
        effective_number: effective,
        weight,
        threshold,
        mean_skew,
    })
}
