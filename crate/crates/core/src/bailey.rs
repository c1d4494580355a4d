//! Two-variable minimum-bias fitting, kept as a reference point for the
//! loss-ratio relativities.
//!
//! The bias conditions ask the exposure-weighted residuals of the fit
//! `r_ij ≈ x_i y_j` to vanish along every row and every column. Each
//! condition is linear in one variable given the other, so the solver
//! alternates closed-form row and column updates.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::iteration::{run_fixed_point, IterationSettings, IterationTrace};
use crate::linalg::Matrix;
use crate::norms::vector_norm;

/// Observed loss costs `r` and exposures `w` on an `m × n` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BaileyProblem {
    r: Matrix,
    w: Matrix,
}

impl BaileyProblem {
    pub fn new(r: Matrix, w: Matrix) -> Result<Self> {
        if r.rows() != w.rows() || r.cols() != w.cols() {
            return Err(Error::MatrixShape {
                rows: r.rows(),
                cols: r.cols(),
                what: "loss costs and exposures differ in shape",
            });
        }
        if r.rows() == 0 || r.cols() == 0 {
            return Err(Error::MatrixShape {
                rows: r.rows(),
                cols: r.cols(),
                what: "grid is empty",
            });
        }
        if let Some((index, &value)) = r
            .data()
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        if let Some((index, &value)) = w
            .data()
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        Ok(Self { r, w })
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    /// Largest `w_ij r_ij`, the scale of the bias residuals.
    pub fn weighted_scale(&self) -> f64 {
        self.r
            .data()
            .iter()
            .zip(self.w.data())
            .map(|(r, w)| r * w)
            .fold(0.0, f64::max)
    }
}

/// Row and column relativities.
#[derive(Debug, Clone, PartialEq)]
pub struct BaileyFactors {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BaileyFactors {
    /// Moves the scale into `y` so that `x[0] = 1`. Fitted products are unchanged.
    pub fn normalized(&self) -> Self {
        let c = self.x[0];
        Self {
            x: self.x.iter().map(|v| v / c).collect(),
            y: self.y.iter().map(|v| v * c).collect(),
        }
    }

    pub fn product(&self, i: usize, j: usize) -> f64 {
        self.x[i] * self.y[j]
    }
}

/// Row residuals `Σ_j w_ij (r_ij − x_i y_j)` and column residuals
/// `Σ_i w_ij (r_ij − x_i y_j)`.
pub fn bailey_residuals(problem: &BaileyProblem, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (problem.r.rows(), problem.r.cols());
    let mut rows = alloc::vec![0.0; m];
    let mut cols = alloc::vec![0.0; n];
    for i in 0..m {
        for j in 0..n {
            let term = problem.w.get(i, j) * (problem.r.get(i, j) - x[i] * y[j]);
            rows[i] += term;
            cols[j] += term;
        }
    }
    (rows, cols)
}

fn sweep(problem: &BaileyProblem, f: &BaileyFactors) -> Result<BaileyFactors> {
    let (m, n) = (problem.r.rows(), problem.r.cols());
    let (r, w) = (&problem.r, &problem.w);
    let x: Vec<f64> = (0..m)
        .map(|i| {
            let num: f64 = (0..n).map(|j| w.get(i, j) * r.get(i, j)).sum();
            let den: f64 = (0..n).map(|j| w.get(i, j) * f.y[j]).sum();
            num / den
        })
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|j| {
            let num: f64 = (0..m).map(|i| w.get(i, j) * r.get(i, j)).sum();
            let den: f64 = (0..m).map(|i| w.get(i, j) * x[i]).sum();
            num / den
        })
        .collect();
    if let Some((index, &value)) = x.iter().chain(&y).enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        // a row or column with no loss at all has no positive relativity
        return Err(Error::InvalidValue { index, value });
    }
    Ok(BaileyFactors { x, y })
}

/// Result of [`bailey_iterate`]: the raw trace and the normalized fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BaileyRun {
    pub trace: IterationTrace<BaileyFactors>,
    pub fit: BaileyFactors,
}

/// Alternating updates `x_i ← Σ_j w r / Σ_j w y_j`, then
/// `y_j ← Σ_i w r / Σ_i w x_i`, until successive `(x, y)` agree.
pub fn bailey_iterate(
    problem: &BaileyProblem,
    x0: &[f64],
    y0: &[f64],
    settings: &IterationSettings,
) -> Result<BaileyRun> {
    if x0.len() != problem.r.rows() || y0.len() != problem.r.cols() {
        return Err(Error::FactorShape("starting relativities do not match the grid"));
    }
    if let Some((index, &value)) = x0.iter().chain(y0).enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::NonPositiveStart { index, value });
    }
    let norm = settings.norm();
    let start = BaileyFactors {
        x: x0.to_vec(),
        y: y0.to_vec(),
    };
    let trace = run_fixed_point(
        start,
        settings,
        |f| sweep(problem, f),
        |a, b| {
            let diff: Vec<f64> = a
                .x
                .iter()
                .chain(&a.y)
                .zip(b.x.iter().chain(&b.y))
                .map(|(u, v)| u - v)
                .collect();
            vector_norm(&diff, norm)
        },
    )?;
    let fit = trace.last().normalized();
    Ok(BaileyRun { trace, fit })
}
