//! Multi-species Leslie-Gower competition.
//!
//! Each species follows the Beverton-Holt update
//!
//! ```text
//! x_i ← b_i x_i / (1 + Σ_j c_ij x_j)
//! ```
//!
//! A strictly positive equilibrium satisfies `C x = b − 1`, so when `C` is
//! invertible the equilibrium is found by one linear solve instead of
//! iterating. Under weak competition the iteration still converges to it from
//! every positive start.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::iteration::{run_fixed_point, IterationSettings, IterationTrace};
use crate::linalg::{self, Matrix, PIVOT_TOLERANCE};
use crate::norms::vector_norm;

/// Growth coefficients `b` and competition matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LgModel {
    b: Vec<f64>,
    c: Matrix,
}

impl LgModel {
    pub fn new(b: Vec<f64>, c: Matrix) -> Result<Self> {
        let d = b.len();
        if d < 2 {
            return Err(Error::InvalidModel("at least two species are required"));
        }
        if c.rows() != d || c.cols() != d {
            return Err(Error::InvalidModel("C must be d x d with d = len(b)"));
        }
        if b.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidModel("growth coefficients must be positive"));
        }
        for i in 0..d {
            for j in 0..d {
                let v = c.get(i, j);
                if !v.is_finite() {
                    return Err(Error::InvalidModel("C entries must be finite"));
                }
                if i == j && v <= 0.0 {
                    return Err(Error::InvalidModel("diagonal of C must be positive"));
                }
                if i != j && v < 0.0 {
                    return Err(Error::InvalidModel("off-diagonal of C must be non-negative"));
                }
            }
        }
        Ok(Self { b, c })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn species(&self) -> usize {
        self.b.len()
    }

    /// Single-species equilibria `K_i = (b_i − 1) / c_ii`.
    pub fn carrying_capacities(&self) -> Vec<f64> {
        (0..self.species())
            .map(|i| (self.b[i] - 1.0) / self.c.get(i, i))
            .collect()
    }

    fn threshold(&self) -> f64 {
        PIVOT_TOLERANCE * self.c.max_abs()
    }
}

/// The Beverton-Holt map. Absent species stay absent.
pub fn bh_map(model: &LgModel, x: &[f64]) -> Vec<f64> {
    (0..model.species())
        .map(|i| {
            let row = model.c.row(i);
            let crowding: f64 = row.iter().zip(x).map(|(c, x)| c * x).sum();
            model.b[i] * x[i] / (1.0 + crowding)
        })
        .collect()
}

/// Necessary conditions for a positive equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NecessaryConditions {
    /// Every `b_i > 1`.
    pub growth_ok: bool,
    /// `rank [C | b − 1] = rank C`, i.e. `C x = b − 1` is solvable.
    pub rank_consistent: bool,
    /// `C` has full rank, so the equilibrium is unique when it exists.
    pub invertible: bool,
    pub rank: usize,
    pub augmented_rank: usize,
}

pub fn check_necessary(model: &LgModel) -> NecessaryConditions {
    let d = model.species();
    let threshold = model.threshold();
    let rhs: Vec<f64> = model.b.iter().map(|b| b - 1.0).collect();
    let rank = linalg::rank(&model.c, threshold);
    let augmented_rank = model
        .c
        .augment(&rhs)
        .map(|m| linalg::rank(&m, threshold))
        .expect("rhs length equals species count");
    NecessaryConditions {
        growth_ok: model.b.iter().all(|&b| b > 1.0),
        rank_consistent: rank == augmented_rank,
        invertible: rank == d,
        rank,
        augmented_rank,
    }
}

/// Weak-competition check `Σ_{j≠i} c_ij b_j / c_jj ≤ b_i − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakCompetition {
    pub holds: bool,
    /// `b_i − 1 − Σ_{j≠i} c_ij b_j / c_jj` per species.
    pub slack: Vec<f64>,
    /// Some species meets the condition with equality; the trapping box then
    /// degenerates to a zero lower bound for that species.
    pub tight: bool,
}

fn competition_pressure(model: &LgModel, i: usize) -> f64 {
    (0..model.species())
        .filter(|&j| j != i)
        .map(|j| model.c.get(i, j) * model.b[j] / model.c.get(j, j))
        .sum()
}

pub fn check_weak_competition(model: &LgModel) -> WeakCompetition {
    let slack: Vec<f64> = (0..model.species())
        .map(|i| model.b[i] - 1.0 - competition_pressure(model, i))
        .collect();
    WeakCompetition {
        holds: slack.iter().all(|&s| s >= 0.0),
        tight: slack.contains(&0.0),
        slack,
    }
}

/// Coordinate box `lower_i ≤ x_i ≤ b_i / c_ii` mapped into itself by
/// [`bh_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct LgBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LgBox {
    pub fn contains(&self, x: &[f64], rel_slack: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, h))| *v >= l * (1.0 - rel_slack) && *v <= h * (1.0 + rel_slack))
    }
}

/// Builds the trapping box with `lower_i = shrink · (b_i − 1 − Σ_{j≠i} c_ij b_j/c_jj) / c_ii`.
///
/// Any lower bound strictly below `(b_i − 1 − Σ_{j≠i} c_ij b_j/c_jj) / c_ii`
/// works; `shrink ∈ (0, 1)` picks one. Requires weak competition.
pub fn build_box(model: &LgModel, shrink: f64) -> Result<LgBox> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidSettings("shrink must lie in (0, 1)"));
    }
    let weak = check_weak_competition(model);
    if let Some((species, &slack)) = weak.slack.iter().enumerate().find(|(_, s)| **s < 0.0) {
        return Err(Error::WeakCompetitionViolated { species, slack });
    }
    let d = model.species();
    let lower = (0..d)
        .map(|i| shrink * weak.slack[i] / model.c.get(i, i))
        .collect();
    let upper = (0..d).map(|i| model.b[i] / model.c.get(i, i)).collect();
    Ok(LgBox { lower, upper })
}

/// Solution of `C x = b − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    /// Every coordinate is strictly positive, i.e. `x` is an interior
    /// equilibrium of the population map.
    pub positive: bool,
}

pub fn solve_linear(model: &LgModel) -> Result<LinearSolution> {
    let rhs: Vec<f64> = model.b.iter().map(|b| b - 1.0).collect();
    let x = linalg::solve(&model.c, &rhs)?;
    let positive = x.iter().all(|&v| v > 0.0);
    Ok(LinearSolution { x, positive })
}

/// Iterates [`bh_map`] from a strictly positive start.
pub fn iterate_lg(
    model: &LgModel,
    start: &[f64],
    settings: &IterationSettings,
) -> Result<IterationTrace<Vec<f64>>> {
    if start.len() != model.species() {
        return Err(Error::InvalidModel("start has the wrong number of species"));
    }
    if let Some((index, &value)) = start
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::NonPositiveStart { index, value });
    }
    let norm = settings.norm();
    run_fixed_point(
        start.to_vec(),
        settings,
        |x| Ok(bh_map(model, x)),
        |a, b| {
            let diff: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
            vector_norm(&diff, norm)
        },
    )
}

/// Coefficients of the form `x_i ← μ_i K_i x_i / (K_i + (μ_i − 1) x_i + Σ_{j≠i} c̃_ij x_j)`.
///
/// The diagonal of `c_tilde` is zero; self-limitation is carried by `μ_i − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummersForm {
    pub mu: Vec<f64>,
    pub k: Vec<f64>,
    pub c_tilde: Matrix,
}

pub fn to_summers_form(model: &LgModel) -> Result<SummersForm> {
    if let Some((species, &value)) = model.b.iter().enumerate().find(|(_, b)| **b <= 1.0) {
        return Err(Error::GrowthNotAboveOne { species, value });
    }
    let d = model.species();
    let k = model.carrying_capacities();
    let mut c_tilde = Matrix::zeros(d, d);
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            c_tilde.set(i, j, k[i] * model.c.get(i, j));
        }
    }
    Ok(SummersForm {
        mu: model.b.clone(),
        k,
        c_tilde,
    })
}

pub fn from_summers_form(form: &SummersForm) -> Result<LgModel> {
    let d = form.mu.len();
    if form.k.len() != d || form.c_tilde.rows() != d || form.c_tilde.cols() != d {
        return Err(Error::InvalidModel("inconsistent Summers-form dimensions"));
    }
    let mut c = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v = if i == j {
                (form.mu[i] - 1.0) / form.k[i]
            } else {
                form.c_tilde.get(i, j) / form.k[i]
            };
            c.set(i, j, v);
        }
    }
    LgModel::new(form.mu.clone(), c)
}

/// Everything the necessary-condition and existence checks say about a model.
#[derive(Debug, Clone, PartialEq)]
pub struct LgDiagnostics {
    pub growth_ok: bool,
    pub rank_consistent: bool,
    pub invertible: bool,
    pub weak_competition: bool,
    pub weak_competition_tight: bool,
    pub slack: Vec<f64>,
    pub carrying_capacities: Vec<f64>,
    /// Present when weak competition holds.
    pub trapping_box: Option<LgBox>,
}

pub fn diagnose(model: &LgModel, shrink: f64) -> Result<LgDiagnostics> {
    let necessary = check_necessary(model);
    let weak = check_weak_competition(model);
    let trapping_box = if weak.holds {
        Some(build_box(model, shrink)?)
    } else {
        None
    };
    Ok(LgDiagnostics {
        growth_ok: necessary.growth_ok,
        rank_consistent: necessary.rank_consistent,
        invertible: necessary.invertible,
        weak_competition: weak.holds,
        weak_competition_tight: weak.tight,
        slack: weak.slack,
        carrying_capacities: model.carrying_capacities(),
        trapping_box,
    })
}
