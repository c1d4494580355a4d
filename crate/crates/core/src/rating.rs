//! The multiplicative rating model and its one-shot formulas.
//!
//! A rate table is `r[i, j, k, ...] = base * x[i] * y[j] * z[k] * ...`, one
//! relativity vector per rating factor, with the base cell at multi-index
//! `(0, ..., 0)` and every base relativity equal to 1. Given losses `l` and
//! exposures `e` over the same grid, the loss-ratio method produces
//! indicated relativities
//!
//! ```text
//! x̂[i] = (l^x[i] / E^x[i]) / (l^x[0] / E^x[0]),   E^x[i] = Σ e[i, ..] * (product of the other relativities)
//! ```
//!
//! and an indicated base rate that reproduces the total loss at the
//! permissible loss ratio.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factors::FactorState;
use crate::tensor::{for_each_index, RiskTensor};

/// Losses and exposures over the risk space, plus the target loss ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingProblem {
    losses: RiskTensor,
    exposures: RiskTensor,
    plr: f64,
    current_base_rate: Option<f64>,
    strict: bool,
}

impl RatingProblem {
    /// Strict construction: every exposure cell and every slice loss must be
    /// positive.
    pub fn new(losses: RiskTensor, exposures: RiskTensor, plr: f64) -> Result<Self> {
        Self::with_mode(losses, exposures, plr, true)
    }

    /// With `strict = false`, zero exposure cells and zero-loss slices are
    /// admitted. The formulas then fail lazily where a denominator vanishes,
    /// and certificates are refused.
    pub fn with_mode(
        losses: RiskTensor,
        exposures: RiskTensor,
        plr: f64,
        strict: bool,
    ) -> Result<Self> {
        if losses.dims() != exposures.dims() {
            return Err(Error::DimensionMismatch {
                losses: losses.dims().to_vec(),
                exposures: exposures.dims().to_vec(),
            });
        }
        if !(plr.is_finite() && plr > 0.0) {
            return Err(Error::InvalidPlr(plr));
        }
        let mut violation = None;
        for_each_index(losses.dims(), |idx, flat| {
            if violation.is_some() {
                return;
            }
            let (l, e) = (losses.values()[flat], exposures.values()[flat]);
            if l > 0.0 && e <= 0.0 {
                violation = Some(Error::LossWithoutExposure {
                    cell: idx.to_vec(),
                    loss: l,
                });
            } else if strict && e <= 0.0 {
                violation = Some(Error::ZeroExposureCell { cell: idx.to_vec() });
            }
        });
        if let Some(err) = violation {
            return Err(err);
        }
        let problem = Self {
            losses,
            exposures,
            plr,
            current_base_rate: None,
            strict,
        };
        for factor in 0..problem.factor_count() {
            let sums = problem.slice_losses(factor);
            if sums[0] <= 0.0 {
                return Err(Error::ZeroBaseSliceLoss { factor });
            }
            if strict {
                if let Some(slice) = sums.iter().position(|&s| s <= 0.0) {
                    return Err(Error::ZeroSliceLoss { factor, slice });
                }
            }
        }
        Ok(problem)
    }

    pub fn with_current_base_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidBaseRate(rate));
        }
        self.current_base_rate = Some(rate);
        Ok(self)
    }

    pub fn losses(&self) -> &RiskTensor {
        &self.losses
    }

    pub fn exposures(&self) -> &RiskTensor {
        &self.exposures
    }

    pub fn plr(&self) -> f64 {
        self.plr
    }

    pub fn current_base_rate(&self) -> Option<f64> {
        self.current_base_rate
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn dims(&self) -> &[usize] {
        self.losses.dims()
    }

    pub fn factor_count(&self) -> usize {
        self.losses.factor_count()
    }

    /// Total loss `L`.
    pub fn total_loss(&self) -> f64 {
        self.losses.total()
    }

    /// `l^t[s]`: losses summed over every slice of axis `factor`.
    pub fn slice_losses(&self, factor: usize) -> Vec<f64> {
        self.losses.slice_sums(factor)
    }

    pub(crate) fn check_factors(&self, factors: &FactorState) -> Result<()> {
        if factors.dims() != self.dims() {
            return Err(Error::FactorShape("block lengths differ from tensor dims"));
        }
        Ok(())
    }
}

/// Factor-weighted exposures `E^t[s] = Σ_{cells in slice s} e * Π_{u≠t} f_u`.
pub fn adjusted_exposures(
    problem: &RatingProblem,
    factors: &FactorState,
    factor: usize,
) -> Result<Vec<f64>> {
    problem.check_factors(factors)?;
    let sums = weighted_slice_sums(problem, factors, factor);
    if let Some(slice) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroExposure { factor, slice });
    }
    Ok(sums)
}

fn weighted_slice_sums(problem: &RatingProblem, factors: &FactorState, factor: usize) -> Vec<f64> {
    let e = problem.exposures();
    let mut out = vec![0.0; e.dims()[factor]];
    for_each_index(e.dims(), |idx, flat| {
        out[idx[factor]] += e.values()[flat] * factors.product_except(idx, &[factor]);
    });
    out
}

/// Loss costs adjusted for heterogeneity: `l^t[s] / E^t[s]`.
pub fn adjusted_loss_costs(
    problem: &RatingProblem,
    factors: &FactorState,
    factor: usize,
) -> Result<Vec<f64>> {
    let exposures = adjusted_exposures(problem, factors, factor)?;
    let losses = problem.slice_losses(factor);
    if losses[0] <= 0.0 {
        return Err(Error::ZeroBaseSliceLoss { factor });
    }
    Ok(losses.iter().zip(&exposures).map(|(l, e)| l / e).collect())
}

/// One simultaneous loss-ratio sweep over every block, using the input
/// relativities for all adjusted exposures.
///
/// Each entry is evaluated as `(l[s] / l[0]) * (E[0] / E[s])`; the base entry
/// is the constant 1.
pub fn indicated_factors(problem: &RatingProblem, factors: &FactorState) -> Result<FactorState> {
    problem.check_factors(factors)?;
    let mut blocks = Vec::with_capacity(problem.factor_count());
    for t in 0..problem.factor_count() {
        let exposures = adjusted_exposures(problem, factors, t)?;
        let losses = problem.slice_losses(t);
        if losses[0] <= 0.0 {
            return Err(Error::ZeroBaseSliceLoss { factor: t });
        }
        let mut block = Vec::with_capacity(losses.len());
        block.push(1.0);
        for s in 1..losses.len() {
            if losses[s] <= 0.0 {
                return Err(Error::ZeroSliceLoss { factor: t, slice: s });
            }
            block.push((losses[s] / losses[0]) * (exposures[0] / exposures[s]));
        }
        blocks.push(block);
    }
    Ok(FactorState::from_blocks_unchecked(blocks))
}

/// `Σ_cells e * Π_t f_t`, the exposure base that the rates are spread over.
pub fn weighted_exposure_total(problem: &RatingProblem, factors: &FactorState) -> Result<f64> {
    problem.check_factors(factors)?;
    let e = problem.exposures();
    let mut total = 0.0;
    for_each_index(e.dims(), |idx, flat| {
        total += e.values()[flat] * factors.product_except(idx, &[]);
    });
    Ok(total)
}

/// Indicated base rate `(L / PLR) / Σ e * Π f`.
pub fn indicated_base_rate(problem: &RatingProblem, indicated: &FactorState) -> Result<f64> {
    let denom = weighted_exposure_total(problem, indicated)?;
    if denom <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(problem.total_loss() / problem.plr() / denom)
}

/// Rate table `base * Π_t f_t[idx_t]`.
pub fn assemble_rates(base_rate: f64, factors: &FactorState) -> Result<RiskTensor> {
    if !(base_rate.is_finite() && base_rate > 0.0) {
        return Err(Error::InvalidBaseRate(base_rate));
    }
    RiskTensor::from_fn(factors.dims(), |idx| {
        base_rate * factors.product_except(idx, &[])
    })
}
