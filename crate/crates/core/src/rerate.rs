//! Repeated re-rating: the loss-ratio sweep used as a fixed-point map.
//!
//! Feeding the indicated relativities back in as the current ones gives the
//! map `φ`; a solution of the rating system is a point with `φ(f) = f`. All
//! blocks are updated simultaneously from the previous iterate.

use crate::error::{Error, Result};
use crate::factors::FactorState;
use crate::iteration::{run_fixed_point, IterationSettings, IterationTrace};
use crate::norms::Norm;
use crate::rating::{indicated_factors, RatingProblem};

/// The re-rating map `φ`. Identical to one loss-ratio sweep.
pub fn phi(problem: &RatingProblem, f: &FactorState) -> Result<FactorState> {
    indicated_factors(problem, f)
}

/// Iterates `φ` from `start` until successive iterates are within the
/// tolerance or the budget runs out.
pub fn iterate(
    problem: &RatingProblem,
    start: &FactorState,
    settings: &IterationSettings,
) -> Result<IterationTrace<FactorState>> {
    problem.check_factors(start)?;
    let norm = settings.norm();
    run_fixed_point(
        start.clone(),
        settings,
        |f| phi(problem, f),
        |a, b| a.distance(b, norm),
    )
}

/// Iterates from the neutral all-ones relativities.
pub fn iterate_from_ones(
    problem: &RatingProblem,
    settings: &IterationSettings,
) -> Result<IterationTrace<FactorState>> {
    iterate(problem, &FactorState::ones(problem.dims()), settings)
}

/// `‖φ(f) − f‖` in the given norm.
pub fn fixed_point_residual(problem: &RatingProblem, f: &FactorState, norm: Norm) -> Result<f64> {
    let image = phi(problem, f)?;
    Ok(image.distance(f, norm))
}

/// Runs [`iterate`] from every start and reports the largest ∞-distance
/// between any limit and the first one. Used when no certificate is available.
pub fn multi_start_spread(
    problem: &RatingProblem,
    starts: &[FactorState],
    settings: &IterationSettings,
) -> Result<MultiStart> {
    let mut limits = alloc::vec::Vec::with_capacity(starts.len());
    let mut all_converged = true;
    for s in starts {
        let trace = iterate(problem, s, settings)?;
        all_converged &= trace.converged;
        limits.push(trace.into_last());
    }
    let first = limits.first().ok_or(Error::InvalidSettings("no starting points"))?;
    let spread = limits
        .iter()
        .map(|l| l.distance(first, Norm::Infinity))
        .fold(0.0, f64::max);
    Ok(MultiStart {
        spread,
        all_converged,
        starts: starts.len(),
    })
}

/// Outcome of a multi-start convergence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStart {
    pub spread: f64,
    pub all_converged: bool,
    pub starts: usize,
}
