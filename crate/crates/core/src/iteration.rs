//! Stopping rules and traces shared by every fixed-point driver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::norms::Norm;

/// Stopping rule: stop once `‖x_{t+1} − x_t‖ ≤ tolerance`, or after
/// `max_iters` map evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    tolerance: f64,
    max_iters: usize,
    norm: Norm,
}

impl IterationSettings {
    pub fn new(tolerance: f64, max_iters: usize, norm: Norm) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::InvalidSettings("tolerance must be positive and finite"));
        }
        if max_iters == 0 {
            return Err(Error::InvalidSettings("max_iters must be at least 1"));
        }
        if norm == Norm::Two {
            return Err(Error::InvalidSettings("residual norm must be 1 or infinity"));
        }
        Ok(Self {
            tolerance,
            max_iters,
            norm,
        })
    }

    /// Defaults for population models: 1e-12 and 100 000 steps, since
    /// convergence slows down as growth rates approach 1.
    pub fn leslie_gower() -> Self {
        Self {
            tolerance: 1e-12,
            max_iters: 100_000,
            norm: Norm::Infinity,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iters: 10_000,
            norm: Norm::Infinity,
        }
    }
}

/// Everything a fixed-point run visited.
///
/// `iterates[0]` is the starting point; `residuals[t]` is the distance between
/// `iterates[t + 1]` and `iterates[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<S> {
    pub iterates: Vec<S>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl<S> IterationTrace<S> {
    pub fn last(&self) -> &S {
        self.iterates.last().expect("trace always holds the start point")
    }

    pub fn into_last(mut self) -> S {
        self.iterates.pop().expect("trace always holds the start point")
    }

    pub fn last_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }
}

/// Runs `x_{t+1} = step(x_t)` under `settings`. `NotConverged` is reported via
/// `converged = false`; only errors from `step` abort the run.
pub fn run_fixed_point<S, E, F, D>(
    start: S,
    settings: &IterationSettings,
    mut step: F,
    distance: D,
) -> core::result::Result<IterationTrace<S>, E>
where
    F: FnMut(&S) -> core::result::Result<S, E>,
    D: Fn(&S, &S) -> f64,
{
    let mut iterates = vec![start];
    let mut residuals = Vec::new();
    let mut converged = false;
    while residuals.len() < settings.max_iters {
        let current = iterates.last().expect("non-empty");
        let next = step(current)?;
        let r = distance(current, &next);
        iterates.push(next);
        residuals.push(r);
        if r <= settings.tolerance {
            converged = true;
            break;
        }
    }
    Ok(IterationTrace {
        iterations_used: residuals.len(),
        iterates,
        residuals,
        converged,
    })
}
