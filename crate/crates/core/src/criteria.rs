//! Convergence certificates for the re-rating map.
//!
//! Every image `φ(f)` lies in a coordinate box `U` built from slice exposure
//! extremes. Bounding each Jacobian entry over `U` gives upper bounds `ρ∞`,
//! `ρ₁` on the ∞- and 1-operator norms of the Jacobian, and coarser bounds
//! `r∞`, `r₁` that only use the global exposure extremes. Any of them below 1
//! makes `φ` a contraction on `U`: the fixed point is unique and the
//! iteration reaches it from every positive start.
//!
//! The bounds sum over the non-base coordinates of each foreign block, i.e.
//! they dominate the Jacobian with base-coordinate columns removed
//! ([`JacobianConvention::FixedBaseCoordinates`]). After one step every base
//! relativity is pinned to 1, so that reduced map is the one that governs
//! convergence.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::factors::{block_offsets, FactorState};
use crate::linalg::Matrix;
use crate::norms::{matrix_norm, MatrixNorm};
use crate::rating::{adjusted_exposures, RatingProblem};
use crate::sampling::log_uniform;
use crate::tensor::for_each_index;

/// Minimum and maximum exposure over every slice of every axis, plus the
/// global extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceExtremes {
    /// `min[t][s]`: smallest exposure cell in slice `s` of axis `t`.
    pub min: Vec<Vec<f64>>,
    /// `max[t][s]`: largest exposure cell in slice `s` of axis `t`.
    pub max: Vec<Vec<f64>>,
    pub global_min: f64,
    pub global_max: f64,
}

impl SliceExtremes {
    pub fn scan(problem: &RatingProblem) -> Self {
        let e = problem.exposures();
        let dims = e.dims();
        let mut min: Vec<Vec<f64>> = dims.iter().map(|&d| vec![f64::INFINITY; d]).collect();
        let mut max: Vec<Vec<f64>> = dims.iter().map(|&d| vec![f64::NEG_INFINITY; d]).collect();
        for_each_index(dims, |idx, flat| {
            let v = e.values()[flat];
            for (t, &s) in idx.iter().enumerate() {
                min[t][s] = min[t][s].min(v);
                max[t][s] = max[t][s].max(v);
            }
        });
        Self {
            min,
            max,
            global_min: e.min_value(),
            global_max: e.max_value(),
        }
    }
}

/// Coordinate box that contains `φ(f)` for every positive `f`.
///
/// Slice `s` of block `t` ranges over
/// `[l[s] min[0] / (l[0] max[s]), l[s] max[0] / (l[0] min[s])]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxU {
    pub lower: FactorState,
    pub upper: FactorState,
    pub extremes: SliceExtremes,
}

impl BoxU {
    pub fn contains(&self, f: &FactorState, rel_slack: f64) -> bool {
        self.violations(f, rel_slack) == 0
    }

    /// Number of coordinates of `f` outside the box by more than `rel_slack`
    /// relative to the bound.
    pub fn violations(&self, f: &FactorState, rel_slack: f64) -> usize {
        let lo = self.lower.to_flat();
        let hi = self.upper.to_flat();
        f.to_flat()
            .iter()
            .zip(lo.iter().zip(&hi))
            .filter(|(v, (l, h))| **v < **l * (1.0 - rel_slack) || **v > **h * (1.0 + rel_slack))
            .count()
    }

    /// Draws a point log-uniformly per coordinate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FactorState {
        let blocks = self
            .lower
            .blocks()
            .iter()
            .zip(self.upper.blocks())
            .map(|(lo, hi)| {
                lo.iter()
                    .zip(hi)
                    .map(|(&l, &h)| log_uniform(rng, l, h))
                    .collect()
            })
            .collect();
        FactorState::from_blocks_unchecked(blocks)
    }
}

pub fn compute_box(problem: &RatingProblem) -> Result<BoxU> {
    let extremes = SliceExtremes::scan(problem);
    let mut lower = Vec::with_capacity(problem.factor_count());
    let mut upper = Vec::with_capacity(problem.factor_count());
    for t in 0..problem.factor_count() {
        let l = problem.slice_losses(t);
        let (mu, big) = (&extremes.min[t], &extremes.max[t]);
        if let Some(slice) = mu.iter().position(|&m| m <= 0.0) {
            return Err(Error::ZeroExposure { factor: t, slice });
        }
        if let Some(slice) = l.iter().position(|&v| v <= 0.0) {
            return Err(if slice == 0 {
                Error::ZeroBaseSliceLoss { factor: t }
            } else {
                Error::ZeroSliceLoss { factor: t, slice }
            });
        }
        lower.push(
            (0..l.len())
                .map(|s| l[s] * mu[0] / (l[0] * big[s]))
                .collect(),
        );
        upper.push(
            (0..l.len())
                .map(|s| l[s] * big[0] / (l[0] * mu[s]))
                .collect(),
        );
    }
    Ok(BoxU {
        lower: FactorState::new(lower)?,
        upper: FactorState::new(upper)?,
        extremes,
    })
}

/// Which variables the Jacobian is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianConvention {
    /// Every coordinate, including the base relativity of each block.
    #[default]
    Full,
    /// Base relativities are held at their values: their columns are zero.
    FixedBaseCoordinates,
}

/// Analytic Jacobian of `φ` at `f`, rows and columns ordered block by block.
///
/// Entry `((t, s), (u, v))` for `u ≠ t` is the quotient-rule derivative
/// `(l[s]/l[0]) (A'_v B_s − A B'_{s,v}) / B_s²` with `A = E^t[0]`,
/// `B_s = E^t[s]` and primes denoting the partial sums that pick out
/// `f_u[v]`. Diagonal blocks are zero because `φ` never reads its own block.
pub fn jacobian(
    problem: &RatingProblem,
    f: &FactorState,
    convention: JacobianConvention,
) -> Result<Matrix> {
    problem.check_factors(f)?;
    let dims = problem.dims().to_vec();
    let offsets = block_offsets(&dims);
    let total: usize = dims.iter().sum();
    let mut jac = Matrix::zeros(total, total);
    let e = problem.exposures();
    for t in 0..dims.len() {
        let adj = adjusted_exposures(problem, f, t)?;
        let losses = problem.slice_losses(t);
        for u in (0..dims.len()).filter(|&u| u != t) {
            // partial[s][v] = Σ_{idx_t = s, idx_u = v} e Π_{w ∉ {t,u}} f_w
            let mut partial = vec![vec![0.0; dims[u]]; dims[t]];
            for_each_index(&dims, |idx, flat| {
                partial[idx[t]][idx[u]] += e.values()[flat] * f.product_except(idx, &[t, u]);
            });
            for s in 0..dims[t] {
                let ratio = losses[s] / losses[0];
                let b = adj[s];
                for v in 0..dims[u] {
                    if convention == JacobianConvention::FixedBaseCoordinates && v == 0 {
                        continue;
                    }
                    let num = partial[0][v] * b - adj[0] * partial[s][v];
                    jac.set(offsets[t] + s, offsets[u] + v, ratio * num / (b * b));
                }
            }
        }
    }
    Ok(jac)
}

/// The per-slice bounds behind `ρ∞` and `ρ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoBounds {
    pub rho_inf: f64,
    pub rho_1: f64,
    /// Row bound for every coordinate, block by block.
    pub rho_inf_rows: Vec<Vec<f64>>,
    /// Column bound for the coordinates of each block (equal within a block).
    pub rho_1_blocks: Vec<f64>,
}

fn require_three_factors(problem: &RatingProblem) -> Result<()> {
    match problem.factor_count() {
        3 => Ok(()),
        n => Err(Error::Unsupported { factors: n }),
    }
}

fn require_positive_exposures(extremes: &SliceExtremes) -> Result<()> {
    for (t, mins) in extremes.min.iter().enumerate() {
        if let Some(slice) = mins.iter().position(|&m| m <= 0.0) {
            return Err(Error::ZeroExposure { factor: t, slice });
        }
    }
    Ok(())
}

/// Bounds `ρ∞` and `ρ₁` from slice exposure extremes and slice losses.
///
/// With `a_t[s] = (l[s]/l[0]) (max[0] max[s] − min[0] min[s]) / min[s]²`
/// bounding the sensitivity of coordinate `(t, s)`, and
/// `g_t = l[0] / (min[0] Σ_s l[s]/max[s])` bounding `1 / Σ f_t` over `U`:
///
/// ```text
/// ρ∞ = max_{t,s} a_t[s] Σ_{u≠t} (n_u − 1) g_u
/// ρ₁ = max_t     g_t    Σ_{u≠t} Σ_v a_u[v]
/// ```
pub fn rho_certificates(problem: &RatingProblem) -> Result<RhoBounds> {
    require_three_factors(problem)?;
    let ext = SliceExtremes::scan(problem);
    require_positive_exposures(&ext)?;
    let dims = problem.dims();
    let n = dims.len();
    let losses: Vec<Vec<f64>> = (0..n).map(|t| problem.slice_losses(t)).collect();
    let sensitivity: Vec<Vec<f64>> = (0..n)
        .map(|t| {
            let (l, mu, big) = (&losses[t], &ext.min[t], &ext.max[t]);
            (0..dims[t])
                .map(|s| (l[s] / l[0]) * (big[0] * big[s] - mu[0] * mu[s]) / (mu[s] * mu[s]))
                .collect()
        })
        .collect();
    let inverse_sum: Vec<f64> = (0..n)
        .map(|t| {
            let (l, mu, big) = (&losses[t], &ext.min[t], &ext.max[t]);
            let s: f64 = l.iter().zip(big).map(|(l, m)| l / m).sum();
            l[0] / (mu[0] * s)
        })
        .collect();

    let rho_inf_rows: Vec<Vec<f64>> = (0..n)
        .map(|t| {
            let foreign: f64 = (0..n)
                .filter(|&u| u != t)
                .map(|u| (dims[u] - 1) as f64 * inverse_sum[u])
                .sum();
            sensitivity[t].iter().map(|a| a * foreign).collect()
        })
        .collect();
    let rho_1_blocks: Vec<f64> = (0..n)
        .map(|t| {
            let foreign: f64 = (0..n)
                .filter(|&u| u != t)
                .map(|u| sensitivity[u].iter().sum::<f64>())
                .sum();
            inverse_sum[t] * foreign
        })
        .collect();
    let rho_inf = rho_inf_rows.iter().flatten().copied().fold(0.0, f64::max);
    let rho_1 = rho_1_blocks.iter().copied().fold(0.0, f64::max);
    Ok(RhoBounds {
        rho_inf,
        rho_1,
        rho_inf_rows,
        rho_1_blocks,
    })
}

/// Simplified bounds from the global exposure extremes `μ`, `M` only:
///
/// ```text
/// r∞ = M (M² − μ²) / (μ³ L) · max_{t,s} (l_t[s]/l_t[0]) Σ_{u≠t} (n_u − 1) l_u[0]
/// r₁ = M (M² − μ²) / μ³     · max_t Σ_{u≠t} l_t[0] / l_u[0]
/// ```
pub fn r_certificates(problem: &RatingProblem) -> Result<(f64, f64)> {
    require_three_factors(problem)?;
    let ext = SliceExtremes::scan(problem);
    require_positive_exposures(&ext)?;
    let dims = problem.dims();
    let n = dims.len();
    let (mu, big) = (ext.global_min, ext.global_max);
    let spread = big * (big * big - mu * mu) / (mu * mu * mu);
    let total = problem.total_loss();
    let losses: Vec<Vec<f64>> = (0..n).map(|t| problem.slice_losses(t)).collect();

    let mut row_max: f64 = 0.0;
    let mut col_max: f64 = 0.0;
    for t in 0..n {
        let foreign: f64 = (0..n)
            .filter(|&u| u != t)
            .map(|u| (dims[u] - 1) as f64 * losses[u][0])
            .sum();
        for s in 0..dims[t] {
            row_max = row_max.max(losses[t][s] / losses[t][0] * foreign);
        }
        let col: f64 = (0..n)
            .filter(|&u| u != t)
            .map(|u| losses[t][0] / losses[u][0])
            .sum();
        col_max = col_max.max(col);
    }
    Ok((spread / total * row_max, spread * col_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Some bound is below 1: unique fixed point, convergence from any start.
    CertifiedUnique,
    Uncertified,
}

/// All four bounds, the box they were derived on, and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    pub rho_inf: f64,
    pub rho_1: f64,
    pub r_inf: f64,
    pub r_1: f64,
    pub rho: f64,
    pub r: f64,
    pub verdict: Verdict,
    pub bounds: RhoBounds,
    pub domain: BoxU,
}

pub fn certify(problem: &RatingProblem) -> Result<ConvergenceCertificate> {
    require_three_factors(problem)?;
    let domain = compute_box(problem)?;
    let bounds = rho_certificates(problem)?;
    let (r_inf, r_1) = r_certificates(problem)?;
    let rho = bounds.rho_1.min(bounds.rho_inf);
    let r = r_1.min(r_inf);
    let verdict = if rho.min(r) < 1.0 {
        Verdict::CertifiedUnique
    } else {
        Verdict::Uncertified
    };
    Ok(ConvergenceCertificate {
        rho_inf: bounds.rho_inf,
        rho_1: bounds.rho_1,
        r_inf,
        r_1,
        rho,
        r,
        verdict,
        bounds,
        domain,
    })
}

/// Largest sampled operator norms of the reduced Jacobian over `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledNorms {
    pub max_inf: f64,
    pub max_1: f64,
    pub samples: usize,
}

pub fn sample_jacobian_norms<R: Rng + ?Sized>(
    problem: &RatingProblem,
    domain: &BoxU,
    rng: &mut R,
    samples: usize,
) -> Result<SampledNorms> {
    let mut out = SampledNorms {
        max_inf: 0.0,
        max_1: 0.0,
        samples,
    };
    for _ in 0..samples {
        let f = domain.sample(rng);
        let j = jacobian(problem, &f, JacobianConvention::FixedBaseCoordinates)?;
        out.max_inf = out.max_inf.max(matrix_norm(&j, MatrixNorm::Infinity));
        out.max_1 = out.max_1.max(matrix_norm(&j, MatrixNorm::One));
    }
    Ok(out)
}
