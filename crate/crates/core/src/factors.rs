use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::norms::{vector_norm, Norm};

/// Relativities for every rating factor, one block per axis.
///
/// The concatenation of the blocks is the state vector the re-rating map acts
/// on. Every entry is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorState {
    blocks: Vec<Vec<f64>>,
}

impl FactorState {
    pub fn new(blocks: Vec<Vec<f64>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::TooFewFactors(blocks.len()));
        }
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::EmptyAxis { axis: b });
            }
            if let Some((index, &value)) = block
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::NonPositiveFactor {
                    block: b,
                    index,
                    value,
                });
            }
        }
        Ok(Self { blocks })
    }

    /// The neutral state: every relativity equal to 1.
    pub fn ones(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&d| vec![1.0; d]).collect(),
        }
    }

    /// Splits a concatenated vector into blocks of the given lengths.
    pub fn from_flat(dims: &[usize], flat: &[f64]) -> Result<Self> {
        if dims.iter().sum::<usize>() != flat.len() {
            return Err(Error::FactorShape("flat length differs from sum of dims"));
        }
        let mut blocks = Vec::with_capacity(dims.len());
        let mut start = 0;
        for &d in dims {
            blocks.push(flat[start..start + d].to_vec());
            start += d;
        }
        Self::new(blocks)
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<Vec<f64>>) -> Self {
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn block(&self, t: usize) -> &[f64] {
        &self.blocks[t]
    }

    pub fn into_blocks(self) -> Vec<Vec<f64>> {
        self.blocks
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn factor_count(&self) -> usize {
        self.blocks.len()
    }

    /// Total number of coordinates (m + n + p + ...).
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Start offset of each block inside the concatenated vector.
    pub fn offsets(&self) -> Vec<usize> {
        block_offsets(&self.dims())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Multiplies one block by `c`.
    pub fn scale_block(&self, t: usize, c: f64) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        for v in &mut blocks[t] {
            *v *= c;
        }
        Self::new(blocks)
    }

    /// Product of the relativities selected by `idx`, skipping `skip` axes.
    pub(crate) fn product_except(&self, idx: &[usize], skip: &[usize]) -> f64 {
        let mut p = 1.0;
        for (t, &i) in idx.iter().enumerate() {
            if !skip.contains(&t) {
                p *= self.blocks[t][i];
            }
        }
        p
    }

    pub fn distance(&self, other: &Self, norm: Norm) -> f64 {
        let diff: Vec<f64> = self
            .blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| a - b)
            .collect();
        vector_norm(&diff, norm)
    }
}

pub(crate) fn block_offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        out.push(acc);
        acc += d;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(
            FactorState::new(vec![vec![1.0, 0.0], vec![1.0]]),
            Err(Error::NonPositiveFactor {
                block: 0,
                index: 1,
                ..
            })
        ));
        assert!(FactorState::new(vec![vec![1.0]]).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let f = FactorState::new(vec![vec![1.0, 2.0], vec![3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(f.offsets(), vec![0, 2, 3]);
        let flat = f.to_flat();
        assert_eq!(FactorState::from_flat(&f.dims(), &flat).unwrap(), f);
    }
}
