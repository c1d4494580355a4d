//! Dense row-major arrays over the risk space.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Visits every multi-index of `dims` in row-major order together with its
/// flat offset. The last axis varies fastest.
pub fn for_each_index<F>(dims: &[usize], mut visit: F)
where
    F: FnMut(&[usize], usize),
{
    if dims.is_empty() || dims.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    let mut flat = 0usize;
    loop {
        visit(&idx, flat);
        flat += 1;
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        out[axis] = out[axis + 1] * dims[axis + 1];
    }
    out
}

/// A dense non-negative array with one named axis per rating factor.
///
/// Used both for losses `l` and exposures `e`, and for assembled rate tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
    axis_names: Vec<String>,
}

impl RiskTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>, axis_names: Vec<String>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::TooFewFactors(dims.len()));
        }
        if let Some(axis) = dims.iter().position(|&d| d == 0) {
            return Err(Error::EmptyAxis { axis });
        }
        let expected: usize = dims.iter().product();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                dims,
                expected,
                actual: values.len(),
            });
        }
        if axis_names.len() != dims.len() {
            return Err(Error::AxisNames {
                what: "risk tensor",
                expected: dims.len(),
                actual: axis_names.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        Ok(Self {
            dims,
            values,
            axis_names,
        })
    }

    /// Builds a tensor with axes named `factor0`, `factor1`, ...
    pub fn with_default_names(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let names = default_axis_names(dims.len());
        Self::new(dims, values, names)
    }

    pub fn filled(dims: Vec<usize>, value: f64) -> Result<Self> {
        let len = dims.iter().product();
        Self::with_default_names(dims, vec![value; len])
    }

    /// Evaluates `f` at every multi-index, row-major.
    pub fn from_fn<F>(dims: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        let mut values = Vec::with_capacity(dims.iter().product());
        for_each_index(&dims, |idx, _| values.push(f(idx)));
        Self::with_default_names(dims, values)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn axis_names(&self) -> &[String] {
        &self.axis_names
    }

    /// Number of axes, i.e. rating factors.
    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.dims.len() {
            return None;
        }
        let mut flat = 0usize;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            if i >= d {
                return None;
            }
            flat = flat * d + i;
        }
        Some(flat)
    }

    pub fn get(&self, idx: &[usize]) -> Option<f64> {
        self.offset(idx).map(|o| self.values[o])
    }

    /// Sum of all entries, accumulated in row-major order.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sums over every slice of `axis`: entry `s` is the sum of all cells whose
    /// index along `axis` equals `s`.
    pub fn slice_sums(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[axis]];
        for_each_index(&self.dims, |idx, flat| out[idx[axis]] += self.values[flat]);
        out
    }

    pub fn rename_axes(mut self, axis_names: Vec<String>) -> Result<Self> {
        if axis_names.len() != self.dims.len() {
            return Err(Error::AxisNames {
                what: "rename",
                expected: self.dims.len(),
                actual: axis_names.len(),
            });
        }
        self.axis_names = axis_names;
        Ok(self)
    }
}

pub fn default_axis_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("factor{i}")).collect()
}
