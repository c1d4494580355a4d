//! Vector norms and the induced 1- and ∞-operator norms.

use crate::linalg::Matrix;

/// Vector norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Norm {
    One,
    Two,
    #[default]
    Infinity,
}

/// Operator norms with a closed form: max column sum and max row sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixNorm {
    One,
    Infinity,
}

pub fn vector_norm(v: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::One => v.iter().map(|x| x.abs()).sum(),
        Norm::Two => libm::sqrt(v.iter().map(|x| x * x).sum()),
        Norm::Infinity => v.iter().fold(0.0, |acc, x| acc.max(x.abs())),
    }
}

/// `One` is the maximum absolute column sum, `Infinity` the maximum absolute
/// row sum. An empty matrix has norm 0.
pub fn matrix_norm(m: &Matrix, norm: MatrixNorm) -> f64 {
    match norm {
        MatrixNorm::Infinity => (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        MatrixNorm::One => (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| m.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}
