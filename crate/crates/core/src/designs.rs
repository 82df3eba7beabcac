//! Symmetric 2-design parameters and incidence checks.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{exact_sqrt, BitMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("v = {0} is too small (need v >= 2)")]
    TooFewPoints(i64),
    #[error("ordering 0 <= lambda < k < v fails for ({v}, {k}, {lambda})")]
    Ordering { v: i64, k: i64, lambda: i64 },
    #[error("k(k-1) = {lhs} but lambda(v-1) = {rhs}")]
    Balance { lhs: i64, rhs: i64 },
    #[error("incidence matrix is {rows}x{cols}, expected {v}x{v}")]
    Dimension { rows: usize, cols: usize, v: u64 },
}

/// A parameter triple `(v, k, λ)` of a symmetric 2-design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DesignParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    /// `√(k−λ)` when it is an integer.
    pub s: Option<u64>,
    pub degenerate: bool,
}

impl DesignParams {
    /// Order `n = k − λ`.
    pub fn order(&self) -> u64 {
        self.k - self.lambda
    }

    pub fn v_i(&self) -> i64 {
        self.v as i64
    }

    pub fn k_i(&self) -> i64 {
        self.k as i64
    }

    pub fn lambda_i(&self) -> i64 {
        self.lambda as i64
    }

    pub fn s_i(&self) -> Option<i64> {
        self.s.map(|s| s as i64)
    }
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.v, self.k, self.lambda)
    }
}

pub fn validate_params(v: i64, k: i64, lambda: i64) -> Result<DesignParams, DesignError> {
    if v < 2 {
        return Err(DesignError::TooFewPoints(v));
    }
    if !(0 <= lambda && lambda < k && k < v) {
        return Err(DesignError::Ordering { v, k, lambda });
    }
    let (lhs, rhs) = (k * (k - 1), lambda * (v - 1));
    if lhs != rhs {
        return Err(DesignError::Balance { lhs, rhs });
    }
    debug_assert_eq!(k * (v - k), (k - lambda) * (v - 1));
    Ok(DesignParams {
        v: v as u64,
        k: k as u64,
        lambda: lambda as u64,
        s: exact_sqrt((k - lambda) as u64),
        degenerate: k == 1 || k == v - 1,
    })
}

/// Parameters of the complementary design `(v, v−k, v−2k+λ)`.
pub fn complement_params(p: &DesignParams) -> DesignParams {
    let (v, k, l) = (p.v_i(), p.k_i(), p.lambda_i());
    validate_params(v, v - k, v - 2 * k + l).expect("complement of a valid design is valid")
}

/// Checks `BᵀB = BBᵀ = (k−λ)I + λJ`.
pub fn is_design_incidence(b: &BitMatrix, p: &DesignParams) -> Result<bool, DesignError> {
    let v = p.v as usize;
    if b.rows() != v || b.cols() != v {
        return Err(DesignError::Dimension {
            rows: b.rows(),
            cols: b.cols(),
            v: p.v,
        });
    }
    Ok(first_gram_defect(b, p).is_none() && first_gram_defect(&b.transpose(), p).is_none())
}

/// First `(i, j)` where `BBᵀ` departs from `(k−λ)I + λJ`.
pub fn first_gram_defect(b: &BitMatrix, p: &DesignParams) -> Option<(usize, usize)> {
    let v = b.rows();
    for i in 0..v {
        for j in i..v {
            let want = if i == j { p.k } else { p.lambda };
            if b.and_count(i, b, j) as u64 != want {
                return Some((i, j));
            }
        }
    }
    None
}
