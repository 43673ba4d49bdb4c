//! Left and right K-Cauchy checks on finite sequence prefixes.
//!
//! Sequence positions are one-based throughout this module: position `k`
//! refers to `x_k`, matching the usual indexing of sequences by ℕ.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spaces::{conjugate, PointId, QuasiMetricSpace};

#[derive(Debug, Error, PartialEq)]
pub enum SequenceError {
    #[error("point {0} is out of range for a space of size {1}")]
    PointOutOfRange(usize, usize),
    #[error("start position {start} is outside 1..={len}")]
    BadStart { start: usize, len: usize },
    #[error("position {0} is outside the prefix")]
    PositionOutOfRange(usize),
    #[error("positions must be strictly increasing (at {0})")]
    NotIncreasing(usize),
    #[error("min_len must be at least 2")]
    MinLenTooSmall,
}

/// A finite prefix `x_1, ..., x_len` of a sequence in `space`.
#[derive(Debug, Clone)]
pub struct SequencePrefix<'a> {
    space: &'a QuasiMetricSpace,
    points: Vec<PointId>,
}

impl<'a> SequencePrefix<'a> {
    pub fn new(space: &'a QuasiMetricSpace, points: Vec<PointId>) -> Result<Self, SequenceError> {
        if let Some(p) = points.iter().find(|p| p.0 >= space.len()) {
            return Err(SequenceError::PointOutOfRange(p.0, space.len()));
        }
        Ok(SequencePrefix { space, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn space(&self) -> &QuasiMetricSpace {
        self.space
    }

    /// `d(x_a, x_b)` for one-based positions.
    fn d(&self, a: usize, b: usize) -> f64 {
        self.space.d(self.points[a - 1], self.points[b - 1])
    }

    /// The same positions read in another space over the same point set.
    pub fn reinterpret<'b>(&self, space: &'b QuasiMetricSpace) -> Result<SequencePrefix<'b>, SequenceError> {
        SequencePrefix::new(space, self.points.clone())
    }
}

/// A pair of positions `n <= m` with `d(x_n, x_m) >= eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionPair {
    pub n: usize,
    pub m: usize,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyCheck {
    pub holds: bool,
    pub first_violation: Option<PositionPair>,
}

/// Whether `d(x_n, x_m) < eps` for all `m >= n >= start` inside the prefix.
pub fn is_left_k_cauchy_at(prefix: &SequencePrefix<'_>, eps: f64, start: usize) -> Result<CauchyCheck, SequenceError> {
    let len = prefix.len();
    if start < 1 || start > len {
        return Err(SequenceError::BadStart { start, len });
    }
    for n in start..=len {
        for m in n..=len {
            let dist = prefix.d(n, m);
            if !(dist < eps) {
                return Ok(CauchyCheck { holds: false, first_violation: Some(PositionPair { n, m, dist }) });
            }
        }
    }
    Ok(CauchyCheck { holds: true, first_violation: None })
}

/// Right variant (`d(x_m, x_n) < eps`), evaluated as the left check in the
/// conjugate space. Violating pairs are reported in conjugate terms.
pub fn is_right_k_cauchy_at(prefix: &SequencePrefix<'_>, eps: f64, start: usize) -> Result<CauchyCheck, SequenceError> {
    let conj = conjugate(prefix.space());
    is_left_k_cauchy_at(&prefix.reinterpret(&conj)?, eps, start)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Extraction {
    Found {
        positions: Vec<usize>,
    },
    /// The greedy search found no chain; this is not a proof that none exists.
    NotFound,
}

impl Extraction {
    pub fn positions(&self) -> Option<&[usize]> {
        match self {
            Extraction::Found { positions } => Some(positions),
            Extraction::NotFound => None,
        }
    }
}

/// Greedy anchor-and-filter search for positions `i_1 < ... < i_k`,
/// `k >= min_len`, with `d(x_{i_a}, x_{i_b}) < eps` for all `a <= b`.
///
/// Anchors are tried in order; from each anchor the chain keeps every later
/// position whose forward distance from all kept points is below `eps`.
/// The first chain that reaches `min_len` is returned in full.
pub fn extract_left_k_cauchy(
    prefix: &SequencePrefix<'_>,
    eps: f64,
    min_len: usize,
) -> Result<Extraction, SequenceError> {
    if min_len < 2 {
        return Err(SequenceError::MinLenTooSmall);
    }
    let len = prefix.len();
    for anchor in 1..=len {
        if len - anchor + 1 < min_len {
            break;
        }
        if !(prefix.d(anchor, anchor) < eps) {
            continue;
        }
        let mut chain = vec![anchor];
        for next in anchor + 1..=len {
            if prefix.d(next, next) < eps && chain.iter().all(|&kept| prefix.d(kept, next) < eps) {
                chain.push(next);
            }
        }
        if chain.len() >= min_len {
            return Ok(Extraction::Found { positions: chain });
        }
    }
    Ok(Extraction::NotFound)
}

/// Exhaustive check of `d(x_{i_a}, x_{i_b}) < eps` over all `a <= b`.
pub fn certify_subsequence(
    prefix: &SequencePrefix<'_>,
    positions: &[usize],
    eps: f64,
) -> Result<CauchyCheck, SequenceError> {
    for (k, &i) in positions.iter().enumerate() {
        if i < 1 || i > prefix.len() {
            return Err(SequenceError::PositionOutOfRange(i));
        }
        if k > 0 && positions[k - 1] >= i {
            return Err(SequenceError::NotIncreasing(i));
        }
    }
    for (a, &n) in positions.iter().enumerate() {
        for &m in &positions[a..] {
            let dist = prefix.d(n, m);
            if !(dist < eps) {
                return Ok(CauchyCheck { holds: false, first_violation: Some(PositionPair { n, m, dist }) });
            }
        }
    }
    Ok(CauchyCheck { holds: true, first_violation: None })
}
