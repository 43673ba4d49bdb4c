//! Finite quasi-metric spaces.
//!
//! A space is a list of labelled points together with a dense distance
//! matrix whose row `i` holds the distances *from* point `i`. Distances are
//! not required to be symmetric. Generated spaces (such as the circle
//! family) are memoized into the matrix at construction time, so every
//! downstream algorithm works on plain pair and triple scans.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verify::{self, ViolationReport};

/// Default additive tolerance for triangle-inequality comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Zero-based index of a point inside a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("invalid distance d({from}, {to}) = {value}: entries must be finite and nonnegative")]
    InvalidEntry { from: usize, to: usize, value: f64 },
    #[error("label count {labels} does not match space size {n}")]
    LabelMismatch { labels: usize, n: usize },
    #[error("declared size n = {declared} but the matrix has {actual} rows")]
    SizeMismatch { declared: usize, actual: usize },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("quasi-metric axioms fail: {} violation(s)", .0.total_violations)]
    Validation(Box<ViolationReport>),
    #[error("circle example needs at least one point")]
    EmptyCircle,
    #[error("subspace selection is empty")]
    EmptySelection,
    #[error("point {0} is out of range for a space of size {1}")]
    OutOfRange(usize, usize),
    #[error("point {0} is selected more than once")]
    DuplicatePoint(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed space file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Dense `n × n` matrix of forward distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows, rejecting ragged input and entries that
    /// are negative, NaN or infinite. Axioms are not checked here.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::NotSquare { row: i, len: row.len(), n });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(SpaceError::InvalidEntry { from: i, to: j, value });
                }
            }
            entries.extend(row);
        }
        Ok(DistanceMatrix { n, entries })
    }

    /// Fills the matrix from a pair rule `(i, j) -> d(p_i, p_j)`.
    pub fn from_fn(n: usize, mut rule: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(rule(i, j));
            }
        }
        DistanceMatrix { n, entries }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row `i`: distances from point `i` to every point.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        DistanceMatrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Where a space came from. Derived spaces (conjugates, subspaces, ...)
/// are reported as explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Origin {
    Explicit,
    /// Truncation `p_1..p_size` of the circle counterexample.
    Circle {
        size: usize,
    },
}

/// A finite quasi-metric space. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMetricSpace {
    labels: Vec<String>,
    matrix: DistanceMatrix,
    origin: Origin,
    validated: bool,
}

impl QuasiMetricSpace {
    /// Wraps a matrix without checking the axioms. Labels default to
    /// `p_1..p_n`.
    pub fn unchecked(matrix: DistanceMatrix) -> Self {
        let labels = default_labels(matrix.len());
        QuasiMetricSpace { labels, matrix, origin: Origin::Explicit, validated: false }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SpaceError> {
        if labels.len() != self.len() {
            return Err(SpaceError::LabelMismatch { labels: labels.len(), n: self.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Runs the full axiom scan and marks the space validated if it passes.
    pub fn validate(mut self, tol: f64) -> Result<Self, SpaceError> {
        if !(tol > 0.0) {
            return Err(SpaceError::BadTolerance(tol));
        }
        let report = verify::check_axioms(&self, tol);
        if !report.passed() {
            return Err(SpaceError::Validation(Box::new(report)));
        }
        self.validated = true;
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    /// `d(x, y)`, the forward distance from `x` to `y`.
    #[inline]
    pub fn d(&self, x: PointId, y: PointId) -> f64 {
        self.matrix.get(x.0, y.0)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.0]
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    pub fn check_point(&self, p: PointId) -> Result<(), SpaceError> {
        if p.0 < self.len() {
            Ok(())
        } else {
            Err(SpaceError::OutOfRange(p.0, self.len()))
        }
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile { n: self.len(), labels: self.labels.clone(), d: self.matrix.rows() }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), SpaceError> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Reads a space file. When `validate` is set the axioms are checked at
    /// `tol` and a failing file is rejected with its violation report.
    pub fn read_json(path: impl AsRef<Path>, validate: bool, tol: f64) -> Result<Self, SpaceError> {
        let text = std::fs::read_to_string(path)?;
        let file: SpaceFile = serde_json::from_str(&text)?;
        file.into_space(validate, tol)
    }
}

/// On-disk representation: `{ "n": .., "labels": [..], "d": [[..]..] }`,
/// row `i` holding the distances from point `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    pub d: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn into_space(self, validate: bool, tol: f64) -> Result<QuasiMetricSpace, SpaceError> {
        if self.d.len() != self.n {
            return Err(SpaceError::SizeMismatch { declared: self.n, actual: self.d.len() });
        }
        let matrix = DistanceMatrix::from_rows(self.d)?;
        let mut space = QuasiMetricSpace::unchecked(matrix);
        if !self.labels.is_empty() {
            space = space.with_labels(self.labels)?;
        }
        if validate {
            space = space.validate(tol)?;
        }
        Ok(space)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("p_{k}")).collect()
}

/// Builds a space from an explicit matrix, optionally validating it.
pub fn make_explicit(matrix: DistanceMatrix, validate: bool, tol: f64) -> Result<QuasiMetricSpace, SpaceError> {
    if !(tol > 0.0) {
        return Err(SpaceError::BadTolerance(tol));
    }
    let space = QuasiMetricSpace::unchecked(matrix);
    if validate {
        space.validate(tol)
    } else {
        Ok(space)
    }
}

/// Parity class of a circle point `p_n`: even for `n ∈ 2ℕ`, odd for `n ∈ 2ℕ-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// The one-based circle index `n` of a point (`p_n = e^{in}`).
#[inline]
pub fn circle_index(p: PointId) -> usize {
    p.0 + 1
}

/// Chord length `|e^{ia} - e^{ib}| = 2|sin((a - b)/2)|`. Depends only on
/// the integer difference, so shifting both arguments gives bit-identical
/// results.
#[inline]
pub fn chord(a: usize, b: usize) -> f64 {
    let diff = a as i64 - b as i64;
    2.0 * (diff as f64 / 2.0).sin().abs()
}

/// Distance rule of the circle counterexample on one-based indices.
///
/// * same parity and `m >= n`: the chord `|e^{in} - e^{im}|`
/// * `n = 1` and `m` even: 2
/// * otherwise: 3
pub fn circle_distance(n: usize, m: usize) -> f64 {
    if n == m {
        0.0
    } else if n % 2 == m % 2 && m >= n {
        chord(m, n)
    } else if n == 1 && m.is_multiple_of(2) {
        2.0
    } else {
        3.0
    }
}

/// Truncation `p_1..p_size` of the circle counterexample, memoized.
pub fn circle_example(size: usize) -> Result<QuasiMetricSpace, SpaceError> {
    if size == 0 {
        return Err(SpaceError::EmptyCircle);
    }
    let matrix = DistanceMatrix::from_fn(size, |i, j| circle_distance(i + 1, j + 1));
    Ok(QuasiMetricSpace {
        labels: default_labels(size),
        matrix,
        origin: Origin::Circle { size },
        // the axiom scan for this family is part of the test suite
        validated: true,
    })
}

/// The conjugate space `d⁻¹(x, y) = d(y, x)`.
pub fn conjugate(space: &QuasiMetricSpace) -> QuasiMetricSpace {
    QuasiMetricSpace {
        labels: space.labels.clone(),
        matrix: space.matrix.transpose(),
        origin: Origin::Explicit,
        validated: space.validated,
    }
}

/// The symmetrization `d_s(x, y) = d(x, y) + d(y, x)`, a metric.
pub fn symmetrize(space: &QuasiMetricSpace) -> QuasiMetricSpace {
    let m = &space.matrix;
    QuasiMetricSpace {
        labels: space.labels.clone(),
        matrix: DistanceMatrix::from_fn(m.len(), |i, j| m.get(i, j) + m.get(j, i)),
        origin: Origin::Explicit,
        validated: space.validated,
    }
}

/// Induced subspace on `keep`, in the given order.
pub fn subspace(space: &QuasiMetricSpace, keep: &[PointId]) -> Result<QuasiMetricSpace, SpaceError> {
    if keep.is_empty() {
        return Err(SpaceError::EmptySelection);
    }
    let mut seen = vec![false; space.len()];
    for &p in keep {
        space.check_point(p)?;
        if std::mem::replace(&mut seen[p.0], true) {
            return Err(SpaceError::DuplicatePoint(p.0));
        }
    }
    let matrix = DistanceMatrix::from_fn(keep.len(), |a, b| space.d(keep[a], keep[b]));
    Ok(QuasiMetricSpace {
        labels: keep.iter().map(|&p| space.labels[p.0].clone()).collect(),
        matrix,
        origin: Origin::Explicit,
        validated: space.validated,
    })
}

/// The forward ball `B(center, eps) = { y : d(center, y) < eps }`, in
/// ascending point order. The boundary is excluded exactly.
pub fn ball(space: &QuasiMetricSpace, center: PointId, eps: f64) -> Vec<PointId> {
    space.matrix.row(center.0).iter().enumerate().filter(|(_, &d)| d < eps).map(|(j, _)| PointId(j)).collect()
}
