//! Self-maps of finite quasi-metric spaces: classification, the shift map
//! on the circle truncation, contracting-pair witnesses and exhaustive
//! plasticity checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spaces::{circle_example, PointId, QuasiMetricSpace, SpaceError};

/// Default bound on the space size for permutation enumeration.
pub const DEFAULT_MAX_ENUMERATION: usize = 8;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("image {image} of point {point} is out of range for a space of size {n}")]
    ImageOutOfRange { point: usize, image: usize, n: usize },
    #[error("map has {images} images but the space has {n} points")]
    LengthMismatch { images: usize, n: usize },
    #[error("domain point {0} is out of range or repeated")]
    BadDomain(usize),
    #[error("shift map needs N >= 3, got {0}")]
    ShiftTooSmall(usize),
    #[error("map is not a bijection of its domain")]
    NotBijective,
    #[error("({x}, {y}) is not an expanding pair: {detail}")]
    InvalidWitness { x: usize, y: usize, detail: String },
    #[error("symmetrized distance changed on ({x}, {y}): {before} -> {after} (allowed drift {bound})")]
    SymmetrizedDistanceChanged { x: usize, y: usize, before: f64, after: f64, bound: f64 },
    #[error("reversed pair ({x}, {y}) does not contract: before {before}, after {after}")]
    ReversedPairNotContracting { x: usize, y: usize, before: f64, after: f64 },
    #[error("space has {n} points, enumeration is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A total map on point indices, examined on `domain` (all points unless
/// restricted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapUnderTest {
    images: Vec<PointId>,
    domain: Vec<PointId>,
}

impl MapUnderTest {
    pub fn new(images: Vec<PointId>, space_len: usize) -> Result<Self, MapError> {
        let domain = (0..images.len()).map(PointId).collect();
        Self::restricted(images, domain, space_len)
    }

    pub fn restricted(images: Vec<PointId>, domain: Vec<PointId>, space_len: usize) -> Result<Self, MapError> {
        if images.len() != space_len {
            return Err(MapError::LengthMismatch { images: images.len(), n: space_len });
        }
        if let Some((point, image)) = images.iter().enumerate().find(|(_, p)| p.0 >= space_len) {
            return Err(MapError::ImageOutOfRange { point, image: image.0, n: space_len });
        }
        let mut seen = vec![false; space_len];
        for p in &domain {
            if p.0 >= space_len || std::mem::replace(&mut seen[p.0], true) {
                return Err(MapError::BadDomain(p.0));
            }
        }
        Ok(MapUnderTest { images, domain })
    }

    pub fn identity(space_len: usize) -> Self {
        let images: Vec<PointId> = (0..space_len).map(PointId).collect();
        MapUnderTest { domain: images.clone(), images }
    }

    #[inline]
    pub fn apply(&self, p: PointId) -> PointId {
        self.images[p.0]
    }

    pub fn images(&self) -> &[PointId] {
        &self.images
    }

    pub fn domain(&self) -> &[PointId] {
        &self.domain
    }

    /// Whether the map permutes its domain.
    pub fn is_bijection(&self) -> bool {
        let mut hit = vec![false; self.images.len()];
        let mut in_domain = vec![false; self.images.len()];
        for p in &self.domain {
            in_domain[p.0] = true;
        }
        for &p in &self.domain {
            let q = self.apply(p);
            if !in_domain[q.0] || std::mem::replace(&mut hit[q.0], true) {
                return false;
            }
        }
        true
    }
}

/// Ordered pair with `before = d(x, y)` and `after = d(F x, F y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: PointId,
    pub y: PointId,
    pub before: f64,
    pub after: f64,
}

impl PairWitness {
    pub fn of(space: &QuasiMetricSpace, map: &MapUnderTest, x: PointId, y: PointId) -> Self {
        PairWitness { x, y, before: space.d(x, y), after: space.d(map.apply(x), map.apply(y)) }
    }

    pub fn is_expanding(&self) -> bool {
        self.after > self.before
    }

    pub fn is_contracting(&self) -> bool {
        self.after < self.before
    }

    /// Whether the stored numbers agree with the space and map.
    pub fn recomputes(&self, space: &QuasiMetricSpace, map: &MapUnderTest) -> bool {
        *self == PairWitness::of(space, map, self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Comparison {
    Exact,
    Tolerance { tol: f64 },
}

impl Comparison {
    pub fn from_tol(tol: f64) -> Self {
        if tol > 0.0 {
            Comparison::Tolerance { tol }
        } else {
            Comparison::Exact
        }
    }

    pub fn tol(self) -> f64 {
        match self {
            Comparison::Exact => 0.0,
            Comparison::Tolerance { tol } => tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapClassification {
    pub comparison: Comparison,
    pub nonexpansive: bool,
    pub noncontractive: bool,
    pub isometry: bool,
    pub is_bijection: bool,
    pub expanding_witness: Option<PairWitness>,
    pub contracting_witness: Option<PairWitness>,
    pub pairs_scanned: u64,
}

fn domain_pairs(map: &MapUnderTest) -> impl Iterator<Item = (PointId, PointId)> + '_ {
    map.domain.iter().flat_map(move |&x| map.domain.iter().map(move |&y| (x, y)))
}

/// Full scan over ordered domain pairs. An expanding witness has
/// `after > before + tol`, a contracting one `after < before - tol`; the
/// first of each in lexicographic pair order is kept. `tol = 0` compares
/// stored values exactly.
pub fn classify_map(space: &QuasiMetricSpace, map: &MapUnderTest, tol: f64) -> MapClassification {
    let comparison = Comparison::from_tol(tol);
    let tol = comparison.tol();
    let mut expanding_witness = None;
    let mut contracting_witness = None;
    let mut pairs_scanned = 0u64;
    for (x, y) in domain_pairs(map) {
        pairs_scanned += 1;
        let w = PairWitness::of(space, map, x, y);
        if expanding_witness.is_none() && w.after > w.before + tol {
            expanding_witness = Some(w);
        }
        if contracting_witness.is_none() && w.after < w.before - tol {
            contracting_witness = Some(w);
        }
    }
    let nonexpansive = expanding_witness.is_none();
    let noncontractive = contracting_witness.is_none();
    MapClassification {
        comparison,
        nonexpansive,
        noncontractive,
        isometry: nonexpansive && noncontractive,
        is_bijection: map.is_bijection(),
        expanding_witness,
        contracting_witness,
        pairs_scanned,
    }
}

/// The circle truncation `p_1..p_{N+2}` and the map `p_n -> p_{n+2}` on the
/// domain `p_1..p_N`; the two extra points map to themselves.
pub fn shift_map(n: usize) -> Result<(QuasiMetricSpace, MapUnderTest), MapError> {
    if n < 3 {
        return Err(MapError::ShiftTooSmall(n));
    }
    let space = circle_example(n + 2)?;
    let images = (0..n + 2).map(|i| PointId(if i < n { i + 2 } else { i })).collect();
    let domain = (0..n).map(PointId).collect();
    let map = MapUnderTest::restricted(images, domain, n + 2)?;
    Ok((space, map))
}

/// First pair (lexicographic) with `d(F x, F y) < d(x, y)`, exact comparison.
pub fn find_contracting_pair(space: &QuasiMetricSpace, map: &MapUnderTest) -> Option<PairWitness> {
    domain_pairs(map).map(|(x, y)| PairWitness::of(space, map, x, y)).find(PairWitness::is_contracting)
}

/// First pair (lexicographic) with `d(F x, F y) > d(x, y)`, exact comparison.
pub fn find_expanding_pair(space: &QuasiMetricSpace, map: &MapUnderTest) -> Option<PairWitness> {
    domain_pairs(map).map(|(x, y)| PairWitness::of(space, map, x, y)).find(PairWitness::is_expanding)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationWitness {
    pub contracting: PairWitness,
    /// `d_s(p, q)` and `d_s(F p, F q)`.
    pub ds_before: f64,
    pub ds_after: f64,
    pub allowed_drift: f64,
}

/// Turns an expanding pair `(p, q)` of a bijection into the contracting
/// pair `(q, p)`.
///
/// If `d_s(F p, F q) = d_s(p, q)` with `d_s = d + d⁻¹`, then
/// `d(F q, F p) = d_s(F p, F q) - d(F p, F q) < d_s(p, q) - d(p, q) = d(q, p)`.
/// The `d_s` equality is checked up to `n² · tol` (`n` = domain size); a
/// larger drift is an error, as is a reversed pair that fails to contract.
pub fn symmetrization_witness(
    space: &QuasiMetricSpace,
    map: &MapUnderTest,
    expanding: &PairWitness,
    tol: f64,
) -> Result<SymmetrizationWitness, MapError> {
    if !map.is_bijection() {
        return Err(MapError::NotBijective);
    }
    let (p, q) = (expanding.x, expanding.y);
    let invalid = |detail: String| MapError::InvalidWitness { x: p.0, y: q.0, detail };
    if !map.domain.contains(&p) || !map.domain.contains(&q) {
        return Err(invalid("pair is outside the map's domain".into()));
    }
    if !expanding.recomputes(space, map) {
        return Err(invalid("recorded distances do not match the space".into()));
    }
    if !expanding.is_expanding() {
        return Err(invalid(format!("after {} is not greater than before {}", expanding.after, expanding.before)));
    }

    let n = map.domain.len() as f64;
    let allowed_drift = n * n * tol;
    let (fp, fq) = (map.apply(p), map.apply(q));
    let ds_before = space.d(p, q) + space.d(q, p);
    let ds_after = space.d(fp, fq) + space.d(fq, fp);
    if (ds_after - ds_before).abs() > allowed_drift {
        return Err(MapError::SymmetrizedDistanceChanged {
            x: p.0,
            y: q.0,
            before: ds_before,
            after: ds_after,
            bound: allowed_drift,
        });
    }
    let reversed = PairWitness::of(space, map, q, p);
    if !reversed.is_contracting() {
        return Err(MapError::ReversedPairNotContracting {
            x: q.0,
            y: p.0,
            before: reversed.before,
            after: reversed.after,
        });
    }
    Ok(SymmetrizationWitness { contracting: reversed, ds_before, ds_after, allowed_drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BijectionClass {
    /// `d(F x, F y) >= d(x, y) - tol` on every pair.
    NonContractive,
    /// `d(F x, F y) <= d(x, y) + tol` on every pair.
    NonExpansive,
}

impl BijectionClass {
    #[inline]
    fn admits(self, after: f64, before: f64, tol: f64) -> bool {
        match self {
            BijectionClass::NonContractive => after >= before - tol,
            BijectionClass::NonExpansive => after <= before + tol,
        }
    }
}

/// Output of a pruned permutation search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub bijections: Vec<Vec<PointId>>,
    pub nodes_visited: u64,
}

/// All permutations of the space in `class`, by depth-first assignment of
/// images to points in ascending order. A partial assignment is abandoned
/// as soon as a pair among assigned points violates the class predicate.
pub fn enumerate_bijections(space: &QuasiMetricSpace, class: BijectionClass, tol: f64) -> Enumeration {
    struct Search<'a> {
        space: &'a QuasiMetricSpace,
        class: BijectionClass,
        tol: f64,
        images: Vec<usize>,
        used: Vec<bool>,
        out: Vec<Vec<PointId>>,
        nodes: u64,
    }

    impl Search<'_> {
        fn extend(&mut self, k: usize) {
            self.nodes += 1;
            let n = self.space.len();
            if k == n {
                self.out.push(self.images.iter().copied().map(PointId).collect());
                return;
            }
            for v in 0..n {
                if self.used[v] || !self.consistent(k, v) {
                    continue;
                }
                self.used[v] = true;
                self.images.push(v);
                self.extend(k + 1);
                self.images.pop();
                self.used[v] = false;
            }
        }

        fn consistent(&self, k: usize, v: usize) -> bool {
            let s = self.space;
            self.images.iter().enumerate().all(|(j, &w)| {
                self.class.admits(s.dist(v, w), s.dist(k, j), self.tol)
                    && self.class.admits(s.dist(w, v), s.dist(j, k), self.tol)
            })
        }
    }

    let n = space.len();
    let mut search =
        Search { space, class, tol, images: Vec::with_capacity(n), used: vec![false; n], out: Vec::new(), nodes: 0 };
    search.extend(0);
    Enumeration { bijections: search.out, nodes_visited: search.nodes }
}

fn is_isometry(space: &QuasiMetricSpace, images: &[PointId], tol: f64) -> bool {
    let n = space.len();
    (0..n).all(|x| (0..n).all(|y| (space.d(images[x], images[y]) - space.dist(x, y)).abs() <= tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub bijections: usize,
    pub isometries: usize,
    pub nodes_visited: u64,
    /// Members of the class that are not isometries.
    pub non_isometries: Vec<Vec<PointId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlasticityVerdict {
    pub n: usize,
    pub comparison: Comparison,
    /// `n!`, the number of permutations covered by each search.
    pub permutations: u64,
    pub noncontractive: ClassStats,
    pub nonexpansive: ClassStats,
    pub all_noncontractive_are_isometries: bool,
    /// The expand-contract plasticity condition on this space.
    pub all_nonexpansive_are_isometries: bool,
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exhaustive check that non-contractive and non-expansive bijections of a
/// small space are isometries.
pub fn plasticity_check_finite(
    space: &QuasiMetricSpace,
    max_n: usize,
    tol: f64,
) -> Result<PlasticityVerdict, MapError> {
    let n = space.len();
    if n > max_n {
        return Err(MapError::TooLarge { n, max: max_n });
    }
    let comparison = Comparison::from_tol(tol);
    let tol = comparison.tol();
    let stats = |class| {
        let found = enumerate_bijections(space, class, tol);
        let non_isometries: Vec<_> = found.bijections.iter().filter(|f| !is_isometry(space, f, tol)).cloned().collect();
        ClassStats {
            bijections: found.bijections.len(),
            isometries: found.bijections.len() - non_isometries.len(),
            nodes_visited: found.nodes_visited,
            non_isometries,
        }
    };
    let noncontractive = stats(BijectionClass::NonContractive);
    let nonexpansive = stats(BijectionClass::NonExpansive);
    Ok(PlasticityVerdict {
        n,
        comparison,
        permutations: factorial(n),
        all_noncontractive_are_isometries: noncontractive.non_isometries.is_empty(),
        all_nonexpansive_are_isometries: nonexpansive.non_isometries.is_empty(),
        noncontractive,
        nonexpansive,
    })
}
