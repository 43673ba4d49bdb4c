//! Random finite quasi-metric spaces and the exhaustive hunts run on them.
//!
//! Every generated space `i` of a configuration draws from its own ChaCha
//! stream (`seed`, stream `i`), so results do not depend on the order in
//! which spaces are processed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{
    classify_map, factorial, find_contracting_pair, find_expanding_pair, plasticity_check_finite, MapClassification,
    MapError, MapUnderTest, PairWitness,
};
use crate::spaces::{DistanceMatrix, PointId, QuasiMetricSpace, SpaceError, SpaceFile};
use crate::verify::check_axioms;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("cannot parse value mode {0:?}: expected int:K, real:K or mixed:K")]
    BadValueMode(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// How off-diagonal entries are drawn before the triangle repair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ValueMode {
    /// Integers uniform in `1..=k`.
    IntGrid { k: u32 },
    /// Reals uniform in `(0, k]`.
    UniformReal { k: f64 },
    /// Integer grid for even space indices, reals for odd ones.
    Mixed { k: u32 },
}

impl ValueMode {
    fn for_index(self, index: usize) -> ValueMode {
        match self {
            ValueMode::Mixed { k } if index.is_multiple_of(2) => ValueMode::IntGrid { k },
            ValueMode::Mixed { k } => ValueMode::UniformReal { k: k as f64 },
            other => other,
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, ValueMode::IntGrid { .. })
    }
}

impl FromStr for ValueMode {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SearchError::BadValueMode(s.to_string());
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "int" => Ok(ValueMode::IntGrid { k: k.parse().map_err(|_| bad())? }),
            "mixed" => Ok(ValueMode::Mixed { k: k.parse().map_err(|_| bad())? }),
            "real" => Ok(ValueMode::UniformReal { k: k.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ValueMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueMode::IntGrid { k } => write!(f, "int:{k}"),
            ValueMode::UniformReal { k } => write!(f, "real:{k}"),
            ValueMode::Mixed { k } => write!(f, "mixed:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Space sizes are drawn uniformly from `n_min..=n_max`.
    pub n_min: usize,
    pub n_max: usize,
    pub values: ValueMode,
    pub seed: u64,
    pub count: usize,
}

impl GeneratorConfig {
    pub fn new(n_min: usize, n_max: usize, values: ValueMode, seed: u64, count: usize) -> Self {
        GeneratorConfig { n_min, n_max, values, seed, count }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n_min < 2 {
            return Err(SearchError::InvalidConfig(format!("n must be at least 2, got {}", self.n_min)));
        }
        if self.n_min > self.n_max {
            return Err(SearchError::InvalidConfig(format!("empty size range {}..={}", self.n_min, self.n_max)));
        }
        let k_ok = match self.values {
            ValueMode::IntGrid { k } | ValueMode::Mixed { k } => k >= 1,
            ValueMode::UniformReal { k } => k.is_finite() && k >= 1.0,
        };
        if !k_ok {
            return Err(SearchError::InvalidConfig(format!("value bound must be at least 1 ({})", self.values)));
        }
        Ok(())
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSpace {
    pub index: usize,
    pub values: ValueMode,
    pub space: QuasiMetricSpace,
}

/// Shortest-path relaxation to a fixpoint: afterwards
/// `d(i, j) <= d(i, k) + d(k, j)` holds for the stored floats exactly.
#[allow(clippy::needless_range_loop)]
pub fn relax_to_quasi_metric(rows: &mut [Vec<f64>]) {
    let n = rows.len();
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = rows[i][k];
                for j in 0..n {
                    let via = dik + rows[k][j];
                    if via < rows[i][j] {
                        rows[i][j] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn draw_space(n: usize, values: ValueMode, rng: &mut impl Rng) -> QuasiMetricSpace {
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            if i != j {
                *entry = match values {
                    ValueMode::IntGrid { k } => rng.gen_range(1..=k) as f64,
                    // 1 - u with u in [0, 1) lies in (0, 1]
                    ValueMode::UniformReal { k } => k * (1.0 - rng.gen::<f64>()),
                    ValueMode::Mixed { .. } => unreachable!("resolved per index"),
                };
            }
        }
    }
    relax_to_quasi_metric(&mut rows);
    debug_assert!((0..n).all(|i| (0..n).all(|j| i == j || rows[i][j] > 0.0)));
    let labels = (0..n).map(|i| format!("x_{i}")).collect();
    QuasiMetricSpace::unchecked(DistanceMatrix::from_rows(rows).expect("square, finite, nonnegative"))
        .with_labels(labels)
        .expect("one label per point")
        .validate(1e-9)
        .expect("relaxation fixpoint satisfies the axioms")
}

/// Space number `index` of the configuration.
pub fn random_quasi_metric(config: &GeneratorConfig, index: usize) -> Result<GeneratedSpace, SearchError> {
    config.validate()?;
    let mut rng = config.rng(index);
    Ok(generate_with(config, index, &mut rng))
}

fn generate_with(config: &GeneratorConfig, index: usize, rng: &mut ChaCha8Rng) -> GeneratedSpace {
    let n = rng.gen_range(config.n_min..=config.n_max);
    let values = config.values.for_index(index);
    GeneratedSpace { index, values, space: draw_space(n, values, rng) }
}

pub fn generate_spaces(config: &GeneratorConfig) -> Result<Vec<GeneratedSpace>, SearchError> {
    config.validate()?;
    Ok((0..config.count).map(|i| generate_with(config, i, &mut config.rng(i))).collect())
}

/// Fraction of unordered pairs `{x, y}` with `d(x, y) != d(y, x)`.
pub fn asymmetric_fraction(space: &QuasiMetricSpace) -> f64 {
    let n = space.len();
    let total = n * n.saturating_sub(1) / 2;
    if total == 0 {
        return 0.0;
    }
    let asym = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| space.dist(i, j) != space.dist(j, i))
        .count();
    asym as f64 / total as f64
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// A space and a map, stored in full for independent replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapInstance {
    pub source: String,
    pub space: SpaceFile,
    pub images: Vec<PointId>,
}

impl MapInstance {
    fn new(source: String, space: &QuasiMetricSpace, images: Vec<PointId>) -> Self {
        MapInstance { source, space: space.to_file(), images }
    }

    /// Rebuilds the space and map and classifies the map again.
    pub fn replay(&self, tol: f64) -> Result<MapClassification, SearchError> {
        let space = self.space.clone().into_space(false, 1e-9)?;
        let map = MapUnderTest::new(self.images.clone(), space.len())?;
        Ok(classify_map(&space, &map, tol))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedSpace {
    pub source: String,
    pub total_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntReport {
    pub config: GeneratorConfig,
    pub max_n_exhaustive: usize,
    pub tol: f64,
    pub spaces_tested: usize,
    /// Spaces larger than `max_n_exhaustive`, not enumerated.
    pub spaces_skipped: usize,
    /// Sum of `n!` over tested spaces; each permutation is either reached
    /// or pruned by both searches.
    pub bijections_enumerated: u64,
    pub noncontractive_bijections: u64,
    pub nonexpansive_bijections: u64,
    pub search_nodes: u64,
    pub noncontractive_nonisometries: Vec<MapInstance>,
    pub nonexpansive_nonisometries: Vec<MapInstance>,
    /// Inputs that failed the axiom gate.
    pub excluded: Vec<ExcludedSpace>,
    pub mean_asymmetric_fraction: f64,
    pub notes: String,
    pub timing: Timing,
}

impl HuntReport {
    pub fn found_counterexample(&self) -> bool {
        !self.noncontractive_nonisometries.is_empty() || !self.nonexpansive_nonisometries.is_empty()
    }
}

const GENERATOR_NOTE: &str = "spaces are random matrices repaired by shortest-path relaxation, which biases \
toward path quasi-metrics; results on finite spaces are evidence only and say nothing about infinite spaces";

/// Runs the exhaustive plasticity check on every generated space plus any
/// injected ones. Inputs failing the axiom scan at `tol` are excluded and
/// listed separately.
pub fn counterexample_hunt(
    config: &GeneratorConfig,
    max_n_exhaustive: usize,
    injected: &[(String, QuasiMetricSpace)],
    tol: f64,
) -> Result<HuntReport, SearchError> {
    config.validate()?;
    let started = Instant::now();
    let mut report = HuntReport {
        config: config.clone(),
        max_n_exhaustive,
        tol,
        spaces_tested: 0,
        spaces_skipped: 0,
        bijections_enumerated: 0,
        noncontractive_bijections: 0,
        nonexpansive_bijections: 0,
        search_nodes: 0,
        noncontractive_nonisometries: Vec::new(),
        nonexpansive_nonisometries: Vec::new(),
        excluded: Vec::new(),
        mean_asymmetric_fraction: 0.0,
        notes: GENERATOR_NOTE.to_string(),
        timing: Timing::default(),
    };

    let generated = generate_spaces(config)?
        .into_iter()
        .map(|g| (format!("generated #{} ({}, seed {})", g.index, g.values, config.seed), g.space));
    let mut asym_sum = 0.0;
    for (source, space) in generated.chain(injected.iter().cloned()) {
        let axioms = check_axioms(&space, tol.max(1e-9));
        if !axioms.passed() {
            report.excluded.push(ExcludedSpace { source, total_violations: axioms.total_violations });
            continue;
        }
        if space.len() > max_n_exhaustive {
            report.spaces_skipped += 1;
            continue;
        }
        let verdict = plasticity_check_finite(&space, max_n_exhaustive, tol)?;
        report.spaces_tested += 1;
        report.bijections_enumerated += factorial(space.len());
        report.noncontractive_bijections += verdict.noncontractive.bijections as u64;
        report.nonexpansive_bijections += verdict.nonexpansive.bijections as u64;
        report.search_nodes += verdict.noncontractive.nodes_visited + verdict.nonexpansive.nodes_visited;
        asym_sum += asymmetric_fraction(&space);
        for f in verdict.noncontractive.non_isometries {
            report.noncontractive_nonisometries.push(MapInstance::new(source.clone(), &space, f));
        }
        for f in verdict.nonexpansive.non_isometries {
            report.nonexpansive_nonisometries.push(MapInstance::new(source.clone(), &space, f));
        }
    }
    if report.spaces_tested > 0 {
        report.mean_asymmetric_fraction = asym_sum / report.spaces_tested as f64;
    }
    report.timing.elapsed_ms = started.elapsed().as_millis();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDistribution {
    /// Each image uniform over all points; maps need not be bijective.
    #[default]
    Uniform,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressOptions {
    pub maps_per_space: usize,
    pub distribution: MapDistribution,
    /// Spaces with at most this many points also get all `n^n` maps.
    pub exhaustive_max_n: usize,
}

impl Default for StressOptions {
    fn default() -> Self {
        StressOptions { maps_per_space: 10, distribution: MapDistribution::Uniform, exhaustive_max_n: 3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StressTally {
    pub maps: u64,
    pub with_expanding_pair: u64,
    pub confirmations: u64,
}

impl StressTally {
    fn record(
        &mut self,
        space: &QuasiMetricSpace,
        map: &MapUnderTest,
        source: impl FnOnce() -> String,
        refutations: &mut Vec<Refutation>,
    ) {
        self.maps += 1;
        let Some(expanding) = find_expanding_pair(space, map) else {
            return;
        };
        self.with_expanding_pair += 1;
        if find_contracting_pair(space, map).is_some() {
            self.confirmations += 1;
        } else {
            refutations
                .push(Refutation { instance: MapInstance::new(source(), space, map.images().to_vec()), expanding });
        }
    }
}

/// A map with an expanding pair but no contracting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub instance: MapInstance,
    pub expanding: PairWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub config: GeneratorConfig,
    pub options: StressOptions,
    pub spaces: usize,
    pub sampled: StressTally,
    pub exhaustive_spaces: usize,
    pub exhaustive: StressTally,
    pub refutations: Vec<Refutation>,
    pub timing: Timing,
}

impl StressReport {
    pub fn refuted(&self) -> bool {
        !self.refutations.is_empty()
    }
}

fn all_maps(n: usize) -> impl Iterator<Item = Vec<PointId>> {
    let total = (n as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let image = (code % n as u64) as usize;
                code /= n as u64;
                PointId(image)
            })
            .collect()
    })
}

/// Checks, on random total maps, that an expanding pair always comes with a
/// contracting pair (both found by exact brute force).
pub fn theorem3_stress(config: &GeneratorConfig, options: &StressOptions) -> Result<StressReport, SearchError> {
    config.validate()?;
    let started = Instant::now();
    let mut report = StressReport {
        config: config.clone(),
        options: options.clone(),
        spaces: 0,
        sampled: StressTally::default(),
        exhaustive_spaces: 0,
        exhaustive: StressTally::default(),
        refutations: Vec::new(),
        timing: Timing::default(),
    };
    if options.maps_per_space == 0 {
        report.timing.elapsed_ms = started.elapsed().as_millis();
        return Ok(report);
    }
    for index in 0..config.count {
        let mut rng = config.rng(index);
        let generated = generate_with(config, index, &mut rng);
        let space = &generated.space;
        let n = space.len();
        report.spaces += 1;
        for m in 0..options.maps_per_space {
            let images: Vec<PointId> = match options.distribution {
                MapDistribution::Uniform => (0..n).map(|_| PointId(rng.gen_range(0..n))).collect(),
                MapDistribution::Identity => (0..n).map(PointId).collect(),
            };
            let map = MapUnderTest::new(images, n)?;
            let source = || format!("space #{index} map #{m} (seed {})", config.seed);
            report.sampled.record(space, &map, source, &mut report.refutations);
        }
        if n <= options.exhaustive_max_n {
            report.exhaustive_spaces += 1;
            for (code, images) in all_maps(n).enumerate() {
                let map = MapUnderTest::new(images, n)?;
                let source = || format!("space #{index} exhaustive map #{code} (seed {})", config.seed);
                report.exhaustive.record(space, &map, source, &mut report.refutations);
            }
        }
    }
    report.timing.elapsed_ms = started.elapsed().as_millis();
    Ok(report)
}
