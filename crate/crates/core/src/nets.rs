//! ε-nets with per-point covering certificates.
//!
//! Covering is always measured from the center: a point `p` is covered by
//! `c` when `d(c, p) < eps`, the same direction as a forward ball.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spaces::{chord, circle_example, circle_index, subspace, PointId, QuasiMetricSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub point: PointId,
    pub center: PointId,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsNet {
    pub eps: f64,
    pub centers: Vec<PointId>,
    /// One record per point of the space, in point order.
    pub assignment: Vec<Assignment>,
}

impl EpsNet {
    pub fn size(&self) -> usize {
        self.centers.len()
    }
}

/// Greedy construction in ascending point order: a point not covered by an
/// earlier center becomes a center itself.
pub fn greedy_eps_net(space: &QuasiMetricSpace, eps: f64) -> EpsNet {
    let mut centers: Vec<PointId> = Vec::new();
    let mut assignment = Vec::with_capacity(space.len());
    for p in space.points() {
        match centers.iter().find(|&&c| space.d(c, p) < eps) {
            Some(&c) => assignment.push(Assignment { point: p, center: c, dist: space.d(c, p) }),
            None => {
                centers.push(p);
                assignment.push(Assignment { point: p, center: p, dist: space.d(p, p) });
            }
        }
    }
    EpsNet { eps, centers, assignment }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum NetFailureReason {
    Unassigned,
    CenterOutOfRange { center: PointId },
    NotACenter { center: PointId },
    DistanceMismatch { recorded: f64, actual: f64 },
    NotCovered { dist: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetFailure {
    pub point: PointId,
    #[serde(flatten)]
    pub reason: NetFailureReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetVerdict {
    pub valid: bool,
    pub first_failure: Option<NetFailure>,
}

/// Checks the certificate: every point of the space has an assignment to a
/// listed center at recorded distance `d(center, point) < eps`.
pub fn verify_net(space: &QuasiMetricSpace, net: &EpsNet) -> NetVerdict {
    let fail = |point: PointId, reason| NetVerdict { valid: false, first_failure: Some(NetFailure { point, reason }) };
    let mut by_point: Vec<Option<&Assignment>> = vec![None; space.len()];
    for a in &net.assignment {
        if a.point.0 < space.len() && by_point[a.point.0].is_none() {
            by_point[a.point.0] = Some(a);
        }
    }
    for p in space.points() {
        let Some(a) = by_point[p.0] else {
            return fail(p, NetFailureReason::Unassigned);
        };
        if a.center.0 >= space.len() {
            return fail(p, NetFailureReason::CenterOutOfRange { center: a.center });
        }
        if !net.centers.contains(&a.center) {
            return fail(p, NetFailureReason::NotACenter { center: a.center });
        }
        let actual = space.d(a.center, p);
        if actual != a.dist {
            return fail(p, NetFailureReason::DistanceMismatch { recorded: a.dist, actual });
        }
        if !(actual < net.eps) {
            return fail(p, NetFailureReason::NotCovered { dist: actual });
        }
    }
    NetVerdict { valid: true, first_failure: None }
}

/// Visiting order for the chord-distance sub-net of one parity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChordOrder {
    #[default]
    Ascending,
    Descending,
}

/// The two-phase net for the circle truncation together with its
/// intermediate data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleNet {
    pub net: EpsNet,
    /// Centers of the chord-distance nets, both parity classes.
    pub chord_centers: Vec<PointId>,
    /// Points inside some chord ball but outside every forward ball around
    /// the chord centers; each is promoted to a center.
    pub exceptional: Vec<PointId>,
    /// Points lying in the chord ball of some center with a larger index.
    pub below_center: Vec<PointId>,
}

/// Net for `circle_example(size)` built per parity class: a chord-distance
/// net first, then every point that a chord center covers only "from
/// above" (smaller index than every covering center) becomes a center.
pub fn paper_net_circle(size: usize, eps: f64) -> CircleNet {
    paper_net_circle_with(size, eps, ChordOrder::Ascending)
}

pub fn paper_net_circle_with(size: usize, eps: f64, order: ChordOrder) -> CircleNet {
    let mut chord_centers = Vec::new();
    let mut exceptional = Vec::new();
    let mut below_center = Vec::new();

    for first in [1usize, 2] {
        let mut class: Vec<usize> = (first..=size).step_by(2).collect();
        if order == ChordOrder::Descending {
            class.reverse();
        }
        let mut centers: Vec<usize> = Vec::new();
        for &n in &class {
            if !centers.iter().any(|&c| chord(c, n) < eps) {
                centers.push(n);
            }
        }
        for &n in &class {
            let in_chord_ball = |c: &usize| chord(*c, n) < eps;
            if centers.iter().filter(|c| in_chord_ball(c)).any(|&c| c > n) {
                below_center.push(PointId(n - 1));
            }
            // forward distance from c to n is the chord exactly when c <= n
            let forward_covered = centers.iter().any(|&c| c <= n && in_chord_ball(&c));
            if !forward_covered {
                exceptional.push(PointId(n - 1));
            }
        }
        chord_centers.extend(centers.into_iter().map(|n| PointId(n - 1)));
    }
    chord_centers.sort_unstable();
    exceptional.sort_unstable();
    below_center.sort_unstable();

    let mut centers = chord_centers.clone();
    centers.extend(exceptional.iter().copied());
    centers.sort_unstable();
    centers.dedup();

    let space = circle_example(size.max(1)).expect("size >= 1");
    let assignment = (0..size)
        .map(PointId)
        .map(|p| {
            let center = centers
                .iter()
                .copied()
                .find(|&c| space.d(c, p) < eps && circle_index(c) % 2 == circle_index(p) % 2)
                .unwrap_or(p);
            Assignment { point: p, center, dist: space.d(center, p) }
        })
        .collect();

    CircleNet { net: EpsNet { eps, centers, assignment }, chord_centers, exceptional, below_center }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrial {
    pub subset: Vec<PointId>,
    pub net_size: usize,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub eps: f64,
    pub trials: usize,
    pub max_net_size: usize,
    pub failures: usize,
    pub results: Vec<ProbeTrial>,
}

impl ProbeReport {
    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }
}

/// Greedy nets inside `trials` random induced subspaces. Trial `t` draws
/// from its own ChaCha stream, so trials are independent of each other.
pub fn hereditary_probe(space: &QuasiMetricSpace, eps: f64, trials: usize, seed: u64) -> ProbeReport {
    let n = space.len();
    let subsets: Vec<Vec<PointId>> = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let size = rng.gen_range(1..=n);
            let mut picked: Vec<PointId> = index::sample(&mut rng, n, size).into_iter().map(PointId).collect();
            picked.sort_unstable();
            picked
        })
        .collect();
    probe_subsets(space, eps, &subsets)
}

/// Probe on caller-chosen subsets.
pub fn probe_subsets(space: &QuasiMetricSpace, eps: f64, subsets: &[Vec<PointId>]) -> ProbeReport {
    let results: Vec<ProbeTrial> = subsets
        .iter()
        .map(|subset| {
            let sub = subspace(space, subset).expect("probe subsets are valid selections");
            let net = greedy_eps_net(&sub, eps);
            let valid = verify_net(&sub, &net).valid;
            ProbeTrial { subset: subset.clone(), net_size: net.size(), valid }
        })
        .collect();
    ProbeReport {
        eps,
        trials: results.len(),
        max_net_size: results.iter().map(|r| r.net_size).max().unwrap_or(0),
        failures: results.iter().filter(|r| !r.valid).count(),
        results,
    }
}
