//! Axiom scans and the asymmetry quantities behind the ε-δ and constant-C
//! reductions.

use serde::{Deserialize, Serialize};

use crate::spaces::{PointId, QuasiMetricSpace};

/// Default cap on the number of violations listed in a report.
pub const DEFAULT_VIOLATION_CAP: usize = 100;

/// Default number of halvings in the δ-grid `{eps · 2^-k : k = 0..=levels}`.
pub const DEFAULT_GRID_LEVELS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    /// `d(x, x) = 0`
    A,
    /// `d(x, z) <= d(x, y) + d(y, z)`
    B,
    /// `d(x, y) = 0 => x = y`
    C,
}

/// One failed axiom instance. For A and C the right-hand side is the
/// required value 0; for B it is `d(x, y) + d(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub points: Vec<PointId>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub tol: f64,
    pub scanned_triples: u64,
    /// Exact number of violations found, even when `violations` is capped.
    pub total_violations: usize,
    pub cap: usize,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }

    pub fn truncated(&self) -> bool {
        self.total_violations > self.violations.len()
    }
}

pub fn check_axioms(space: &QuasiMetricSpace, tol: f64) -> ViolationReport {
    check_axioms_with_cap(space, tol, DEFAULT_VIOLATION_CAP)
}

/// Scans the diagonal (A), every off-diagonal entry (C) and all `n³`
/// ordered triples (B, additive tolerance). Violations are listed in the
/// order A, C, B and lexicographically within each axiom.
pub fn check_axioms_with_cap(space: &QuasiMetricSpace, tol: f64, cap: usize) -> ViolationReport {
    let n = space.len();
    let m = space.matrix();
    let mut report =
        ViolationReport { tol, scanned_triples: (n as u64).pow(3), total_violations: 0, cap, violations: Vec::new() };
    let push = |report: &mut ViolationReport, v: Violation| {
        report.total_violations += 1;
        if report.violations.len() < cap {
            report.violations.push(v);
        }
    };

    for x in 0..n {
        let dxx = m.get(x, x);
        if dxx != 0.0 {
            push(&mut report, Violation { axiom: Axiom::A, points: vec![PointId(x)], lhs: dxx, rhs: 0.0 });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && m.get(x, y) <= 0.0 {
                push(
                    &mut report,
                    Violation { axiom: Axiom::C, points: vec![PointId(x), PointId(y)], lhs: m.get(x, y), rhs: 0.0 },
                );
            }
        }
    }
    for x in 0..n {
        let row_x = m.row(x);
        for y in 0..n {
            let dxy = row_x[y];
            let row_y = m.row(y);
            for z in 0..n {
                let rhs = dxy + row_y[z];
                if row_x[z] > rhs + tol {
                    push(
                        &mut report,
                        Violation {
                            axiom: Axiom::B,
                            points: vec![PointId(x), PointId(y), PointId(z)],
                            lhs: row_x[z],
                            rhs,
                        },
                    );
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaSample {
    pub delta: f64,
    pub omega: f64,
}

/// `omega(δ) = max { d(y, x) : d(x, y) < δ, x ≠ y }` on a set of δ values,
/// together with the best constant `C` in `d(x, y) <= C d(y, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryProfile {
    pub samples: Vec<OmegaSample>,
    /// `None` exactly when `c_infinite` is set.
    pub constant_c: Option<f64>,
    pub c_infinite: bool,
}

impl AsymmetryProfile {
    pub fn omega_at(&self, delta: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.delta == delta).map(|s| s.omega)
    }
}

/// Sorted forward distances with the running maximum of the reverse
/// distance, answering `omega(δ)` by binary search.
struct OmegaTable {
    forward: Vec<f64>,
    prefix_max_reverse: Vec<f64>,
}

impl OmegaTable {
    fn new(space: &QuasiMetricSpace) -> Self {
        let n = space.len();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    pairs.push((space.dist(x, y), space.dist(y, x)));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut running = 0.0f64;
        let prefix_max_reverse = pairs
            .iter()
            .map(|&(_, rev)| {
                running = running.max(rev);
                running
            })
            .collect();
        OmegaTable { forward: pairs.into_iter().map(|p| p.0).collect(), prefix_max_reverse }
    }

    fn omega(&self, delta: f64) -> f64 {
        let below = self.forward.partition_point(|&d| d < delta);
        if below == 0 {
            0.0
        } else {
            self.prefix_max_reverse[below - 1]
        }
    }
}

/// Returns `(C, infinite)`; `C = 1` for spaces with fewer than two points.
fn asymmetry_constant(space: &QuasiMetricSpace) -> (Option<f64>, bool) {
    let n = space.len();
    let mut c = 1.0f64;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let (fwd, rev) = (space.dist(x, y), space.dist(y, x));
            if rev > 0.0 {
                c = c.max(fwd / rev);
            } else if fwd > 0.0 {
                return (None, true);
            }
        }
    }
    (Some(c), false)
}

pub fn asymmetry_profile(space: &QuasiMetricSpace, deltas: &[f64]) -> AsymmetryProfile {
    let table = OmegaTable::new(space);
    let samples = deltas.iter().map(|&delta| OmegaSample { delta, omega: table.omega(delta) }).collect();
    let (constant_c, c_infinite) = asymmetry_constant(space);
    AsymmetryProfile { samples, constant_c, c_infinite }
}

/// `{eps · 2^-k : k = 0..=levels}`, largest first.
pub fn geometric_grid(eps: f64, levels: u32) -> Vec<f64> {
    (0..=levels).map(|k| eps * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub eps: f64,
    /// Largest grid δ with `omega(δ) < eps`, if any.
    pub cor1_delta: Option<f64>,
    pub cor2_c: Option<f64>,
    pub cor2_c_infinite: bool,
    /// `eps / C` when `C` is finite.
    pub reduction_delta: Option<f64>,
    /// Whether `omega(eps / C) < eps`, i.e. the constant-C bound yields the
    /// ε-δ condition at this ε.
    pub reduction_holds: Option<bool>,
    pub grid: Vec<f64>,
}

pub fn check_corollary_hypotheses(space: &QuasiMetricSpace, eps: f64) -> CorollaryCheck {
    check_corollary_hypotheses_on(space, eps, &geometric_grid(eps, DEFAULT_GRID_LEVELS))
}

pub fn check_corollary_hypotheses_on(space: &QuasiMetricSpace, eps: f64, grid: &[f64]) -> CorollaryCheck {
    let table = OmegaTable::new(space);
    let cor1_delta = grid.iter().copied().filter(|&delta| table.omega(delta) < eps).max_by(f64::total_cmp);
    let (cor2_c, cor2_c_infinite) = asymmetry_constant(space);
    let reduction_delta = cor2_c.map(|c| eps / c);
    let reduction_holds = reduction_delta.map(|delta| table.omega(delta) < eps);
    CorollaryCheck { eps, cor1_delta, cor2_c, cor2_c_infinite, reduction_delta, reduction_holds, grid: grid.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{circle_example, DistanceMatrix};

    fn explicit(rows: Vec<Vec<f64>>) -> QuasiMetricSpace {
        QuasiMetricSpace::unchecked(DistanceMatrix::from_rows(rows).unwrap())
    }

    fn brute_omega(space: &QuasiMetricSpace, delta: f64) -> f64 {
        let mut best = 0.0f64;
        for x in 0..space.len() {
            for y in 0..space.len() {
                if x != y && space.dist(x, y) < delta {
                    best = best.max(space.dist(y, x));
                }
            }
        }
        best
    }

    #[test]
    fn circle_50_is_clean() {
        let report = check_axioms(&circle_example(50).unwrap(), 1e-9);
        assert!(report.passed());
        assert!(report.violations.is_empty());
        assert_eq!(report.scanned_triples, 125_000);
    }

    #[test]
    fn two_point_is_clean() {
        assert!(check_axioms(&explicit(vec![vec![0.0, 1.0], vec![2.0, 0.0]]), 1e-9).passed());
    }

    #[test]
    fn single_triangle_violation() {
        let s = explicit(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]);
        let r = check_axioms(&s, 1e-9);
        assert_eq!(r.total_violations, 1);
        assert_eq!(
            r.violations[0],
            Violation { axiom: Axiom::B, points: vec![PointId(0), PointId(1), PointId(2)], lhs: 5.0, rhs: 2.0 }
        );
    }

    #[test]
    fn diagonal_and_positivity_violations() {
        let s = explicit(vec![vec![0.5, 0.0], vec![1.0, 0.0]]);
        let r = check_axioms(&s, 1e-9);
        let axioms: Vec<_> = r.violations.iter().map(|v| v.axiom).collect();
        assert_eq!(axioms[0], Axiom::A);
        assert!(axioms.contains(&Axiom::C));
        assert_eq!(r.violations.iter().find(|v| v.axiom == Axiom::C).unwrap().points, vec![PointId(0), PointId(1)]);
    }

    #[test]
    fn cap_bounds_listing_but_not_count() {
        // d(0, 7) = 100 fails through each of the 6 intermediate points
        let n = 8;
        let mut rows = vec![vec![1.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        rows[0][n - 1] = 100.0;
        let r = check_axioms_with_cap(&explicit(rows), 1e-9, 3);
        assert_eq!(r.violations.len(), 3);
        assert_eq!(r.total_violations, 6);
        assert!(r.truncated());
        assert_eq!(r.violations[0].points, vec![PointId(0), PointId(1), PointId(7)]);
    }

    #[test]
    fn two_point_profile() {
        let s = explicit(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        let p = asymmetry_profile(&s, &[0.5, 1.5, 2.5]);
        assert_eq!(p.omega_at(0.5), Some(0.0));
        assert_eq!(p.omega_at(1.5), Some(2.0));
        assert_eq!(p.omega_at(2.5), Some(2.0));
        assert_eq!(p.constant_c, Some(2.0));
        assert!(!p.c_infinite);
    }

    #[test]
    fn symmetric_profile() {
        let s = explicit(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]]);
        let deltas = [0.5, 1.0, 1.2, 1.6, 3.0];
        let p = asymmetry_profile(&s, &deltas);
        for sample in &p.samples {
            assert!(sample.omega <= sample.delta);
        }
        assert_eq!(p.constant_c, Some(1.0));
        let cor = check_corollary_hypotheses(&s, 0.1);
        assert!(cor.cor1_delta.unwrap() >= 0.1);
        assert_eq!(cor.cor2_c, Some(1.0));
        assert_eq!(cor.reduction_holds, Some(true));
    }

    #[test]
    fn zero_reverse_sets_infinite_flag() {
        let s = explicit(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        let p = asymmetry_profile(&s, &[1.0]);
        assert!(p.c_infinite);
        assert_eq!(p.constant_c, None);
    }

    #[test]
    fn singleton_has_unit_constant() {
        let p = asymmetry_profile(&explicit(vec![vec![0.0]]), &[1.0]);
        assert_eq!(p.constant_c, Some(1.0));
        assert_eq!(p.samples[0].omega, 0.0);
    }

    #[test]
    fn table_matches_brute_force_on_circle() {
        let s = circle_example(120).unwrap();
        let deltas: Vec<f64> = (1..60).map(|k| k as f64 * 0.055).collect();
        let p = asymmetry_profile(&s, &deltas);
        for sample in &p.samples {
            assert_eq!(sample.omega, brute_omega(&s, sample.delta));
        }
    }

    #[test]
    fn two_point_corollaries() {
        let s = explicit(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        let cor = check_corollary_hypotheses(&s, 3.0);
        assert_eq!(cor.cor1_delta, Some(3.0));
        assert_eq!(cor.cor2_c, Some(2.0));
        assert_eq!(cor.reduction_delta, Some(1.5));
        assert_eq!(cor.reduction_holds, Some(true));
        assert_eq!(cor.grid.len(), 41);
    }
}
