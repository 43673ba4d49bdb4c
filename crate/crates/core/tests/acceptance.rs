//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one `ACCEPTANCE <k> PASS|FAIL` line; any failure makes
//! the process exit nonzero.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quasimetric::maps::{
    classify_map, enumerate_bijections, find_contracting_pair, find_expanding_pair, symmetrization_witness,
    BijectionClass, MapUnderTest, PairWitness,
};
use quasimetric::nets::{greedy_eps_net, hereditary_probe, paper_net_circle_with, verify_net, ChordOrder};
use quasimetric::search::{
    counterexample_hunt, random_quasi_metric, theorem3_stress, GeneratorConfig, StressOptions, ValueMode,
};
use quasimetric::sequences::{
    certify_subsequence, extract_left_k_cauchy, is_left_k_cauchy_at, is_right_k_cauchy_at, SequencePrefix,
};
use quasimetric::spaces::{circle_example, conjugate, DistanceMatrix, PointId, QuasiMetricSpace};
use quasimetric::verify::{asymmetry_profile, check_axioms};

fn report(id: u32, ok: bool, detail: impl AsRef<str>) {
    println!("ACCEPTANCE {id} {}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
}

fn criterion_1_shift_counterexample() {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qmetric"))
        .args(["classify", "--space", "circle:102", "--map", "shift:100", "--json"])
        .output()
        .expect("binary runs");
    let elapsed = started.elapsed();
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report on stdout");
    let c = &json["classification"];
    let w = &c["expanding_witness"];

    let ok = out.status.code() == Some(0)
        && c["comparison"]["mode"] == "exact"
        && c["noncontractive"] == true
        && c["isometry"] == false
        && c["contracting_witness"].is_null()
        && w["x"] == 0
        && w["y"] == 1
        && w["before"].as_f64() == Some(2.0)
        && w["after"].as_f64() == Some(3.0)
        && json["expanding"]["x"] == "p_1"
        && json["expanding"]["y"] == "p_2"
        && elapsed < Duration::from_secs(1);
    report(
        1,
        ok,
        format!(
            "exit {:?}, witness ({}, {}) before {} after {}, {:?}",
            out.status.code(),
            json["expanding"]["x"],
            json["expanding"]["y"],
            w["before"],
            w["after"],
            elapsed
        ),
    );
    assert!(ok, "{json:#}");
}

fn criterion_2_circle_axioms() {
    let space = circle_example(300).unwrap();
    let started = Instant::now();
    let r = check_axioms(&space, 1e-9);
    let elapsed = started.elapsed();
    let ok = r.scanned_triples == 27_000_000 && r.total_violations == 0 && elapsed < Duration::from_secs(60);
    report(2, ok, format!("{} triples, {} violations, {elapsed:?}", r.scanned_triples, r.total_violations));
    assert!(ok);
}

fn criterion_3_expanding_implies_contracting() {
    let config = GeneratorConfig::new(3, 6, ValueMode::Mixed { k: 5 }, 3, 150);
    let options = StressOptions { maps_per_space: 8, exhaustive_max_n: 3, ..StressOptions::default() };
    let r = theorem3_stress(&config, &options).unwrap();

    let n3_spaces = (0..config.count).filter(|&i| random_quasi_metric(&config, i).unwrap().space.len() == 3).count();
    let ok = r.sampled.maps >= 1000
        && r.refutations.is_empty()
        && r.sampled.confirmations == r.sampled.with_expanding_pair
        && r.exhaustive.confirmations == r.exhaustive.with_expanding_pair
        && n3_spaces > 0
        && r.exhaustive_spaces == n3_spaces
        && r.exhaustive.maps == 27 * n3_spaces as u64;
    report(
        3,
        ok,
        format!(
            "{} sampled maps ({} expanding, {} confirmed); {} n=3 spaces x 27 maps ({} expanding, {} confirmed); {} refutations",
            r.sampled.maps,
            r.sampled.with_expanding_pair,
            r.sampled.confirmations,
            r.exhaustive_spaces,
            r.exhaustive.with_expanding_pair,
            r.exhaustive.confirmations,
            r.refutations.len()
        ),
    );
    assert!(ok);
}

/// Doubles a random space: copy `a` keeps `D`, copy `b` carries `Dᵀ`, and
/// every cross distance is `c = max D`. Swapping `a_i <-> b_i` maps `D` onto
/// `Dᵀ`, so it preserves `d + d⁻¹` while expanding some pair whenever `D` is
/// asymmetric. Points are then relabelled by a random permutation.
fn planted_instance(index: usize) -> Option<(QuasiMetricSpace, MapUnderTest)> {
    let config = GeneratorConfig::new(2, 4, ValueMode::Mixed { k: 6 }, 4, 1000);
    let base = random_quasi_metric(&config, index).unwrap().space;
    let k = base.len();
    if base.matrix().is_symmetric() {
        return None;
    }
    let c = base.matrix().rows().into_iter().flatten().fold(0.0, f64::max);
    let raw = |u: usize, v: usize| match (u < k, v < k) {
        (true, true) => base.dist(u, v),
        (false, false) => base.dist(v - k, u - k),
        _ => c,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(index as u64);
    let mut sigma: Vec<usize> = (0..2 * k).collect();
    sigma.shuffle(&mut rng);
    let mut inverse = vec![0; 2 * k];
    for (u, &s) in sigma.iter().enumerate() {
        inverse[s] = u;
    }
    let matrix = DistanceMatrix::from_fn(2 * k, |i, j| raw(inverse[i], inverse[j]));
    let space = QuasiMetricSpace::unchecked(matrix).validate(1e-9).unwrap();
    let swap = |u: usize| if u < k { u + k } else { u - k };
    let images = (0..2 * k).map(|i| PointId(sigma[swap(inverse[i])])).collect();
    Some((space, MapUnderTest::new(images, 2 * k).unwrap()))
}

fn criterion_4_symmetrization_route() {
    let tol = 1e-9;
    let (mut instances, mut pairs, mut failures) = (0, 0, Vec::new());
    for index in 0.. {
        if instances == 100 {
            break;
        }
        let Some((space, map)) = planted_instance(index) else { continue };
        instances += 1;
        assert!(map.is_bijection());
        let n = space.len();
        let mut any_expanding = false;
        for (x, y) in (0..n).cartesian_product(0..n) {
            let (fx, fy) = (map.images()[x].0, map.images()[y].0);
            if space.dist(fx, fy) <= space.dist(x, y) {
                continue;
            }
            any_expanding = true;
            pairs += 1;
            let expanding = PairWitness::of(&space, &map, PointId(x), PointId(y));
            match symmetrization_witness(&space, &map, &expanding, tol) {
                Ok(w) => {
                    let (q, p) = (w.contracting.x.0, w.contracting.y.0);
                    let contracts = space.dist(map.images()[q].0, map.images()[p].0) < space.dist(q, p);
                    let drift_ok = (w.ds_after - w.ds_before).abs() <= (n * n) as f64 * tol;
                    if (q, p) != (y, x) || !contracts || !drift_ok || find_contracting_pair(&space, &map).is_none() {
                        failures.push(format!("instance {index}, pair ({x}, {y})"));
                    }
                }
                Err(e) => failures.push(format!("instance {index}, pair ({x}, {y}): {e}")),
            }
        }
        if !any_expanding {
            failures.push(format!("instance {index}: planted map has no expanding pair"));
        }
    }
    let ok = instances == 100 && failures.is_empty();
    report(4, ok, format!("{instances} planted bijections, {pairs} expanding pairs, {} failures", failures.len()));
    assert!(ok, "{failures:?}");
}

fn unpruned_noncontractive(space: &QuasiMetricSpace) -> BTreeSet<Vec<PointId>> {
    let n = space.len();
    (0..n)
        .permutations(n)
        .filter(|f| (0..n).cartesian_product(0..n).all(|(x, y)| space.dist(f[x], f[y]) >= space.dist(x, y)))
        .map(|f| f.into_iter().map(PointId).collect())
        .collect()
}

fn criterion_5_finite_plasticity() {
    let started = Instant::now();
    let config = GeneratorConfig::new(3, 7, ValueMode::Mixed { k: 5 }, 5, 500);
    let hunt = counterexample_hunt(&config, 8, &[], 0.0).unwrap();

    let mut compared = 0;
    let mut mismatches = Vec::new();
    for i in 0..config.count {
        let space = random_quasi_metric(&config, i).unwrap().space;
        if space.len() > 5 {
            continue;
        }
        compared += 1;
        let pruned: BTreeSet<_> =
            enumerate_bijections(&space, BijectionClass::NonContractive, 0.0).bijections.into_iter().collect();
        if pruned != unpruned_noncontractive(&space) {
            mismatches.push(i);
        }
    }
    let elapsed = started.elapsed();
    let ok = hunt.spaces_tested == 500
        && hunt.spaces_skipped == 0
        && hunt.excluded.is_empty()
        && !hunt.found_counterexample()
        && compared > 0
        && mismatches.is_empty()
        && elapsed < Duration::from_secs(300);
    report(
        5,
        ok,
        format!(
            "{} spaces, {} permutations covered, {} non-contractive bijections, 0 expected non-isometries (found {}); \
             pruned = unpruned on {compared} spaces with n <= 5 ({} mismatches); {elapsed:?}",
            hunt.spaces_tested,
            hunt.bijections_enumerated,
            hunt.noncontractive_bijections,
            hunt.noncontractive_nonisometries.len(),
            mismatches.len()
        ),
    );
    assert!(ok, "mismatches at {mismatches:?}");
}

fn criterion_6_net_certificates() {
    let space = circle_example(200).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for eps in [0.3, 0.5, 0.7] {
        let greedy = greedy_eps_net(&space, eps);
        let g = verify_net(&space, &greedy).valid;
        let asc = paper_net_circle_with(200, eps, ChordOrder::Ascending);
        let desc = paper_net_circle_with(200, eps, ChordOrder::Descending);
        let a = verify_net(&space, &asc.net).valid;
        let d = verify_net(&space, &desc.net).valid;
        ok &= g && a && d;
        lines.push(format!(
            "eps {eps}: greedy {} {g}, two-phase {} {a} / {} {d}",
            greedy.size(),
            asc.net.size(),
            desc.net.size()
        ));
    }
    let probe = hereditary_probe(&space, 0.5, 50, 0);
    ok &= probe.trials == 50 && probe.all_passed();
    lines.push(format!("probe: {}/{} subspaces certified", probe.trials - probe.failures, probe.trials));
    report(6, ok, lines.join("; "));
    assert!(ok);
}

fn criterion_7_corollary_hypotheses_fail() {
    let space = circle_example(500).unwrap();
    let n = space.len();
    let mut min_chord = f64::INFINITY;
    for (x, y) in (0..n).cartesian_product(0..n) {
        if x % 2 == y % 2 && y > x {
            min_chord = min_chord.min(space.dist(x, y));
        }
    }
    let just_above = min_chord.next_up();
    let mut deltas = vec![min_chord, just_above, 1.5 * min_chord, 3.0, 3.0_f64.next_up(), 100.0];
    deltas.extend((0..12).map(|k| min_chord * 2f64.powi(k)));
    let profile = asymmetry_profile(&space, &deltas);

    let above: Vec<_> = profile.samples.iter().filter(|s| s.delta > min_chord).collect();
    let all_three = above.iter().all(|s| s.omega == 3.0);
    let boundary = profile.omega_at(min_chord);
    let c = profile.constant_c;
    let ok = all_three && !above.is_empty() && boundary == Some(0.0) && c == Some(3.0 / min_chord);
    report(
        7,
        ok,
        format!(
            "min same-parity chord {min_chord}; omega = 3 at all {} sampled delta > min; omega(min) = {:?} (strict ball); \
             C = {:?} = 3 / min chord",
            above.len(),
            boundary,
            c
        ),
    );
    assert!(ok);
}

fn criterion_8_k_cauchy() {
    let space = circle_example(2000).unwrap();
    let prefix = SequencePrefix::new(&space, space.points().collect()).unwrap();
    let extraction = extract_left_k_cauchy(&prefix, 0.2, 10).unwrap();
    let positions = extraction.positions().map(<[usize]>::to_vec).unwrap_or_default();
    let certified = !positions.is_empty() && certify_subsequence(&prefix, &positions, 0.2).unwrap().holds;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let config = GeneratorConfig::new(2, 9, ValueMode::Mixed { k: 4 }, 8, 100);
    let mut agree = 0;
    for t in 0..100 {
        let s = if t % 2 == 0 { random_quasi_metric(&config, t).unwrap().space } else { circle_example(40).unwrap() };
        let len = rng.gen_range(1..=25);
        let points: Vec<PointId> = (0..len).map(|_| PointId(rng.gen_range(0..s.len()))).collect();
        let eps = rng.gen_range(0.05..4.0);
        let start = rng.gen_range(1..=len);
        let seq = SequencePrefix::new(&s, points.clone()).unwrap();
        let right = is_right_k_cauchy_at(&seq, eps, start).unwrap().holds;
        let conj = conjugate(&s);
        let left_on_conj =
            is_left_k_cauchy_at(&SequencePrefix::new(&conj, points.clone()).unwrap(), eps, start).unwrap().holds;
        let direct = (start..=len).all(|n| (n..=len).all(|m| s.d(points[m - 1], points[n - 1]) < eps));
        if right == left_on_conj && right == direct {
            agree += 1;
        }
    }
    let ok = certified && positions.len() >= 10 && agree == 100;
    report(
        8,
        ok,
        format!(
            "certified subsequence of length {} at eps 0.2; right = left on conjugate on {agree}/100 prefixes",
            positions.len()
        ),
    );
    assert!(ok);
}

fn shift_classification_in_process() {
    let (space, map) = quasimetric::maps::shift_map(100).unwrap();
    let c = classify_map(&space, &map, 0.0);
    assert!(c.noncontractive && !c.isometry && !c.is_bijection);
    assert_eq!(find_expanding_pair(&space, &map), c.expanding_witness);
    assert_eq!(find_contracting_pair(&space, &map), None);
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("criterion_1_shift_counterexample", criterion_1_shift_counterexample),
        ("criterion_2_circle_axioms", criterion_2_circle_axioms),
        ("criterion_3_expanding_implies_contracting", criterion_3_expanding_implies_contracting),
        ("criterion_4_symmetrization_route", criterion_4_symmetrization_route),
        ("criterion_5_finite_plasticity", criterion_5_finite_plasticity),
        ("criterion_6_net_certificates", criterion_6_net_certificates),
        ("criterion_7_corollary_hypotheses_fail", criterion_7_corollary_hypotheses_fail),
        ("criterion_8_k_cauchy", criterion_8_k_cauchy),
        ("shift_classification_in_process", shift_classification_in_process),
    ];
    let failed: Vec<&str> =
        criteria.iter().filter(|(_, run)| std::panic::catch_unwind(run).is_err()).map(|(name, _)| *name).collect();
    if failed.is_empty() {
        println!("acceptance: all {} checks passed", criteria.len());
    } else {
        println!("acceptance: FAILED {failed:?}");
        std::process::exit(1);
    }
}
