//! Command-line front end.
//!
//! Every command builds one JSON report. Exit codes: 0 when the run is
//! clean, 1 when it found something (an axiom violation, a counterexample,
//! a failed expectation), 2 for unusable input or flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::maps::{
    classify_map, find_contracting_pair, plasticity_check_finite, shift_map, MapClassification, MapUnderTest,
    PairWitness, PlasticityVerdict, DEFAULT_MAX_ENUMERATION,
};
use crate::nets::{hereditary_probe, paper_net_circle_with, verify_net, ChordOrder, ProbeReport};
use crate::search::{counterexample_hunt, theorem3_stress, GeneratorConfig, MapDistribution, StressOptions, ValueMode};
use crate::sequences::{
    extract_left_k_cauchy, is_left_k_cauchy_at, is_right_k_cauchy_at, CauchyCheck, Extraction, SequencePrefix,
};
use crate::spaces::{circle_example, Origin, PointId, QuasiMetricSpace, SpaceFile, DEFAULT_TOL};
use crate::verify::{
    asymmetry_profile, check_axioms_with_cap, check_corollary_hypotheses_on, geometric_grid, AsymmetryProfile,
    CorollaryCheck, ViolationReport, DEFAULT_GRID_LEVELS, DEFAULT_VIOLATION_CAP,
};

#[derive(Debug, Parser)]
#[command(name = "qmetric", version, about = "Experiments on finite quasi-metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout even when --out is given.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the quasi-metric axioms; optionally profile the asymmetry.
    Verify(VerifyArgs),
    /// Build and certify an ε-net.
    Net(NetArgs),
    /// K-Cauchy checks and subsequence extraction on a point sequence.
    Sequence(SequenceArgs),
    /// Classify a self-map (non-expansive, non-contractive, isometry).
    Classify(ClassifyArgs),
    /// Search random spaces for non-isometric non-contractive bijections.
    Hunt(HuntArgs),
    /// Check that expanding maps also contract, on random maps.
    Stress(StressArgs),
    /// Emit a builtin space (circle:N) or shift-map instance (shift:N).
    Example(ExampleArgs),
}

/// A space given as a builtin `circle:N` or a path to a space file.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSource {
    Circle(usize),
    File(PathBuf),
}

impl FromStr for SpaceSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("circle:") {
            Some(n) => n.parse().map(SpaceSource::Circle).map_err(|_| format!("bad builtin space {s:?}")),
            None => Ok(SpaceSource::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for SpaceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSource::Circle(n) => write!(f, "circle:{n}"),
            SpaceSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    /// `circle:N` or a space file.
    #[arg(long)]
    pub space: SpaceSource,
    /// Skip the axiom check when reading a space file.
    #[arg(long)]
    pub no_validate: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_VIOLATION_CAP)]
    pub cap: usize,
    /// Comma-separated δ values for the asymmetry profile.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Vec<f64>,
    /// Check the ε-δ and constant-C hypotheses at this ε.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_LEVELS)]
    pub grid_levels: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NetMethod {
    Greedy,
    /// Two-phase construction for circle:N spaces.
    TwoPhase,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = NetMethod::Greedy)]
    pub method: NetMethod,
    /// Visiting order of the chord sub-net (two-phase method only).
    #[arg(long, value_enum, default_value_t = OrderArg::Ascending)]
    pub chord_order: OrderArg,
    /// Also build nets inside this many random subspaces.
    #[arg(long, default_value_t = 0)]
    pub probe_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Ascending,
    Descending,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// One-based point numbers: a range `a..b` (inclusive) or a list `3,5,7`.
    #[arg(long)]
    pub points: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 2)]
    pub min_len: usize,
    /// Tail start position for the K-Cauchy checks.
    #[arg(long, default_value_t = 1)]
    pub start: usize,
    /// Exit with 1 when no subsequence is found.
    #[arg(long)]
    pub require_found: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// `circle:N` or a space file; defaults to the ambient space of `shift:N`.
    #[arg(long)]
    pub space: Option<SpaceSource>,
    #[arg(long)]
    pub no_validate: bool,
    /// A map file `{"images": [...]}`, `shift:N` or `identity`.
    #[arg(long)]
    pub map: String,
    /// 0 compares stored distances exactly.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long)]
    pub expect_isometry: bool,
    #[arg(long)]
    pub expect_noncontractive: bool,
    #[arg(long)]
    pub expect_nonexpansive: bool,
    /// Also enumerate all bijections of the space (small spaces only).
    #[arg(long)]
    pub plasticity: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ENUMERATION)]
    pub max_n: usize,
}

/// Space sizes as `N` or `a..b` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad size range {s:?}: expected N or a..b");
        match s.split_once("..") {
            Some((a, b)) => Ok(SizeRange {
                min: a.parse().map_err(|_| bad())?,
                max: b.trim_start_matches('=').parse().map_err(|_| bad())?,
            }),
            None => {
                let n = s.parse().map_err(|_| bad())?;
                Ok(SizeRange { min: n, max: n })
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value = "3..7")]
    pub n: SizeRange,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `int:K`, `real:K` or `mixed:K`.
    #[arg(long, default_value = "mixed:5")]
    pub values: String,
}

impl GeneratorArgs {
    fn config(&self) -> Result<GeneratorConfig, String> {
        let values: ValueMode = self.values.parse().map_err(|e| format!("{e}"))?;
        let config = GeneratorConfig::new(self.n.min, self.n.max, values, self.seed, self.count);
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct HuntArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_ENUMERATION)]
    pub max_exhaustive: usize,
    /// Extra space files to include; they pass the same axiom gate.
    #[arg(long)]
    pub inject: Vec<PathBuf>,
    /// Read injected files without rejecting invalid ones up front.
    #[arg(long)]
    pub no_validate: bool,
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapsArg {
    Uniform,
    Identity,
}

#[derive(Debug, Args)]
pub struct StressArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 10)]
    pub maps_per_space: usize,
    #[arg(long, value_enum, default_value_t = MapsArg::Uniform)]
    pub maps: MapsArg,
    /// Spaces up to this size also get every total map.
    #[arg(long, default_value_t = 3)]
    pub exhaustive_max_n: usize,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// `circle:N` or `shift:N`.
    pub which: String,
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean = 0,
    Finding = 1,
    Usage = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Result of a command: status, JSON report and a one-line summary.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub report: Value,
    pub summary: String,
}

impl Outcome {
    fn new(finding: bool, report: impl Serialize, summary: String) -> Result<Self, String> {
        Ok(Outcome {
            status: if finding { Status::Finding } else { Status::Clean },
            report: serde_json::to_value(report).map_err(|e| e.to_string())?,
            summary,
        })
    }

    fn usage(message: String) -> Self {
        Outcome { status: Status::Usage, report: json!({ "error": message }), summary: format!("error: {message}") }
    }
}

/// Map file layout: `{"images": [...], "domain": [...]}` with zero-based
/// point ids; `domain` is optional and defaults to every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub images: Vec<PointId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<PointId>>,
}

fn load_space(src: &SpaceSource, validate: bool, tol: f64) -> Result<QuasiMetricSpace, String> {
    match src {
        SpaceSource::Circle(n) => circle_example(*n).map_err(|e| e.to_string()),
        SpaceSource::File(path) => {
            QuasiMetricSpace::read_json(path, validate, tol).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

fn parse_builtin(s: &str, name: &str) -> Result<Option<usize>, String> {
    match s.strip_prefix(name).and_then(|rest| rest.strip_prefix(':')) {
        Some(n) => n.parse().map(Some).map_err(|_| format!("bad builtin {s:?}: expected {name}:N")),
        None => Ok(None),
    }
}

fn parse_points(spec: &str, n: usize) -> Result<Vec<PointId>, String> {
    let bad = || format!("bad point list {spec:?}");
    let numbers: Vec<usize> = match spec.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            (a..=b).collect()
        }
        None => spec.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
    };
    numbers
        .into_iter()
        .map(|k| if k == 0 || k > n { Err(format!("point number {k} is outside 1..={n}")) } else { Ok(PointId(k - 1)) })
        .collect()
}

#[derive(Serialize)]
struct VerifyReport {
    space: String,
    n: usize,
    axioms: ViolationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymmetry: Option<AsymmetryProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corollaries: Option<CorollaryCheck>,
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome, String> {
    if !(args.tol >= 0.0) {
        return Err(format!("tolerance must be nonnegative, got {}", args.tol));
    }
    let space = load_space(&args.space.space, false, DEFAULT_TOL)?;
    let axioms = check_axioms_with_cap(&space, args.tol, args.cap);
    if args.deltas.iter().any(|d| !(*d > 0.0)) {
        return Err("deltas must be positive".into());
    }
    let asymmetry = (!args.deltas.is_empty()).then(|| asymmetry_profile(&space, &args.deltas));
    let corollaries = match args.eps {
        Some(eps) if !(eps > 0.0) => return Err("eps must be positive".into()),
        Some(eps) => Some(check_corollary_hypotheses_on(&space, eps, &geometric_grid(eps, args.grid_levels))),
        None => None,
    };
    let summary = format!(
        "verify {}: {} point(s), {} triples scanned, {} violation(s)",
        args.space.space,
        space.len(),
        axioms.scanned_triples,
        axioms.total_violations
    );
    let finding = !axioms.passed();
    let report = VerifyReport { space: args.space.space.to_string(), n: space.len(), axioms, asymmetry, corollaries };
    Outcome::new(finding, report, summary)
}

#[derive(Serialize)]
struct NetReport {
    space: String,
    method: &'static str,
    size: usize,
    valid: bool,
    verdict: crate::nets::NetVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    exceptional: Option<Vec<PointId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chord_centers: Option<Vec<PointId>>,
    certificate: crate::nets::EpsNet,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<ProbeReport>,
}

fn run_net(args: &NetArgs) -> Result<Outcome, String> {
    if !(args.eps > 0.0) {
        return Err("eps must be positive".into());
    }
    let space = load_space(&args.space.space, !args.space.no_validate, DEFAULT_TOL)?;
    let (net, exceptional, chord_centers, method) = match args.method {
        NetMethod::Greedy => (crate::nets::greedy_eps_net(&space, args.eps), None, None, "greedy"),
        NetMethod::TwoPhase => {
            let Origin::Circle { size } = space.origin() else {
                return Err("--method two-phase needs a circle:N space".into());
            };
            let order = match args.chord_order {
                OrderArg::Ascending => ChordOrder::Ascending,
                OrderArg::Descending => ChordOrder::Descending,
            };
            let c = paper_net_circle_with(size, args.eps, order);
            (c.net, Some(c.exceptional), Some(c.chord_centers), "two-phase")
        }
    };
    let verdict = verify_net(&space, &net);
    let probe = (args.probe_trials > 0).then(|| hereditary_probe(&space, args.eps, args.probe_trials, args.seed));
    let probe_ok = probe.as_ref().is_none_or(ProbeReport::all_passed);
    let summary = format!(
        "net {} eps={}: {} center(s), certificate {}",
        args.space.space,
        args.eps,
        net.size(),
        if verdict.valid { "valid" } else { "INVALID" }
    );
    let finding = !verdict.valid || !probe_ok;
    let report = NetReport {
        space: args.space.space.to_string(),
        method,
        size: net.size(),
        valid: verdict.valid,
        verdict,
        exceptional,
        chord_centers,
        certificate: net,
        probe,
    };
    Outcome::new(finding, report, summary)
}

#[derive(Serialize)]
struct SequenceReport {
    space: String,
    length: usize,
    eps: f64,
    start: usize,
    left: CauchyCheck,
    right: CauchyCheck,
    min_len: usize,
    extraction: Extraction,
    note: &'static str,
}

fn run_sequence(args: &SequenceArgs) -> Result<Outcome, String> {
    if !(args.eps > 0.0) {
        return Err("eps must be positive".into());
    }
    let space = load_space(&args.space.space, !args.space.no_validate, DEFAULT_TOL)?;
    let points = parse_points(&args.points, space.len())?;
    let prefix = SequencePrefix::new(&space, points).map_err(|e| e.to_string())?;
    let left = is_left_k_cauchy_at(&prefix, args.eps, args.start).map_err(|e| e.to_string())?;
    let right = is_right_k_cauchy_at(&prefix, args.eps, args.start).map_err(|e| e.to_string())?;
    let extraction = extract_left_k_cauchy(&prefix, args.eps, args.min_len).map_err(|e| e.to_string())?;
    let summary = match extraction.positions() {
        Some(p) => format!("sequence: left K-Cauchy subsequence of length {} found", p.len()),
        None => "sequence: not found by the greedy search".to_string(),
    };
    let finding = args.require_found && extraction.positions().is_none();
    let report = SequenceReport {
        space: args.space.space.to_string(),
        length: prefix.len(),
        eps: args.eps,
        start: args.start,
        left,
        right,
        min_len: args.min_len,
        extraction,
        note: "finite prefix only; a greedy miss does not prove that no subsequence exists",
    };
    Outcome::new(finding, report, summary)
}

#[derive(Serialize)]
struct LabelledWitness {
    x: String,
    y: String,
    before: f64,
    after: f64,
}

impl LabelledWitness {
    fn of(space: &QuasiMetricSpace, w: &PairWitness) -> Self {
        LabelledWitness {
            x: space.label(w.x).to_string(),
            y: space.label(w.y).to_string(),
            before: w.before,
            after: w.after,
        }
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    space: String,
    map: String,
    n: usize,
    domain_size: usize,
    classification: MapClassification,
    expanding: Option<LabelledWitness>,
    contracting: Option<LabelledWitness>,
    /// Exact brute-force contracting pair.
    exact_contracting_pair: Option<PairWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plasticity: Option<PlasticityVerdict>,
    expectations_failed: Vec<&'static str>,
}

fn run_classify(args: &ClassifyArgs) -> Result<Outcome, String> {
    if !(args.tol >= 0.0) {
        return Err(format!("tolerance must be nonnegative, got {}", args.tol));
    }
    let (space, map) = if let Some(n) = parse_builtin(&args.map, "shift")? {
        let (ambient, map) = shift_map(n).map_err(|e| e.to_string())?;
        match &args.space {
            None => {}
            Some(SpaceSource::Circle(m)) if *m == n + 2 => {}
            Some(other) => return Err(format!("shift:{n} lives on circle:{}, not {other}", n + 2)),
        }
        (ambient, map)
    } else {
        let src = args.space.as_ref().ok_or("--space is required unless --map is shift:N")?;
        let space = load_space(src, !args.no_validate, DEFAULT_TOL)?;
        let map = if args.map == "identity" {
            MapUnderTest::identity(space.len())
        } else {
            let text = std::fs::read_to_string(&args.map).map_err(|e| format!("{}: {e}", args.map))?;
            let file: MapFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", args.map))?;
            let built = match file.domain {
                Some(domain) => MapUnderTest::restricted(file.images, domain, space.len()),
                None => MapUnderTest::new(file.images, space.len()),
            };
            built.map_err(|e| e.to_string())?
        };
        (space, map)
    };

    let classification = classify_map(&space, &map, args.tol);
    let plasticity = if args.plasticity {
        Some(plasticity_check_finite(&space, args.max_n, args.tol).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let mut expectations_failed = Vec::new();
    if args.expect_isometry && !classification.isometry {
        expectations_failed.push("isometry");
    }
    if args.expect_noncontractive && !classification.noncontractive {
        expectations_failed.push("noncontractive");
    }
    if args.expect_nonexpansive && !classification.nonexpansive {
        expectations_failed.push("nonexpansive");
    }
    let summary = format!(
        "classify {}: nonexpansive={} noncontractive={} isometry={} bijection={}",
        args.map,
        classification.nonexpansive,
        classification.noncontractive,
        classification.isometry,
        classification.is_bijection
    );
    let finding = !expectations_failed.is_empty();
    let report = ClassifyReport {
        space: args.space.as_ref().map(|s| s.to_string()).unwrap_or_else(|| format!("circle:{}", space.len())),
        map: args.map.clone(),
        n: space.len(),
        domain_size: map.domain().len(),
        expanding: classification.expanding_witness.as_ref().map(|w| LabelledWitness::of(&space, w)),
        contracting: classification.contracting_witness.as_ref().map(|w| LabelledWitness::of(&space, w)),
        exact_contracting_pair: find_contracting_pair(&space, &map),
        classification,
        plasticity,
        expectations_failed,
    };
    Outcome::new(finding, report, summary)
}

fn run_hunt(args: &HuntArgs) -> Result<Outcome, String> {
    let config = args.generator.config()?;
    let injected = args
        .inject
        .iter()
        .map(|path| {
            load_space(&SpaceSource::File(path.clone()), !args.no_validate, DEFAULT_TOL)
                .map(|s| (path.display().to_string(), s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = counterexample_hunt(&config, args.max_exhaustive, &injected, args.tol).map_err(|e| e.to_string())?;
    let summary = format!(
        "hunt: {} space(s) tested, {} excluded, {} counterexample(s)",
        report.spaces_tested,
        report.excluded.len(),
        report.noncontractive_nonisometries.len() + report.nonexpansive_nonisometries.len()
    );
    Outcome::new(report.found_counterexample(), &report, summary)
}

fn run_stress(args: &StressArgs) -> Result<Outcome, String> {
    let config = args.generator.config()?;
    let options = StressOptions {
        maps_per_space: args.maps_per_space,
        distribution: match args.maps {
            MapsArg::Uniform => MapDistribution::Uniform,
            MapsArg::Identity => MapDistribution::Identity,
        },
        exhaustive_max_n: args.exhaustive_max_n,
    };
    let report = theorem3_stress(&config, &options).map_err(|e| e.to_string())?;
    let summary = format!(
        "stress: {} sampled + {} exhaustive map(s), {} with an expanding pair, {} refutation(s)",
        report.sampled.maps,
        report.exhaustive.maps,
        report.sampled.with_expanding_pair + report.exhaustive.with_expanding_pair,
        report.refutations.len()
    );
    Outcome::new(report.refuted(), &report, summary)
}

#[derive(Serialize)]
struct ShiftExample {
    space: SpaceFile,
    map: MapFile,
}

fn run_example(args: &ExampleArgs) -> Result<Outcome, String> {
    if let Some(n) = parse_builtin(&args.which, "circle")? {
        let space = circle_example(n).map_err(|e| e.to_string())?;
        return Outcome::new(false, space.to_file(), format!("circle:{n}: {n} point(s)"));
    }
    if let Some(n) = parse_builtin(&args.which, "shift")? {
        let (space, map) = shift_map(n).map_err(|e| e.to_string())?;
        let example = ShiftExample {
            space: space.to_file(),
            map: MapFile { images: map.images().to_vec(), domain: Some(map.domain().to_vec()) },
        };
        return Outcome::new(false, example, format!("shift:{n} on circle:{}", n + 2));
    }
    Err(format!("unknown example {:?}: expected circle:N or shift:N", args.which))
}

/// Runs a parsed command. Usage errors become status 2 outcomes.
pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Net(a) => run_net(a),
        Command::Sequence(a) => run_sequence(a),
        Command::Classify(a) => run_classify(a),
        Command::Hunt(a) => run_hunt(a),
        Command::Stress(a) => run_stress(a),
        Command::Example(a) => run_example(a),
    };
    result.unwrap_or_else(Outcome::usage)
}

/// Writes the report as pretty JSON with a trailing newline.
pub fn write_report(path: &Path, report: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("JSON values always serialize");
    text.push('\n');
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let mut full = vec!["qmetric"];
        full.extend_from_slice(args);
        run(&Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn space_sources() {
        assert_eq!("circle:12".parse::<SpaceSource>().unwrap(), SpaceSource::Circle(12));
        assert!("circle:x".parse::<SpaceSource>().is_err());
        assert_eq!("a.json".parse::<SpaceSource>().unwrap(), SpaceSource::File("a.json".into()));
    }

    #[test]
    fn size_ranges() {
        assert_eq!("3..7".parse::<SizeRange>().unwrap(), SizeRange { min: 3, max: 7 });
        assert_eq!("3..=7".parse::<SizeRange>().unwrap(), SizeRange { min: 3, max: 7 });
        assert_eq!("5".parse::<SizeRange>().unwrap(), SizeRange { min: 5, max: 5 });
        assert!("a..b".parse::<SizeRange>().is_err());
    }

    #[test]
    fn point_lists() {
        assert_eq!(parse_points("1..3", 5).unwrap(), vec![PointId(0), PointId(1), PointId(2)]);
        assert_eq!(parse_points("2, 4", 5).unwrap(), vec![PointId(1), PointId(3)]);
        assert!(parse_points("0..3", 5).is_err());
        assert!(parse_points("1..6", 5).is_err());
        assert!(parse_points("x", 5).is_err());
    }

    #[test]
    fn shift_classification_report() {
        let out = run_args(&["classify", "--space", "circle:12", "--map", "shift:10"]);
        assert_eq!(out.status, Status::Clean);
        let c = &out.report["classification"];
        assert_eq!(c["noncontractive"], true);
        assert_eq!(c["isometry"], false);
        assert_eq!(out.report["expanding"]["x"], "p_1");
        assert_eq!(out.report["expanding"]["after"], 3.0);
    }

    #[test]
    fn shift_on_wrong_circle_is_usage_error() {
        let out = run_args(&["classify", "--space", "circle:11", "--map", "shift:10"]);
        assert_eq!(out.status, Status::Usage);
    }

    #[test]
    fn expectations_drive_exit_status() {
        let out = run_args(&["classify", "--map", "shift:5", "--expect-isometry"]);
        assert_eq!(out.status, Status::Finding);
        assert_eq!(out.report["expectations_failed"][0], "isometry");
        let out =
            run_args(&["classify", "--space", "circle:6", "--map", "identity", "--expect-isometry", "--plasticity"]);
        assert_eq!(out.status, Status::Clean);
        assert_eq!(out.report["plasticity"]["all_noncontractive_are_isometries"], true);
    }

    #[test]
    fn bad_inputs_are_usage_errors() {
        assert_eq!(run_args(&["verify", "--space", "/nonexistent/space.json"]).status, Status::Usage);
        assert_eq!(run_args(&["net", "--space", "circle:5", "--eps", "0"]).status, Status::Usage);
        assert_eq!(run_args(&["example", "torus:3"]).status, Status::Usage);
        assert_eq!(run_args(&["hunt", "--values", "int"]).status, Status::Usage);
        assert_eq!(run_args(&["hunt", "--n", "1..3"]).status, Status::Usage);
        assert_eq!(run_args(&["net", "--space", "circle:0", "--eps", "1"]).status, Status::Usage);
    }

    #[test]
    fn two_phase_net_requires_circle() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        circle_example(5).unwrap().write_json(&path).unwrap();
        let out = run_args(&["net", "--space", path.to_str().unwrap(), "--eps", "0.5", "--method", "two-phase"]);
        assert_eq!(out.status, Status::Usage);
        let out = run_args(&["net", "--space", "circle:50", "--eps", "0.5", "--method", "two-phase"]);
        assert_eq!(out.status, Status::Clean);
        assert_eq!(out.report["valid"], true);
    }
}
