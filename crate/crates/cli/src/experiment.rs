//! Experiment configs and runners behind the command-line interface.
//!
//! Every command reads a fully explicit config, runs library routines,
//! writes their reports to data files, and finishes with a summary JSON
//! whose verdicts are copied from those reports. Identical config and
//! seed produce byte-identical files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use cantorlab_core::conditional::{
    additivity_of_limits, conditional_martingale, conditional_trace, exceed_set,
    follower_martingale, martingale_check, upcrossing_measure, verdict, AdditivityReport,
    ConvergenceTrace, TraceConfig, Verdict,
};
use cantorlab_core::heavy::{
    discard_equivalence, enumerate_heavy, section_bound_check, EquivalenceReport, HeavyScan,
    SectionCheck,
};
use cantorlab_core::measures::{
    default_sequence, validate, Measure, MeasureConfig, MeasureError, MeasureSpec, OscillatingMeasure,
    SequenceConfig,
};
use cantorlab_core::sampling::{random_basic_set, random_family, random_test1, rng};
use cantorlab_core::testcalc::{
    fiber_integral, finite_deficiency, integral, make_product_test, product_construction,
    ratio_trim, ratio_trim_violations, sum_construction, EnumerationCode, TestError,
    TestLedgerRow,
};
use cantorlab_core::trimming::{
    coverage_check, trim, verify_bounds, CoverSequence, CoverageOutcome, GammaSpec, TrimConfig,
    TrimError,
};
use cantorlab_core::{BasicSet, BitString, PathSpec, ProductFn, Rat, RatInterval, MAX_DEPTH};

/// How a run ends: 0 ok, 1 config error, 2 bound violated, 3
/// precondition not met at the requested depth.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Io(std::io::Error),
    Unmet(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Unmet(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
            RunError::Unmet(m) => write!(f, "precondition not met: {m}"),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn from_measure(e: MeasureError) -> RunError {
    match e {
        MeasureError::InvalidConfig(m) => RunError::Config(m),
        other => RunError::Unmet(other.to_string()),
    }
}

fn from_trim(e: TrimError) -> RunError {
    match e {
        TrimError::InvalidConfig(m) => RunError::Config(m),
        TrimError::Measure(m) => from_measure(m),
        TrimError::NotStable(s) => RunError::Unmet(format!("set not stable in stripe {s}")),
    }
}

fn from_test(e: TestError) -> RunError {
    match e {
        TestError::Measure(m) => from_measure(m),
        other => RunError::Config(other.to_string()),
    }
}

/// Per-command report: `ok` holds exactly when no underlying module
/// report flagged a violation and no precondition fell through.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub command: &'static str,
    pub ok: bool,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unmet: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl Summary {
    fn new(command: &'static str) -> Self {
        Summary {
            command,
            ok: true,
            violations: Vec::new(),
            unmet: Vec::new(),
            notes: Vec::new(),
            seed: None,
            outputs: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if !self.violations.is_empty() {
            2
        } else if !self.unmet.is_empty() {
            3
        } else {
            0
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn write_file(outdir: &Path, name: &str, text: &str, s: &mut Summary) -> Result<(), RunError> {
    fs::write(outdir.join(name), text)?;
    s.outputs.push(name.to_string());
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, RunError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

fn depth_cap() -> Result<Option<usize>, RunError> {
    match std::env::var("CANTORLAB_MAXDEPTH") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(RunError::Config(format!("CANTORLAB_MAXDEPTH: {e}"))),
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|_| {
            RunError::Config(format!(
                "CANTORLAB_MAXDEPTH must be a nonnegative integer, got {v:?}"
            ))
        }),
    }
}

fn capped(depth: usize, cap: Option<usize>, s: &mut Summary) -> Result<usize, RunError> {
    let depth = match cap {
        Some(c) if depth > c => {
            s.notes
                .push(format!("depth {depth} capped to {c} by CANTORLAB_MAXDEPTH"));
            c
        }
        _ => depth,
    };
    if depth > MAX_DEPTH {
        return Err(RunError::Config(format!(
            "depth {depth} exceeds the bit-string limit {MAX_DEPTH}"
        )));
    }
    Ok(depth)
}

fn cell_label(b: &BitString) -> String {
    if b.is_empty() {
        "*".to_string()
    } else {
        b.to_string()
    }
}

fn default_trace_depth() -> usize {
    12
}

fn default_window() -> usize {
    8
}

fn default_tolerance() -> Rat {
    Rat::new(1, 64)
}

fn default_validate_depth() -> usize {
    6
}

fn default_martingale_depth() -> usize {
    8
}

fn default_thresholds() -> Vec<Rat> {
    vec![Rat::from_int(2), Rat::from_int(4)]
}

fn default_u() -> Rat {
    Rat::new(2, 5)
}

fn default_v() -> Rat {
    Rat::new(3, 5)
}

fn default_maxn() -> u32 {
    3
}

fn default_heavy_depth() -> usize {
    8
}

fn default_discard_trials() -> usize {
    50
}

fn default_discard_depth() -> usize {
    5
}

fn default_trim_depth() -> usize {
    10
}

fn default_vv_trials() -> usize {
    20
}

fn default_factor_depth() -> usize {
    2
}

fn default_kraft_depth() -> usize {
    6
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidateConfig {
    pub measure: MeasureConfig,
    #[serde(default = "default_validate_depth")]
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRunConfig {
    pub measure: MeasureConfig,
    pub path: PathSpec,
    pub a2: BitString,
    #[serde(default = "default_trace_depth")]
    pub maxdepth: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OscillateConfig {
    #[serde(default = "default_trace_depth")]
    pub maxdepth: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MartingaleConfig {
    pub measure: MeasureConfig,
    pub a2: BitString,
    #[serde(default = "default_martingale_depth")]
    pub depth: usize,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<Rat>,
    #[serde(default = "default_u")]
    pub u: Rat,
    #[serde(default = "default_v")]
    pub v: Rat,
    #[serde(default = "default_maxn")]
    pub maxn: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeavyConfig {
    pub measure: MeasureConfig,
    pub set: BasicSet,
    pub n: u32,
    #[serde(default = "default_heavy_depth")]
    pub maxdepth: usize,
    /// Optional path for a section bound check at maxdepth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscardConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Rat>,
    /// Explicit target sets; empty means randomized trials.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<BasicSet>,
    #[serde(default = "default_discard_trials")]
    pub trials: usize,
    #[serde(default = "default_discard_depth")]
    pub maxdepth: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub path1: PathSpec,
    pub path2: PathSpec,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrimRunConfig {
    pub measure: MeasureConfig,
    pub gamma: GammaSpec,
    pub covers: CoverSequence,
    pub epsilon: Rat,
    pub deltas: Vec<Rat>,
    #[serde(default = "default_trim_depth")]
    pub maxdepth: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coverage: Vec<CoveragePoint>,
    /// Count failed coverage as a violation instead of a note.
    #[serde(default)]
    pub require_coverage: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VvConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureConfig>,
    #[serde(default = "default_vv_trials")]
    pub trials: usize,
    #[serde(default = "default_factor_depth")]
    pub depth1: usize,
    #[serde(default = "default_factor_depth")]
    pub depth2: usize,
    #[serde(default = "default_factor_depth")]
    pub max_k: usize,
    #[serde(default = "default_kraft_depth")]
    pub kraft_depth: usize,
    #[serde(default)]
    pub seed: u64,
}

/// A complete experiment: command, measure, parameters, seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Validate(ValidateConfig),
    Trace(TraceRunConfig),
    Oscillate(OscillateConfig),
    Martingale(MartingaleConfig),
    Heavy(HeavyConfig),
    Discard(DiscardConfig),
    Trim(TrimRunConfig),
    Vv(VvConfig),
}

/// Run one experiment into `outdir`, ending with summary.json.
pub fn run_experiment(cfg: &ExperimentConfig, outdir: &Path) -> Result<Summary, RunError> {
    fs::create_dir_all(outdir)?;
    let cap = depth_cap()?;
    let summary = match cfg {
        ExperimentConfig::Validate(c) => cmd_validate(c, outdir, cap)?,
        ExperimentConfig::Trace(c) => cmd_trace(c, outdir, cap)?,
        ExperimentConfig::Oscillate(c) => cmd_oscillate(c, outdir, cap)?,
        ExperimentConfig::Martingale(c) => cmd_martingale(c, outdir, cap)?,
        ExperimentConfig::Heavy(c) => cmd_heavy(c, outdir, cap)?,
        ExperimentConfig::Discard(c) => cmd_discard(c, outdir, cap)?,
        ExperimentConfig::Trim(c) => cmd_trim(c, outdir, cap)?,
        ExperimentConfig::Vv(c) => cmd_vv(c, outdir, cap)?,
    };
    fs::write(outdir.join("summary.json"), pretty(&summary))?;
    Ok(summary)
}

fn cmd_validate(c: &ValidateConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("validate");
    let depth = capped(c.depth, cap, &mut s)?;
    let p = c.measure.build().map_err(from_measure)?;
    let report = validate(&*p, depth).map_err(from_measure)?;
    write_file(outdir, "validate.json", &pretty(&report.violations), &mut s)?;
    s.notes.push(format!(
        "all rectangles to depth {depth} checked, exact oracle: {}",
        report.exact
    ));
    for v in &report.violations {
        s.violations.push(format!(
            "{}: {} expected {}, got {}",
            v.rect, v.check, v.expected, v.got
        ));
    }
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn trace_csv(trace: &ConvergenceTrace, window: usize, tolerance: &Rat) -> String {
    let mut out = String::from("depth,lo,hi,verdict-so-far\n");
    for i in 0..trace.values.len() {
        let (d, iv) = &trace.values[i];
        let v = verdict(&trace.values[..=i], window, tolerance);
        out.push_str(&format!("{d},{},{},{}\n", iv.lo(), iv.hi(), v.label()));
    }
    out
}

#[derive(Serialize)]
struct TraceFile<'a> {
    path: String,
    a2: String,
    maxdepth: usize,
    values: &'a [(usize, RatInterval)],
    #[serde(flatten)]
    verdict: &'a Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    additivity: &'a Option<AdditivityReport>,
}

fn record_verdict(trace: &ConvergenceTrace, maxdepth: usize, s: &mut Summary) {
    match &trace.verdict {
        Verdict::Converged { limit } => s.notes.push(format!("converged to {limit}")),
        Verdict::Oscillating { low, high } => s
            .notes
            .push(format!("oscillating between {low} and {high}")),
        Verdict::Undecided => s
            .unmet
            .push(format!("verdict undecided at depth {maxdepth}")),
    }
}

fn cmd_trace(c: &TraceRunConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("trace");
    let maxdepth = capped(c.maxdepth, cap, &mut s)?;
    if c.tolerance <= Rat::zero() {
        return Err(RunError::Config("tolerance must be positive".into()));
    }
    let p = c.measure.build().map_err(from_measure)?;
    let tc = TraceConfig {
        maxdepth,
        window: c.window,
        tolerance: c.tolerance.clone(),
    };
    let trace = conditional_trace(&*p, &c.path, &c.a2, &tc).map_err(from_measure)?;
    write_file(outdir, "trace.csv", &trace_csv(&trace, tc.window, &tc.tolerance), &mut s)?;
    record_verdict(&trace, maxdepth, &mut s);
    let additivity = if matches!(trace.verdict, Verdict::Converged { .. }) {
        let mut parents = vec![BitString::empty()];
        if !c.a2.is_empty() {
            parents.push(c.a2);
        }
        Some(additivity_of_limits(&*p, &c.path, &parents, &tc).map_err(from_measure)?)
    } else {
        None
    };
    if let Some(rep) = &additivity {
        for row in &rep.rows {
            if !row.ok {
                s.violations.push(format!(
                    "additivity at {}: parent limit {} misses child sum {}",
                    cell_label(&row.parent),
                    row.parent_limit,
                    row.child_sum
                ));
            }
        }
        for u in &rep.undecided {
            s.unmet.push(format!(
                "additivity undecided at parent {}",
                cell_label(u)
            ));
        }
    }
    let file = TraceFile {
        path: c.path.label(),
        a2: cell_label(&c.a2),
        maxdepth,
        values: &trace.values,
        verdict: &trace.verdict,
        additivity: &additivity,
    };
    write_file(outdir, "trace.json", &pretty(&file), &mut s)?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn cmd_oscillate(c: &OscillateConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("oscillate");
    let maxdepth = capped(c.maxdepth, cap, &mut s)?;
    let p = OscillatingMeasure;
    let tc = TraceConfig {
        maxdepth,
        window: default_window(),
        tolerance: default_tolerance(),
    };
    let a2: BitString = "1".parse().expect("literal");
    let trace = conditional_trace(&p, &PathSpec::Zeros, &a2, &tc).map_err(from_measure)?;
    write_file(outdir, "oscillate.csv", &trace_csv(&trace, tc.window, &tc.tolerance), &mut s)?;
    let high = Rat::new(2, 3);
    let low = Rat::new(1, 3);
    for (d, iv) in &trace.values {
        let want = if d % 2 == 0 { &high } else { &low };
        if !(iv.is_point() && iv.lo() == want) {
            s.violations
                .push(format!("depth {d}: conditional {iv}, expected exactly {want}"));
        }
    }
    match &trace.verdict {
        Verdict::Oscillating { low, high } => s
            .notes
            .push(format!("oscillating between {low} and {high}")),
        other if maxdepth < 6 => s.unmet.push(format!(
            "depth {maxdepth} too shallow for a verdict, got {}",
            other.label()
        )),
        other => s.violations.push(format!(
            "verdict {}, expected oscillating",
            other.label()
        )),
    }
    #[derive(Serialize)]
    struct OscillateFile<'a> {
        values: &'a [(usize, RatInterval)],
        #[serde(flatten)]
        verdict: &'a Verdict,
        expected: [&'a str; 2],
    }
    let file = OscillateFile {
        values: &trace.values,
        verdict: &trace.verdict,
        expected: ["2/3 at even depths", "1/3 at odd depths"],
    };
    write_file(outdir, "oscillate.json", &pretty(&file), &mut s)?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

#[derive(Serialize)]
struct MaximalRow {
    c: Rat,
    exceed_measure: Rat,
    bound: Rat,
    ok: bool,
    cells: Vec<BitString>,
}

#[derive(Serialize)]
struct UpcrossingRow {
    n: u32,
    measure: Rat,
    bound: Rat,
    ok: bool,
}

fn cmd_martingale(
    c: &MartingaleConfig,
    outdir: &Path,
    cap: Option<usize>,
) -> Result<Summary, RunError> {
    let mut s = Summary::new("martingale");
    let depth = capped(c.depth, cap, &mut s)?;
    if c.thresholds.iter().any(|t| *t <= Rat::zero()) {
        return Err(RunError::Config("thresholds must be positive".into()));
    }
    if !(Rat::zero() < c.u && c.u < c.v) {
        return Err(RunError::Config(format!(
            "need 0 < u < v, got u = {}, v = {}",
            c.u, c.v
        )));
    }
    let p = c.measure.build().map_err(from_measure)?;
    let m = conditional_martingale(&*p, &c.a2, depth).map_err(from_measure)?;
    let p1 = cantorlab_core::measures::MarginalSeq(&*p);

    let mut csv = String::from("cell,value\n");
    for (cell, v) in m.cells() {
        csv.push_str(&format!(
            "{},{}\n",
            cell_label(&cell),
            v.map(|r| r.to_string()).unwrap_or_default()
        ));
    }
    write_file(outdir, "martingale.csv", &csv, &mut s)?;

    let check = martingale_check(&m, &p1).map_err(from_measure)?;
    for viol in &check.violations {
        s.violations.push(format!(
            "martingale identity at {}: weighted parent {} vs children {}",
            cell_label(&viol.cell),
            viol.lhs,
            viol.rhs
        ));
    }

    let mut maximal = Vec::new();
    match m.root().cloned() {
        None => s.unmet.push("zero marginal mass at the root".into()),
        Some(root) => {
            for cv in &c.thresholds {
                let es = exceed_set(&m, cv, &p1).map_err(from_measure)?;
                let bound = &root / cv;
                let ok = es.measure <= bound;
                if !ok {
                    s.violations.push(format!(
                        "maximal inequality at c = {cv}: exceed mass {} above {bound}",
                        es.measure
                    ));
                }
                maximal.push(MaximalRow {
                    c: cv.clone(),
                    exceed_measure: es.measure,
                    bound,
                    ok,
                    cells: es.cells,
                });
            }
        }
    }

    let run = follower_martingale(&m, &c.u, &c.v);
    let ratio = &c.u / &c.v;
    let mut upcrossings = Vec::new();
    for n in 1..=c.maxn {
        let measure = upcrossing_measure(&run, &p1, n).map_err(from_measure)?;
        let bound = ratio.pow(n as i32);
        let ok = measure <= bound;
        if !ok {
            s.violations.push(format!(
                "upcrossing bound at n = {n}: mass {measure} above {bound}"
            ));
        }
        upcrossings.push(UpcrossingRow {
            n,
            measure,
            bound,
            ok,
        });
    }

    #[derive(Serialize)]
    struct MartingaleFile<'a> {
        a2: String,
        depth: usize,
        identity: &'a cantorlab_core::conditional::MartingaleReport,
        maximal: &'a [MaximalRow],
        u: &'a Rat,
        v: &'a Rat,
        upcrossings: &'a [UpcrossingRow],
    }
    let file = MartingaleFile {
        a2: cell_label(&c.a2),
        depth,
        identity: &check,
        maximal: &maximal,
        u: &c.u,
        v: &c.v,
        upcrossings: &upcrossings,
    };
    write_file(outdir, "martingale.json", &pretty(&file), &mut s)?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn cmd_heavy(c: &HeavyConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("heavy");
    let maxdepth = capped(c.maxdepth, cap, &mut s)?;
    let p = c.measure.build().map_err(from_measure)?;
    let scan = enumerate_heavy(&*p, &c.set, c.n, maxdepth).map_err(from_measure)?;
    if !scan.ok {
        s.violations.push(format!(
            "union of heavy intervals has mass {}, above {}",
            scan.union_measure, scan.bound
        ));
    }
    s.notes.push(format!(
        "{} maximal heavy intervals, union mass {}, bound {}",
        scan.heavy.len(),
        scan.union_measure,
        scan.bound
    ));
    let section = match &c.path {
        None => None,
        Some(path) => {
            let sec = section_bound_check(&*p, &c.set, c.n, path, maxdepth).map_err(from_measure)?;
            match &sec {
                SectionCheck::InsideHeavy { interval } => s.notes.push(format!(
                    "path enters heavy interval {interval}, section bound not claimed"
                )),
                SectionCheck::Checked {
                    section_mass, ok, ..
                } => {
                    if *ok {
                        s.notes
                            .push(format!("section mass along path: {section_mass}"));
                    } else {
                        s.violations.push(format!(
                            "section mass {section_mass} above 2^-{} outside heavy intervals",
                            c.n
                        ));
                    }
                }
            }
            Some(sec)
        }
    };
    #[derive(Serialize)]
    struct HeavyFile<'a> {
        #[serde(flatten)]
        scan: &'a HeavyScan,
        #[serde(skip_serializing_if = "Option::is_none")]
        section: &'a Option<SectionCheck>,
    }
    write_file(
        outdir,
        "heavy.json",
        &pretty(&HeavyFile {
            scan: &scan,
            section: &section,
        }),
        &mut s,
    )?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn cmd_discard(c: &DiscardConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("discard");
    let maxdepth = capped(c.maxdepth, cap, &mut s)?;
    let explicit_depth = c
        .sets
        .iter()
        .flat_map(|u| u.rects().iter().map(|r| r.a1.len()))
        .max()
        .unwrap_or(0);
    let needed = maxdepth.max(explicit_depth).max(1);
    let cfg = match (&c.seq, &c.alpha) {
        (None, None) => default_sequence(needed),
        (Some(a), Some(al)) => {
            SequenceConfig::new(a.clone(), al.clone()).map_err(from_measure)?
        }
        _ => {
            return Err(RunError::Config(
                "seq and alpha must be given together".into(),
            ))
        }
    };
    let targets: Vec<BasicSet> = if !c.sets.is_empty() {
        c.sets.clone()
    } else {
        s.seed = Some(c.seed);
        let mut r = rng(c.seed);
        (0..c.trials)
            .map(|t| random_basic_set(&mut r, maxdepth, 1 + t % 4))
            .collect()
    };
    #[derive(Serialize)]
    struct DiscardRow {
        set: BasicSet,
        #[serde(flatten)]
        report: EquivalenceReport,
    }
    let mut rows = Vec::with_capacity(targets.len());
    for u in targets {
        let report = discard_equivalence(&u, &cfg).map_err(from_measure)?;
        if !report.ok {
            s.violations.push(format!(
                "masses differ after discarding below the cut for {u}: {} vs {}",
                report.segments_mass, report.uniform_mass
            ));
        }
        rows.push(DiscardRow { set: u, report });
    }
    s.notes.push(format!("{} sets checked", rows.len()));
    write_file(outdir, "discard.json", &pretty(&rows), &mut s)?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn cmd_trim(c: &TrimRunConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("trim");
    let maxdepth = capped(c.maxdepth, cap, &mut s)?;
    if c.covers.is_empty() {
        return Err(RunError::Config("cover sequence is empty".into()));
    }
    let tc = TrimConfig::new(c.epsilon.clone(), c.deltas.clone(), maxdepth).map_err(from_trim)?;
    let p: Arc<dyn Measure> = Arc::from(c.measure.build().map_err(from_measure)?);
    let gamma = c.gamma.build(p.clone()).map_err(from_measure)?;
    let result = trim(&*p, &*gamma, &c.covers, &tc).map_err(from_trim)?;
    let bounds = verify_bounds(&result, &*p).map_err(from_measure)?;

    let mut csv = String::from("stage,set,measure,bound,ok\n");
    for row in &bounds.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.stage, row.set, row.measure, row.bound, row.ok
        ));
        if !row.ok {
            s.violations.push(format!(
                "stage {}: P({}) = {} above {}",
                row.stage, row.set, row.measure, row.bound
            ));
        }
    }
    write_file(outdir, "ledger.csv", &csv, &mut s)?;

    #[derive(Serialize)]
    struct CoverageRow {
        path1: String,
        path2: String,
        k: usize,
        #[serde(flatten)]
        outcome: CoverageOutcome,
    }
    let mut coverage = Vec::with_capacity(c.coverage.len());
    for pt in &c.coverage {
        if pt.k == 0 || pt.k > c.covers.len() {
            return Err(RunError::Config(format!(
                "coverage stage {} outside 1..={}",
                pt.k,
                c.covers.len()
            )));
        }
        let outcome =
            coverage_check(&result, &*p, &pt.path1, &pt.path2, pt.k).map_err(from_measure)?;
        match &outcome {
            CoverageOutcome::Covered { .. } => {}
            CoverageOutcome::NotInCover => s.notes.push(format!(
                "point ({}, {}) is not in the stage-{} cover",
                pt.path1, pt.path2, pt.k
            )),
            CoverageOutcome::DepthExhausted { .. } => {
                let msg = format!(
                    "point ({}, {}) not covered at stage {} within depth {maxdepth}",
                    pt.path1, pt.path2, pt.k
                );
                if c.require_coverage {
                    s.violations.push(msg);
                } else {
                    s.notes.push(msg);
                }
            }
        }
        coverage.push(CoverageRow {
            path1: pt.path1.label(),
            path2: pt.path2.label(),
            k: pt.k,
            outcome,
        });
    }

    #[derive(Serialize)]
    struct TrimFile<'a> {
        gamma: &'a GammaSpec,
        config: &'a TrimConfig,
        covers: &'a CoverSequence,
        stages: &'a [cantorlab_core::trimming::StageRecord],
        u_hat: &'a [BasicSet],
        bounds: &'a cantorlab_core::trimming::BoundReport,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        coverage: Vec<CoverageRow>,
    }
    let file = TrimFile {
        gamma: &c.gamma,
        config: &result.cfg,
        covers: &result.covers,
        stages: &result.stages,
        u_hat: &result.u_hat,
        bounds: &bounds,
        coverage,
    };
    write_file(outdir, "trim.json", &pretty(&file), &mut s)?;
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn cmd_vv(c: &VvConfig, outdir: &Path, cap: Option<usize>) -> Result<Summary, RunError> {
    let mut s = Summary::new("vv");
    s.seed = Some(c.seed);
    for (name, d) in [
        ("depth1", c.depth1),
        ("depth2", c.depth2),
        ("max_k", c.max_k),
    ] {
        if d > 8 {
            return Err(RunError::Config(format!(
                "{name} = {d} makes the family tables explode, keep it at most 8"
            )));
        }
    }
    let kraft_depth = capped(c.kraft_depth, cap, &mut s)?;
    if kraft_depth > 10 {
        return Err(RunError::Config(format!(
            "kraft_depth = {kraft_depth} enumerates 2^{kraft_depth} strings, keep it at most 10"
        )));
    }
    let measure = c
        .measure
        .clone()
        .unwrap_or_else(|| MeasureSpec::Uniform.into());
    let p = measure.build().map_err(from_measure)?;
    let mut r = rng(c.seed);
    let a: Vec<BitString> = (0..1u64 << kraft_depth)
        .map(|i| BitString::from_index(kraft_depth, i))
        .collect();

    let mut ledger: Vec<TestLedgerRow> = Vec::new();
    let mut dump: Option<ProductFn> = None;
    for t in 0..c.trials {
        let t1 = random_test1(&mut r, &*p, c.depth1).map_err(from_measure)?;
        let fam = random_family(&mut r, &*p, c.depth1, c.depth2, c.max_k).map_err(from_measure)?;

        let prod = product_construction(&t1, &fam);
        let prod_int = integral(&prod, &*p).map_err(from_measure)?;
        ledger.push(TestLedgerRow::new("product", prod_int, Rat::one()));

        let sum = sum_construction(&t1, &fam);
        let sum_int = integral(&sum, &*p).map_err(from_measure)?;
        ledger.push(TestLedgerRow::new("sum", sum_int, Rat::one()));

        let tp = make_product_test(prod.clone(), &*p).map_err(from_measure)?;
        let d = (t as i64 % 4) - 2;
        let rt = ratio_trim(&tp, d, 0, &*p).map_err(from_measure)?;
        for msg in ratio_trim_violations(&tp, &rt, d, 0, &*p).map_err(from_measure)? {
            s.violations.push(format!("trial {t}: {msg}"));
        }
        let mut worst = Rat::zero();
        for i1 in 0..1u64 << c.depth1 {
            let prefix = BitString::from_index(c.depth1, i1);
            if let Some(iv) =
                fiber_integral(&*p, &prefix, &rt.fibers[i1 as usize]).map_err(from_measure)?
            {
                worst = worst.max(iv);
            }
        }
        ledger.push(TestLedgerRow::new("ratio_trim", worst, Rat::one()));

        let x = a[r.gen_range(0..a.len())];
        let fd = finite_deficiency(&x, &a, &EnumerationCode).map_err(from_test)?;
        ledger.push(TestLedgerRow::new(
            "deficiency_weight",
            fd.weight,
            Rat::from_int(a.len() as i64),
        ));

        if t == 0 {
            dump = Some(prod);
        }
    }
    for row in &ledger {
        if !row.ok {
            s.violations.push(format!(
                "{}: integral {} above {}",
                row.construction, row.integral, row.bound
            ));
        }
    }
    if let Some(f) = &dump {
        let mut csv = String::from("cell,value\n");
        for (rect, v) in f.cells() {
            csv.push_str(&format!("{rect},{v}\n"));
        }
        write_file(outdir, "testdump.csv", &csv, &mut s)?;
    }
    #[derive(Serialize)]
    struct VvFile<'a> {
        seed: u64,
        measure: &'a str,
        trials: usize,
        rows: &'a [TestLedgerRow],
    }
    let file = VvFile {
        seed: c.seed,
        measure: measure.measure.label(),
        trials: c.trials,
        rows: &ledger,
    };
    write_file(outdir, "vv.json", &pretty(&file), &mut s)?;
    s.notes
        .push(format!("{} ledger rows over {} trials", ledger.len(), c.trials));
    s.ok = s.violations.is_empty() && s.unmet.is_empty();
    Ok(s)
}

fn to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    num::rational::BigRational::new(r.numer().clone(), r.denom().clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Turn a trace CSV into gnuplot-ready columns: depth, midpoint, lo,
/// hi, plus comment annotations for the settled bands. Empty input
/// yields empty output.
pub fn plotdata(input: &Path, output: Option<&Path>) -> Result<(), RunError> {
    let text = fs::read_to_string(input)?;
    let mut values: Vec<(usize, RatInterval)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("depth")) {
            continue;
        }
        let mut parts = line.split(',');
        let bad = || RunError::Config(format!("{}: malformed row {:?}", input.display(), line));
        let d: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let lo: Rat = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let hi: Rat = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        values.push((d, RatInterval::new(lo, hi)));
    }
    let mut out = String::new();
    if !values.is_empty() {
        out.push_str("# depth midpoint lo hi\n");
        for (d, iv) in &values {
            out.push_str(&format!(
                "{d} {:.12} {:.12} {:.12}\n",
                to_f64(&iv.midpoint()),
                to_f64(iv.lo()),
                to_f64(iv.hi())
            ));
        }
        match verdict(&values, default_window(), &default_tolerance()) {
            Verdict::Converged { limit } => out.push_str(&format!(
                "# limit {:.12} {:.12}\n",
                to_f64(limit.lo()),
                to_f64(limit.hi())
            )),
            Verdict::Oscillating { low, high } => {
                out.push_str(&format!(
                    "# band {:.12} {:.12}\n",
                    to_f64(low.lo()),
                    to_f64(low.hi())
                ));
                out.push_str(&format!(
                    "# band {:.12} {:.12}\n",
                    to_f64(high.lo()),
                    to_f64(high.hi())
                ));
            }
            Verdict::Undecided => {}
        }
    }
    match output {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, out)?;
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn severity(code: u8) -> u8 {
    match code {
        0 => 0,
        3 => 1,
        2 => 2,
        _ => 3,
    }
}

fn worse(a: u8, b: u8) -> u8 {
    if severity(b) > severity(a) {
        b
    } else {
        a
    }
}

#[derive(Serialize)]
struct SuiteRow {
    name: String,
    command: String,
    ok: bool,
    exit: u8,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    unmet: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Run every .json experiment config in a directory, each into its own
/// subdirectory of `outdir`, and aggregate into suite.json. Returns the
/// worst exit code across experiments.
pub fn run_suite(configdir: &Path, outdir: &Path) -> Result<u8, RunError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(configdir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    fs::create_dir_all(outdir)?;

    let mut rows = Vec::with_capacity(entries.len());
    let mut exit = 0u8;
    for path in &entries {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let row = match read_json::<ExperimentConfig>(path)
            .and_then(|cfg| run_experiment(&cfg, &outdir.join(&name)))
        {
            Ok(summary) => SuiteRow {
                name: name.clone(),
                command: summary.command.to_string(),
                ok: summary.ok,
                exit: summary.exit_code(),
                violations: summary.violations,
                unmet: summary.unmet,
                error: None,
            },
            Err(e) => SuiteRow {
                name: name.clone(),
                command: String::new(),
                ok: false,
                exit: e.exit_code(),
                violations: Vec::new(),
                unmet: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        println!(
            "{name}: {}",
            if row.ok {
                "ok".to_string()
            } else {
                format!("exit {}", row.exit)
            }
        );
        exit = worse(exit, row.exit);
        rows.push(row);
    }

    #[derive(Serialize)]
    struct SuiteFile {
        experiments: Vec<SuiteRow>,
        ok: bool,
        exit: u8,
    }
    let ok = rows.iter().all(|r| r.ok);
    let file = SuiteFile {
        experiments: rows,
        ok,
        exit,
    };
    fs::write(outdir.join("suite.json"), pretty(&file))?;
    Ok(exit)
}
