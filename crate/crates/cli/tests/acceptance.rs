//! Acceptance gate for the workspace: one printed line per check.
//!
//! Every check recomputes its claim from scratch with exact rational
//! arithmetic; the only tolerances are the wall-clock budgets and the
//! pinned error bound in the limit check.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cantorlab_core::conditional::{
    conditional_martingale, conditional_trace, exceed_set, follower_martingale, martingale_check,
    upcrossing_measure, TraceConfig, Verdict,
};
use cantorlab_core::heavy::{discard_equivalence, enumerate_heavy};
use cantorlab_core::measures::{
    default_sequence, set_mass, validate, BernoulliSeq, KernelMeasure, MarginalSeq, Measure,
    OscillatingMeasure, PointMassSeq, ProductMeasure, SegmentsMeasure, StaircaseMeasure,
    UniformMeasure, UniformSeq,
};
use cantorlab_core::sampling::{
    random_basic_set, random_cover_sequence, random_family, random_set_with_mass_at_most,
    random_test1, rng,
};
use cantorlab_core::testcalc::{
    fiber_integral, finite_deficiency, integral, make_product_test, product_construction,
    ratio_trim, ratio_trim_violations, sum_construction, CodeLengthProvider, EnumerationCode,
    UniformCode,
};
use cantorlab_core::trimming::{
    coverage_check, trim, verify_bounds, AdversarialGamma, CoverSequence, HonestGamma, Slowdown,
    TrimConfig,
};
use cantorlab_core::{BasicSet, BitString, PathSpec, Rat, Rect};

const VALIDATE_BUDGET: Duration = Duration::from_secs(10);
const HEAVY_BUDGET: Duration = Duration::from_secs(60);

fn b(s: &str) -> BitString {
    s.parse().expect("test literal")
}

fn path(s: &str) -> PathSpec {
    s.parse().expect("test literal")
}

/// The six example families, all with exact oracles.
fn example_measures() -> Vec<(&'static str, Arc<dyn Measure>)> {
    let bern = |n, d| Box::new(BernoulliSeq::new(Rat::new(n, d)).expect("parameter in [0, 1]"));
    vec![
        ("uniform", Arc::new(UniformMeasure)),
        (
            "product",
            Arc::new(ProductMeasure::new(bern(1, 3), bern(2, 5))),
        ),
        ("oscillating", Arc::new(OscillatingMeasure)),
        (
            "staircase",
            Arc::new(StaircaseMeasure::new(default_sequence(12))),
        ),
        (
            "segments",
            Arc::new(SegmentsMeasure::new(default_sequence(12))),
        ),
        (
            "kernel",
            Arc::new(
                KernelMeasure::new(
                    Box::new(UniformSeq),
                    2,
                    vec![
                        Box::new(UniformSeq),
                        bern(1, 3),
                        bern(2, 5),
                        Box::new(PointMassSeq::new(PathSpec::Ones)),
                    ],
                )
                .expect("fiber count matches depth"),
            ),
        ),
    ]
}

fn check_measure_validity() -> Result<String, String> {
    let start = Instant::now();
    let results: Vec<(&'static str, Result<_, _>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = example_measures()
            .into_iter()
            .map(|(name, p)| scope.spawn(move || (name, validate(&*p, 8))))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed();
    for (name, r) in &results {
        let report = r.as_ref().map_err(|e| format!("{name}: {e}"))?;
        if !report.exact {
            return Err(format!("{name}: oracle not exact"));
        }
        if !report.ok() {
            return Err(format!(
                "{name}: {} additivity or normalization violations, first: {:?}",
                report.violations.len(),
                report.violations.first()
            ));
        }
    }
    if elapsed > VALIDATE_BUDGET {
        return Err(format!(
            "validation took {elapsed:.2?}, budget {VALIDATE_BUDGET:?}"
        ));
    }
    Ok(format!(
        "{} families exact and additive to depth 8 in {elapsed:.2?}",
        results.len()
    ))
}

fn check_oscillating_conditional() -> Result<String, String> {
    let cfg = TraceConfig {
        maxdepth: 12,
        window: 8,
        tolerance: Rat::new(1, 64),
    };
    let trace = conditional_trace(&OscillatingMeasure, &PathSpec::Zeros, &b("1"), &cfg)
        .map_err(|e| e.to_string())?;
    if trace.values.len() != 13 {
        return Err(format!("expected 13 trace entries, got {}", trace.values.len()));
    }
    let high = Rat::new(2, 3);
    let low = Rat::new(1, 3);
    for (d, iv) in &trace.values {
        let want = if d % 2 == 0 { &high } else { &low };
        if !(iv.is_point() && iv.lo() == want) {
            return Err(format!("depth {d}: value {iv}, expected exactly {want}"));
        }
    }
    match &trace.verdict {
        Verdict::Oscillating { low: l, high: h }
            if l.is_point() && l.lo() == &low && h.is_point() && h.lo() == &high =>
        {
            Ok("alternates exactly between 2/3 and 1/3 for depths 0..12".to_string())
        }
        other => Err(format!("verdict {other:?}, expected the two exact bands")),
    }
}

fn check_three_quarters_limit() -> Result<String, String> {
    let cases: [(&str, Box<dyn Measure>, PathSpec); 2] = [
        (
            "staircase",
            Box::new(StaircaseMeasure::new(default_sequence(12))),
            PathSpec::Zeros,
        ),
        (
            "segments",
            Box::new(SegmentsMeasure::new(default_sequence(12))),
            path("cycle:01"),
        ),
    ];
    let cfg = TraceConfig {
        maxdepth: 12,
        window: 8,
        tolerance: Rat::new(1, 64),
    };
    let target = Rat::new(3, 4);
    for (name, p, pth) in &cases {
        let trace =
            conditional_trace(&**p, pth, &b("1"), &cfg).map_err(|e| format!("{name}: {e}"))?;
        for (d, iv) in &trace.values {
            if *d < 6 {
                continue;
            }
            if !iv.is_point() {
                return Err(format!("{name} depth {d}: value {iv} is not exact"));
            }
            let diff = (iv.lo() - &target).abs();
            let bound = Rat::pow2(-(*d as i64 + 2));
            if diff > bound {
                return Err(format!(
                    "{name} depth {d}: |{} - 3/4| = {diff} exceeds {bound}",
                    iv.lo()
                ));
            }
        }
    }
    Ok("both conditionals within 2^-(d+2) of 3/4 for depths 6..12".to_string())
}

fn check_sequence_locality() -> Result<String, String> {
    let short = SegmentsMeasure::new(default_sequence(6));
    let long = SegmentsMeasure::new(default_sequence(12));
    let mut checked = 0usize;
    for d1 in 0..=6usize {
        for a1 in BitString::all_at_depth(d1) {
            for d2 in 0..=6usize {
                for a2 in BitString::all_at_depth(d2) {
                    let rect = Rect::new(a1, a2);
                    let lhs = short.mass(&rect).map_err(|e| format!("{rect}: {e}"))?;
                    let rhs = long.mass(&rect).map_err(|e| format!("{rect}: {e}"))?;
                    if lhs != rhs {
                        return Err(format!("{rect}: {lhs} from 6 terms, {rhs} from 12"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} rectangle masses identical from 6 and 12 sequence terms"
    ))
}

fn check_martingale_bounds() -> Result<String, String> {
    let thresholds = [Rat::new(1, 4), Rat::new(1, 2), Rat::new(3, 4)];
    let ratios = [(Rat::new(1, 3), Rat::new(2, 3)), (Rat::new(2, 5), Rat::new(3, 5))];
    let mut nonempty_exceed = 0usize;
    let mut deep_upcrossings = 0usize;
    let mut checks = 0usize;
    for (name, p) in example_measures() {
        for a2 in [b("1"), b("11")] {
            let m = conditional_martingale(&*p, &a2, 10).map_err(|e| format!("{name}: {e}"))?;
            let p1 = MarginalSeq(&*p);
            let identity = martingale_check(&m, &p1).map_err(|e| format!("{name}: {e}"))?;
            if !identity.ok() {
                return Err(format!(
                    "{name}/{a2}: {} averaging violations",
                    identity.violations.len()
                ));
            }
            let root = m
                .root()
                .cloned()
                .ok_or_else(|| format!("{name}: no root mass"))?;
            for c in &thresholds {
                let es = exceed_set(&m, c, &p1).map_err(|e| format!("{name}: {e}"))?;
                if es.measure > &root / c {
                    return Err(format!(
                        "{name}/{a2}: exceed mass {} above {}/{c}",
                        es.measure, root
                    ));
                }
                nonempty_exceed += usize::from(!es.cells.is_empty());
                checks += 1;
            }
            for (u, v) in &ratios {
                let run = follower_martingale(&m, u, v);
                for n in 1..=4u32 {
                    let mass =
                        upcrossing_measure(&run, &p1, n).map_err(|e| format!("{name}: {e}"))?;
                    let bound = (u / v).pow(n as i32);
                    if mass > bound {
                        return Err(format!(
                            "{name}/{a2}: mass {mass} of {n} upcrossings above {bound}"
                        ));
                    }
                    deep_upcrossings += usize::from(n >= 2 && mass > Rat::zero());
                    checks += 1;
                }
            }
        }
    }
    if nonempty_exceed == 0 || deep_upcrossings == 0 {
        return Err("bounds never exercised on a nonempty witness".to_string());
    }
    Ok(format!(
        "{checks} exact bounds on depth-10 scans, {nonempty_exceed} nonempty exceed sets, \
         {deep_upcrossings} multi-upcrossing events"
    ))
}

fn check_heavy_union_bound() -> Result<String, String> {
    let start = Instant::now();
    let mut scans = 0usize;
    let mut with_heavy = 0usize;
    for (mi, (name, p)) in example_measures().into_iter().enumerate() {
        let mut r = rng(1000 + mi as u64);
        for t in 0..1000usize {
            let n = 1 + (t % 3) as u32;
            let cap = Rat::pow2(-2 * n as i64);
            let u = random_set_with_mass_at_most(&mut r, &*p, &cap, 4, 3)
                .map_err(|e| format!("{name}: {e}"))?;
            let scan = enumerate_heavy(&*p, &u, n, 6).map_err(|e| format!("{name}: {e}"))?;
            if !scan.ok {
                return Err(format!(
                    "{name} trial {t}: heavy union mass {} above {}",
                    scan.union_measure, scan.bound
                ));
            }
            scans += 1;
            with_heavy += usize::from(!scan.heavy.is_empty());
        }
    }
    let elapsed = start.elapsed();
    if elapsed > HEAVY_BUDGET {
        return Err(format!("{scans} scans took {elapsed:.2?}, budget {HEAVY_BUDGET:?}"));
    }
    Ok(format!(
        "{scans} scans, {with_heavy} with nonempty heavy families, all unions within bound, \
         {elapsed:.2?}"
    ))
}

fn check_discard_equivalence() -> Result<String, String> {
    let cfg = default_sequence(6);
    let mut r = rng(777);
    let mut nonvacuous = 0usize;
    for t in 0..200usize {
        let u = random_basic_set(&mut r, 6, 1 + t % 4);
        let rep = discard_equivalence(&u, &cfg).map_err(|e| format!("trial {t}: {e}"))?;
        if !rep.ok {
            return Err(format!(
                "trial {t}: {} for the segment measure, {} for the uniform one",
                rep.segments_mass, rep.uniform_mass
            ));
        }
        nonvacuous += usize::from(rep.uniform_mass > Rat::zero());
    }
    if nonvacuous == 0 {
        return Err("every discarded set had mass zero".to_string());
    }
    Ok(format!(
        "200 sets agree exactly after the cut, {nonvacuous} with positive remaining mass"
    ))
}

fn check_trimming_ledger() -> Result<String, String> {
    let start = Instant::now();
    let epsilon = Rat::new(1, 4);
    let cfg = TrimConfig::with_default_deltas(epsilon.clone(), 4, 5);
    let two_delta_sum: Rat = cfg
        .deltas
        .iter()
        .fold(Rat::zero(), |acc, d| acc + d.clone())
        * Rat::from_int(2);
    let cap = &epsilon + &two_delta_sum;
    let three_eps = Rat::from_int(3) * epsilon.clone();
    if cap > three_eps {
        return Err(format!("schedule cap {cap} above {three_eps}"));
    }
    let mut runs = 0usize;
    for (mi, (name, p)) in example_measures().into_iter().enumerate() {
        let mut r = rng(800 + mi as u64);
        let decoy: Arc<dyn Measure> = if name == "uniform" {
            Arc::new(OscillatingMeasure)
        } else {
            Arc::new(UniformMeasure)
        };
        for t in 0..200usize {
            let covers = random_cover_sequence(&mut r, 4, 4, 2);
            let slowdown = if t % 2 == 0 { Slowdown::None } else { Slowdown::Pow2 };
            let honest = HonestGamma::new(p.clone(), slowdown);
            let result =
                trim(&*p, &honest, &covers, &cfg).map_err(|e| format!("{name} trial {t}: {e}"))?;
            let report =
                verify_bounds(&result, &*p).map_err(|e| format!("{name} trial {t}: {e}"))?;
            if !report.ok() {
                let bad = report.rows.iter().find(|row| !row.ok).unwrap();
                return Err(format!(
                    "{name} trial {t}: {} has mass {} above {}",
                    bad.set, bad.measure, bad.bound
                ));
            }
            let final_mass =
                set_mass(&*p, result.u_hat(4)).map_err(|e| format!("{name} trial {t}: {e}"))?;
            if final_mass > cap {
                return Err(format!(
                    "{name} trial {t}: trimmed mass {final_mass} above {cap}"
                ));
            }
            let adversarial =
                AdversarialGamma::new(p.clone(), decoy.clone(), PathSpec::Zeros, Slowdown::Pow2);
            let result = trim(&*p, &adversarial, &covers, &cfg)
                .map_err(|e| format!("{name} trial {t} (adversarial): {e}"))?;
            let report = verify_bounds(&result, &*p)
                .map_err(|e| format!("{name} trial {t} (adversarial): {e}"))?;
            if !report.ok() {
                let bad = report.rows.iter().find(|row| !row.ok).unwrap();
                return Err(format!(
                    "{name} trial {t} (adversarial): {} has mass {} above {}",
                    bad.set, bad.measure, bad.bound
                ));
            }
            runs += 2;
        }
    }
    Ok(format!(
        "{runs} staged runs hold every ledger bound, final mass within {cap} <= 3*epsilon, \
         {:.2?}",
        start.elapsed()
    ))
}

fn check_trimming_coverage() -> Result<String, String> {
    let measures: Vec<(&'static str, Arc<dyn Measure>)> = vec![
        ("uniform", Arc::new(UniformMeasure)),
        (
            "product",
            Arc::new(ProductMeasure::new(
                Box::new(BernoulliSeq::new(Rat::new(1, 3)).unwrap()),
                Box::new(UniformSeq),
            )),
        ),
        (
            "kernel",
            Arc::new(
                KernelMeasure::new(
                    Box::new(UniformSeq),
                    1,
                    vec![
                        Box::new(UniformSeq),
                        Box::new(BernoulliSeq::new(Rat::new(1, 3)).unwrap()),
                    ],
                )
                .expect("fiber count matches depth"),
            ),
        ),
    ];
    let epsilon = Rat::new(3, 4);
    let cfg = TrimConfig::with_default_deltas(epsilon, 3, 8);
    let first_paths = [PathSpec::Zeros, PathSpec::Ones, path("cycle:01")];
    let mut covered = 0usize;
    let mut pairs = 0usize;
    for i in 0..20usize {
        let (name, p) = &measures[i % measures.len()];
        let w = BitString::from_index(3, ((i * 3 + 1) % 8) as u64);
        let stripes = |word: BitString| {
            BasicSet::from_rects([Rect::new(BitString::empty(), word)])
        };
        let covers = CoverSequence::new(vec![
            stripes(w),
            stripes(w.truncated(2)),
            stripes(w.truncated(1)),
        ])
        .map_err(|e| format!("scenario {i}: {e}"))?;
        let slowdown = if i % 2 == 0 { Slowdown::None } else { Slowdown::Pow2 };
        let gamma = HonestGamma::new(p.clone(), slowdown);
        let result =
            trim(&**p, &gamma, &covers, &cfg).map_err(|e| format!("scenario {i} ({name}): {e}"))?;
        let report =
            verify_bounds(&result, &**p).map_err(|e| format!("scenario {i} ({name}): {e}"))?;
        if !report.ok() {
            return Err(format!("scenario {i} ({name}): ledger bound failed"));
        }
        let path2 = format!("word:{w}").parse::<PathSpec>().unwrap();
        let path1 = &first_paths[i % first_paths.len()];
        for k in 1..=3usize {
            let outcome = coverage_check(&result, &**p, path1, &path2, k)
                .map_err(|e| format!("scenario {i} ({name}) stage {k}: {e}"))?;
            pairs += 1;
            if outcome.covered() {
                covered += 1;
            } else {
                return Err(format!(
                    "scenario {i} ({name}) stage {k}: point not retained, {outcome:?}"
                ));
            }
        }
    }
    Ok(format!(
        "{covered}/{pairs} cover points retained across 20 constructed runs"
    ))
}

fn kraft_weight_sum(a: &[BitString], code: &dyn CodeLengthProvider) -> Rat {
    let size = Rat::from_int(a.len() as i64);
    a.iter().fold(Rat::zero(), |acc, x| {
        acc + &size * &Rat::pow2(-(code.codelen(x, a) as i64))
    })
}

fn check_test_constructions() -> Result<String, String> {
    let measures: Vec<(&'static str, Arc<dyn Measure>)> = vec![
        ("uniform", Arc::new(UniformMeasure)),
        (
            "product",
            Arc::new(ProductMeasure::new(
                Box::new(BernoulliSeq::new(Rat::new(1, 3)).unwrap()),
                Box::new(BernoulliSeq::new(Rat::new(2, 5)).unwrap()),
            )),
        ),
    ];
    let one = Rat::one();
    let mut trials = 0usize;
    let mut touched = 0usize;
    for (name, p) in &measures {
        let mut r = rng(4242);
        for t in 0..250usize {
            let t1 = random_test1(&mut r, &**p, 2).map_err(|e| format!("{name}: {e}"))?;
            let fam =
                random_family(&mut r, &**p, 2, 2, 2).map_err(|e| format!("{name}: {e}"))?;
            let prod = product_construction(&t1, &fam);
            let prod_int = integral(&prod, &**p).map_err(|e| format!("{name}: {e}"))?;
            if prod_int > one {
                return Err(format!("{name} trial {t}: product integral {prod_int} above 1"));
            }
            let sum = sum_construction(&t1, &fam);
            let sum_int = integral(&sum, &**p).map_err(|e| format!("{name}: {e}"))?;
            if sum_int > one {
                return Err(format!("{name} trial {t}: sum integral {sum_int} above 1"));
            }
            let tp = make_product_test(prod, &**p).map_err(|e| format!("{name}: {e}"))?;
            let d = (t as i64 % 4) - 2;
            let rt = ratio_trim(&tp, d, 0, &**p).map_err(|e| format!("{name}: {e}"))?;
            let breaches =
                ratio_trim_violations(&tp, &rt, d, 0, &**p).map_err(|e| format!("{name}: {e}"))?;
            if !breaches.is_empty() {
                return Err(format!("{name} trial {t}: {}", breaches.join("; ")));
            }
            for i1 in 0..1u64 << rt.depth1 {
                let prefix = BitString::from_index(rt.depth1, i1);
                if let Some(iv) = fiber_integral(&**p, &prefix, &rt.fibers[i1 as usize])
                    .map_err(|e| format!("{name}: {e}"))?
                {
                    if iv > one {
                        return Err(format!(
                            "{name} trial {t}: fiber {prefix} integrates to {iv} after the trim"
                        ));
                    }
                }
            }
            touched += usize::from(rt.untouched.iter().any(|u| !u));
            trials += 1;
        }
    }
    if touched == 0 {
        return Err("no trim ever clipped a fiber".to_string());
    }

    let full: Vec<BitString> = BitString::all_at_depth(10).collect();
    let sizes = [1usize, 37, 512, full.len()];
    let codes: [(&str, &dyn CodeLengthProvider); 2] =
        [("uniform", &UniformCode), ("enumeration", &EnumerationCode)];
    let mut kraft_checks = 0usize;
    for (code_name, code) in codes {
        for &size in &sizes {
            let a = &full[..size];
            let total = kraft_weight_sum(a, code);
            if total > Rat::from_int(size as i64) {
                return Err(format!(
                    "{code_name} code: weight sum {total} above set size {size}"
                ));
            }
            let fd = finite_deficiency(&a[size / 2], a, code)
                .map_err(|e| format!("{code_name} code, size {size}: {e}"))?;
            let expect = Rat::from_int(size as i64) * Rat::pow2(-(fd.codelen as i64));
            if fd.weight != expect {
                return Err(format!(
                    "{code_name} code, size {size}: weight {} differs from {expect}",
                    fd.weight
                ));
            }
            kraft_checks += 1;
        }
    }
    Ok(format!(
        "{trials} construction trials within bounds, {touched} trims clipped, \
         {kraft_checks} weight sums within set size"
    ))
}

fn collect_files(root: &Path, base: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(root)? {
        let entry = entry?;
        let p = entry.path();
        if entry.file_type()?.is_dir() {
            collect_files(&p, base, out)?;
        } else {
            let rel = p.strip_prefix(base).expect("under base").to_path_buf();
            out.insert(rel, std::fs::read(&p)?);
        }
    }
    Ok(())
}

fn check_deterministic_outputs() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_cantorlab");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/demo");
    if !configs.is_dir() {
        return Err(format!("missing config directory {}", configs.display()));
    }
    let base = std::env::temp_dir().join(format!("cantorlab-accept-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = base.join(run);
        let status = Command::new(bin)
            .arg("suite")
            .arg("--configs")
            .arg(&configs)
            .arg("--out")
            .arg(&out)
            .env_remove("CANTORLAB_MAXDEPTH")
            .output()
            .map_err(|e| format!("running the suite: {e}"))?;
        if !status.status.success() {
            return Err(format!(
                "suite run {run} exited with {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        let mut files = BTreeMap::new();
        collect_files(&out, &out, &mut files).map_err(|e| e.to_string())?;
        trees.push(files);
    }
    let (first, second) = (&trees[0], &trees[1]);
    if first.is_empty() {
        return Err("suite produced no files".to_string());
    }
    if first.keys().collect::<Vec<_>>() != second.keys().collect::<Vec<_>>() {
        return Err("reruns produced different file sets".to_string());
    }
    for (name, bytes) in first {
        if second[name] != *bytes {
            return Err(format!("{} differs between reruns", name.display()));
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    Ok(format!("{} files byte-identical across suite reruns", first.len()))
}

fn main() {
    let checks: [(&str, fn() -> Result<String, String>); 11] = [
        ("measure-validity", check_measure_validity),
        ("oscillating-conditional", check_oscillating_conditional),
        ("three-quarters-limit", check_three_quarters_limit),
        ("sequence-locality", check_sequence_locality),
        ("martingale-bounds", check_martingale_bounds),
        ("heavy-union-bound", check_heavy_union_bound),
        ("discard-equivalence", check_discard_equivalence),
        ("trimming-ledger", check_trimming_ledger),
        ("trimming-coverage", check_trimming_coverage),
        ("test-constructions", check_test_constructions),
        ("deterministic-outputs", check_deterministic_outputs),
    ];
    let start = Instant::now();
    let mut failed = 0usize;
    for (name, check) in checks {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(reason)) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!(
        "acceptance: {}/{} checks passed in {:.2?}",
        11 - failed,
        11,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
