//! Acceptance gates. Every test writes one `PASS`/`FAIL` line to standard
//! error (bypassing output capture) before asserting.
//!
//! Tests take a global lock so their runtime measurements do not overlap.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use abvar::config::{Suite, SuiteConfig};
use abvar::report::{Report, Verdict};
use abvar::suites::run_suite;
use abvar_core::lattice::audit;
use serde_json::Value;

fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict_line(criterion: u32, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "{tag} criterion {criterion:>2}: {detail}"
    );
}

fn gate(criterion: u32, ok: bool, detail: String) {
    verdict_line(criterion, ok, &detail);
    assert!(ok, "criterion {criterion}: {detail}");
}

fn config(suite: Suite, g: usize, d: u32) -> SuiteConfig {
    let mut cfg = SuiteConfig {
        suite,
        g,
        d,
        ..SuiteConfig::default()
    };
    cfg.fill_model_defaults();
    cfg.validate().expect("acceptance configurations are valid");
    cfg
}

type Slot = Arc<OnceLock<Report>>;

/// First run of each named configuration, shared with the reproducibility gate.
fn first_run(key: &str, cfg: &SuiteConfig) -> Report {
    static RUNS: OnceLock<Mutex<HashMap<String, Slot>>> = OnceLock::new();
    let slot = {
        let mut map = RUNS
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        map.entry(key.to_string()).or_default().clone()
    };
    slot.get_or_init(|| run_suite(cfg)).clone()
}

fn timed(key: &str, cfg: &SuiteConfig) -> (Report, Duration) {
    let start = Instant::now();
    let r = first_run(key, cfg);
    (r, start.elapsed())
}

fn residual(r: &Report, check: &str, index: usize) -> f64 {
    r.check(check)
        .and_then(|c| c.residuals.get(index))
        .map_or(f64::NAN, |x| x.value)
}

fn failing(r: &Report) -> Vec<String> {
    r.checks
        .iter()
        .filter(|c| c.mandatory && c.verdict != Verdict::Pass)
        .map(|c| c.name.clone())
        .collect()
}

/// The configurations of criteria 4 to 12, by key.
fn numeric_configs() -> Vec<(&'static str, SuiteConfig)> {
    vec![
        ("theta", config(Suite::ThetaIdentities, 3, 6)),
        ("factorization", config(Suite::Factorization, 3, 9)),
        ("limit-2", config(Suite::Limit, 2, 5)),
        ("limit-3", config(Suite::Limit, 3, 9)),
        ("gluing-2", config(Suite::Gluing, 2, 5)),
        ("gluing-3", config(Suite::Gluing, 3, 9)),
        ("independence", config(Suite::Independence, 1, 5)),
        ("bpf-2-3", config(Suite::Bpf, 2, 3)),
        ("bpf-2-5", config(Suite::Bpf, 2, 5)),
        ("bpf-3-5", config(Suite::Bpf, 3, 5)),
        ("bpf-3-9", config(Suite::Bpf, 3, 9)),
        ("product-2-2", config(Suite::ProductBpf, 2, 2)),
        ("product-2-3", config(Suite::ProductBpf, 2, 3)),
        ("product-3-4", config(Suite::ProductBpf, 3, 4)),
        ("immersion-2-5", config(Suite::Immersion, 2, 5)),
        ("injectivity-2-5", config(Suite::Injectivity, 2, 5)),
        ("immersion-3-9", config(Suite::Immersion, 3, 9)),
        ("injectivity-3-9", config(Suite::Injectivity, 3, 9)),
        ("immersion-3-8", config(Suite::Immersion, 3, 8)),
        ("injectivity-3-8", config(Suite::Injectivity, 3, 8)),
    ]
}

fn lookup(key: &str) -> SuiteConfig {
    numeric_configs()
        .into_iter()
        .find(|(k, _)| *k == key)
        .map(|(_, c)| c)
        .expect("known key")
}

#[test]
fn criterion_01_exact_lattice_identities() {
    let _guard = serial();
    let mut cfg = config(Suite::LatticeExact, 5, 9);
    cfg.lattice.entry_bound = 3;
    let (r, t) = timed("lattice", &cfg);
    let names = [
        "pairing-symmetry",
        "pairing-definiteness",
        "shifted-positivity",
        "chart-completeness",
    ];
    let failures: f64 = names
        .iter()
        .map(|n| residual(&r, &format!("lattice-exact/{n}"), 0))
        .sum();
    let ok = failures == 0.0 && t < Duration::from_secs(60);
    gate(
        1,
        ok,
        format!(
            "g <= 5, entries in [-3, 3]: {failures} failures, {:.1} s (< 60 s)",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_toroidal_involution() {
    let _guard = serial();
    let start = Instant::now();
    let check = audit::toroidal_involution(8).expect("toroidal matrices build");
    let t = start.elapsed();
    let ok = check.passed() && check.cases == 8 && t < Duration::from_secs(5);
    gate(
        2,
        ok,
        format!(
            "M^2 = I and dual basis agree for g <= 8: {} failures of {} cases, {:.3} s (< 5 s)",
            check.failures,
            check.cases,
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_03_divisibility_scan() {
    let _guard = serial();
    let mut cfg = config(Suite::Divisibility, 3, 9);
    cfg.divisibility.g_max = 6;
    let (r, t) = timed("divisibility", &cfg);
    let pairs = &r.checks[0].witnesses[0]["pairs"];
    let expected: Value = serde_json::json!([[1, 2], [1, 3], [2, 4], [2, 5]]);
    let ok = pairs == &expected && r.verdict == Verdict::Pass && t < Duration::from_secs(1);
    gate(
        3,
        ok,
        format!("g_max = 6 gives {pairs}, {:.3} s (< 1 s)", t.as_secs_f64()),
    );
}

#[test]
fn criterion_04_theta_identities() {
    let _guard = serial();
    let (r, t) = timed("theta", &lookup("theta"));
    let q1 = residual(&r, "theta-identities/quasi-periodicity", 0);
    let q2 = residual(&r, "theta-identities/quasi-periodicity", 1);
    let spread = residual(&r, "theta-identities/automorphy", 0);
    let ok = r.verdict == Verdict::Pass && t < Duration::from_secs(120);
    gate(
        4,
        ok,
        format!("100 inputs: quasi-periodicity {q1:.2e} / {q2:.2e}, automorphy spread {spread:.2e} (< 1e-9), {:.1} s (< 120 s)", t.as_secs_f64()),
    );
}

#[test]
fn criterion_05_factorization() {
    let _guard = serial();
    let (r, t) = timed("factorization", &lookup("factorization"));
    let res: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{:.2e}", c.residuals.first().map_or(f64::NAN, |x| x.value)))
        .collect();
    let ok = r.verdict == Verdict::Pass && r.checks.len() == 2 && t < Duration::from_secs(60);
    gate(
        5,
        ok,
        format!(
            "g = 2, 3 with Q = 6: residuals {res:?} (< 1e-8), {:.1} s (< 60 s)",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_limit() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    let mut total = Duration::ZERO;
    for key in ["limit-2", "limit-3"] {
        let (r, t) = timed(key, &lookup(key));
        total += t;
        let small = residual(&r, "limit/deviation", 0);
        let large = r
            .check("limit/decrease")
            .and_then(|c| c.residuals.first())
            .map_or(f64::NAN, |x| x.tolerance);
        ok &= r.verdict == Verdict::Pass;
        details.push(format!(
            "g = {}: {small:.2e} at t = 1e-4 vs {large:.2e} at t = 1e-2",
            r.config["g"]
        ));
    }
    ok &= total < Duration::from_secs(120);
    gate(
        6,
        ok,
        format!(
            "{} (< 1e-6 and decreasing), {:.1} s (< 120 s)",
            details.join("; "),
            total.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_gluing() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    let mut total = Duration::ZERO;
    for key in ["gluing-2", "gluing-3"] {
        let (r, t) = timed(key, &lookup(key));
        total += t;
        ok &= r.verdict == Verdict::Pass;
        details.push(format!(
            "g = {}: {:.2e}",
            r.config["g"],
            residual(&r, "gluing/normal-form", 0)
        ));
    }
    ok &= total < Duration::from_secs(120);
    gate(
        7,
        ok,
        format!(
            "200 points, max FS distance {} (< 1e-9), {:.1} s (< 120 s)",
            details.join(", "),
            total.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_08_independence() {
    let _guard = serial();
    let (r, t) = timed("independence", &lookup("independence"));
    let ratios: Vec<String> = [5, 8, 9, 13]
        .iter()
        .map(|d| {
            format!(
                "d = {d}: {:.2e}",
                residual(&r, &format!("independence/d={d}"), 1)
            )
        })
        .collect();
    let ok = r.verdict == Verdict::Pass && r.checks.len() == 4 && t < Duration::from_secs(120);
    gate(
        8,
        ok,
        format!(
            "100 subsets each, smallest ratio {} (> 1e-7), failing {:?}, {:.1} s (< 120 s)",
            ratios.join(", "),
            failing(&r),
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_09_base_point_freeness() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    for key in ["bpf-2-3", "bpf-2-5", "bpf-3-5", "bpf-3-9"] {
        let (r, t) = timed(key, &lookup(key));
        let c = r.check("bpf/minimum-residual").expect("bpf check");
        ok &= c.mandatory && r.verdict == Verdict::Pass && t < Duration::from_secs(300);
        details.push(format!(
            "{key}: {:.2e} in {:.1} s",
            residual(&r, "bpf/minimum-residual", 0),
            t.as_secs_f64()
        ));
    }
    gate(
        9,
        ok,
        format!(
            "minimum residuals (> 1e-6, < 300 s each) {}",
            details.join(", ")
        ),
    );
}

#[test]
fn criterion_10_product_construction() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    let mut total = Duration::ZERO;
    for (key, name) in [
        ("product-2-2", "product-bpf/common-zero"),
        ("product-2-3", "product-bpf/no-common-zero"),
        ("product-3-4", "product-bpf/no-common-zero"),
    ] {
        let (r, t) = timed(key, &lookup(key));
        total += t;
        ok &= r.verdict == Verdict::Pass && r.check(name).is_some();
        details.push(format!("{key}: {:.2e}", residual(&r, name, 0)));
    }
    ok &= total < Duration::from_secs(300);
    gate(
        10,
        ok,
        format!(
            "{} (zero < 1e-8 for (2,2), > 1e-6 otherwise), {:.1} s (< 300 s)",
            details.join(", "),
            total.as_secs_f64()
        ),
    );
}

fn rank_table(r: &Report) -> Vec<(u64, u64, u64)> {
    r.check("immersion/rank-table")
        .and_then(|c| c.witnesses.first())
        .and_then(|w| w["ranks"].as_array().cloned())
        .unwrap_or_default()
        .iter()
        .map(|s| {
            (
                s["expected"].as_u64().unwrap_or(0),
                s["min_rank"].as_u64().unwrap_or(0),
                s["max_rank"].as_u64().unwrap_or(0),
            )
        })
        .collect()
}

fn coverage(r: &Report, check: &str) -> Value {
    r.check(check)
        .and_then(|c| c.witnesses.iter().find(|w| w.get("coverage").is_some()))
        .map_or(Value::Null, |w| w["coverage"].clone())
}

#[test]
fn criterion_11_embedding() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    for (g, d) in [(2, 5), (3, 9)] {
        let (imm, t1) = timed(
            &format!("immersion-{g}-{d}"),
            &lookup(&format!("immersion-{g}-{d}")),
        );
        let (inj, t2) = timed(
            &format!("injectivity-{g}-{d}"),
            &lookup(&format!("injectivity-{g}-{d}")),
        );
        let table = rank_table(&imm);
        let full = table.len() == g
            && table
                .iter()
                .enumerate()
                .all(|(h, &(e, lo, hi))| e == (g + h + 1) as u64 && lo == e && hi == e);
        let cov = coverage(&inj, "injectivity/no-collision");
        let restarts = cov["restarts"].as_u64().unwrap_or(0);
        let t = t1 + t2;
        ok &= full
            && imm.verdict == Verdict::Pass
            && inj.verdict == Verdict::Pass
            && restarts >= 10_000
            && t < Duration::from_secs(900);
        details.push(format!(
            "({g},{d}): ranks {:?}, witnesses {}, {} restarts, best FS {:.2e}, {:.1} s",
            table.iter().map(|x| x.0).collect::<Vec<_>>(),
            residual(&inj, "injectivity/no-collision", 0),
            restarts,
            cov["best_fs_distance"].as_f64().unwrap_or(f64::NAN),
            t.as_secs_f64()
        ));
    }
    gate(
        11,
        ok,
        format!(
            "full ranks and no collision (< 900 s each): {}",
            details.join("; ")
        ),
    );
}

#[test]
fn criterion_12_genus_three_degree_eight() {
    let _guard = serial();
    let (imm, _) = timed("immersion-3-8", &lookup("immersion-3-8"));
    let (inj, t) = timed("injectivity-3-8", &lookup("injectivity-3-8"));
    let table = rank_table(&imm);
    let unramified = imm.verdict == Verdict::Pass && table.len() == 3;
    let c = inj
        .check("injectivity/transversal-collision")
        .expect("collision check");
    let cov = coverage(&inj, "injectivity/transversal-collision");
    let witness = c
        .witnesses
        .iter()
        .find(|w| w.get("transversal") == Some(&Value::Bool(true)));
    let explicit = match c.verdict {
        Verdict::Pass => witness.is_some_and(|w| {
            w["fs_distance"].as_f64().is_some_and(|x| x < 1e-8)
                && w["refined_fs_distance"].as_f64().is_some_and(|x| x < 1e-8)
        }),
        Verdict::Inconclusive => cov["restarts"].as_u64().is_some_and(|n| n > 0),
        _ => false,
    };
    let outcome = match witness {
        Some(w) if c.verdict == Verdict::Pass => format!(
            "transversal witness, FS {:.2e} (refined {:.2e}), separation {:.3}",
            w["fs_distance"].as_f64().unwrap_or(f64::NAN),
            w["refined_fs_distance"].as_f64().unwrap_or(f64::NAN),
            w["separation"].as_f64().unwrap_or(f64::NAN)
        ),
        _ => format!("{} with coverage {cov}", c.verdict.label()),
    };
    gate(
        12,
        unramified && explicit,
        format!(
            "immersion ranks {:?}; collision search: {outcome}; {:.1} s",
            table,
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_13_reproducibility() {
    let _guard = serial();
    let mut differing = Vec::new();
    let configs = numeric_configs();
    for (key, cfg) in &configs {
        let first = first_run(key, cfg);
        let again = run_suite(cfg);
        if first.verdict_view() != again.verdict_view() {
            differing.push(*key);
        }
    }
    gate(
        13,
        differing.is_empty(),
        format!(
            "{} configurations of criteria 4-12 rerun, differing: {differing:?}",
            configs.len()
        ),
    );
}
