//! Dispatch of the named verification suites.
//!
//! Every suite turns its findings into [`Check`]s; failures to evaluate
//! (invalid models, series that cannot be certified, panics) become failed
//! checks so a report is always produced.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use abvar_core::degeneration::{
    fs_distance, glue_normalize, limit_consistency, phi_sections, ApPoint, DegenerationModel,
    Homogeneous, ModelOptions,
};
use abvar_core::lattice::audit::{self, AuditCheck};
use abvar_core::theta::{
    automorphy_ratio, e_of, factorization_residual, vartheta_vector, SiegelPoint, ThetaConfig,
};
use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{complex, default_tau_g, Suite, SuiteConfig};
use crate::diagnostics::{
    base_locus_search, degree_divisibility_scan, elliptic_independence_check, immersion_check,
    injectivity_search, is_embedding_range, is_morphism_range, product_construction_check,
    random_independence_subsets, BaseLocusOptions, CollisionWitness, InjectivityOptions,
    ProductOptions,
};
use crate::report::{round_sig, Check, Report, Residual, Verdict};

/// Runs `config.suite` (every suite for `full`) and collects the report.
/// Omitted model entries are filled first and echoed in the report.
pub fn run_suite(config: &SuiteConfig) -> Report {
    let start = Instant::now();
    let mut cfg = config.clone();
    cfg.fill_model_defaults();
    let mut report = Report::new(&cfg);
    let suites: Vec<Suite> = match cfg.suite {
        Suite::Full => Suite::ALL
            .into_iter()
            .filter(|&s| s != Suite::Full)
            .collect(),
        s => vec![s],
    };
    for suite in suites {
        for check in run_one(suite, &cfg) {
            report.push(check);
        }
    }
    report.wall_time_s = round_sig(start.elapsed().as_secs_f64());
    report
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Vec<Check> {
    let name = suite.name();
    let outcome = catch_unwind(AssertUnwindSafe(|| match suite {
        Suite::LatticeExact => lattice_exact(cfg),
        Suite::ThetaIdentities => theta_identities(cfg),
        Suite::Factorization => factorization(cfg),
        Suite::Limit => limit(cfg),
        Suite::Gluing => gluing(cfg),
        Suite::Bpf => bpf(cfg),
        Suite::ProductBpf => product_bpf(cfg),
        Suite::Independence => independence(cfg),
        Suite::Injectivity => injectivity(cfg),
        Suite::Immersion => immersion(cfg),
        Suite::Divisibility => divisibility(cfg),
        Suite::Full => Ok(Vec::new()),
    }));
    match outcome {
        Ok(Ok(checks)) => checks,
        Ok(Err(e)) => vec![Check::error(name, suite.summary(), format!("{e:#}"))],
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            vec![Check::error(name, suite.summary(), format!("panic: {msg}"))]
        }
    }
}

fn model_options(cfg: &SuiteConfig) -> ModelOptions {
    ModelOptions {
        n_rel: cfg.budgets.n_rel,
        genericity_tol: cfg.tolerances.genericity,
        separation_floor: cfg.tolerances.separation_floor,
        theta: theta_config(cfg),
    }
}

fn theta_config(cfg: &SuiteConfig) -> ThetaConfig {
    ThetaConfig {
        eigen_floor: cfg.tolerances.eigen_floor,
        ..ThetaConfig::default()
    }
}

/// The degeneration model of the configured `(g, d)`.
pub fn build_model(cfg: &SuiteConfig) -> anyhow::Result<DegenerationModel> {
    let g = cfg.g;
    let tau_g = complex(cfg.model.tau_g.unwrap_or_else(|| default_tau_g(cfg.d)));
    let entries =
        |v: &Option<Vec<[f64; 2]>>, key: &str, n: usize| -> anyhow::Result<Vec<Complex64>> {
            match v {
                Some(v) => Ok(v.iter().copied().map(complex).collect()),
                None if n == 0 => Ok(Vec::new()),
                None => Err(anyhow!("`model.{key}` must be given for g = {g}")),
            }
        };
    let h = g - 1;
    let tau_prime = entries(
        &cfg.model.tau_prime,
        "tau_prime",
        h * h.saturating_sub(1) / 2,
    )?;
    let tau_dprime = entries(&cfg.model.tau_dprime, "tau_dprime", h)?;
    DegenerationModel::new(g, cfg.d, &tau_prime, &tau_dprime, tau_g, model_options(cfg))
        .with_context(|| format!("degeneration model for g = {g}, d = {}", cfg.d))
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn point_json(p: &ApPoint) -> Value {
    let coords: Vec<Value> = p
        .coords()
        .iter()
        .map(|c| json!({ "u": pair(c.u), "v": pair(c.v) }))
        .collect();
    json!({ "z": pair(p.z()), "coords": coords })
}

// ---------------------------------------------------------------- lattice

fn audit_check(c: AuditCheck, statement: &str) -> Check {
    let mut check = Check::new(format!("lattice-exact/{}", c.name), statement).tolerance(0.0);
    check.residual(Residual::equal("failures", c.failures as f64, 0.0));
    check.note(format!("{} cases", c.cases));
    if let Some(f) = &c.first_failure {
        check.witness(json!({ "first_failure": f }));
    }
    if c.cases == 0 {
        check.note("no cases enumerated");
    }
    check.judge()
}

fn lattice_exact(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let (g, b, l) = (cfg.g, cfg.lattice.entry_bound, &cfg.lattice);
    Ok(vec![
        audit_check(audit::star_cardinality(l.star_max_g)?, "the star vectors of length g are 2^(g+1) - 1 distinct sign vectors"),
        audit_check(audit::pairing_symmetry(g, b)?, "the exponent pairing is symmetric"),
        audit_check(
            audit::pairing_definiteness(g, b)?,
            "the self-pairing has nonnegative exponents, all zero only at the origin",
        ),
        audit_check(
            audit::shifted_positivity(g, b)?,
            "the self-pairing shifted by a sign vector has nonnegative exponents",
        ),
        audit_check(
            audit::chart_completeness(g, b)?,
            "every restricted chart monomial lies in the chart ring and factors back exactly",
        ),
        audit_check(
            audit::toroidal_involution(l.involution_max_g)?,
            "the toroidal exponent matrix squares to the identity and is dual to the cone basis change",
        ),
        audit_check(
            audit::period_lattice_index(g, l.period_max_d)?,
            "the period lattice has index d with generators acting by the expected monomials",
        ),
    ])
}

// ---------------------------------------------------------- divisibility

fn divisibility(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let pairs = degree_divisibility_scan(cfg.divisibility.g_max);
    let outside = pairs.iter().filter(|p| p.0 > 2).count();
    let mut c = Check::new(
        "divisibility/qualifying-pairs",
        "g! divides binomial(d, g + 1) with g < d <= 2g + 1 only for g <= 2",
    )
    .tolerance(0.0);
    c.residual(Residual::equal(
        "qualifying pairs with g > 2",
        outside as f64,
        0.0,
    ));
    c.witness(json!({ "g_max": cfg.divisibility.g_max, "pairs": pairs }));
    Ok(vec![c.judge()])
}

// ---------------------------------------------------------------- theta

/// A random point of the Siegel half space with `Im tau = A A^T + eigen_min I`.
fn random_siegel(
    rng: &mut ChaCha8Rng,
    g: usize,
    d: u32,
    eigen_min: f64,
) -> anyhow::Result<SiegelPoint> {
    let a: Vec<f64> = (0..g * g).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mut re = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let x = rng.gen_range(-0.5..0.5);
            re[i * g + j] = x;
            re[j * g + i] = x;
        }
    }
    let tau = (0..g * g)
        .map(|ij| {
            let (i, j) = (ij / g, ij % g);
            let mut im: f64 = (0..g).map(|k| a[i * g + k] * a[j * g + k]).sum();
            if i == j {
                im += eigen_min;
            }
            Complex64::new(re[ij], im)
        })
        .collect();
    Ok(SiegelPoint::new(g, d, tau)?)
}

fn theta_identities(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let t = &cfg.theta;
    let tol = cfg.tolerances.tol;
    let spread_tol = cfg.tolerances.spread;
    let tcfg = theta_config(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    let (mut shift_one, mut shift_tau, mut evenness, mut spread) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut errors = Vec::new();
    let mut worst_spread = Value::Null;
    for input in 0..cfg.budgets.theta_inputs {
        let g = rng.gen_range(1..=t.max_g);
        let d = rng.gen_range(1..=t.max_d);
        let tau1 = Complex64::new(
            rng.gen_range(-0.5..0.5),
            t.eigen_min + rng.gen_range(0.0..1.0),
        );
        let x = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let siegel = random_siegel(&mut rng, g, d, t.eigen_min)?;
        let z: Vec<Complex64> = (0..g)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)))
            .collect();

        let one_variable = || -> anyhow::Result<(f64, f64, f64)> {
            let base = vartheta_vector(tau1, x, d, tol, false, &tcfg)?.values;
            let plus_one = vartheta_vector(tau1, x + 1.0, d, tol, false, &tcfg)?.values;
            let plus_tau = vartheta_vector(tau1, x + tau1, d, tol, false, &tcfg)?.values;
            let mirrored = vartheta_vector(tau1, -x, d, tol, false, &tcfg)?.values;
            let scale = base.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let factor = e_of(-tau1 * 0.5 - x);
            let n = d as usize;
            let (mut r1, mut r2, mut r3) = (0.0f64, 0.0f64, 0.0f64);
            for k in 0..n {
                let phase = e_of(Complex64::new(k as f64 / f64::from(d), 0.0));
                r1 = r1.max((plus_one[k] - phase * base[k]).norm() / scale);
                r2 = r2.max((plus_tau[k] - factor * base[k]).norm() / (factor.norm() * scale));
                r3 = r3.max((mirrored[(n - k) % n] - base[k]).norm() / scale);
            }
            Ok((r1, r2, r3))
        };
        match one_variable() {
            Ok((r1, r2, r3)) => {
                shift_one = shift_one.max(r1);
                shift_tau = shift_tau.max(r2);
                evenness = evenness.max(r3);
            }
            Err(e) => errors.push(format!("input {input}: {e}")),
        }
        for row in 1..=2 * g {
            match automorphy_ratio(&siegel, &z, row, tol, &tcfg) {
                Ok(a) => {
                    if a.spread > spread || worst_spread.is_null() {
                        worst_spread = json!({ "input": input, "g": g, "d": d, "row": row, "spread": a.spread,
                                                "sections_used": a.sections_used });
                    }
                    spread = spread.max(a.spread);
                }
                Err(e) => errors.push(format!("input {input}, row {row}: {e}")),
            }
        }
    }

    let n = cfg.budgets.theta_inputs;
    let mut quasi = Check::new(
        "theta-identities/quasi-periodicity",
        "vartheta_k(z + 1) = e(k/d) vartheta_k(z) and vartheta_k(z + tau) = e(-tau/2 - z) vartheta_k(z)",
    )
    .tolerance(spread_tol);
    quasi.residual(Residual::below(
        "max relative residual, z -> z + 1",
        shift_one,
        spread_tol,
    ));
    quasi.residual(Residual::below(
        "max relative residual, z -> z + tau",
        shift_tau,
        spread_tol,
    ));
    quasi.note(format!("{n} random inputs"));

    let mut even = Check::new(
        "theta-identities/evenness",
        "vartheta_{-k}(-z) = vartheta_k(z)",
    )
    .tolerance(spread_tol);
    even.residual(Residual::below(
        "max relative residual",
        evenness,
        spread_tol,
    ));

    let mut auto = Check::new(
        "theta-identities/automorphy",
        "theta_k(z + lambda) / theta_k(z) does not depend on k for every lattice generator lambda",
    )
    .tolerance(spread_tol);
    auto.residual(Residual::below(
        "max relative spread over k",
        spread,
        spread_tol,
    ));
    auto.residual(Residual::equal(
        "evaluation errors",
        errors.len() as f64,
        0.0,
    ));
    if !worst_spread.is_null() {
        auto.witness(worst_spread);
    }
    for e in errors.iter().take(5) {
        auto.note(e.clone());
    }
    Ok(vec![quasi.judge(), even.judge(), auto.judge()])
}

// --------------------------------------------------------- factorization

fn factorization(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let f = &cfg.factorization;
    let tol = cfg.tolerances.factorization;
    let tcfg = theta_config(cfg);
    let mut checks = Vec::new();
    if f.instances.is_empty() {
        bail!("no factorization instances configured");
    }
    for (i, inst) in f.instances.iter().enumerate() {
        let g = inst.z.len();
        let mut full = vec![Complex64::new(0.0, 0.0); g * g];
        let mut it = inst.tau.iter().copied().map(complex);
        for r in 0..g {
            for c in r..g {
                let v = it
                    .next()
                    .ok_or_else(|| anyhow!("instance {i}: too few tau entries"))?;
                full[r * g + c] = v;
                full[c * g + r] = v;
            }
        }
        let name = format!("factorization/instance-{i}");
        let statement = "theta_k of the full period matrix equals its regrouped sum over the boundary directions";
        let tau = match SiegelPoint::new(g, inst.d, full) {
            Ok(t) => t,
            Err(e) => {
                checks.push(Check::error(name, statement, e));
                continue;
            }
        };
        let z: Vec<Complex64> = inst.z.iter().copied().map(complex).collect();
        let mut check = Check::new(name.clone(), statement).tolerance(tol);
        let mut worst = (0.0f64, 0i64, 0.0f64);
        let mut failed = None;
        for k in 0..i64::from(inst.d) {
            match factorization_residual(&tau, &z, k, f.q_max, cfg.tolerances.tol, &tcfg) {
                Ok(r) if r.residual >= worst.0 => worst = (r.residual, k, r.error_bound),
                Ok(_) => {}
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            checks.push(Check::error(name, statement, e));
            continue;
        }
        check.residual(Residual::below("max residual over k", worst.0, tol));
        check.witness(json!({ "g": g, "d": inst.d, "q_max": f.q_max, "worst_k": worst.1, "error_bound": worst.2 }));
        checks.push(check.judge());
    }
    Ok(checks)
}

// ----------------------------------------------------------------- limit

fn limit(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let model = build_model(cfg)?;
    let tol = cfg.tolerances.limit;
    let reports = cfg
        .limit
        .t_scales
        .iter()
        .map(|&t| limit_consistency(&model, t, cfg.budgets.limit_samples, cfg.tolerances.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let last = reports
        .last()
        .ok_or_else(|| anyhow!("no t scales configured"))?;
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "t_scale": r.t_scale, "max_deviation": r.max_deviation, "error_bound": r.error_bound,
                         "worst_sample": r.worst_sample }))
        .collect();

    let mut dev = Check::new(
        "limit/deviation",
        "the sections at small t agree with the limit sections on the degenerate fiber",
    )
    .tolerance(tol);
    dev.residual(Residual::below(
        format!("max deviation at t = {:e}", last.t_scale),
        last.max_deviation,
        tol,
    ));
    dev.witness(json!({ "scales": rows }));
    let mut out = vec![dev.judge()];
    if reports.len() >= 2 {
        let prev = &reports[reports.len() - 2];
        let mut dec = Check::new("limit/decrease", "the deviation decreases as t decreases")
            .tolerance(prev.max_deviation);
        dec.residual(Residual::below(
            format!(
                "max deviation at t = {:e} against t = {:e}",
                last.t_scale, prev.t_scale
            ),
            last.max_deviation,
            prev.max_deviation,
        ));
        out.push(dec.judge());
    }
    Ok(out)
}

// ---------------------------------------------------------------- gluing

fn random_fiber_point(model: &DegenerationModel, rng: &mut ChaCha8Rng) -> anyhow::Result<ApPoint> {
    let d = f64::from(model.d());
    let z = d * rng.gen_range(-0.5..1.5) + model.tau_g() * rng.gen_range(-0.5..1.5);
    let coords = (0..model.g() - 1)
        .map(|_| {
            let roll: f64 = rng.gen();
            if roll < 0.25 {
                Ok(Homogeneous::infinity())
            } else if roll < 0.375 {
                Ok(Homogeneous::zero())
            } else {
                let r = 10f64.powf(rng.gen_range(-1.5..1.5));
                Homogeneous::affine(Complex64::from_polar(
                    r,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ApPoint::new(z, coords)?)
}

fn gluing(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let model = build_model(cfg)?;
    let tol = cfg.tolerances.gluing;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let mut worst = (0.0f64, Value::Null);
    let mut undefined = 0usize;
    for _ in 0..cfg.budgets.gluing_points {
        let p = random_fiber_point(&model, &mut rng)?;
        let q = glue_normalize(&model, &p)?;
        let a = phi_sections(&model, &p, cfg.tolerances.tol)?;
        let b = phi_sections(&model, &q, cfg.tolerances.tol)?;
        match fs_distance(&a.values, &b.values) {
            Some(fs) if fs >= worst.0 || worst.1.is_null() => {
                worst = (
                    fs,
                    json!({ "point": point_json(&p), "normalized": point_json(&q), "fs_distance": fs }),
                );
            }
            Some(_) => {}
            None => undefined += 1,
        }
    }
    let mut c = Check::new(
        "gluing/normal-form",
        "phi is unchanged when a point is moved to its glued normal form",
    )
    .tolerance(tol);
    c.residual(Residual::below("max Fubini-Study distance", worst.0, tol));
    c.residual(Residual::equal(
        "points with vanishing phi",
        undefined as f64,
        0.0,
    ));
    c.note(format!("{} points", cfg.budgets.gluing_points));
    if !worst.1.is_null() {
        c.witness(worst.1);
    }
    Ok(vec![c.judge()])
}

// ------------------------------------------------------------------- bpf

fn bpf(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let model = build_model(cfg)?;
    let opts = BaseLocusOptions {
        samples_per_stratum: cfg.budgets.samples,
        refinements: cfg.budgets.refinements,
        refine_evals: cfg.budgets.iterations,
        tol: cfg.tolerances.tol,
        seed: cfg.seed,
    };
    let out = base_locus_search(&model, &opts)?;
    let delta = cfg.tolerances.delta_bpf;
    let mut c = Check::new(
        "bpf/minimum-residual",
        "the limit sections have no common zero on any stratum of the degenerate fiber",
    )
    .tolerance(delta);
    c.residual(Residual::above(
        "minimum normalized residual",
        out.minimum,
        delta,
    ));
    c.witness(json!({ "point": point_json(&out.witness), "residual": out.minimum, "per_stratum": out.per_stratum }));
    c.note(format!("{} evaluations", out.evaluations));
    if !is_morphism_range(cfg.g, cfg.d) {
        c.note(format!(
            "d = {} <= 2^(g-1): base points are not excluded here",
            cfg.d
        ));
        c = c.informational();
    }
    Ok(vec![c.judge()])
}

// ----------------------------------------------------------- product-bpf

fn product_bpf(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let p = &cfg.product;
    if p.taus.len() < cfg.g {
        bail!(
            "`product.taus` lists {} curves, {} needed",
            p.taus.len(),
            cfg.g
        );
    }
    let taus: Vec<Complex64> = p.taus[..cfg.g].iter().copied().map(complex).collect();
    let opts = ProductOptions {
        samples: p.samples,
        refinements: p.refinements,
        refine_evals: p.iterations,
        tol: cfg.tolerances.tol,
        seed: cfg.seed,
    };
    let out = product_construction_check(&taus, cfg.d, &opts)?;
    let expect_zero = cfg.d as usize <= cfg.g;
    let mut c = if expect_zero {
        let tol = cfg.tolerances.product_witness;
        let mut c = Check::new(
            "product-bpf/common-zero",
            "for d <= g the products of one-variable sections share a zero",
        )
        .tolerance(tol);
        c.residual(Residual::below("residual at the witness", out.minimum, tol));
        c
    } else {
        let tol = cfg.tolerances.delta_bpf;
        let mut c = Check::new(
            "product-bpf/no-common-zero",
            "for d > g the products of one-variable sections have no common zero",
        )
        .tolerance(tol);
        c.residual(Residual::above(
            "minimum normalized residual",
            out.minimum,
            tol,
        ));
        c
    };
    let z: Vec<Value> = out.witness.iter().map(|&x| pair(x)).collect();
    c.witness(json!({ "z": z, "vanishing": out.vanishing, "residual": out.minimum }));
    c.note(format!("{} evaluations", out.evaluations));
    Ok(vec![c.judge()])
}

// ---------------------------------------------------------- independence

fn independence(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let ratio_tol = cfg.tolerances.independence_ratio;
    let mut checks = Vec::new();
    for &d in &cfg.independence.degrees {
        let tau_g = complex(cfg.independence.tau_g.unwrap_or_else(|| default_tau_g(d)));
        let name = format!("independence/d={d}");
        let statement =
            "fewer than d distinct points impose independent conditions on the sections vartheta_k";
        let model = match DegenerationModel::new(1, d, &[], &[], tau_g, model_options(cfg)) {
            Ok(m) => m,
            Err(e) => {
                checks.push(Check::error(name, statement, e));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::from(d));
        let subsets = random_independence_subsets(
            &model,
            cfg.budgets.independence_subsets,
            cfg.tolerances.separation_floor,
            &mut rng,
        );
        let mut deficient = 0usize;
        let mut worst: Option<(f64, usize, Vec<f64>)> = None;
        let mut failure = None;
        for (i, pts) in subsets.iter().enumerate() {
            match elliptic_independence_check(
                &model,
                pts,
                cfg.tolerances.tol,
                cfg.tolerances.tol_rel,
            ) {
                Ok(v) => {
                    if !v.is_full() {
                        deficient += 1;
                    }
                    let r = v.retained_ratio();
                    if worst.as_ref().is_none_or(|w| r < w.0) {
                        worst = Some((r, i, v.singular_values.clone()));
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failure {
            checks.push(Check::error(name, statement, e));
            continue;
        }
        let mut c = Check::new(name, statement).tolerance(ratio_tol);
        c.residual(Residual::equal(
            "rank-deficient subsets",
            deficient as f64,
            0.0,
        ));
        let (ratio, idx, sv) = worst.unwrap_or((0.0, 0, Vec::new()));
        c.residual(Residual::above(
            "smallest retained singular value ratio",
            ratio,
            ratio_tol,
        ));
        let pts: Vec<Value> = subsets
            .get(idx)
            .map(|s| s.iter().map(|&x| pair(x)).collect())
            .unwrap_or_default();
        c.witness(
            json!({ "subset": idx, "points": pts, "singular_values": sv, "tau_g": pair(tau_g) }),
        );
        c.note(format!("{} subsets", subsets.len()));
        checks.push(c.judge());
    }
    Ok(checks)
}

// ------------------------------------------------------------ injectivity

fn witness_json(w: &CollisionWitness) -> Value {
    json!({
        "p": point_json(&w.p),
        "q": point_json(&w.q),
        "fs_distance": w.fs_distance,
        "refined_fs_distance": w.refined_fs_distance,
        "separation": w.separation,
        "rank_p": w.rank_p,
        "rank_q": w.rank_q,
        "expected_rank_p": w.expected_rank_p,
        "expected_rank_q": w.expected_rank_q,
        "transversal": w.is_transversal(),
        "seeding": w.seeding,
    })
}

fn injectivity(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let model = build_model(cfg)?;
    let b = &cfg.budgets;
    let opts = InjectivityOptions {
        restarts: b.restarts,
        involution_restarts: b.involution_restarts,
        screen_evals: b.screen_iterations,
        screen_threshold: cfg.injectivity.screen_threshold,
        refinements: b.collision_refinements,
        refine_evals: cfg.injectivity.refine_iterations,
        delta_coll: cfg.tolerances.delta_coll,
        tol: cfg.tolerances.tol,
        tol_rel: cfg.tolerances.tol_rel,
        seed: cfg.seed,
    };
    let out = injectivity_search(&model, &opts)?;
    let delta = cfg.tolerances.delta_coll;
    let coverage = serde_json::to_value(&out.coverage)?;
    let mut c = if is_embedding_range(cfg.g, cfg.d) {
        let mut c = Check::new(
            "injectivity/no-collision",
            "for d > 2^g no two points of the fiber share an image",
        )
        .tolerance(delta);
        c.residual(Residual::equal(
            "verified collisions",
            out.witnesses.len() as f64,
            0.0,
        ));
        c.judge()
    } else {
        let transversal = out.witnesses.iter().filter(|w| w.is_transversal()).count();
        let mut c = Check::new(
            "injectivity/transversal-collision",
            "for 2^(g-1) < d <= 2^g the map identifies pairs of points transversally",
        )
        .tolerance(delta);
        c.residual(Residual::above(
            "verified transversal collisions",
            transversal as f64,
            0.0,
        ));
        if transversal > 0 {
            c.judge()
        } else {
            c.note("no verified transversal collision within the search budget; see coverage");
            c.with_verdict(Verdict::Inconclusive)
        }
    };
    for w in out.witnesses.iter().take(10) {
        c.witness(witness_json(w));
    }
    c.witness(json!({ "coverage": coverage }));
    Ok(vec![c])
}

// -------------------------------------------------------------- immersion

fn immersion(cfg: &SuiteConfig) -> anyhow::Result<Vec<Check>> {
    let model = build_model(cfg)?;
    let table = immersion_check(
        &model,
        cfg.budgets.points_per_stratum,
        cfg.tolerances.tol,
        cfg.tolerances.tol_rel,
        cfg.seed,
    )?;
    let mut c = Check::new(
        "immersion/rank-table",
        "the tangent family at a point of stratum h has rank g + h + 1",
    )
    .tolerance(cfg.tolerances.tol_rel);
    for s in &table {
        c.residual(Residual::equal(
            format!("min rank, h = {}", s.stratum),
            s.min_rank() as f64,
            s.expected as f64,
        ));
        c.residual(Residual::equal(
            format!("max rank, h = {}", s.stratum),
            s.max_rank() as f64,
            s.expected as f64,
        ));
    }
    let rows: Vec<Value> = table
        .iter()
        .map(|s| {
            json!({ "stratum": s.stratum, "expected": s.expected, "min_rank": s.min_rank(),
                         "max_rank": s.max_rank(), "worst_ratio": s.worst_ratio })
        })
        .collect();
    c.witness(json!({ "ranks": rows }));
    Ok(vec![c.judge()])
}
