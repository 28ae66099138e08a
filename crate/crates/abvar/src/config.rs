//! Strictly parsed TOML configuration for the verification suites.
//!
//! Top-level keys select the suite, seed and model size; everything else
//! lives in sections. Unknown keys are rejected everywhere. Missing values
//! are filled with defaults, so a loaded config is complete and can be
//! echoed verbatim into a report.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Exhaustive checks of the exponent lattice. Also accepted as `star`.
    #[serde(alias = "star")]
    LatticeExact,
    ThetaIdentities,
    Factorization,
    Limit,
    Gluing,
    Bpf,
    ProductBpf,
    Independence,
    Injectivity,
    Immersion,
    Divisibility,
    Full,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::LatticeExact,
        Suite::ThetaIdentities,
        Suite::Factorization,
        Suite::Limit,
        Suite::Gluing,
        Suite::Bpf,
        Suite::ProductBpf,
        Suite::Independence,
        Suite::Injectivity,
        Suite::Immersion,
        Suite::Divisibility,
        Suite::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LatticeExact => "lattice-exact",
            Suite::ThetaIdentities => "theta-identities",
            Suite::Factorization => "factorization",
            Suite::Limit => "limit",
            Suite::Gluing => "gluing",
            Suite::Bpf => "bpf",
            Suite::ProductBpf => "product-bpf",
            Suite::Independence => "independence",
            Suite::Injectivity => "injectivity",
            Suite::Immersion => "immersion",
            Suite::Divisibility => "divisibility",
            Suite::Full => "full",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Suite::LatticeExact => {
                "pairing, chart and toroidal identities on bounded boxes (exact integers)"
            }
            Suite::ThetaIdentities => {
                "quasi-periodicity, evenness and common automorphy factors of theta series"
            }
            Suite::Factorization => {
                "theta_k as a finite sum of one-variable thetas, on configured period matrices"
            }
            Suite::Limit => "sections at small t against their limits on the degenerate fiber",
            Suite::Gluing => "phi is unchanged by the gluing normalization",
            Suite::Bpf => "no common zero of the limit sections on any stratum",
            Suite::ProductBpf => {
                "common zeros of the canonical basis on a product of elliptic curves"
            }
            Suite::Independence => "random point sets of size < d impose independent conditions",
            Suite::Injectivity => "multi-start search for pairs identified by phi",
            Suite::Immersion => "rank of the tangent family on every stratum",
            Suite::Divisibility => "pairs (g, d) with g! dividing binomial(d, g + 1)",
            Suite::Full => "every suite above on the configured model",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "star" {
            return Ok(Suite::LatticeExact);
        }
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Period entries of the degeneration model. Omitted entries are filled
/// from built-in generic values: `tau_g = 0.4 + i max(1.1, d/3)`, and the
/// `tau'`, `tau''` entries for `g <= 4`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_g: Option<Pair>,
    /// `tau_ij` for `i < j < g - 1`, row by row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_prime: Option<Vec<Pair>>,
    /// `tau_{i,g}` for `i < g - 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_dprime: Option<Vec<Pair>>,
}

/// Keeps the fundamental rectangle `d x Im tau_g` of aspect ratio at most 3;
/// more elongated curves squeeze the theta vectors towards a low-dimensional
/// subspace and projective distances lose their resolution.
pub fn default_tau_g(d: u32) -> Pair {
    [0.4, (f64::from(d) / 3.0).max(1.1)]
}

const DEFAULT_TAU_PRIME: [Pair; 3] = [[0.31, 0.27], [0.11, 0.23], [-0.17, 0.31]];
const DEFAULT_TAU_DPRIME: [Pair; 3] = [[0.21, 0.38], [0.13, 0.59], [0.37, 0.17]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Target truncation error of every theta evaluation.
    pub tol: f64,
    /// Relative singular value cut-off of numerical ranks.
    pub tol_rel: f64,
    /// A normalized base-locus residual below this counts as a zero.
    pub delta_bpf: f64,
    /// Fubini-Study distance below which two images coincide.
    pub delta_coll: f64,
    /// Integer relations closer than this to the lattice reject the model.
    pub genericity: f64,
    pub separation_floor: f64,
    pub spread: f64,
    pub factorization: f64,
    pub limit: f64,
    pub gluing: f64,
    pub independence_ratio: f64,
    pub product_witness: f64,
    /// Smallest eigenvalue of `Im tau` accepted by theta evaluation.
    pub eigen_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            tol_rel: 1e-8,
            delta_bpf: 1e-6,
            delta_coll: 1e-8,
            genericity: 1e-9,
            separation_floor: 1e-3,
            spread: 1e-9,
            factorization: 1e-8,
            limit: 1e-6,
            gluing: 1e-9,
            independence_ratio: 1e-7,
            product_witness: 1e-8,
            eigen_floor: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Sweep points per zero pattern in the base-locus search.
    pub samples: usize,
    /// Sweep minima refined by simplex descent.
    pub refinements: usize,
    /// Evaluation budget of one refinement.
    pub iterations: usize,
    /// Restarts of the collision search.
    pub restarts: usize,
    pub involution_restarts: usize,
    pub screen_iterations: usize,
    /// Free-pair restarts of the collision search refined after screening.
    pub collision_refinements: usize,
    /// Coefficient bound of the genericity certificate.
    pub n_rel: u32,
    pub points_per_stratum: usize,
    pub gluing_points: usize,
    pub limit_samples: usize,
    pub theta_inputs: usize,
    pub independence_subsets: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            samples: 2000,
            refinements: 8,
            iterations: 1500,
            restarts: 10_000,
            involution_restarts: 1024,
            screen_iterations: 150,
            collision_refinements: 256,
            n_rel: 8,
            points_per_stratum: 20,
            gluing_points: 200,
            limit_samples: 50,
            theta_inputs: 100,
            independence_subsets: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeParams {
    /// Vector entries of the box checks range over `[-entry_bound, entry_bound]`;
    /// the box checks run for every genus up to the top-level `g`.
    pub entry_bound: i64,
    pub star_max_g: usize,
    pub involution_max_g: usize,
    pub period_max_d: u64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            entry_bound: 3,
            star_max_g: 10,
            involution_max_g: 8,
            period_max_d: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DivisibilityParams {
    pub g_max: u64,
}

impl Default for DivisibilityParams {
    fn default() -> Self {
        Self { g_max: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThetaParams {
    pub max_g: usize,
    pub max_d: u32,
    /// Random period matrices have `Im tau` eigenvalues at least this.
    pub eigen_min: f64,
}

impl Default for ThetaParams {
    fn default() -> Self {
        Self {
            max_g: 3,
            max_d: 6,
            eigen_min: 0.5,
        }
    }
}

/// A period matrix, given by its upper triangle row by row, and a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationInstance {
    pub d: u32,
    pub tau: Vec<Pair>,
    pub z: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactorizationParams {
    pub q_max: u32,
    pub instances: Vec<FactorizationInstance>,
}

impl Default for FactorizationParams {
    fn default() -> Self {
        Self {
            q_max: 6,
            instances: vec![
                FactorizationInstance {
                    d: 3,
                    tau: vec![[0.0, 2.0], [0.3, 0.1], [0.0, 1.0]],
                    z: vec![[0.17, 0.05], [0.61, -0.12]],
                },
                FactorizationInstance {
                    d: 4,
                    tau: vec![
                        [0.1, 2.2],
                        [0.25, 0.15],
                        [0.2, 0.1],
                        [-0.1, 1.9],
                        [0.15, 0.12],
                        [0.3, 1.1],
                    ],
                    z: vec![[0.23, 0.04], [-0.41, 0.1], [0.57, -0.08]],
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitParams {
    /// Decreasing values of `t`; the last is judged against the limit tolerance.
    pub t_scales: Vec<f64>,
}

impl Default for LimitParams {
    fn default() -> Self {
        Self {
            t_scales: vec![1e-2, 1e-4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndependenceParams {
    pub degrees: Vec<u32>,
    /// Curve used for every degree; by default `default_tau_g` of each degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_g: Option<Pair>,
}

impl Default for IndependenceParams {
    fn default() -> Self {
        Self {
            degrees: vec![5, 8, 9, 13],
            tau_g: None,
        }
    }
}

/// Elliptic factors for the product construction; the first `g` are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProductParams {
    pub taus: Vec<Pair>,
    pub samples: usize,
    pub refinements: usize,
    pub iterations: usize,
}

impl Default for ProductParams {
    fn default() -> Self {
        Self {
            taus: vec![[0.4, 1.1], [0.1, 0.9], [-0.2, 1.3], [0.3, 1.0]],
            samples: 4000,
            refinements: 12,
            iterations: 3000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InjectivityParams {
    /// Screened restarts with an objective below this are eligible for refinement.
    pub screen_threshold: f64,
    /// Evaluation budget of each refinement.
    pub refine_iterations: usize,
}

impl Default for InjectivityParams {
    fn default() -> Self {
        Self {
            screen_threshold: 0.05,
            refine_iterations: 6000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub g: usize,
    pub d: u32,
    pub model: ModelParams,
    pub tolerances: Tolerances,
    pub budgets: Budgets,
    pub lattice: LatticeParams,
    pub divisibility: DivisibilityParams,
    pub theta: ThetaParams,
    pub factorization: FactorizationParams,
    pub limit: LimitParams,
    pub independence: IndependenceParams,
    pub product: ProductParams,
    pub injectivity: InjectivityParams,
}

impl Default for SuiteConfig {
    /// Defaults with the model entries left open; see [`SuiteConfig::resolved`].
    fn default() -> Self {
        Self {
            suite: Suite::Full,
            seed: 0,
            g: 3,
            d: 9,
            model: ModelParams::default(),
            tolerances: Tolerances::default(),
            budgets: Budgets::default(),
            lattice: LatticeParams::default(),
            divisibility: DivisibilityParams::default(),
            theta: ThetaParams::default(),
            factorization: FactorizationParams::default(),
            limit: LimitParams::default(),
            independence: IndependenceParams::default(),
            product: ProductParams::default(),
            injectivity: InjectivityParams::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            key,
            format!("must be a positive finite number, got {x}"),
        ))
    }
}

fn nonzero(key: &str, n: usize) -> Result<(), ConfigError> {
    if n == 0 {
        Err(invalid(key, "must be at least 1"))
    } else {
        Ok(())
    }
}

fn finite_pairs(key: &str, v: &[Pair]) -> Result<(), ConfigError> {
    match v
        .iter()
        .position(|p| !(p[0].is_finite() && p[1].is_finite()))
    {
        Some(i) => Err(invalid(key, format!("entry {i} is not finite"))),
        None => Ok(()),
    }
}

fn upper_triangle_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl SuiteConfig {
    /// The configuration an empty file loads to.
    pub fn resolved() -> Self {
        let mut cfg = Self::default();
        cfg.fill_model_defaults();
        cfg
    }

    /// Fills omitted model entries with the built-in values when they exist
    /// for this `g`.
    pub fn fill_model_defaults(&mut self) {
        if self.model.tau_g.is_none() {
            self.model.tau_g = Some(default_tau_g(self.d));
        }
        let h = self.g.saturating_sub(1);
        let offdiag = h * h.saturating_sub(1) / 2;
        if self.model.tau_dprime.is_none() && h <= DEFAULT_TAU_DPRIME.len() {
            self.model.tau_dprime = Some(DEFAULT_TAU_DPRIME[..h].to_vec());
        }
        if self.model.tau_prime.is_none() && offdiag <= DEFAULT_TAU_PRIME.len() {
            self.model.tau_prime = Some(DEFAULT_TAU_PRIME[..offdiag].to_vec());
        }
    }

    /// Checks every invariant, naming the first offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.g == 0 {
            return Err(invalid("g", "must be at least 1"));
        }
        if self.d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(invalid("seed", "must fit in a signed 64-bit integer"));
        }
        let h = self.g - 1;
        let m = &self.model;
        if let Some(t) = m.tau_g {
            finite_pairs("model.tau_g", &[t])?;
            if !(t[1] > 0.0) {
                return Err(invalid("model.tau_g", "imaginary part must be positive"));
            }
        }
        if let Some(v) = &m.tau_dprime {
            finite_pairs("model.tau_dprime", v)?;
            if v.len() != h {
                return Err(invalid(
                    "model.tau_dprime",
                    format!("expected {h} entries for g = {}, got {}", self.g, v.len()),
                ));
            }
        }
        if let Some(v) = &m.tau_prime {
            finite_pairs("model.tau_prime", v)?;
            let n = h * h.saturating_sub(1) / 2;
            if v.len() != n {
                return Err(invalid(
                    "model.tau_prime",
                    format!("expected {n} entries for g = {}, got {}", self.g, v.len()),
                ));
            }
        }

        let t = &self.tolerances;
        for (key, x) in [
            ("tolerances.tol", t.tol),
            ("tolerances.tol_rel", t.tol_rel),
            ("tolerances.delta_bpf", t.delta_bpf),
            ("tolerances.delta_coll", t.delta_coll),
            ("tolerances.genericity", t.genericity),
            ("tolerances.separation_floor", t.separation_floor),
            ("tolerances.spread", t.spread),
            ("tolerances.factorization", t.factorization),
            ("tolerances.limit", t.limit),
            ("tolerances.gluing", t.gluing),
            ("tolerances.independence_ratio", t.independence_ratio),
            ("tolerances.product_witness", t.product_witness),
            ("tolerances.eigen_floor", t.eigen_floor),
        ] {
            positive(key, x)?;
        }

        let b = &self.budgets;
        for (key, n) in [
            ("budgets.samples", b.samples),
            ("budgets.refinements", b.refinements),
            ("budgets.iterations", b.iterations),
            ("budgets.restarts", b.restarts),
            ("budgets.screen_iterations", b.screen_iterations),
            ("budgets.collision_refinements", b.collision_refinements),
            ("budgets.points_per_stratum", b.points_per_stratum),
            ("budgets.gluing_points", b.gluing_points),
            ("budgets.limit_samples", b.limit_samples),
            ("budgets.theta_inputs", b.theta_inputs),
            ("budgets.independence_subsets", b.independence_subsets),
        ] {
            nonzero(key, n)?;
        }
        if b.involution_restarts > b.restarts {
            return Err(invalid(
                "budgets.involution_restarts",
                "cannot exceed budgets.restarts",
            ));
        }

        if self.lattice.entry_bound < 0 {
            return Err(invalid("lattice.entry_bound", "must be nonnegative"));
        }
        nonzero("lattice.star_max_g", self.lattice.star_max_g)?;
        nonzero("lattice.involution_max_g", self.lattice.involution_max_g)?;
        if self.lattice.period_max_d == 0 {
            return Err(invalid("lattice.period_max_d", "must be at least 1"));
        }
        if self.divisibility.g_max == 0 {
            return Err(invalid("divisibility.g_max", "must be at least 1"));
        }

        nonzero("theta.max_g", self.theta.max_g)?;
        if self.theta.max_d == 0 {
            return Err(invalid("theta.max_d", "must be at least 1"));
        }
        positive("theta.eigen_min", self.theta.eigen_min)?;

        for (i, inst) in self.factorization.instances.iter().enumerate() {
            let key = format!("factorization.instances[{i}]");
            if inst.d == 0 {
                return Err(invalid(&format!("{key}.d"), "must be at least 1"));
            }
            finite_pairs(&format!("{key}.tau"), &inst.tau)?;
            finite_pairs(&format!("{key}.z"), &inst.z)?;
            let g = inst.z.len();
            if g == 0 || inst.tau.len() != upper_triangle_len(g) {
                return Err(invalid(
                    &format!("{key}.tau"),
                    format!(
                        "expected the {} upper-triangle entries for {g} coordinates",
                        upper_triangle_len(g)
                    ),
                ));
            }
        }

        if self.limit.t_scales.is_empty() {
            return Err(invalid("limit.t_scales", "at least one value is required"));
        }
        if let Some(t) = self
            .limit
            .t_scales
            .iter()
            .find(|t| !(t.is_finite() && **t > 0.0 && **t < 1.0))
        {
            return Err(invalid(
                "limit.t_scales",
                format!("values must lie in (0, 1), got {t}"),
            ));
        }

        if let Some(t) = self.independence.tau_g {
            finite_pairs("independence.tau_g", &[t])?;
            if !(t[1] > 0.0) {
                return Err(invalid(
                    "independence.tau_g",
                    "imaginary part must be positive",
                ));
            }
        }
        if let Some(d) = self.independence.degrees.iter().find(|&&d| d < 2) {
            return Err(invalid(
                "independence.degrees",
                format!("degrees must be at least 2, got {d}"),
            ));
        }

        let p = &self.product;
        finite_pairs("product.taus", &p.taus)?;
        if let Some(i) = p.taus.iter().position(|t| !(t[1] > 0.0)) {
            return Err(invalid(
                "product.taus",
                format!("entry {i} must have positive imaginary part"),
            ));
        }
        nonzero("product.samples", p.samples)?;
        nonzero("product.refinements", p.refinements)?;
        nonzero("product.iterations", p.iterations)?;

        positive(
            "injectivity.screen_threshold",
            self.injectivity.screen_threshold,
        )?;
        nonzero(
            "injectivity.refine_iterations",
            self.injectivity.refine_iterations,
        )?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Parses and validates a configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<SuiteConfig, ConfigError> {
    let mut cfg: SuiteConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.fill_model_defaults();
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SuiteConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config("suite = \"star\"\ng = 3\n").unwrap();
        assert_eq!(cfg.suite, Suite::LatticeExact);
        assert_eq!(cfg.g, 3);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.model.tau_dprime.as_ref().unwrap().len(), 2);
        assert_eq!(cfg.model.tau_prime.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(parse_config("").unwrap(), SuiteConfig::resolved());
    }

    #[test]
    fn negative_collision_threshold_names_the_key() {
        let err = parse_config("[tolerances]\ndelta_coll = -1.0\n").unwrap_err();
        match err {
            ConfigError::Invalid { key, .. } => assert_eq!(key, "tolerances.delta_coll"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse_config("g = 2\n[tolerances]\ndelta_col = 1e-8\n").unwrap_err();
        match err {
            ConfigError::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (3, 1));
                assert!(message.contains("delta_col"), "{message}");
            }
            other => panic!("{other}"),
        }
        assert!(matches!(
            parse_config("gg = 2\n"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("suite = \"bogus\"\n"),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn model_shape_is_checked() {
        let err =
            parse_config("g = 2\n[model]\ntau_dprime = [[0.1, 0.2], [0.3, 0.4]]\n").unwrap_err();
        assert!(
            matches!(err, ConfigError::Invalid { ref key, .. } if key == "model.tau_dprime"),
            "{err}"
        );
        let err = parse_config("[model]\ntau_g = [0.1, -1.0]\n").unwrap_err();
        assert!(
            matches!(err, ConfigError::Invalid { ref key, .. } if key == "model.tau_g"),
            "{err}"
        );
    }

    #[test]
    fn default_tau_g_follows_the_degree() {
        assert_eq!(
            parse_config("d = 3\n").unwrap().model.tau_g,
            Some([0.4, 1.1])
        );
        assert_eq!(
            parse_config("d = 9\n").unwrap().model.tau_g,
            Some([0.4, 3.0])
        );
        let cfg = parse_config("d = 9\n[model]\ntau_g = [0.1, 1.5]\n").unwrap();
        assert_eq!(cfg.model.tau_g, Some([0.1, 1.5]));
    }

    #[test]
    fn large_genus_leaves_model_entries_open() {
        let cfg = parse_config("g = 6\n").unwrap();
        assert!(cfg.model.tau_dprime.is_none());
        assert!(cfg.model.tau_prime.is_none());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("star".parse::<Suite>().unwrap(), Suite::LatticeExact);
        assert!("stars".parse::<Suite>().is_err());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(
            load_config(Path::new("/nonexistent/abvar.toml")),
            Err(ConfigError::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn serialized_configs_reparse_to_equal_values(
            g in 1usize..=4,
            d in 1u32..=20,
            seed in 0..=i64::MAX as u64,
            tol_rel in 1e-12f64..1e-4,
            restarts in 1024usize..50_000,
            suite in 0usize..Suite::ALL.len(),
        ) {
            let text = format!(
                "suite = \"{}\"\nseed = {seed}\ng = {g}\nd = {d}\n[tolerances]\ntol_rel = {tol_rel:e}\n[budgets]\nrestarts = {restarts}\n",
                Suite::ALL[suite]
            );
            let cfg = parse_config(&text).unwrap();
            let again = parse_config(&cfg.to_toml()).unwrap();
            prop_assert_eq!(again, cfg);
        }
    }
}
