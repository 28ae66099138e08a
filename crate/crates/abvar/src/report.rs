//! Versioned, machine-readable verification reports.
//!
//! Every numeric finding is a [`Residual`] carrying the tolerance it was
//! judged against. Floating-point values are rounded to twelve significant
//! digits when recorded, so reruns compare equal at the verdict level.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::SuiteConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept in reports.
pub const SIGNIFICANT_DIGITS: i32 = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits; non-finite and
/// zero values pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let text = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    text.parse().unwrap_or(x)
}

/// Applies [`round_sig`] to every float inside a JSON value.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// Recorded for context only; never affects the overall verdict.
    Info,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Info => "INFO",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// How a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "==")]
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::Equal => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: round_sig(value),
            tolerance: round_sig(tolerance),
            relation,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Below, tolerance)
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Above, tolerance)
    }

    /// An exact count compared with its expected value.
    pub fn equal(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self::new(name, value, Relation::Equal, expected)
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Below => self.value < self.tolerance,
            Relation::Above => self.value > self.tolerance,
            Relation::Equal => self.value == self.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    /// Mandatory checks decide the overall verdict.
    pub mandatory: bool,
    /// Headline tolerance of the check.
    pub tolerance: Option<f64>,
    /// Plain-language statement being certified.
    pub statement: String,
    pub residuals: Vec<Residual>,
    pub witnesses: Vec<Value>,
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, statement: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Info,
            mandatory: true,
            tolerance: None,
            statement: statement.into(),
            residuals: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(round_sig(tol));
        self
    }

    pub fn informational(mut self) -> Self {
        self.mandatory = false;
        self.verdict = Verdict::Info;
        self
    }

    pub fn residual(&mut self, r: Residual) -> &mut Self {
        self.residuals.push(r);
        self
    }

    pub fn witness(&mut self, w: impl Serialize) -> &mut Self {
        let mut v = serde_json::to_value(w).unwrap_or(Value::Null);
        round_value(&mut v);
        self.witnesses.push(v);
        self
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.notes.push(n.into());
        self
    }

    /// PASS iff every residual holds (and there is at least one).
    pub fn judge(mut self) -> Self {
        if self.mandatory {
            self.verdict = Verdict::from_bool(
                !self.residuals.is_empty() && self.residuals.iter().all(Residual::holds),
            );
        }
        self
    }

    pub fn with_verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// A mandatory check that could not be carried out.
    pub fn error(
        name: impl Into<String>,
        statement: impl Into<String>,
        err: impl std::fmt::Display,
    ) -> Self {
        let mut c = Self::new(name, statement).with_verdict(Verdict::Fail);
        c.note(format!("error: {err}"));
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub suite: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub config: Value,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(config: &SuiteConfig) -> Self {
        let mut echo = serde_json::to_value(config).unwrap_or(Value::Null);
        round_value(&mut echo);
        Self {
            version: SCHEMA_VERSION,
            suite: config.suite.name().to_string(),
            seed: config.seed,
            verdict: Verdict::Pass,
            config: echo,
            checks: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
        self.verdict = overall(&self.checks);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The report without its wall-clock time, for reproducibility comparisons.
    pub fn verdict_view(&self) -> Value {
        let mut v = serde_json::to_value(self).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut v {
            map.remove("wall_time_s");
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} (seed {}): {}",
            self.suite,
            self.seed,
            self.verdict.label()
        );
        for c in &self.checks {
            let tag = if c.mandatory { "" } else { " (informational)" };
            let _ = writeln!(out, "  {:<12} {}{}", c.verdict.label(), c.name, tag);
            for r in &c.residuals {
                let mark = if r.holds() { "ok" } else { "violated" };
                let _ = writeln!(
                    out,
                    "      {} = {:e} {} {:e}  [{mark}]",
                    r.name,
                    r.value,
                    r.relation.symbol(),
                    r.tolerance
                );
            }
            if !c.witnesses.is_empty() {
                let _ = writeln!(out, "      witnesses: {}", c.witnesses.len());
            }
            for n in &c.notes {
                let _ = writeln!(out, "      note: {n}");
            }
        }
        let _ = writeln!(out, "wall time {:.2} s", self.wall_time_s);
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::Fail {
            1
        } else {
            0
        }
    }
}

/// FAIL if any mandatory check fails, else INCONCLUSIVE if any is
/// inconclusive, else PASS.
pub fn overall(checks: &[Check]) -> Verdict {
    let mandatory = || checks.iter().filter(|c| c.mandatory);
    if mandatory().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if mandatory().any(|c| c.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected json or text)")),
        }
    }
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> std::io::Result<()> {
    let mut body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}
