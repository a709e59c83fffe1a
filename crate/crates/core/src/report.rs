//! Run configuration, self-describing JSON reports and the textual input
//! formats used by the command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::domains::{BalancedDomain, CVec};
use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::parse::parse_vector;
use crate::verdict::{Decision, Verdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_TOLS: [(&str, f64); 4] = [
    // boundary membership of input points
    ("boundary", 1e-9),
    // slack for supporting functionals
    ("convexity", 1e-6),
    // accepted sampled operator norm of a constructed projection, above 1
    ("norm", 1e-9),
    // grid projections with sampled norm at most 1 + this count as norm one
    ("grid_norm", 1e-6),
];

const DEFAULT_SAMPLES: [(&str, usize); 5] = [
    ("self_map", 10_000),
    ("norm", 2_000),
    ("grid", 10_000),
    ("directions", 10_000),
    ("probe", 200),
];

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: BTreeMap<String, f64>,
    pub nsamples: BTreeMap<String, usize>,
    /// `None` writes no JSON; `Some("-")` writes it to standard output.
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: DEFAULT_TOLS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            nsamples: DEFAULT_SAMPLES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            output: None,
        }
    }
}

fn split_assignment(s: &str) -> Result<(&str, &str)> {
    s.split_once('=').ok_or_else(|| RetractError::Parse {
        pos: 0,
        msg: format!("expected NAME=VALUE, got {s:?}"),
    })
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tol[name]
    }

    pub fn samples(&self, name: &str) -> usize {
        self.nsamples[name]
    }

    /// Applies `NAME=VALUE` to a known tolerance.
    pub fn set_tol(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = split_assignment(assignment)?;
        let Some(slot) = self.tol.get_mut(k) else {
            let known: Vec<&str> = DEFAULT_TOLS.iter().map(|x| x.0).collect();
            return Err(RetractError::Invalid(format!("unknown tolerance {k:?}; known: {}", known.join(", "))));
        };
        let x: f64 = v.parse().map_err(|_| RetractError::Parse {
            pos: k.len() + 1,
            msg: format!("not a number: {v:?}"),
        })?;
        if !(x >= 0.0) || !x.is_finite() {
            return Err(RetractError::Invalid(format!("tolerance {k} must be finite and nonnegative")));
        }
        *slot = x;
        Ok(())
    }

    /// Applies `NAME=COUNT` to a known sample count.
    pub fn set_samples(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = split_assignment(assignment)?;
        let Some(slot) = self.nsamples.get_mut(k) else {
            let known: Vec<&str> = DEFAULT_SAMPLES.iter().map(|x| x.0).collect();
            return Err(RetractError::Invalid(format!("unknown sample count {k:?}; known: {}", known.join(", "))));
        };
        *slot = v.parse().map_err(|_| RetractError::Parse {
            pos: k.len() + 1,
            msg: format!("not a count: {v:?}"),
        })?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub inputs: Value,
    pub verdicts: Vec<Verdict>,
    pub certificates: Map<String, Value>,
    pub timing_ms: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, config: &RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            seed: config.seed,
            inputs,
            verdicts: Vec::new(),
            certificates: Map::new(),
            timing_ms: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn certificate(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("serializable certificate");
        self.certificates.insert(name.to_string(), v);
    }

    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.timing_ms = t.elapsed().as_secs_f64() * 1e3;
        }
        self
    }

    /// The report without timing, which is the part that replays identically.
    pub fn deterministic_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable report");
        v.as_object_mut().expect("object").remove("timing_ms");
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }

    /// 0 when every verdict is positive, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().all(|v| v.decision == Decision::Yes) {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (seed {})", self.command, self.seed);
        for (k, v) in &self.certificates {
            let text = match v {
                Value::String(x) => x.clone(),
                Value::Number(_) | Value::Bool(_) => v.to_string(),
                _ => {
                    let t = v.to_string();
                    if t.len() > 100 {
                        format!("{}…", &t[..t.char_indices().nth(100).map_or(t.len(), |c| c.0)])
                    } else {
                        t
                    }
                }
            };
            let _ = writeln!(s, "  {k}: {text}");
        }
        for v in &self.verdicts {
            let tag = match v.decision {
                Decision::Yes => "yes",
                Decision::No => "no",
                Decision::Inconclusive => "inconclusive",
            };
            let _ = writeln!(s, "  [{tag}] {}: {}", v.anchor, v.summary);
        }
        let _ = write!(s, "  time: {:.1} ms", self.timing_ms);
        s
    }
}

/// Parses a domain either as JSON or in the short forms `lp:P:N`,
/// `polydisc:N`, `ball:N`, `egg:q1,q2,…`, `dh` and `poly:f1;f2;…`.
pub fn parse_domain(text: &str) -> Result<BalancedDomain> {
    let t = text.trim();
    if t.starts_with('{') {
        return BalancedDomain::from_json(t);
    }
    let bad = |pos: usize, msg: &str| RetractError::Parse {
        pos,
        msg: format!("{msg} in domain {t:?}"),
    };
    let (kind, rest) = t.split_once(':').unwrap_or((t, ""));
    let at = kind.len() + 1;
    let int = |s: &str, pos: usize| -> Result<usize> { s.trim().parse().map_err(|_| bad(pos, "expected a dimension")) };
    match kind {
        "dh" => Ok(BalancedDomain::dh()),
        "polydisc" => Ok(BalancedDomain::polydisc(int(rest, at)?)),
        "ball" => Ok(BalancedDomain::ball(int(rest, at)?)),
        "lp" => {
            let (ps, n) = rest.split_once(':').ok_or_else(|| bad(at, "expected lp:P:N"))?;
            let p: f64 = match ps.trim() {
                "inf" | "infinity" => f64::INFINITY,
                s => parse_real(s).ok_or_else(|| bad(at, "expected an exponent"))?,
            };
            BalancedDomain::lp(p, int(n, at + ps.len() + 1)?)
        }
        "egg" => {
            let q = rest
                .split(',')
                .map(|s| parse_real(s).ok_or_else(|| bad(at, "expected exponents like 1/2,0.3")))
                .collect::<Result<Vec<_>>>()?;
            BalancedDomain::egg(q)
        }
        "poly" => {
            let defs: Vec<&str> = rest.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
            BalancedDomain::polyhedron(&defs)
        }
        _ => Err(bad(0, "unknown domain kind (lp, polydisc, ball, egg, dh, poly or JSON)")),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

/// Parses `(a, b, …)` with Gaussian-rational entries into a float point.
pub fn parse_point(text: &str) -> Result<CVec> {
    Ok(parse_vector(text)?.iter().map(ExactComplex::to_c64).collect())
}

/// `[[re, im], …]`, the JSON shape of a complex vector in reports.
pub fn show_vec(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}
