//! Named, parameterized reproductions of verifiable claims. Each run
//! searches for witnesses, re-validates them independently and emits a
//! [`Report`].

mod combinatorics;
mod morse;
mod rotation;
mod skew;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, ParseError, Result};
use crate::systems::circle::{CircleCoord, Precision};

pub const REPORT_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A labeled value in its canonical text form: sets as `elems@N`, dyadic
/// rationals as `m/2^e`, witnesses as compact JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Observation {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub observations: Vec<Observation>,
    pub verdict: Verdict,
    pub ambiguity_count: u64,
    pub seed: u64,
    pub runtime_ms: Option<u64>,
    pub artifact_version: String,
    pub report_version: u32,
}

impl Report {
    pub fn observation(&self, label: &str) -> Option<&str> {
        self.observations
            .iter()
            .find(|o| o.label == label)
            .map(|o| o.value.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `label,value` rows after a header, quoting values as needed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,value\n");
        let rows = [
            ("name", self.name.clone()),
            ("verdict", self.verdict.to_string()),
            ("ambiguity_count", self.ambiguity_count.to_string()),
            ("seed", self.seed.to_string()),
        ];
        for (label, value) in rows {
            push_csv_row(&mut out, label, &value);
        }
        for (k, v) in &self.params {
            push_csv_row(&mut out, &format!("param.{k}"), v);
        }
        for o in &self.observations {
            push_csv_row(&mut out, &o.label, &o.value);
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn push_csv_row(out: &mut String, label: &str, value: &str) {
    out.push_str(&csv_field(label));
    out.push(',');
    out.push_str(&csv_field(value));
    out.push('\n');
}

/// Observations and the verdict an experiment body produces.
#[derive(Debug, Default)]
pub(crate) struct Findings {
    observations: Vec<Observation>,
    ambiguity_count: u64,
    failures: Vec<String>,
    inconclusive: Vec<String>,
}

impl Findings {
    pub(crate) fn record(&mut self, label: &str, value: impl fmt::Display) {
        self.observations.push(Observation {
            label: label.to_string(),
            value: value.to_string(),
        });
    }

    pub(crate) fn record_json(&mut self, label: &str, value: &impl Serialize) {
        self.record(label, serde_json::to_string(value).expect("observations serialize"));
    }

    /// Records a named check; a false check makes the verdict fail.
    pub(crate) fn check(&mut self, label: &str, ok: bool) {
        self.record(&format!("check.{label}"), if ok { "ok" } else { "violated" });
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    /// Records a one-sided search whose absence is not a refutation.
    pub(crate) fn expect_found(&mut self, label: &str, found: bool) {
        self.record(&format!("search.{label}"), if found { "found" } else { "absent-budget" });
        if !found {
            self.inconclusive.push(label.to_string());
        }
    }

    pub(crate) fn add_ambiguity(&mut self, n: u64) {
        self.ambiguity_count += n;
    }

    fn verdict(&self) -> Verdict {
        if !self.failures.is_empty() {
            Verdict::Fail
        } else if !self.inconclusive.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Typed access to string parameters with defaults. Every value read is
/// recorded in canonical form; unread keys are rejected.
pub struct ParamReader {
    input: BTreeMap<String, String>,
    defaults: &'static [(&'static str, &'static str)],
    resolved: BTreeMap<String, String>,
}

impl ParamReader {
    pub fn new(input: BTreeMap<String, String>, defaults: &'static [(&'static str, &'static str)]) -> Self {
        ParamReader {
            input,
            defaults,
            resolved: BTreeMap::new(),
        }
    }

    fn take<T: fmt::Display>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
        let raw = match self.input.remove(key) {
            Some(v) => v,
            None => self
                .defaults
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| v.to_string())
                .ok_or_else(|| Error::Internal(format!("parameter {key} has no default")))?,
        };
        let value = parse(&raw).map_err(|e| match e {
            Error::Parse(p) => Error::Usage(format!("parameter {key}: {p}")),
            other => Error::Usage(format!("parameter {key}: {other}")),
        })?;
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn u64(&mut self, key: &str) -> Result<u64> {
        self.take(key, |s| {
            u64::from_str(s.trim()).map_err(|e| ParseError::new(s, 0, e.to_string()).into())
        })
    }

    pub fn positive(&mut self, key: &str) -> Result<u64> {
        let v = self.u64(key)?;
        if v == 0 {
            return Err(Error::usage(format!("parameter {key} must be positive")));
        }
        Ok(v)
    }

    pub fn precision(&mut self) -> Result<Precision> {
        let bits = self.u64("precision")?;
        Precision::from_bits(bits as u32).map_err(|e| Error::Usage(format!("parameter precision: {e}")))
    }

    /// A dyadic rational; decimals round to the nearest multiple of `2^−bits`.
    pub fn dyadic(&mut self, key: &str, bits: u32) -> Result<Dyadic> {
        self.take(key, |s| Ok(Dyadic::parse_with_precision(s, bits)?.0))
    }

    pub fn circle(&mut self, key: &str, prec: Precision) -> Result<CircleCoord> {
        self.take(key, |s| Ok(CircleCoord::parse(s, prec)?))
    }

    pub fn rational(&mut self, key: &str) -> Result<BigRational> {
        self.take(key, |s| Ok(parse_rational(s)?))
    }

    /// Rejects parameters no experiment step read.
    pub fn finish(&self) -> Result<()> {
        match self.input.keys().next() {
            Some(k) => Err(Error::usage(format!("unknown parameter '{k}'"))),
            None => Ok(()),
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

/// Parses `p/q` or a decimal such as `0.3` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let t = text.trim();
    let bad = |pos: usize, msg: &str| ParseError::new(text, pos, msg);
    if let Some((p, q)) = t.split_once('/') {
        let num = BigInt::from_str(p.trim()).map_err(|_| bad(0, "expected an integer numerator"))?;
        let den = BigInt::from_str(q.trim()).map_err(|_| bad(p.len() + 1, "expected an integer denominator"))?;
        if den.is_zero() {
            return Err(bad(p.len() + 1, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad(0, "expected a number"));
    }
    if let Some(i) = body.find(|c: char| !c.is_ascii_digit() && c != '.') {
        return Err(bad(i + usize::from(neg), "unexpected character in decimal"));
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad(0, "malformed decimal"))?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub(crate) fn rational_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn require_positive_rational(key: &str, r: &BigRational) -> Result<()> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(Error::usage(format!("parameter {key} must be positive")))
    }
}

type Body = fn(&mut ParamReader, u64, &mut Findings) -> Result<()>;

/// A registered experiment.
pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameters with their default values.
    pub defaults: &'static [(&'static str, &'static str)],
    body: Body,
}

static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "morse-strong-ft",
        summary: "Morse pair (flip(omega), eta): forward separation, backward asymptoticity and a thick divergence block",
        defaults: &[("back", "64"), ("s", "64"), ("window", "4096")],
        body: morse::strong_ft,
    },
    Experiment {
        name: "rotation-equicontinuous",
        summary: "Irrational rotation: empty sensitivity set and pigeonhole recurrence on random time sets",
        defaults: &[
            ("alpha", "sqrt2-1"),
            ("eps", "1/32"),
            ("grid", "16"),
            ("precision", "64"),
            ("radius", "1/64"),
            ("trials", "1000"),
            ("window", "1000"),
        ],
        body: rotation::equicontinuous,
    },
    Experiment {
        name: "skew-ft-sensitive",
        summary: "Two-dimensional skew product: sensitivity set over a small ball contains a long block",
        defaults: &[
            ("alpha", "sqrt2-1"),
            ("block_target", "100"),
            ("delta", "1/4"),
            ("grid", "8"),
            ("precision", "64"),
            ("radius", "1/128"),
            ("window", "100000"),
        ],
        body: skew::ft_sensitive,
    },
    Experiment {
        name: "skew-example-522",
        summary: "Skew product orbit decomposition and the containments between the sets F1, F2, F3",
        defaults: &[
            ("alpha", "sqrt2-1"),
            ("d", "3"),
            ("delta", "1/16"),
            ("precision", "64"),
            ("samples", "20"),
            ("window", "10000"),
        ],
        body: skew::orbit_set_containments,
    },
    Experiment {
        name: "families-oracle",
        summary: "Finite IP and finite difference searches agree with brute force on every subset of a small universe",
        defaults: &[("max_length", "3"), ("universe", "16")],
        body: combinatorics::families_oracle,
    },
    Experiment {
        name: "gillis",
        summary: "Selection of k sets with large common intersection on random cell spaces",
        defaults: &[
            ("a", "3/10"),
            ("cells", "200"),
            ("eps", "1/100"),
            ("k", "2"),
            ("sets", "60"),
            ("trials", "100"),
        ],
        body: combinatorics::gillis,
    },
];

pub fn registry() -> &'static [Experiment] {
    REGISTRY
}

pub fn find_experiment(name: &str) -> Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        let known: Vec<_> = REGISTRY.iter().map(|e| e.name).collect();
        Error::usage(format!("unknown experiment '{name}' (known: {})", known.join(", ")))
    })
}

/// Runs one experiment; unknown parameters are rejected before any work.
/// `runtime_ms` is left unset so that reports are
/// reproducible byte for byte.
pub fn run_experiment(name: &str, params: BTreeMap<String, String>, seed: u64) -> Result<Report> {
    let exp = find_experiment(name)?;
    if let Some(k) = params.keys().find(|k| !exp.defaults.iter().any(|(d, _)| d == k)) {
        return Err(Error::usage(format!("unknown parameter '{k}' for {name}")));
    }
    let mut reader = ParamReader::new(params, exp.defaults);
    let mut findings = Findings::default();
    (exp.body)(&mut reader, seed, &mut findings)?;
    reader.finish()?;
    Ok(Report {
        name: exp.name.to_string(),
        params: reader.resolved().clone(),
        verdict: findings.verdict(),
        observations: findings.observations,
        ambiguity_count: findings.ambiguity_count,
        seed,
        runtime_ms: None,
        artifact_version: ARTIFACT_VERSION.to_string(),
        report_version: REPORT_VERSION,
    })
}

/// Every registered experiment with default parameters, in registry order.
pub fn run_all(seed: u64) -> Result<Vec<Report>> {
    REGISTRY
        .iter()
        .map(|e| run_experiment(e.name, BTreeMap::new(), seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn rationals() {
        let r = |s| parse_rational(s).unwrap();
        assert_eq!(r("3/10"), r("0.3"));
        assert_eq!(r("0.01"), r("1/100"));
        assert_eq!(r("-0.5"), r("-1/2"));
        assert_eq!(r("2"), r("4/2"));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.x").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(rational_text(&r("0.3")), "3/10");
    }

    #[test]
    fn unknown_experiment_and_parameter() {
        assert!(matches!(run_experiment("nope", BTreeMap::new(), 0), Err(Error::Usage(_))));
        let e = run_experiment("families-oracle", params(&[("bogus", "1")]), 0).unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let e = run_experiment("families-oracle", params(&[("universe", "x")]), 0).unwrap_err();
        assert!(matches!(e, Error::Usage(_)));
    }

    #[test]
    fn small_families_run() {
        let r = run_experiment("families-oracle", params(&[("universe", "8")]), 0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.params["universe"], "8");
        assert_eq!(r.params["max_length"], "3");
        assert_eq!(r.report_version, 1);
        assert!(r.runtime_ms.is_none());
    }

    #[test]
    fn csv_matches_json_values() {
        let r = run_experiment("families-oracle", params(&[("universe", "6")]), 0).unwrap();
        let csv = r.to_csv();
        for o in &r.observations {
            assert!(csv.contains(&format!("{},{}", o.label, csv_field(&o.value))));
        }
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["observations"].as_array().unwrap().len(), r.observations.len());
        assert_eq!(json["verdict"], "pass");
        assert!(json["runtime_ms"].is_null());
    }

    #[test]
    fn registry_defaults_cover_read_keys() {
        for e in registry() {
            let keys: Vec<_> = e.defaults.iter().map(|(k, _)| *k).collect();
            let mut sorted = keys.clone();
            sorted.sort_unstable();
            assert_eq!(keys, sorted, "{}", e.name);
        }
    }
}
