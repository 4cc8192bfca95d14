mod literals;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use literals::{parse_neighborhood, parse_system, Literal};
use sensilab_core::analysis::{divergence_profile, rp_witness_search, sensitivity_set, SignedWindow};
use sensilab_core::families::{longest_block, FamilyWitness};
use sensilab_core::{
    classify_window, experiments, Budget, DeltaConvention, Dyadic, Error, FamilyCaps, ParseError, Precision, Report,
    SearchStatus, Verdict, WindowSet,
};

const SYSTEMS_HELP: &str = "\
System literals:
  rotation:<alpha>     x -> x + alpha on the circle
  skew:<d>:<alpha>     (t1, ..., td) -> (t1 + alpha, t2 + t1, ..., td + t(d-1))
  morse                two-sided shift on the Morse sequence
Circle values: decimals (0.25), dyadics (3/2^4), hex raw values (0x4000...), sqrt2-1, golden.
Points: a circle value, slash-separated circle values for skew (0.1/0.2), or a
symbolic rule for morse: omega | eta | flip(P) | shift(k, P) | periodic(01...).
Neighborhoods: ball:<point>:<radius> or cyl:<r>:<2r+1 symbols>.
Exit codes: 0 pass, 1 fail, 2 usage or parse error, 3 inconclusive.";

#[derive(Parser)]
#[command(name = "sensilab", version, about = "Exact window-scale experiments on sensitivity of minimal systems", after_help = SYSTEMS_HELP)]
struct Cli {
    /// Fixed-point bits per circle coordinate.
    #[arg(long, global = true, default_value = "64", value_parser = ["32", "64", "128"])]
    precision: String,
    /// Window length N.
    #[arg(short = 'n', long, global = true, default_value_t = 1000)]
    window: u64,
    /// Divergence threshold; decimals round to the nearest dyadic at the working precision.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Sample points per dimension inside a ball.
    #[arg(long, global = true, default_value_t = 8)]
    grid: usize,
    /// Symbols compared on each side of the origin by the Morse metric.
    #[arg(long, global = true, default_value_t = 64)]
    scan_radius: u32,
    /// Longest finite IP length searched.
    #[arg(long, global = true, default_value_t = FamilyCaps::default().ip_length)]
    ip_cap: usize,
    /// Longest finite difference length searched.
    #[arg(long, global = true, default_value_t = FamilyCaps::default().diff_length)]
    diff_cap: usize,
    /// Seed of the single random generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output to this file atomically instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output encoding; orbits default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Report wall-clock time on stderr and in experiment reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Strict,
    WithZero,
}

#[derive(Subcommand)]
enum Command {
    /// Family profile of a finite set written as `elems@N`.
    AnalyzeSet {
        set: String,
        /// Whether difference sets include the zero difference.
        #[arg(long, value_enum, default_value = "strict")]
        convention: Convention,
    },
    /// Orbit coordinates over [0, N).
    Orbit { system: String, point: String },
    /// Divergence profile of a pair over [-back, N).
    Diverge {
        system: String,
        x: String,
        y: String,
        /// Backward extent of the window.
        #[arg(long, default_value_t = 0)]
        back: u64,
    },
    /// Times in [0, N) at which sample points of a neighborhood separate by more than delta.
    Sense { system: String, neighborhood: String },
    /// Search for a regionally proximal witness of order d.
    RpSearch {
        system: String,
        x: String,
        y: String,
        /// Number of times d.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Each time ranges over [-B, B] without 0.
        #[arg(long, default_value_t = 16)]
        bound: u32,
    },
    /// Run a registered experiment, or all of them.
    Verify {
        experiment: String,
        /// Parameter override as key=value; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
    },
    /// Registered experiments and their default parameters.
    List,
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    match text.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected key=value, got '{text}'")),
    }
}

struct Output {
    body: String,
    status: Status,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Parse(_) | Error::Unsupported(_) => 2,
        Error::ResourceLimit { .. } => 3,
        Error::Internal(_) => 1,
    }
}

/// A threshold with its rounding recorded.
struct Threshold {
    input: String,
    value: Dyadic,
    exact: bool,
}

impl Threshold {
    fn json(&self) -> Value {
        json!({ "input": self.input, "value": self.value.to_string(), "exact": self.exact })
    }
}

impl Cli {
    fn prec(&self) -> Precision {
        Precision::from_bits(self.precision.parse().expect("validated by clap")).expect("validated by clap")
    }

    fn delta(&self) -> Result<Threshold, Error> {
        let text = self
            .delta
            .as_deref()
            .ok_or_else(|| Error::usage("this command needs --delta"))?;
        let (value, exact) = Dyadic::parse_with_precision(text, self.prec().bits())?;
        if value.is_zero() {
            return Err(ParseError::new(text, 0, "delta must be positive after rounding").into());
        }
        if !exact {
            eprintln!("note: delta {text} rounded to {value}");
        }
        Ok(Threshold { input: text.to_string(), value, exact })
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn budget(&self) -> Budget {
        Budget::default()
    }
}

/// Top-level keys of a JSON object as `label,value` rows.
fn object_csv(v: &Value) -> String {
    let mut out = String::from("label,value\n");
    if let Value::Object(map) = v {
        for (k, val) in map {
            let text = match val {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&csv_field(k));
            out.push(',');
            out.push_str(&csv_field(&text));
            out.push('\n');
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn encode(cli: &Cli, v: Value) -> String {
    match cli.format(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&v).expect("values serialize") + "\n",
        Format::Csv => object_csv(&v),
    }
}

fn analyze_set(cli: &Cli, text: &str, convention: Convention) -> Result<Output, Error> {
    let set: WindowSet = text.parse()?;
    let caps = FamilyCaps {
        ip_length: cli.ip_cap,
        diff_length: cli.diff_cap,
        ..FamilyCaps::default()
    };
    let profile = classify_window(&set, &caps)?;
    let mut v = serde_json::to_value(&profile).expect("profiles serialize");
    if let Convention::WithZero = convention {
        let mut witnesses = Vec::new();
        for len in 1..=caps.diff_length {
            match sensilab_core::families::find_finite_difference_with(&set, len, &caps, DeltaConvention::WithZero)? {
                Some(base) => witnesses.push(base),
                None => break,
            }
        }
        v["max_diff_length"] = json!(witnesses.len());
        v["diff_witnesses"] = json!(witnesses);
        v["diff_convention"] = json!("with-zero");
    } else {
        v["diff_convention"] = json!("strict");
    }
    Ok(Output { body: encode(cli, v), status: Status::Pass })
}

fn orbit<S: Literal>(cli: &Cli, sys: &S, point: &str) -> Result<Output, Error> {
    let mut p = sys.parse_point(point)?;
    Error::check_limit("orbit window", cli.window, cli.budget().orbit_steps)?;
    let columns = sys.columns();
    let mut rows = Vec::with_capacity(cli.window as usize);
    for _ in 0..cli.window {
        rows.push(sys.row(&p)?);
        sys.step(&mut p)?;
    }
    let body = match cli.format(Format::Csv) {
        Format::Csv => {
            let mut out = format!("n,{}\n", columns.join(","));
            for (n, r) in rows.iter().enumerate() {
                out.push_str(&format!("{n},{}\n", r.join(",")));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .enumerate()
                .map(|(n, r)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("n".into(), json!(n));
                    for (c, v) in columns.iter().zip(r) {
                        obj.insert(c.clone(), json!(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "system": sys.label(), "rows": rows })).expect("values serialize")
                + "\n"
        }
    };
    Ok(Output { body, status: Status::Pass })
}

fn diverge<S: Literal>(cli: &Cli, sys: &S, x: &str, y: &str, back: u64) -> Result<Output, Error> {
    let delta = cli.delta()?;
    let (x, y) = (sys.parse_point(x)?, sys.parse_point(y)?);
    let window = SignedWindow { back, fwd: cli.window };
    let profile = divergence_profile(sys, &x, &y, delta.value, window, &cli.budget())?;
    let mut v = serde_json::to_value(&profile).expect("profiles serialize");
    v["system"] = json!(sys.label());
    v["x"] = json!(x.to_string());
    v["y"] = json!(y.to_string());
    v["delta"] = delta.json();
    v["index_offset"] = json!(window.start());
    Ok(Output { body: encode(cli, v), status: Status::Pass })
}

fn sense<S: Literal>(cli: &Cli, sys: &S, u: &str) -> Result<Output, Error> {
    let delta = cli.delta()?;
    let u = parse_neighborhood(sys, u, cli.prec().bits())?;
    let budget = cli.budget();
    let set = sensitivity_set(sys, &u, delta.value, cli.window, cli.grid, &budget)?;
    let samples = sys.samples(&u, cli.grid, &budget)?.len();
    let block = longest_block(&set).map(|(start, length)| FamilyWitness::Block { start, length });
    let v = json!({
        "system": sys.label(),
        "neighborhood": serde_json::to_value(&u).expect("neighborhoods serialize"),
        "delta": delta.json(),
        "grid": cli.grid,
        "samples": samples,
        "set": set.to_string(),
        "cardinality": set.len(),
        "block_witness": block,
    });
    Ok(Output { body: encode(cli, v), status: Status::Pass })
}

fn rp_search<S: Literal>(cli: &Cli, sys: &S, x: &str, y: &str, order: usize, bound: u32) -> Result<Output, Error> {
    let delta = cli.delta()?;
    let (x, y) = (sys.parse_point(x)?, sys.parse_point(y)?);
    let outcome = rp_witness_search(sys, &x, &y, order, delta.value, bound, cli.grid, &cli.budget())?;
    let mut v = serde_json::to_value(&outcome).expect("outcomes serialize");
    v["system"] = json!(sys.label());
    v["delta"] = delta.json();
    v["order"] = json!(order);
    v["bound"] = json!(bound);
    let status = match outcome.status {
        SearchStatus::Found => Status::Pass,
        _ => Status::Inconclusive,
    };
    Ok(Output { body: encode(cli, v), status })
}

fn run_report(cli: &Cli, name: &str, params: BTreeMap<String, String>) -> Result<Report, Error> {
    let start = Instant::now();
    let mut report = experiments::run_experiment(name, params, cli.seed)?;
    if cli.timing {
        let ms = start.elapsed().as_millis() as u64;
        eprintln!("{name}: {ms} ms");
        report.runtime_ms = Some(ms);
    }
    Ok(report)
}

fn verify(cli: &Cli, name: &str, params: &[(String, String)]) -> Result<Output, Error> {
    let mut map = BTreeMap::new();
    for (k, v) in params {
        if map.insert(k.clone(), v.clone()).is_some() {
            return Err(Error::usage(format!("parameter {k} given twice")));
        }
    }
    if name == "all" {
        if !map.is_empty() {
            return Err(Error::usage("--param applies to a single experiment"));
        }
        let reports = experiments::registry()
            .iter()
            .map(|e| run_report(cli, e.name, BTreeMap::new()))
            .collect::<Result<Vec<_>, _>>()?;
        let status = reports.iter().map(|r| Status::from(r.verdict)).max().unwrap_or(Status::Pass);
        let body = match cli.format(Format::Json) {
            Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
            Format::Csv => reports.iter().map(Report::to_csv).collect::<Vec<_>>().join("\n"),
        };
        return Ok(Output { body, status });
    }
    let report = run_report(cli, name, map)?;
    let body = match cli.format(Format::Json) {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    Ok(Output { body, status: report.verdict.into() })
}

fn list(cli: &Cli) -> Output {
    let entries: Vec<Value> = experiments::registry()
        .iter()
        .map(|e| {
            let defaults: BTreeMap<_, _> = e.defaults.iter().copied().collect();
            json!({ "name": e.name, "summary": e.summary, "defaults": defaults })
        })
        .collect();
    let body = match cli.format(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&entries).expect("values serialize") + "\n",
        Format::Csv => {
            let mut out = String::from("name,summary\n");
            for e in experiments::registry() {
                out.push_str(&format!("{},{}\n", e.name, csv_field(e.summary)));
            }
            out
        }
    };
    Output { body, status: Status::Pass }
}

fn dispatch(cli: &Cli) -> Result<Output, Error> {
    let prec = cli.prec();
    match &cli.command {
        Command::AnalyzeSet { set, convention } => analyze_set(cli, set, *convention),
        Command::Orbit { system, point } => {
            with_system!(parse_system(system, prec, cli.scan_radius)?, s => orbit(cli, &s, point))
        }
        Command::Diverge { system, x, y, back } => {
            with_system!(parse_system(system, prec, cli.scan_radius)?, s => diverge(cli, &s, x, y, *back))
        }
        Command::Sense { system, neighborhood } => {
            with_system!(parse_system(system, prec, cli.scan_radius)?, s => sense(cli, &s, neighborhood))
        }
        Command::RpSearch { system, x, y, order, bound } => {
            with_system!(parse_system(system, prec, cli.scan_radius)?, s => rp_search(cli, &s, x, y, *order, *bound))
        }
        Command::Verify { experiment, params } => verify(cli, experiment, params),
        Command::List => Ok(list(cli)),
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.body) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if cli.timing {
                eprintln!("total: {} ms", start.elapsed().as_millis());
            }
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
