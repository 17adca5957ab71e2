//! Command implementations behind the `densitylab` binary: each `run_*` returns a
//! typed result wrapped in a schema-versioned [`Report`].

pub mod verify;

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use densitylab::axioms::{self, Predicate, RelationVerdict, Status};
use densitylab::gadgets::{self, GadgetError, GadgetReport, Lemma2Case};
use densitylab::num::{factorial_u64, format_rational, parse_rational};
use densitylab::setalg::{DensityResult, IndexSet, ParseError};
use densitylab::streams::{Stream, StreamError};
use densitylab::swf::{self, InducedOrder, Swf, SwfError, SwfValue};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_HORIZON: u64 = 5040;
/// `10!`.
pub const DEFAULT_CHECKPOINT_MAX: u64 = 3_628_800;

#[derive(Clone, Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid stream: {0}")]
    Stream(String),
    #[error("invalid rational {0:?}")]
    Rational(String),
    #[error("invalid list {0:?}")]
    List(String),
    #[error("unknown axiom {0:?}")]
    Axiom(String),
    #[error(transparent)]
    Swf(#[from] SwfError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("horizon {horizon} exceeds checkpoint-max {max}")]
    Horizon { horizon: u64, max: u64 },
    #[error("{0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Machine-readable code, one per error path.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse_error",
            CliError::Stream(_) => "invalid_stream",
            CliError::Rational(_) => "invalid_rational",
            CliError::List(_) => "invalid_list",
            CliError::Axiom(_) => "unknown_axiom",
            CliError::Swf(SwfError::Discount(_)) => "invalid_discount",
            CliError::Swf(SwfError::Tolerance(_)) => "invalid_tolerance",
            CliError::Swf(SwfError::Unbounded) => "unbounded_stream",
            CliError::Swf(SwfError::Undecided(_)) => "swf_undecided",
            CliError::Swf(SwfError::UnknownKind(_)) => "unknown_swf",
            CliError::Gadget(GadgetError::Threshold(_)) => "invalid_threshold",
            CliError::Gadget(GadgetError::Order { .. }) => "threshold_order",
            CliError::Gadget(GadgetError::NotNested) => "not_nested",
            CliError::Gadget(GadgetError::TooFewPoints) => "too_few_points",
            CliError::Gadget(GadgetError::Sequence(_)) => "invalid_sequence",
            CliError::Gadget(GadgetError::Condition { .. }) => "condition_fails",
            CliError::Gadget(GadgetError::NoAdmissibleM(_)) => "no_admissible_m",
            CliError::Gadget(GadgetError::SmallM { .. }) => "m_too_small",
            CliError::Gadget(GadgetError::TooLarge(_)) => "term_too_large",
            CliError::Gadget(GadgetError::UnknownCase(_)) => "unknown_case",
            CliError::Horizon { .. } => "horizon_exceeds_checkpoint_max",
            CliError::Config(_) => "invalid_config",
            CliError::Io(_) => "io_error",
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse {
            position: e.position,
            message: e.message,
        }
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::Parse(p) => p.into(),
            other => CliError::Stream(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(CliError::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub horizon: u64,
    pub checkpoint_max: u64,
    pub output: OutputFormat,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: DEFAULT_HORIZON,
            checkpoint_max: DEFAULT_CHECKPOINT_MAX,
            output: OutputFormat::Json,
            seed: 0,
            parallelism: 4,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.horizon > self.checkpoint_max {
            return Err(CliError::Horizon {
                horizon: self.horizon,
                max: self.checkpoint_max,
            });
        }
        if self.parallelism == 0 {
            return Err(CliError::Config("parallelism must be positive".into()));
        }
        Ok(())
    }

    /// Largest `k` with `k! ≤ checkpoint_max`.
    pub fn checkpoint_k(&self) -> u64 {
        let mut k = 1;
        while factorial_u64(k + 1) <= BigUint::from(self.checkpoint_max) {
            k += 1;
        }
        k
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: RunConfig,
    pub results: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: Vec<String>, config: &RunConfig, results: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            version: VERSION,
            command,
            config: config.clone(),
            results,
            timing_ms: None,
        }
    }

    pub fn render(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        match self.config.output {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            OutputFormat::Csv => {
                let mut out = String::from("key,value\n");
                for (k, v) in flatten(&value["results"]) {
                    let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&v));
                }
                out
            }
            OutputFormat::Text => {
                let mut out = String::new();
                for (k, v) in flatten(&value["results"]) {
                    let _ = writeln!(out, "{k} = {v}");
                }
                out
            }
        }
    }
}

/// Leaf values keyed by their dotted path.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    walk(
                        x,
                        if path.is_empty() {
                            k.clone()
                        } else {
                            format!("{path}.{k}")
                        },
                        out,
                    );
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, format!("{path}[{i}]"), out);
                }
            }
            Value::String(s) => out.push((path, s.clone())),
            Value::Null => out.push((path, String::new())),
            other => out.push((path, other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn parse_set(text: &str) -> Result<IndexSet, CliError> {
    Ok(IndexSet::parse(text)?)
}

pub fn parse_stream(text: &str, horizon: u64) -> Result<Stream, CliError> {
    Ok(Stream::parse_with_horizon(text, horizon)?)
}

pub fn parse_q(text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Rational(text.to_string()))
}

/// Comma-separated naturals; empty text gives an empty list.
pub fn parse_list(text: &str) -> Result<Vec<u64>, CliError> {
    if text.trim().is_empty() || text.trim() == "nat" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| CliError::List(text.to_string()))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityOutput {
    pub set: String,
    pub lower: String,
    pub upper: String,
    pub exact: bool,
    pub density: DensityResult,
}

pub fn run_density(text: &str, config: &RunConfig) -> Result<DensityOutput, CliError> {
    config.validate()?;
    let set = parse_set(text)?;
    let density = set.density_with_checkpoints(config.checkpoint_k());
    let show = |b: &densitylab::setalg::DensityBound| match b.exact() {
        Some(q) => format_rational(q),
        None => format!("[{}, {}]", format_rational(b.lo()), format_rational(b.hi())),
    };
    Ok(DensityOutput {
        set: set.to_string(),
        lower: show(&density.lower),
        upper: show(&density.upper),
        exact: density.exact,
        density,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CompareOutput {
    Verdict(RelationVerdict),
    Chain(axioms::ChainReport),
    Anonymity {
        axiom: &'static str,
        status: Status,
        horizon: u64,
    },
}

impl CompareOutput {
    pub fn status(&self) -> Option<Status> {
        match self {
            CompareOutput::Verdict(v) => Some(v.status),
            CompareOutput::Anonymity { status, .. } => Some(*status),
            CompareOutput::Chain(_) => None,
        }
    }
}

/// Axioms accepted by `compare`: the dominance predicates, `weak_dominance`
/// (`x ≥ y`), `suppes_sen`, `lex`, `anonymity` and `chain`.
pub fn run_compare(
    axiom: &str,
    x: &str,
    y: &str,
    config: &RunConfig,
) -> Result<CompareOutput, CliError> {
    config.validate()?;
    let h = config.horizon;
    let (x, y) = (parse_stream(x, h)?, parse_stream(y, h)?);
    let name = axiom.replace('-', "_");
    Ok(match name.as_str() {
        "weak_dominance" | "geq" => CompareOutput::Verdict(axioms::weakly_dominates(&x, &y, h)),
        "suppes_sen" => CompareOutput::Verdict(axioms::suppes_sen_compare(&x, &y, h)),
        "lex" | "lexicographic" => CompareOutput::Verdict(axioms::lex_compare(&x, &y, h)),
        "chain" => CompareOutput::Chain(axioms::implication_chain_report(&x, &y, h)),
        "anonymity" => {
            let status = match axioms::anonymity_equivalent(&x, &y, h) {
                Some(true) => Status::Holds,
                Some(false) => Status::Fails,
                None => Status::Undecided,
            };
            CompareOutput::Anonymity {
                axiom: "anonymity",
                status,
                horizon: h,
            }
        }
        other => {
            let p = Predicate::from_str(other).map_err(|_| CliError::Axiom(axiom.to_string()))?;
            CompareOutput::Verdict(axioms::dominates(p, &x, &y, h))
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SwfOutput {
    pub swf: &'static str,
    pub x: SwfValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<SwfValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<InducedOrder>,
}

pub fn run_swf(
    which: &str,
    x: &str,
    y: Option<&str>,
    delta: Option<&str>,
    tol: Option<&str>,
    config: &RunConfig,
) -> Result<SwfOutput, CliError> {
    config.validate()?;
    let delta = parse_q(delta.unwrap_or("1/2"))?;
    let tol = parse_q(tol.unwrap_or("1/1000000"))?;
    let w = Swf::from_name(which, delta, tol)?;
    let evaluate = |text: &str| -> Result<(Stream, SwfValue), CliError> {
        let s = parse_stream(text, config.horizon)?;
        let v = match w {
            Swf::Cesaro => swf::cesaro_with_evidence(&s, config.checkpoint_k()),
            _ => w.evaluate(&s)?,
        };
        Ok((s, v))
    };
    let (xs, xv) = evaluate(x)?;
    let (yv, order) = match y {
        Some(text) => {
            let (ys, yv) = evaluate(text)?;
            (Some(yv), Some(swf::induced_compare(&w, &xs, &ys)?))
        }
        None => (None, None),
    };
    Ok(SwfOutput {
        swf: w.name(),
        x: xv,
        y: yv,
        order,
    })
}

/// Which gadget `gadget` runs, with its parameters.
#[derive(Clone, Debug)]
pub enum GadgetRequest {
    /// Threshold gadget for `r`, optionally compared with `s`.
    Lemma1 {
        r: Option<String>,
        s: Option<String>,
        base_r: Option<String>,
        base_s: Option<String>,
    },
    /// Block gadget for a sequence prefix and case.
    Lemma2 {
        t: String,
        case: String,
        m: Option<u64>,
    },
    /// The exact inequality for a prefix and `m`.
    Inequality { t: String, m: u64 },
    /// Block counts of `U(N)` up to `(n_{2m+1})!`.
    Blocks { t: String, m: u64 },
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum GadgetOutput {
    Reports(Vec<GadgetReport>),
    Inequality(gadgets::InequalityCheck),
    Blocks(gadgets::BlockCertificate),
}

impl GadgetOutput {
    /// `false` when a verified link or a checked identity fails.
    pub fn passed(&self) -> bool {
        match self {
            GadgetOutput::Reports(rs) => rs.iter().all(|r| r.status != Status::Fails),
            GadgetOutput::Inequality(c) => c.holds && c.all_positive && c.factored_form_matches,
            GadgetOutput::Blocks(c) => c.counts_match && c.ratio_matches,
        }
    }
}

fn lemma1_gadget(
    threshold: Option<&str>,
    base: Option<&str>,
) -> Result<gadgets::Lemma1Gadget, CliError> {
    match (threshold, base) {
        (_, Some(list)) => {
            let v = parse_list(list)?;
            let set = IndexSet::finite(v).map_err(|_| CliError::List(list.to_string()))?;
            Ok(gadgets::lemma1_from_base(set, format!("finite{{{list}}}"))?)
        }
        (Some(r), None) => Ok(gadgets::lemma1_build(&parse_q(r)?)?),
        (None, None) => Err(CliError::Config("lemma1 needs --r or --base-r".into())),
    }
}

pub fn run_gadget(req: &GadgetRequest, config: &RunConfig) -> Result<GadgetOutput, CliError> {
    config.validate()?;
    let h = config.horizon;
    Ok(match req {
        GadgetRequest::Lemma1 {
            r,
            s,
            base_r,
            base_s,
        } => {
            let gr = lemma1_gadget(r.as_deref(), base_r.as_deref())?;
            let mut reports = vec![gadgets::lemma1_verify_p1ea(&gr, h)];
            if s.is_some() || base_s.is_some() {
                if let (Some(r), Some(s)) = (r.as_deref(), s.as_deref()) {
                    if base_r.is_none() && base_s.is_none() && parse_q(r)? >= parse_q(s)? {
                        return Err(GadgetError::Order {
                            r: r.into(),
                            s: s.into(),
                        }
                        .into());
                    }
                }
                let gs = lemma1_gadget(s.as_deref(), base_s.as_deref())?;
                reports.push(gadgets::lemma1_case_compare(&gr, &gs, h)?);
            }
            GadgetOutput::Reports(reports)
        }
        GadgetRequest::Lemma2 { t, case, m } => {
            let case: Lemma2Case = case.parse()?;
            let g = gadgets::lemma2_build(&parse_list(t)?, case, *m)?;
            GadgetOutput::Reports(vec![gadgets::lemma2_verify_case(&g, h)?])
        }
        GadgetRequest::Inequality { t, m } => {
            GadgetOutput::Inequality(gadgets::check_l2e1(&parse_list(t)?, *m)?)
        }
        GadgetRequest::Blocks { t, m } => {
            GadgetOutput::Blocks(gadgets::block_certificate(&parse_list(t)?, *m)?)
        }
    })
}

/// Writes one CSV per report: `t` followed by each named stream's prefix.
pub fn write_prefix_csv(
    output: &GadgetOutput,
    dir: &Path,
    len: u64,
) -> Result<Vec<String>, CliError> {
    let GadgetOutput::Reports(reports) = output else {
        return Ok(Vec::new());
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
    let mut written = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let columns: Vec<Vec<BigRational>> = r.streams.iter().map(|(_, s)| s.prefix(len)).collect();
        let mut out = String::from("t");
        for (name, _) in &r.streams {
            let _ = write!(out, ",{}", csv_field(name));
        }
        out.push('\n');
        for t in 0..len as usize {
            let _ = write!(out, "{}", t + 1);
            for c in &columns {
                let _ = write!(out, ",{}", format_rational(&c[t]));
            }
            out.push('\n');
        }
        let name = match &r.case {
            Some(c) => format!("{}_{}_case_{c}.csv", i + 1, r.gadget),
            None => format!("{}_{}.csv", i + 1, r.gadget),
        };
        let path = dir.join(&name);
        std::fs::write(&path, out).map_err(|e| CliError::Io(e.to_string()))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
