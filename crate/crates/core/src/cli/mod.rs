//! Command line front end: parsing, dispatch and reports.

pub(crate) mod json;
mod parse;

pub use json::{
    certificate_from_json, certificate_to_json, field_to_json, matrix_from_json, matrix_from_text, matrix_to_json,
    tower_from_json, tower_to_json, SCHEMA,
};
pub use parse::{parse_rational, parse_ratfunc, ParseError};

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::arith::{RatFunc, Rational};
use crate::diff_field::{self, DerivationSpec, DiffFieldError, Membership};
use crate::linalg::Matrix;
use crate::splitting::{self, OrderStatus, SplittingCertificate, SplittingError, TrdegValue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_PRECONDITION: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error(transparent)]
    DiffField(#[from] DiffFieldError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } | CliError::Usage(_) => EXIT_PARSE,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::Precondition(_) | CliError::DiffField(_) => EXIT_PRECONDITION,
            CliError::Splitting(e) => match e {
                SplittingError::NonSquare { .. } | SplittingError::ShapeMismatch(..) => EXIT_PARSE,
                SplittingError::NotAllRational => EXIT_UNSUPPORTED,
                SplittingError::VerificationFailed => EXIT_VERIFY,
                _ => EXIT_PRECONDITION,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "diffsplit", version, about = "Splittings of differential matrix algebras over Q(t)")]
pub struct Cli {
    /// Coefficient c in δ(t) = c t^m.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub c: String,
    /// Exponent m in δ(t) = c t^m.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// Matrix arguments are inline JSON (starting with `{`) or a path to a JSON file.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decision, degree bound, order and transcendence degree of a constant matrix.
    Analyze { matrix: String },
    /// Builds and prints a splitting certificate.
    Split { matrix: String },
    /// Re-verifies a certificate document (exit 3 when it fails).
    Verify { certificate: String },
    /// Order in the tensor sense.
    Order { matrix: String },
    /// Kronecker sum of the given matrices, or a tensor power of one.
    Tensor {
        #[arg(required = true)]
        matrices: Vec<String>,
        #[arg(long)]
        power: Option<usize>,
    },
    /// Minimal transcendence degree of a splitting field.
    Trdeg { matrix: String },
    /// Decides membership in the span of logarithmic derivatives.
    Membership { expr: String },
    /// Decomposes the group generated by the given elements.
    Decompose {
        #[arg(required = true)]
        exprs: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Split { .. } => "split",
            Command::Verify { .. } => "verify",
            Command::Order { .. } => "order",
            Command::Tensor { .. } => "tensor",
            Command::Trdeg { .. } => "trdeg",
            Command::Membership { .. } => "membership",
            Command::Decompose { .. } => "decompose",
        }
    }
}

/// Result of one invocation: what to print and how to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A report body plus the text rendering and the exit code it implies.
struct Report {
    body: Map<String, Value>,
    text: String,
    code: i32,
}

impl Report {
    fn ok(body: Map<String, Value>, text: String) -> Self {
        Report { body, text, code: EXIT_OK }
    }
}

fn load_text(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') || arg.trim_start().starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Io { path: arg.into(), message: e.to_string() })
}

fn load_matrix(arg: &str) -> Result<Matrix<RatFunc>, CliError> {
    Ok(matrix_from_text(&load_text(arg)?)?)
}

fn require_constant(p: &Matrix<RatFunc>) -> Result<Matrix<Rational>, CliError> {
    splitting::require_traceless(p)?;
    splitting::constant_part(p).ok_or_else(|| CliError::Precondition("this command needs a matrix over Q".into()))
}

fn require_standard(spec: &DerivationSpec) -> Result<(), CliError> {
    if spec.is_standard() {
        Ok(())
    } else {
        Err(CliError::Precondition(format!("this command assumes δ(t) = t, got {spec}")))
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("report bodies are objects"),
    }
}

fn order_json(o: &splitting::OrderResult) -> (Value, String) {
    match &o.status {
        OrderStatus::Finite(m) => (
            json!({
                "status": "Finite",
                "m": m.to_string(),
                "fractional_part": o.common_fractional_part.as_ref().map(ToString::to_string),
            }),
            format!("Finite({m})"),
        ),
        OrderStatus::Infinite => (json!({ "status": "Infinite" }), "Infinite".into()),
    }
}

fn trdeg_json(r: &splitting::TrdegResult) -> (Value, String, bool) {
    let k = r.k.map(|k| k.to_string());
    match r.value {
        TrdegValue::Exact(d) => (json!({ "status": "Exact", "value": d.to_string(), "k": k }), d.to_string(), true),
        TrdegValue::Unsupported { lower_bound } => (
            json!({ "status": "Unsupported", "lower_bound": lower_bound.to_string(), "k": k }),
            format!(">= {lower_bound} (eigenvalue field of degree >= 3)"),
            false,
        ),
    }
}

fn analyze(spec: &DerivationSpec, arg: &str) -> Result<Report, CliError> {
    let p = load_matrix(arg)?;
    let q = require_constant(&p)?;
    let tr = splitting::min_trdeg(&q, spec)?;
    let (trj, trt, supported) = trdeg_json(&tr);
    let mut body = Map::new();
    body.insert("n".into(), json!(q.rows().to_string()));
    body.insert("derivation".into(), json::spec_to_json(spec));
    let mut text = format!("n: {}\nderivation: {spec}\n", q.rows());
    if spec.is_standard() {
        let d = splitting::decide_finite_splitting(&q)?;
        let o = splitting::order(&q)?;
        let split = splitting::is_split_over_k(&q)?;
        let (oj, ot) = order_json(&o);
        body.insert(
            "decision".into(),
            json!({
                "finite_splitting": d.finite_splitting_exists,
                "reason": d.reason.to_string(),
                "degree_lower_bound": d.degree_lower_bound.as_ref().map(ToString::to_string),
            }),
        );
        body.insert("split_over_k".into(), json!(split));
        body.insert("order".into(), oj);
        let _ = writeln!(text, "finite splitting: {}", if d.finite_splitting_exists { "yes" } else { "no" });
        let _ = writeln!(text, "reason: {}", d.reason);
        if let Some(q) = &d.degree_lower_bound {
            let _ = writeln!(text, "degree lower bound q: {q}");
        }
        let _ = writeln!(text, "split over K: {split}");
        let _ = writeln!(text, "order: {ot}");
    }
    body.insert("trdeg".into(), trj);
    let _ = writeln!(text, "trdeg: {trt}");
    let code = if supported { EXIT_OK } else { EXIT_UNSUPPORTED };
    Ok(Report { body, text, code })
}

/// Picks a construction by matrix class.
pub fn build_certificate(spec: &DerivationSpec, p: &Matrix<RatFunc>) -> Result<SplittingCertificate, CliError> {
    if let Some(q) = splitting::constant_part(p) {
        if spec.is_standard() {
            let d = splitting::decide_finite_splitting(&q)?;
            if d.reason == splitting::SplittingReason::UnsupportedEigenvalueField
                || d.reason == splitting::SplittingReason::IrrationalEigenvalue
            {
                return Err(CliError::Unsupported(format!("no certificate for eigenvalues of this kind ({})", d.reason)));
            }
            return match splitting::construct_certificate_general_rational(&q) {
                Err(SplittingError::NotAllRational) => {
                    Err(CliError::Unsupported("not all eigenvalues are rational".into()))
                }
                other => Ok(other?),
            };
        }
    }
    if p.is_diagonal() {
        return Ok(splitting::construct_certificate_diagonal(spec, p)?);
    }
    if spec.is_standard() && p.is_upper_triangular() {
        return Ok(splitting::construct_certificate_triangular(p)?);
    }
    Err(CliError::Unsupported("no construction for this matrix class".into()))
}

fn render_certificate(cert: &SplittingCertificate) -> String {
    let mut text = format!("construction: {}\nderivation: {}\n", cert.construction, cert.spec);
    let f = &cert.field;
    let radicals: Vec<String> = f.radical_gens.iter().map(|(v, n)| format!("({v})^(1/{n})")).collect();
    let exps: Vec<String> = f.exp_gens.iter().map(|a| format!("X{{{a}}}")).collect();
    let _ = writeln!(text, "field: radicals [{}], exponentials [{}], w: {}", radicals.join(", "), exps.join(", "), f.has_w);
    let _ = writeln!(text, "trdeg: {}\ndegree bound: {}", f.trdeg, f.degree_bound);
    let _ = writeln!(text, "Z:");
    for row in cert.z.to_rows() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(text, "  [{}]", cells.join(", "));
    }
    text
}

fn split(spec: &DerivationSpec, arg: &str) -> Result<Report, CliError> {
    let p = load_matrix(arg)?;
    let cert = build_certificate(spec, &p)?;
    let verified = cert.verify()?;
    let mut body = Map::new();
    body.insert("verified".into(), json!(verified));
    body.insert("certificate".into(), certificate_to_json(&cert));
    let text = format!("{}verified: {verified}\n", render_certificate(&cert));
    Ok(Report { body, text, code: if verified { EXIT_OK } else { EXIT_VERIFY } })
}

fn verify(arg: &str) -> Result<Report, CliError> {
    let v: Value = serde_json::from_str(&load_text(arg)?).map_err(|e| ParseError::Document(e.to_string()))?;
    // accept a bare certificate or a `split` report that embeds one
    let doc = v.get("certificate").unwrap_or(&v);
    let cert = certificate_from_json(doc)?;
    let verified = cert.verify()?;
    let mut body = Map::new();
    body.insert("verified".into(), json!(verified));
    body.insert("construction".into(), json!(cert.construction.to_string()));
    Ok(Report { body, text: format!("verified: {verified}\n"), code: if verified { EXIT_OK } else { EXIT_VERIFY } })
}

fn order_cmd(spec: &DerivationSpec, arg: &str) -> Result<Report, CliError> {
    require_standard(spec)?;
    let q = require_constant(&load_matrix(arg)?)?;
    let o = splitting::order(&q)?;
    let (oj, ot) = order_json(&o);
    Ok(Report::ok(obj(json!({ "order": oj })), format!("order: {ot}\n")))
}

fn tensor(spec: &DerivationSpec, args: &[String], power: Option<usize>) -> Result<Report, CliError> {
    let list = args.iter().map(|a| load_matrix(a)).collect::<Result<Vec<_>, _>>()?;
    let result = match power {
        Some(k) => {
            if list.len() != 1 {
                return Err(CliError::Usage("--power takes exactly one matrix".into()));
            }
            splitting::tensor_power(&list[0], k)?
        }
        None => splitting::tensor_algebra(&list)?,
    };
    let mut body = obj(json!({ "matrix": matrix_to_json(&result) }));
    let mut text = format!("matrix: {result}\n");
    if let (Some(q), true) = (splitting::constant_part(&result), spec.is_standard()) {
        let split = splitting::is_split_over_k(&q)?;
        let d = splitting::decide_finite_splitting(&q)?;
        body.insert("split_over_k".into(), json!(split));
        body.insert("finite_splitting".into(), json!(d.finite_splitting_exists));
        let _ = writeln!(text, "split over K: {split}\nfinite splitting: {}", d.finite_splitting_exists);
    }
    Ok(Report::ok(body, text))
}

fn trdeg(spec: &DerivationSpec, arg: &str) -> Result<Report, CliError> {
    let q = require_constant(&load_matrix(arg)?)?;
    let r = splitting::min_trdeg(&q, spec)?;
    let (j, t, supported) = trdeg_json(&r);
    Ok(Report {
        body: obj(json!({ "derivation": json::spec_to_json(spec), "trdeg": j })),
        text: format!("trdeg: {t}\n"),
        code: if supported { EXIT_OK } else { EXIT_UNSUPPORTED },
    })
}

fn membership(spec: &DerivationSpec, expr: &str) -> Result<Report, CliError> {
    let a = parse_ratfunc(expr)?;
    let m = diff_field::membership_a(spec, &a)?;
    let mut body = obj(json!({ "input": a.to_string(), "in_a": m.is_member() }));
    let mut text = format!("input: {a}\nin A: {}\n", m.is_member());
    if let Membership::InA(w) = &m {
        let terms: Vec<Value> =
            w.terms.iter().map(|(p, r)| json!({ "poly": p.to_string(), "coeff": r.to_string() })).collect();
        body.insert(
            "witness".into(),
            json!({
                "r0": w.r0.to_string(),
                "terms": terms,
                "n_a": w.n_a.to_string(),
                "v": w.v.to_string(),
                "sound": w.verify(spec, &a),
            }),
        );
        let _ = writeln!(text, "n_a: {}\nv: {}\nsolution: {}", w.n_a, w.v, w.solution());
    }
    Ok(Report::ok(body, text))
}

fn decompose(spec: &DerivationSpec, exprs: &[String]) -> Result<Report, CliError> {
    let s = exprs.iter().map(|e| parse_ratfunc(e)).collect::<Result<Vec<_>, _>>()?;
    let dec = diff_field::group_decompose(spec, &s)?;
    let (field, _) = diff_field::build_splitting_field(spec, &s)?;
    let strs = |v: &[RatFunc]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let body = obj(json!({
        "basis_s": strs(&dec.basis_s),
        "basis_as": strs(&dec.basis_as),
        "basis_as_prime": strs(&dec.basis_as_prime),
        "rank_as_prime": dec.rank_as_prime.to_string(),
        "field": field_to_json(&field),
    }));
    let text = format!(
        "basis of <S>: [{}]\nbasis of A_S: [{}]\ncomplement: [{}]\nrank of complement: {}\ndegree bound: {}\n",
        strs(&dec.basis_s).join(", "),
        strs(&dec.basis_as).join(", "),
        strs(&dec.basis_as_prime).join(", "),
        dec.rank_as_prime,
        field.degree_bound,
    );
    Ok(Report::ok(body, text))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let c = parse_rational(&cli.c)?;
    let spec = DerivationSpec::new(c, cli.m)?;
    match &cli.command {
        Command::Analyze { matrix } => analyze(&spec, matrix),
        Command::Split { matrix } => split(&spec, matrix),
        Command::Verify { certificate } => verify(certificate),
        Command::Order { matrix } => order_cmd(&spec, matrix),
        Command::Tensor { matrices, power } => tensor(&spec, matrices, *power),
        Command::Trdeg { matrix } => trdeg(&spec, matrix),
        Command::Membership { expr } => membership(&spec, expr),
        Command::Decompose { exprs } => decompose(&spec, exprs),
    }
}

/// Runs a parsed invocation.
pub fn run(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    match dispatch(cli) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&json::report(name, r.body)).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Text => r.text,
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = e.exit_code();
            let stdout = match cli.format {
                Format::Json => {
                    let body = obj(json!({ "error": e.to_string(), "exit_code": code }));
                    format!("{}\n", serde_json::to_string_pretty(&json::report(name, body)).expect("serializable"))
                }
                Format::Text => String::new(),
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

/// Parses arguments (program name first) and runs.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            }
        }
    }
}
