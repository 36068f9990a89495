//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 domain or truncation error during evaluation.

pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::classical::bernoulli_euler_identity_audit;
use crate::error::QError;
use crate::qcore::{format_bound, CertifiedValue, Mode, QContext, Scalar, TailPolicy, DEFAULT_PRECISION_BITS};
use crate::qeuler::{q_euler_higher, q_euler_number, q_euler_polynomial, DirichletCharacter};
use crate::zeta::{l_q_special_value, zeta_special_value, ZetaQuery};
use verify::{run_suite, Suite, VerificationReport, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qzeta",
    version,
    about = "q-Euler numbers, q-zeta functions and their identities"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Deformation parameter q (p/q, decimal, or a+bi in certified mode)
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Weight parameter u, |u| < 1
    #[arg(long, global = true, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Precision in bits for certified arithmetic and series
    #[arg(long, global = true, env = "QZETA_DEFAULT_PREC", default_value_t = DEFAULT_PRECISION_BITS)]
    prec: u32,
    /// Target tail bound for series evaluation
    #[arg(long, global = true, conflicts_with = "terms")]
    tol: Option<f64>,
    /// Fixed number of series terms
    #[arg(long, global = true)]
    terms: Option<u64>,
    /// Character: builtin:mod1, builtin:mod3, builtin:mod4 or a JSON file
    #[arg(long, global = true)]
    chi: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to FILE instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit wall-clock timings from reports
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Certified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-Euler number H_{n,q}(u^-1)
    Number {
        #[arg(long)]
        n: u32,
    },
    /// q-Euler polynomial H_{n,q}(u^-1, x)
    Poly {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Order-r q-Euler polynomial H^(r)_{n,q}(u^-1, x)
    Higher {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// q-zeta: Hurwitz form with --x, Riemann form without; --r for the multiple form
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Closed-form special value at s = -n instead of the series
        #[arg(long)]
        special: bool,
    },
    /// q-l-function l_q(s, chi); requires --chi
    Lfun {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        special: bool,
    },
    /// Bernoulli-Euler identity audit (never fails)
    Audit {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Sweep an object over ranges (`a..b` inclusive, or comma lists)
    Table {
        #[arg(value_enum)]
        object: TableObject,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Interpolation,
    HigherOrder,
    Distribution,
    Lfun,
    Limits,
    Shift,
    ClassicalAudit,
    TailSoundness,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableObject {
    Number,
    Poly,
    Higher,
    Zeta,
    Lfun,
}

/// Failure of a command, classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Eval(QError),
    Io(String),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::Eval(e)
    }
}

fn usage(flag: &str, detail: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid {flag}: {detail}"))
}

/// Output of a single evaluation.
struct Record {
    value: Scalar,
    tail_bound: f64,
    terms_used: u64,
    mode: &'static str,
}

impl Record {
    fn closed(value: Scalar) -> Self {
        let mode = if value.is_exact() { "exact" } else { "certified" };
        Record {
            value,
            tail_bound: 0.0,
            terms_used: 0,
            mode,
        }
    }

    fn certified(v: CertifiedValue) -> Self {
        Record {
            value: Scalar::Approx(v.value().clone()),
            tail_bound: v.tail_bound(),
            terms_used: v.terms_used(),
            mode: "certified",
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "tail_bound": format_bound(self.tail_bound),
            "terms_used": self.terms_used,
            "mode": self.mode,
        })
    }
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => match emit(&cli.opts, &text) {
            Ok(()) => code,
            Err(Failure::Io(msg)) => {
                eprintln!("error: {msg}");
                EXIT_USAGE
            }
            Err(_) => unreachable!("emit only fails with io errors"),
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Eval(e)) => {
            eprintln!("error: {e}");
            match e {
                QError::Parse(_) | QError::InvalidCharacter { .. } => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

fn emit(opts: &Common, text: &str) -> Result<(), Failure> {
    match &opts.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn parse_scalar(flag: &str, raw: &str, opts: &Common) -> Result<Scalar, Failure> {
    Scalar::parse(raw, opts.prec).map_err(|e| usage(flag, e))
}

fn policy(opts: &Common) -> Result<Option<TailPolicy>, Failure> {
    let p = match (opts.tol, opts.terms) {
        (Some(t), None) => Some(TailPolicy::TargetBound(t)),
        (None, Some(k)) => Some(TailPolicy::FixedTerms(k)),
        _ => None,
    };
    if let Some(p) = p {
        p.validate()
            .map_err(|e| usage(if opts.tol.is_some() { "--tol" } else { "--terms" }, e))?;
    }
    Ok(p)
}

fn context(opts: &Common) -> Result<QContext, Failure> {
    let q = opts
        .q
        .as_deref()
        .ok_or_else(|| usage("--q", "missing; expected 0<q<1"))?;
    let u = opts
        .u
        .as_deref()
        .ok_or_else(|| usage("--u", "missing; expected |u|<1"))?;
    let q = parse_scalar("--q", q, opts)?;
    let u = parse_scalar("--u", u, opts)?;
    let mode = match opts.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Certified => Mode::Certified,
    };
    let ctx = QContext::new(q, u, mode, opts.prec).map_err(|e| {
        let msg = e.to_string();
        let flag = if msg.contains("precision") {
            "--prec"
        } else if msg.contains("u must") {
            "--u"
        } else if msg.contains("q must") {
            "--q"
        } else {
            "--q/--u"
        };
        Failure::Usage(format!("invalid {flag}: {}", msg.trim_start_matches("domain error: ")))
    })?;
    match policy(opts)? {
        Some(p) => Ok(ctx.with_policy(p)?),
        None => Ok(ctx),
    }
}

fn check_shift(x: &Scalar, strict: bool) -> Result<(), Failure> {
    let re = x.re_f64();
    let bad = if strict { re <= 0.0 } else { re < 0.0 };
    let bad = bad
        || x.as_exact()
            .is_some_and(|e| if strict { e.signum() <= 0 } else { e.signum() < 0 });
    if bad {
        Err(usage(
            "--x",
            format!("expected Re(x) {} 0, got {x}", if strict { ">" } else { ">=" }),
        ))
    } else {
        Ok(())
    }
}

fn check_order(r: u32) -> Result<(), Failure> {
    if r == 0 {
        Err(usage("--r", "expected an integer r >= 1"))
    } else {
        Ok(())
    }
}

fn character(opts: &Common) -> Result<DirichletCharacter, Failure> {
    let spec = opts
        .chi
        .as_deref()
        .ok_or_else(|| usage("--chi", "missing; expected builtin:mod1|mod3|mod4 or a JSON file"))?;
    DirichletCharacter::resolve(spec).map_err(|e| usage("--chi", e))
}

fn special_index(s: &Scalar) -> Result<u32, Failure> {
    s.as_exact()
        .filter(|e| e.is_integer() && e.signum() <= 0)
        .and_then(|e| e.to_i64())
        .and_then(|k| u32::try_from(-k).ok())
        .ok_or_else(|| usage("--s", "--special needs s = -n for an integer n >= 0"))
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Number { n } => {
            let ctx = context(opts)?;
            single(opts, Record::closed(q_euler_number(*n, &ctx)?))
        }
        Command::Poly { n, x } => {
            let ctx = context(opts)?;
            let x = parse_scalar("--x", x, opts)?;
            check_shift(&x, false)?;
            single(opts, Record::closed(q_euler_polynomial(*n, &x, &ctx)?))
        }
        Command::Higher { n, r, x } => {
            let ctx = context(opts)?;
            let x = parse_scalar("--x", x, opts)?;
            check_order(*r)?;
            check_shift(&x, false)?;
            single(opts, Record::closed(q_euler_higher(*n, *r, &x, &ctx)?))
        }
        Command::Zeta { s, x, r, special } => {
            let ctx = context(opts)?;
            let s = parse_scalar("--s", s, opts)?;
            check_order(*r)?;
            let x = x.as_deref().map(|x| parse_scalar("--x", x, opts)).transpose()?;
            if let Some(x) = &x {
                check_shift(x, true)?;
            }
            if *special {
                let n = special_index(&s)?;
                let x = x.ok_or_else(|| usage("--x", "--special needs the Hurwitz form (give --x)"))?;
                return single(opts, Record::closed(zeta_special_value(n, &x, *r, &ctx)?));
            }
            let mut query = ZetaQuery::new(s, ctx).with_order(*r);
            if let Some(x) = x {
                query = query.with_x(x);
            }
            single(opts, Record::certified(query.evaluate()?))
        }
        Command::Lfun { s, special } => {
            let ctx = context(opts)?;
            let s = parse_scalar("--s", s, opts)?;
            let chi = character(opts)?;
            if *special {
                let n = special_index(&s)?;
                return single(opts, Record::closed(l_q_special_value(n, &chi, &ctx)?));
            }
            single(
                opts,
                Record::certified(ZetaQuery::new(s, ctx).with_twist(chi).evaluate()?),
            )
        }
        Command::Audit { n_max } => Ok((audit(opts, *n_max)?, EXIT_OK)),
        Command::Verify { suite } => run_verify(opts, *suite),
        Command::Table { object, n, r, s, x } => table(opts, *object, [n, r, s, x]),
    }
}

fn single(opts: &Common, rec: Record) -> Result<(String, i32), Failure> {
    let text = match opts.format {
        Format::Json => format!("{}\n", rec.to_json()),
        Format::Plain => format!(
            "value: {}\ntail_bound: {}\nterms_used: {}\nmode: {}\n",
            rec.value.to_cell(),
            format_bound(rec.tail_bound),
            rec.terms_used,
            rec.mode
        ),
        Format::Csv => csv_text(
            &["value", "tail_bound", "terms_used", "mode"],
            vec![vec![
                rec.value.to_cell(),
                format_bound(rec.tail_bound),
                rec.terms_used.to_string(),
                rec.mode.to_string(),
            ]],
        )?,
    };
    Ok((text, EXIT_OK))
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn plain_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn audit(opts: &Common, n_max: usize) -> Result<String, Failure> {
    let rows = bernoulli_euler_identity_audit(n_max);
    Ok(match opts.format {
        Format::Json => format!("{}\n", json!(rows)),
        Format::Csv => csv_text(
            &["n", "lhs", "rhs", "equal"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.lhs.to_string(),
                        r.rhs.to_string(),
                        r.equal.to_string(),
                    ]
                })
                .collect(),
        )?,
        Format::Plain => plain_table(
            &["n", "lhs", "rhs", "equal"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.lhs.to_string(),
                        r.rhs.to_string(),
                        r.equal.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

fn run_verify(opts: &Common, suite: SuiteArg) -> Result<(String, i32), Failure> {
    let mut cfg = VerifyConfig {
        precision_bits: opts.prec,
        ..VerifyConfig::default()
    };
    if let Some(p) = policy(opts)? {
        cfg.policy = p;
    }
    if let Some(spec) = &opts.chi {
        cfg.characters = Some(vec![DirichletCharacter::resolve(spec).map_err(|e| usage("--chi", e))?]);
    }
    if cfg.precision_bits < crate::qcore::MIN_PRECISION_BITS {
        return Err(usage(
            "--prec",
            format!("expected at least {} bits", crate::qcore::MIN_PRECISION_BITS),
        ));
    }
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Interpolation => vec![Suite::Interpolation],
        SuiteArg::HigherOrder => vec![Suite::HigherOrder],
        SuiteArg::Distribution => vec![Suite::Distribution],
        SuiteArg::Lfun => vec![Suite::Lfun],
        SuiteArg::Limits => vec![Suite::Limits],
        SuiteArg::Shift => vec![Suite::Shift],
        SuiteArg::ClassicalAudit => vec![Suite::ClassicalAudit],
        SuiteArg::TailSoundness => vec![Suite::TailSoundness],
    };
    let mut reports: Vec<VerificationReport> = suites.into_iter().map(|s| run_suite(s, &cfg)).collect();
    if opts.no_timing {
        for r in &mut reports {
            r.wall_time_ms = None;
        }
    }
    let code = if reports.iter().all(VerificationReport::pass) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    };
    let text = match opts.format {
        Format::Json => {
            let body = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(&reports)
            };
            format!(
                "{}\n",
                serde_json::to_string_pretty(&body.map_err(|e| Failure::Io(e.to_string()))?)
                    .map_err(|e| Failure::Io(e.to_string()))?
            )
        }
        Format::Csv => {
            let rows = reports
                .iter()
                .flat_map(|r| {
                    r.cases.iter().map(move |c| {
                        vec![
                            r.suite.clone(),
                            serde_json::to_string(&c.inputs).unwrap_or_default(),
                            c.lhs.to_string(),
                            c.rhs.to_string(),
                            c.bound.clone(),
                            c.pass.to_string(),
                            c.note.clone().unwrap_or_default(),
                        ]
                    })
                })
                .collect();
            csv_text(&["suite", "inputs", "lhs", "rhs", "bound", "pass", "note"], rows)?
        }
        Format::Plain => {
            let mut out = String::new();
            for r in &reports {
                let status = match (r.pass(), r.advisory) {
                    (true, true) => "REPORTED",
                    (true, false) => "PASS",
                    (false, _) => "FAIL",
                };
                out.push_str(&format!(
                    "{:<16} {:<8} {}/{} cases pass",
                    r.suite, status, r.summary.passed, r.summary.total
                ));
                if let Some(ms) = r.wall_time_ms {
                    out.push_str(&format!(" ({ms} ms)"));
                }
                out.push('\n');
                for c in r.cases.iter().filter(|c| !c.pass) {
                    out.push_str(&format!(
                        "  mismatch {} lhs={} rhs={} bound={}{}\n",
                        serde_json::to_string(&c.inputs).unwrap_or_default(),
                        c.lhs,
                        c.rhs,
                        c.bound,
                        c.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
                    ));
                }
            }
            out
        }
    };
    Ok((text, code))
}

/// Expands `a..b` (inclusive integers), `a,b,c`, or a single value.
fn expand_range(flag: &str, raw: &str) -> Result<Vec<String>, Failure> {
    if let Some((a, b)) = raw.split_once("..") {
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| usage(flag, format!("range bounds must be integers, got `{raw}`")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            return Err(usage(flag, format!("empty range `{raw}`")));
        }
        if b - a > 100_000 {
            return Err(usage(flag, format!("range `{raw}` is too large")));
        }
        return Ok((a..=b).map(|k| k.to_string()).collect());
    }
    let items: Vec<String> = raw.split(',').map(|t| t.trim().to_string()).collect();
    if items.iter().any(String::is_empty) {
        return Err(usage(flag, format!("empty list element in `{raw}`")));
    }
    Ok(items)
}

fn nonneg_int(flag: &str, raw: &str) -> Result<u32, Failure> {
    raw.parse::<u32>()
        .map_err(|_| usage(flag, format!("expected a nonnegative integer, got `{raw}`")))
}

fn table(opts: &Common, object: TableObject, ranges: [&Option<String>; 4]) -> Result<(String, i32), Failure> {
    let ctx = context(opts)?;
    let [n, r, s, x] = ranges;
    let chi = if object == TableObject::Lfun {
        Some(character(opts)?)
    } else {
        None
    };

    // Declared column order per object; a missing optional column is skipped.
    let declared: Vec<(&str, Option<&String>, bool)> = match object {
        TableObject::Number => vec![("n", n.as_ref(), true)],
        TableObject::Poly => vec![("n", n.as_ref(), true), ("x", x.as_ref(), true)],
        TableObject::Higher => vec![
            ("n", n.as_ref(), true),
            ("r", r.as_ref(), false),
            ("x", x.as_ref(), true),
        ],
        TableObject::Zeta => vec![
            ("s", s.as_ref(), true),
            ("x", x.as_ref(), false),
            ("r", r.as_ref(), false),
        ],
        TableObject::Lfun => vec![("s", s.as_ref(), true)],
    };
    let mut columns: Vec<(&str, Vec<String>)> = Vec::new();
    for (name, raw, required) in declared {
        match raw {
            Some(raw) => columns.push((name, expand_range(&format!("--{name}"), raw)?)),
            None if required => return Err(usage(&format!("--{name}"), "missing; required for this table")),
            None => {}
        }
    }
    // Validate every column before evaluating anything.
    for (name, values) in &columns {
        for v in values {
            match *name {
                "n" => {
                    nonneg_int("--n", v)?;
                }
                "r" => check_order(nonneg_int("--r", v)?)?,
                "x" => check_shift(&parse_scalar("--x", v, opts)?, object == TableObject::Zeta)?,
                "s" => {
                    parse_scalar("--s", v, opts)?;
                }
                _ => unreachable!(),
            }
        }
    }

    let mut points: Vec<Vec<(&str, String)>> = vec![Vec::new()];
    for (name, values) in &columns {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push((*name, v.clone()));
                    p
                })
            })
            .collect();
    }

    let cell = |point: &Vec<(&str, String)>| -> Result<Record, QError> {
        let get = |k: &str| point.iter().find(|(n, _)| *n == k).map(|(_, v)| v.as_str());
        let int = |k: &str, default: u32| get(k).map(|v| v.parse::<u32>().expect("validated")).unwrap_or(default);
        let scalar = |k: &str| get(k).map(|v| Scalar::parse(v, opts.prec)).transpose();
        match object {
            TableObject::Number => Ok(Record::closed(q_euler_number(int("n", 0), &ctx)?)),
            TableObject::Poly => Ok(Record::closed(q_euler_polynomial(
                int("n", 0),
                &scalar("x")?.expect("required"),
                &ctx,
            )?)),
            TableObject::Higher => Ok(Record::closed(q_euler_higher(
                int("n", 0),
                int("r", 1),
                &scalar("x")?.expect("required"),
                &ctx,
            )?)),
            TableObject::Zeta => {
                let mut q = ZetaQuery::new(scalar("s")?.expect("required"), ctx.clone()).with_order(int("r", 1));
                if let Some(x) = scalar("x")? {
                    q = q.with_x(x);
                }
                Ok(Record::certified(q.evaluate()?))
            }
            TableObject::Lfun => Ok(Record::certified(
                ZetaQuery::new(scalar("s")?.expect("required"), ctx.clone())
                    .with_twist(chi.clone().expect("lfun tables resolve --chi"))
                    .evaluate()?,
            )),
        }
    };
    let results: Vec<Result<Record, QError>> = points.par_iter().map(cell).collect();

    let show_bound = matches!(object, TableObject::Zeta | TableObject::Lfun) || ctx.mode() == Mode::Certified;
    let mut header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    header.push("value");
    if show_bound {
        header.push("tail_bound");
    }
    let any_error = results.iter().any(Result::is_err);
    let code = if any_error { EXIT_DOMAIN } else { EXIT_OK };

    let text = match opts.format {
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .zip(&results)
                .map(|(point, res)| {
                    let mut row = Map::new();
                    for (k, v) in point {
                        row.insert(k.to_string(), Value::String(v.clone()));
                    }
                    match res {
                        Ok(rec) => {
                            row.insert("value".into(), rec.value.to_json());
                            if show_bound {
                                row.insert("tail_bound".into(), Value::String(format_bound(rec.tail_bound)));
                            }
                            row.insert("error".into(), Value::Null);
                        }
                        Err(e) => {
                            row.insert("value".into(), Value::Null);
                            row.insert("error".into(), Value::String(e.to_string()));
                        }
                    }
                    Value::Object(row)
                })
                .collect();
            format!(
                "{}\n",
                json!({ "object": format!("{object:?}").to_lowercase(), "columns": header, "rows": rows })
            )
        }
        Format::Csv | Format::Plain => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .zip(&results)
                .map(|(point, res)| {
                    let mut row: Vec<String> = point.iter().map(|(_, v)| v.clone()).collect();
                    match res {
                        Ok(rec) => {
                            row.push(rec.value.to_cell());
                            if show_bound {
                                row.push(format_bound(rec.tail_bound));
                            }
                            row.push(String::new());
                        }
                        Err(e) => {
                            row.push(String::new());
                            if show_bound {
                                row.push(String::new());
                            }
                            row.push(e.to_string());
                        }
                    }
                    row
                })
                .collect();
            let mut full_header = header.clone();
            full_header.push("error");
            if opts.format == Format::Csv {
                csv_text(&full_header, rows)?
            } else {
                plain_table(&full_header, &rows)
            }
        }
    };
    Ok((text, code))
}
