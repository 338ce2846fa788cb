//! Command-line front end. `run` returns the exit code together with the
//! text for standard output and standard error, so tests drive it without
//! spawning a process.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{self, algebra_dimension, verify_case_with, Case7Params, CaseParams, CaseReport, VerifyConfig, CASE_COUNT};
use crate::classify::{classify_with, ClassifyConfig};
use crate::determining::determining_residuals;
use crate::equiv::{reduction_catalog, reduction_names, transform_f, verify_inverse_seeded, EquivTransform};
use crate::error::Error;
use crate::expr::{Poly, Session, Var, Verdict};
use crate::jet::{check_rhs, is_symmetry_with, lie_bracket, max_sampled_residual, symmetry_residual, SymmetryConfig};
use crate::syntax::{parse_opaque_signature, parse_param_signature, parse_poly, parse_transform_spec, parse_vector_field};

pub const REPORT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "eikonal", version, about = "Symmetry verification and group classification for u_a u_a = F(t, u, u_t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Pretty,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of spatial variables.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jet points per numeric check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Relative tolerance for numeric residuals.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Opaque function declaration such as `h(ut)`; repeatable.
    #[arg(long)]
    opaque: Vec<String>,
    /// Parameter declaration such as `m positive`; repeatable.
    #[arg(long)]
    param: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assign a right-hand side to its row of the classification.
    Classify {
        rhs: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check one operator against a right-hand side.
    VerifySymmetry {
        #[arg(long)]
        field: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check the operators of every row (or one row) of the table.
    VerifyTable {
        #[arg(long = "case")]
        case: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Lie bracket of two operators.
    Bracket {
        left: String,
        right: String,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an equivalence transformation to a right-hand side.
    Transform {
        /// File with `zeta = ...; phi = ...; delta = ...; zeta_inv = ...; phi_inv = ...`.
        #[arg(long, conflicts_with = "reduction")]
        spec: Option<PathBuf>,
        /// Name of a catalog reduction.
        #[arg(long)]
        reduction: Option<String>,
        /// Reduction parameter as `name=expression`; repeatable.
        #[arg(long = "set")]
        set: Vec<String>,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: Common,
    },
    /// Residuals of the determining equations for one operator.
    Determining {
        #[arg(long)]
        field: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the classification table.
    Table {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Classify { common, .. }
            | Command::VerifySymmetry { common, .. }
            | Command::VerifyTable { common, .. }
            | Command::Bracket { common, .. }
            | Command::Transform { common, .. }
            | Command::Determining { common, .. }
            | Command::Table { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::VerifySymmetry { .. } => "verify-symmetry",
            Command::VerifyTable { .. } => "verify-table",
            Command::Bracket { .. } => "bracket",
            Command::Transform { .. } => "transform",
            Command::Determining { .. } => "determining",
            Command::Table { .. } => "table",
        }
    }
}

/// Validated run settings shared by all subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub output: Output,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            seed: 0,
            samples: 100,
            tol: 1e-8,
            output: Output::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        json!({ "n": self.n, "seed": self.seed, "samples": self.samples, "tol": self.tol })
    }
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One command's result before rendering.
struct Report {
    body: serde_json::Map<String, Value>,
    pretty: Vec<String>,
    notes: Vec<String>,
    exit: i32,
}

impl Report {
    fn new(exit: i32) -> Self {
        Report {
            body: serde_json::Map::new(),
            pretty: Vec::new(),
            notes: Vec::new(),
            exit,
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.body.insert(key.to_string(), v);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.pretty.push(s.into());
    }
}

/// Exit code for an error raised while handling a command.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::NormalizationUnavailable(_) => EXIT_INCONCLUSIVE,
        Error::NotClosed(_) | Error::DependentBasis | Error::SamplingExhausted(_) | Error::NoFit | Error::NoTemplate => {
            EXIT_FAILED
        }
        _ => EXIT_INPUT,
    }
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let common = cli.command.common().clone();
    let cfg = RunConfig {
        n: common.n,
        seed: common.seed,
        samples: common.samples,
        tol: common.tol,
        output: common.output,
    };
    let result = cfg
        .validate()
        .and_then(|_| session(&common))
        .and_then(|s| dispatch(&cli.command, &cfg, &s));
    match result {
        Ok(report) => render(&cli.command, &cfg, report),
        Err(e) => Outcome {
            code: exit_code_for(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn session(c: &Common) -> Result<Session, Error> {
    let mut s = Session::new();
    for d in &c.param {
        let (name, sign) = parse_param_signature(d)?;
        s.declare_param(&name, sign)?;
    }
    for d in &c.opaque {
        let (name, formals) = parse_opaque_signature(d)?;
        s.declare_opaque(&name, &formals)?;
    }
    Ok(s)
}

fn echo(cmd: &Command) -> Value {
    let c = cmd.common();
    let mut args = json!({ "opaque": c.opaque, "param": c.param });
    let m = args.as_object_mut().expect("object");
    match cmd {
        Command::Classify { rhs, .. } => {
            m.insert("rhs".into(), json!(rhs));
        }
        Command::VerifySymmetry { field, rhs, .. } | Command::Determining { field, rhs, .. } => {
            m.insert("field".into(), json!(field));
            m.insert("rhs".into(), json!(rhs));
        }
        Command::VerifyTable { case, .. } => {
            m.insert("case".into(), json!(case));
        }
        Command::Bracket { left, right, .. } => {
            m.insert("left".into(), json!(left));
            m.insert("right".into(), json!(right));
        }
        Command::Transform {
            spec, reduction, set, rhs, ..
        } => {
            m.insert("spec".into(), json!(spec.as_ref().map(|p| p.display().to_string())));
            m.insert("reduction".into(), json!(reduction));
            m.insert("set".into(), json!(set));
            m.insert("rhs".into(), json!(rhs));
        }
        Command::Table { .. } => {}
    }
    json!({ "name": cmd.name(), "args": args })
}

fn render(cmd: &Command, cfg: &RunConfig, r: Report) -> Outcome {
    let stdout = match cfg.output {
        Output::Json => {
            let mut top = r.body;
            top.insert("report_version".into(), json!(REPORT_VERSION));
            top.insert("command".into(), echo(cmd));
            top.insert("config".into(), cfg.to_json());
            top.insert("notes".into(), json!(r.notes));
            top.insert("exit".into(), json!(r.exit));
            let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("report serializes");
            s.push('\n');
            s
        }
        Output::Pretty => {
            let mut lines = r.pretty;
            for n in &r.notes {
                lines.push(format!("note: {n}"));
            }
            lines.push(format!("exit: {}", r.exit));
            lines.join("\n") + "\n"
        }
    };
    Outcome {
        code: r.exit,
        stdout,
        stderr: String::new(),
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig, s: &Session) -> Result<Report, Error> {
    match cmd {
        Command::Classify { rhs, .. } => classify_cmd(rhs, cfg, s),
        Command::VerifySymmetry { field, rhs, .. } => verify_symmetry_cmd(field, rhs, cfg, s),
        Command::VerifyTable { case, .. } => verify_table_cmd(*case, cfg),
        Command::Bracket { left, right, .. } => bracket_cmd(left, right, cfg, s),
        Command::Transform {
            spec, reduction, set, rhs, ..
        } => transform_cmd(spec.as_ref(), reduction.as_deref(), set, rhs, cfg, s),
        Command::Determining { field, rhs, .. } => determining_cmd(field, rhs, cfg, s),
        Command::Table { .. } => Ok(table_cmd(cfg)),
    }
}

fn parse_rhs(text: &str, s: &Session) -> Result<Poly, Error> {
    let f = parse_poly(text, s)?;
    check_rhs(&f)?;
    Ok(f)
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v {
        Verdict::Zero => EXIT_OK,
        Verdict::NonZero(_) => EXIT_FAILED,
        Verdict::Unknown => EXIT_INCONCLUSIVE,
    }
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::NonZero(w) => {
            let point: serde_json::Map<String, Value> = w
                .env
                .vars
                .iter()
                .map(|(k, x)| (k.name(), json!(x)))
                .chain(w.env.params.iter().map(|(k, x)| (k.clone(), json!(x))))
                .collect();
            json!({ "status": "NonZero", "witness": { "point": point, "value": w.value, "probe": w.probe } })
        }
        other => json!({ "status": other.label() }),
    }
}

fn classify_cmd(rhs: &str, cfg: &RunConfig, s: &Session) -> Result<Report, Error> {
    let f = parse_rhs(rhs, s)?;
    let ccfg = ClassifyConfig {
        n: cfg.n,
        samples: cfg.samples,
        verify: true,
    };
    let c = classify_with(&f, &ccfg)?;
    let mut r = Report::new(EXIT_OK);
    r.set("rhs", json!(f.to_string()));
    r.set("classification", c.to_json());
    r.line(format!("F = {f}"));
    r.line(format!("case {} ({})", c.case_id, c.template));
    for (k, v) in &c.params {
        r.line(format!("  {k} = {v}"));
    }
    for step in &c.chain {
        let params: Vec<String> = step.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        r.line(format!("  step {} [{}]", step.name, params.join(", ")));
    }
    if let Some(n) = &c.normalized {
        r.line(format!("normalized: {n}"));
    }
    r.line(format!("confidence: {}", c.confidence.label()));
    for n in &c.notes {
        r.line(format!("  - {n}"));
    }
    Ok(r)
}

fn verify_symmetry_cmd(field: &str, rhs: &str, cfg: &RunConfig, s: &Session) -> Result<Report, Error> {
    let q = parse_vector_field(field, cfg.n, s)?;
    let f = parse_rhs(rhs, s)?;
    let scfg = SymmetryConfig {
        seed: cfg.seed,
        points: cfg.samples,
        tol: cfg.tol,
        ..SymmetryConfig::default()
    };
    let verdict = is_symmetry_with(&q, &f, cfg.n, &scfg)?;
    let res = symmetry_residual(&q, &f, cfg.n)?;
    let worst = max_sampled_residual(&res, &f, cfg.n, &scfg.sampling, cfg.samples, cfg.seed);
    let mut exit = verdict_exit(&verdict);
    let mut r = Report::new(EXIT_OK);
    if verdict.is_zero() && !(worst <= cfg.tol) {
        exit = EXIT_FAILED;
        r.notes.push(format!("symbolic Zero but sampled residual {worst:e} exceeds tol"));
    }
    r.exit = exit;
    let residual = if verdict.is_zero() { "0".to_string() } else { res.to_string() };
    r.set(
        "verdicts",
        json!([{
            "field": q.to_string(),
            "verdict": verdict_json(&verdict),
            "max_residual": worst,
            "residual": residual,
        }]),
    );
    r.line(format!("field: {q}"));
    r.line(format!("F = {f}"));
    r.line(format!("verdict: {}", verdict.label()));
    r.line(format!("max sampled residual: {worst:e}"));
    if !verdict.is_zero() {
        r.line(format!("residual: {residual}"));
    }
    Ok(r)
}

fn case_run(id: usize, n: usize, p: &CaseParams, label: &str, vc: &VerifyConfig) -> (String, Result<CaseReport, Error>) {
    let n = if id == 7 { 3 } else { n };
    (label.to_string(), verify_case_with(id, n, p, vc))
}

fn verify_table_cmd(case: Option<usize>, cfg: &RunConfig) -> Result<Report, Error> {
    let ids: Vec<usize> = match case {
        Some(id) if id >= CASE_COUNT => return Err(Error::IndexOutOfRange(format!("case {id}"))),
        Some(id) => vec![id],
        None => (0..CASE_COUNT).collect(),
    };
    let vc = VerifyConfig {
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
    };
    let mut jobs: Vec<(usize, CaseParams, &str)> = Vec::new();
    for &id in &ids {
        jobs.push((id, CaseParams::default(), "canonical"));
        if id == 7 {
            let linear = CaseParams {
                case7: Case7Params::linear_c0(),
                ..CaseParams::default()
            };
            jobs.push((id, linear, "c0 = u"));
        }
    }
    let results: Vec<(String, Result<CaseReport, Error>)> = std::thread::scope(|sc| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(id, p, label)| {
                let vc = &vc;
                sc.spawn(move || case_run(*id, cfg.n, p, label, vc))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("row check panicked")).collect()
    });
    let mut r = Report::new(EXIT_OK);
    let mut rows = Vec::new();
    for ((id, _, _), (label, res)) in jobs.iter().zip(results) {
        let rep = res?;
        if !rep.pass {
            r.exit = EXIT_FAILED;
        }
        let worst = rep.operators.iter().map(|o| o.max_residual).fold(0.0, f64::max);
        r.line(format!(
            "row {id:>2} [{label}] n = {}: {} operators, max residual {worst:.1e}, {}",
            rep.n,
            rep.operators.len(),
            if rep.pass { "pass" } else { "FAIL" }
        ));
        if *id == 7 && rep.n != cfg.n {
            r.notes.push(format!("row 7 checked at n = 3 instead of n = {}", cfg.n));
        }
        let mut v = serde_json::to_value(&rep).expect("case report serializes");
        v.as_object_mut().expect("object").insert("instance".into(), json!(label));
        rows.push(v);
    }
    r.notes.dedup();
    r.set("rows", Value::Array(rows));
    Ok(r)
}

fn bracket_cmd(left: &str, right: &str, cfg: &RunConfig, s: &Session) -> Result<Report, Error> {
    let a = parse_vector_field(left, cfg.n, s)?;
    let b = parse_vector_field(right, cfg.n, s)?;
    let c = lie_bracket(&a, &b)?;
    let mut r = Report::new(EXIT_OK);
    r.set("result", json!(c.to_string()));
    r.line(c.to_string());
    Ok(r)
}

fn build_transform(
    spec: Option<&PathBuf>,
    reduction: Option<&str>,
    set: &[String],
    s: &Session,
) -> Result<EquivTransform, Error> {
    if let Some(path) = spec {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let sp = parse_transform_spec(&text, s)?;
        return match sp.delta_hat {
            Some(dh) => {
                let z = sp.zeta.sub(&dh.mul(&Poly::var(Var::T)));
                EquivTransform::restricted(dh, z, sp.phi, sp.delta, sp.zeta_inv, sp.phi_inv)
            }
            None => EquivTransform::new(sp.zeta, sp.phi, sp.delta, sp.zeta_inv, sp.phi_inv),
        };
    }
    let Some(name) = reduction else {
        return Err(Error::Config(format!(
            "either --spec or --reduction is required; reductions: {}",
            reduction_names().join(", ")
        )));
    };
    let mut params = BTreeMap::new();
    for item in set {
        let Some((k, v)) = item.split_once('=') else {
            return Err(Error::Config(format!("--set expects name=expression, got `{item}`")));
        };
        params.insert(k.trim().to_string(), parse_poly(v, s)?);
    }
    reduction_catalog(name, &params)
}

fn transform_cmd(
    spec: Option<&PathBuf>,
    reduction: Option<&str>,
    set: &[String],
    rhs: &str,
    cfg: &RunConfig,
    s: &Session,
) -> Result<Report, Error> {
    let tr = build_transform(spec, reduction, set, s)?;
    let f = parse_rhs(rhs, s)?;
    let g = transform_f(&f, &tr)?;
    let inverse_ok = verify_inverse_seeded(&tr, cfg.seed);
    let mut r = Report::new(if inverse_ok { EXIT_OK } else { EXIT_FAILED });
    r.set(
        "transform",
        json!({
            "zeta": tr.zeta.to_string(),
            "phi": tr.phi.to_string(),
            "delta": tr.delta.to_string(),
            "zeta_inv": tr.zeta_inv.to_string(),
            "phi_inv": tr.phi_inv.to_string(),
        }),
    );
    r.set("rhs", json!(f.to_string()));
    r.set("result", json!(g.to_string()));
    r.set("verdicts", json!([{ "check": "inverse round trip", "pass": inverse_ok }]));
    r.line(format!("F = {f}"));
    r.line(format!("F~ = {g}"));
    r.line(format!("inverse round trip: {}", if inverse_ok { "pass" } else { "FAIL" }));
    if !inverse_ok {
        r.notes.push("the supplied inverse does not undo the transformation at sampled points".into());
    }
    Ok(r)
}

fn determining_cmd(field: &str, rhs: &str, cfg: &RunConfig, s: &Session) -> Result<Report, Error> {
    let q = parse_vector_field(field, cfg.n, s)?;
    let f = parse_rhs(rhs, s)?;
    let sys = determining_residuals(&q, &f, cfg.n)?;
    let mut r = Report::new(verdict_exit(&sys.verdict()));
    let eqs: Vec<Value> = sys
        .equations
        .iter()
        .map(|e| {
            json!({
                "label": e.label,
                "verdict": verdict_json(&e.verdict),
                "residual": if e.verdict.is_zero() { "0".to_string() } else { e.residual.to_string() },
            })
        })
        .collect();
    r.set("verdicts", Value::Array(eqs));
    r.line(format!("field: {q}"));
    r.line(format!("F = {f}"));
    for e in &sys.equations {
        if e.verdict.is_zero() {
            r.line(format!("  {}: Zero", e.label));
        } else {
            r.line(format!("  {}: {} ({})", e.label, e.verdict.label(), e.residual));
        }
    }
    Ok(r)
}

fn table_cmd(cfg: &RunConfig) -> Report {
    let mut r = Report::new(EXIT_OK);
    let rows: Vec<Value> = catalog::table()
        .rows
        .iter()
        .map(|row| {
            let dim = algebra_dimension(row.id, cfg.n);
            r.line(format!("{:>2}  {:<40} dim {}", row.id, row.template, dim));
            json!({
                "id": row.id,
                "template": row.template,
                "declarations": row.declarations,
                "constraints": row.constraints,
                "operators": row.operators,
                "dimension": dim,
            })
        })
        .collect();
    r.set("rows", Value::Array(rows));
    r
}
