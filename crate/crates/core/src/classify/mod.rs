//! Assigns a right-hand side to its row of the classification table and,
//! where it can, builds the normalizing chain of equivalence transforms.

mod chain;
mod fit;
pub mod probe;
mod quadratic;
mod template;

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde_json::{json, Value};

pub use chain::{apply_chain, compose_chain, ChainStep, MAX_CHAIN};
pub use fit::{rational_fit, RationalFit};
pub use quadratic::classify_quadratic;
pub use template::match_template;

use crate::catalog::{verify_case, CaseParams, Case7Params};
use crate::equiv::QuadraticForm;
use crate::error::{Error, Result};
use crate::expr::calculus::substitute_var;
use crate::expr::rational::{qr, Q};
use crate::expr::{diff, diff_n, Poly, Var};
use crate::jet::check_rhs;
use probe::{ratio, vanishes, Tracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Confidence {
    Proved,
    NumericOnly,
}

impl Confidence {
    pub fn label(&self) -> &'static str {
        match self {
            Confidence::Proved => "Proved",
            Confidence::NumericOnly => "NumericOnly",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub case_id: usize,
    pub template: String,
    /// Extracted parameters by name (`delta`, `beta`, `mu`, `nu`, `eps0`,
    /// `eps1`, `eps2`, `pm`).
    pub params: BTreeMap<String, Poly>,
    /// Empty when no normalizing chain was constructed.
    pub chain: Vec<ChainStep>,
    /// The right-hand side after the chain.
    pub normalized: Option<Poly>,
    pub confidence: Confidence,
    pub notes: Vec<String>,
}

impl Classification {
    fn new(case_id: usize, template: &str) -> Self {
        Classification {
            case_id,
            template: template.to_string(),
            params: BTreeMap::new(),
            chain: Vec::new(),
            normalized: None,
            confidence: Confidence::Proved,
            notes: Vec::new(),
        }
    }

    fn with(mut self, name: &str, v: Poly) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    fn with_int(self, name: &str, v: i64) -> Self {
        self.with(name, Poly::int(v))
    }

    pub fn param(&self, name: &str) -> Option<&Poly> {
        self.params.get(name)
    }

    /// The row parameters in catalog form, when they are rational.
    pub fn case_params(&self) -> Option<CaseParams> {
        let mut p = CaseParams::default();
        let rat = |name: &str| -> Option<Option<Q>> {
            match self.params.get(name) {
                None => Some(None),
                Some(v) => v.as_constant().map(Some),
            }
        };
        let int = |name: &str| -> Option<Option<i64>> {
            rat(name).map(|o| o.and_then(|x| if x.is_integer() { x.to_integer().try_into().ok() } else { None }))
        };
        if let Some(d) = rat("delta")? {
            p.delta = d;
        }
        if let Some(b) = rat("beta")? {
            p.beta = b;
        }
        if let Some(e) = int("eps1")? {
            p.eps1 = e;
        }
        if let Some(e) = int("eps2")? {
            p.eps2 = e;
        }
        if let Some(e) = int("pm")? {
            p.pm = e;
        }
        p.case7 = Case7Params::constant_c0();
        Some(p)
    }

    /// Deterministic JSON payload.
    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
            .collect();
        let chain: Vec<Value> = self.chain.iter().map(ChainStep::to_json).collect();
        json!({
            "case": self.case_id,
            "template": self.template,
            "params": params,
            "chain": chain,
            "normalized": self.normalized.as_ref().map(|p| p.to_string()),
            "confidence": self.confidence.label(),
            "notes": self.notes,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub n: usize,
    pub samples: usize,
    /// Run the row's operator check on the claimed row.
    pub verify: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            n: 3,
            samples: 100,
            verify: true,
        }
    }
}

/// Whether the third `ut` derivative vanishes.
pub fn ut_cubic_test(f: &Poly) -> Result<bool> {
    let mut tr = Tracker::default();
    let r = vanishes(&diff_n(f, Var::Ut, 3), "F_ut_ut_ut", &mut tr)?;
    if tr.numeric {
        return Err(Error::Inconclusive("F_ut_ut_ut vanishes numerically only".into()));
    }
    Ok(r)
}

/// The coefficients of a right-hand side quadratic in `ut`.
pub fn extract_quadratic(f: &Poly) -> Result<QuadraticForm> {
    let at0 = |p: &Poly| substitute_var(p, Var::Ut, &Poly::zero());
    let f1 = diff(f, Var::Ut);
    let a = at0(&diff(&f1, Var::Ut)).scale(&qr(1, 2));
    let b = at0(&f1);
    let c = at0(f);
    let qf = QuadraticForm::new(a, b, c)?;
    let mut tr = Tracker::default();
    let ok = vanishes(&qf.rhs().sub(f), "quadratic reconstruction", &mut tr)?;
    if !ok || tr.numeric {
        return Err(Error::NotPolynomial(f.to_string()));
    }
    Ok(qf)
}

pub fn classify(f: &Poly) -> Result<Classification> {
    classify_with(f, &ClassifyConfig::default())
}

pub fn classify_with(f: &Poly, cfg: &ClassifyConfig) -> Result<Classification> {
    check_rhs(f)?;
    if f.is_zero() {
        return Err(Error::ConstraintViolation("F must be nonzero".into()));
    }
    let mut tr = Tracker::default();
    let quad = ut_cubic_test(f)?;
    let t_dep = !vanishes(&diff(f, Var::T), "F_t", &mut tr)?;
    let mut c = if quad {
        let qf = extract_quadratic(f)?;
        if vanishes(qf.discriminant(), "B^2 - 4AC", &mut tr)? {
            quadratic::degenerate(&qf, &mut tr)?
        } else if t_dep {
            t_dependent(f, true, &mut tr)?
        } else {
            quadratic::classify_in(&qf, &mut tr)?
        }
    } else if t_dep {
        t_dependent(f, false, &mut tr)?
    } else {
        let c = template::classify_template(f, &mut tr)?;
        if let Ok(fit) = rational_fit(f) {
            tr.note(format!("logarithmic-derivative fit: A = {}, B = {}, C = {}, D = {}", fit.a, fit.b, fit.c, fit.d));
        }
        c
    };
    chain::finish(f, &mut c, &mut tr)?;
    if cfg.verify {
        gate(&mut c, cfg, &mut tr)?;
    }
    Ok(finalize(c, tr))
}

fn finalize(mut c: Classification, tr: Tracker) -> Classification {
    c.notes.extend(tr.notes);
    if tr.numeric {
        c.confidence = Confidence::NumericOnly;
    }
    c
}

/// Right-hand sides depending on `t`: only the exponential template is
/// brought to normal form.
fn t_dependent(f: &Poly, quad: bool, tr: &mut Tracker) -> Result<Classification> {
    let r = ratio(&diff(f, Var::T), f);
    if let Some(d) = probe::constant_of(&r, "F_t / F", tr)? {
        let mut c = Classification::new(1, "exp(delta*t)*f(u, ut)").with_int("delta", 1);
        c.chain = vec![ChainStep::catalog("t-scale", &[("k", d)])?];
        return Ok(c);
    }
    let mut c = Classification::new(0, "F(t, u, ut)");
    c.confidence = Confidence::NumericOnly;
    tr.numeric = true;
    if quad {
        tr.note("t-dependent quadratic coefficients: the normalization to t-free coefficients is not automated");
    } else {
        tr.note("t-dependent right-hand side: equivalence to a t-free form was not searched");
    }
    Ok(c)
}

fn gate_cache() -> &'static Mutex<BTreeMap<String, bool>> {
    static CACHE: OnceLock<Mutex<BTreeMap<String, bool>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Runs the row's operator check with the extracted parameters; a failure
/// is an error, never a silent claim.
fn gate(c: &mut Classification, cfg: &ClassifyConfig, tr: &mut Tracker) -> Result<()> {
    if c.case_id == 7 && cfg.n != 3 {
        tr.note("row 7 operators are only checked at n = 3");
        return Ok(());
    }
    let Some(p) = c.case_params() else {
        tr.numeric = true;
        tr.note("row parameters are symbolic; operator check skipped");
        return Ok(());
    };
    let key = format!("{}:{}:{}:{:?}", c.case_id, cfg.n, cfg.samples, p);
    let cached = gate_cache().lock().expect("gate cache").get(&key).copied();
    let pass = match cached {
        Some(v) => v,
        None => {
            let v = verify_case(c.case_id, cfg.n, &p, cfg.samples)?.pass;
            gate_cache().lock().expect("gate cache").insert(key, v);
            v
        }
    };
    if !pass {
        return Err(Error::Inconclusive(format!("row {} failed its operator check", c.case_id)));
    }
    tr.note(format!("row {} operators verified at n = {}", c.case_id, cfg.n));
    Ok(())
}
