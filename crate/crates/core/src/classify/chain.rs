use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::probe::{vanishes, Tracker};
use super::{template, Classification};
use crate::catalog::case_f;
use crate::equiv::{compose, reduction_catalog, transform_f, EquivTransform};
use crate::error::Result;
use crate::expr::Poly;

/// Longer chains are abandoned.
pub const MAX_CHAIN: usize = 4;

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub name: String,
    pub params: BTreeMap<String, Poly>,
    pub transform: EquivTransform,
}

impl ChainStep {
    pub fn catalog(name: &str, params: &[(&str, Poly)]) -> Result<Self> {
        let params: BTreeMap<String, Poly> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let transform = reduction_catalog(name, &params)?;
        Ok(ChainStep {
            name: name.to_string(),
            params,
            transform,
        })
    }

    pub fn custom(name: &str, params: &[(&str, Poly)], transform: EquivTransform) -> Self {
        ChainStep {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            transform,
        }
    }

    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
            .collect();
        json!({
            "name": self.name,
            "params": params,
            "zeta": self.transform.zeta.to_string(),
            "phi": self.transform.phi.to_string(),
            "delta": self.transform.delta.to_string(),
        })
    }
}

/// The whole chain as one transform.
pub fn compose_chain(steps: &[ChainStep]) -> EquivTransform {
    steps
        .iter()
        .fold(EquivTransform::identity(), |acc, s| compose(&acc, &s.transform))
}

/// Applies the steps one at a time.
pub fn apply_chain(f: &Poly, steps: &[ChainStep]) -> Result<Poly> {
    let mut g = f.clone();
    for s in steps {
        g = transform_f(&g, &s.transform)?;
    }
    Ok(g)
}

/// Whether `g` has the canonical shape of the classified row.
pub(super) fn matches_row(g: &Poly, c: &Classification, tr: &mut Tracker) -> Result<bool> {
    if c.case_id <= 4 {
        return template::recheck(g, c, tr);
    }
    let Some(p) = c.case_params() else {
        return Ok(false);
    };
    let target = case_f(c.case_id, &p)?;
    vanishes(&g.sub(&target), "normalized right-hand side minus the row template", tr)
}

/// Keeps the chain only when it provably reaches the row's normal form.
pub(super) fn finish(f: &Poly, c: &mut Classification, tr: &mut Tracker) -> Result<()> {
    c.chain.retain(|s| s.name != "identity");
    if c.chain.len() > MAX_CHAIN {
        tr.numeric = true;
        tr.note(format!("normalization unavailable: chain of {} steps exceeds the cap", c.chain.len()));
        c.chain.clear();
        return Ok(());
    }
    let g = match apply_chain(f, &c.chain) {
        Ok(g) => g,
        Err(e) => {
            tr.note(format!("normalizing chain dropped: {e}"));
            c.chain.clear();
            return Ok(());
        }
    };
    let mut probe = Tracker::default();
    if matches_row(&g, c, &mut probe).unwrap_or(false) {
        tr.numeric |= probe.numeric;
        c.normalized = Some(g);
    } else {
        if !c.chain.is_empty() {
            tr.note("the constructed chain did not reach the normal form and was dropped");
        }
        if c.case_id != 0 {
            tr.note("no normalizing chain constructed");
        }
        c.chain.clear();
    }
    Ok(())
}
