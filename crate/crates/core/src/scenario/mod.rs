//! Named scenarios that run the toolkit end to end and emit check reports.

mod complexes;
mod duality;
mod groups;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCENARIOS: [&str; 7] = [
    "affine-coxeter",
    "cubulable-fw",
    "gamma-rs",
    "duality",
    "graph-product",
    "quasiline-dinfty",
    "cube-fix",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The result of the source this check reproduces.
    pub anchor: String,
    pub verdict: Verdict,
    pub summary: String,
    pub data: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub verdict: Verdict,
    /// Deterministic work counters (sizes built, cosets, subgroups examined).
    pub resources: BTreeMap<String, u64>,
}

impl ScenarioReport {
    /// 0 pass, 1 some check failed, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "scenario {} ({})", self.scenario, params.join(" "));
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}: {}", c.verdict.tag(), c.name, c.summary);
            let _ = writeln!(s, "      anchor: {}", c.anchor);
        }
        let res: Vec<String> = self.resources.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "resources: {}", res.join(" "));
        let _ = writeln!(s, "verdict: {}", self.verdict.tag());
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Typed access to scenario parameters; unknown keys are rejected at the end.
pub(crate) struct Params<'a> {
    raw: &'a BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, String>>,
}

impl<'a> Params<'a> {
    fn new(raw: &'a BTreeMap<String, String>) -> Self {
        Params {
            raw,
            used: RefCell::new(BTreeMap::new()),
        }
    }

    pub(crate) fn get<T: FromStr + ToString>(&self, key: &str, default: T) -> Result<T> {
        let value = match self.raw.get(key) {
            Some(s) => s
                .parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("parameter {key}={s:?} is not valid")))?,
            None => default,
        };
        self.used.borrow_mut().insert(key.to_string(), value.to_string());
        Ok(value)
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        let used = self.used.into_inner();
        let unknown: BTreeSet<&String> = self.raw.keys().filter(|k| !used.contains_key(*k)).collect();
        if let Some(k) = unknown.into_iter().next() {
            return Err(Error::InvalidInput(format!("unknown parameter {k:?}")));
        }
        Ok(used)
    }
}

/// Accumulates checks; a resource error inside a check becomes an
/// inconclusive record rather than aborting the scenario.
pub(crate) struct Recorder {
    checks: Vec<CheckRecord>,
    pub(crate) resources: BTreeMap<String, u64>,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            checks: Vec::new(),
            resources: BTreeMap::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        name: &str,
        anchor: &str,
        body: impl FnOnce(&mut BTreeMap<String, u64>) -> Result<(Verdict, String, Value)>,
    ) -> Result<()> {
        let (verdict, summary, data) = match body(&mut self.resources) {
            Ok(r) => r,
            Err(e) if e.is_resource() => (Verdict::Inconclusive, format!("skipped: {e}"), Value::Null),
            Err(e) => return Err(e),
        };
        self.checks.push(CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            verdict,
            summary,
            data,
        });
        Ok(())
    }
}

/// Runs a named scenario. Parameters are `key → value` strings; unknown
/// scenarios and parameters are input errors.
pub fn run_scenario(name: &str, params: &BTreeMap<String, String>) -> Result<ScenarioReport> {
    let p = Params::new(params);
    let mut rec = Recorder::new();
    match name {
        "affine-coxeter" => groups::affine_coxeter(&p, &mut rec)?,
        "quasiline-dinfty" => groups::quasiline_dinfty(&p, &mut rec)?,
        "cubulable-fw" => complexes::cubulable_fw(&p, &mut rec)?,
        "gamma-rs" => complexes::gamma_rs(&p, &mut rec)?,
        "graph-product" => complexes::graph_product(&p, &mut rec)?,
        "cube-fix" => complexes::cube_fix(&p, &mut rec)?,
        "duality" => duality::duality(&p, &mut rec)?,
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown scenario {name:?}; expected one of {}",
                SCENARIOS.join(", ")
            )))
        }
    }
    let parameters = p.finish()?;
    let verdict = rec
        .checks
        .iter()
        .map(|c| c.verdict)
        .max_by_key(|v| match v {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fail => 2,
        })
        .unwrap_or(Verdict::Pass);
    Ok(ScenarioReport {
        scenario: name.into(),
        parameters,
        checks: rec.checks,
        verdict,
        resources: rec.resources,
    })
}
