//! Verification records and the report written by `verify`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const CHECKED: &str = "checked";
pub const SKIPPED: &str = "skipped: hypothesis";

/// Parameters of one instance, keyed by name.
pub type Params = BTreeMap<String, Value>;

/// Builds a parameter map from (name, value) pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut p = $crate::report::Params::new();
        $( p.insert(($k).to_string(), serde_json::json!($v)); )*
        p
    }};
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub family: String,
    pub params: Params,
    pub status: String,
    pub predicted: Value,
    pub observed: Value,
    /// None for skipped records.
    pub agree: Option<bool>,
    /// For m-set records: the first failing conjunct of each m predicted false.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failed_conjunct: BTreeMap<u64, String>,
    /// Exceptional points of each observed m, when there are any.
    #[serde(default)]
    pub exceptional_set: BTreeMap<u64, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall time in microseconds; the only field allowed to differ between runs.
    pub elapsed_us: u64,
}

impl Record {
    /// A checked record; agree is predicted == observed.
    pub fn checked(
        family: &str,
        params: Params,
        predicted: impl Serialize,
        observed: impl Serialize,
    ) -> Record {
        let predicted = serde_json::to_value(predicted).expect("serializable");
        let observed = serde_json::to_value(observed).expect("serializable");
        Record {
            family: family.to_string(),
            params,
            status: CHECKED.to_string(),
            agree: Some(predicted == observed),
            predicted,
            observed,
            failed_conjunct: BTreeMap::new(),
            exceptional_set: BTreeMap::new(),
            note: None,
            elapsed_us: 0,
        }
    }

    pub fn skipped(family: &str, params: Params, reason: impl Into<String>) -> Record {
        Record {
            family: family.to_string(),
            params,
            status: SKIPPED.to_string(),
            predicted: Value::Null,
            observed: Value::Null,
            agree: None,
            failed_conjunct: BTreeMap::new(),
            exceptional_set: BTreeMap::new(),
            note: Some(reason.into()),
            elapsed_us: 0,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Record {
        self.note = Some(note.into());
        self
    }

    /// Marks a checked record as a disagreement when a secondary comparison fails.
    pub fn require(mut self, ok: bool, what: impl Into<String>) -> Record {
        if !ok && self.agree.is_some() {
            self.agree = Some(false);
            self.note = Some(what.into());
        }
        self
    }

    pub fn timed(mut self, start: Instant) -> Record {
        self.elapsed_us = start.elapsed().as_micros() as u64;
        self
    }

    pub fn is_disagreement(&self) -> bool {
        self.agree == Some(false)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub family: String,
    pub seed: u64,
    pub summary: Summary,
    pub records: Vec<Record>,
}

fn cmp_value(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_u64(), y.as_u64()) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => x.to_string().cmp(&y.to_string()),
        },
        (Value::String(x), Value::String(y)) => x.cmp(y),
        _ => a.to_string().cmp(&b.to_string()),
    }
}

/// Canonical record order: family, then parameters by key, values numerically where possible.
fn cmp_records(a: &Record, b: &Record) -> Ordering {
    a.family
        .cmp(&b.family)
        .then_with(|| {
            let mut ia = a.params.iter();
            let mut ib = b.params.iter();
            loop {
                match (ia.next(), ib.next()) {
                    (None, None) => break Ordering::Equal,
                    (None, Some(_)) => break Ordering::Less,
                    (Some(_), None) => break Ordering::Greater,
                    (Some((ka, va)), Some((kb, vb))) => {
                        let o = ka.cmp(kb).then_with(|| cmp_value(va, vb));
                        if o != Ordering::Equal {
                            break o;
                        }
                    }
                }
            }
        })
        .then_with(|| a.predicted.to_string().cmp(&b.predicted.to_string()))
        .then_with(|| a.observed.to_string().cmp(&b.observed.to_string()))
}

impl Report {
    pub fn new(family: &str, seed: u64, mut records: Vec<Record>) -> Report {
        records.sort_by(cmp_records);
        let mut summary = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for r in &records {
            match r.agree {
                Some(true) => summary.agreements += 1,
                Some(false) => summary.disagreements += 1,
                None => summary.skipped += 1,
            }
        }
        Report {
            family: family.to_string(),
            seed,
            summary,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record([
            "family",
            "params",
            "status",
            "predicted",
            "observed",
            "agree",
            "elapsed_us",
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.records {
            let agree = r.agree.map_or(String::new(), |a| a.to_string());
            w.write_record([
                r.family.clone(),
                serde_json::to_string(&r.params).expect("serializable"),
                r.status.clone(),
                r.predicted.to_string(),
                r.observed.to_string(),
                agree,
                r.elapsed_us.to_string(),
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.is_disagreement())
    }
}

/// Parses a report and zeroes every elapsed field, for run-to-run comparison.
pub fn without_elapsed(json: &str) -> Result<Value, CliError> {
    let mut v: Value =
        serde_json::from_str(json).map_err(|e| CliError::Usage(format!("not a report: {e}")))?;
    fn scrub(v: &mut Value) {
        match v {
            Value::Object(map) => {
                if map.contains_key("elapsed_us") {
                    map.insert("elapsed_us".into(), Value::from(0));
                }
                map.values_mut().for_each(scrub);
            }
            Value::Array(items) => items.iter_mut().for_each(scrub),
            _ => {}
        }
    }
    scrub(&mut v);
    Ok(v)
}
