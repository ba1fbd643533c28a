//! Report records and their JSON form.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Diagnostic evidence, not a proof; never fails a run.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub deviation: Option<f64>,
    pub bound: Option<f64>,
    /// The module invariant the record exercises.
    pub invariant: String,
    pub detail: String,
}

impl Record {
    pub fn new(
        name: impl Into<String>,
        status: Status,
        invariant: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Record {
            name: name.into(),
            status,
            deviation: None,
            bound: None,
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }

    pub fn check(
        name: impl Into<String>,
        ok: bool,
        invariant: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Self::new(
            name,
            if ok { Status::Pass } else { Status::Fail },
            invariant,
            detail,
        )
    }

    /// Pass iff `deviation ≤ bound`.
    pub fn measured(
        name: impl Into<String>,
        deviation: f64,
        bound: f64,
        invariant: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        let mut r = Self::check(name, deviation <= bound, invariant, detail);
        r.deviation = Some(deviation);
        r.bound = Some(bound);
        r
    }

    pub fn with_numbers(mut self, deviation: f64, bound: f64) -> Self {
        self.deviation = Some(deviation);
        self.bound = Some(bound);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub records: Vec<Record>,
    pub summary: BTreeMap<&'static str, usize>,
    pub timing_ms: u128,
}

impl Report {
    pub fn new(
        command: &str,
        config: BTreeMap<String, String>,
        config_hash: String,
        mut records: Vec<Record>,
        timing_ms: u128,
    ) -> Self {
        records.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = BTreeMap::from([("pass", 0), ("fail", 0), ("heuristic", 0)]);
        for r in &records {
            let key = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Heuristic => "heuristic",
            };
            *summary.get_mut(key).unwrap() += 1;
        }
        Report {
            command: command.to_string(),
            config,
            config_hash,
            records,
            summary,
            timing_ms,
        }
    }

    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes") + "\n"
    }

    /// JSON without the timing field, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("timing_ms");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}
