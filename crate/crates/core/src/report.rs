//! Structured pass/fail record of one inequality check over a parameter grid.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA: &str = "dgg-kit/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A conditional check failed, so the curvature evidence it relied on is
    /// contradicted.
    CertificateFalsified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub check: String,
    pub params: Map<String, Value>,
    pub grid: Vec<f64>,
    /// One margin per grid point, `rhs - lhs` style: nonnegative means the
    /// inequality held there.
    pub margins: Vec<f64>,
    pub worst: Worst,
    pub pass: bool,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl VerificationReport {
    /// Starts a report; `pass` is decided by [`ReportBuilder::finish`].
    pub fn builder(check: &str) -> ReportBuilder {
        ReportBuilder {
            check: check.to_owned(),
            params: Map::new(),
            grid: Vec::new(),
            margins: Vec::new(),
            notes: Vec::new(),
            details: Value::Null,
            conditional: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn param(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }
}

#[derive(Debug, Clone)]
pub struct ReportBuilder {
    check: String,
    params: Map<String, Value>,
    grid: Vec<f64>,
    margins: Vec<f64>,
    notes: Vec<String>,
    details: Value,
    conditional: bool,
}

impl ReportBuilder {
    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params
            .insert(key.to_owned(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    pub fn point(&mut self, t: f64, margin: f64) {
        self.grid.push(t);
        self.margins.push(margin);
    }

    pub fn points(mut self, grid: Vec<f64>, margins: Vec<f64>) -> Self {
        assert_eq!(grid.len(), margins.len(), "grid and margins are aligned");
        self.grid = grid;
        self.margins = margins;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn push_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// Marks the check as resting on curvature evidence; a failure is then
    /// reported as [`Status::CertificateFalsified`].
    pub fn conditional(mut self) -> Self {
        self.conditional = true;
        self
    }

    pub fn finish(self, pass: bool) -> VerificationReport {
        let worst = self
            .grid
            .iter()
            .zip(&self.margins)
            .fold(None::<Worst>, |acc, (&t, &m)| match acc {
                Some(w) if !(m < w.value) => Some(w),
                _ => Some(Worst { t, value: m }),
            })
            .unwrap_or(Worst { t: f64::NAN, value: f64::NAN });
        let status = match (pass, self.conditional) {
            (true, _) => Status::Pass,
            (false, false) => Status::Fail,
            (false, true) => Status::CertificateFalsified,
        };
        VerificationReport {
            schema: SCHEMA.to_owned(),
            check: self.check,
            params: self.params,
            grid: self.grid,
            margins: self.margins,
            worst,
            pass,
            status,
            notes: self.notes,
            details: self.details,
        }
    }
}
