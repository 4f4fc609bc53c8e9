//! The run report: a versioned JSON document, or a flat CSV table.

use heunrwe::{Error, ErrorKind, Units};
use serde_json::{json, Map, Value};

use crate::args::UnitChoice;

pub const SCHEMA_VERSION: &str = "heunrwe-report/1";

/// JSON Schema for [`Report::to_json`] output.
pub const SCHEMA: &str = include_str!("../schema/report-v1.json");

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: "input",
            exit_code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match e.kind() {
            ErrorKind::Input => ("input", 2),
            ErrorKind::Convergence => ("convergence", 3),
            ErrorKind::Solver => ("solver", 4),
        };
        Self {
            kind,
            exit_code,
            message: e.to_string(),
        }
    }
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub metadata: Map<String, Value>,
    /// Rows for CSV output; also stored under `results.table`.
    pub table: Vec<Map<String, Value>>,
}

#[derive(Debug)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: Map<String, Value>,
    pub units: Option<(UnitChoice, Units)>,
    pub outcome: Result<Outcome, Failure>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(_) => 0,
            Err(f) => f.exit_code,
        }
    }

    pub fn to_json(&self) -> Value {
        let units = match &self.units {
            Some((system, u)) => json!({
                "system": system.to_string(),
                "hbar": u.hbar(),
                "mass": u.mass(),
                "c": u.c(),
                "q0": u.q0(),
                "lambda_bar": u.lambda_bar(),
                "rest_energy": u.rest_energy(),
            }),
            None => Value::Null,
        };
        let mut metadata = Map::new();
        metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let mut inputs = self.inputs.clone();
        let (results, error) = match &self.outcome {
            Ok(o) => {
                inputs.extend(o.inputs.clone());
                metadata.extend(o.metadata.clone());
                let mut results = o.results.clone();
                if !o.table.is_empty() {
                    results.insert(
                        "table".into(),
                        Value::Array(o.table.iter().cloned().map(Value::Object).collect()),
                    );
                }
                (Value::Object(results), Value::Null)
            }
            Err(f) => (
                Value::Null,
                json!({ "kind": f.kind, "exit_code": f.exit_code, "message": f.message }),
            ),
        };
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "inputs": inputs,
            "units": units,
            "results": results,
            "metadata": metadata,
            "error": error,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report is valid JSON");
        s.push('\n');
        s
    }

    /// The result table as CSV. Columns are the sorted union of row keys;
    /// missing and null cells are empty. Errors produce an empty document.
    pub fn render_csv(&self) -> String {
        let Ok(outcome) = &self.outcome else {
            return String::new();
        };
        let mut columns: Vec<&String> = outcome.table.iter().flat_map(|r| r.keys()).collect();
        columns.sort();
        columns.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&columns).expect("in-memory write");
        for row in &outcome.table {
            let cells = columns.iter().map(|c| match row.get(*c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            });
            w.write_record(cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Messages for every schema violation in `report`; empty when it is valid.
pub fn validate(report: &Value) -> Vec<String> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema parses");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    validator
        .iter_errors(report)
        .map(|e| format!("{}: {}", e.instance_path(), e))
        .collect()
}
