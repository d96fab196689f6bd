//! Report container shared by all subcommands: a config echo, flat rows for
//! CSV, named pass/fail summary checks, and deterministic serializers.
//!
//! Determinism contract: identical config produces byte-identical CSV and
//! JSON. All numeric formatting goes through the shortest-round-trip float
//! formatter, JSON object keys are emitted in sorted order, and rows are
//! produced in a fixed iteration order.

use serde::Serialize;
use serde_json::{json, Value};

/// One named invariant check with its measured value.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryCheck {
    /// Names the module invariant the check instantiates.
    pub invariant: String,
    pub pass: bool,
    pub measured: f64,
}

impl SummaryCheck {
    pub fn new(invariant: impl Into<String>, pass: bool, measured: f64) -> Self {
        SummaryCheck {
            invariant: invariant.into(),
            pass,
            measured,
        }
    }
}

/// Full result of one subcommand run.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub command: String,
    /// Echo of every effective parameter, including the seed.
    pub config: Value,
    pub columns: Vec<String>,
    /// Row values are preformatted strings aligned with `columns`.
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<SummaryCheck>,
    /// Command-specific extra block (e.g. a probe verdict); `Null` when
    /// absent.
    pub extra: Value,
}

impl ExperimentReport {
    pub fn new<C: Into<String>>(
        command: impl Into<String>,
        config: Value,
        columns: impl IntoIterator<Item = C>,
    ) -> Self {
        ExperimentReport {
            command: command.into(),
            config,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            extra: Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.iter().all(|c| c.pass)
    }

    /// Rows as CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn rows_as_objects(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    fn header_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "summary": self.summary,
            "extra": self.extra,
        })
    }

    /// Complete report (config echo, rows, summary) as pretty JSON.
    pub fn to_json(&self) -> String {
        let mut v = self.header_json();
        v.as_object_mut()
            .expect("header is an object")
            .insert("rows".into(), self.rows_as_objects());
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    /// Config echo plus summary (no rows) as pretty JSON; the companion of a
    /// CSV row file.
    pub fn to_summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.header_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable scoreboard for stdout.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for c in &self.summary {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {} (measured {})\n", c.invariant, c.measured));
        }
        out
    }
}

/// Shortest-round-trip decimal form of a float, shared by every row builder.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
