//! Report records and their JSON-lines, CSV and text renderings.
//!
//! A run produces a list of records (each a JSON object carrying a `kind`
//! field) followed by one summary object. Object keys are sorted, so equal
//! runs give equal bytes.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};

/// One pass/fail verdict of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The statement whose failure this check would demonstrate.
    pub lemma: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, lemma: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), lemma, pass, detail: detail.into() }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub records: Vec<Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    /// Adds `value` (which must serialize to an object) tagged with `kind`.
    pub fn record(&mut self, kind: &str, value: impl Serialize) {
        let mut v = serde_json::to_value(value).expect("report records serialize");
        match &mut v {
            Value::Object(m) => {
                m.insert("kind".into(), Value::String(kind.into()));
            }
            other => *other = json!({ "kind": kind, "value": other.take() }),
        }
        self.records.push(v);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// The closing summary object.
pub fn summary(command: &str, cfg: &RunConfig, outcome: &Outcome) -> Value {
    let p = &cfg.params;
    json!({
        "kind": "summary",
        "command": command,
        "preset": cfg.preset.name(),
        "seed": cfg.seed,
        "n": cfg.n,
        "params": {
            "lambda": p.lambda(),
            "eta": p.eta(),
            "beta": p.beta(),
            "epsilon": p.epsilon(),
            "tau": p.tau(),
            "paper_valid": p.paper_valid(),
        },
        "checks": outcome.checks,
        "pass": outcome.pass(),
    })
}

pub fn write(format: OutputFormat, w: impl Write, records: &[Value], summary: &Value) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json_lines(w, records, summary),
        OutputFormat::Csv => write_csv(w, records, summary),
        OutputFormat::Text => write_text(w, records, summary),
    }
}

pub fn write_json_lines(mut w: impl Write, records: &[Value], summary: &Value) -> io::Result<()> {
    for r in records.iter().chain([summary]) {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Nested objects and arrays become dotted column names.
fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        _ => {
            out.insert(prefix.to_owned(), cell(v));
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// All rows in one table; `kind` is the first column.
pub fn write_csv(w: impl Write, records: &[Value], summary: &Value) -> io::Result<()> {
    let rows: Vec<BTreeMap<String, String>> = records
        .iter()
        .chain([summary])
        .map(|r| {
            let mut m = BTreeMap::new();
            flatten("", r, &mut m);
            m
        })
        .collect();
    let mut columns: Vec<&str> = vec!["kind"];
    let mut rest: Vec<&str> = rows.iter().flat_map(|r| r.keys().map(String::as_str)).filter(|k| *k != "kind").collect();
    rest.sort_unstable();
    rest.dedup();
    columns.extend(rest);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&columns)?;
    for r in &rows {
        out.write_record(columns.iter().map(|c| r.get(*c).map_or("", String::as_str)))?;
    }
    out.flush()
}

/// Aligned tables, one per run of records of the same kind, then the summary.
pub fn write_text(mut w: impl Write, records: &[Value], summary: &Value) -> io::Result<()> {
    let mut i = 0;
    while i < records.len() {
        let kind = records[i].get("kind").and_then(Value::as_str).unwrap_or("");
        let j = i + records[i..].iter().take_while(|r| r.get("kind").and_then(Value::as_str) == Some(kind)).count();
        let rows: Vec<BTreeMap<String, String>> = records[i..j]
            .iter()
            .map(|r| {
                let mut m = BTreeMap::new();
                flatten("", r, &mut m);
                m.remove("kind");
                m
            })
            .collect();
        let mut columns: Vec<&str> = rows.iter().flat_map(|r| r.keys().map(String::as_str)).collect();
        columns.sort_unstable();
        columns.dedup();
        let widths: Vec<usize> = columns
            .iter()
            .map(|c| rows.iter().map(|r| r.get(*c).map_or(0, String::len)).max().unwrap_or(0).max(c.len()))
            .collect();
        writeln!(w, "# {kind}")?;
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &wd)| format!("{c:<wd$}")).collect();
            padded.join("  ").trim_end().to_owned()
        };
        writeln!(w, "{}", line(columns.clone()))?;
        for r in &rows {
            writeln!(w, "{}", line(columns.iter().map(|c| r.get(*c).map_or("", String::as_str)).collect()))?;
        }
        writeln!(w)?;
        i = j;
    }
    let get = |k: &str| summary.get(k).map(cell).unwrap_or_default();
    writeln!(w, "command  {}", get("command"))?;
    writeln!(w, "preset   {}", get("preset"))?;
    writeln!(w, "seed     {}", get("seed"))?;
    if let Some(params) = summary.get("params").and_then(Value::as_object) {
        let joined: Vec<String> = params.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
        writeln!(w, "params   {}", joined.join(" "))?;
    }
    for c in summary.get("checks").and_then(Value::as_array).into_iter().flatten() {
        let verdict = if c.get("pass") == Some(&Value::Bool(true)) { "PASS" } else { "FAIL" };
        let name = c.get("name").map(cell).unwrap_or_default();
        let detail = c.get("detail").map(cell).unwrap_or_default();
        writeln!(w, "{verdict}     {name}: {detail}")?;
    }
    writeln!(w, "overall  {}", if summary.get("pass") == Some(&Value::Bool(true)) { "PASS" } else { "FAIL" })
}
