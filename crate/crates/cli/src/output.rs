use std::fs;
use std::io::Write;

use serde_json::{Map, Value};

use bidual::Error;

use crate::{Cli, Format, Verdict};

pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    /// Fields merged into the JSON report object.
    pub body: Map<String, Value>,
    pub text: String,
    /// Printed verbatim instead of a report (corpus output on stdout).
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, verdict: Verdict, body: Value, text: String) -> Self {
        let body = match body {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        Report {
            command,
            verdict,
            body,
            text,
            raw: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        m.insert("kind".into(), "report".into());
        m.insert("command".into(), self.command.into());
        m.insert("pass".into(), (self.verdict == Verdict::Pass).into());
        m.insert(
            "verdict".into(),
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Counterexample => "counterexample",
                Verdict::Capped => "capped",
            }
            .into(),
        );
        for (k, v) in &self.body {
            m.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn emit(cli: &Cli, report: &Report) -> Result<(), Error> {
    let text = match (&report.raw, cli.format) {
        (Some(raw), _) => raw.clone(),
        (None, Format::Json) => report.to_json(),
        (None, Format::Text) => {
            let mut t = report.text.clone();
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        }
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Parse(e.to_string())),
    }
}

pub fn indices(m: u64) -> Vec<usize> {
    bidual::mask::to_indices(m)
}

pub fn list(m: u64) -> String {
    format!("{:?}", indices(m))
}
