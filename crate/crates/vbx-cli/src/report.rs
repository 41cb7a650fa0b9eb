//! Report assembly and rendering.

use serde_json::{json, Map, Value};
use vbx_expr::{render, Certainty, Expr, ZeroVerdict};

/// Run settings embedded in every report.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
    pub json: bool,
}

/// Accumulates the body of a report together with the overall verdict.
#[derive(Debug)]
pub struct Report {
    command: &'static str,
    input: String,
    body: Map<String, Value>,
    certainty: Certainty,
    pass: bool,
}

impl Report {
    pub fn new(command: &'static str, input: &str) -> Self {
        Report {
            command,
            input: input.to_string(),
            body: Map::new(),
            certainty: Certainty::Exact,
            pass: true,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.body.insert(key.to_string(), v.into());
    }

    pub fn fail(&mut self) {
        self.pass = false;
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn note_certainty(&mut self, c: Certainty) {
        self.certainty = self.certainty.and(c);
    }

    /// Record a verdict that must hold and return its JSON description.
    pub fn verdict(&mut self, v: &ZeroVerdict) -> Value {
        self.note_certainty(v.certainty());
        if !v.holds() {
            self.pass = false;
        }
        verdict_value(v)
    }

    pub fn to_value(&self, s: &Settings) -> Value {
        let mut out = Map::new();
        out.insert("tool".into(), json!("vbx"));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("command".into(), json!(self.command));
        out.insert("input".into(), json!(self.input));
        out.insert("seed".into(), json!(s.seed));
        out.insert("tolerance".into(), json!(s.tol));
        out.insert("samples".into(), json!(s.samples));
        out.insert("certainty".into(), json!(self.certainty.as_str()));
        out.insert("pass".into(), json!(self.pass));
        for (k, v) in &self.body {
            out.insert(k.clone(), v.clone());
        }
        Value::Object(out)
    }

    pub fn render(&self, s: &Settings) -> String {
        if s.json {
            return serde_json::to_string_pretty(&self.to_value(s)).expect("JSON value") + "\n";
        }
        let mut out = format!(
            "vbx {} {} {}: {} ({})\nseed {}  tolerance {:e}  samples {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.input,
            if self.pass { "PASS" } else { "FAIL" },
            self.certainty.as_str(),
            s.seed,
            s.tol,
            s.samples,
        );
        for (k, v) in &self.body {
            text_lines(k, v, &mut out);
        }
        out
    }
}

fn text_lines(key: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                text_lines(&format!("{key}.{k}"), x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                text_lines(&format!("{key}[{i}]"), x, out);
            }
        }
        Value::Array(a) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push_str(&format!("  {key}: [{}]\n", parts.join(", ")));
        }
        other => out.push_str(&format!("  {key}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn verdict_value(v: &ZeroVerdict) -> Value {
    let mut out = json!({"verdict": v.label(), "certainty": v.certainty().as_str()});
    match v {
        ZeroVerdict::ProbablyZero { samples, tol } => {
            out["samples"] = json!(samples);
            out["tol"] = json!(tol);
        }
        ZeroVerdict::NonZero { witness: Some(w) } => {
            let point: Map<String, Value> = w
                .point
                .iter()
                .map(|(c, x)| (c.to_string(), json!(x)))
                .collect();
            out["witness"] = json!({"point": point, "value": w.value});
        }
        _ => {}
    }
    out
}

pub fn expr(e: &Expr) -> Value {
    json!(render(e))
}
