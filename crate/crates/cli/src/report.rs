//! Report documents: an ordered list of fields, written as indented text or
//! as a JSON object with the same field order.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

pub struct Report {
    command: String,
    pub status: Status,
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), status: Status::Pass, fields: Vec::new() }
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.push((key.to_string(), v));
        self
    }

    pub fn fail_unless(&mut self, ok: bool) {
        if !ok {
            self.status = Status::Fail;
        }
    }

    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("status".into(), Value::String(self.status.as_str().into()));
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\nstatus: {}\n", self.command, self.status.as_str()));
        for (k, v) in &self.fields {
            render(&mut out, k, v, 0);
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).expect("scalar")).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                render(out, k, x, indent + 1);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                render(out, &format!("- {i}"), x, indent + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_keep_field_order() {
        let mut r = Report::new("demo");
        r.set("zeta", 1).set("alpha", vec!["a", "b"]).set("nested", serde_json::json!({"y": 2, "x": [[1, 2]]}));
        r.fail_unless(false);
        assert_eq!(
            r.to_text(),
            "command: demo\nstatus: fail\nzeta: 1\nalpha: [a, b]\nnested:\n  y: 2\n  x:\n    - 0: [1, 2]\n"
        );
        let j = r.to_json();
        assert!(j.find("zeta").unwrap() < j.find("alpha").unwrap());
    }
}
