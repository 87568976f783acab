use serde::Serialize;
use serde_json::{Map, Value};

use crate::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Refuted,
    Accepted,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass | Status::Refuted => 0,
            Status::Fail | Status::Accepted => 1,
        }
    }

    pub fn pass_if(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// What a command produced. JSON output is `data` with `command` and
/// `status` added; keys come out sorted, so output is byte-stable.
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub data: Map<String, Value>,
    pub lines: Vec<String>,
    /// Extra lines shown with `--verbose`.
    pub detail: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, status: Status) -> Self {
        Report { command, status, data: Map::new(), lines: vec![], detail: vec![] }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.data.insert(key.into(), serde_json::to_value(value).expect("report values serialize"));
        self
    }

    pub fn line(mut self, line: impl Into<String>) -> Self {
        self.lines.push(line.into());
        self
    }

    pub fn render(&self, format: Format, verbose: bool) -> String {
        match format {
            Format::Json => {
                let mut obj = self.data.clone();
                obj.insert("command".into(), Value::String(self.command.into()));
                obj.insert("status".into(), serde_json::to_value(self.status).unwrap());
                serde_json::to_string_pretty(&Value::Object(obj)).unwrap() + "\n"
            }
            Format::Text => {
                let mut out = String::new();
                for l in self.lines.iter().chain(verbose.then_some(&self.detail).into_iter().flatten()) {
                    out.push_str(l);
                    out.push('\n');
                }
                out.push_str(&format!("{}: {}\n", self.command, serde_json::to_value(self.status).unwrap().as_str().unwrap()));
                out
            }
        }
    }
}
