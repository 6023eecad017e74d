//! Output documents: versioned JSON or plain text.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub schema_version: u32,
    pub command: String,
    pub result: Value,
}

/// A command's answer, in both renderings.
pub struct Answer {
    pub json: Value,
    pub text: String,
}

impl Answer {
    pub fn new(json: Value, text: impl Into<String>) -> Self {
        Answer { json, text: text.into() }
    }

    pub fn render(&self, command: &str, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let doc = Document {
                    schema_version: SCHEMA_VERSION,
                    command: command.to_string(),
                    result: self.json.clone(),
                };
                serde_json::to_string_pretty(&doc).expect("documents serialize")
            }
        }
    }
}

/// `LINFTY_COLOR=1` turns on ANSI colors in text output.
pub fn color_enabled() -> bool {
    std::env::var("LINFTY_COLOR").is_ok_and(|v| v == "1")
}

pub fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn pass_fail(ok: bool) -> String {
    if ok {
        paint("PASS", "32")
    } else {
        paint("FAIL", "31")
    }
}
