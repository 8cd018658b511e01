//! Report envelope shared by every JSON output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::Resolved;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a Resolved,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(command: &'a str, config: &'a Resolved, body: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            body,
        }
    }
}

/// Pretty JSON with a trailing newline, to `path` or standard output.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
