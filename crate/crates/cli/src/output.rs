use std::io::Write;
use std::path::Path;

use crate::{CliError, SuiteOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

/// Report text in the requested format.
pub fn render(out: &SuiteOutput, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::JsonLines => {
            for row in &out.rows {
                s.push_str(row);
                s.push('\n');
            }
        }
        Format::Csv => {
            for row in out.csv.as_deref().unwrap_or_default() {
                s.push_str(row);
                s.push('\n');
            }
        }
    }
    s
}

pub fn write(out: &SuiteOutput, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(out, format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}
