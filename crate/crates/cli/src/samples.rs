//! Plain-text sample files: one signal per line, values separated by commas
//! and/or whitespace. Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use cdenoise::Signal;

use crate::CliError;

pub fn parse_samples(text: &str) -> Result<Vec<Signal>, String> {
    let mut out: Vec<Signal> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| tok.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let signal = Signal::new(values).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if let Some(first) = out.first() {
            if first.dim() != signal.dim() {
                return Err(format!(
                    "line {}: dimension {} differs from {}",
                    lineno + 1,
                    signal.dim(),
                    first.dim()
                ));
            }
        }
        out.push(signal);
    }
    if out.is_empty() {
        return Err("no samples found".into());
    }
    Ok(out)
}

pub fn read_samples(path: &Path) -> Result<Vec<Signal>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_samples(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
