//! Spectrum ingestion: JSON files, plain-text files and inline lists.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectrum::SystemDims;

/// Raw eigenvalues plus the dimensions, if the source carried them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumInput {
    pub eigenvalues: Vec<f64>,
    pub dims: Option<SystemDims>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumFile {
    eigenvalues: Vec<f64>,
    #[serde(default)]
    dims: Option<SystemDims>,
}

/// Parses `"0.25"`, `"1/6"` or `"-1e-3"`.
fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    let bad = || Error::Parse(format!("not a number: {token:?}"));
    let value = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Whitespace-, comma- or newline-separated numbers; `#` starts a comment.
pub fn parse_plain(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(parse_number)
        .collect()
}

/// Parses file contents: a JSON object `{"eigenvalues": [...], "dims": {...}}`,
/// a JSON array, or plain text.
pub fn parse_spectrum_text(text: &str) -> Result<SpectrumInput> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: SpectrumFile = serde_json::from_str(text)?;
        let dims = file.dims.map(SystemDims::checked).transpose()?;
        return Ok(SpectrumInput { eigenvalues: file.eigenvalues, dims });
    }
    if trimmed.starts_with('[') {
        let eigenvalues: Vec<f64> = serde_json::from_str(text)?;
        return Ok(SpectrumInput { eigenvalues, dims: None });
    }
    Ok(SpectrumInput { eigenvalues: parse_plain(text)?, dims: None })
}

pub fn read_spectrum_file(path: &Path) -> Result<SpectrumInput> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spectrum_text(&text)
}

/// A path to an existing file, or otherwise an inline list such as `"0.1,0.2,0.3,0.4"`.
pub fn parse_spectrum_arg(arg: &str) -> Result<SpectrumInput> {
    let path = Path::new(arg);
    if path.is_file() {
        return read_spectrum_file(path);
    }
    match parse_plain(arg) {
        Ok(eigenvalues) if !eigenvalues.is_empty() => Ok(SpectrumInput { eigenvalues, dims: None }),
        _ if !arg.contains(',') => Err(Error::Io(format!("{arg}: no such file"))),
        Err(e) => Err(e),
        Ok(_) => Err(Error::Parse("empty spectrum".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_object() {
        let input = parse_spectrum_text(r#"{"eigenvalues":[0.1,0.2,0.3,0.4],"dims":{"type":"bipartite","n":2,"m":2}}"#).unwrap();
        assert_eq!(input.eigenvalues, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(input.dims, Some(SystemDims::bipartite(2, 2).unwrap()));
        assert!(parse_spectrum_text(r#"{"eigenvalues":[1.0],"dims":{"type":"bipartite","n":1,"m":2}}"#).is_err());
        assert!(parse_spectrum_text(r#"{"values":[1.0]}"#).is_err());
    }

    #[test]
    fn plain_and_inline() {
        let input = parse_spectrum_text("# werner\n1/6\n1/6\n1/6\n0.5\n").unwrap();
        assert_eq!(input.eigenvalues.len(), 4);
        assert!((input.eigenvalues[0] - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(parse_spectrum_text("[0.5, 0.5]").unwrap().eigenvalues, vec![0.5, 0.5]);
        assert_eq!(parse_spectrum_arg("0.25,0.25,0.5").unwrap().eigenvalues, vec![0.25, 0.25, 0.5]);
        assert!(matches!(parse_spectrum_arg("missing.json"), Err(Error::Io(_))));
        assert!(matches!(parse_spectrum_arg("0.1,abc"), Err(Error::Parse(_))));
    }
}
