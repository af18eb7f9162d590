//! Input strings and output distance arrays.
//!
//! A string file holds `n U` on the first line and the `n` symbols on the
//! second, whitespace separated. `U` need not be a power of two; it is
//! rounded up for the engines, after checking every symbol is below it.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use lpdist_core::IntString;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

/// A parsed string file: the declared universe and the string itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringFile {
    pub universe: u64,
    pub string: IntString,
}

impl StringFile {
    pub fn new(symbols: Vec<u64>, universe: u64) -> Result<Self> {
        if universe < 2 {
            return Err(CliError::usage(format!("U must be at least 2, got {universe}")));
        }
        let bits = 64 - (universe - 1).leading_zeros();
        if let Some(s) = symbols.iter().find(|&&s| s >= universe) {
            return Err(CliError::usage(format!("symbol {s} is outside [0, {universe})")));
        }
        Ok(Self {
            universe,
            string: IntString::new(symbols, bits)?,
        })
    }
}

pub fn parse_string(text: &str, path: &Path) -> Result<StringFile> {
    let err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut fields = header.split_whitespace();
    let mut number = |name: &str| -> Result<u64> {
        let field = fields.next().ok_or_else(|| err(1, format!("missing {name}")))?;
        field
            .parse()
            .map_err(|_| err(1, format!("{name} is not a non-negative integer: {field:?}")))
    };
    let n = number("n")? as usize;
    let universe = number("U")?;
    if fields.next().is_some() {
        return Err(err(1, "expected exactly `n U`".into()));
    }
    let body = lines.next().unwrap_or("");
    let symbols = body
        .split_whitespace()
        .map(|s| s.parse::<u64>().map_err(|_| err(2, format!("not a symbol: {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if symbols.len() != n {
        return Err(err(2, format!("expected {n} symbols, found {}", symbols.len())));
    }
    if let Some(extra) = lines.position(|l| !l.trim().is_empty()) {
        return Err(err(3 + extra, "unexpected content after the symbol line".into()));
    }
    StringFile::new(symbols, universe).map_err(|e| match e {
        CliError::Usage(message) => err(2, message),
        other => other,
    })
}

pub fn read_string(path: &Path) -> Result<StringFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_string(&text, path)
}

pub fn render_string(file: &StringFile) -> String {
    let mut out = format!("{} {}\n", file.string.len(), file.universe);
    for (i, s) in file.string.symbols().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{s}").unwrap();
    }
    out.push('\n');
    out
}

pub fn write_string(path: &Path, file: &StringFile) -> Result<()> {
    fs::write(path, render_string(file)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `x` with 17 significant digits, which round-trips every `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Serializes as a JSON number with 17 significant digits (`null` if not finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float17(pub f64);

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format_float(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

pub fn floats(values: &[f64]) -> Vec<Float17> {
    values.iter().copied().map(Float17).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

pub fn render_csv(values: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{}", format_float(*v)).unwrap();
    }
    out
}

/// Writes to `path`, or stdout when it is `None` or `-`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let path = Path::new("t.txt");
        let file = parse_string("5 10\n0 9 3 3 1\n", path).unwrap();
        assert_eq!(file.universe, 10);
        assert_eq!(file.string.bits(), 4);
        assert_eq!(render_string(&file), "5 10\n0 9 3 3 1\n");
        assert_eq!(parse_string(&render_string(&file), path).unwrap(), file);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let path = Path::new("t.txt");
        let cases = [
            "",
            "3\n1 2 3\n",
            "2 4\n1 2 3\n",
            "2 4\n1 x\n",
            "2 4\n1 4\n",
            "2 4\n1 2\n7\n",
            "2 1\n0 0\n",
        ];
        for case in cases {
            assert!(
                matches!(parse_string(case, path), Err(CliError::Parse { .. })),
                "{case:?}"
            );
        }
    }

    #[test]
    fn floats_keep_17_digits() {
        let x = 0.1 + 0.2;
        let s = format_float(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        let json = serde_json::to_string(&floats(&[x, 1.0, f64::NAN])).unwrap();
        assert_eq!(json, format!("[{s},1.0000000000000000e0,null]"));
        let back: Vec<Option<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], Some(x));
    }
}
