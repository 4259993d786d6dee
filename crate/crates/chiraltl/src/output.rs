//! Bit-exact output formats: CSV emission with 17 significant digits and the
//! flat key-value run record. Reruns of identical configurations produce
//! byte-identical files.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// 17 significant digits, locale-independent.
pub fn format_g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, content)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Three-column CSV: header plus one row per sample, trailing newline.
pub fn write_csv3(
    path: &Path,
    header: &str,
    col0: &[f64],
    col1: &[f64],
    col2: &[f64],
) -> Result<()> {
    let mut out = String::with_capacity(64 * col0.len());
    out.push_str(header);
    out.push('\n');
    for i in 0..col0.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_g17(col0[i]),
            format_g17(col1[i]),
            format_g17(col2[i])
        );
    }
    write_file(path, &out)
}

/// Four-column CSV.
pub fn write_csv4(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = [f64; 4]>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_g17(r[0]),
            format_g17(r[1]),
            format_g17(r[2]),
            format_g17(r[3])
        );
    }
    write_file(path, &out)
}

/// A value in the flat run record.
#[derive(Debug, Clone)]
pub enum MetaValue {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for MetaValue {
    fn from(v: f64) -> Self {
        MetaValue::Float(v)
    }
}
impl From<i64> for MetaValue {
    fn from(v: i64) -> Self {
        MetaValue::Int(v)
    }
}
impl From<usize> for MetaValue {
    fn from(v: usize) -> Self {
        MetaValue::Int(v as i64)
    }
}
impl From<&str> for MetaValue {
    fn from(v: &str) -> Self {
        MetaValue::Text(v.to_string())
    }
}
impl From<String> for MetaValue {
    fn from(v: String) -> Self {
        MetaValue::Text(v)
    }
}

/// Flat JSON-style run record: one key per line, insertion order preserved.
pub fn write_meta(path: &Path, entries: &[(String, MetaValue)]) -> Result<()> {
    let mut out = String::from("{\n");
    for (i, (k, v)) in entries.iter().enumerate() {
        let comma = if i + 1 == entries.len() { "" } else { "," };
        match v {
            MetaValue::Float(x) => {
                let _ = writeln!(out, "  \"{k}\": {}{comma}", format_g17(*x));
            }
            MetaValue::Int(x) => {
                let _ = writeln!(out, "  \"{k}\": {x}{comma}");
            }
            MetaValue::Text(s) => {
                let _ = writeln!(out, "  \"{k}\": \"{}\"{comma}", s.replace('"', "\\\""));
            }
        }
    }
    out.push_str("}\n");
    write_file(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_g17(0.45), "4.5000000000000001e-1");
        assert_eq!(format_g17(1.0), "1.0000000000000000e0");
        let x = 2.334948666387064e-52;
        let s = format_g17(x);
        assert_eq!(s.parse::<f64>().unwrap(), x, "round trip through text");
    }

    #[test]
    fn csv_ends_with_newline_and_is_reproducible() {
        let dir = std::env::temp_dir().join("chiraltl-output-test");
        let path = dir.join("t.csv");
        let x = [0.0, 1.0, 2.0];
        write_csv3(&path, "a,b,c", &x, &x, &x).unwrap();
        let one = std::fs::read(&path).unwrap();
        write_csv3(&path, "a,b,c", &x, &x, &x).unwrap();
        let two = std::fs::read(&path).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.last(), Some(&b'\n'));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
