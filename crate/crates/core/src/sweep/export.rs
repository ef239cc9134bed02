//! CSV and JSON writers for sweep tables.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::scenario::{SweepRow, SweepTable, CSV_HEADER};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(|e| e.parse().ok())
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_line(r: &SweepRow) -> String {
    let nums = [
        r.s,
        r.phi,
        r.delta1,
        r.delta2,
        r.r1,
        r.ratio,
        r.lambda_t,
        r.tau,
        r.c1_abs,
        r.c2_abs,
        r.concurrence,
        r.classical,
        r.discord,
        r.mutual_info,
    ];
    let mut line = r.method.clone();
    for v in nums {
        line.push(',');
        line.push_str(&format_g12(v));
    }
    line.push(',');
    line.push_str(r.regime_flag.label());
    line
}

pub fn write_csv<W: Write>(table: &SweepTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(out, "{}", csv_line(r))?;
    }
    out.flush()
}

pub fn to_csv_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn to_json_string(table: &SweepTable) -> String {
    serde_json::to_string_pretty(table).expect("rows are serializable")
}

pub fn from_json_str(s: &str) -> serde_json::Result<SweepTable> {
    serde_json::from_str(s)
}

pub fn write_table(table: &SweepTable, path: &Path, format: Format) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let text = match format {
        Format::Csv => to_csv_string(table),
        Format::Json => to_json_string(table),
    };
    fs::write(path, text).map_err(io)
}

pub fn read_json(path: &Path) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    from_json_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}
