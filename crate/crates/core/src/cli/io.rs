//! Matrix files: JSON `{"rows", "cols", "data"}` or whitespace-separated
//! plain text, one matrix row per line.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::matcore::{format_rational, rational_to_f64, Matrix, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    PlainText,
}

/// A matrix read from disk. Entries are kept exactly; floating entries are
/// derived by rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub format: Format,
    pub exact: Matrix<Rational>,
    /// Whether any entry was written as a `p/q` string.
    pub has_rational_strings: bool,
}

impl MatrixFile {
    pub fn float(&self) -> Matrix<f64> {
        self.exact.map(rational_to_f64)
    }

    /// SHA-256 over a canonical rendering, independent of file format.
    pub fn digest(&self) -> String {
        canonical_digest(&self.exact)
    }
}

/// Parse failure with a 1-based position when one is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

fn error(message: impl Into<String>, line: Option<usize>, column: Option<usize>) -> ParseError {
    ParseError {
        message: message.into(),
        line,
        column,
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer = BigInt::from_str(&format!("{int_part}{frac_part}")).ok()?;
    let shift = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    // Far beyond anything a state matrix needs; also bounds memory.
    if shift.unsigned_abs() > 4096 {
        return None;
    }
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    let value = if shift >= 0 {
        Rational::from_integer(numer * scale)
    } else {
        Rational::new(numer, scale)
    };
    Some(if negative { -value } else { value })
}

/// A decimal or a `p/q` rational.
fn parse_entry(token: &str) -> Result<(Rational, bool), String> {
    if token.contains('/') {
        let q = Rational::from_str(token).map_err(|_| format!("invalid rational '{token}'"))?;
        return Ok((q, true));
    }
    parse_decimal(token)
        .map(|q| (q, false))
        .ok_or_else(|| format!("invalid number '{token}'"))
}

pub fn parse_str(text: &str) -> Result<MatrixFile, ParseError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_plain(text)
    }
}

fn parse_json(text: &str) -> Result<MatrixFile, ParseError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| error(e.to_string(), Some(e.line()), Some(e.column())))?;
    let obj = value
        .as_object()
        .ok_or_else(|| error("expected a JSON object", None, None))?;
    let dim = |key: &str| -> Result<usize, ParseError> {
        obj.get(key)
            .and_then(Value::as_u64)
            .and_then(|v| usize::try_from(v).ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| error(format!("'{key}' must be a positive integer"), None, None))
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| error("'data' must be an array", None, None))?;
    if data.len() != rows * cols {
        return Err(error(
            format!("'data' has {} entries, expected {}", data.len(), rows * cols),
            None,
            None,
        ));
    }
    let mut entries = Vec::with_capacity(data.len());
    let mut has_rational_strings = false;
    for (k, v) in data.iter().enumerate() {
        let parsed = match v {
            Value::Number(n) => parse_entry(&n.to_string()),
            Value::String(s) => parse_entry(s.trim()).map(|(q, _)| (q, true)),
            _ => Err("entries must be numbers or rational strings".to_string()),
        };
        let (q, rational) = parsed
            .map_err(|m| error(format!("data[{k}] (row {}, column {}): {m}", k / cols + 1, k % cols + 1), None, None))?;
        has_rational_strings |= rational;
        entries.push(q);
    }
    Ok(MatrixFile {
        format: Format::Json,
        exact: Matrix::new(rows, cols, entries).expect("length checked"),
        has_rational_strings,
    })
}

fn parse_plain(text: &str) -> Result<MatrixFile, ParseError> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut has_rational_strings = false;
    for (l, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut row = Vec::new();
        let mut offset = 0;
        for token in content.split_whitespace() {
            let start = offset + content[offset..].find(token).expect("token comes from this line");
            offset = start + token.len();
            let column = content[..start].chars().count() + 1;
            let (q, rational) = parse_entry(token).map_err(|m| error(m, Some(l + 1), Some(column)))?;
            has_rational_strings |= rational;
            row.push(q);
        }
        if row.is_empty() {
            continue;
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(error(
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                    Some(l + 1),
                    None,
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(error("no matrix entries found", None, None));
    }
    Ok(MatrixFile {
        format: Format::PlainText,
        exact: Matrix::from_rows(rows).expect("row lengths checked"),
        has_rational_strings,
    })
}

pub fn read_matrix(path: &std::path::Path) -> Result<MatrixFile, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| error(format!("cannot read {}: {e}", path.display()), None, None))?;
    parse_str(&text)
}

fn canonical_digest(m: &Matrix<Rational>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{} {}\n", m.rows(), m.cols()));
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        hasher.update(row.join(" "));
        hasher.update("\n");
    }
    hex::encode(hasher.finalize())
}

/// JSON number for an `f64`; non-finite values become `null`.
pub fn f64_json(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Exact entries are written as strings (integers without a denominator),
/// so reading the file back selects the exact backend.
pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn matrix_json(rows: usize, cols: usize, data: Vec<Value>) -> Value {
    let mut obj = Map::new();
    obj.insert("rows".into(), rows.into());
    obj.insert("cols".into(), cols.into());
    obj.insert("data".into(), Value::Array(data));
    Value::Object(obj)
}

pub fn exact_matrix_json(m: &Matrix<Rational>) -> Value {
    matrix_json(m.rows(), m.cols(), m.data().iter().map(rational_json).collect())
}

pub fn float_matrix_json(m: &Matrix<f64>) -> Value {
    matrix_json(m.rows(), m.cols(), m.data().iter().map(|&x| f64_json(x)).collect())
}
