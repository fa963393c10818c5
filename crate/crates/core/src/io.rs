//! Matrix text format.
//!
//! First line: `fp <p> <rows> <cols>` or `sign <rows> <cols>`, then `rows`
//! lines of space-separated entries (residues, or `1`/`-1`). Whitespace
//! tolerant; the trailing newline is optional.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::matrix::{FpMatrix, SignMatrix};

/// Either of the two matrix kinds the text format can carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixData {
    Fp(FpMatrix),
    Sign(SignMatrix),
}

impl MatrixData {
    pub fn rows(&self) -> usize {
        match self {
            MatrixData::Fp(m) => m.rows(),
            MatrixData::Sign(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixData::Fp(m) => m.cols(),
            MatrixData::Sign(m) => m.cols(),
        }
    }
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::InvalidParameter(format!("bad {what}: {tok:?}")))
}

/// Parse a matrix from text.
pub fn parse_matrix(text: &str) -> Result<MatrixData> {
    let mut tokens = text.split_whitespace();
    let kind = tokens
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty matrix file".into()))?;
    match kind {
        "fp" => {
            let p = parse_usize(tokens.next().unwrap_or(""), "modulus")? as u64;
            let rows = parse_usize(tokens.next().unwrap_or(""), "row count")?;
            let cols = parse_usize(tokens.next().unwrap_or(""), "column count")?;
            let mut entries = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                let tok = tokens
                    .next()
                    .ok_or_else(|| Error::InvalidParameter("matrix file ends early".into()))?;
                entries.push(parse_usize(tok, "entry")? as u8);
            }
            if tokens.next().is_some() {
                return Err(Error::InvalidParameter(
                    "trailing tokens after matrix entries".into(),
                ));
            }
            Ok(MatrixData::Fp(FpMatrix::from_entries(
                rows, cols, p, entries,
            )?))
        }
        "sign" => {
            let rows = parse_usize(tokens.next().unwrap_or(""), "row count")?;
            let cols = parse_usize(tokens.next().unwrap_or(""), "column count")?;
            let mut entries = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                match tokens.next() {
                    Some("1") | Some("+1") => entries.push(1i8),
                    Some("-1") => entries.push(-1),
                    Some(t) => {
                        return Err(Error::InvalidParameter(format!("bad sign entry {t:?}")))
                    }
                    None => return Err(Error::InvalidParameter("matrix file ends early".into())),
                }
            }
            if tokens.next().is_some() {
                return Err(Error::InvalidParameter(
                    "trailing tokens after matrix entries".into(),
                ));
            }
            Ok(MatrixData::Sign(SignMatrix::from_fn(rows, cols, |i, j| {
                entries[i * cols + j]
            })))
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown matrix kind {other:?} (expected fp or sign)"
        ))),
    }
}

pub fn read_matrix(reader: impl BufRead) -> Result<MatrixData> {
    let mut text = String::new();
    let mut r = reader;
    r.read_to_string(&mut text)
        .map_err(|e| Error::InvalidParameter(format!("read error: {e}")))?;
    parse_matrix(&text)
}

pub fn format_matrix(m: &MatrixData) -> String {
    let mut out = String::new();
    match m {
        MatrixData::Fp(m) => {
            out.push_str(&format!("fp {} {} {}\n", m.modulus(), m.rows(), m.cols()));
            for i in 0..m.rows() {
                let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        MatrixData::Sign(m) => {
            out.push_str(&format!("sign {} {}\n", m.rows(), m.cols()));
            for i in 0..m.rows() {
                let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_matrix(mut writer: impl Write, m: &MatrixData) -> Result<()> {
    writer
        .write_all(format_matrix(m).as_bytes())
        .map_err(|e| Error::InvalidParameter(format!("write error: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_fp() {
        let m = FpMatrix::from_entries(2, 3, 5, vec![0, 1, 2, 3, 4, 0]).unwrap();
        let text = format_matrix(&MatrixData::Fp(m.clone()));
        assert_eq!(text, "fp 5 2 3\n0 1 2\n3 4 0\n");
        assert_eq!(parse_matrix(&text).unwrap(), MatrixData::Fp(m));
    }

    #[test]
    fn roundtrip_sign_and_whitespace_tolerance() {
        let m = crate::matrix::hadamard_base();
        let text = format_matrix(&MatrixData::Sign(m.clone()));
        assert_eq!(text, "sign 2 2\n1 1\n1 -1\n");
        // extra whitespace, no trailing newline
        let messy = "sign  2 2\n\n  1\t1\n1   -1";
        assert_eq!(parse_matrix(messy).unwrap(), MatrixData::Sign(m));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("dense 2 2 1 1 1 1").is_err());
        assert!(parse_matrix("sign 2 2 1 1 1").is_err());
        assert!(parse_matrix("sign 2 2 1 1 1 2").is_err());
        assert!(parse_matrix("fp 4 1 1 0").is_err(), "non-prime modulus");
        assert!(parse_matrix("fp 3 1 1 5").is_err(), "entry out of range");
        assert!(parse_matrix("sign 1 1 1 1").is_err(), "trailing tokens");
    }
}
