//! Matrix sources for the CLI: named family tokens (h3, m4) or file paths
//! in the matrix text format.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use num::BigRational;

use matrig_core::io::MatrixData;
use matrig_core::matrix::{distance_matrix, walsh_hadamard, SignMatrix};

/// Resolve a base token: `h<k>` is the k-th Walsh-Hadamard matrix,
/// `m<k>` the k-th distance matrix, anything else a file path.
pub fn resolve_matrix(token: &str) -> Result<MatrixData> {
    if let Some(rest) = token.strip_prefix('h') {
        if let Ok(k) = rest.parse::<usize>() {
            return Ok(MatrixData::Sign(walsh_hadamard(k)?));
        }
    }
    if let Some(rest) = token.strip_prefix('m') {
        if let Ok(k) = rest.parse::<usize>() {
            return Ok(MatrixData::Sign(distance_matrix(k)?));
        }
    }
    let path = Path::new(token);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {token}"))?;
    Ok(matrig_core::io::parse_matrix(&text)?)
}

/// A sign matrix, whatever the source kind: fp inputs are Booleanized.
pub fn as_sign(data: MatrixData) -> SignMatrix {
    match data {
        MatrixData::Sign(s) => s,
        MatrixData::Fp(m) => matrig_core::matrix::booleanize(&m),
    }
}

/// Exact rational parser accepting `a/b`, integers, and finite decimals.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    use num::BigInt;
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad numerator {n:?}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad denominator {d:?}"))?;
        if d == BigInt::from(0) {
            return Err(anyhow!("zero denominator in {text:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits
            .parse()
            .map_err(|_| anyhow!("bad decimal {text:?}"))?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = text.parse().map_err(|_| anyhow!("bad rational {text:?}"))?;
    Ok(BigRational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_resolve() {
        let h3 = resolve_matrix("h3").unwrap();
        assert_eq!(h3.rows(), 8);
        let m2 = resolve_matrix("m2").unwrap();
        assert_eq!(m2.rows(), 4);
        assert!(resolve_matrix("no-such-file.mat").is_err());
    }

    #[test]
    fn rationals_parse_exactly() {
        use num::BigInt;
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(parse_rational("1/8").unwrap(), r(1, 8));
        assert_eq!(parse_rational("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("-0.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
