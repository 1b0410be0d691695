//! The fixed table of residue-field moduli (Conway polynomials).

use super::ArithError;

const TABLE: &str = include_str!("../../data/moduli.tsv");

/// Parsed rows of `moduli.tsv`: `(p, n, coefficients constant-first)`.
pub fn table() -> Result<Vec<(u64, usize, Vec<u64>)>, ArithError> {
    let mut rows = Vec::new();
    for (lineno, line) in TABLE.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || ArithError::ModuliTable { line: lineno + 1 };
        let mut cols = line.split('\t');
        let p: u64 = cols.next().and_then(|c| c.trim().parse().ok()).ok_or_else(bad)?;
        let n: usize = cols.next().and_then(|c| c.trim().parse().ok()).ok_or_else(bad)?;
        let coeffs: Vec<u64> = cols
            .next()
            .ok_or_else(bad)?
            .split_whitespace()
            .map(|c| c.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if coeffs.len() != n + 1 || coeffs[n] != 1 {
            return Err(bad());
        }
        rows.push((p, n, coeffs));
    }
    Ok(rows)
}

pub fn lookup(p: u64, n: usize) -> Result<Vec<u64>, ArithError> {
    table()?
        .into_iter()
        .find(|(q, m, _)| *q == p && *m == n)
        .map(|(_, _, c)| c)
        .ok_or(ArithError::UnsupportedField { p, n })
}
