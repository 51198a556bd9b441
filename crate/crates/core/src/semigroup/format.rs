//! Text format for finite semigroups:
//!
//! ```text
//! # comment
//! order 3
//! 0 1 2
//! 1 2 0
//! 2 0 1
//! sigma 0 2 1
//! ```

use std::path::Path;

use super::{Carrier, FiniteSemigroup, Involution};
use crate::error::{Error, Result};

pub fn load_semigroup(path: impl AsRef<Path>) -> Result<(FiniteSemigroup, Option<Involution>)> {
    let text = std::fs::read_to_string(path)?;
    parse_semigroup(&text)
}

fn parse_indices(rest: &str, line: usize) -> Result<Vec<usize>> {
    rest.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("`{tok}` is not an element index"),
            })
        })
        .collect()
}

pub fn parse_semigroup(text: &str) -> Result<(FiniteSemigroup, Option<Involution>)> {
    let mut order: Option<usize> = None;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut sigma: Option<Vec<usize>> = None;
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line, message };
        if order.is_none() {
            let n = content
                .strip_prefix("order")
                .map(str::trim)
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| parse_err("expected `order n` with n > 0".into()))?;
            order = Some(n);
            continue;
        }
        let n = order.unwrap();
        if let Some(rest) = content.strip_prefix("sigma") {
            if rows.len() != n {
                return Err(parse_err(format!("sigma line before all {n} table rows")));
            }
            if sigma.is_some() {
                return Err(parse_err("duplicate sigma line".into()));
            }
            let p = parse_indices(rest, line)?;
            if p.len() != n {
                return Err(parse_err(format!("sigma has {} entries, expected {n}", p.len())));
            }
            sigma = Some(p);
            continue;
        }
        if rows.len() == n {
            return Err(parse_err(format!("unexpected content after {n} rows: `{content}`")));
        }
        let row = parse_indices(content, line)?;
        if row.len() != n {
            return Err(parse_err(format!("row has {} entries, expected {n}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&v| v >= n) {
            return Err(parse_err(format!("entry {bad} is not below the order {n}")));
        }
        rows.push(row);
    }
    let n = order.ok_or(Error::Parse { line: last_line, message: "missing `order` line".into() })?;
    if rows.len() != n {
        return Err(Error::Parse {
            line: last_line,
            message: format!("expected {n} table rows, found {}", rows.len()),
        });
    }
    let s = FiniteSemigroup::checked(rows)?;
    let sigma = match sigma {
        None => None,
        Some(p) => {
            let inv = Involution::Permutation(p);
            let carrier = Carrier::Finite(s.clone());
            if let Some(v) = inv.violations(&carrier)?.into_iter().next() {
                return Err(Error::NotAnInvolution(v));
            }
            Some(inv)
        }
    };
    Ok((s, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_c3_with_inversion() {
        let text = "# cyclic group\norder 3\n0 1 2\n1 2 0\n2 0 1 # last row\nsigma 0 2 1\n";
        let (s, sigma) = parse_semigroup(text).unwrap();
        assert_eq!(s.order(), 3);
        assert_eq!(sigma, Some(Involution::Permutation(vec![0, 2, 1])));
    }

    #[test]
    fn rejects_bad_files() {
        let err = parse_semigroup("order 2\n1 1\n0 0\n").unwrap_err();
        assert!(matches!(err, Error::NotAssociative(..)), "{err}");
        let err = parse_semigroup("order 2\n0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_semigroup("order 2\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        // swapping the identity of C2 is not an automorphism
        let err = parse_semigroup("order 2\n0 1\n1 0\nsigma 1 0\n").unwrap_err();
        assert!(matches!(err, Error::NotAnInvolution(_)), "{err}");
        let err = parse_semigroup("order 2\n0 1\n1 0\nsigma 0 0\n").unwrap_err();
        assert!(matches!(err, Error::NotAnInvolution(_)), "{err}");
    }
}
