// SPDX-License-Identifier: Apache-2.0
//! Parsers for list-valued flags such as `--eps 0.2,0.1,0.05`,
//! `--t-list 1:5:9` or `--orders 2..=6`.

/// A malformed list argument.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ListError {
    #[error("empty list")]
    Empty,
    #[error("`{0}` is not a finite number")]
    BadNumber(String),
    #[error("`{0}` is not a non-negative integer")]
    BadInteger(String),
    #[error("bad range `{0}`")]
    BadRange(String),
    #[error("list expands to more than {0} entries")]
    TooLong(usize),
}

/// Upper bound on the expanded length of any list.
pub const MAX_LIST_LEN: usize = 100_000;

fn items(s: &str) -> impl Iterator<Item = &str> {
    let s = s.trim();
    let s = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(s);
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

fn number(tok: &str) -> Result<f64, ListError> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ListError::BadNumber(tok.to_string()))
}

/// Comma or whitespace separated reals; an item `lo:hi:n` expands to `n`
/// equally spaced values including both ends.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, ListError> {
    let mut out = Vec::new();
    for tok in items(s) {
        let parts: Vec<&str> = tok.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(number(one)?),
            [lo, hi, n] => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                let n: usize = n.parse().map_err(|_| ListError::BadRange(tok.to_string()))?;
                if n == 0 || out.len() + n > MAX_LIST_LEN {
                    return Err(if n == 0 { ListError::BadRange(tok.to_string()) } else { ListError::TooLong(MAX_LIST_LEN) });
                }
                if n == 1 {
                    if lo != hi {
                        return Err(ListError::BadRange(tok.to_string()));
                    }
                    out.push(lo);
                } else {
                    let step = (hi - lo) / (n - 1) as f64;
                    out.extend((0..n).map(|k| if k == n - 1 { hi } else { lo + k as f64 * step }));
                }
            }
            _ => return Err(ListError::BadRange(tok.to_string())),
        }
        if out.len() > MAX_LIST_LEN {
            return Err(ListError::TooLong(MAX_LIST_LEN));
        }
    }
    if out.is_empty() {
        return Err(ListError::Empty);
    }
    Ok(out)
}

fn integer(tok: &str) -> Result<usize, ListError> {
    tok.parse().map_err(|_| ListError::BadInteger(tok.to_string()))
}

/// Comma or whitespace separated integers with `a..b` and `a..=b` ranges.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, ListError> {
    let mut out = Vec::new();
    for tok in items(s) {
        if let Some((a, b)) = tok.split_once("..") {
            let (lo, hi) = match b.strip_prefix('=') {
                Some(b) => (integer(a)?, integer(b)?.checked_add(1).ok_or_else(|| ListError::BadRange(tok.to_string()))?),
                None => (integer(a)?, integer(b)?),
            };
            if lo >= hi {
                return Err(ListError::BadRange(tok.to_string()));
            }
            if out.len() + (hi - lo) > MAX_LIST_LEN {
                return Err(ListError::TooLong(MAX_LIST_LEN));
            }
            out.extend(lo..hi);
        } else {
            out.push(integer(tok)?);
            if out.len() > MAX_LIST_LEN {
                return Err(ListError::TooLong(MAX_LIST_LEN));
            }
        }
    }
    if out.is_empty() {
        return Err(ListError::Empty);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_f64_list("0.2,0.1, 0.05").unwrap(), vec![0.2, 0.1, 0.05]);
        assert_eq!(parse_f64_list("[1 2]").unwrap(), vec![1.0, 2.0]);
        assert_eq!(parse_f64_list("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_f64_list("3:3:1").unwrap(), vec![3.0]);
        assert_eq!(parse_f64_list(""), Err(ListError::Empty));
        assert!(matches!(parse_f64_list("1,nan"), Err(ListError::BadNumber(_))));
        assert!(matches!(parse_f64_list("0:1:0"), Err(ListError::BadRange(_))));
        assert!(matches!(parse_f64_list("0:1"), Err(ListError::BadRange(_))));
        assert!(matches!(parse_f64_list("0:1:1000000"), Err(ListError::TooLong(_))));
    }

    #[test]
    fn integers() {
        assert_eq!(parse_usize_list("2,4,6").unwrap(), vec![2, 4, 6]);
        assert_eq!(parse_usize_list("1..4").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_usize_list("1..=3, 9").unwrap(), vec![1, 2, 3, 9]);
        assert!(matches!(parse_usize_list("-1"), Err(ListError::BadInteger(_))));
        assert!(matches!(parse_usize_list("4..4"), Err(ListError::BadRange(_))));
        assert!(matches!(parse_usize_list("0..=18446744073709551615"), Err(ListError::BadRange(_))));
    }
}
