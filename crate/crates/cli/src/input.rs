//! Element inputs: named-invariant shorthands and plain expressions.

use std::sync::Arc;

use modinv::{BracketSpec, Element, Error, FieldConfig, GeneratorTable, Invariants, Result};

/// A parsed input together with the rank it lives in.
pub struct Input {
    pub n: usize,
    pub element: Element,
}

fn int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{what}: expected an integer, got {s:?}")))
}

pub fn int_list(s: &str) -> Result<Vec<u32>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| int(v, "list entry")).collect()
}

/// Largest `i` among generator names `x<i>` / `y<i>` in `text`.
fn infer_rank(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let boundary = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
        if (c == b'x' || c == b'y') && boundary {
            let start = i + 1;
            let mut j = start;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > start {
                if let Ok(v) = text[start..j].parse::<usize>() {
                    best = best.max(v);
                }
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    best
}

/// Parses `dickson:n:s`, `mui:n:s1,s2`, `bracket:n:k:e1,..`, `L:n`, `V:n`, or an
/// expression in `x_i, y_i` over rank `n` (inferred from the names when not
/// given).
pub fn parse_input(field: FieldConfig, text: &str, n: Option<usize>) -> Result<Input> {
    let parts: Vec<&str> = text.split(':').collect();
    let named = |rank: &str| -> Result<(usize, Invariants)> {
        let r: usize = int(rank, "rank")?;
        if let Some(n) = n {
            if n != r {
                return Err(Error::InvalidInput(format!(
                    "input has rank {r} but --n is {n}"
                )));
            }
        }
        Ok((r, Invariants::new(field, r)?))
    };
    match parts.as_slice() {
        ["dickson", r, s] => {
            let (r, inv) = named(r)?;
            return Ok(Input { n: r, element: inv.q(r, int(s, "s")?)? });
        }
        ["mui", r, s] => {
            let (r, inv) = named(r)?;
            return Ok(Input { n: r, element: inv.mui(&int_list(s)?)? });
        }
        ["bracket", r, k, e] => {
            let (r, inv) = named(r)?;
            let spec = BracketSpec::new(r, int(k, "k")?, int_list(e)?)?;
            return Ok(Input { n: r, element: inv.bracket(&spec)? });
        }
        ["L", r] => {
            let (r, inv) = named(r)?;
            return Ok(Input { n: r, element: inv.l_top(r) });
        }
        ["V", r] => {
            let (r, inv) = named(r)?;
            return Ok(Input { n: r, element: inv.v(r)? });
        }
        [_single] => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown input shorthand {text:?}"
            )))
        }
    }
    let rank = n.unwrap_or_else(|| infer_rank(text)).max(1);
    let table: Arc<GeneratorTable> = GeneratorTable::cohomology(field, rank)?;
    Ok(Input {
        n: rank,
        element: Element::parse(&table, text)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_inference() {
        assert_eq!(infer_rank("x1*x2"), 2);
        assert_eq!(infer_rank("y3^2 + x1"), 3);
        assert_eq!(infer_rank("2"), 0);
    }

    #[test]
    fn shorthands() {
        let f = FieldConfig::new(3).unwrap();
        let i = parse_input(f, "mui:2:1", None).unwrap();
        assert_eq!(i.element.render(), "x1*y2 + 2*x2*y1");
        let i = parse_input(f, "bracket:2:0:0,1", None).unwrap();
        assert_eq!(i.n, 2);
        assert!(parse_input(f, "mui:2:1", Some(3)).is_err());
        assert!(parse_input(f, "foo:1:2:3:4", None).is_err());
    }
}
