//! Gaussian elimination over `F_p`.

use crate::error::{Error, Result};
use crate::field::FieldConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<u32>),
    /// Consistent, with a free parameter space of dimension `cols - rank`.
    NonUnique { rank: usize, particular: Vec<u32> },
    Inconsistent { rank: usize },
}

/// Row-reduced form of a coefficient matrix with the row operations recorded
/// on any number of right-hand sides.
struct Reduced {
    rank: usize,
    pivots: Vec<usize>,
    /// The augmented columns after elimination, one vector per rhs.
    rhs: Vec<Vec<u32>>,
    /// Reduced coefficient rows (only the first `rank` matter).
    rows: Vec<Vec<u32>>,
}

fn check_dims(matrix: &[Vec<u32>], rhs_len: usize) -> Result<usize> {
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    if rhs_len != matrix.len() {
        return Err(Error::Dimension(format!(
            "{} rows but rhs has {} entries",
            matrix.len(),
            rhs_len
        )));
    }
    Ok(cols)
}

fn reduce(f: &FieldConfig, matrix: &[Vec<u32>], cols: usize, rhs: &[&[u32]]) -> Reduced {
    let p = f.p();
    let mut rows: Vec<Vec<u32>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| v % p).collect())
        .collect();
    let mut aug: Vec<Vec<u32>> = rhs
        .iter()
        .map(|b| b.iter().map(|&v| v % p).collect())
        .collect();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        for b in aug.iter_mut() {
            b.swap(rank, pr);
        }
        let inv = f.inv(rows[rank][col]).expect("nonzero pivot");
        for v in rows[rank].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for b in aug.iter_mut() {
            b[rank] = f.mul(b[rank], inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col] == 0 {
                continue;
            }
            let factor = rows[r][col];
            for c in col..cols {
                let sub = f.mul(factor, rows[rank][c]);
                rows[r][c] = f.sub(rows[r][c], sub);
            }
            for b in aug.iter_mut() {
                let sub = f.mul(factor, b[rank]);
                b[r] = f.sub(b[r], sub);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Reduced {
        rank,
        pivots,
        rhs: aug,
        rows,
    }
}

fn read_solution(red: &Reduced, b: &[u32], cols: usize) -> Solution {
    if b[red.rank..].iter().any(|&v| v != 0) {
        return Solution::Inconsistent { rank: red.rank };
    }
    let mut x = vec![0u32; cols];
    for (r, &c) in red.pivots.iter().enumerate() {
        x[c] = b[r];
    }
    debug_assert!(red.rows.len() >= red.rank);
    if red.rank == cols {
        Solution::Unique(x)
    } else {
        Solution::NonUnique {
            rank: red.rank,
            particular: x,
        }
    }
}

/// Solves `matrix * x = rhs` exactly over `F_p`.
pub fn solve_mod_p(f: &FieldConfig, matrix: &[Vec<u32>], rhs: &[u32]) -> Result<Solution> {
    let cols = check_dims(matrix, rhs.len())?;
    let red = reduce(f, matrix, cols, &[rhs]);
    Ok(read_solution(&red, &red.rhs[0], cols))
}

/// Solves `matrix * x = b` for several right-hand sides sharing one
/// elimination. Returns the rank together with one solution per rhs.
pub fn solve_many(
    f: &FieldConfig,
    matrix: &[Vec<u32>],
    cols: usize,
    rhs: &[Vec<u32>],
) -> Result<(usize, Vec<Solution>)> {
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    for b in rhs {
        if b.len() != matrix.len() {
            return Err(Error::Dimension(format!(
                "{} rows but rhs has {} entries",
                matrix.len(),
                b.len()
            )));
        }
    }
    let refs: Vec<&[u32]> = rhs.iter().map(Vec::as_slice).collect();
    let red = reduce(f, matrix, cols, &refs);
    let sols = red
        .rhs
        .iter()
        .map(|b| read_solution(&red, b, cols))
        .collect();
    Ok((red.rank, sols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldConfig {
        FieldConfig::new(p).unwrap()
    }

    #[test]
    fn identity_returns_rhs() {
        let m = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(
            solve_mod_p(&f(5), &m, &[3, 4, 1]).unwrap(),
            Solution::Unique(vec![3, 4, 1])
        );
    }

    #[test]
    fn rank_deficient_cases() {
        let m = vec![vec![1, 1], vec![2, 2]];
        assert!(matches!(
            solve_mod_p(&f(3), &m, &[0, 0]).unwrap(),
            Solution::NonUnique { rank: 1, .. }
        ));
        assert_eq!(
            solve_mod_p(&f(3), &m, &[1, 0]).unwrap(),
            Solution::Inconsistent { rank: 1 }
        );
    }

    #[test]
    fn dimension_mismatch() {
        let m = vec![vec![1, 1], vec![2]];
        assert!(solve_mod_p(&f(3), &m, &[0, 0]).is_err());
        let m = vec![vec![1, 1]];
        assert!(solve_mod_p(&f(3), &m, &[0, 0]).is_err());
    }

    #[test]
    fn overdetermined_consistent() {
        // x + y = 2, x - y = 0, 2x = 2 over F_7
        let m = vec![vec![1, 1], vec![1, 6], vec![2, 0]];
        assert_eq!(
            solve_mod_p(&f(7), &m, &[2, 0, 2]).unwrap(),
            Solution::Unique(vec![1, 1])
        );
    }
}
