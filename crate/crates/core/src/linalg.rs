//! Small exact linear algebra over ℚ used by the cone and sector code.

use crate::rational::Q;
use num_traits::{One, Zero};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut lead = 0;
    for col in 0..cols {
        if lead == rows {
            break;
        }
        let Some(p) = (lead..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(lead, p);
        let inv = Q::one() / &m[lead][col];
        for x in m[lead].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[lead].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != lead && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(col);
        lead += 1;
    }
    pivots
}

pub fn rank(vectors: &[Vec<Q>]) -> usize {
    let mut m = vectors.to_vec();
    rref(&mut m).len()
}

pub fn rank_int(vectors: &[&[i64]]) -> usize {
    rank(&to_q(vectors))
}

pub fn to_q(vectors: &[&[i64]]) -> Vec<Vec<Q>> {
    vectors
        .iter()
        .map(|v| v.iter().map(|&x| Q::from_integer(x.into())).collect())
        .collect()
}

/// Basis of `{x : row . x = 0 for every row}` in ℚ^`dim`.
pub fn nullspace(rows: &[Vec<Q>], dim: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); dim];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `A x = b` for square nonsingular `A` given by rows.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, y)| {
            let mut r = row.clone();
            r.push(y.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn determinant(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let d = &m[col][c] * &f;
                    m[r][c] -= d;
                }
            }
        }
    }
    det
}

/// All `size`-element subsets of `0..n`, in lexicographic order.
pub fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn determinant_and_solve() {
        let a = to_q(&[&[3, 1], &[0, 1]]);
        assert_eq!(determinant(&a), qi(3));
        let x = solve(&a, &[qi(1), qi(1)]).unwrap();
        assert_eq!(x, vec![qi(0), qi(1)]);
        assert!(solve(&to_q(&[&[1, 1], &[2, 2]]), &[qi(1), qi(1)]).is_none());
        let b = to_q(&[&[3, 0], &[1, 1]]);
        assert_eq!(solve(&b, &[qi(1), qi(1)]).unwrap(), vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn nullspace_of_single_row() {
        let ns = nullspace(&to_q(&[&[3, 1]]), 2);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(qi(3) * &v[0] + &v[1], qi(0));
        assert_eq!(nullspace(&[], 1), vec![vec![qi(1)]]);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(&[0, 1, 2, 3], 2).len(), 6);
        assert_eq!(combinations(&[0, 1], 0), vec![Vec::<usize>::new()]);
    }
}
