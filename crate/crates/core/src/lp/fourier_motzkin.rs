use super::ConeFeasibility;
use crate::rational::Q;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// Gaussian elimination on the equalities followed by Fourier–Motzkin
/// elimination of the remaining free multipliers.
pub struct FourierMotzkin;

/// `coeffs . a <= rhs`
type Row = (Vec<Q>, Q);

impl ConeFeasibility for FourierMotzkin {
    fn name(&self) -> &'static str {
        "fourier-motzkin"
    }

    fn in_cone(&self, generators: &[Vec<Q>], target: &[Q]) -> bool {
        let m = generators.len();
        let k = target.len();
        // equality system: sum_j a_j g_j[r] = target[r]
        let mut eq: Vec<Vec<Q>> = (0..k)
            .map(|r| {
                let mut row: Vec<Q> = generators.iter().map(|g| g[r].clone()).collect();
                row.push(target[r].clone());
                row
            })
            .collect();

        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut lead = 0;
        for col in 0..m {
            let Some(p) = (lead..k).find(|&r| !eq[r][col].is_zero()) else {
                continue;
            };
            eq.swap(lead, p);
            let inv = Q::from_integer(1.into()) / eq[lead][col].clone();
            for x in eq[lead].iter_mut() {
                *x *= &inv;
            }
            for r in 0..k {
                if r != lead && !eq[r][col].is_zero() {
                    let f = eq[r][col].clone();
                    for c in 0..=m {
                        let d = &eq[lead][c] * &f;
                        eq[r][c] -= d;
                    }
                }
            }
            pivots.push((lead, col));
            lead += 1;
            if lead == k {
                break;
            }
        }
        if eq[lead..].iter().any(|row| !row[m].is_zero()) {
            return false;
        }

        let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free: Vec<usize> = (0..m).filter(|c| !pivot_cols.contains(c)).collect();

        let mut rows: BTreeSet<Row> = BTreeSet::new();
        // pivot variable = rhs - sum_free coeff * a_free >= 0
        for &(r, _) in &pivots {
            let coeffs: Vec<Q> = free.iter().map(|&f| eq[r][f].clone()).collect();
            insert_normalized(&mut rows, coeffs, eq[r][m].clone());
        }
        for i in 0..free.len() {
            let mut coeffs = vec![Q::zero(); free.len()];
            coeffs[i] = -Q::from_integer(1.into());
            insert_normalized(&mut rows, coeffs, Q::zero());
        }

        for v in 0..free.len() {
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
            for row in rows {
                if row.0[v].is_positive() {
                    pos.push(row);
                } else if row.0[v].is_negative() {
                    neg.push(row);
                } else {
                    rest.insert(row);
                }
            }
            for (pc, pr) in &pos {
                for (nc, nr) in &neg {
                    let a = pc[v].clone();
                    let b = -nc[v].clone();
                    let coeffs: Vec<Q> = pc.iter().zip(nc).map(|(x, y)| x * &b + y * &a).collect();
                    insert_normalized(&mut rest, coeffs, pr * &b + nr * &a);
                }
            }
            rows = rest;
            if rows.iter().any(|(c, r)| c.iter().all(Zero::is_zero) && r.is_negative()) {
                return false;
            }
        }
        rows.iter().all(|(_, r)| !r.is_negative())
    }
}

/// Scales a row so its first nonzero coefficient has absolute value one.
fn insert_normalized(rows: &mut BTreeSet<Row>, coeffs: Vec<Q>, rhs: Q) {
    match coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        Some(s) => {
            let coeffs = coeffs.into_iter().map(|c| c / &s).collect();
            rows.insert((coeffs, rhs / s));
        }
        None => {
            rows.insert((coeffs, rhs));
        }
    }
}
