use super::ConeFeasibility;
use crate::rational::Q;
use num_traits::{One, Signed, Zero};

/// Phase-I simplex over exact rationals with Bland's anti-cycling rule.
pub struct ExactSimplex;

impl ConeFeasibility for ExactSimplex {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn in_cone(&self, generators: &[Vec<Q>], target: &[Q]) -> bool {
        let m = generators.len();
        let k = target.len();
        let width = m + k + 1;
        let rhs = width - 1;

        // rows: A a + s = |target|, with A's rows sign-flipped where target < 0
        let mut tab: Vec<Vec<Q>> = (0..k)
            .map(|r| {
                let sign = if target[r].is_negative() { -Q::one() } else { Q::one() };
                let mut row = vec![Q::zero(); width];
                for (j, g) in generators.iter().enumerate() {
                    row[j] = &g[r] * &sign;
                }
                row[m + r] = Q::one();
                row[rhs] = &target[r] * &sign;
                row
            })
            .collect();
        let mut basis: Vec<usize> = (m..m + k).collect();

        // reduced costs of the phase-I objective sum(s)
        let mut cost = vec![Q::zero(); width];
        for row in &tab {
            for j in 0..m {
                cost[j] -= &row[j];
            }
            cost[rhs] -= &row[rhs];
        }

        loop {
            let Some(enter) = (0..rhs).find(|&j| cost[j].is_negative()) else {
                break;
            };
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..k {
                if tab[r][enter].is_positive() {
                    let ratio = &tab[r][rhs] / &tab[r][enter];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < *best || (ratio == *best && basis[r] < basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            // phase I is bounded below by zero
            let (pr, _) = leave.expect("phase-I objective is bounded");
            let inv = Q::one() / &tab[pr][enter];
            for x in tab[pr].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = tab[pr].clone();
            for (r, row) in tab.iter_mut().enumerate() {
                if r != pr && !row[enter].is_zero() {
                    let f = row[enter].clone();
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= p * &f;
                    }
                }
            }
            let f = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= p * &f;
            }
            basis[pr] = enter;
        }
        cost[rhs].is_zero()
    }
}
