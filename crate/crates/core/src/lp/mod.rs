//! Exact cone-membership solvers.
//!
//! Every question of the form "is `target` a nonnegative rational combination
//! of these integer vectors" goes through a [`ConeFeasibility`] strategy. Two
//! strategies ship with the crate and are registered by name in a
//! [`SolverRegistry`]; callers pick one at runtime (the CLI exposes `--lp`).

mod fourier_motzkin;
mod simplex;

pub use fourier_motzkin::FourierMotzkin;
pub use simplex::ExactSimplex;

use crate::rational::Q;
use std::collections::BTreeMap;
use std::sync::Arc;

pub trait ConeFeasibility: Send + Sync {
    fn name(&self) -> &'static str;

    /// Decides whether `target = sum a_i * generators[i]` for some `a_i >= 0`.
    fn in_cone(&self, generators: &[Vec<Q>], target: &[Q]) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown cone solver {name:?} (available: {})", available.join(", "))]
pub struct UnknownSolver {
    pub name: String,
    pub available: Vec<String>,
}

pub const DEFAULT_SOLVER: &str = "simplex";

pub struct SolverRegistry {
    entries: BTreeMap<&'static str, Arc<dyn ConeFeasibility>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, solver: Arc<dyn ConeFeasibility>) {
        self.entries.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ConeFeasibility>, UnknownSolver> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| UnknownSolver {
                name: name.to_string(),
                available: self.names().into_iter().map(String::from).collect(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(FourierMotzkin));
        r.register(Arc::new(ExactSimplex));
        r
    }
}

pub fn solver(name: &str) -> Result<Arc<dyn ConeFeasibility>, UnknownSolver> {
    SolverRegistry::default().get(name)
}

pub fn default_solver() -> Arc<dyn ConeFeasibility> {
    Arc::new(ExactSimplex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn ints(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn registry_lists_both_strategies() {
        let r = SolverRegistry::default();
        assert_eq!(r.names(), vec!["fourier-motzkin", "simplex"]);
        assert!(r.get("simplex").is_ok());
        let err = r.get("interior-point").err().unwrap();
        assert!(err.to_string().contains("fourier-motzkin"));
    }

    #[test]
    fn both_strategies_agree_on_small_cases() {
        let cases: Vec<(Vec<Vec<Q>>, Vec<Q>, bool)> = vec![
            (ints(&[&[3, 1], &[0, 1]]), vec![qi(1), qi(1)], true),
            (ints(&[&[0, 1]]), vec![qi(1), qi(1)], false),
            (vec![], vec![qi(1), qi(1)], false),
            (vec![], vec![qi(0), qi(0)], true),
            (ints(&[&[1, 0], &[3, 1]]), vec![qi(1), qi(1)], false),
            (ints(&[&[1, -1], &[-1, 1]]), vec![qi(2), qi(-2)], true),
            (ints(&[&[1, 0], &[-1, 0]]), vec![qi(0), qi(1)], false),
            (ints(&[&[2], &[3]]), vec![q(1, 7)], true),
            (ints(&[&[-2]]), vec![qi(1)], false),
        ];
        let reg = SolverRegistry::default();
        for name in reg.names() {
            let s = reg.get(name).unwrap();
            for (gens, target, expected) in &cases {
                assert_eq!(
                    s.in_cone(gens, target),
                    *expected,
                    "{name} on {gens:?} -> {target:?}"
                );
            }
        }
    }
}
