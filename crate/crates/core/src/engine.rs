//! A validated presentation bundled with its solver and cached combinatorics.

use crate::cones::{self, ConeTable, SupportSet};
use crate::lp::ConeFeasibility;
use crate::presentation::{pairing, validate, Presentation, RationalClass, ValidationReport, Weight};
use crate::rational::{fmt_q, is_integer, qi, Q};
use crate::ring::{product_of_forms, SectorRing};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid presentation:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    /// Some nonzero effective class has degree ≤ 0, so a degree ball is infinite.
    #[error("effective class {witness} has non-positive {grading} degree {}", fmt_q(.degree))]
    NonPositiveDegree {
        grading: Grading,
        witness: RationalClass,
        degree: Q,
    },
}

/// A linear functional used to bound enumerations of effective classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    /// Pairing with `det X - det E`.
    Novikov,
    /// Pairing with θ, which is positive on every nonzero effective class.
    Theta,
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grading::Novikov => "novikov",
            Grading::Theta => "theta",
        })
    }
}

/// One generator of the relation ideal of a sector ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrRelation {
    /// Minimal set of coordinates whose simultaneous vanishing is unstable.
    pub subset: SupportSet,
    /// Weights whose linear forms multiply to the relation.
    pub forms: Vec<Weight>,
}

pub struct Engine {
    p: Presentation,
    lp: Arc<dyn ConeFeasibility>,
    table: ConeTable,
    denominator_bound: BigInt,
    rings: Mutex<HashMap<SupportSet, Arc<SectorRing>>>,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("presentation", &self.p)
            .field("lp", &self.lp.name())
            .finish()
    }
}

impl Engine {
    pub fn new(p: Presentation, lp: Arc<dyn ConeFeasibility>) -> Result<Self, EngineError> {
        let report = validate(&p, lp.as_ref());
        if !report.is_valid() {
            return Err(EngineError::Invalid(report));
        }
        let table = ConeTable::build(&p, lp.as_ref());
        let denominator_bound = cones::denominator_bound(&p, &table);
        Ok(Self {
            p,
            lp,
            table,
            denominator_bound,
            rings: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_default_solver(p: Presentation) -> Result<Self, EngineError> {
        Self::new(p, crate::lp::default_solver())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.p
    }

    pub fn solver(&self) -> &dyn ConeFeasibility {
        self.lp.as_ref()
    }

    pub fn cone_table(&self) -> &ConeTable {
        &self.table
    }

    pub fn denominator_bound(&self) -> &BigInt {
        &self.denominator_bound
    }

    pub fn theta_in_cone(&self, s: SupportSet) -> bool {
        self.table.is_good(s)
    }

    pub fn fixed_support(&self, b: &RationalClass) -> SupportSet {
        cones::fixed_support(&self.p, b)
    }

    pub fn is_i_effective(&self, b: &RationalClass) -> bool {
        if b.len() != self.p.k() {
            return false;
        }
        let l = Q::from_integer(self.denominator_bound.clone());
        b.components().iter().all(|x| is_integer(&(x * &l))) && self.table.is_good(self.fixed_support(b))
    }

    pub fn grade(&self, grading: Grading, b: &RationalClass) -> Q {
        let w = match grading {
            Grading::Novikov => self.p.degree_character(),
            Grading::Theta => self.p.theta.clone(),
        };
        pairing(b, &w).expect("class length matches torus rank")
    }

    /// Effective classes of Novikov degree at most `max_degree`.
    pub fn enumerate_effective(&self, max_degree: &Q) -> Result<Vec<RationalClass>, EnumerationError> {
        self.enumerate_graded(Grading::Novikov, max_degree)
    }

    /// Fails unless `grading` is strictly positive on every nonzero effective class.
    pub fn check_positive(&self, grading: Grading) -> Result<(), EnumerationError> {
        for s in self.table.minimal_good() {
            for ray in cones::extreme_rays(&self.p, s) {
                let g = self.grade(grading, &ray);
                if !g.is_positive() {
                    debug_assert!(self.is_i_effective(&ray));
                    return Err(EnumerationError::NonPositiveDegree {
                        grading,
                        witness: ray,
                        degree: g,
                    });
                }
            }
        }
        Ok(())
    }

    /// Novikov if it is positive on the effective cone, else θ.
    pub fn search_grading(&self) -> Grading {
        if self.check_positive(Grading::Novikov).is_ok() {
            Grading::Novikov
        } else {
            Grading::Theta
        }
    }

    /// Every effective class with `grading ≤ bound`, sorted by (grade, class).
    ///
    /// Each effective class pairs to nonnegative integers with the weights of
    /// some minimal θ-good support `S`, so it is recovered from those
    /// integers on a basis of `ξ_S`. The integers are bounded by the vertices
    /// of the polytope `{β(ξ_S) ≥ 0, grade ≤ bound}`.
    pub fn enumerate_graded(&self, grading: Grading, bound: &Q) -> Result<Vec<RationalClass>, EnumerationError> {
        self.check_positive(grading)?;
        let mut found: BTreeSet<(Q, RationalClass)> = BTreeSet::new();
        if bound.is_negative() {
            return Ok(vec![]);
        }
        for s in self.table.minimal_good() {
            let vertices: Vec<RationalClass> = cones::extreme_rays(&self.p, s)
                .iter()
                .map(|r| r.scaled(&(bound / self.grade(grading, r))))
                .collect();
            let basis = cones::weight_basis(&self.p, s);
            let rows: Vec<Vec<Q>> = basis
                .iter()
                .map(|&i| self.p.x_weights[i].iter().map(|&x| qi(x)).collect())
                .collect();
            let bounds: Vec<i64> = basis
                .iter()
                .map(|&i| cones::max_pairing_floor(&vertices, &self.p.x_weights[i]))
                .collect();
            for m in cones::integer_box(&bounds) {
                let rhs: Vec<Q> = m.iter().map(|&x| qi(x)).collect();
                let b = RationalClass(crate::linalg::solve(&rows, &rhs).expect("basis is nonsingular"));
                let g = self.grade(grading, &b);
                if g <= *bound && self.is_i_effective(&b) {
                    found.insert((g, b));
                }
            }
        }
        Ok(found.into_iter().map(|(_, b)| b).collect())
    }

    /// Irreducible effective classes: nonzero and not a sum of two nonzero
    /// effective classes. Every effective class is a sum of these.
    pub fn monoid_generators(&self, grading: Grading) -> Result<Vec<RationalClass>, EnumerationError> {
        let bound = self.generator_bound(grading)?;
        let all = self.enumerate_graded(grading, &bound)?;
        let set: BTreeSet<&RationalClass> = all.iter().collect();
        Ok(all
            .iter()
            .filter(|b| !b.is_zero())
            .filter(|b| {
                !all.iter()
                    .any(|c| !c.is_zero() && c != *b && set.contains(&(&**b - c)) && !(&**b - c).is_zero())
            })
            .cloned()
            .collect())
    }

    /// Upper bound on the grade of any irreducible effective class: the sum of
    /// the grades of the first lattice points on the rays of each minimal cone.
    pub fn generator_bound(&self, grading: Grading) -> Result<Q, EnumerationError> {
        self.check_positive(grading)?;
        Ok(self
            .table
            .minimal_good()
            .into_iter()
            .map(|s| {
                cones::extreme_rays(&self.p, s)
                    .iter()
                    .map(|r| self.grade(grading, r))
                    .fold(Q::zero(), |a, b| a + b)
            })
            .max()
            .unwrap_or_else(Q::zero))
    }

    /// Minimal `S ⊆ support` such that `support \ S` is not θ-good, with the
    /// product of the linear forms of `ξ_i, i ∈ S`.
    pub fn sr_relations(&self, support: SupportSet) -> Vec<SrRelation> {
        let qualifies = |s: SupportSet| !self.table.is_good(support.minus(s));
        support
            .subsets()
            .filter(|&s| qualifies(s))
            .filter(|&s| s.iter().all(|i| !qualifies(s.minus(SupportSet::from_indices([i])))))
            .map(|s| SrRelation {
                subset: s,
                forms: s.iter().map(|i| self.p.x_weights[i].clone()).collect(),
            })
            .collect()
    }

    /// Cohomology ring of the quotient of the coordinate subspace `support`.
    pub fn sector_ring(&self, support: SupportSet) -> Arc<SectorRing> {
        let mut cache = self.rings.lock().expect("ring cache poisoned");
        cache
            .entry(support)
            .or_insert_with(|| {
                let k = self.p.k();
                let rels = self
                    .sr_relations(support)
                    .iter()
                    .map(|r| product_of_forms(k, &r.forms))
                    .collect();
                Arc::new(SectorRing::new(k, rels, None).expect("sector rings of stable quotients are finite"))
            })
            .clone()
    }
}
