//! Decision procedures built on the coefficients: I-convexity, the
//! equivalent characterizations of it, line-bundle convexity on weighted
//! projective spaces, and the criterion for the quasimap and twisted mirror
//! maps to agree.

use crate::engine::{Engine, EnumerationError, Grading};
use crate::ifunc::{negative_e_pairing, restricted_twisted_limit, twisted_coefficient};
use crate::presentation::{pairing, RationalClass};
use crate::rational::{floor_int, is_integer, Q};
use crate::sectors::{group_element, novikov_degree, sector_descriptor};
use crate::series::Series;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

pub use crate::ifunc::is_i_nonnegative;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("degree {d} is not in (1/{a})ℤ")]
    NotInLattice { d: Q, a: BigInt },
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// A class pairing with an `E`-weight into `ℤ<0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub class: RationalClass,
    pub weight_index: usize,
    pub pairing: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexityVerdict {
    /// Every effective class is I-nonnegative.
    Unconditional,
    /// No witness among classes of `grading ≤ bound`.
    TrueUpTo { grading: Grading, bound: Q },
    NotConvex(Witness),
}

impl ConvexityVerdict {
    pub fn is_false(&self) -> bool {
        matches!(self, ConvexityVerdict::NotConvex(_))
    }
}

fn witness_of(engine: &Engine, b: &RationalClass) -> Option<Witness> {
    negative_e_pairing(engine, b).map(|j| Witness {
        class: b.clone(),
        weight_index: j,
        pairing: pairing(b, &engine.presentation().e_weights[j]).expect("lengths match"),
    })
}

/// Smallest positive multiple of `b` pairing integrally with every weight.
fn integral_multiple(b: &RationalClass) -> RationalClass {
    let a = Q::from_integer(group_element(b).order());
    b.scaled(&a)
}

/// A multiple of `b` that pairs into `ℤ<0`, if some `E`-pairing of `b` is negative.
fn multiple_witness(engine: &Engine, b: &RationalClass) -> Option<Witness> {
    let negative = engine
        .presentation()
        .e_weights
        .iter()
        .any(|w| pairing(b, w).expect("lengths match").is_negative());
    if !negative {
        return None;
    }
    let m = integral_multiple(b);
    debug_assert!(engine.is_i_effective(&m));
    witness_of(engine, &m)
}

/// Scans effective classes up to `max_degree` for a class that is not
/// I-nonnegative. Classes with a fractional negative pairing yield a witness
/// through their integral multiples, which are effective as well. With no
/// witness, the verdict becomes unconditional once every irreducible
/// effective class lies inside the scanned range.
///
/// The scan uses the Novikov grading when it is positive on the effective
/// cone and θ otherwise, in which case `max_degree` bounds θ-degree.
pub fn is_i_convex(engine: &Engine, max_degree: &Q) -> Result<ConvexityVerdict, EnumerationError> {
    let grading = engine.search_grading();
    let classes = engine.enumerate_graded(grading, max_degree)?;
    if let Some(w) = classes.iter().find_map(|b| witness_of(engine, b)) {
        return Ok(ConvexityVerdict::NotConvex(w));
    }
    if let Some(w) = classes.iter().find_map(|b| multiple_witness(engine, b)) {
        return Ok(ConvexityVerdict::NotConvex(w));
    }
    if engine.generator_bound(grading)? <= *max_degree {
        Ok(ConvexityVerdict::Unconditional)
    } else {
        Ok(ConvexityVerdict::TrueUpTo {
            grading,
            bound: max_degree.clone(),
        })
    }
}

/// Whether `lim_{κ→0}` of the (unrestricted) twisted coefficient exists, per class.
pub fn limit_existence_scan(engine: &Engine, max_degree: &Q) -> Result<Vec<(RationalClass, bool)>, EnumerationError> {
    let grading = engine.search_grading();
    Ok(engine
        .enumerate_graded(grading, max_degree)?
        .into_iter()
        .map(|b| {
            let ok = twisted_coefficient(engine, &b)
                .expect("enumerated classes are effective")
                .kappa_limit()
                .exists();
            (b, ok)
        })
        .collect())
}

/// `h^1` of a line bundle of degree `d` on `P^1_{a,1}`: its pushforward to
/// the coarse `P^1` has degree `⌊d⌋`.
pub fn h1_weighted_p1(d: &Q, a: &BigInt) -> Result<BigInt, AnalysisError> {
    if !a.is_positive() || !is_integer(&(d * Q::from_integer(a.clone()))) {
        return Err(AnalysisError::NotInLattice { d: d.clone(), a: a.clone() });
    }
    let h = -floor_int(d) - BigInt::one();
    Ok(if h.is_negative() { BigInt::zero() } else { h })
}

/// `O(k)` on `P(a_0,…,a_m)` is convex iff it is pulled back from a nef
/// bundle on the coarse space: `k ≥ 0` and every `a_i` divides `k`.
pub fn convex_line_bundle_wps(weights: &[i64], k: i64) -> bool {
    k >= 0 && weights.iter().all(|&a| a != 0 && k % a == 0)
}

/// Outcome of the four equivalent conditions on a common set of classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop33Report {
    pub grading: Grading,
    pub bound: Q,
    pub classes_scanned: usize,
    /// Every scanned class is I-nonnegative.
    pub i_convex: bool,
    /// Every scanned class pairs nonnegatively with every `E`-weight.
    pub nonnegative: bool,
    /// `h^1` vanishes for every scanned class and `E`-weight.
    pub h1_vanishes: bool,
    /// Every twisted coefficient has a κ-limit.
    pub limits_exist: bool,
    /// First class on which some condition fails.
    pub witness: Option<RationalClass>,
    /// Classes that are not I-nonnegative but whose twisted coefficient is
    /// identically zero, so the `E`-factor's κ-pole never shows.
    pub masked: Vec<RationalClass>,
}

impl Prop33Report {
    pub fn agree(&self) -> bool {
        let v = [self.i_convex, self.nonnegative, self.h1_vanishes, self.limits_exist];
        v.iter().all(|&x| x == v[0])
    }
}

/// Evaluates the four conditions on the classes up to `max_degree` together
/// with `a·b` and `2a·b` for the first class `b` with a negative `E`-pairing,
/// `a` the order of `g_b`. The multiples are what make the conditions
/// comparable on a finite set: `−1/3` only becomes an integer after scaling,
/// and a pairing of exactly `−1` only produces `h^1 ≠ 0` after doubling.
/// One such pair already makes all four conditions fail.
pub fn prop33_battery(engine: &Engine, max_degree: &Q) -> Result<Prop33Report, EnumerationError> {
    let grading = engine.search_grading();
    let p = engine.presentation();
    let base = engine.enumerate_graded(grading, max_degree)?;
    let mut scan: BTreeSet<RationalClass> = base.iter().cloned().collect();
    let first_negative = base
        .iter()
        .find(|b| p.e_weights.iter().any(|w| pairing(b, w).expect("lengths match").is_negative()));
    if let Some(b) = first_negative {
        let m = integral_multiple(b);
        scan.insert(m.scaled(&Q::from_integer(2.into())));
        scan.insert(m);
    }
    let mut report = Prop33Report {
        grading,
        bound: max_degree.clone(),
        classes_scanned: scan.len(),
        i_convex: true,
        nonnegative: true,
        h1_vanishes: true,
        limits_exist: true,
        witness: None,
        masked: Vec::new(),
    };
    for b in &scan {
        debug_assert!(engine.is_i_effective(b));
        let a = group_element(b).order();
        let pairings: Vec<Q> = p.e_weights.iter().map(|w| pairing(b, w).expect("lengths match")).collect();
        let c1 = is_i_nonnegative(engine, b);
        let c2 = pairings.iter().all(|x| !x.is_negative());
        let c3 = pairings
            .iter()
            .all(|x| h1_weighted_p1(x, &a).expect("pairings lie in (1/a)ℤ").is_zero());
        let tw = twisted_coefficient(engine, b).expect("scanned classes are effective");
        let c4 = tw.kappa_limit().exists();
        if !c1 && tw.is_zero() {
            report.masked.push(b.clone());
        }
        report.i_convex &= c1;
        report.nonnegative &= c2;
        report.h1_vanishes &= c3;
        report.limits_exist &= c4;
        if report.witness.is_none() && !(c1 && c2 && c3 && c4) {
            report.witness = Some(b.clone());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma53Condition {
    /// Every nonzero effective class has positive Novikov degree.
    DegreePositivity,
    /// The restricted twisted κ-limit exists and vanishes.
    LimitVanishes,
    /// Age plus codimension of the fixed locus is at least one.
    AgePlusCodimension,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lemma53Verdict {
    Pass,
    Fail { condition: Lemma53Condition, witness: RationalClass },
    /// Condition (1) holds in degree zero but the value survives in
    /// positive cohomological degree of the truncated model.
    Inconclusive { witness: RationalClass },
}

/// One class that is not I-nonnegative.
#[derive(Debug, Clone)]
pub struct Lemma53Row {
    pub class: RationalClass,
    pub degree: Q,
    /// `None` when the limit does not exist; otherwise the value.
    pub limit: Option<Series>,
    pub age: Q,
    pub codim: i64,
}

#[derive(Debug, Clone)]
pub struct Lemma53Report {
    pub verdict: Lemma53Verdict,
    /// The Fano condition is asserted by the input, not verified; without it
    /// a pass only establishes the non-Fano part of the criterion.
    pub conditional: bool,
    pub rows: Vec<Lemma53Row>,
}

/// Outcome of condition (1) on a single class.
fn limit_verdict(value: &Series, y_nonempty: bool) -> Option<bool> {
    if value.is_zero() {
        return Some(true);
    }
    let has_degree_zero = value.numerator().any(|(_, c)| !c.constant().is_zero());
    (has_degree_zero && y_nonempty).then_some(false)
}

/// For every effective class of degree ≤ `max_degree` that is not
/// I-nonnegative: (1) the restricted twisted κ-limit exists and is zero,
/// and (2) `age(g_b^{-1}) + codim F_b(Y//T) ≥ 1`.
///
/// The `Y`-side ring is a truncation of the ambient one, so a value that is
/// nonzero only in positive degrees may still vanish on `Y`: that case is
/// inconclusive rather than a failure.
pub fn lemma53_criterion(engine: &Engine, max_degree: &Q) -> Result<Lemma53Report, EnumerationError> {
    let conditional = !engine.presentation().fano_asserted;
    if let Err(EnumerationError::NonPositiveDegree { witness, .. }) = engine.check_positive(Grading::Novikov) {
        return Ok(Lemma53Report {
            verdict: Lemma53Verdict::Fail {
                condition: Lemma53Condition::DegreePositivity,
                witness,
            },
            conditional,
            rows: vec![],
        });
    }
    let mut rows = Vec::new();
    let mut fail = None;
    let mut inconclusive = None;
    for b in engine.enumerate_effective(max_degree)? {
        if is_i_nonnegative(engine, &b) {
            continue;
        }
        let d = sector_descriptor(engine, &b, true).expect("enumerated classes are effective");
        let limit = restricted_twisted_limit(engine, &b).expect("enumerated classes are effective");
        let y_nonempty = d.g.is_identity() || d.y_cuts.is_empty();
        let c1 = match &limit {
            crate::series::KappaLimit::Exists(v) => limit_verdict(v, y_nonempty),
            crate::series::KappaLimit::DoesNotExist(pp) => limit_verdict(pp, y_nonempty).map(|_| false),
        };
        let codim = d.f_codim_in_y_sector();
        let c2 = &d.age + Q::from_integer(codim.into()) >= Q::one();
        if fail.is_none() {
            if c1 == Some(false) {
                fail = Some((Lemma53Condition::LimitVanishes, b.clone()));
            } else if !c2 {
                fail = Some((Lemma53Condition::AgePlusCodimension, b.clone()));
            }
        }
        if c1.is_none() && inconclusive.is_none() {
            inconclusive = Some(b.clone());
        }
        rows.push(Lemma53Row {
            degree: novikov_degree(engine.presentation(), &b),
            limit: limit.value().cloned(),
            age: d.age.clone(),
            codim,
            class: b,
        });
    }
    let verdict = match (fail, inconclusive) {
        (Some((condition, witness)), _) => Lemma53Verdict::Fail { condition, witness },
        (None, Some(witness)) => Lemma53Verdict::Inconclusive { witness },
        (None, None) => Lemma53Verdict::Pass,
    };
    Ok(Lemma53Report {
        verdict,
        conditional,
        rows,
    })
}
