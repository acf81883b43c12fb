//! Input data: a torus acting on affine space, a bundle `E` and a section.

use crate::cones::{self, SupportSet};
use crate::linalg;
use crate::lp::ConeFeasibility;
use crate::rational::{dot, fmt_q, fmt_vec, parse_q, parse_vector, Q, RationalParseError};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A character of the torus, as an integer vector.
pub type Weight = Vec<i64>;

/// Largest `n` for which the exhaustive subset searches are run.
pub const MAX_COORDINATES: usize = 16;

/// One monomial of a section component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionTerm {
    pub coeff: Q,
    pub exponents: Vec<u32>,
}

/// Section of `E`, one sparse polynomial per coordinate of `E`.
pub type Section = Vec<Vec<SectionTerm>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub x_weights: Vec<Weight>,
    pub e_weights: Vec<Weight>,
    pub theta: Weight,
    pub section: Option<Section>,
    pub fano_asserted: bool,
}

impl Presentation {
    pub fn new(x_weights: Vec<Weight>, e_weights: Vec<Weight>, theta: Weight) -> Self {
        Self {
            x_weights,
            e_weights,
            theta,
            section: None,
            fano_asserted: false,
        }
    }

    pub fn with_section(mut self, section: Section) -> Self {
        self.section = Some(section);
        self
    }

    pub fn with_fano(mut self, fano: bool) -> Self {
        self.fano_asserted = fano;
        self
    }

    /// Dimension of `X`.
    pub fn n(&self) -> usize {
        self.x_weights.len()
    }

    /// Rank of the torus.
    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// Rank of `E`.
    pub fn r(&self) -> usize {
        self.e_weights.len()
    }

    /// `det X - det E`; the torus contributes nothing.
    pub fn degree_character(&self) -> Weight {
        let mut d = vec![0; self.k()];
        for w in &self.x_weights {
            for (a, x) in d.iter_mut().zip(w) {
                *a += x;
            }
        }
        for w in &self.e_weights {
            for (a, x) in d.iter_mut().zip(w) {
                *a -= x;
            }
        }
        d
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let doc: PresentationDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PresentationDoc::from(self)).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("theta must have at least one entry")]
    EmptyTheta,
    #[error("x_weights must be nonempty")]
    NoCoordinates,
    #[error("{field}[{index}] has length {found}, expected {expected}")]
    Ragged {
        field: &'static str,
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("section[{component}][{term}]: {source}")]
    Coefficient {
        component: usize,
        term: usize,
        source: RationalParseError,
    },
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coeff: String,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    x_weights: Vec<Vec<i64>>,
    #[serde(default)]
    e_weights: Vec<Vec<i64>>,
    theta: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    section: Option<Vec<Vec<TermDoc>>>,
    #[serde(default)]
    fano: bool,
}

impl TryFrom<PresentationDoc> for Presentation {
    type Error = ParseError;

    fn try_from(doc: PresentationDoc) -> Result<Self, ParseError> {
        let k = doc.theta.len();
        if k == 0 {
            return Err(ParseError::EmptyTheta);
        }
        if doc.x_weights.is_empty() {
            return Err(ParseError::NoCoordinates);
        }
        let n = doc.x_weights.len();
        for (field, rows) in [("x_weights", &doc.x_weights), ("e_weights", &doc.e_weights)] {
            for (index, w) in rows.iter().enumerate() {
                if w.len() != k {
                    return Err(ParseError::Ragged {
                        field,
                        index,
                        found: w.len(),
                        expected: k,
                    });
                }
            }
        }
        let section = match doc.section {
            None => None,
            Some(components) => {
                let mut out = Vec::with_capacity(components.len());
                for (ci, comp) in components.into_iter().enumerate() {
                    let mut terms = Vec::with_capacity(comp.len());
                    for (ti, t) in comp.into_iter().enumerate() {
                        if t.exponents.len() != n {
                            return Err(ParseError::Ragged {
                                field: "section exponents",
                                index: ci,
                                found: t.exponents.len(),
                                expected: n,
                            });
                        }
                        let coeff = parse_q(&t.coeff).map_err(|source| ParseError::Coefficient {
                            component: ci,
                            term: ti,
                            source,
                        })?;
                        terms.push(SectionTerm {
                            coeff,
                            exponents: t.exponents,
                        });
                    }
                    out.push(terms);
                }
                Some(out)
            }
        };
        Ok(Presentation {
            x_weights: doc.x_weights,
            e_weights: doc.e_weights,
            theta: doc.theta,
            section,
            fano_asserted: doc.fano,
        })
    }
}

impl From<&Presentation> for PresentationDoc {
    fn from(p: &Presentation) -> Self {
        PresentationDoc {
            x_weights: p.x_weights.clone(),
            e_weights: p.e_weights.clone(),
            theta: p.theta.clone(),
            section: p.section.as_ref().map(|s| {
                s.iter()
                    .map(|comp| {
                        comp.iter()
                            .map(|t| TermDoc {
                                coeff: fmt_q(&t.coeff),
                                exponents: t.exponents.clone(),
                            })
                            .collect()
                    })
                    .collect()
            }),
            fano: p.fano_asserted,
        }
    }
}

/// A violated invariant of a well-formed presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RankExceedsDimension { k: usize, n: usize },
    TooManyCoordinates { n: usize, max: usize },
    SectionArity { expected: usize, found: usize },
    SectionWeightMismatch {
        component: usize,
        exponents: Vec<u32>,
        weight: Weight,
        expected: Weight,
    },
    EmptySemistableLocus,
    /// θ lies in the cone of these coordinates but their weights do not span.
    PositiveDimensionalStabilizer { support: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankExceedsDimension { k, n } => write!(f, "torus rank {k} exceeds dimension {n}"),
            Violation::TooManyCoordinates { n, max } => write!(f, "{n} coordinates; at most {max} supported"),
            Violation::SectionArity { expected, found } => {
                write!(f, "section has {found} components but E has rank {expected}")
            }
            Violation::SectionWeightMismatch {
                component,
                exponents,
                weight,
                expected,
            } => write!(
                f,
                "section component {component}: monomial {exponents:?} has weight {weight:?}, expected {expected:?}"
            ),
            Violation::EmptySemistableLocus => write!(f, "theta is not in the cone of the weights of X"),
            Violation::PositiveDimensionalStabilizer { support } => write!(
                f,
                "coordinates {support:?} are semistable but their weights do not span"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn monomial_weight(p: &Presentation, exponents: &[u32]) -> Weight {
    let mut w = vec![0; p.k()];
    for (e, xi) in exponents.iter().zip(&p.x_weights) {
        for (a, x) in w.iter_mut().zip(xi) {
            *a += i64::from(*e) * x;
        }
    }
    w
}

/// Checks every invariant; an empty report means the presentation is usable.
pub fn validate(p: &Presentation, lp: &dyn ConeFeasibility) -> ValidationReport {
    let mut violations = Vec::new();
    let (n, k) = (p.n(), p.k());
    if k > n {
        violations.push(Violation::RankExceedsDimension { k, n });
    }
    if let Some(section) = &p.section {
        if section.len() != p.r() {
            violations.push(Violation::SectionArity {
                expected: p.r(),
                found: section.len(),
            });
        }
        for (j, (comp, eps)) in section.iter().zip(&p.e_weights).enumerate() {
            for t in comp {
                let w = monomial_weight(p, &t.exponents);
                if &w != eps {
                    violations.push(Violation::SectionWeightMismatch {
                        component: j,
                        exponents: t.exponents.clone(),
                        weight: w,
                        expected: eps.clone(),
                    });
                }
            }
        }
    }
    if n > MAX_COORDINATES {
        violations.push(Violation::TooManyCoordinates {
            n,
            max: MAX_COORDINATES,
        });
        return ValidationReport { violations };
    }
    let full = SupportSet::full(n);
    if !cones::theta_in_cone(p, full, lp) {
        violations.push(Violation::EmptySemistableLocus);
    } else {
        for s in SupportSet::all(n) {
            if !cones::theta_in_cone(p, s, lp) {
                continue;
            }
            let ws: Vec<&[i64]> = s.iter().map(|i| p.x_weights[i].as_slice()).collect();
            if linalg::rank_int(&ws) < k {
                violations.push(Violation::PositiveDimensionalStabilizer {
                    support: s.to_one_based(),
                });
                break;
            }
        }
    }
    ValidationReport { violations }
}

/// An element of `Hom(χ(T), ℚ)`, recorded by its values on the coordinate
/// characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalClass(pub Vec<Q>);

impl RationalClass {
    pub fn zero(k: usize) -> Self {
        Self(vec![Q::zero(); k])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| Q::from_integer(x.into())).collect())
    }

    pub fn parse(s: &str) -> Result<Self, RationalParseError> {
        parse_vector(s).map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn components(&self) -> &[Q] {
        &self.0
    }

    pub fn scaled(&self, s: &Q) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }
}

impl fmt::Display for RationalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_vec(&self.0))
    }
}

impl Add for &RationalClass {
    type Output = RationalClass;
    fn add(self, o: &RationalClass) -> RationalClass {
        RationalClass(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalClass {
    type Output = RationalClass;
    fn sub(self, o: &RationalClass) -> RationalClass {
        RationalClass(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalClass {
    type Output = RationalClass;
    fn neg(self) -> RationalClass {
        RationalClass(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&Q> for &RationalClass {
    type Output = RationalClass;
    fn mul(self, s: &Q) -> RationalClass {
        self.scaled(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("class has length {class} but weight has length {weight}")]
pub struct LengthMismatch {
    pub class: usize,
    pub weight: usize,
}

/// `β(w)`: the degree of the line bundle of weight `w` along a class.
pub fn pairing(b: &RationalClass, w: &[i64]) -> Result<Q, LengthMismatch> {
    if b.len() != w.len() {
        return Err(LengthMismatch {
            class: b.len(),
            weight: w.len(),
        });
    }
    Ok(dot(&b.0, w))
}
