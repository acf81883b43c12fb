//! Coefficients of the quasimap I-function and of the κ-equivariant twisted
//! I-function, one effective class at a time.

use crate::engine::{Engine, EnumerationError};
use crate::presentation::{pairing, RationalClass};
use crate::rational::{is_integer, Q};
use crate::ring::mono_degree;
use crate::sectors::{novikov_degree, sector_descriptor, SectorDescriptor, SectorError};
use crate::series::{c_factor, Cycle, KappaLimit, SectorTag, Series, Side};
use num_traits::Signed;
use std::sync::Arc;

/// A coefficient, or an explicit refusal when no formula covers the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Value(Series),
    Unsupported(String),
}

impl Coefficient {
    pub fn value(&self) -> Option<&Series> {
        match self {
            Coefficient::Value(s) => Some(s),
            Coefficient::Unsupported(_) => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Coefficient::Value(s) => s.render(),
            Coefficient::Unsupported(why) => format!("unsupported: {why}"),
        }
    }
}

/// No `E`-weight pairs with `b` into the negative integers.
pub fn is_i_nonnegative(engine: &Engine, b: &RationalClass) -> bool {
    negative_e_pairing(engine, b).is_none()
}

/// First `E`-weight index whose pairing with `b` is a negative integer.
pub fn negative_e_pairing(engine: &Engine, b: &RationalClass) -> Option<usize> {
    engine.presentation().e_weights.iter().position(|w| {
        let x = pairing(b, w).expect("class length matches torus rank");
        is_integer(&x) && x.is_negative()
    })
}

fn y_tag(d: &SectorDescriptor) -> SectorTag {
    SectorTag {
        g: d.g.clone(),
        age: d.age.clone(),
        side: Side::Y,
        cycle: Cycle::Fundamental,
    }
}

/// The product `Π C(b,ε_j)^{-1} Π C(b,ξ_l)` (or its `C°` version) on `ring`.
fn hypergeometric_product(engine: &Engine, b: &RationalClass, ring: &Arc<crate::ring::SectorRing>, tag: &SectorTag, kappa: bool, circ: bool) -> Series {
    let p = engine.presentation();
    let mut acc = Series::one(ring.clone(), tag.clone());
    for w in &p.e_weights {
        let f = c_factor(b, w, ring, kappa, circ)
            .evaluate(ring, tag, true)
            .expect("C-factors have nonzero z or κ terms");
        acc = acc.mul(&f);
    }
    for w in &p.x_weights {
        let f = c_factor(b, w, ring, false, circ)
            .evaluate(ring, tag, false)
            .expect("C-factors have nonzero z or κ terms");
        acc = acc.mul(&f);
    }
    acc
}

/// `I_b(z)` on the `Y`-sector of `g_b^{-1}`.
///
/// I-nonnegative classes use the product formula against `1_{g^{-1}}`.
/// Otherwise the `C°` formula against `[F_b(Y//T)]` is used, but only when
/// its hypothesis is certified: a section is given, every `E`-component
/// with pairing in `ℤ≥0` is nonzero on `X^b` (the others vanish there by
/// weight), and at most one component is left to cut `F_b(X//T)`, so the
/// inclusion is a Cartier divisor or an isomorphism.
pub fn quasimap_coefficient(engine: &Engine, b: &RationalClass) -> Result<Coefficient, SectorError> {
    let d = sector_descriptor(engine, b, true)?;
    if is_i_nonnegative(engine, b) {
        let tag = y_tag(&d);
        return Ok(Coefficient::Value(hypergeometric_product(engine, b, &d.y_ring, &tag, false, false)));
    }
    let p = engine.presentation();
    if !d.section_aware {
        return Ok(Coefficient::Unsupported(
            "class is not I-nonnegative and no section is given to certify the fixed-locus hypothesis".into(),
        ));
    }
    let expected = p
        .e_weights
        .iter()
        .filter(|w| {
            let x = pairing(b, w).expect("lengths match");
            is_integer(&x) && !x.is_negative()
        })
        .count();
    if d.f_cuts.len() != expected {
        return Ok(Coefficient::Unsupported(format!(
            "F(Y) has codimension {} in F(X) but {} is required",
            d.f_cuts.len(),
            expected
        )));
    }
    if d.f_cuts.len() > 1 {
        return Ok(Coefficient::Unsupported(
            "F(Y) is cut by more than one section component; transversality is not certified".into(),
        ));
    }
    let ring = Arc::new(d.f_y_ring());
    let tag = y_tag(&d);
    let value = hypergeometric_product(engine, b, &ring, &tag, false, true);
    Ok(Coefficient::Value(value.pushed_forward(d.f_support, d.f_codim_in_y_sector())))
}

/// The κ-equivariant twisted coefficient on the ambient sector of `g_b^{-1}`.
pub fn twisted_coefficient(engine: &Engine, b: &RationalClass) -> Result<Series, SectorError> {
    let d = sector_descriptor(engine, b, true)?;
    Ok(twisted_on(engine, &d))
}

fn twisted_on(engine: &Engine, d: &SectorDescriptor) -> Series {
    let tag = SectorTag {
        side: Side::Ambient,
        ..y_tag(d)
    };
    hypergeometric_product(engine, &d.class, &d.ambient, &tag, true, false)
}

/// Image of an ambient-sector element in the `Y` sector's ring.
pub fn restrict_to_y(x: &Series, d: &SectorDescriptor) -> Series {
    x.mapped_to(d.y_ring.clone(), Side::Y)
}

/// `lim_{κ→0} i^* I^{X,E}_b`, restricting before the limit is taken.
pub fn restricted_twisted_limit(engine: &Engine, b: &RationalClass) -> Result<KappaLimit, SectorError> {
    let d = sector_descriptor(engine, b, true)?;
    Ok(restrict_to_y(&twisted_on(engine, &d), &d).kappa_limit())
}

/// Every term of `x` has total degree `-deg q^b`, where `deg z = deg κ = 1`
/// and a ring monomial on the sector has its own degree plus the age and
/// the codimension of the cycle it is attached to.
pub fn homogeneity_check(engine: &Engine, x: &Series, b: &RationalClass) -> bool {
    homogeneity_defects(engine, x, b).is_empty()
}

/// The terms violating homogeneity, with their total degree.
pub fn homogeneity_defects(engine: &Engine, x: &Series, b: &RationalClass) -> Vec<((i64, i64), Q)> {
    let target = -novikov_degree(engine.presentation(), b);
    let shift = &x.tag().age + Q::from_integer(x.tag().cycle_degree().into());
    let den: i64 = x.denominator().map(|(_, m)| i64::from(*m)).sum();
    let mut bad = Vec::new();
    for ((z, k), c) in x.numerator() {
        for (m, _) in c.terms() {
            let total = &shift + Q::from_integer((i64::from(mono_degree(m)) + z + k - den).into());
            if total != target {
                bad.push(((*z, *k), total));
            }
        }
    }
    bad
}

/// Nonnegative-z part of `z·x`, minus `z` for the zero class.
fn mirror_term(x: &Series, b: &RationalClass) -> Option<Series> {
    let mut t = x.shifted(1, 0).nonnegative_z_part().ok()?;
    if b.is_zero() {
        let z = Series::one(t.ring().clone(), t.tag().clone()).shifted(1, 0);
        t = t.sub(&z);
    }
    Some(t)
}

#[derive(Debug, Clone)]
pub struct MirrorEntry {
    pub class: RationalClass,
    pub degree: Q,
    /// `[z I_b]_+`; `None` where the coefficient is unsupported.
    pub mu: Option<Series>,
    /// `[z K_b]_+` with `K_b` the restricted twisted limit; `None` if the limit does not exist.
    pub mu_tw: Option<Series>,
    /// `None` when the two cannot be compared.
    pub agree: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct MirrorReport {
    pub entries: Vec<MirrorEntry>,
}

impl MirrorReport {
    /// `Some(true)` if every class agrees, `Some(false)` on any disagreement, else `None`.
    pub fn equal(&self) -> Option<bool> {
        if self.entries.iter().any(|e| e.agree == Some(false)) {
            return Some(false);
        }
        self.entries.iter().all(|e| e.agree == Some(true)).then_some(true)
    }

    pub fn holes(&self) -> Vec<&RationalClass> {
        self.entries.iter().filter(|e| e.agree.is_none()).map(|e| &e.class).collect()
    }
}

fn compare(a: &Series, b: &Series) -> Option<bool> {
    if a.is_zero() && b.is_zero() {
        return Some(true);
    }
    (a.tag() == b.tag()).then(|| a == b)
}

/// `μ = [zI − z]_+` and `μ^tw = [zK − z]_+`, class by class, through `max_degree`.
pub fn mirror_map(engine: &Engine, max_degree: &Q) -> Result<MirrorReport, EnumerationError> {
    let classes = engine.enumerate_effective(max_degree)?;
    let entries = classes
        .into_iter()
        .map(|b| {
            let mu = match quasimap_coefficient(engine, &b).expect("enumerated classes are effective") {
                Coefficient::Value(x) => mirror_term(&x, &b),
                Coefficient::Unsupported(_) => None,
            };
            let mu_tw = restricted_twisted_limit(engine, &b)
                .expect("enumerated classes are effective")
                .value()
                .and_then(|k| mirror_term(k, &b));
            let agree = match (&mu, &mu_tw) {
                (Some(x), Some(y)) => compare(x, y),
                _ => None,
            };
            MirrorEntry {
                degree: novikov_degree(engine.presentation(), &b),
                class: b,
                mu,
                mu_tw,
                agree,
            }
        })
        .collect();
    Ok(MirrorReport { entries })
}
