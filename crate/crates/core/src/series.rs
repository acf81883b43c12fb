//! Laurent expressions in `z` and `κ` with coefficients in a [`SectorRing`].
//!
//! An element is stored as an exact fraction `N / Π (κ + k z)^{m_k}` where `N`
//! is a finite Laurent polynomial in `z, κ` with ring coefficients and every
//! `k` is a nonzero rational. The reduced form (no denominator factor divides
//! `N`) is unique, so equality is structural. Mixed factors `c + az + bκ`
//! have no finite expansion in either variable alone, which is why they are
//! kept in the denominator instead of being expanded.

use crate::cones::SupportSet;
use crate::presentation::RationalClass;
use crate::rational::{fmt_q, is_integer, Q};
use crate::ring::{class_atoms, GradedClass, SectorRing};
use crate::sectors::GroupElement;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("factor {0} has no z or κ term and is nilpotent")]
    NonInvertible(String),
    #[error("factor {0} has a nonzero constant term; its inverse is not a finite Laurent expression")]
    NotNilpotent(String),
    #[error("element has (κ + kz) denominators; expand or take the κ-limit first")]
    HasDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// A sector of the ambient quotient `X//T`.
    Ambient,
    /// A sector of the complete intersection `Y//T`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cycle {
    /// Multiples of the fundamental class `1_g`.
    Fundamental,
    /// Classes pushed forward from the substack cut out by `support`, of
    /// codimension `codim` in the sector.
    Pushforward { support: SupportSet, codim: i64 },
}

/// Which sector an element lives on and what it is a multiple of.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorTag {
    pub g: GroupElement,
    pub age: Q,
    pub side: Side,
    pub cycle: Cycle,
}

impl SectorTag {
    pub fn untwisted(k: usize, side: Side) -> Self {
        Self {
            g: GroupElement::identity(k),
            age: Q::zero(),
            side,
            cycle: Cycle::Fundamental,
        }
    }

    /// Extra degree carried by the cycle on top of the age.
    pub fn cycle_degree(&self) -> i64 {
        match self.cycle {
            Cycle::Fundamental => 0,
            Cycle::Pushforward { codim, .. } => codim,
        }
    }
}

/// `(z exponent, κ exponent)`.
pub type Exponents = (i64, i64);
type Laurent = BTreeMap<Exponents, GradedClass>;

fn laurent_add_term(acc: &mut Laurent, key: Exponents, c: &GradedClass) {
    if c.is_zero() {
        return;
    }
    let sum = match acc.get(&key) {
        Some(old) => old.add(c),
        None => c.clone(),
    };
    if sum.is_zero() {
        acc.remove(&key);
    } else {
        acc.insert(key, sum);
    }
}

fn laurent_add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (k, c) in b {
        laurent_add_term(&mut out, *k, c);
    }
    out
}

fn laurent_mul(ring: &SectorRing, a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for ((za, ka), ca) in a {
        for ((zb, kb), cb) in b {
            laurent_add_term(&mut out, (za + zb, ka + kb), &ring.mul(ca, cb));
        }
    }
    out
}

fn laurent_scale(a: &Laurent, s: &Q) -> Laurent {
    if s.is_zero() {
        return Laurent::new();
    }
    a.iter().map(|(k, c)| (*k, c.scale(s))).collect()
}

/// `(κ + kz)^e` as a Laurent polynomial with scalar coefficients.
fn binomial_power(ring: &SectorRing, k: &Q, e: u32) -> Laurent {
    let mut out = Laurent::new();
    out.insert((0, 0), ring.one());
    let mut f = Laurent::new();
    f.insert((0, 1), ring.one());
    f.insert((1, 0), ring.scalar(k.clone()));
    for _ in 0..e {
        out = laurent_mul(ring, &out, &f);
    }
    out
}

/// Exact quotient of `n` by `κ + kz`, if it divides.
fn divide_by_factor(n: &Laurent, k: &Q) -> Option<Laurent> {
    if n.is_empty() {
        return Some(Laurent::new());
    }
    // Coefficients of κ^j, each a Laurent polynomial in z.
    let mut by_kappa: BTreeMap<i64, BTreeMap<i64, GradedClass>> = BTreeMap::new();
    for ((z, kap), c) in n {
        by_kappa.entry(*kap).or_default().insert(*z, c.clone());
    }
    let lo = *by_kappa.keys().next().expect("nonempty");
    let hi = *by_kappa.keys().next_back().expect("nonempty");
    let coeff = |j: i64| by_kappa.get(&j).cloned().unwrap_or_default();
    let shift = |q: &BTreeMap<i64, GradedClass>| -> BTreeMap<i64, GradedClass> {
        q.iter().map(|(z, c)| (z + 1, c.scale(k))).collect()
    };
    let sub = |a: &BTreeMap<i64, GradedClass>, b: &BTreeMap<i64, GradedClass>| {
        let mut out = a.clone();
        for (z, c) in b {
            let v = out.get(z).map_or_else(|| c.neg(), |x| x.sub(c));
            if v.is_zero() {
                out.remove(z);
            } else {
                out.insert(*z, v);
            }
        }
        out
    };
    let mut quotient: BTreeMap<i64, BTreeMap<i64, GradedClass>> = BTreeMap::new();
    let mut q = coeff(hi);
    for j in (lo..hi).rev() {
        quotient.insert(j, q.clone());
        q = sub(&coeff(j), &shift(&q));
    }
    if !q.is_empty() {
        return None;
    }
    let mut out = Laurent::new();
    for (kap, zs) in quotient {
        for (z, c) in zs {
            if !c.is_zero() {
                out.insert((z, kap), c);
            }
        }
    }
    Some(out)
}

/// A linear factor `c + a z + b κ` with `c` a ring class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFactor {
    pub c: GradedClass,
    pub z: Q,
    pub kappa: Q,
}

impl LinearFactor {
    pub fn new(c: GradedClass, z: Q, kappa: Q) -> Self {
        Self { c, z, kappa }
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.c.is_zero() {
            parts.push(crate::ring::render_class(&self.c));
        }
        if !self.kappa.is_zero() {
            parts.push(scaled_symbol(&self.kappa, "kappa"));
        }
        if !self.z.is_zero() {
            parts.push(scaled_symbol(&self.z, "z"));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        write!(f, "({})", parts.join(" + ").replace("+ -", "- "))
    }
}

fn scaled_symbol(k: &Q, sym: &str) -> String {
    if k.is_one() {
        sym.to_string()
    } else if *k == -Q::one() {
        format!("-{sym}")
    } else {
        format!("{} {sym}", fmt_q(k))
    }
}

/// Outcome of `κ → 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KappaLimit {
    Exists(Series),
    /// The limit has poles in κ; carries the principal part (all negative κ-powers).
    DoesNotExist(Series),
}

impl KappaLimit {
    pub fn exists(&self) -> bool {
        matches!(self, KappaLimit::Exists(_))
    }

    pub fn value(&self) -> Option<&Series> {
        match self {
            KappaLimit::Exists(s) => Some(s),
            KappaLimit::DoesNotExist(_) => None,
        }
    }
}

/// An element `N / Π(κ + kz)^m` over a sector ring, in reduced form.
#[derive(Debug, Clone)]
pub struct Series {
    ring: Arc<SectorRing>,
    tag: SectorTag,
    num: Laurent,
    den: BTreeMap<Q, u32>,
}

/// Elements compare by tag and reduced form; the rings are identified by the tag.
impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.num == other.num && self.den == other.den
    }
}

impl Eq for Series {}

impl Series {
    fn build(ring: Arc<SectorRing>, tag: SectorTag, num: Laurent, den: BTreeMap<Q, u32>) -> Self {
        let mut s = Self { ring, tag, num, den };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.num.retain(|_, c| !c.is_zero());
        if self.num.is_empty() {
            self.den.clear();
            return;
        }
        for (k, m) in self.den.iter_mut() {
            while *m > 0 {
                match divide_by_factor(&self.num, k) {
                    Some(q) => {
                        self.num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, m| *m > 0);
    }

    pub fn zero(ring: Arc<SectorRing>, tag: SectorTag) -> Self {
        Self::build(ring, tag, Laurent::new(), BTreeMap::new())
    }

    pub fn one(ring: Arc<SectorRing>, tag: SectorTag) -> Self {
        let one = ring.one();
        Self::monomial(ring, tag, one, 0, 0)
    }

    /// `class · z^z_exp · κ^kappa_exp`.
    pub fn monomial(ring: Arc<SectorRing>, tag: SectorTag, class: GradedClass, z_exp: i64, kappa_exp: i64) -> Self {
        let class = ring.image_of(&class);
        let mut num = Laurent::new();
        laurent_add_term(&mut num, (z_exp, kappa_exp), &class);
        Self::build(ring, tag, num, BTreeMap::new())
    }

    pub fn scalar(ring: Arc<SectorRing>, tag: SectorTag, s: Q) -> Self {
        let c = ring.scalar(s);
        Self::monomial(ring, tag, c, 0, 0)
    }

    /// `class · s` for an element `s` over ℚ.
    fn lift(ring: &Arc<SectorRing>, tag: &SectorTag, class: &GradedClass, s: &Series) -> Self {
        let num = s.num.iter().map(|(k, c)| (*k, class.scale(&c.constant()))).collect();
        Self::build(ring.clone(), tag.clone(), num, s.den.clone())
    }

    /// The factor itself, as an element.
    pub fn from_factor(ring: Arc<SectorRing>, tag: SectorTag, f: &LinearFactor) -> Self {
        let mut num = Laurent::new();
        laurent_add_term(&mut num, (0, 0), &ring.image_of(&f.c));
        laurent_add_term(&mut num, (1, 0), &ring.scalar(f.z.clone()));
        laurent_add_term(&mut num, (0, 1), &ring.scalar(f.kappa.clone()));
        Self::build(ring, tag, num, BTreeMap::new())
    }

    /// Exact inverse of `c + az + bκ`, using nilpotency of `c`.
    pub fn invert(ring: Arc<SectorRing>, tag: SectorTag, f: &LinearFactor) -> Result<Self, SeriesError> {
        let c = ring.image_of(&f.c);
        if f.z.is_zero() && f.kappa.is_zero() {
            return Err(SeriesError::NonInvertible(f.to_string()));
        }
        if !c.constant().is_zero() {
            return Err(SeriesError::NotNilpotent(f.to_string()));
        }
        // powers (-c)^m until they vanish
        let minus_c = c.neg();
        let mut powers = vec![ring.one()];
        loop {
            let next = ring.mul(powers.last().expect("nonempty"), &minus_c);
            if next.is_zero() {
                break;
            }
            powers.push(next);
        }
        let mut num = Laurent::new();
        let mut den = BTreeMap::new();
        match (f.z.is_zero(), f.kappa.is_zero()) {
            (false, true) | (true, false) => {
                // (az)^{-1} Σ (-c/(az))^m, or the same in κ
                let a = if f.kappa.is_zero() { &f.z } else { &f.kappa };
                let a_inv = a.recip();
                let mut scale = a_inv.clone();
                for (m, p) in powers.iter().enumerate() {
                    let e = -(m as i64) - 1;
                    let key = if f.kappa.is_zero() { (e, 0) } else { (0, e) };
                    laurent_add_term(&mut num, key, &p.scale(&scale));
                    scale *= &a_inv;
                }
            }
            (false, false) => {
                // Σ (-c)^m b^{-m-1} (κ + kz)^{-m-1}, over the common denominator
                let k = &f.z / &f.kappa;
                let top = powers.len() as u32;
                let b_inv = f.kappa.recip();
                let mut scale = b_inv.clone();
                for (m, p) in powers.iter().enumerate() {
                    let mut term = Laurent::new();
                    term.insert((0, 0), p.scale(&scale));
                    let term = laurent_mul(&ring, &term, &binomial_power(&ring, &k, top - 1 - m as u32));
                    num = laurent_add(&num, &term);
                    scale *= &b_inv;
                }
                den.insert(k, top);
            }
            (true, true) => unreachable!(),
        }
        Ok(Self::build(ring, tag, num, den))
    }

    pub fn ring(&self) -> &Arc<SectorRing> {
        &self.ring
    }

    pub fn tag(&self) -> &SectorTag {
        &self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn has_denominator(&self) -> bool {
        !self.den.is_empty()
    }

    /// Numerator terms in canonical order.
    pub fn numerator(&self) -> impl Iterator<Item = (&Exponents, &GradedClass)> {
        self.num.iter()
    }

    /// Denominator `(k, m)` pairs, meaning `(κ + kz)^m`.
    pub fn denominator(&self) -> impl Iterator<Item = (&Q, &u32)> {
        self.den.iter()
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.tag, other.tag, "arithmetic between different sectors");
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring.hilbert_function() == other.ring.hilbert_function(),
            "arithmetic between different rings"
        );
    }

    fn expanded_over(&self, den: &BTreeMap<Q, u32>) -> Laurent {
        let mut n = self.num.clone();
        for (k, m) in den {
            let have = self.den.get(k).copied().unwrap_or(0);
            n = laurent_mul(&self.ring, &n, &binomial_power(&self.ring, k, m - have));
        }
        n
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut den = self.den.clone();
        for (k, m) in &other.den {
            let e = den.entry(k.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let num = laurent_add(&self.expanded_over(&den), &other.expanded_over(&den));
        Self::build(self.ring.clone(), self.tag.clone(), num, den)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::build(self.ring.clone(), self.tag.clone(), laurent_scale(&self.num, s), self.den.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut den = self.den.clone();
        for (k, m) in &other.den {
            *den.entry(k.clone()).or_insert(0) += m;
        }
        let num = laurent_mul(&self.ring, &self.num, &other.num);
        Self::build(self.ring.clone(), self.tag.clone(), num, den)
    }

    /// Multiplies by `z^dz κ^dk`.
    pub fn shifted(&self, dz: i64, dk: i64) -> Self {
        let num = self.num.iter().map(|((z, k), c)| ((z + dz, k + dk), c.clone())).collect();
        Self::build(self.ring.clone(), self.tag.clone(), num, self.den.clone())
    }

    /// Image in another ring with the same generators and more relations.
    pub fn mapped_to(&self, ring: Arc<SectorRing>, side: Side) -> Self {
        let num = self.num.iter().map(|(k, c)| (*k, ring.image_of(c))).collect();
        let tag = SectorTag {
            side,
            ..self.tag.clone()
        };
        Self::build(ring, tag, num, self.den.clone())
    }

    /// Reinterprets the element as the pushforward of itself from a substack.
    pub fn pushed_forward(&self, support: SupportSet, codim: i64) -> Self {
        let tag = SectorTag {
            cycle: Cycle::Pushforward { support, codim },
            ..self.tag.clone()
        };
        Self::build(self.ring.clone(), tag, self.num.clone(), self.den.clone())
    }

    pub fn min_kappa_exponent(&self) -> Option<i64> {
        self.num.keys().map(|(_, k)| *k).min()
    }

    /// `lim_{κ→0}`. Denominators `κ + kz` are units at κ = 0, so the limit
    /// exists exactly when the reduced numerator has no negative κ-powers.
    pub fn kappa_limit(&self) -> KappaLimit {
        let lowest = self.min_kappa_exponent().unwrap_or(0);
        if lowest >= 0 {
            let mut scale = Q::one();
            let mut dz = 0i64;
            for (k, m) in &self.den {
                for _ in 0..*m {
                    scale /= k;
                }
                dz -= i64::from(*m);
            }
            let num = self
                .num
                .iter()
                .filter(|((_, kap), _)| *kap == 0)
                .map(|((z, _), c)| ((z + dz, 0), c.scale(&scale)))
                .collect();
            return KappaLimit::Exists(Self::build(self.ring.clone(), self.tag.clone(), num, BTreeMap::new()));
        }
        // 1/D expanded in κ through order -lowest-1
        let order = -lowest - 1;
        let mut inv = Laurent::new();
        inv.insert((0, 0), self.ring.one());
        for (k, m) in &self.den {
            let mut single = Laurent::new();
            let mut coeff = k.recip();
            for j in 0..=order {
                single.insert((-j - 1, j), self.ring.scalar(coeff.clone()));
                coeff = -(coeff / k);
            }
            for _ in 0..*m {
                inv = laurent_mul(&self.ring, &inv, &single);
                inv.retain(|(_, kap), _| *kap <= order);
            }
        }
        let mut principal = laurent_mul(&self.ring, &self.num, &inv);
        principal.retain(|(_, kap), _| *kap < 0);
        KappaLimit::DoesNotExist(Self::build(self.ring.clone(), self.tag.clone(), principal, BTreeMap::new()))
    }

    /// The `z^e` slice, as a polynomial in κ. Only defined without denominators.
    pub fn z_coefficient(&self, e: i64) -> Result<BTreeMap<i64, GradedClass>, SeriesError> {
        if self.has_denominator() {
            return Err(SeriesError::HasDenominator);
        }
        Ok(self
            .num
            .iter()
            .filter(|((z, _), _)| *z == e)
            .map(|((_, k), c)| (*k, c.clone()))
            .collect())
    }

    /// Terms with `z^e`, `e ≥ 0`. Only defined without denominators.
    pub fn nonnegative_z_part(&self) -> Result<Self, SeriesError> {
        if self.has_denominator() {
            return Err(SeriesError::HasDenominator);
        }
        let num = self.num.iter().filter(|((z, _), _)| *z >= 0).map(|(k, c)| (*k, c.clone())).collect();
        Ok(Self::build(self.ring.clone(), self.tag.clone(), num, BTreeMap::new()))
    }

    /// Canonical text: numerator terms by z-exponent, then κ-exponent, then monomial.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for ((z, k), c) in &self.num {
            for (coeff, mono) in class_atoms(c) {
                let mut factors = Vec::new();
                let mag = coeff.abs();
                if !mag.is_one() {
                    factors.push(fmt_q(&mag));
                }
                if !mono.is_empty() {
                    factors.push(mono);
                }
                factors.extend(power("z", *z));
                factors.extend(power("kappa", *k));
                if factors.is_empty() {
                    factors.push("1".to_string());
                }
                pieces.push((coeff.is_negative(), factors.join(" ")));
            }
        }
        let mut text = String::new();
        for (i, (neg, t)) in pieces.iter().enumerate() {
            match (i, neg) {
                (0, true) => text.push('-'),
                (0, false) => {}
                (_, true) => text.push_str(" - "),
                (_, false) => text.push_str(" + "),
            }
            text.push_str(t);
        }
        let suffix = match (&self.tag.cycle, self.tag.g.is_identity()) {
            (Cycle::Pushforward { .. }, _) => Some("[F]".to_string()),
            (Cycle::Fundamental, false) => Some(format!("1_{}", self.tag.g)),
            (Cycle::Fundamental, true) => None,
        };
        let grouped = pieces.len() > 1 && (suffix.is_some() || self.has_denominator());
        if grouped {
            text = format!("({text})");
        }
        if self.has_denominator() {
            let den: Vec<String> = self
                .den
                .iter()
                .map(|(k, m)| {
                    let f = LinearFactor::new(GradedClass::zero(), k.clone(), Q::one()).to_string();
                    if *m == 1 {
                        f
                    } else {
                        format!("{f}^{m}")
                    }
                })
                .collect();
            text = format!("{text} / {}", den.join(" "));
        }
        match suffix {
            Some(s) if text == "1" => s,
            Some(s) => format!("{text} {s}"),
            None => text,
        }
    }
}

fn power(sym: &str, e: i64) -> Option<String> {
    match e {
        0 => None,
        1 => Some(sym.to_string()),
        _ => Some(format!("{sym}^{e}")),
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The factors of `C°(β, w)` (or `C(β, w)` when `circ` is false), split
/// into numerator and denominator lists of `c_1(L_w) [+ κ] + kz`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFactor {
    pub numerator: Vec<LinearFactor>,
    pub denominator: Vec<LinearFactor>,
}

impl CFactor {
    /// Exact value of the product, or of its inverse.
    ///
    /// All factors share the class `c = c_1(L_w)`, so the product is
    /// expanded as `Σ_m c^m S_m` with scalar coefficients `S_m` in `z, κ`;
    /// only `m` up to the nilpotency order of `c` is ever needed.
    pub fn evaluate(&self, ring: &Arc<SectorRing>, tag: &SectorTag, inverse: bool) -> Result<Series, SeriesError> {
        let (up, down) = if inverse {
            (&self.denominator, &self.numerator)
        } else {
            (&self.numerator, &self.denominator)
        };
        let Some(first) = up.first().or(down.first()) else {
            return Ok(Series::one(ring.clone(), tag.clone()));
        };
        let c = ring.image_of(&first.c);
        debug_assert!(up.iter().chain(down).all(|f| ring.image_of(&f.c) == c));
        if !c.constant().is_zero() {
            return Err(SeriesError::NotNilpotent(first.to_string()));
        }
        let mut powers = vec![ring.one()];
        loop {
            let next = ring.mul(powers.last().expect("nonempty"), &c);
            if next.is_zero() {
                break;
            }
            powers.push(next);
        }
        let (sr, st) = (scalar_ring(), SectorTag::untwisted(0, Side::Ambient));
        let scalar_part = |f: &LinearFactor| LinearFactor::new(GradedClass::zero(), f.z.clone(), f.kappa.clone());
        let mut s: Vec<Series> = (0..powers.len())
            .map(|m| {
                if m == 0 {
                    Series::one(sr.clone(), st.clone())
                } else {
                    Series::zero(sr.clone(), st.clone())
                }
            })
            .collect();
        for f in up {
            // (c + u) Σ c^m S_m
            let u = Series::from_factor(sr.clone(), st.clone(), &scalar_part(f));
            s = (0..s.len())
                .map(|m| {
                    let t = s[m].mul(&u);
                    if m > 0 {
                        t.add(&s[m - 1])
                    } else {
                        t
                    }
                })
                .collect();
        }
        for f in down {
            // (c + u)^{-1} = Σ_j (-c)^j u^{-j-1}
            let u_inv = Series::invert(sr.clone(), st.clone(), &scalar_part(f)).map_err(|_| SeriesError::NonInvertible(f.to_string()))?;
            let mut q = vec![u_inv.clone()];
            while q.len() < s.len() {
                q.push(q.last().expect("nonempty").mul(&u_inv).neg());
            }
            s = (0..s.len())
                .map(|m| (0..=m).fold(Series::zero(sr.clone(), st.clone()), |acc, j| acc.add(&s[m - j].mul(&q[j]))))
                .collect();
        }
        Ok(powers
            .iter()
            .zip(&s)
            .fold(Series::zero(ring.clone(), tag.clone()), |acc, (cm, sm)| acc.add(&Series::lift(ring, tag, cm, sm))))
    }
}

/// `ℚ`, as a ring with no generators.
fn scalar_ring() -> Arc<SectorRing> {
    static RING: OnceLock<Arc<SectorRing>> = OnceLock::new();
    RING.get_or_init(|| Arc::new(SectorRing::new(0, vec![], None).expect("ℚ is finite")))
        .clone()
}

pub fn c_factor(b: &RationalClass, w: &[i64], ring: &SectorRing, kappa_shift: bool, circ: bool) -> CFactor {
    let p = crate::presentation::pairing(b, w).expect("class length matches weight length");
    let c = ring.linear(w);
    let kap = if kappa_shift { Q::one() } else { Q::zero() };
    let factor = |k: Q| LinearFactor::new(c.clone(), k, kap.clone());
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    if p.is_positive() {
        let mut k = p.clone();
        while k.is_positive() {
            denominator.push(factor(k.clone()));
            k -= Q::one();
        }
    } else {
        if !circ && is_integer(&p) && p.is_negative() {
            numerator.push(factor(Q::zero()));
        }
        let mut k = &p + Q::one();
        while k.is_negative() {
            numerator.push(factor(k.clone()));
            k += Q::one();
        }
    }
    CFactor {
        numerator,
        denominator,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::ring::Poly;
    use proptest::prelude::*;

    /// ℚ[H]/(H^4)
    fn h_ring(top: i64) -> Arc<SectorRing> {
        let mut rel = Poly::new();
        rel.insert(vec![4], Q::one());
        Arc::new(SectorRing::new(1, vec![rel], Some(top)).unwrap())
    }

    fn tag() -> SectorTag {
        SectorTag::untwisted(1, Side::Ambient)
    }

    fn h(ring: &SectorRing, e: u32) -> GradedClass {
        ring.pow(&ring.linear(&[1]), e)
    }

    #[test]
    fn inverse_of_z() {
        let r = h_ring(3);
        let f = LinearFactor::new(GradedClass::zero(), qi(1), qi(0));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        assert_eq!(inv.render(), "z^-1");
    }

    #[test]
    fn inverse_of_h_plus_kappa() {
        let r = h_ring(3);
        let f = LinearFactor::new(h(&r, 1), qi(0), qi(1));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        // κ^{-1} − Hκ^{-2} + H²κ^{-3} − H³κ^{-4}
        let mut expect = Series::zero(r.clone(), tag());
        for e in 0..4u32 {
            let sign = if e % 2 == 0 { qi(1) } else { qi(-1) };
            let term = Series::monomial(r.clone(), tag(), h(&r, e).scale(&sign), 0, -(e as i64) - 1);
            expect = expect.add(&term);
        }
        assert_eq!(inv, expect);
        let product = inv.mul(&Series::from_factor(r.clone(), tag(), &f));
        assert_eq!(product, Series::one(r, tag()));
    }

    #[test]
    fn mixed_inverse_keeps_one_denominator() {
        let r = h_ring(3);
        let f = LinearFactor::new(h(&r, 1), qi(2), qi(1));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        assert_eq!(inv.denominator().collect::<Vec<_>>(), vec![(&qi(2), &4)]);
        assert_eq!(inv.mul(&Series::from_factor(r.clone(), tag(), &f)), Series::one(r, tag()));
    }

    #[test]
    fn pure_nilpotent_is_not_invertible() {
        let r = h_ring(3);
        let f = LinearFactor::new(h(&r, 1), qi(0), qi(0));
        assert!(matches!(Series::invert(r, tag(), &f), Err(SeriesError::NonInvertible(_))));
    }

    #[test]
    fn limit_of_h3_over_h_plus_kappa() {
        let r = h_ring(3);
        let f = LinearFactor::new(h(&r, 1), qi(0), qi(1));
        let x = Series::monomial(r.clone(), tag(), h(&r, 3), 0, 0).mul(&Series::invert(r.clone(), tag(), &f).unwrap());
        assert_eq!(x.render(), "t^3 kappa^-1");
        match x.kappa_limit() {
            KappaLimit::DoesNotExist(pp) => assert_eq!(pp, x),
            KappaLimit::Exists(_) => panic!("H³/(H+κ) has a pole"),
        }
        let y = x.mapped_to(Arc::new(r.truncated(2)), Side::Y);
        assert!(y.is_zero());
        assert!(y.kappa_limit().value().unwrap().is_zero());
    }

    #[test]
    fn limit_through_a_denominator() {
        // 1/(κ + 2z) → 1/(2z); κ/(κ + 2z)^2 → 0; 1/(κ(κ + z)) has principal part κ^{-1} z^{-1}
        let r = h_ring(3);
        let f = LinearFactor::new(GradedClass::zero(), qi(2), qi(1));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        assert_eq!(inv.kappa_limit().value().unwrap().render(), "1/2 z^-1");
        let sq = inv.mul(&inv).shifted(0, 1);
        assert!(sq.kappa_limit().value().unwrap().is_zero());
        let g = LinearFactor::new(GradedClass::zero(), qi(1), qi(1));
        let pole = Series::invert(r.clone(), tag(), &g).unwrap().shifted(0, -1);
        match pole.kappa_limit() {
            KappaLimit::DoesNotExist(pp) => assert_eq!(pp.render(), "z^-1 kappa^-1"),
            KappaLimit::Exists(_) => panic!("pole expected"),
        }
    }

    #[test]
    fn z_slices() {
        let r = h_ring(3);
        let x = Series::scalar(r.clone(), tag(), q(1, 6)).shifted(-3, 0);
        assert_eq!(x.z_coefficient(-3).unwrap()[&0].constant(), q(1, 6));
        assert!(x.z_coefficient(-1).unwrap().is_empty());
        let f = LinearFactor::new(h(&r, 1), qi(1), qi(0));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        assert_eq!(inv.z_coefficient(-1).unwrap()[&0], r.one());
        assert_eq!(inv.z_coefficient(-2).unwrap()[&0], h(&r, 1).neg());
    }

    #[test]
    fn c_factor_branches() {
        let r = h_ring(3);
        let b = RationalClass::from_ints(&[3]);
        let cf = c_factor(&b, &[1], &r, false, false);
        assert_eq!(cf.denominator.iter().map(|f| f.z.clone()).collect::<Vec<_>>(), vec![qi(3), qi(2), qi(1)]);
        assert!(cf.numerator.is_empty());
        let empty = c_factor(&RationalClass::zero(1), &[1], &r, true, false);
        assert!(empty.numerator.is_empty() && empty.denominator.is_empty());
        // integer negative pairing, not circ: extra c (+κ) factor
        let b = RationalClass::from_ints(&[-2]);
        let cf = c_factor(&b, &[1], &r, true, false);
        assert_eq!(cf.numerator.iter().map(|f| f.z.clone()).collect::<Vec<_>>(), vec![qi(0), qi(-1)]);
        assert!(cf.numerator.iter().all(|f| f.kappa == qi(1)));
        let circ = c_factor(&b, &[1], &r, true, true);
        assert_eq!(circ.numerator.len(), 1);
        // fractional pairing: k steps through the same coset
        let cf = c_factor(&RationalClass(vec![q(5, 3)]), &[1], &r, false, false);
        assert_eq!(cf.denominator.iter().map(|f| f.z.clone()).collect::<Vec<_>>(), vec![q(5, 3), q(2, 3)]);
    }

    #[test]
    fn rendering() {
        let r = h_ring(3);
        let x = Series::monomial(r.clone(), tag(), h(&r, 1).scale(&qi(-2)), 1, 0)
            .add(&Series::scalar(r.clone(), tag(), qi(1)));
        assert_eq!(x.render(), "1 - 2 t z");
        let f = Series::scalar(r.clone(), tag(), q(1, 6)).shifted(-3, 0).pushed_forward(SupportSet::empty(), 2);
        assert_eq!(f.render(), "1/6 z^-3 [F]");
        let f = LinearFactor::new(GradedClass::zero(), q(-1, 2), qi(1));
        let inv = Series::invert(r.clone(), tag(), &f).unwrap();
        assert_eq!(inv.render(), "1 / (kappa - 1/2 z)");
    }

    fn arb_factor() -> impl Strategy<Value = (i64, i64, i64)> {
        (-3i64..=3, -3i64..=3, -3i64..=3).prop_filter("invertible", |(_, a, b)| *a != 0 || *b != 0)
    }

    fn arb_element() -> impl Strategy<Value = Vec<((i64, i64), i64, u32)>> {
        prop::collection::vec(((-2i64..=2, -2i64..=2), -3i64..=3, 0u32..4), 0..4)
    }

    fn element(r: &Arc<SectorRing>, terms: &[((i64, i64), i64, u32)], den: Option<(i64, i64, i64)>) -> Series {
        let mut x = Series::zero(r.clone(), tag());
        for ((z, k), c, e) in terms {
            x = x.add(&Series::monomial(r.clone(), tag(), h(r, *e).scale(&qi(*c)), *z, *k));
        }
        if let Some((c, a, b)) = den {
            let f = LinearFactor::new(r.linear(&[c]), qi(a), qi(b));
            x = x.mul(&Series::invert(r.clone(), tag(), &f).unwrap());
        }
        x
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_times_factor_is_one((c, a, b) in arb_factor()) {
            let r = h_ring(3);
            let f = LinearFactor::new(r.linear(&[c]), qi(a), qi(b));
            let inv = Series::invert(r.clone(), tag(), &f).unwrap();
            prop_assert_eq!(inv.mul(&Series::from_factor(r.clone(), tag(), &f)), Series::one(r, tag()));
        }

        #[test]
        fn ring_axioms(
            x in arb_element(), y in arb_element(), w in arb_element(),
            dx in prop::option::of(arb_factor()), dy in prop::option::of(arb_factor()),
        ) {
            let r = h_ring(3);
            let (x, y, w) = (element(&r, &x, dx), element(&r, &y, dy), element(&r, &w, None));
            prop_assert_eq!(x.mul(&y).mul(&w), x.mul(&y.mul(&w)));
            prop_assert_eq!(x.mul(&y.add(&w)), x.mul(&y).add(&x.mul(&w)));
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert!(x.sub(&x).is_zero());
        }

        #[test]
        fn limit_is_additive_and_kappa_free_linear(
            x in arb_element(), y in arb_element(), w in arb_element(),
            dx in prop::option::of(arb_factor()),
        ) {
            let r = h_ring(3);
            let (x, y) = (element(&r, &x, dx), element(&r, &y, dx));
            let w: Vec<_> = w.into_iter().map(|((z, _), c, e)| ((z, 0), c, e)).collect();
            let w = element(&r, &w, None);
            if let (Some(lx), Some(ly)) = (x.kappa_limit().value().cloned(), y.kappa_limit().value().cloned()) {
                prop_assert_eq!(x.add(&y).kappa_limit().value().cloned(), Some(lx.add(&ly)));
                prop_assert_eq!(x.mul(&w).kappa_limit().value().cloned(), Some(lx.mul(&w)));
            }
        }
    }
}
