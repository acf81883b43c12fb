//! Finite-dimensional graded quotients `ℚ[t_1..t_k] / I`.
//!
//! Every generator `t_a` has degree one. `I` is generated by homogeneous
//! relations (products of linear forms coming from the cone combinatorics)
//! plus, optionally, every monomial of degree above a truncation bound. The
//! quotient is computed degree by degree with exact row reduction, so normal
//! forms are canonical and equality is structural.

use crate::linalg::rref;
use crate::rational::{fmt_q, Q};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Exponent vector of a monomial in `t_1..t_k`.
pub type Mono = Vec<u32>;

/// A polynomial in `t_1..t_k` that has not been reduced modulo anything.
pub type Poly = BTreeMap<Mono, Q>;

const MAX_DEGREE: usize = 96;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("relation {0} is not homogeneous")]
    Inhomogeneous(usize),
    #[error("quotient is not finite-dimensional below degree {MAX_DEGREE}")]
    NotFinite,
}

/// An element of a [`SectorRing`], kept in normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct GradedClass {
    terms: BTreeMap<Mono, Q>,
}

impl GradedClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    /// Cohomological degrees (with `deg t_a = 1`) that carry a nonzero piece.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|m| m.iter().sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Coefficient of the unit, i.e. the degree-zero piece.
    pub fn constant(&self) -> Q {
        self.terms
            .iter()
            .find(|(m, _)| m.iter().all(|&e| e == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Sum of two normal forms is again a normal form.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn as_scalar(&self) -> Option<Q> {
        match self.terms.iter().next() {
            Some((m, c)) if self.terms.len() == 1 && m.iter().all(|&e| e == 0) => Some(c.clone()),
            _ => None,
        }
    }

    fn as_poly(&self) -> &Poly {
        &self.terms
    }
}

struct Piece {
    monos: Vec<Mono>,
    index: HashMap<Mono, usize>,
    /// Reduced echelon rows of `I_d`, with their pivot column.
    rows: Vec<(usize, Vec<Q>)>,
    standard: Vec<Mono>,
}

pub struct SectorRing {
    nvars: usize,
    relations: Vec<Poly>,
    truncation: Option<i64>,
    pieces: Vec<Piece>,
}

impl fmt::Debug for SectorRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SectorRing")
            .field("nvars", &self.nvars)
            .field("truncation", &self.truncation)
            .field("hilbert", &self.hilbert_function())
            .finish()
    }
}

/// Monomials of total degree `d` in `n` variables, largest first. A monomial
/// is larger when it has a higher exponent in a later variable, so pivots
/// eliminate `t_k` before `t_1`.
fn monomials(n: usize, d: u32) -> Vec<Mono> {
    fn go(n: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(n, left - e, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    go(n, d, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.iter().rev().cmp(a.iter().rev()));
    out
}

pub fn mono_degree(m: &Mono) -> u32 {
    m.iter().sum()
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let e = out.entry(mono_mul(ma, mb)).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The linear form `sum_a w_a t_a`.
pub fn linear_form(weight: &[i64]) -> Poly {
    let n = weight.len();
    let mut p = Poly::new();
    for (a, &w) in weight.iter().enumerate() {
        if w != 0 {
            let mut m = vec![0; n];
            m[a] = 1;
            p.insert(m, Q::from_integer(w.into()));
        }
    }
    p
}

pub fn product_of_forms(nvars: usize, forms: &[Vec<i64>]) -> Poly {
    let mut p = Poly::new();
    p.insert(vec![0; nvars], Q::one());
    for w in forms {
        p = poly_mul(&p, &linear_form(w));
    }
    p
}

fn homogeneous_degree(p: &Poly) -> Option<Option<u32>> {
    let mut degs = p.keys().map(mono_degree);
    match degs.next() {
        None => Some(None),
        Some(d) => degs.all(|e| e == d).then_some(Some(d)),
    }
}

impl SectorRing {
    /// Builds `ℚ[t_1..t_nvars] / (relations + degree > truncation)`.
    pub fn new(nvars: usize, relations: Vec<Poly>, truncation: Option<i64>) -> Result<Self, RingError> {
        let mut gens: Vec<(u32, Poly)> = Vec::new();
        for (i, r) in relations.iter().enumerate() {
            match homogeneous_degree(r).ok_or(RingError::Inhomogeneous(i))? {
                None => {}
                Some(d) => gens.push((d, r.clone())),
            }
        }
        let mut pieces = Vec::new();
        for d in 0..=MAX_DEGREE as u32 {
            if truncation.is_some_and(|t| i64::from(d) > t) {
                break;
            }
            let monos = monomials(nvars, d);
            let index: HashMap<Mono, usize> =
                monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut span: Vec<Vec<Q>> = Vec::new();
            for (e, g) in &gens {
                if *e > d {
                    continue;
                }
                for m in monomials(nvars, d - e) {
                    let mut row = vec![Q::zero(); monos.len()];
                    for (gm, c) in g {
                        row[index[&mono_mul(&m, gm)]] += c;
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        span.push(row);
                    }
                }
            }
            let pivots = rref(&mut span);
            let rows: Vec<(usize, Vec<Q>)> = pivots.iter().copied().zip(span).collect();
            let standard: Vec<Mono> = monos
                .iter()
                .enumerate()
                .filter(|(i, _)| !pivots.contains(i))
                .map(|(_, m)| m.clone())
                .collect();
            if standard.is_empty() {
                return Ok(Self {
                    nvars,
                    relations,
                    truncation,
                    pieces,
                });
            }
            pieces.push(Piece {
                monos,
                index,
                rows,
                standard,
            });
        }
        if truncation.is_some() {
            Ok(Self {
                nvars,
                relations,
                truncation,
                pieces,
            })
        } else {
            Err(RingError::NotFinite)
        }
    }

    /// Same relations with everything above degree `d` killed as well.
    pub fn truncated(&self, d: i64) -> Self {
        let t = self.truncation.map_or(d, |old| old.min(d));
        Self::new(self.nvars, self.relations.clone(), Some(t))
            .expect("truncation of a finite ring is finite")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    /// Highest degree with a nonzero piece; `-1` for the zero ring.
    pub fn top_degree(&self) -> i64 {
        self.pieces.len() as i64 - 1
    }

    pub fn is_zero_ring(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn hilbert_function(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.standard.len()).collect()
    }

    pub fn basis(&self) -> Vec<Mono> {
        self.pieces.iter().flat_map(|p| p.standard.clone()).collect()
    }

    pub fn reduce(&self, p: &Poly) -> GradedClass {
        let mut by_degree: BTreeMap<u32, Vec<(&Mono, &Q)>> = BTreeMap::new();
        for (m, c) in p {
            if !c.is_zero() {
                by_degree.entry(mono_degree(m)).or_default().push((m, c));
            }
        }
        let mut terms = BTreeMap::new();
        for (d, part) in by_degree {
            let Some(piece) = self.pieces.get(d as usize) else {
                continue;
            };
            let mut v = vec![Q::zero(); piece.monos.len()];
            for (m, c) in part {
                v[piece.index[m]] += c;
            }
            for (pivot, row) in &piece.rows {
                if !v[*pivot].is_zero() {
                    let f = v[*pivot].clone();
                    for (x, r) in v.iter_mut().zip(row) {
                        *x -= r * &f;
                    }
                }
            }
            for (i, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    terms.insert(piece.monos[i].clone(), c);
                }
            }
        }
        GradedClass { terms }
    }

    pub fn zero(&self) -> GradedClass {
        GradedClass::zero()
    }

    pub fn scalar(&self, s: Q) -> GradedClass {
        let mut p = Poly::new();
        p.insert(vec![0; self.nvars], s);
        self.reduce(&p)
    }

    pub fn one(&self) -> GradedClass {
        self.scalar(Q::one())
    }

    /// First Chern class of the line bundle of weight `w`.
    pub fn linear(&self, w: &[i64]) -> GradedClass {
        self.reduce(&linear_form(w))
    }

    pub fn mul(&self, a: &GradedClass, b: &GradedClass) -> GradedClass {
        if a.is_zero() || b.is_zero() {
            return GradedClass::zero();
        }
        // normal forms stay normal under scaling
        if let Some(s) = a.as_scalar() {
            return b.scale(&s);
        }
        if let Some(s) = b.as_scalar() {
            return a.scale(&s);
        }
        self.reduce(&poly_mul(a.as_poly(), b.as_poly()))
    }

    pub fn pow(&self, a: &GradedClass, e: u32) -> GradedClass {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Re-reduces a class coming from a ring with fewer relations.
    pub fn image_of(&self, a: &GradedClass) -> GradedClass {
        self.reduce(a.as_poly())
    }

    pub fn render(&self, a: &GradedClass) -> String {
        render_class(a)
    }
}

fn render_mono(m: &Mono) -> String {
    let n = m.len();
    m.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let v = if n == 1 { "t".to_string() } else { format!("t{}", i + 1) };
            if e == 1 {
                v
            } else {
                format!("{v}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One `(coefficient, monomial text)` pair per term, in canonical order.
pub fn class_atoms(a: &GradedClass) -> Vec<(Q, String)> {
    let mut terms: Vec<(&Mono, &Q)> = a.terms.iter().collect();
    terms.sort_by(|(x, _), (y, _)| mono_degree(x).cmp(&mono_degree(y)).then_with(|| y.cmp(x)));
    terms
        .into_iter()
        .map(|(m, c)| (c.clone(), render_mono(m)))
        .collect()
}

pub fn render_class(a: &GradedClass) -> String {
    if a.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, m)) in class_atoms(a).into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i > 0 {
            out.push_str(if neg { " - " } else { " + " });
        } else if neg {
            out.push('-');
        }
        match (mag.is_one(), m.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&m),
            (false, true) => out.push_str(&fmt_q(&mag)),
            (false, false) => {
                out.push_str(&fmt_q(&mag));
                out.push(' ');
                out.push_str(&m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    /// ℚ[t1,t2] / (t2, t1^3 (3 t1 + t2)): the untwisted ring of P(1,1,1,3).
    fn p1113() -> SectorRing {
        SectorRing::new(
            2,
            vec![
                product_of_forms(2, &[vec![0, 1]]),
                product_of_forms(2, &[vec![1, 0], vec![1, 0], vec![1, 0], vec![3, 1]]),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn hilbert_function_of_p1113() {
        let r = p1113();
        assert_eq!(r.hilbert_function(), vec![1, 1, 1, 1]);
        let h = r.linear(&[1, 0]);
        assert!(r.pow(&h, 4).is_zero());
        assert!(!r.pow(&h, 3).is_zero());
        // t2 = 0, so the class of weight (4,1) is 4H
        assert_eq!(r.linear(&[4, 1]), h.scale(&qi(4)));
    }

    #[test]
    fn truncation_kills_high_degrees() {
        let r = p1113().truncated(2);
        assert_eq!(r.hilbert_function(), vec![1, 1, 1]);
        let h = r.linear(&[1, 0]);
        assert!(r.pow(&h, 3).is_zero());
        assert!(p1113().truncated(-1).is_zero_ring());
        assert!(p1113().truncated(-1).one().is_zero());
    }

    #[test]
    fn point_sector_is_rational_numbers() {
        let r = SectorRing::new(
            2,
            vec![product_of_forms(2, &[vec![3, 1]]), product_of_forms(2, &[vec![0, 1]])],
            None,
        )
        .unwrap();
        assert_eq!(r.hilbert_function(), vec![1]);
        assert!(r.linear(&[0, 1]).is_zero());
        assert!(r.linear(&[1, 0]).is_zero());
    }

    #[test]
    fn rejects_infinite_and_inhomogeneous() {
        assert_eq!(SectorRing::new(1, vec![], None).err(), Some(RingError::NotFinite));
        let mut bad = linear_form(&[1]);
        bad.insert(vec![0], qi(1));
        assert_eq!(
            SectorRing::new(1, vec![bad], None).err(),
            Some(RingError::Inhomogeneous(0))
        );
    }

    #[test]
    fn renders_canonically() {
        let r = p1113();
        let h = r.linear(&[1, 0]);
        let x = r.one().add(&r.pow(&h, 3).scale(&qi(-2)));
        assert_eq!(render_class(&x), "1 - 2 t1^3");
    }
}
