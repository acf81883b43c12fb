//! Twisted sectors: the group elements `g_β`, their ages, and the rings and
//! dimensions of the sectors they index on both `X//T` and `Y//T`.

use crate::cones::SupportSet;
use crate::engine::Engine;
use crate::presentation::{pairing, Presentation, RationalClass};
use crate::rational::{common_denominator, fmt_vec, frac, is_integer, Q};
use crate::ring::SectorRing;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A torsion element `(e^{2πi f_1}, …, e^{2πi f_k})` of `T`, with each `f_a ∈ [0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    fractions: Vec<Q>,
}

impl GroupElement {
    pub fn new(fractions: Vec<Q>) -> Self {
        Self {
            fractions: fractions.iter().map(frac).collect(),
        }
    }

    pub fn identity(k: usize) -> Self {
        Self {
            fractions: vec![Q::zero(); k],
        }
    }

    pub fn fractions(&self) -> &[Q] {
        &self.fractions
    }

    pub fn is_identity(&self) -> bool {
        self.fractions.iter().all(Zero::is_zero)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.fractions.iter().map(|f| -f).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.fractions.iter().zip(&other.fractions).map(|(a, b)| a + b).collect())
    }

    pub fn order(&self) -> BigInt {
        common_denominator(&self.fractions)
    }

    /// Rotation number of `g` on the character `w`, in `[0,1)`.
    pub fn rotation(&self, w: &[i64]) -> Q {
        frac(&crate::rational::dot(&self.fractions, w))
    }

    /// Coordinates of `X` fixed by `g`.
    pub fn fixed_support(&self, p: &Presentation) -> SupportSet {
        SupportSet::from_indices((0..p.n()).filter(|&i| self.rotation(&p.x_weights[i]).is_zero()))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_vec(&self.fractions))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SectorError {
    #[error("g = {0} fixes no semistable point")]
    EmptyFixedLocus(GroupElement),
    #[error("class {0} is not I-effective")]
    NotEffective(RationalClass),
}

/// `g_β`, defined by `ξ(g_β) = e^{2πi β(ξ)}`.
pub fn group_element(b: &RationalClass) -> GroupElement {
    GroupElement::new(b.components().to_vec())
}

/// `Σ_i rot(g, ξ_i) − Σ_j rot(g, ε_j)`: the age on the virtual tangent
/// representation `T_X − E` (the Lie algebra of a torus contributes nothing).
pub fn age(engine: &Engine, g: &GroupElement) -> Result<Q, SectorError> {
    let p = engine.presentation();
    if !engine.theta_in_cone(g.fixed_support(p)) {
        return Err(SectorError::EmptyFixedLocus(g.clone()));
    }
    Ok(unchecked_age(p, g))
}

pub(crate) fn unchecked_age(p: &Presentation, g: &GroupElement) -> Q {
    let tangent: Q = p.x_weights.iter().map(|w| g.rotation(w)).sum();
    let bundle: Q = p.e_weights.iter().map(|w| g.rotation(w)).sum();
    tangent - bundle
}

/// `deg q^β = β(det X) − β(det E)`.
pub fn novikov_degree(p: &Presentation, b: &RationalClass) -> Q {
    pairing(b, &p.degree_character()).expect("class length matches torus rank")
}

/// Restriction of section component `j` to the coordinate subspace `s`:
/// `Some(true)` if identically zero there, `None` without a section.
pub fn section_vanishes_on(p: &Presentation, j: usize, s: SupportSet) -> Option<bool> {
    let comp = p.section.as_ref()?.get(j)?;
    let mut surviving: BTreeMap<&[u32], Q> = BTreeMap::new();
    for t in comp {
        let inside = t
            .exponents
            .iter()
            .enumerate()
            .all(|(i, &e)| e == 0 || s.contains(i));
        if inside {
            *surviving.entry(&t.exponents).or_insert_with(Q::zero) += &t.coeff;
        }
    }
    Some(surviving.values().all(Zero::is_zero))
}

/// Everything needed to evaluate a coefficient of class `β` on the sector of
/// `g = g_β^{-1}`, on both the ambient quotient and the complete intersection.
#[derive(Debug, Clone)]
pub struct SectorDescriptor {
    pub class: RationalClass,
    /// `g_β^{-1}`.
    pub g: GroupElement,
    /// Coordinates fixed by `g`.
    pub support: SupportSet,
    pub ambient: Arc<SectorRing>,
    /// The ambient ring truncated at `y_dim`.
    pub y_ring: Arc<SectorRing>,
    pub age: Q,
    pub ambient_dim: i64,
    pub y_dim: i64,
    /// E-components cutting the `Y` sector out of the `X` sector.
    pub y_cuts: Vec<usize>,
    /// Whether `y_cuts` came from the actual section (otherwise expected dimension).
    pub section_aware: bool,
    /// Coordinates of `X^β`.
    pub f_support: SupportSet,
    pub f_ring: Arc<SectorRing>,
    pub f_x_dim: i64,
    pub f_y_dim: i64,
    /// E-components not identically zero on `X^β`.
    pub f_cuts: Vec<usize>,
}

impl SectorDescriptor {
    /// Codimension of `F_β(Y//T)` inside the `Y` sector of `g`.
    pub fn f_codim_in_y_sector(&self) -> i64 {
        self.y_dim - self.f_y_dim
    }

    /// Codimension of `F_β(Y//T)` inside `F_β(X//T)`.
    pub fn f_codim_in_f_x(&self) -> i64 {
        self.f_x_dim - self.f_y_dim
    }

    /// Is every component of the section identically zero on `X^β`?
    pub fn f_in_base_locus(&self) -> bool {
        self.section_aware && self.f_cuts.is_empty()
    }

    /// Ring of `F_β(Y//T)`, modeled as the ring of `F_β(X//T)` truncated at its dimension.
    pub fn f_y_ring(&self) -> SectorRing {
        self.f_ring.truncated(self.f_y_dim)
    }
}

/// Builds the descriptor of the sector carrying the coefficient of `β`.
///
/// With `section_aware`, a component `s_j` cuts a locus only when its
/// restriction to the relevant coordinate subspace is not identically zero;
/// otherwise (or without a section) every component that can be nonzero by
/// weight is assumed to cut transversally.
pub fn sector_descriptor(engine: &Engine, b: &RationalClass, section_aware: bool) -> Result<SectorDescriptor, SectorError> {
    if !engine.is_i_effective(b) {
        return Err(SectorError::NotEffective(b.clone()));
    }
    let p = engine.presentation();
    let k = p.k() as i64;
    let use_section = section_aware && p.section.is_some();
    let g = group_element(b).inverse();
    let support = g.fixed_support(p);
    let ambient = engine.sector_ring(support);
    let ambient_dim = support.len() as i64 - k;
    let y_cuts: Vec<usize> = (0..p.r())
        .filter(|&j| g.rotation(&p.e_weights[j]).is_zero())
        .filter(|&j| !use_section || section_vanishes_on(p, j, support) == Some(false))
        .collect();
    let y_dim = ambient_dim - y_cuts.len() as i64;
    let y_ring = Arc::new(ambient.truncated(y_dim));

    let f_support = engine.fixed_support(b);
    let f_ring = engine.sector_ring(f_support);
    let f_x_dim = f_support.len() as i64 - k;
    let f_cuts: Vec<usize> = (0..p.r())
        .filter(|&j| {
            let x = pairing(b, &p.e_weights[j]).expect("lengths match");
            is_integer(&x) && !x.is_negative()
        })
        .filter(|&j| !use_section || section_vanishes_on(p, j, f_support) == Some(false))
        .collect();
    let f_y_dim = f_x_dim - f_cuts.len() as i64;

    Ok(SectorDescriptor {
        class: b.clone(),
        age: unchecked_age(p, &g),
        g,
        support,
        ambient,
        y_ring,
        ambient_dim,
        y_dim,
        y_cuts,
        section_aware: use_section,
        f_support,
        f_ring,
        f_x_dim,
        f_y_dim,
        f_cuts,
    })
}
