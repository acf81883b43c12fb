//! Semistability and effectivity combinatorics for torus quotients.
//!
//! A coordinate subset `S` is *θ-good* when θ lies in the rational cone
//! spanned by the weights `ξ_i, i ∈ S`. Points whose nonzero coordinates are
//! exactly `S` are semistable iff `S` is θ-good. A class `β` is I-effective
//! iff the coordinates with `β(ξ_i) ∈ ℤ_{≥0}` form a θ-good set.

use crate::linalg;
use crate::lp::ConeFeasibility;
use crate::presentation::{pairing, Presentation, RationalClass};
use crate::rational::{common_denominator, is_integer, lcm, qi, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// A subset of the coordinates of `X`, as a bitmask (bit `i` = coordinate `i`, 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SupportSet(pub u64);

impl SupportSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn full(n: usize) -> Self {
        Self(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        Self(idx.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    /// Every subset of `0..n`.
    pub fn all(n: usize) -> impl Iterator<Item = SupportSet> {
        (0..(1u64 << n)).map(SupportSet)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: SupportSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn minus(self, other: SupportSet) -> SupportSet {
        SupportSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = SupportSet> {
        let full = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some(((c | !full).wrapping_add(1)) & full) };
            Some(SupportSet(c))
        })
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.to_one_based().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

fn weights_as_q(p: &Presentation, s: SupportSet) -> Vec<Vec<Q>> {
    s.iter()
        .map(|i| p.x_weights[i].iter().map(|&x| qi(x)).collect())
        .collect()
}

/// Is θ a nonnegative rational combination of `{ξ_i : i ∈ s}`?
pub fn theta_in_cone(p: &Presentation, s: SupportSet, lp: &dyn ConeFeasibility) -> bool {
    let target: Vec<Q> = p.theta.iter().map(|&x| qi(x)).collect();
    lp.in_cone(&weights_as_q(p, s), &target)
}

/// θ-goodness of every subset of coordinates, indexed by bitmask.
#[derive(Debug, Clone)]
pub struct ConeTable {
    n: usize,
    good: Vec<bool>,
}

impl ConeTable {
    pub fn build(p: &Presentation, lp: &dyn ConeFeasibility) -> Self {
        let n = p.n();
        let good = SupportSet::all(n).map(|s| theta_in_cone(p, s, lp)).collect();
        Self { n, good }
    }

    pub fn is_good(&self, s: SupportSet) -> bool {
        self.good[s.0 as usize]
    }

    /// θ-good sets none of whose proper subsets is θ-good.
    pub fn minimal_good(&self) -> Vec<SupportSet> {
        SupportSet::all(self.n)
            .filter(|&s| self.is_good(s))
            .filter(|&s| s.iter().all(|i| !self.is_good(s.minus(SupportSet::from_indices([i])))))
            .collect()
    }
}

/// Coordinates that survive in `X^β`: those with `β(ξ_i) ∈ ℤ_{≥0}`.
pub fn fixed_support(p: &Presentation, b: &RationalClass) -> SupportSet {
    SupportSet::from_indices((0..p.n()).filter(|&i| {
        let x = pairing(b, &p.x_weights[i]).expect("class length matches torus rank");
        is_integer(&x) && !x.is_negative()
    }))
}

/// lcm of `|det|` over all nonsingular `k×k` minors of the weight matrix
/// restricted to θ-good supports. Effective classes live in `(1/L)ℤ^k`.
pub fn denominator_bound(p: &Presentation, table: &ConeTable) -> BigInt {
    let full = SupportSet::full(p.n());
    // θ-goodness is monotone, so every minor inside a good support is a minor
    // of the full matrix, and the full set is good whenever anything is
    if !table.is_good(full) {
        return BigInt::one();
    }
    let idx: Vec<usize> = full.iter().collect();
    let mut l = BigInt::one();
    for cols in linalg::combinations(&idx, p.k()) {
        let m: Vec<Vec<Q>> = cols
            .iter()
            .map(|&i| p.x_weights[i].iter().map(|&x| qi(x)).collect())
            .collect();
        let d = linalg::determinant(&m);
        if !d.is_zero() {
            l = lcm(&l, &d.abs().to_integer());
        }
    }
    l
}

/// Direction of an extreme ray of `{β : β(ξ_i) ≥ 0, i ∈ s}`, scaled so the
/// pairings with `ξ_s` are coprime integers. That scaling is the first
/// effective class on the ray.
pub fn extreme_rays(p: &Presentation, s: SupportSet) -> Vec<RationalClass> {
    let k = p.k();
    let idx: Vec<usize> = s.iter().collect();
    let ws = weights_as_q(p, s);
    let mut rays: Vec<RationalClass> = Vec::new();
    for tight in linalg::combinations(&idx, k.saturating_sub(1)) {
        let rows: Vec<Vec<Q>> = tight.iter().map(|&i| p.x_weights[i].iter().map(|&x| qi(x)).collect()).collect();
        let ns = linalg::nullspace(&rows, k);
        if ns.len() != 1 {
            continue;
        }
        for sign in [Q::one(), -Q::one()] {
            let r: Vec<Q> = ns[0].iter().map(|x| x * &sign).collect();
            let pairings: Vec<Q> = ws.iter().map(|w| w.iter().zip(&r).map(|(a, b)| a * b).sum()).collect();
            if pairings.iter().any(Signed::is_negative) {
                continue;
            }
            let den = common_denominator(&pairings);
            let g = pairings
                .iter()
                .map(|x| (x * Q::from_integer(den.clone())).to_integer())
                .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
            if g.is_zero() {
                continue;
            }
            let scale = Q::new(den, g);
            let ray = RationalClass(r.iter().map(|x| x * &scale).collect());
            if !rays.contains(&ray) {
                rays.push(ray);
            }
        }
    }
    rays.sort();
    rays
}

/// A basis of `ℚ^k` chosen greedily among the weights indexed by `s`.
pub fn weight_basis(p: &Presentation, s: SupportSet) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut vecs: Vec<Vec<Q>> = Vec::new();
    for i in s.iter() {
        let mut trial = vecs.clone();
        trial.push(p.x_weights[i].iter().map(|&x| qi(x)).collect());
        if linalg::rank(&trial) > vecs.len() {
            vecs = trial;
            chosen.push(i);
        }
        if chosen.len() == p.k() {
            break;
        }
    }
    chosen
}

/// Integer points bounded by `bounds[j]` in each coordinate.
pub(crate) fn integer_box(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (b.max(0) as usize + 1));
        for v in &out {
            for x in 0..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Largest value of `β(w)` on the polytope `conv(0, vertices)`, floored.
pub(crate) fn max_pairing_floor(vertices: &[RationalClass], w: &[i64]) -> i64 {
    vertices
        .iter()
        .map(|v| pairing(v, w).expect("lengths match"))
        .max()
        .unwrap_or_else(Q::zero)
        .max(Q::zero())
        .floor()
        .to_integer()
        .to_i64()
        .expect("search box fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lp::SolverRegistry;
    use crate::rational::q;

    fn s(idx: &[usize]) -> SupportSet {
        SupportSet::from_indices(idx.iter().map(|i| i - 1))
    }

    #[test]
    fn theta_in_cone_examples() {
        let p = catalog::quartic_in_p1113();
        let reg = SolverRegistry::default();
        for name in reg.names() {
            let lp = reg.get(name).unwrap();
            assert!(theta_in_cone(&p, s(&[4, 5]), lp.as_ref()));
            assert!(!theta_in_cone(&p, s(&[5]), lp.as_ref()));
            assert!(!theta_in_cone(&p, SupportSet::empty(), lp.as_ref()));
            assert!(!theta_in_cone(&p, s(&[1, 2, 3, 4]), lp.as_ref()));
        }
    }

    #[test]
    fn fixed_support_examples() {
        let p = catalog::quartic_in_p1113();
        assert_eq!(fixed_support(&p, &RationalClass::from_ints(&[-1, 3])), s(&[4, 5]));
        assert_eq!(fixed_support(&p, &RationalClass::zero(2)), s(&[1, 2, 3, 4, 5]));
        assert_eq!(fixed_support(&p, &RationalClass(vec![q(-1, 3), qi(1)])), s(&[4, 5]));
    }

    #[test]
    fn subset_iteration() {
        let all: Vec<SupportSet> = s(&[2, 4]).subsets().collect();
        assert_eq!(all, vec![s(&[]), s(&[2]), s(&[4]), s(&[2, 4])]);
        assert_eq!(s(&[4, 5]).to_string(), "{4,5}");
    }

    #[test]
    fn minimal_good_supports_of_p1113() {
        let p = catalog::quartic_in_p1113();
        let t = ConeTable::build(&p, crate::lp::default_solver().as_ref());
        assert_eq!(t.minimal_good(), vec![s(&[1, 5]), s(&[2, 5]), s(&[3, 5]), s(&[4, 5])]);
        assert_eq!(denominator_bound(&p, &t), BigInt::from(3));
    }

    #[test]
    fn rays_of_the_point_support() {
        let p = catalog::quartic_in_p1113();
        let rays = extreme_rays(&p, s(&[4, 5]));
        assert_eq!(
            rays,
            vec![RationalClass(vec![q(-1, 3), qi(1)]), RationalClass(vec![q(1, 3), qi(0)])]
        );
    }
}
