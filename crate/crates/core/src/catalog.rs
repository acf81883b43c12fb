//! Presentations that appear as worked examples throughout the test suites.

use crate::presentation::{Presentation, SectionTerm, Weight};
use num_traits::One;

/// `G_m^2` acting on `A^5` with weight columns (1,0),(1,0),(1,0),(3,1),(0,1)
/// and θ = (1,1); the quotient is P(1,1,1,3).
pub fn p1113_weights() -> Vec<Weight> {
    vec![vec![1, 0], vec![1, 0], vec![1, 0], vec![3, 1], vec![0, 1]]
}

/// P(1,1,1,3) with a rank-one `E` of the given weight and no section.
pub fn p1113_with_bundle(e: Weight) -> Presentation {
    Presentation::new(p1113_weights(), vec![e], vec![1, 1])
}

/// The quartic surface `x5 (x2^4 + x3^4) + x1 x4 = 0` in P(1,1,1,3).
pub fn quartic_in_p1113() -> Presentation {
    let term = |exponents: [u32; 5]| SectionTerm {
        coeff: One::one(),
        exponents: exponents.to_vec(),
    };
    p1113_with_bundle(vec![4, 1])
        .with_section(vec![vec![
            term([0, 4, 0, 0, 1]),
            term([0, 0, 4, 0, 1]),
            term([1, 0, 0, 1, 0]),
        ]])
        .with_fano(true)
}

/// P(1,1,3) as `G_m` acting on `A^3`, with `E` of weight `k`.
pub fn p113(k: i64) -> Presentation {
    Presentation::new(vec![vec![1], vec![1], vec![3]], vec![vec![k]], vec![1])
}
