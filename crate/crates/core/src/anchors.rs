//! Stable identifiers for the inequalities and identities the checks verify.
//!
//! These are written to the `anchor` column of verification reports.

pub const SANDWICH: &str = "phi-sandwich";
pub const YOUNG_TYPE: &str = "young-type";
pub const HOLDER: &str = "holder";
pub const MODULAR_NORM: &str = "modular-norm";
pub const MODULAR_CONVERGENCE: &str = "modular-convergence";
pub const GROWTH_EXPONENTS: &str = "growth-exponents";
pub const DELTA2: &str = "delta2";
pub const SQRT_CONVEXITY: &str = "sqrt-convexity";
pub const SEMINORM_MODULAR: &str = "seminorm-modular";
pub const INTEGRAL_BOUND: &str = "integral-bound";
pub const POINCARE: &str = "poincare";
pub const SUP_BOUND: &str = "sup-bound";
pub const PSI_CONDITION: &str = "psi-condition";
pub const NORM_EQUIVALENCE: &str = "norm-equivalence";
pub const FTC_COMPOSITION: &str = "ftc-composition";
pub const AMBROSETTI_RABINOWITZ: &str = "ambrosetti-rabinowitz";
pub const GROWTH_LEMMA: &str = "growth-lemma";
pub const MOUNTAIN_GEOMETRY: &str = "mountain-geometry";
pub const PALAIS_SMALE: &str = "palais-smale";

pub const ALL: &[&str] = &[
    SANDWICH,
    YOUNG_TYPE,
    HOLDER,
    MODULAR_NORM,
    MODULAR_CONVERGENCE,
    GROWTH_EXPONENTS,
    DELTA2,
    SQRT_CONVEXITY,
    SEMINORM_MODULAR,
    INTEGRAL_BOUND,
    POINCARE,
    SUP_BOUND,
    PSI_CONDITION,
    NORM_EQUIVALENCE,
    FTC_COMPOSITION,
    AMBROSETTI_RABINOWITZ,
    GROWTH_LEMMA,
    MOUNTAIN_GEOMETRY,
    PALAIS_SMALE,
];
