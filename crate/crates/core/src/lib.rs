//! Fast evaluation, transposed evaluation and inversion of power-series
//! composition maps `A -> A(g) mod x^n` over a prime field, for series `g`
//! built by short chains of elementary operators, and their application
//! to conversions between the monomial basis and classical polynomial
//! families.

pub mod bivariate;
pub mod compseq;
pub mod error;
pub mod evalgrid;
pub mod families;
pub mod io;
pub mod modfield;
pub mod oracle;
pub mod poly;
pub mod polyops;
pub mod selftest;
pub mod seriesops;

pub use bivariate::{eval_bivariate, eval_bivariate_inv, BivariateSpec};
pub use compseq::{
    compute_g, eval, eval_inv, eval_inv_transposed, eval_t, reverse_sequence, validate,
    CompositionOp, CompositionSequence, CostClass, SequenceTruncations,
};
pub use error::{Error, Result};
pub use families::{catalog, catalog_sequences, Family, FamilyKind};
pub use modfield::{FieldElement, Modulus, DEFAULT_MODULUS};
pub use poly::Poly;
