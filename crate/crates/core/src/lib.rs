//! Exact computations of stability invariants for projective schemes
//! presented by homogeneous ideals over Q: slopes, slopes along a subscheme,
//! Donaldson-Futaki invariants of deformation-to-the-normal-cone test
//! configurations, CM degrees of polarized families over a rational base
//! curve, and the supporting extended-Rees degeneration toolkit.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals and
//! every reported identity holds on the nose or the computation fails loudly.

pub mod error;
pub mod groebner;
pub mod hilbert;
pub mod ideal;
pub mod oracle;
pub mod order;
pub mod poly;
pub mod rat;
pub mod rees;
pub mod ring;
pub mod stability;

pub use error::{Error, Result};
pub use groebner::{normal_form, reduced_groebner, Budget, GroebnerBasis};
pub use ideal::Ideal;
pub use order::MonomialOrder;
pub use poly::{poly_arith, ArithOp, Multidegree, Polynomial};
pub use rat::{parse_rat, rat, ratio, Rat};
pub use ring::{Block, DegreeVector, Monomial, Ring, RingSpec};
