//! Numerical laboratory for singularity and oscillation functionals of
//! plurisubharmonic functions.

pub mod function_model;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod integrability;
pub mod lelong;
pub mod oscillation;
pub mod quadrature;
pub(crate) mod stats;

/// The guide's code samples, compiled and run as doc-tests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/lelong.md")]
    mod lelong {}
    #[doc = include_str!("../../../book/src/oscillation.md")]
    mod oscillation {}
    #[doc = include_str!("../../../book/src/integrability.md")]
    mod integrability {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/reproduce.md")]
    mod reproduce {}
}
