//! Test-only oracles and statistical helpers for the matskew workspace.
//!
//! Everything in this crate is independent of `matskew-core`: reference values
//! are produced by adaptive quadrature over integral definitions (Bessel K,
//! GIG normalizers and moments, mixture densities) or delegated to `statrs`
//! for classical special functions. Implementations under test must agree
//! with these oracles without sharing a single line of numerical code.

pub mod bessel;
pub mod densities;
pub mod gig;
pub mod quad;
pub mod stats;
