//! Numerical and exact machinery around the genus-4 Schottky form.
//!
//! The weight-8 form that cuts out the Jacobian locus inside the moduli of
//! principally polarized abelian fourfolds can be written two independent
//! ways: as the difference of the rank-16 theta series
//! theta_{E8+E8} - theta_{D16+}, whose Fourier coefficients are exact integer
//! representation-number differences, and through a genus-3 theta-constant
//! relation pushed to genus 4 by the squaring substitution. This crate
//! realizes both, verifies their proportionality, evaluates them on Jacobian
//! points computed from hyperelliptic period matrices, and carries the
//! companion divisor-class identities in exact rational arithmetic.

pub mod ddouble;
pub mod lattice;
pub mod picard;
pub mod sampling;
pub mod schottky;
pub mod theta;
