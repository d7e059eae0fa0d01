//! Real polynomials, rational functions, jets and Möbius maps.

mod jet;
mod mobius;
mod ratfun;
mod real;
mod roots;
mod stability;

pub use jet::{series_compose, series_div, series_mul, Jet};
pub(crate) use jet::on_nonpositive_axis;
pub use mobius::MobiusMap;
pub use ratfun::{real_factor, Cancellation, RatFun, DEFAULT_COPRIME_TOL};
pub use real::RealPoly;
pub use roots::{
    expand_roots, multiplicity_confirmed, poly_roots, poly_roots_with, Root, RootOptions,
};
pub use stability::{
    in_region, is_hurwitz, is_schur, membership_h, stability_test, HMembership, NotInH, Region,
    StabilityVerdict,
};
