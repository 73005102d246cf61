//! Special functions: Bessel `J` of integer and half-integer order, Bessel `K` of real
//! order, and Gamma.

mod bessel_j;
mod bessel_k;
mod gamma;

pub(crate) use bessel_j::j_unchecked;
pub use bessel_j::{bessel_j, BesselOrder, ASYMPTOTIC_MIN, MAX_TWO_NU, SERIES_MAX};
pub use bessel_k::bessel_k;
pub use gamma::{gamma, ln_gamma};
