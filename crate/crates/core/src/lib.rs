//! Exact construction and stability analysis of hybrid-variable and
//! Hermite-WENO discretizations of the periodic advection equation `u_t + u_x = 0`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
extern crate std;

extern crate alloc;

pub mod combinatorics;
pub mod ddo;
pub mod exactnum;
pub mod hermite_weno;
pub mod orderstar;
pub mod simulator;
pub mod stability;
pub mod trigpoly;

pub use exactnum::Rational;
