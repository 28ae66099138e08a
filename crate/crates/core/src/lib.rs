//! Exact and numerical building blocks for degenerations of
//! `(1, ..., 1, d)`-polarized abelian varieties: the toroidal exponent
//! lattice, Riemann theta series with certified truncation, and the
//! sections on the degenerate fiber obtained in the limit.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod degeneration;
pub mod lattice;
pub mod linalg;
pub mod theta;
