//! Critical site percolation on the hexagonal lattice.
//!
//! Two halves: exact enumeration of colorings on small domains (loop
//! representation, spinor cover, parafermionic observable and its discrete
//! holomorphicity), and Monte Carlo estimates of crossing probabilities
//! compared against Cardy's formula.

pub mod cardy;
pub mod eisenstein;
pub mod error;
pub mod harness;
pub mod hexlattice;
pub mod loops;
pub mod observable;
pub mod percolation;
pub mod registry;
pub mod rng;
pub mod spinor;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
