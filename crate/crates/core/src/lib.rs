//! Eigenvalue counting for Schrödinger operators `-Δ + V` on unbounded spaces
//! that decompose into copies of a compact cell (Sierpinski-gasket
//! fractafolds and fractal fields, Euclidean lattices).
//!
//! The crate is `no_std` + `alloc`: every module here is pure computation.
//! File formats, the scenario harness and the command line live in the
//! companion `bohr-cli` crate.
//!
//! Pipeline, bottom-up:
//!
//! | module | role |
//! |--------|------|
//! | [`geometry`] | exact cell complexes (blow-ups, ladder, hexagonal, triangular field, interval lattice) |
//! | [`approx`] | level-`m` graph approximations, vertex measures, distance fields |
//! | [`operator`] | assembly of `E + M·V - λM`, inertia counting, dense spectra |
//! | [`decimation`] | exact SG cell spectra by spectral decimation, Weyl function tables |
//! | [`potential`] | potentials, cell envelopes, distribution functions, validators |
//! | [`bohr`] | bracketed counts, Bohr's asymptotic function, error bounds, fits |
//! | [`trace`] | heat-kernel-trace (Laplace transform) variant |

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod approx;
pub mod bohr;
pub mod cell;
pub mod decimation;
pub mod dyadic;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod linalg;
pub mod operator;
pub mod potential;
pub mod spectrum;
pub mod step;
pub mod trace;

pub use error::{Error, Result};
pub use step::StepFunction;
