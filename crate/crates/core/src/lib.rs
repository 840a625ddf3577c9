//! Angle between two random segments of the unit disk.
//!
//! Four independent uniform points `A, B, C, D` of the closed unit disk span the
//! segments `AB` and `CD`. This crate carries everything needed to study the angle
//! between the segments conditioned on their crossing:
//!
//! * [`geometry`]: the chord-frame parametrization `(rho, gamma, t_a, t_b)` of a
//!   segment, its Jacobian, the line intersection point and the crossing predicates.
//! * [`densities`]: the analytic angle density `g`, its unnormalized form `g*`, the
//!   chord-frame joint density and the classical chord-distance and point-distance laws.
//! * [`quadrature`]: the adaptive Gauss-Kronrod engine shared by the densities.
//! * [`sampling`]: seedable, chunked Monte Carlo with worker-count independent output.
//! * [`validation`]: oracles that do not share code paths with the formulas they check.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is plugged in
//! from outside through [`sampling::ChunkExecutor`].
#![allow(clippy::needless_range_loop, clippy::should_implement_trait)]
// `!(x >= 0.0)` style guards are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

pub mod densities;
pub mod geometry;
pub mod quadrature;
pub mod sampling;
pub mod validation;

mod error;

pub use error::{Error, Result};
