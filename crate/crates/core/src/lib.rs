//! Numerical core for extreme-value analysis of deterministic dynamical systems.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`dynsys`] iterates measure-preserving maps of the interval or torus,
//! 2. [`observables`] turns orbits into scalar series through distance
//!    observables with prescribed tail behaviour,
//! 3. [`blockmax`] extracts block extrema from those series,
//! 4. [`gev`] fits the generalized extreme value family by maximum likelihood,
//! 5. [`theory`] supplies closed-form normalizing sequences for maps with a
//!    known invariant density, and
//! 6. [`stats`] provides the supporting statistics (Kolmogorov-Smirnov
//!    bootstrap, least squares, histograms).
//!
//! Everything here is `no_std` (with `alloc`); IO, configuration and
//! parallel orchestration live in the companion `evtlab` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blockmax;
pub mod dynsys;
pub mod gev;
pub mod observables;
pub mod stats;
pub mod theory;
