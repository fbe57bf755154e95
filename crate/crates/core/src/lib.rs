//! Numerical kernels for the "tennis ball" construction on the unit sphere of
//! `L_2^n` (the Euclidean norm normalised by `1/n`).
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs; randomness is
//! always drawn from an explicit [`SeededStream`] or a caller-supplied RNG so
//! that results are reproducible and independent of scheduling.
//!
//! Layout:
//!
//! * [`params`] and [`staircase`]: the geometric grid `lambda^m`, the
//!   piecewise-linear staircase `phi` and the interval classes `A`/`B`.
//! * [`measure`]: vectors, the coordinate measure `mu_x`, the tennis-ball map
//!   `psi` and the membership tests for `Gamma` and `Delta`.
//! * [`sampling`]: Haar-random vectors, frames and great circles.
//! * [`experiments`]: witness search on great circles and the lemma verifiers.
//! * [`bounds`]: closed-form counting and volume bounds, evaluated in the log
//!   domain.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod experiments;
pub mod measure;
pub mod params;
pub mod sampling;
pub mod staircase;
pub mod window;

pub use error::Error;
pub use measure::{CoordinateMeasure, PairMode, SetMembershipReport, SphereVector, UnitVector};
pub use params::{Preset, StaircaseParams};
pub use sampling::{GreatCircle, SeededStream, SubspaceFrame};
pub use staircase::IntervalClass;

pub type Result<T, E = Error> = core::result::Result<T, E>;
