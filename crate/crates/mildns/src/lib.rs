//! Pseudo-spectral toolkit for mild solutions of the incompressible
//! Navier-Stokes equations on a periodic box at unit viscosity.
//!
//! The box `[0, L)^n` (n = 2 or 3) stands in for free space up to the
//! advisory horizon `0.1 (L / 2 pi)^2`; within it the library provides the
//! heat semigroup, Riesz transforms and the Leray projection, the projected
//! advection bilinear form, scale-critical norms (Lp, weak Lp, and a caloric
//! sup norm), a Duhamel time stepper, Picard iteration for the mild integral
//! equation, decay and stability experiments with log-log rate fits, and a
//! Gronwall-type fixed-point iterator for scalar integral inequalities.
//!
//! Everything is generic over the floating scalar through [`Scalar`];
//! concrete `f64` aliases are exported at the crate root.

pub mod data;
pub mod error;
pub mod field;
pub mod float;
pub mod grid;
pub mod gronwall;
pub mod norms;
pub mod operators;
mod quadrature;
pub mod solver;
mod transform;

pub use error::{Error, Result};
pub use field::{DyadicScale, ScalarField, VectorField};
pub use float::Scalar;
pub use grid::Grid;

/// Double-precision grid.
pub type Grid64 = Grid<f64>;
/// Double-precision scalar field.
pub type ScalarField64 = ScalarField<f64>;
/// Double-precision velocity field.
pub type VectorField64 = VectorField<f64>;
