//! Toolkit for matched low-pass coaxial powder filters.
//!
//! The filter is treated as a finite, uniformly filled lossy coaxial line.
//! [`txline`] computes its two-port S-parameters from geometry and effective
//! material parameters, [`extraction`] inverts measured S-parameters back into
//! a [`MaterialModel`], [`synthesis`] solves geometry for impedance and
//! attenuation targets, and [`touchstone`] / [`csv_io`] handle file formats.

pub mod cli;
pub mod constants;
pub mod csv_io;
pub mod design;
pub mod error;
pub mod extraction;
pub mod material;
pub mod synthesis;
pub mod touchstone;
pub mod txline;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use material::{MaterialModel, MaterialSample};
pub use txline::{CoaxGeometry, FrequencyGrid, LinePointParams, TwoPortResponse};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
