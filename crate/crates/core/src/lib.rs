#![no_std]
//! Numerical core for studying sequences of rational maps with bounded
//! spherical area: spherical energy and length quadrature, concentration and
//! mass quantization, rescaling limits assembled into trees of spheres, and
//! the energy-decay / isoperimetric estimates behind removability.

extern crate alloc;

pub mod error;
pub mod family;
pub mod fit;
pub mod quadrature;
pub mod removability;
pub mod runner;
pub mod sphere;
pub mod transforms;
pub mod tree;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
