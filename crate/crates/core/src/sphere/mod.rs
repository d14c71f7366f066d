//! Points of the Riemann sphere, polynomials, rational maps and their
//! Moebius/affine reparametrizations.

mod moebius;
mod point;
mod poly;
mod rational;
mod roots;

pub use moebius::{AffineMap, MoebiusMap};
pub use point::{chordal_distance, SpherePoint};
pub use poly::Polynomial;
pub use rational::{RationalMap, TOL_GCD};
pub use roots::{find_roots, RootOptions};

pub type C64 = num_complex::Complex64;
