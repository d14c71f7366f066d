//! Families `n ↦ F_n`, pullback mass atlases, concentration points, mass
//! quantization and the pointwise limit.

mod atlas;
mod detect;
mod expr;
mod spec;

pub use atlas::{pullback_measure, MassAtlas};
pub use detect::*;
pub use expr::Expr;
pub use spec::{instantiate, FamilySpec};
