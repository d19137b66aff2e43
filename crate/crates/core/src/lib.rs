//! Geometry of homogeneous (α₁,α₂) Finsler spaces evaluated directly from
//! Lie-algebraic data.
//!
//! A space is described by structure constants over a basis ordered as
//! `(h | m₁ | m₂)`, an inner product on `m = m₁ + m₂` and a two-variable
//! function `L(u, v)` with `F(y) = sqrt(L(|y₁|², |y₂|²))`. From that input the
//! crate decides natural reductiveness three independent ways, evaluates S-
//! and E-curvature at the origin, and computes flag curvature of naturally
//! reductive spaces through a closed form and through the defining quotient.
//!
//! Every closed form has an independent oracle in [`oracle`].

pub mod catalog;
pub mod check;
pub mod curvature;
pub mod homogeneous;
pub mod lie_core;
pub mod norms;
pub mod oracle;
pub mod sampling;

pub use check::{Check, Tolerances, Witness};
pub use curvature::{FlagCurvatureResult, FlagTriple, NaturallyReductive};
pub use homogeneous::{HomogeneousSpace, SpaceError};
pub use lie_core::{Dims, InnerProduct, LieData, Part, ReductiveData};
pub use norms::{MinkowskiNorm, NormFamily, TensorSample};

pub use nalgebra::{DMatrix, DVector};
