//! Symmetric decreasing rearrangement and quantitative stability of
//! Pólya–Szegő extremals.
//!
//! The crate has two halves. The grid half ([`field`], [`rearrangement`],
//! parts of [`measure`]) works with sampled nonnegative functions: it
//! rearranges them, measures their level sets and checks the discrete
//! Pólya–Szegő inequality. The analytic half ([`extremal`], [`functionals`],
//! [`verify`]) builds exact extremals as a radial profile `t -> r(t)` plus a
//! path of ball centers `t -> xi_t`, and evaluates both sides of every
//! stability bound with closed forms or levelwise quadrature.

pub mod error;
pub mod extremal;
pub mod field;
pub mod functionals;
pub mod geometry;
pub mod measure;
pub mod quad;
pub mod rearrangement;
pub mod verify;

pub use error::{Error, Result};
pub use extremal::{ExtremalSpec, ExtremalStats, Family};
pub use field::GridField;
pub use functionals::YoungFunction;
pub use geometry::DimConstants;
pub use measure::{CenterPath, CriticalSet, DistFn, MeasureDecomposition};
pub use rearrangement::{RadialProfile, SliceSet};
pub use verify::{BoundReport, Verdict};
