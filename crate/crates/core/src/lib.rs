//! Numerical toolkit for Musielak–Orlicz modulars, ψ-Hilfer fractional
//! operators on uniform grids, and a mountain-pass solver for fractional
//! boundary value problems in the associated ψ-fractional space.

pub mod anchors;
pub mod bvp;
pub mod error;
pub mod frac;
pub mod grid;
pub mod musielak;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod space;
pub mod study;
pub mod suite;

pub use error::{Error, Result};
pub use frac::{FracParams, PsiWeight};
pub use grid::GridFunction;
pub use musielak::MusielakFunction;
pub use report::{CheckReport, Outcome};
