//! Numerical laboratory for the weighted convolution algebra `L¹(ω)` on the
//! half-line, its dual module `L^∞(1/ω)`, the measure algebra `M(ω)` and the
//! derivations
//!
//! ```text
//! (D_φ f)(t) = ∫₀^∞ f(s) · s/(t+s) · φ(t+s) ds
//! ```
//!
//! Everything is discretised on a [`Grid`] over `[0, T_max]`. Behaviour past
//! `T_max` is described by tail descriptors rather than guessed. The
//! [`analyzers`] turn the continuity and compactness criteria for `D_φ` into
//! checkable hypotheses and return an [`AnalysisReport`] for each.
//!
//! Nodewise loops go through [`Exec`]. With the default `parallel` feature
//! they run on rayon; [`Exec::Sequential`] is always available.

pub mod algebra;
pub mod analyzers;
pub mod catalog;
pub mod config;
pub mod decay;
pub mod derivation;
mod error;
pub mod exec;
pub mod grid;
mod kernel;
pub mod report;
pub mod spaces;
pub mod weight;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{Grid, Rule};
pub use num_complex::Complex64 as C64;
pub use report::{AnalysisReport, Evidence, Verdict};
pub use spaces::{L1Element, L1Tail, LInfElement, LInfTail, MeasureElement};
pub use weight::{Weight, WeightKind};
