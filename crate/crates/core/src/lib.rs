//! Cellular sheaves of finite-dimensional rational vector spaces on abstract
//! simplicial complexes.
//!
//! The crate computes global sections, checks and applies sheaf morphisms,
//! builds kernel sheaves, and uses that machinery for two applications:
//!
//! * [`flownet`]: deciding whether a set of concentration sensors on a flow
//!   network determines the contaminant concentration everywhere;
//! * [`fir`]: encoding a finite impulse response filter as a pair of sheaf
//!   morphisms and running it through the induced maps.
//!
//! All arithmetic is exact ([`Rational`]), so every dimension and rank the
//! crate reports is exact too.
//!
//! ```
//! use sheafkit::{Sheaf, Timeline};
//!
//! // A 3-word shift register over 4 time steps: sections are determined by
//! // the 4 + 3 − 1 samples that pass through it.
//! let register = Sheaf::grouping(3, 1, &Timeline::new(0, 3)?)?;
//! assert_eq!(register.global_sections()?.dimension(), 6);
//! # Ok::<(), sheafkit::Error>(())
//! ```

pub mod complex;
pub mod error;
pub mod fir;
pub mod flownet;
pub mod json;
pub mod morphism;
pub mod ratlin;
pub mod sheaf;

pub use complex::{Atom, Face, SimplicialComplex, Timeline};
pub use error::{Error, Result};
pub use fir::{convolve_oracle, encode, FilterEncoding, FilterSpec};
pub use flownet::{recoverability, sampling_morphism, FlowEdge, FlowNetwork, RecoverabilityReport, SensorPlacement};
pub use morphism::{InducedMap, Morphism, SquareViolation};
pub use ratlin::{Rational, RationalMatrix};
pub use sheaf::{Section, SectionSpace, Sheaf, Violation};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rationals.md")]
    mod rationals {}
    #[doc = include_str!("../../../book/src/complexes.md")]
    mod complexes {}
    #[doc = include_str!("../../../book/src/sheaves.md")]
    mod sheaves {}
    #[doc = include_str!("../../../book/src/morphisms.md")]
    mod morphisms {}
    #[doc = include_str!("../../../book/src/flow-networks.md")]
    mod flow_networks {}
    #[doc = include_str!("../../../book/src/fir-filters.md")]
    mod fir_filters {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
