//! Simulation toolkit for ensembles of dipole emitters evanescently coupled
//! to whispering-gallery microcavities and tapered fibers.
//!
//! The crate computes fiber-cavity coupling rates from coupled-mode overlap
//! integrals, single-emitter Purcell factors on discretized cavity fields,
//! weighted ensemble Purcell distributions for free-space versus waveguide
//! collection, and the resulting photoluminescence decay curves and effective
//! lifetimes. See the `book/` guide for a narrative walkthrough.

pub mod config;
pub mod coupling;
pub mod emitter;
pub mod ensemble;
pub mod fiber;
pub mod grid;
pub mod specfun;
pub mod surrogate;
pub mod vec3;

pub use grid::{FieldGrid, FieldError, ModeVolume};
pub use surrogate::{GridGeometry, Polarization, SurrogateMode, SurrogateWgmSpec, C_NM_PER_NS};

/// Compile and run the guide's code snippets as documentation tests so the
/// book cannot drift out of sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/fiber-modes.md")]
    mod fiber_modes {}
    #[doc = include_str!("../../../book/src/cavity-fields.md")]
    mod cavity_fields {}
    #[doc = include_str!("../../../book/src/purcell.md")]
    mod purcell {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    mod coupling {}
}
