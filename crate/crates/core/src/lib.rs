//! Spectral simulation of single-jump quantum evolution as a boundary-value
//! problem for a transport (Dirac-type) equation on the half-line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod model;
pub mod reflect;
pub mod spectral;
pub mod stochastic;
pub mod toy;
pub mod ultra;

pub use error::{Error, Result};
pub use field::{Representation, WaveField};
pub use grid::SpectralGrid;
pub use model::{validate_model, DressedSpec, InternalSpace, ModelSpec, ValidationReport};
pub use spectral::{
    apply_propagator, grid_shift, hardy_project, indicator_sigma_power, ConjugatedPropagator,
    Direction, HardySide, Propagator, SymbolTable,
};
