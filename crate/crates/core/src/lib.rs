//! Exact simulator for linear-optical circuits over polarization and path modes.
//!
//! States live in a sparse Fock basis, passive elements act by substituting
//! creation operators, and photodetection (number-resolving or lossy on-off)
//! conditions states into weighted ensembles of pure branches. On top of that
//! sit builders for heralded polarization NOON-state sources, coherent photon
//! subtraction, parity-based phase estimation, and a small text format for
//! describing circuits.

pub mod circuits;
pub mod detection;
pub mod error;
pub mod fock;
pub mod grid;
pub mod metrology;
pub mod optics;
pub mod script;

pub use error::{Error, Result};
pub use fock::{Branch, ModeId, OccupationVector, Pol, PureState, Register, StateEnsemble};
pub use num_complex::Complex64;
