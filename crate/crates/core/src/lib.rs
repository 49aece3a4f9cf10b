//! Gaussian-state simulation of continuous-variable teleportation of
//! microwave coherent states over lossy, thermally loaded links.
//!
//! * [`gaussian`]: states, symplectic maps and thermal loss channels.
//! * [`measures`]: negativity, purity, squeezing and coherent-state fidelity.
//! * [`protocol`]: the analog-feedforward teleportation circuit and sweeps.
//! * [`effective_model`]: the `(kappa, zeta)` fidelity model, thermal
//!   occupancies and least-squares extraction of the parameters.
//! * [`hybrid_qubit`]: qubit teleportation fidelities from `(kappa, zeta)`.
//! * [`tomography`]: sampling, moment accumulation and Gaussian reconstruction.
//! * [`acceptance`]: the end-to-end acceptance checks.

pub mod acceptance;
pub mod effective_model;
pub mod error;
pub mod gaussian;
pub mod hybrid_qubit;
pub mod measures;
pub mod protocol;
mod simplex;
pub mod tomography;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, SymplecticOp};
pub use nalgebra::{Complex, DMatrix, DVector};
