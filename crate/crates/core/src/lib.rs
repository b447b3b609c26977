//! Out-of-time-order correlators (OTOCs) in the Lipkin-Meshkov-Glick model.
//!
//! The crate diagonalizes the LMG Hamiltonian in the symmetric `S = N/2`
//! sector, evaluates `F(t) = <W(t) V W(t) V>` with `W = V = S_x/S` after a
//! field quench or in single eigenstates, and turns long-time averages of
//! `Re F` into order-parameter curves and power-law fits around the
//! excited-state quantum phase transition.

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod lmg;
pub mod otoc;
pub mod spin;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
