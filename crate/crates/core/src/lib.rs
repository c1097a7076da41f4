//! De Donder–Weyl polymomentum mechanics and its precanonical quantization.
//!
//! The crate is split along the layers of the formalism:
//!
//! - [`clifford`]: spacetime Clifford algebra with complex coefficients, the
//!   unit pseudoscalar `γ`, and the operators realizing polymomenta and the
//!   volume-element forms.
//! - [`gradedforms`]: exact polynomial forms on the polymomentum phase space,
//!   the polysymplectic map to vertical multivectors and the graded Poisson
//!   bracket.
//! - [`dwmech`]: classical scalar field models, polymomenta, the DW
//!   Hamiltonian and residual checks of the DW and DW Hamilton–Jacobi
//!   equations.
//! - [`quantum`]: the DW Hamiltonian operator, its spectrum, separated
//!   solutions of the covariant Schrödinger equation and their residual,
//!   conservation and quasiclassical checks.
//! - [`vacuum`]: Gaussian coefficients of the composed vacuum amplitude
//!   against the functional Schrödinger vacuum.

pub mod clifford;
pub mod dwmech;
pub mod error;
pub mod gradedforms;
pub mod quantum;
pub mod vacuum;

pub use error::{Error, Result};
