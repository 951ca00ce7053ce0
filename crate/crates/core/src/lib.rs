//! Quantum sideband high-harmonic generation: strong-field emission kernels,
//! phase-matched photon numbers and the sideband/squeezed-vacuum Fock state.

pub mod emission;
pub mod error;
pub mod fockspace;
pub mod macroscopic;
pub mod observables;
pub mod reduce;
pub mod scenario;
pub mod sfa;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
