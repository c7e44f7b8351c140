//! Melnikov coefficients, monodromy obstructions and separatrix splitting
//! for periodically forced planar Hamiltonian systems.

pub mod error;
pub mod fourier;
pub mod melnikov;
pub mod numfmt;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod separatrix;
pub mod splitting;
pub mod system;
pub mod variational;

pub use error::{Error, Result};
pub use system::{PlanarSystem, PresetKind, PresetParams, Saddle};
