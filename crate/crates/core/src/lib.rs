//! Passive-scalar advection–diffusion on the normalized 2-torus.
//!
//! The crate simulates three regimes (inviscid shear, diffusive shear, fast
//! time-periodic flow), computes explicit lower-bound certificates for each, and
//! checks them against the simulated norms.

pub mod averaging;
pub mod certificates;
pub mod error;
pub mod flows;
pub mod grid;
pub mod harness;
pub mod inviscid;
pub mod quadrature;
pub mod report;
pub mod shear;
pub mod spectral;
pub mod trajectory;

pub use error::{MixError, Result};
pub use spectral::{Lattice, ModeProfile, SpectralField2D};
