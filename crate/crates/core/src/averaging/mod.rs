//! Fast-oscillation machinery: averaged operator, detecting root space and the
//! resulting lower-bound certificate, all at spectral truncation.

pub mod certificate;
pub mod damping;
pub mod expm;
pub mod observables;
pub mod operator;
pub mod schur;
pub mod solver;
pub mod spectrum;
pub mod sylvester;

pub use certificate::{check_fast_bound, fast_certificate, EtaChoice, FastCertificate, FastInputs};
pub use damping::{damping_constant, DampingEstimate};
pub use observables::observable_series;
pub use operator::{averaged_operator, AveragedOperator};
pub use solver::{evolve_2d, Solve2dOptions};
pub use spectrum::{detecting_spectrum, DetectingSpectrum};
pub use sylvester::{sylvester_constant, SylvesterEstimate};
