//! Open-system simulations of a phononic quantum bus: superconducting qubit →
//! phonon → electron spin transduction, waveguide pitch-and-catch, SiV⁻ strain
//! couplings, electron–nuclear SWAP and phonon-mediated Mølmer–Sørensen gates.
//!
//! Internal units: angular frequencies in rad·µs⁻¹, times in µs. Use [`units`]
//! to convert from ordinary frequencies.

pub mod error;
pub mod hilbert;
pub mod lindblad;
pub mod msgate;
pub mod nuclear;
pub mod pitchcatch;
pub mod strain;
pub mod transduction;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
