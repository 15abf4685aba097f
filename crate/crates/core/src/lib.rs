//! Steady states and cavity emission spectra of a quantum dot in a cavity
//! driven by a strong pump and a weak, detuned probe.
//!
//! The time-periodic Lindblad equation is reduced to Fourier harmonics of
//! the probe beat and solved with matrix continued fractions; spectra follow
//! from the quantum regression theorem.
//!
//! ```
//! use bichromatic_core::{params::SystemParams, spectra::cavity_intensity};
//!
//! let p = SystemParams { j1: 0.5, ..Default::default() };
//! let n = cavity_intensity(&p).unwrap();
//! assert!(n > 0.0);
//! ```

pub mod error;
pub mod experiments;
pub mod floquet;
pub mod linalg;
pub mod liouvillian;
pub mod oracles;
pub mod ops;
pub mod optimize;
pub mod params;
pub mod spectra;

pub use error::{Error, Result};
pub use params::{DriveTarget, HilbertConfig, SystemParams};
