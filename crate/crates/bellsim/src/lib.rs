//! Closed-form quasiprobability functions (characteristic, Wigner, Husimi Q)
//! for photon-subtracted squeezed states and coherent-state superpositions,
//! together with Bell-CHSH / Bell-CH functionals maximized over displacement
//! settings.
//!
//! Every closed form is represented as a sum of Gaussian atoms
//! (see [`atoms`]), so Fourier transforms between the characteristic and
//! quasiprobability pictures, marginals, and normalization integrals are all
//! exact coefficient rewrites. An independent truncated-Fock-space oracle
//! ([`fock`]) cross-checks every state family numerically.
//!
//! ```
//! use bellsim::phase::PhasePoint;
//! use bellsim::quasiprob::wigner_vacuum;
//!
//! let w0 = wigner_vacuum(PhasePoint::ORIGIN);
//! assert!((w0 - 2.0 / std::f64::consts::PI).abs() < 1e-15);
//! ```

pub mod atoms;
pub mod bell;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod phase;
pub mod quasiprob;
pub mod states;
pub mod sweep;
pub mod two_mode;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
