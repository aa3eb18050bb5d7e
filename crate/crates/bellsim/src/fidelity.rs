//! Fidelity between the squeezed single photon and the ideal odd
//! coherent-state superposition, with the squeezing that maximizes it.
//!
//! ```
//! use bellsim::fidelity::{fidelity, optimal_r};
//!
//! let r = optimal_r(1.0)?;
//! assert!((r + 0.313).abs() < 1e-3);
//! assert!(fidelity(r, 1.0)? > 0.996);
//! # Ok::<(), bellsim::Error>(())
//! ```

use crate::{Error, Result};

/// Photon-number amplitude of S(r)|1> on |2n+1>:
///
/// (-tanh r)^n sqrt((2n+1)!) / ((cosh r)^{3/2} 2^n n!)
///
/// Even-photon amplitudes vanish.
pub fn psgs_fock_coeff(r: f64, n: usize) -> f64 {
    let mut c = 1.0 / r.cosh().powf(1.5);
    for k in 1..=n {
        // Multiply by (-tanh r) * sqrt((2k)(2k+1)) / (2k) per step so the
        // factorial ratio never overflows.
        let kk = k as f64;
        c *= -r.tanh() * ((2.0 * kk) * (2.0 * kk + 1.0)).sqrt() / (2.0 * kk);
    }
    c
}

/// Fidelity |<SCS_-(alpha)|S(r)|1>|^2:
///
/// 2 alpha^2 exp[-alpha^2 (tanh r + 1)] / ((cosh r)^3 (1 - exp[-2 alpha^2]))
pub fn fidelity(r: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let num = 2.0 * alpha * alpha * (-alpha * alpha * (r.tanh() + 1.0)).exp();
    let den = r.cosh().powi(3) * -(-2.0 * alpha * alpha).exp_m1();
    Ok(num / den)
}

/// The squeezing that maximizes the fidelity for a given amplitude:
/// cosh r = sqrt(1/2 + sqrt(9 + 4 alpha^4)/6), negative branch.
pub fn optimal_r(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let cosh_r = (0.5 + (9.0 + 4.0 * alpha.powi(4)).sqrt() / 6.0).sqrt();
    Ok(-cosh_r.acosh())
}

/// (alpha, F(optimal_r(alpha), alpha)) pairs for a grid of amplitudes.
pub fn max_fidelity_curve(alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&alpha| {
            let r = optimal_r(alpha)?;
            Ok((alpha, fidelity(r, alpha)?))
        })
        .collect()
}
