//! Closed-form single-mode characteristic, Wigner, and Q functions for every
//! state family, including the beam-splitter and detector imperfection
//! models.
//!
//! These are the literal closed forms; [`crate::states`] builds the same
//! functions through the Gaussian-atom pipeline, and the two routes are
//! cross-checked in tests together with the Fock oracle.

use std::f64::consts::PI;

use crate::atoms::{AtomSum, GaussianAtom};
use crate::phase::PhasePoint;
use crate::states::{correlation_matrix, GaussianVariances, Kind, Parity, QuasiFn};
use crate::{Error, Result};

/// Ordering index j of the generalized quasiprobability family:
/// j = 0 selects the Wigner function, j = -1 the Q function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingIndex {
    Wigner,
    Q,
}

impl OrderingIndex {
    pub fn from_j(j: i32) -> Result<Self> {
        match j {
            0 => Ok(OrderingIndex::Wigner),
            -1 => Ok(OrderingIndex::Q),
            _ => Err(Error::InvalidParameter(format!(
                "ordering index must be 0 or -1, got {j}"
            ))),
        }
    }

    pub fn j(self) -> f64 {
        match self {
            OrderingIndex::Wigner => 0.0,
            OrderingIndex::Q => -1.0,
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            OrderingIndex::Wigner => Kind::Wigner,
            OrderingIndex::Q => Kind::Q,
        }
    }
}

/// Characteristic function of the squeezed single photon S(r)|1>:
///
/// exp[-(e^{2r} eta_r^2 + e^{-2r} eta_i^2)/2] (1 - e^{2r} eta_r^2 - e^{-2r} eta_i^2).
pub fn char_pure_psgs(r: f64, eta: PhasePoint) -> f64 {
    let e2r = (2.0 * r).exp();
    let em2r = (-2.0 * r).exp();
    let qr = e2r * eta.re * eta.re;
    let qi = em2r * eta.im * eta.im;
    (-0.5 * (qr + qi)).exp() * (1.0 - qr - qi)
}

/// Wigner function of the squeezed single photon:
///
/// (2/pi) exp[-2(e^{2r} z_r^2 + e^{-2r} z_i^2)] (4 e^{2r} z_r^2 + 4 e^{-2r} z_i^2 - 1).
pub fn wigner_pure_psgs(r: f64, z: PhasePoint) -> f64 {
    let e2r = (2.0 * r).exp();
    let em2r = (-2.0 * r).exp();
    let qr = e2r * z.re * z.re;
    let qi = em2r * z.im * z.im;
    2.0 / PI * (-2.0 * (qr + qi)).exp() * (4.0 * qr + 4.0 * qi - 1.0)
}

/// Wigner function of the even/odd coherent-state superposition
/// N_pm (|alpha> +- |-alpha>).
pub fn wigner_scs(alpha: f64, parity: Parity, z: PhasePoint) -> f64 {
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let g = (-2.0 * alpha * alpha).exp();
    let pre = (-2.0 * z.norm_sqr()).exp() / (PI * (1.0 + sign * g));
    pre * (g * ((-4.0 * alpha * z.re).exp() + (4.0 * alpha * z.re).exp())
        + sign * 2.0 * (4.0 * alpha * z.im).cos())
}

/// Wigner function of the vacuum, (2/pi) e^{-2|z|^2}.
pub fn wigner_vacuum(z: PhasePoint) -> f64 {
    2.0 / PI * (-2.0 * z.norm_sqr()).exp()
}

/// Q function of the vacuum, (1/pi) e^{-|z|^2}.
pub fn q_vacuum(z: PhasePoint) -> f64 {
    1.0 / PI * (-z.norm_sqr()).exp()
}

/// Characteristic function of the conditional photon-subtracted state from a
/// (possibly mixed) squeezed Gaussian input, tap transmittivity T, ideal
/// click detector.
pub fn char_kim_conditional(v: GaussianVariances, t: f64, zeta: PhasePoint) -> Result<f64> {
    // Reuse the validated atom construction; it is the literal closed form.
    let chi = crate::states::StateModel::KimConditional { variances: v, t }.char_fn()?;
    Ok(chi.eval(zeta))
}

/// Unnormalized correlation-matrix entries are validated here so callers get
/// the same errors from either route.
pub fn kim_normalization(v: GaussianVariances, t: f64) -> Result<f64> {
    let cm = correlation_matrix(v, t)?;
    let s = ((cm.m1 + 1.0) * (cm.m2 + 1.0)).sqrt();
    Ok(s / (s - 2.0))
}

/// Internal parameters of the inefficient-detector conditional state.
struct LossyParams {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    weight2: f64,
}

fn lossy_params(r: f64, t: f64, epsilon: f64, j: f64) -> Result<LossyParams> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lossy model requires r > 0, got {r}"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "transmittivity must be in (0,1), got {t}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "detector efficiency must be in (0,1], got {epsilon}"
        )));
    }
    let e2r = (2.0 * r).exp();
    let em2r = (-2.0 * r).exp();

    // a_1^{+-} = (1 + (e^{+-2r} - 1) t)/2
    let a1p = 0.5 * (1.0 + (e2r - 1.0) * t);
    let a1m = 0.5 * (1.0 + (em2r - 1.0) * t);
    // a_2^{+-} = 1/2 +- t sinh r / (cosh r -+ (1 - eps(1 - t)) sinh r)
    let (sh, ch) = (r.sinh(), r.cosh());
    let k = 1.0 - epsilon * (1.0 - t);
    let a2p = 0.5 + t * sh / (ch - k * sh);
    let a2m = 0.5 - t * sh / (ch + k * sh);

    let atom = |ap: f64, am: f64| -> Result<(f64, f64, f64)> {
        let aa = 0.5 * (ap + am);
        let bb = 0.25 * (am - ap);
        let d = (2.0 * aa - j).powi(2) - 16.0 * bb * bb;
        if d <= 0.0 {
            return Err(Error::InvalidParameter(
                "lossy quasiprobability parameters out of range".into(),
            ));
        }
        // Exponent: -[2(2A - j)|z|^2 + 8 B (z_r^2 - z_i^2)] / D
        let ax = (2.0 * (2.0 * aa - j) + 8.0 * bb) / d;
        let ay = (2.0 * (2.0 * aa - j) - 8.0 * bb) / d;
        if ax <= 0.0 || ay <= 0.0 {
            return Err(Error::InvalidParameter(
                "lossy quasiprobability is non-integrable".into(),
            ));
        }
        Ok((2.0 / (PI * d.sqrt()), ax, ay))
    };

    let (c1, ax1, ay1) = atom(a1p, a1m)?;
    let (c2, ax2, ay2) = atom(a2p, a2m)?;

    // h^{+-} and the measurement covariance sigma_M = (2 - eps)/(2 eps) * 1.
    let hp = 0.5 * (e2r * (1.0 - t) + t);
    let hm = 0.5 * (em2r * (1.0 - t) + t);
    let sm = (2.0 - epsilon) / (2.0 * epsilon);
    let det = (hp + sm) * (hm + sm);
    let denom = epsilon * det.sqrt();
    if denom - 1.0 <= 1e-12 {
        return Err(Error::ZeroProbabilityConditioning);
    }

    // Both G_k are unit-normalized Gaussians, so the overall normalization is
    // a closed form; it is re-validated against the exact atom integral in
    // tests.
    let _ = (c1, c2);
    Ok(LossyParams {
        a1: ax1,
        b1: ay1,
        a2: ax2,
        b2: ay2,
        weight2: 1.0 / denom,
    })
}

/// Atom sum of the lossy quasiprobability for the given ordering, normalized
/// so the plane integral is exactly 1, in the literal orientation of the
/// closed form (for r > 0 the z_i quadrature is the narrow one).
pub(crate) fn lossy_atoms(r: f64, t: f64, epsilon: f64, j: OrderingIndex) -> Result<AtomSum> {
    let p = lossy_params(r, t, epsilon, j.j())?;
    // Each G_k is a unit-normalized Gaussian, so its prefactor 2/(pi sqrt(D))
    // equals sqrt(a b)/pi.
    let g1 = GaussianAtom::centered(((p.a1 * p.b1).sqrt() / PI).into(), p.a1, p.b1);
    let g2 = GaussianAtom::centered(
        (-p.weight2 * (p.a2 * p.b2).sqrt() / PI).into(),
        p.a2,
        p.b2,
    );
    let raw = AtomSum::new(vec![g1, g2]);
    let norm = raw.integral();
    if norm.abs() < 1e-14 {
        return Err(Error::ZeroProbabilityConditioning);
    }
    Ok(raw.scaled(1.0 / norm))
}

/// Wigner atoms of the lossy model (j = 0), used by the canonical state
/// pipeline.
pub(crate) fn lossy_wigner_atoms(r: f64, t: f64, epsilon: f64) -> Result<AtomSum> {
    lossy_atoms(r, t, epsilon, OrderingIndex::Wigner)
}

/// Generalized quasiprobability W_j(z) of the photon-subtracted squeezed
/// state with tap transmittivity T and detection efficiency epsilon,
/// normalized to integrate to 1.
pub fn quasiprob_lossy(
    r: f64,
    t: f64,
    epsilon: f64,
    j: OrderingIndex,
    z: PhasePoint,
) -> Result<f64> {
    Ok(lossy_atoms(r, t, epsilon, j)?.eval(z))
}

/// Dark-count mixture pm * w_sub(z) + (1 - pm) * w_sq(z).
pub fn mix_dark(pm: f64, w_sub: &QuasiFn, w_sq: &QuasiFn, z: PhasePoint) -> Result<f64> {
    if !(0.0..=1.0).contains(&pm) {
        return Err(Error::InvalidParameter(format!(
            "modal purity must be in [0,1], got {pm}"
        )));
    }
    if w_sub.kind != w_sq.kind {
        return Err(Error::KindMismatch {
            expected: w_sub.kind.name(),
            found: w_sq.kind.name(),
        });
    }
    Ok(pm * w_sub.eval(z) + (1.0 - pm) * w_sq.eval(z))
}
