//! Two-mode quasiprobability functions from splitting a single-mode state on
//! a 50:50 beam splitter with vacuum in the other port, plus the
//! entangled-coherent-state Q function and exact marginals.

use std::f64::consts::PI;

use crate::atoms::AtomSum;
use crate::phase::PhasePoint;
use crate::quasiprob::{q_vacuum, wigner_vacuum};
use crate::states::{CharFn, Kind, Parity, StateModel};
use crate::{Error, Result};

/// Beam-splitter angle/transmittivity pair: R = sin^2(theta/2), T = 1 - R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterConfig {
    pub theta: f64,
}

impl BeamSplitterConfig {
    pub fn from_transmittivity(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "transmittivity must be in [0,1], got {t}"
            )));
        }
        Ok(BeamSplitterConfig {
            theta: 2.0 * t.sqrt().acos(),
        })
    }

    pub fn reflectivity(&self) -> f64 {
        (self.theta / 2.0).sin().powi(2)
    }

    pub fn transmittivity(&self) -> f64 {
        1.0 - self.reflectivity()
    }
}

/// A normalized two-mode Wigner or Q function with closed-form marginals.
#[derive(Debug, Clone)]
pub struct TwoModeQuasiprob {
    kind: Kind,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    /// 50:50 split of a single-mode state with vacuum in the second port:
    /// eval(z1, z2) = single((z1+z2)/sqrt2) * vac((z2-z1)/sqrt2).
    Split {
        single: AtomSum,
        /// Quasiprobability atoms of either marginal (both marginals of a
        /// vacuum-port split coincide).
        marginal: AtomSum,
    },
    /// The entangled coherent state from splitting an odd SCS (Q kind only).
    Ecs { alpha: f64 },
}

impl TwoModeQuasiprob {
    /// Split a single-mode state (given by its characteristic function) on a
    /// 50:50 beam splitter with vacuum in the other input port.
    pub fn split(chi: &CharFn, kind: Kind) -> Result<Self> {
        let single_chi = match kind {
            Kind::Wigner => chi.0.clone(),
            Kind::Q => chi.0.mul_gaussian(0.5, 0.5),
        };
        let single = single_chi.char_to_quasi()?;
        // Marginal of either mode: chi_m(eta) = chi(eta/sqrt2) chi_vac(eta/sqrt2),
        // with chi_vac(eta/sqrt2) = exp(-|eta|^2/4).
        let marg_chi = chi.0.scale_arg(std::f64::consts::FRAC_1_SQRT_2).mul_gaussian(0.25, 0.25);
        let marg_chi = match kind {
            Kind::Wigner => marg_chi,
            Kind::Q => marg_chi.mul_gaussian(0.5, 0.5),
        };
        let marginal = marg_chi.char_to_quasi()?;
        Ok(TwoModeQuasiprob {
            kind,
            repr: Repr::Split { single, marginal },
        })
    }

    /// Convenience: split a [`StateModel`] directly.
    pub fn split_state(state: &StateModel, kind: Kind) -> Result<Self> {
        Self::split(&state.char_fn()?, kind)
    }

    /// The entangled coherent state N_-(|beta,beta> - |-beta,-beta>) with
    /// beta = alpha/sqrt2, evaluated through the closed-form Q expression.
    pub fn ecs(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ECS amplitude must be positive, got {alpha}"
            )));
        }
        Ok(TwoModeQuasiprob {
            kind: Kind::Q,
            repr: Repr::Ecs { alpha },
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn eval(&self, z1: PhasePoint, z2: PhasePoint) -> f64 {
        match &self.repr {
            Repr::Split { single, .. } => {
                let u = z1.sum_scaled(z2);
                let v = z1.diff_scaled(z2);
                let vac = match self.kind {
                    Kind::Wigner => wigner_vacuum(v),
                    Kind::Q => q_vacuum(v),
                };
                single.eval(u) * vac
            }
            Repr::Ecs { alpha } => q_ecs(*alpha, z1, z2),
        }
    }

    /// The marginal quasiprobability of one mode (closed form).
    pub fn marginal(&self, mode: u8, z: PhasePoint) -> Result<f64> {
        if mode != 1 && mode != 2 {
            return Err(Error::InvalidParameter(format!("mode must be 1 or 2, got {mode}")));
        }
        match &self.repr {
            Repr::Split { marginal, .. } => Ok(marginal.eval(z)),
            Repr::Ecs { alpha } => Ok(q_ecs_marginal(*alpha, z)),
        }
    }

    /// Exact normalization integral (1 for every constructible state).
    pub fn integral(&self) -> f64 {
        match &self.repr {
            // The split coordinate map is orthogonal with unit Jacobian, so
            // the double integral factorizes.
            Repr::Split { single, .. } => single.integral(),
            Repr::Ecs { alpha } => {
                let g = (-alpha * alpha).exp();
                let n2 = 1.0 / (2.0 * (1.0 - (-2.0 * alpha * alpha).exp()));
                n2 * (2.0 - 2.0 * g * g)
            }
        }
    }
}

/// Free-function form of [`TwoModeQuasiprob::split`].
pub fn split_5050(single: &CharFn, kind: Kind) -> Result<TwoModeQuasiprob> {
    TwoModeQuasiprob::split(single, kind)
}

/// Q function of the odd entangled coherent state, beta = alpha/sqrt2:
///
/// (N_-^2/pi^2) { e^{-|z1-b|^2 - |z2-b|^2} + e^{-|z1+b|^2 - |z2+b|^2}
///   - 2 Re e^{-(z1-b)(z1*+b) - (z2-b)(z2*+b) - 4b^2} }
///
/// normalized so the double integral is 1. The sign pattern pairs equal
/// coherent amplitudes in the two modes, matching the vacuum-port split
/// convention used throughout this crate (the opposite pairing differs only
/// by a local parity on mode 2).
pub fn q_ecs(alpha: f64, z1: PhasePoint, z2: PhasePoint) -> f64 {
    let b = alpha / 2.0f64.sqrt();
    let n2 = 1.0 / (2.0 * (1.0 - (-2.0 * alpha * alpha).exp()));
    let c1 = z1.to_complex();
    let c2 = z2.to_complex();
    let d1 = -(z1.re - b).powi(2) - z1.im * z1.im - (z2.re - b).powi(2) - z2.im * z2.im;
    let d2 = -(z1.re + b).powi(2) - z1.im * z1.im - (z2.re + b).powi(2) - z2.im * z2.im;
    let cross = -(c1 - b) * (c1.conj() + b) - (c2 - b) * (c2.conj() + b) - 4.0 * b * b;
    n2 / (PI * PI) * (d1.exp() + d2.exp() - 2.0 * cross.exp().re)
}

/// Closed-form marginal of either ECS mode:
/// (N_-^2/pi) [ e^{-|z-b|^2} + e^{-|z+b|^2} - 2 e^{-3b^2} e^{-|z|^2} cos(2 b z_i) ].
fn q_ecs_marginal(alpha: f64, z: PhasePoint) -> f64 {
    let b = alpha / 2.0f64.sqrt();
    let n2 = 1.0 / (2.0 * (1.0 - (-2.0 * alpha * alpha).exp()));
    let g1 = (-(z.re - b).powi(2) - z.im * z.im).exp();
    let g2 = (-(z.re + b).powi(2) - z.im * z.im).exp();
    let cross = 2.0 * (-3.0 * b * b).exp() * (-z.norm_sqr()).exp() * (2.0 * b * z.im).cos();
    n2 / PI * (g1 + g2 - cross)
}

/// ECS marginal as an atom sum, used by tests to check path independence.
#[cfg(test)]
pub(crate) fn q_ecs_marginal_atoms(alpha: f64) -> AtomSum {
    use crate::atoms::{GaussianAtom, ZERO};
    use num_complex::Complex64;

    let b = alpha / 2.0f64.sqrt();
    let n2 = 1.0 / (2.0 * (1.0 - (-2.0 * alpha * alpha).exp()));
    let c = n2 / PI * (-b * b).exp();
    AtomSum::new(vec![
        GaussianAtom::with_linear(c.into(), 1.0, 1.0, (2.0 * b).into(), ZERO),
        GaussianAtom::with_linear(c.into(), 1.0, 1.0, (-2.0 * b).into(), ZERO),
        GaussianAtom::with_linear(
            (-n2 / PI * (-3.0 * b * b).exp()).into(),
            1.0,
            1.0,
            ZERO,
            Complex64::new(0.0, 2.0 * b),
        ),
        GaussianAtom::with_linear(
            (-n2 / PI * (-3.0 * b * b).exp()).into(),
            1.0,
            1.0,
            ZERO,
            Complex64::new(0.0, -2.0 * b),
        ),
    ])
}

/// Build the two-mode function a Bell functional needs for a state family.
pub fn for_bell(state: &StateModel, kind: Kind) -> Result<TwoModeQuasiprob> {
    match (state, kind) {
        (StateModel::Scs { alpha, parity: Parity::Odd }, Kind::Q) => TwoModeQuasiprob::ecs(*alpha),
        _ => TwoModeQuasiprob::split_state(state, kind),
    }
}
