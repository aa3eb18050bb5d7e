//! Independent truncated-Fock-space oracle: every state family is built as
//! an explicit density matrix, beam splitters and click conditioning are
//! applied as operators, and Wigner / Q values are measured as displaced
//! parity and displaced vacuum overlaps. Nothing here shares code with the
//! closed-form Gaussian-atom pipeline.
//!
//! ```
//! use bellsim::fock::{build_state, displaced_parity};
//! use bellsim::phase::PhasePoint;
//! use bellsim::quasiprob::wigner_pure_psgs;
//! use bellsim::states::StateModel;
//! use std::f64::consts::PI;
//!
//! let state = build_state(&StateModel::PurePsgs { r: 0.3 }, 40)?;
//! let z = PhasePoint::new(0.4, -0.2);
//! let w_oracle = 2.0 / PI * displaced_parity(&state, z)?;
//! assert!((w_oracle - wigner_pure_psgs(0.3, z)).abs() < 1e-10);
//! # Ok::<(), bellsim::Error>(())
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::phase::PhasePoint;
use crate::states::{GaussianVariances, Parity, StateModel};
use crate::{Error, Result};

type CMat = DMatrix<Complex64>;
type CVec = nalgebra::DVector<Complex64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Tail-mass limits for the cutoff guard.
const TAIL_PURE: f64 = 1e-10;
const TAIL_CONDITIONAL: f64 = 1e-8;
/// Cutoff ceiling for the automatic retry.
const MAX_CUTOFF: usize = 96;
/// Per-mode dimension of the ancilla (tap) mode; the reflected arm carries
/// well under one photon for every parameter set in scope.
const TAP_DIM: usize = 14;

/// A truncated density matrix for one or two modes.
#[derive(Debug, Clone)]
pub struct FockState {
    /// Per-mode dimensions (length 1 or 2).
    pub dims: Vec<usize>,
    pub matrix: CMat,
    /// Population of the top 10% of levels in any mode.
    pub tail_mass: f64,
}

impl FockState {
    fn from_matrix(dims: Vec<usize>, matrix: CMat) -> Self {
        let tail_mass = tail_mass(&dims, &matrix);
        FockState {
            dims,
            matrix,
            tail_mass,
        }
    }

    fn from_vector(dims: Vec<usize>, psi: &CVec) -> Self {
        let m = psi * psi.adjoint();
        FockState::from_matrix(dims, m)
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.nrows())
            .map(|i| self.matrix[(i, i)].re)
            .sum()
    }

    pub fn is_single_mode(&self) -> bool {
        self.dims.len() == 1
    }

    /// Tensor with the vacuum of a `d2`-dimensional ancilla mode.
    pub fn tensor_with_vacuum(&self, d2: usize) -> FockState {
        let mut vac = CMat::zeros(d2, d2);
        vac[(0, 0)] = C1;
        let m = self.matrix.kronecker(&vac);
        FockState::from_matrix(vec![self.dims[0], d2], m)
    }
}

fn tail_mass(dims: &[usize], m: &CMat) -> f64 {
    let mut tail = 0.0;
    match dims {
        [d] => {
            let cut = (*d as f64 * 0.9) as usize;
            for n in cut..*d {
                tail += m[(n, n)].re;
            }
        }
        [d1, d2] => {
            let (c1, c2) = ((*d1 as f64 * 0.9) as usize, (*d2 as f64 * 0.9) as usize);
            for n1 in 0..*d1 {
                for n2 in 0..*d2 {
                    if n1 >= c1 || n2 >= c2 {
                        let i = n1 * d2 + n2;
                        tail += m[(i, i)].re;
                    }
                }
            }
        }
        _ => unreachable!("only 1 or 2 modes"),
    }
    tail
}

/// Annihilation operator on a d-dimensional truncation.
fn annihilation(d: usize) -> CMat {
    let mut a = CMat::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
fn expm(m: &CMat) -> CMat {
    let norm = m.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|v| v / 2f64.powi(s as i32));
    let n = m.nrows();
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=30 {
        term = (&term * &scaled).map(|v| v / k as f64);
        result += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Single-mode squeezing operator S(r) = exp[(r/2)(a^2 - a^{+2})].
fn squeeze_op(d: usize, r: f64) -> CMat {
    let a = annihilation(d);
    let a2 = &a * &a;
    let gen = (&a2 - a2.adjoint()).map(|v| v * (r / 2.0));
    expm(&gen)
}

/// Displacement operator D(z) = exp(z a^+ - z* a).
fn displacement_op(d: usize, z: Complex64) -> CMat {
    let a = annihilation(d);
    let gen = a.adjoint().map(|v| v * z) - a.map(|v| v * z.conj());
    expm(&gen)
}

fn coherent_vec(d: usize, z: Complex64) -> CVec {
    let mut v = CVec::zeros(d);
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..d {
        v[n] = c;
        c = c * z / Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    v
}

/// Squeezed thermal state with the given quadrature variances:
/// 2 n_th + 1 = sqrt(A B), e^{2 r_g} = sqrt(A/B).
fn squeezed_thermal(d: usize, v: GaussianVariances) -> CMat {
    let n_th = ((v.a * v.b).sqrt() - 1.0) / 2.0;
    let r_g = 0.25 * (v.a / v.b).ln();
    let mut rho = CMat::zeros(d, d);
    if n_th < 1e-14 {
        rho[(0, 0)] = C1;
    } else {
        let q = n_th / (n_th + 1.0);
        let mut p = 1.0 / (n_th + 1.0);
        for n in 0..d {
            rho[(n, n)] = Complex64::new(p, 0.0);
            p *= q;
        }
    }
    let s = squeeze_op(d, r_g);
    &s * rho * s.adjoint()
}

/// Build a state family as a normalized single-mode density matrix at the
/// given photon-number cutoff (dimension cutoff + 1). The cutoff is raised
/// automatically, up to a ceiling, if the tail-mass guard trips.
pub fn build_state(model: &StateModel, cutoff: usize) -> Result<FockState> {
    let mut c = cutoff;
    loop {
        match try_build(model, c) {
            Err(Error::CutoffTooSmall { .. }) if c < MAX_CUTOFF => c = (c * 2).min(MAX_CUTOFF),
            other => return other,
        }
    }
}

fn try_build(model: &StateModel, cutoff: usize) -> Result<FockState> {
    let d = cutoff + 1;
    let (state, limit) = match model {
        StateModel::Vacuum => {
            let mut psi = CVec::zeros(d);
            psi[0] = C1;
            (FockState::from_vector(vec![d], &psi), TAIL_PURE)
        }
        StateModel::Squeezed { variances } => (
            FockState::from_matrix(vec![d], squeezed_thermal(d, *variances)),
            if variances.is_pure() { TAIL_PURE } else { TAIL_CONDITIONAL },
        ),
        StateModel::Scs { alpha, parity } => {
            let za = Complex64::new(*alpha, 0.0);
            let plus = coherent_vec(d, za);
            let minus = coherent_vec(d, -za);
            let raw = match parity {
                Parity::Even => plus + minus,
                Parity::Odd => plus - minus,
            };
            let norm = raw.norm();
            let psi = raw.map(|v| v / norm);
            (FockState::from_vector(vec![d], &psi), TAIL_PURE)
        }
        StateModel::PurePsgs { r } => {
            let s = squeeze_op(d, *r);
            let mut one = CVec::zeros(d);
            one[1] = C1;
            let psi = &s * one;
            (FockState::from_vector(vec![d], &psi), TAIL_PURE)
        }
        StateModel::KimConditional { variances, t } => {
            let input = FockState::from_matrix(vec![d], squeezed_thermal(d, *variances));
            let two = apply_bs(&input.tensor_with_vacuum(TAP_DIM), *t)?;
            let (out, _prob) = condition_click(&two, 1.0)?;
            (out, TAIL_CONDITIONAL)
        }
        StateModel::LossyPsgs { r, t, epsilon } => {
            let input = FockState::from_matrix(vec![d], squeezed_thermal(d, GaussianVariances::pure(*r)));
            let two = apply_bs(&input.tensor_with_vacuum(TAP_DIM), *t)?;
            let (out, _prob) = condition_click(&two, *epsilon)?;
            (out, TAIL_CONDITIONAL)
        }
        StateModel::DarkMix {
            base,
            squeezed_ref,
            pm,
        } => {
            let b = try_build(base, cutoff)?;
            let s = try_build(squeezed_ref, cutoff)?;
            if b.dims != s.dims {
                return Err(Error::DimensionMismatch(
                    "dark-count mixture components must share a cutoff".into(),
                ));
            }
            let m = b.matrix.map(|v| v * *pm) + s.matrix.map(|v| v * (1.0 - *pm));
            (FockState::from_matrix(b.dims.clone(), m), TAIL_CONDITIONAL)
        }
    };
    if state.tail_mass > limit {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass: state.tail_mass,
            limit,
        });
    }
    Ok(state)
}

/// Conjugate a two-mode state by the number-conserving beam-splitter unitary
/// with transmittivity T = 1 - sin^2(theta/2).
pub fn apply_bs(state: &FockState, t: f64) -> Result<FockState> {
    if state.dims.len() != 2 {
        return Err(Error::DimensionMismatch(
            "apply_bs needs a two-mode state".into(),
        ));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "transmittivity must be in [0,1], got {t}"
        )));
    }
    let (d1, d2) = (state.dims[0], state.dims[1]);
    let theta = 2.0 * t.sqrt().acos();
    let a = annihilation(d1);
    let b = annihilation(d2);
    let adag_b = a.adjoint().kronecker(&b);
    let a_bdag = a.kronecker(&b.adjoint());
    let gen = (adag_b - a_bdag).map(|v| v * (theta / 2.0));
    let u = expm(&gen);
    let m = &u * &state.matrix * u.adjoint();
    Ok(FockState::from_matrix(state.dims.clone(), m))
}

/// Herald on a click of a non-number-resolving detector of efficiency
/// epsilon on mode 2: POVM element 1 - sum_n (1-eps)^n |n><n|. Returns the
/// renormalized mode-1 state and the click probability.
pub fn condition_click(state: &FockState, epsilon: f64) -> Result<(FockState, f64)> {
    if state.dims.len() != 2 {
        return Err(Error::DimensionMismatch(
            "condition_click needs a two-mode state".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "efficiency must be in (0,1], got {epsilon}"
        )));
    }
    let (d1, d2) = (state.dims[0], state.dims[1]);
    let mut reduced = CMat::zeros(d1, d1);
    for n in 0..d2 {
        let w = 1.0 - (1.0 - epsilon).powi(n as i32);
        if w == 0.0 {
            continue;
        }
        for i in 0..d1 {
            for k in 0..d1 {
                reduced[(i, k)] += state.matrix[(i * d2 + n, k * d2 + n)] * w;
            }
        }
    }
    let prob: f64 = (0..d1).map(|i| reduced[(i, i)].re).sum();
    if prob < 1e-14 {
        return Err(Error::ZeroProbabilityConditioning);
    }
    let m = reduced.map(|v| v / prob);
    Ok((FockState::from_matrix(vec![d1], m), prob))
}

/// Click probability of the heralding detector: squeezed input, tap beam
/// splitter, detector of efficiency epsilon on the reflected arm. The
/// reflected arm alone is a squeezed thermal state with variances (m1, m2),
/// so only a single-mode matrix is needed.
pub fn click_probability(
    variances: GaussianVariances,
    t: f64,
    epsilon: f64,
    cutoff: usize,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "efficiency must be in (0,1], got {epsilon}"
        )));
    }
    let cm = crate::states::correlation_matrix(variances, t)?;
    let mv = GaussianVariances::new(cm.m1, cm.m2)?;
    let d = cutoff + 1;
    let rho = squeezed_thermal(d, mv);
    let tail = tail_mass(&[d], &rho);
    if tail > TAIL_CONDITIONAL {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass: tail,
            limit: TAIL_CONDITIONAL,
        });
    }
    let mut no_click = 0.0;
    for n in 0..d {
        no_click += rho[(n, n)].re * (1.0 - epsilon).powi(n as i32);
    }
    Ok(1.0 - no_click)
}

fn guard_displacement(state: &FockState, z: PhasePoint) -> Result<()> {
    let cutoff = state.dims[0] - 1;
    if z.norm_sqr() >= 0.1 * cutoff as f64 {
        return Err(Error::DisplacementGuard {
            z_sqr: z.norm_sqr(),
            cutoff,
        });
    }
    Ok(())
}

/// Tr[rho D(z) (-1)^n D(z)^+]; the oracle Wigner is (2/pi) times this.
pub fn displaced_parity(state: &FockState, z: PhasePoint) -> Result<f64> {
    if !state.is_single_mode() {
        return Err(Error::DimensionMismatch(
            "displaced_parity needs a single-mode state".into(),
        ));
    }
    guard_displacement(state, z)?;
    let d = state.dims[0];
    let disp = displacement_op(d, z.to_complex());
    let m = disp.adjoint() * &state.matrix * &disp;
    let mut val = 0.0;
    for n in 0..d {
        val += if n % 2 == 0 { m[(n, n)].re } else { -m[(n, n)].re };
    }
    Ok(val)
}

/// <z| rho |z>; the oracle Q is this value over pi.
pub fn displaced_vacuum_overlap(state: &FockState, z: PhasePoint) -> Result<f64> {
    if !state.is_single_mode() {
        return Err(Error::DimensionMismatch(
            "displaced_vacuum_overlap needs a single-mode state".into(),
        ));
    }
    guard_displacement(state, z)?;
    let v = coherent_vec(state.dims[0], z.to_complex());
    Ok((v.adjoint() * &state.matrix * &v)[(0, 0)].re)
}

/// Symmetric-order characteristic function Tr[rho D(eta)].
pub fn char_value(state: &FockState, eta: PhasePoint) -> Result<f64> {
    if !state.is_single_mode() {
        return Err(Error::DimensionMismatch(
            "char_value needs a single-mode state".into(),
        ));
    }
    guard_displacement(state, eta)?;
    let d = state.dims[0];
    let disp = displacement_op(d, eta.to_complex());
    let mut tr = C0;
    let prod = &state.matrix * &disp;
    for n in 0..d {
        tr += prod[(n, n)];
    }
    Ok(tr.re)
}

/// Two-mode Wigner value (2/pi)^2 <Pi(z1) Pi(z2)>.
pub fn two_mode_wigner(state: &FockState, z1: PhasePoint, z2: PhasePoint) -> Result<f64> {
    if state.dims.len() != 2 {
        return Err(Error::DimensionMismatch(
            "two_mode_wigner needs a two-mode state".into(),
        ));
    }
    let (d1, d2) = (state.dims[0], state.dims[1]);
    let u = displacement_op(d1, z1.to_complex()).kronecker(&displacement_op(d2, z2.to_complex()));
    let m = u.adjoint() * &state.matrix * &u;
    let mut val = 0.0;
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let i = n1 * d2 + n2;
            let sign = if (n1 + n2) % 2 == 0 { 1.0 } else { -1.0 };
            val += sign * m[(i, i)].re;
        }
    }
    Ok(val * (2.0 / std::f64::consts::PI).powi(2))
}

/// Two-mode Q value <z1 z2| rho |z1 z2> / pi^2.
pub fn two_mode_q(state: &FockState, z1: PhasePoint, z2: PhasePoint) -> Result<f64> {
    if state.dims.len() != 2 {
        return Err(Error::DimensionMismatch(
            "two_mode_q needs a two-mode state".into(),
        ));
    }
    let v = coherent_vec(state.dims[0], z1.to_complex())
        .kronecker(&coherent_vec(state.dims[1], z2.to_complex()));
    let val = (v.adjoint() * &state.matrix * &v)[(0, 0)].re;
    Ok(val / std::f64::consts::PI.powi(2))
}

/// Reduced state of one mode of a two-mode state.
pub fn partial_trace(state: &FockState, keep: u8) -> Result<FockState> {
    if state.dims.len() != 2 {
        return Err(Error::DimensionMismatch(
            "partial_trace needs a two-mode state".into(),
        ));
    }
    let (d1, d2) = (state.dims[0], state.dims[1]);
    let m = match keep {
        1 => {
            let mut out = CMat::zeros(d1, d1);
            for i in 0..d1 {
                for k in 0..d1 {
                    for n in 0..d2 {
                        out[(i, k)] += state.matrix[(i * d2 + n, k * d2 + n)];
                    }
                }
            }
            out
        }
        2 => {
            let mut out = CMat::zeros(d2, d2);
            for i in 0..d2 {
                for k in 0..d2 {
                    for n in 0..d1 {
                        out[(i, k)] += state.matrix[(n * d2 + i, n * d2 + k)];
                    }
                }
            }
            out
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "keep must be 1 or 2, got {keep}"
            )))
        }
    };
    let dim = m.nrows();
    Ok(FockState::from_matrix(vec![dim], m))
}
