//! State families and their characteristic functions.
//!
//! Every single-mode state is represented canonically by its symmetric-order
//! characteristic function chi(eta) = Tr[rho D(eta)] as an [`AtomSum`]; the
//! Wigner and Q functions follow by the exact atom-level Fourier transform.
//!
//! ```
//! use bellsim::states::{GaussianVariances, Kind, StateModel};
//!
//! let conditional = StateModel::KimConditional {
//!     variances: GaussianVariances::pure(0.3),
//!     t: 0.9,
//! };
//! let w = conditional.quasiprob(Kind::Wigner)?;
//! assert!((w.integral() - 1.0).abs() < 1e-12);
//! # Ok::<(), bellsim::Error>(())
//! ```

use num_complex::Complex64;

use crate::atoms::{AtomSum, GaussianAtom, ZERO};
use crate::phase::PhasePoint;
use crate::{Error, Result};

/// Quasiprobability ordering: Wigner (symmetric) or Husimi Q (antinormal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Wigner,
    Q,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Wigner => "wigner",
            Kind::Q => "q",
        }
    }
}

/// Photon-number parity of a coherent-state superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Quadrature variances of a (possibly mixed) squeezed Gaussian state,
/// vacuum = 1 in both quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianVariances {
    pub a: f64,
    pub b: f64,
}

impl GaussianVariances {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive, got A={a}, B={b}"
            )));
        }
        if a * b < 1.0 - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "unphysical variances: A*B = {} < 1",
                a * b
            )));
        }
        Ok(GaussianVariances { a, b })
    }

    /// Pure squeezed vacuum with chi(eta) = exp[-(e^{2r} eta_r^2 + e^{-2r} eta_i^2)/2].
    pub fn pure(r: f64) -> Self {
        GaussianVariances {
            a: (2.0 * r).exp(),
            b: (-2.0 * r).exp(),
        }
    }

    pub fn is_pure(&self) -> bool {
        (self.a * self.b - 1.0).abs() < 1e-9
    }
}

/// The six non-zero entries of the two-mode correlation matrix after a
/// beam splitter of transmittivity T acting on the Gaussian input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    pub n1: f64,
    pub n2: f64,
    pub c1: f64,
    pub c2: f64,
    pub m1: f64,
    pub m2: f64,
}

/// n1 = T A + R, n2 = T B + R, c1 = sqrt(T R)(A - 1), c2 = sqrt(T R)(B - 1),
/// m1 = R A + T, m2 = R B + T, with R = 1 - T.
pub fn correlation_matrix(v: GaussianVariances, t: f64) -> Result<CorrelationMatrix> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "transmittivity must be in (0,1), got {t}"
        )));
    }
    let r = 1.0 - t;
    let s = (t * r).sqrt();
    Ok(CorrelationMatrix {
        n1: t * v.a + r,
        n2: t * v.b + r,
        c1: s * (v.a - 1.0),
        c2: s * (v.b - 1.0),
        m1: r * v.a + t,
        m2: r * v.b + t,
    })
}

impl CorrelationMatrix {
    /// The full 4x4 matrix, row-major.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        [
            [self.n1, 0.0, self.c1, 0.0],
            [0.0, self.n2, 0.0, self.c2],
            [self.c1, 0.0, self.m1, 0.0],
            [0.0, self.c2, 0.0, self.m2],
        ]
    }
}

/// Success probability of the ideal (unit-efficiency, non-number-resolving)
/// click that heralds the photon subtraction: 1 - 2/sqrt((1+m1)(1+m2)).
pub fn success_prob_ideal(v: GaussianVariances, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "transmittivity must be in (0,1], got {t}"
        )));
    }
    let r = 1.0 - t;
    let m1 = r * v.a + t;
    let m2 = r * v.b + t;
    Ok(1.0 - 2.0 / ((1.0 + m1) * (1.0 + m2)).sqrt())
}

/// A single-mode state family.
#[derive(Debug, Clone, PartialEq)]
pub enum StateModel {
    Vacuum,
    /// Squeezed (possibly thermal) Gaussian state with the given variances.
    Squeezed { variances: GaussianVariances },
    /// Coherent-state superposition N (|alpha> +- |-alpha>).
    Scs { alpha: f64, parity: Parity },
    /// Squeezed single photon S(r)|1>, the exact one-photon subtraction from
    /// a pure squeezed vacuum.
    PurePsgs { r: f64 },
    /// Conditional state after splitting a (mixed) squeezed Gaussian on a
    /// tap beam splitter and heralding on an ideal click.
    KimConditional { variances: GaussianVariances, t: f64 },
    /// Same conditional state with detector efficiency epsilon folded in.
    LossyPsgs { r: f64, t: f64, epsilon: f64 },
    /// Dark-count mixture pm * base + (1 - pm) * squeezed_ref.
    DarkMix {
        base: Box<StateModel>,
        squeezed_ref: Box<StateModel>,
        pm: f64,
    },
}

/// A characteristic function over (eta_r, eta_i).
#[derive(Debug, Clone)]
pub struct CharFn(pub AtomSum);

impl CharFn {
    pub fn eval(&self, eta: PhasePoint) -> f64 {
        self.0.eval(eta)
    }
}

/// A quasiprobability function over (z_r, z_i).
#[derive(Debug, Clone)]
pub struct QuasiFn {
    pub kind: Kind,
    pub atoms: AtomSum,
}

impl QuasiFn {
    pub fn eval(&self, z: PhasePoint) -> f64 {
        self.atoms.eval(z)
    }

    pub fn integral(&self) -> f64 {
        self.atoms.integral()
    }
}

/// Guard used by `KimConditional`: T must stay away from 1 (the click
/// probability vanishes there and the normalization diverges).
const T_MAX: f64 = 1.0 - 1e-6;

impl StateModel {
    /// Dark-count mixture of the photon-subtracted state and the transmitted
    /// squeezed vacuum, the standard model for fig-7-style sweeps.
    pub fn dark_mix(base: StateModel, squeezed_ref: StateModel, pm: f64) -> Result<StateModel> {
        if !(0.0..=1.0).contains(&pm) {
            return Err(Error::InvalidParameter(format!(
                "modal purity must be in [0,1], got {pm}"
            )));
        }
        Ok(StateModel::DarkMix {
            base: Box::new(base),
            squeezed_ref: Box::new(squeezed_ref),
            pm,
        })
    }

    /// The symmetric-order characteristic function of this state.
    pub fn char_fn(&self) -> Result<CharFn> {
        Ok(CharFn(self.char_atoms()?))
    }

    fn char_atoms(&self) -> Result<AtomSum> {
        match self {
            StateModel::Vacuum => Ok(AtomSum::new(vec![GaussianAtom::centered(
                1.0.into(),
                0.5,
                0.5,
            )])),
            StateModel::Squeezed { variances } => Ok(AtomSum::new(vec![GaussianAtom::centered(
                1.0.into(),
                variances.a / 2.0,
                variances.b / 2.0,
            )])),
            StateModel::Scs { alpha, parity } => scs_char(*alpha, *parity),
            StateModel::PurePsgs { r } => {
                if !r.is_finite() {
                    return Err(Error::InvalidParameter("r must be finite".into()));
                }
                let e2r = (2.0 * r).exp();
                let em2r = (-2.0 * r).exp();
                Ok(AtomSum::new(vec![GaussianAtom::with_poly(
                    1.0.into(),
                    e2r / 2.0,
                    em2r / 2.0,
                    1.0,
                    -e2r,
                    -em2r,
                )]))
            }
            StateModel::KimConditional { variances, t } => kim_char(*variances, *t),
            StateModel::LossyPsgs { r, t, epsilon } => lossy_char(*r, *t, *epsilon),
            StateModel::DarkMix {
                base,
                squeezed_ref,
                pm,
            } => {
                let b = base.char_atoms()?;
                let s = squeezed_ref.char_atoms()?;
                Ok(b.mix(*pm, &s, 1.0 - *pm))
            }
        }
    }

    /// Closed-form Wigner or Q function of this state, normalized to 1.
    pub fn quasiprob(&self, kind: Kind) -> Result<QuasiFn> {
        let chi = self.char_atoms()?;
        let chi = match kind {
            Kind::Wigner => chi,
            Kind::Q => chi.mul_gaussian(0.5, 0.5),
        };
        Ok(QuasiFn {
            kind,
            atoms: chi.char_to_quasi()?,
        })
    }
}

fn scs_char(alpha: f64, parity: Parity) -> Result<AtomSum> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "SCS amplitude must be positive, got {alpha}"
        )));
    }
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let n2 = 1.0 / (2.0 * (1.0 + sign * (-2.0 * alpha * alpha).exp()));
    let g = (-2.0 * alpha * alpha).exp();
    // Diagonal terms exp(-|eta|^2/2 +- 2 i alpha eta_i), cross terms
    // sign * exp(-2 alpha^2) exp(-|eta|^2/2 +- 2 alpha eta_r).
    let atoms = vec![
        GaussianAtom::with_linear(n2.into(), 0.5, 0.5, ZERO, Complex64::new(0.0, 2.0 * alpha)),
        GaussianAtom::with_linear(n2.into(), 0.5, 0.5, ZERO, Complex64::new(0.0, -2.0 * alpha)),
        GaussianAtom::with_linear(
            (sign * n2 * g).into(),
            0.5,
            0.5,
            Complex64::new(2.0 * alpha, 0.0),
            ZERO,
        ),
        GaussianAtom::with_linear(
            (sign * n2 * g).into(),
            0.5,
            0.5,
            Complex64::new(-2.0 * alpha, 0.0),
            ZERO,
        ),
    ];
    Ok(AtomSum::new(atoms))
}

fn kim_char(v: GaussianVariances, t: f64) -> Result<AtomSum> {
    if !(t > 0.0 && t <= T_MAX) {
        return Err(Error::InvalidParameter(format!(
            "KimConditional requires 0 < T <= 1 - 1e-6, got {t}"
        )));
    }
    let p = success_prob_ideal(v, t)?;
    if p <= 1e-12 {
        return Err(Error::ZeroProbabilityConditioning);
    }
    let cm = correlation_matrix(v, t)?;
    let s = ((cm.m1 + 1.0) * (cm.m2 + 1.0)).sqrt();
    let norm = s / (s - 2.0);
    // C_a(zeta) = N e^{-(n1 zr^2 + n2 zi^2)/2} [1 - (2/s) e^{c1^2 zr^2 / 2(m1+1)
    //             + c2^2 zi^2 / 2(m2+1)}]
    let a1 = cm.n1 / 2.0;
    let b1 = cm.n2 / 2.0;
    let a2 = a1 - cm.c1 * cm.c1 / (2.0 * (cm.m1 + 1.0));
    let b2 = b1 - cm.c2 * cm.c2 / (2.0 * (cm.m2 + 1.0));
    Ok(AtomSum::new(vec![
        GaussianAtom::centered(norm.into(), a1, b1),
        GaussianAtom::centered((-norm * 2.0 / s).into(), a2, b2),
    ]))
}

/// Characteristic function of the inefficient-detector conditional state,
/// canonicalized to the same quadrature orientation as the rest of the crate
/// (a quarter rotation of the literal closed form; see
/// [`crate::quasiprob::quasiprob_lossy`]).
fn lossy_char(r: f64, t: f64, epsilon: f64) -> Result<AtomSum> {
    let w = crate::quasiprob::lossy_wigner_atoms(r, t, epsilon)?;
    Ok(w.rotate_quarter().quasi_to_char()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn char_functions_are_one_at_origin() {
        let models = [
            StateModel::Vacuum,
            StateModel::Squeezed {
                variances: GaussianVariances::new(1.5, 0.8).unwrap(),
            },
            StateModel::Scs {
                alpha: 1.0,
                parity: Parity::Odd,
            },
            StateModel::Scs {
                alpha: 0.6,
                parity: Parity::Even,
            },
            StateModel::PurePsgs { r: -0.313 },
            StateModel::KimConditional {
                variances: GaussianVariances::pure(0.3),
                t: 0.9,
            },
            StateModel::LossyPsgs {
                r: 0.3,
                t: 0.95,
                epsilon: 0.6,
            },
        ];
        for m in models {
            let chi = m.char_fn().unwrap();
            assert_relative_eq!(chi.eval(PhasePoint::ORIGIN), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn correlation_matrix_vacuum_is_invariant() {
        let v = GaussianVariances::new(1.0, 1.0).unwrap();
        let cm = correlation_matrix(v, 0.37).unwrap();
        assert_relative_eq!(cm.n1, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cm.n2, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cm.m1, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cm.m2, 1.0, epsilon = 1e-15);
        assert_eq!(cm.c1, 0.0);
        assert_eq!(cm.c2, 0.0);
    }

    #[test]
    fn correlation_matrix_direct_substitution() {
        let v = GaussianVariances::new(0.6f64.exp(), (-0.6f64).exp()).unwrap();
        let cm = correlation_matrix(v, 0.99).unwrap();
        assert_relative_eq!(cm.n1, 0.99 * 0.6f64.exp() + 0.01, epsilon = 1e-14);
        assert_relative_eq!(cm.n2, 0.99 * (-0.6f64).exp() + 0.01, epsilon = 1e-14);
        assert_relative_eq!(cm.m1, 0.01 * 0.6f64.exp() + 0.99, epsilon = 1e-14);
    }

    #[test]
    fn correlation_matrix_is_positive_definite() {
        let v = GaussianVariances::new(1.02 * 0.6f64.exp(), 1.02 * (-0.6f64).exp()).unwrap();
        let cm = correlation_matrix(v, 0.9).unwrap();
        let m = cm.to_matrix();
        // Leading principal minors of the 4x4; the block structure reduces to
        // two 2x2 determinants.
        assert!(m[0][0] > 0.0);
        assert!(m[0][0] * m[2][2] - cm.c1 * cm.c1 > 0.0);
        assert!(m[1][1] > 0.0);
        assert!(m[1][1] * m[3][3] - cm.c2 * cm.c2 > 0.0);
    }

    #[test]
    fn correlation_matrix_rejects_bad_t() {
        let v = GaussianVariances::pure(0.2);
        assert!(correlation_matrix(v, 0.0).is_err());
        assert!(correlation_matrix(v, 1.0).is_err());
        assert!(correlation_matrix(v, -0.5).is_err());
    }

    #[test]
    fn success_prob_vacuum_is_zero() {
        let v = GaussianVariances::new(1.0, 1.0).unwrap();
        for t in [0.1, 0.5, 0.9, 1.0] {
            assert_relative_eq!(success_prob_ideal(v, t).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn success_prob_vanishes_at_full_transmission() {
        let v = GaussianVariances::pure(0.39);
        assert_relative_eq!(success_prob_ideal(v, 1.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kim_rejects_vacuum_conditioning() {
        let v = GaussianVariances::new(1.0, 1.0).unwrap();
        let m = StateModel::KimConditional { variances: v, t: 0.9 };
        assert!(matches!(
            m.char_fn(),
            Err(Error::ZeroProbabilityConditioning)
        ));
    }

    #[test]
    fn kim_rejects_t_too_close_to_one() {
        let m = StateModel::KimConditional {
            variances: GaussianVariances::pure(0.3),
            t: 1.0 - 1e-9,
        };
        assert!(m.char_fn().is_err());
    }

    #[test]
    fn unphysical_variances_rejected() {
        assert!(GaussianVariances::new(0.5, 0.5).is_err());
        assert!(GaussianVariances::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn quasiprobs_are_normalized() {
        let models = [
            StateModel::Scs {
                alpha: 1.0,
                parity: Parity::Odd,
            },
            StateModel::PurePsgs { r: 0.3 },
            StateModel::KimConditional {
                variances: GaussianVariances::pure(0.39),
                t: 0.7,
            },
            StateModel::LossyPsgs {
                r: 0.3,
                t: 0.95,
                epsilon: 0.6,
            },
        ];
        for m in models {
            for kind in [Kind::Wigner, Kind::Q] {
                let q = m.quasiprob(kind).unwrap();
                assert_relative_eq!(q.integral(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kim_converges_to_pure_psgs_as_t_to_one() {
        // Pure input: the conditional state approaches S(r)|1> with sup-norm
        // distance O(1 - T).
        let r = 0.3;
        let target = StateModel::PurePsgs { r }.quasiprob(Kind::Wigner).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.9, 0.99, 0.999] {
            let q = StateModel::KimConditional {
                variances: GaussianVariances::pure(r),
                t,
            }
            .quasiprob(Kind::Wigner)
            .unwrap();
            let mut sup = 0.0f64;
            for i in -4..=4 {
                for j in -4..=4 {
                    let z = PhasePoint::new(i as f64 * 0.25, j as f64 * 0.25);
                    sup = sup.max((q.eval(z) - target.eval(z)).abs());
                }
            }
            assert!(sup < prev, "distance should shrink with T -> 1");
            // O(1-T) rate: distance / (1-T) stays bounded.
            assert!(sup / (1.0 - t) < 5.0);
            prev = sup;
        }
        assert!(prev < 1e-2);
    }
}
