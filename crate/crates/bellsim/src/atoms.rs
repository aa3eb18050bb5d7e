//! Gaussian atoms: the closed function class behind every characteristic and
//! quasiprobability function in this crate.
//!
//! One atom over the plane (x, y) evaluates to
//!
//! ```text
//! coeff * exp(-a x^2 - b y^2 + lx x + ly y) * (p0 + px x^2 + py y^2)
//! ```
//!
//! with complex `coeff`, `lx`, `ly` and real decays and polynomial
//! coefficients. Sums of atoms are closed under the symplectic Fourier
//! transform that maps characteristic functions to quasiprobabilities (and
//! back), under Gaussian reweighting (ordering changes), argument scaling
//! (beam-splitter marginals) and plane integration -- as long as no atom
//! carries a linear term *and* a non-constant polynomial at the same time.
//! The states in this crate never produce that combination.

use num_complex::Complex64;

use crate::phase::PhasePoint;
use crate::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A single Gaussian atom. See the module docs for the evaluation rule.
#[derive(Debug, Clone, Copy)]
pub struct GaussianAtom {
    pub coeff: Complex64,
    /// x^2 decay; must be > 0 for the atom to be integrable.
    pub a: f64,
    /// y^2 decay.
    pub b: f64,
    pub lx: Complex64,
    pub ly: Complex64,
    pub p0: f64,
    pub px: f64,
    pub py: f64,
}

impl GaussianAtom {
    /// Centered Gaussian with a constant prefactor.
    pub fn centered(coeff: Complex64, a: f64, b: f64) -> Self {
        GaussianAtom {
            coeff,
            a,
            b,
            lx: ZERO,
            ly: ZERO,
            p0: 1.0,
            px: 0.0,
            py: 0.0,
        }
    }

    /// Centered Gaussian with an even polynomial prefactor.
    pub fn with_poly(coeff: Complex64, a: f64, b: f64, p0: f64, px: f64, py: f64) -> Self {
        GaussianAtom {
            coeff,
            a,
            b,
            lx: ZERO,
            ly: ZERO,
            p0,
            px,
            py,
        }
    }

    /// Gaussian with (complex) linear terms and no polynomial.
    pub fn with_linear(coeff: Complex64, a: f64, b: f64, lx: Complex64, ly: Complex64) -> Self {
        GaussianAtom {
            coeff,
            a,
            b,
            lx,
            ly,
            p0: 1.0,
            px: 0.0,
            py: 0.0,
        }
    }

    fn has_linear(&self) -> bool {
        self.lx != ZERO || self.ly != ZERO
    }

    fn has_poly(&self) -> bool {
        self.px != 0.0 || self.py != 0.0
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let expo = Complex64::new(-self.a * x * x - self.b * y * y, 0.0)
            + self.lx * x
            + self.ly * y;
        let poly = self.p0 + self.px * x * x + self.py * y * y;
        self.coeff * expo.exp() * poly
    }

    /// Exact integral over the plane.
    ///
    /// Uses Int exp(-a x^2 + l x) dx = sqrt(pi/a) exp(l^2 / 4a) and
    /// Int x^2 exp(-a x^2 + l x) dx = sqrt(pi/a) exp(l^2/4a) (1/2a + l^2/4a^2).
    pub fn integral(&self) -> Complex64 {
        let i0x = gauss_moment0(self.a, self.lx);
        let i0y = gauss_moment0(self.b, self.ly);
        let i2x = gauss_moment2(self.a, self.lx);
        let i2y = gauss_moment2(self.b, self.ly);
        self.coeff * (self.p0 * i0x * i0y + self.px * i2x * i0y + self.py * i0x * i2y)
    }

    /// Core Fourier rewrite shared by the forward (characteristic ->
    /// quasiprobability) and inverse directions. Both directions reduce to
    ///
    /// ```text
    /// out(u, v) = Int atom(x, y) exp(i (2v) x) exp(-i (2u) y) dx dy
    /// ```
    ///
    /// with (u, v) the real/imaginary parts of the conjugate variable.
    fn fourier_core(&self) -> Result<GaussianAtom> {
        if self.a <= 0.0 || self.b <= 0.0 {
            return Err(Error::InvalidParameter(
                "non-integrable atom in Fourier transform".into(),
            ));
        }
        let norm = std::f64::consts::PI / (self.a * self.b).sqrt();
        if self.has_linear() {
            if self.has_poly() {
                return Err(Error::UnrepresentableAtom);
            }
            // x-integral: exp(lx^2/4a) * exp(i lx v / a) * exp(-v^2/a)
            // y-integral: exp(ly^2/4b) * exp(-i ly u / b) * exp(-u^2/b)
            let shift = (self.lx * self.lx / (4.0 * self.a)
                + self.ly * self.ly / (4.0 * self.b))
                .exp();
            Ok(GaussianAtom {
                coeff: self.coeff * self.p0 * norm * shift,
                a: 1.0 / self.b,
                b: 1.0 / self.a,
                lx: -Complex64::i() * self.ly / self.b,
                ly: Complex64::i() * self.lx / self.a,
                p0: 1.0,
                px: 0.0,
                py: 0.0,
            })
        } else {
            Ok(GaussianAtom {
                coeff: self.coeff * norm,
                a: 1.0 / self.b,
                b: 1.0 / self.a,
                lx: ZERO,
                ly: ZERO,
                p0: self.p0 + self.px / (2.0 * self.a) + self.py / (2.0 * self.b),
                px: -self.py / (self.b * self.b),
                py: -self.px / (self.a * self.a),
            })
        }
    }
}

fn gauss_moment0(a: f64, l: Complex64) -> Complex64 {
    let base = (std::f64::consts::PI / a).sqrt();
    base * (l * l / (4.0 * a)).exp()
}

fn gauss_moment2(a: f64, l: Complex64) -> Complex64 {
    gauss_moment0(a, l) * (1.0 / (2.0 * a) + l * l / (4.0 * a * a))
}

/// A finite sum of Gaussian atoms; the represented function is the real part
/// of the complex sum (complex atoms always occur in conjugate pairs).
#[derive(Debug, Clone, Default)]
pub struct AtomSum {
    pub atoms: Vec<GaussianAtom>,
}

impl AtomSum {
    pub fn new(atoms: Vec<GaussianAtom>) -> Self {
        AtomSum { atoms }
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> f64 {
        self.atoms.iter().map(|at| at.eval(x, y)).sum::<Complex64>().re
    }

    pub fn eval(&self, z: PhasePoint) -> f64 {
        self.eval_xy(z.re, z.im)
    }

    /// Exact integral over the plane.
    pub fn integral(&self) -> f64 {
        self.atoms.iter().map(|at| at.integral()).sum::<Complex64>().re
    }

    /// Forward transform: characteristic function chi(eta) to the
    /// quasiprobability (1/pi^2) Int exp(eta* z - eta z*) chi(eta) d^2 eta.
    pub fn char_to_quasi(&self) -> Result<AtomSum> {
        let pre = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
        let atoms = self
            .atoms
            .iter()
            .map(|at| {
                at.fourier_core().map(|mut out| {
                    out.coeff *= pre;
                    out
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomSum::new(atoms))
    }

    /// Inverse transform: quasiprobability W(z) back to the characteristic
    /// function Int exp(eta z* - eta* z) W(z) d^2 z (no 1/pi^2 prefactor).
    pub fn quasi_to_char(&self) -> Result<AtomSum> {
        let atoms = self
            .atoms
            .iter()
            .map(|at| at.fourier_core())
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomSum::new(atoms))
    }

    /// Multiply by exp(-da x^2 - db y^2); used for ordering changes such as
    /// chi_Q(eta) = chi(eta) exp(-|eta|^2 / 2).
    pub fn mul_gaussian(&self, da: f64, db: f64) -> AtomSum {
        let atoms = self
            .atoms
            .iter()
            .map(|at| {
                let mut out = *at;
                out.a += da;
                out.b += db;
                out
            })
            .collect();
        AtomSum::new(atoms)
    }

    /// Substitute (x, y) -> (c x, c y): returns g with g(x, y) = f(c x, c y).
    pub fn scale_arg(&self, c: f64) -> AtomSum {
        let c2 = c * c;
        let atoms = self
            .atoms
            .iter()
            .map(|at| {
                let mut out = *at;
                out.a *= c2;
                out.b *= c2;
                out.lx *= c;
                out.ly *= c;
                out.px *= c2;
                out.py *= c2;
                out
            })
            .collect();
        AtomSum::new(atoms)
    }

    /// Rotate the plane by 90 degrees: g(x, y) = f(y, -x).
    ///
    /// Exact only for atoms without linear terms in x whose sign would flip;
    /// linear coefficients are swapped with the sign carried by lx.
    pub fn rotate_quarter(&self) -> AtomSum {
        let atoms = self
            .atoms
            .iter()
            .map(|at| GaussianAtom {
                coeff: at.coeff,
                a: at.b,
                b: at.a,
                lx: -at.ly,
                ly: at.lx,
                p0: at.p0,
                px: at.py,
                py: at.px,
            })
            .collect();
        AtomSum::new(atoms)
    }

    pub fn scaled(&self, c: f64) -> AtomSum {
        let atoms = self
            .atoms
            .iter()
            .map(|at| {
                let mut out = *at;
                out.coeff *= c;
                out
            })
            .collect();
        AtomSum::new(atoms)
    }

    /// Pointwise product with another atom sum (used for products of
    /// independent-mode factors sharing the same variables).
    pub fn extend_from(&mut self, other: &AtomSum) {
        self.atoms.extend_from_slice(&other.atoms);
    }

    /// Convex/linear combination c1 * self + c2 * other.
    pub fn mix(&self, c1: f64, other: &AtomSum, c2: f64) -> AtomSum {
        let mut out = self.scaled(c1);
        out.extend_from(&other.scaled(c2));
        out
    }
}
