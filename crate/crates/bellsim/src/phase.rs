use num_complex::Complex64;

/// A point in the complex phase plane (dimensionless quadrature displacement).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub re: f64,
    pub im: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        PhasePoint { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// (self + other) / sqrt(2), the transmitted coordinate of a 50:50 split.
    pub fn sum_scaled(self, other: PhasePoint) -> PhasePoint {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PhasePoint::new((self.re + other.re) * s, (self.im + other.im) * s)
    }

    /// (other - self) / sqrt(2), the reflected coordinate of a 50:50 split.
    pub fn diff_scaled(self, other: PhasePoint) -> PhasePoint {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PhasePoint::new((other.re - self.re) * s, (other.im - self.im) * s)
    }
}

impl From<(f64, f64)> for PhasePoint {
    fn from((re, im): (f64, f64)) -> Self {
        PhasePoint::new(re, im)
    }
}

impl From<Complex64> for PhasePoint {
    fn from(z: Complex64) -> Self {
        PhasePoint::new(z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_coordinates_are_orthogonal() {
        let z1 = PhasePoint::new(0.3, -0.7);
        let z2 = PhasePoint::new(-1.1, 0.2);
        let u = z1.sum_scaled(z2);
        let v = z1.diff_scaled(z2);
        // The map (z1, z2) -> (u, v) is orthogonal: norms are preserved.
        let before = z1.norm_sqr() + z2.norm_sqr();
        let after = u.norm_sqr() + v.norm_sqr();
        assert!((before - after).abs() < 1e-14);
    }
}
