//! Bell-CHSH (parity / Wigner) and Bell-CH (on-off / Q) functionals and
//! their deterministic multi-start maximization over the four displacement
//! settings.
//!
//! ```
//! use bellsim::bell::{optimize, Functional, OptimizeOptions, TSIRELSON};
//! use bellsim::states::{Kind, StateModel};
//! use bellsim::two_mode::for_bell;
//!
//! let two = for_bell(&StateModel::PurePsgs { r: -0.313 }, Kind::Wigner)?;
//! let opts = OptimizeOptions { starts: 24, ..OptimizeOptions::default() };
//! let res = optimize(Functional::Chsh, &two, opts)?;
//! assert!(res.value > 2.0 && res.value <= TSIRELSON + 1e-9);
//! # Ok::<(), bellsim::Error>(())
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::phase::PhasePoint;
use crate::states::Kind;
use crate::two_mode::TwoModeQuasiprob;
use crate::{Error, Result};

/// The Tsirelson bound 2 sqrt(2).
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// The four displacement settings (z1, z2, z1', z2').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementSet {
    pub z1: PhasePoint,
    pub z2: PhasePoint,
    pub z1p: PhasePoint,
    pub z2p: PhasePoint,
}

impl DisplacementSet {
    pub const ZERO: DisplacementSet = DisplacementSet {
        z1: PhasePoint::ORIGIN,
        z2: PhasePoint::ORIGIN,
        z1p: PhasePoint::ORIGIN,
        z2p: PhasePoint::ORIGIN,
    };

    pub fn from_array(x: [f64; 8]) -> Self {
        DisplacementSet {
            z1: PhasePoint::new(x[0], x[1]),
            z2: PhasePoint::new(x[2], x[3]),
            z1p: PhasePoint::new(x[4], x[5]),
            z2p: PhasePoint::new(x[6], x[7]),
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.z1.re, self.z1.im, self.z2.re, self.z2.im, self.z1p.re, self.z1p.im,
            self.z2p.re, self.z2p.im,
        ]
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Outcome of a Bell maximization.
#[derive(Debug, Clone)]
pub struct BellResult {
    pub value: f64,
    pub argmax: DisplacementSet,
    pub starts_used: usize,
    pub converged: bool,
}

/// Which Bell functional to evaluate/maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// Parity-based CHSH through the Wigner function; maximized in absolute
    /// value, classical bound 2, quantum bound 2 sqrt(2).
    Chsh,
    /// On/off-based CH through the Q function; maximized in absolute value.
    /// The local bound is -1 <= B_CH <= 0 and B_CH = -1 is attained by every
    /// normalized state (send the primed settings to infinity), so the
    /// optimized |B_CH| is always >= 1 and a violation means |B_CH| > 1,
    /// up to the quantum bound (1 + sqrt 2)/2.
    Ch,
}

impl Functional {
    pub fn kind(self) -> Kind {
        match self {
            Functional::Chsh => Kind::Wigner,
            Functional::Ch => Kind::Q,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::Chsh => "chsh",
            Functional::Ch => "ch",
        }
    }
}

/// B_CHSH = (pi^2/4) [W(z1,z2) + W(z1,z2') + W(z1',z2) - W(z1',z2')].
pub fn bell_chsh(two: &TwoModeQuasiprob, d: &DisplacementSet) -> Result<f64> {
    if two.kind() != Kind::Wigner {
        return Err(Error::KindMismatch {
            expected: "wigner",
            found: two.kind().name(),
        });
    }
    Ok(PI * PI / 4.0
        * (two.eval(d.z1, d.z2) + two.eval(d.z1, d.z2p) + two.eval(d.z1p, d.z2)
            - two.eval(d.z1p, d.z2p)))
}

/// B_CH = pi^2 [Q(z1,z2) + Q(z1,z2') + Q(z1',z2) - Q(z1',z2')]
///        - pi [Q1(z1) + Q2(z2)].
pub fn bell_ch(two: &TwoModeQuasiprob, d: &DisplacementSet) -> Result<f64> {
    if two.kind() != Kind::Q {
        return Err(Error::KindMismatch {
            expected: "q",
            found: two.kind().name(),
        });
    }
    let q12 = two.eval(d.z1, d.z2) + two.eval(d.z1, d.z2p) + two.eval(d.z1p, d.z2)
        - two.eval(d.z1p, d.z2p);
    let q1 = two.marginal(1, d.z1)?;
    let q2 = two.marginal(2, d.z2)?;
    Ok(PI * PI * q12 - PI * (q1 + q2))
}

/// Multi-start optimization options. Defaults: 64 stratified + 16 seeded
/// random starts, search box |coordinate| <= 3, value tolerance 1e-10.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub search_box: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 80,
            seed: 0,
            search_box: 3.0,
            ftol: 1e-10,
            max_iter: 4000,
        }
    }
}

/// Deterministic maximization of the Bell functional over the 8 real setting
/// coordinates. Increasing `starts` can only grow the returned value; ties
/// within 1e-9 are broken toward the smallest-norm argmax.
pub fn optimize(
    functional: Functional,
    two: &TwoModeQuasiprob,
    opts: OptimizeOptions,
) -> Result<BellResult> {
    if two.kind() != functional.kind() {
        return Err(Error::KindMismatch {
            expected: functional.kind().name(),
            found: two.kind().name(),
        });
    }
    let objective = |x: &[f64; 8]| -> f64 {
        let d = DisplacementSet::from_array(clamp_box(*x, opts.search_box));
        match functional {
            Functional::Chsh => bell_chsh(two, &d).map(f64::abs).unwrap_or(f64::NEG_INFINITY),
            Functional::Ch => bell_ch(two, &d).map(f64::abs).unwrap_or(f64::NEG_INFINITY),
        }
    };

    let starts = start_points(opts.starts, opts.seed);
    let runs: Vec<(f64, [f64; 8], bool)> = starts
        .par_iter()
        .map(|s| nelder_mead(&objective, *s, opts))
        .collect();

    let mut best: Option<(f64, [f64; 8], bool)> = None;
    let mut any_converged = false;
    for (val, x, conv) in runs {
        any_converged |= conv;
        let x = clamp_box(x, opts.search_box);
        best = Some(match best {
            None => (val, x, conv),
            Some(cur) => {
                if better(val, &x, cur.0, &cur.1) {
                    (val, x, conv)
                } else {
                    cur
                }
            }
        });
    }
    let (value, x, _) = best.ok_or(Error::NonConvergence)?;
    if !any_converged {
        return Err(Error::NonConvergence);
    }
    Ok(BellResult {
        value,
        argmax: DisplacementSet::from_array(x),
        starts_used: opts.starts,
        converged: any_converged,
    })
}

fn clamp_box(mut x: [f64; 8], box_half: f64) -> [f64; 8] {
    for v in &mut x {
        *v = v.clamp(-box_half, box_half);
    }
    x
}

fn norm8(x: &[f64; 8]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Deterministic tie-break: larger value wins; values within 1e-9 go to the
/// smaller norm, then lexicographically smaller coordinates.
fn better(val: f64, x: &[f64; 8], cur_val: f64, cur_x: &[f64; 8]) -> bool {
    if val > cur_val + 1e-9 {
        return true;
    }
    if val < cur_val - 1e-9 {
        return false;
    }
    let (n, cn) = (norm8(x), norm8(cur_x));
    if (n - cn).abs() > 1e-12 {
        return n < cn;
    }
    x.iter().zip(cur_x).any(|(a, b)| a < b) && x.iter().zip(cur_x).all(|(a, b)| a <= b)
}

/// A prefix-consistent start sequence: index n always yields the same point,
/// so raising the start count never loses earlier starts.
fn start_points(count: usize, seed: u64) -> Vec<[f64; 8]> {
    let mut pts = Vec::with_capacity(count);
    // Purely real patterns (imaginary parts zero), two magnitudes.
    let mags = [0.45, 1.1];
    'outer: for &m in &mags {
        for bits in 0..16u32 {
            if pts.len() >= count.min(32) {
                break 'outer;
            }
            let mut x = [0.0f64; 8];
            for (k, slot) in [0, 2, 4, 6].into_iter().enumerate() {
                x[slot] = if bits >> k & 1 == 1 { m } else { -m };
            }
            pts.push(x);
        }
    }
    // Purely imaginary patterns.
    for bits in 0..16u32 {
        if pts.len() >= count.min(48) {
            break;
        }
        let mut x = [0.0f64; 8];
        for (k, slot) in [1, 3, 5, 7].into_iter().enumerate() {
            x[slot] = if bits >> k & 1 == 1 { 0.75 } else { -0.75 };
        }
        pts.push(x);
    }
    // Stratified 3-level mixed patterns spread by a Weyl-style multiplier.
    let levels = [-0.75, 0.0, 0.75];
    let mut n: u64 = 0;
    while pts.len() < count.min(64) {
        let mut code = n.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 16;
        let mut x = [0.0f64; 8];
        for v in &mut x {
            *v = levels[(code % 3) as usize];
            code /= 3;
        }
        pts.push(x);
        n += 1;
    }
    // Seeded random starts fill the remainder.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < count {
        let mut x = [0.0f64; 8];
        for v in &mut x {
            *v = rng.gen_range(-1.5..1.5);
        }
        pts.push(x);
    }
    pts.truncate(count);
    pts
}

/// Plain Nelder-Mead ascent (maximization) with standard coefficients.
/// Returns (best value, best point, converged).
fn nelder_mead(
    f: &(impl Fn(&[f64; 8]) -> f64 + Sync),
    start: [f64; 8],
    opts: OptimizeOptions,
) -> (f64, [f64; 8], bool) {
    const DIM: usize = 8;
    const STEP: f64 = 0.25;
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex: Vec<([f64; 8], f64)> = Vec::with_capacity(DIM + 1);
    simplex.push((start, f(&start)));
    for i in 0..DIM {
        let mut p = start;
        p[i] += STEP;
        simplex.push((p, f(&p)));
    }

    let mut converged = false;
    for _ in 0..opts.max_iter {
        // Descending by value: best first (we maximize).
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[0].1 - simplex[DIM].1;
        if spread.abs() < opts.ftol {
            converged = true;
            break;
        }

        let mut centroid = [0.0f64; 8];
        for (p, _) in &simplex[..DIM] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / DIM as f64;
            }
        }
        let worst = simplex[DIM];

        let at = |t: f64| {
            let mut p = [0.0f64; 8];
            for i in 0..DIM {
                p[i] = centroid[i] + t * (centroid[i] - worst.0[i]);
            }
            p
        };

        let xr = at(ALPHA);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = at(GAMMA);
            let fe = f(&xe);
            simplex[DIM] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[DIM - 1].1 {
            simplex[DIM] = (xr, fr);
        } else {
            let xc = at(-RHO);
            let fc = f(&xc);
            if fc > worst.1 {
                simplex[DIM] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for (v, b) in entry.0.iter_mut().zip(&best) {
                        *v = b + SIGMA * (*v - b);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    (simplex[0].1, simplex[0].0, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{Parity, StateModel};
    use crate::two_mode::for_bell;
    use approx::assert_relative_eq;

    #[test]
    fn chsh_vacuum_degenerate_settings() {
        let two = for_bell(&StateModel::Vacuum, Kind::Wigner).unwrap();
        let b = bell_chsh(&two, &DisplacementSet::ZERO).unwrap();
        assert_relative_eq!(b, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_degenerate_setting_identity() {
        // z1 = z1', z2 = z2' reduces to (pi^2/2) W(z1, z2), bounded by 2.
        let two = for_bell(&StateModel::PurePsgs { r: -0.2 }, Kind::Wigner).unwrap();
        let z1 = PhasePoint::new(0.2, -0.4);
        let z2 = PhasePoint::new(-0.1, 0.3);
        let d = DisplacementSet { z1, z2, z1p: z1, z2p: z2 };
        let b = bell_chsh(&two, &d).unwrap();
        assert_relative_eq!(b, PI * PI / 2.0 * two.eval(z1, z2), epsilon = 1e-12);
        assert!(b.abs() <= 2.0 + 1e-9);
    }

    #[test]
    fn ch_vacuum_boundary_value() {
        let two = for_bell(&StateModel::Vacuum, Kind::Q).unwrap();
        let b = bell_ch(&two, &DisplacementSet::ZERO).unwrap();
        assert_relative_eq!(b, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let w = for_bell(&StateModel::Vacuum, Kind::Wigner).unwrap();
        let q = for_bell(&StateModel::Vacuum, Kind::Q).unwrap();
        assert!(bell_chsh(&q, &DisplacementSet::ZERO).is_err());
        assert!(bell_ch(&w, &DisplacementSet::ZERO).is_err());
        assert!(optimize(Functional::Chsh, &q, OptimizeOptions::default()).is_err());
    }

    #[test]
    fn vacuum_optimum_is_classical() {
        let two = for_bell(&StateModel::Vacuum, Kind::Wigner).unwrap();
        let res = optimize(Functional::Chsh, &two, OptimizeOptions::default()).unwrap();
        assert_relative_eq!(res.value, 2.0, epsilon = 1e-6);
        assert!(res.converged);
    }

    #[test]
    fn split_psgs_violates_chsh() {
        let r = crate::fidelity::optimal_r(0.5).unwrap();
        let two = for_bell(&StateModel::PurePsgs { r }, Kind::Wigner).unwrap();
        let res = optimize(Functional::Chsh, &two, OptimizeOptions::default()).unwrap();
        assert!(res.value > 2.0, "no violation: {}", res.value);
        assert!(res.value <= TSIRELSON + 1e-9);
    }

    #[test]
    fn ecs_violates_ch_at_small_alpha() {
        let two = for_bell(
            &StateModel::Scs {
                alpha: 0.5,
                parity: Parity::Odd,
            },
            Kind::Q,
        )
        .unwrap();
        let res = optimize(Functional::Ch, &two, OptimizeOptions::default()).unwrap();
        assert!(res.value > 1.0, "no CH violation: {}", res.value);
        assert!(res.value <= 0.5 * (1.0 + std::f64::consts::SQRT_2) + 1e-9);
    }

    #[test]
    fn vacuum_ch_optimum_is_local_bound() {
        // Any normalized state reaches |B_CH| = 1 by pushing the primed
        // settings far out; the vacuum cannot do better.
        let two = for_bell(&StateModel::Vacuum, Kind::Q).unwrap();
        let res = optimize(Functional::Ch, &two, OptimizeOptions::default()).unwrap();
        assert_relative_eq!(res.value, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn more_starts_never_decrease_value() {
        let two = for_bell(&StateModel::PurePsgs { r: -0.3 }, Kind::Wigner).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for starts in [16, 48, 80] {
            let res = optimize(
                Functional::Chsh,
                &two,
                OptimizeOptions {
                    starts,
                    ..OptimizeOptions::default()
                },
            )
            .unwrap();
            assert!(res.value >= prev - 1e-12);
            prev = res.value;
        }
    }

    #[test]
    fn optimization_is_deterministic() {
        let two = for_bell(&StateModel::PurePsgs { r: -0.3 }, Kind::Wigner).unwrap();
        let a = optimize(Functional::Chsh, &two, OptimizeOptions::default()).unwrap();
        let b = optimize(Functional::Chsh, &two, OptimizeOptions::default()).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.argmax.to_array(), b.argmax.to_array());
    }
}
