//! End-to-end checks of the headline physics numbers, one test per
//! criterion. Each prints a single pass/fail line.

use bellsim::bell::{bell_ch, bell_chsh, optimize, DisplacementSet, Functional, OptimizeOptions, TSIRELSON};
use bellsim::fidelity::{fidelity, max_fidelity_curve, optimal_r};
use bellsim::fock;
use bellsim::phase::PhasePoint;
use bellsim::states::{
    correlation_matrix, success_prob_ideal, GaussianVariances, Kind, Parity, StateModel,
};
use bellsim::two_mode::for_bell;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!("criterion {n} ({name}): pass"),
        Err(msg) => {
            println!("criterion {n} ({name}): FAIL - {msg}");
            panic!("criterion {n} failed: {msg}");
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Optimized Bell value for a state, default options.
fn best(state: &StateModel, functional: Functional) -> f64 {
    let two = for_bell(state, functional.kind()).expect("state constructible");
    optimize(functional, &two, OptimizeOptions::default())
        .expect("optimizer converges")
        .value
}

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> Result<f64, String> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == fhi.signum() {
        return Err(format!("no sign change: f({lo}) = {flo}, f({hi}) = {fhi}"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[test]
fn criterion_1_fidelity_values() {
    let run = || -> Result<(), String> {
        let f1 = fidelity(-0.164, 1.0 / 2.0f64.sqrt()).map_err(|e| e.to_string())?;
        check((f1 - 0.9998).abs() < 5e-4, || format!("F(-0.164, 1/sqrt2) = {f1}"))?;
        let f2 = fidelity(-0.313, 1.0).map_err(|e| e.to_string())?;
        check((f2 - 0.997).abs() < 1e-3, || format!("F(-0.313, 1) = {f2}"))?;
        let alphas: Vec<f64> = (1..24).map(|i| i as f64 * 0.05).collect();
        for (a, f) in max_fidelity_curve(&alphas).map_err(|e| e.to_string())? {
            check(f > 0.99, || format!("max fidelity {f} <= 0.99 at alpha = {a}"))?;
        }
        Ok(())
    };
    report(1, "fidelity values", run());
}

#[test]
fn criterion_2_bell_bounds() {
    let run = || -> Result<(), String> {
        let wigner_states = [
            StateModel::PurePsgs { r: optimal_r(1.0).unwrap() },
            StateModel::Scs { alpha: 1.0, parity: Parity::Odd },
            StateModel::KimConditional {
                variances: GaussianVariances::pure(0.39),
                t: 0.9,
            },
            StateModel::KimConditional {
                variances: GaussianVariances::new(
                    1.03 * 0.6f64.exp(),
                    1.03 * (-0.6f64).exp(),
                )
                .unwrap(),
                t: 0.9,
            },
            StateModel::LossyPsgs { r: 0.3, t: 0.95, epsilon: 0.6 },
            StateModel::dark_mix(
                StateModel::LossyPsgs { r: 0.3, t: 0.99, epsilon: 0.6 },
                StateModel::Squeezed {
                    variances: GaussianVariances::pure(0.3),
                },
                0.8,
            )
            .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut settings = Vec::with_capacity(1000);
        for _ in 0..1000 {
            let mut x = [0.0f64; 8];
            for v in &mut x {
                *v = rng.gen_range(-2.0..2.0);
            }
            settings.push(DisplacementSet::from_array(x));
        }
        for state in &wigner_states {
            let two = for_bell(state, Kind::Wigner).map_err(|e| e.to_string())?;
            for d in &settings {
                let b = bell_chsh(&two, d).map_err(|e| e.to_string())?;
                check(b.abs() <= TSIRELSON + 1e-9, || {
                    format!("|B_chsh| = {} beyond Tsirelson for {state:?}", b.abs())
                })?;
            }
        }
        // Product state: vacuum split on the beam splitter stays a vacuum
        // product, so CH must respect the local bound everywhere.
        let vac = for_bell(&StateModel::Vacuum, Kind::Q).map_err(|e| e.to_string())?;
        for d in &settings {
            let b = bell_ch(&vac, d).map_err(|e| e.to_string())?;
            check((-1.0 - 1e-9..=1e-9).contains(&b), || {
                format!("product-state B_ch = {b} outside [-1, 0]")
            })?;
        }
        Ok(())
    };
    report(2, "Tsirelson and CH local bounds", run());
}

fn psgs_minus_scs(alpha: f64, functional: Functional) -> f64 {
    let psgs = StateModel::PurePsgs {
        r: optimal_r(alpha).unwrap(),
    };
    let scs = StateModel::Scs {
        alpha,
        parity: Parity::Odd,
    };
    best(&psgs, functional) - best(&scs, functional)
}

#[test]
fn criterion_3_chsh_crossover() {
    let run = || -> Result<(), String> {
        for i in 2..=16 {
            let alpha = i as f64 * 0.1;
            let d = psgs_minus_scs(alpha, Functional::Chsh);
            check(d > 0.0, || {
                format!("split PSGS below split SCS at alpha = {alpha} (diff {d})")
            })?;
        }
        let cross = bisect(1.7, 2.0, 1e-3, |a| psgs_minus_scs(a, Functional::Chsh))?;
        check((cross - 1.84).abs() <= 0.05, || {
            format!("CHSH crossover at alpha = {cross}")
        })
    };
    report(3, "CHSH crossover near alpha = 1.84", run());
}

#[test]
fn criterion_4_ch_crossover() {
    let run = || -> Result<(), String> {
        let cross = bisect(0.6, 1.6, 1e-3, |a| psgs_minus_scs(a, Functional::Ch))?;
        check((cross - 0.85).abs() <= 0.05, || {
            format!("CH crossover at alpha = {cross}")
        })
    };
    report(4, "CH crossover near alpha = 0.85", run());
}

#[test]
fn criterion_5_kim_thresholds() {
    let run = || -> Result<(), String> {
        let v = GaussianVariances::pure(0.39);
        let ch_onset = bisect(0.5, 0.8, 5e-4, |t| {
            best(&StateModel::KimConditional { variances: v, t }, Functional::Ch) - 1.0
        })?;
        check((ch_onset - 0.64).abs() <= 0.02, || {
            format!("CH onset at T = {ch_onset}")
        })?;
        let chsh_onset = bisect(0.8, 0.97, 5e-4, |t| {
            best(&StateModel::KimConditional { variances: v, t }, Functional::Chsh) - 2.0
        })?;
        check((chsh_onset - 0.89).abs() <= 0.02, || {
            format!("CHSH onset at T = {chsh_onset}")
        })
    };
    report(5, "Kim-model onsets at r = 0.39", run());
}

#[test]
fn criterion_6_mixedness_collapse() {
    let run = || -> Result<(), String> {
        // Equal multiplicative scaling of A and B at r = 0.3; the violation
        // over all T must vanish somewhere in the band of variance products
        // [1.02, 1.05] (each variance scaled by the square root).
        let sup_violation = |product: f64| -> f64 {
            let k = product.sqrt();
            let v = GaussianVariances::new(k * 0.6f64.exp(), k * (-0.6f64).exp()).unwrap();
            [0.9, 0.95, 0.99, 0.999]
                .iter()
                .map(|&t| best(&StateModel::KimConditional { variances: v, t }, Functional::Chsh))
                .fold(f64::NEG_INFINITY, f64::max)
                - 2.0
        };
        let lo = sup_violation(1.02);
        let hi = sup_violation(1.05);
        check(lo > 0.0 && hi < 0.0, || {
            format!("violation not bracketed: at scale 1.02 -> {lo}, at 1.05 -> {hi}")
        })?;
        // The Fig. 3 dB pair stays strictly below the pure curve.
        let mixed = GaussianVariances::new(
            bellsim::sweep::db_to_variance(2.65),
            bellsim::sweep::db_to_variance(-2.56),
        )
        .unwrap();
        let pure = GaussianVariances::pure(0.3);
        let mut t = 0.55;
        while t < 0.995 {
            let bp = best(&StateModel::KimConditional { variances: pure, t }, Functional::Chsh);
            let bm = best(&StateModel::KimConditional { variances: mixed, t }, Functional::Chsh);
            check(bm < bp, || format!("mixed curve not below pure at T = {t}: {bm} >= {bp}"))?;
            t += 0.02;
        }
        Ok(())
    };
    report(6, "mixedness collapse band", run());
}

#[test]
fn criterion_7_success_probability() {
    let run = || -> Result<(), String> {
        let vac = GaussianVariances::new(1.0, 1.0).unwrap();
        for t in [0.2, 0.5, 0.9, 1.0] {
            let p = success_prob_ideal(vac, t).map_err(|e| e.to_string())?;
            check(p == 0.0, || format!("vacuum success prob {p} at T = {t}"))?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let r: f64 = rng.gen_range(0.1..0.5);
            let k = rng.gen_range(1.0..1.2);
            let t = rng.gen_range(0.5..0.95);
            let v = GaussianVariances::new(k * (2.0 * r).exp(), k * (-2.0 * r).exp()).unwrap();
            let closed = success_prob_ideal(v, t).map_err(|e| e.to_string())?;
            let oracle = fock::click_probability(v, t, 1.0, 40).map_err(|e| e.to_string())?;
            check((closed - oracle).abs() < 1e-8, || {
                format!("P_s mismatch {closed} vs {oracle} at A={}, B={}, T={t}", v.a, v.b)
            })?;
        }
        Ok(())
    };
    report(7, "success probability vs oracle", run());
}

#[test]
fn criterion_8_lossy_robustness() {
    let run = || -> Result<(), String> {
        let b = best(
            &StateModel::LossyPsgs { r: 0.3, t: 0.98, epsilon: 0.6 },
            Functional::Ch,
        );
        check(b > 1.0, || format!("no CH violation at T = 0.98, eps = 0.6 ({b})"))?;
        for t in [0.95, 0.98] {
            let ideal = best(&StateModel::LossyPsgs { r: 0.3, t, epsilon: 1.0 }, Functional::Ch);
            let lossy = best(&StateModel::LossyPsgs { r: 0.3, t, epsilon: 0.6 }, Functional::Ch);
            let gap = (ideal - lossy) / ideal;
            check(gap < 0.10, || {
                format!("relative efficiency gap {gap} at T = {t} ({ideal} vs {lossy})")
            })?;
        }
        Ok(())
    };
    report(8, "detector-inefficiency robustness", run());
}

#[test]
fn criterion_9_dark_count_threshold() {
    let run = || -> Result<(), String> {
        let (r, t, eps) = (0.3, 0.99, 0.6);
        let cm = correlation_matrix(GaussianVariances::pure(r), t).map_err(|e| e.to_string())?;
        let transmitted = GaussianVariances::new(cm.n1, cm.n2).map_err(|e| e.to_string())?;
        let ch_at = |pm: f64| {
            let state = StateModel::dark_mix(
                StateModel::LossyPsgs { r, t, epsilon: eps },
                StateModel::Squeezed { variances: transmitted },
                pm,
            )
            .unwrap();
            best(&state, Functional::Ch) - 1.0
        };
        let threshold = bisect(0.6, 0.95, 5e-4, ch_at)?;
        check((threshold - 0.78).abs() <= 0.03, || {
            format!("dark-count threshold at P_m = {threshold}")
        })
    };
    report(9, "dark-count threshold near P_m = 0.78", run());
}

#[test]
fn criterion_10_oracle_equivalence() {
    let run = || -> Result<(), String> {
        let pure_tol = 1e-10;
        let cond_tol = 1e-6;
        let families: Vec<(&str, StateModel, f64)> = vec![
            ("vacuum", StateModel::Vacuum, pure_tol),
            (
                "squeezed pure",
                StateModel::Squeezed { variances: GaussianVariances::pure(0.3) },
                pure_tol,
            ),
            (
                "squeezed mixed",
                StateModel::Squeezed {
                    variances: GaussianVariances::new(
                        1.03 * 0.6f64.exp(),
                        1.03 * (-0.6f64).exp(),
                    )
                    .unwrap(),
                },
                cond_tol,
            ),
            (
                "odd scs",
                StateModel::Scs { alpha: 1.0, parity: Parity::Odd },
                pure_tol,
            ),
            ("pure psgs", StateModel::PurePsgs { r: -0.313 }, pure_tol),
            (
                "kim conditional",
                StateModel::KimConditional {
                    variances: GaussianVariances::pure(0.3),
                    t: 0.9,
                },
                cond_tol,
            ),
            (
                "lossy conditional",
                StateModel::LossyPsgs { r: 0.3, t: 0.95, epsilon: 0.6 },
                cond_tol,
            ),
            (
                "dark mixture",
                StateModel::dark_mix(
                    StateModel::LossyPsgs { r: 0.3, t: 0.99, epsilon: 0.6 },
                    StateModel::Squeezed {
                        variances: GaussianVariances::new(
                            0.99 * 0.6f64.exp() + 0.01,
                            0.99 * (-0.6f64).exp() + 0.01,
                        )
                        .unwrap(),
                    },
                    0.8,
                )
                .unwrap(),
                cond_tol,
            ),
        ];
        for (name, model, tol) in families {
            let w = model.quasiprob(Kind::Wigner).map_err(|e| e.to_string())?;
            let q = model.quasiprob(Kind::Q).map_err(|e| e.to_string())?;
            check((w.integral() - 1.0).abs() < 1e-6, || {
                format!("{name}: Wigner integral {}", w.integral())
            })?;
            check((q.integral() - 1.0).abs() < 1e-6, || {
                format!("{name}: Q integral {}", q.integral())
            })?;
            let state = fock::build_state(&model, 40).map_err(|e| e.to_string())?;
            for i in -2..=2 {
                for j in -2..=2 {
                    let z = PhasePoint::new(i as f64 * 0.35, j as f64 * 0.35);
                    let par = fock::displaced_parity(&state, z).map_err(|e| e.to_string())?;
                    let dw = (2.0 / std::f64::consts::PI * par - w.eval(z)).abs();
                    check(dw < tol, || format!("{name}: Wigner dev {dw} at {z:?}"))?;
                    let ov =
                        fock::displaced_vacuum_overlap(&state, z).map_err(|e| e.to_string())?;
                    let dq = (ov / std::f64::consts::PI - q.eval(z)).abs();
                    check(dq < tol, || format!("{name}: Q dev {dq} at {z:?}"))?;
                }
            }
        }
        Ok(())
    };
    report(10, "closed forms vs Fock oracle", run());
}

#[test]
fn criterion_11_small_alpha_agreement() {
    let run = || -> Result<(), String> {
        let alpha = 0.05;
        let psgs = best(
            &StateModel::PurePsgs { r: optimal_r(alpha).unwrap() },
            Functional::Chsh,
        );
        let scs = best(
            &StateModel::Scs { alpha, parity: Parity::Odd },
            Functional::Chsh,
        );
        check((psgs - scs).abs() < 1e-3, || {
            format!("CHSH values diverge at alpha = {alpha}: {psgs} vs {scs}")
        })
    };
    report(11, "small-amplitude agreement", run());
}
