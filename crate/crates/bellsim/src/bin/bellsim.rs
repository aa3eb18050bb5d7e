use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bellsim::bell::{optimize, Functional, OptimizeOptions};
use bellsim::fidelity::{fidelity, max_fidelity_curve, optimal_r};
use bellsim::fock;
use bellsim::phase::PhasePoint;
use bellsim::states::{GaussianVariances, Kind, Parity, StateModel};
use bellsim::sweep::{
    emit_fidelity_csv, figure, load_config, run_scenario, run_scenario_to_file,
    FigurePreset, SweepRow,
};
use bellsim::two_mode::for_bell;
use bellsim::{Error, Result};

#[derive(Parser)]
#[command(name = "bellsim", version, about = "Bell tests on photon-subtracted Gaussian states")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct OptArgs {
    /// Seed for the randomized optimizer starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of optimizer starts.
    #[arg(long, default_value_t = 80)]
    starts: usize,
}

#[derive(Args, Clone)]
struct StateArgs {
    /// State family: scs, psgs, kim, lossy.
    #[arg(long, default_value = "psgs")]
    state: String,
    /// SCS amplitude (psgs: squeezing is derived from it when --r is absent).
    #[arg(long)]
    alpha: Option<f64>,
    /// Squeezing parameter.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Beam-splitter transmittivity.
    #[arg(long)]
    t: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity between the squeezed single photon and the ideal odd
    /// superposition; a single amplitude or the full curve.
    Fidelity {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize a Bell functional for one state.
    Bell {
        #[command(subcommand)]
        functional: BellCommand,
    },
    /// Run every scenario in a TOML config.
    Sweep {
        config: PathBuf,
        /// Output override when the config holds a single scenario.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Reproduce the data behind a numbered figure panel.
    Fig {
        n: u8,
        #[arg(default_value = "")]
        variant: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Oracle utilities.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum BellCommand {
    /// Parity-based CHSH functional (Wigner representation).
    Chsh {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// On-off CH functional (Q representation).
    Ch {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        opt: OptArgs,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Compare every closed form against the truncated-Fock oracle.
    Check {
        /// Photon-number cutoff.
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
    },
}

fn build_state(args: &StateArgs) -> Result<StateModel> {
    let missing = |what: &str| Error::Config(format!("--state {} needs {what}", args.state));
    Ok(match args.state.as_str() {
        "scs" => StateModel::Scs {
            alpha: args.alpha.ok_or_else(|| missing("--alpha"))?,
            parity: Parity::Odd,
        },
        "psgs" => {
            let r = match (args.r, args.alpha) {
                (Some(r), _) => r,
                (None, Some(alpha)) => optimal_r(alpha)?,
                (None, None) => return Err(missing("--r or --alpha")),
            };
            StateModel::PurePsgs { r }
        }
        "kim" => StateModel::KimConditional {
            variances: GaussianVariances::pure(args.r.ok_or_else(|| missing("--r"))?),
            t: args.t.ok_or_else(|| missing("--t"))?,
        },
        "lossy" => StateModel::LossyPsgs {
            r: args.r.ok_or_else(|| missing("--r"))?,
            t: args.t.ok_or_else(|| missing("--t"))?,
            epsilon: args.epsilon.ok_or_else(|| missing("--epsilon"))?,
        },
        other => return Err(Error::Config(format!("unknown state '{other}'"))),
    })
}

fn run_bell(functional: Functional, state: &StateArgs, opt: OptArgs) -> Result<()> {
    let model = build_state(state)?;
    let two = for_bell(&model, functional.kind())?;
    let res = optimize(
        functional,
        &two,
        OptimizeOptions {
            starts: opt.starts,
            seed: opt.seed,
            ..OptimizeOptions::default()
        },
    )?;
    println!("B_{} = {:.12}", functional.name(), res.value);
    let a = res.argmax.to_array();
    println!(
        "argmax: z1=({:.6},{:.6}) z2=({:.6},{:.6}) z1'=({:.6},{:.6}) z2'=({:.6},{:.6})",
        a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]
    );
    Ok(())
}

fn print_rows(rows: &[SweepRow]) {
    println!("axis,bell,p_success,z1r,z1i,z2r,z2i,z1pr,z1pi,z2pr,z2pi,converged");
    for row in rows {
        let a = row.argmax.to_array();
        let p = row
            .success_prob
            .map(|v| format!("{v:.11e}"))
            .unwrap_or_default();
        println!(
            "{:.11e},{:.11e},{p},{},{}",
            row.axis_value,
            row.bell_value,
            a.iter()
                .map(|v| format!("{v:.11e}"))
                .collect::<Vec<_>>()
                .join(","),
            row.converged
        );
    }
}

fn check_all_converged(rows: &[SweepRow]) -> Result<()> {
    if !rows.is_empty() && rows.iter().all(|r| !r.converged) {
        return Err(Error::NonConvergence);
    }
    Ok(())
}

fn oracle_check(cutoff: usize) -> Result<()> {
    struct Row {
        name: &'static str,
        max_dev: f64,
        limit: f64,
    }
    let grid: Vec<PhasePoint> = (-2..=2)
        .flat_map(|i| (-2..=2).map(move |j| PhasePoint::new(i as f64 * 0.35, j as f64 * 0.35)))
        .collect();
    let mut rows = Vec::new();
    let mut compare = |name: &'static str, model: StateModel, limit: f64| -> Result<()> {
        let state = fock::build_state(&model, cutoff)?;
        let w = model.quasiprob(Kind::Wigner)?;
        let q = model.quasiprob(Kind::Q)?;
        let mut max_dev = 0.0f64;
        for &z in &grid {
            let par = fock::displaced_parity(&state, z)?;
            max_dev = max_dev.max((2.0 / std::f64::consts::PI * par - w.eval(z)).abs());
            let ov = fock::displaced_vacuum_overlap(&state, z)?;
            max_dev = max_dev.max((ov / std::f64::consts::PI - q.eval(z)).abs());
        }
        rows.push(Row { name, max_dev, limit });
        Ok(())
    };
    compare("vacuum", StateModel::Vacuum, 1e-10)?;
    compare(
        "scs(alpha=1)",
        StateModel::Scs {
            alpha: 1.0,
            parity: Parity::Odd,
        },
        1e-10,
    )?;
    compare("psgs(r=-0.313)", StateModel::PurePsgs { r: -0.313 }, 1e-10)?;
    compare(
        "kim(r=0.3,T=0.9)",
        StateModel::KimConditional {
            variances: GaussianVariances::pure(0.3),
            t: 0.9,
        },
        1e-6,
    )?;
    compare(
        "lossy(r=0.3,T=0.95,eps=0.6)",
        StateModel::LossyPsgs {
            r: 0.3,
            t: 0.95,
            epsilon: 0.6,
        },
        1e-6,
    )?;
    // Success probability against the closed form.
    let mut p_dev = 0.0f64;
    for (r, t) in [(0.2, 0.8), (0.3, 0.9), (0.39, 0.7)] {
        let v = GaussianVariances::pure(r);
        let oracle = fock::click_probability(v, t, 1.0, cutoff)?;
        let closed = bellsim::states::success_prob_ideal(v, t)?;
        p_dev = p_dev.max((oracle - closed).abs());
    }
    rows.push(Row {
        name: "click probability",
        max_dev: p_dev,
        limit: 1e-8,
    });

    let mut ok = true;
    println!("{:<30} {:>12} {:>9} result", "check", "max dev", "limit");
    for row in rows {
        let pass = row.max_dev <= row.limit;
        ok &= pass;
        println!(
            "{:<30} {:>12.3e} {:>9.0e} {}",
            row.name,
            row.max_dev,
            row.limit,
            if pass { "pass" } else { "FAIL" }
        );
    }
    if !ok {
        return Err(Error::NonConvergence);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Fidelity { alpha, out } => {
            if let Some(alpha) = alpha {
                let r = optimal_r(alpha)?;
                println!("alpha = {alpha}");
                println!("optimal r = {r:.12}");
                println!("F = {:.12}", fidelity(r, alpha)?);
            } else {
                let alphas: Vec<f64> = (1..=250).map(|i| i as f64 * 0.01).collect();
                let curve = max_fidelity_curve(&alphas)?;
                match out {
                    Some(path) => emit_fidelity_csv(&curve, &path)?,
                    None => {
                        println!("alpha,F");
                        for (a, f) in curve {
                            println!("{a:.11e},{f:.11e}");
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Bell { functional } => match functional {
            BellCommand::Chsh { state, opt } => run_bell(Functional::Chsh, &state, opt),
            BellCommand::Ch { state, opt } => run_bell(Functional::Ch, &state, opt),
        },
        Command::Sweep { config, out, opt } => {
            let mut scenarios = load_config(&config)?;
            if out.is_some() && scenarios.len() != 1 {
                return Err(Error::Config(
                    "--out needs a config with exactly one scenario".into(),
                ));
            }
            for s in &mut scenarios {
                s.starts = opt.starts;
                s.seed = opt.seed;
                let path = out.clone().or_else(|| s.output.clone());
                let rows = match path {
                    Some(path) => {
                        run_scenario_to_file(s, &path)?;
                        eprintln!("scenario '{}' -> {}", s.name, path.display());
                        continue;
                    }
                    None => run_scenario(s)?,
                };
                check_all_converged(&rows)?;
                print_rows(&rows);
            }
            Ok(())
        }
        Command::Fig { n, variant, out, opt } => match figure(n, &variant)? {
            FigurePreset::FidelityCurve { alphas } => {
                let curve = max_fidelity_curve(&alphas)?;
                match out {
                    Some(path) => emit_fidelity_csv(&curve, &path)?,
                    None => {
                        println!("alpha,F");
                        for (a, f) in curve {
                            println!("{a:.11e},{f:.11e}");
                        }
                    }
                }
                Ok(())
            }
            FigurePreset::Sweep(mut s) => {
                s.starts = opt.starts;
                s.seed = opt.seed;
                match out {
                    Some(path) => {
                        run_scenario_to_file(&s, &path)?;
                    }
                    None => {
                        let rows = run_scenario(&s)?;
                        check_all_converged(&rows)?;
                        print_rows(&rows);
                    }
                }
                Ok(())
            }
        },
        Command::Oracle { command } => match command {
            OracleCommand::Check { cutoff } => oracle_check(cutoff),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
