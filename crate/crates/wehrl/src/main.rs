//! Command-line interface. Every command reads/writes JSON (CSV for the
//! sweep); exit codes: 0 success, 1 bad input or usage, 2 a numerical
//! cross-check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wehrl::closed_forms::{
    embeddable4, spin1_entropy, spin2_entropy, spin32_entropy, Spin2Edges,
};
use wehrl::entropy::{
    s_norm_exact, s_norm_quadrature, wehrl_closed, wehrl_closed_from_decomposition,
    wehrl_quadrature, QuadratureGrid,
};
use wehrl::io::{parse_state_or_points, to_decomposition, to_state, StateInput};
use wehrl::majorana::ChordSq;
use wehrl::search::{minimize_entropy, perturbation_sweep, SearchConfig};
use wehrl::verify::{run_verify, VerifyConfig};
use wehrl::{TwiceSpin, WehrlError};

#[derive(Parser)]
#[command(
    name = "wehrl",
    version,
    about = "Wehrl entropy of spin states in the stellar (points-on-a-sphere) representation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Exact evaluation from the point decomposition.
    Closed,
    /// Numerical integration of -h ln h (the cross-check route).
    Quad,
}

#[derive(Subcommand)]
enum Command {
    /// Wehrl entropy of a state (amplitude or point JSON).
    Entropy {
        /// Input file; accepts either representation.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        /// Radial quadrature nodes (quad method; default depends on spin).
        #[arg(long)]
        np: Option<usize>,
        /// Azimuthal quadrature nodes (quad method; default depends on spin).
        #[arg(long)]
        nphi: Option<usize>,
    },
    /// Phase-space s-norm of a state.
    Snorm {
        #[arg(long)]
        state: PathBuf,
        /// Norm order; at least 1.
        #[arg(long)]
        s: f64,
        /// Use the exact coefficient route (integer s, 2js <= 60).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        np: Option<usize>,
        #[arg(long)]
        nphi: Option<usize>,
    },
    /// Closed-form entropy from squared chordal distances.
    Closed {
        /// Spin: 1, 3/2 (or 1.5), or 2.
        #[arg(long)]
        spin: String,
        /// 1 distance (mu) for spin 1; 3 (eps,mu,nu) for spin 3/2;
        /// 6 (eps,mu,nu,alpha,beta,gamma) for spin 2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        edges: Vec<f64>,
    },
    /// Check whether six labeled distances embed as four sphere points.
    Embed4 {
        /// eps,mu,nu,alpha,beta,gamma.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        edges: Vec<f64>,
    },
    /// Point decomposition (and normalization c) of a state.
    Analyze {
        /// Input file; accepts either representation.
        input: PathBuf,
    },
    /// Amplitudes of the state carried by a point multiset.
    Synth {
        /// Input file; accepts either representation.
        input: PathBuf,
    },
    /// Multi-start entropy minimization at fixed spin.
    Minimize {
        #[arg(long)]
        twice_j: u32,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4000)]
        max_iters: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropies of near-coherent configurations (CSV).
    Sweep {
        #[arg(long)]
        twice_j: u32,
        /// Squared-chord perturbations, each in (0, 0.05].
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.04,0.02,0.01,0.005,0.0025"
        )]
        eps: Vec<f64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validation battery over seeded random states.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        twice_j: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct AppError {
    message: String,
    code: u8,
}

impl AppError {
    fn usage(message: impl Into<String>) -> Self {
        AppError {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<WehrlError> for AppError {
    fn from(e: WehrlError) -> Self {
        let code = match e {
            WehrlError::CheckFailed { .. } => 2,
            _ => 1,
        };
        AppError {
            message: e.to_string(),
            code,
        }
    }
}

fn read_input(path: &Path) -> Result<StateInput, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_state_or_points(&text)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::usage(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn write_or_print(out: &Option<PathBuf>, content: &str, summary: &str) -> Result<(), AppError> {
    match out {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| AppError::usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{summary} -> {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn grid_for(j: TwiceSpin, np: Option<usize>, nphi: Option<usize>) -> Result<QuadratureGrid, AppError> {
    let default = QuadratureGrid::default_for(j);
    let np = np.unwrap_or(default.n_p());
    let nphi = nphi.unwrap_or(default.n_phi());
    let tj = j.twice_j() as usize;
    if np < tj / 2 + 1 || nphi < 2 * tj + 1 {
        return Err(AppError::usage(format!(
            "grid too coarse for 2j = {tj}: need np >= {} and nphi >= {}",
            tj / 2 + 1,
            2 * tj + 1
        )));
    }
    Ok(QuadratureGrid::new(np, nphi))
}

fn parse_edges(values: &[f64]) -> Result<Vec<ChordSq>, AppError> {
    values
        .iter()
        .map(|&v| ChordSq::new(v).map_err(AppError::from))
        .collect()
}

fn edges6(values: &[f64]) -> Result<Spin2Edges, AppError> {
    let e = parse_edges(values)?;
    if e.len() != 6 {
        return Err(AppError::usage(format!(
            "expected 6 edges (eps,mu,nu,alpha,beta,gamma), got {}",
            e.len()
        )));
    }
    Ok(Spin2Edges {
        eps: e[0],
        mu: e[1],
        nu: e[2],
        alpha: e[3],
        beta: e[4],
        gamma: e[5],
    })
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match cli.command {
        Command::Entropy {
            state,
            method,
            np,
            nphi,
        } => {
            let input = read_input(&state)?;
            let report = match method {
                MethodArg::Closed => match &input {
                    // Point inputs skip the root finder entirely.
                    StateInput::Points(_) => {
                        wehrl_closed_from_decomposition(&to_decomposition(&input)?)?
                    }
                    StateInput::State(s) => wehrl_closed(s)?,
                },
                MethodArg::Quad => {
                    let (s, _) = to_state(&input)?;
                    let grid = grid_for(s.j(), np, nphi)?;
                    wehrl_quadrature(&s, &grid)
                }
            };
            print_json(&report)?;
        }
        Command::Snorm {
            state,
            s,
            exact,
            np,
            nphi,
        } => {
            let input = read_input(&state)?;
            let (st, _) = to_state(&input)?;
            if s.is_nan() || s < 1.0 {
                return Err(AppError::usage(format!("s = {s} must be at least 1")));
            }
            #[derive(Serialize)]
            struct SnormOut {
                twice_j: u32,
                s: f64,
                method: &'static str,
                value: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                grid: Option<[usize; 2]>,
            }
            let out = if exact {
                if s.fract() != 0.0 {
                    return Err(AppError::usage(format!(
                        "the exact route needs integer s, got {s}"
                    )));
                }
                SnormOut {
                    twice_j: st.twice_j(),
                    s,
                    method: "exact",
                    value: s_norm_exact(&st, s as u32)?,
                    grid: None,
                }
            } else {
                let tj = st.twice_j() as f64;
                // Past the exactness threshold n_p >= js+1, n_phi >= 4js+1
                // for integer s.
                let default_np = (tj * s / 2.0).ceil() as usize + 64;
                let default_nphi = (2.0 * tj * s).ceil() as usize + 64;
                let grid = QuadratureGrid::new(
                    np.unwrap_or(default_np).max(1),
                    nphi.unwrap_or(default_nphi).max(1),
                );
                SnormOut {
                    twice_j: st.twice_j(),
                    s,
                    method: "quadrature",
                    value: s_norm_quadrature(&st, s, &grid),
                    grid: Some([grid.n_p(), grid.n_phi()]),
                }
            };
            print_json(&out)?;
        }
        Command::Closed { spin, edges } => {
            let e = parse_edges(&edges)?;
            #[derive(Serialize)]
            struct ClosedOut {
                spin: String,
                edges: Vec<f64>,
                value: f64,
            }
            let value = match (spin.as_str(), e.len()) {
                ("1", 1) => spin1_entropy(e[0]),
                ("3/2" | "1.5", 3) => spin32_entropy(e[0], e[1], e[2])?,
                ("2", 6) => spin2_entropy(&edges6(&edges)?),
                ("1", n) | ("3/2" | "1.5", n) | ("2", n) => {
                    return Err(AppError::usage(format!(
                        "spin {spin} needs {} edge value(s), got {n}",
                        match spin.as_str() {
                            "1" => 1,
                            "2" => 6,
                            _ => 3,
                        }
                    )));
                }
                _ => {
                    return Err(AppError::usage(format!(
                        "unsupported spin {spin:?}: closed forms exist for 1, 3/2, 2"
                    )));
                }
            };
            print_json(&ClosedOut {
                spin,
                edges,
                value,
            })?;
        }
        Command::Embed4 { edges } => {
            let cert = embeddable4(&edges6(&edges)?);
            print_json(&cert)?;
        }
        Command::Analyze { input } => {
            let d = to_decomposition(&read_input(&input)?)?;
            print_json(&d)?;
        }
        Command::Synth { input } => {
            let (state, c) = to_state(&read_input(&input)?)?;
            let mut value = serde_json::to_value(&state)
                .map_err(|e| AppError::usage(format!("serialization failed: {e}")))?;
            if let (serde_json::Value::Object(map), Some(c)) = (&mut value, c) {
                map.insert("c".into(), c.into());
            }
            print_json(&value)?;
        }
        Command::Minimize {
            twice_j,
            restarts,
            seed,
            max_iters,
            out,
        } => {
            if restarts == 0 {
                return Err(AppError::usage("need at least one restart"));
            }
            let mut config = SearchConfig::new(TwiceSpin::new(twice_j)?);
            config.restarts = restarts;
            config.seed = seed;
            config.max_iters = max_iters;
            let report = minimize_entropy(&config);
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| AppError::usage(format!("serialization failed: {e}")))?;
            write_or_print(
                &out,
                &format!("{text}\n"),
                &format!(
                    "best entropy {} (gap {:+e}, seed {seed})",
                    report.best_value, report.gap
                ),
            )?;
        }
        Command::Sweep { twice_j, eps, out } => {
            let rows = perturbation_sweep(TwiceSpin::new(twice_j)?, &eps)?;
            let mut csv = String::from("eps,entropy,c_measured,c_exact,ratio\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.eps, r.entropy, r.c_measured, r.c_exact, r.ratio
                ));
            }
            write_or_print(&out, &csv, &format!("{} sweep rows", rows.len()))?;
        }
        Command::Verify {
            twice_j,
            samples,
            seed,
            out,
        } => {
            let spins = twice_j
                .into_iter()
                .map(TwiceSpin::new)
                .collect::<Result<Vec<_>, _>>()?;
            if spins.is_empty() {
                return Err(AppError::usage("need at least one spin"));
            }
            let config = VerifyConfig {
                spins,
                samples,
                seed,
            };
            let report = run_verify(&config)?;
            for c in &report.checks {
                println!(
                    "{} [2j={}] worst {:+.3e} vs tol {:.0e}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.twice_j,
                    c.worst,
                    c.tolerance,
                    c.name
                );
            }
            println!(
                "verify: {} ({} checks, {} samples/spin, seed {seed})",
                if report.passed { "all passed" } else { "FAILURES" },
                report.checks.len(),
                samples
            );
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| AppError::usage(format!("serialization failed: {e}")))?;
                fs::write(&path, format!("{text}\n")).map_err(|e| {
                    AppError::usage(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            if !report.passed {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    #[cfg(feature = "parallel")]
    if let Ok(threads) = std::env::var("WEHRL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
