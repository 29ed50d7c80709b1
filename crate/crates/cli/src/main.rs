//! Command-line front door for the star-graph NLS library.
//!
//! Single records print as JSON, sweeps as CSV; `--format` overrides where
//! both make sense. Exit codes: 0 success, 2 domain/usage error, 3 search
//! failure.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use starnls::discrete::{
    line_soliton_bump, minimize, perturb, sample_state, GridSpec, MinimizeOptions,
};
use starnls::existence::{
    critical_mass, critical_n, exists_ground_state, phase_diagram, r_curve, ExistenceReport,
    PhaseDiagramRow, Verdict,
};
use starnls::reduced::hessian_check;
use starnls::soliton::{NonlinearParams, Soliton};
use starnls::stationary::{solve_stationary, StarTopology};
use starnls::{Config, Error};
use std::io::Write;
use std::path::PathBuf;

/// Environment variable naming the default output directory for `--output`.
const OUT_DIR_ENV: &str = "STARNLS_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "starnls",
    about = "Ground states, existence thresholds and stability certificates \
             for the doubly-nonlinear Schrödinger energy on star graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the output here instead of stdout (relative paths resolve
    /// against $STARNLS_OUT_DIR when it is set).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Tolerance bundle; individual flags override its members.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    profile: Profile,

    /// Absolute tolerance of the parameter integrals.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,

    /// Relative tolerance of scalar root finding.
    #[arg(long, global = true)]
    root_tol: Option<f64>,

    /// Relative tolerance of frequency/mass inversions.
    #[arg(long, global = true)]
    omega_tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Fast,
    Default,
    Precise,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Line soliton record from a frequency or a mass.
    Soliton {
        #[arg(long)]
        p: f64,
        #[arg(long, conflicts_with = "mu", required_unless_present = "mu")]
        omega: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Solve the stationary state at prescribed mass.
    Stationary {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: u32,
        /// Number of peak-carrying edges.
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long)]
        mu: f64,
    },
    /// Ground-state existence verdict at one mass.
    Exists {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Locate the critical mass (weak or strong vertex regime, N >= 3).
    CriticalMass {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
    },
    /// Critical number of half-lines in the balanced regime.
    CriticalN {
        #[arg(long)]
        p: f64,
    },
    /// Sample R(p) over a grid (CSV: p, r, lhs_n3).
    RCurve {
        #[arg(long)]
        p_min: f64,
        #[arg(long)]
        p_max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Existence scan over p x q x N x mu grids (CSV by default).
    PhaseDiagram {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        mu: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Orbital-stability certificate from the reduced Hessian.
    Stability {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: f64,
        /// Relative finite-difference step.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Brute-force discretized minimization (cross-check of the verdicts).
    Oracle {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: f64,
        /// Truncation length of each edge.
        #[arg(long, default_value_t = 40.0)]
        l: f64,
        #[arg(long, default_value_t = 0.005)]
        dx: f64,
        #[arg(long, value_enum, default_value_t = OracleInit::Perturbed)]
        init: OracleInit,
        /// Relative noise amplitude for the perturbed start.
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also dump the final field as CSV to this path.
        #[arg(long)]
        dump_field: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleInit {
    /// Sampled stationary state with multiplicative noise.
    Perturbed,
    /// Line soliton centred far from the vertex on edge 0.
    FarBump,
}

fn config(cli: &Cli) -> Config {
    let mut cfg = match cli.profile {
        Profile::Fast => Config::fast(),
        Profile::Default => Config::default(),
        Profile::Precise => Config::precise(),
    };
    if let Some(tol) = cli.quad_tol {
        cfg.quad_abs_tol = tol;
    }
    if let Some(tol) = cli.root_tol {
        cfg.root_rel_tol = tol;
    }
    if let Some(tol) = cli.omega_tol {
        cfg.omega_rel_tol = tol;
    }
    cfg
}

/// Fixed 17-significant-digit float formatting for CSV cells.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Exists => "exists",
        Verdict::NotExists => "not_exists",
    }
}

/// Fixed CSV schema shared by `exists` and `phase-diagram`.
const EXISTENCE_HEADER: &str = "p,q,N,mu,radial_energy,line_energy,margin,verdict,boundary";

fn existence_csv_row(report: &ExistenceReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt(report.params.p()),
        fmt(report.params.q()),
        report.n_edges,
        fmt(report.mu),
        fmt(report.radial_energy),
        fmt(report.line_energy),
        fmt(report.margin),
        verdict_str(report.verdict),
        report.boundary
    )
}

fn phase_row_csv(row: &PhaseDiagramRow) -> String {
    match &row.report {
        Some(report) => existence_csv_row(report),
        None => format!(
            "{},{},{},{},nan,nan,nan,error,false",
            fmt(row.p),
            fmt(row.q),
            row.n_edges,
            fmt(row.mu)
        ),
    }
}

fn run(cli: &Cli) -> Result<String, Error> {
    let cfg = config(cli);
    match &cli.command {
        Command::Soliton { p, omega, mu } => {
            let soliton = match (omega, mu) {
                (Some(w), None) => Soliton::from_omega(*p, *w, &cfg)?,
                (None, Some(m)) => Soliton::from_mass(*p, *m, &cfg)?,
                _ => return Err(Error::Domain("pass exactly one of --omega, --mu".into())),
            };
            let record = json!({
                "p": soliton.p,
                "omega": soliton.omega,
                "mass": soliton.mass,
                "energy": soliton.energy,
                "peak": soliton.peak(),
            });
            Ok(serde_json::to_string_pretty(&record).expect("serialization") + "\n")
        }
        Command::Stationary { p, q, n, j, mu } => {
            let params = NonlinearParams::new(*p, *q)?;
            let topo = StarTopology::new(*n)?;
            let state = solve_stationary(&params, topo, *j, *mu, &cfg)?;
            Ok(serde_json::to_string_pretty(&state).expect("serialization") + "\n")
        }
        Command::Exists { p, q, n, mu, format } => {
            let params = NonlinearParams::new(*p, *q)?;
            let topo = StarTopology::new(*n)?;
            let report = exists_ground_state(&params, topo, *mu, &cfg)?;
            match format {
                Format::Json => {
                    Ok(serde_json::to_string_pretty(&report).expect("serialization") + "\n")
                }
                Format::Csv => Ok(format!(
                    "{EXISTENCE_HEADER}\n{}\n",
                    existence_csv_row(&report)
                )),
            }
        }
        Command::CriticalMass { p, q, n, rel_tol } => {
            let params = NonlinearParams::new(*p, *q)?;
            let topo = StarTopology::new(*n)?;
            let result = critical_mass(&params, topo, *rel_tol, &cfg)?;
            Ok(serde_json::to_string_pretty(&result).expect("serialization") + "\n")
        }
        Command::CriticalN { p } => {
            let n_p = critical_n(*p, &cfg)?;
            let record = json!({ "p": p, "N_p": n_p });
            Ok(serde_json::to_string_pretty(&record).expect("serialization") + "\n")
        }
        Command::RCurve { p_min, p_max, steps } => {
            if *steps < 2 || p_min >= p_max {
                return Err(Error::Domain(
                    "r-curve needs p_min < p_max and at least 2 steps".into(),
                ));
            }
            let grid: Vec<f64> = (0..*steps)
                .map(|k| p_min + (p_max - p_min) * k as f64 / (*steps - 1) as f64)
                .collect();
            let rows = r_curve(&grid, &cfg)?;
            let mut out = String::from("p,r,lhs_n3\n");
            for (p, r) in rows {
                out.push_str(&format!("{},{},{}\n", fmt(p), fmt(r), fmt(3.0 * r)));
            }
            Ok(out)
        }
        Command::PhaseDiagram { p, q, n, mu, format } => {
            let rows = phase_diagram(p, q, n, mu, &cfg);
            match format {
                Format::Csv => {
                    let mut out = String::from(EXISTENCE_HEADER);
                    out.push('\n');
                    for row in &rows {
                        out.push_str(&phase_row_csv(row));
                        out.push('\n');
                    }
                    Ok(out)
                }
                Format::Json => {
                    Ok(serde_json::to_string_pretty(&rows).expect("serialization") + "\n")
                }
            }
        }
        Command::Stability { p, q, n, mu, step } => {
            let params = NonlinearParams::new(*p, *q)?;
            let topo = StarTopology::new(*n)?;
            let cert = hessian_check(&params, topo, *mu, *step, &cfg)?;
            Ok(serde_json::to_string_pretty(&cert).expect("serialization") + "\n")
        }
        Command::Oracle {
            p,
            q,
            n,
            mu,
            l,
            dx,
            init,
            noise,
            seed,
            max_iter,
            tol,
            dump_field,
        } => {
            let params = NonlinearParams::new(*p, *q)?;
            let topo = StarTopology::new(*n)?;
            let grid = GridSpec::new(*n, *l, *dx)?;
            let report = exists_ground_state(&params, topo, *mu, &cfg)?;
            let start = match init {
                OracleInit::Perturbed => {
                    let state = solve_stationary(&params, topo, 0, *mu, &cfg)?;
                    perturb(&sample_state(&state, grid)?, *noise, *seed)?
                }
                OracleInit::FarBump => {
                    line_soliton_bump(*p, *mu, 0, 0.5 * *l, grid, &cfg)?
                }
            };
            let opts = MinimizeOptions {
                max_iter: *max_iter,
                tol: *tol,
                ..Default::default()
            };
            let run = minimize(&params, &start, *mu, &opts)?;
            if let Some(path) = dump_field {
                let mut file = std::fs::File::create(resolve(path))
                    .map_err(|e| Error::Domain(format!("cannot create field dump: {e}")))?;
                run.field
                    .to_csv(&mut file)
                    .map_err(|e| Error::Domain(format!("cannot write field dump: {e}")))?;
            }
            let record = json!({
                "p": p,
                "q": q,
                "N": n,
                "mu": mu,
                "L": l,
                "dx": dx,
                "energy": run.energy,
                "iterations": run.iterations,
                "converged": run.converged,
                "final_mass": starnls::discrete::discrete_mass(&run.field),
                "final_vertex_value": run.field.vertex_value(),
                "radial_energy": report.radial_energy,
                "line_energy": report.line_energy,
                "verdict": verdict_str(report.verdict),
            });
            Ok(serde_json::to_string_pretty(&record).expect("serialization") + "\n")
        }
    }
}

/// Resolve an output path against $STARNLS_OUT_DIR for relative paths.
fn resolve(path: &PathBuf) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.clone()
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.output {
                let target = resolve(path);
                if let Err(e) = std::fs::write(&target, text) {
                    eprintln!("error: cannot write {}: {e}", target.display());
                    std::process::exit(2);
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).expect("stdout");
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
