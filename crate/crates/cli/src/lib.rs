//! Command-line front end for `epdyn`.
//!
//! Every subcommand builds one [`Table`] and writes it as CSV or JSON, to
//! standard output or to `--output`. Exit codes: 0 on success (including
//! `--help`), 2 for usage and configuration errors, 1 when the computation
//! or the output fails.

pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use epdyn::evolution::ep_energy;
use epdyn::jordan::{jordan_decompose_2x2, schrodinger_generator, DEFAULT_DEFECT_TOLERANCE};
use epdyn::model::{hamiltonian, rotated_hamiltonian, to_canonical, to_observational};
use epdyn::spectral::{critical_lambda, eigenvalues, exceptional_points, Branch};
use epdyn::sweep::{time_series, trajectory_sweep, width_and_beat};
use epdyn::{Complex64, Matrix2, StateVector};

use config::{parse_complex, parse_state, preset, PartialConfig};
pub use config::{parse_config, Basis, Format, RunConfig};
pub use error::CliError;
use output::{Cell, SweepRow, Table};

/// Default coupling window, wide enough to hold both exceptional points of the preset.
pub const DEFAULT_WINDOW: (f64, f64) = (0.53, 0.59);
pub const DEFAULT_SWEEP_POINTS: usize = 400;
pub const DEFAULT_CRITICAL_GRID: usize = 400;
pub const DEFAULT_TIME_STEPS: usize = 2000;
pub const DEFAULT_T_MAX: f64 = 600.0;

#[derive(Debug, Parser)]
#[command(
    name = "epdyn",
    version,
    about = "Two-level dynamics near exceptional points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues E1, E2 and their difference D at one coupling
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Coupling, `re` or `re,im`
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// The two exceptional points and the energy at each
    Eps {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Time series of the state at a fixed coupling
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Coupling, `re` or `re,im`
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Initial state: `a,b` (real) or `re1,im1,re2,im2` [default: 0,1]
        #[arg(long, allow_hyphen_values = true)]
        psi0: Option<String>,
        /// Basis of the initial state and of the printed components [default: rotated]
        #[arg(long, value_enum)]
        basis: Option<Basis>,
        /// Last time of the uniform grid starting at 0 [default: 600]
        #[arg(long)]
        tmax: Option<f64>,
        /// Number of time samples [default: 2000]
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Branch-tracked eigenvalue paths over real couplings
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Number of couplings [default: 400]
        #[arg(long = "points", visible_alias = "n")]
        points: Option<usize>,
    },
    /// Coupling where a resonance comes closest to the real axis, with both widths
    Critical {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Scan points before refinement [default: 400]
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Jordan decomposition at an exceptional point
    Jordan {
        #[command(flatten)]
        model: ModelArgs,
        /// Which exceptional point
        #[arg(long, default_value = "1", value_parser = ["1", "2"])]
        ep: String,
        /// Decompose the Hamiltonian `h` or the generator `o = -iH` of the evolution
        #[arg(long, default_value = "o", value_parser = ["h", "o"])]
        operator: String,
        /// Basis of the decomposed matrix [default: rotated]
        #[arg(long, value_enum)]
        basis: Option<Basis>,
        /// Relative eigenvalue gap accepted as defective
        #[arg(long, default_value_t = DEFAULT_DEFECT_TOLERANCE)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Built-in parameter set (`paper`)
    #[arg(long)]
    preset: Option<String>,
    /// TOML file with omega1, omega2, epsilon1, epsilon2, delta as [re, im]
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    omega1: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    omega2: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    epsilon1: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    epsilon2: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    delta: Option<String>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Lower end of the coupling window [default: 0.53]
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Upper end of the coupling window [default: 0.59]
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
}

impl ModelArgs {
    /// Merges preset, config file and flags, in that order of precedence.
    fn resolve(&self) -> Result<PartialConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                PartialConfig::from_toml(&text)?
            }
            None => PartialConfig::default(),
        };
        let mut problems = Vec::new();
        if let Some(name) = &self.preset {
            match preset(name) {
                // flags beat the file, so a flag preset only fills what the file left open
                Some(p) => {
                    let mut base = PartialConfig::default();
                    base.apply_preset(&p);
                    for (slot, value) in cfg.params.iter_mut().zip(base.params) {
                        slot.get_or_insert(value.unwrap());
                    }
                }
                None => problems.push(format!("unknown preset `{name}` (available: paper)")),
            }
        }
        let flags = [
            &self.omega1,
            &self.omega2,
            &self.epsilon1,
            &self.epsilon2,
            &self.delta,
        ];
        for ((key, flag), slot) in config::PARAM_KEYS
            .iter()
            .zip(flags)
            .zip(cfg.params.iter_mut())
        {
            if let Some(text) = flag {
                match parse_complex(text) {
                    Ok(z) => *slot = Some(z),
                    Err(e) => problems.push(format!("--{key}: {e}")),
                }
            }
        }
        if let Some(f) = self.format {
            cfg.format = Some(f);
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Config(problems))
        }
    }
}

fn lambda_arg(flag: &Option<String>, cfg: &mut PartialConfig) -> Result<(), CliError> {
    if let Some(text) = flag {
        cfg.lambda =
            Some(parse_complex(text).map_err(|e| CliError::Usage(format!("--lambda: {e}")))?);
        cfg.lambda_range = None;
    }
    Ok(())
}

fn window_arg(window: &WindowArgs, cfg: &mut PartialConfig) {
    if window.from.is_some() || window.to.is_some() {
        let (lo, hi) = cfg.lambda_range.unwrap_or(DEFAULT_WINDOW);
        cfg.lambda_range = Some((window.from.unwrap_or(lo), window.to.unwrap_or(hi)));
        cfg.lambda = None;
    }
}

fn require_lambda(cfg: &RunConfig) -> Result<Complex64, CliError> {
    if cfg.lambda_range.is_some() {
        return Err(CliError::Usage(
            "this command takes a single coupling, not `lambda_range`".into(),
        ));
    }
    cfg.lambda
        .ok_or_else(|| CliError::Usage("missing coupling: pass --lambda or set `lambda`".into()))
}

fn require_window(cfg: &RunConfig) -> Result<(f64, f64), CliError> {
    if cfg.lambda.is_some() {
        return Err(CliError::Usage(
            "this command takes a coupling window, not `lambda`".into(),
        ));
    }
    let (lo, hi) = cfg.lambda_range.unwrap_or(DEFAULT_WINDOW);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!(
            "coupling window must satisfy from < to, got [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

fn grid_size(flag: Option<usize>, cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    let n = flag.or(cfg.grid).unwrap_or(default);
    if n < 2 {
        return Err(CliError::Usage(format!(
            "grid size must be at least 2, got {n}"
        )));
    }
    Ok(n)
}

fn quantity_table() -> Table {
    Table::new(vec!["quantity", "re", "im"])
}

fn spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    let lambda = require_lambda(cfg)?;
    let s = eigenvalues(&cfg.params, lambda)?;
    let mut t = quantity_table();
    t.push_complex("lambda", lambda);
    t.push_complex("e1", s.e1);
    t.push_complex("e2", s.e2);
    t.push_complex("d", s.d);
    Ok(t)
}

fn eps(cfg: &RunConfig) -> Result<Table, CliError> {
    let pair = exceptional_points(&cfg.params)?;
    let mut t = quantity_table();
    t.push_complex("ep1", pair.ep1);
    t.push_complex("ep2", pair.ep2);
    t.push_complex("e_ep1", ep_energy(&cfg.params, Branch::Ep1)?);
    t.push_complex("e_ep2", ep_energy(&cfg.params, Branch::Ep2)?);
    Ok(t)
}

fn evolve(cfg: &RunConfig, steps: Option<usize>) -> Result<Table, CliError> {
    let lambda = require_lambda(cfg)?;
    let n = grid_size(steps, cfg, DEFAULT_TIME_STEPS)?;
    let t_max = cfg.t_max.unwrap_or(DEFAULT_T_MAX);
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CliError::Usage(format!(
            "--tmax must be positive, got {t_max}"
        )));
    }
    let psi0 = cfg.psi0.unwrap_or(StateVector::from_real(0.0, 1.0));
    let start = match cfg.basis {
        Basis::Rotated => psi0,
        Basis::Original => to_observational(psi0)?,
    };
    let series = time_series(&cfg.params, lambda, start, t_max, n)?;

    let mut t = Table::new(vec![
        "t", "re_z1", "im_z1", "re_z2", "im_z2", "abs_z1", "abs_z2",
    ]);
    for (i, (&time, &state)) in series.times.iter().zip(&series.states).enumerate() {
        let z = match cfg.basis {
            Basis::Rotated => state,
            // the first row is the input itself, not a round trip through the rotation
            Basis::Original if i == 0 => psi0,
            Basis::Original => to_canonical(state)?,
        };
        t.push(
            [
                time,
                z.z1.re,
                z.z1.im,
                z.z2.re,
                z.z2.im,
                z.z1.norm(),
                z.z2.norm(),
            ]
            .into_iter()
            .map(Cell::Num)
            .collect(),
        );
    }
    Ok(t)
}

fn sweep(cfg: &RunConfig, points: Option<usize>) -> Result<Table, CliError> {
    let (lo, hi) = require_window(cfg)?;
    let n = grid_size(points, cfg, DEFAULT_SWEEP_POINTS)?;
    let tr = trajectory_sweep(&cfg.params, lo, hi, n)?;
    let rows: Vec<SweepRow> = tr
        .lambdas
        .iter()
        .zip(tr.e1_path.iter().zip(&tr.e2_path))
        .map(|(&lambda, (e1, e2))| SweepRow {
            lambda,
            re_e1: e1.re,
            im_e1: e1.im,
            re_e2: e2.re,
            im_e2: e2.im,
        })
        .collect();
    Ok(output::sweep_table(&rows))
}

fn critical(cfg: &RunConfig, grid: Option<usize>) -> Result<Table, CliError> {
    let (lo, hi) = require_window(cfg)?;
    let n = grid_size(grid, cfg, DEFAULT_CRITICAL_GRID)?;
    let lambda_c = critical_lambda(&cfg.params, lo, hi, n)?;
    let wb = width_and_beat(&eigenvalues(&cfg.params, lambda_c.into())?)?;
    let (top, bottom) = wb.top_bottom();
    let mut t = Table::new(vec!["lambda_c", "gamma_top", "gamma_bottom", "delta_e"]);
    t.push(vec![
        Cell::Num(lambda_c),
        Cell::Num(top),
        Cell::Num(bottom),
        Cell::Num(wb.delta_e),
    ]);
    Ok(t)
}

fn jordan(cfg: &RunConfig, ep: &str, operator: &str, tol: f64) -> Result<Table, CliError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let branch = if ep == "2" { Branch::Ep2 } else { Branch::Ep1 };
    let lambda = exceptional_points(&cfg.params)?.get(branch);
    let h = match cfg.basis {
        Basis::Rotated => rotated_hamiltonian(&cfg.params, lambda)?,
        Basis::Original => hamiltonian(&cfg.params, lambda)?,
    };
    let m = match operator {
        "h" => h,
        _ => Matrix2::from_dmatrix(&schrodinger_generator(&h.to_dmatrix()))?,
    };
    let jf = jordan_decompose_2x2(&m, tol)?;
    let mut t = quantity_table();
    t.push_complex("lambda_ep", lambda);
    t.push_complex("e_ep", jf.e_ep);
    for (name, mat) in [("s", &jf.s), ("j", &jf.j)] {
        for r in 0..2 {
            for c in 0..2 {
                t.push_complex(&format!("{name}{}{}", r + 1, c + 1), mat[(r, c)]);
            }
        }
    }
    for (name, v) in [("phi_ep", &jf.phi_ep), ("phi_assoc", &jf.phi_assoc)] {
        for k in 0..2 {
            t.push_complex(&format!("{name}{}", k + 1), v[k]);
        }
    }
    Ok(t)
}

fn execute(command: Command) -> Result<(Table, RunConfig), CliError> {
    match command {
        Command::Spectrum { model, lambda } => {
            let mut p = model.resolve()?;
            lambda_arg(&lambda, &mut p)?;
            let cfg = p.finish()?;
            Ok((spectrum(&cfg)?, cfg))
        }
        Command::Eps { model } => {
            let cfg = model.resolve()?.finish()?;
            Ok((eps(&cfg)?, cfg))
        }
        Command::Evolve {
            model,
            lambda,
            psi0,
            basis,
            tmax,
            steps,
        } => {
            let mut p = model.resolve()?;
            lambda_arg(&lambda, &mut p)?;
            if let Some(text) = psi0 {
                p.psi0 =
                    Some(parse_state(&text).map_err(|e| CliError::Usage(format!("--psi0: {e}")))?);
            }
            p.basis = basis.or(p.basis);
            p.t_max = tmax.or(p.t_max);
            let cfg = p.finish()?;
            Ok((evolve(&cfg, steps)?, cfg))
        }
        Command::Sweep {
            model,
            window,
            points,
        } => {
            let mut p = model.resolve()?;
            window_arg(&window, &mut p);
            let cfg = p.finish()?;
            Ok((sweep(&cfg, points)?, cfg))
        }
        Command::Critical {
            model,
            window,
            grid,
        } => {
            let mut p = model.resolve()?;
            window_arg(&window, &mut p);
            let cfg = p.finish()?;
            Ok((critical(&cfg, grid)?, cfg))
        }
        Command::Jordan {
            model,
            ep,
            operator,
            basis,
            tol,
        } => {
            let mut p = model.resolve()?;
            p.basis = basis.or(p.basis);
            let cfg = p.finish()?;
            Ok((jordan(&cfg, &ep, &operator, tol)?, cfg))
        }
    }
}

/// Size of the worker pool from `EPDYN_THREADS`, if set.
fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var("EPDYN_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "EPDYN_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(e) => Err(CliError::Usage(format!("EPDYN_THREADS: {e}"))),
    }
}

fn run_command(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let job = || execute(command);
    let (table, cfg) = match thread_limit()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(job)?,
        None => job()?,
    };
    match &cfg.output {
        Some(path) => {
            let mut buf = Vec::new();
            table.write(cfg.format, &mut buf)?;
            std::fs::write(path, buf)?;
        }
        None => table.write(cfg.format, out)?,
    }
    Ok(())
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let code = run_with(args, &mut out, &mut stderr.lock());
    if out.flush().is_err() && code == 0 {
        return 1;
    }
    code
}
