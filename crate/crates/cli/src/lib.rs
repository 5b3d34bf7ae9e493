//! `ptssh` command line: spectra, sweeps, phase diagrams, evolutions, fits.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical diagnostics, 4 I/O.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ptssh::Error> for CliError {
    fn from(e: ptssh::Error) -> Self {
        use ptssh::Error as E;
        match e {
            E::InvalidParams(_) | E::Reflection { .. } | E::Lookup(_) => {
                CliError::Validation(e.to_string())
            }
            E::Ambiguous { ref spectrum, .. } => {
                let raw: Vec<String> = spectrum
                    .iter()
                    .map(|(re, im, k)| format!("z = {re:+.6e} {im:+.6e}i, Im k = {k:+.6e}"))
                    .collect();
                CliError::Numerical(format!("{e}\n  {}", raw.join("\n  ")))
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ptssh",
    version,
    about = "PT-symmetric trimer between two SSH leads"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML run config, or an artifact whose header should be replayed.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub t1: Option<f64>,
    /// Defaults to 1 (the energy unit).
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of P_s, zero modes, band edges and the isolated-trimer levels.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Spectrum and region label along a gamma grid.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        gamma_min: Option<f64>,
        #[arg(long)]
        gamma_max: Option<f64>,
        /// Number of grid points, endpoints included.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Gapped / ungapped / no-low-PT labels on a (t1, g) grid with t2 = 1.
    PhaseDiagram {
        /// Single-cell query (with --g) when no ranges are given.
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        t1_min: Option<f64>,
        #[arg(long)]
        t1_max: Option<f64>,
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        /// Grid points along both axes.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        t1_steps: Option<usize>,
        #[arg(long)]
        g_steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Propagate a single-site state and record amplitudes near the trimer.
    Evolve {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial site: 0, 1A, -1B, (2, b) …
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        n_cells: Option<usize>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt_out: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Power-law and exponential fits of P(t) from an evolve trace.
    Fit {
        /// Trace CSV written by `evolve`.
        #[arg(long)]
        trace: Option<String>,
        /// Site to fit (defaults to the trace's initial site).
        #[arg(long)]
        site: Option<String>,
        #[arg(long)]
        window_min: Option<f64>,
        #[arg(long)]
        window_max: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Exceptional-point thresholds for (t1, t2, g) as JSON.
    Catalog {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Region label of one parameter point.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Site amplitudes of one eigenstate.
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        /// Root index 0–3 (descending Re z), or zero-a / zero-b.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Non-zero entries of the truncated Hamiltonian.
    Matrix {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n_cells: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn with_params(cfg: &mut RunConfig, p: &ParamArgs) {
    cfg.t1 = p.t1;
    cfg.t2 = p.t2;
    cfg.g = p.g;
    cfg.gamma = p.gamma;
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Sweep { .. } => "sweep",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Evolve { .. } => "evolve",
            Command::Fit { .. } => "fit",
            Command::Catalog { .. } => "catalog",
            Command::Classify { .. } => "classify",
            Command::Profile { .. } => "profile",
            Command::Matrix { .. } => "matrix",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common, .. }
            | Command::Sweep { common, .. }
            | Command::PhaseDiagram { common, .. }
            | Command::Evolve { common, .. }
            | Command::Fit { common, .. }
            | Command::Catalog { common, .. }
            | Command::Classify { common, .. }
            | Command::Profile { common, .. }
            | Command::Matrix { common, .. } => common,
        }
    }

    /// Settings given as flags.
    fn flags(&self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::Spectrum { params, .. }
            | Command::Catalog { params, .. }
            | Command::Classify { params, .. } => with_params(&mut c, params),
            Command::Sweep {
                params,
                gamma_min,
                gamma_max,
                steps,
                ..
            } => {
                with_params(&mut c, params);
                c.gamma_min = *gamma_min;
                c.gamma_max = *gamma_max;
                c.steps = *steps;
            }
            Command::PhaseDiagram {
                t1,
                g,
                t1_min,
                t1_max,
                g_min,
                g_max,
                resolution,
                t1_steps,
                g_steps,
                ..
            } => {
                c.t1 = *t1;
                c.g = *g;
                c.t1_min = *t1_min;
                c.t1_max = *t1_max;
                c.g_min = *g_min;
                c.g_max = *g_max;
                c.t1_steps = t1_steps.or(*resolution);
                c.g_steps = g_steps.or(*resolution);
            }
            Command::Evolve {
                params,
                init,
                n_cells,
                t_max,
                dt_out,
                tol,
                ..
            } => {
                with_params(&mut c, params);
                c.init = init.clone();
                c.n_cells = *n_cells;
                c.t_max = *t_max;
                c.dt_out = *dt_out;
                c.tol = *tol;
            }
            Command::Fit {
                trace,
                site,
                window_min,
                window_max,
                ..
            } => {
                c.trace = trace.clone();
                c.site = site.clone();
                c.window_min = *window_min;
                c.window_max = *window_max;
            }
            Command::Profile {
                params,
                mode,
                n_max,
                ..
            } => {
                with_params(&mut c, params);
                c.mode = mode.clone();
                c.n_max = *n_max;
            }
            Command::Matrix {
                params, n_cells, ..
            } => {
                with_params(&mut c, params);
                c.n_cells = *n_cells;
            }
        }
        c.out = self.common().out.clone();
        c
    }
}

/// Config file (if any) overlaid with the flags; flags win.
pub fn resolve(cmd: &Command) -> Result<RunConfig, CliError> {
    let mut cfg = match &cmd.common().config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &cfg.command {
        if c != cmd.name() {
            return Err(CliError::Validation(format!(
                "config is for `{c}`, not `{}`",
                cmd.name()
            )));
        }
    }
    cfg.overlay(&cmd.flags());
    cfg.command = Some(cmd.name().to_string());
    Ok(cfg)
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("PTSSH_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Validation(format!("PTSSH_THREADS = {v:?} is not a positive integer"))
        })?;
        // A second initialisation in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = resolve(&cli.command)?;
    match cli.command {
        Command::Spectrum { .. } => commands::spectrum(cfg),
        Command::Sweep { .. } => commands::sweep(cfg),
        Command::PhaseDiagram { .. } => commands::phase_diagram(cfg),
        Command::Evolve { .. } => commands::evolve(cfg),
        Command::Fit { .. } => commands::fit(cfg),
        Command::Catalog { .. } => commands::catalog(cfg),
        Command::Classify { .. } => commands::classify(cfg),
        Command::Profile { .. } => commands::profile(cfg),
        Command::Matrix { .. } => commands::matrix(cfg),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
