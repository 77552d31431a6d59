//! Command-line front end: configuration, commands and static plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "wplab",
    version,
    about = "Wigner functions and average-energy poles of polynomial oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, coefficients and position densities
    Solve(CommonArgs),
    /// Wigner function grids, heatmaps and slice negativity intervals
    WignerGrid(CommonArgs),
    /// Conditional average-energy profiles along x and p
    EnergyProfile(CommonArgs),
    /// Pole positions of the energy profiles
    Poles(CommonArgs),
    /// Per-state pole and negativity matching report
    Report(CommonArgs),
    /// Cross-check the closed forms against independent references
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated state indices (empty for none)
    #[arg(long)]
    pub states: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated output formats: csv, json, svg
    #[arg(long)]
    pub format: Option<String>,
    /// Frame as m,omega,hbar
    #[arg(long)]
    pub frame: Option<String>,
    /// Potential coefficients a0,a1,...
    #[arg(long, allow_hyphen_values = true)]
    pub potential: Option<String>,
    /// Oscillator basis size K
    #[arg(long)]
    pub basis_size: Option<usize>,
    /// Wigner grid x range as lo,hi,points
    #[arg(long, allow_hyphen_values = true)]
    pub grid_x: Option<String>,
    /// Wigner grid p range as lo,hi,points
    #[arg(long, allow_hyphen_values = true)]
    pub grid_p: Option<String>,
    /// Profile x window as lo,hi,samples
    #[arg(long, allow_hyphen_values = true)]
    pub profile_x: Option<String>,
    /// Profile p window as lo,hi,samples
    #[arg(long, allow_hyphen_values = true)]
    pub profile_p: Option<String>,
    /// Wigner slice negativity tolerance
    #[arg(long)]
    pub negativity_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest basis index in the closed-form suites
    #[arg(long)]
    pub max_nk: Option<usize>,
    /// Relative fault injected into the G table
    #[arg(long, allow_hyphen_values = true)]
    pub perturb_g: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> config::Overrides {
        config::Overrides {
            states: self.states.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            frame: self.frame.clone(),
            potential: self.potential.clone(),
            basis_size: self.basis_size,
            grid_x: self.grid_x.clone(),
            grid_p: self.grid_p.clone(),
            profile_x: self.profile_x.clone(),
            profile_p: self.profile_p.clone(),
            negativity_tol: self.negativity_tol,
            ..config::Overrides::default()
        }
    }
}

/// Caps the global thread pool at `WPLAB_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("WPLAB_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "WPLAB_THREADS must be a positive integer, got '{v}'"
            ))
        })?;
        // a pool built earlier in the same process keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (args, ov) = match &cli.command {
        Command::Verify(v) => {
            let mut ov = v.common.overrides();
            ov.max_nk = v.max_nk;
            ov.perturb_g = v.perturb_g;
            (&v.common, ov)
        }
        Command::Solve(a)
        | Command::WignerGrid(a)
        | Command::EnergyProfile(a)
        | Command::Poles(a)
        | Command::Report(a) => (a, a.overrides()),
    };
    let config = RunConfig::load(args.config.as_deref(), &ov)?;
    let session = commands::Session::new(config)?;
    let out = match cli.command {
        Command::Solve(_) => commands::cmd_solve(&session)?,
        Command::WignerGrid(_) => commands::cmd_wigner_grid(&session)?,
        Command::EnergyProfile(_) => commands::cmd_energy_profile(&session)?,
        Command::Poles(_) => commands::cmd_poles(&session)?,
        Command::Report(_) => commands::cmd_report(&session)?,
        Command::Verify(_) => commands::cmd_verify(&session)?,
    };
    eprintln!(
        "wrote {} files to {}",
        out.written().len(),
        out.root().display()
    );
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wplab: {e}");
            e.exit_code()
        }
    }
}
