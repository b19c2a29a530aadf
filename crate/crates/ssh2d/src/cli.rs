//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical failure,
//! 4 filesystem. Failures print one JSON object on stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use ssh2d_core::figures::{reproduce_figure_with, BundleKind, FigureId, Parts};
use ssh2d_core::fragments::corner_fragment_report;

use crate::config::{read_config, ConfigError, RunConfig};
use crate::output::{self, Artifact};
use crate::runner;

#[derive(Parser, Debug)]
#[command(name = "ssh2d", version, about = "Finite 2D SSH lattice: spectra, LDOS, corner states, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues with corner/edge/bulk labels and gap summary.
    Spectrum(Common),
    /// Local and total density of states on the energy grid.
    Ldos(Common),
    /// Field-intensity profiles of the corner states.
    Profile(Common),
    /// Fragment decomposition of the gamma = 0 lattice near each corner.
    Fragments(Common),
    /// Spectrum versus J with fragment predictions.
    Sweep(Common),
    /// Disorder ensemble statistics.
    Ensemble(Common),
    /// Regenerate a figure bundle from built-in defaults.
    Figure {
        /// fig2, fig3, fig4a, fig4cd or fig5.
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML configuration; required except for `figure`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to `$SSH2D_OUT_ROOT/<name>` or `runs/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; output is identical for any value.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Numerical(ssh2d_core::Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(ConfigError::Io { .. }) => 4,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message, key) = match self {
            CliError::Usage(m) => ("usage", m.clone(), None),
            CliError::Config(ConfigError::Domain { key, .. }) => ("config", self.message(), Some(key.clone())),
            CliError::Config(ConfigError::Io { .. }) => ("io", self.message(), None),
            CliError::Config(_) => ("config", self.message(), None),
            CliError::Numerical(_) => ("numerical", self.message(), None),
            CliError::Io { .. } => ("io", self.message(), None),
        };
        let mut err = json!({"kind": kind, "message": message, "exit_code": self.exit_code()});
        if let CliError::Config(ConfigError::Syntax { line, column, .. }) = self {
            err["line"] = json!(line);
            err["column"] = json!(column);
        }
        if let Some(k) = key {
            err["key"] = json!(k);
        }
        json!({ "error": err })
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Config(e) => e.to_string(),
            CliError::Numerical(e) => e.to_string(),
            CliError::Io { path, source } => format!("{}: {source}", path.display()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ssh2d_core::Error> for CliError {
    fn from(e: ssh2d_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.into())
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(dir) => {
            println!("{}", dir.display());
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

fn default_out(name: &str) -> PathBuf {
    let root = std::env::var_os("SSH2D_OUT_ROOT").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(name)
}

fn load(common: &Common, base: RunConfig, needs_ldos: bool) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => read_config(path, base)?,
        None => base,
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate(needs_ldos)?;
    Ok(cfg)
}

fn require_config(common: &Common, command: &str) -> Result<(), CliError> {
    if common.config.is_none() {
        return Err(CliError::Usage(format!("`{command}` needs --config <FILE>")));
    }
    Ok(())
}

fn pool(common: &Common) -> Result<rayon::ThreadPool, CliError> {
    runner::thread_pool(common.workers.map(|w| w as usize)).map_err(|e| CliError::Usage(e.to_string()))
}

fn execute(command: Command) -> Result<PathBuf, CliError> {
    let (name, common, artifacts, cfg) = match command {
        Command::Figure { id, common } => {
            let figure = FigureId::parse(&id).map_err(|e| CliError::Usage(e.to_string()))?;
            let kind = if figure.is_sweep() { BundleKind::Sweep } else { BundleKind::Spectral(Parts::ALL) };
            let cfg = load(&common, RunConfig::for_figure(figure), kind != BundleKind::Sweep)?;
            let artifacts = bundle_artifacts(&cfg, &common, "figure", Some(figure), kind)?;
            (figure.name().to_string(), common, artifacts, cfg)
        }
        Command::Spectrum(c) => spectral("spectrum", c, Parts::NONE)?,
        Command::Ldos(c) => spectral("ldos", c, Parts { ldos: true, profiles: false })?,
        Command::Profile(c) => spectral("profile", c, Parts { ldos: false, profiles: true })?,
        Command::Sweep(c) => {
            require_config(&c, "sweep")?;
            let cfg = load(&c, RunConfig::default(), false)?;
            let artifacts = bundle_artifacts(&cfg, &c, "sweep", None, BundleKind::Sweep)?;
            ("sweep".to_string(), c, artifacts, cfg)
        }
        Command::Fragments(c) => {
            require_config(&c, "fragments")?;
            let cfg = load(&c, RunConfig::default(), false)?;
            let report = corner_fragment_report(&cfg.params, cfg.analysis.d_c)?;
            let artifacts = output::fragment_artifacts(&cfg, &report);
            ("fragments".to_string(), c, artifacts, cfg)
        }
        Command::Ensemble(c) => {
            require_config(&c, "ensemble")?;
            let cfg = load(&c, RunConfig::default(), false)?;
            let result = runner::parallel_ensemble(&pool(&c)?, &cfg.ensemble_spec())?;
            let artifacts = output::ensemble_artifacts(&cfg, &result);
            ("ensemble".to_string(), c, artifacts, cfg)
        }
    };
    let dir = common.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| default_out(&name));
    write(&dir, &artifacts)?;
    Ok(dir)
}

type Outcome = (String, Common, Vec<Artifact>, RunConfig);

fn spectral(command: &str, common: Common, parts: Parts) -> Result<Outcome, CliError> {
    require_config(&common, command)?;
    let cfg = load(&common, RunConfig::default(), parts.ldos)?;
    let artifacts = bundle_artifacts(&cfg, &common, command, None, BundleKind::Spectral(parts))?;
    Ok((command.to_string(), common, artifacts, cfg))
}

fn bundle_artifacts(
    cfg: &RunConfig,
    common: &Common,
    command: &str,
    figure: Option<FigureId>,
    kind: BundleKind,
) -> Result<Vec<Artifact>, CliError> {
    let fig = cfg.figure_config(figure, kind)?;
    let artifacts = if kind == BundleKind::Sweep {
        let pool = pool(common)?;
        let bundle = reproduce_figure_with(&fig, |spec| runner::parallel_sweep(&pool, spec))?;
        let ssh2d_core::figures::Summary::Sweep(s) = &bundle.summary else {
            unreachable!("sweep bundles carry sweep summaries")
        };
        let rows = bundle.sweep.as_deref().unwrap_or_default();
        output::sweep_artifacts(cfg, command, figure.map(|f| f.name()), rows, s)
    } else {
        let bundle = reproduce_figure_with(&fig, |_| unreachable!("spectral bundles do not sweep"))?;
        output::spectral_artifacts(cfg, command, &bundle)
    };
    Ok(artifacts)
}

fn write(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    output::write_all(dir, artifacts).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}
