//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use oris_link_core::beam::PhaseProfile;

use crate::config::{parse_config, parse_profile, ConfigError, PePreset, ScenarioConfig};
use crate::experiments::{parse_grid, run_experiment, Experiment, RunError, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "oris-link", version, about = "ORIS-assisted HAP-to-drone QKD link experiments")]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Scenario file (`key = value` lines); omitted keys take reference values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV files and plot scripts.
    #[arg(long)]
    pub out: PathBuf,
    /// Monte-Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Zenith grid in degrees, `start:stop:step`.
    #[arg(long = "grid-phi", value_name = "START:STOP:STEP")]
    pub grid_phi: Option<String>,
    /// Turn turbulence off.
    #[arg(long)]
    pub vacuum: bool,
    /// `lps`, `fps`, or `qps:<f_m>`.
    #[arg(long)]
    pub profile: Option<String>,
    /// `none`, `weak`, `moderate`, `strong`, or `custom(mx,my,sx,sy)`.
    #[arg(long)]
    pub pe: Option<String>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    pub threads: Option<usize>,
}

fn flag_error(key: &str, message: impl Into<String>) -> RunError {
    RunError::Config(ConfigError { file: None, line: None, key: Some(format!("--{key}")), message: message.into() })
}

impl Cli {
    /// Scenario after applying command-line overrides.
    pub fn scenario(&self) -> Result<(ScenarioConfig, RunOptions), RunError> {
        let mut cfg = match &self.config {
            Some(p) => parse_config(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.mc_seed = s;
        }
        if let Some(n) = self.samples {
            if n < oris_link_core::montecarlo::MIN_SAMPLES {
                return Err(flag_error("samples", "must be >= 1000"));
            }
            cfg.mc_samples = n;
        }
        if self.vacuum {
            cfg.link.atmosphere.vacuum_mode = true;
        }
        if let Some(p) = &self.profile {
            cfg.profile = Some(parse_profile(p).map_err(|m| flag_error("profile", m))?);
        }
        if let Some(p) = &self.pe {
            cfg.pe = Some(PePreset::parse(p).map_err(|m| flag_error("pe", m))?);
        }
        let phi_grid = match &self.grid_phi {
            Some(g) => Some(parse_grid(g).map_err(|m| flag_error("grid-phi", m))?),
            None => None,
        };
        Ok((cfg, RunOptions { phi_grid }))
    }

    pub fn execute(&self) -> Result<Vec<PathBuf>, RunError> {
        let (cfg, opts) = self.scenario()?;
        if let Some(PhaseProfile::Qps { focus }) = cfg.profile {
            let link = cfg.validate()?;
            if focus < link.min_focus() {
                eprintln!(
                    "warning: QPS focus {focus} m is below d2/2 = {:.3} m; the profile widens the beam there",
                    link.min_focus()
                );
            }
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(flag_error("threads", "must be >= 1"));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| RunError::Io(std::io::Error::other(e.to_string())))?;
        pool.install(|| run_experiment(self.experiment, &cfg, &opts, &self.out))
    }
}

/// Parses `args`, runs the experiment, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match cli.execute() {
        Ok(files) => {
            let mut out = std::io::stdout().lock();
            for f in files {
                let _ = writeln!(out, "{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("oris-link {}: {e}", cli.experiment.name());
            e.exit_code()
        }
    }
}
