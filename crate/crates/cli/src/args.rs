//! Command-line surface: flags map onto [`ExperimentSpec`] fields, on top of
//! an optional config file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use aoi_core::Protocol;
use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, Result};
use crate::spec::{Command, ExperimentSpec, FigureName, Format};
use crate::{run, Artifact};

#[derive(Debug, Parser)]
#[command(name = "aoi", version, about = "Age of information under SA, FSA and RTA random access")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Analytic AoI, power and load at one access probability (the optimum if omitted)
    Report(Opts),
    /// Monte Carlo estimate with batch-means confidence intervals
    Simulate(Opts),
    /// Analytic curves over a grid of access probabilities
    Sweep(Opts),
    /// Minimum AoI for each power budget
    Frontier(Opts),
    /// Simulation against analytic values, with a pass flag per row
    Validate(Opts),
    /// Figure presets; all of them when none are named
    Figures {
        #[arg(value_enum)]
        names: Vec<FigureName>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the command stored in a config file
    Run {
        #[arg(value_name = "CONFIG")]
        spec_file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// JSON or TOML file with experiment defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "protocol", value_delimiter = ',')]
    pub protocols: Vec<Protocol>,
    /// Sensor counts
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Slots per frame (FSA) or request slots per round (RTA)
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long = "payload")]
    pub payload_bytes: Option<u32>,
    /// Packet duration, replacing the PHY model
    #[arg(long = "tpk")]
    pub t_pk: Option<f64>,
    /// Request duration, replacing the PHY model
    #[arg(long = "tr")]
    pub t_r: Option<f64>,
    /// Access probability (q, ω or π)
    #[arg(long = "access-prob", visible_aliases = ["q", "omega", "pi"])]
    pub access_prob: Option<f64>,
    #[arg(long = "grid", value_delimiter = ',')]
    pub prob_grid: Vec<f64>,
    /// Power budgets in units of P, ascending
    #[arg(long, value_delimiter = ',')]
    pub budgets: Vec<f64>,
    /// Transmit power in units of P
    #[arg(long = "power")]
    pub tx_power: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub warmup: Option<u64>,
    #[arg(long = "tracked")]
    pub tracked_sensor: Option<u32>,
    /// Output file (a directory for `figures`)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Default output directory
    #[arg(long, env = "AOI_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// PHY parameters from a JSON or TOML file
    #[arg(long)]
    pub phy: Option<PathBuf>,
    /// Round frame airtime up to whole OFDM symbols
    #[arg(long)]
    pub symbol_alignment: bool,
    /// Bit rate in bits per microsecond
    #[arg(long)]
    pub bitrate: Option<f64>,
}

impl Opts {
    fn apply(self, command: Command, figures: Vec<FigureName>, base: Option<ExperimentSpec>) -> Result<ExperimentSpec> {
        let mut spec = match (base, &self.config) {
            (Some(s), _) => s,
            (None, Some(path)) => ExperimentSpec::load(path)?,
            (None, None) => ExperimentSpec::default(),
        };
        spec.command = command;
        if !figures.is_empty() {
            spec.figures = figures;
        }
        if !self.protocols.is_empty() {
            spec.protocols = self.protocols;
        }
        if !self.n.is_empty() {
            spec.n = self.n;
        }
        if !self.prob_grid.is_empty() {
            spec.prob_grid = Some(self.prob_grid);
        }
        if !self.budgets.is_empty() {
            spec.budgets = Some(self.budgets);
        }
        if let Some(path) = &self.phy {
            spec.phy = aoi_core::PhyConfig::load(path).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if self.symbol_alignment {
            spec.phy.symbol_alignment = true;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { spec.$field = v; })*};
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(if self.$field.is_some() { spec.$field = self.$field; })*};
        }
        set!(k, payload_bytes, tx_power, seed, rounds, tracked_sensor, format);
        set_opt!(t_pk, t_r, access_prob, warmup, output, out_dir);
        if let Some(b) = self.bitrate {
            spec.phy.bitrate = b;
        }
        Ok(spec)
    }
}

pub fn spec_from_cli(cli: Cli) -> Result<ExperimentSpec> {
    let (command, figures, opts, base) = match cli.command {
        Cmd::Report(o) => (Command::Report, vec![], o, None),
        Cmd::Simulate(o) => (Command::Simulate, vec![], o, None),
        Cmd::Sweep(o) => (Command::Sweep, vec![], o, None),
        Cmd::Frontier(o) => (Command::Frontier, vec![], o, None),
        Cmd::Validate(o) => (Command::Validate, vec![], o, None),
        Cmd::Figures { names, opts } => (Command::Figures, names, opts, None),
        Cmd::Run { spec_file, opts } => {
            let base = ExperimentSpec::load(&spec_file)?;
            (base.command, vec![], opts, Some(base))
        }
    };
    opts.apply(command, figures, base)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Files go to `--output`, else the output directory, else stdout. Figures always go to a directory.
pub fn emit(spec: &ExperimentSpec, artifacts: &[Artifact]) -> Result<()> {
    let dir = match (spec.command, &spec.output, &spec.out_dir) {
        (Command::Figures, Some(o), _) => Some(o.clone()),
        (Command::Figures, None, d) => Some(d.clone().unwrap_or_else(|| PathBuf::from("."))),
        (_, Some(o), _) => {
            for a in artifacts {
                write_file(o, &a.bytes)?;
            }
            return Ok(());
        }
        (_, None, d) => d.clone(),
    };
    match dir {
        Some(dir) => artifacts.iter().try_for_each(|a| write_file(&dir.join(&a.name), &a.bytes)),
        None => {
            let mut out = std::io::stdout().lock();
            for a in artifacts {
                out.write_all(&a.bytes)?;
            }
            Ok(())
        }
    }
}

/// Parses arguments, runs, writes outputs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = spec_from_cli(cli).and_then(|spec| {
        let artifacts = run(&spec)?;
        emit(&spec, &artifacts)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> ExperimentSpec {
        spec_from_cli(Cli::try_parse_from(args).unwrap()).unwrap()
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_fill_the_spec() {
        let s = parse(&["aoi", "report", "--protocol", "sa", "--n", "10", "--q", "0.1", "--tpk", "1"]);
        assert_eq!(s.command, Command::Report);
        assert_eq!(s.protocols, vec![Protocol::Sa]);
        assert_eq!(s.n, vec![10]);
        assert_eq!(s.access_prob, Some(0.1));
        assert_eq!(s.t_pk, Some(1.0));
        let s = parse(&["aoi", "frontier", "--protocol", "fsa,rta", "--n", "5,10", "--budgets", "0.01,0.1"]);
        assert_eq!(s.protocols.len(), 2);
        assert_eq!(s.budgets, Some(vec![0.01, 0.1]));
    }

    #[test]
    fn figure_names_and_aliases() {
        let s = parse(&["aoi", "figures", "fig7", "fig9", "--seed", "7"]);
        assert_eq!(s.figures, vec![FigureName::Fig7, FigureName::Fig9]);
        assert_eq!(s.seed, 7);
        let s = parse(&["aoi", "validate", "--pi", "0.5"]);
        assert_eq!(s.access_prob, Some(0.5));
    }

    #[test]
    fn bad_flags_exit_with_usage_code() {
        assert_eq!(main_with(["aoi", "report", "--bogus"]), 1);
        assert_eq!(main_with(["aoi", "report", "--protocol", "csma"]), 1);
        assert_eq!(main_with(["aoi", "report", "--q", "2"]), 1);
        assert_eq!(main_with(["aoi", "--help"]), 0);
    }
}
