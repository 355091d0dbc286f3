use std::path::{Path, PathBuf};

use aoi_core::{PhyConfig, Protocol, TimingModel};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Report,
    Simulate,
    Sweep,
    Frontier,
    Validate,
    Figures,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Report => "report",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Frontier => "frontier",
            Command::Validate => "validate",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig4a,
    Fig4b,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl FigureName {
    pub const ALL: [FigureName; 6] = [
        FigureName::Fig4a,
        FigureName::Fig4b,
        FigureName::Fig7,
        FigureName::Fig8,
        FigureName::Fig9,
        FigureName::Fig10,
    ];
}

/// Everything one invocation needs. Loadable from JSON or TOML; command-line
/// flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: Command,
    pub protocols: Vec<Protocol>,
    pub n: Vec<u32>,
    pub k: u32,
    pub payload_bytes: u32,
    /// Direct timing in place of the PHY model; `t_r` is needed only for RTA.
    pub t_pk: Option<f64>,
    pub t_r: Option<f64>,
    pub phy: PhyConfig,
    /// Operating point for report/simulate/validate; the AoI optimum when absent.
    pub access_prob: Option<f64>,
    pub prob_grid: Option<Vec<f64>>,
    pub budgets: Option<Vec<f64>>,
    pub tx_power: f64,
    pub seed: u64,
    pub rounds: u64,
    pub warmup: Option<u64>,
    pub tracked_sensor: u32,
    /// Empty means every preset.
    pub figures: Vec<FigureName>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            command: Command::Report,
            protocols: Protocol::ALL.to_vec(),
            n: vec![10],
            k: 5,
            payload_bytes: 128,
            t_pk: None,
            t_r: None,
            phy: PhyConfig::default(),
            access_prob: None,
            prob_grid: None,
            budgets: None,
            tx_power: 1.0,
            seed: 1,
            rounds: 1_000_000,
            warmup: None,
            tracked_sensor: 0,
            figures: Vec::new(),
            output: None,
            out_dir: None,
            format: Format::Csv,
        }
    }
}

impl ExperimentSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    /// `.toml` files are read as TOML, anything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_json_str(&text),
        }
    }

    pub fn timing(&self) -> Result<TimingModel> {
        let t = match self.t_pk {
            Some(t_pk) => {
                let t_r = match self.t_r {
                    Some(t_r) => t_r,
                    None if self.protocols.contains(&Protocol::Rta) => {
                        return Err(CliError::Usage("--tr is required with --tpk for RTA".into()))
                    }
                    // unused by SA and FSA
                    None => t_pk,
                };
                TimingModel::new(t_pk, t_r)
            }
            None => TimingModel::from_phy(self.payload_bytes, &self.phy),
        };
        t.map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Label written into output headers.
    pub fn time_unit(&self) -> &'static str {
        if self.t_pk.is_some() {
            "given"
        } else {
            "us"
        }
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        if self.command != Command::Figures {
            if self.protocols.is_empty() {
                return usage("at least one protocol is required");
            }
            if self.n.is_empty() || self.n.contains(&0) {
                return usage("sensor counts must be given and positive");
            }
            if self.k == 0 {
                return usage("k must be at least 1");
            }
            self.timing()?;
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return usage("transmit power must be positive");
        }
        if let Some(p) = self.access_prob {
            if !(p > 0.0 && p <= 1.0) {
                return usage("access probability must lie in (0, 1]");
            }
        }
        if let Some(grid) = &self.prob_grid {
            if grid.is_empty() || grid.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
                return usage("probability grid must be non-empty with values in (0, 1]");
            }
        }
        if let Some(b) = &self.budgets {
            if b.is_empty() || b.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return usage("budgets must be non-empty and positive");
            }
            if b.windows(2).any(|w| w[0] > w[1]) {
                return usage("budgets must be ascending");
            }
        }
        if matches!(self.command, Command::Simulate | Command::Validate | Command::Figures) {
            let warmup = self.warmup.unwrap_or(self.rounds / 100);
            if self.rounds <= warmup {
                return usage("rounds must exceed the warmup");
            }
        }
        if matches!(self.command, Command::Simulate | Command::Validate)
            && self.n.iter().any(|&n| self.tracked_sensor >= n)
        {
            return usage("tracked sensor index must be below every sensor count");
        }
        Ok(())
    }
}
