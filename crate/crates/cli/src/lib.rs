//! Experiment runner for the `aoi-core` models: analytic reports, simulations,
//! sweeps, power-budget frontiers, simulation-vs-analytic validation and
//! figure presets, written as versioned CSV or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;
pub mod spec;

pub use args::main_with;
pub use error::{CliError, Result};
pub use output::Artifact;
pub use spec::{Command, ExperimentSpec, FigureName, Format};

use output::artifact;

/// Runs one experiment and returns its files in spec order.
pub fn run(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    spec.validate()?;
    let unit = spec.time_unit();
    let stem = spec.command.as_str();
    let f = spec.format;
    Ok(match spec.command {
        Command::Report => vec![artifact(stem, &commands::report(spec)?, unit, f)?],
        Command::Simulate => vec![artifact(stem, &commands::simulate_rows(spec)?, unit, f)?],
        Command::Sweep => vec![artifact(stem, &commands::sweep(spec)?, unit, f)?],
        Command::Frontier => vec![artifact(stem, &commands::frontier(spec)?, unit, f)?],
        Command::Validate => vec![artifact(stem, &commands::validate(spec)?, unit, f)?],
        Command::Figures => {
            let mut names = if spec.figures.is_empty() {
                FigureName::ALL.to_vec()
            } else {
                spec.figures.clone()
            };
            names.dedup();
            let mut out = Vec::new();
            for name in names {
                out.extend(figures::render(spec, name)?);
            }
            out
        }
    })
}
