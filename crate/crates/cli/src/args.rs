use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "contagion",
    version,
    about = "Equity cross-holding contagion and bailout toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Single,
    TwoBlock,
    Symmetric,
    CorePeriphery,
}

/// Flags shared by all subcommands; each one overrides the `[run]` table.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Model spec (TOML), optionally with a `[run]` table.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in spec used when no config file is given.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Seed list: `0..20` or `1,5,9`.
    #[arg(long, global = true, value_parser = parse_seeds)]
    pub seeds: Option<Seeds>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Comma-separated network sizes.
    #[arg(long, global = true, value_parser = parse_sizes)]
    pub n_list: Option<Sizes>,
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Step of the brute-force budget grid checked against the optimizer.
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Exponent of the holdings concentration bound.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Extremal equilibrium: `max` or `min`.
    #[arg(long, global = true)]
    pub side: Option<String>,
    /// Labeling for the concentration experiment: `from_graphon_cutoffs` or `all_solvent`.
    #[arg(long, global = true)]
    pub kappa: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a network and write its edge list and holdings matrix.
    GenNetwork,
    /// Extremal equilibrium of a sampled network (`values.csv`).
    SolveFinite,
    /// Extremal graphon cutoffs (`cutoffs.csv`).
    SolveGraphon,
    /// Spillover matrix at the extremal cutoffs (`spillover.csv`).
    Spillover,
    /// Optimal cash infusion for the budget (`plan.csv`).
    Optimize,
    /// Optimal plan lifted to `n` firms (`infusion.csv`).
    Lift,
    /// Monte-Carlo experiments.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
    },
    /// Figure data.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Concentration,
    Cutoffs,
    Transfer,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Infusion,
}

// Newtypes keep clap from treating the lists as repeated flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list entry {p:?}"))
        })
        .collect()
}

pub fn parse_seeds(s: &str) -> Result<Seeds, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start {a:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end {b:?}"))?;
        if b <= a {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(Seeds((a..b).collect()));
    }
    parse_list(s).map(Seeds)
}

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    parse_list(s).map(Sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_and_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap().0, vec![0, 1, 2]);
        assert_eq!(parse_seeds("4, 9").unwrap().0, vec![4, 9]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn flags_parse_after_subcommand() {
        let cli = Cli::try_parse_from([
            "contagion",
            "experiment",
            "cutoffs",
            "--preset",
            "two-block",
            "--n-list",
            "200,2000",
        ])
        .unwrap();
        assert_eq!(cli.overrides.n_list, Some(Sizes(vec![200, 2000])));
        assert_eq!(cli.overrides.preset, Some(Preset::TwoBlock));
        assert!(matches!(
            cli.command,
            Command::Experiment {
                name: ExperimentName::Cutoffs
            }
        ));
    }
}
