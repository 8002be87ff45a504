//! Run configuration: a model spec file with an optional `[run]` table,
//! overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use contagion_core::experiments::KappaRule;
use contagion_core::model::{SpecFile, DEFAULT_ALPHA};
use contagion_core::{presets, BlockSpec, Error, Result, Side, Violation};
use serde::Deserialize;

use crate::args::{Overrides, Preset};

/// Optional `[run]` table of a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub budget: Option<f64>,
    pub epsilon: Option<f64>,
    pub grid_step: Option<f64>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
    pub side: Option<String>,
    pub kappa: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: BlockSpec,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub n: usize,
    pub n_list: Vec<usize>,
    pub budget: f64,
    pub epsilon: f64,
    pub grid_step: Option<f64>,
    pub alpha: f64,
    pub out_dir: PathBuf,
    pub side: Side,
    pub kappa: KappaRule,
}

pub const DEFAULT_SEEDS: u64 = 20;
pub const DEFAULT_N: usize = 200;
pub const DEFAULT_N_LIST: [usize; 2] = [200, 2000];
pub const DEFAULT_BUDGET: f64 = 0.02;
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Split a config file into its spec and `[run]` table.
pub fn parse_config_str(text: &str) -> Result<(SpecFile, RunSection)> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let run = match table.remove("run") {
        Some(v) => v
            .try_into::<RunSection>()
            .map_err(|e| Error::Config(format!("[run]: {e}")))?,
        None => RunSection::default(),
    };
    let spec: SpecFile = toml::Value::Table(table)
        .try_into()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok((spec, run))
}

pub fn parse_config(path: &Path) -> Result<(SpecFile, RunSection)> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    parse_config_str(&text)
}

fn parse_side(s: &str) -> Option<Side> {
    match s {
        "max" => Some(Side::Maximal),
        "min" => Some(Side::Minimal),
        _ => None,
    }
}

fn parse_kappa(s: &str) -> Option<KappaRule> {
    match s {
        "from_graphon_cutoffs" => Some(KappaRule::FromGraphonCutoffs),
        "all_solvent" => Some(KappaRule::AllSolvent),
        _ => None,
    }
}

fn preset_spec(p: Preset) -> BlockSpec {
    match p {
        Preset::Single => presets::single_block(),
        Preset::TwoBlock => presets::two_block(),
        Preset::Symmetric => presets::symmetric_two_block(),
        Preset::CorePeriphery => presets::core_periphery(),
    }
}

/// Load the spec (file or preset), layer flags over the `[run]` table and
/// validate everything, reporting all violations at once.
pub fn resolve(o: &Overrides) -> Result<RunConfig> {
    let (spec_file, run) = match (&o.config, o.preset) {
        (Some(path), _) => {
            let (s, r) = parse_config(path)?;
            (Some(s), r)
        }
        (None, Some(_)) => (None, RunSection::default()),
        (None, None) => {
            return Err(Error::InvalidSpec(vec![Violation::new(
                "--config",
                "pass a config file or --preset",
            )]))
        }
    };

    let mut violations = Vec::new();
    let spec = match spec_file {
        Some(f) => match BlockSpec::try_from(f) {
            Ok(s) => Some(s),
            Err(Error::InvalidSpec(v)) => {
                violations.extend(v);
                None
            }
            Err(e) => return Err(e),
        },
        None => o.preset.map(preset_spec),
    };

    let seed = o.seed.or(run.seed).unwrap_or(0);
    let seeds = o
        .seeds
        .clone()
        .map(|s| s.0)
        .or(run.seeds)
        .unwrap_or_else(|| (0..DEFAULT_SEEDS).collect());
    let n = o.n.or(run.n).unwrap_or(DEFAULT_N);
    let n_list = o
        .n_list
        .clone()
        .map(|s| s.0)
        .or(run.n_list)
        .unwrap_or(DEFAULT_N_LIST.to_vec());
    let budget = o.budget.or(run.budget).unwrap_or(DEFAULT_BUDGET);
    let epsilon = o.epsilon.or(run.epsilon).unwrap_or(DEFAULT_EPSILON);
    let grid_step = o.grid_step.or(run.grid_step);
    let alpha = o.alpha.or(run.alpha).unwrap_or(DEFAULT_ALPHA);
    let out_dir = o
        .out
        .clone()
        .or(run.out)
        .unwrap_or_else(|| PathBuf::from("."));
    let side_text = o.side.clone().or(run.side).unwrap_or_else(|| "max".into());
    let kappa_text = o
        .kappa
        .clone()
        .or(run.kappa)
        .unwrap_or_else(|| "from_graphon_cutoffs".into());

    if seeds.is_empty() {
        violations.push(Violation::new("run.seeds", "at least one seed is required"));
    }
    if n < 2 {
        violations.push(Violation::new("run.n", "need at least two firms"));
    }
    if n_list.is_empty() || n_list.iter().any(|&v| v < 2) {
        violations.push(Violation::new(
            "run.n_list",
            "need one or more sizes, each at least 2",
        ));
    }
    if !(budget.is_finite() && budget >= 0.0) {
        violations.push(Violation::new("run.budget", "budget must be non-negative"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        violations.push(Violation::new("run.epsilon", "epsilon must be positive"));
    }
    if let Some(h) = grid_step {
        if !(h.is_finite() && h > 0.0) {
            violations.push(Violation::new(
                "run.grid_step",
                "grid step must be positive",
            ));
        }
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        violations.push(Violation::new("run.alpha", "alpha must lie in (0,1)"));
    }
    let side = parse_side(&side_text);
    if side.is_none() {
        violations.push(Violation::new("run.side", "side must be max or min"));
    }
    let kappa = parse_kappa(&kappa_text);
    if kappa.is_none() {
        violations.push(Violation::new(
            "run.kappa",
            "kappa must be from_graphon_cutoffs or all_solvent",
        ));
    }

    match (spec, side, kappa) {
        (Some(spec), Some(side), Some(kappa)) if violations.is_empty() => Ok(RunConfig {
            spec,
            seed,
            seeds,
            n,
            n_list,
            budget,
            epsilon,
            grid_step,
            alpha,
            out_dir,
            side,
            kappa,
        }),
        _ => Err(Error::InvalidSpec(violations)),
    }
}
