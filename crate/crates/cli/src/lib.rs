//! Subcommand dispatch for the `contagion` binary.

pub mod args;
pub mod config;

use std::path::Path;

use contagion_core::bailout::{brute_force_infusion, lift_to_finite, optimal_infusion};
use contagion_core::equilibrium::{SolveStrategy, ValuationSolver};
use contagion_core::experiments::{
    bailout_transfer_run, concentration_run, cutoff_convergence_run, figure_infusion_run,
    figure_table, rows_table,
};
use contagion_core::model::endowment_vector;
use contagion_core::report::{self, Table};
use contagion_core::{
    build_graphon, cross_holdings, sample_sbm, solve_extremal_cutoffs, spillover_matrix, Error,
    Result,
};

use crate::args::{Cli, Command, ExperimentName, FigureName};
use crate::config::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_UNSTABLE: u8 = 4;
pub const EXIT_NON_INTERIOR: u8 = 5;
pub const EXIT_NON_CONVERGENCE: u8 = 6;

/// Number of points in the infusion figure grid.
pub const FIGURE_POINTS: usize = 10_000;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::InvalidSpec(_) | Error::Config(_) | Error::Parameter(_) | Error::Precondition(_) => {
            EXIT_VALIDATION
        }
        Error::Unstable { .. } => EXIT_UNSTABLE,
        Error::NonInterior { .. } => EXIT_NON_INTERIOR,
        Error::NonConvergence { .. } => EXIT_NON_CONVERGENCE,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

fn write(table: &Table, dir: &Path, name: &str) -> Result<()> {
    let path = dir.join(name);
    table.write_atomic(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = config::resolve(&cli.overrides)?;
    dispatch(&cli.command, &cfg)
}

pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<()> {
    let spec = &cfg.spec;
    let out = cfg.out_dir.as_path();
    match command {
        Command::GenNetwork => {
            let net = sample_sbm(spec, cfg.n, cfg.seed)?;
            let c = cross_holdings(&net, spec.exposure());
            write(&report::edges_table(&net), out, "edges.csv")?;
            write(&report::matrix_table(c.entries()), out, "holdings.csv")
        }
        Command::SolveFinite => {
            let net = sample_sbm(spec, cfg.n, cfg.seed)?;
            let c = cross_holdings(&net, spec.exposure());
            let e = endowment_vector(spec, cfg.n);
            let eq = ValuationSolver::new(&c, &e, spec.failure_cost(), SolveStrategy::Auto)?
                .extremal(spec.threshold(), cfg.side)?;
            println!(
                "{} equilibrium: {} of {} firms solvent after {} rounds",
                cfg.side.as_str(),
                eq.solvency.count_solvent(),
                cfg.n,
                eq.iterations
            );
            write(&report::values_table(&net, &e, &eq), out, "values.csv")
        }
        Command::SolveGraphon => {
            let g = build_graphon(spec)?;
            let x = solve_extremal_cutoffs(&g, cfg.side)?;
            write(&report::cutoffs_table(&x, cfg.side), out, "cutoffs.csv")
        }
        Command::Spillover => {
            let g = build_graphon(spec)?;
            let x = solve_extremal_cutoffs(&g, cfg.side)?;
            let b = spillover_matrix(&g, &x)?;
            println!(
                "spectral radius {} ({})",
                b.rho,
                if b.stable { "stable" } else { "unstable" }
            );
            write(&report::spillover_table(&b), out, "spillover.csv")
        }
        Command::Optimize => {
            let g = build_graphon(spec)?;
            let plan = optimal_infusion(&g, cfg.budget)?;
            if let Some(step) = cfg.grid_step {
                let grid = brute_force_infusion(&g, cfg.budget, step)?;
                println!(
                    "grid search: best solvent measure {} over {} candidates at y = {:?}",
                    grid.solvent_measure, grid.candidates, grid.y
                );
            }
            write(&report::plan_table(&plan), out, "plan.csv")
        }
        Command::Lift => {
            let g = build_graphon(spec)?;
            let plan = optimal_infusion(&g, cfg.budget)?;
            let lift = lift_to_finite(&plan, spec, cfg.n, cfg.epsilon)?;
            println!("total infusion {} for {} firms", lift.total, cfg.n);
            write(&report::infusion_table(spec, &lift), out, "infusion.csv")
        }
        Command::Experiment { name } => match name {
            ExperimentName::Concentration => {
                let rows = concentration_run(spec, cfg.kappa, &cfg.n_list, &cfg.seeds, cfg.alpha)?;
                let comment = format!("kappa={} alpha={}", cfg.kappa.as_str(), cfg.alpha);
                write(&rows_table(&rows, &comment), out, "concentration.csv")
            }
            ExperimentName::Cutoffs => {
                let rows = cutoff_convergence_run(spec, &cfg.n_list, &cfg.seeds)?;
                write(&rows_table(&rows, ""), out, "cutoffs_experiment.csv")
            }
            ExperimentName::Transfer => {
                let rows =
                    bailout_transfer_run(spec, cfg.budget, cfg.epsilon, &cfg.n_list, &cfg.seeds)?;
                let comment = format!("budget={} epsilon={}", cfg.budget, cfg.epsilon);
                write(&rows_table(&rows, &comment), out, "transfer.csv")
            }
            ExperimentName::Figure => figure(cfg),
        },
        Command::Figure {
            name: FigureName::Infusion,
        } => figure(cfg),
    }
}

fn figure(cfg: &RunConfig) -> Result<()> {
    let points = figure_infusion_run(&cfg.spec, cfg.budget, FIGURE_POINTS)?;
    write(&figure_table(&points), &cfg.out_dir, "figure_infusion.csv")
}
