//! Solvency contagion in equity cross-holding networks.
//!
//! Finite networks are sampled from a stochastic block model and valued
//! through the book-value fixed point with bankruptcy costs; the continuum
//! limit is a block graphon whose extremal equilibria are cutoff rules.
//! On top of the graphon sit the spillover matrix, its stability test and
//! the budget-constrained optimal cash infusion.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bailout;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod graphon;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod report;

pub use equilibrium::{
    extremal_equilibrium, feasibility, putative_values, EquilibriumResult, Feasibility,
    SolveStrategy, SolvencyVector, ValuationProfile, ValuationSolver,
};
pub use error::{Error, Result, Violation};
pub use graphon::{
    build_graphon, is_feasible_cutoff, measured_spillover, putative_block_values,
    solve_extremal_cutoffs, spillover_matrix, BlockGraphon, BlockValues, CutoffVector,
    EndowmentProfile, SpilloverMatrix,
};
pub use model::{cross_holdings, sample_sbm, Block, BlockSpec, FiniteNetwork, HoldingsMatrix};

/// Which end of the equilibrium lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Maximal,
    Minimal,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Maximal => "max",
            Side::Minimal => "min",
        }
    }
}
