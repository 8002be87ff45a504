//! Reference parameterizations used by tests, experiments and the CLI.

use crate::model::{Block, BlockSpec};

/// One block, `f(x) = 0.5 + x`, `c = 0.5`, `β = 0.4`, `v* = 2`: the cutoff is
/// `x* = 5/6` and the spillover scalar is `b = 0.4`. The link density only
/// matters for sampled networks; 0.9 keeps the holdings noise at `n = 2000`
/// below the margin of a lifted infusion.
pub fn single_block() -> BlockSpec {
    BlockSpec::new(
        vec![Block {
            size: 1.0,
            endow_lo: 0.5,
            endow_hi: 1.5,
        }],
        vec![vec![0.9]],
        0.5,
        0.4,
        2.0,
    )
    .expect("valid preset")
}

/// Two equal blocks with `g = [[0.8, 0.3], [0.3, 0.6]]` and endowment
/// slopes 2; both maximal cutoffs are interior and `ρ(B) = 0.4`.
pub fn two_block() -> BlockSpec {
    BlockSpec::new(
        vec![
            Block {
                size: 0.5,
                endow_lo: 0.5,
                endow_hi: 1.5,
            },
            Block {
                size: 0.5,
                endow_lo: 0.8,
                endow_hi: 1.8,
            },
        ],
        vec![vec![0.8, 0.3], vec![0.3, 0.6]],
        0.5,
        0.4,
        TWO_BLOCK_THRESHOLD,
    )
    .expect("valid preset")
}

pub const TWO_BLOCK_THRESHOLD: f64 = 2.2;

/// Two interchangeable blocks with unit endowment slopes; a budget of
/// `K = 0.02` has an interior optimal support.
pub fn symmetric_two_block() -> BlockSpec {
    BlockSpec::new(
        vec![
            Block {
                size: 0.5,
                endow_lo: 0.5,
                endow_hi: 1.0,
            },
            Block {
                size: 0.5,
                endow_lo: 0.5,
                endow_hi: 1.0,
            },
        ],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        0.3,
        0.4,
        SYMMETRIC_THRESHOLD,
    )
    .expect("valid preset")
}

pub const SYMMETRIC_THRESHOLD: f64 = 1.08;

/// Core (block 1) and periphery (block 2) with `g₂₂ = 0`, equal halves and
/// unit slopes.
pub fn core_periphery() -> BlockSpec {
    BlockSpec::new(
        vec![
            Block {
                size: 0.5,
                endow_lo: 0.5,
                endow_hi: 1.0,
            },
            Block {
                size: 0.5,
                endow_lo: 0.5,
                endow_hi: 1.0,
            },
        ],
        vec![vec![1.0, 1.0], vec![1.0, 0.0]],
        0.5,
        0.4,
        CORE_PERIPHERY_THRESHOLD,
    )
    .expect("valid preset")
}

pub const CORE_PERIPHERY_THRESHOLD: f64 = 1.3;
