//! Model parameters and finite random networks.

pub mod holdings;
pub mod network;
pub mod spec;
pub mod spectral;

pub use holdings::{
    block_regular_for, block_regular_matrix, book_threshold, book_to_market, cross_holdings,
    endowment_vector, rounded_block_sizes, HoldingsMatrix,
};
pub use network::{assign_blocks, firm_labels, sample_sbm, FiniteNetwork};
pub use spec::{Block, BlockSpec, SpecFile};
pub use spectral::{spectral_deviation, SpectralDeviation, DEFAULT_ALPHA};
