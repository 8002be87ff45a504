use nalgebra::DMatrix;

use super::network::{assign_blocks, firm_labels, FiniteNetwork};
use super::spec::BlockSpec;
use crate::error::{Error, Result};

/// Cross-holdings matrix: entry `(i, j)` is the share of firm `j` held by
/// firm `i`. Column sums are cached.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldingsMatrix {
    entries: DMatrix<f64>,
    column_sums: Vec<f64>,
}

impl HoldingsMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Parameter("holdings matrix must be square".into()));
        }
        if entries.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::Parameter(
                "holdings entries must be finite and non-negative".into(),
            ));
        }
        let column_sums = entries.column_iter().map(|c| c.sum()).collect();
        Ok(Self {
            entries,
            column_sums,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn column_sums(&self) -> &[f64] {
        &self.column_sums
    }

    pub fn max_column_sum(&self) -> f64 {
        self.column_sums.iter().copied().fold(0.0, f64::max)
    }
}

/// `C_ij = c · A_ij / d_j`: each firm's in-network share `c` is split evenly
/// over its holders.
pub fn cross_holdings(net: &FiniteNetwork, exposure: f64) -> HoldingsMatrix {
    let n = net.n();
    let degrees = net.in_degrees();
    let adjacency = net.adjacency();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if adjacency[i * n + j] != 0 {
            exposure / degrees[j] as f64
        } else {
            0.0
        }
    });
    HoldingsMatrix::new(entries).expect("cross holdings are non-negative")
}

/// Realized block counts `S_k = round(n s_k)`, the last block absorbing the
/// remainder.
pub fn rounded_block_sizes(spec: &BlockSpec, n: usize) -> Result<Vec<usize>> {
    let m = spec.m();
    let mut sizes: Vec<usize> = (0..m - 1)
        .map(|k| (n as f64 * spec.size(k)).round() as usize)
        .collect();
    let used: usize = sizes.iter().sum();
    if used > n {
        return Err(Error::Parameter(format!(
            "rounded block sizes exceed n = {n}"
        )));
    }
    sizes.push(n - used);
    Ok(sizes)
}

/// Deterministic block-regular clique `C̄_ij = c g_{kl} / Σ_r g_{rl} S_r` on
/// contiguous blocks of sizes `round(n s_k)`.
pub fn block_regular_matrix(spec: &BlockSpec, n: usize) -> Result<HoldingsMatrix> {
    let sizes = rounded_block_sizes(spec, n)?;
    let block_of: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
        .collect();
    block_regular_for(spec, &block_of)
}

/// Block-regular clique for an explicit firm-to-block assignment, e.g. the
/// label-based assignment of a sampled network.
pub fn block_regular_for(spec: &BlockSpec, block_of: &[usize]) -> Result<HoldingsMatrix> {
    let m = spec.m();
    let n = block_of.len();
    let mut counts = vec![0usize; m];
    for &k in block_of {
        counts[k] += 1;
    }
    let psi: Vec<f64> = (0..m)
        .map(|l| (0..m).map(|r| spec.link(r, l) * counts[r] as f64).sum())
        .collect();
    if let Some(l) = (0..m).find(|&l| counts[l] > 0 && psi[l] <= 0.0) {
        return Err(Error::Parameter(format!(
            "block {l} has no holders in the realized block sizes"
        )));
    }
    let c = spec.exposure();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        let (k, l) = (block_of[i], block_of[j]);
        c * spec.link(k, l) / psi[l]
    });
    HoldingsMatrix::new(entries)
}

/// Endowments `e_i = f_{k(i)}(i / (n - 1))`.
pub fn endowment_vector(spec: &BlockSpec, n: usize) -> Vec<f64> {
    firm_labels(n)
        .into_iter()
        .zip(assign_blocks(spec, n))
        .map(|(x, k)| spec.endowment(k, x))
        .collect()
}

/// Market values `V̂_i = (1 - Σ_j C_ji) V_i`, i.e. the share held by outside
/// investors.
pub fn book_to_market(values: &[f64], column_sums: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(column_sums)
        .map(|(v, s)| (1.0 - s) * v)
        .collect()
}

/// Book-value threshold matching a market-value threshold when every firm
/// has exposure `c`.
pub fn book_threshold(market_threshold: f64, exposure: f64) -> f64 {
    market_threshold / (1.0 - exposure)
}
