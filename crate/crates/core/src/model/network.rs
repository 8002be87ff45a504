//! Sampling of multi-type random digraphs from a block spec.
//!
//! Each ordered pair `(i, j)`, including `i = j`, carries an independent
//! Bernoulli(`g_{kl}`) edge from holder `i` to issuer `j`. Randomness comes
//! from ChaCha8 keyed by the user seed: row `i` reads stream `i`, and column
//! `j` is the `j`-th uniform drawn on that stream. Rows can therefore be
//! generated in any order (or in parallel) with identical results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::spec::BlockSpec;
use crate::error::{Error, Result};

/// Equispaced firm labels `i / (n - 1)`.
pub fn firm_labels(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let denom = (n - 1) as f64;
    (0..n).map(|i| i as f64 / denom).collect()
}

/// Block of every firm on the `n`-point label grid.
pub fn assign_blocks(spec: &BlockSpec, n: usize) -> Vec<usize> {
    firm_labels(n)
        .into_iter()
        .map(|x| spec.block_of_label(x))
        .collect()
}

/// A sampled network: dense 0/1 adjacency (row = holder, column = issuer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteNetwork {
    n: usize,
    block_of: Vec<usize>,
    adjacency: Vec<u8>,
    in_degrees: Vec<usize>,
}

impl FiniteNetwork {
    /// Build from an explicit adjacency (row-major); columns without holders
    /// receive a self-loop.
    pub fn from_adjacency(block_of: Vec<usize>, mut adjacency: Vec<u8>) -> Result<Self> {
        let n = block_of.len();
        if adjacency.len() != n * n {
            return Err(Error::Parameter(format!(
                "adjacency has {} entries, expected {}",
                adjacency.len(),
                n * n
            )));
        }
        let mut in_degrees = vec![0usize; n];
        for row in adjacency.chunks_exact(n) {
            for (d, &a) in in_degrees.iter_mut().zip(row) {
                *d += a as usize;
            }
        }
        for j in 0..n {
            if in_degrees[j] == 0 {
                adjacency[j * n + j] = 1;
                in_degrees[j] = 1;
            }
        }
        Ok(Self {
            n,
            block_of,
            adjacency,
            in_degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn labels(&self) -> Vec<f64> {
        firm_labels(self.n)
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j] != 0
    }

    pub fn adjacency(&self) -> &[u8] {
        &self.adjacency
    }

    pub fn in_degrees(&self) -> &[usize] {
        &self.in_degrees
    }

    /// Edge density between blocks `k` (holders) and `l` (issuers).
    pub fn block_density(&self, k: usize, l: usize) -> f64 {
        let mut edges = 0usize;
        let mut pairs = 0usize;
        for i in (0..self.n).filter(|&i| self.block_of[i] == k) {
            for j in (0..self.n).filter(|&j| self.block_of[j] == l) {
                pairs += 1;
                edges += self.adjacency[i * self.n + j] as usize;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            edges as f64 / pairs as f64
        }
    }
}

/// Draw a stochastic-block-model network of `n` firms.
pub fn sample_sbm(spec: &BlockSpec, n: usize, seed: u64) -> Result<FiniteNetwork> {
    if n < spec.m().max(2) {
        return Err(Error::Parameter(format!(
            "need at least max(m, 2) = {} firms, got {n}",
            spec.m().max(2)
        )));
    }
    let block_of = assign_blocks(spec, n);
    let mut adjacency = vec![0u8; n * n];
    adjacency
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let k = block_of[i];
            for (j, a) in row.iter_mut().enumerate() {
                let u: f64 = rng.gen();
                *a = u8::from(u < spec.link(k, block_of[j]));
            }
        });
    FiniteNetwork::from_adjacency(block_of, adjacency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::spec::Block;

    fn single(g: f64) -> BlockSpec {
        BlockSpec::new_for_sampling(
            vec![Block {
                size: 1.0,
                endow_lo: 0.5,
                endow_hi: 1.5,
            }],
            vec![vec![g]],
            0.5,
            0.4,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn probability_one_gives_complete_digraph() {
        let net = sample_sbm(&single(1.0), 4, 11).unwrap();
        assert!(net.adjacency().iter().all(|&a| a == 1));
        assert_eq!(net.in_degrees(), &[4, 4, 4, 4]);
    }

    #[test]
    fn probability_zero_gives_repaired_identity() {
        let net = sample_sbm(&single(0.0), 3, 11).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(net.edge(i, j), i == j);
            }
        }
        assert_eq!(net.in_degrees(), &[1, 1, 1]);
    }

    #[test]
    fn repair_only_touches_empty_columns() {
        let adj = vec![0, 1, 0, 0];
        let net = FiniteNetwork::from_adjacency(vec![0, 0], adj).unwrap();
        assert!(net.edge(0, 0));
        assert!(!net.edge(1, 1));
        assert_eq!(net.in_degrees(), &[1, 1]);
    }

    #[test]
    fn labels_and_blocks() {
        assert_eq!(firm_labels(3), vec![0.0, 0.5, 1.0]);
        let spec = BlockSpec::new(
            vec![
                Block {
                    size: 0.5,
                    endow_lo: 0.0,
                    endow_hi: 1.0,
                },
                Block {
                    size: 0.5,
                    endow_lo: 2.0,
                    endow_hi: 3.0,
                },
            ],
            vec![vec![1.0; 2]; 2],
            0.5,
            0.4,
            1.0,
        )
        .unwrap();
        assert_eq!(assign_blocks(&spec, 5), vec![0, 0, 0, 1, 1]);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = single(0.5);
        let a = sample_sbm(&spec, 50, 3).unwrap();
        let b = sample_sbm(&spec, 50, 3).unwrap();
        let c = sample_sbm(&spec, 50, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_too_few_firms() {
        assert!(sample_sbm(&single(0.5), 1, 0).is_err());
    }
}
