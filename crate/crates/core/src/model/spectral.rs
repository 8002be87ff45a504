use super::holdings::HoldingsMatrix;
use super::spec::BlockSpec;
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const NORM_REL_TOL: f64 = 1e-9;
pub const NORM_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDeviation {
    /// `‖C − C̄‖₂`.
    pub lambda_norm: f64,
    /// `√(1 / (p n^α))` with `p` the smallest positive link probability.
    pub bound: f64,
    pub iterations: usize,
}

impl SpectralDeviation {
    pub fn within_bound(&self) -> bool {
        self.lambda_norm <= self.bound
    }
}

/// Spectral norm of the deviation between a sampled holdings matrix and its
/// block-regular counterpart, alongside the concentration bound.
pub fn spectral_deviation(
    sampled: &HoldingsMatrix,
    regular: &HoldingsMatrix,
    spec: &BlockSpec,
    alpha: f64,
    seed: u64,
) -> Result<SpectralDeviation> {
    if sampled.n() != regular.n() {
        return Err(Error::Parameter(format!(
            "dimension mismatch: {} vs {}",
            sampled.n(),
            regular.n()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter("alpha must lie in (0,1)".into()));
    }
    let lambda = sampled.entries() - regular.entries();
    let (lambda_norm, iterations) = spectral_norm(&lambda, NORM_REL_TOL, NORM_MAX_ITER, seed)?;
    let n = sampled.n() as f64;
    let p = spec.min_positive_link();
    Ok(SpectralDeviation {
        lambda_norm,
        bound: (1.0 / (p * n.powf(alpha))).sqrt(),
        iterations,
    })
}
