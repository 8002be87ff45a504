//! Model parameterization: block layout, link probabilities, exposure,
//! failure cost, solvency threshold and the per-block linear endowment ramps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Tolerance on `Σ s_k = 1`.
pub const SIZE_SUM_TOL: f64 = 1e-9;

/// One block of firms as it appears in a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub size: f64,
    pub endow_lo: f64,
    pub endow_hi: f64,
}

/// On-disk layout of a model spec (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub blocks: Vec<Block>,
    /// Row-major `m × m`; entry `[k][l]` is the probability of an edge from a
    /// type-`k` firm (holder) to a type-`l` firm (issuer).
    pub link_probs: Vec<Vec<f64>>,
    pub exposure: f64,
    pub failure_cost: f64,
    pub threshold: f64,
}

/// Validated model parameters together with the derived block quantities
/// (`t_k`, slopes, means and column masses `ψ_l`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct BlockSpec {
    blocks: Vec<Block>,
    link: Vec<f64>,
    exposure: f64,
    failure_cost: f64,
    threshold: f64,
    cum: Vec<f64>,
    psi: Vec<f64>,
}

impl TryFrom<SpecFile> for BlockSpec {
    type Error = Error;

    fn try_from(file: SpecFile) -> Result<Self> {
        BlockSpec::new(
            file.blocks,
            file.link_probs,
            file.exposure,
            file.failure_cost,
            file.threshold,
        )
    }
}

impl From<BlockSpec> for SpecFile {
    fn from(spec: BlockSpec) -> Self {
        let m = spec.m();
        SpecFile {
            link_probs: (0..m)
                .map(|k| spec.link[k * m..(k + 1) * m].to_vec())
                .collect(),
            blocks: spec.blocks,
            exposure: spec.exposure,
            failure_cost: spec.failure_cost,
            threshold: spec.threshold,
        }
    }
}

impl BlockSpec {
    pub fn new(
        blocks: Vec<Block>,
        link_probs: Vec<Vec<f64>>,
        exposure: f64,
        failure_cost: f64,
        threshold: f64,
    ) -> Result<Self> {
        Self::build(blocks, link_probs, exposure, failure_cost, threshold, true)
    }

    /// Like [`BlockSpec::new`] but allows columns of `link_probs` without a
    /// positive entry. Such a spec can be sampled (the in-degree repair gives
    /// isolated columns a self-loop) but has no graphon or block-regular
    /// matrix.
    pub fn new_for_sampling(
        blocks: Vec<Block>,
        link_probs: Vec<Vec<f64>>,
        exposure: f64,
        failure_cost: f64,
        threshold: f64,
    ) -> Result<Self> {
        Self::build(blocks, link_probs, exposure, failure_cost, threshold, false)
    }

    fn build(
        blocks: Vec<Block>,
        link_probs: Vec<Vec<f64>>,
        exposure: f64,
        failure_cost: f64,
        threshold: f64,
        require_columns: bool,
    ) -> Result<Self> {
        let violations = validate(
            &blocks,
            &link_probs,
            exposure,
            failure_cost,
            threshold,
            require_columns,
        );
        if !violations.is_empty() {
            return Err(Error::InvalidSpec(violations));
        }
        let m = blocks.len();
        let link: Vec<f64> = link_probs.into_iter().flatten().collect();

        let mut cum = Vec::with_capacity(m + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for b in &blocks {
            acc += b.size;
            cum.push(acc);
        }
        // Sizes sum to one within tolerance; pin the right end exactly.
        cum[m] = 1.0;

        let psi = (0..m)
            .map(|l| (0..m).map(|k| link[k * m + l] * blocks[k].size).sum())
            .collect();

        Ok(Self {
            blocks,
            link,
            exposure,
            failure_cost,
            threshold,
            cum,
            psi,
        })
    }

    /// Parse a TOML spec file body.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.try_into()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&SpecFile::from(self.clone())).expect("spec serializes")
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn size(&self, k: usize) -> f64 {
        self.blocks[k].size
    }

    pub fn link(&self, k: usize, l: usize) -> f64 {
        self.link[k * self.m() + l]
    }

    pub fn exposure(&self) -> f64 {
        self.exposure
    }

    pub fn failure_cost(&self) -> f64 {
        self.failure_cost
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Partial sum `t_k = s_1 + … + s_k`, with `t_0 = 0` and `t_m = 1`.
    pub fn t(&self, k: usize) -> f64 {
        self.cum[k]
    }

    /// Block `k` (0-based) occupies labels `(t_k, t_{k+1}]`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.cum[k], self.cum[k + 1])
    }

    pub fn endow_lo(&self, k: usize) -> f64 {
        self.blocks[k].endow_lo
    }

    pub fn endow_hi(&self, k: usize) -> f64 {
        self.blocks[k].endow_hi
    }

    pub fn slope(&self, k: usize) -> f64 {
        (self.blocks[k].endow_hi - self.blocks[k].endow_lo) / self.blocks[k].size
    }

    pub fn mean_endowment(&self, k: usize) -> f64 {
        0.5 * (self.blocks[k].endow_lo + self.blocks[k].endow_hi)
    }

    /// Column mass `ψ_l = Σ_k g_{kl} s_k`.
    pub fn psi(&self, l: usize) -> f64 {
        self.psi[l]
    }

    /// Smallest strictly positive link probability.
    pub fn min_positive_link(&self) -> f64 {
        self.link
            .iter()
            .copied()
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Linear endowment `f_k(x)` of block `k` at label `x`.
    pub fn endowment(&self, k: usize, x: f64) -> f64 {
        let (lo, _) = self.interval(k);
        self.blocks[k].endow_lo + self.slope(k) * (x - lo)
    }

    /// Block of label `x ∈ [0, 1]` under the half-open `(t_{k-1}, t_k]`
    /// convention; label 0 belongs to the first block.
    pub fn block_of_label(&self, x: f64) -> usize {
        let m = self.m();
        (0..m).find(|&k| x <= self.cum[k + 1]).unwrap_or(m - 1)
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        let mut file = SpecFile::from(self.clone());
        file.threshold = threshold;
        file.try_into()
    }

    pub fn with_failure_cost(&self, failure_cost: f64) -> Result<Self> {
        let mut file = SpecFile::from(self.clone());
        file.failure_cost = failure_cost;
        file.try_into()
    }

    pub fn with_exposure(&self, exposure: f64) -> Result<Self> {
        let mut file = SpecFile::from(self.clone());
        file.exposure = exposure;
        file.try_into()
    }
}

fn validate(
    blocks: &[Block],
    link_probs: &[Vec<f64>],
    exposure: f64,
    failure_cost: f64,
    threshold: f64,
    require_columns: bool,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = blocks.len();
    if m == 0 {
        out.push(Violation::new("blocks", "at least one block is required"));
    }

    for (k, b) in blocks.iter().enumerate() {
        if !(b.size.is_finite() && b.size > 0.0) {
            out.push(Violation::new(
                format!("blocks[{k}].size"),
                "block size must be positive",
            ));
        }
        if !(b.endow_lo.is_finite() && b.endow_hi.is_finite()) {
            out.push(Violation::new(
                format!("blocks[{k}].endow_hi"),
                "endowments must be finite",
            ));
        } else if b.endow_hi <= b.endow_lo {
            out.push(Violation::new(
                format!("blocks[{k}].endow_hi"),
                "endow_hi must exceed endow_lo",
            ));
        }
    }
    let total: f64 = blocks.iter().map(|b| b.size).sum();
    if m > 0 && (total - 1.0).abs() > SIZE_SUM_TOL {
        out.push(Violation::new(
            "blocks[].size",
            format!("block sizes must sum to 1 (got {total})"),
        ));
    }

    if !(exposure.is_finite() && exposure > 0.0 && exposure < 1.0) {
        out.push(Violation::new("exposure", "exposure must lie in (0,1)"));
    }
    if !(failure_cost.is_finite() && failure_cost > 0.0) {
        out.push(Violation::new(
            "failure_cost",
            "failure_cost must be positive",
        ));
    }
    if !threshold.is_finite() {
        out.push(Violation::new("threshold", "threshold must be finite"));
    }

    if link_probs.len() != m || link_probs.iter().any(|row| row.len() != m) {
        out.push(Violation::new(
            "link_probs",
            format!("link_probs must be a {m}x{m} matrix"),
        ));
        return out;
    }
    for (k, row) in link_probs.iter().enumerate() {
        for (l, &g) in row.iter().enumerate() {
            if !(g.is_finite() && (0.0..=1.0).contains(&g)) {
                out.push(Violation::new(
                    format!("link_probs[{k}][{l}]"),
                    "link probability must lie in [0,1]",
                ));
            }
        }
    }
    for l in (0..m).filter(|_| require_columns) {
        if link_probs.iter().all(|row| !(row[l] > 0.0)) {
            out.push(Violation::new(
                format!("link_probs[][{l}]"),
                "every column needs a positive link probability",
            ));
        }
    }
    out
}
