//! The block equity graphon: the continuum limit of the stochastic block
//! model with kernel `T_{kl} = c g_{kl} / ψ_l` on block intervals of length
//! `s_k`.
//!
//! For a cutoff vector `ξ` (firms of block `k` below `ξ_k` insolvent), the
//! putative values are `v_x = e_k(x) + A_k − β·1[x < ξ_k]` with block
//! constants `A = (I − TD)⁻¹ T w` and `w_k = ∫_{T_k} e − β (ξ_k − t_{k−1})`.

pub mod profile;
pub mod swap;

use nalgebra::DMatrix;

pub use profile::{EndowmentProfile, Segment};
pub use swap::{fixed_point_residual, swap_construct, SwapKind, SwappedValues, ValueField};

use crate::error::{Error, Result};
use crate::linalg::perron_radius;
use crate::model::BlockSpec;
use crate::Side;

pub const CUTOFF_TOL: f64 = 1e-12;
pub const CUTOFF_MAX_ITER: usize = 100_000;
pub const RHO_TOL: f64 = 1e-12;
/// Ties count as solvent; a jump in the endowment profile that lands within
/// this (relative) distance of the threshold is treated as a tie.
pub const TIE_TOL: f64 = 1e-12;
/// Slack allowed in the cutoff feasibility check.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockGraphon {
    spec: BlockSpec,
    cross_shares: DMatrix<f64>,
    sizes: Vec<f64>,
    profiles: Vec<EndowmentProfile>,
    /// `(I − TD)⁻¹ T`.
    propagation: DMatrix<f64>,
}

/// Build the graphon of a validated spec, with its linear endowment ramps.
pub fn build_graphon(spec: &BlockSpec) -> Result<BlockGraphon> {
    let m = spec.m();
    if let Some(l) = (0..m).find(|&l| !(spec.psi(l) > 0.0)) {
        return Err(Error::Parameter(format!(
            "block {l} has no holders (all link probabilities into it are zero)"
        )));
    }
    let cross_shares =
        DMatrix::from_fn(m, m, |k, l| spec.exposure() * spec.link(k, l) / spec.psi(l));
    let sizes: Vec<f64> = (0..m).map(|k| spec.size(k)).collect();
    let profiles = (0..m)
        .map(|k| {
            let (lo, hi) = spec.interval(k);
            EndowmentProfile::linear(lo, hi, spec.endow_lo(k), spec.endow_hi(k))
        })
        .collect();
    let td = DMatrix::from_fn(m, m, |k, l| cross_shares[(k, l)] * sizes[l]);
    let inv = (DMatrix::<f64>::identity(m, m) - td)
        .try_inverse()
        .expect("I - TD is invertible when 0 < c < 1");
    let propagation = inv * &cross_shares;
    Ok(BlockGraphon {
        spec: spec.clone(),
        cross_shares,
        sizes,
        profiles,
        propagation,
    })
}

impl BlockGraphon {
    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    /// `T`.
    pub fn cross_shares(&self) -> &DMatrix<f64> {
        &self.cross_shares
    }

    /// `D = diag(s_k)`.
    pub fn block_lengths(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.sizes))
    }

    /// `(I − TD)⁻¹ T`.
    pub fn propagation(&self) -> &DMatrix<f64> {
        &self.propagation
    }

    pub fn interval(&self, k: usize) -> (f64, f64) {
        self.spec.interval(k)
    }

    pub fn profile(&self, k: usize) -> &EndowmentProfile {
        &self.profiles[k]
    }

    pub fn profiles(&self) -> &[EndowmentProfile] {
        &self.profiles
    }

    pub fn threshold(&self) -> f64 {
        self.spec.threshold()
    }

    pub fn failure_cost(&self) -> f64 {
        self.spec.failure_cost()
    }

    pub fn block_of(&self, x: f64) -> usize {
        self.spec.block_of_label(x)
    }

    /// Same network with different endowment profiles (e.g. after a cash
    /// infusion).
    pub fn with_profiles(&self, profiles: Vec<EndowmentProfile>) -> Result<Self> {
        if profiles.len() != self.m() {
            return Err(Error::Parameter(format!(
                "{} profiles for {} blocks",
                profiles.len(),
                self.m()
            )));
        }
        for (k, p) in profiles.iter().enumerate() {
            let (lo, hi) = self.interval(k);
            if p.lo() != lo || p.hi() != hi {
                return Err(Error::Parameter(format!(
                    "profile {k} spans [{}, {}], block is [{lo}, {hi}]",
                    p.lo(),
                    p.hi()
                )));
            }
        }
        Ok(Self {
            profiles,
            ..self.clone()
        })
    }

    fn block_mass(&self, cutoffs: &[f64]) -> Vec<f64> {
        (0..self.m())
            .map(|k| {
                let (lo, _) = self.interval(k);
                self.profiles[k].integral() - self.failure_cost() * (cutoffs[k] - lo)
            })
            .collect()
    }

    /// Block constants `A(ξ) = (I − TD)⁻¹ T w(ξ)`.
    pub fn block_constants(&self, cutoffs: &[f64]) -> Vec<f64> {
        let w = nalgebra::DVector::from_vec(self.block_mass(cutoffs));
        (&self.propagation * w).iter().copied().collect()
    }

    /// Block constants by Picard iteration `A ← T (w + D A)` instead of the
    /// precomputed inverse. Contracts at rate `c`.
    pub fn block_constants_picard(&self, cutoffs: &[f64]) -> Vec<f64> {
        let m = self.m();
        let w = self.block_mass(cutoffs);
        let mut a = vec![0.0; m];
        for _ in 0..100_000 {
            let next: Vec<f64> = (0..m)
                .map(|k| {
                    (0..m)
                        .map(|l| self.cross_shares[(k, l)] * (w[l] + self.sizes[l] * a[l]))
                        .sum()
                })
                .collect();
            let change = next
                .iter()
                .zip(&a)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            a = next;
            if change <= 1e-15 * (1.0 + a.iter().fold(0.0f64, |s, v| s.max(v.abs()))) {
                break;
            }
        }
        a
    }

    /// Solvent measure `Σ_k (t_k − x_k)`.
    pub fn solvent_measure(&self, cutoffs: &CutoffVector) -> f64 {
        (0..self.m())
            .map(|k| self.interval(k).1 - cutoffs.x[k])
            .sum()
    }
}

/// Per-block cutoffs, clamped to the block intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffVector {
    pub x: Vec<f64>,
    pub interior: Vec<bool>,
}

impl CutoffVector {
    pub fn new(graphon: &BlockGraphon, raw: &[f64]) -> Result<Self> {
        if raw.len() != graphon.m() {
            return Err(Error::Parameter(format!(
                "{} cutoffs for {} blocks",
                raw.len(),
                graphon.m()
            )));
        }
        let x: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = graphon.interval(k);
                v.clamp(lo, hi)
            })
            .collect();
        let interior = x
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = graphon.interval(k);
                lo < v && v < hi
            })
            .collect();
        Ok(Self { x, interior })
    }

    pub fn all_interior(&self) -> bool {
        self.interior.iter().all(|&b| b)
    }
}

/// Putative values for a cutoff vector.
#[derive(Debug, Clone)]
pub struct BlockValues<'g> {
    graphon: &'g BlockGraphon,
    cutoffs: Vec<f64>,
    constants: Vec<f64>,
}

impl<'g> BlockValues<'g> {
    /// `A_k`.
    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    pub fn graphon(&self) -> &'g BlockGraphon {
        self.graphon
    }

    /// `v(κ(·; ξ))_x`.
    pub fn value_at(&self, x: f64) -> f64 {
        let k = self.graphon.block_of(x);
        let penalty = if x < self.cutoffs[k] {
            self.graphon.failure_cost()
        } else {
            0.0
        };
        self.graphon.profile(k).eval(x) + self.constants[k] - penalty
    }

    /// Value a firm at `x` would have if labeled solvent.
    pub fn solvent_value_at(&self, x: f64) -> f64 {
        let k = self.graphon.block_of(x);
        self.graphon.profile(k).eval(x) + self.constants[k]
    }
}

pub fn putative_block_values<'g>(
    graphon: &'g BlockGraphon,
    cutoffs: &CutoffVector,
) -> BlockValues<'g> {
    BlockValues {
        graphon,
        cutoffs: cutoffs.x.clone(),
        constants: graphon.block_constants(&cutoffs.x),
    }
}

fn side_target(graphon: &BlockGraphon, side: Side) -> f64 {
    match side {
        Side::Maximal => graphon.threshold(),
        Side::Minimal => graphon.threshold() + graphon.failure_cost(),
    }
}

/// Extremal cutoff equilibrium by monotone iteration on the cutoffs.
///
/// Maximal: start from all-solvent (`x_k = t_{k−1}`) and move up towards the
/// least fixed point of `x ↦ e⁻¹(v* − A(x))`. Minimal: start all-insolvent
/// and move down towards the greatest fixed point of `x ↦ e⁻¹(v* + β − A(x))`.
pub fn solve_extremal_cutoffs(graphon: &BlockGraphon, side: Side) -> Result<CutoffVector> {
    let m = graphon.m();
    let target = side_target(graphon, side);
    let tol = TIE_TOL * (1.0 + target.abs());
    let mut x: Vec<f64> = (0..m)
        .map(|k| {
            let (lo, hi) = graphon.interval(k);
            match side {
                Side::Maximal => lo,
                Side::Minimal => hi,
            }
        })
        .collect();
    let mut prev_change = f64::NAN;
    let mut change = f64::NAN;
    for _ in 0..CUTOFF_MAX_ITER {
        let a = graphon.block_constants(&x);
        let next: Vec<f64> = (0..m)
            .map(|k| graphon.profile(k).lower_inverse_tol(target - a[k], tol))
            .collect();
        prev_change = change;
        change = next
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        x = next;
        if change < CUTOFF_TOL {
            return CutoffVector::new(graphon, &x);
        }
    }
    Err(Error::NonConvergence {
        what: "cutoff iteration",
        iterations: CUTOFF_MAX_ITER,
        // last step size; the contraction estimate is change / prev_change
        residual: if prev_change > 0.0 {
            change / prev_change
        } else {
            change
        },
    })
}

/// Residual of the interior cutoff conditions `e_k(x_k) + A_k(x) = v*`
/// (maximal) or `v* + β` (minimal); `None` for boundary blocks.
pub fn cutoff_residuals(
    graphon: &BlockGraphon,
    cutoffs: &CutoffVector,
    side: Side,
) -> Vec<Option<f64>> {
    let target = side_target(graphon, side);
    let a = graphon.block_constants(&cutoffs.x);
    (0..graphon.m())
        .map(|k| cutoffs.interior[k].then(|| graphon.profile(k).eval(cutoffs.x[k]) + a[k] - target))
        .collect()
}

/// Whether the cutoff labeling `κ(·; ξ)` is feasible, i.e. an equilibrium.
pub fn is_feasible_cutoff(graphon: &BlockGraphon, cutoffs: &CutoffVector) -> bool {
    let a = graphon.block_constants(&cutoffs.x);
    let v_star = graphon.threshold();
    let beta = graphon.failure_cost();
    (0..graphon.m()).all(|k| {
        let (lo, hi) = graphon.interval(k);
        let p = graphon.profile(k);
        let xi = cutoffs.x[k];
        let solvent_ok = xi >= hi || p.eval(xi) + a[k] >= v_star - FEASIBILITY_TOL;
        // supremum of insolvent values approaches the left limit at ξ
        let left = if xi > lo {
            p.eval(xi - 1e-12 * (1.0 + xi.abs()))
        } else {
            f64::NEG_INFINITY
        };
        let insolvent_ok = xi <= lo || left + a[k] - beta <= v_star + FEASIBILITY_TOL;
        solvent_ok && insolvent_ok
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpilloverMatrix {
    pub b: DMatrix<f64>,
    pub rho: f64,
    pub stable: bool,
    /// Rows whose cutoff sits on a block boundary, where the formula is only
    /// a formal extension.
    pub boundary_rows: Vec<bool>,
}

/// `B_{kk'} = [(I − TD)⁻¹ T]_{kk'} β / e_k'(x_k)`.
pub fn spillover_matrix(graphon: &BlockGraphon, cutoffs: &CutoffVector) -> Result<SpilloverMatrix> {
    let m = graphon.m();
    let beta = graphon.failure_cost();
    let mut slopes = Vec::with_capacity(m);
    for k in 0..m {
        let slope = graphon.profile(k).slope_at(cutoffs.x[k]);
        if !(slope > 0.0) {
            return Err(Error::Parameter(format!(
                "endowment of block {k} is flat at its cutoff"
            )));
        }
        slopes.push(slope);
    }
    let b = DMatrix::from_fn(m, m, |k, l| {
        graphon.propagation()[(k, l)] * beta / slopes[k]
    });
    let rho = perron_radius(&b, RHO_TOL, 1_000_000)?;
    Ok(SpilloverMatrix {
        stable: rho < 1.0,
        rho,
        b,
        boundary_rows: cutoffs.interior.iter().map(|&i| !i).collect(),
    })
}

/// Finite-difference spillover rates.
///
/// Maximal side: raise cutoff `l` by `t` and measure the block-`k` firms at
/// or above `x_k` whose solvent-labeled value falls below `v*`. Minimal side:
/// lower cutoff `l` by `t` and measure the block-`k` firms below `x_k` whose
/// insolvent-labeled value reaches `v*`. Block constants come from Picard
/// iteration, independently of the closed-form propagation matrix.
pub fn measured_spillover(
    graphon: &BlockGraphon,
    cutoffs: &CutoffVector,
    side: Side,
    t: f64,
) -> DMatrix<f64> {
    let m = graphon.m();
    let v_star = graphon.threshold();
    let beta = graphon.failure_cost();
    let mut out = DMatrix::zeros(m, m);
    for l in 0..m {
        let mut perturbed = cutoffs.x.clone();
        match side {
            Side::Maximal => perturbed[l] += t,
            Side::Minimal => perturbed[l] -= t,
        }
        let a = graphon.block_constants_picard(&perturbed);
        for k in 0..m {
            let p = graphon.profile(k);
            let xk = cutoffs.x[k];
            let measure = match side {
                Side::Maximal => (p.lower_inverse(v_star - a[k]) - xk).max(0.0),
                Side::Minimal => (xk - p.lower_inverse(v_star + beta - a[k])).max(0.0),
            };
            out[(k, l)] = measure / t;
        }
    }
    out
}
