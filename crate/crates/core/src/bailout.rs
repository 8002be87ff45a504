//! Budget-constrained cash infusions on the block graphon.
//!
//! With linear endowments the optimal infusion tops up an interval of
//! measure `y_k` just left of the shifted cutoff `x_k* − δ_k` to the plateau
//! `ê_k = f_k(x_k* − δ_k)`. The `y_k` equalise `(β/(a_k y_k) + 1) c_k`
//! across blocks, `c_k` being Katz–Bonacich centralities of the spillover
//! matrix, subject to `½ Σ a_k y_k² = K`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphon::{
    solve_extremal_cutoffs, spillover_matrix, BlockGraphon, CutoffVector, EndowmentProfile,
    SpilloverMatrix,
};
use crate::model::{firm_labels, BlockSpec};
use crate::Side;

pub const BUDGET_REL_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 400;
const PLACEMENT_TOL: f64 = 1e-13;
const PLACEMENT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockInfusion {
    /// Pre-infusion maximal cutoff.
    pub x_star: f64,
    /// Measure of directly rescued firms.
    pub y: f64,
    /// Measure of firms rescued through spillovers.
    pub delta: f64,
    /// Endowment plateau on the support.
    pub e_hat: f64,
    pub support_lo: f64,
    pub support_hi: f64,
}

impl BlockInfusion {
    /// Cash spent in this block, `½ a y²` for a linear ramp.
    pub fn spend(&self, slope: f64) -> f64 {
        0.5 * slope * self.y * self.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfusionPlan {
    pub blocks: Vec<BlockInfusion>,
    /// Common value of `(β/(a_k y_k) + 1) c_k`; infinite for a zero budget.
    pub lambda_star: f64,
    pub budget: f64,
    pub budget_used: f64,
    pub centralities: Vec<f64>,
}

impl InfusionPlan {
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Plateau-infused endowment profiles.
    pub fn infused_profiles(&self, graphon: &BlockGraphon) -> Result<Vec<EndowmentProfile>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                graphon
                    .profile(k)
                    .with_plateau(b.support_lo, b.support_hi, b.e_hat)
            })
            .collect()
    }

    /// `ι(x)`: plateau level minus endowment on the support, zero elsewhere.
    pub fn infusion_at(&self, graphon: &BlockGraphon, x: f64) -> f64 {
        let k = graphon.block_of(x);
        let b = &self.blocks[k];
        if b.support_lo <= x && x < b.support_hi {
            (b.e_hat - graphon.profile(k).eval(x)).max(0.0)
        } else {
            0.0
        }
    }
}

/// `c_k = 1ᵀ (I − B)⁻¹ E_k`.
pub fn katz_centrality(b: &SpilloverMatrix) -> Result<Vec<f64>> {
    if !b.stable {
        return Err(Error::Unstable { rho: b.rho });
    }
    let m = b.b.nrows();
    let lhs = (DMatrix::<f64>::identity(m, m) - &b.b).transpose();
    let sol = lhs
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .ok_or_else(|| Error::Internal("I - B is singular".into()))?;
    Ok(sol.iter().copied().collect())
}

fn y_of_lambda(lambda: f64, beta: f64, slopes: &[f64], centralities: &[f64]) -> Vec<f64> {
    slopes
        .iter()
        .zip(centralities)
        .map(|(&a, &c)| beta / (a * (lambda / c - 1.0)))
        .collect()
}

fn spend(slopes: &[f64], y: &[f64]) -> f64 {
    0.5 * slopes.iter().zip(y).map(|(a, y)| a * y * y).sum::<f64>()
}

fn block_slopes(graphon: &BlockGraphon, cutoffs: &CutoffVector) -> Vec<f64> {
    (0..graphon.m())
        .map(|k| graphon.profile(k).slope_at(cutoffs.x[k]))
        .collect()
}

fn require_interior(cutoffs: CutoffVector) -> Result<CutoffVector> {
    if let Some(k) = cutoffs.interior.iter().position(|&i| !i) {
        return Err(Error::NonInterior {
            block: k,
            detail: format!(
                "pre-infusion cutoff {} is on the block boundary",
                cutoffs.x[k]
            ),
        });
    }
    Ok(cutoffs)
}

/// Optimal plan for budget `K` at the maximal equilibrium.
pub fn optimal_infusion(graphon: &BlockGraphon, budget: f64) -> Result<InfusionPlan> {
    if !(budget.is_finite() && budget >= 0.0) {
        return Err(Error::Parameter(format!(
            "budget {budget} must be non-negative"
        )));
    }
    let m = graphon.m();
    let beta = graphon.failure_cost();
    // Stability first: with ρ(B) ≥ 1 the maximal cutoffs sit on the block
    // boundary anyway.
    let cutoffs = solve_extremal_cutoffs(graphon, Side::Maximal)?;
    let spill = spillover_matrix(graphon, &cutoffs)?;
    let centralities = katz_centrality(&spill)?;
    let cutoffs = require_interior(cutoffs)?;
    let slopes = block_slopes(graphon, &cutoffs);

    let (lambda_star, y) = if budget == 0.0 {
        (f64::INFINITY, vec![0.0; m])
    } else {
        let c_max = centralities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut lo = c_max * (1.0 + 1e-12);
        let mut hi = 2.0 * c_max;
        let budget_at = |l: f64| spend(&slopes, &y_of_lambda(l, beta, &slopes, &centralities));
        let mut doublings = 0;
        while budget_at(hi) > budget {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 2000 {
                return Err(Error::NonConvergence {
                    what: "budget bracket",
                    iterations: doublings,
                    residual: budget_at(hi) - budget,
                });
            }
        }
        if budget_at(lo) < budget {
            return Err(Error::NonInterior {
                block: 0,
                detail: format!("budget {budget} exceeds what the centrality bracket can spend"),
            });
        }
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if budget_at(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= BUDGET_REL_TOL * 1e-3 * hi {
                break;
            }
        }
        let lambda = 0.5 * (lo + hi);
        (lambda, y_of_lambda(lambda, beta, &slopes, &centralities))
    };

    let z = DVector::from_iterator(
        m,
        (0..m).map(|k| y[k] + slopes[k] * y[k] * y[k] / (2.0 * beta)),
    );
    let ib = DMatrix::<f64>::identity(m, m) - &spill.b;
    let delta = ib
        .lu()
        .solve(&(&spill.b * z))
        .ok_or_else(|| Error::Internal("I - B is singular".into()))?;

    let mut blocks = Vec::with_capacity(m);
    for k in 0..m {
        let (t0, t1) = graphon.interval(k);
        let x = cutoffs.x[k];
        let d = delta[k].max(0.0);
        let hi = x - d;
        let lo = hi - y[k];
        if y[k] > 0.0 && !(t0 < lo && hi < t1) {
            return Err(Error::NonInterior {
                block: k,
                detail: format!("support [{lo}, {hi}] leaves block ({t0}, {t1})"),
            });
        }
        blocks.push(BlockInfusion {
            x_star: x,
            y: y[k],
            delta: d,
            e_hat: graphon.profile(k).eval(hi),
            support_lo: lo,
            support_hi: hi,
        });
    }
    Ok(InfusionPlan {
        budget_used: spend(&slopes, &y),
        blocks,
        lambda_star,
        budget,
        centralities,
    })
}

/// Closed-form single-block plan `(y, δ)` for slope `a`.
pub fn single_block_plan(slope: f64, exposure: f64, beta: f64, budget: f64) -> Result<(f64, f64)> {
    if !(slope > 0.0 && exposure > 0.0 && exposure < 1.0 && beta > 0.0 && budget >= 0.0) {
        return Err(Error::Parameter(
            "need a > 0, 0 < c < 1, β > 0 and K ≥ 0".into(),
        ));
    }
    let b = exposure / (1.0 - exposure) * beta / slope;
    if b >= 1.0 {
        return Err(Error::Unstable { rho: b });
    }
    if 2.0 * budget / slope > 1.0 {
        return Err(Error::Parameter(format!(
            "budget {budget} rescues more than the whole block (2K/a > 1)"
        )));
    }
    let y = (2.0 * budget / slope).sqrt();
    Ok((y, b / (1.0 - b) * (y + budget / beta)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorePeriphery {
    pub b: DMatrix<f64>,
    /// Right-hand side of the two-block centrality indifference condition.
    pub ratio_rhs: f64,
    /// `δ₁/δ₂`, only defined for equal slopes.
    pub delta_ratio: Option<f64>,
}

/// Displayed closed forms for a two-block core-periphery network with
/// `g₂₂ = 0` and equal halves.
pub fn core_periphery_analytics(
    a1: f64,
    a2: f64,
    exposure: f64,
    beta: f64,
    g11: f64,
    g21: f64,
) -> Result<CorePeriphery> {
    if !(a1 > 0.0 && a2 > 0.0 && exposure > 0.0 && exposure < 1.0 && beta > 0.0) {
        return Err(Error::Parameter(
            "need positive slopes, β and c in (0,1)".into(),
        ));
    }
    if !(g11 >= 0.0 && g21 >= 0.0 && g11 + g21 > 0.0) {
        return Err(Error::Parameter("core column needs a positive link".into()));
    }
    let c = exposure;
    let s = g11 + g21 + c * g21;
    let pre = c * beta / ((1.0 - c) * s);
    let b = DMatrix::from_row_slice(
        2,
        2,
        &[
            pre * (c * g21 + g11) / a1,
            pre * (g11 + g21) / a1,
            pre * g21 / a2,
            pre * c * g21 / a2,
        ],
    );
    let ratio_rhs = (a1 * a2 * s + a2 * c * beta * g21) / (a1 * a2 * s + a1 * c * beta * g21);
    let delta_ratio = (a1 == a2).then(|| {
        let a = a1;
        1.0 + 2.0 * a * g11 / ((a * (1.0 + c) + beta * c) * g21)
    });
    Ok(CorePeriphery {
        b,
        ratio_rhs,
        delta_ratio,
    })
}

/// Recompute the maximal cutoffs after the plan's plateau infusions.
pub fn apply_infusion(graphon: &BlockGraphon, plan: &InfusionPlan) -> Result<CutoffVector> {
    if plan.m() != graphon.m() {
        return Err(Error::Parameter(format!(
            "plan has {} blocks, graphon {}",
            plan.m(),
            graphon.m()
        )));
    }
    let infused = graphon.with_profiles(plan.infused_profiles(graphon)?)?;
    solve_extremal_cutoffs(&infused, Side::Maximal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridInfusion {
    pub y: Vec<f64>,
    /// Left ends of the plateaus, i.e. the implied post-infusion cutoffs.
    pub plateau_lo: Vec<f64>,
    pub solvent_measure: f64,
    pub candidates: usize,
}

/// Place plateaus of widths `y` so that their left ends are the
/// post-infusion cutoffs, by iterating
/// `x'_k ← f_k⁻¹(v* − A'_k(x')) − y_k` where `A'` uses the infused
/// endowments and cutoffs `x'`.
fn place_plateaus(graphon: &BlockGraphon, x_star: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let m = graphon.m();
    let v_star = graphon.threshold();
    let clamp = |k: usize, v: f64| {
        let (t0, t1) = graphon.interval(k);
        v.clamp(t0, (t1 - y[k]).max(t0))
    };
    let mut x: Vec<f64> = (0..m).map(|k| clamp(k, x_star[k] - y[k])).collect();
    for _ in 0..PLACEMENT_MAX_ITER {
        let profiles = (0..m)
            .map(|k| {
                let hi = (x[k] + y[k]).min(graphon.interval(k).1);
                graphon
                    .profile(k)
                    .with_plateau(x[k], hi, graphon.profile(k).eval(hi))
            })
            .collect::<Result<Vec<_>>>()?;
        let infused = graphon.with_profiles(profiles)?;
        let a = infused.block_constants(&x);
        let next: Vec<f64> = (0..m)
            .map(|k| clamp(k, graphon.profile(k).lower_inverse(v_star - a[k]) - y[k]))
            .collect();
        let change = next
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        x = next;
        if change < PLACEMENT_TOL {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "plateau placement",
        iterations: PLACEMENT_MAX_ITER,
        residual: f64::NAN,
    })
}

fn score_candidate(graphon: &BlockGraphon, x_star: &[f64], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let lo = place_plateaus(graphon, x_star, y)?;
    let profiles = (0..graphon.m())
        .map(|k| {
            let hi = (lo[k] + y[k]).min(graphon.interval(k).1);
            graphon
                .profile(k)
                .with_plateau(lo[k], hi, graphon.profile(k).eval(hi))
        })
        .collect::<Result<Vec<_>>>()?;
    let infused = graphon.with_profiles(profiles)?;
    let cut = solve_extremal_cutoffs(&infused, Side::Maximal)?;
    Ok((lo, infused.solvent_measure(&cut)))
}

fn budget_grid(slopes: &[f64], budget: f64, step: f64) -> Vec<Vec<f64>> {
    let m = slopes.len();
    let last = |prefix: &[f64]| -> Option<f64> {
        let rest = budget - spend(&slopes[..prefix.len()], prefix);
        (rest >= -1e-15).then(|| (2.0 * rest.max(0.0) / slopes[m - 1]).sqrt())
    };
    let axis = |k: usize| -> Vec<f64> {
        let top = (2.0 * budget / slopes[k]).sqrt();
        let count = (top / step).floor() as usize;
        (0..=count).map(|i| i as f64 * step).collect()
    };
    let mut prefixes: Vec<Vec<f64>> = vec![Vec::new()];
    for k in 0..m - 1 {
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| {
                axis(k).into_iter().filter_map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    (spend(&slopes[..q.len()], &q) <= budget + 1e-15).then_some(q)
                })
            })
            .collect();
    }
    prefixes
        .into_iter()
        .filter_map(|mut p| {
            let yl = last(&p)?;
            p.push(yl);
            Some(p)
        })
        .collect()
}

/// Exhaustive search over direct-rescue measures on the budget surface,
/// scoring each candidate by recomputing the maximal cutoffs of the infused
/// graphon. Ties go to the lexicographically smallest `y`.
pub fn brute_force_infusion(
    graphon: &BlockGraphon,
    budget: f64,
    grid_step: f64,
) -> Result<GridInfusion> {
    let m = graphon.m();
    if m > 3 {
        return Err(Error::Parameter(format!(
            "grid search supports m ≤ 3, got {m}"
        )));
    }
    if !(grid_step > 0.0) || !(budget >= 0.0) {
        return Err(Error::Parameter(
            "grid step must be positive and budget non-negative".into(),
        ));
    }
    let cutoffs = solve_extremal_cutoffs(graphon, Side::Maximal)?;
    let slopes = block_slopes(graphon, &cutoffs);
    let grid = budget_grid(&slopes, budget, grid_step);
    let scored: Vec<(Vec<f64>, Vec<f64>, f64)> = grid
        .into_par_iter()
        .map(|y| score_candidate(graphon, &cutoffs.x, &y).map(|(lo, s)| (y, lo, s)))
        .collect::<Result<Vec<_>>>()?;
    let candidates = scored.len();
    let best = scored
        .into_iter()
        .reduce(|best, cand| {
            let better = cand.2 > best.2
                || (cand.2 == best.2
                    && cand.0.partial_cmp(&best.0) == Some(std::cmp::Ordering::Less));
            if better {
                cand
            } else {
                best
            }
        })
        .ok_or_else(|| Error::Internal("empty grid".into()))?;
    Ok(GridInfusion {
        y: best.0,
        plateau_lo: best.1,
        solvent_measure: best.2,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInfusion {
    pub iota: Vec<f64>,
    pub total: f64,
    /// `total / n − K`: slack spent beyond the continuum budget per firm.
    pub epsilon_used: f64,
}

/// Lift a continuum plan to `n` firms at labels `i/(n−1)`.
///
/// Each block gets the strictly increasing majorant `g_k`: `f_k` left of the
/// support, `ê_k + ε_k (x − L)/(R − L)` on the support `[L, R)`, and
/// `f_k + ε_k` right of it, with `ε_k (y_k/2 + t_k − R) = ε s_k`. The tilt is
/// scaled down if the discretized total would exceed `n (K + ε)`.
pub fn lift_to_finite(
    plan: &InfusionPlan,
    spec: &BlockSpec,
    n: usize,
    epsilon: f64,
) -> Result<FiniteInfusion> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Parameter(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    if plan.m() != spec.m() {
        return Err(Error::Parameter(format!(
            "plan has {} blocks, spec {}",
            plan.m(),
            spec.m()
        )));
    }
    if n < 2 {
        return Err(Error::Parameter("need at least two firms".into()));
    }
    let tilts: Vec<f64> = plan
        .blocks
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let (_, t1) = spec.interval(k);
            let denom = 0.5 * b.y + (t1 - b.support_hi);
            if denom > 0.0 {
                epsilon * spec.size(k) / denom
            } else {
                0.0
            }
        })
        .collect();
    let labels = firm_labels(n);
    let mut plateau = vec![0.0; n];
    let mut tilt = vec![0.0; n];
    for (i, &x) in labels.iter().enumerate() {
        let k = spec.block_of_label(x);
        let b = &plan.blocks[k];
        let f = spec.endowment(k, x);
        if b.support_lo <= x && x < b.support_hi {
            plateau[i] = (b.e_hat - f).max(0.0);
            tilt[i] = tilts[k] * (x - b.support_lo) / (b.support_hi - b.support_lo);
        } else if x >= b.support_hi {
            tilt[i] = tilts[k];
        }
    }
    let cap = n as f64 * (plan.budget + epsilon);
    let p: f64 = plateau.iter().sum();
    let q: f64 = tilt.iter().sum();
    if p > cap {
        return Err(Error::Parameter(format!(
            "discretized plateau total {p} exceeds n (K + ε) = {cap}"
        )));
    }
    let theta = if q > 0.0 {
        ((cap - p) / q).min(1.0)
    } else {
        1.0
    };
    let iota: Vec<f64> = plateau
        .iter()
        .zip(&tilt)
        .map(|(a, b)| a + theta * b)
        .collect();
    let total: f64 = iota.iter().sum();
    Ok(FiniteInfusion {
        epsilon_used: total / n as f64 - plan.budget,
        iota,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::build_graphon;
    use crate::model::Block;

    fn running() -> BlockGraphon {
        let spec = BlockSpec::new(
            vec![Block {
                size: 1.0,
                endow_lo: 0.5,
                endow_hi: 1.5,
            }],
            vec![vec![0.7]],
            0.5,
            0.4,
            2.0,
        )
        .unwrap();
        build_graphon(&spec).unwrap()
    }

    #[test]
    fn zero_spillover_centrality_is_one() {
        let b = SpilloverMatrix {
            b: DMatrix::zeros(3, 3),
            rho: 0.0,
            stable: true,
            boundary_rows: vec![false; 3],
        };
        assert_eq!(katz_centrality(&b).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn scalar_centrality() {
        let b = SpilloverMatrix {
            b: DMatrix::from_element(1, 1, 0.4),
            rho: 0.4,
            stable: true,
            boundary_rows: vec![false],
        };
        assert!((katz_centrality(&b).unwrap()[0] - 1.0 / 0.6).abs() < 1e-14);
    }

    #[test]
    fn unstable_centrality_is_refused() {
        let b = SpilloverMatrix {
            b: DMatrix::from_element(1, 1, 1.2),
            rho: 1.2,
            stable: false,
            boundary_rows: vec![false],
        };
        assert!(matches!(katz_centrality(&b), Err(Error::Unstable { .. })));
    }

    #[test]
    fn running_plan() {
        let g = running();
        let plan = optimal_infusion(&g, 0.02).unwrap();
        let b = &plan.blocks[0];
        assert!((b.x_star - 5.0 / 6.0).abs() < 1e-10);
        assert!((b.y - 0.2).abs() < 1e-10);
        assert!((b.delta - 1.0 / 6.0).abs() < 1e-10);
        assert!((b.e_hat - 7.0 / 6.0).abs() < 1e-10);
        assert!((b.support_lo - 7.0 / 15.0).abs() < 1e-10);
        assert!((plan.lambda_star - 5.0).abs() < 1e-8);
        assert!((plan.budget_used - 0.02).abs() < 1e-12);
        let after = apply_infusion(&g, &plan).unwrap();
        assert!((after.x[0] - 7.0 / 15.0).abs() < 1e-8, "{after:?}");
    }

    #[test]
    fn closed_form_single_block() {
        let (y, d) = single_block_plan(1.0, 0.5, 0.4, 0.02).unwrap();
        assert!((y - 0.2).abs() < 1e-15);
        assert!((d - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(single_block_plan(1.0, 0.5, 0.4, 0.0).unwrap(), (0.0, 0.0));
        assert!(single_block_plan(1.0, 0.5, 0.4, 0.6).is_err());
        assert!(single_block_plan(0.1, 0.5, 0.4, 0.01).is_err());
    }

    #[test]
    fn zero_budget() {
        let g = running();
        let plan = optimal_infusion(&g, 0.0).unwrap();
        assert_eq!(plan.blocks[0].y, 0.0);
        assert_eq!(plan.blocks[0].delta, 0.0);
        let after = apply_infusion(&g, &plan).unwrap();
        assert!((after.x[0] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn core_periphery_closed_forms() {
        let cp = core_periphery_analytics(1.0, 1.0, 0.5, 0.4, 1.0, 1.0).unwrap();
        let want = [0.24, 0.32, 0.16, 0.08];
        for (got, w) in cp.b.transpose().iter().zip(want) {
            assert!((got - w).abs() < 1e-15);
        }
        assert!((cp.ratio_rhs - 1.0).abs() < 1e-15);
        assert!((cp.delta_ratio.unwrap() - (1.0 + 2.0 / 1.7)).abs() < 1e-14);
        let cp = core_periphery_analytics(1.0, 1.0, 0.5, 0.4, 0.0, 1.0).unwrap();
        assert_eq!(cp.delta_ratio, Some(1.0));
        let cp = core_periphery_analytics(1.0, 2.0, 0.5, 0.4, 1.0, 1.0).unwrap();
        assert_eq!(cp.delta_ratio, None);
    }

    #[test]
    fn grid_oracle_single_block() {
        let g = running();
        let best = brute_force_infusion(&g, 0.02, 1e-3).unwrap();
        assert_eq!(best.candidates, 1);
        assert!((best.y[0] - 0.2).abs() < 1e-12);
        assert!((best.plateau_lo[0] - 7.0 / 15.0).abs() < 1e-9);
        let zero = brute_force_infusion(&g, 0.0, 1e-3).unwrap();
        assert_eq!(zero.y, vec![0.0]);
    }

    #[test]
    fn lift_respects_budget() {
        let g = running();
        let plan = optimal_infusion(&g, 0.02).unwrap();
        let lift = lift_to_finite(&plan, g.spec(), 500, 0.01).unwrap();
        assert!(lift.iota.iter().all(|&v| v >= 0.0));
        assert!(lift.total <= 500.0 * 0.03 + 1e-9);
        assert!(lift.epsilon_used <= 0.01 + 1e-12);
        assert!(lift_to_finite(&plan, g.spec(), 500, 0.0).is_err());
    }
}
