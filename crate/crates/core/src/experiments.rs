//! Monte-Carlo harnesses comparing sampled networks with their continuum
//! limits: value concentration, cutoff convergence, transfer of the optimal
//! infusion, and the single-block infusion curves.

use rayon::prelude::*;

use crate::bailout::{apply_infusion, lift_to_finite, optimal_infusion};
use crate::equilibrium::{SolveStrategy, SolvencyVector, ValuationSolver};
use crate::error::{Error, Result};
use crate::graphon::{
    build_graphon, putative_block_values, solve_extremal_cutoffs, spillover_matrix,
};
use crate::model::{
    assign_blocks, block_regular_for, cross_holdings, endowment_vector, firm_labels, sample_sbm,
    spectral_deviation, BlockSpec,
};
use crate::report::{fmt_g17, Table};
use crate::Side;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub experiment: &'static str,
    pub n: usize,
    pub seed: u64,
    /// Zero-based block, for per-block metrics.
    pub block: Option<usize>,
    pub metric: String,
    pub value: f64,
}

impl ExperimentRow {
    fn new(
        experiment: &'static str,
        n: usize,
        seed: u64,
        block: Option<usize>,
        metric: &str,
        value: f64,
    ) -> Self {
        Self {
            experiment,
            n,
            seed,
            block,
            metric: metric.to_string(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaRule {
    /// Firms at or above their block's maximal graphon cutoff are solvent.
    FromGraphonCutoffs,
    AllSolvent,
}

impl KappaRule {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaRule::FromGraphonCutoffs => "from_graphon_cutoffs",
            KappaRule::AllSolvent => "all_solvent",
        }
    }
}

fn check_grid(n_list: &[usize], seeds: &[u64]) -> Result<()> {
    if n_list.is_empty() || seeds.is_empty() {
        return Err(Error::Parameter("need at least one n and one seed".into()));
    }
    Ok(())
}

fn pairs(n_list: &[usize], seeds: &[u64]) -> Vec<(usize, u64)> {
    n_list
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect()
}

/// Order by (experiment, n, seed, block), keeping metric order within ties.
pub fn sort_rows(rows: &mut [ExperimentRow]) {
    rows.sort_by(|a, b| {
        (a.experiment, a.n, a.seed, a.block).cmp(&(b.experiment, b.n, b.seed, b.block))
    });
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    Some(if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    })
}

/// Median of `metric` over seeds at a given `n` and block.
pub fn median_of(
    rows: &[ExperimentRow],
    metric: &str,
    n: usize,
    block: Option<usize>,
) -> Option<f64> {
    let mut v: Vec<f64> = rows
        .iter()
        .filter(|r| r.metric == metric && r.n == n && r.block == block)
        .map(|r| r.value)
        .collect();
    median(&mut v)
}

/// CSV table with a leading comment recording the seed count.
pub fn rows_table(rows: &[ExperimentRow], comment: &str) -> Table {
    let seeds: std::collections::BTreeSet<u64> = rows.iter().map(|r| r.seed).collect();
    let mut t = Table::new(["experiment", "n", "seed", "block", "metric", "value"])
        .with_comment(format!("seeds={} {comment}", seeds.len()));
    for r in rows {
        t.push(vec![
            r.experiment.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.block.map(|k| (k + 1).to_string()).unwrap_or_default(),
            r.metric.clone(),
            fmt_g17(r.value),
        ]);
    }
    t
}

fn kappa_for(spec: &BlockSpec, n: usize, rule: KappaRule) -> Result<SolvencyVector> {
    Ok(match rule {
        KappaRule::AllSolvent => SolvencyVector::all_solvent(n),
        KappaRule::FromGraphonCutoffs => {
            let g = build_graphon(spec)?;
            let x = solve_extremal_cutoffs(&g, Side::Maximal)?;
            let blocks = assign_blocks(spec, n);
            SolvencyVector::new(
                firm_labels(n)
                    .iter()
                    .zip(&blocks)
                    .map(|(&l, &k)| l >= x.x[k])
                    .collect(),
            )
        }
    })
}

/// Sup-norm gap between values on the sampled network and on the
/// block-regular clique for a fixed labeling, with `‖C − C̄‖₂` and its
/// concentration bound.
pub fn concentration_run(
    spec: &BlockSpec,
    rule: KappaRule,
    n_list: &[usize],
    seeds: &[u64],
    alpha: f64,
) -> Result<Vec<ExperimentRow>> {
    check_grid(n_list, seeds)?;
    const ID: &str = "concentration";
    let mut rows = Vec::new();
    for &n in n_list {
        let kappa = kappa_for(spec, n, rule)?;
        let e = endowment_vector(spec, n);
        let blocks = assign_blocks(spec, n);
        let regular = block_regular_for(spec, &blocks)?;
        let v_bar = ValuationSolver::new(&regular, &e, spec.failure_cost(), SolveStrategy::Auto)?
            .solve(&kappa)?
            .values;
        let per_seed: Vec<Result<Vec<ExperimentRow>>> = seeds
            .par_iter()
            .map(|&seed| {
                let net = sample_sbm(spec, n, seed)?;
                let c = cross_holdings(&net, spec.exposure());
                let v = ValuationSolver::new(&c, &e, spec.failure_cost(), SolveStrategy::Auto)?
                    .solve(&kappa)?
                    .values;
                let sup = v
                    .iter()
                    .zip(&v_bar)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let dev = spectral_deviation(&c, &regular, spec, alpha, seed)?;
                Ok(vec![
                    ExperimentRow::new(ID, n, seed, None, "sup_deviation", sup),
                    ExperimentRow::new(ID, n, seed, None, "lambda_norm", dev.lambda_norm),
                    ExperimentRow::new(ID, n, seed, None, "lemma_bound", dev.bound),
                ])
            })
            .collect();
        for r in per_seed {
            rows.extend(r?);
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Largest insolvent label and smallest solvent label of each block, with
/// `t_{k−1}` (no insolvent firm) and `t_k` (no solvent firm) as sentinels.
pub fn block_extremes(spec: &BlockSpec, solvency: &SolvencyVector) -> Vec<(f64, f64)> {
    let n = solvency.len();
    let labels = firm_labels(n);
    let blocks = assign_blocks(spec, n);
    (0..spec.m())
        .map(|k| {
            let (t0, t1) = spec.interval(k);
            let mut i_bar = t0;
            let mut i_under = t1;
            for i in (0..n).filter(|&i| blocks[i] == k) {
                if solvency.is_solvent(i) {
                    i_under = i_under.min(labels[i]);
                } else {
                    i_bar = i_bar.max(labels[i]);
                }
            }
            (i_bar, i_under)
        })
        .collect()
}

/// Finite extremal-equilibrium insolvency fronts against graphon cutoffs.
pub fn cutoff_convergence_run(
    spec: &BlockSpec,
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<ExperimentRow>> {
    check_grid(n_list, seeds)?;
    const ID: &str = "cutoffs";
    let g = build_graphon(spec)?;
    let mut targets = Vec::new();
    for side in [Side::Maximal, Side::Minimal] {
        let x = solve_extremal_cutoffs(&g, side)?;
        let b = spillover_matrix(&g, &x)?;
        if side == Side::Maximal && !b.stable {
            return Err(Error::Unstable { rho: b.rho });
        }
        targets.push((side, x));
    }
    let results: Vec<Result<Vec<ExperimentRow>>> = pairs(n_list, seeds)
        .into_par_iter()
        .map(|(n, seed)| {
            let net = sample_sbm(spec, n, seed)?;
            let c = cross_holdings(&net, spec.exposure());
            let e = endowment_vector(spec, n);
            let solver = ValuationSolver::new(&c, &e, spec.failure_cost(), SolveStrategy::Auto)?;
            let mut out = Vec::new();
            for (side, x) in &targets {
                let eq = solver.extremal(spec.threshold(), *side)?;
                let tag = side.as_str();
                for (k, (i_bar, i_under)) in
                    block_extremes(spec, &eq.solvency).into_iter().enumerate()
                {
                    let b = Some(k);
                    out.push(ExperimentRow::new(
                        ID,
                        n,
                        seed,
                        b,
                        &format!("x_star_{tag}"),
                        x.x[k],
                    ));
                    out.push(ExperimentRow::new(
                        ID,
                        n,
                        seed,
                        b,
                        &format!("i_bar_{tag}"),
                        i_bar,
                    ));
                    out.push(ExperimentRow::new(
                        ID,
                        n,
                        seed,
                        b,
                        &format!("i_under_{tag}"),
                        i_under,
                    ));
                    out.push(ExperimentRow::new(
                        ID,
                        n,
                        seed,
                        b,
                        &format!("abs_dev_i_bar_{tag}"),
                        (i_bar - x.x[k]).abs(),
                    ));
                    out.push(ExperimentRow::new(
                        ID,
                        n,
                        seed,
                        b,
                        &format!("abs_dev_i_under_{tag}"),
                        (i_under - x.x[k]).abs(),
                    ));
                }
            }
            Ok(out)
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Solvent fraction of sampled networks after the lifted optimal infusion.
pub fn bailout_transfer_run(
    spec: &BlockSpec,
    budget: f64,
    epsilon: f64,
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<ExperimentRow>> {
    check_grid(n_list, seeds)?;
    const ID: &str = "transfer";
    let g = build_graphon(spec)?;
    let plan = optimal_infusion(&g, budget)?;
    let after = apply_infusion(&g, &plan)?;
    let infused = g.with_profiles(plan.infused_profiles(&g)?)?;
    let target = infused.solvent_measure(&after);
    let mut rows = Vec::new();
    for &n in n_list {
        let lift = lift_to_finite(&plan, spec, n, epsilon)?;
        let e: Vec<f64> = endowment_vector(spec, n)
            .iter()
            .zip(&lift.iota)
            .map(|(a, b)| a + b)
            .collect();
        let per_seed: Vec<Result<Vec<ExperimentRow>>> = seeds
            .par_iter()
            .map(|&seed| {
                let net = sample_sbm(spec, n, seed)?;
                let c = cross_holdings(&net, spec.exposure());
                let eq = ValuationSolver::new(&c, &e, spec.failure_cost(), SolveStrategy::Auto)?
                    .extremal(spec.threshold(), Side::Maximal)?;
                let frac = eq.solvency.count_solvent() as f64 / n as f64;
                Ok(vec![
                    ExperimentRow::new(ID, n, seed, None, "solvent_fraction", frac),
                    ExperimentRow::new(ID, n, seed, None, "graphon_solvent_measure", target),
                    ExperimentRow::new(ID, n, seed, None, "budget_per_firm", lift.total / n as f64),
                ])
            })
            .collect();
        for r in per_seed {
            rows.extend(r?);
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePoint {
    pub x: f64,
    pub endowment: f64,
    pub endowment_post: f64,
    pub value_pre: f64,
    pub value_post: f64,
    pub iota: f64,
}

/// Pre- and post-infusion endowments and values on an equispaced grid of a
/// single-block spec.
pub fn figure_infusion_run(
    spec: &BlockSpec,
    budget: f64,
    points: usize,
) -> Result<Vec<FigurePoint>> {
    if spec.m() != 1 {
        return Err(Error::Parameter(format!(
            "infusion figure needs a single block, got {}",
            spec.m()
        )));
    }
    if points < 2 {
        return Err(Error::Parameter("need at least two grid points".into()));
    }
    let g = build_graphon(spec)?;
    let plan = optimal_infusion(&g, budget)?;
    let before = solve_extremal_cutoffs(&g, Side::Maximal)?;
    let infused = g.with_profiles(plan.infused_profiles(&g)?)?;
    let after = solve_extremal_cutoffs(&infused, Side::Maximal)?;
    let pre = putative_block_values(&g, &before);
    let post = putative_block_values(&infused, &after);
    Ok(firm_labels(points)
        .into_iter()
        .map(|x| {
            let iota = plan.infusion_at(&g, x);
            let endowment = g.profile(0).eval(x);
            FigurePoint {
                x,
                endowment,
                endowment_post: endowment + iota,
                value_pre: pre.value_at(x),
                value_post: post.value_at(x),
                iota,
            }
        })
        .collect())
}

pub fn figure_table(points: &[FigurePoint]) -> Table {
    let mut t = Table::new([
        "x",
        "endowment",
        "endowment_post",
        "value_pre",
        "value_post",
        "iota",
    ]);
    for p in points {
        t.push(
            [
                p.x,
                p.endowment,
                p.endowment_post,
                p.value_pre,
                p.value_post,
                p.iota,
            ]
            .iter()
            .map(|&v| fmt_g17(v))
            .collect(),
        );
    }
    t
}
