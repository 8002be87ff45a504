mod common;

use contagion_core::bailout::{apply_infusion, optimal_infusion};
use contagion_core::equilibrium::{feasibility, putative_values, SolveStrategy, ValuationSolver};
use contagion_core::graphon::{cutoff_residuals, EndowmentProfile};
use contagion_core::report::fmt_g17;
use contagion_core::{
    build_graphon, cross_holdings, is_feasible_cutoff, presets, sample_sbm, solve_extremal_cutoffs,
    Block, BlockSpec, Side, SolvencyVector,
};
use proptest::prelude::*;

fn two_block_spec() -> impl Strategy<Value = BlockSpec> {
    (
        0.2f64..0.8,
        0.0f64..1.0,
        0.5f64..2.0,
        0.0f64..1.0,
        0.5f64..2.0,
        proptest::array::uniform4(0.05f64..1.0),
        0.1f64..0.7,
        0.05f64..0.8,
        0.0f64..1.0,
    )
        .prop_map(|(s, lo1, w1, lo2, w2, g, c, beta, u)| {
            let blocks = vec![
                Block {
                    size: s,
                    endow_lo: lo1,
                    endow_hi: lo1 + w1,
                },
                Block {
                    size: 1.0 - s,
                    endow_lo: lo2,
                    endow_hi: lo2 + w2,
                },
            ];
            let link = vec![vec![g[0], g[1]], vec![g[2], g[3]]];
            // Spread v* over the range where the cutoffs can be anywhere.
            let v_lo = lo1.min(lo2);
            let v_hi = (lo1 + w1).max(lo2 + w2) / (1.0 - c);
            BlockSpec::new(blocks, link, c, beta, v_lo + u * (v_hi - v_lo)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extremal_equilibria_match_enumeration(seed in any::<u64>(), n in 2usize..=10) {
        let inst = common::random_instance(seed, n);
        let oracle = common::enumerate_equilibria(&inst);
        let solver = ValuationSolver::new(&inst.holdings, &inst.endowments, inst.failure_cost, SolveStrategy::Direct).unwrap();
        let hi = solver.extremal(inst.threshold, Side::Maximal).unwrap();
        let lo = solver.extremal(inst.threshold, Side::Minimal).unwrap();
        prop_assert_eq!(hi.solvency.bits(), oracle.join.as_slice());
        prop_assert_eq!(lo.solvency.bits(), oracle.meet.as_slice());
        for eq in [&hi, &lo] {
            prop_assert!(feasibility(&eq.values.values, &eq.solvency, inst.threshold).unwrap().feasible);
            prop_assert!(eq.values.residual < 1e-10);
        }
        for kappa in &oracle.feasible {
            let k = SolvencyVector::new(kappa.clone());
            prop_assert!(lo.solvency.le(&k) && k.le(&hi.solvency));
        }
    }

    #[test]
    fn values_are_monotone_in_labeling(seed in any::<u64>(), n in 2usize..=12, mask in any::<u64>(), extra in any::<u64>()) {
        let inst = common::random_instance(seed, n);
        let k1 = SolvencyVector::from_mask(mask, n);
        let k2 = SolvencyVector::from_mask(mask | extra, n);
        let v1 = putative_values(&inst.holdings, &inst.endowments, inst.failure_cost, &k1).unwrap();
        let v2 = putative_values(&inst.holdings, &inst.endowments, inst.failure_cost, &k2).unwrap();
        for (a, b) in v1.values.iter().zip(&v2.values) {
            prop_assert!(*a <= b + 1e-12);
        }
    }

    #[test]
    fn direct_and_iterative_solves_agree(seed in any::<u64>(), n in 2usize..=12, mask in any::<u64>()) {
        let inst = common::random_instance(seed, n);
        let k = SolvencyVector::from_mask(mask, n);
        let d = ValuationSolver::new(&inst.holdings, &inst.endowments, inst.failure_cost, SolveStrategy::Direct).unwrap().solve(&k).unwrap();
        let i = ValuationSolver::new(&inst.holdings, &inst.endowments, inst.failure_cost, SolveStrategy::Iterative).unwrap().solve(&k).unwrap();
        for (a, b) in d.values.iter().zip(&i.values) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn holdings_columns_sum_to_exposure(seed in any::<u64>(), n in 2usize..60, c in 0.05f64..0.95) {
        let spec = presets::two_block().with_exposure(c).unwrap();
        let net = sample_sbm(&spec, n, seed).unwrap();
        let h = cross_holdings(&net, c);
        for &s in h.column_sums() {
            prop_assert!((s - c).abs() < 1e-12);
        }
        prop_assert!(h.entries().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), n in 2usize..80) {
        let spec = presets::two_block();
        let a = sample_sbm(&spec, n, seed).unwrap();
        let b = sample_sbm(&spec, n, seed).unwrap();
        prop_assert_eq!(a.adjacency(), b.adjacency());
    }

    #[test]
    fn graphon_cutoffs_are_ordered_fixed_points(spec in two_block_spec()) {
        let g = build_graphon(&spec).unwrap();
        let hi = solve_extremal_cutoffs(&g, Side::Maximal).unwrap();
        let lo = solve_extremal_cutoffs(&g, Side::Minimal).unwrap();
        for k in 0..2 {
            prop_assert!(hi.x[k] <= lo.x[k] + 1e-12);
        }
        prop_assert!(is_feasible_cutoff(&g, &hi));
        prop_assert!(is_feasible_cutoff(&g, &lo));
        for side in [Side::Maximal, Side::Minimal] {
            let x = if side == Side::Maximal { &hi } else { &lo };
            for r in cutoff_residuals(&g, x, side).into_iter().flatten() {
                prop_assert!(r.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn optimal_plan_spends_budget_and_helps(budget in 0.0f64..0.03) {
        let g = build_graphon(&presets::two_block()).unwrap();
        let plan = optimal_infusion(&g, budget).unwrap();
        prop_assert!((plan.budget_used - budget).abs() <= 1e-10);
        let before = solve_extremal_cutoffs(&g, Side::Maximal).unwrap();
        let after = apply_infusion(&g, &plan).unwrap();
        for k in 0..2 {
            prop_assert!(after.x[k] <= before.x[k] + 1e-9);
            let b = &plan.blocks[k];
            prop_assert!((b.support_hi - b.support_lo - b.y).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_inverse_is_left_inverse(x0 in -1.0f64..1.0, w in 0.1f64..2.0, y0 in -1.0f64..1.0, h in 0.1f64..3.0, u in 0.0f64..1.0) {
        let p = EndowmentProfile::linear(x0, x0 + w, y0, y0 + h);
        let x = x0 + u * w;
        prop_assert!((p.lower_inverse(p.eval(x)) - x).abs() < 1e-12 * (1.0 + x.abs()) * (1.0 + h / w));
        prop_assert_eq!(p.lower_inverse(y0 - 1.0), x0);
        prop_assert_eq!(p.lower_inverse(y0 + h + 1.0), x0 + w);
    }

    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn block_densities_approach_link_probabilities() {
    let spec = presets::two_block();
    let net = sample_sbm(&spec, 2000, 3).unwrap();
    for k in 0..2 {
        for l in 0..2 {
            assert!((net.block_density(k, l) - spec.link(k, l)).abs() < 0.01);
        }
    }
}

#[test]
fn single_block_cutoff_and_plan_closed_forms() {
    let g = build_graphon(&presets::single_block()).unwrap();
    let x = solve_extremal_cutoffs(&g, Side::Maximal).unwrap();
    assert!((x.x[0] - 5.0 / 6.0).abs() < 1e-12);
    let plan = optimal_infusion(&g, 0.02).unwrap();
    let after = apply_infusion(&g, &plan).unwrap();
    assert!((after.x[0] - 7.0 / 15.0).abs() < 1e-8);
}
