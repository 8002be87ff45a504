//! Endowment-adjusted swaps of solvency between an interval `I` and its
//! translate `I + t` inside one block, producing further (non-extremal)
//! fixed points of the block graphon.

use super::{BlockGraphon, BlockValues};
use crate::error::{Error, Result};

const MARGIN_GRID: usize = 1024;

/// 5-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// A value function on the graphon's label space.
pub trait ValueField {
    fn graphon(&self) -> &BlockGraphon;
    fn value_at(&self, x: f64) -> f64;
    /// Points where the field may be discontinuous or change slope.
    fn breakpoints(&self) -> Vec<f64>;
}

impl ValueField for BlockValues<'_> {
    fn graphon(&self) -> &BlockGraphon {
        BlockValues::graphon(self)
    }

    fn value_at(&self, x: f64) -> f64 {
        BlockValues::value_at(self, x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let g = BlockValues::graphon(self);
        let mut out = self.cutoffs().to_vec();
        for p in g.profiles() {
            out.extend(p.knots());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapKind {
    Identity,
    /// `I` insolvent with margin, `I + t` solvent with margin.
    InsolventToSolvent,
    /// `I` solvent, `I + t` insolvent.
    SolventToInsolvent,
}

#[derive(Debug, Clone)]
pub struct SwappedValues<'a, V: ValueField> {
    base: &'a V,
    block: usize,
    lo: f64,
    hi: f64,
    shift: f64,
    kind: SwapKind,
}

impl<V: ValueField> SwappedValues<'_, V> {
    pub fn kind(&self) -> SwapKind {
        self.kind
    }
}

impl<V: ValueField> ValueField for SwappedValues<'_, V> {
    fn graphon(&self) -> &BlockGraphon {
        self.base.graphon()
    }

    fn value_at(&self, x: f64) -> f64 {
        if self.kind == SwapKind::Identity {
            return self.base.value_at(x);
        }
        let f = self.base.graphon().profile(self.block);
        let t = self.shift;
        if self.lo <= x && x < self.hi {
            self.base.value_at(x + t) - (f.eval(x + t) - f.eval(x))
        } else if self.lo + t <= x && x < self.hi + t {
            self.base.value_at(x - t) + (f.eval(x) - f.eval(x - t))
        } else {
            self.base.value_at(x)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let base = self.base.breakpoints();
        let t = self.shift;
        let mut out = base.clone();
        out.extend(base.iter().map(|b| b - t));
        out.extend(base.iter().map(|b| b + t));
        out.extend([self.lo, self.hi, self.lo + t, self.hi + t]);
        out
    }
}

/// Swap the values on `I = [lo, hi)` and `I + t` within block `k`.
///
/// Requires `t ≥ hi − lo`, both intervals inside block `k`, and either
/// `v < v* − Δ` on `I` with `v ≥ v* + Δ` on `I + t`, or `v ≥ v*` on `I` with
/// `v < v*` on `I + t`, where `Δ = sup_I (e_k(x + t) − e_k(x))`. The margins
/// are checked on a grid.
pub fn swap_construct<V: ValueField>(
    values: &V,
    block: usize,
    interval: (f64, f64),
    shift: f64,
) -> Result<SwappedValues<'_, V>> {
    let g = values.graphon();
    if block >= g.m() {
        return Err(Error::Parameter(format!("block {block} out of range")));
    }
    let (lo, hi) = interval;
    let identity = SwappedValues {
        base: values,
        block,
        lo,
        hi,
        shift,
        kind: SwapKind::Identity,
    };
    if shift == 0.0 || !(hi > lo) {
        return Ok(identity);
    }
    let (b0, b1) = g.interval(block);
    if shift < hi - lo {
        return Err(Error::Precondition(format!(
            "shift {shift} is smaller than the interval length {}",
            hi - lo
        )));
    }
    if lo < b0 || hi + shift > b1 {
        return Err(Error::Precondition(format!(
            "[{lo}, {hi}) and its translate by {shift} must lie in block [{b0}, {b1}]"
        )));
    }
    let f = g.profile(block);
    let v_star = g.threshold();
    let grid: Vec<f64> = (0..MARGIN_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / MARGIN_GRID as f64)
        .collect();
    let delta = grid
        .iter()
        .map(|&x| f.eval(x + shift) - f.eval(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let first = values.value_at(lo);
    let kind = if first < v_star {
        let ok = grid.iter().all(|&x| {
            values.value_at(x) < v_star - delta && values.value_at(x + shift) >= v_star + delta
        });
        if !ok {
            return Err(Error::Precondition(format!(
                "margin {delta} violated: need v < v* - Δ on I and v ≥ v* + Δ on I + t"
            )));
        }
        SwapKind::InsolventToSolvent
    } else {
        let ok = grid
            .iter()
            .all(|&x| values.value_at(x) >= v_star && values.value_at(x + shift) < v_star);
        if !ok {
            return Err(Error::Precondition(
                "need v ≥ v* on I and v < v* on I + t".into(),
            ));
        }
        SwapKind::SolventToInsolvent
    };
    Ok(SwappedValues { kind, ..identity })
}

/// Block integrals `∫_{T_l} v` by Gauss–Legendre quadrature between the
/// field's breakpoints.
pub fn block_integrals<V: ValueField>(field: &V) -> Vec<f64> {
    let g = field.graphon();
    let bps = field.breakpoints();
    (0..g.m())
        .map(|l| {
            let (a, b) = g.interval(l);
            let mut pts: Vec<f64> = bps.iter().copied().filter(|&p| a < p && p < b).collect();
            pts.push(a);
            pts.push(b);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            pts.windows(2)
                .map(|w| {
                    let (x0, x1) = (w[0], w[1]);
                    let half = 0.5 * (x1 - x0);
                    let mid = 0.5 * (x0 + x1);
                    half * GL_NODES
                        .iter()
                        .zip(GL_WEIGHTS)
                        .map(|(z, wt)| wt * field.value_at(mid + half * z))
                        .sum::<f64>()
                })
                .sum()
        })
        .collect()
}

/// Sup over `grid` of `|v_x − (e(x) + Σ_l T_{kl} ∫_{T_l} v − β 1[v_x < v*])|`.
pub fn fixed_point_residual<V: ValueField>(field: &V, grid: &[f64]) -> f64 {
    let g = field.graphon();
    let integrals = block_integrals(field);
    let t = g.cross_shares();
    let spill: Vec<f64> = (0..g.m())
        .map(|k| (0..g.m()).map(|l| t[(k, l)] * integrals[l]).sum())
        .collect();
    grid.iter()
        .map(|&x| {
            let k = g.block_of(x);
            let v = field.value_at(x);
            let penalty = if v < g.threshold() {
                g.failure_cost()
            } else {
                0.0
            };
            (v - (g.profile(k).eval(x) + spill[k] - penalty)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{build_graphon, putative_block_values, CutoffVector};
    use crate::model::{Block, BlockSpec};

    fn graphon() -> BlockGraphon {
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

    fn grid() -> Vec<f64> {
        (0..10_000).map(|i| i as f64 / 9_999.0).collect()
    }

    #[test]
    fn non_extremal_cutoff_swap_is_a_fixed_point() {
        let g = graphon();
        let cut = CutoffVector::new(&g, &[0.9]).unwrap();
        let v = putative_block_values(&g, &cut);
        assert!(fixed_point_residual(&v, &grid()) < 1e-12);
        let s = swap_construct(&v, 0, (0.87, 0.88), 0.05).unwrap();
        assert_eq!(s.kind(), SwapKind::InsolventToSolvent);
        assert!(s.value_at(0.875) >= 2.0);
        assert!(s.value_at(0.925) < 2.0);
        assert!(fixed_point_residual(&s, &grid()) < 1e-10);
    }

    #[test]
    fn identity_swaps() {
        let g = graphon();
        let cut = CutoffVector::new(&g, &[0.9]).unwrap();
        let v = putative_block_values(&g, &cut);
        let s = swap_construct(&v, 0, (0.87, 0.88), 0.0).unwrap();
        let d = swap_construct(&v, 0, (0.5, 0.5), 0.1).unwrap();
        for x in grid() {
            assert_eq!(s.value_at(x), v.value_at(x));
            assert_eq!(d.value_at(x), v.value_at(x));
        }
    }

    #[test]
    fn margin_violation_is_rejected() {
        let g = graphon();
        let cut = CutoffVector::new(&g, &[5.0 / 6.0]).unwrap();
        let v = putative_block_values(&g, &cut);
        let err = swap_construct(&v, 0, (0.8, 0.81), 0.05).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
