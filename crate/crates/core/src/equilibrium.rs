//! Finite-network valuations with bankruptcy costs.
//!
//! For a putative solvency vector `κ` the book values solve the linear system
//! `V = e + C V − β (1 − κ)`. An equilibrium is a `κ` whose values reproduce
//! it: `V_i ≥ v*` exactly when `κ_i = 1`. The equilibria form a complete
//! lattice; the greatest and least elements are reached by monotone
//! iteration from the all-solvent and all-insolvent labelings.

use nalgebra::{DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::model::HoldingsMatrix;
use crate::Side;

/// Largest network solved by dense LU under [`SolveStrategy::Auto`].
pub const DIRECT_SOLVE_MAX_N: usize = 2000;
/// Sup-norm residual every returned valuation profile must meet.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Stopping tolerance of the Neumann iteration.
pub const ITERATIVE_TOL: f64 = 1e-12;
pub const ITERATIVE_MAX_ITER: usize = 100_000;

/// Putative solvency labels `κ ∈ {0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolvencyVector(Vec<bool>);

impl SolvencyVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn all_solvent(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn all_insolvent(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// The `n` low bits of `mask`, bit `i` for firm `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_solvent(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_solvent(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Pointwise order `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationProfile {
    pub values: Vec<f64>,
    /// `‖V − (e + C V − β(1 − κ))‖∞`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub values: ValuationProfile,
    pub solvency: SolvencyVector,
    pub side: Side,
    /// Rounds in which the labeling changed.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveStrategy {
    /// Dense LU up to [`DIRECT_SOLVE_MAX_N`] firms, Neumann iteration above.
    #[default]
    Auto,
    Direct,
    Iterative,
}

/// Reusable solver for `(I − C) V = e − β(1 − κ)` across many `κ`.
///
/// Under the direct strategy `I − C` is factored once at construction.
pub struct ValuationSolver<'a> {
    holdings: &'a HoldingsMatrix,
    endowments: Vec<f64>,
    failure_cost: f64,
    lu: Option<LU<f64, Dyn, Dyn>>,
}

impl<'a> ValuationSolver<'a> {
    pub fn new(
        holdings: &'a HoldingsMatrix,
        endowments: &[f64],
        failure_cost: f64,
        strategy: SolveStrategy,
    ) -> Result<Self> {
        let n = holdings.n();
        if endowments.len() != n {
            return Err(Error::Parameter(format!(
                "{} endowments for {n} firms",
                endowments.len()
            )));
        }
        if holdings.max_column_sum() >= 1.0 {
            return Err(Error::Parameter(
                "holdings column sums must stay below one".into(),
            ));
        }
        let direct = match strategy {
            SolveStrategy::Auto => n <= DIRECT_SOLVE_MAX_N,
            SolveStrategy::Direct => true,
            SolveStrategy::Iterative => false,
        };
        let lu = direct.then(|| {
            let mut a = -holdings.entries().clone();
            for i in 0..n {
                a[(i, i)] += 1.0;
            }
            a.lu()
        });
        Ok(Self {
            holdings,
            endowments: endowments.to_vec(),
            failure_cost,
            lu,
        })
    }

    pub fn n(&self) -> usize {
        self.endowments.len()
    }

    pub fn endowments(&self) -> &[f64] {
        &self.endowments
    }

    fn rhs(&self, kappa: &SolvencyVector) -> DVector<f64> {
        DVector::from_iterator(
            self.n(),
            self.endowments
                .iter()
                .zip(kappa.bits())
                .map(|(&e, &solvent)| if solvent { e } else { e - self.failure_cost }),
        )
    }

    /// `rhs + C v − v`.
    fn defect(&self, rhs: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut r = self.holdings.entries() * v;
        r += rhs;
        r -= v;
        r
    }

    pub fn solve(&self, kappa: &SolvencyVector) -> Result<ValuationProfile> {
        self.solve_from(kappa, None)
    }

    /// Solve for `V(κ)`, optionally warm-starting the iterative strategy.
    pub fn solve_from(
        &self,
        kappa: &SolvencyVector,
        warm: Option<&[f64]>,
    ) -> Result<ValuationProfile> {
        if kappa.len() != self.n() {
            return Err(Error::Parameter(format!(
                "solvency vector has length {}, expected {}",
                kappa.len(),
                self.n()
            )));
        }
        let rhs = self.rhs(kappa);
        let (v, residual) = match &self.lu {
            Some(lu) => {
                let mut v = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Internal("I - C is singular".into()))?;
                let mut r = self.defect(&rhs, &v);
                if r.amax() > RESIDUAL_TOL {
                    // one step of iterative refinement
                    v += lu.solve(&r).expect("factorization already succeeded");
                    r = self.defect(&rhs, &v);
                }
                (v, r.amax())
            }
            None => {
                let mut v = match warm {
                    Some(w) if w.len() == self.n() => DVector::from_column_slice(w),
                    _ => rhs.clone(),
                };
                let mut residual = f64::INFINITY;
                for _ in 0..ITERATIVE_MAX_ITER {
                    let r = self.defect(&rhs, &v);
                    residual = r.amax();
                    if residual <= ITERATIVE_TOL {
                        break;
                    }
                    v += r;
                }
                (v, residual)
            }
        };
        if !(residual <= RESIDUAL_TOL) {
            return Err(Error::NonConvergence {
                what: "valuation solve",
                iterations: if self.lu.is_some() {
                    2
                } else {
                    ITERATIVE_MAX_ITER
                },
                residual,
            });
        }
        Ok(ValuationProfile {
            values: v.iter().copied().collect(),
            residual,
        })
    }

    /// Extremal equilibrium by monotone iteration from the top (maximal) or
    /// bottom (minimal) of the lattice of labelings.
    pub fn extremal(&self, threshold: f64, side: Side) -> Result<EquilibriumResult> {
        let n = self.n();
        let mut kappa = match side {
            Side::Maximal => SolvencyVector::all_solvent(n),
            Side::Minimal => SolvencyVector::all_insolvent(n),
        };
        let mut profile = self.solve(&kappa)?;
        let mut rounds = 0;
        loop {
            let next: Vec<bool> = match side {
                Side::Maximal => profile.values.iter().map(|&v| v >= threshold).collect(),
                Side::Minimal => kappa
                    .bits()
                    .iter()
                    .zip(&profile.values)
                    .map(|(&k, &v)| k || v >= threshold)
                    .collect(),
            };
            if next == kappa.bits() {
                break;
            }
            rounds += 1;
            if rounds > n {
                return Err(Error::Internal(format!(
                    "monotone iteration exceeded {n} rounds"
                )));
            }
            kappa = SolvencyVector::new(next);
            profile = self.solve_from(&kappa, Some(&profile.values))?;
        }
        Ok(EquilibriumResult {
            values: profile,
            solvency: kappa,
            side,
            iterations: rounds,
        })
    }
}

/// `V(κ) = (I − C)⁻¹ (e − β(1 − κ))`.
pub fn putative_values(
    holdings: &HoldingsMatrix,
    endowments: &[f64],
    failure_cost: f64,
    kappa: &SolvencyVector,
) -> Result<ValuationProfile> {
    ValuationSolver::new(holdings, endowments, failure_cost, SolveStrategy::Auto)?.solve(kappa)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<usize>,
}

/// Indices where `V_i ≥ v*` disagrees with `κ_i`; ties count as solvent.
pub fn feasibility(values: &[f64], kappa: &SolvencyVector, threshold: f64) -> Result<Feasibility> {
    if values.len() != kappa.len() {
        return Err(Error::Parameter(format!(
            "{} values for {} labels",
            values.len(),
            kappa.len()
        )));
    }
    let violations: Vec<usize> = values
        .iter()
        .zip(kappa.bits())
        .enumerate()
        .filter(|(_, (&v, &k))| (v >= threshold) != k)
        .map(|(i, _)| i)
        .collect();
    Ok(Feasibility {
        feasible: violations.is_empty(),
        violations,
    })
}

pub fn extremal_equilibrium(
    holdings: &HoldingsMatrix,
    endowments: &[f64],
    failure_cost: f64,
    threshold: f64,
    side: Side,
) -> Result<EquilibriumResult> {
    ValuationSolver::new(holdings, endowments, failure_cost, SolveStrategy::Auto)?
        .extremal(threshold, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pair() -> HoldingsMatrix {
        HoldingsMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0])).unwrap()
    }

    #[test]
    fn no_cross_holdings() {
        let c = HoldingsMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        let kappa = SolvencyVector::new(vec![true, false, true]);
        let v = putative_values(&c, &[1.0, 2.0, 3.0], 0.5, &kappa).unwrap();
        assert_eq!(v.values, vec![1.0, 1.5, 3.0]);
    }

    #[test]
    fn two_firm_solves() {
        let v =
            putative_values(&pair(), &[1.0, 1.0], 1.0, &SolvencyVector::all_solvent(2)).unwrap();
        assert!((v.values[0] - 2.0).abs() < 1e-14 && (v.values[1] - 2.0).abs() < 1e-14);
        let v =
            putative_values(&pair(), &[1.0, 1.0], 1.0, &SolvencyVector::all_insolvent(2)).unwrap();
        assert!(v.values.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn feasibility_examples() {
        let solvent = SolvencyVector::all_solvent(2);
        let insolvent = SolvencyVector::all_insolvent(2);
        assert!(feasibility(&[2.0, 2.0], &solvent, 1.9).unwrap().feasible);
        assert_eq!(
            feasibility(&[2.0, 2.0], &insolvent, 1.9)
                .unwrap()
                .violations,
            vec![0, 1]
        );
        assert!(feasibility(&[0.0, 0.0], &insolvent, 1.9).unwrap().feasible);
        // tie counts as solvent
        assert!(
            feasibility(&[1.9], &SolvencyVector::all_solvent(1), 1.9)
                .unwrap()
                .feasible
        );
    }

    #[test]
    fn two_firm_multiplicity() {
        let e = [1.0, 1.0];
        let max = extremal_equilibrium(&pair(), &e, 1.0, 1.9, Side::Maximal).unwrap();
        assert_eq!(max.solvency, SolvencyVector::all_solvent(2));
        assert!((max.values.values[0] - 2.0).abs() < 1e-14);
        assert_eq!(max.iterations, 0);
        let min = extremal_equilibrium(&pair(), &e, 1.0, 1.9, Side::Minimal).unwrap();
        assert_eq!(min.solvency, SolvencyVector::all_insolvent(2));
        assert!(min.values.values.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn high_threshold_collapses_in_one_round() {
        let e = [1.0, 1.0];
        let max = extremal_equilibrium(&pair(), &e, 1.0, 2.1, Side::Maximal).unwrap();
        let min = extremal_equilibrium(&pair(), &e, 1.0, 2.1, Side::Minimal).unwrap();
        assert_eq!(max.solvency, SolvencyVector::all_insolvent(2));
        assert_eq!(max.iterations, 1);
        assert_eq!(min.solvency, max.solvency);
    }

    #[test]
    fn decoupled_firms() {
        let c = HoldingsMatrix::new(DMatrix::zeros(4, 4)).unwrap();
        let e = [0.5, 1.5, 0.9, 1.1];
        let max = extremal_equilibrium(&c, &e, 0.3, 1.0, Side::Maximal).unwrap();
        assert_eq!(max.solvency.bits(), &[false, true, false, true]);
        assert_eq!(max.iterations, 1);
    }

    #[test]
    fn iterative_matches_direct() {
        let n = 30;
        let c = HoldingsMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if (i * 7 + j * 3) % 4 == 0 {
                0.6 / n as f64 * 4.0 / 1.5
            } else {
                0.0
            }
        }))
        .unwrap();
        let e: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let kappa = SolvencyVector::new((0..n).map(|i| i % 3 != 0).collect());
        let d = ValuationSolver::new(&c, &e, 0.4, SolveStrategy::Direct).unwrap();
        let it = ValuationSolver::new(&c, &e, 0.4, SolveStrategy::Iterative).unwrap();
        let a = d.solve(&kappa).unwrap();
        let b = it.solve(&kappa).unwrap();
        assert!(b.residual <= ITERATIVE_TOL);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(putative_values(&pair(), &[1.0], 1.0, &SolvencyVector::all_solvent(2)).is_err());
        assert!(feasibility(&[1.0], &SolvencyVector::all_solvent(2), 0.0).is_err());
    }
}
